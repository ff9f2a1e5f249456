//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_intervals: 2_000,
        }
    }
}

/// The 15 Kronrod nodes and weights on `[-1, 1]`, for tensor-product rules.
pub fn kronrod15_rule() -> [(f64, f64); 15] {
    let mut out = [(0.0, 0.0); 15];
    for i in 0..7 {
        out[i] = (-XGK[i], WGK[i]);
        out[14 - i] = (XGK[i], WGK[i]);
    }
    out[7] = (0.0, WGK[7]);
    out
}

fn kronrod_segment<F>(f: &mut F, lo: f64, hi: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, &x) in XGK.iter().take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx)? + f(center + dx)?;
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Ok((kronrod * half, ((kronrod - gauss) * half).abs()))
}

/// Integrates `f` over `[lo, hi]`, bisecting the worst interval until the
/// summed error estimate meets `max(abs_tol, rel_tol * |value|)`.
pub fn integrate<F>(mut f: F, lo: f64, hi: f64, cfg: &QuadConfig) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::domain(format!("bad integration interval [{lo}, {hi}]")));
    }
    if lo == hi {
        return Ok(Quadrature {
            value: 0.0,
            abs_error: 0.0,
        });
    }
    let (v, e) = kronrod_segment(&mut f, lo, hi)?;
    let mut pieces = vec![(lo, hi, v, e)];
    loop {
        let value: f64 = pieces.iter().map(|p| p.2).sum();
        let error: f64 = pieces.iter().map(|p| p.3).sum();
        if error <= cfg.abs_tol.max(cfg.rel_tol * value.abs()) {
            return Ok(Quadrature {
                value,
                abs_error: error,
            });
        }
        if pieces.len() >= cfg.max_intervals {
            return Err(Error::Convergence {
                context: format!("adaptive quadrature on [{lo}, {hi}]"),
                terms: pieces.len(),
                residual: error,
            });
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (a, b, _, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (a + b);
        let (v1, e1) = kronrod_segment(&mut f, a, mid)?;
        let (v2, e2) = kronrod_segment(&mut f, mid, b)?;
        pieces.push((a, mid, v1, e1));
        pieces.push((mid, b, v2, e2));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let q = integrate(|x| Ok(x.powi(6) - 3.0 * x), 0.0, 2.0, &QuadConfig::default()).unwrap();
        assert!((q.value - (128.0 / 7.0 - 6.0)).abs() < 1e-13);
    }

    #[test]
    fn peaked_integrand() {
        let q = integrate(|x| Ok((-x * x * 400.0).exp()), -1.0, 1.0, &QuadConfig::default()).unwrap();
        let want = std::f64::consts::PI.sqrt() / 20.0;
        assert!((q.value - want).abs() < 1e-11);
    }

    #[test]
    fn rule_weights_sum_to_two() {
        let s: f64 = kronrod15_rule().iter().map(|p| p.1).sum();
        assert!((s - 2.0).abs() < 1e-15);
    }

    #[test]
    fn errors_propagate() {
        let r = integrate(|_| Err(Error::Domain("x".into())), 0.0, 1.0, &QuadConfig::default());
        assert!(r.is_err());
    }
}
