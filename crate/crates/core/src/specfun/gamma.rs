//! Log-Gamma, Beta and digamma.

use std::f64::consts::PI;

use crate::error::{Error, Result};

// Lanczos approximation with g = 607/128 and 14 correction terms (Godfrey).
const LANCZOS_G_SHIFT: f64 = 5.242_187_5; // g + 1/2
const LANCZOS_C0: f64 = 0.999_999_999_999_997_1;
const LANCZOS_COEF: [f64; 14] = [
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_7e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Natural logarithm of the Gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::domain(format!("ln_gamma requires finite x > 0, got {x}")));
    }
    Ok(lanczos_ln_gamma(x))
}

fn lanczos_ln_gamma(x: f64) -> f64 {
    let tmp = x + LANCZOS_G_SHIFT;
    let head = (x + 0.5) * tmp.ln() - tmp;
    let mut ser = LANCZOS_C0;
    let mut y = x;
    for c in LANCZOS_COEF {
        y += 1.0;
        ser += c / y;
    }
    head + (SQRT_2PI * ser / x).ln()
}

/// `sin(pi x)` with the argument reduced exactly before scaling.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).floor(); // [0, 2)
    if r == 0.0 || r == 1.0 {
        return 0.0;
    }
    if r < 0.5 {
        (PI * r).sin()
    } else if r < 1.5 {
        (PI * (1.0 - r)).sin()
    } else {
        (PI * (r - 2.0)).sin()
    }
}

pub(crate) fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// `(ln|Γ(x)|, sign Γ(x))` for any finite `x` that is not a pole.
pub(crate) fn ln_gamma_signed(x: f64) -> (f64, f64) {
    if x > 0.0 {
        return (lanczos_ln_gamma(x), 1.0);
    }
    let s = sin_pi(x);
    let ln_abs = PI.ln() - s.abs().ln() - lanczos_ln_gamma(1.0 - x);
    (ln_abs, s.signum())
}

/// `1/Γ(x)`, zero at the poles.
#[cfg(test)]
fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    let (l, s) = ln_gamma_signed(x);
    s * (-l).exp()
}

/// `ln B(a, b)` for positive arguments.
pub fn ln_beta(a: f64, b: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0) {
        return Err(Error::domain(format!(
            "beta requires finite a, b > 0, got ({a}, {b})"
        )));
    }
    Ok(lanczos_ln_gamma(a) + lanczos_ln_gamma(b) - lanczos_ln_gamma(a + b))
}

/// Euler Beta function `B(a, b) = Γ(a)Γ(b)/Γ(a+b)`, evaluated in log space.
pub fn beta(a: f64, b: f64) -> Result<f64> {
    // Sort so the sum is formed in the same order for (a, b) and (b, a).
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    ln_beta(lo, hi).map(f64::exp)
}

/// Digamma function ψ(x) for any finite x that is not a pole.
pub(crate) fn digamma(mut x: f64) -> f64 {
    if x <= 0.0 {
        // reflection: ψ(1-x) - ψ(x) = π cot(πx)
        let t = sin_pi(x) / sin_pi(x + 0.5);
        return digamma(1.0 - x) - PI / t;
    }
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    acc + x.ln() - 0.5 / x - tail
}
