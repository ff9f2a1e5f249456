//! Modified Bessel functions of the first kind, integer order, in scaled and log form.
//!
//! Small arguments use the ascending power series. From `x = 20` upward the
//! order-zero value comes from the Hankel asymptotic expansion and higher
//! orders from Miller's downward recurrence normalised against it. All paths
//! work with `e^{-x} I_nu(x)` or its logarithm so nothing overflows.

use std::f64::consts::PI;

use super::gamma::ln_gamma_signed;
use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 20.0;
const RESCALE: f64 = 1e200;

/// `e^{-x} I_nu(x)` for integer `nu >= 0` and finite `x >= 0`.
pub fn bessel_i_scaled(nu: u32, x: f64) -> Result<f64> {
    check_arg(x)?;
    if x == 0.0 {
        return Ok(if nu == 0 { 1.0 } else { 0.0 });
    }
    Ok(ln_scaled(nu, x).exp())
}

/// `ln I_nu(x)`. Requires `x > 0`, except that `ln I_0(0) = 0` is returned.
pub fn ln_bessel_i(nu: u32, x: f64) -> Result<f64> {
    check_arg(x)?;
    if x == 0.0 {
        return if nu == 0 {
            Ok(0.0)
        } else {
            Err(Error::domain(format!("ln I_{nu}(0) is -infinity")))
        };
    }
    Ok(x + ln_scaled(nu, x))
}

fn check_arg(x: f64) -> Result<()> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::domain(format!(
            "Bessel argument must be finite and nonnegative, got {x}"
        )));
    }
    Ok(())
}

/// `ln(e^{-x} I_nu(x))` for `x > 0`.
fn ln_scaled(nu: u32, x: f64) -> f64 {
    if x < SERIES_LIMIT {
        ln_series(f64::from(nu), x) - x
    } else {
        ln_i0_scaled_asymptotic(x) + ln_miller_ratio(nu, x)
    }
}

/// `ln I_nu(x)` from the ascending series, summed outward from its largest term.
/// Valid for real `nu >= 0`; cost grows like `sqrt(x)`.
fn ln_series(nu: f64, x: f64) -> f64 {
    let q = 0.25 * x * x;
    // largest term sits where (j+1)(j+1+nu) ~ x^2/4
    let peak = ((-(nu + 2.0) + (nu * nu + x * x).sqrt()) / 2.0).max(0.0).floor();
    let ln_peak = (2.0 * peak + nu) * (0.5 * x).ln()
        - ln_gamma_signed(peak + 1.0).0
        - ln_gamma_signed(peak + nu + 1.0).0;

    let mut sum = 1.0;
    let mut term = 1.0;
    let mut j = peak;
    loop {
        term *= q / ((j + 1.0) * (j + 1.0 + nu));
        sum += term;
        j += 1.0;
        if term <= f64::EPSILON * 0.25 * sum {
            break;
        }
    }
    term = 1.0;
    j = peak;
    while j > 0.0 {
        term *= j * (j + nu) / q;
        sum += term;
        j -= 1.0;
        if term <= f64::EPSILON * 0.25 * sum {
            break;
        }
    }
    ln_peak + sum.ln()
}

/// `ln I_nu(x)` for real order `nu >= 0` and `x > 0`.
pub(crate) fn ln_bessel_i_real(nu: f64, x: f64) -> f64 {
    if nu == nu.floor() && nu <= f64::from(u32::MAX) {
        return x + ln_scaled(nu as u32, x);
    }
    ln_series(nu, x)
}

/// `ln(e^{-x} I_0(x))` for `x >= 20` from the Hankel expansion.
fn ln_i0_scaled_asymptotic(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut j = 0.0;
    loop {
        let next = term * (2.0 * j + 1.0) * (2.0 * j + 1.0) / ((j + 1.0) * 8.0 * x);
        // asymptotic: stop at the smallest term
        if next >= term || next <= f64::EPSILON * 0.25 * sum {
            sum += next.min(term);
            break;
        }
        sum += next;
        term = next;
        j += 1.0;
    }
    sum.ln() - 0.5 * (2.0 * PI * x).ln()
}

/// `ln(I_nu(x) / I_0(x))` by Miller's backward recurrence.
fn ln_miller_ratio(nu: u32, x: f64) -> f64 {
    if nu == 0 {
        return 0.0;
    }
    let start = nu as usize + 50 + (80.0 * x).sqrt() as usize;
    let two_over_x = 2.0 / x;
    let mut above = 0.0; // I_{n+1}
    let mut here = 1.0; // I_n
    let mut ln_shift = 0.0;
    let mut ln_at_nu = 0.0;
    for n in (1..=start).rev() {
        let below = above + (n as f64) * two_over_x * here;
        above = here;
        here = below;
        if here > RESCALE {
            here /= RESCALE;
            above /= RESCALE;
            ln_shift += RESCALE.ln();
        }
        // `here` now holds I_{n-1}
        if n - 1 == nu as usize {
            ln_at_nu = here.ln() + ln_shift;
        }
    }
    ln_at_nu - (here.ln() + ln_shift)
}
