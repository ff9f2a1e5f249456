//! Special-function kernel: log-Gamma, Beta, scaled modified Bessel `I_nu`
//! of integer order and the Gauss hypergeometric function on `z < 1`.
//!
//! Everything here is a pure function of its arguments.

mod bessel;
mod gamma;
mod hyp2f1;

pub use bessel::{bessel_i_scaled, ln_bessel_i};
pub use gamma::{beta, ln_beta, ln_gamma};
pub use hyp2f1::{hyp2f1, SeriesControl};

pub(crate) use bessel::ln_bessel_i_real;
