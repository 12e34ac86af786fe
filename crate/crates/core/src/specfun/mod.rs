//! Scalar special functions and the one-dimensional integrals behind the
//! determinant closed forms.
//!
//! Everything here is a pure function of its arguments.

mod appell;
mod bessel;
mod expint;
mod gamma;
mod moments;

pub use appell::appell_psi1;
pub use bessel::{bessel_i, bessel_i_scaled, ln_bessel_i};
pub use expint::{expint_en, expint_en_scaled};
pub use gamma::{digamma, ln_factorial, ln_gamma};
pub use moments::{
    gamma_moment, ln_gamma_moment, ln_log_moment_integral, ln_ratio_moment_integral,
    log_moment_integral, ratio_moment_integral, semicircle_log_integral,
};

use crate::error::{Error, Result};

/// Truncation control for the infinite series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl { rel_tol: 1e-12, max_terms: 20_000 }
    }
}

impl SeriesControl {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        let ctl = SeriesControl { rel_tol, max_terms };
        ctl.validate()?;
        Ok(ctl)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || self.max_terms == 0 {
            return Err(Error::invalid(format!(
                "series control needs rel_tol > 0 and max_terms >= 1 (got {}, {})",
                self.rel_tol, self.max_terms
            )));
        }
        Ok(())
    }
}
