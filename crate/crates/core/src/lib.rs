//! Moment-matched complex-Wishart surrogates for Gram matrices of κ-μ and η-μ
//! faded MIMO channels.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`] and [`quad`]: scalar special functions and adaptive quadrature.
//! * [`linalg`]: small dense complex matrices (Gram, LU determinant, Jacobi eigen-solver).
//! * [`fading`]: exact samplers and densities for the fading models.
//! * [`approx`]: the Wishart surrogate `CW(n2, Σ)` for `H·Hᴴ` and its fidelity diagnostics.
//! * [`capacity`]: ergodic capacity, Monte-Carlo and determinant closed forms.
//! * [`oc`]: symbol error rate of optimum combining against faded interferers.
//! * [`mc`]: the seeded, thread-count-independent Monte-Carlo harness.
//!
//! ```
//! use wishfade::{capacity, CapacityScenario, FadingModel, KappaMuParams};
//!
//! let model = FadingModel::KappaMu(KappaMuParams::new(4.0, 3.0, 0.5).unwrap());
//! let s = CapacityScenario::new(model, 2, 4, 10.0).unwrap();
//! let c = capacity::capacity_closed(&s).unwrap();
//! assert!(c > 0.0);
//! ```

pub mod approx;
pub mod capacity;
pub mod eigen;
pub mod error;
pub mod fading;
pub mod linalg;
pub mod mc;
pub mod oc;
pub mod quad;
pub mod specfun;

pub use approx::{CovarianceModel, FullWishartApprox, WishartApprox};
pub use capacity::{CapacityScenario, EigDensityTwo};
pub use error::{Error, Result};
pub use fading::{EtaMuParams, FadingModel, KappaMuParams};
pub use linalg::{ComplexMatrix, HermitianMatrix};
pub use mc::{Estimate, McConfig};

pub use num_complex::Complex64;
pub use oc::{OcScenario, QamConstants, SerClosed};

pub use specfun::SeriesControl;

/// Converts a decibel value to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
