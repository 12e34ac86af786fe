//! Ergodic MIMO capacity `E[log₂ det(I + ρ/N_T·HHᴴ)]`.
//!
//! With `(n1, n2) = (min, max)(N_R, N_T)` the nonzero eigenvalues of `HHᴴ`
//! are those of the `n1 × n1` Gram matrix of `H` or `Hᴴ`, which is replaced
//! by its Wishart surrogate `CW_{n1}(n2, Σ)` for the closed forms.

use std::f64::consts::{E, LN_2};

use crate::approx::{build_wishart, sample_wishart, CovarianceModel, WishartApprox};
use crate::eigen::EigenForm;
use crate::error::{Error, Result};
use crate::fading::FadingModel;
use crate::linalg::{gram, hermitian_eigenvalues};
use crate::mc::{run_trials, Estimate, McConfig};
use crate::specfun::{ln_log_moment_integral, semicircle_log_integral};

/// Channel model, antenna counts and per-receive-antenna SNR (linear).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityScenario {
    pub model: FadingModel,
    pub n_r: usize,
    pub n_t: usize,
    pub snr: f64,
}

impl CapacityScenario {
    pub fn new(model: FadingModel, n_r: usize, n_t: usize, snr: f64) -> Result<Self> {
        let s = CapacityScenario { model, n_r, n_t, snr };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        check_antennas(self.n_r, self.n_t)?;
        check_snr(self.snr)
    }

    /// `(n1, n2) = (min, max)(N_R, N_T)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.n_r.min(self.n_t), self.n_r.max(self.n_t))
    }
}

fn check_antennas(n_r: usize, n_t: usize) -> Result<()> {
    if n_r == 0 || n_t == 0 {
        return Err(Error::invalid("antenna counts must be >= 1"));
    }
    Ok(())
}

fn check_snr(snr: f64) -> Result<()> {
    if !(snr >= 0.0) || !snr.is_finite() {
        return Err(Error::invalid(format!("snr = {snr} must be finite and >= 0")));
    }
    Ok(())
}

/// Parameters of the two-eigenvalue density: `w1` (multiplicity `n1−1`) and
/// `w2` (multiplicity 1) are the eigenvalues of `Σ⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigDensityTwo {
    pub n1: usize,
    pub n2: usize,
    pub w1: f64,
    pub w2: f64,
}

impl EigDensityTwo {
    pub fn new(n1: usize, n2: usize, w1: f64, w2: f64) -> Result<Self> {
        let d = EigDensityTwo { n1, n2, w1, w2 };
        d.form()?;
        Ok(d)
    }

    pub fn from_covariance(cov: &CovarianceModel, n2: usize) -> Result<Self> {
        let (w1, w2) = cov.inverse_eigenvalues();
        Self::new(cov.dim(), n2, w1, w2)
    }

    pub(crate) fn form(&self) -> Result<EigenForm> {
        if self.n1 > 1 && self.w1 == self.w2 {
            return Err(Error::invalid("w1 = w2 is degenerate: use the identity-covariance density"));
        }
        // |Σ| = w1^{−(n1−1)}·w2^{−1}
        let ln_det = -((self.n1 as f64 - 1.0) * self.w1.ln() + self.w2.ln());
        EigenForm::from_rates(self.n1, self.n2, self.w1, self.w2, ln_det)
    }
}

/// Joint density of the unordered eigenvalues of `CW_{n1}(n2, Σ)`.
///
/// For `n1 = 1` this is the gamma density with shape `n2` and rate `w2`
/// (`w1` has multiplicity zero).
pub fn eig_density_two(d: &EigDensityTwo, lambdas: &[f64]) -> Result<f64> {
    d.form()?.density(lambdas)
}

fn spectrum_gram(h: &crate::linalg::ComplexMatrix) -> Vec<f64> {
    if h.rows() <= h.cols() {
        hermitian_eigenvalues(&gram(h))
    } else {
        hermitian_eigenvalues(&gram(&h.conj_transpose()))
    }
}

fn log2_sum(eig: &[f64], c: f64) -> f64 {
    eig.iter().map(|l| (c * l.max(0.0)).ln_1p()).sum::<f64>() / LN_2
}

/// Monte-Carlo capacity under the true fading law.
pub fn capacity_mc(s: &CapacityScenario, cfg: &McConfig) -> Result<Estimate> {
    Ok(capacity_mc_grid(&s.model, s.n_r, s.n_t, &[s.snr], cfg)?[0])
}

/// Monte-Carlo capacity over an SNR grid with common channel draws.
pub fn capacity_mc_grid(model: &FadingModel, n_r: usize, n_t: usize, snrs: &[f64], cfg: &McConfig) -> Result<Vec<Estimate>> {
    check_antennas(n_r, n_t)?;
    snrs.iter().try_for_each(|&r| check_snr(r))?;
    let sampler = model.sampler()?;
    let nt = n_t as f64;
    run_trials(cfg, snrs.len(), |rng, out| {
        let eig = spectrum_gram(&sampler.sample_matrix(n_r, n_t, rng));
        for (o, &rho) in out.iter_mut().zip(snrs) {
            *o = log2_sum(&eig, rho / nt);
        }
        Ok(())
    })
}

/// Monte-Carlo capacity over eigenvalues of draws from the surrogate itself;
/// `scales` are the values of `c = ρ/N_T`.
pub fn capacity_surrogate_mc(approx: &WishartApprox, scales: &[f64], cfg: &McConfig) -> Result<Vec<Estimate>> {
    scales.iter().try_for_each(|&c| check_snr(c))?;
    run_trials(cfg, scales.len(), |rng, out| {
        let eig = hermitian_eigenvalues(&sample_wishart(approx, rng));
        for (o, &c) in out.iter_mut().zip(scales) {
            *o = log2_sum(&eig, c);
        }
        Ok(())
    })
}

/// `E[Σᵢ log₂(1 + c·λᵢ)]` for `λ` the eigenvalues of the surrogate.
pub fn capacity_closed_wishart(approx: &WishartApprox, c: f64) -> Result<f64> {
    check_snr(c)?;
    if c == 0.0 {
        return Ok(0.0);
    }
    let form = EigenForm::from_wishart(approx)?;
    form.expected_sum(|m, w| Ok(ln_log_moment_integral(m, w, c)? - LN_2.ln()))
}

/// Closed-form capacity for κ-μ entries.
pub fn capacity_closed_kmu(s: &CapacityScenario) -> Result<f64> {
    s.validate()?;
    match s.model {
        FadingModel::KappaMu(_) => {
            let (n1, n2) = s.dims();
            capacity_closed_wishart(&build_wishart(&s.model, n1, n2)?, s.snr / s.n_t as f64)
        }
        _ => Err(Error::invalid("capacity_closed_kmu needs a kappa-mu model")),
    }
}

/// Closed-form capacity when the surrogate covariance is `Ω·I`.
pub fn capacity_closed_identity_cov(omega: f64, n_r: usize, n_t: usize, rho: f64) -> Result<f64> {
    check_antennas(n_r, n_t)?;
    check_snr(rho)?;
    let (n1, n2) = (n_r.min(n_t), n_r.max(n_t));
    let cov = CovarianceModel::scaled_identity(n1, omega)?;
    capacity_closed_wishart(&WishartApprox::new(n2, cov)?, rho / n_t as f64)
}

/// Closed-form capacity for any model, through its Wishart surrogate.
pub fn capacity_closed(s: &CapacityScenario) -> Result<f64> {
    s.validate()?;
    let (n1, n2) = s.dims();
    capacity_closed_wishart(&build_wishart(&s.model, n1, n2)?, s.snr / s.n_t as f64)
}

/// Per-antenna capacity for `N_R = N_T → ∞` with `Σ = Ω·I`.
pub fn asymptotic_capacity_identity(rho: f64, omega: f64) -> Result<f64> {
    check_snr(rho)?;
    if !(omega >= 0.0) || !omega.is_finite() {
        return Err(Error::invalid(format!("omega = {omega} must be >= 0")));
    }
    semicircle_log_integral(rho * omega)
}

/// High-SNR per-antenna capacity `log₂(ρ/e) + log₂(a − y)` for the κ-μ
/// surrogate with many antennas.
pub fn asymptotic_capacity_kmu_high_snr(rho: f64, cov: &CovarianceModel) -> Result<f64> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::invalid(format!("rho = {rho} must be > 0")));
    }
    Ok((rho / E).log2() + cov.e_small().log2())
}
