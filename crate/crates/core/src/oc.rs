//! Symbol error rate of optimum combining: a Rayleigh desired user `c ~ CN(0, I)`
//! received over `N_R` antennas against `N_I` equal-power faded interferers.
//!
//! The SINR is `η = (1/E_I)·cᴴ(R + σ²/E_I·I)⁻¹c` with `R` the Gram matrix of
//! the `N_R × N_I` interferer channel. In the eigenbasis of `R`,
//! `η = Σₖ (pₖ/E_I)/(λₖ + σ²/E_I)` with `pₖ` i.i.d. unit exponentials, so with
//! `Pe ≈ Σₗ aₗ e^{−bₗη}` the average SER is a determinant expectation over the
//! eigenvalues of `R` (rank `min(N_R, N_I)`).

use rand::Rng;

use crate::approx::{build_wishart, sample_wishart, WishartApprox};
use crate::eigen::EigenForm;
use crate::error::{Error, Result};
use crate::fading::{sample_rayleigh_vector, FadingModel};
use crate::linalg::{gram, hermitian_eigen, hermitian_eigenvalues, solve_hermitian, ComplexMatrix, HermitianMatrix};
use crate::mc::{run_trials, Estimate, McConfig};
use crate::specfun::ln_ratio_moment_integral;
use num_complex::Complex64;

/// Gaussian tail probability `Q(x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Square M-QAM error-probability constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QamConstants {
    pub m: u32,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub a: [f64; 5],
    pub b: [f64; 5],
}

impl QamConstants {
    pub fn new(m: u32) -> Result<Self> {
        let root = (f64::from(m)).sqrt().round() as u32;
        if m < 4 || root * root != m {
            return Err(Error::invalid(format!("QAM order {m} is not a perfect square >= 4")));
        }
        let k1 = 4.0 * (1.0 - 1.0 / f64::from(root));
        let k2 = 3.0 / (f64::from(m) - 1.0);
        let k3 = k1 * k1 / 4.0;
        Ok(QamConstants {
            m,
            k1,
            k2,
            k3,
            a: [k1 / 12.0, k1 / 4.0, -k3 / 144.0, -k3 / 16.0, -k3 / 24.0],
            b: [k2 / 2.0, 2.0 * k2 / 3.0, k2, 4.0 * k2 / 3.0, 7.0 * k2 / 6.0],
        })
    }

    /// `k1·Q(√(k2η)) − k3·Q(√(k2η))²`.
    pub fn pe_exact(&self, eta: f64) -> f64 {
        let q = q_function((self.k2 * eta).sqrt());
        self.k1 * q - self.k3 * q * q
    }

    /// `Σₗ aₗ e^{−bₗη}`.
    pub fn pe_approx(&self, eta: f64) -> f64 {
        self.a.iter().zip(&self.b).map(|(a, b)| a * (-b * eta).exp()).sum()
    }

    pub fn pe(&self, eta: f64, formula: PeFormula) -> f64 {
        match formula {
            PeFormula::Exact => self.pe_exact(eta),
            PeFormula::Approx => self.pe_approx(eta),
        }
    }
}

/// `qam_constants(M)`.
pub fn qam_constants(m: u32) -> Result<QamConstants> {
    QamConstants::new(m)
}

/// Which error-probability expression to average.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeFormula {
    Exact,
    Approx,
}

/// How the Monte-Carlo SINR is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SinrMethod {
    /// Hermitian solve against `R + σ²/E_I·I`.
    DirectSolve,
    /// Eigen-decomposition of `R` and projections `pₖ = |uₖᴴc|²`.
    Eigen,
}

/// Optimum-combining link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OcScenario {
    pub n_r: usize,
    pub n_i: usize,
    /// Mean interferer power.
    pub e_i: f64,
    /// Noise power.
    pub sigma2: f64,
    pub qam: QamConstants,
    pub interferer: FadingModel,
}

impl OcScenario {
    pub fn new(n_r: usize, n_i: usize, e_i: f64, sigma2: f64, m: u32, interferer: FadingModel) -> Result<Self> {
        let s = OcScenario { n_r, n_i, e_i, sigma2, qam: QamConstants::new(m)?, interferer };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_r == 0 {
            return Err(Error::invalid("N_R must be >= 1"));
        }
        check_power("E_I", self.e_i)?;
        check_power("sigma2", self.sigma2)?;
        self.interferer.validate()
    }

    /// Copy with a different noise power.
    pub fn with_sigma2(&self, sigma2: f64) -> Self {
        OcScenario { sigma2, ..*self }
    }

    /// `(n1, n2) = (min, max)(N_R, N_I)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.n_r.min(self.n_i), self.n_r.max(self.n_i))
    }
}

fn check_power(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::invalid(format!("{name} = {v} must be finite and > 0")));
    }
    Ok(())
}

/// `η = (1/E_I)·Re cᴴ(R + σ²/E_I·I)⁻¹c`.
pub fn sinr_oc(c: &[Complex64], r: &HermitianMatrix, s: &OcScenario) -> Result<f64> {
    if r.dim() != s.n_r || c.len() != s.n_r {
        return Err(Error::Dimension(format!("SINR needs N_R = {} dimensional R and c", s.n_r)));
    }
    let x = solve_hermitian(&r.shifted(s.sigma2 / s.e_i), c)?;
    let q: Complex64 = c.iter().zip(&x).map(|(a, b)| a.conj() * b).sum();
    Ok(q.re / s.e_i)
}

/// `η = Σₖ (pₖ/E_I)/(λₖ + σ²/E_I)`.
pub fn sinr_from_eigen(p: &[f64], lambdas: &[f64], e_i: f64, sigma2: f64) -> f64 {
    let s = sigma2 / e_i;
    p.iter().zip(lambdas).map(|(p, l)| (p / e_i) / (l + s)).sum()
}

fn interferer_gram<R: Rng + ?Sized>(
    sampler: &Option<crate::fading::EntrySampler>,
    n_r: usize,
    n_i: usize,
    rng: &mut R,
) -> HermitianMatrix {
    match sampler {
        Some(smp) => gram(&smp.sample_matrix(n_r, n_i, rng)),
        None => HermitianMatrix::new(ComplexMatrix::zeros(n_r, n_r)).expect("zero matrix"),
    }
}

fn sampler_for(s: &OcScenario) -> Result<Option<crate::fading::EntrySampler>> {
    if s.n_i == 0 {
        s.interferer.validate()?;
        Ok(None)
    } else {
        Ok(Some(s.interferer.sampler()?))
    }
}

/// Monte-Carlo SER under the true interferer law, exact `Pe`, SINR by
/// direct solve.
pub fn ser_mc(s: &OcScenario, cfg: &McConfig) -> Result<Estimate> {
    ser_mc_with(s, cfg, SinrMethod::DirectSolve, PeFormula::Exact)
}

/// [`ser_mc`] with a choice of SINR computation and error formula.
pub fn ser_mc_with(s: &OcScenario, cfg: &McConfig, method: SinrMethod, formula: PeFormula) -> Result<Estimate> {
    s.validate()?;
    let sampler = sampler_for(s)?;
    let run = |rng: &mut rand_chacha::ChaCha8Rng| -> Result<f64> {
        let r = interferer_gram(&sampler, s.n_r, s.n_i, rng);
        let c = sample_rayleigh_vector(s.n_r, rng);
        let eta = match method {
            SinrMethod::DirectSolve => sinr_oc(&c, &r, s)?,
            SinrMethod::Eigen => {
                let (lam, u) = hermitian_eigen(&r);
                let p = projections(&u, &c);
                sinr_from_eigen(&p, &lam, s.e_i, s.sigma2)
            }
        };
        Ok(s.qam.pe(eta, formula))
    };
    crate::mc::estimate(cfg, run)
}

fn projections(u: &ComplexMatrix, c: &[Complex64]) -> Vec<f64> {
    let n = c.len();
    (0..n)
        .map(|k| {
            let z: Complex64 = (0..n).map(|i| u[(i, k)].conj() * c[i]).sum();
            z.norm_sqr()
        })
        .collect()
}

/// Monte-Carlo SER over a grid of noise powers with common draws of `R` and
/// `c` (eigen path), exact `Pe`.
pub fn ser_mc_grid(s: &OcScenario, sigma2s: &[f64], cfg: &McConfig) -> Result<Vec<Estimate>> {
    s.validate()?;
    sigma2s.iter().try_for_each(|&v| check_power("sigma2", v))?;
    let sampler = sampler_for(s)?;
    run_trials(cfg, sigma2s.len(), |rng, out| {
        let r = interferer_gram(&sampler, s.n_r, s.n_i, rng);
        let c = sample_rayleigh_vector(s.n_r, rng);
        let (lam, u) = hermitian_eigen(&r);
        let p = projections(&u, &c);
        for (o, &s2) in out.iter_mut().zip(sigma2s) {
            *o = s.qam.pe_exact(sinr_from_eigen(&p, &lam, s.e_i, s2));
        }
        Ok(())
    })
}

/// The interferer Wishart surrogate `CW_{n1}(n2, Σ)`, `None` without
/// interferers.
pub fn interferer_surrogate(s: &OcScenario) -> Result<Option<WishartApprox>> {
    let (n1, n2) = s.dims();
    if n1 == 0 {
        return Ok(None);
    }
    build_wishart(&s.interferer, n1, n2).map(Some)
}

/// Monte-Carlo SER with `R`'s spectrum drawn from the Wishart surrogate and
/// the exponential `Pe` approximation. Isolates the determinant formula.
pub fn ser_surrogate_mc_grid(s: &OcScenario, sigma2s: &[f64], cfg: &McConfig) -> Result<Vec<Estimate>> {
    s.validate()?;
    sigma2s.iter().try_for_each(|&v| check_power("sigma2", v))?;
    let approx = interferer_surrogate(s)?;
    let n_r = s.n_r;
    run_trials(cfg, sigma2s.len(), |rng, out| {
        let mut lam = match &approx {
            Some(w) => hermitian_eigenvalues(&sample_wishart(w, rng)),
            None => Vec::new(),
        };
        lam.resize(n_r, 0.0);
        // pₖ = |uₖᴴc|² are i.i.d. unit exponentials for isotropic c.
        let p: Vec<f64> = sample_rayleigh_vector(n_r, rng).iter().map(|z| z.norm_sqr()).collect();
        for (o, &s2) in out.iter_mut().zip(sigma2s) {
            *o = s.qam.pe_approx(sinr_from_eigen(&p, &lam, s.e_i, s2));
        }
        Ok(())
    })
}

/// Closed-form SER, clamped into `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SerClosed {
    pub ser: f64,
    /// Value before clamping.
    pub raw: f64,
    /// Set when clamping changed the value.
    pub clamped: bool,
}

fn ser_closed_form(s: &OcScenario, form: Option<EigenForm>) -> Result<SerClosed> {
    let sn = s.sigma2 / s.e_i;
    let zeros = s.n_r - s.n_r.min(s.n_i);
    let mut total = 0.0;
    for (a, b) in s.qam.a.iter().zip(&s.qam.b) {
        let bn = b / s.e_i;
        let pre = (s.sigma2 / (s.sigma2 + b)).powi(zeros as i32);
        let j = match &form {
            Some(f) => f.expected_product(|m, w| ln_ratio_moment_integral(m, w, sn, bn))?,
            None => 1.0,
        };
        total += a * pre * j;
    }
    if !total.is_finite() {
        return Err(Error::NonConvergence { func: "ser_closed", max_terms: 0 });
    }
    let ser = total.clamp(0.0, 1.0);
    Ok(SerClosed { ser, raw: total, clamped: ser != total })
}

/// Closed-form SER for any interferer model through its Wishart surrogate.
pub fn ser_closed(s: &OcScenario) -> Result<SerClosed> {
    s.validate()?;
    let form = match interferer_surrogate(s)? {
        Some(w) => Some(EigenForm::from_wishart(&w)?),
        None => None,
    };
    ser_closed_form(s, form)
}

/// Closed-form SER for κ-μ interferers.
pub fn ser_closed_kmu(s: &OcScenario) -> Result<SerClosed> {
    match s.interferer {
        FadingModel::KappaMu(_) => ser_closed(s),
        _ => Err(Error::invalid("ser_closed_kmu needs kappa-mu interferers")),
    }
}

/// Closed-form SER with the surrogate covariance `Ω·I`, `Ω = E|h|²` of the
/// interferer model.
pub fn ser_closed_identity_cov(s: &OcScenario) -> Result<SerClosed> {
    s.validate()?;
    let (n1, n2) = s.dims();
    let form = if n1 == 0 { None } else { Some(EigenForm::identity(n1, n2, s.interferer.mean_power())?) };
    ser_closed_form(s, form)
}
