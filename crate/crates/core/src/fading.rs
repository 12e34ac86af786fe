//! Fading models: parameter sets, exact samplers and joint densities of the
//! in-phase/quadrature components `h = x + jy`.
//!
//! # κ-μ sign law
//!
//! The κ-μ component density factorizes as `f(x)·f(y)` with
//!
//! ```text
//! f(x) = |x|^{μ/2} / (2σ²|p|^{μ/2−1}) · exp(−(x−p)²/2σ²) · sech(px/σ²) · I_{μ/2−1}(|px|/σ²).
//! ```
//!
//! Let `r = √Σᵢ(gᵢ + p/√μ)²` with `gᵢ ~ N(0, σ²)`: `r²/σ²` is noncentral χ²
//! with `μ` degrees of freedom and noncentrality `p²/σ²`. The density of `r` is
//! `r^{μ/2}/(σ²|p|^{μ/2−1})·exp(−(r²+p²)/2σ²)·I_{μ/2−1}(|p|r/σ²)`. Writing
//! `exp(−(x−p)²/2σ²) = exp(−(x²+p²)/2σ²)·e^{px/σ²}` shows that `f(±r)` is
//! the density of `r` times `e^{±pr/σ²}/(2cosh(pr/σ²))`. So `x = ±r` with
//! those two probabilities is an exact draw.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::specfun::{ln_bessel_i, ln_gamma};

/// κ-μ parameters. `p` and `q` are the in-phase and quadrature line-of-sight
/// magnitudes, tied to κ by `p² + q² = 2κμσ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaMuParams {
    pub kappa: f64,
    pub mu: f64,
    pub sigma2: f64,
    pub p: f64,
    pub q: f64,
}

impl KappaMuParams {
    /// Equal split `p = q = σ√(κμ)`.
    pub fn new(kappa: f64, mu: f64, sigma2: f64) -> Result<Self> {
        Self::with_los_fraction(kappa, mu, sigma2, 0.5)
    }

    /// Puts the fraction `f` of the line-of-sight power `2κμσ²` on the
    /// in-phase component.
    pub fn with_los_fraction(kappa: f64, mu: f64, sigma2: f64, f: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::invalid(format!("line-of-sight fraction {f} outside [0, 1]")));
        }
        Self::check(kappa, mu, sigma2)?;
        let los = 2.0 * kappa * mu * sigma2;
        Ok(KappaMuParams { kappa, mu, sigma2, p: (f * los).sqrt(), q: ((1.0 - f) * los).sqrt() })
    }

    /// Builds from explicit `p`, `q`; κ follows from them.
    pub fn from_los(p: f64, q: f64, mu: f64, sigma2: f64) -> Result<Self> {
        Self::check(0.0, mu, sigma2)?;
        if !(p.is_finite() && q.is_finite()) {
            return Err(Error::invalid("line-of-sight magnitudes must be finite"));
        }
        let kappa = (p * p + q * q) / (2.0 * mu * sigma2);
        Ok(KappaMuParams { kappa, mu, sigma2, p, q })
    }

    /// Scales σ² so that `E|h|² = 1`.
    pub fn unit_power(kappa: f64, mu: f64) -> Result<Self> {
        Self::check(kappa, mu, 1.0)?;
        Self::new(kappa, mu, 1.0 / (2.0 * (1.0 + kappa) * mu))
    }

    fn check(kappa: f64, mu: f64, sigma2: f64) -> Result<()> {
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::invalid(format!("kappa = {kappa} must be >= 0")));
        }
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::invalid(format!("mu = {mu} must be > 0")));
        }
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::invalid(format!("sigma2 = {sigma2} must be > 0")));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        Self::check(self.kappa, self.mu, self.sigma2)?;
        let los = self.p * self.p + self.q * self.q;
        let want = 2.0 * self.kappa * self.mu * self.sigma2;
        if (los - want).abs() > 1e-9 * want.max(self.sigma2) {
            return Err(Error::invalid(format!("p² + q² = {los} but 2κμσ² = {want}")));
        }
        Ok(())
    }

    /// `E|h|² = 2σ²(1+κ)μ`.
    pub fn mean_power(&self) -> f64 {
        2.0 * self.sigma2 * (1.0 + self.kappa) * self.mu
    }

    fn integer_mu(&self) -> Result<usize> {
        if self.mu.fract() != 0.0 || self.mu < 1.0 {
            return Err(Error::invalid(format!("the κ-μ sampler needs integer mu >= 1, got {}", self.mu)));
        }
        Ok(self.mu as usize)
    }
}

/// η-μ parameters (format 1: `η ∈ [−1, 1]` splits `Ω` between the components).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaMuParams {
    pub eta: f64,
    pub mu: f64,
    pub omega: f64,
}

impl EtaMuParams {
    pub fn new(eta: f64, mu: f64, omega: f64) -> Result<Self> {
        let p = EtaMuParams { eta, mu, omega };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(-1.0..=1.0).contains(&self.eta) {
            return Err(Error::invalid(format!("eta = {} outside [-1, 1]", self.eta)));
        }
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(Error::invalid(format!("mu = {} must be > 0", self.mu)));
        }
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(Error::invalid(format!("omega = {} must be > 0", self.omega)));
        }
        Ok(())
    }

    pub fn omega_x(&self) -> f64 {
        (1.0 - self.eta) * self.omega / 2.0
    }

    pub fn omega_y(&self) -> f64 {
        (1.0 + self.eta) * self.omega / 2.0
    }
}

/// A fading distribution for i.i.d. channel entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FadingModel {
    KappaMu(KappaMuParams),
    EtaMu(EtaMuParams),
    /// Constant mean plus circular Gaussian scatter of variance σ² per component.
    Rician { mean: Complex64, sigma2: f64 },
    /// Nakagami-m envelope (`E|h|² = Ω`) with uniform phase.
    Nakagami { m: f64, omega: f64 },
    /// Circular Gaussian with variance σ² per component.
    Rayleigh { sigma2: f64 },
}

impl FadingModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FadingModel::KappaMu(p) => p.validate(),
            FadingModel::EtaMu(p) => p.validate(),
            FadingModel::Rician { mean, sigma2 } => {
                if !(sigma2 > 0.0) || !sigma2.is_finite() || !(mean.re.is_finite() && mean.im.is_finite()) {
                    return Err(Error::invalid("Rician model needs finite mean and sigma2 > 0"));
                }
                Ok(())
            }
            FadingModel::Nakagami { m, omega } => {
                if !(m >= 0.5) || !m.is_finite() || !(omega > 0.0) || !omega.is_finite() {
                    return Err(Error::invalid(format!("Nakagami needs m >= 0.5 and omega > 0 (got {m}, {omega})")));
                }
                Ok(())
            }
            FadingModel::Rayleigh { sigma2 } => {
                if !(sigma2 > 0.0) || !sigma2.is_finite() {
                    return Err(Error::invalid(format!("Rayleigh needs sigma2 > 0, got {sigma2}")));
                }
                Ok(())
            }
        }
    }

    /// `E|h|²`.
    pub fn mean_power(&self) -> f64 {
        match *self {
            FadingModel::KappaMu(p) => p.mean_power(),
            FadingModel::EtaMu(p) => p.omega,
            FadingModel::Rician { mean, sigma2 } => mean.norm_sqr() + 2.0 * sigma2,
            FadingModel::Nakagami { omega, .. } => omega,
            FadingModel::Rayleigh { sigma2 } => 2.0 * sigma2,
        }
    }

    /// `E[h]`.
    pub fn mean(&self) -> Complex64 {
        match *self {
            FadingModel::Rician { mean, .. } => mean,
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// Short lowercase tag used in output.
    pub fn name(&self) -> &'static str {
        match self {
            FadingModel::KappaMu(_) => "kappa-mu",
            FadingModel::EtaMu(_) => "eta-mu",
            FadingModel::Rician { .. } => "rician",
            FadingModel::Nakagami { .. } => "nakagami",
            FadingModel::Rayleigh { .. } => "rayleigh",
        }
    }

    /// Validates the parameters once and returns a reusable sampler.
    pub fn sampler(&self) -> Result<EntrySampler> {
        self.validate()?;
        Ok(match *self {
            FadingModel::KappaMu(p) => {
                let mu = p.integer_mu()?;
                let s = p.sigma2.sqrt();
                let root_mu = (mu as f64).sqrt();
                EntrySampler::KappaMu { mu, sigma: s, sigma2: p.sigma2, p_i: p.p / root_mu, q_i: p.q / root_mu, p: p.p, q: p.q }
            }
            FadingModel::EtaMu(p) => {
                let part = |om: f64| -> Result<Option<Gamma<f64>>> {
                    if om == 0.0 {
                        return Ok(None);
                    }
                    Gamma::new(p.mu, om / p.mu)
                        .map(Some)
                        .map_err(|e| Error::invalid(format!("eta-mu gamma law: {e}")))
                };
                EntrySampler::EtaMu { x: part(p.omega_x())?, y: part(p.omega_y())? }
            }
            FadingModel::Rician { mean, sigma2 } => EntrySampler::Gaussian { mean, sigma: sigma2.sqrt() },
            FadingModel::Rayleigh { sigma2 } => EntrySampler::Gaussian { mean: Complex64::new(0.0, 0.0), sigma: sigma2.sqrt() },
            FadingModel::Nakagami { m, omega } => EntrySampler::Nakagami {
                power: Gamma::new(m, omega / m).map_err(|e| Error::invalid(format!("Nakagami gamma law: {e}")))?,
            },
        })
    }
}

/// A validated, ready-to-draw sampler for one fading model.
#[derive(Debug, Clone)]
pub enum EntrySampler {
    KappaMu { mu: usize, sigma: f64, sigma2: f64, p_i: f64, q_i: f64, p: f64, q: f64 },
    EtaMu { x: Option<Gamma<f64>>, y: Option<Gamma<f64>> },
    Gaussian { mean: Complex64, sigma: f64 },
    Nakagami { power: Gamma<f64> },
}

fn kmu_component<R: Rng + ?Sized>(rng: &mut R, mu: usize, sigma: f64, sigma2: f64, los_i: f64, los: f64) -> f64 {
    let mut r2 = 0.0;
    for _ in 0..mu {
        let g: f64 = rng.sample(StandardNormal);
        let v = sigma * g + los_i;
        r2 += v * v;
    }
    let r = r2.sqrt();
    // P(+) = e^{t}/(2cosh t) = 1/(1 + e^{−2t}), t = los·r/σ²
    let t = los * r / sigma2;
    let plus = 1.0 / (1.0 + (-2.0 * t).exp());
    if rng.random::<f64>() < plus {
        r
    } else {
        -r
    }
}

fn signed_sqrt_gamma<R: Rng + ?Sized>(rng: &mut R, g: &Option<Gamma<f64>>) -> f64 {
    match g {
        None => 0.0,
        Some(g) => {
            let v = g.sample(rng).sqrt();
            if rng.random::<bool>() {
                v
            } else {
                -v
            }
        }
    }
}

impl EntrySampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        match self {
            EntrySampler::KappaMu { mu, sigma, sigma2, p_i, q_i, p, q } => {
                let x = kmu_component(rng, *mu, *sigma, *sigma2, *p_i, *p);
                let y = kmu_component(rng, *mu, *sigma, *sigma2, *q_i, *q);
                Complex64::new(x, y)
            }
            EntrySampler::EtaMu { x, y } => Complex64::new(signed_sqrt_gamma(rng, x), signed_sqrt_gamma(rng, y)),
            EntrySampler::Gaussian { mean, sigma } => {
                let x: f64 = rng.sample(StandardNormal);
                let y: f64 = rng.sample(StandardNormal);
                mean + Complex64::new(sigma * x, sigma * y)
            }
            EntrySampler::Nakagami { power } => {
                let r = power.sample(rng).sqrt();
                let phase = rng.random::<f64>() * 2.0 * PI;
                Complex64::from_polar(r, phase)
            }
        }
    }

    /// `n1 × n2` matrix of independent draws.
    pub fn sample_matrix<R: Rng + ?Sized>(&self, n1: usize, n2: usize, rng: &mut R) -> ComplexMatrix {
        ComplexMatrix::from_fn(n1, n2, |_, _| self.sample(rng))
    }
}

/// One κ-μ draw `x + jy`.
pub fn sample_kmu<R: Rng + ?Sized>(params: &KappaMuParams, rng: &mut R) -> Result<Complex64> {
    Ok(FadingModel::KappaMu(*params).sampler()?.sample(rng))
}

/// One η-μ draw `x + jy`; a component with zero power (`|η| = 1`) is exactly 0.
pub fn sample_eta_mu<R: Rng + ?Sized>(params: &EtaMuParams, rng: &mut R) -> Result<Complex64> {
    Ok(FadingModel::EtaMu(*params).sampler()?.sample(rng))
}

/// `n1 × n2` channel matrix with i.i.d. entries from `model`.
pub fn sample_channel_matrix<R: Rng + ?Sized>(model: &FadingModel, n1: usize, n2: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::Dimension("channel matrix needs n1, n2 >= 1".into()));
    }
    Ok(model.sampler()?.sample_matrix(n1, n2, rng))
}

/// `n` i.i.d. `CN(0, 1)` entries.
pub fn sample_rayleigh_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (0..n)
        .map(|_| {
            let x: f64 = rng.sample(StandardNormal);
            let y: f64 = rng.sample(StandardNormal);
            Complex64::new(s * x, s * y)
        })
        .collect()
}

fn ln_cosh(t: f64) -> f64 {
    let a = t.abs();
    a + (-2.0 * a).exp().ln_1p() - LN_2
}

/// Density of one κ-μ component with line-of-sight magnitude `los`.
pub fn kmu_marginal_pdf(los: f64, mu: f64, sigma2: f64, x: f64) -> f64 {
    let nu = 0.5 * mu - 1.0;
    let z = (los * x).abs() / sigma2;
    if z == 0.0 {
        // Small-argument limit of the Bessel factor:
        // f = |x|^{μ−1}·exp(−(x−p)²/2σ²) / ((2σ²)^{μ/2}·Γ(μ/2)).
        let power = if mu == 1.0 { 0.0 } else { (mu - 1.0) * x.abs().ln() };
        let ln = power - 0.5 * (x - los).powi(2) / sigma2 - 0.5 * mu * (2.0 * sigma2).ln()
            - ln_gamma(0.5 * mu).unwrap_or(f64::NAN);
        return ln.exp();
    }
    let ln_i = match ln_bessel_i(nu, z) {
        Ok(v) => v,
        Err(_) => return f64::NAN,
    };
    let ln = 0.5 * mu * x.abs().ln() - (2.0 * sigma2).ln() - nu * los.abs().ln() - 0.5 * (x - los).powi(2) / sigma2
        - ln_cosh(los * x / sigma2)
        + ln_i;
    ln.exp()
}

/// Joint κ-μ density of `(x, y)`.
pub fn pdf_kmu(params: &KappaMuParams, x: f64, y: f64) -> f64 {
    kmu_marginal_pdf(params.p, params.mu, params.sigma2, x) * kmu_marginal_pdf(params.q, params.mu, params.sigma2, y)
}

/// Density of one η-μ component with power `omega_c`. Not defined for a
/// zero-power component (a point mass at 0); returns 0 there.
pub fn eta_mu_marginal_pdf(mu: f64, omega_c: f64, x: f64) -> f64 {
    if omega_c <= 0.0 {
        return 0.0;
    }
    if x == 0.0 {
        return if mu > 0.5 {
            0.0
        } else if mu == 0.5 {
            (mu.ln() * mu - omega_c.ln() * mu - ln_gamma(mu).unwrap_or(f64::NAN)).exp()
        } else {
            f64::INFINITY
        };
    }
    let ln = mu * mu.ln() + (2.0 * mu - 1.0) * x.abs().ln() - mu * omega_c.ln() - ln_gamma(mu).unwrap_or(f64::NAN)
        - mu * x * x / omega_c;
    ln.exp()
}

/// Joint η-μ density of `(x, y)`.
pub fn pdf_eta_mu(params: &EtaMuParams, x: f64, y: f64) -> f64 {
    eta_mu_marginal_pdf(params.mu, params.omega_x(), x) * eta_mu_marginal_pdf(params.mu, params.omega_y(), y)
}
