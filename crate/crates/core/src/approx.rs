//! Moment-matched central Wishart surrogate `CW(n2, Σ)` for the Gram matrix
//! `X = H·Hᴴ` of an `n1 × n2` channel with i.i.d. entries.
//!
//! `Σ = E[X]/n2` has equal diagonal entries `a = E|h|²` and equal off-diagonal
//! entries `y = |E[h]|²`, so it is fully described by [`CovarianceModel`].

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fading::{sample_rayleigh_vector, EtaMuParams, FadingModel, KappaMuParams};
use crate::linalg::{gram, ln_det_hpd, ComplexMatrix, HermitianMatrix};
use crate::mc::{run_trials, McConfig};
use crate::specfun::{appell_psi1, digamma, SeriesControl};

/// Relative off-diagonal size below which `Σ` is treated as `a·I`.
pub const IDENTITY_THRESHOLD: f64 = 1e-9;

/// `n1 × n1` matrix with diagonal `a` and every off-diagonal entry `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceModel {
    dim: usize,
    a: f64,
    y: f64,
}

impl CovarianceModel {
    pub fn new(dim: usize, a: f64, y: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("covariance dimension must be >= 1".into()));
        }
        if !(a > 0.0) || !a.is_finite() || !y.is_finite() {
            return Err(Error::invalid(format!("covariance needs finite a > 0 (a = {a}, y = {y})")));
        }
        let m = CovarianceModel { dim, a, y };
        if dim > 1 && !(m.e_small() > 0.0 && m.e_large() > 0.0) {
            return Err(Error::invalid(format!(
                "exchangeable covariance with a = {a}, y = {y}, n1 = {dim} is not positive definite"
            )));
        }
        Ok(m)
    }

    /// `Ω·I`.
    pub fn scaled_identity(dim: usize, omega: f64) -> Result<Self> {
        Self::new(dim, omega, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn diag(&self) -> f64 {
        self.a
    }

    pub fn offdiag(&self) -> f64 {
        self.y
    }

    /// `a − y`, multiplicity `n1 − 1`.
    pub fn e_small(&self) -> f64 {
        self.a - self.y
    }

    /// `a + (n1−1)·y`, multiplicity 1.
    pub fn e_large(&self) -> f64 {
        self.a + (self.dim as f64 - 1.0) * self.y
    }

    pub fn ln_det(&self) -> f64 {
        (self.dim as f64 - 1.0) * self.e_small().ln() + self.e_large().ln()
    }

    pub fn det(&self) -> f64 {
        self.ln_det().exp()
    }

    /// Eigenvalues `(w1, w2) = (1/(a−y), 1/(a+(n1−1)y))` of `Σ⁻¹`.
    pub fn inverse_eigenvalues(&self) -> (f64, f64) {
        (1.0 / self.e_small(), 1.0 / self.e_large())
    }

    /// True when the formulas must use the `Σ = a·I` branch.
    pub fn is_near_identity(&self) -> bool {
        self.dim == 1 || self.y.abs() / self.a < IDENTITY_THRESHOLD
    }

    pub fn to_matrix(&self) -> HermitianMatrix {
        let (a, y) = (self.a, self.y);
        HermitianMatrix::new(ComplexMatrix::from_fn(self.dim, self.dim, |i, j| {
            Complex64::new(if i == j { a } else { y }, 0.0)
        }))
        .expect("exchangeable matrix is symmetric")
    }

    /// `Σ^{1/2}·G`, using `Σ^{1/2} = √e_s·(I − J/n) + √e_l·J/n`.
    pub fn sqrt_mul(&self, g: &ComplexMatrix) -> Result<ComplexMatrix> {
        if g.rows() != self.dim {
            return Err(Error::Dimension(format!("Σ^(1/2) is {0}x{0}, operand has {1} rows", self.dim, g.rows())));
        }
        let n = self.dim as f64;
        let rs = self.e_small().max(0.0).sqrt();
        let rl = self.e_large().sqrt();
        let k = (rl - rs) / n;
        let col_sums: Vec<Complex64> = (0..g.cols()).map(|j| (0..g.rows()).map(|i| g[(i, j)]).sum()).collect();
        Ok(ComplexMatrix::from_fn(g.rows(), g.cols(), |i, j| g[(i, j)] * rs + col_sums[j] * k))
    }
}

/// Central complex Wishart surrogate `CW_{n1}(n2, Σ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WishartApprox {
    pub dof: usize,
    pub cov: CovarianceModel,
}

impl WishartApprox {
    pub fn new(dof: usize, cov: CovarianceModel) -> Result<Self> {
        if dof < cov.dim() {
            return Err(Error::invalid(format!("Wishart dof {dof} below dimension {}", cov.dim())));
        }
        Ok(WishartApprox { dof, cov })
    }

    pub fn n1(&self) -> usize {
        self.cov.dim()
    }

    /// `E[X] = n2·Σ`.
    pub fn mean(&self) -> HermitianMatrix {
        self.cov.to_matrix().scaled(self.dof as f64)
    }
}

/// Wishart surrogate with an unstructured covariance (Rician entries with
/// arbitrary means).
#[derive(Debug, Clone, PartialEq)]
pub struct FullWishartApprox {
    pub dof: usize,
    pub cov: HermitianMatrix,
}

impl FullWishartApprox {
    /// The exchangeable form of `cov`, if it has one.
    pub fn exchangeable(&self) -> Option<CovarianceModel> {
        let n = self.cov.dim();
        let a = self.cov[(0, 0)].re;
        let y = if n > 1 { self.cov[(0, 1)] } else { Complex64::new(0.0, 0.0) };
        let tol = 1e-12 * a.abs().max(1.0);
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { Complex64::new(a, 0.0) } else { y };
                if (self.cov[(i, j)] - want).norm() > tol {
                    return None;
                }
            }
        }
        if y.im.abs() > tol {
            return None;
        }
        CovarianceModel::new(n, a, y.re).ok()
    }
}

/// Approximation of `E[x]` for a κ-μ component with line-of-sight magnitude
/// `losc` (use `q` for `E[y]`).
pub fn mean_component_kmu(losc: f64, sigma2: f64, mu: f64) -> Result<f64> {
    mean_component_kmu_with(losc, sigma2, mu, SeriesControl::default())
}

/// [`mean_component_kmu`] with explicit series control.
pub fn mean_component_kmu_with(losc: f64, sigma2: f64, mu: f64, ctl: SeriesControl) -> Result<f64> {
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(Error::invalid(format!("sigma2 = {sigma2} must be > 0")));
    }
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::invalid(format!("mu = {mu} must be > 0")));
    }
    if !losc.is_finite() {
        return Err(Error::invalid("line-of-sight magnitude must be finite"));
    }
    if losc == 0.0 {
        return Ok(0.0);
    }
    let p2 = losc * losc;
    let pi = std::f64::consts::PI;
    let den = 4.0 * sigma2 + 2.0 * p2 * pi;
    let x = 2.0 * p2 * pi / den;
    let y = 2.0 * p2 / den;
    let psi = appell_psi1(0.5 * mu + 1.0, 1.0, 1.5, 0.5 * mu, x, y, ctl)?;
    let ln = std::f64::consts::LN_2 + losc.abs().ln() - p2 / (2.0 * sigma2)
        + (0.5 * mu + 1.0) * (4.0 * sigma2 / den).ln()
        + (0.5 * mu).ln()
        + psi.ln();
    Ok(losc.signum() * ln.exp())
}

fn check_dims(n1: usize, n2: usize) -> Result<()> {
    if n1 == 0 || n2 < n1 {
        return Err(Error::invalid(format!("need 1 <= n1 <= n2, got n1 = {n1}, n2 = {n2}")));
    }
    Ok(())
}

/// Surrogate for κ-μ entries: `a = 2σ²(1+κ)μ`, `y = E[x]² + E[y]²`.
pub fn build_wishart_kmu(params: &KappaMuParams, n1: usize, n2: usize) -> Result<WishartApprox> {
    params.validate()?;
    check_dims(n1, n2)?;
    let mx = mean_component_kmu(params.p, params.sigma2, params.mu)?;
    let my = mean_component_kmu(params.q, params.sigma2, params.mu)?;
    WishartApprox::new(n2, CovarianceModel::new(n1, params.mean_power(), mx * mx + my * my)?)
}

/// Surrogate for η-μ entries: `Σ = Ω·I`, independent of η.
pub fn build_wishart_eta_mu(params: &EtaMuParams, n1: usize, n2: usize) -> Result<WishartApprox> {
    params.validate()?;
    check_dims(n1, n2)?;
    WishartApprox::new(n2, CovarianceModel::scaled_identity(n1, params.omega)?)
}

/// Surrogate for any model with i.i.d. entries.
pub fn build_wishart(model: &FadingModel, n1: usize, n2: usize) -> Result<WishartApprox> {
    model.validate()?;
    check_dims(n1, n2)?;
    match model {
        FadingModel::KappaMu(p) => build_wishart_kmu(p, n1, n2),
        FadingModel::EtaMu(p) => build_wishart_eta_mu(p, n1, n2),
        FadingModel::Rician { mean, .. } => {
            WishartApprox::new(n2, CovarianceModel::new(n1, model.mean_power(), mean.norm_sqr())?)
        }
        FadingModel::Nakagami { .. } | FadingModel::Rayleigh { .. } => {
            WishartApprox::new(n2, CovarianceModel::scaled_identity(n1, model.mean_power())?)
        }
    }
}

/// Surrogate for Rician entries with mean matrix `M` (`n1 × n2`) and scatter
/// variance `sigma2_prime` per component: `Σ = 2σ′²·I + M·Mᴴ/n2`.
pub fn build_wishart_rician(mean: &ComplexMatrix, sigma2_prime: f64, n2: usize) -> Result<FullWishartApprox> {
    if mean.cols() != n2 {
        return Err(Error::Dimension(format!("mean matrix has {} columns, n2 = {n2}", mean.cols())));
    }
    check_dims(mean.rows(), n2)?;
    if !(sigma2_prime > 0.0) || !sigma2_prime.is_finite() {
        return Err(Error::invalid(format!("sigma2_prime = {sigma2_prime} must be > 0")));
    }
    let cov = gram(mean).scaled(1.0 / n2 as f64).shifted(2.0 * sigma2_prime);
    Ok(FullWishartApprox { dof: n2, cov })
}

/// One draw `X = Σ^{1/2}G·(Σ^{1/2}G)ᴴ` with `G` an `n1 × n2` matrix of `CN(0, 1)`.
pub fn sample_wishart<R: Rng + ?Sized>(approx: &WishartApprox, rng: &mut R) -> HermitianMatrix {
    let n1 = approx.n1();
    let n2 = approx.dof;
    let g = ComplexMatrix::new(n1, n2, sample_rayleigh_vector(n1 * n2, rng)).expect("shape matches");
    gram(&approx.cov.sqrt_mul(&g).expect("shape matches"))
}

fn push_matrix(m: &ComplexMatrix, out: &mut [f64]) {
    for (k, z) in m.as_slice().iter().enumerate() {
        out[2 * k] = z.re;
        out[2 * k + 1] = z.im;
    }
}

fn pull_matrix(n: usize, vals: &[f64]) -> ComplexMatrix {
    ComplexMatrix::new(n, n, (0..n * n).map(|k| Complex64::new(vals[2 * k], vals[2 * k + 1])).collect())
        .expect("shape matches")
}

/// Fits the Wishart degree of freedom by minimizing the Kullback–Leibler
/// divergence to the true Gram law, using Monte-Carlo estimates of
/// `Z = E[X]` and `Y = E[ln det X]`. Solves
/// `n1·ln n − ln|Z| + Y − Σᵢ ψ(n−i+1) = 0` on `[n1, 10·n2]`.
pub fn fit_dof_kl(model: &FadingModel, n1: usize, n2: usize, cfg: &McConfig) -> Result<f64> {
    check_dims(n1, n2)?;
    if cfg.trials < 1000 {
        return Err(Error::invalid("fit_dof_kl needs at least 1000 trials"));
    }
    let sampler = model.sampler()?;
    let width = 2 * n1 * n1 + 1;
    let est = run_trials(cfg, width, |rng, out| {
        let x = gram(&sampler.sample_matrix(n1, n2, rng));
        push_matrix(x.as_matrix(), out);
        out[width - 1] = ln_det_hpd(&x).map_err(|_| Error::Estimation("singular Gram sample".into()))?;
        Ok(())
    })?;
    let means: Vec<f64> = est.iter().map(|e| e.mean).collect();
    let z = HermitianMatrix::new(pull_matrix(n1, &means))
        .map_err(|e| Error::Estimation(format!("mean Gram matrix: {e}")))?;
    let ln_z = ln_det_hpd(&z).map_err(|_| Error::Estimation("mean Gram matrix is singular".into()))?;
    let y = means[width - 1];
    solve_dof(n1, n2, ln_z, y)
}

/// Root of the dof stationarity equation for given `ln|Z|` and `Y`.
pub fn solve_dof(n1: usize, n2: usize, ln_z: f64, y: f64) -> Result<f64> {
    let g = |n: f64| -> Result<f64> {
        let mut s = n1 as f64 * n.ln() - ln_z + y;
        for i in 1..=n1 {
            s -= digamma(n - i as f64 + 1.0)?;
        }
        Ok(s)
    };
    let (mut lo, mut hi) = (n1 as f64, 10.0 * n2 as f64);
    let (mut glo, ghi) = (g(lo)?, g(hi)?);
    if glo == 0.0 {
        return Ok(lo);
    }
    if glo.signum() == ghi.signum() {
        return Err(Error::Estimation(format!(
            "no sign change of the dof equation on [{lo}, {hi}] (values {glo:e}, {ghi:e})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid)?;
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Second-moment discrepancy between the true Gram ensemble and its Wishart
/// surrogate: `Σᵢⱼ |E_p[XXᴴ] − E_q[XXᴴ]|ᵢⱼ / Σᵢⱼ Re E_p[XXᴴ]ᵢⱼ`.
///
/// The two ensembles are estimated with the same trial count on independent
/// streams.
pub fn nmse_second_moment(model: &FadingModel, n1: usize, n2: usize, cfg: &McConfig) -> Result<f64> {
    check_dims(n1, n2)?;
    let approx = build_wishart(model, n1, n2)?;
    let sampler = model.sampler()?;
    let width = 2 * n1 * n1;
    let square = |x: &HermitianMatrix| -> ComplexMatrix {
        let m = x.as_matrix();
        m.matmul(m).expect("square matrix")
    };
    let truth = run_trials(cfg, width, |rng, out| {
        let x = gram(&sampler.sample_matrix(n1, n2, rng));
        push_matrix(&square(&x), out);
        Ok(())
    })?;
    let surrogate = run_trials(&cfg.derived(1), width, |rng, out| {
        push_matrix(&square(&sample_wishart(&approx, rng)), out);
        Ok(())
    })?;
    let t = pull_matrix(n1, &truth.iter().map(|e| e.mean).collect::<Vec<_>>());
    let s = pull_matrix(n1, &surrogate.iter().map(|e| e.mean).collect::<Vec<_>>());
    let num: f64 = t.as_slice().iter().zip(s.as_slice()).map(|(a, b)| (a - b).norm()).sum();
    let den: f64 = t.as_slice().iter().map(|z| z.re).sum();
    Ok(num / den)
}
