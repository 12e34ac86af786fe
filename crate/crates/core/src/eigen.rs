//! Joint density of the unordered eigenvalues of a Wishart surrogate and the
//! determinant identities that turn eigenvalue expectations into small
//! determinants of one-dimensional integrals.
//!
//! For `X ~ CW_{n1}(n2, Σ)` the density has the form
//! `K·det[φⱼ(λᵢ)]·Δ(λ)·∏ λᵢ^{n2−n1}`. With `Δ(λ) = det[λᵢ^{j−1}]`,
//!
//! * `E[∏ h(λᵢ)] = K·n1!·det[∫ h(λ)·λ^{n2−n1+i−1}·φⱼ(λ) dλ]`,
//! * `E[Σᵢ g(λᵢ)] = K·n1!·Σₖ det Nᵏ`, where `Nᵏ` carries `g` in column `k`
//!   only.
//!
//! Every `φⱼ` is `(±λ)^r e^{−wλ}`, so each entry is `±F(m, w)` for a
//! moment functional `F`. Entries and prefactor are kept as logarithms and
//! the determinants are taken after per-row scaling.
//!
//! When `w2` is close to `w1` the last column `e^{−w2λ}` is nearly a
//! combination of the others and the determinant cancels to `O(δ^{n1−1})`,
//! `δ = w2 − w1`. The confluent form removes the first `n1−1` Taylor terms of
//! `e^{−δλ}` (they are exactly the other columns) and divides by `δ^{n1−1}`
//! analytically, leaving `Σ_{j≥0} (−1)^{j+r} δʲ/(j+r)!·λ^{j+r}e^{−w1λ}`,
//! `r = n1−1`, as the last column.

use crate::approx::{CovarianceModel, WishartApprox};
use crate::error::{Error, Result};
use crate::linalg::signed_log_det;
use crate::specfun::{ln_factorial, ln_gamma_moment};

/// Column structure of the density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// `Σ = Ω·I`: columns `λ^{j−1}e^{−λ/Ω}`.
    Identity { omega: f64 },
    /// Two distinct eigenvalues of `Σ⁻¹`: columns `(−λ)^{j−1}e^{−w1λ}` for
    /// `j < n1` and `e^{−w2λ}` for `j = n1`.
    TwoEig { w1: f64, w2: f64 },
    /// Same density with `w2` close to `w1`; the last column is expanded
    /// around `w1` (see the module docs).
    Confluent { w1: f64, w2: f64 },
}

/// Relative rate gap below which the confluent expansion is used. For
/// `w2 < w1` the series has positive terms; for `w2 > w1` it alternates and
/// its first ratio `t·(n2+n1−1)/n1` is kept under 1/2.
fn confluent(n1: usize, n2: usize, w1: f64, w2: f64) -> bool {
    if n1 < 2 {
        return false;
    }
    let t = (w2 - w1) / w1;
    if t < 0.0 {
        t >= -0.1
    } else {
        t * (n2 + n1 - 1) as f64 / n1 as f64 <= 0.5
    }
}

const SERIES_MAX_TERMS: usize = 5000;

/// Eigenvalue density of `CW_{n1}(n2, Σ)` in determinant form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenForm {
    pub n1: usize,
    pub n2: usize,
    pub kernel: Kernel,
    /// Sign and log-magnitude of `K·n1!`.
    pub sign: f64,
    pub ln_prefactor: f64,
}

impl EigenForm {
    /// Chooses the identity branch when `Σ` is numerically `a·I` or `n1 = 1`.
    pub fn from_wishart(w: &WishartApprox) -> Result<Self> {
        let cov = w.cov;
        if cov.is_near_identity() {
            Self::identity(cov.dim(), w.dof, cov.diag())
        } else {
            Self::two_eig(&cov, w.dof)
        }
    }

    pub fn identity(n1: usize, n2: usize, omega: f64) -> Result<Self> {
        check_dims(n1, n2)?;
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::invalid(format!("covariance scale omega = {omega} must be > 0")));
        }
        let mut ln = -((n1 * n2) as f64) * omega.ln();
        for i in 1..=n1 {
            ln -= ln_factorial((n2 - i) as u32) + ln_factorial((n1 - i) as u32);
        }
        Ok(EigenForm { n1, n2, kernel: Kernel::Identity { omega }, sign: 1.0, ln_prefactor: ln })
    }

    pub fn two_eig(cov: &CovarianceModel, n2: usize) -> Result<Self> {
        let (w1, w2) = cov.inverse_eigenvalues();
        Self::from_rates(cov.dim(), n2, w1, w2, cov.ln_det())
    }

    /// From the two eigenvalues of `Σ⁻¹` (`w1` with multiplicity `n1−1`).
    pub fn from_rates(n1: usize, n2: usize, w1: f64, w2: f64, ln_det_sigma: f64) -> Result<Self> {
        check_dims(n1, n2)?;
        if !(w1 > 0.0 && w2 > 0.0) || !(w1.is_finite() && w2.is_finite()) {
            return Err(Error::invalid(format!("rates must be positive (w1 = {w1}, w2 = {w2})")));
        }
        if n1 > 1 && w1 == w2 {
            return Err(Error::invalid("w1 = w2: use the identity-covariance density"));
        }
        let mut sign = if (n1 * (n1 - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let gap = w2 - w1;
        let series = confluent(n1, n2, w1, w2);
        let mut ln = -(n2 as f64) * ln_det_sigma;
        if n1 > 1 && !series {
            ln -= (n1 - 1) as f64 * gap.abs().ln();
            if gap < 0.0 && (n1 - 1) % 2 == 1 {
                sign = -sign;
            }
        }
        for j in 1..=n1 {
            ln -= ln_factorial((n2 - j) as u32);
        }
        for j in 1..n1.saturating_sub(1) {
            ln -= ln_factorial(j as u32);
        }
        let kernel = if series { Kernel::Confluent { w1, w2 } } else { Kernel::TwoEig { w1, w2 } };
        Ok(EigenForm { n1, n2, kernel, sign, ln_prefactor: ln })
    }

    /// `(sign, order m, rate w)` of entry `(i, j)` (0-based) when it is a
    /// single moment `sign·∫ λ^m e^{−wλ}·(weight) dλ`; `None` for the
    /// expanded last column of the confluent kernel.
    pub fn entry(&self, i: usize, j: usize) -> Option<(f64, u32, f64)> {
        let base = (self.n2 - self.n1 + i) as u32;
        let alt = if j % 2 == 0 { 1.0 } else { -1.0 };
        match self.kernel {
            Kernel::Identity { omega } => Some((1.0, base + j as u32, 1.0 / omega)),
            Kernel::TwoEig { w1, w2 } => {
                if j + 1 < self.n1 {
                    Some((alt, base + j as u32, w1))
                } else {
                    Some((1.0, base, w2))
                }
            }
            Kernel::Confluent { w1, .. } => (j + 1 < self.n1).then_some((alt, base + j as u32, w1)),
        }
    }

    /// Signed log of `Σ_{j≥0} (−1)^{j+r} δʲ/(j+r)!·F(m+r+j, w1)`.
    fn series_entry<F>(&self, m: u32, f: &F) -> Result<(f64, f64)>
    where
        F: Fn(u32, f64) -> Result<f64>,
    {
        let Kernel::Confluent { w1, w2 } = self.kernel else { unreachable!("series entry on a plain kernel") };
        let r = (self.n1 - 1) as u32;
        let delta = w2 - w1;
        let ln_d = delta.abs().ln();
        // terms carry the sign (−sgn δ)^j; the overall (−1)^r is applied last
        let step = if delta > 0.0 { -1.0 } else { 1.0 };
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        let mut peak = f64::NEG_INFINITY;
        let mut sgn = 1.0;
        let mut falling = 0;
        let mut prev = f64::NEG_INFINITY;
        for j in 0..SERIES_MAX_TERMS as u32 {
            let t = if j == 0 { 0.0 } else { j as f64 * ln_d } - ln_factorial(j + r) + f(m + r + j, w1)?;
            if sgn > 0.0 { pos.push(t) } else { neg.push(t) }
            peak = peak.max(t);
            falling = if t < prev { falling + 1 } else { 0 };
            prev = t;
            if falling >= 3 && t < peak - 40.0 {
                let total: f64 = pos.iter().map(|v| (v - peak).exp()).sum::<f64>()
                    - neg.iter().map(|v| (v - peak).exp()).sum::<f64>();
                let sign = if r % 2 == 0 { 1.0 } else { -1.0 } * total.signum();
                return Ok((sign, peak + total.abs().ln()));
            }
            sgn *= step;
        }
        Err(Error::NonConvergence { func: "confluent eigenvalue series", max_terms: SERIES_MAX_TERMS })
    }

    fn matrix<F>(&self, col_fn: &F, special: Option<usize>) -> Result<(Vec<f64>, Vec<f64>)>
    where
        F: Fn(u32, f64) -> Result<f64>,
    {
        let n = self.n1;
        let mut sign = vec![0.0; n * n];
        let mut ln = vec![0.0; n * n];
        let plain = |m: u32, w: f64| ln_gamma_moment(m, w);
        for i in 0..n {
            for j in 0..n {
                let use_g = matches!(special, Some(k) if k != j);
                let (s, v) = match self.entry(i, j) {
                    Some((s, m, w)) => (s, if use_g { ln_gamma_moment(m, w)? } else { col_fn(m, w)? }),
                    None => {
                        let m = (self.n2 - self.n1 + i) as u32;
                        if use_g {
                            self.series_entry(m, &plain)?
                        } else {
                            self.series_entry(m, col_fn)?
                        }
                    }
                };
                sign[i * n + j] = s;
                ln[i * n + j] = v;
            }
        }
        Ok((sign, ln))
    }

    /// `E[∏ᵢ h(λᵢ)]` where `ln_moment(m, w) = ln ∫ h(λ) λ^m e^{−wλ} dλ`.
    pub fn expected_product<F>(&self, ln_moment: F) -> Result<f64>
    where
        F: Fn(u32, f64) -> Result<f64>,
    {
        let (sign, ln) = self.matrix(&ln_moment, None)?;
        let (s, l) = signed_log_det(self.n1, &sign, &ln)?;
        Ok(self.sign * s * (self.ln_prefactor + l).exp())
    }

    /// `E[Σᵢ g(λᵢ)]` where `ln_moment(m, w) = ln ∫ g(λ) λ^m e^{−wλ} dλ`
    /// (`g ≥ 0`).
    pub fn expected_sum<F>(&self, ln_moment: F) -> Result<f64>
    where
        F: Fn(u32, f64) -> Result<f64>,
    {
        let mut terms = Vec::with_capacity(self.n1);
        for k in 0..self.n1 {
            let (sign, ln) = self.matrix(&ln_moment, Some(k))?;
            terms.push(signed_log_det(self.n1, &sign, &ln)?);
        }
        let peak = terms.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
        if peak == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        let sum: f64 = terms.iter().map(|(s, l)| s * (l - peak).exp()).sum();
        Ok(self.sign * sum * (self.ln_prefactor + peak).exp())
    }

    /// `K·n1!·det N⁰`; equals 1 for a correctly normalized density.
    pub fn total_mass(&self) -> Result<f64> {
        self.expected_product(ln_gamma_moment)
    }

    /// Pointwise density of the unordered eigenvalues.
    pub fn density(&self, lambdas: &[f64]) -> Result<f64> {
        let n = self.n1;
        if lambdas.len() != n {
            return Err(Error::Dimension(format!("expected {n} eigenvalues, got {}", lambdas.len())));
        }
        if lambdas.iter().any(|l| !(*l >= 0.0)) {
            return Err(Error::domain("eig_density", "eigenvalues must be >= 0"));
        }
        let mut phi = vec![0.0; n * n];
        for (i, &l) in lambdas.iter().enumerate() {
            for j in 0..n {
                phi[i * n + j] = match self.kernel {
                    Kernel::Identity { omega } => l.powi(j as i32) * (-l / omega).exp(),
                    Kernel::TwoEig { w1, w2 } => {
                        if j + 1 < n {
                            (-l).powi(j as i32) * (-w1 * l).exp()
                        } else {
                            (-w2 * l).exp()
                        }
                    }
                    Kernel::Confluent { w1, w2 } => {
                        if j + 1 < n {
                            (-l).powi(j as i32) * (-w1 * l).exp()
                        } else {
                            taylor_remainder(n as i32 - 1, w2 - w1, l) * (-w1 * l).exp()
                        }
                    }
                };
            }
        }
        let signs: Vec<f64> = phi.iter().map(|v| if *v < 0.0 { -1.0 } else { 1.0 }).collect();
        let lns: Vec<f64> = phi.iter().map(|v| v.abs().ln()).collect();
        let (s, l) = signed_log_det(n, &signs, &lns)?;
        let mut vdm = 1.0;
        for i in 0..n {
            for j in i + 1..n {
                vdm *= lambdas[j] - lambdas[i];
            }
        }
        let pow: f64 = lambdas.iter().map(|l| l.powi((self.n2 - self.n1) as i32)).product();
        let ln_n1_fact = ln_factorial(n as u32);
        Ok(self.sign * s * (self.ln_prefactor - ln_n1_fact + l).exp() * vdm * pow)
    }
}

/// `(e^{−δλ} − Σ_{k<r} (−δλ)^k/k!) / δ^r`.
fn taylor_remainder(r: i32, delta: f64, l: f64) -> f64 {
    let z = delta * l;
    if z.abs() >= 1.0 {
        let mut head = 0.0;
        let mut t = 1.0;
        for k in 0..r {
            head += t;
            t *= -z / (k + 1) as f64;
        }
        return ((-z).exp() - head) / delta.powi(r);
    }
    // Σ_{k≥r} (−1)^k δ^{k−r} λ^k / k!
    let mut t = (-l).powi(r) / (1..=r).map(f64::from).product::<f64>();
    let mut s = 0.0;
    for k in r..r + 60 {
        s += t;
        t *= -z / (k + 1) as f64;
        if t.abs() < 1e-18 * s.abs() {
            break;
        }
    }
    s
}

fn check_dims(n1: usize, n2: usize) -> Result<()> {
    if n1 == 0 || n2 < n1 {
        return Err(Error::invalid(format!("need 1 <= n1 <= n2, got n1 = {n1}, n2 = {n2}")));
    }
    if n2 > 170 {
        return Err(Error::invalid(format!("n2 = {n2} is beyond the supported range")));
    }
    Ok(())
}
