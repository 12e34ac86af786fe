//! Gamma-weighted moment integrals used as determinant entries, and the
//! semicircle-law log integral.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use super::expint::expint_en_scaled;
use super::gamma::ln_factorial;
use crate::error::{Error, Result};
use crate::quad::integrate;

fn check_w(func: &'static str, w: f64) -> Result<()> {
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::domain(func, format!("rate w = {w} must be positive and finite")));
    }
    Ok(())
}

/// `ln(Γ(n+1)/w^{n+1})`.
pub fn ln_gamma_moment(n: u32, w: f64) -> Result<f64> {
    check_w("gamma_moment", w)?;
    Ok(ln_factorial(n) - f64::from(n + 1) * w.ln())
}

/// `∫₀^∞ λⁿ e^{−wλ} dλ = Γ(n+1)/w^{n+1}`.
pub fn gamma_moment(n: u32, w: f64) -> Result<f64> {
    Ok(ln_gamma_moment(n, w)?.exp())
}

/// Log of [`log_moment_integral`]; `−∞` when `a = 0`.
pub fn ln_log_moment_integral(n: u32, w: f64, a: f64) -> Result<f64> {
    check_w("log_moment_integral", w)?;
    if !(a >= 0.0) || a.is_infinite() {
        return Err(Error::domain("log_moment_integral", format!("a = {a} must be finite and >= 0")));
    }
    if a == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    // n!/w^{n+1} · Σ_{k=1}^{n+1} e^{z}E_k(z), z = w/a
    let z = w / a;
    let mut s = 0.0;
    for k in 1..=n + 1 {
        s += expint_en_scaled(k, z)?;
    }
    Ok(ln_gamma_moment(n, w)? + s.ln())
}

/// `∫₀^∞ ln(1 + aλ) λⁿ e^{−wλ} dλ` (natural log).
pub fn log_moment_integral(n: u32, w: f64, a: f64) -> Result<f64> {
    Ok(ln_log_moment_integral(n, w, a)?.exp())
}

/// Log of [`ratio_moment_integral`].
pub fn ln_ratio_moment_integral(n: u32, w: f64, s: f64, b: f64) -> Result<f64> {
    check_w("ratio_moment_integral", w)?;
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::domain("ratio_moment_integral", format!("s = {s} must be positive")));
    }
    if !(b >= 0.0) || !b.is_finite() {
        return Err(Error::domain("ratio_moment_integral", format!("b = {b} must be >= 0")));
    }
    let base = ln_gamma_moment(n, w)?;
    if b == 0.0 {
        return Ok(base);
    }
    // 1 − b·w·e^{z}E_{n+1}(z) with z = (s+b)w, rewritten through
    // (n+1)E_{n+2}(z) = e^{−z} − zE_{n+1}(z) to avoid cancellation.
    let z = (s + b) * w;
    let bracket = f64::from(n + 1) * expint_en_scaled(n + 2, z)? + s * w * expint_en_scaled(n + 1, z)?;
    Ok(base + bracket.ln())
}

/// `∫₀^∞ (λ+s)/(λ+s+b) · λⁿ e^{−wλ} dλ`.
pub fn ratio_moment_integral(n: u32, w: f64, s: f64, b: f64) -> Result<f64> {
    Ok(ln_ratio_moment_integral(n, w, s, b)?.exp())
}

/// `∫₀⁴ log₂(1 + cλ)·(1/π)√(1/λ − 1/4) dλ`.
///
/// With `λ = 4sin²θ` the integrand becomes `(4/π)·log₂(1 + 4c·sin²θ)·cos²θ`
/// on `[0, π/2]`, which is smooth.
pub fn semicircle_log_integral(c: f64) -> Result<f64> {
    if !(c >= 0.0) || c.is_infinite() {
        return Err(Error::domain("semicircle_log_integral", format!("c = {c} must be finite and >= 0")));
    }
    if c == 0.0 {
        return Ok(0.0);
    }
    let r = integrate(
        |t| {
            let s = t.sin();
            let co = t.cos();
            (4.0 * c * s * s).ln_1p() * co * co
        },
        0.0,
        FRAC_PI_2,
        0.0,
        1e-12,
    )?;
    Ok(4.0 / PI * r.value / LN_2)
}
