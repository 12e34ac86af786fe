use crate::error::{Error, Result};

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("ln_gamma", format!("x = {x}")));
    }
    if x <= 21.0 && x.fract() == 0.0 {
        return Ok(ln_factorial(x as u32 - 1));
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

/// Digamma function `ψ(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("digamma", format!("x = {x}")));
    }
    Ok(statrs::function::gamma::digamma(x))
}

/// `ln n!`, exact summation for small `n`.
pub fn ln_factorial(n: u32) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= 20 {
        return (2..=n).map(f64::from).product::<f64>().ln();
    }
    statrs::function::gamma::ln_gamma(f64::from(n) + 1.0)
}
