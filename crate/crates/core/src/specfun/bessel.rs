//! Modified Bessel function of the first kind, evaluated in log/scaled form
//! so that `x` up to several hundred never overflows.

use std::f64::consts::PI;

use super::gamma::ln_gamma;
use crate::error::{Error, Result};

fn check(order: f64, x: f64) -> Result<()> {
    if !(order >= -0.5) || !order.is_finite() {
        return Err(Error::domain("bessel_i", format!("order = {order} < -1/2")));
    }
    if !(x >= 0.0) || x.is_nan() {
        return Err(Error::domain("bessel_i", format!("x = {x} < 0")));
    }
    Ok(())
}

/// `ln I_ν(x)`; `−∞` at `x = 0` for `ν > 0` and `+∞` for `ν < 0`.
pub fn ln_bessel_i(order: f64, x: f64) -> Result<f64> {
    check(order, x)?;
    if x == 0.0 {
        return Ok(if order == 0.0 {
            0.0
        } else if order > 0.0 {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        });
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if x > 30.0 && x > order * order {
        if let Some(v) = asymptotic(order, x) {
            return Ok(v);
        }
    }
    series(order, x)
}

/// `I_ν(x)`.
pub fn bessel_i(order: f64, x: f64) -> Result<f64> {
    Ok(ln_bessel_i(order, x)?.exp())
}

/// `e^{−x}·I_ν(x)`.
pub fn bessel_i_scaled(order: f64, x: f64) -> Result<f64> {
    Ok((ln_bessel_i(order, x)? - x).exp())
}

// Ascending series summed outward from its largest term.
fn series(nu: f64, x: f64) -> Result<f64> {
    let q = 0.25 * x * x;
    let half_ln = (0.5 * x).ln();
    let root = 0.5 * ((nu * nu + x * x).sqrt() - (nu + 2.0));
    let kstar = if root > 0.0 { root.ceil() } else { 0.0 };
    let ln_peak = (2.0 * kstar + nu) * half_ln - ln_gamma(kstar + 1.0)? - ln_gamma(kstar + nu + 1.0)?;

    let ratio = |k: f64| q / ((k + 1.0) * (k + nu + 1.0));
    let mut sum = 1.0;
    let mut t = 1.0;
    let mut k = kstar;
    for _ in 0..100_000 {
        t *= ratio(k);
        sum += t;
        k += 1.0;
        if t < 1e-17 * sum {
            break;
        }
    }
    let mut t = 1.0;
    let mut k = kstar;
    while k >= 1.0 {
        k -= 1.0;
        t /= ratio(k);
        sum += t;
        if t < 1e-17 * sum {
            break;
        }
    }
    Ok(ln_peak + sum.ln())
}

// Hankel expansion; None if the terms start growing before converging.
fn asymptotic(nu: f64, x: f64) -> Option<f64> {
    let mu4 = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut prev = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= -(mu4 - odd * odd) / (8.0 * kf * x);
        if term.abs() > prev && k > 2 {
            return None;
        }
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            return Some(x - 0.5 * (2.0 * PI * x).ln() + sum.ln());
        }
        prev = term.abs();
    }
    None
}
