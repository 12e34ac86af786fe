//! Generalized exponential integral `Eₙ(x) = ∫₁^∞ e^{−xt} t^{−n} dt`.

use crate::error::{Error, Result};

const EULER: f64 = 0.577_215_664_901_532_860_606_512_090_082;
const MAX_ITER: usize = 5000;

/// `Eₙ(x)` for `n ≥ 1`, `x > 0`.
pub fn expint_en(n: u32, x: f64) -> Result<f64> {
    check(n, x)?;
    if x > 1.0 {
        Ok((-x).exp() * continued_fraction(n, x)?)
    } else {
        series(n, x)
    }
}

/// `e^{x}·Eₙ(x)`, finite for arbitrarily large `x`.
pub fn expint_en_scaled(n: u32, x: f64) -> Result<f64> {
    check(n, x)?;
    if x > 1.0 {
        continued_fraction(n, x)
    } else {
        Ok(x.exp() * series(n, x)?)
    }
}

fn check(n: u32, x: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("expint_en", "order n must be >= 1"));
    }
    if !(x > 0.0) || x.is_nan() {
        return Err(Error::domain("expint_en", format!("x = {x} <= 0")));
    }
    Ok(())
}

// Modified Lentz evaluation of the continued fraction for e^{x}·Eₙ(x).
fn continued_fraction(n: u32, x: f64) -> Result<f64> {
    if x.is_infinite() {
        return Ok(0.0);
    }
    let tiny = 1e-300;
    let nf = f64::from(n);
    let mut b = x + nf;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let fi = i as f64;
        let an = -fi * (nf - 1.0 + fi);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            return Ok(h);
        }
    }
    Err(Error::NonConvergence { func: "expint_en", max_terms: MAX_ITER })
}

// Power series, valid for 0 < x ≤ 1.
fn series(n: u32, x: f64) -> Result<f64> {
    let nm1 = n - 1;
    let mut ans = if nm1 != 0 { 1.0 / f64::from(nm1) } else { -x.ln() - EULER };
    let mut fact = 1.0;
    for i in 1..=MAX_ITER as u32 {
        fact *= -x / f64::from(i);
        let del = if i != nm1 {
            -fact / (f64::from(i) - f64::from(nm1))
        } else {
            let psi = -EULER + (1..=nm1).map(|k| 1.0 / f64::from(k)).sum::<f64>();
            fact * (-x.ln() + psi)
        };
        ans += del;
        if del.abs() < ans.abs() * 1e-17 {
            return Ok(ans);
        }
    }
    Err(Error::NonConvergence { func: "expint_en", max_terms: MAX_ITER })
}
