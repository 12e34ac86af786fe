//! Confluent Appell function
//! `Ψ1(a, b; c1, c2; x, y) = Σ_k Σ_n (a)_{k+n}(b)_k / ((c1)_k (c2)_n) · x^k/k! · y^n/n!`.
//!
//! Summed by rows: `Ψ1 = Σ_k T_k·F_k` with `T_k = (a)_k(b)_k/((c1)_k k!)·x^k` and
//! `F_k = ₁F₁(a+k; c2; y)`. Each sum stops on a geometric tail bound.

use super::SeriesControl;
use crate::error::{Error, Result};

fn nonpositive_integer(c: f64) -> bool {
    c <= 0.0 && c.fract() == 0.0
}

/// Evaluates `Ψ1(a, b; c1, c2; x, y)` for `0 ≤ x < 1`.
pub fn appell_psi1(a: f64, b: f64, c1: f64, c2: f64, x: f64, y: f64, ctl: SeriesControl) -> Result<f64> {
    ctl.validate()?;
    if !(0.0..1.0).contains(&x) {
        return Err(Error::domain("appell_psi1", format!("x = {x} outside [0, 1)")));
    }
    if nonpositive_integer(c1) || nonpositive_integer(c2) {
        return Err(Error::domain("appell_psi1", "c1 and c2 must not be nonpositive integers"));
    }
    if ![a, b, c1, c2, y].iter().all(|v| v.is_finite()) {
        return Err(Error::domain("appell_psi1", "non-finite argument"));
    }

    let mut total = 0.0;
    let mut t_k = 1.0;
    let mut prev_row: Option<f64> = None;
    let mut settled = 0;
    for k in 0..ctl.max_terms {
        let kf = k as f64;
        let row = t_k * kummer(a + kf, c2, y, ctl)?;
        total += row;
        if !total.is_finite() {
            return Err(Error::NonConvergence { func: "appell_psi1", max_terms: ctl.max_terms });
        }
        if row == 0.0 && t_k == 0.0 {
            return Ok(total);
        }
        if let Some(p) = prev_row {
            let ratio = if p != 0.0 { (row / p).abs() } else { 0.0 };
            let rho = ratio.max(x);
            if rho < 1.0 {
                let tail = row.abs() * rho / (1.0 - rho);
                if tail <= ctl.rel_tol * total.abs() {
                    settled += 1;
                    if settled >= 2 {
                        return Ok(total);
                    }
                } else {
                    settled = 0;
                }
            }
        }
        prev_row = Some(row);
        t_k *= (a + kf) * (b + kf) / ((c1 + kf) * (kf + 1.0)) * x;
    }
    Err(Error::NonConvergence { func: "appell_psi1", max_terms: ctl.max_terms })
}

// ₁F₁(a; c; y) by its ascending series with a ratio tail bound.
fn kummer(a: f64, c: f64, y: f64, ctl: SeriesControl) -> Result<f64> {
    if y == 0.0 {
        return Ok(1.0);
    }
    let mut sum = 1.0;
    let mut t = 1.0;
    for n in 0..ctl.max_terms {
        let nf = n as f64;
        let r = (a + nf) * y / ((c + nf) * (nf + 1.0));
        t *= r;
        sum += t;
        if t == 0.0 {
            return Ok(sum);
        }
        // Once the term ratio is below one and shrinking, the tail is geometric.
        let next = ((a + nf + 1.0) * y / ((c + nf + 1.0) * (nf + 2.0))).abs();
        if r.abs() < 1.0 && next <= r.abs() && next < 1.0 {
            let tail = t.abs() * next / (1.0 - next);
            if tail <= 0.01 * ctl.rel_tol * sum.abs() {
                return Ok(sum);
            }
        }
    }
    Err(Error::NonConvergence { func: "appell_psi1", max_terms: ctl.max_terms })
}
