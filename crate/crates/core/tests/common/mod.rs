// Independent reference implementations used by the integration tests.
// Nothing here calls into the crate under test except where noted.
#![allow(dead_code)]

use wishfade::Complex64;

pub fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

pub fn assert_rel(got: f64, want: f64, tol: f64, what: &str) {
    let e = rel_err(got, want);
    assert!(e <= tol, "{what}: got {got:.17e}, want {want:.17e}, rel err {e:.3e} > {tol:.1e}");
}

/// Composite Simpson rule on `n` (rounded up to even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let x = a + i as f64 * h;
        s += if i % 2 == 1 { 4.0 * f(x) } else { 2.0 * f(x) };
    }
    s * h / 3.0
}

/// Simpson over `[0, ∞)` mapped through `x = t/(1-t)`.
pub fn simpson_half_line<F: Fn(f64) -> f64>(f: F, n: usize) -> f64 {
    simpson(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let x = t / (1.0 - t);
            let v = f(x) / ((1.0 - t) * (1.0 - t));
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        n,
    )
}

/// Compensated (Neumaier) sum.
pub fn ksum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

/// Plain ascending series for I_ν(x) with a fixed number of terms.
/// `ln_gamma_nu1` is ln Γ(ν+1), supplied by the caller.
pub fn bessel_series(nu: f64, x: f64, ln_gamma_nu1: f64, terms: usize) -> f64 {
    let q = 0.25 * x * x;
    let mut t = (nu * (0.5 * x).ln() - ln_gamma_nu1).exp();
    let mut out = Vec::with_capacity(terms);
    for k in 0..terms {
        out.push(t);
        let k1 = k as f64 + 1.0;
        t *= q / (k1 * (k1 + nu));
    }
    ksum(out)
}

/// Eₙ(x) from its definition, with t = 1/u: ∫₀¹ e^{−x/u} u^{n−2} du.
pub fn expint_quad(n: u32, x: f64) -> f64 {
    simpson(
        |u| if u <= 0.0 { 0.0 } else { (-x / u).exp() * u.powi(n as i32 - 2) },
        0.0,
        1.0,
        200_000,
    )
}

/// Brute-force Ψ1 double sum over an `nmax × kmax` rectangle.
pub fn psi1_bruteforce(a: f64, b: f64, c1: f64, c2: f64, x: f64, y: f64, nmax: usize, kmax: usize) -> f64 {
    let mut terms = Vec::with_capacity(nmax * kmax);
    // t(n, k) built by ratios along both axes
    let mut row0 = 1.0f64;
    for n in 0..nmax {
        let mut t = row0;
        for k in 0..kmax {
            terms.push(t);
            let kf = k as f64;
            t *= (a + n as f64 + kf) * (b + kf) / ((c1 + kf) * (kf + 1.0)) * x;
            if t == 0.0 {
                break;
            }
        }
        let nf = n as f64;
        row0 *= (a + nf) / ((c2 + nf) * (nf + 1.0)) * y;
        if row0 == 0.0 {
            break;
        }
    }
    ksum(terms)
}

/// ₂F₁(a, b; c; x) by direct summation.
pub fn hyp2f1(a: f64, b: f64, c: f64, x: f64) -> f64 {
    let mut t = 1.0;
    let mut s = vec![];
    for k in 0..5000 {
        s.push(t);
        let kf = k as f64;
        t *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * x;
        if t.abs() < 1e-300 {
            break;
        }
    }
    ksum(s)
}

/// ₁F₁(a; c; x) by direct summation.
pub fn hyp1f1(a: f64, c: f64, x: f64) -> f64 {
    let mut t = 1.0;
    let mut s = vec![];
    for k in 0..5000 {
        s.push(t);
        let kf = k as f64;
        t *= (a + kf) / ((c + kf) * (kf + 1.0)) * x;
        if t.abs() < 1e-300 {
            break;
        }
    }
    ksum(s)
}

/// Determinant by cofactor expansion along the first row.
pub fn det_cofactor(m: &[Vec<Complex64>]) -> Complex64 {
    let n = m.len();
    match n {
        0 => Complex64::new(1.0, 0.0),
        1 => m[0][0],
        _ => {
            let mut d = Complex64::new(0.0, 0.0);
            for j in 0..n {
                let minor: Vec<Vec<Complex64>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| *v).collect()).collect();
                let sgn = if j % 2 == 0 { 1.0 } else { -1.0 };
                d += m[0][j] * sgn * det_cofactor(&minor);
            }
            d
        }
    }
}

/// Inverse via the adjugate.
pub fn inverse_cofactor(m: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let n = m.len();
    let det = det_cofactor(m);
    let mut inv = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<Complex64>> = m
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != i)
                .map(|(_, row)| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| *v).collect())
                .collect();
            let sgn = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            // adjugate is the transposed cofactor matrix
            inv[j][i] = det_cofactor(&minor) * sgn / det;
        }
    }
    inv
}

pub fn to_rows(m: &wishfade::ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect()).collect()
}

/// Asymptotic Kolmogorov survival function P(K > t).
pub fn kolmogorov_sf(t: f64) -> f64 {
    if t < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * t * t).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// One-sample KS p-value against a continuous CDF.
pub fn ks_pvalue(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    let sn = n.sqrt();
    kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d)
}

/// Sample mean and standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}
