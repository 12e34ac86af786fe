mod common;

use common::*;
use statrs::function::gamma::ln_gamma as ref_ln_gamma;
use wishfade::specfun::*;
use wishfade::Error;

const EULER: f64 = 0.577_215_664_901_532_860_606_512_090_082;

#[test]
fn ln_gamma_examples() {
    assert_eq!(ln_gamma(1.0).unwrap(), 0.0);
    assert_rel(ln_gamma(5.0).unwrap(), 24f64.ln(), 1e-14, "lnG(5)");
    assert_rel(ln_gamma(0.5).unwrap(), 0.5 * std::f64::consts::PI.ln(), 1e-14, "lnG(1/2)");
    // mpmath, 34 digits
    assert_rel(ln_gamma(0.1).unwrap(), 2.252712651734205902006237956895476, 1e-13, "lnG(0.1)");
    assert_rel(ln_gamma(171.5).unwrap(), 709.1431630309282422723639046173352, 1e-13, "lnG(171.5)");
    assert!(matches!(ln_gamma(0.0), Err(Error::Domain { .. })));
    assert!(ln_gamma(-1.5).is_err());
}

#[test]
fn ln_factorial_matches_ln_gamma() {
    assert_eq!(ln_factorial(0), 0.0);
    assert_eq!(ln_factorial(1), 0.0);
    for n in 2..60u32 {
        assert_rel(ln_factorial(n), ref_ln_gamma(n as f64 + 1.0), 1e-13, "ln n!");
    }
}

#[test]
fn digamma_examples_and_recurrence() {
    assert!((digamma(1.0).unwrap() + EULER).abs() < 1e-12);
    assert!((digamma(2.0).unwrap() - (1.0 - EULER)).abs() < 1e-12);
    assert!((digamma(0.3).unwrap() - -3.502524222200133124915351147545803).abs() < 1e-12);
    assert!((digamma(12.5).unwrap() - 2.485195651274912048150440341740035).abs() < 1e-12);
    for i in 1..200 {
        let x = 0.05 * i as f64;
        let r = digamma(x + 1.0).unwrap() - digamma(x).unwrap() - 1.0 / x;
        assert!(r.abs() <= 1e-10 * (1.0 + 1.0 / x), "x = {x}: {r:e}");
    }
    assert!(digamma(0.0).is_err());
}

#[test]
fn bessel_examples() {
    assert_eq!(bessel_i(0.0, 0.0).unwrap(), 1.0);
    assert_eq!(bessel_i(1.0, 0.0).unwrap(), 0.0);
    let half = (2.0 / (std::f64::consts::PI * 2.0)).sqrt() * 2f64.sinh();
    assert_rel(bessel_i(0.5, 2.0).unwrap(), half, 1e-13, "I_1/2(2)");
    assert_rel(bessel_i(0.5, 2.0).unwrap(), 2.046236863089055036605183612020732, 1e-13, "I_1/2(2) mp");
    assert_rel(bessel_i(-0.5, 0.3).unwrap(), 1.522777270731923218521456200796669, 1e-12, "I_-1/2(0.3)");
    assert_rel(bessel_i(1.5, 3.7).unwrap(), 6.12805542675322241124737887813488, 1e-12, "I_3/2(3.7)");
    assert_rel(bessel_i(2.5, 50.0).unwrap(), 2.753157630035402187494932930179e20, 1e-11, "I_5/2(50)");
    assert_rel(bessel_i_scaled(0.0, 700.0).unwrap(), 0.01508129565153135758698617452984133, 1e-10, "e^-700 I_0(700)");
    assert!(bessel_i(-0.75, 1.0).is_err());
    assert!(bessel_i(1.0, -1.0).is_err());
}

#[test]
fn bessel_matches_ascending_series() {
    for &nu in &[-0.5, 0.0, 0.5, 1.0, 1.5, 2.5, 3.0, 7.5] {
        for &x in &[0.01, 0.1, 1.0, 3.7, 5.0, 12.0, 20.0, 29.0] {
            let want = bessel_series(nu, x, ref_ln_gamma(nu + 1.0), 200);
            assert_rel(bessel_i(nu, x).unwrap(), want, 1e-10, &format!("I_{nu}({x})"));
        }
    }
}

#[test]
fn bessel_scaled_matches_series_past_the_asymptotic_switch() {
    // x = 31..60 runs the large-argument branch; the series still converges
    for &nu in &[0.0, 0.5, 1.0, 2.5] {
        for &x in &[31.0, 45.0, 60.0] {
            let want = bessel_series(nu, x, ref_ln_gamma(nu + 1.0), 400) * (-x as f64).exp();
            assert_rel(bessel_i_scaled(nu, x).unwrap(), want, 1e-10, &format!("e^-x I_{nu}({x})"));
        }
    }
}

#[test]
fn bessel_three_term_recurrence() {
    for &nu in &[0.5, 1.0, 1.5, 2.0, 3.5] {
        for &x in &[0.2, 1.0, 4.0, 15.0, 35.0, 120.0, 650.0] {
            let lo = bessel_i_scaled(nu - 1.0, x).unwrap();
            let mid = bessel_i_scaled(nu, x).unwrap();
            let hi = bessel_i_scaled(nu + 1.0, x).unwrap();
            let r = (lo - hi - 2.0 * nu / x * mid) / lo;
            assert!(r.abs() <= 1e-10, "nu = {nu}, x = {x}: {r:e}");
        }
    }
}

#[test]
fn expint_examples() {
    assert_rel(expint_en(1, 1.0).unwrap(), 0.219383934395520273677163775460121649, 1e-13, "E1(1)");
    assert_rel(expint_en(5, 0.3).unwrap(), 0.1689344133526166299373821875629292743, 1e-13, "E5(0.3)");
    assert_rel(expint_en(3, 7.5).unwrap(), 5.396967015617234101895170884341185e-5, 1e-12, "E3(7.5)");
    assert_rel(expint_en(2, 50.0).unwrap(), 3.711783318868827366785888951636968e-24, 1e-12, "E2(50)");
    // x·eˣ·Eₙ(x) = 1 − n/x + n(n+1)/x² − …; the first correction is n/x
    for n in 1..5 {
        let nf = n as f64;
        let lead = expint_en(n, 50.0).unwrap() * 50.0 * 50f64.exp();
        let two_term = 1.0 - nf / 50.0 + nf * (nf + 1.0) / 2500.0;
        assert!((lead - two_term).abs() < 1e-3, "n = {n}: {lead}");
        assert!((lead - 1.0).abs() <= nf / 50.0, "n = {n}: {lead}");
    }
    assert!(expint_en(1, 0.0).is_err());
    assert!(expint_en(0, 1.0).is_err());
}

#[test]
fn expint_matches_defining_integral() {
    for n in 1..=6 {
        for &x in &[0.05, 0.3, 0.9, 1.0, 1.1, 2.5, 8.0, 20.0] {
            let want = expint_quad(n, x);
            assert_rel(expint_en(n, x).unwrap(), want, 1e-9, &format!("E{n}({x})"));
        }
    }
}

#[test]
fn expint_recurrence() {
    for n in 1..12u32 {
        for &x in &[1e-3, 0.2, 0.99, 1.01, 3.0, 25.0, 400.0] {
            // n·E_{n+1} − e^{−x} + x·Eₙ, scaled by e^{x}
            let r = n as f64 * expint_en_scaled(n + 1, x).unwrap() - 1.0 + x * expint_en_scaled(n, x).unwrap();
            assert!(r.abs() <= 1e-10, "n = {n}, x = {x}: {r:e}");
        }
    }
}

#[test]
fn appell_reduces_to_gauss_and_kummer() {
    let ctl = SeriesControl::default();
    for &(a, b, c1, x) in &[(2.5, 1.0, 1.5, 0.4), (1.0, 0.5, 2.0, 0.9), (3.0, 2.0, 0.5, 0.1)] {
        let got = appell_psi1(a, b, c1, 1.5, x, 0.0, ctl).unwrap();
        assert_rel(got, hyp2f1(a, b, c1, x), 1e-11, "psi1(y=0)");
    }
    for &(a, c2, y) in &[(2.5, 1.5, 0.2), (1.0, 3.0, 5.0), (4.0, 2.5, -3.0)] {
        let got = appell_psi1(a, 1.0, 1.5, c2, 0.0, y, ctl).unwrap();
        assert_rel(got, hyp1f1(a, c2, y), 1e-11, "psi1(x=0)");
    }
}

#[test]
fn appell_matches_brute_force_double_sum() {
    let ctl = SeriesControl::default();
    let got = appell_psi1(2.5, 1.0, 1.5, 1.5, 0.4, 0.2, ctl).unwrap();
    assert_rel(got, psi1_bruteforce(2.5, 1.0, 1.5, 1.5, 0.4, 0.2, 500, 500), 1e-12, "psi1 brute");
    // mpmath, 40 digits
    assert_rel(got, 3.871197803054248876195751278700883911, 1e-12, "psi1 mp");
    for &(a, b, c1, c2, x, y) in &[
        (2.0, 1.0, 1.5, 1.5, 0.7, 1.1),
        (4.0, 1.0, 1.5, 3.0, 0.85, 0.3),
        (1.5, 2.0, 2.5, 0.5, 0.2, 2.0),
    ] {
        let got = appell_psi1(a, b, c1, c2, x, y, ctl).unwrap();
        assert_rel(got, psi1_bruteforce(a, b, c1, c2, x, y, 600, 600), 1e-11, "psi1 grid");
    }
}

#[test]
fn appell_errors() {
    let ctl = SeriesControl::default();
    assert!(appell_psi1(1.0, 1.0, 1.5, 1.5, 1.0, 0.0, ctl).is_err());
    assert!(appell_psi1(1.0, 1.0, -2.0, 1.5, 0.5, 0.0, ctl).is_err());
    let tight = SeriesControl::new(1e-12, 3).unwrap();
    assert!(matches!(
        appell_psi1(2.0, 1.0, 1.5, 1.5, 0.95, 0.5, tight),
        Err(Error::NonConvergence { .. })
    ));
    assert!(SeriesControl::new(0.0, 10).is_err());
    assert!(SeriesControl::new(1e-12, 0).is_err());
}

#[test]
fn gamma_moment_examples() {
    assert_eq!(gamma_moment(0, 1.0).unwrap(), 1.0);
    assert_rel(gamma_moment(3, 2.0).unwrap(), 6.0 / 16.0, 1e-15, "gm(3,2)");
    assert_rel(gamma_moment(10, 0.5).unwrap(), 7431782400.0, 1e-13, "gm(10,0.5)");
    let quad = simpson_half_line(|x| x.powi(10) * (-0.5 * x).exp(), 400_000);
    assert_rel(gamma_moment(10, 0.5).unwrap(), quad, 1e-8, "gm quad");
    assert!(gamma_moment(2, 0.0).is_err());
}

#[test]
fn log_moment_examples() {
    assert_eq!(log_moment_integral(3, 1.0, 0.0).unwrap(), 0.0);
    for &(w, a) in &[(1.0, 1.0), (0.3, 5.0), (4.0, 0.1)] {
        let z: f64 = w / a;
        let want = z.exp() * expint_en(1, z).unwrap() / w;
        assert_rel(log_moment_integral(0, w, a).unwrap(), want, 1e-12, "n=0 identity");
    }
    assert_rel(log_moment_integral(2, 1.3, 4.0).unwrap(), 1.994357098030616478814935061832696114, 1e-11, "lm mp");
}

#[test]
fn log_moment_matches_quadrature() {
    for n in 0..6u32 {
        for &w in &[0.4, 1.3, 3.0] {
            for &a in &[0.01, 0.5, 4.0, 100.0] {
                let q = simpson_half_line(|x| (a * x).ln_1p() * x.powi(n as i32) * (-w * x).exp(), 400_000);
                assert_rel(log_moment_integral(n, w, a).unwrap(), q, 1e-9, &format!("lm({n},{w},{a})"));
            }
        }
    }
}

#[test]
fn ratio_moment_examples() {
    for n in 0..5 {
        let g = gamma_moment(n, 0.7).unwrap();
        assert_rel(ratio_moment_integral(n, 0.7, 0.3, 0.0).unwrap(), g, 1e-14, "b=0");
        assert_rel(ratio_moment_integral(n, 0.7, 1e9, 0.5).unwrap(), g, 1e-6, "s large");
    }
    assert_rel(
        ratio_moment_integral(1, 0.8, 0.2, 0.5).unwrap(),
        1.239590769374493077945169394675098092,
        1e-11,
        "rm mp",
    );
    assert!(ratio_moment_integral(1, 0.8, 0.0, 0.5).is_err());
    assert!(ratio_moment_integral(1, -0.8, 0.2, 0.5).is_err());
}

#[test]
fn ratio_moment_matches_quadrature() {
    for n in 0..6u32 {
        for &w in &[0.5, 1.0, 2.5] {
            for &(s, b) in &[(0.2, 0.5), (0.01, 1.0), (3.0, 0.1), (1e-3, 7.0 / 6.0)] {
                let q = simpson_half_line(|x| (x + s) / (x + s + b) * x.powi(n as i32) * (-w * x).exp(), 400_000);
                assert_rel(ratio_moment_integral(n, w, s, b).unwrap(), q, 1e-9, &format!("rm({n},{w},{s},{b})"));
            }
        }
    }
}

#[test]
fn moment_monotonicity() {
    // ln(1 + aλ) grows with a
    for n in 0..4 {
        let mut last = 0.0;
        for i in 0..40 {
            let v = log_moment_integral(n, 1.1, 0.25 * i as f64).unwrap();
            assert!(v >= last, "log moment not nondecreasing in a");
            last = v;
        }
    }
    // (λ+s)/(λ+s+b) shrinks as b grows, so the integral is nonincreasing in b
    for n in 0..4 {
        let mut last = f64::INFINITY;
        for i in 0..40 {
            let v = ratio_moment_integral(n, 1.1, 0.2, 0.25 * i as f64).unwrap();
            assert!(v <= last, "ratio moment not nonincreasing in b");
            last = v;
        }
    }
}

/// Closed form of the log integral against the ratio-one Marchenko–Pastur law.
fn semicircle_exact(c: f64) -> f64 {
    let f = ((4.0 * c + 1.0).sqrt() - 1.0).powi(2);
    2.0 * (1.0 + c - f / 4.0).log2() - std::f64::consts::LOG2_E * f / (4.0 * c)
}

#[test]
fn semicircle_examples() {
    assert_eq!(semicircle_log_integral(0.0).unwrap(), 0.0);
    // mpmath values
    for &(c, want) in &[
        (0.01, 0.014285036083192798977913869265453),
        (1.0, 0.83742335704256989464731806538473621),
        (10.0, 2.7233264657365007379599288845487688),
        (1e4, 11.873799224950356706670184215989414),
    ] {
        assert_rel(semicircle_log_integral(c).unwrap(), want, 1e-10, "semicircle mp");
    }
    for &c in &[0.1, 0.5, 2.0, 30.0, 1e3] {
        assert_rel(semicircle_log_integral(c).unwrap(), semicircle_exact(c), 1e-9, "semicircle exact");
    }
    let lo = semicircle_log_integral(0.01).unwrap();
    assert!(rel_err(lo, 0.01 / std::f64::consts::LN_2) < 0.05);
    let hi = semicircle_log_integral(1e4).unwrap();
    assert!(rel_err(hi, (1e4 / std::f64::consts::E).log2()) < 0.01);
    assert!(semicircle_log_integral(-1.0).is_err());
}
