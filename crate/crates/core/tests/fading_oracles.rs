mod common;

use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use wishfade::fading::*;
use wishfade::linalg::{gram, hermitian_eigen};
use wishfade::quad::integrate;
use wishfade::{Complex64, EtaMuParams, FadingModel, KappaMuParams};

const N: usize = 1_000_000;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn draws(model: &FadingModel, n: usize, seed: u64) -> Vec<Complex64> {
    let s = model.sampler().unwrap();
    let mut r = rng(seed);
    (0..n).map(|_| s.sample(&mut r)).collect()
}

/// Marginal density of the real component.
fn marginal_x(model: &FadingModel) -> impl Fn(f64) -> f64 {
    let m = *model;
    move |x| match m {
        FadingModel::KappaMu(p) => kmu_marginal_pdf(p.p, p.mu, p.sigma2, x),
        FadingModel::EtaMu(p) => eta_mu_marginal_pdf(p.mu, p.omega_x(), x),
        _ => unreachable!(),
    }
}

fn bin_prob(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if a < 0.0 && b > 0.0 {
        return bin_prob(f, a, 0.0) + bin_prob(f, 0.0, b);
    }
    integrate(f, a, b, 1e-13, 1e-10).unwrap().value
}

#[test]
fn kmu_power_and_symmetry() {
    for &(k, mu, s2) in &[(2.0, 3.0, 0.5), (4.0, 1.0, 1.0), (0.5, 5.0, 0.2)] {
        let p = KappaMuParams::new(k, mu, s2).unwrap();
        let v: Vec<f64> = draws(&FadingModel::KappaMu(p), N, 11).iter().map(|h| h.norm_sqr()).collect();
        let (m, se) = mean_se(&v);
        let want = 2.0 * s2 * (1.0 + k) * mu;
        assert!(rel_err(m, want) < 0.005, "E|h|² {m} vs {want}");
        assert!((m - want).abs() <= 3.0 * se, "E|h|² {m} vs {want}, se {se}");
    }
    let p = KappaMuParams::from_los(0.0, 0.0, 2.0, 0.5).unwrap();
    let d = draws(&FadingModel::KappaMu(p), N, 12);
    let (mx, sx) = mean_se(&d.iter().map(|h| h.re).collect::<Vec<_>>());
    let (my, sy) = mean_se(&d.iter().map(|h| h.im).collect::<Vec<_>>());
    assert!(mx.abs() < 4.0 * sx && my.abs() < 4.0 * sy);
}

#[test]
fn kmu_mean_matches_quadrature() {
    let p = KappaMuParams::new(2.0, 3.0, 0.5).unwrap();
    let f = |x: f64| x * kmu_marginal_pdf(p.p, p.mu, p.sigma2, x);
    let quad = simpson(f, -15.0, 0.0, 20_000) + simpson(f, 0.0, 15.0, 20_000);
    let (m, se) = mean_se(&draws(&FadingModel::KappaMu(p), N, 13).iter().map(|h| h.re).collect::<Vec<_>>());
    assert!(rel_err(m, quad) < 0.01, "{m} vs {quad}");
    assert!((m - quad).abs() < 4.0 * se);
}

#[test]
fn eta_mu_moments() {
    let p = EtaMuParams::new(0.3, 2.0, 1.0).unwrap();
    let d = draws(&FadingModel::EtaMu(p), N, 14);
    let x: Vec<f64> = d.iter().map(|h| h.re).collect();
    let x2: Vec<f64> = x.iter().map(|v| v * v).collect();
    let x4: Vec<f64> = x.iter().map(|v| v.powi(4)).collect();
    let (m1, s1) = mean_se(&x);
    assert!(m1.abs() < 4.0 * s1);
    assert!(rel_err(mean_se(&x2).0, p.omega_x()) < 0.005);
    let want4 = (p.omega_x() / p.mu).powi(2) * p.mu * (p.mu + 1.0);
    assert!(rel_err(mean_se(&x4).0, want4) < 0.01);
    let (mp, sp) = mean_se(&d.iter().map(|h| h.norm_sqr()).collect::<Vec<_>>());
    assert!((mp - p.omega).abs() <= 3.0 * sp, "E|h|² {mp}");

    // |η| = 1 leaves one component identically zero
    let q = EtaMuParams::new(1.0, 1.5, 2.0).unwrap();
    assert!(draws(&FadingModel::EtaMu(q), 1000, 15).iter().all(|h| h.re == 0.0));
}

#[test]
fn densities_normalize() {
    // split at the axes, where the |x|^{μ−1} factor has its kink
    let p = KappaMuParams::new(1.0, 2.0, 0.5).unwrap();
    let quad2 = |f: &dyn Fn(f64, f64) -> f64, l: f64| {
        let mut s = 0.0;
        for &(x0, x1) in &[(-l, 0.0), (0.0, l)] {
            for &(y0, y1) in &[(-l, 0.0), (0.0, l)] {
                s += simpson(|x| simpson(|y| f(x, y), y0, y1, 800), x0, x1, 800);
            }
        }
        s
    };
    let total = quad2(&|x, y| pdf_kmu(&p, x, y), 8.0);
    assert!((total - 1.0).abs() < 1e-6, "kappa-mu mass {total}");
    let e = EtaMuParams::new(0.3, 2.0, 1.0).unwrap();
    let total = quad2(&|x, y| pdf_eta_mu(&e, x, y), 6.0);
    assert!((total - 1.0).abs() < 1e-6, "eta-mu mass {total}");
}

#[test]
fn eta_mu_density_is_even() {
    let e = EtaMuParams::new(-0.4, 1.7, 1.3).unwrap();
    for &(x, y) in &[(0.3, 0.9), (1.2, 0.01), (2.0, 1.5)] {
        let f = pdf_eta_mu(&e, x, y);
        assert_eq!(f, pdf_eta_mu(&e, -x, y));
        assert_eq!(f, pdf_eta_mu(&e, x, -y));
        assert_eq!(f, pdf_eta_mu(&e, -x, -y));
    }
}

/// Chi-square goodness of fit of the real component against its density.
fn chi_square_pvalue(model: &FadingModel, seed: u64) -> f64 {
    let xs: Vec<f64> = draws(model, N, seed).iter().map(|h| h.re).collect();
    let (m, _) = mean_se(&xs);
    let sd = (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / N as f64).sqrt();
    let f = marginal_x(model);
    let nb = 60;
    let (lo, hi) = (m - 5.0 * sd, m + 5.0 * sd);
    let w = (hi - lo) / nb as f64;
    let mut counts = vec![0usize; nb + 2];
    for &x in &xs {
        let i = if x < lo { 0 } else if x >= hi { nb + 1 } else { 1 + ((x - lo) / w) as usize };
        counts[i.min(nb)] += 1;
    }
    let mut probs = vec![0.0; nb + 2];
    for (i, p) in probs.iter_mut().enumerate().take(nb + 1).skip(1) {
        *p = bin_prob(&f, lo + (i - 1) as f64 * w, lo + i as f64 * w);
    }
    probs[0] = bin_prob(&f, lo - 40.0 * sd, lo);
    probs[nb + 1] = bin_prob(&f, hi, hi + 40.0 * sd);
    let (mut stat, mut dof) = (0.0, 0usize);
    for (c, p) in counts.iter().zip(&probs) {
        let e = p * N as f64;
        if e >= 5.0 {
            stat += (*c as f64 - e).powi(2) / e;
            dof += 1;
        }
    }
    1.0 - ChiSquared::new((dof - 1) as f64).unwrap().cdf(stat)
}

#[test]
fn histograms_pass_chi_square() {
    let models = [
        FadingModel::KappaMu(KappaMuParams::new(2.0, 3.0, 0.5).unwrap()),
        FadingModel::KappaMu(KappaMuParams::new(1.0, 1.0, 1.0).unwrap()),
        FadingModel::EtaMu(EtaMuParams::new(0.3, 2.0, 1.0).unwrap()),
    ];
    for (i, m) in models.iter().enumerate() {
        let pv = chi_square_pvalue(m, 100 + i as u64);
        assert!(pv > 0.001, "{m:?}: p = {pv}");
    }
}

#[test]
fn marginal_histograms_within_three_bin_std() {
    let models = [
        FadingModel::KappaMu(KappaMuParams::new(2.0, 3.0, 0.5).unwrap()),
        FadingModel::KappaMu(KappaMuParams::new(4.0, 2.0, 0.25).unwrap()),
        FadingModel::KappaMu(KappaMuParams::new(0.5, 1.0, 1.0).unwrap()),
        FadingModel::EtaMu(EtaMuParams::new(0.3, 2.0, 1.0).unwrap()),
        FadingModel::EtaMu(EtaMuParams::new(-0.5, 1.0, 2.0).unwrap()),
    ];
    for (mi, model) in models.iter().enumerate() {
        let xs: Vec<f64> = draws(model, N, 200 + mi as u64).iter().map(|h| h.re).collect();
        let f = marginal_x(model);
        // mean and std of the component from the density itself
        let mean = integrate(|x| x * f(x), -60.0, 60.0, 1e-12, 1e-10).unwrap().value;
        let var = integrate(|x| (x - mean).powi(2) * f(x), -60.0, 60.0, 1e-12, 1e-10).unwrap().value;
        let sd = var.sqrt();
        let (lo, w) = (mean - 6.0 * sd, 12.0 * sd / 100.0);
        let mut counts = [0usize; 100];
        for &x in &xs {
            let t = (x - lo) / w;
            if (0.0..100.0).contains(&t) {
                counts[t as usize] += 1;
            }
        }
        for (i, &c) in counts.iter().enumerate() {
            let p = bin_prob(&f, lo + i as f64 * w, lo + (i + 1) as f64 * w);
            let e = p * N as f64;
            let sdev = (N as f64 * p * (1.0 - p)).sqrt();
            assert!(
                (c as f64 - e).abs() <= 3.0 * sdev.max(1.0),
                "{model:?} bin {i}: {c} vs {e:.1} (std {sdev:.1})"
            );
        }
    }
}

#[test]
fn channel_matrix_gram_means() {
    let trials = 100_000;
    let (n1, n2) = (2, 4);
    let mut r = rng(21);
    let acc = |model: &FadingModel, r: &mut ChaCha8Rng| {
        let mut d = vec![];
        let mut off = vec![];
        for _ in 0..trials {
            let h = sample_channel_matrix(model, n1, n2, r).unwrap();
            let g = gram(&h);
            d.push(g[(0, 0)].re);
            off.push(g[(0, 1)].re);
        }
        (mean_se(&d), mean_se(&off))
    };
    let (d, o) = acc(&FadingModel::Rayleigh { sigma2: 0.5 }, &mut r);
    assert!((d.0 - 4.0).abs() <= 3.0 * d.1 && o.0.abs() <= 3.0 * o.1, "{d:?} {o:?}");

    let p = KappaMuParams::new(2.0, 3.0, 0.5).unwrap();
    let (d, _) = acc(&FadingModel::KappaMu(p), &mut r);
    assert!(rel_err(d.0, p.mean_power() * n2 as f64) < 0.01, "{d:?}");

    let (_, o) = acc(&FadingModel::EtaMu(EtaMuParams::new(0.3, 2.0, 1.0).unwrap()), &mut r);
    assert!(o.0.abs() <= 4.0 * o.1, "{o:?}");
    assert!(sample_channel_matrix(&FadingModel::Rayleigh { sigma2: 0.5 }, 0, 2, &mut r).is_err());
}

#[test]
fn rayleigh_vector_is_unit_circular_gaussian() {
    let mut r = rng(31);
    let n = 4;
    // a fixed unitary from the eigenvectors of a random Hermitian matrix
    let h = sample_channel_matrix(&FadingModel::Rayleigh { sigma2: 0.5 }, n, n, &mut r).unwrap();
    let (_, u) = hermitian_eigen(&gram(&h));
    let uh = u.conj_transpose();
    let mut p2 = vec![];
    let mut re = vec![];
    let mut rotated = vec![];
    for _ in 0..100_000 {
        let c = sample_rayleigh_vector(n, &mut r);
        p2.extend(c.iter().map(|z| z.norm_sqr()));
        re.push(c[0].re);
        rotated.push(uh.mul_vec(&c).unwrap()[1].norm_sqr());
    }
    assert!(rel_err(mean_se(&p2).0, 1.0) < 0.005);
    let (m, se) = mean_se(&re);
    assert!(m.abs() < 4.0 * se);
    let pv = ks_pvalue(rotated, |x| 1.0 - (-x).exp());
    assert!(pv > 0.001, "KS p = {pv}");
}

#[test]
fn seeded_streams_repeat() {
    let m = FadingModel::KappaMu(KappaMuParams::new(2.0, 3.0, 0.5).unwrap());
    assert_eq!(draws(&m, 1000, 5), draws(&m, 1000, 5));
    assert_ne!(draws(&m, 1000, 5), draws(&m, 1000, 6));
    let e = FadingModel::EtaMu(EtaMuParams::new(0.3, 2.0, 1.0).unwrap());
    assert_eq!(draws(&e, 1000, 5), draws(&e, 1000, 5));
}

#[test]
fn other_models_have_the_stated_power() {
    for (m, want) in [
        (FadingModel::Nakagami { m: 2.5, omega: 1.5 }, 1.5),
        (FadingModel::Rician { mean: Complex64::new(1.0, -0.5), sigma2: 0.25 }, 1.25 + 0.5),
        (FadingModel::Rayleigh { sigma2: 0.5 }, 1.0),
    ] {
        assert_eq!(m.mean_power(), want);
        let (p, se) = mean_se(&draws(&m, 200_000, 41).iter().map(|h| h.norm_sqr()).collect::<Vec<_>>());
        assert!((p - want).abs() <= 4.0 * se, "{m:?}: {p}");
    }
}
