//! Distributional checks on the random-matrix samplers. All seeds are fixed,
//! so each test is deterministic; thresholds are the 0.1% KS critical values.

use num_complex::Complex;
use polscat::ensembles::{
    assemble_gram, gram, sample_amplitudes, sample_haar_unitary, sample_laguerre_eigenvalues, RngStream,
};
use polscat::qstate::{concurrence, rho_single_beam};
use polscat::smallalg::CMat;

const KS_C_001: f64 = 1.95;

fn ks_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

fn ks_one_sample(mut a: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    a.sort_by(f64::total_cmp);
    let n = a.len() as f64;
    a.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn stderr(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0) / v.len() as f64).sqrt()
}

#[test]
fn laguerre_trace_moments() {
    // E Tr G = 2 P N and E Tr G^2 = 4 P N (N + P) for unit-variance parts
    let mut rng = RngStream::new(11, 0).rng();
    for n in [1usize, 2, 3, 6] {
        let (mut s1, mut s2) = (Vec::new(), Vec::new());
        for _ in 0..40_000 {
            let l = sample_laguerre_eigenvalues::<f64, 4, _>(n, &mut rng).unwrap();
            assert_eq!(l.len(), n.min(4));
            s1.push(l.iter().sum::<f64>());
            s2.push(l.iter().map(|x| x * x).sum::<f64>());
        }
        let nf = n as f64;
        assert!((mean(&s1) - 8.0 * nf).abs() < 4.0 * stderr(&s1), "N = {n}");
        assert!((mean(&s2) - 16.0 * nf * (nf + 4.0)).abs() < 4.0 * stderr(&s2), "N = {n}");
    }
}

#[test]
fn haar_entry_moments() {
    let mut rng = RngStream::new(12, 0).rng();
    let (mut m2, mut m4) = (Vec::new(), Vec::new());
    for _ in 0..50_000 {
        let u = sample_haar_unitary::<f64, 4, _>(&mut rng);
        let x = u.m[1][2].norm_sqr();
        m2.push(x);
        m4.push(x * x);
    }
    assert!((mean(&m2) - 0.25).abs() < 4.0 * stderr(&m2));
    assert!((mean(&m4) - 0.1).abs() < 4.0 * stderr(&m4));
}

#[test]
fn haar_entry_follows_beta_law_and_is_invariant() {
    // |U_00|^2 ~ Beta(1, P - 1), also after a fixed left rotation
    let mut rng = RngStream::new(13, 0).rng();
    let mut fixed = CMat::<f64, 4>::zeros();
    let (c, s) = (0.6, 0.8);
    fixed.m[0][0] = Complex::new(c, 0.0);
    fixed.m[0][1] = Complex::new(0.0, s);
    fixed.m[1][0] = Complex::new(0.0, s);
    fixed.m[1][1] = Complex::new(c, 0.0);
    fixed.m[2][3] = Complex::new(1.0, 0.0);
    fixed.m[3][2] = Complex::new(0.0, -1.0);
    let n = 20_000;
    let (mut plain, mut rotated) = (Vec::new(), Vec::new());
    for _ in 0..n {
        let u = sample_haar_unitary::<f64, 4, _>(&mut rng);
        plain.push(u.m[0][0].norm_sqr());
        rotated.push((&fixed * &u).m[0][0].norm_sqr());
    }
    let beta_cdf = |x: f64| 1.0 - (1.0 - x.clamp(0.0, 1.0)).powi(3);
    let crit = KS_C_001 / (n as f64).sqrt();
    assert!(ks_one_sample(plain.clone(), beta_cdf) < crit);
    assert!(ks_one_sample(rotated.clone(), beta_cdf) < crit);
    assert!(ks_two_sample(plain, rotated) < KS_C_001 * (2.0 / n as f64).sqrt());
}

#[test]
fn spectral_path_matches_amplitude_path() {
    // eigenvalues + Haar eigenvectors must reproduce the Gram ensemble,
    // including its rank-deficient regime
    for (n, seed) in [(2usize, 21u64), (6, 22)] {
        let mut ra = RngStream::new(seed, 0).rng();
        let mut rb = RngStream::new(seed, 1).rng();
        let samples = 20_000;
        let (mut diag_a, mut diag_b) = (Vec::new(), Vec::new());
        let (mut off_a, mut off_b) = (Vec::new(), Vec::new());
        let (mut conc_a, mut conc_b) = (Vec::new(), Vec::new());
        for _ in 0..samples {
            let ga = gram(&sample_amplitudes::<f64, 4, _>(n, &mut ra).unwrap());
            let l = sample_laguerre_eigenvalues::<f64, 4, _>(n, &mut rb).unwrap();
            let u = sample_haar_unitary::<f64, 4, _>(&mut rb);
            let gb = assemble_gram(&l, &u).unwrap();
            diag_a.push(ga.at(0, 0).re);
            diag_b.push(gb.at(0, 0).re);
            off_a.push(ga.at(1, 3).norm());
            off_b.push(gb.at(1, 3).norm());
            conc_a.push(concurrence(&rho_single_beam(&ga).unwrap()).unwrap());
            conc_b.push(concurrence(&rho_single_beam(&gb).unwrap()).unwrap());
        }
        let crit = KS_C_001 * (2.0 / samples as f64).sqrt();
        assert!(ks_two_sample(diag_a, diag_b) < crit, "N = {n}: diagonal");
        assert!(ks_two_sample(off_a, off_b) < crit, "N = {n}: off-diagonal");
        assert!(ks_two_sample(conc_a, conc_b) < crit, "N = {n}: concurrence");
    }
}

#[test]
fn amplitude_entries_have_unit_variance_parts() {
    let mut rng = RngStream::new(14, 0).rng();
    let w = sample_amplitudes::<f64, 4, _>(50_000, &mut rng).unwrap();
    let re: Vec<f64> = w.entries().iter().map(|z| z.re).collect();
    let std_normal_cdf = |x: f64| 0.5 * libm::erfc(-x / std::f64::consts::SQRT_2);
    assert!(ks_one_sample(re, std_normal_cdf) < KS_C_001 / (200_000f64).sqrt());
}
