use hfe_core::coeffs::CoefficientSet;
use hfe_core::harmonics::{gauss_legendre, sph_harm, synthesize_component, SpherePoint};
use hfe_core::spectrum::{make_class_d, ClassDParams, PowerSpectrum};
use hfe_core::subordination::*;
use hfe_core::wigner::{three_j, Mode, ThreeJKey};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

fn gaussian(spec: &PowerSpectrum, rng: &mut impl Rng) -> CoefficientSet {
    let mut c = CoefficientSet::zeros(spec.lmax());
    for l in 0..=spec.lmax() {
        let s = spec.get(l).sqrt();
        let z: f64 = rng.sample(StandardNormal);
        c.set(l, 0, Complex64::new(s * z, 0.0));
        for m in 1..=l as i32 {
            let x: f64 = rng.sample(StandardNormal);
            let y: f64 = rng.sample(StandardNormal);
            c.set(l, m, Complex64::new(x, y) * (s / 2f64.sqrt()));
        }
    }
    c
}

fn field(c: &CoefficientSet, pts: &[SpherePoint]) -> Vec<f64> {
    let mut t = vec![0.0; pts.len()];
    for l in 0..=c.lmax() {
        for (ti, v) in t.iter_mut().zip(synthesize_component(c, l, pts).unwrap()) {
            *ti += v;
        }
    }
    t
}

// every (l1 m1 l2 m2) with no selection-rule pruning, exact symbols
fn full_sum(c: &CoefficientSet, lmax_out: u32) -> CoefficientSet {
    let lmax = c.lmax() as i32;
    let mut out = CoefficientSet::zeros(lmax_out);
    for l in 0..=lmax_out {
        for m in 0..=l as i32 {
            let mut acc = Complex64::new(0.0, 0.0);
            for l1 in 0..=lmax {
                for m1 in -l1..=l1 {
                    for l2 in 0..=lmax {
                        for m2 in -l2..=l2 {
                            let (l1u, l2u) = (l1 as u32, l2 as u32);
                            let z = three_j(ThreeJKey::zero_m(l1u, l2u, l), Mode::Exact).unwrap();
                            let w = three_j(ThreeJKey::new(l1u, l2u, l, m1, m2, -m), Mode::Exact).unwrap();
                            let n = ((2 * l1 + 1) * (2 * l2 + 1) * (2 * l as i32 + 1)) as f64 / (4.0 * PI);
                            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                            acc += c.get(l1u, m1) * c.get(l2u, m2) * (sign * n.sqrt() * z * w);
                        }
                    }
                }
            }
            if l == 0 {
                acc -= (4.0 * PI).sqrt();
            }
            out.set(l, m, acc);
        }
    }
    out
}

#[test]
fn pruned_sum_matches_full_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for lmax in [1u32, 3, 5] {
        let spec = make_class_d(ClassDParams::new(0.0, 0.3, 1.0, lmax).unwrap()).unwrap();
        let mut c = gaussian(&spec, &mut rng);
        c.set(0, 0, Complex64::new(0.4, 0.0));
        let a = subordinate_coeffs_q2(&c, 2 * lmax).unwrap();
        let b = full_sum(&c, 2 * lmax);
        for l in 0..=2 * lmax {
            for m in -(l as i32)..=l as i32 {
                assert!((a.get(l, m) - b.get(l, m)).norm() < 1e-12, "lmax {lmax} ({l},{m})");
            }
        }
    }
}

#[test]
fn coefficients_synthesize_squared_field_pointwise() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let spec = make_class_d(ClassDParams::new(1.0, 0.2, 1.0, 6).unwrap()).unwrap();
    let c = gaussian(&spec, &mut rng);
    let h2 = subordinate_coeffs_q2(&c, 12).unwrap();
    let pts: Vec<_> = (0..50).map(|_| SpherePoint::random(&mut rng)).collect();
    let t = field(&c, &pts);
    let u = field(&h2, &pts);
    for (ti, ui) in t.iter().zip(&u) {
        assert!((hermite(2, *ti) - ui).abs() < 1e-11, "{} vs {ui}", hermite(2, *ti));
    }
}

#[test]
fn squared_dipole_spectrum_by_simulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut v = vec![0.0; 2];
    v[1] = 1.0;
    let spec = PowerSpectrum::from_table(v).unwrap();
    let want = c_l_q2(&spec, 2).value;
    let n = 4000;
    let plan = GauntPlan::new(1, &[1, 2]).unwrap();
    let mut chat = Vec::with_capacity(n);
    let mut mean_a20 = 0.0;
    for _ in 0..n {
        let c = gaussian(&spec, &mut rng);
        let h = plan.apply(&c, 2).unwrap();
        chat.push(h.power(2) / 5.0);
        mean_a20 += h.get(2, 0).re / n as f64;
        assert_eq!(h.power(1), 0.0);
    }
    let mean = chat.iter().sum::<f64>() / n as f64;
    let var = chat.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let se = (var / n as f64).sqrt();
    assert!((mean - want).abs() < 3.0 * se, "{mean} vs {want} (se {se})");
    assert!(mean_a20.abs() < 3.0 * (want / n as f64).sqrt());
}

#[test]
fn cubic_spectrum_by_simulation() {
    // H_3(T) for a pure dipole is a cubic polynomial, so a small
    // Gauss-Legendre x uniform grid projects it exactly
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut v = vec![0.0; 2];
    v[1] = 1.0;
    let spec = PowerSpectrum::from_table(v).unwrap();
    let want = c_l_q(&spec, 3, 3).unwrap().value;
    let (x, w) = gauss_legendre(6);
    let nphi = 12;
    let mut pts = Vec::new();
    let mut wts = Vec::new();
    for (xi, wi) in x.iter().zip(&w) {
        for k in 0..nphi {
            pts.push(SpherePoint::new(xi.acos(), 2.0 * PI * k as f64 / nphi as f64).unwrap());
            wts.push(wi * 2.0 * PI / nphi as f64);
        }
    }
    let ylm: Vec<Vec<Complex64>> = (-3..=3).map(|m| pts.iter().map(|p| sph_harm(3, m, p).unwrap()).collect()).collect();
    let n = 4000;
    let mut chat = Vec::with_capacity(n);
    for _ in 0..n {
        let c = gaussian(&spec, &mut rng);
        let h3: Vec<f64> = field(&c, &pts).iter().map(|t| hermite(3, *t)).collect();
        let mut p = 0.0;
        for row in &ylm {
            let a: Complex64 = h3.iter().zip(row).zip(&wts).map(|((h, y), wt)| y.conj() * (h * wt)).sum();
            p += a.norm_sqr();
        }
        chat.push(p / 7.0);
    }
    let mean = chat.iter().sum::<f64>() / n as f64;
    let var = chat.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let se = (var / n as f64).sqrt();
    assert!((mean - want).abs() < 3.0 * se, "{mean} vs {want} (se {se})");
}

#[test]
fn pointwise_variance_of_squared_field() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let spec = make_class_d(ClassDParams::new(2.5, 0.3, 1.0, 16).unwrap()).unwrap();
    let s2 = SubordinatedSpectrum::compute(&spec, 2, None).unwrap();
    let want = s2.total_variance();
    let n = 3000;
    let mut vals = Vec::with_capacity(n);
    for _ in 0..n {
        let c = gaussian(&spec, &mut rng);
        let p = [SpherePoint::random(&mut rng)];
        vals.push(hermite(2, field(&c, &p)[0]));
    }
    let mean = vals.iter().sum::<f64>() / n as f64;
    let sq: Vec<f64> = vals.iter().map(|v| (v - mean).powi(2)).collect();
    let var = sq.iter().sum::<f64>() / (n - 1) as f64;
    let var_sd = (sq.iter().map(|s| (s - var).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    let se = var_sd / (n as f64).sqrt();
    assert!((var - want).abs() < 3.0 * se, "{var} vs {want} (se {se})");
}

#[test]
fn unit_variance_base_gives_variance_two_within_tail() {
    for (alpha, beta) in [(2.5, 0.0), (3.0, 0.0), (4.0, 0.5)] {
        let base = make_class_d(ClassDParams::new(alpha, beta, 1.0, 64).unwrap())
            .unwrap()
            .normalize_unit_variance()
            .unwrap();
        let s = SubordinatedSpectrum::compute(&base, 2, None).unwrap();
        // truncated-only sum is exact: 2 * (truncated variance)^2
        assert!((s.total_variance() - 2.0).abs() < 1e-10);
        assert!(s.tail_bounds.iter().all(|t| t.is_some()));
    }
}
