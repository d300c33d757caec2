use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::corpus::{invalidate, random_generator, random_vector, SmallGroup};
use crate::ito_algebra::{CanonicalKind, ItoAlgebra};
use crate::numkit::{ONE, ZERO};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `Z₂ = {1, s}` with `i(s) = diag(1, −1)` on `ℂ²`.
fn z2_diag() -> (StarSemigroup, Representation) {
    let sg = StarSemigroup::cyclic(2);
    let rep = Representation::new(2, vec![CMatrix::identity(2), CMatrix::diag(&[ONE, -ONE])]).unwrap();
    (sg, rep)
}

fn z2_generated() -> GeneratedGerm {
    let (sg, rep) = z2_diag();
    let mut gen = GermGenerator::zero(sg, rep.clone(), rep, 1);
    gen.t = CMatrix::identity(2);
    gen.lso = CMatrix::identity(2);
    gen.generate(tol()).unwrap()
}

/// Trivial semigroup, `d = dK = 1`, `λ^•_•(1) = −1`, all other blocks zero.
fn negative_dot() -> GermMap {
    let sg = StarSemigroup::trivial();
    let rep = Representation::trivial(&sg, 1);
    let z = || vec![CMatrix::zeros(1, 1)];
    GermMap::new(sg, rep, 1, z(), z(), z(), vec![CMatrix::scalar(re(-1.0))]).unwrap()
}

/// Independent evaluation of the conditional form: random vectors are pushed
/// into the kernel with an explicit inverse of `C C†`, and the form is summed
/// block by block.
fn random_vector_oracle(g: &GermMap, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = g.semigroup().len();
    let d = g.space_dim();
    let b = d + g.dot_dim();
    let c = CMatrix::hstack(
        &(0..m)
            .map(|k| CMatrix::hstack(&[g.rep().image(k), &CMatrix::zeros(d, g.dot_dim())]))
            .collect::<Vec<_>>()
            .iter()
            .collect::<Vec<_>>(),
    );
    let cc_inv = (&c * &c.adjoint()).inverse().unwrap();
    let proj = &CMatrix::identity(m * b) - &(&(&c.adjoint() * &cc_inv) * &c);
    let mut worst = f64::INFINITY;
    for _ in 0..samples {
        let eta = proj.mul_vec(&random_vector(&mut rng, m * b, 1.0));
        let norm2: f64 = eta.iter().map(|z| z.norm_sqr()).sum();
        let mut value = ZERO;
        for l in 0..m {
            for k in 0..m {
                let blk = g.block_matrix(g.semigroup().star_mul(l, k));
                let hk = blk.mul_vec(&eta[k * b..(k + 1) * b]);
                value += crate::numkit::inner(&eta[l * b..(l + 1) * b], &hk);
            }
        }
        worst = worst.min(value.re / norm2);
    }
    worst
}

#[test]
fn zero_alpha_symmetry_passes() {
    let (sg, rep) = z2_diag();
    let g = GermMap::zero_alpha(sg, rep, 1).unwrap();
    assert!(g.check_symmetry(tol()).unwrap().iter().all(|c| c.pass));
}

#[test]
fn non_hermitian_d_fails() {
    let sg = StarSemigroup::trivial();
    let rep = Representation::trivial(&sg, 2);
    let mut g = GermMap::zero_alpha(sg, rep, 1).unwrap();
    g.lam[0] = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
    let checks = g.check_symmetry(tol()).unwrap();
    let d = checks.iter().find(|c| c.name == "D-hermitian").unwrap();
    assert!(!d.pass);
}

#[test]
fn generated_symmetry_passes() {
    assert!(z2_generated().germ.check_symmetry(tol()).unwrap().iter().all(|c| c.pass));
}

#[test]
fn zero_alpha_is_conditionally_pd() {
    let (sg, rep) = z2_diag();
    let g = GermMap::zero_alpha(sg, rep, 1).unwrap();
    let v = conditional_pd(&g, tol()).unwrap();
    assert!(v.positive);
    // kernel: 2 elements × (2 + 2) coordinates minus 2 constraints
    assert_eq!(v.dim, 6);
    assert!(random_vector_oracle(&g, 10_000, 1) >= -1e-12);
}

#[test]
fn negative_dot_is_rejected() {
    let g = negative_dot();
    let v = conditional_pd(&g, tol()).unwrap();
    assert!(!v.positive && !v.indeterminate);
    assert!((v.report.min_eigenvalue + 1.0).abs() < 1e-12);
    assert!(random_vector_oracle(&g, 100, 2) < -0.99);
}

#[test]
fn generated_is_conditionally_pd() {
    let g = z2_generated().germ;
    assert!(conditional_pd(&g, tol()).unwrap().positive);
    assert!(random_vector_oracle(&g, 10_000, 3) >= -1e-10);
}

#[test]
fn dissipator_unit_corner_vanishes() {
    let g = z2_generated().germ;
    let gram = g.dissipator();
    let u = g.semigroup().unit();
    assert!(gram.block(u, u).block(0, 0, 2, 2).max_abs() < 1e-14);
}

#[test]
fn zero_alpha_dissipator_blocks() {
    let (sg, rep) = z2_diag();
    let g = GermMap::zero_alpha(sg.clone(), rep.clone(), 1).unwrap();
    let gram = g.dissipator();
    for y in 0..2 {
        for x in 0..2 {
            let blk = gram.block(y, x);
            assert!(blk.block(0, 2, 2, 2).max_abs() == 0.0);
            assert!(blk.block(2, 2, 2, 2).distance(rep.image(sg.star_mul(y, x))) == 0.0);
        }
    }
    assert!(g.dissipator_pd(tol()).unwrap().positive);
}

#[test]
fn generated_dissipator_is_hermitian_psd() {
    let g = z2_generated().germ;
    let m = g.dissipator().matrix;
    assert!(m.distance(&m.adjoint()) < 1e-12);
    assert!(g.dissipator_pd(tol()).unwrap().positive);
}

#[test]
fn negative_dot_dissipator() {
    let v = negative_dot().dissipator_pd(tol()).unwrap();
    assert!(!v.positive);
    assert!((v.report.min_eigenvalue + 1.0).abs() < 1e-12);
}

#[test]
fn sandwich_examples() {
    let g = z2_generated().germ;
    let s = g.sandwich(&[ZERO], 1, &[ZERO]).unwrap();
    assert_eq!(s, g.lam()[1]);

    let (sg, rep) = z2_diag();
    let z = GermMap::zero_alpha(sg, rep.clone(), 2).unwrap();
    let a = [C64::new(0.3, 1.0), C64::new(-2.0, 0.5)];
    let b = [C64::new(1.5, -0.2), C64::new(0.1, 0.0)];
    let ba = b[0] * a[0] + b[1] * a[1];
    let s = z.sandwich(&b, 1, &a).unwrap();
    assert!(s.distance(&rep.image(1).scale(ba)) < 1e-14);
    assert!(z.sandwich(&b[..1], 1, &a).is_err());
}

#[test]
fn scalar_sandwich_is_kernel_derivative() {
    let alg = ItoAlgebra::canonical(CanonicalKind::Wiener, 1.0)
        .unwrap()
        .direct_sum(&ItoAlgebra::canonical(CanonicalKind::Poisson, 0.7).unwrap())
        .unwrap();
    let elems = vec![
        vec![ZERO; 3],
        vec![re(0.2), re(-0.5), C64::new(0.3, 0.4)],
        vec![C64::new(0.0, 1.0), re(1.0), re(-0.6)],
    ];
    let fam = ItoSemigroupGerm::new(alg.clone(), elems.clone()).unwrap();
    let h = 1e-6;
    for l in 0..3 {
        for k in 0..3 {
            let mean = alg.mean(&alg.star_product(&elems[l], &elems[k]).unwrap()).unwrap();
            // central difference of exp(t·l(a⋆b)) at t = 0
            let fd = ((mean * h).exp() - (mean * -h).exp()) / (2.0 * h);
            let s = fam.sandwich(&[ZERO; 2], l, k, &[ZERO; 2]).unwrap();
            assert!((s[(0, 0)] - fd).norm() < 1e-8, "entry ({l},{k})");
        }
    }
    assert!(conditional_pd(&fam, tol()).unwrap().positive);
}

#[test]
fn zero_generator_is_degenerate_zero_germ() {
    let (sg, rep) = z2_diag();
    let g = GermGenerator::zero(sg, rep.clone(), rep, 1).generate(tol()).unwrap().germ;
    assert!(g.lam().iter().chain(g.lam_dot()).all(|m| m.max_abs() == 0.0));
    assert!(conditional_pd(&g, tol()).unwrap().positive);
}

#[test]
fn non_commuting_gauge_is_rejected() {
    let (sg, rep) = z2_diag();
    let mut gen = GermGenerator::zero(sg, rep.clone(), rep, 1);
    gen.c = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
    assert!(matches!(gen.generate(tol()), Err(GermError::NonCommutingGauge { .. })));
}

#[test]
fn invalidated_germ_is_rejected_by_both() {
    let g = invalidate(&z2_generated().germ, tol()).unwrap();
    let eq = g.equivalence(tol()).unwrap();
    assert!(eq.decidable() && !eq.conditional.positive && !eq.dissipator.positive);
    assert!(g.check_symmetry(tol()).unwrap().iter().all(|c| c.pass));
}

fn corpus_case() -> impl Strategy<Value = (u64, usize, usize, usize, usize)> {
    (any::<u64>(), 0..4usize, 1..=3usize, 1..=3usize, 1..=2usize)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_germs_pass_everything((seed, group, d, r, dk) in corpus_case()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gen = random_generator(&mut rng, SmallGroup::ALL[group], d, r, dk);
        let out = gen.generate(tol()).unwrap();
        prop_assert!(out.germ.check_symmetry(tol()).unwrap().iter().all(|c| c.pass));
        let eq = out.germ.equivalence(tol()).unwrap();
        prop_assert!(eq.conditional.positive && eq.dissipator.positive);
        prop_assert!(random_vector_oracle(&out.germ, 200, seed) >= -1e-9);

        let bad = invalidate(&out.germ, tol()).unwrap();
        let eq = bad.equivalence(tol()).unwrap();
        prop_assert!(eq.decidable() && eq.agree() && !eq.conditional.positive);
    }

    #[test]
    fn scaling_t_keeps_verdict((seed, group, d, r, dk) in corpus_case(), s in 0.1f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gen = random_generator(&mut rng, SmallGroup::ALL[group], d, r, dk);
        let mut a = gen.clone();
        a.c = CMatrix::zeros(d, d);
        a.h = CMatrix::zeros(d, d);
        a.lso = CMatrix::zeros(r, dk * d);
        a.lplus = CMatrix::zeros(dk * d, d);
        let mut b = a.clone();
        b.t = a.t.scale_real(s);
        let ga = a.generate(tol()).unwrap().germ;
        let gb = b.generate(tol()).unwrap().germ;
        // with C = H = 0 the Δ⁻₊ block is exactly k†k
        let da = ga.dissipator();
        let db = gb.dissipator();
        for y in 0..ga.semigroup().len() {
            for x in 0..ga.semigroup().len() {
                let ka = da.block(y, x).block(0, 0, d, d);
                let kb = db.block(y, x).block(0, 0, d, d);
                prop_assert!(kb.distance(&ka.scale_real(s * s)) < 1e-9 * (1.0 + kb.max_abs()));
            }
        }
        prop_assert_eq!(conditional_pd(&ga, tol()).unwrap().positive, conditional_pd(&gb, tol()).unwrap().positive);
    }
}
