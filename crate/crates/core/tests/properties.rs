//! Property tests over random inputs. Matrices are drawn from a ChaCha
//! stream seeded by proptest, so shrinking acts on the seed and the sizes.

use std::f64::consts::{FRAC_PI_2, TAU};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kcayley::boundary;
use kcayley::cayley;
use kcayley::clifford::{self, pauli};
use kcayley::graded::{check_osu, parity_decompose, perturbation_average, Grading, Osu, RealStructure};
use kcayley::kasparov::{self, SymmetryData};
use kcayley::models;
use kcayley::vandaele::{Coefficient, DkClass};
use kcayley::numkit::{self, c, identity, kron, max_abs, random, Matrix, ToleranceProfile};
use kcayley::pairing::{self, HermitianPath, UnitaryLoop};

fn tol() -> ToleranceProfile {
    ToleranceProfile::default()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sorted_eigenvalues(m: &Matrix) -> Vec<f64> {
    numkit::eig_hermitian(m, &tol()).unwrap().eigenvalues
}

/// `e = 1 ⊗ σ₁` on `Grading::standard(m)` and an admissible `T`.
fn admissible_pair(m: usize, r: &mut ChaCha8Rng) -> (Osu, Matrix) {
    let g = Grading::standard(m);
    let e = Osu::new(kron(&identity(m), &pauli::s1()), g.clone(), None, &tol()).unwrap();
    let (_, odd) = parity_decompose(&random::hermitian(2 * m, r), &g).unwrap();
    let t = perturbation_average(&odd, &e).unwrap();
    (e, t)
}

/// Loop `k ↦ diag(e^{i n_j k})` with a random constant unitary frame.
fn diagonal_loop(windings: &[i64], samples: usize, r: &mut ChaCha8Rng) -> (UnitaryLoop, i64) {
    let w = random::unitary(windings.len(), r);
    let grid: Vec<f64> = (0..samples).map(|j| TAU * j as f64 / samples as f64).collect();
    let s = grid
        .iter()
        .map(|&k| {
            let d = Matrix::from_diagonal(&numkit::Vector::from_iterator(
                windings.len(),
                windings.iter().map(|&n| num_complex::Complex64::from_polar(1.0, n as f64 * k)),
            ));
            &w * d * w.adjoint()
        })
        .collect();
    (UnitaryLoop::new(s, grid, &tol()).unwrap(), windings.iter().sum())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matrix_functions_compose(seed in any::<u64>(), n in 1usize..12) {
        let h = random::hermitian(n, &mut rng(seed));
        let g = |x: f64| x * x + 1.0;
        let f = |x: f64| x.sqrt();
        let direct = numkit::mat_func_hermitian(&h, |x| f(g(x)), &tol()).unwrap();
        let inner = numkit::mat_func_hermitian(&h, g, &tol()).unwrap();
        let nested = numkit::mat_func_hermitian(&inner, f, &tol()).unwrap();
        prop_assert!(max_abs(&(direct - nested)) < 1e-9);
    }

    #[test]
    fn polar_phase_is_left_equivariant(seed in any::<u64>(), n in 1usize..10) {
        let mut r = rng(seed);
        let m = random::complex_gaussian(n, n, &mut r);
        let u = random::unitary(n, &mut r);
        let lhs = numkit::polar_phase(&(&u * &m), &tol()).unwrap();
        let rhs = &u * numkit::polar_phase(&m, &tol()).unwrap();
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-9);
    }

    #[test]
    fn spectrum_survives_unitary_conjugation(seed in any::<u64>(), n in 1usize..16) {
        let mut r = rng(seed);
        let h = random::hermitian(n, &mut r);
        let u = random::unitary(n, &mut r);
        let a = sorted_eigenvalues(&h);
        let b = sorted_eigenvalues(&(&u * &h * u.adjoint()));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn clifford_real_structure_is_an_involution(p in 0usize..4, q in 0usize..4, seed in any::<u64>()) {
        let a = clifford::build_clifford(p, q).unwrap();
        let s = &a.real_structure;
        let n = a.matrix_size();
        let mut r = rng(seed);
        let (x, y) = (random::complex_gaussian(n, n, &mut r), random::complex_gaussian(n, n, &mut r));
        prop_assert!(max_abs(&(s.apply(&s.apply(&x)) - &x)) < 1e-12);
        prop_assert!(max_abs(&(s.apply(&(&x * &y)) - s.apply(&x) * s.apply(&y))) < 1e-12);
        prop_assert!(max_abs(&(s.apply(&x).adjoint() - s.apply(&x.adjoint()))) < 1e-12);
        for g in a.generators() {
            prop_assert!(max_abs(&(s.apply(g) - g)) < 1e-12);
        }
    }

    #[test]
    fn graded_tensor_koszul_on_random_homogeneous(seed in any::<u64>(), bits in 0u8..16) {
        // homogeneous elements of M₂ ⊗̂ M₂, both graded by σ₃
        let g = Grading::standard(1);
        let mut r = rng(seed);
        let homogeneous = |odd: bool, r: &mut ChaCha8Rng| {
            let (even, odd_part) = parity_decompose(&random::complex_gaussian(2, 2, r), &g).unwrap();
            if odd { odd_part } else { even }
        };
        let pick = |k: u8| bits >> k & 1 == 1;
        let (a1, b1, a2, b2) = (
            homogeneous(pick(0), &mut r),
            homogeneous(pick(1), &mut r),
            homogeneous(pick(2), &mut r),
            homogeneous(pick(3), &mut r),
        );
        let emb = |a: &Matrix, b: &Matrix| clifford::graded_tensor(a, &g, b, &g, false, &tol()).unwrap().embedded;
        let sign = if pick(1) && pick(2) { -1.0 } else { 1.0 };
        let lhs = emb(&a1, &b1) * emb(&a2, &b2);
        let rhs = emb(&(&a1 * &a2), &(&b1 * &b2)).scale(sign);
        let scale = 1.0 + max_abs(&lhs);
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-10 * scale);
    }

    #[test]
    fn anticommuting_osus_are_joined_by_rotation(seed in any::<u64>(), m in 1usize..6) {
        let mut r = rng(seed);
        let (e, t) = admissible_pair(m, &mut r);
        // an OSU anti-commuting with e: the flattened admissible operator
        let u = numkit::polar_phase(&t, &tol()).unwrap();
        prop_assume!(numkit::svd(&t).smallest() > 1e-3);
        for j in 0..32 {
            let s = FRAC_PI_2 * j as f64 / 31.0;
            let p = e.matrix().scale(s.cos()) + u.scale(s.sin());
            prop_assert!(check_osu(&p, e.grading(), None, &tol()).passed);
        }
    }

    #[test]
    fn real_structures_are_functorial(seed in any::<u64>(), n in 1usize..8) {
        let s = RealStructure::conjugation(n);
        let mut r = rng(seed);
        let (x, y) = (random::complex_gaussian(n, n, &mut r), random::complex_gaussian(n, n, &mut r));
        prop_assert!(max_abs(&(s.apply(&(&x * &y)) - s.apply(&x) * s.apply(&y))) < 1e-12);
        prop_assert!(max_abs(&(s.apply(&x).adjoint() - s.apply(&x.adjoint()))) < 1e-12);
    }

    #[test]
    fn cayley_maps_spectra(seed in any::<u64>(), n in 2usize..20) {
        let t = random::hermitian(n, &mut rng(seed));
        let v = cayley::cayley(&t, &tol()).unwrap();
        prop_assert!(numkit::is_unitary(&v, &tol()).passed);
        let ci = cayley::cayley_inv(&v, &tol()).unwrap();
        prop_assert!(max_abs(&(ci.lift() - &t)) < 1e-9);
        // every (λ+i)/(λ-i) is an eigenvalue: det(V - z) vanishes
        let scale = numkit::opnorm(&v);
        for l in sorted_eigenvalues(&t) {
            let z = (c(l, 1.0)) / (c(l, -1.0));
            let shifted = &v - numkit::scalar(n, z);
            prop_assert!(numkit::svd(&shifted).smallest() < 1e-9 * scale.max(1.0));
        }
    }

    #[test]
    fn graded_cayley_round_trip(seed in any::<u64>(), m in 1usize..10) {
        let (e, t) = admissible_pair(m, &mut rng(seed));
        let u = cayley::graded_cayley(&t, &e, &tol()).unwrap();
        prop_assert!(u.diagnostics(&tol()).passed);
        let back = cayley::graded_cayley_inv(&u, &e, &tol()).unwrap();
        prop_assert!(max_abs(&(back.lift() - &t)) < 1e-9);
        let p = back.projector();
        prop_assert!(max_abs(&(&p * &p - &p)) < 1e-9);
    }

    #[test]
    fn graph_projection_is_a_projection(seed in any::<u64>(), n in 1usize..8) {
        let g = Grading::standard(n);
        let (_, odd) = parity_decompose(&random::hermitian(2 * n, &mut rng(seed)), &g).unwrap();
        let p = kasparov::graph_projection(&odd, &g, &tol()).unwrap().projection;
        prop_assert!(max_abs(&(&p * &p - &p)) < 1e-10);
        prop_assert!(max_abs(&(&p - p.adjoint())) < 1e-10);
    }

    #[test]
    fn flattening_is_idempotent(seed in any::<u64>(), n in 2usize..12) {
        let h = random::hermitian(n, &mut rng(seed));
        let gap = sorted_eigenvalues(&h).iter().fold(f64::INFINITY, |a, l| a.min(l.abs()));
        prop_assume!(gap > 1e-3);
        let once = kasparov::flatten(&h, None, SymmetryData::none(), &tol()).unwrap();
        let twice = kasparov::flatten(once.flattened(), None, SymmetryData::none(), &tol()).unwrap();
        prop_assert!(max_abs(&(once.flattened() - twice.flattened())) < 1e-9);
    }

    #[test]
    fn boundary_of_a_random_lift_is_an_osu(seed in any::<u64>(), n in 1usize..6, radius in 0.0f64..1.0) {
        let mut r = rng(seed);
        let b = random::complex_gaussian(n, n, &mut r);
        let z = numkit::zeros(n, n);
        let x = numkit::block2(&z, &b.adjoint(), &b, &z);
        let x = x.scale(radius / numkit::opnorm(&x));
        let g = Grading::split(n, n);
        prop_assert!(boundary::vd_boundary(&x, &g, None, &tol()).unwrap().diagnostics(&tol()).passed);
        if radius < 0.9 {
            prop_assert!(boundary::tanh_identity_residual(&x, &g, &tol()).unwrap() < 1e-9);
        }
    }

    #[test]
    fn winding_is_additive_and_odd(
        seed in any::<u64>(),
        a in prop::collection::vec(-3i64..=3, 1..4),
        b in prop::collection::vec(-3i64..=3, 1..4),
    ) {
        let n = a.len().max(b.len());
        let pad = |v: &[i64]| { let mut v = v.to_vec(); v.resize(n, 0); v };
        let (a, b) = (pad(&a), pad(&b));
        let mut r = rng(seed);
        let (la, wa) = diagonal_loop(&a, 96, &mut r);
        let (lb, wb) = diagonal_loop(&b, 96, &mut r);
        prop_assert_eq!(pairing::winding_number(&la).unwrap(), wa);
        prop_assert_eq!(pairing::winding_number(&la.product(&lb, &tol()).unwrap()).unwrap(), wa + wb);
        prop_assert_eq!(pairing::winding_number(&la.adjoint()).unwrap(), -wa);
    }

    #[test]
    fn winding_survives_small_perturbations(seed in any::<u64>(), w in -2i64..=2) {
        let mut r = rng(seed);
        let (l, want) = diagonal_loop(&[w, 0], 128, &mut r);
        // a fixed small unitary rotation, applied pointwise
        let h = random::hermitian(2, &mut r);
        let h = h.scale(0.02 / numkit::opnorm(&h));
        let k = numkit::mat_func_hermitian_complex(&h, |x| num_complex::Complex64::from_polar(1.0, x), &tol()).unwrap();
        let moved = UnitaryLoop::new(
            l.samples().iter().map(|s| s * &k).collect(),
            l.grid().to_vec(),
            &tol(),
        ).unwrap();
        prop_assert_eq!(pairing::winding_number(&moved).unwrap(), want);
    }

    #[test]
    fn spectral_flow_is_additive_and_odd(seed in any::<u64>(), n in 2usize..6) {
        let mut r = rng(seed);
        let [a, b, c] = [0, 1, 2].map(|_| {
            let h = random::hermitian(n, &mut r);
            let gap = sorted_eigenvalues(&h).iter().fold(f64::INFINITY, |a, l| a.min(l.abs()));
            (h, gap)
        });
        prop_assume!(a.1 > 1e-2 && b.1 > 1e-2 && c.1 > 1e-2);
        let ab = HermitianPath::linear(&a.0, &b.0, 64, &tol()).unwrap();
        let bc = HermitianPath::linear(&b.0, &c.0, 64, &tol()).unwrap();
        let sf = |p: &HermitianPath| pairing::spectral_flow(p, &tol());
        let (Ok(x), Ok(y)) = (sf(&ab), sf(&bc)) else {
            // unresolved crossings are refused, not miscounted
            return Ok(());
        };
        prop_assert_eq!(sf(&ab.concat(&bc).unwrap()).unwrap(), x + y);
        prop_assert_eq!(sf(&ab.reversed()).unwrap(), -x);
        // the endpoint count of negative eigenvalues is an independent oracle
        let neg = |h: &Matrix| sorted_eigenvalues(h).iter().filter(|l| **l < 0.0).count() as i64;
        prop_assert_eq!(x, neg(&a.0) - neg(&b.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn class_invariants_ignore_the_generator_realization(
        seed in any::<u64>(),
        m in 2usize..5,
        nx in 0usize..5,
        ny in 0usize..5,
    ) {
        let (nx, ny) = (nx.min(m), ny.min(m));
        let mut r = rng(seed);
        let rep = |neg: usize, r: &mut ChaCha8Rng| {
            let w = random::unitary(m, r);
            let d = numkit::from_real_diag(&(0..m).map(|k| if k < neg { -1.0 } else { 1.0 }).collect::<Vec<_>>());
            &w * d * w.adjoint()
        };
        let (bx, by) = (rep(nx, &mut r), rep(ny, &mut r));
        // the same class with every generator, grading and symmetry
        // conjugated by one random unitary
        let w = random::unitary(2 * m, &mut r);
        let conj = |a: &Matrix| &w * a * w.adjoint();
        let build = |f: &dyn Fn(&Matrix) -> Matrix| {
            let g = Grading::new(f(Grading::standard(m).gamma()), &tol()).unwrap();
            let osu = |b: &Matrix| Osu::new(f(&kron(b, &pauli::s1())), g.clone(), None, &tol()).unwrap();
            let coeff = Coefficient::clifford(f(&kron(&identity(m), &pauli::s1())));
            DkClass::pair(osu(&bx), osu(&by), coeff, &tol()).unwrap().invariants(&tol()).unwrap()
        };
        let plain = build(&|a: &Matrix| a.clone());
        let moved = build(&conj);
        prop_assert_eq!(plain.clifford_signature, Some(nx as i64 - ny as i64));
        prop_assert_eq!(moved.clifford_signature, plain.clifford_signature);
    }

    #[test]
    fn ssh_winding_matches_edge_count(t1 in 0.2f64..2.0, t2 in 0.2f64..2.0) {
        prop_assume!((t1 - t2).abs() > 0.2);
        let model = models::ssh_model(t1, t2);
        let hs = model.halfspace(40, &tol()).unwrap();
        let (gap, _) = hs.bulk_gap(boundary::GAP_GRID, &tol()).unwrap();
        let edge = boundary::edge_invariants(&hs, gap, boundary::DEFAULT_MARGIN, &tol()).unwrap();
        let bulk = kasparov::bulk_class(&model.family_insulator(64, &tol()).unwrap(), &Default::default(), &tol()).unwrap();
        let want = i64::from(t2 > t1);
        prop_assert_eq!(bulk.invariants.winding, Some(want));
        prop_assert_eq!(edge.zero_modes.unwrap().left, want);
    }

    #[test]
    fn kitaev_pfaffian_matches_end_modes(mu in -3.0f64..3.0, t in 0.3f64..1.5, delta in 0.3f64..1.5) {
        prop_assume!((mu.abs() - 2.0 * t).abs() > 0.3);
        let model = models::kitaev_chain(mu, t, delta);
        let pf = model.majorana_number(&tol()).unwrap();
        prop_assert_eq!(pf, if mu.abs() < 2.0 * t { -1 } else { 1 });
        let (left, right) = boundary::gapped_end_modes(&model.halfspace(60, &tol()).unwrap(), &tol()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(if left % 2 == 1 { -1 } else { 1 }, pf);
    }
}
