//! Named verification suites behind `kcayley verify`. Limits are fixed
//! here rather than taken from the run tolerance, so a suite means the
//! same thing under every `--tol`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::report::{CheckOutcome, SuiteReport};
use crate::boundary::{self, edge_invariants, DEFAULT_MARGIN, GAP_GRID};
use crate::cayley;
use crate::clifford::{self, pauli, CliffordAlgebra};
use crate::error::{Error, Result};
use crate::graded::{parity_decompose, perturbation_average, Grading, Osu, Parity};
use crate::kasparov::{self, bulk_class, BulkOptions, FiniteKasparovCycle};
use crate::models;
use crate::numkit::{self, c, identity, kron, max_abs, random, Matrix, ToleranceProfile};
use crate::pairing;
use crate::vandaele::{self, Coefficient, DkClass};

pub const SUITES: &[&str] = &[
    "clifford",
    "cayley-roundtrip",
    "bott",
    "circle-index",
    "boundary-osu",
    "bulk-boundary",
    "positivity",
    "dk-kk-roundtrip",
    "models",
];

/// Runs `name`, or every suite for `all`.
pub fn run(name: &str, seed: u64, tol: &ToleranceProfile) -> Result<Vec<SuiteReport>> {
    if name == "all" {
        return SUITES.iter().map(|s| run_one(s, seed, tol)).collect();
    }
    run_one(name, seed, tol).map(|r| vec![r])
}

fn run_one(name: &str, seed: u64, tol: &ToleranceProfile) -> Result<SuiteReport> {
    let checks = match name {
        "clifford" => clifford_suite(tol),
        "cayley-roundtrip" => cayley_suite(seed, tol),
        "bott" => bott_suite(tol),
        "circle-index" => circle_suite(tol),
        "boundary-osu" => boundary_suite(seed, tol),
        "bulk-boundary" => bulk_boundary_suite(tol),
        "positivity" => positivity_suite(seed, tol),
        "dk-kk-roundtrip" => roundtrip_suite(seed, tol),
        "models" => models_suite(tol),
        other => {
            return Err(Error::Domain(format!(
                "unknown suite `{other}`; expected all or one of {}",
                SUITES.join(", ")
            )))
        }
    };
    Ok(SuiteReport::new(name, checks))
}

fn bound(name: &str, value: f64, limit: f64) -> CheckOutcome {
    CheckOutcome {
        name: name.to_string(),
        passed: value.is_finite() && value <= limit,
        value,
        limit,
        detail: None,
    }
}

fn exact(name: &str, mismatches: usize, detail: Option<String>) -> CheckOutcome {
    CheckOutcome {
        name: name.to_string(),
        passed: mismatches == 0,
        value: mismatches as f64,
        limit: 0.0,
        detail,
    }
}

/// Evaluates `f`; an error fails the check and is kept as its detail.
fn guard(name: &str, limit: f64, f: impl FnOnce() -> Result<CheckOutcome>) -> CheckOutcome {
    f().unwrap_or_else(|e| CheckOutcome {
        name: name.to_string(),
        passed: false,
        value: f64::NAN,
        limit,
        detail: Some(e.to_string()),
    })
}

/// Ordered monomials `g_{i₁}⋯g_{i_k}` with their parity.
fn monomials(alg: &CliffordAlgebra) -> Vec<(Matrix, Parity)> {
    let gens: Vec<&Matrix> = alg.generators().collect();
    (0..1usize << gens.len())
        .map(|mask| {
            let m = (0..gens.len())
                .filter(|j| mask >> j & 1 == 1)
                .fold(identity(alg.matrix_size()), |acc, j| acc * gens[j]);
            (m, Parity::from_bit((mask.count_ones() % 2) as u8))
        })
        .collect()
}

fn matrix_units(n: usize) -> Vec<Matrix> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut m = numkit::zeros(n, n);
            m[(i, j)] = c(1.0, 0.0);
            out.push(m);
        }
    }
    out
}

fn clifford_suite(tol: &ToleranceProfile) -> Vec<CheckOutcome> {
    let relations = guard("generator-relations", 1e-12, || {
        let mut worst = 0.0f64;
        for p in 0..=6 {
            for q in 0..=(6 - p) {
                let a = clifford::build_clifford(p, q)?;
                worst = worst.max(a.relation_residual());
            }
        }
        Ok(bound("generator-relations", worst, 1e-12))
    });
    let koszul = guard("koszul-multiplicativity", 1e-10, || {
        let mut worst = 0.0f64;
        for ((p, q), (r, s)) in [((1, 1), (1, 0)), ((2, 1), (0, 2)), ((0, 3), (1, 1)), ((2, 0), (2, 0))] {
            let (a, b) = (clifford::build_clifford(p, q)?, clifford::build_clifford(r, s)?);
            let (ma, mb) = (monomials(&a), monomials(&b));
            let emb = |x: &Matrix, y: &Matrix| -> Result<Matrix> {
                Ok(clifford::graded_tensor(x, &a.grading, y, &b.grading, false, tol)?.embedded)
            };
            for (a1, _) in &ma {
                for (b1, pb1) in &mb {
                    let left = emb(a1, b1)?;
                    for (a2, pa2) in &ma {
                        for (b2, _) in &mb {
                            let lhs = &left * emb(a2, b2)?;
                            let rhs = emb(&(a1 * a2), &(b1 * b2))?.scale(pb1.koszul(*pa2));
                            worst = worst.max(max_abs(&(lhs - rhs)));
                        }
                    }
                }
            }
        }
        Ok(bound("koszul-multiplicativity", worst, 1e-10))
    });
    let eta = guard("eta-isomorphism", 1e-10, || {
        let mut worst = 0.0f64;
        let mut rank_mismatch = 0usize;
        for g in [Grading::standard(1), Grading::split(2, 1)] {
            let n = g.dim();
            let target = kron(&identity(n), &pauli::s3());
            let mut basis = Vec::new();
            for b in matrix_units(n) {
                for k in 0..2u8 {
                    basis.push((b.clone(), k));
                }
            }
            let mut images = Vec::with_capacity(basis.len());
            for (b, k) in &basis {
                let pb = g.parity_of(b, tol)?;
                let img = clifford::eta(b, *k, &g)?;
                let sign = if (pb.bit() + k) % 2 == 0 { 1.0 } else { -1.0 };
                worst = worst.max(max_abs(&(&target * &img * &target - img.scale(sign))));
                for (c2, l) in &basis {
                    let pc = g.parity_of(c2, tol)?;
                    let koszul = if k % 2 == 1 && pc == Parity::Odd { -1.0 } else { 1.0 };
                    let lhs = &img * clifford::eta(c2, *l, &g)?;
                    let rhs = clifford::eta(&(b * c2), k + l, &g)?.scale(koszul);
                    worst = worst.max(max_abs(&(lhs - rhs)));
                }
                images.push(img);
            }
            // injective on the full basis
            let stacked = Matrix::from_fn(4 * n * n, images.len(), |i, j| images[j][(i % (2 * n), i / (2 * n))]);
            let rank = numkit::singular_values(&stacked).iter().filter(|&&s| s > 1e-8).count();
            rank_mismatch += rank.abs_diff(2 * n * n);
            let one_rho = clifford::eta(&identity(n), 1, &g)?;
            worst = worst.max(max_abs(&(one_rho - kron(g.gamma(), &pauli::s1()))));
        }
        if rank_mismatch > 0 {
            return Ok(exact("eta-isomorphism", rank_mismatch, Some("η is not injective".into())));
        }
        Ok(bound("eta-isomorphism", worst, 1e-10))
    });
    vec![relations, koszul, eta]
}

/// `e = 1 ⊗ σ₁` on `Grading::standard(m)`.
fn doubled_base(m: usize, tol: &ToleranceProfile) -> Result<(Osu, Grading)> {
    let g = Grading::standard(m);
    Ok((Osu::new(kron(&identity(m), &pauli::s1()), g.clone(), None, tol)?, g))
}

/// Random odd self-adjoint operator anti-commuting with `e`.
fn admissible(e: &Osu, g: &Grading, rng: &mut ChaCha8Rng) -> Result<Matrix> {
    let h = random::hermitian(e.dim(), rng);
    let (_, odd) = parity_decompose(&h, g)?;
    perturbation_average(&odd, e)
}

fn cayley_suite(seed: u64, tol: &ToleranceProfile) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ungraded = guard("ungraded-round-trip", 1e-9, || {
        let (mut round, mut forward) = (0.0f64, 0.0f64);
        for _ in 0..200 {
            let n = rng.gen_range(2..=32);
            let t = random::hermitian(n, &mut rng);
            let v = cayley::cayley(&t, tol)?;
            round = round.max(max_abs(&(cayley::cayley_inv(&v, tol)?.lift() - &t)));
            let rhs = numkit::inverse(&(&t - numkit::scalar(n, numkit::I)))?.scale(2.0) * numkit::I;
            forward = forward.max(max_abs(&(&v - identity(n) - rhs)));
        }
        Ok(bound("ungraded-round-trip", round.max(forward), 1e-9))
    });
    let graded = guard("graded-round-trip", 1e-9, || {
        let (mut round, mut first, mut second) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..200 {
            let m = rng.gen_range(1..=16);
            let (e, g) = doubled_base(m, tol)?;
            let t = admissible(&e, &g, &mut rng)?;
            let u = cayley::graded_cayley(&t, &e, tol)?;
            let r = cayley::graded_cayley_inv(&u, &e, tol)?;
            round = round.max(max_abs(&(r.lift() - &t)));
            let rhs = numkit::inverse(&(&t - e.matrix()))?.scale(2.0);
            first = first.max(max_abs(&(u.matrix() - e.matrix() - rhs)));
            let d = numkit::inverse(&r.compress(&(u.matrix() - e.matrix())))?;
            let lhs = identity(r.dim()) + &r.compressed * &r.compressed;
            second = second.max(max_abs(&(lhs - (&d * &d).scale(4.0))));
        }
        Ok(CheckOutcome {
            detail: Some(format!("round trip {round:.2e}, C_e(T)-e {first:.2e}, 1+Ci_e(U)² {second:.2e}")),
            ..bound("graded-round-trip", round.max(first).max(second), 1e-9)
        })
    });
    vec![ungraded, graded]
}

/// `(1+x²+y²)⁻¹ [[1, x-iy], [x+iy, x²+y²]]`, written out independently.
fn bott_closed_form(x: f64, y: f64) -> Matrix {
    let r2 = x * x + y * y;
    numkit::from_rows(&[&[c(1.0, 0.0), c(x, -y)], &[c(x, y), c(r2, 0.0)]]).scale(1.0 / (1.0 + r2))
}

fn bott_suite(tol: &ToleranceProfile) -> Vec<CheckOutcome> {
    vec![guard("graph-projection-is-bott", 1e-12, || {
        let g = Grading::standard(1);
        let mut worst = 0.0f64;
        for s in models::bott_plane(21, 2.0)? {
            let p = kasparov::graph_projection(&s.t, &g, tol)?;
            worst = worst
                .max(max_abs(&(&p.projection - bott_closed_form(s.x, s.y))))
                .max(max_abs(&(&p.projection - kasparov::bott_projector(s.x, s.y))));
        }
        Ok(bound("graph-projection-is-bott", worst, 1e-12))
    })]
}

/// How many of the three smallest singular values shrink by at least 40%
/// under each grid doubling.
fn decaying_count(spectra: &[Vec<f64>]) -> usize {
    (0..3)
        .filter(|&k| spectra.windows(2).all(|w| w[1][k] < 0.6 * w[0][k]))
        .count()
}

fn circle_suite(tol: &ToleranceProfile) -> Vec<CheckOutcome> {
    let index = guard("circle-index-both-methods", 0.0, || {
        let mut bad = Vec::new();
        for n in [16, 32, 64] {
            let ct = models::circle_spectral_triple(n)?;
            let sf = pairing::index_by_spectral_flow(&ct.u, &ct.d, 64, tol)?.value;
            let ker = pairing::index_by_kernel(&ct.u, &ct.d, tol)?;
            if sf != 1 || ker != 1 {
                bad.push(format!("N={n}: spectral flow {sf}, kernel {ker}"));
            }
        }
        Ok(exact("circle-index-both-methods", bad.len(), (!bad.is_empty()).then(|| bad.join("; "))))
    });
    let cot = guard("cot-kernel-dimension", 0.0, || {
        let mut plus = Vec::new();
        let mut adjoint = Vec::new();
        let mut residuals = Vec::new();
        for m in [128, 256, 512] {
            let op = models::cot_product_operator(m)?;
            plus.push(numkit::singular_values(&op.d_plus));
            adjoint.push(numkit::singular_values(&op.adjoint_side));
            residuals.push(op.residual);
        }
        let (kd, cd) = (decaying_count(&plus), decaying_count(&adjoint));
        let converging = residuals.windows(2).all(|w| w[1] < 0.55 * w[0]);
        let bounded_below = plus.iter().all(|s| s[1] > 0.5);
        let mismatches = kd.abs_diff(1) + cd + usize::from(!converging) + usize::from(!bounded_below);
        Ok(exact(
            "cot-kernel-dimension",
            mismatches,
            Some(format!(
                "decaying: {kd} (kernel side), {cd} (adjoint side); smallest {:.2e} → {:.2e} → {:.2e}",
                plus[0][0], plus[1][0], plus[2][0]
            )),
        ))
    });
    vec![index, cot]
}

/// Odd self-adjoint `[[0, b*], [b, 0]]` of norm `radius`.
fn random_odd_lift(n: usize, radius: f64, rng: &mut ChaCha8Rng) -> (Matrix, Grading) {
    let b = random::complex_gaussian(n, n, rng);
    let z = numkit::zeros(n, n);
    let x = numkit::block2(&z, &b.adjoint(), &b, &z);
    let scale = radius / numkit::opnorm(&x);
    (x.scale(scale), Grading::split(n, n))
}

fn boundary_suite(seed: u64, tol: &ToleranceProfile) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let osu = guard("boundary-is-osu", 1e-9, || {
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let n = rng.gen_range(1..=6);
            let radius = rng.gen_range(0.0..=1.0);
            let (x, g) = random_odd_lift(n, radius, &mut rng);
            worst = worst.max(boundary::vd_boundary(&x, &g, None, tol)?.diagnostics(tol).worst());
        }
        Ok(bound("boundary-is-osu", worst, 1e-9))
    });
    let exact_lift = guard("exact-lift-gives-base-point", 1e-12, || {
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let n = rng.gen_range(1..=6);
            let v = random::unitary(n, &mut rng);
            let z = numkit::zeros(n, n);
            let x = numkit::block2(&z, &v.adjoint(), &v, &z);
            let g = Grading::split(n, n);
            let y = boundary::vd_boundary(&x, &g, None, tol)?;
            worst = worst.max(max_abs(&(y.matrix() - kron(g.gamma(), &pauli::s1()))));
        }
        Ok(bound("exact-lift-gives-base-point", worst, 1e-12))
    });
    let tanh = guard("tanh-tan-identity", 1e-9, || {
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let n = rng.gen_range(1..=6);
            let radius = rng.gen_range(0.0..0.9);
            let (x, g) = random_odd_lift(n, radius, &mut rng);
            worst = worst.max(boundary::tanh_identity_residual(&x, &g, tol)?);
        }
        Ok(bound("tanh-tan-identity", worst, 1e-9))
    });
    vec![osu, exact_lift, tanh]
}

pub const SSH_GRID: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

/// Bulk winding and left signed edge count of one SSH point, or `None`
/// when the bulk gap closes.
pub fn ssh_point(t1: f64, t2: f64, cells: usize, momenta: usize, tol: &ToleranceProfile) -> Result<Option<(i64, i64)>> {
    let model = models::ssh_model(t1, t2);
    let hs = model.halfspace(cells, tol)?;
    let (gap, _) = hs.bulk_gap(GAP_GRID, tol)?;
    if gap < 1e-6 {
        return Ok(None);
    }
    let bulk = bulk_class(&model.family_insulator(momenta, tol)?, &BulkOptions::default(), tol)?;
    let winding = bulk
        .invariants
        .winding
        .ok_or_else(|| Error::Precondition("chiral family without a winding".into()))?;
    let edge = edge_invariants(&hs, gap, DEFAULT_MARGIN, tol)?
        .zero_modes
        .ok_or_else(|| Error::Precondition("chiral chain without zero-mode data".into()))?;
    Ok(Some((winding, edge.left)))
}

fn bulk_boundary_suite(tol: &ToleranceProfile) -> Vec<CheckOutcome> {
    let grid = guard("winding-equals-edge-count", 0.0, || {
        let mut bad = Vec::new();
        let mut gapped = 0usize;
        for &t1 in &SSH_GRID {
            for &t2 in &SSH_GRID {
                if let Some((w, left)) = ssh_point(t1, t2, 40, 64, tol)? {
                    gapped += 1;
                    if w != left {
                        bad.push(format!("({t1}, {t2}): winding {w}, edge {left}"));
                    }
                }
            }
        }
        if gapped != 20 {
            bad.push(format!("{gapped} gapped points, expected 20"));
        }
        Ok(exact("winding-equals-edge-count", bad.len(), (!bad.is_empty()).then(|| bad.join("; "))))
    });
    let modes = guard("topological-point-modes", 0.0, || {
        let hs = models::ssh_model(0.5, 1.0).halfspace(40, tol)?;
        let (gap, _) = hs.bulk_gap(GAP_GRID, tol)?;
        let e = edge_invariants(&hs, gap, DEFAULT_MARGIN, tol)?;
        let zero = e.in_gap.iter().filter(|x| x.abs() < 1e-6).count();
        let mismatches = e.in_gap.len().abs_diff(2) + zero.abs_diff(2);
        Ok(exact("topological-point-modes", mismatches, Some(format!("in-gap energies {:?}", e.in_gap))))
    });
    vec![grid, modes]
}

fn positivity_suite(seed: u64, tol: &ToleranceProfile) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let forms = guard("product-form-positive", 1e-10, || {
        let mut worst = f64::NEG_INFINITY;
        let mut bad_cycles = 0usize;
        for _ in 0..100 {
            let n = rng.gen_range(2..=12);
            let u = random::unitary(n, &mut rng);
            let d = random::hermitian(n, &mut rng);
            let target = rng.gen_range(0.1..1.9);
            let d = d.scale(target / numkit::opnorm(&numkit::commutator(&d, &u)));
            let p = pairing::kasparov_product_rep(&u, &d, tol)?;
            worst = worst.max(-p.positivity_margin);
            bad_cycles += usize::from(!p.cycle.diagnostics(tol).passed);
        }
        if bad_cycles > 0 {
            return Ok(exact("product-form-positive", bad_cycles, Some("cycle axioms failed".into())));
        }
        Ok(bound("product-form-positive", worst, 1e-10))
    });
    let decay = guard("approximate-unit-decay", 0.0, || {
        let r = pairing::approx_unit_check(&[1, 2, 4, 8, 16], 4096)?;
        let mismatches = usize::from(!r.decreasing) + usize::from(r.closed_form_mismatch > 1e-12);
        Ok(exact("approximate-unit-decay", mismatches, Some(format!("{:?}", r.norms))))
    });
    vec![forms, decay]
}

/// `b ⊗ σ₁` for a random Hermitian unitary `b` with `neg` negative
/// eigenvalues.
fn clifford_rep(m: usize, neg: usize, rng: &mut ChaCha8Rng, tol: &ToleranceProfile) -> Result<Osu> {
    let u = random::unitary(m, rng);
    let d: Vec<f64> = (0..m).map(|j| if j < neg { -1.0 } else { 1.0 }).collect();
    let b = &u * numkit::from_real_diag(&d) * u.adjoint();
    Osu::new(kron(&b, &pauli::s1()), Grading::standard(m), None, tol)
}

fn random_class(rng: &mut ChaCha8Rng, tol: &ToleranceProfile) -> Result<DkClass> {
    if rng.gen_bool(0.6) {
        let m = rng.gen_range(2..=6);
        let x = clifford_rep(m, rng.gen_range(0..=m), rng, tol)?;
        let y = clifford_rep(m, rng.gen_range(0..=m), rng, tol)?;
        let r = kron(&identity(m), &pauli::s1());
        return DkClass::pair(x, y, Coefficient::clifford(r), tol);
    }
    loop {
        let t1: f64 = rng.gen_range(0.2..2.0);
        let t2 = rng.gen_range(0.2..2.0);
        if (t1 - t2).abs() < 0.2 {
            continue;
        }
        let momenta = rng.gen_range(48..=64);
        let ins = models::ssh_model(t1, t2).family_insulator(momenta, tol)?;
        let bulk = bulk_class(&ins, &BulkOptions::default(), tol)?;
        return bulk.dk.ok_or_else(|| Error::Precondition("chiral bulk class without a van Daele class".into()));
    }
}

fn roundtrip_suite(seed: u64, tol: &ToleranceProfile) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut op_gap = 0.0f64;
    let invariants = guard("round-trips-preserve-invariants", 0.0, || {
        let mut bad = Vec::new();
        for j in 0..50 {
            let class = random_class(&mut rng, tol)?;
            let want = class.invariants(tol)?;
            let cycle = vandaele::dk_to_kk(&class, tol)?;
            let back = vandaele::kk_to_dk(&cycle, tol)?;
            let got = back.invariants(tol)?;
            let again = vandaele::dk_to_kk(&back, tol)?;
            let via_cycle = vandaele::kk_to_dk(&again, tol)?.invariants(tol)?;
            if want != got || got != via_cycle {
                bad.push(format!("class {j}: {want:?} vs {got:?} vs {via_cycle:?}"));
            }
            let p = again.module_projector();
            op_gap = op_gap.max(max_abs(&(again.ambient_op() - &p * cycle.op() * &p)));
        }
        Ok(exact("round-trips-preserve-invariants", bad.len(), (!bad.is_empty()).then(|| bad.join("; "))))
    });
    let operators = bound("round-trip-operator", op_gap, 1e-8);
    let degenerate = guard("degenerate-cycles-have-paths", 1e-9, || {
        let mut missing = 0usize;
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let m = rng.gen_range(1..=4);
            let (e, g) = doubled_base(m, tol)?;
            let t = admissible(&e, &g, &mut rng)?;
            let cycle = FiniteKasparovCycle::new(
                identity(2 * m),
                vec![e.matrix().clone()],
                t,
                g,
                None,
                Coefficient::none(),
                tol,
            )?;
            if !cycle.is_degenerate(tol)? {
                missing += 1;
                continue;
            }
            let class = vandaele::kk_to_dk(&cycle, tol)?;
            match vandaele::certify_trivial(&class, 16, tol)? {
                Some(path) => {
                    let ends = max_abs(&(&path.points[0] - class.x().matrix()))
                        .max(max_abs(&(path.points.last().expect("two samples") - class.y().matrix())));
                    worst = worst.max(path.worst_residual).max(ends);
                }
                None => missing += 1,
            }
        }
        if missing > 0 {
            return Ok(exact("degenerate-cycles-have-paths", missing, Some("no path exhibited".into())));
        }
        Ok(bound("degenerate-cycles-have-paths", worst, 1e-9))
    });
    vec![invariants, operators, degenerate]
}

fn models_suite(tol: &ToleranceProfile) -> Vec<CheckOutcome> {
    let declared = guard("declared-symmetries", 1e-12, || {
        let mut worst = 0.0f64;
        for m in [
            models::ssh_model(0.5, 1.0),
            models::ssh_model(1.0, 0.3),
            models::kitaev_chain(0.5, 1.0, 1.0),
            models::kitaev_chain(3.0, 1.0, 0.5),
        ] {
            let r = m.verify(128, tol)?;
            worst = worst.max(r.hopping_hermiticity).max(r.bloch_hermiticity).max(r.symmetry);
        }
        Ok(bound("declared-symmetries", worst, 1e-12))
    });
    let gap = guard("ssh-gap-closed-form", 1e-9, || {
        let mut worst = 0.0f64;
        for (t1, t2) in [(0.5, 1.0), (1.0, 0.5), (1.0, 1.0), (-1.0, 1.0), (0.3, -2.0)] {
            let hs = models::ssh_model(t1, t2).halfspace(16, tol)?;
            let (g, _) = hs.bulk_gap(512, tol)?;
            worst = worst.max((g - (f64::abs(t1) - f64::abs(t2)).abs()).abs());
        }
        Ok(bound("ssh-gap-closed-form", worst, 1e-9))
    });
    let line = guard("line-generator", 1e-9, || {
        let g = models::real_line_generator(64, 100.0, tol)?;
        let w = pairing::winding_number(&g.samples)?;
        if w.abs() != 1 {
            return Ok(exact("line-generator", 1, Some(format!("winding {w}"))));
        }
        Ok(bound("line-generator", g.cayley_residual(tol)?, 1e-9))
    });
    let origin = guard("bott-origin", 1e-15, || {
        let t = numkit::zeros(2, 2);
        let p = kasparov::graph_projection(&t, &Grading::standard(1), tol)?;
        Ok(bound("bott-origin", max_abs(&(p.projection - numkit::from_real_diag(&[1.0, 0.0]))), 1e-15))
    });
    let majorana = guard("kitaev-majorana-number", 0.0, || {
        let mut bad = 0;
        for (mu, t, delta, want) in [(0.5, 1.0, 1.0, -1), (3.0, 1.0, 1.0, 1), (-1.0, 0.7, 0.4, -1), (0.5, 0.5, 1.0, -1), (-3.0, -3.0, 1.0, -1)] {
            let model = models::kitaev_chain(mu, t, delta);
            let pf = model.majorana_number(tol)?;
            let (left, _) = boundary::gapped_end_modes(&model.halfspace(40, tol)?, tol)?;
            let edge = if left % 2 == 1 { -1 } else { 1 };
            bad += usize::from(pf != want) + usize::from(edge != want);
        }
        Ok(exact("kitaev-majorana-number", bad, None))
    });
    vec![declared, gap, line, origin, majorana]
}
