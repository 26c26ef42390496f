//! Acceptance criteria, one line each. Every check recomputes its
//! quantities with plain nalgebra from their definitions and compares the
//! library against that oracle. Exits non-zero if any criterion fails.

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kcayley::boundary::{self, edge_invariants, DEFAULT_MARGIN, GAP_GRID};
use kcayley::cayley;
use kcayley::clifford::{self, pauli};
use kcayley::graded::{Grading, Osu};
use kcayley::kasparov::{self, bulk_class, BulkOptions, FiniteKasparovCycle};
use kcayley::models;
use kcayley::numkit::{ToleranceProfile, I};
use kcayley::pairing;
use kcayley::vandaele::{self, Coefficient, DkClass};

type M = DMatrix<Complex64>;

const SEED: u64 = 0x5eed;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn eye(n: usize) -> M {
    M::identity(n, n)
}

fn kron(a: &M, b: &M) -> M {
    a.kronecker(b)
}

fn max_abs(m: &M) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

fn inv(m: &M) -> M {
    m.clone().try_inverse().expect("invertible")
}

fn herm_eig(m: &M) -> (Vec<f64>, M) {
    let h = (m + m.adjoint()).scale(0.5);
    let e = SymmetricEigen::new(h);
    (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
}

/// `f(H)` for Hermitian `H` by diagonalization.
fn herm_fn(m: &M, f: impl Fn(f64) -> Complex64) -> M {
    let (vals, v) = herm_eig(m);
    let d = M::from_diagonal(&nalgebra::DVector::from_iterator(vals.len(), vals.iter().map(|&l| f(l))));
    &v * d * v.adjoint()
}

fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> M {
    let mut g = || {
        // Box-Muller keeps the oracle free of the library's samplers
        let (u1, u2): (f64, f64) = (rng.gen_range(f64::EPSILON..1.0), rng.gen());
        (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
    };
    M::from_fn(rows, cols, |_, _| c(g(), g()))
}

fn hermitian(n: usize, rng: &mut ChaCha8Rng) -> M {
    let a = gaussian(n, n, rng);
    (&a + a.adjoint()).scale(0.5)
}

fn unitary(n: usize, rng: &mut ChaCha8Rng) -> M {
    let h = hermitian(n, rng);
    herm_fn(&h, |l| Complex64::from_polar(1.0, l))
}

fn s1() -> M {
    M::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

fn s2() -> M {
    M::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

fn s3() -> M {
    M::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

fn odd_block(b: &M) -> M {
    let n = b.nrows();
    let mut x = M::zeros(2 * n, 2 * n);
    x.view_mut((0, n), (n, n)).copy_from(&b.adjoint());
    x.view_mut((n, 0), (n, n)).copy_from(b);
    x
}

fn split_gamma(n: usize) -> M {
    let d: Vec<Complex64> = (0..2 * n).map(|j| c(if j < n { 1.0 } else { -1.0 }, 0.0)).collect();
    M::from_diagonal(&nalgebra::DVector::from_vec(d))
}

/// Worst OSU-axiom residual for `y` against the grading `g`.
fn osu_residual(y: &M, g: &M) -> f64 {
    let n = y.nrows();
    max_abs(&(y - y.adjoint()))
        .max(max_abs(&(y * y - eye(n))))
        .max(max_abs(&(y * g + g * y)))
}

struct Criterion {
    id: u8,
    name: &'static str,
    budget: Option<Duration>,
}

/// Runs one criterion and prints its line.
fn report(cr: Criterion, f: impl FnOnce() -> Result<String, String>) -> bool {
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    let (mut ok, mut detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(b) = cr.budget {
        if elapsed > b {
            ok = false;
            detail = format!("{detail}; over the {:.0} s budget", b.as_secs_f64());
        }
    }
    println!(
        "criterion {} {}: {} ({:.2} s) {}",
        cr.id,
        if ok { "PASS" } else { "FAIL" },
        cr.name,
        elapsed.as_secs_f64(),
        detail
    );
    ok
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: kcayley::error::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Winding of a closed sampled curve, accumulated from principal
/// arguments of successive ratios.
fn winding(z: &[Complex64]) -> i64 {
    let total: f64 = (0..z.len()).map(|j| (z[(j + 1) % z.len()] / z[j]).arg()).sum();
    (total / TAU).round() as i64
}

fn circle_index(tol: &ToleranceProfile) -> Result<String, String> {
    // Toeplitz index of the symbol e^{-iθ} is minus its winding
    let symbol: Vec<Complex64> = (0..512).map(|j| Complex64::from_polar(1.0, -TAU * j as f64 / 512.0)).collect();
    let expected = -winding(&symbol);
    ensure(expected == 1, || format!("symbol oracle gave {expected}"))?;
    for n in [16, 32, 64] {
        let ct = lib(models::circle_spectral_triple(n))?;
        let sf = lib(pairing::index_by_spectral_flow(&ct.u, &ct.d, 64, tol))?.value;
        let ker = lib(pairing::index_by_kernel(&ct.u, &ct.d, tol))?;
        ensure(sf == expected && ker == expected, || {
            format!("N={n}: spectral flow {sf}, kernel {ker}, expected {expected}")
        })?;
    }
    // the cot operator: one singular value decays under refinement, and its
    // singular vector is the analytic kernel sin²(θ/2)
    let mut plus = Vec::new();
    let mut adjoint = Vec::new();
    let mut overlap = 0.0;
    for m in [128, 256, 512] {
        let op = lib(models::cot_product_operator(m))?;
        let dp = op.d_plus.map(|z| z.re);
        let svd = dp.svd(false, true);
        let mut s: Vec<(f64, usize)> = svd.singular_values.iter().copied().zip(0..).collect();
        s.sort_by(|a, b| a.0.total_cmp(&b.0));
        let vt = svd.v_t.expect("requested");
        let v = vt.row(s[0].1).transpose();
        let h = TAU / m as f64;
        let y = nalgebra::DVector::from_iterator(m - 1, (1..m).map(|j| (j as f64 * h / 2.0).sin().powi(2)));
        overlap = (v.dot(&y) / y.norm()).abs();
        plus.push(s.iter().map(|p| p.0).collect::<Vec<_>>());
        let mut sa: Vec<f64> = op.adjoint_side.map(|z| z.re).singular_values().iter().copied().collect();
        sa.sort_by(f64::total_cmp);
        adjoint.push(sa);
    }
    let decaying = |sp: &[Vec<f64>]| (0..3).filter(|&k| sp.windows(2).all(|w| w[1][k] < 0.6 * w[0][k])).count();
    let (kd, cd) = (decaying(&plus), decaying(&adjoint));
    ensure(kd == 1 && cd == 0, || format!("decaying singular values: kernel side {kd}, adjoint side {cd}"))?;
    ensure(overlap > 0.99, || format!("kernel vector overlap {overlap:.4}"))?;
    Ok(format!(
        "index 1 by both methods at N=16,32,64; smallest singular value {:.2e} -> {:.2e} -> {:.2e}, second {:.3}; kernel overlap {overlap:.6}",
        plus[0][0], plus[1][0], plus[2][0], plus[2][1]
    ))
}

fn bott(tol: &ToleranceProfile) -> Result<String, String> {
    let g = Grading::standard(1);
    let mut worst = 0.0f64;
    for i in 0..21 {
        for j in 0..21 {
            let (x, y) = (-2.0 + 0.2 * i as f64, -2.0 + 0.2 * j as f64);
            let t = M::from_row_slice(2, 2, &[c(0., 0.), c(x, -y), c(x, y), c(0., 0.)]);
            let p = lib(kasparov::graph_projection(&t, &g, tol))?.projection;
            // projection onto the graph line spanned by (1, x+iy)
            let v = nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(x, y)]);
            let oracle = (&v * v.adjoint()).unscale(1.0 + x * x + y * y);
            worst = worst.max(max_abs(&(p - oracle)));
        }
    }
    ensure(worst < 1e-12, || format!("worst entry error {worst:.2e}"))?;
    Ok(format!("441 points, worst entry error {worst:.2e}"))
}

fn cayley_round_trips(tol: &ToleranceProfile) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut forward, mut round) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let n = rng.gen_range(2..=32);
        let t = hermitian(n, &mut rng);
        let v = lib(cayley::cayley(&t, tol))?;
        let i = eye(n) * I;
        forward = forward.max(max_abs(&(&v - (&t + &i) * inv(&(&t - &i)))));
        round = round.max(max_abs(&(lib(cayley::cayley_inv(&v, tol))?.lift() - &t)));
    }
    let (mut g_forward, mut g_round, mut id1, mut id2) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..200 {
        let m = rng.gen_range(1..=16);
        let n = 2 * m;
        let gamma = kron(&eye(m), &s3());
        let e = kron(&eye(m), &s1());
        // odd, self-adjoint and anti-commuting with e
        let w = unitary(m, &mut rng);
        let b = hermitian(m, &mut rng);
        let t = kron(&(&w * b * w.adjoint()), &s2());
        let eo = lib(Osu::new(e.clone(), Grading::standard(m), None, tol))?;
        let u = lib(cayley::graded_cayley(&t, &eo, tol))?;
        let oracle = &e * (&t + &e) * inv(&(&t - &e));
        g_forward = g_forward.max(max_abs(&(u.matrix() - &oracle)));
        let ci = lib(cayley::graded_cayley_inv(&u, &eo, tol))?.lift();
        g_round = g_round.max(max_abs(&(&ci - &t)));
        id1 = id1.max(max_abs(&(u.matrix() - &e - inv(&(&t - &e)).scale(2.0))));
        let d = inv(&(u.matrix() - &e));
        id2 = id2.max(max_abs(&(eye(n) + &ci * &ci - (&d * &d).scale(4.0))));
        ensure(max_abs(&(&gamma * u.matrix() + u.matrix() * &gamma)) < 1e-9, || "C_e(T) not odd".into())?;
    }
    let worst = [forward, round, g_forward, g_round, id1, id2].into_iter().fold(0.0, f64::max);
    ensure(worst < 1e-9, || {
        format!("ungraded {forward:.1e}/{round:.1e}, graded {g_forward:.1e}/{g_round:.1e}, identities {id1:.1e}/{id2:.1e}")
    })?;
    Ok(format!(
        "200+200 inputs; round trips {round:.1e} and {g_round:.1e}; identities {id1:.1e} and {id2:.1e}"
    ))
}

fn boundary_map(tol: &ToleranceProfile) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let (mut axioms, mut formula) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let n = rng.gen_range(1..=6);
        let b = gaussian(n, n, &mut rng);
        let x = odd_block(&b);
        let norm = x.singular_values().max();
        let x = x.scale(rng.gen_range(0.0..=1.0) / norm);
        let g = split_gamma(n);
        let y = lib(boundary::vd_boundary(&x, &Grading::split(n, n), None, tol))?;
        axioms = axioms.max(osu_residual(y.matrix(), &kron(&g, &s3())));
        // -exp(π x̃Γ⊗σ₁)(Γ⊗σ₁), with the exponent skew-adjoint
        let xr = kron(&(&x * &g), &s1());
        let h = &xr * c(0.0, -1.0);
        let ex = herm_fn(&h, |l| Complex64::from_polar(1.0, PI * l));
        formula = formula.max(max_abs(&(y.matrix() + ex * kron(&g, &s1()))));
    }
    let mut exact = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(1..=6);
        let v = unitary(n, &mut rng);
        let g = split_gamma(n);
        let y = lib(boundary::vd_boundary(&odd_block(&v), &Grading::split(n, n), None, tol))?;
        exact = exact.max(max_abs(&(y.matrix() - kron(&g, &s1()))));
    }
    let mut tanh = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(1..=6);
        let x = odd_block(&gaussian(n, n, &mut rng));
        let norm = x.singular_values().max();
        let x = x.scale(rng.gen_range(0.0..0.9) / norm);
        let g = split_gamma(n);
        let r = kron(&g, &s1());
        let h = kron(&(&x * &g), &s1()) * c(0.0, -1.0);
        // tanh(πX/2) = i·tan(πH/2) for X = iH
        let lhs = -(&r * herm_fn(&h, |l| c(0.0, (PI * l / 2.0).tan())));
        let rhs = kron(&herm_fn(&x, |l| c((PI * l / 2.0).tan(), 0.0)), &eye(2));
        tanh = tanh.max(max_abs(&(lhs - rhs)));
        let lib_residual = lib(boundary::tanh_identity_residual(&x, &Grading::split(n, n), tol))?;
        tanh = tanh.max(lib_residual);
    }
    ensure(axioms < 1e-9 && formula < 1e-9, || format!("OSU axioms {axioms:.1e}, formula {formula:.1e}"))?;
    ensure(exact < 1e-12, || format!("exact lifts {exact:.1e}"))?;
    ensure(tanh < 1e-9, || format!("tanh identity {tanh:.1e}"))?;
    Ok(format!(
        "OSU axioms {axioms:.1e}, formula {formula:.1e}; exact lifts {exact:.1e}; tanh identity {tanh:.1e}"
    ))
}

/// Open SSH chain with intra-cell `t1` and inter-cell `t2`.
fn ssh_open_chain(t1: f64, t2: f64, cells: usize) -> M {
    let mut h = M::zeros(2 * cells, 2 * cells);
    for n in 0..cells {
        h[(2 * n + 1, 2 * n)] = c(t1, 0.0);
        h[(2 * n, 2 * n + 1)] = c(t1, 0.0);
        if n + 1 < cells {
            h[(2 * n + 2, 2 * n + 1)] = c(t2, 0.0);
            h[(2 * n + 1, 2 * n + 2)] = c(t2, 0.0);
        }
    }
    h
}

fn bulk_boundary(tol: &ToleranceProfile) -> Result<String, String> {
    let grid = [0.25, 0.5, 1.0, 2.0, 4.0];
    let mut gapped = 0;
    for &t1 in &grid {
        for &t2 in &grid {
            if t1 == t2 {
                continue;
            }
            gapped += 1;
            // the winding of t1 + t2 e^{ik} about the origin
            let oracle = i64::from(t2 > t1);
            let model = models::ssh_model(t1, t2);
            let hs = lib(model.halfspace(40, tol))?;
            let (gap, _) = lib(hs.bulk_gap(GAP_GRID, tol))?;
            ensure((gap - (t1 - t2).abs()).abs() < 1e-9, || format!("({t1}, {t2}): gap {gap}"))?;
            let bulk = lib(bulk_class(&lib(model.family_insulator(64, tol))?, &BulkOptions::default(), tol))?;
            let edge = lib(edge_invariants(&hs, gap, DEFAULT_MARGIN, tol))?
                .zero_modes
                .ok_or("no zero-mode data")?;
            let w = bulk.invariants.winding.ok_or("no winding")?;
            ensure(w == oracle && edge.left == oracle && edge.right == -oracle, || {
                format!("({t1}, {t2}): winding {w}, edge {}/{}, oracle {oracle}", edge.left, edge.right)
            })?;
        }
    }
    let (vals, _) = herm_eig(&ssh_open_chain(0.5, 1.0, 40));
    let oracle_zero = vals.iter().filter(|e| e.abs() < 1e-6).count();
    let oracle_in_gap = vals.iter().filter(|e| e.abs() < 0.5 * (1.0 - DEFAULT_MARGIN)).count();
    let hs = lib(models::ssh_model(0.5, 1.0).halfspace(40, tol))?;
    let e = lib(edge_invariants(&hs, 0.5, DEFAULT_MARGIN, tol))?;
    let lib_zero = e.in_gap.iter().filter(|x| x.abs() < 1e-6).count();
    ensure(oracle_zero == 2 && oracle_in_gap == 2 && e.in_gap.len() == 2 && lib_zero == 2, || {
        format!("in-gap modes: oracle {oracle_in_gap} ({oracle_zero} zero), library {:?}", e.in_gap)
    })?;
    Ok(format!("{gapped} gapped points agree; 2 in-gap modes at (0.5, 1.0), |E| <= {:.1e}", e.in_gap.iter().fold(0.0f64, |a, x| a.max(x.abs()))))
}

fn positivity(tol: &ToleranceProfile) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut worst_margin = f64::INFINITY;
    let mut worst_gap = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(2..=12);
        let u = unitary(n, &mut rng);
        let d = hermitian(n, &mut rng);
        let comm = (&d * &u - &u * &d).singular_values().max();
        let d = d.scale(rng.gen_range(0.1..1.9) / comm);
        let p = lib(pairing::kasparov_product_rep(&u, &d, tol))?;
        // generic u has no eigenvalue 1, so Ci(u) = i(u+1)(u-1)⁻¹ everywhere
        let ci = (&u + eye(n)) * inv(&(&u - eye(n))) * I;
        let ci = (&ci + ci.adjoint()).scale(0.5);
        let z = M::zeros(n, n);
        let mut op = M::zeros(2 * n, 2 * n);
        op.view_mut((0, n), (n, n)).copy_from(&(&ci - &d * I));
        op.view_mut((n, 0), (n, n)).copy_from(&(&ci + &d * I));
        let mut cc = M::zeros(2 * n, 2 * n);
        cc.view_mut((0, n), (n, n)).copy_from(&ci);
        cc.view_mut((n, 0), (n, n)).copy_from(&ci);
        let _ = z;
        let form = (&cc * &op + &op * &cc).scale(0.5) + eye(2 * n);
        let (vals, _) = herm_eig(&form);
        let oracle = vals.iter().copied().fold(f64::INFINITY, f64::min);
        worst_margin = worst_margin.min(oracle);
        worst_gap = worst_gap.max((oracle - p.positivity_margin).abs() / oracle.abs().max(1.0));
    }
    ensure(worst_margin >= -1e-10, || format!("minimum eigenvalue {worst_margin:.3e}"))?;
    ensure(worst_gap < 1e-6, || format!("library margin differs from the oracle by {worst_gap:.1e}"))?;
    // ‖[(1/i)d/dθ, v_n](1 - e^{-iθ})f‖ with the derivative by central
    // differences
    let ns = [1u32, 2, 4, 8, 16];
    let r = lib(pairing::approx_unit_check(&ns, 4096))?;
    let grid = 4096;
    let h = TAU / grid as f64;
    let tests: [&dyn Fn(f64) -> f64; 3] = [&|_| 1.0, &f64::sin, &|t: f64| (-(t - PI).powi(2) * 4.0).exp()];
    let mut mismatch = 0.0f64;
    for (row, f) in r.norms.iter().zip(tests) {
        let oracle: Vec<f64> = ns
            .iter()
            .map(|&n| {
                let v = |t: f64| {
                    let rho = 2.0 - 2.0 * t.cos();
                    rho / (rho + 1.0 / n as f64)
                };
                let s: f64 = (0..grid)
                    .map(|j| {
                        let t = (j as f64 + 0.5) * h;
                        let dv = (v(t + 1e-6) - v(t - 1e-6)) / 2e-6;
                        (dv * (c(1.0, 0.0) - Complex64::from_polar(1.0, -t)).norm() * f(t)).powi(2)
                    })
                    .sum();
                (s * h).sqrt()
            })
            .collect();
        ensure(oracle.windows(2).all(|w| w[1] < w[0]), || format!("oracle norms not decreasing: {oracle:?}"))?;
        for (a, b) in row.iter().zip(&oracle) {
            mismatch = mismatch.max((a - b).abs() / b);
        }
    }
    ensure(r.decreasing && mismatch < 1e-5, || {
        format!("library decreasing {}, relative mismatch {mismatch:.1e}", r.decreasing)
    })?;
    Ok(format!(
        "minimum eigenvalue {worst_margin:.3}; approximate-unit norms decrease on all three vectors (constant: {:.3} -> {:.3})",
        r.norms[0][0],
        r.norms[0][4]
    ))
}

/// Monomials of the generators with their degree.
fn monomials(gens: &[M]) -> Vec<(M, usize)> {
    let n = gens[0].nrows();
    (0..1usize << gens.len())
        .map(|mask| {
            let m = (0..gens.len()).filter(|j| mask >> j & 1 == 1).fold(eye(n), |acc, j| acc * &gens[j]);
            (m, mask.count_ones() as usize)
        })
        .collect()
}

fn clifford_relations(tol: &ToleranceProfile) -> Result<String, String> {
    let mut relations = 0.0f64;
    for p in 0..=6usize {
        for q in 0..=(6 - p) {
            let a = lib(clifford::build_clifford(p, q))?;
            let gamma = a.grading.gamma();
            let gens: Vec<(M, f64)> = a
                .e_gens
                .iter()
                .map(|g| (g.clone(), 1.0))
                .chain(a.f_gens.iter().map(|g| (g.clone(), -1.0)))
                .collect();
            ensure(gens.len() == p + q, || format!("Cl({p},{q}) has {} generators", gens.len()))?;
            let n = a.matrix_size();
            for (i, (g, sq)) in gens.iter().enumerate() {
                relations = relations
                    .max(max_abs(&(g * g - eye(n).scale(*sq))))
                    .max(max_abs(&(g.adjoint() - g.scale(*sq))))
                    .max(max_abs(&(gamma * g + g * gamma)));
                for (h, _) in &gens[i + 1..] {
                    relations = relations.max(max_abs(&(g * h + h * g)));
                }
            }
        }
    }
    ensure(relations < 1e-12, || format!("generator relations {relations:.1e}"))?;
    // graded tensor: Koszul rule on full monomial bases, and the embedded
    // generators of Cl(p,q) ⊗̂ Cl(r,s) satisfy the Cl(p+r, q+s) relations
    let mut koszul = 0.0f64;
    for ((p, q), (r, s)) in [((1, 1), (1, 0)), ((2, 1), (0, 2)), ((0, 3), (1, 1)), ((2, 0), (2, 0))] {
        let (a, b) = (lib(clifford::build_clifford(p, q))?, lib(clifford::build_clifford(r, s))?);
        let ga: Vec<M> = a.generators().cloned().collect();
        let gb: Vec<M> = b.generators().cloned().collect();
        let emb = |x: &M, y: &M| -> Result<M, String> {
            Ok(lib(clifford::graded_tensor(x, &a.grading, y, &b.grading, false, tol))?.embedded)
        };
        let (ma, mb) = (monomials(&ga), monomials(&gb));
        for (a1, _) in &ma {
            for (b1, db1) in &mb {
                let left = emb(a1, b1)?;
                for (a2, da2) in &ma {
                    for (b2, _) in &mb {
                        let sign = if db1 * da2 % 2 == 1 { -1.0 } else { 1.0 };
                        let lhs = &left * emb(a2, b2)?;
                        koszul = koszul.max(max_abs(&(lhs - emb(&(a1 * a2), &(b1 * b2))?.scale(sign))));
                    }
                }
            }
        }
        let (ia, ib) = (eye(a.matrix_size()), eye(b.matrix_size()));
        let mut joint = Vec::new();
        for g in &ga {
            joint.push(emb(g, &ib)?);
        }
        for g in &gb {
            joint.push(emb(&ia, g)?);
        }
        for (i, x) in joint.iter().enumerate() {
            for y in &joint[i + 1..] {
                koszul = koszul.max(max_abs(&(x * y + y * x)));
            }
        }
    }
    // η on the full basis {E_ij ⊗̂ ρ^k}
    let mut eta = 0.0f64;
    for (g, diag) in [(Grading::standard(1), vec![1.0, -1.0]), (Grading::split(2, 1), vec![1.0, 1.0, -1.0])] {
        let n = diag.len();
        let target = kron(&eye(n), &s3());
        let unit = |i: usize, j: usize| {
            let mut m = M::zeros(n, n);
            m[(i, j)] = c(1.0, 0.0);
            m
        };
        let parity = |i: usize, j: usize| usize::from(diag[i] != diag[j]);
        let basis: Vec<(usize, usize, u8)> =
            (0..n).flat_map(|i| (0..n).flat_map(move |j| (0..2u8).map(move |k| (i, j, k)))).collect();
        let mut images = Vec::new();
        for &(i, j, k) in &basis {
            let img = lib(clifford::eta(&unit(i, j), k, &g))?;
            let sign = if (parity(i, j) + k as usize).is_multiple_of(2) { 1.0 } else { -1.0 };
            eta = eta.max(max_abs(&(&target * &img * &target - img.scale(sign))));
            for &(i2, j2, l) in &basis {
                let koszul_sign = if k % 2 == 1 && parity(i2, j2) == 1 { -1.0 } else { 1.0 };
                let lhs = &img * lib(clifford::eta(&unit(i2, j2), l, &g))?;
                let rhs = lib(clifford::eta(&(unit(i, j) * unit(i2, j2)), k + l, &g))?.scale(koszul_sign);
                eta = eta.max(max_abs(&(lhs - rhs)));
            }
            images.push(img);
        }
        let stacked = M::from_fn(4 * n * n, images.len(), |r, col| images[col][(r % (2 * n), r / (2 * n))]);
        let rank = stacked.singular_values().iter().filter(|&&s| s > 1e-8).count();
        ensure(rank == 2 * n * n, || format!("η has rank {rank} on a basis of size {}", 2 * n * n))?;
        eta = eta.max(max_abs(&(lib(clifford::eta(&eye(n), 1, &g))? - kron(g.gamma(), &s1()))));
    }
    ensure(koszul < 1e-10 && eta < 1e-10, || format!("Koszul {koszul:.1e}, η {eta:.1e}"))?;
    Ok(format!("relations {relations:.1e} for p+q <= 6; Koszul {koszul:.1e}; η {eta:.1e}"))
}

fn standard_rep(b: &M, tol: &ToleranceProfile) -> Result<Osu, String> {
    let m = b.nrows();
    lib(Osu::new(kron(b, &s1()), Grading::standard(m), None, tol))
}

fn dk_kk_round_trips(tol: &ToleranceProfile) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let (mut signatures, mut windings) = (0, 0);
    for j in 0..50 {
        let (class, oracle) = if j % 5 < 3 {
            // [b_x ⊗ σ₁] - [b_y ⊗ σ₁] with R = 1 ⊗ σ₁: the signature is
            // the difference of negative counts
            let m = rng.gen_range(2..=6);
            let (nx, ny) = (rng.gen_range(0..=m), rng.gen_range(0..=m));
            let rep = |neg: usize, rng: &mut ChaCha8Rng| {
                let w = unitary(m, rng);
                let d: Vec<Complex64> = (0..m).map(|k| c(if k < neg { -1.0 } else { 1.0 }, 0.0)).collect();
                &w * M::from_diagonal(&nalgebra::DVector::from_vec(d)) * w.adjoint()
            };
            let (bx, by) = (rep(nx, &mut rng), rep(ny, &mut rng));
            let coeff = Coefficient::clifford(kron(&eye(m), &pauli::s1()));
            let class = lib(DkClass::pair(standard_rep(&bx, tol)?, standard_rep(&by, tol)?, coeff, tol))?;
            signatures += 1;
            (class, (Some(nx as i64 - ny as i64), None))
        } else {
            let (t1, t2) = loop {
                let (a, b): (f64, f64) = (rng.gen_range(0.2..2.0), rng.gen_range(0.2..2.0));
                if (a - b).abs() > 0.2 {
                    break (a, b);
                }
            };
            let ins = lib(models::ssh_model(t1, t2).family_insulator(rng.gen_range(48..=64), tol))?;
            let class = lib(bulk_class(&ins, &BulkOptions::default(), tol))?.dk.ok_or("no class")?;
            windings += 1;
            (class, (None, Some(i64::from(t2 > t1))))
        };
        let first = lib(class.invariants(tol))?;
        let cycle = lib(vandaele::dk_to_kk(&class, tol))?;
        let back = lib(vandaele::kk_to_dk(&cycle, tol))?;
        let again = lib(vandaele::kk_to_dk(&lib(vandaele::dk_to_kk(&back, tol))?, tol))?;
        for (label, inv) in [("class", first), ("dk∘kk", lib(back.invariants(tol))?), ("twice", lib(again.invariants(tol))?)] {
            let got = (inv.clifford_signature, inv.winding);
            ensure(got == oracle, || format!("class {j} ({label}): {got:?}, oracle {oracle:?}"))?;
        }
    }
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let m = rng.gen_range(1..=4);
        let e = kron(&eye(m), &s1());
        let b = hermitian(m, &mut rng);
        let t = kron(&b, &s2());
        let g = Grading::standard(m);
        let cycle = lib(FiniteKasparovCycle::new(eye(2 * m), vec![e], t, g, None, Coefficient::none(), tol))?;
        ensure(lib(cycle.is_degenerate(tol))?, || "cycle with [T, e] = 0 reported non-degenerate".into())?;
        let class = lib(vandaele::kk_to_dk(&cycle, tol))?;
        let path = lib(vandaele::certify_trivial(&class, 64, tol))?.ok_or("no path exhibited")?;
        let gamma = class.grading().gamma();
        for p in &path.points {
            worst = worst.max(osu_residual(p, gamma));
        }
        worst = worst
            .max(max_abs(&(&path.points[0] - class.x().matrix())))
            .max(max_abs(&(path.points.last().expect("sampled") - class.y().matrix())));
        // continuity: doubling the samples about halves the largest step
        let step = |pts: &[M]| pts.windows(2).map(|w| max_abs(&(&w[1] - &w[0]))).fold(0.0, f64::max);
        let fine = lib(vandaele::certify_trivial(&class, 127, tol))?.ok_or("no path exhibited")?;
        let (coarse, fine) = (step(&path.points), step(&fine.points));
        ensure(fine < 0.6 * coarse || fine < 1e-6, || format!("steps {coarse:.2e} -> {fine:.2e} do not shrink"))?;
    }
    ensure(worst < 1e-9, || format!("degenerate path residual {worst:.1e}"))?;
    Ok(format!(
        "{signatures} Clifford and {windings} family classes keep their invariants; 10 degenerate cycles joined by paths, residual {worst:.1e}"
    ))
}

fn main() {
    let tol = ToleranceProfile::default();
    let secs = Duration::from_secs;
    let criteria: Vec<(Criterion, &dyn Fn(&ToleranceProfile) -> Result<String, String>)> = vec![
        (Criterion { id: 1, name: "circle index", budget: Some(secs(10)) }, &circle_index),
        (Criterion { id: 2, name: "Bott projector", budget: Some(secs(1)) }, &bott),
        (Criterion { id: 3, name: "Cayley round trips", budget: Some(secs(30)) }, &cayley_round_trips),
        (Criterion { id: 4, name: "boundary map", budget: None }, &boundary_map),
        (Criterion { id: 5, name: "SSH bulk-boundary", budget: Some(secs(20)) }, &bulk_boundary),
        (Criterion { id: 6, name: "product positivity", budget: None }, &positivity),
        (Criterion { id: 7, name: "Clifford and graded tensor", budget: None }, &clifford_relations),
        (Criterion { id: 8, name: "DK/KK round trips", budget: None }, &dk_kk_round_trips),
    ];
    let mut failed = 0;
    for (cr, f) in criteria {
        if !report(cr, || f(&tol)) {
            failed += 1;
        }
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
