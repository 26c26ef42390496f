//! The commands behind the CLI. Each fills a [`Report`] and a [`Table`]
//! for CSV output; errors propagate to the caller, which records them.

use std::f64::consts::TAU;

use serde_json::json;

use super::config::RunConfig;
use super::report::{num, opt, IntegerInvariant, Report, Table};
use super::suites;
use crate::boundary::{self, edge_invariants, lift_flattened, zero_modes_in, HalfSpaceModel, DEFAULT_MARGIN, GAP_GRID};
use crate::error::{Error, Result};
use crate::kasparov::{bulk_class, BulkOptions, SymmetryResiduals};
use crate::models::{self, TightBindingModel};
use crate::numkit::{self, ToleranceProfile};
use crate::pairing;

/// Largest chain, momentum grid and circle truncation accepted.
pub const MAX_CELLS: usize = 400;
pub const MAX_MOMENTA: usize = 1024;
pub const MAX_CIRCLE: usize = 256;

const DEFAULT_CELLS: usize = 40;
const DEFAULT_MOMENTA: usize = 64;
const DEFAULT_CIRCLE: usize = 32;
const DEFAULT_BAND_SAMPLES: usize = 128;

/// Below this bulk gap a parameter point counts as gapless.
pub const GAPLESS_BELOW: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Chain {
    Ssh,
    Kitaev,
}

fn capped(value: Option<usize>, default: usize, limit: usize, min: usize, what: &str) -> Result<usize> {
    let v = value.unwrap_or(default);
    if v > limit {
        return Err(Error::Capacity { requested: v, limit });
    }
    if v < min {
        return Err(Error::Domain(format!("{what} must be at least {min}, got {v}")));
    }
    Ok(v)
}

fn model_name(cfg: &RunConfig) -> Result<&str> {
    cfg.model
        .as_deref()
        .ok_or_else(|| Error::Domain("no model given; pass --model".into()))
}

/// Builds the chain model and writes the parameters it used back into
/// the config so the report echoes them.
fn chain(cfg: &mut RunConfig) -> Result<(Chain, TightBindingModel)> {
    match model_name(cfg)? {
        "ssh" => {
            let t1 = *cfg.t1.get_or_insert(0.5);
            let t2 = *cfg.t2.get_or_insert(1.0);
            Ok((Chain::Ssh, models::ssh_model(t1, t2)))
        }
        "kitaev" => {
            let mu = *cfg.mu.get_or_insert(0.5);
            let t = *cfg.t.get_or_insert(1.0);
            let delta = *cfg.delta.get_or_insert(1.0);
            Ok((Chain::Kitaev, models::kitaev_chain(mu, t, delta)))
        }
        "circle" => Err(Error::Domain("the circle model is only available to `product`".into())),
        other => Err(Error::Domain(format!("unknown model `{other}`; expected ssh, kitaev or circle"))),
    }
}

fn cells(cfg: &mut RunConfig) -> Result<usize> {
    let l = capped(cfg.cells, DEFAULT_CELLS, MAX_CELLS, 8, "L")?;
    cfg.cells = Some(l);
    Ok(l)
}

/// Bulk gap on the certification grid; a closed gap is an error.
fn gapped(hs: &HalfSpaceModel, tol: &ToleranceProfile) -> Result<f64> {
    let (gap, k) = hs.bulk_gap(GAP_GRID, tol)?;
    if gap < GAPLESS_BELOW {
        return Err(Error::BulkGapless {
            k,
            gap,
            requested: GAPLESS_BELOW,
        });
    }
    Ok(gap)
}

fn symmetry_residuals(report: &mut Report, prefix: &str, r: SymmetryResiduals) {
    for (name, v) in [("trs", r.trs), ("phs", r.phs), ("chiral", r.chiral)] {
        if let Some(v) = v {
            report.residual(&format!("{prefix}_{name}"), v);
        }
    }
}

/// `det Q₋* h(k) Q₊` on a uniform grid, normalized to phases.
fn chiral_phases(model: &TightBindingModel, samples: usize, tol: &ToleranceProfile) -> Result<Vec<numkit::Vector>> {
    let g = model
        .symmetry
        .grading
        .as_ref()
        .filter(|_| model.symmetry.chiral)
        .ok_or_else(|| Error::Precondition("the model has no chiral grading".into()))?;
    let split = g.split_bases(None, tol)?;
    if split.plus.ncols() != split.minus.ncols() {
        return Err(Error::Precondition("unbalanced chiral grading".into()));
    }
    Ok((0..samples)
        .map(|j| {
            let h = model.bloch(TAU * j as f64 / samples as f64);
            let d = (split.minus.adjoint() * h * &split.plus).determinant();
            numkit::Vector::from_element(1, d)
        })
        .collect())
}

fn bloch_winding(model: &TightBindingModel, samples: usize, tol: &ToleranceProfile) -> Result<i64> {
    let dets: Vec<_> = chiral_phases(model, samples, tol)?.iter().map(|v| v[0]).collect();
    pairing::winding_of_phases(&dets)
}

fn end_parity(model: &TightBindingModel, cells: usize, tol: &ToleranceProfile) -> Result<(i64, usize, usize)> {
    let hs = model.halfspace(cells, tol)?;
    let (left, right) = boundary::gapped_end_modes(&hs, tol)?;
    Ok((if left % 2 == 1 { -1 } else { 1 }, left, right))
}

pub fn invariant(cfg: &mut RunConfig, report: &mut Report) -> Result<Table> {
    let (kind, model) = chain(cfg)?;
    let tol = cfg.tol;
    let l = cells(cfg)?;
    let n = capped(cfg.n, DEFAULT_MOMENTA, MAX_MOMENTA, 8, "N")?;
    cfg.n = Some(n);
    let hs = model.halfspace(l, &tol)?;
    let gap = gapped(&hs, &tol)?;
    report.residual("bulk_gap", gap);
    let checks = model.verify(DEFAULT_BAND_SAMPLES, &tol)?;
    report.residual("hopping_hermiticity", checks.hopping_hermiticity);
    report.residual("bloch_hermiticity", checks.bloch_hermiticity);
    report.residual("declared_symmetry", checks.symmetry);
    // particle-hole symmetry pairs k with -k, so it acts on the ring and
    // not blockwise on the Bloch family
    let ins = match kind {
        Chain::Ssh => model.family_insulator(n, &tol)?,
        Chain::Kitaev => model.ring_insulator(n, &tol)?,
    };
    symmetry_residuals(report, "flattened", ins.flattened_residuals());
    let bulk = bulk_class(&ins, &BulkOptions::default(), &tol)?;
    let diag = bulk.cycle.diagnostics(&tol);
    report.residual("cycle_op_hermitian", diag.op_hermitian);
    report.residual("cycle_op_odd", diag.op_odd);
    report.residual("cycle_anticommutation", diag.anticommutation);
    if let Some(r) = bulk.reality_residual {
        report.residual("reduced_reality", r);
    }
    let mut table = Table::new(&["invariant", "method", "value"]);
    match kind {
        Chain::Ssh => {
            let mut methods = vec![("bloch_determinant", bloch_winding(&model, n, &tol)?)];
            if let Some(w) = bulk.invariants.winding {
                methods.push(("reduced_unitary", w));
            }
            if let Some(w) = bulk.invariants.class.and_then(|c| c.winding) {
                methods.push(("van_daele_class", w));
            }
            report.invariant("winding", IntegerInvariant::from_methods(methods));
        }
        Chain::Kitaev => {
            let (parity, _, _) = end_parity(&model, l, &tol)?;
            let methods = vec![("pfaffian", model.majorana_number(&tol)?), ("end_mode_parity", parity)];
            report.invariant("majorana_number", IntegerInvariant::from_methods(methods));
        }
    }
    for (name, inv) in &report.invariants {
        for (method, v) in &inv.methods {
            table.push(vec![name.clone(), method.clone(), v.to_string()]);
        }
    }
    report.data = Some(json!({
        "class": bulk.class.label(),
        "target_group": bulk.class.target_group(),
    }));
    Ok(table)
}

pub fn boundary(cfg: &mut RunConfig, report: &mut Report) -> Result<Table> {
    let (kind, model) = chain(cfg)?;
    let tol = cfg.tol;
    let l = cells(cfg)?;
    let margin = *cfg.margin.get_or_insert(DEFAULT_MARGIN);
    let hs = model.halfspace(l, &tol)?;
    let gap = gapped(&hs, &tol)?;
    let edge = edge_invariants(&hs, gap, margin, &tol)?;
    let lift = lift_flattened(&hs, gap, margin, &tol)?;
    let bulk_flat = numkit::mat_func_hermitian(hs.ring(), f64::signum, &tol)?;
    let profile = hs.cell_profile(&(&lift.a - bulk_flat));
    report.residual("bulk_gap", gap);
    report.residual("leakage", edge.leakage);
    report.residual("mask_agreement", hs.agreement_residual());
    report.invariant(
        "in_gap_modes",
        IntegerInvariant::from_methods([("spectral_window", edge.p_delta_rank as i64)]),
    );
    let mut data = json!({
        "in_gap": edge.in_gap,
        "leakage_profile": profile,
    });
    match kind {
        Chain::Ssh => {
            let g = hs.symmetry().grading.expect("chiral model");
            let z = edge.zero_modes.clone().expect("chiral model");
            let y = boundary::vd_boundary(&lift.a, &g, None, &tol)?;
            report.residual("boundary_osu", y.diagnostics(&tol).worst());
            let cycle = boundary::boundary_cycle_unbounded(&lift.a, &g, &tol)?;
            let zc = zero_modes_in(cycle.basis(), cycle.op(), cycle.grading(), hs.cell_dim(), 1e-4, &tol)?;
            let n = capped(cfg.n, DEFAULT_MOMENTA, MAX_MOMENTA, 8, "N")?;
            cfg.n = Some(n);
            let w = bloch_winding(&model, n, &tol)?;
            report.invariant(
                "left_signed_count",
                IntegerInvariant::from_methods([
                    ("halfspace_zero_modes", z.left),
                    ("unbounded_boundary_cycle", zc.left),
                    ("bulk_winding", w),
                ]),
            );
            report.invariant(
                "right_signed_count",
                IntegerInvariant::from_methods([
                    ("halfspace_zero_modes", z.right),
                    ("unbounded_boundary_cycle", zc.right),
                    ("minus_bulk_winding", -w),
                ]),
            );
            data["zero_modes"] = json!(z.modes);
        }
        Chain::Kitaev => {
            let (parity, left, right) = end_parity(&model, l, &tol)?;
            report.invariant("left_end_modes", IntegerInvariant::from_methods([("end_modes", left as i64)]));
            report.invariant("right_end_modes", IntegerInvariant::from_methods([("end_modes", right as i64)]));
            report.invariant(
                "majorana_number",
                IntegerInvariant::from_methods([("end_mode_parity", parity), ("pfaffian", model.majorana_number(&tol)?)]),
            );
        }
    }
    report.data = Some(data);
    let mut table = Table::new(&["cell", "leakage"]);
    for (c, p) in profile.iter().enumerate() {
        table.push(vec![c.to_string(), num(*p)]);
    }
    Ok(table)
}

pub fn product(cfg: &mut RunConfig, report: &mut Report) -> Result<Table> {
    match model_name(cfg)? {
        "circle" => {}
        other => return Err(Error::Domain(format!("`product` supports the circle model, got `{other}`"))),
    }
    let tol = cfg.tol;
    let n = capped(cfg.n, DEFAULT_CIRCLE, MAX_CIRCLE, 4, "N")?;
    cfg.n = Some(n);
    let ct = models::circle_spectral_triple(n)?;
    let idx = pairing::index_pairing(&ct.u, &ct.d, &tol)?;
    report.invariant(
        "index",
        IntegerInvariant::from_methods([("spectral_flow", idx.spectral_flow), ("kernel", idx.kernel)]),
    );
    // the cyclic closure makes ‖[D,u]‖ = 2N; rescale below 2
    let scale = 1.9 / (2.0 * n as f64);
    let prod = pairing::kasparov_product_rep(&ct.u, &ct.d.scale(scale), &tol)?;
    report.residual("positivity_margin", prod.positivity_margin);
    report.residual("commutator_norm", prod.commutator_norm);
    report.residual("operator_scale", scale);
    let diag = prod.cycle.diagnostics(&tol);
    report.residual("product_op_hermitian", diag.op_hermitian);
    report.residual("product_op_odd", diag.op_odd);
    let s = numkit::singular_values(&prod.lower_left);
    report.residual("lower_left_smallest_singular", s.first().copied().unwrap_or(0.0));
    report.residual("lower_left_second_singular", s.get(1).copied().unwrap_or(0.0));
    report.data = Some(json!({
        "shift": idx.shift,
        "window_dim": idx.window_dim,
        "kernel_vectors": idx.kernel_vectors,
        "cokernel_vectors": idx.cokernel_vectors,
        "crossings": idx.crossings,
    }));
    let mut table = Table::new(&["t", "sign"]);
    for c in &idx.crossings {
        table.push(vec![num(c.t), c.sign.to_string()]);
    }
    Ok(table)
}

/// Band energies and, for chiral models, the phase of `det Q₋*h(k)Q₊`.
pub fn bands(cfg: &mut RunConfig, report: &mut Report) -> Result<Table> {
    let (kind, model) = chain(cfg)?;
    let tol = cfg.tol;
    let n = capped(cfg.n, DEFAULT_BAND_SAMPLES, MAX_MOMENTA, 8, "N")?;
    cfg.n = Some(n);
    let d = model.cell_dim;
    let mut header: Vec<String> = vec!["k".into()];
    header.extend((0..d).map(|j| format!("e{j}")));
    let phases = match kind {
        Chain::Ssh => {
            header.push("phase".into());
            Some(chiral_phases(&model, n, &tol)?)
        }
        Chain::Kitaev => None,
    };
    let mut table = Table {
        header,
        rows: Vec::new(),
    };
    let mut gap = f64::INFINITY;
    for j in 0..n {
        let k = TAU * j as f64 / n as f64;
        let eig = numkit::eig_hermitian(&model.bloch(k), &tol)?;
        gap = eig.eigenvalues.iter().fold(gap, |a, l| a.min(l.abs()));
        let mut row = vec![num(k)];
        row.extend(eig.eigenvalues.iter().map(|e| num(*e)));
        if let Some(p) = &phases {
            row.push(num(p[j][0].arg()));
        }
        table.push(row);
    }
    report.residual("sampled_gap", gap);
    if let Chain::Ssh = kind {
        let dets: Vec<_> = phases.expect("chiral").iter().map(|v| v[0]).collect();
        if gap >= GAPLESS_BELOW {
            report.invariant(
                "winding",
                IntegerInvariant::from_methods([("bloch_determinant", pairing::winding_of_phases(&dets)?)]),
            );
        }
    }
    report.data = Some(json!({ "header": table.header, "rows": table.rows }));
    Ok(table)
}

/// One row of a phase diagram.
#[derive(Debug, Clone, PartialEq)]
struct SweepRow {
    p1: f64,
    p2: f64,
    gap: f64,
    bulk: Option<i64>,
    edge: Option<i64>,
}

fn sweep_point(kind: Chain, p1: f64, p2: f64, delta: f64, l: usize, n: usize, tol: &ToleranceProfile) -> Result<SweepRow> {
    let model = match kind {
        Chain::Ssh => models::ssh_model(p1, p2),
        Chain::Kitaev => models::kitaev_chain(p1, p2, delta),
    };
    let hs = model.halfspace(l, tol)?;
    let (gap, _) = hs.bulk_gap(GAP_GRID, tol)?;
    let mut row = SweepRow {
        p1,
        p2,
        gap,
        bulk: None,
        edge: None,
    };
    if gap < GAPLESS_BELOW {
        return Ok(row);
    }
    match kind {
        Chain::Ssh => {
            let (w, left) = suites::ssh_point(p1, p2, l, n, tol)?.expect("gapped");
            row.bulk = Some(w);
            row.edge = Some(left);
        }
        Chain::Kitaev => {
            row.bulk = Some(model.majorana_number(tol)?);
            row.edge = Some(end_parity(&model, l, tol)?.0);
        }
    }
    Ok(row)
}

/// Bulk invariant against its edge counterpart over a parameter grid.
/// Rows of the grid run on separate threads.
pub fn sweep(cfg: &mut RunConfig, report: &mut Report) -> Result<Table> {
    let (kind, _) = chain(cfg)?;
    let tol = cfg.tol;
    let l = cells(cfg)?;
    let n = capped(cfg.n, DEFAULT_MOMENTA, MAX_MOMENTA, 8, "N")?;
    cfg.n = Some(n);
    let grid = cfg.grid.get_or_insert_with(|| suites::SSH_GRID.to_vec()).clone();
    if grid.len() > 32 {
        return Err(Error::Capacity {
            requested: grid.len(),
            limit: 32,
        });
    }
    let delta = cfg.delta.unwrap_or(1.0);
    let rows: Vec<Result<Vec<SweepRow>>> = std::thread::scope(|s| {
        let handles: Vec<_> = grid
            .iter()
            .map(|&p1| {
                let grid = &grid;
                s.spawn(move || grid.iter().map(|&p2| sweep_point(kind, p1, p2, delta, l, n, &tol)).collect())
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let (names, bulk_name, edge_name) = match kind {
        Chain::Ssh => (["t1", "t2"], "winding", "left_signed_count"),
        Chain::Kitaev => (["mu", "t"], "majorana_number", "end_mode_parity"),
    };
    let mut table = Table::new(&[names[0], names[1], "gap", bulk_name, edge_name, "agree"]);
    let (mut gapped, mut mismatched) = (0i64, Vec::new());
    for row in rows {
        for r in row? {
            let agree = match (r.bulk, r.edge) {
                (Some(b), Some(e)) => {
                    gapped += 1;
                    if b != e {
                        mismatched.push(format!("({}, {})", r.p1, r.p2));
                    }
                    (b == e).to_string()
                }
                _ => String::new(),
            };
            table.push(vec![num(r.p1), num(r.p2), num(r.gap), opt(r.bulk), opt(r.edge), agree]);
        }
    }
    report.invariant("gapped_points", IntegerInvariant::from_methods([("bulk_gap", gapped)]));
    report.invariant(
        "mismatched_points",
        IntegerInvariant::from_methods([("bulk_vs_edge", mismatched.len() as i64)]),
    );
    if !mismatched.is_empty() {
        report.status.ok = false;
        report
            .status
            .failures
            .push(format!("bulk and edge invariants differ at {}", mismatched.join(", ")));
    }
    report.data = Some(json!({ "header": table.header, "rows": table.rows }));
    Ok(table)
}

pub fn verify(suite: &str, cfg: &mut RunConfig, report: &mut Report) -> Result<Table> {
    let reports = suites::run(suite, cfg.seed, &cfg.tol)?;
    let mut table = Table::new(&["suite", "check", "passed", "value", "limit"]);
    for r in reports {
        for c in &r.checks {
            report.residual(&format!("{}.{}", r.name, c.name), c.value);
            table.push(vec![r.name.clone(), c.name.clone(), c.passed.to_string(), num(c.value), num(c.limit)]);
        }
        report.suite(r);
    }
    Ok(table)
}
