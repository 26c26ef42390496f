//! The van Daele boundary map and its Kasparov representatives on
//! half-space chains.
//!
//! A chain of `L` cells is cut open by Toeplitz compression: `h̃` keeps
//! every hopping that stays inside `[0, L)`. The ideal is modeled by the
//! mask of entries whose row and column cells both lie within `w` cells of
//! an end; [`HalfSpaceModel::ring`] is the translation-invariant reference
//! the compression must agree with off that mask.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::clifford::pauli;
use crate::error::{Error, Result};
use crate::graded::{Grading, Osu, RealStructure};
use crate::kasparov::{FiniteKasparovCycle, SymmetryData};
use crate::numkit::{self, identity, kron, max_abs, Matrix, ToleranceProfile};
use crate::vandaele::{self, Coefficient};

/// Repeat cell-level symmetry data over `copies` cells.
pub fn tile_symmetry(cell: &SymmetryData, copies: usize) -> SymmetryData {
    let ones = identity(copies);
    SymmetryData {
        real_structure: cell
            .real_structure
            .as_ref()
            .map(|r| RealStructure::from_parts_unchecked(kron(&ones, r.implementer()), r.sign())),
        grading: cell
            .grading
            .as_ref()
            .map(|g| Grading::from_gamma_unchecked(kron(&ones, g.gamma()))),
        reference: cell.reference.as_ref().map(|e| kron(&ones, e)),
        ..cell.clone()
    }
}

/// A periodic chain and its open truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpaceModel {
    cell_dim: usize,
    cells: usize,
    width: usize,
    /// `(m, T_m)` with `H_{n+m, n} = T_m`.
    hoppings: Vec<(i64, Matrix)>,
    cell_symmetry: SymmetryData,
    halfspace: Matrix,
    ring: Matrix,
}

impl HalfSpaceModel {
    /// `width` defaults to `L/4`.
    pub fn new(
        cell_dim: usize,
        hoppings: Vec<(i64, Matrix)>,
        cells: usize,
        width: Option<usize>,
        cell_symmetry: SymmetryData,
        tol: &ToleranceProfile,
    ) -> Result<Self> {
        let reach = hoppings.iter().map(|(m, _)| m.unsigned_abs() as usize).max().unwrap_or(0);
        if cells < 8 || cells <= 2 * reach {
            return Err(Error::Domain(format!(
                "need at least 8 cells and more than twice the hopping range {reach}, got {cells}"
            )));
        }
        for (m, t) in &hoppings {
            if t.shape() != (cell_dim, cell_dim) {
                return Err(Error::Shape(format!("hopping at offset {m} is not {cell_dim}x{cell_dim}")));
            }
            let partner = hoppings.iter().find(|(k, _)| *k == -m).map(|(_, b)| b);
            let residual = partner.map_or(max_abs(t), |b| max_abs(&(b - t.adjoint())));
            numkit::Check::against(residual, tol.eq_tol).into_result("hopping at -m is the adjoint of +m")?;
        }
        let width = width.unwrap_or(cells / 4).clamp(1, cells / 2);
        let n = cells * cell_dim;
        let mut halfspace = numkit::zeros(n, n);
        let mut ring = numkit::zeros(n, n);
        for (m, t) in &hoppings {
            for c in 0..cells as i64 {
                let r = c + m;
                let wrapped = r.rem_euclid(cells as i64) as usize;
                let mut rv = ring.view_mut((wrapped * cell_dim, c as usize * cell_dim), (cell_dim, cell_dim));
                rv += t;
                if (0..cells as i64).contains(&r) {
                    let mut hv =
                        halfspace.view_mut((r as usize * cell_dim, c as usize * cell_dim), (cell_dim, cell_dim));
                    hv += t;
                }
            }
        }
        Ok(Self {
            cell_dim,
            cells,
            width,
            hoppings,
            cell_symmetry,
            halfspace,
            ring,
        })
    }

    pub fn cell_dim(&self) -> usize {
        self.cell_dim
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dim(&self) -> usize {
        self.cells * self.cell_dim
    }

    pub fn hoppings(&self) -> &[(i64, Matrix)] {
        &self.hoppings
    }

    /// Truncated Hamiltonian `h̃`.
    pub fn halfspace(&self) -> &Matrix {
        &self.halfspace
    }

    /// Periodic bulk Hamiltonian on the same cells.
    pub fn ring(&self) -> &Matrix {
        &self.ring
    }

    pub fn cell_symmetry(&self) -> &SymmetryData {
        &self.cell_symmetry
    }

    /// Symmetry data on the whole chain.
    pub fn symmetry(&self) -> SymmetryData {
        tile_symmetry(&self.cell_symmetry, self.cells)
    }

    /// `h(k) = Σ_m T_m e^{-ikm}`.
    pub fn bloch(&self, k: f64) -> Matrix {
        let mut h = numkit::zeros(self.cell_dim, self.cell_dim);
        for (m, t) in &self.hoppings {
            h += t * Complex64::from_polar(1.0, -k * *m as f64);
        }
        h
    }

    fn in_layer(&self, cell: usize) -> bool {
        cell < self.width || cell >= self.cells - self.width
    }

    /// Entries whose row and column cells both lie in the boundary layer.
    pub fn ideal_mask(&self) -> Vec<Vec<bool>> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.in_layer(i / self.cell_dim) && self.in_layer(j / self.cell_dim)).collect())
            .collect()
    }

    /// Largest entry of `m` off the ideal mask.
    pub fn off_mask_norm(&self, m: &Matrix) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                if !(self.in_layer(i / self.cell_dim) && self.in_layer(j / self.cell_dim)) {
                    worst = worst.max(m[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// Deviation of `h̃` from the bulk off the mask; zero by construction.
    pub fn agreement_residual(&self) -> f64 {
        self.off_mask_norm(&(&self.halfspace - &self.ring))
    }

    /// Smallest `|λ(h(k))|` on a uniform grid, with its `k`.
    pub fn bulk_gap(&self, grid: usize, tol: &ToleranceProfile) -> Result<(f64, f64)> {
        let mut best = (f64::INFINITY, 0.0);
        for j in 0..grid.max(1) {
            let k = TAU * j as f64 / grid.max(1) as f64;
            let eig = numkit::eig_hermitian(&self.bloch(k), tol)?;
            let g = eig.eigenvalues.iter().fold(f64::INFINITY, |a, l| a.min(l.abs()));
            if g < best.0 {
                best = (g, k);
            }
        }
        Ok(best)
    }

    /// Maximum entry per cell row block of `m`, for tensor factors of size
    /// `m.nrows() / dim()` per site.
    pub fn cell_profile(&self, m: &Matrix) -> Vec<f64> {
        let per_site = m.nrows() / self.dim().max(1);
        let rows_per_cell = self.cell_dim * per_site.max(1);
        (0..self.cells)
            .map(|c| {
                let block = m.rows(c * rows_per_cell, rows_per_cell);
                block.iter().fold(0.0f64, |a, z| a.max(z.norm()))
            })
            .collect()
    }
}

/// Number of `k` samples used to certify the bulk gap.
pub const GAP_GRID: usize = 256;

/// Default fraction of `δ` excluded at the band edges when collecting
/// in-gap spectrum.
pub const DEFAULT_MARGIN: f64 = 0.05;

/// `ã = clamp(h̃/δ, -1, 1)`, equal to `h̃/δ` on the in-gap spectral
/// subspace and `±1` on the bands.
#[derive(Debug, Clone, PartialEq)]
pub struct GapLift {
    pub a: Matrix,
    pub delta: f64,
    pub t_delta: f64,
    pub margin: f64,
    /// Projection onto eigenvalues `|E| < δ(1 - margin)`.
    pub p_delta: Matrix,
    pub p_upper: Matrix,
    pub p_lower: Matrix,
    pub in_gap: Vec<f64>,
    /// Largest entry of `ã - flatten(ring)` off the ideal mask.
    pub leakage: f64,
}

impl GapLift {
    pub fn p_delta_rank(&self) -> usize {
        self.in_gap.len()
    }
}

pub fn lift_flattened(m: &HalfSpaceModel, delta: f64, margin: f64, tol: &ToleranceProfile) -> Result<GapLift> {
    if !(delta > 0.0) || !(0.0..1.0).contains(&margin) {
        return Err(Error::Domain(format!("need δ > 0 and margin in [0, 1), got {delta}, {margin}")));
    }
    let (gap, k) = m.bulk_gap(GAP_GRID, tol)?;
    if gap < delta * (1.0 - 1e-12) {
        return Err(Error::BulkGapless {
            k,
            gap,
            requested: delta,
        });
    }
    let eig = numkit::eig_hermitian(m.halfspace(), tol)?;
    let a = eig.apply(|l| (l / delta).clamp(-1.0, 1.0));
    let cut = delta * (1.0 - margin);
    let p_delta = eig.spectral_projection(|l| l.abs() < cut);
    let p_upper = eig.spectral_projection(|l| l >= cut);
    let p_lower = eig.spectral_projection(|l| l <= -cut);
    let in_gap = eig.eigenvalues.iter().copied().filter(|l| l.abs() < cut).collect();
    let bulk = numkit::mat_func_hermitian(m.ring(), f64::signum, tol)?;
    Ok(GapLift {
        leakage: m.off_mask_norm(&(&a - bulk)),
        a,
        delta,
        t_delta: PI / delta,
        margin,
        p_delta,
        p_upper,
        p_lower,
        in_gap,
    })
}

/// `x̃ ⊗̂ ρ` and `1 ⊗̂ ρ` in the twist picture, `ρ = σ₁` graded by `σ₃`.
fn rho_factors(x: &Matrix, grading: &Grading) -> (Matrix, Matrix, Grading) {
    let gamma = grading.gamma();
    let xr = kron(&(x * gamma), &pauli::s1());
    let r = kron(gamma, &pauli::s1());
    let g = Grading::from_gamma_unchecked(kron(gamma, &pauli::s3()));
    (xr, r, g)
}

fn check_lift(x: &Matrix, grading: &Grading, tol: &ToleranceProfile) -> Result<()> {
    numkit::ensure_same_shape(x, grading.gamma(), "lift")?;
    numkit::require_hermitian(x, tol)?;
    let defect = grading.odd_residual(x);
    if defect >= tol.eq_tol {
        return Err(Error::Parity { defect });
    }
    let norm = numkit::opnorm(x);
    if norm > 1.0 + tol.eq_tol {
        return Err(Error::Normalization { norm });
    }
    Ok(())
}

/// `Y = -exp(π x̃⊗̂ρ)(1⊗̂ρ)` for an odd self-adjoint lift with `‖x̃‖ ≤ 1`.
/// A real structure on the lift is carried over as `S ⊗ 1`.
pub fn vd_boundary(
    x: &Matrix,
    grading: &Grading,
    real: Option<&RealStructure>,
    tol: &ToleranceProfile,
) -> Result<Osu> {
    check_lift(x, grading, tol)?;
    let (xr, r, g) = rho_factors(x, grading);
    // x̃⊗̂ρ is skew: exp(πX) = exp(iπH) with H = -iX
    let h = &xr * Complex64::new(0.0, -1.0);
    let h = (&h + h.adjoint()).scale(0.5);
    let ex = numkit::mat_func_hermitian_complex(&h, |l| Complex64::from_polar(1.0, PI * l), tol)?;
    let y = -(ex * &r);
    let y = (&y + y.adjoint()).scale(0.5);
    let real = real.map(|s| s.tensor(&RealStructure::conjugation(2)));
    Osu::new(y, g, real, tol)
}

/// `1 ⊗̂ ρ` on the doubled space.
pub fn boundary_base_point(grading: &Grading) -> Matrix {
    kron(grading.gamma(), &pauli::s1())
}

/// `‖-(1⊗̂ρ) tanh(π x̃⊗̂ρ / 2) - tan(π x̃/2) ⊗ 1‖`, both sides evaluated
/// by independent spectral calculus.
pub fn tanh_identity_residual(x: &Matrix, grading: &Grading, tol: &ToleranceProfile) -> Result<f64> {
    check_lift(x, grading, tol)?;
    let eig = numkit::eig_hermitian(x, tol)?;
    if let Some(&l) = eig.eigenvalues.iter().find(|l| 1.0 - l.abs() < tol.kernel_tol) {
        return Err(Error::Singularity {
            eigenvalue: l,
            pole: l.signum(),
        });
    }
    let (xr, r, _) = rho_factors(x, grading);
    let h = &xr * Complex64::new(0.0, -1.0);
    let h = (&h + h.adjoint()).scale(0.5);
    // tanh(iπλ/2) = i tan(πλ/2)
    let th = numkit::mat_func_hermitian_complex(&h, |l| Complex64::new(0.0, (FRAC_PI_2 * l).tan()), tol)?;
    let lhs = -(r * th);
    let rhs = kron(&eig.apply(|l| (FRAC_PI_2 * l).tan()), &identity(2));
    Ok(max_abs(&(lhs - rhs)))
}

/// `(C, closure of cos(πx̃/2)·I, tan(πx̃/2))`: the module is spanned by the
/// eigenvectors of `x̃` with `|λ| < 1`. Eigenvalues within `eq_tol` of `±1`
/// are killed by the cosine; those between `eq_tol` and `kernel_tol` of
/// `±1` are numerically ambiguous and rejected.
pub fn boundary_cycle_unbounded(x: &Matrix, grading: &Grading, tol: &ToleranceProfile) -> Result<FiniteKasparovCycle> {
    check_lift(x, grading, tol)?;
    let eig = numkit::eig_hermitian(x, tol)?;
    let mut keep = Vec::new();
    for (j, &l) in eig.eigenvalues.iter().enumerate() {
        let d = 1.0 - l.abs();
        if d <= tol.eq_tol {
            continue;
        }
        if d < tol.kernel_tol {
            return Err(Error::Singularity {
                eigenvalue: l,
                pole: l.signum(),
            });
        }
        keep.push(j);
    }
    if keep.is_empty() {
        return Ok(FiniteKasparovCycle::empty(x.nrows()));
    }
    let basis = eig.eigenvectors.select_columns(&keep);
    // the kept span is a sum of |λ|-eigenspaces, hence Γ-invariant
    let op = numkit::compress(&eig.apply(|l| if 1.0 - l.abs() > tol.eq_tol { (FRAC_PI_2 * l).tan() } else { 0.0 }), &basis);
    let op = (&op + op.adjoint()).scale(0.5);
    FiniteKasparovCycle::new(
        basis.clone(),
        Vec::new(),
        op,
        grading.compress(&basis),
        None,
        Coefficient::none(),
        tol,
    )
}

/// `(C, I, x̃)` together with the worst axiom residual along the straight
/// line from `sin(πx̃/2)`, the bounded transform of the unbounded cycle
/// extended by its degenerate complement, to `x̃`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundedBoundary {
    pub cycle: FiniteKasparovCycle,
    pub homotopy_steps: usize,
    /// Worst of hermiticity, oddness and `‖F_s‖ - 1` over the grid.
    pub homotopy_residual: f64,
}

pub const HOMOTOPY_STEPS: usize = 16;

pub fn boundary_cycle_bounded(x: &Matrix, grading: &Grading, tol: &ToleranceProfile) -> Result<BoundedBoundary> {
    check_lift(x, grading, tol)?;
    let n = x.nrows();
    let f0 = numkit::mat_func_hermitian(x, |l| (FRAC_PI_2 * l).sin(), tol)?;
    let mut worst = 0.0f64;
    for j in 0..=HOMOTOPY_STEPS {
        let s = j as f64 / HOMOTOPY_STEPS as f64;
        let f = f0.scale(1.0 - s) + x.scale(s);
        let excess = (numkit::opnorm(&f) - 1.0).max(0.0);
        worst = worst
            .max(numkit::hermitian_residual(&f))
            .max(grading.odd_residual(&f))
            .max(excess);
    }
    let cycle = FiniteKasparovCycle::new(identity(n), Vec::new(), x.clone(), grading.clone(), None, Coefficient::none(), tol)?;
    Ok(BoundedBoundary {
        cycle,
        homotopy_steps: HOMOTOPY_STEPS,
        homotopy_residual: worst,
    })
}

/// Chiral zero modes of an odd operator, resolved by chirality and by the
/// end of the chain they sit at.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroModes {
    pub count: usize,
    /// `dim ker ∩ X₊ - dim ker ∩ X₋` over modes in the left half.
    pub left: i64,
    pub right: i64,
    pub total: i64,
    /// Centre of mass (in cells) and chirality of each mode.
    pub modes: Vec<(f64, i64)>,
}

/// Zero modes of `op` on `range(basis)` with grading `grading` in the
/// module coordinates; positions are read off the ambient chain.
pub fn zero_modes_in(
    basis: &Matrix,
    op: &Matrix,
    grading: &Grading,
    cell_dim: usize,
    zero_tol: f64,
    tol: &ToleranceProfile,
) -> Result<ZeroModes> {
    let cells = basis.nrows() / cell_dim.max(1);
    let mut out = ZeroModes {
        count: 0,
        left: 0,
        right: 0,
        total: 0,
        modes: Vec::new(),
    };
    if op.nrows() == 0 {
        return Ok(out);
    }
    let eig = numkit::eig_hermitian(op, tol)?;
    let idx: Vec<usize> = (0..eig.dim()).filter(|&j| eig.eigenvalues[j].abs() < zero_tol).collect();
    if idx.is_empty() {
        return Ok(out);
    }
    let v = eig.eigenvectors.select_columns(&idx);
    // ±E pairs inside the window span a Γ-invariant subspace
    let g = numkit::compress(grading.gamma(), &v);
    let g = (&g + g.adjoint()).scale(0.5);
    let ge = numkit::eig_hermitian(&g, tol)?;
    let ambient = basis * &v * &ge.eigenvectors;
    for (j, &chi) in ge.eigenvalues.iter().enumerate() {
        if (chi.abs() - 1.0).abs() > 1e-6 {
            return Err(Error::Structural {
                predicate: "zero-mode window invariant under the grading",
                residual: (chi.abs() - 1.0).abs(),
            });
        }
        let col = ambient.column(j);
        let com: f64 = (0..cells)
            .map(|c| c as f64 * col.rows(c * cell_dim, cell_dim).norm_squared())
            .sum();
        let sign = if chi > 0.0 { 1 } else { -1 };
        if com < (cells as f64 - 1.0) / 2.0 {
            out.left += sign;
        } else {
            out.right += sign;
        }
        out.total += sign;
        out.modes.push((com, sign));
    }
    out.count = idx.len();
    Ok(out)
}

/// Edge spectrum of a half-space model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeInvariants {
    pub delta: f64,
    pub margin: f64,
    pub in_gap: Vec<f64>,
    pub p_delta_rank: usize,
    /// Chirality-resolved zero modes, when the model is chiral.
    pub zero_modes: Option<ZeroModes>,
    pub leakage: f64,
}

/// Default zero-mode window for edge counting.
pub const ZERO_MODE_TOL: f64 = 1e-6;

pub fn edge_invariants(m: &HalfSpaceModel, delta: f64, margin: f64, tol: &ToleranceProfile) -> Result<EdgeInvariants> {
    let lift = lift_flattened(m, delta, margin, tol)?;
    let sym = m.symmetry();
    let zero_modes = match sym.grading.as_ref().filter(|_| sym.chiral) {
        Some(g) => {
            let n = m.dim();
            Some(zero_modes_in(&identity(n), m.halfspace(), g, m.cell_dim(), ZERO_MODE_TOL, tol)?)
        }
        None => None,
    };
    Ok(EdgeInvariants {
        delta,
        margin,
        p_delta_rank: lift.p_delta_rank(),
        in_gap: lift.in_gap,
        zero_modes,
        leakage: lift.leakage,
    })
}

/// Modes with `|E| < zero_tol` split by the end they sit at. Near-zero
/// pairs hybridize across the chain, so the modes are localized by
/// diagonalizing the cell position on their span first.
pub fn end_modes(m: &HalfSpaceModel, zero_tol: f64, tol: &ToleranceProfile) -> Result<(usize, usize)> {
    let eig = numkit::eig_hermitian(m.halfspace(), tol)?;
    let idx: Vec<usize> = (0..eig.dim()).filter(|&j| eig.eigenvalues[j].abs() < zero_tol).collect();
    if idx.is_empty() {
        return Ok((0, 0));
    }
    let v = eig.eigenvectors.select_columns(&idx);
    let cells: Vec<f64> = (0..m.dim()).map(|i| (i / m.cell_dim()) as f64).collect();
    let x = numkit::compress(&numkit::from_real_diag(&cells), &v);
    let centres = numkit::eig_hermitian(&(&x + x.adjoint()).scale(0.5), tol)?.eigenvalues;
    let mid = (m.cells() as f64 - 1.0) / 2.0;
    let left = centres.iter().filter(|&&c| c < mid).count();
    Ok((left, centres.len() - left))
}

/// Fraction of the bulk gap below which an edge state counts as a zero
/// mode. Paired end modes split by an amount decaying in the chain length,
/// so an absolute window misses them on moderate chains.
pub const END_MODE_FRACTION: f64 = 0.1;

/// [`end_modes`] with the window set to a fraction of the bulk gap.
pub fn gapped_end_modes(m: &HalfSpaceModel, tol: &ToleranceProfile) -> Result<(usize, usize)> {
    let (gap, k) = m.bulk_gap(GAP_GRID, tol)?;
    if gap < tol.kernel_tol {
        return Err(Error::BulkGapless {
            k,
            gap,
            requested: tol.kernel_tol,
        });
    }
    end_modes(m, END_MODE_FRACTION * gap, tol)
}

/// `(C, P_Δ I, h̃)` for a chiral model.
pub fn chiral_bounded_cycle(m: &HalfSpaceModel, lift: &GapLift, tol: &ToleranceProfile) -> Result<FiniteKasparovCycle> {
    let sym = m.symmetry();
    let g = sym
        .grading
        .filter(|_| sym.chiral)
        .ok_or_else(|| Error::Precondition("the chiral representative needs a chiral grading".into()))?;
    let basis = numkit::range_basis(&lift.p_delta, tol.rank_tol);
    if basis.ncols() == 0 {
        return Ok(FiniteKasparovCycle::empty(m.dim()));
    }
    let op = numkit::compress(m.halfspace(), &basis);
    let op = (&op + op.adjoint()).scale(0.5);
    FiniteKasparovCycle::new(basis.clone(), Vec::new(), op, g.compress(&basis), None, Coefficient::none(), tol)
}

/// Boundary of the class of a cycle: Cayley transform, lift by `rule`,
/// then the unbounded boundary cycle. The rule receives the Cayley
/// transform and returns an odd self-adjoint lift with its grading.
pub fn boundary_from_cycle<F>(cycle: &FiniteKasparovCycle, rule: F, tol: &ToleranceProfile) -> Result<FiniteKasparovCycle>
where
    F: FnOnce(&Osu) -> Result<(Matrix, Grading)>,
{
    let (e, t) = cycle.normalized_pair(tol)?;
    let x = crate::cayley::graded_cayley(&t, &e, tol)?;
    if cycle.is_degenerate(tol)? && vandaele::certify_trivial(&vandaele::kk_to_dk(cycle, tol)?, 8, tol)?.is_some() {
        return Ok(FiniteKasparovCycle::empty(x.dim()));
    }
    let (lift, grading) = rule(&x)?;
    let h = numkit::hermitian_residual(&lift);
    if h >= tol.eq_tol {
        return Err(Error::Structural {
            predicate: "lift hermitian",
            residual: h,
        });
    }
    let odd = grading.odd_residual(&lift);
    if odd >= tol.eq_tol {
        return Err(Error::Structural {
            predicate: "lift odd",
            residual: odd,
        });
    }
    boundary_cycle_unbounded(&lift, &grading, tol)
}
