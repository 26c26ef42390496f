//! Cayley transforms between self-adjoint operators and unitaries, in the
//! ungraded, graded and skew-adjoint settings.

use crate::error::{Error, Result};
use crate::graded::Osu;
use crate::numkit::{self, identity, max_abs, Matrix, ToleranceProfile, I};

/// An operator living on a subspace `range(P)` of an ambient space.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedOperator {
    /// Orthonormal basis of the subspace, as columns.
    pub basis: Matrix,
    /// Operator in the coordinates of `basis`.
    pub compressed: Matrix,
}

impl RestrictedOperator {
    pub fn empty(ambient: usize) -> Self {
        Self {
            basis: numkit::zeros(ambient, 0),
            compressed: numkit::zeros(0, 0),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Dimension of the subspace.
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Zero-dimensional domain.
    pub fn is_empty(&self) -> bool {
        self.dim() == 0
    }

    pub fn projector(&self) -> Matrix {
        &self.basis * self.basis.adjoint()
    }

    /// `Q·op·Q*`, the operator extended by zero to the ambient space.
    pub fn lift(&self) -> Matrix {
        &self.basis * &self.compressed * self.basis.adjoint()
    }

    /// Compress an ambient operator to the same subspace.
    pub fn compress(&self, op: &Matrix) -> Matrix {
        numkit::compress(op, &self.basis)
    }
}

/// Orthonormal basis of `range(m)` for `m` normal with norm of order one;
/// singular values at most `cutoff` are discarded.
fn normal_range_basis(m: &Matrix, cutoff: f64) -> Matrix {
    let s = numkit::svd(m);
    let r = s.rank_above(cutoff);
    s.u.columns(0, r).into_owned()
}

/// Range basis computed block by block for a block-diagonal `m` with the
/// given block sizes. Returns the basis and the rank of every block.
pub fn block_range_basis(m: &Matrix, blocks: &[usize], cutoff: f64) -> Result<(Matrix, Vec<usize>)> {
    let n = numkit::ensure_square(m)?;
    if blocks.iter().sum::<usize>() != n {
        return Err(Error::Shape(format!(
            "block sizes sum to {}, matrix is {n}x{n}",
            blocks.iter().sum::<usize>()
        )));
    }
    let mut parts = Vec::with_capacity(blocks.len());
    let mut ranks = Vec::with_capacity(blocks.len());
    let mut offset = 0;
    for &b in blocks {
        let sub = m.view((offset, offset), (b, b)).into_owned();
        let q = normal_range_basis(&sub, cutoff);
        ranks.push(q.ncols());
        parts.push((offset, q));
        offset += b;
    }
    let r: usize = ranks.iter().sum();
    let mut basis = numkit::zeros(n, r);
    let mut col = 0;
    for (off, q) in parts {
        basis.view_mut((off, col), (q.nrows(), q.ncols())).copy_from(&q);
        col += q.ncols();
    }
    Ok((basis, ranks))
}

fn require_unitary(v: &Matrix, tol: &ToleranceProfile) -> Result<usize> {
    let n = numkit::ensure_square(v)?;
    numkit::ensure_finite(v)?;
    numkit::is_unitary(v, tol).into_result("unitary")?;
    Ok(n)
}

/// `Cd(T) = (T+i)(T-i)⁻¹`.
pub fn cayley(t: &Matrix, tol: &ToleranceProfile) -> Result<Matrix> {
    let n = numkit::require_hermitian(t, tol)?;
    let shift = numkit::scalar(n, I);
    let inv = numkit::inverse(&(t - &shift))?;
    Ok((t + &shift) * inv)
}

/// `Ci(V) = i(V+1)(V-1)⁻¹` on `range(V-1)`.
pub fn cayley_inv(v: &Matrix, tol: &ToleranceProfile) -> Result<RestrictedOperator> {
    let n = require_unitary(v, tol)?;
    let one = identity(n);
    let basis = normal_range_basis(&(v - &one), tol.rank_tol);
    if basis.ncols() == 0 {
        return Ok(RestrictedOperator::empty(n));
    }
    let vr = numkit::compress(v, &basis);
    let r = vr.nrows();
    let inv = numkit::inverse(&(&vr - identity(r)))?;
    let compressed = (&vr + identity(r)) * inv * I;
    Ok(RestrictedOperator { basis, compressed })
}

/// Residual of `Te + eT = 0`.
pub fn anticommutation_residual(t: &Matrix, e: &Osu) -> f64 {
    e.anticommutation_residual(t)
}

fn require_admissible(t: &Matrix, e: &Osu, tol: &ToleranceProfile) -> Result<()> {
    numkit::ensure_same_shape(t, e.matrix(), "graded_cayley")?;
    numkit::require_hermitian(t, tol)?;
    let res = anticommutation_residual(t, e);
    let scale = max_abs(t).max(1.0);
    if res >= tol.eq_tol * scale {
        return Err(Error::Precondition(format!(
            "operator does not anti-commute with the base point (residual {res:.3e}); \
             apply perturbation_average first"
        )));
    }
    Ok(())
}

/// `‖T^𝔯 - T‖` when the base point carries a real structure.
pub fn real_defect(t: &Matrix, e: &Osu) -> Option<f64> {
    e.real_structure().map(|r| r.residual(t, 1.0))
}

/// `C_e(T) = e(T+e)(T-e)⁻¹` for odd self-adjoint `T` anti-commuting with `e`.
/// The output carries the base point's grading; the real structure is kept
/// only when `T` is real.
pub fn graded_cayley(t: &Matrix, e: &Osu, tol: &ToleranceProfile) -> Result<Osu> {
    require_admissible(t, e, tol)?;
    let eu = e.matrix();
    let inv = numkit::inverse(&(t - eu))?;
    let u = eu * (t + eu) * inv;
    let u = (&u + u.adjoint()).scale(0.5);
    let real = match real_defect(t, e) {
        Some(d) if d < tol.eq_tol * max_abs(t).max(1.0) => e.real_structure().cloned(),
        _ => None,
    };
    Osu::new(u, e.grading().clone(), real, tol)
}

/// `Ci_e(U) = e(U+e)(U-e)⁻¹` on `range(U-e)`.
pub fn graded_cayley_inv(u: &Osu, e: &Osu, tol: &ToleranceProfile) -> Result<RestrictedOperator> {
    graded_cayley_inv_blocks(u, e, None, tol)
}

/// As [`graded_cayley_inv`], with the domain basis computed block by block
/// when `U` and `e` are block diagonal.
pub fn graded_cayley_inv_blocks(
    u: &Osu,
    e: &Osu,
    blocks: Option<&[usize]>,
    tol: &ToleranceProfile,
) -> Result<RestrictedOperator> {
    if u.grading() != e.grading() {
        return Err(Error::Composition(
            "OSU and base point carry different gradings".into(),
        ));
    }
    let n = u.dim();
    let eu = e.matrix();
    let diff = u.matrix() - eu;
    let basis = match blocks {
        Some(b) => block_range_basis(&diff, b, tol.rank_tol)?.0,
        None => normal_range_basis(&diff, tol.rank_tol),
    };
    if basis.ncols() == 0 {
        return Ok(RestrictedOperator::empty(n));
    }
    let dr = numkit::compress(&diff, &basis);
    let inv = numkit::inverse(&dr)?;
    let num = numkit::compress(&(eu * (u.matrix() + eu)), &basis);
    let compressed = num * inv;
    let compressed = (&compressed + compressed.adjoint()).scale(0.5);
    Ok(RestrictedOperator { basis, compressed })
}

/// `U = (T₊+1)(T₊-1)⁻¹` for skew-adjoint `T₊`.
pub fn skew_cayley(t: &Matrix, tol: &ToleranceProfile) -> Result<Matrix> {
    let n = numkit::ensure_square(t)?;
    numkit::ensure_finite(t)?;
    let res = numkit::skew_residual(t);
    numkit::Check::against(res, tol.eq_tol * max_abs(t).max(1.0)).into_result("skew-adjoint")?;
    let one = identity(n);
    let inv = numkit::inverse(&(t - &one))?;
    Ok((t + &one) * inv)
}

/// `(U+1)(U-1)⁻¹` on `range(U-1)`, skew-adjoint there.
pub fn skew_cayley_inv(u: &Matrix, tol: &ToleranceProfile) -> Result<RestrictedOperator> {
    let n = require_unitary(u, tol)?;
    let one = identity(n);
    let basis = normal_range_basis(&(u - &one), tol.rank_tol);
    if basis.ncols() == 0 {
        return Ok(RestrictedOperator::empty(n));
    }
    let ur = numkit::compress(u, &basis);
    let r = ur.nrows();
    let inv = numkit::inverse(&(&ur - identity(r)))?;
    Ok(RestrictedOperator {
        basis,
        compressed: (&ur + identity(r)) * inv,
    })
}

/// Largest difference quotient `‖C_e(T_a)-C_e(T_b)‖/|a-b|` along the linear
/// path between two admissible operators, sampled on `points` grid points.
pub fn graded_cayley_lipschitz(
    t0: &Matrix,
    t1: &Matrix,
    e: &Osu,
    points: usize,
    tol: &ToleranceProfile,
) -> Result<f64> {
    if points < 2 {
        return Err(Error::Domain("need at least two grid points".into()));
    }
    let h = 1.0 / (points - 1) as f64;
    let mut prev = graded_cayley(t0, e, tol)?.into_matrix();
    let mut worst = 0.0f64;
    for k in 1..points {
        let s = k as f64 * h;
        let t = t0.scale(1.0 - s) + t1.scale(s);
        let cur = graded_cayley(&t, e, tol)?.into_matrix();
        worst = worst.max(numkit::opnorm(&(&cur - &prev)) / h);
        prev = cur;
    }
    Ok(worst)
}
