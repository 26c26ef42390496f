//! Benchmark models: the truncated circle, the cot-potential product
//! operator, the line generator, the Bott plane, and SSH and Kitaev chains.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::boundary::{tile_symmetry, HalfSpaceModel};
use crate::cayley;
use crate::clifford::pauli;
use crate::error::{Error, Result};
use crate::graded::{Grading, RealStructure};
use crate::kasparov::{self, Insulator, SymmetryData};
use crate::numkit::{self, c, identity, max_abs, Matrix, ToleranceProfile, Vector};
use crate::pairing::UnitaryLoop;

/// `D = diag(-N..N)` in the Fourier basis and `u = e^{-iθ}` as the cyclic
/// shift `e_k ↦ e_{k-1}`. The column `k = -N` wraps to `k = N`; it is the
/// only place where `uDu* = D + 1` fails.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleTriple {
    pub n: usize,
    pub d: Matrix,
    pub u: Matrix,
    /// Basis indices where the shift identity is not exact.
    pub edge_rows: Vec<usize>,
}

pub fn circle_spectral_triple(n: usize) -> Result<CircleTriple> {
    if n < 4 {
        return Err(Error::Domain(format!("circle truncation needs N ≥ 4, got {n}")));
    }
    let dim = 2 * n + 1;
    let ks: Vec<f64> = (0..dim).map(|j| j as f64 - n as f64).collect();
    let d = numkit::from_real_diag(&ks);
    let mut u = numkit::zeros(dim, dim);
    for j in 0..dim {
        u[((j + dim - 1) % dim, j)] = c(1.0, 0.0);
    }
    Ok(CircleTriple {
        n,
        d,
        u,
        // uDu* e_j = k(j+1) e_j, which wraps at the top mode
        edge_rows: vec![dim - 1],
    })
}

/// Staggered Dirichlet discretization of `d/dθ - cot(θ/2)` on `(0, 2π)`:
/// unknowns at the `M-1` interior nodes, equations at the `M` cell
/// midpoints. `adjoint_side` discretizes `d/dθ + cot(θ/2)`, whose kernel
/// candidate `sin(θ/2)^{-2}` is not square-summable.
#[derive(Debug, Clone, PartialEq)]
pub struct CotOperator {
    pub grid: usize,
    pub d_plus: Matrix,
    pub adjoint_side: Matrix,
    /// `sin²(θ/2)` at the interior nodes.
    pub kernel_candidate: Vector,
    /// `‖D₊ y‖ / ‖y‖` for the candidate.
    pub residual: f64,
}

fn cot_matrix(m: usize, sign: f64) -> Matrix {
    let h = TAU / m as f64;
    let mut a = numkit::zeros(m, m - 1);
    for i in 0..m {
        let cot = 1.0 / ((i as f64 + 0.5) * h / 2.0).tan();
        if i >= 1 {
            a[(i, i - 1)] += c(-1.0 / h + sign * cot / 2.0, 0.0);
        }
        if i < m - 1 {
            a[(i, i)] += c(1.0 / h + sign * cot / 2.0, 0.0);
        }
    }
    a
}

pub fn cot_product_operator(grid: usize) -> Result<CotOperator> {
    if grid < 64 {
        return Err(Error::Domain(format!("cot discretization needs at least 64 cells, got {grid}")));
    }
    let h = TAU / grid as f64;
    let d_plus = cot_matrix(grid, -1.0);
    let y = Vector::from_iterator(grid - 1, (1..grid).map(|j| c((j as f64 * h / 2.0).sin().powi(2), 0.0)));
    let residual = (&d_plus * &y).norm() / y.norm();
    Ok(CotOperator {
        grid,
        adjoint_side: cot_matrix(grid, 1.0),
        d_plus,
        kernel_candidate: y,
        residual,
    })
}

/// Samples of `u(x) = e^{-2i·atan(x) + iπ}` at `x = tan((k - π)/2)` for
/// `k` on a midpoint grid of `n` angles, keeping `|x| ≤ cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineGenerator {
    pub xs: Vec<f64>,
    pub samples: UnitaryLoop,
}

impl LineGenerator {
    /// `max |Ci(u(x)) - x| / max(1, |x|)` over the samples.
    pub fn cayley_residual(&self, tol: &ToleranceProfile) -> Result<f64> {
        let mut worst = 0.0f64;
        for (x, u) in self.xs.iter().zip(self.samples.samples()) {
            let ci = cayley::cayley_inv(u, tol)?;
            worst = worst.max((ci.compressed[(0, 0)] - c(*x, 0.0)).norm() / x.abs().max(1.0));
        }
        Ok(worst)
    }
}

pub fn real_line_generator(n: usize, cutoff: f64, tol: &ToleranceProfile) -> Result<LineGenerator> {
    if n < 8 || !(cutoff > 1.0) {
        return Err(Error::Domain("need at least eight angles and a cutoff above 1".into()));
    }
    let mut xs = Vec::with_capacity(n);
    let mut grid = Vec::with_capacity(n);
    for j in 0..n {
        let k = TAU * (j as f64 + 0.5) / n as f64;
        let x = ((k - PI) / 2.0).tan();
        if x.abs() <= cutoff {
            xs.push(x);
            grid.push(k);
        }
    }
    let samples = xs
        .iter()
        .map(|x| Matrix::from_element(1, 1, Complex64::from_polar(1.0, -2.0 * x.atan() + PI)))
        .collect();
    Ok(LineGenerator {
        xs,
        samples: UnitaryLoop::new(samples, grid, tol)?,
    })
}

/// One point of the Bott plane: `T = [[0, x - iy], [x + iy, 0]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BottSample {
    pub x: f64,
    pub y: f64,
    pub t: Matrix,
}

/// `grid × grid` samples of `[-extent, extent]²`.
pub fn bott_plane(grid: usize, extent: f64) -> Result<Vec<BottSample>> {
    if grid < 2 || !(extent > 0.0) {
        return Err(Error::Domain("need grid ≥ 2 and a positive extent".into()));
    }
    let at = |j: usize| -extent + 2.0 * extent * j as f64 / (grid - 1) as f64;
    let mut out = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        for j in 0..grid {
            let (x, y) = (at(i), at(j));
            let t = numkit::from_rows(&[&[c(0.0, 0.0), c(x, -y)], &[c(x, y), c(0.0, 0.0)]]);
            out.push(BottSample { x, y, t });
        }
    }
    Ok(out)
}

/// Translation-invariant chain: `H_{n+m, n} = T_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct TightBindingModel {
    pub name: String,
    pub cell_dim: usize,
    pub hoppings: BTreeMap<i64, Matrix>,
    /// Symmetries of one cell; tiled over the chain.
    pub symmetry: SymmetryData,
}

/// Residuals of the model checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelResiduals {
    pub hopping_hermiticity: f64,
    pub bloch_hermiticity: f64,
    pub symmetry: f64,
}

impl TightBindingModel {
    pub fn new(name: &str, cell_dim: usize, hoppings: BTreeMap<i64, Matrix>, symmetry: SymmetryData) -> Result<Self> {
        for (m, t) in &hoppings {
            if t.shape() != (cell_dim, cell_dim) {
                return Err(Error::Shape(format!("hopping at offset {m} is not {cell_dim}x{cell_dim}")));
            }
        }
        Ok(Self {
            name: name.to_string(),
            cell_dim,
            hoppings,
            symmetry,
        })
    }

    /// `h(k) = Σ_m T_m e^{-ikm}`.
    pub fn bloch(&self, k: f64) -> Matrix {
        let mut h = numkit::zeros(self.cell_dim, self.cell_dim);
        for (m, t) in &self.hoppings {
            h += t * Complex64::from_polar(1.0, -k * *m as f64);
        }
        h
    }

    /// `h(2πj/n)`, `j = 0..n`.
    pub fn bloch_family(&self, n: usize) -> Vec<Matrix> {
        (0..n).map(|j| self.bloch(TAU * j as f64 / n as f64)).collect()
    }

    pub fn halfspace(&self, cells: usize, tol: &ToleranceProfile) -> Result<HalfSpaceModel> {
        HalfSpaceModel::new(
            self.cell_dim,
            self.hoppings.iter().map(|(m, t)| (*m, t.clone())).collect(),
            cells,
            None,
            self.symmetry.clone(),
            tol,
        )
    }

    /// Periodic chain of `cells` cells as a single insulator.
    pub fn ring_insulator(&self, cells: usize, tol: &ToleranceProfile) -> Result<Insulator> {
        let hs = self.halfspace(cells, tol)?;
        kasparov::flatten(hs.ring(), None, tile_symmetry(&self.symmetry, cells), tol)
    }

    /// Bloch family on `n` momenta as a block-diagonal insulator.
    pub fn family_insulator(&self, n: usize, tol: &ToleranceProfile) -> Result<Insulator> {
        kasparov::flatten_family(&self.bloch_family(n), tile_symmetry(&self.symmetry, n), tol)
    }

    /// `sign Pf(ih(0)) · sign Pf(ih(π))`, with `-1` in the topological
    /// phase. Needs particle-hole symmetry implemented by plain complex
    /// conjugation, which makes `ih(k)` real antisymmetric at `k = 0, π`.
    pub fn majorana_number(&self, tol: &ToleranceProfile) -> Result<i64> {
        let plain = self
            .symmetry
            .real_structure
            .as_ref()
            .filter(|r| self.symmetry.phs && max_abs(&(r.implementer() - identity(self.cell_dim))) < tol.eq_tol);
        if plain.is_none() {
            return Err(Error::Precondition(
                "the Majorana number needs particle-hole symmetry by complex conjugation".into(),
            ));
        }
        let mut sign = 1;
        for k in [0.0, PI] {
            let h = self.bloch(k);
            let nearest = numkit::eig_hermitian(&h, tol)?
                .eigenvalues
                .iter()
                .fold(f64::INFINITY, |a, l| a.min(l.abs()));
            if nearest < tol.kernel_tol {
                return Err(Error::Gapless { nearest });
            }
            let pf = numkit::pfaffian(&(h * numkit::I), tol)?;
            if pf.re < 0.0 {
                sign = -sign;
            }
        }
        Ok(sign)
    }

    /// Hopping pairing, Bloch hermiticity at `samples` momenta, and the
    /// declared flags on a periodic chain.
    pub fn verify(&self, samples: usize, tol: &ToleranceProfile) -> Result<ModelResiduals> {
        let mut hopping = 0.0f64;
        for (m, t) in &self.hoppings {
            let r = match self.hoppings.get(&-m) {
                Some(b) => max_abs(&(b - t.adjoint())),
                None => max_abs(t),
            };
            hopping = hopping.max(r);
        }
        let bloch = (0..samples)
            .map(|j| numkit::hermitian_residual(&self.bloch(TAU * j as f64 / samples as f64)))
            .fold(0.0, f64::max);
        let reach = self.hoppings.keys().map(|m| m.unsigned_abs() as usize).max().unwrap_or(0);
        let hs = self.halfspace((2 * reach + 1).max(8), tol)?;
        let sym = tile_symmetry(&self.symmetry, hs.cells());
        let r = sym.verify(hs.ring(), tol)?;
        let symmetry = [r.trs, r.phs, r.chiral].into_iter().flatten().fold(0.0, f64::max);
        Ok(ModelResiduals {
            hopping_hermiticity: hopping,
            bloch_hermiticity: bloch,
            symmetry,
        })
    }
}

fn real(x: f64) -> Complex64 {
    c(x, 0.0)
}

/// Intra-cell hopping `t₁`, inter-cell `t₂`; `h(k)` has lower-left entry
/// `t₁ + t₂e^{ik}` and the chiral grading `σ₃` per cell.
pub fn ssh_model(t1: f64, t2: f64) -> TightBindingModel {
    let z = real(0.0);
    let t0 = numkit::from_rows(&[&[z, real(t1)], &[real(t1), z]]);
    let tp = numkit::from_rows(&[&[z, real(t2)], &[z, z]]);
    let mut hop = BTreeMap::new();
    hop.insert(0, t0);
    hop.insert(-1, tp.adjoint());
    hop.insert(1, tp);
    TightBindingModel {
        name: "ssh".into(),
        cell_dim: 2,
        hoppings: hop,
        symmetry: SymmetryData::chiral(Grading::standard(1)),
    }
}

/// Kitaev chain in the Majorana basis: onsite `-μσ₂`, hopping
/// `T₊₁ = -tσ₂ - iΔσ₁`. The Hamiltonian is imaginary, so complex
/// conjugation implements the particle-hole symmetry.
pub fn kitaev_chain(mu: f64, t: f64, delta: f64) -> TightBindingModel {
    let s1 = pauli::s1();
    let s2 = pauli::s2();
    let mut hop = BTreeMap::new();
    hop.insert(0, s2.scale(-mu));
    let tp = s2.scale(-t) - s1 * c(0.0, delta);
    hop.insert(-1, tp.adjoint());
    hop.insert(1, tp);
    TightBindingModel {
        name: "kitaev".into(),
        cell_dim: 2,
        hoppings: hop,
        symmetry: SymmetryData {
            real_structure: Some(RealStructure::conjugation(2)),
            phs: true,
            ..SymmetryData::none()
        },
    }
}
