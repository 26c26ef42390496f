//! Integer invariants of finite models: winding numbers, spectral flow,
//! index pairings, and the product representative of a unitary against a
//! self-adjoint operator.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::cayley;
use crate::error::{Error, Result};
use crate::graded::Grading;
use crate::kasparov::FiniteKasparovCycle;
use crate::numkit::{self, block2, identity, Matrix, ToleranceProfile, I};

/// Winding of a closed loop of nonzero complex numbers, `k`-ordered. The
/// closing step from the last sample back to the first is included.
/// Steps larger than π/2 are refused since they cannot be told apart
/// from aliasing.
pub fn winding_of_phases(z: &[Complex64]) -> Result<i64> {
    let n = z.len();
    if n < 3 {
        return Err(Error::Domain("a loop needs at least three samples".into()));
    }
    let mut total = 0.0;
    for j in 0..n {
        let a = z[j];
        let b = z[(j + 1) % n];
        if a.norm() == 0.0 || b.norm() == 0.0 {
            return Err(Error::Singularity {
                eigenvalue: 0.0,
                pole: 0.0,
            });
        }
        let step = (b / a).arg();
        if step.abs() > FRAC_PI_2 {
            return Err(Error::Refinement {
                from: TAU * j as f64 / n as f64,
                to: TAU * ((j + 1) % n) as f64 / n as f64,
                reason: format!("phase increment {step:.3} exceeds π/2"),
            });
        }
        total += step;
    }
    Ok((total / TAU).round() as i64)
}

/// Unitaries sampled on a sorted grid covering `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryLoop {
    samples: Vec<Matrix>,
    grid: Vec<f64>,
}

impl UnitaryLoop {
    pub fn new(samples: Vec<Matrix>, grid: Vec<f64>, tol: &ToleranceProfile) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::Shape(format!(
                "{} samples on a grid of {} points",
                samples.len(),
                grid.len()
            )));
        }
        if samples.len() < 3 {
            return Err(Error::Domain("a loop needs at least three samples".into()));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) || grid[0] < 0.0 || *grid.last().unwrap() >= TAU {
            return Err(Error::Domain("grid must be strictly increasing inside [0, 2π)".into()));
        }
        let n = samples[0].nrows();
        for s in &samples {
            if s.shape() != (n, n) {
                return Err(Error::Shape("loop samples differ in size".into()));
            }
            numkit::ensure_finite(s)?;
            numkit::is_unitary(s, tol).into_result("loop sample unitary")?;
        }
        Ok(Self { samples, grid })
    }

    /// `f(2πj/n)` for `j = 0..n`.
    pub fn sample(n: usize, f: impl Fn(f64) -> Matrix, tol: &ToleranceProfile) -> Result<Self> {
        let grid: Vec<f64> = (0..n).map(|j| TAU * j as f64 / n as f64).collect();
        let samples = grid.iter().map(|&k| f(k)).collect();
        Self::new(samples, grid, tol)
    }

    pub fn samples(&self) -> &[Matrix] {
        &self.samples
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Pointwise product.
    pub fn product(&self, other: &UnitaryLoop, tol: &ToleranceProfile) -> Result<UnitaryLoop> {
        if self.grid != other.grid {
            return Err(Error::Composition("loops live on different grids".into()));
        }
        let s = self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).collect();
        UnitaryLoop::new(s, self.grid.clone(), tol)
    }

    /// Pointwise adjoint.
    pub fn adjoint(&self) -> UnitaryLoop {
        UnitaryLoop {
            samples: self.samples.iter().map(|s| s.adjoint()).collect(),
            grid: self.grid.clone(),
        }
    }

    /// Determinant phases, the input of [`winding_number`].
    pub fn det_phases(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.determinant().arg()).collect()
    }
}

/// Degree of `k ↦ det u(k)`, counterclockwise positive.
pub fn winding_number(l: &UnitaryLoop) -> Result<i64> {
    let dets: Vec<Complex64> = l.samples.iter().map(|s| s.determinant()).collect();
    let n = dets.len();
    let mut total = 0.0;
    for j in 0..n {
        let step = (dets[(j + 1) % n] / dets[j]).arg();
        if step.abs() > FRAC_PI_2 {
            let to = if j + 1 == n { l.grid[0] + TAU } else { l.grid[j + 1] };
            return Err(Error::Refinement {
                from: l.grid[j],
                to,
                reason: format!("det-phase increment {step:.3} reaches π"),
            });
        }
        total += step;
    }
    Ok((total / TAU).round() as i64)
}

/// Hermitian matrices sampled on a sorted grid of `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianPath {
    samples: Vec<Matrix>,
    grid: Vec<f64>,
}

impl HermitianPath {
    pub fn new(samples: Vec<Matrix>, grid: Vec<f64>, tol: &ToleranceProfile) -> Result<Self> {
        if samples.len() != grid.len() || samples.len() < 2 {
            return Err(Error::Shape("a path needs at least two samples, one per grid point".into()));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("grid must be strictly increasing".into()));
        }
        let n = samples[0].nrows();
        for s in &samples {
            if s.shape() != (n, n) {
                return Err(Error::Shape("path samples differ in size".into()));
            }
            numkit::require_hermitian(s, tol)?;
        }
        Ok(Self { samples, grid })
    }

    /// `(1-t)·a + t·b` on `steps + 1` equally spaced points.
    pub fn linear(a: &Matrix, b: &Matrix, steps: usize, tol: &ToleranceProfile) -> Result<Self> {
        numkit::ensure_same_shape(a, b, "linear path")?;
        let steps = steps.max(1);
        let grid: Vec<f64> = (0..=steps).map(|j| j as f64 / steps as f64).collect();
        let samples = grid.iter().map(|&t| a.scale(1.0 - t) + b.scale(t)).collect();
        Self::new(samples, grid, tol)
    }

    pub fn samples(&self) -> &[Matrix] {
        &self.samples
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Path traversed backwards, reparametrized by `t ↦ 1 - t`.
    pub fn reversed(&self) -> HermitianPath {
        let mut samples = self.samples.clone();
        samples.reverse();
        let grid = self.grid.iter().rev().map(|t| 1.0 - t).collect();
        HermitianPath { samples, grid }
    }

    /// This path followed by `other`, rescaled to `[0, 1]`.
    pub fn concat(&self, other: &HermitianPath) -> Result<HermitianPath> {
        let (a, b) = (self.samples.last().unwrap(), &other.samples[0]);
        if a.shape() != b.shape() || numkit::max_abs(&(a - b)) > 0.0 {
            return Err(Error::Composition("paths do not share an endpoint".into()));
        }
        let mut samples = self.samples.clone();
        samples.extend(other.samples.iter().skip(1).cloned());
        let mut grid: Vec<f64> = self.grid.iter().map(|t| 0.5 * t).collect();
        grid.extend(other.grid.iter().skip(1).map(|t| 0.5 + 0.5 * t));
        Ok(HermitianPath { samples, grid })
    }

    /// Compress every sample to the span of the orthonormal columns `q`.
    pub fn compress(&self, q: &Matrix) -> HermitianPath {
        HermitianPath {
            samples: self.samples.iter().map(|s| numkit::compress(s, q)).collect(),
            grid: self.grid.clone(),
        }
    }
}

/// One zero crossing, located by linear interpolation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub t: f64,
    /// `+1` for a negative eigenvalue becoming non-negative.
    pub sign: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralFlowReport {
    pub value: i64,
    pub crossings: Vec<Crossing>,
}

/// Net number of eigenvalues crossing zero upwards along the path.
pub fn spectral_flow(path: &HermitianPath, tol: &ToleranceProfile) -> Result<i64> {
    spectral_flow_report(path, tol).map(|r| r.value)
}

/// Crossings are resolved step by step. A step whose Weyl window
/// `‖H(t_{j+1}) - H(t_j)‖` admits crossings in both directions is rejected.
pub fn spectral_flow_report(path: &HermitianPath, tol: &ToleranceProfile) -> Result<SpectralFlowReport> {
    let spectra: Vec<Vec<f64>> = path
        .samples
        .iter()
        .map(|s| numkit::eig_hermitian(s, tol).map(|e| e.eigenvalues))
        .collect::<Result<_>>()?;
    for idx in [0, spectra.len() - 1] {
        if let Some(&l) = spectra[idx].iter().find(|l| l.abs() <= tol.kernel_tol) {
            return Err(Error::DegenerateEndpoint { eigenvalue: l });
        }
    }
    let negatives = |s: &[f64]| s.iter().filter(|&&l| l < 0.0).count() as i64;
    let mut crossings = Vec::new();
    let mut value = 0;
    for j in 0..spectra.len() - 1 {
        let (a, b) = (&spectra[j], &spectra[j + 1]);
        let delta = negatives(a) - negatives(b);
        let window = numkit::opnorm(&(&path.samples[j + 1] - &path.samples[j]));
        let below = a.iter().any(|&l| l < 0.0 && l > -window);
        let above = a.iter().any(|&l| l >= 0.0 && l < window);
        if below && above && window > 0.0 {
            let could_swap = a.iter().filter(|l| l.abs() < window).count() >= 2;
            if could_swap {
                return Err(Error::Refinement {
                    from: path.grid[j],
                    to: path.grid[j + 1],
                    reason: "eigenvalues on both sides of zero within one step".into(),
                });
            }
        }
        if delta != 0 {
            let sign = delta.signum();
            // sorted curves: the crossing ones sit at the boundary index
            let n0 = negatives(a) as usize;
            let n1 = negatives(b) as usize;
            for i in n0.min(n1)..n0.max(n1) {
                let (la, lb) = (a[i], b[i]);
                let s = if (lb - la).abs() > 0.0 { -la / (lb - la) } else { 0.5 };
                let t = path.grid[j] + s.clamp(0.0, 1.0) * (path.grid[j + 1] - path.grid[j]);
                crossings.push(Crossing { t, sign });
            }
            value += delta;
        }
    }
    Ok(SpectralFlowReport { value, crossings })
}

/// Which index computation to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IndexMethod {
    SpectralFlow,
    Kernel,
}

/// Both index computations and their agreement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexReport {
    pub spectral_flow: i64,
    pub kernel: i64,
    /// `c` in `D + c`, chosen so that `D + c` is invertible with the same
    /// non-negative spectral projection as `D`.
    pub shift: f64,
    /// Dimension of the low-energy window `|λ(D)| ≤ Λ/2`.
    pub window_dim: usize,
    pub kernel_vectors: usize,
    pub cokernel_vectors: usize,
    pub crossings: Vec<Crossing>,
}

struct Window {
    shift: f64,
    eig: numkit::HermitianEig,
    radius: f64,
}

fn window(d: &Matrix, tol: &ToleranceProfile) -> Result<Window> {
    let eig = numkit::eig_hermitian(d, tol)?;
    if eig.dim() == 0 {
        return Err(Error::Domain("empty operator".into()));
    }
    let radius = eig.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let negative_gap = eig
        .eigenvalues
        .iter()
        .filter(|&&l| l < 0.0)
        .fold(f64::INFINITY, |m, &l| m.min(-l));
    let positive_gap = eig
        .eigenvalues
        .iter()
        .filter(|&&l| l >= tol.kernel_tol)
        .fold(f64::INFINITY, |m, &l| m.min(l));
    let has_kernel = eig.eigenvalues.iter().any(|l| l.abs() < tol.kernel_tol);
    let shift = if has_kernel {
        0.5 * negative_gap.min(positive_gap).min(1.0)
    } else {
        0.0
    };
    Ok(Window { shift, eig, radius })
}

impl Window {
    fn basis(&self, fraction: f64) -> Matrix {
        let keep: Vec<usize> = (0..self.eig.dim())
            .filter(|&j| self.eig.eigenvalues[j].abs() <= fraction * self.radius + 1e-12)
            .collect();
        Matrix::from_fn(self.eig.dim(), keep.len(), |i, j| self.eig.eigenvectors[(i, keep[j])])
    }
}

fn require_pairing_inputs(u: &Matrix, d: &Matrix, tol: &ToleranceProfile) -> Result<()> {
    numkit::ensure_same_shape(u, d, "index pairing")?;
    numkit::is_unitary(u, tol).into_result("unitary")?;
    numkit::require_hermitian(d, tol)?;
    Ok(())
}

/// `sf(D + c, u(D + c)u*)` along the straight path, compressed to the
/// low-energy window of `D`.
pub fn index_by_spectral_flow(u: &Matrix, d: &Matrix, steps: usize, tol: &ToleranceProfile) -> Result<SpectralFlowReport> {
    require_pairing_inputs(u, d, tol)?;
    let w = window(d, tol)?;
    let n = d.nrows();
    let de = d + identity(n).scale(w.shift);
    let q = w.basis(0.5);
    let path = HermitianPath::linear(&de, &(u * &de * u.adjoint()), steps, tol)?.compress(&q);
    spectral_flow_report(&path, tol)
}

/// Kernel minus cokernel of `Ci(u) + iD̃` on `range(u-1)`, counting only
/// null vectors concentrated in the low-energy window of `D`.
fn index_by_kernel_at(u: &Matrix, d: &Matrix, w: &Window, fraction: f64, tol: &ToleranceProfile) -> Result<(i64, usize, usize)> {
    let ci = cayley::cayley_inv(u, tol)?;
    if ci.is_empty() {
        return Ok((0, 0, 0));
    }
    let q = &ci.basis;
    let k = &ci.compressed + numkit::compress(d, q) * I;
    let s = numkit::svd(&k);
    let scale = s.largest().max(1.0);
    let win = w.basis(fraction);
    let weight = |v: &numkit::Vector| (win.adjoint() * v).norm_squared();
    let (mut ker, mut coker) = (0usize, 0usize);
    for j in 0..s.singular_values.len() {
        if s.singular_values[j] > tol.kernel_tol * scale {
            continue;
        }
        let right: numkit::Vector = q * s.v_adjoint.row(j).adjoint();
        let left: numkit::Vector = q * s.u.column(j);
        if weight(&right) > 0.5 {
            ker += 1;
        }
        if weight(&left) > 0.5 {
            coker += 1;
        }
    }
    Ok((ker as i64 - coker as i64, ker, coker))
}

pub fn index_by_kernel(u: &Matrix, d: &Matrix, tol: &ToleranceProfile) -> Result<i64> {
    require_pairing_inputs(u, d, tol)?;
    let w = window(d, tol)?;
    let (a, _, _) = index_by_kernel_at(u, d, &w, 0.5, tol)?;
    let (b, _, _) = index_by_kernel_at(u, d, &w, 0.75, tol)?;
    if a != b {
        return Err(Error::Refinement {
            from: 0.5,
            to: 0.75,
            reason: format!("kernel count changes with the window ({a} vs {b})"),
        });
    }
    Ok(a)
}

/// Index pairing of `[u]` with `D` by both methods; disagreement is an error.
pub fn index_pairing(u: &Matrix, d: &Matrix, tol: &ToleranceProfile) -> Result<IndexReport> {
    require_pairing_inputs(u, d, tol)?;
    let w = window(d, tol)?;
    let sf = index_by_spectral_flow(u, d, 16, tol)?;
    let kernel = index_by_kernel(u, d, tol)?;
    let (_, kv, cv) = index_by_kernel_at(u, d, &w, 0.5, tol)?;
    if sf.value != kernel {
        return Err(Error::Inconsistent {
            spectral_flow: sf.value,
            kernel,
        });
    }
    Ok(IndexReport {
        spectral_flow: sf.value,
        kernel,
        shift: w.shift,
        window_dim: w.basis(0.5).ncols(),
        kernel_vectors: kv,
        cokernel_vectors: cv,
        crossings: sf.crossings,
    })
}

/// The doubled cycle with operator `[[0, Ci(u) - iD̃], [Ci(u) + iD̃, 0]]`
/// on `range(u-1) ⊕ range(u-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductRepresentative {
    pub cycle: FiniteKasparovCycle,
    /// `Ci(u) + iD̃`, the lower-left corner.
    pub lower_left: Matrix,
    /// Smallest eigenvalue of `{offdiag(Ci, Ci), op}/2 + 1`.
    pub positivity_margin: f64,
    pub commutator_norm: f64,
}

pub fn kasparov_product_rep(u: &Matrix, d: &Matrix, tol: &ToleranceProfile) -> Result<ProductRepresentative> {
    require_pairing_inputs(u, d, tol)?;
    let commutator_norm = numkit::opnorm(&numkit::commutator(d, u));
    if commutator_norm >= 2.0 {
        return Err(Error::Precondition(format!(
            "‖[D,u]‖ = {commutator_norm:.4} is not below 2; rescale D"
        )));
    }
    let ci = cayley::cayley_inv(u, tol)?;
    let q = ci.basis.clone();
    let r = q.ncols();
    let c = ci.compressed.clone();
    let dt = numkit::compress(d, &q);
    let lower_left = &c + &dt * I;
    let upper_right = &c - &dt * I;
    let zero = numkit::zeros(r, r);
    let op = block2(&zero, &upper_right, &lower_left, &zero);
    let cc = block2(&zero, &c, &c, &zero);
    let form = numkit::anticommutator(&cc, &op).scale(0.5) + identity(2 * r);
    let form = (&form + form.adjoint()).scale(0.5);
    let positivity_margin = if r == 0 {
        f64::INFINITY
    } else {
        numkit::eig_hermitian(&form, tol)?.eigenvalues[0]
    };
    let basis = block2(&q, &numkit::zeros(q.nrows(), r), &numkit::zeros(q.nrows(), r), &q);
    let cycle = FiniteKasparovCycle::new(
        basis,
        Vec::new(),
        op,
        Grading::split(r, r),
        None,
        crate::vandaele::Coefficient::none(),
        tol,
    )?;
    Ok(ProductRepresentative {
        cycle,
        lower_left,
        positivity_margin,
        commutator_norm,
    })
}

/// `‖[(1/i)d/dθ, v_n](1 - z̄) f‖` for `v_n = ρ(ρ + 1/n)⁻¹`, `ρ = 2 - z - z̄`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxUnitReport {
    pub ns: Vec<u32>,
    /// One row per test vector, one column per `n`.
    pub norms: Vec<Vec<f64>>,
    pub test_vectors: Vec<String>,
    /// Largest modulus mismatch between the closed form and direct
    /// differentiation of `v_n`.
    pub closed_form_mismatch: f64,
    pub decreasing: bool,
}

/// The closed form of the commutator expression at `θ`.
pub fn approx_unit_commutator(n: u32, theta: f64) -> Complex64 {
    let nf = n as f64;
    let rho = 2.0 - 2.0 * theta.cos();
    let v = rho / (rho + 1.0 / nf);
    let phase = Complex64::from_polar(1.0, theta / 2.0);
    let half = theta / 2.0;
    let bracket = theta.sin() / (1.0 - theta.cos() + 1.0 / (2.0 * nf)) - half.cos() / half.sin();
    phase * (2.0 * (1.0 - v) * bracket * half.sin()) + phase * (2.0 * (1.0 - v) * half.cos())
}

/// Evaluates the commutator on a midpoint grid of `grid` points for the
/// constant, smooth and away-from-zero test vectors.
pub fn approx_unit_check(ns: &[u32], grid: usize) -> Result<ApproxUnitReport> {
    if grid < 8 || ns.is_empty() || ns.contains(&0) {
        return Err(Error::Domain("need grid ≥ 8 and positive n".into()));
    }
    let h = TAU / grid as f64;
    let thetas: Vec<f64> = (0..grid).map(|j| (j as f64 + 0.5) * h).collect();
    let tests: Vec<(&str, Box<dyn Fn(f64) -> f64>)> = vec![
        ("constant", Box::new(|_| 1.0)),
        ("sine", Box::new(f64::sin)),
        ("away-from-zero", Box::new(|t: f64| (-(t - PI).powi(2) * 4.0).exp())),
    ];
    let mut mismatch = 0.0f64;
    let mut norms = vec![Vec::with_capacity(ns.len()); tests.len()];
    for &n in ns {
        let nf = n as f64;
        let vals: Vec<Complex64> = thetas.iter().map(|&t| approx_unit_commutator(n, t)).collect();
        for (&t, v) in thetas.iter().zip(&vals) {
            let rho = 2.0 - 2.0 * t.cos();
            let dv = (1.0 / nf) * 2.0 * t.sin() / (rho + 1.0 / nf).powi(2);
            let direct = Complex64::new(0.0, -dv) * (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -t));
            mismatch = mismatch.max((direct.norm() - v.norm()).abs());
        }
        for (row, (_, f)) in norms.iter_mut().zip(&tests) {
            let s: f64 = thetas.iter().zip(&vals).map(|(&t, v)| (v * f(t)).norm_sqr()).sum();
            row.push((s * h).sqrt());
        }
    }
    let decreasing = norms.iter().all(|row| row.windows(2).all(|w| w[1] < w[0]));
    Ok(ApproxUnitReport {
        ns: ns.to_vec(),
        norms,
        test_vectors: tests.iter().map(|(n, _)| n.to_string()).collect(),
        closed_form_mismatch: mismatch,
        decreasing,
    })
}
