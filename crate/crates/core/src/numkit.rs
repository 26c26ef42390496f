//! Dense complex linear algebra used by every other module.
//!
//! Matrices are plain `nalgebra::DMatrix<Complex64>` values. Everything here
//! is a pure function; structural predicates return a [`Check`] carrying the
//! residual they measured so callers can apply their own thresholds.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub type Matrix = DMatrix<Complex64>;
pub type Vector = nalgebra::DVector<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Tolerances shared by the structural predicates and rank decisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToleranceProfile {
    /// Absolute entrywise comparison tolerance.
    pub eq_tol: f64,
    /// Relative singular-value cutoff for ranges and conditioning.
    pub rank_tol: f64,
    /// Cutoff for kernel counting and spectral singularities.
    pub kernel_tol: f64,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        Self {
            eq_tol: 1e-9,
            rank_tol: 1e-10,
            kernel_tol: 1e-8,
        }
    }
}

impl ToleranceProfile {
    pub fn new(eq_tol: f64, rank_tol: f64, kernel_tol: f64) -> Result<Self> {
        for (name, v) in [("eq_tol", eq_tol), ("rank_tol", rank_tol), ("kernel_tol", kernel_tol)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} must be strictly positive, got {v}")));
            }
        }
        Ok(Self {
            eq_tol,
            rank_tol,
            kernel_tol,
        })
    }

    /// Same profile with a different equality tolerance.
    pub fn with_eq_tol(self, eq_tol: f64) -> Result<Self> {
        Self::new(eq_tol, self.rank_tol, self.kernel_tol)
    }
}

/// Outcome of a structural predicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Check {
    pub passed: bool,
    pub residual: f64,
}

impl Check {
    pub fn against(residual: f64, tol: f64) -> Self {
        Self {
            passed: residual.is_finite() && residual < tol,
            residual,
        }
    }

    pub fn into_result(self, predicate: &'static str) -> Result<()> {
        if self.passed {
            Ok(())
        } else {
            Err(Error::Structural {
                predicate,
                residual: self.residual,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// constructors and small helpers

pub fn identity(n: usize) -> Matrix {
    Matrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    Matrix::zeros(rows, cols)
}

pub fn scalar(n: usize, z: Complex64) -> Matrix {
    Matrix::from_diagonal_element(n, n, z)
}

pub fn from_real_diag(d: &[f64]) -> Matrix {
    let n = d.len();
    Matrix::from_fn(n, n, |i, j| if i == j { c(d[i], 0.0) } else { ZERO })
}

pub fn from_rows(rows: &[&[Complex64]]) -> Matrix {
    let r = rows.len();
    let cols = rows.first().map_or(0, |row| row.len());
    Matrix::from_fn(r, cols, |i, j| rows[i][j])
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

/// Block diagonal matrix of the given square or rectangular blocks.
pub fn block_diag(blocks: &[&Matrix]) -> Matrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let (mut r, mut cidx) = (0, 0);
    for b in blocks {
        out.view_mut((r, cidx), (b.nrows(), b.ncols())).copy_from(b);
        r += b.nrows();
        cidx += b.ncols();
    }
    out
}

/// The 2x2 block matrix `[[a, b], [c, d]]`.
pub fn block2(a: &Matrix, b: &Matrix, cc: &Matrix, d: &Matrix) -> Matrix {
    let (r0, c0) = a.shape();
    let mut out = zeros(r0 + cc.nrows(), c0 + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((0, c0), b.shape()).copy_from(b);
    out.view_mut((r0, 0), cc.shape()).copy_from(cc);
    out.view_mut((r0, c0), d.shape()).copy_from(d);
    out
}

pub fn commutator(a: &Matrix, b: &Matrix) -> Matrix {
    a * b - b * a
}

pub fn anticommutator(a: &Matrix, b: &Matrix) -> Matrix {
    a * b + b * a
}

/// Largest absolute entry; the entrywise norm behind `eq_tol`.
pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Operator 2-norm.
pub fn opnorm(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |a, &s| a.max(s))
}

pub fn ensure_square(m: &Matrix) -> Result<usize> {
    if m.is_square() {
        Ok(m.nrows())
    } else {
        Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

pub fn ensure_finite(m: &Matrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn ensure_same_shape(a: &Matrix, b: &Matrix, what: &str) -> Result<()> {
    if a.shape() == b.shape() {
        Ok(())
    } else {
        Err(Error::Shape(format!(
            "{what}: {:?} vs {:?}",
            a.shape(),
            b.shape()
        )))
    }
}

/// Entrywise complex conjugate (not the adjoint).
pub fn conj(m: &Matrix) -> Matrix {
    m.map(|z| z.conj())
}

pub fn inverse(m: &Matrix) -> Result<Matrix> {
    ensure_square(m)?;
    m.clone().try_inverse().ok_or_else(|| Error::IllConditioned {
        smallest: 0.0,
        largest: opnorm(m),
    })
}

// ---------------------------------------------------------------------------
// predicates

pub fn hermitian_residual(m: &Matrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(m - m.adjoint()))
}

pub fn skew_residual(m: &Matrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(m + m.adjoint()))
}

pub fn unitary_residual(m: &Matrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    max_abs(&(m.adjoint() * m - identity(n))).max(max_abs(&(m * m.adjoint() - identity(n))))
}

pub fn projection_residual(m: &Matrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(m * m - m)).max(hermitian_residual(m))
}

pub fn is_hermitian(m: &Matrix, tol: &ToleranceProfile) -> Check {
    Check::against(hermitian_residual(m), tol.eq_tol)
}

pub fn is_unitary(m: &Matrix, tol: &ToleranceProfile) -> Check {
    Check::against(unitary_residual(m), tol.eq_tol)
}

pub fn is_projection(m: &Matrix, tol: &ToleranceProfile) -> Check {
    Check::against(projection_residual(m), tol.eq_tol)
}

pub fn require_hermitian(m: &Matrix, tol: &ToleranceProfile) -> Result<usize> {
    let n = ensure_square(m)?;
    ensure_finite(m)?;
    let residual = hermitian_residual(m);
    if residual >= tol.eq_tol * max_abs(m).max(1.0) {
        return Err(Error::Structural {
            predicate: "hermitian",
            residual,
        });
    }
    Ok(n)
}

// ---------------------------------------------------------------------------
// decompositions

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose columns are the eigenvectors.
    pub eigenvectors: Matrix,
}

impl HermitianEig {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V f(Λ) V*` for a real scalar function.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Matrix {
        self.apply_complex(|x| c(f(x), 0.0))
    }

    pub fn apply_complex(&self, f: impl Fn(f64) -> Complex64) -> Matrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let fj = f(lam);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= fj);
        }
        scaled * v.adjoint()
    }

    /// Orthogonal projection onto the span of eigenvectors whose eigenvalue
    /// satisfies `keep`.
    pub fn spectral_projection(&self, keep: impl Fn(f64) -> bool) -> Matrix {
        self.apply(|x| if keep(x) { 1.0 } else { 0.0 })
    }

    pub fn reconstruct(&self) -> Matrix {
        self.apply(|x| x)
    }
}

pub fn eig_hermitian(m: &Matrix, tol: &ToleranceProfile) -> Result<HermitianEig> {
    let n = require_hermitian(m, tol)?;
    if n == 0 {
        return Ok(HermitianEig {
            eigenvalues: Vec::new(),
            eigenvectors: zeros(0, 0),
        });
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = nalgebra::SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&j| eig.eigenvalues[j]).collect();
    let eigenvectors = Matrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

/// `f(M)` for Hermitian `M` through its eigendecomposition.
pub fn mat_func_hermitian(
    m: &Matrix,
    f: impl Fn(f64) -> f64,
    tol: &ToleranceProfile,
) -> Result<Matrix> {
    Ok(eig_hermitian(m, tol)?.apply(f))
}

/// Like [`mat_func_hermitian`] but refuses eigenvalues within `kernel_tol`
/// of any declared pole of `f`.
pub fn mat_func_hermitian_avoiding(
    m: &Matrix,
    f: impl Fn(f64) -> f64,
    poles: &[f64],
    tol: &ToleranceProfile,
) -> Result<Matrix> {
    let eig = eig_hermitian(m, tol)?;
    for &lam in &eig.eigenvalues {
        for &pole in poles {
            if (lam - pole).abs() < tol.kernel_tol {
                return Err(Error::Singularity {
                    eigenvalue: lam,
                    pole,
                });
            }
        }
    }
    Ok(eig.apply(f))
}

pub fn mat_func_hermitian_complex(
    m: &Matrix,
    f: impl Fn(f64) -> Complex64,
    tol: &ToleranceProfile,
) -> Result<Matrix> {
    Ok(eig_hermitian(m, tol)?.apply_complex(f))
}

/// Thin singular value decomposition, singular values descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub singular_values: Vec<f64>,
    pub v_adjoint: Matrix,
}

impl Svd {
    pub fn largest(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn smallest(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }

    /// Number of singular values strictly above `cutoff`.
    pub fn rank_above(&self, cutoff: f64) -> usize {
        self.singular_values.iter().filter(|&&s| s > cutoff).count()
    }
}

pub fn svd(m: &Matrix) -> Svd {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return Svd {
            u: zeros(rows, 0),
            singular_values: Vec::new(),
            v_adjoint: zeros(0, cols),
        };
    }
    let s = m.clone().svd(true, true);
    let u = s.u.expect("u requested");
    let vt = s.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| s.singular_values[b].total_cmp(&s.singular_values[a]));
    Svd {
        u: Matrix::from_fn(rows, k, |i, j| u[(i, order[j])]),
        singular_values: order.iter().map(|&j| s.singular_values[j]).collect(),
        v_adjoint: Matrix::from_fn(k, cols, |i, j| vt[(order[i], j)]),
    }
}

/// Singular values only, ascending. Much cheaper than [`svd`] on large
/// matrices.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    if m.nrows().min(m.ncols()) == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = if m.iter().all(|z| z.im == 0.0) {
        m.map(|z| z.re).singular_values().iter().copied().collect()
    } else {
        m.singular_values().iter().copied().collect()
    };
    s.sort_by(f64::total_cmp);
    s
}

/// Dimension of the numerical kernel: columns minus the number of singular
/// values above `kernel_tol · ‖M‖`.
pub fn kernel_dim(m: &Matrix, kernel_tol: f64) -> usize {
    let s = singular_values(m);
    let cutoff = kernel_tol * s.last().copied().unwrap_or(0.0);
    m.ncols() - s.iter().filter(|&&x| x > cutoff).count()
}

/// Orthonormal basis (as columns) of the numerical range of `m`.
pub fn range_basis(m: &Matrix, rank_tol: f64) -> Matrix {
    let s = svd(m);
    let r = s.rank_above(rank_tol * s.largest());
    s.u.columns(0, r).into_owned()
}

/// Orthogonal projector onto the numerical range of `m`.
pub fn range_projector(m: &Matrix, rank_tol: f64) -> Matrix {
    let q = range_basis(m, rank_tol);
    &q * q.adjoint()
}

/// Orthonormal basis of the numerical kernel of `m`.
pub fn kernel_basis(m: &Matrix, kernel_tol: f64) -> Matrix {
    let cols = m.ncols();
    if cols == 0 {
        return zeros(0, 0);
    }
    // Full right singular basis from the Hermitian M*M.
    let gram = m.adjoint() * m;
    let eig = nalgebra::SymmetricEigen::new((&gram + gram.adjoint()).scale(0.5));
    let scale = eig.eigenvalues.iter().fold(0.0_f64, |a, &x| a.max(x)).sqrt();
    let cutoff = kernel_tol * scale;
    let idx: Vec<usize> = (0..cols)
        .filter(|&j| eig.eigenvalues[j].max(0.0).sqrt() <= cutoff)
        .collect();
    Matrix::from_fn(cols, idx.len(), |i, j| eig.eigenvectors[(i, idx[j])])
}

/// Unitary factor of the polar decomposition `M = phase(M)·|M|`.
pub fn polar_phase(m: &Matrix, tol: &ToleranceProfile) -> Result<Matrix> {
    ensure_square(m)?;
    ensure_finite(m)?;
    let s = svd(m);
    let (largest, smallest) = (s.largest(), s.smallest());
    if m.nrows() > 0 && smallest <= tol.rank_tol * largest {
        return Err(Error::IllConditioned { smallest, largest });
    }
    Ok(&s.u * &s.v_adjoint)
}

/// Positive square root of a positive semidefinite Hermitian matrix.
pub fn sqrt_psd(m: &Matrix, tol: &ToleranceProfile) -> Result<Matrix> {
    mat_func_hermitian(m, |x| x.max(0.0).sqrt(), tol)
}

/// `|M| = (M*M)^{1/2}`.
pub fn abs(m: &Matrix, tol: &ToleranceProfile) -> Result<Matrix> {
    sqrt_psd(&(m.adjoint() * m), tol)
}

/// Compress `op` to the subspace spanned by the orthonormal columns of `q`.
pub fn compress(op: &Matrix, q: &Matrix) -> Matrix {
    q.adjoint() * op * q
}

/// Random matrices for property suites and verification commands.
pub mod random {
    use super::*;
    use rand::Rng;

    pub fn complex_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
        Matrix::from_fn(rows, cols, |_, _| c(normal(rng), normal(rng)))
    }

    pub fn hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
        let g = complex_gaussian(n, n, rng);
        (&g + g.adjoint()).scale(0.5)
    }

    pub fn skew_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
        let g = complex_gaussian(n, n, rng);
        (&g - g.adjoint()).scale(0.5)
    }

    /// Haar-ish unitary from the QR factor of a Gaussian matrix.
    pub fn unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
        let g = complex_gaussian(n, n, rng);
        
        g.qr().q()
    }

    /// Standard normal sample via Box-Muller.
    pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

/// Pfaffian of a complex antisymmetric matrix by Parlett-Reid elimination
/// with partial pivoting. Odd dimension gives zero.
pub fn pfaffian(m: &Matrix, tol: &ToleranceProfile) -> Result<Complex64> {
    let n = ensure_square(m)?;
    let defect = max_abs(&(m + m.transpose()));
    if defect >= tol.eq_tol * max_abs(m).max(1.0) {
        return Err(Error::Structural {
            predicate: "antisymmetric",
            residual: defect,
        });
    }
    if n % 2 == 1 {
        return Ok(ZERO);
    }
    let mut a = m.clone();
    let mut pf = ONE;
    for k in (0..n).step_by(2) {
        let p = (k + 1..n)
            .max_by(|&i, &j| a[(i, k)].norm().total_cmp(&a[(j, k)].norm()))
            .expect("k + 1 < n for even n");
        if p != k + 1 {
            a.swap_rows(k + 1, p);
            a.swap_columns(k + 1, p);
            pf = -pf;
        }
        let piv = a[(k, k + 1)];
        if piv == ZERO {
            return Ok(ZERO);
        }
        pf *= piv;
        if k + 2 < n {
            let tau: Vec<Complex64> = (k + 2..n).map(|j| a[(k, j)] / piv).collect();
            let col: Vec<Complex64> = (k + 2..n).map(|i| a[(i, k + 1)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    a[(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
    }
    Ok(pf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    fn sigma1() -> Matrix {
        from_rows(&[&[ZERO, ONE], &[ONE, ZERO]])
    }

    #[test]
    fn eig_of_diagonal_is_sorted() {
        let m = from_real_diag(&[3.0, 1.0]);
        let e = eig_hermitian(&m, &tol()).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 3.0]);
        // eigenvectors are a permutation (up to phase)
        assert!((e.eigenvectors[(1, 0)].norm() - 1.0).abs() < 1e-14);
        assert!((e.eigenvectors[(0, 1)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pauli_spectrum() {
        let e = eig_hermitian(&sigma1(), &tol()).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_reconstruction_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = random::hermitian(8, &mut rng);
        let e = eig_hermitian(&m, &tol()).unwrap();
        let resid = opnorm(&(e.reconstruct() - &m));
        assert!(resid < 1e-10 * opnorm(&m).max(1.0), "{resid}");
        assert!(unitary_residual(&e.eigenvectors) < 1e-12);
        assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eig_rejects_bad_input() {
        let rect = zeros(2, 3);
        assert!(matches!(
            eig_hermitian(&rect, &tol()),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
        let m = from_rows(&[&[ZERO, ONE], &[ZERO, ZERO]]);
        match eig_hermitian(&m, &tol()) {
            Err(Error::Structural { predicate, residual }) => {
                assert_eq!(predicate, "hermitian");
                assert!((residual - 1.0).abs() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn identity_function_and_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random::hermitian(5, &mut rng);
        let same = mat_func_hermitian(&m, |x| x, &tol()).unwrap();
        assert!(max_abs(&(same - &m)) < 1e-12);

        let d = from_real_diag(&[2.0, -3.0]);
        let s = mat_func_hermitian(&d, |x| x / x.abs(), &tol()).unwrap();
        assert!(max_abs(&(s - from_real_diag(&[1.0, -1.0]))) < 1e-15);
    }

    #[test]
    fn tan_of_scaled_pauli() {
        // Odd scalar function of t·σ₁ is f(t)·σ₁ (σ₁ has spectrum ±1).
        let t = 0.3;
        let m = sigma1().scale(t);
        let f = |x: f64| (std::f64::consts::FRAC_PI_2 * x).tan();
        let out = mat_func_hermitian_avoiding(&m, f, &[1.0, -1.0], &tol()).unwrap();
        let expected = sigma1().scale((0.15 * std::f64::consts::PI).tan());
        assert!(max_abs(&(out - expected)) < 1e-14);
    }

    #[test]
    fn pole_is_reported() {
        let m = from_real_diag(&[1.0, 0.2]);
        let f = |x: f64| (std::f64::consts::FRAC_PI_2 * x).tan();
        match mat_func_hermitian_avoiding(&m, f, &[1.0, -1.0], &tol()) {
            Err(Error::Singularity { eigenvalue, pole }) => {
                assert_eq!(pole, 1.0);
                assert!((eigenvalue - 1.0).abs() < 1e-14);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn polar_phase_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random::unitary(4, &mut rng);
        assert!(max_abs(&(polar_phase(&u, &tol()).unwrap() - &u)) < 1e-12);
        let two = scalar(3, c(2.0, 0.0));
        assert!(max_abs(&(polar_phase(&two, &tol()).unwrap() - identity(3))) < 1e-14);

        let m = random::complex_gaussian(6, 6, &mut rng);
        let p = polar_phase(&m, &tol()).unwrap();
        assert!(unitary_residual(&p) < 1e-9);
        let modulus = abs(&m, &tol()).unwrap();
        assert!(opnorm(&(&p * modulus - &m)) < 1e-9 * opnorm(&m));
        // independent oracle: phase = W Z* from the SVD
        let s = m.clone().svd(true, true);
        let oracle = s.u.unwrap() * s.v_t.unwrap();
        assert!(max_abs(&(oracle - p)) < 1e-9);
    }

    #[test]
    fn polar_phase_rejects_singular() {
        let m = from_real_diag(&[1.0, 0.0]);
        assert!(matches!(
            polar_phase(&m, &tol()),
            Err(Error::IllConditioned { .. })
        ));
    }

    #[test]
    fn kernel_dims() {
        assert_eq!(kernel_dim(&zeros(3, 3), 1e-8), 3);
        assert_eq!(kernel_dim(&identity(4), 1e-8), 0);
        assert_eq!(kernel_dim(&from_real_diag(&[1.0, 1e-14, 2.0]), 1e-10), 1);
        assert_eq!(kernel_dim(&zeros(2, 5), 1e-8), 5);
        assert_eq!(kernel_basis(&from_real_diag(&[1.0, 0.0, 2.0]), 1e-8).ncols(), 1);
    }

    #[test]
    fn predicates_report_residuals() {
        let p = from_real_diag(&[1.0, 0.0]);
        assert!(is_projection(&p, &tol()).passed);
        let q = from_real_diag(&[1.0, 0.5]);
        let chk = is_projection(&q, &tol());
        assert!(!chk.passed);
        assert!((chk.residual - 0.25).abs() < 1e-15);
        assert!(is_unitary(&sigma1(), &tol()).passed);
        assert!(is_hermitian(&sigma1(), &tol()).passed);
    }

    #[test]
    fn range_projector_of_rank_one() {
        let m = from_real_diag(&[0.0, 5.0, 0.0]);
        let p = range_projector(&m, 1e-10);
        assert!(max_abs(&(p - from_real_diag(&[0.0, 1.0, 0.0]))) < 1e-14);
    }

    #[test]
    fn pfaffian_against_determinant() {
        let a = from_rows(&[&[ZERO, c(2.0, 1.0)], &[c(-2.0, -1.0), ZERO]]);
        assert_eq!(pfaffian(&a, &tol()).unwrap(), c(2.0, 1.0));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in [4, 6, 8] {
            let g = random::complex_gaussian(n, n, &mut rng);
            let a = &g - g.transpose();
            let pf = pfaffian(&a, &tol()).unwrap();
            let det = a.clone().determinant();
            assert!((pf * pf - det).norm() < 1e-9 * det.norm().max(1.0));
            // Pf(BABᵀ) = det(B) Pf(A)
            let b = random::complex_gaussian(n, n, &mut rng);
            let lhs = pfaffian(&(&b * &a * b.transpose()), &tol()).unwrap();
            let rhs = b.clone().determinant() * pf;
            assert!((lhs - rhs).norm() < 1e-9 * rhs.norm().max(1.0));
        }
        assert_eq!(pfaffian(&zeros(3, 3), &tol()).unwrap(), ZERO);
        assert!(pfaffian(&sigma1(), &tol()).is_err());
    }
}
