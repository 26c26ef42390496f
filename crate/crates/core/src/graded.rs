//! Z2-graded matrix algebras, real structures and odd self-adjoint unitaries.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkit::{self, block_diag, identity, max_abs, Matrix, ToleranceProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn bit(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn from_bit(b: u8) -> Self {
        if b.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Koszul sign `(-1)^{|a||b|}`.
    pub fn koszul(self, other: Parity) -> f64 {
        if self == Parity::Odd && other == Parity::Odd {
            -1.0
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GradingKind {
    /// Everything is even (`Γ = 1`).
    Trivial,
    /// Implemented by a non-trivial grading operator.
    Inner,
}

/// Grading implemented by a Hermitian unitary `Γ`, `Γ² = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grading {
    gamma: Matrix,
    kind: GradingKind,
}

impl Grading {
    pub fn new(gamma: Matrix, tol: &ToleranceProfile) -> Result<Self> {
        let n = numkit::ensure_square(&gamma)?;
        numkit::is_hermitian(&gamma, tol).into_result("grading hermitian")?;
        let sq = max_abs(&(&gamma * &gamma - identity(n)));
        numkit::Check::against(sq, tol.eq_tol).into_result("grading square-one")?;
        let kind = if max_abs(&(&gamma - identity(n))) < tol.eq_tol {
            GradingKind::Trivial
        } else {
            GradingKind::Inner
        };
        Ok(Self { gamma, kind })
    }

    pub fn trivial(n: usize) -> Self {
        Self {
            gamma: identity(n),
            kind: GradingKind::Trivial,
        }
    }

    /// `1_n ⊗ σ₃`: even and odd copies interleaved.
    pub fn standard(n: usize) -> Self {
        Self {
            gamma: numkit::kron(&identity(n), &crate::clifford::pauli::s3()),
            kind: GradingKind::Inner,
        }
    }

    /// `diag(1_{n_plus}, -1_{n_minus})`.
    pub fn split(n_plus: usize, n_minus: usize) -> Self {
        let d: Vec<f64> = std::iter::repeat_n(1.0, n_plus)
            .chain(std::iter::repeat_n(-1.0, n_minus))
            .collect();
        let kind = if n_minus == 0 {
            GradingKind::Trivial
        } else {
            GradingKind::Inner
        };
        Self {
            gamma: numkit::from_real_diag(&d),
            kind,
        }
    }

    pub(crate) fn from_gamma_unchecked(gamma: Matrix) -> Self {
        let n = gamma.nrows();
        let kind = if max_abs(&(&gamma - identity(n))) == 0.0 {
            GradingKind::Trivial
        } else {
            GradingKind::Inner
        };
        Self { gamma, kind }
    }

    pub fn gamma(&self) -> &Matrix {
        &self.gamma
    }

    pub fn kind(&self) -> GradingKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.gamma.nrows()
    }

    /// `Π₊ = (1+Γ)/2`.
    pub fn even_projection(&self) -> Matrix {
        (identity(self.dim()) + &self.gamma).scale(0.5)
    }

    /// `Π₋ = (1-Γ)/2`.
    pub fn odd_projection(&self) -> Matrix {
        (identity(self.dim()) - &self.gamma).scale(0.5)
    }

    /// Compress the grading to the subspace spanned by orthonormal columns `q`.
    pub fn compress(&self, q: &Matrix) -> Grading {
        Grading::from_gamma_unchecked(numkit::compress(&self.gamma, q))
    }

    pub fn direct_sum(parts: &[&Grading]) -> Grading {
        let blocks: Vec<&Matrix> = parts.iter().map(|g| &g.gamma).collect();
        let gamma = block_diag(&blocks);
        let kind = if parts.iter().all(|g| g.kind == GradingKind::Trivial) {
            GradingKind::Trivial
        } else {
            GradingKind::Inner
        };
        Grading { gamma, kind }
    }

    /// `ΓMΓ`.
    pub fn conjugate(&self, m: &Matrix) -> Matrix {
        &self.gamma * m * &self.gamma
    }

    /// Parity of a homogeneous matrix, or a parity error carrying the
    /// smaller of the two defects.
    pub fn parity_of(&self, m: &Matrix, tol: &ToleranceProfile) -> Result<Parity> {
        let g = self.conjugate(m);
        let scale = max_abs(m).max(1.0);
        let even_defect = max_abs(&(&g - m));
        let odd_defect = max_abs(&(&g + m));
        if even_defect < tol.eq_tol * scale {
            Ok(Parity::Even)
        } else if odd_defect < tol.eq_tol * scale {
            Ok(Parity::Odd)
        } else {
            Err(Error::Parity {
                defect: even_defect.min(odd_defect),
            })
        }
    }

    /// Orthonormal bases of `X₊` and `X₋`, computed block by block when
    /// `Γ` is block diagonal with the given sizes. Ranks are per block.
    pub fn split_bases(&self, blocks: Option<&[usize]>, tol: &ToleranceProfile) -> Result<SplitBases> {
        let n = self.dim();
        let sizes: Vec<usize> = match blocks {
            Some(b) => {
                if b.iter().sum::<usize>() != n {
                    return Err(Error::Shape(format!(
                        "block sizes sum to {}, grading is {n}x{n}",
                        b.iter().sum::<usize>()
                    )));
                }
                b.to_vec()
            }
            None => vec![n],
        };
        let mut plus_cols = Vec::new();
        let mut minus_cols = Vec::new();
        let mut plus_ranks = Vec::with_capacity(sizes.len());
        let mut minus_ranks = Vec::with_capacity(sizes.len());
        let mut off = 0;
        for &b in &sizes {
            let sub = self.gamma.view((off, off), (b, b)).into_owned();
            let mut np = 0;
            let mut nm = 0;
            if b > 0 {
                let eig = numkit::eig_hermitian(&sub, tol)?;
                for j in 0..b {
                    let mut col = numkit::zeros(n, 1);
                    col.view_mut((off, 0), (b, 1)).copy_from(&eig.eigenvectors.column(j));
                    if eig.eigenvalues[j] >= 0.0 {
                        plus_cols.push(col);
                        np += 1;
                    } else {
                        minus_cols.push(col);
                        nm += 1;
                    }
                }
            }
            plus_ranks.push(np);
            minus_ranks.push(nm);
            off += b;
        }
        let stack = |cols: &[Matrix]| {
            let mut m = numkit::zeros(n, cols.len());
            for (j, c) in cols.iter().enumerate() {
                m.set_column(j, &c.column(0));
            }
            m
        };
        Ok(SplitBases {
            plus: stack(&plus_cols),
            minus: stack(&minus_cols),
            plus_ranks,
            minus_ranks,
        })
    }

    /// Residual of the oddness condition `ΓMΓ = -M`.
    pub fn odd_residual(&self, m: &Matrix) -> f64 {
        max_abs(&(self.conjugate(m) + m))
    }
}

/// Isometries onto the `±1` eigenspaces of a grading.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitBases {
    pub plus: Matrix,
    pub minus: Matrix,
    pub plus_ranks: Vec<usize>,
    pub minus_ranks: Vec<usize>,
}

/// Antilinear involution `a ↦ S·conj(a)·S*` with `S·conj(S) = ε·1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealStructure {
    s: Matrix,
    sign: i8,
}

impl RealStructure {
    pub fn new(s: Matrix, tol: &ToleranceProfile) -> Result<Self> {
        let n = numkit::ensure_square(&s)?;
        numkit::is_unitary(&s, tol).into_result("real structure unitary")?;
        let sc = &s * numkit::conj(&s);
        let plus = max_abs(&(&sc - identity(n)));
        let minus = max_abs(&(&sc + identity(n)));
        let sign = if plus < tol.eq_tol {
            1
        } else if minus < tol.eq_tol {
            -1
        } else {
            return Err(Error::Structural {
                predicate: "real structure involutive",
                residual: plus.min(minus),
            });
        };
        Ok(Self { s, sign })
    }

    /// Entrywise complex conjugation (`S = 1`, `ε = +1`).
    pub fn conjugation(n: usize) -> Self {
        Self {
            s: identity(n),
            sign: 1,
        }
    }

    pub(crate) fn from_parts_unchecked(s: Matrix, sign: i8) -> Self {
        Self { s, sign }
    }

    pub fn implementer(&self) -> &Matrix {
        &self.s
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn dim(&self) -> usize {
        self.s.nrows()
    }

    /// `a^𝔯 = S conj(a) S*`.
    pub fn apply(&self, a: &Matrix) -> Matrix {
        &self.s * numkit::conj(a) * self.s.adjoint()
    }

    /// Residual of `a^𝔯 = sign·a`.
    pub fn residual(&self, a: &Matrix, sign: f64) -> f64 {
        max_abs(&(self.apply(a) - a.scale(sign)))
    }

    pub fn direct_sum(parts: &[&RealStructure]) -> Result<RealStructure> {
        let sign = parts.first().map_or(1, |r| r.sign);
        if parts.iter().any(|r| r.sign != sign) {
            return Err(Error::Composition(
                "real structures with different signs cannot be summed".into(),
            ));
        }
        let blocks: Vec<&Matrix> = parts.iter().map(|r| &r.s).collect();
        Ok(RealStructure {
            s: block_diag(&blocks),
            sign,
        })
    }

    /// Tensor product structure `S_a ⊗ S_b`.
    pub fn tensor(&self, other: &RealStructure) -> RealStructure {
        RealStructure {
            s: numkit::kron(&self.s, &other.s),
            sign: self.sign * other.sign,
        }
    }

    /// Implementer of the induced structure on `range(q)`, `q*·S·conj(q)`;
    /// `range(q)` must be invariant.
    pub fn compress(&self, q: &Matrix) -> Matrix {
        q.adjoint() * &self.s * numkit::conj(q)
    }
}

/// Split `M` into `(M + ΓMΓ)/2` and `(M - ΓMΓ)/2`.
pub fn parity_decompose(m: &Matrix, grading: &Grading) -> Result<(Matrix, Matrix)> {
    numkit::ensure_same_shape(m, grading.gamma(), "parity_decompose")?;
    let g = grading.conjugate(m);
    let even = (m + &g).scale(0.5);
    let odd = m - &even;
    Ok((even, odd))
}

/// `[S,T]_± = ST - (-1)^{|S||T|} TS` for homogeneous `S`, `T`.
pub fn graded_commutator(
    s: &Matrix,
    t: &Matrix,
    grading: &Grading,
    tol: &ToleranceProfile,
) -> Result<Matrix> {
    let ps = grading.parity_of(s, tol)?;
    let pt = grading.parity_of(t, tol)?;
    Ok(s * t - (t * s).scale(ps.koszul(pt)))
}

/// Residuals of the odd self-adjoint unitary axioms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OsuDiagnostics {
    pub hermitian: f64,
    pub unitary: f64,
    pub square_one: f64,
    pub odd: f64,
    /// `‖U^𝔯 - U‖`, when a real structure is present.
    pub real: Option<f64>,
    pub passed: bool,
}

impl OsuDiagnostics {
    pub fn worst(&self) -> f64 {
        [self.hermitian, self.unitary, self.square_one, self.odd, self.real.unwrap_or(0.0)]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn into_result(self) -> Result<()> {
        if self.passed {
            return Ok(());
        }
        let named = [
            ("osu hermitian", self.hermitian),
            ("osu unitary", self.unitary),
            ("osu square-one", self.square_one),
            ("osu odd", self.odd),
            ("osu real", self.real.unwrap_or(0.0)),
        ];
        let (predicate, residual) = named
            .into_iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty");
        Err(Error::Structural {
            predicate,
            residual,
        })
    }
}

/// Total diagnostic: never fails, reports every residual.
pub fn check_osu(
    u: &Matrix,
    grading: &Grading,
    real: Option<&RealStructure>,
    tol: &ToleranceProfile,
) -> OsuDiagnostics {
    if !u.is_square() || u.nrows() != grading.dim() {
        return OsuDiagnostics {
            hermitian: f64::INFINITY,
            unitary: f64::INFINITY,
            square_one: f64::INFINITY,
            odd: f64::INFINITY,
            real: real.map(|_| f64::INFINITY),
            passed: false,
        };
    }
    let n = u.nrows();
    let hermitian = numkit::hermitian_residual(u);
    let unitary = numkit::unitary_residual(u);
    let square_one = max_abs(&(u * u - identity(n)));
    let odd = grading.odd_residual(u);
    let real_res = real.map(|r| {
        if r.dim() == n {
            r.residual(u, 1.0)
        } else {
            f64::INFINITY
        }
    });
    let passed = [hermitian, unitary, square_one, odd, real_res.unwrap_or(0.0)]
        .iter()
        .all(|&x| x.is_finite() && x < tol.eq_tol);
    OsuDiagnostics {
        hermitian,
        unitary,
        square_one,
        odd,
        real: real_res,
        passed,
    }
}

/// An odd self-adjoint unitary together with its grading and optional real
/// structure. Construction always runs [`check_osu`].
#[derive(Debug, Clone, PartialEq)]
pub struct Osu {
    u: Matrix,
    grading: Grading,
    real: Option<RealStructure>,
}

impl Osu {
    pub fn new(
        u: Matrix,
        grading: Grading,
        real: Option<RealStructure>,
        tol: &ToleranceProfile,
    ) -> Result<Self> {
        check_osu(&u, &grading, real.as_ref(), tol).into_result()?;
        Ok(Self { u, grading, real })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.u
    }

    pub fn grading(&self) -> &Grading {
        &self.grading
    }

    pub fn real_structure(&self) -> Option<&RealStructure> {
        self.real.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn into_matrix(self) -> Matrix {
        self.u
    }

    pub fn diagnostics(&self, tol: &ToleranceProfile) -> OsuDiagnostics {
        check_osu(&self.u, &self.grading, self.real.as_ref(), tol)
    }

    /// Same grading and real structure, different operator.
    pub fn with_matrix(&self, u: Matrix, tol: &ToleranceProfile) -> Result<Osu> {
        Osu::new(u, self.grading.clone(), self.real.clone(), tol)
    }

    /// `-U`, again an OSU.
    pub fn negated(&self) -> Osu {
        Osu {
            u: -self.u.clone(),
            grading: self.grading.clone(),
            real: self.real.clone(),
        }
    }

    /// Residual of `UV + VU = 0`.
    pub fn anticommutation_residual(&self, other: &Matrix) -> f64 {
        max_abs(&numkit::anticommutator(&self.u, other))
    }

    pub fn same_structures(&self, other: &Osu) -> bool {
        self.grading == other.grading && self.real == other.real
    }
}

/// Block-diagonal sum `x₁ ⊕ x₂ ⊕ …`.
pub fn direct_sum(osus: &[&Osu], tol: &ToleranceProfile) -> Result<Osu> {
    if osus.is_empty() {
        return Err(Error::Composition("empty direct sum".into()));
    }
    let with_real = osus.iter().filter(|o| o.real.is_some()).count();
    if with_real != 0 && with_real != osus.len() {
        return Err(Error::Composition(
            "either all or none of the summands must carry a real structure".into(),
        ));
    }
    let mats: Vec<&Matrix> = osus.iter().map(|o| &o.u).collect();
    let gradings: Vec<&Grading> = osus.iter().map(|o| &o.grading).collect();
    let real = if with_real > 0 {
        let reals: Vec<&RealStructure> = osus.iter().filter_map(|o| o.real.as_ref()).collect();
        Some(RealStructure::direct_sum(&reals)?)
    } else {
        None
    };
    Osu::new(block_diag(&mats), Grading::direct_sum(&gradings), real, tol)
}

/// `(T - eTe)/2`, the part of `T` anti-commuting with the OSU `e`.
pub fn perturbation_average(t: &Matrix, e: &Osu) -> Result<Matrix> {
    numkit::ensure_same_shape(t, e.matrix(), "perturbation_average")?;
    let eu = e.matrix();
    Ok((t - eu * t * eu).scale(0.5))
}

/// `cos(t)·e + sin(t)·u`, an OSU whenever `e` and `u` anti-commute.
pub fn rotation_path_point(e: &Osu, u: &Matrix, t: f64) -> Matrix {
    e.matrix().scale(t.cos()) + u.scale(t.sin())
}
