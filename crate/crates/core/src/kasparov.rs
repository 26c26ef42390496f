//! Finite Kasparov cycles, graph projections, insulators and their bulk
//! classes.

use serde::Serialize;

use crate::cayley;
use crate::clifford::pauli;
use crate::error::{Error, Result};
use crate::graded::{perturbation_average, Grading, Osu, RealStructure};
use crate::numkit::{self, block2, identity, kron, max_abs, Matrix, ToleranceProfile, I};
use crate::pairing::{self, UnitaryLoop};
use crate::vandaele::{self, ClassInvariants, Coefficient, DkClass};

/// A module `range(basis)` with a left Clifford action, a grading, and an
/// odd self-adjoint operator, all in the coordinates of `basis`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteKasparovCycle {
    basis: Matrix,
    left_gens: Vec<Matrix>,
    op: Matrix,
    grading: Grading,
    real_structure: Option<RealStructure>,
    coefficient: Coefficient,
}

/// Residuals of the cycle axioms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CycleDiagnostics {
    pub basis_isometry: f64,
    pub op_hermitian: f64,
    pub op_odd: f64,
    /// Worst of oddness, unitarity, `g² = ±1` and mutual anti-commutation.
    pub generators: f64,
    /// `max ‖T g + g T‖` over the generators.
    pub anticommutation: f64,
    pub real: Option<f64>,
    pub passed: bool,
}

impl CycleDiagnostics {
    fn structural(&self) -> f64 {
        [self.basis_isometry, self.op_hermitian, self.op_odd, self.generators, self.real.unwrap_or(0.0)]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

fn generator_residual(gens: &[Matrix], grading: &Grading) -> f64 {
    let mut worst = 0.0f64;
    for (i, g) in gens.iter().enumerate() {
        let n = g.nrows();
        worst = worst.max(grading.odd_residual(g));
        worst = worst.max(numkit::unitary_residual(g));
        let sq = g * g;
        let plus = max_abs(&(&sq - identity(n)));
        let minus = max_abs(&(&sq + identity(n)));
        worst = worst.max(plus.min(minus));
        for h in &gens[i + 1..] {
            worst = worst.max(max_abs(&numkit::anticommutator(g, h)));
        }
    }
    worst
}

impl FiniteKasparovCycle {
    /// Validated constructor: every axiom, including anti-commutation of
    /// the operator with the left action.
    pub fn new(
        basis: Matrix,
        left_gens: Vec<Matrix>,
        op: Matrix,
        grading: Grading,
        real_structure: Option<RealStructure>,
        coefficient: Coefficient,
        tol: &ToleranceProfile,
    ) -> Result<Self> {
        let c = Self::raw(basis, left_gens, op, grading, real_structure, coefficient, tol)?;
        let d = c.diagnostics(tol);
        let scale = max_abs(&c.op).max(1.0);
        numkit::Check::against(d.anticommutation, tol.eq_tol * scale).into_result("cycle anti-commutation")?;
        Ok(c)
    }

    /// Constructor that accepts an operator not yet anti-commuting with the
    /// left action; see [`FiniteKasparovCycle::normalize`].
    pub fn raw(
        basis: Matrix,
        left_gens: Vec<Matrix>,
        op: Matrix,
        grading: Grading,
        real_structure: Option<RealStructure>,
        coefficient: Coefficient,
        tol: &ToleranceProfile,
    ) -> Result<Self> {
        let r = numkit::ensure_square(&op)?;
        if basis.ncols() != r || grading.dim() != r {
            return Err(Error::Shape(format!(
                "module of dimension {} but operator is {r}x{r} and grading {}x{}",
                basis.ncols(),
                grading.dim(),
                grading.dim()
            )));
        }
        for g in &left_gens {
            if g.shape() != (r, r) {
                return Err(Error::Shape("left generator does not act on the module".into()));
            }
        }
        if let Some(s) = &real_structure {
            if s.dim() != r {
                return Err(Error::Shape("real structure does not act on the module".into()));
            }
        }
        numkit::ensure_finite(&op)?;
        let c = Self {
            basis,
            left_gens,
            op,
            grading,
            real_structure,
            coefficient,
        };
        let d = c.diagnostics(tol);
        let scale = max_abs(&c.op).max(1.0);
        if d.structural() >= tol.eq_tol * scale {
            let named = [
                ("module basis orthonormal", d.basis_isometry),
                ("cycle operator hermitian", d.op_hermitian),
                ("cycle operator odd", d.op_odd),
                ("left Clifford relations", d.generators),
                ("cycle operator real", d.real.unwrap_or(0.0)),
            ];
            let (predicate, residual) = named.into_iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
            return Err(Error::Structural { predicate, residual });
        }
        Ok(c)
    }

    pub fn empty(ambient: usize) -> Self {
        Self {
            basis: numkit::zeros(ambient, 0),
            left_gens: Vec::new(),
            op: numkit::zeros(0, 0),
            grading: Grading::trivial(0),
            real_structure: None,
            coefficient: Coefficient::none(),
        }
    }

    pub fn diagnostics(&self, tol: &ToleranceProfile) -> CycleDiagnostics {
        let r = self.dim();
        let basis_isometry = max_abs(&(self.basis.adjoint() * &self.basis - identity(r)));
        let op_hermitian = numkit::hermitian_residual(&self.op);
        let op_odd = self.grading.odd_residual(&self.op);
        let generators = generator_residual(&self.left_gens, &self.grading);
        let anticommutation = self
            .left_gens
            .iter()
            .map(|g| max_abs(&numkit::anticommutator(g, &self.op)))
            .fold(0.0, f64::max);
        let real = self.real_structure.as_ref().map(|s| s.residual(&self.op, 1.0));
        let scale = max_abs(&self.op).max(1.0);
        let passed = [basis_isometry, op_hermitian, op_odd, generators, anticommutation, real.unwrap_or(0.0)]
            .iter()
            .all(|x| x.is_finite() && *x < tol.eq_tol * scale);
        CycleDiagnostics {
            basis_isometry,
            op_hermitian,
            op_odd,
            generators,
            anticommutation,
            real,
            passed,
        }
    }

    /// Replace the operator by the part anti-commuting with the single left
    /// generator.
    pub fn normalize(&self, tol: &ToleranceProfile) -> Result<FiniteKasparovCycle> {
        let (_, t) = self.normalized_pair(tol)?;
        FiniteKasparovCycle::new(
            self.basis.clone(),
            self.left_gens.clone(),
            t,
            self.grading.clone(),
            self.real_structure.clone(),
            self.coefficient.clone(),
            tol,
        )
    }

    /// `(e, T)` with `e` the left generator as an OSU and `T` averaged to
    /// anti-commute with it.
    pub fn normalized_pair(&self, tol: &ToleranceProfile) -> Result<(Osu, Matrix)> {
        if self.left_gens.len() != 1 {
            return Err(Error::Precondition(format!(
                "expected exactly one left generator, found {}",
                self.left_gens.len()
            )));
        }
        let e = Osu::new(
            self.left_gens[0].clone(),
            self.grading.clone(),
            self.real_structure.clone(),
            tol,
        )?;
        let t = if e.anticommutation_residual(&self.op) < tol.eq_tol * max_abs(&self.op).max(1.0) {
            self.op.clone()
        } else {
            perturbation_average(&self.op, &e)?
        };
        let residual = e.anticommutation_residual(&t);
        numkit::Check::against(residual, tol.eq_tol * max_abs(&t).max(1.0)).into_result("normalized anti-commutation")?;
        Ok((e, t))
    }

    pub fn dim(&self) -> usize {
        self.op.nrows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// Projection onto the module in the ambient space.
    pub fn module_projector(&self) -> Matrix {
        &self.basis * self.basis.adjoint()
    }

    pub fn op(&self) -> &Matrix {
        &self.op
    }

    /// The operator extended by zero to the ambient space.
    pub fn ambient_op(&self) -> Matrix {
        &self.basis * &self.op * self.basis.adjoint()
    }

    pub fn left_gens(&self) -> &[Matrix] {
        &self.left_gens
    }

    pub fn grading(&self) -> &Grading {
        &self.grading
    }

    pub fn real_structure(&self) -> Option<&RealStructure> {
        self.real_structure.as_ref()
    }

    pub fn coefficient(&self) -> &Coefficient {
        &self.coefficient
    }

    pub fn is_invertible(&self, tol: &ToleranceProfile) -> Result<bool> {
        if self.is_empty() {
            return Ok(true);
        }
        Ok(numkit::svd(&self.op).smallest() > tol.kernel_tol)
    }

    /// Invertible operator anti-commuting with the left action: the class
    /// is zero.
    pub fn is_degenerate(&self, tol: &ToleranceProfile) -> Result<bool> {
        let d = self.diagnostics(tol);
        Ok(d.anticommutation < tol.eq_tol * max_abs(&self.op).max(1.0) && self.is_invertible(tol)?)
    }

    /// `T(1 + T²)^{-1/2}`.
    pub fn bounded_transform(&self, tol: &ToleranceProfile) -> Result<Matrix> {
        if self.is_empty() {
            return Ok(self.op.clone());
        }
        numkit::mat_func_hermitian(&self.op, |x| x / (1.0 + x * x).sqrt(), tol)
    }

    pub fn direct_sum(&self, other: &FiniteKasparovCycle, tol: &ToleranceProfile) -> Result<FiniteKasparovCycle> {
        if self.left_gens.len() != other.left_gens.len() {
            return Err(Error::Composition("cycles carry different Clifford actions".into()));
        }
        let real = match (&self.real_structure, &other.real_structure) {
            (Some(a), Some(b)) => Some(RealStructure::direct_sum(&[a, b])?),
            (None, None) => None,
            _ => return Err(Error::Composition("real structure on one summand only".into())),
        };
        let gens = self
            .left_gens
            .iter()
            .zip(&other.left_gens)
            .map(|(a, b)| numkit::block_diag(&[a, b]))
            .collect();
        let coefficient = match (&self.coefficient.symmetry, &other.coefficient.symmetry) {
            (Some(a), Some(b)) => Coefficient::clifford(numkit::block_diag(&[a, b])),
            _ => Coefficient::none(),
        };
        FiniteKasparovCycle::new(
            numkit::block_diag(&[&self.basis, &other.basis]),
            gens,
            numkit::block_diag(&[&self.op, &other.op]),
            Grading::direct_sum(&[&self.grading, &other.grading]),
            real,
            coefficient,
            tol,
        )
    }
}

/// Which Clifford generator acts on the left of an ungraded cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CliffordSide {
    /// `1 ⊗ σ₂`, squaring to one.
    Positive,
    /// `1 ⊗ iσ₂`, squaring to minus one.
    Negative,
}

/// `(Cl₁, range(u-1) ⊗ C², Ci(u) ⊗ σ₁)` graded by `1 ⊗ σ₃`.
pub fn ungraded_cycle(u: &Matrix, side: CliffordSide, tol: &ToleranceProfile) -> Result<FiniteKasparovCycle> {
    let ci = cayley::cayley_inv(u, tol)?;
    let r = ci.dim();
    let gen = match side {
        CliffordSide::Positive => kron(&identity(r), &pauli::s2()),
        CliffordSide::Negative => kron(&identity(r), &pauli::s2()) * I,
    };
    FiniteKasparovCycle::new(
        kron(&ci.basis, &identity(2)),
        vec![gen],
        kron(&ci.compressed, &pauli::s1()),
        Grading::standard(r),
        None,
        Coefficient::none(),
        tol,
    )
}

/// Symmetries attached to a Hamiltonian.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SymmetryData {
    pub real_structure: Option<RealStructure>,
    /// Chiral grading.
    pub grading: Option<Grading>,
    pub trs: bool,
    pub phs: bool,
    pub chiral: bool,
    /// Reference OSU for chiral classes, odd for `grading`.
    pub reference: Option<Matrix>,
}

/// Residuals of the declared flags.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SymmetryResiduals {
    pub trs: Option<f64>,
    pub phs: Option<f64>,
    pub chiral: Option<f64>,
}

impl SymmetryData {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn chiral(grading: Grading) -> Self {
        Self {
            grading: Some(grading),
            chiral: true,
            ..Self::default()
        }
    }

    /// Residual of every declared flag; a flag failing `eq_tol` is a
    /// verification error.
    pub fn verify(&self, h: &Matrix, tol: &ToleranceProfile) -> Result<SymmetryResiduals> {
        let scale = max_abs(h).max(1.0);
        let mut out = SymmetryResiduals::default();
        let need_real = || {
            self.real_structure.as_ref().ok_or_else(|| {
                Error::Precondition("a TRS or PHS flag needs a real structure".into())
            })
        };
        if self.trs {
            let r = need_real()?;
            numkit::ensure_same_shape(r.implementer(), h, "real structure")?;
            out.trs = Some(r.residual(h, 1.0));
        }
        if self.phs {
            let r = need_real()?;
            numkit::ensure_same_shape(r.implementer(), h, "real structure")?;
            out.phs = Some(r.residual(h, -1.0));
        }
        if self.chiral {
            let g = self
                .grading
                .as_ref()
                .ok_or_else(|| Error::Precondition("a chiral flag needs a grading".into()))?;
            numkit::ensure_same_shape(g.gamma(), h, "chiral grading")?;
            out.chiral = Some(g.odd_residual(h));
        }
        for (flag, res) in [("trs", out.trs), ("phs", out.phs), ("chiral", out.chiral)] {
            if let Some(r) = res {
                if r >= tol.eq_tol * scale {
                    return Err(Error::Verification { flag, residual: r });
                }
            }
        }
        Ok(out)
    }
}

/// A gapped Hamiltonian with its flattening. Families sampled on a loop
/// are stored block diagonally.
#[derive(Debug, Clone, PartialEq)]
pub struct Insulator {
    h: Matrix,
    gap: f64,
    flattened: Matrix,
    symmetry: SymmetryData,
    blocks: Option<Vec<usize>>,
    residuals: SymmetryResiduals,
    flattened_residuals: SymmetryResiduals,
}

impl Insulator {
    pub fn h(&self) -> &Matrix {
        &self.h
    }

    /// Smallest `|λ|` over the spectrum.
    pub fn gap(&self) -> f64 {
        self.gap
    }

    /// `h|h|⁻¹`.
    pub fn flattened(&self) -> &Matrix {
        &self.flattened
    }

    pub fn symmetry(&self) -> &SymmetryData {
        &self.symmetry
    }

    pub fn blocks(&self) -> Option<&[usize]> {
        self.blocks.as_deref()
    }

    pub fn residuals(&self) -> SymmetryResiduals {
        self.residuals
    }

    /// The same flags checked on `h̄`.
    pub fn flattened_residuals(&self) -> SymmetryResiduals {
        self.flattened_residuals
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    /// Fermi projection `(1 - h̄)/2`.
    pub fn fermi_projection(&self) -> Matrix {
        (identity(self.dim()) - &self.flattened).scale(0.5)
    }
}

/// Spectral flattening with the gap measured from the spectrum.
pub fn flatten(h: &Matrix, delta_hint: Option<f64>, symmetry: SymmetryData, tol: &ToleranceProfile) -> Result<Insulator> {
    flatten_blocks(h, delta_hint, symmetry, None, tol)
}

/// Flatten a family `k ↦ h(k)` sampled on a loop.
pub fn flatten_family(hs: &[Matrix], symmetry: SymmetryData, tol: &ToleranceProfile) -> Result<Insulator> {
    if hs.is_empty() {
        return Err(Error::Domain("empty family".into()));
    }
    let refs: Vec<&Matrix> = hs.iter().collect();
    let blocks = hs.iter().map(|m| m.nrows()).collect();
    flatten_blocks(&numkit::block_diag(&refs), None, symmetry, Some(blocks), tol)
}

fn flatten_blocks(
    h: &Matrix,
    delta_hint: Option<f64>,
    symmetry: SymmetryData,
    blocks: Option<Vec<usize>>,
    tol: &ToleranceProfile,
) -> Result<Insulator> {
    let residuals = symmetry.verify(h, tol)?;
    let eig = numkit::eig_hermitian(h, tol)?;
    let nearest = eig.eigenvalues.iter().copied().min_by(|a, b| a.abs().total_cmp(&b.abs()));
    let gap = nearest.map_or(f64::INFINITY, f64::abs);
    if gap <= tol.kernel_tol {
        return Err(Error::Gapless {
            nearest: nearest.unwrap_or(0.0),
        });
    }
    if let Some(d) = delta_hint {
        if d > gap * (1.0 + 1e-9) {
            return Err(Error::Gapless {
                nearest: nearest.unwrap_or(0.0),
            });
        }
    }
    let flattened = eig.apply(f64::signum);
    let flattened_residuals = symmetry.verify(&flattened, tol)?;
    Ok(Insulator {
        h: h.clone(),
        gap,
        flattened,
        symmetry,
        blocks,
        residuals,
        flattened_residuals,
    })
}

/// The projection onto the graph of `T₊ = Q₋* T Q₊`, with the data of its
/// partial isometry `v₊`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphProjection {
    pub projection: Matrix,
    /// `X₊ → X`, `v₊ = Q₊ (1+T₊*T₊)^{-1/2} + Q₋ T₊ (1+T₊*T₊)^{-1/2}`;
    /// stored as its adjoint so that `v₊v₊* = 1` and `v₊*v₊ = P`.
    pub v_plus: Matrix,
    pub projection_residual: f64,
    pub isometry_residual: f64,
    pub range_residual: f64,
    /// `‖P - P_{X₋}‖`.
    pub defect_norm: f64,
}

pub fn graph_projection(t: &Matrix, grading: &Grading, tol: &ToleranceProfile) -> Result<GraphProjection> {
    numkit::ensure_same_shape(t, grading.gamma(), "graph_projection")?;
    numkit::require_hermitian(t, tol)?;
    let defect = grading.odd_residual(t);
    if defect >= tol.eq_tol * max_abs(t).max(1.0) {
        return Err(Error::Parity { defect });
    }
    let split = grading.split_bases(None, tol)?;
    let (qp, qm) = (&split.plus, &split.minus);
    let tp = qm.adjoint() * t * qp;
    let np = qp.ncols();
    let gram = identity(np) + tp.adjoint() * &tp;
    let a = numkit::inverse(&gram)?;
    let root = numkit::mat_func_hermitian(&gram, |x| 1.0 / x.sqrt(), tol)?;
    let p = qp * &a * qp.adjoint()
        + qp * &a * tp.adjoint() * qm.adjoint()
        + qm * &tp * &a * qp.adjoint()
        + qm * &tp * &a * tp.adjoint() * qm.adjoint();
    let p = (&p + p.adjoint()).scale(0.5);
    let v = (qp * &root + qm * &tp * &root).adjoint();
    let n = t.nrows();
    let pm = qm * qm.adjoint();
    Ok(GraphProjection {
        projection_residual: numkit::projection_residual(&p),
        isometry_residual: max_abs(&(&v * v.adjoint() - identity(np))),
        range_residual: max_abs(&(v.adjoint() * &v - &p)),
        defect_norm: numkit::opnorm(&(&p - pm)),
        projection: p,
        v_plus: v,
    })
    .inspect(|g| {
        debug_assert_eq!(g.projection.nrows(), n);
    })
}

/// `p_B(x,y) = (1+x²+y²)⁻¹ [[1, x-iy], [x+iy, x²+y²]]`.
pub fn bott_projector(x: f64, y: f64) -> Matrix {
    let r2 = x * x + y * y;
    let s = 1.0 / (1.0 + r2);
    numkit::from_rows(&[
        &[numkit::c(s, 0.0), numkit::c(s * x, -s * y)],
        &[numkit::c(s * x, s * y), numkit::c(s * r2, 0.0)],
    ])
}

/// Symmetry classes reached by the bulk constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SymmetryClass {
    /// No symmetry: Fermi projection in `K₀`.
    A,
    /// Chiral, no real structure: `u_h` in `K₁`.
    AIII,
    /// Time reversal: Fermi projection in `KO₀`.
    Trs,
    /// Particle-hole: `[h̄⊗ρ] - [iJ⊗ρ]` in `KO₂`.
    Phs,
    /// Chiral with real grading and `(eh̄)^𝔯 = eh̄`: `u_h` in `KO₁`.
    ChiralRealEven,
    /// Chiral with real grading and `(eh̄)^𝔯 = -eh̄`: `iu_h` in `KO₁`.
    ChiralRealOdd,
    /// Chiral with imaginary grading and `(eh̄)^𝔯 = eh̄`: `u_h` in `KO₋₁`.
    ChiralImaginaryEven,
    /// Chiral with imaginary grading and `(eh̄)^𝔯 = -eh̄`: `v_h` in `KO₃`.
    ChiralImaginaryOdd,
}

impl SymmetryClass {
    pub fn label(self) -> &'static str {
        match self {
            SymmetryClass::A => "A",
            SymmetryClass::AIII => "AIII",
            SymmetryClass::Trs => "TRS",
            SymmetryClass::Phs => "PHS",
            SymmetryClass::ChiralRealEven => "chiral-real-even",
            SymmetryClass::ChiralRealOdd => "chiral-real-odd",
            SymmetryClass::ChiralImaginaryEven => "chiral-imaginary-even",
            SymmetryClass::ChiralImaginaryOdd => "chiral-imaginary-odd",
        }
    }

    pub fn target_group(self) -> &'static str {
        match self {
            SymmetryClass::A => "K0",
            SymmetryClass::AIII => "K1",
            SymmetryClass::Trs => "KO0",
            SymmetryClass::Phs => "KO2",
            SymmetryClass::ChiralRealEven | SymmetryClass::ChiralRealOdd => "KO1",
            SymmetryClass::ChiralImaginaryEven => "KO-1",
            SymmetryClass::ChiralImaginaryOdd => "KO3",
        }
    }

    pub fn is_chiral(self) -> bool {
        !matches!(self, SymmetryClass::A | SymmetryClass::Trs | SymmetryClass::Phs)
    }
}

/// `1 ⊗ σ₁` for `Γ = 1 ⊗ σ₃`, the swap for `Γ = diag(1, -1)`, and otherwise
/// `Q₋Q₊* + Q₊Q₋*` block by block.
pub fn default_reference(grading: &Grading, blocks: Option<&[usize]>, tol: &ToleranceProfile) -> Result<Matrix> {
    let n = grading.dim();
    if n.is_multiple_of(2) && n > 0 {
        let standard = Grading::standard(n / 2);
        if max_abs(&(grading.gamma() - standard.gamma())) == 0.0 {
            return Ok(kron(&identity(n / 2), &pauli::s1()));
        }
        let split = Grading::split(n / 2, n / 2);
        if max_abs(&(grading.gamma() - split.gamma())) == 0.0 {
            let z = numkit::zeros(n / 2, n / 2);
            return Ok(block2(&z, &identity(n / 2), &identity(n / 2), &z));
        }
    }
    let s = grading.split_bases(blocks, tol)?;
    if s.plus_ranks != s.minus_ranks {
        return Err(Error::Precondition(
            "grading has unequal even and odd dimensions; supply a reference OSU".into(),
        ));
    }
    let m = &s.minus * s.plus.adjoint();
    Ok(&m + m.adjoint())
}

fn reference_osu(ins: &Insulator, tol: &ToleranceProfile) -> Result<Osu> {
    let g = ins
        .symmetry
        .grading
        .clone()
        .ok_or_else(|| Error::Precondition("chiral classes need a grading".into()))?;
    let e = match &ins.symmetry.reference {
        Some(e) => e.clone(),
        None => default_reference(&g, ins.blocks(), tol)?,
    };
    Osu::new(e, g, None, tol)
}

fn sign_of(a: &Matrix, image: &Matrix, tol: &ToleranceProfile, flag: &'static str) -> Result<(i8, f64)> {
    let plus = max_abs(&(image - a));
    let minus = max_abs(&(image + a));
    let scale = max_abs(a).max(1.0);
    if plus < tol.eq_tol * scale {
        Ok((1, plus))
    } else if minus < tol.eq_tol * scale {
        Ok((-1, minus))
    } else {
        Err(Error::Verification {
            flag,
            residual: plus.min(minus),
        })
    }
}

/// Class label from the verified flags.
pub fn detect_symmetry_class(ins: &Insulator, tol: &ToleranceProfile) -> Result<SymmetryClass> {
    let s = &ins.symmetry;
    s.verify(&ins.h, tol)?;
    let real = s.real_structure.as_ref().filter(|_| s.trs || s.phs);
    match (s.chiral, real) {
        (false, None) => Ok(SymmetryClass::A),
        (false, Some(_)) if s.trs && s.phs => Err(Error::Verification {
            flag: "trs and phs with one real structure",
            residual: max_abs(&ins.h),
        }),
        (false, Some(_)) if s.trs => Ok(SymmetryClass::Trs),
        (false, Some(_)) => Ok(SymmetryClass::Phs),
        (true, None) => Ok(SymmetryClass::AIII),
        (true, Some(r)) => {
            let g = s.grading.as_ref().expect("verified chiral flag");
            let (grading_sign, _) = sign_of(g.gamma(), &r.apply(g.gamma()), tol, "grading real or imaginary")?;
            let e = reference_osu(ins, tol)?;
            let eh = e.matrix() * &ins.flattened;
            let (sign, _) = sign_of(&eh, &r.apply(&eh), tol, "reference times flattened real or imaginary")?;
            Ok(match (grading_sign, sign) {
                (1, 1) => SymmetryClass::ChiralRealEven,
                (1, _) => SymmetryClass::ChiralRealOdd,
                (_, 1) => SymmetryClass::ChiralImaginaryEven,
                _ => SymmetryClass::ChiralImaginaryOdd,
            })
        }
    }
}

/// `u_h = Π₊ e h̄ Π₊` in coordinates of `X₊`, block by block for families.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiralReduction {
    pub u: Matrix,
    /// Isometry `X₊ → X`.
    pub plus_basis: Matrix,
    pub ranks: Vec<usize>,
    pub unitarity_residual: f64,
}

pub fn chiral_reduction(ins: &Insulator, e: &Osu, tol: &ToleranceProfile) -> Result<ChiralReduction> {
    let g = ins
        .symmetry
        .grading
        .as_ref()
        .filter(|_| ins.symmetry.chiral)
        .ok_or_else(|| Error::Precondition("chiral reduction needs a chiral grading".into()))?;
    if e.grading() != g {
        return Err(Error::Composition("reference OSU is graded differently".into()));
    }
    let split = g.split_bases(ins.blocks(), tol)?;
    let u = split.plus.adjoint() * e.matrix() * &ins.flattened * &split.plus;
    let unitarity_residual = numkit::unitary_residual(&u);
    numkit::Check::against(unitarity_residual, tol.eq_tol).into_result("reduced unitary")?;
    Ok(ChiralReduction {
        u,
        plus_basis: split.plus,
        ranks: split.plus_ranks,
        unitarity_residual,
    })
}

/// Blocks of a block-diagonal unitary as a loop on the uniform grid.
pub fn family_loop(u: &Matrix, ranks: &[usize], tol: &ToleranceProfile) -> Result<UnitaryLoop> {
    let mut off = 0;
    let mut samples = Vec::with_capacity(ranks.len());
    for &r in ranks {
        samples.push(u.view((off, off), (r, r)).into_owned());
        off += r;
    }
    let n = samples.len();
    let grid = (0..n).map(|j| std::f64::consts::TAU * j as f64 / n as f64).collect();
    UnitaryLoop::new(samples, grid, tol)
}

/// Optional base-point data for [`bulk_class`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BulkOptions {
    /// Reference OSU for chiral classes.
    pub reference: Option<Matrix>,
    /// Real skew unitary `J` for the particle-hole class.
    pub j: Option<Matrix>,
}

/// Integer bulk invariants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BulkInvariants {
    /// Rank of the Fermi projection.
    pub fermi_rank: Option<i64>,
    /// Winding of `det u_h` over a sampled family.
    pub winding: Option<i64>,
    pub class: Option<ClassInvariants>,
}

/// A bulk class: the van Daele difference, its Kasparov cycle, and the
/// reduced data of the matching construction.
#[derive(Debug, Clone, PartialEq)]
pub struct BulkClass {
    pub class: SymmetryClass,
    pub dk: Option<DkClass>,
    pub cycle: FiniteKasparovCycle,
    pub fermi_projection: Option<Matrix>,
    /// `u_h`, `iu_h` or `v_h`.
    pub reduced_unitary: Option<Matrix>,
    /// Residual of the reality relation the reduced unitary must satisfy.
    pub reality_residual: Option<f64>,
    pub invariants: BulkInvariants,
}

fn plain_rho_class(ins: &Insulator, real: Option<RealStructure>, y: Matrix, tol: &ToleranceProfile) -> Result<DkClass> {
    let n = ins.dim();
    let grading = Grading::standard(n);
    let x = Osu::new(kron(&ins.flattened, &pauli::s1()), grading.clone(), real.clone(), tol)?;
    let y = Osu::new(kron(&y, &pauli::s1()), grading, real, tol)?;
    let r = kron(&identity(n), &pauli::s1());
    Ok(DkClass::pair(x, y.clone(), Coefficient::clifford(r), tol)?.with_base_point(y))
}

/// Default `J = 1 ⊗ (-iσ₂)` on an even-dimensional model.
pub fn default_j(n: usize) -> Result<Matrix> {
    if !n.is_multiple_of(2) {
        return Err(Error::Precondition(
            "the particle-hole class needs J with J* = -J, J² = -1, J real; none exists by default in odd dimension".into(),
        ));
    }
    Ok(kron(&identity(n / 2), &(pauli::s2() * numkit::c(0.0, -1.0))))
}

pub fn bulk_class(ins: &Insulator, options: &BulkOptions, tol: &ToleranceProfile) -> Result<BulkClass> {
    let class = detect_symmetry_class(ins, tol)?;
    let n = ins.dim();
    let sym = &ins.symmetry;
    match class {
        SymmetryClass::A | SymmetryClass::Trs => {
            let real = if class == SymmetryClass::Trs {
                sym.real_structure.as_ref().map(|r| r.tensor(&RealStructure::conjugation(2)))
            } else {
                None
            };
            let dk = plain_rho_class(ins, real, identity(n), tol)?;
            let inv = dk.invariants(tol)?;
            let cycle = vandaele::dk_to_kk(&dk, tol)?;
            let p = ins.fermi_projection();
            let rank = p.trace().re.round() as i64;
            Ok(BulkClass {
                class,
                dk: Some(dk),
                cycle,
                fermi_projection: Some(p),
                reduced_unitary: None,
                reality_residual: None,
                invariants: BulkInvariants {
                    fermi_rank: Some(rank),
                    winding: None,
                    class: Some(inv),
                },
            })
        }
        SymmetryClass::Phs => {
            let r = sym.real_structure.as_ref().expect("detected PHS");
            let j = match &options.j {
                Some(j) => j.clone(),
                None => default_j(n)?,
            };
            numkit::ensure_same_shape(&j, &ins.h, "J")?;
            let skew = numkit::skew_residual(&j).max(max_abs(&(&j * &j + identity(n))));
            let reality = r.residual(&j, 1.0);
            if skew.max(reality) >= tol.eq_tol {
                return Err(Error::Precondition(format!(
                    "the particle-hole class needs J with J* = -J, J² = -1 and J real (residuals {skew:.2e}, {reality:.2e})"
                )));
            }
            let real = RealStructure::from_parts_unchecked(
                kron(r.implementer(), &pauli::s3()),
                r.sign(),
            );
            let dk = plain_rho_class(ins, Some(real), &j * I, tol)?;
            let inv = dk.invariants(tol)?;
            let cycle = vandaele::dk_to_kk(&dk, tol)?;
            Ok(BulkClass {
                class,
                reality_residual: Some(dk.x().diagnostics(tol).real.unwrap_or(0.0)),
                dk: Some(dk),
                cycle,
                fermi_projection: None,
                reduced_unitary: None,
                invariants: BulkInvariants {
                    fermi_rank: None,
                    winding: None,
                    class: Some(inv),
                },
            })
        }
        _ => {
            let e = match &options.reference {
                Some(m) => Osu::new(m.clone(), sym.grading.clone().expect("chiral"), None, tol)?,
                None => reference_osu(ins, tol)?,
            };
            let red = chiral_reduction(ins, &e, tol)?;
            let x = e.with_matrix(ins.flattened.clone(), tol)?;
            let coefficient = match ins.blocks() {
                Some(b) => Coefficient::family(b.to_vec()),
                None => Coefficient::none(),
            };
            let dk = DkClass::pair(x, e.clone(), coefficient, tol)?.with_base_point(e.clone());
            let inv = dk.invariants(tol)?;
            let winding = match ins.blocks() {
                Some(b) if b.len() >= 3 => Some(pairing::winding_number(&family_loop(&red.u, &red.ranks, tol)?)?),
                _ => None,
            };
            let (reduced, side) = match class {
                SymmetryClass::ChiralRealOdd => (&red.u * I, CliffordSide::Positive),
                SymmetryClass::ChiralImaginaryEven => (red.u.clone(), CliffordSide::Negative),
                SymmetryClass::ChiralImaginaryOdd => {
                    let z = numkit::zeros(red.u.nrows(), red.u.ncols());
                    (block2(&z, &red.u, &red.u, &z), CliffordSide::Negative)
                }
                _ => (red.u.clone(), CliffordSide::Positive),
            };
            let reality_residual = match sym.real_structure.as_ref().filter(|_| sym.trs || sym.phs) {
                Some(r) => Some(reduced_reality(class, r, &e, &red, tol)?),
                None => None,
            };
            let cycle = ungraded_cycle(&reduced, side, tol)?;
            Ok(BulkClass {
                class,
                dk: Some(dk),
                cycle,
                fermi_projection: None,
                reduced_unitary: Some(reduced),
                reality_residual,
                invariants: BulkInvariants {
                    fermi_rank: None,
                    winding,
                    class: Some(inv),
                },
            })
        }
    }
}

/// Residual of the relation the reduced unitary satisfies under the
/// induced antiunitary on `X₊`: `u^𝔯 = u`, `u^𝔯 = -u`, `u^𝔯 = u*` or
/// `u^𝔯 = -u*` in the four chiral real cases.
fn reduced_reality(
    class: SymmetryClass,
    r: &RealStructure,
    e: &Osu,
    red: &ChiralReduction,
    _tol: &ToleranceProfile,
) -> Result<f64> {
    let q = &red.plus_basis;
    let s = match class {
        SymmetryClass::ChiralRealEven | SymmetryClass::ChiralRealOdd => r.compress(q),
        _ => q.adjoint() * e.matrix() * r.implementer() * numkit::conj(q),
    };
    let image = &s * numkit::conj(&red.u) * s.adjoint();
    let target = match class {
        SymmetryClass::ChiralRealEven => red.u.clone(),
        SymmetryClass::ChiralRealOdd => -red.u.clone(),
        SymmetryClass::ChiralImaginaryEven => red.u.adjoint(),
        _ => -red.u.adjoint(),
    };
    Ok(max_abs(&(image - target)))
}
