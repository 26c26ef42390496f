//! Van Daele classes as formal differences of OSUs, the standard
//! isomorphisms between their presentations, and the cycle-level maps to
//! and from finite Kasparov cycles.

use serde::Serialize;

use crate::cayley::{self, graded_cayley, graded_cayley_inv_blocks};
use crate::clifford::pauli;
use crate::error::{Error, Result};
use crate::graded::{check_osu, direct_sum, Grading, Osu, Parity, RealStructure};
use crate::kasparov::FiniteKasparovCycle;
use crate::numkit::{self, block_diag, block2, identity, kron, max_abs, Matrix, ToleranceProfile};
use crate::pairing;

/// Largest matrix size reachable by base-point padding.
pub const STABILIZATION_CAP: usize = 4096;

/// Extra structure on the coefficient algebra that makes integer
/// invariants computable.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Coefficient {
    /// Odd Hermitian unitary commuting with every representative
    /// (a right Clifford generator, `1 ⊗ ρ` for `A ⊗ Cl₁`).
    pub symmetry: Option<Matrix>,
    /// Block sizes of a family sampled on an ordered loop of parameters.
    pub blocks: Option<Vec<usize>>,
}

impl Coefficient {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn clifford(symmetry: Matrix) -> Self {
        Self {
            symmetry: Some(symmetry),
            blocks: None,
        }
    }

    pub fn family(blocks: Vec<usize>) -> Self {
        Self {
            symmetry: None,
            blocks: Some(blocks),
        }
    }

    /// Restrict to the subspace spanned by `basis`, whose columns come in
    /// consecutive groups of `ranks` per block.
    pub fn compress(&self, basis: &Matrix, ranks: Option<Vec<usize>>) -> Coefficient {
        Coefficient {
            symmetry: self.symmetry.as_ref().map(|r| numkit::compress(r, basis)),
            blocks: ranks,
        }
    }

    fn check(&self, n: usize, reps: &[&Matrix], tol: &ToleranceProfile) -> Result<()> {
        if let Some(b) = &self.blocks {
            if b.iter().sum::<usize>() != n {
                return Err(Error::Shape(format!(
                    "family blocks sum to {}, representatives are {n}x{n}",
                    b.iter().sum::<usize>()
                )));
            }
        }
        if let Some(r) = &self.symmetry {
            numkit::ensure_same_shape(r, reps[0], "coefficient symmetry")?;
            let res = reps
                .iter()
                .map(|x| max_abs(&numkit::commutator(r, x)))
                .fold(numkit::unitary_residual(r), f64::max);
            numkit::Check::against(res, tol.eq_tol).into_result("coefficient symmetry")?;
        }
        Ok(())
    }
}

/// Integer invariants of a class. `None` marks an invariant the
/// coefficient data does not support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClassInvariants {
    /// `(sig₊(yR) - sig₊(xR))/2` for the coefficient symmetry `R`; the rank
    /// of the Fermi projection for `[h̄⊗ρ] - [1⊗ρ]`.
    pub clifford_signature: Option<i64>,
    /// Winding of `k ↦ det(x₋₊(k)) / det(y₋₊(k))` over a sampled family.
    pub winding: Option<i64>,
}

/// How equality of two classes was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EqualityStatus {
    EqualByPath,
    EqualByInvariants,
    DistinctByInvariants,
    Unknown,
}

/// Formal difference `[x] - [y]` of OSUs with common grading.
#[derive(Debug, Clone, PartialEq)]
pub struct DkClass {
    x_reps: Vec<Osu>,
    y_reps: Vec<Osu>,
    base_point: Option<Osu>,
    coefficient: Coefficient,
    x: Osu,
    y: Osu,
}

impl DkClass {
    /// Sums the representatives on each side; pads the smaller side with
    /// copies of the base point when dimensions differ.
    pub fn new(
        x_reps: Vec<Osu>,
        y_reps: Vec<Osu>,
        base_point: Option<Osu>,
        coefficient: Coefficient,
        tol: &ToleranceProfile,
    ) -> Result<Self> {
        if x_reps.is_empty() || y_reps.is_empty() {
            return Err(Error::Composition("a class needs representatives on both sides".into()));
        }
        let mut xs: Vec<&Osu> = x_reps.iter().collect();
        let mut ys: Vec<&Osu> = y_reps.iter().collect();
        let dim = |v: &[&Osu]| v.iter().map(|o| o.dim()).sum::<usize>();
        if dim(&xs) != dim(&ys) {
            let e = base_point.as_ref().ok_or_else(|| {
                Error::Composition(format!(
                    "representative sizes {} and {} differ and no base point is available",
                    dim(&xs),
                    dim(&ys)
                ))
            })?;
            if coefficient != Coefficient::none() {
                return Err(Error::Composition(
                    "base-point padding is not defined for classes with coefficient data".into(),
                ));
            }
            loop {
                let (dx, dy) = (dim(&xs), dim(&ys));
                if dx == dy {
                    break;
                }
                if dx.max(dy) + e.dim() > STABILIZATION_CAP {
                    return Err(Error::Capacity {
                        requested: dx.max(dy) + e.dim(),
                        limit: STABILIZATION_CAP,
                    });
                }
                if dx < dy {
                    xs.push(e);
                } else {
                    ys.push(e);
                }
            }
        }
        let x = direct_sum(&xs, tol)?;
        let y = direct_sum(&ys, tol)?;
        if !x.same_structures(&y) {
            return Err(Error::Composition(
                "the two sides carry different gradings or real structures".into(),
            ));
        }
        coefficient.check(x.dim(), &[x.matrix(), y.matrix()], tol)?;
        Ok(Self {
            x_reps,
            y_reps,
            base_point,
            coefficient,
            x,
            y,
        })
    }

    /// `[x] - [y]` for single representatives.
    pub fn pair(x: Osu, y: Osu, coefficient: Coefficient, tol: &ToleranceProfile) -> Result<Self> {
        Self::new(vec![x], vec![y], None, coefficient, tol)
    }

    pub fn x(&self) -> &Osu {
        &self.x
    }

    pub fn y(&self) -> &Osu {
        &self.y
    }

    pub fn x_reps(&self) -> &[Osu] {
        &self.x_reps
    }

    pub fn y_reps(&self) -> &[Osu] {
        &self.y_reps
    }

    pub fn base_point(&self) -> Option<&Osu> {
        self.base_point.as_ref()
    }

    pub fn coefficient(&self) -> &Coefficient {
        &self.coefficient
    }

    pub fn grading(&self) -> &Grading {
        self.x.grading()
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    pub fn with_base_point(mut self, e: Osu) -> Self {
        self.base_point = Some(e);
        self
    }

    /// `[x ⊕ x'] - [y ⊕ y']`.
    pub fn direct_sum(&self, other: &DkClass, tol: &ToleranceProfile) -> Result<DkClass> {
        let symmetry = match (&self.coefficient.symmetry, &other.coefficient.symmetry) {
            (Some(a), Some(b)) => Some(block_diag(&[a, b])),
            (None, None) => None,
            _ => {
                return Err(Error::Composition(
                    "coefficient symmetries present on one summand only".into(),
                ))
            }
        };
        let blocks = match (&self.coefficient.blocks, &other.coefficient.blocks) {
            (None, None) => None,
            _ => {
                return Err(Error::Composition(
                    "families are summed samplewise, not as classes".into(),
                ))
            }
        };
        DkClass::pair(
            direct_sum(&[&self.x, &other.x], tol)?,
            direct_sum(&[&self.y, &other.y], tol)?,
            Coefficient { symmetry, blocks },
            tol,
        )
    }

    pub fn invariants(&self, tol: &ToleranceProfile) -> Result<ClassInvariants> {
        let clifford_signature = match &self.coefficient.symmetry {
            Some(r) => Some(clifford_signature(self.x.matrix(), self.y.matrix(), r, self.grading(), tol)?),
            None => None,
        };
        let winding = match &self.coefficient.blocks {
            Some(b) if b.len() >= 3 => Some(family_winding(
                self.x.matrix(),
                self.y.matrix(),
                self.grading(),
                b,
                tol,
            )?),
            _ => None,
        };
        Ok(ClassInvariants {
            clifford_signature,
            winding,
        })
    }
}

fn signature(m: &Matrix, tol: &ToleranceProfile) -> Result<i64> {
    let eig = numkit::eig_hermitian(m, tol)?;
    let mut s = 0i64;
    for &l in &eig.eigenvalues {
        if l.abs() < 0.5 {
            return Err(Error::Structural {
                predicate: "symmetry spectrum ±1",
                residual: 1.0 - l.abs(),
            });
        }
        s += if l > 0.0 { 1 } else { -1 };
    }
    Ok(s)
}

fn clifford_signature(x: &Matrix, y: &Matrix, r: &Matrix, grading: &Grading, tol: &ToleranceProfile) -> Result<i64> {
    let qp = grading.split_bases(None, tol)?.plus;
    let sx = signature(&numkit::compress(&(x * r), &qp), tol)?;
    let sy = signature(&numkit::compress(&(y * r), &qp), tol)?;
    let diff = sy - sx;
    if diff % 2 != 0 {
        return Err(Error::Structural {
            predicate: "even signature difference",
            residual: 1.0,
        });
    }
    Ok(diff / 2)
}

fn family_winding(x: &Matrix, y: &Matrix, grading: &Grading, blocks: &[usize], tol: &ToleranceProfile) -> Result<i64> {
    let split = grading.split_bases(Some(blocks), tol)?;
    let ax = split.minus.adjoint() * x * &split.plus;
    let ay = split.minus.adjoint() * y * &split.plus;
    let mut ratios = Vec::with_capacity(blocks.len());
    let (mut r, mut c) = (0, 0);
    for (&np, &nm) in split.plus_ranks.iter().zip(&split.minus_ranks) {
        if np != nm {
            return Err(Error::Structural {
                predicate: "balanced grading per sample",
                residual: (np as f64 - nm as f64).abs(),
            });
        }
        let bx = ax.view((r, c), (nm, np)).into_owned();
        let by = ay.view((r, c), (nm, np)).into_owned();
        let z = bx.determinant() * by.determinant().conj();
        ratios.push(if np == 0 { numkit::ONE } else { z / z.norm() });
        r += nm;
        c += np;
    }
    pairing::winding_of_phases(&ratios)
}

/// `[x] - [y] ↦ [x ⊗ E₁₁ + y ⊗ E₂₂] - [Γ ⊗ σ₁]` over `A ⊗̂ Cl_{1,1}` in the
/// Γ-twist embedding. The right factor is graded by `σ₃`, so the images
/// of `(x+y)/2 ⊗̂ 1 + (x-y)/2 ⊗̂ σ₃` and `1 ⊗̂ σ₁` are as stated.
pub fn ubiquitous_iso(c: &DkClass, tol: &ToleranceProfile) -> Result<DkClass> {
    let gamma = c.grading().gamma();
    let e11 = numkit::from_real_diag(&[1.0, 0.0]);
    let e22 = numkit::from_real_diag(&[0.0, 1.0]);
    let big = kron(c.x.matrix(), &e11) + kron(c.y.matrix(), &e22);
    let base = kron(gamma, &pauli::s1());
    let grading = Grading::from_gamma_unchecked(kron(gamma, &pauli::s3()));
    let real = c
        .x
        .real_structure()
        .map(|r| r.tensor(&RealStructure::conjugation(2)));
    let x = Osu::new(big, grading.clone(), real.clone(), tol)?;
    let y = Osu::new(base, grading, real, tol)?;
    let coefficient = Coefficient {
        symmetry: c.coefficient.symmetry.as_ref().map(|r| kron(r, &pauli::s3())),
        blocks: c.coefficient.blocks.as_ref().map(|b| b.iter().map(|n| 2 * n).collect()),
    };
    Ok(DkClass::pair(x, y.clone(), coefficient, tol)?.with_base_point(y))
}

/// `w·X·w*` with `w = (1 - yΓ⊗σ₁)/√2`, the even unitary used to move the
/// image of [`ubiquitous_iso`] onto the base point modulo the ideal of
/// entries where `x` and `y` differ.
pub fn excision_rotation(c: &DkClass) -> Matrix {
    let n = c.dim();
    let gamma = c.grading().gamma();
    let k = kron(&(c.y.matrix() * gamma), &pauli::s1());
    let w = (identity(2 * n) - k).scale(std::f64::consts::FRAC_1_SQRT_2);
    let e11 = numkit::from_real_diag(&[1.0, 0.0]);
    let e22 = numkit::from_real_diag(&[0.0, 1.0]);
    let big = kron(c.x.matrix(), &e11) + kron(c.y.matrix(), &e22);
    &w * big * w.adjoint()
}

/// `ψ_e(a ⊗̂ c) ∈ M₂(A)` for homogeneous `c ∈ M₂` graded by `σ₃`:
/// `ψ_e(a⊗̂1) = diag(a, (-1)^{|a|} eae)`, `ψ_e(1⊗̂σ₁) = antidiag(e, e)`,
/// `ψ_e(1⊗̂iσ₂) = [[0, e], [-e, 0]]`, extended multiplicatively.
pub fn psi_e(a: &Matrix, c: &Matrix, e: &Osu, tol: &ToleranceProfile) -> Result<Matrix> {
    numkit::ensure_same_shape(a, e.matrix(), "psi_e")?;
    if c.shape() != (2, 2) {
        return Err(Error::Shape("Clifford factor must be 2x2".into()));
    }
    let s3 = Grading::from_gamma_unchecked(pauli::s3());
    s3.parity_of(c, tol)?;
    let n = a.nrows();
    let eu = e.matrix();
    let zero = numkit::zeros(n, n);
    let one = identity(n);
    let pa = e.grading().parity_of(a, tol);
    let a_part = |a: &Matrix, p: Parity| {
        let sign = if p == Parity::Odd { -1.0 } else { 1.0 };
        block2(a, &zero, &zero, &(eu * a * eu).scale(sign))
    };
    let left = match pa {
        Ok(p) => a_part(a, p),
        Err(_) => {
            let (even, odd) = crate::graded::parity_decompose(a, e.grading())?;
            a_part(&even, Parity::Even) + a_part(&odd, Parity::Odd)
        }
    };
    // c = c₀·1 + c₃·σ₃ + c₁·σ₁ + c₂·(iσ₂)
    let half = numkit::c(0.5, 0.0);
    let c0 = (c[(0, 0)] + c[(1, 1)]) * half;
    let c3 = (c[(0, 0)] - c[(1, 1)]) * half;
    let c1 = (c[(0, 1)] + c[(1, 0)]) * half;
    let c2 = (c[(0, 1)] - c[(1, 0)]) * half;
    let p1 = block2(&zero, eu, eu, &zero);
    let p2 = block2(&zero, eu, &(-eu), &zero);
    let p3 = block2(&one, &zero, &zero, &(-&one));
    let right = identity(2 * n) * c0 + p3 * c3 + p1 * c1 + p2 * c2;
    Ok(left * right)
}

/// `[x]_e - [y]_e ↦ [diag(x, -eye)]` relative to `e ⊕ -e`.
pub fn phi_e(c: &DkClass, tol: &ToleranceProfile) -> Result<DkClass> {
    let e = c
        .base_point
        .as_ref()
        .ok_or_else(|| Error::Precondition("phi_e needs a base point".into()))?;
    if e.dim() != c.dim() || !e.same_structures(&c.x) {
        return Err(Error::Composition(
            "base point and representatives live in different algebras".into(),
        ));
    }
    let eu = e.matrix();
    let neg = c.y.with_matrix(-(eu * c.y.matrix() * eu), tol)?;
    let x = direct_sum(&[&c.x, &neg], tol)?;
    let base = direct_sum(&[e, &e.negated()], tol)?;
    let coefficient = Coefficient {
        symmetry: c.coefficient.symmetry.as_ref().map(|r| block_diag(&[r, r])),
        blocks: c
            .coefficient
            .blocks
            .as_ref()
            .map(|b| b.iter().chain(b.iter()).copied().collect()),
    };
    Ok(DkClass::pair(x, base.clone(), coefficient, tol)?.with_base_point(base))
}

/// `[[e cos t, e sin t], [e sin t, -e cos t]]`, joining `e ⊕ -e` to its negative.
pub fn rotation_path_point(e: &Osu, t: f64) -> Matrix {
    let eu = e.matrix();
    block2(
        &eu.scale(t.cos()),
        &eu.scale(t.sin()),
        &eu.scale(t.sin()),
        &eu.scale(-t.cos()),
    )
}

/// `Id_n ⊗ σ₁ ⊗ 1_m` graded by `Id_n ⊗ σ₃ ⊗ Γ_A`.
pub fn standard_osu_z(n: usize, coefficient_grading: Option<&Grading>, tol: &ToleranceProfile) -> Result<Osu> {
    if n == 0 {
        return Err(Error::Domain("truncation size must be at least 1".into()));
    }
    let (one_a, gamma_a) = match coefficient_grading {
        Some(g) => (identity(g.dim()), g.gamma().clone()),
        None => (identity(1), identity(1)),
    };
    let u = kron(&kron(&identity(n), &pauli::s1()), &one_a);
    let gamma = kron(&kron(&identity(n), &pauli::s3()), &gamma_a);
    Osu::new(u, Grading::from_gamma_unchecked(gamma), None, tol)
}

/// A sampled path of OSUs.
#[derive(Debug, Clone, PartialEq)]
pub struct OsuPath {
    pub points: Vec<Matrix>,
    /// Worst OSU-axiom residual along the path.
    pub worst_residual: f64,
    /// Largest operator-norm jump between consecutive samples.
    pub max_step: f64,
}

impl OsuPath {
    pub fn sample(
        points: usize,
        grading: &Grading,
        real: Option<&RealStructure>,
        f: impl Fn(f64) -> Result<Matrix>,
        tol: &ToleranceProfile,
    ) -> Result<OsuPath> {
        if points < 2 {
            return Err(Error::Domain("a path needs at least two samples".into()));
        }
        let mut out = Vec::with_capacity(points);
        let mut worst = 0.0f64;
        let mut max_step = 0.0f64;
        for k in 0..points {
            let s = k as f64 / (points - 1) as f64;
            let m = f(s)?;
            let d = check_osu(&m, grading, real, tol);
            worst = worst.max(d.worst());
            if let Some(prev) = out.last() {
                max_step = max_step.max(numkit::opnorm(&(&m - prev)));
            }
            out.push(m);
        }
        Ok(OsuPath {
            points: out,
            worst_residual: worst,
            max_step,
        })
    }

    pub fn passes(&self, tol: &ToleranceProfile) -> bool {
        self.worst_residual < tol.eq_tol
    }
}

/// `V(λ) = e(T+λe)(T-λe)⁻¹` for `λ` from 1 down to 0; joins `C_e(T)` to
/// `e` through OSUs when `T` is invertible. On a singular value `τ` of `T`
/// the path turns through the angle `2·atan(λ/τ)`, so `λ` is sampled
/// uniformly in the total angle over all singular values; a near-singular
/// `T` still gives evenly spaced samples.
pub fn lambda_path(t: &Matrix, e: &Osu, points: usize, tol: &ToleranceProfile) -> Result<OsuPath> {
    let eu = e.matrix().clone();
    let taus = numkit::singular_values(t);
    if !taus.first().is_some_and(|&s| s > tol.kernel_tol) {
        return Err(Error::Precondition("the operator must be invertible for the λ-path".into()));
    }
    let angle = |lambda: f64| taus.iter().map(|tau| (lambda / tau).atan()).sum::<f64>();
    let full = angle(1.0);
    // the angle is increasing in λ, so bisection inverts it
    let lambda_at = |target: f64| {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if angle(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    OsuPath::sample(
        points,
        e.grading(),
        e.real_structure(),
        |s| {
            let lambda = match s {
                0.0 => 1.0,
                1.0 => return Ok(eu.clone()),
                _ => lambda_at((1.0 - s) * full),
            };
            let inv = numkit::inverse(&(t - eu.scale(lambda)))?;
            Ok(&eu * (t + eu.scale(lambda)) * inv)
        },
        tol,
    )
}

/// `(W, range(V-W), Ci_W(V))` for the class `[V] - [W]`.
pub fn dk_to_kk(c: &DkClass, tol: &ToleranceProfile) -> Result<FiniteKasparovCycle> {
    let blocks = c.coefficient.blocks.as_deref();
    let restricted = graded_cayley_inv_blocks(&c.x, &c.y, blocks, tol)?;
    let basis = restricted.basis.clone();
    let ranks = match blocks {
        Some(b) => Some(cayley::block_range_basis(&(c.x.matrix() - c.y.matrix()), b, tol.rank_tol)?.1),
        None => None,
    };
    let w = restricted.compress(c.y.matrix());
    let grading = c.grading().compress(&basis);
    let real = match c.x.real_structure() {
        Some(r) => Some(RealStructure::new(r.compress(&basis), tol)?),
        None => None,
    };
    FiniteKasparovCycle::new(
        basis.clone(),
        vec![w],
        restricted.compressed,
        grading,
        real,
        c.coefficient.compress(&basis, ranks),
        tol,
    )
}

/// `[C_e(T)] - [e]` for a cycle with a single left generator `e`; the
/// operator is averaged to anti-commute with `e` first.
pub fn kk_to_dk(cycle: &FiniteKasparovCycle, tol: &ToleranceProfile) -> Result<DkClass> {
    let (e, t) = cycle.normalized_pair(tol)?;
    let x = graded_cayley(&t, &e, tol)?;
    let coefficient = cycle.coefficient().clone();
    Ok(DkClass::pair(x, e.clone(), coefficient, tol)?.with_base_point(e))
}

/// Norms `‖(C_e(T) - e)·P_{|T|>s}‖ = 2/√(1+s²)` sampled at the spectral
/// values `s` of `|T|`, the finite stand-in for compactness of `x - y`.
pub fn compactness_profile(cycle: &FiniteKasparovCycle, tol: &ToleranceProfile) -> Result<Vec<(f64, f64)>> {
    let (e, t) = cycle.normalized_pair(tol)?;
    let x = graded_cayley(&t, &e, tol)?;
    let diff = x.matrix() - e.matrix();
    let eig = numkit::eig_hermitian(&t, tol)?;
    let mut levels: Vec<f64> = eig.eigenvalues.iter().map(|l| l.abs()).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup_by(|a, b| (*a - *b).abs() < tol.kernel_tol);
    let mut out = Vec::with_capacity(levels.len());
    for s in levels {
        let p = eig.spectral_projection(|l| l.abs() >= s - tol.kernel_tol);
        out.push((s, numkit::opnorm(&(&diff * p))));
    }
    Ok(out)
}

/// Certify `[x] = [y]` by an explicit path when one of the standard
/// constructions applies.
pub fn certify_trivial(c: &DkClass, points: usize, tol: &ToleranceProfile) -> Result<Option<OsuPath>> {
    let (x, y) = (c.x.matrix(), c.y.matrix());
    if max_abs(&(x - y)) < tol.eq_tol {
        return Ok(Some(OsuPath::sample(points, c.grading(), c.x.real_structure(), |_| Ok(x.clone()), tol)?));
    }
    if max_abs(&numkit::anticommutator(x, y)) < tol.eq_tol {
        let half = std::f64::consts::FRAC_PI_2;
        return Ok(Some(OsuPath::sample(
            points,
            c.grading(),
            c.x.real_structure(),
            |s| Ok(x.scale((half * s).cos()) + y.scale((half * s).sin())),
            tol,
        )?));
    }
    let cycle = dk_to_kk(c, tol)?;
    if cycle.is_empty() || !cycle.is_invertible(tol)? {
        return Ok(None);
    }
    // the class restricted to range(x-y) is [C_W(T)] - [W] with T invertible
    let (e, t) = cycle.normalized_pair(tol)?;
    let path = lambda_path(&t, &e, points, tol)?;
    let basis = cycle.basis().clone();
    let complement = identity(c.dim()) - &basis * basis.adjoint();
    let lifted: Vec<Matrix> = path
        .points
        .iter()
        .map(|p| &basis * p * basis.adjoint() + &complement * y * &complement)
        .collect();
    let mut worst = 0.0f64;
    let mut max_step = 0.0f64;
    for (k, m) in lifted.iter().enumerate() {
        worst = worst.max(check_osu(m, c.grading(), c.x.real_structure(), tol).worst());
        if k > 0 {
            max_step = max_step.max(numkit::opnorm(&(m - &lifted[k - 1])));
        }
    }
    Ok(Some(OsuPath {
        points: lifted,
        worst_residual: worst,
        max_step,
    }))
}

/// Compare two classes through explicit paths (when either difference is
/// certified trivial) or through invariants.
pub fn compare(a: &DkClass, b: &DkClass, tol: &ToleranceProfile) -> Result<EqualityStatus> {
    if a.dim() == b.dim() && a.x.same_structures(&b.x) {
        let same = max_abs(&(a.x.matrix() - b.x.matrix())) < tol.eq_tol
            && max_abs(&(a.y.matrix() - b.y.matrix())) < tol.eq_tol;
        if same {
            return Ok(EqualityStatus::EqualByPath);
        }
    }
    let (ia, ib) = (a.invariants(tol)?, b.invariants(tol)?);
    let pairs = [
        (ia.clifford_signature, ib.clifford_signature),
        (ia.winding, ib.winding),
    ];
    let mut compared = false;
    for (p, q) in pairs {
        if let (Some(p), Some(q)) = (p, q) {
            compared = true;
            if p != q {
                return Ok(EqualityStatus::DistinctByInvariants);
            }
        }
    }
    Ok(if compared {
        EqualityStatus::EqualByInvariants
    } else {
        EqualityStatus::Unknown
    })
}
