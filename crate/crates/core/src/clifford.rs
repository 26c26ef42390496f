//! Matrix realizations of `Cl_{p,q}`, graded tensor products and the
//! Clifford-extraction isomorphism `η`.

use crate::error::{Error, Result};
use crate::graded::{parity_decompose, Grading, Parity, RealStructure};
use crate::numkit::{self, identity, kron, max_abs, Matrix, ToleranceProfile, I};

/// Largest supported `p + q`.
pub const MAX_GENERATORS: usize = 12;

pub mod pauli {
    use crate::numkit::{c, from_rows, identity, Matrix};

    pub fn s0() -> Matrix {
        identity(2)
    }

    pub fn s1() -> Matrix {
        from_rows(&[&[c(0.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]])
    }

    pub fn s2() -> Matrix {
        from_rows(&[&[c(0.0, 0.0), c(0.0, -1.0)], &[c(0.0, 1.0), c(0.0, 0.0)]])
    }

    pub fn s3() -> Matrix {
        from_rows(&[&[c(1.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(-1.0, 0.0)]])
    }

    pub fn by_index(a: usize) -> Matrix {
        match a {
            0 => s0(),
            1 => s1(),
            2 => s2(),
            3 => s3(),
            _ => panic!("Pauli index {a} out of range"),
        }
    }
}

/// Concrete representation of `Cl_{p,q}`: `e_j` Hermitian with `e_j² = 1`,
/// `f_j` anti-Hermitian with `f_j² = -1`, all odd, pairwise anti-commuting
/// and real for the stored real structure.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordAlgebra {
    pub p: usize,
    pub q: usize,
    /// Dimension of the abstract algebra, `2^(p+q)`.
    pub dim: usize,
    pub e_gens: Vec<Matrix>,
    pub f_gens: Vec<Matrix>,
    pub grading: Grading,
    pub real_structure: RealStructure,
}

impl CliffordAlgebra {
    /// Side length of the representing matrices.
    pub fn matrix_size(&self) -> usize {
        self.grading.dim()
    }

    pub fn generators(&self) -> impl Iterator<Item = &Matrix> {
        self.e_gens.iter().chain(self.f_gens.iter())
    }

    /// Worst residual over squares, adjoints, parity, anti-commutation and reality.
    pub fn relation_residual(&self) -> f64 {
        let n = self.matrix_size();
        let one = identity(n);
        let mut worst = 0.0f64;
        for e in &self.e_gens {
            worst = worst
                .max(max_abs(&(e * e - &one)))
                .max(numkit::hermitian_residual(e));
        }
        for f in &self.f_gens {
            worst = worst
                .max(max_abs(&(f * f + &one)))
                .max(numkit::skew_residual(f));
        }
        let gens: Vec<&Matrix> = self.generators().collect();
        for (i, a) in gens.iter().enumerate() {
            worst = worst
                .max(self.grading.odd_residual(a))
                .max(self.real_structure.residual(a, 1.0));
            for b in &gens[i + 1..] {
                worst = worst.max(max_abs(&numkit::anticommutator(a, b)));
            }
        }
        worst
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    E,
    F,
}

/// Antiunitary factor `S ∈ {1, σ₁, σ₂, σ₃}` chosen per Pauli factor.
/// Returns the sign picked up by `(σ₁, σ₂, σ₃)` under `S·conj(·)·S*`.
fn factor_signs(s: usize) -> [f64; 3] {
    match s {
        0 => [1.0, -1.0, 1.0],
        1 => [1.0, 1.0, -1.0],
        2 => [-1.0, -1.0, -1.0],
        3 => [-1.0, 1.0, 1.0],
        _ => unreachable!(),
    }
}

pub fn build_clifford(p: usize, q: usize) -> Result<CliffordAlgebra> {
    if p + q > MAX_GENERATORS {
        return Err(Error::Capacity {
            requested: p + q,
            limit: MAX_GENERATORS,
        });
    }
    // Each Pauli factor hosts up to two generators on σ₁ and σ₂, padded by σ₃
    // on earlier factors. `prefix` tracks the sign of that σ₃ padding under the
    // real structure built so far.
    let pairs = p.min(q);
    let extra = p.max(q) - pairs;
    let extra_slot = if p > q { Slot::E } else { Slot::F };
    let mut layout: Vec<(Vec<Slot>, usize)> = Vec::new();
    let mut prefix = 1.0;
    let mut push = |slots: Vec<Slot>, prefix: &mut f64| {
        // required sign of σ_a: +1 for e (Hermitian, real), -1 for f = -iσ_a
        let want: Vec<f64> = slots
            .iter()
            .map(|s| if *s == Slot::E { *prefix } else { -*prefix })
            .collect();
        let s = (0..4)
            .find(|&s| {
                let sg = factor_signs(s);
                want.iter().enumerate().all(|(a, w)| sg[a] == *w)
            })
            .expect("every slot pattern has a compatible factor");
        *prefix *= factor_signs(s)[2];
        layout.push((slots, s));
    };
    for _ in 0..pairs {
        push(vec![Slot::E, Slot::F], &mut prefix);
    }
    for _ in 0..extra / 2 {
        push(vec![extra_slot, extra_slot], &mut prefix);
    }
    if extra % 2 == 1 {
        push(vec![extra_slot], &mut prefix);
    }

    let m = layout.len();
    let string = |k: usize, a: usize| -> Matrix {
        let mut out = identity(1);
        for j in 0..m {
            let f = if j < k {
                pauli::s3()
            } else if j == k {
                pauli::by_index(a)
            } else {
                pauli::s0()
            };
            out = kron(&out, &f);
        }
        out
    };
    let mut e_gens = Vec::with_capacity(p);
    let mut f_gens = Vec::with_capacity(q);
    let mut gamma = identity(1);
    let mut s_mat = identity(1);
    let mut sign: i8 = 1;
    for (k, (slots, s)) in layout.iter().enumerate() {
        for (a, slot) in slots.iter().enumerate() {
            let h = string(k, a + 1);
            match slot {
                Slot::E => e_gens.push(h),
                Slot::F => f_gens.push(h * (-I)),
            }
        }
        gamma = kron(&gamma, &pauli::s3());
        s_mat = kron(&s_mat, &pauli::by_index(*s));
        if *s == 2 {
            sign = -sign;
        }
    }
    Ok(CliffordAlgebra {
        p,
        q,
        dim: 1 << (p + q),
        e_gens,
        f_gens,
        grading: Grading::from_gamma_unchecked(gamma),
        real_structure: RealStructure::from_parts_unchecked(s_mat, sign),
    })
}

/// Ordered product `e₁⋯e_p f₁⋯f_q`.
pub fn orientation_element(algebra: &CliffordAlgebra) -> Result<Matrix> {
    if algebra.p + algebra.q == 0 {
        return Err(Error::Domain(
            "orientation element of an algebra without generators".into(),
        ));
    }
    Ok(algebra
        .generators()
        .fold(identity(algebra.matrix_size()), |acc, g| acc * g))
}

/// Embedding of `a ⊗̂ b` into the ordinary tensor space as `a·Γ_a^{∂b} ⊗ b`,
/// together with the tensor grading `Γ_a ⊗ Γ_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedTensorFactorization {
    pub left_grading: Grading,
    pub right_grading: Grading,
    pub embedded: Matrix,
}

impl GradedTensorFactorization {
    pub fn grading(&self) -> Grading {
        Grading::from_gamma_unchecked(kron(
            self.left_grading.gamma(),
            self.right_grading.gamma(),
        ))
    }
}

fn twist(a: &Matrix, ga: &Grading, b: &Matrix, pb: Parity) -> Matrix {
    match pb {
        Parity::Even => kron(a, b),
        Parity::Odd => kron(&(a * ga.gamma()), b),
    }
}

/// `a ⊗̂ b ↦ a·Γ_a^{∂b} ⊗ b`. With `decompose` set, non-homogeneous `b` is
/// split by parity and the embedding extended linearly; otherwise both
/// factors must be homogeneous.
pub fn graded_tensor(
    a: &Matrix,
    ga: &Grading,
    b: &Matrix,
    gb: &Grading,
    decompose: bool,
    tol: &ToleranceProfile,
) -> Result<GradedTensorFactorization> {
    numkit::ensure_same_shape(a, ga.gamma(), "graded_tensor left factor")?;
    numkit::ensure_same_shape(b, gb.gamma(), "graded_tensor right factor")?;
    let embedded = if decompose {
        let (b0, b1) = parity_decompose(b, gb)?;
        twist(a, ga, &b0, Parity::Even) + twist(a, ga, &b1, Parity::Odd)
    } else {
        ga.parity_of(a, tol)?;
        let pb = gb.parity_of(b, tol)?;
        twist(a, ga, b, pb)
    };
    Ok(GradedTensorFactorization {
        left_grading: ga.clone(),
        right_grading: gb.clone(),
        embedded,
    })
}

/// Generator `ρ` of `Cl_{1,0}` as `σ₁`, graded by `σ₃`.
pub fn rho() -> (Matrix, Grading) {
    (pauli::s1(), Grading::from_gamma_unchecked(pauli::s3()))
}

/// `η(b ⊗̂ ρ^k) = bΓ^k ⊗ ρ^{k+|b|}`, extended linearly over the parity
/// decomposition of `b`. The target carries the trivial grading on the left
/// factor.
pub fn eta(b: &Matrix, k: u8, grading: &Grading) -> Result<Matrix> {
    let (b0, b1) = parity_decompose(b, grading)?;
    let gk = if k % 2 == 1 {
        grading.gamma().clone()
    } else {
        identity(grading.dim())
    };
    let rho_pow = |n: u8| {
        if n % 2 == 1 {
            pauli::s1()
        } else {
            pauli::s0()
        }
    };
    Ok(kron(&(b0 * &gk), &rho_pow(k)) + kron(&(b1 * &gk), &rho_pow(k + 1)))
}
