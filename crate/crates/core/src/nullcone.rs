//! The Szabó operator as a matrix of cubic polynomials, division by the
//! quadratic form `(x, x)`, and the linear-annihilator system.
//!
//! If `S(x)` vanishes on the null cone and `(x, x)` is irreducible, then
//! `S(x) = (x, x) f(x)` with `f` linear. Oddness and `S(x)x = 0` force
//! `f(x)x = 0`, and together with self-adjointness this leaves only `f = 0`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{normalize_row, Echelon, SparseRow};
use crate::linalg::max_abs;
use crate::report::FlagStatus;
use crate::sampling::{sample_cone, Cone, DEFAULT_EUCLIDEAN_BOUND};
use crate::space::{PseudoSpace, SelfAdjointOperator, Vector};
use crate::symmetry::szabo_map_kernel_dim;
use crate::tensor::AcdtTensor;

/// Null vectors used by the sampled route of [`vanishes_on_null_cone`].
pub const NULL_CHECK_SAMPLES: usize = 100;

/// `x ↦ S(x)` with `S_ij(x) = Σ c[i][j][a][b][c] x_a x_b x_c`, symmetric in
/// `(a, b, c)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixCubicPolynomial {
    space: PseudoSpace,
    coeffs: Vec<f64>,
}

/// `x ↦ f(x)` with `f_ij(x) = Σ f[i][j][a] x_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixLinearPolynomial {
    space: PseudoSpace,
    coeffs: Vec<f64>,
}

fn sym3_perms(a: usize, b: usize, c: usize) -> [[usize; 3]; 6] {
    [
        [a, b, c],
        [a, c, b],
        [b, a, c],
        [b, c, a],
        [c, a, b],
        [c, b, a],
    ]
}

impl MatrixCubicPolynomial {
    /// Builds from raw coefficients, symmetrizing the last three indices.
    pub fn from_coeffs(space: PseudoSpace, raw: Vec<f64>) -> Result<Self> {
        let m = space.dim();
        if raw.len() != m.pow(5) {
            return Err(Error::DimensionMismatch {
                expected: m.pow(5),
                found: raw.len(),
            });
        }
        let mut coeffs = vec![0.0; raw.len()];
        for ij in 0..m * m {
            for a in 0..m {
                for b in 0..m {
                    for c in 0..m {
                        let s: f64 = sym3_perms(a, b, c)
                            .iter()
                            .map(|p| raw[((ij * m + p[0]) * m + p[1]) * m + p[2]])
                            .sum();
                        coeffs[((ij * m + a) * m + b) * m + c] = s / 6.0;
                    }
                }
            }
        }
        Ok(MatrixCubicPolynomial { space, coeffs })
    }

    pub fn zero(space: PseudoSpace) -> Self {
        MatrixCubicPolynomial {
            space,
            coeffs: vec![0.0; space.dim().pow(5)],
        }
    }

    pub fn space(&self) -> PseudoSpace {
        self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn get(&self, i: usize, j: usize, a: usize, b: usize, c: usize) -> f64 {
        let m = self.space.dim();
        self.coeffs[(((i * m + j) * m + a) * m + b) * m + c]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Frobenius norm of the coefficient array.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn evaluate(&self, x: &Vector) -> DMatrix<f64> {
        let m = self.space.dim();
        assert_eq!(x.len(), m, "vector length must equal the space dimension");
        DMatrix::from_fn(m, m, |i, j| {
            let base = (i * m + j) * m * m * m;
            let mut s = 0.0;
            for a in 0..m {
                for b in 0..m {
                    let xab = x[a] * x[b];
                    for c in 0..m {
                        s += self.coeffs[base + (a * m + b) * m + c] * xab * x[c];
                    }
                }
            }
            s
        })
    }
}

impl MatrixLinearPolynomial {
    pub fn from_coeffs(space: PseudoSpace, coeffs: Vec<f64>) -> Result<Self> {
        let m = space.dim();
        if coeffs.len() != m.pow(3) {
            return Err(Error::DimensionMismatch {
                expected: m.pow(3),
                found: coeffs.len(),
            });
        }
        Ok(MatrixLinearPolynomial { space, coeffs })
    }

    pub fn random<R: rand::Rng>(space: PseudoSpace, rng: &mut R) -> Self {
        use rand_distr::{Distribution, StandardNormal};
        let coeffs = (0..space.dim().pow(3))
            .map(|_| StandardNormal.sample(rng))
            .collect();
        MatrixLinearPolynomial { space, coeffs }
    }

    pub fn space(&self) -> PseudoSpace {
        self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn get(&self, i: usize, j: usize, a: usize) -> f64 {
        let m = self.space.dim();
        self.coeffs[(i * m + j) * m + a]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn evaluate(&self, x: &Vector) -> DMatrix<f64> {
        let m = self.space.dim();
        DMatrix::from_fn(m, m, |i, j| (0..m).map(|a| self.get(i, j, a) * x[a]).sum())
    }

    /// The cubic `(x, x) f(x)` with symmetrized coefficients.
    pub fn times_form(&self) -> MatrixCubicPolynomial {
        let m = self.space.dim();
        let basis = form_multiplier_basis(&self.space);
        let mut coeffs = vec![0.0; m.pow(5)];
        for ij in 0..m * m {
            let l = DVector::from_column_slice(&self.coeffs[ij * m..(ij + 1) * m]);
            let block = &basis * l;
            coeffs[ij * m.pow(3)..(ij + 1) * m.pow(3)].copy_from_slice(block.as_slice());
        }
        MatrixCubicPolynomial {
            space: self.space,
            coeffs,
        }
    }

    /// Worst violation of the annihilator constraints: `f(x)` self-adjoint
    /// and `f(x)x = 0` for all `x`.
    pub fn annihilator_residual(&self) -> f64 {
        let m = self.space.dim();
        let g = |i: usize| self.space.signature.sign(i);
        let mut worst: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                for a in 0..m {
                    worst = worst.max((g(i) * self.get(i, j, a) - g(j) * self.get(j, i, a)).abs());
                    worst = worst.max((self.get(i, j, a) + self.get(i, a, j)).abs());
                }
            }
        }
        worst
    }
}

/// Column `c` holds the symmetrized coefficients of `(x, x) x_c`, i.e.
/// `(g_ab δ_c + g_ac δ_b + g_bc δ_a) / 3` flattened over `(a, b, c)`.
fn form_multiplier_basis(space: &PseudoSpace) -> DMatrix<f64> {
    let m = space.dim();
    let g = |a: usize, b: usize| {
        if a == b {
            space.signature.sign(a)
        } else {
            0.0
        }
    };
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    DMatrix::from_fn(m.pow(3), m, |row, l| {
        let (a, b, c) = (row / (m * m), (row / m) % m, row % m);
        (g(a, b) * d(c, l) + g(a, c) * d(b, l) + g(b, c) * d(a, l)) / 3.0
    })
}

/// Exact symmetrized coefficients of `x ↦ S(x)`.
pub fn szabo_cubic(r: &AcdtTensor) -> MatrixCubicPolynomial {
    let space = r.space();
    let m = space.dim();
    let d = r.coeffs();
    // S(x)_ij = g_i D(j,a,b,i;c) x_a x_b x_c
    let mut raw = vec![0.0; m.pow(5)];
    for i in 0..m {
        let gi = space.signature.sign(i);
        for j in 0..m {
            for a in 0..m {
                for b in 0..m {
                    for c in 0..m {
                        raw[(((i * m + j) * m + a) * m + b) * m + c] = gi * d.get(&[j, a, b, i, c]);
                    }
                }
            }
        }
    }
    MatrixCubicPolynomial::from_coeffs(space, raw).expect("shape matches by construction")
}

#[derive(Clone, Debug, PartialEq)]
pub struct Division {
    pub quotient: MatrixLinearPolynomial,
    /// Frobenius norm of `S - (x, x) f` in coefficient space.
    pub remainder_norm: f64,
}

/// Entrywise least-squares division of `S` by `(x, x)`.
pub fn divide_by_form(s: &MatrixCubicPolynomial) -> Division {
    let space = s.space;
    let m = space.dim();
    let basis = form_multiplier_basis(&space);
    let pinv = basis
        .clone()
        .pseudo_inverse(1e-12)
        .expect("pseudo-inverse with positive epsilon");
    let mut quotient = vec![0.0; m.pow(3)];
    let mut rem2 = 0.0;
    let block = m.pow(3);
    for ij in 0..m * m {
        let c = DVector::from_column_slice(&s.coeffs[ij * block..(ij + 1) * block]);
        let l = &pinv * &c;
        rem2 += (&c - &basis * &l).norm_squared();
        quotient[ij * m..(ij + 1) * m].copy_from_slice(l.as_slice());
    }
    Division {
        quotient: MatrixLinearPolynomial {
            space,
            coeffs: quotient,
        },
        remainder_norm: rem2.sqrt(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NullConeVanishing {
    /// Divisibility by `(x, x)`: remainder within `tol` of the coefficient norm.
    pub divisible: bool,
    pub remainder_norm: f64,
    /// Every sampled null vector gives a numerically zero matrix.
    pub sampled_vanishing: bool,
    pub max_sampled_value: f64,
    pub samples: usize,
    /// `m < 3`: the form may factor, so the two routes can disagree.
    pub reducible_form: bool,
}

impl NullConeVanishing {
    pub fn routes_agree(&self) -> bool {
        self.divisible == self.sampled_vanishing
    }

    /// The algebraic verdict.
    pub fn vanishes(&self) -> bool {
        self.divisible
    }
}

/// Tests whether `S` vanishes on the null cone, by the remainder of
/// division and by evaluation at sampled null vectors.
pub fn vanishes_on_null_cone(
    s: &MatrixCubicPolynomial,
    tol: f64,
    seed: u64,
) -> Result<NullConeVanishing> {
    let space = s.space;
    let sample = sample_cone(
        &space,
        Cone::Null,
        NULL_CHECK_SAMPLES / 2,
        seed,
        DEFAULT_EUCLIDEAN_BOUND,
    )?;
    let div = divide_by_form(s);
    let scale = s.norm().max(1.0);
    let mut worst: f64 = 0.0;
    for x in &sample.vectors {
        let v = max_abs(&s.evaluate(x)) / x.norm().powi(3);
        worst = worst.max(v);
    }
    Ok(NullConeVanishing {
        divisible: div.remainder_norm <= tol * scale,
        remainder_norm: div.remainder_norm,
        sampled_vanishing: worst <= tol * scale,
        max_sampled_value: worst,
        samples: sample.len(),
        reducible_form: space.dim() < 3,
    })
}

/// Rows of the annihilator system over unknowns `f[i][j][a]`.
pub(crate) struct AnnihilatorRows {
    pub self_adjoint: Vec<SparseRow>,
    pub polarized: Vec<SparseRow>,
    /// `(f(x)y, z) + (f(x)z, y) = 0`, implied by the other two families.
    pub derived: Vec<SparseRow>,
}

pub(crate) fn annihilator_rows(space: &PseudoSpace) -> AnnihilatorRows {
    let m = space.dim();
    let u = |i: usize, j: usize, a: usize| (i * m + j) * m + a;
    let g = |i: usize| space.signature.sign(i) as i128;
    let mut rows = AnnihilatorRows {
        self_adjoint: Vec::new(),
        polarized: Vec::new(),
        derived: Vec::new(),
    };
    for a in 0..m {
        for i in 0..m {
            for j in i..m {
                if i != j {
                    rows.self_adjoint
                        .push(normalize_row(vec![(u(i, j, a), g(i)), (u(j, i, a), -g(j))]));
                }
                // (f(x)e_i, e_j) + (f(x)e_j, e_i), coefficient of x_a
                rows.derived
                    .push(normalize_row(vec![(u(j, i, a), g(j)), (u(i, j, a), g(i))]));
            }
        }
    }
    // f(x)y + f(y)x = 0, coefficient of x_a y_j in entry i
    for i in 0..m {
        for j in 0..m {
            for a in j..m {
                rows.polarized
                    .push(normalize_row(vec![(u(i, j, a), 1), (u(i, a, j), 1)]));
            }
        }
    }
    rows
}

/// Dimension of the space of linear `f` with `f(x)` self-adjoint and
/// `f(x)x = 0` for every `x`.
pub fn linear_annihilator_space_dim(space: &PseudoSpace) -> Result<usize> {
    let m = space.dim();
    if m > 6 {
        return Err(Error::UnsupportedDimension {
            m,
            reason: "the annihilator system is assembled for m <= 6",
        });
    }
    let rows = annihilator_rows(space);
    let mut e = Echelon::new(m.pow(3));
    for row in rows
        .self_adjoint
        .into_iter()
        .chain(rows.polarized)
        .chain(rows.derived)
    {
        e.insert(row)?;
    }
    Ok(e.nullity())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvenRankCheck {
    pub status: FlagStatus,
    /// The common rank, when all operators agree.
    pub rank: Option<usize>,
    pub observed: Vec<usize>,
}

/// Constant rank of an odd self-adjoint family on a connected cone must be
/// even. Varying ranks make the check not applicable.
pub fn even_rank_check(
    family: &[(Vector, SelfAdjointOperator)],
    tol: f64,
) -> Result<EvenRankCheck> {
    for (x, a) in family {
        let neg = -x;
        if !family.iter().any(|(y, _)| *y == neg) {
            return Err(Error::Precondition(
                "family is not closed under v -> -v".into(),
            ));
        }
        let space = a.space();
        if !space.is_self_adjoint(a.matrix(), tol).is_self_adjoint {
            return Err(Error::Precondition(
                "family member is not self-adjoint".into(),
            ));
        }
    }
    let observed: Vec<usize> = family
        .iter()
        .map(|(_, a)| crate::spectral::rank_of(a, tol))
        .collect();
    let constant = observed.windows(2).all(|w| w[0] == w[1]);
    let (status, rank) = match observed.first() {
        Some(&r) if constant => (
            if r % 2 == 0 {
                FlagStatus::Consistent
            } else {
                FlagStatus::ViolatedWithWitness
            },
            Some(r),
        ),
        Some(_) => (FlagStatus::NotApplicable, None),
        None => (FlagStatus::NotApplicable, None),
    };
    Ok(EvenRankCheck {
        status,
        rank,
        observed,
    })
}

/// Outcome of the chain "vanishes on the null cone ⇒ `S = (x,x) f` ⇒
/// `f = 0` ⇒ `S ≡ 0` ⇒ tensor zero".
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NullConePipeline {
    pub vanishing: NullConeVanishing,
    pub quotient_max_abs: f64,
    pub quotient_annihilator_residual: f64,
    pub annihilator_dim: usize,
    pub szabo_kernel_dim: Option<usize>,
    pub tensor_max_abs: f64,
    /// Whether the observed numbers obey the chain of implications.
    pub consistent: bool,
    pub explanation: String,
}

pub fn null_cone_pipeline(r: &AcdtTensor, tol: f64, seed: u64) -> Result<NullConePipeline> {
    let space = r.space();
    let cubic = szabo_cubic(r);
    let vanishing = vanishes_on_null_cone(&cubic, tol, seed)?;
    let div = divide_by_form(&cubic);
    let annihilator_dim = linear_annihilator_space_dim(&space)?;
    let szabo_kernel_dim = if space.dim() <= 5 {
        Some(szabo_map_kernel_dim(&space)?)
    } else {
        None
    };
    let scale = cubic.norm().max(1.0);
    let tensor_max_abs = r.max_abs();
    let quotient_max_abs = div.quotient.max_abs();
    let (consistent, explanation) = if vanishing.reducible_form {
        (
            true,
            "m < 3: the form factors, so vanishing does not imply divisibility".to_string(),
        )
    } else if !vanishing.routes_agree() {
        (
            false,
            format!(
                "division remainder {:e} and sampled maximum {:e} disagree",
                vanishing.remainder_norm, vanishing.max_sampled_value
            ),
        )
    } else if !vanishing.vanishes() {
        (true, "S does not vanish on the null cone".to_string())
    } else {
        let f_zero = annihilator_dim == 0 && quotient_max_abs <= tol * scale;
        let r_zero = tensor_max_abs <= tol * r.max_abs().max(1.0);
        if f_zero && r_zero {
            (
                true,
                "S vanishes on the null cone, the quotient is zero and so is the tensor"
                    .to_string(),
            )
        } else {
            (
                false,
                format!(
                    "S vanishes on the null cone but quotient max {quotient_max_abs:e}, tensor max {tensor_max_abs:e}"
                ),
            )
        }
    };
    Ok(NullConePipeline {
        quotient_annihilator_residual: div.quotient.annihilator_residual(),
        vanishing,
        quotient_max_abs,
        annihilator_dim,
        szabo_kernel_dim,
        tensor_max_abs,
        consistent,
        explanation,
    })
}
