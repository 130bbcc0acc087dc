//! Curvature-type tensors: coefficient arrays, symmetry validation,
//! projection onto the symmetry class, and the Jacobi and Szabó operators.
//!
//! Index convention: a rank-4 array `R[x][y][z][w]` is `R(x,y,z,w)` and a
//! rank-5 array `D[x][y][z][w][v]` is `D(x,y,z,w;v)`, stored row-major with
//! the last slot fastest.
//!
//! Every identity of the class is the kernel of an averaging operator:
//!
//! * antisymmetry `R(x,y,..) = -R(y,x,..)` (and in the second pair),
//! * pair symmetry `R(x,y,z,w) = R(z,w,x,y)`,
//! * first Bianchi: the sum over cyclic shifts of `(x,y,z)` vanishes,
//! * for rank 5, the sum over cyclic shifts of `(z,w,v)` vanishes.
//!
//! Each of these is an orthogonal projection for the plain Euclidean inner
//! product on coefficients, and cycling through them converges to the
//! orthogonal projection onto their common kernel.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{PseudoSpace, SelfAdjointOperator, Vector};

pub const DEFAULT_VALIDATION_TOL: f64 = 1e-9;
pub const DEFAULT_PROJECTION_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Dense coefficient array of order 4 or 5 over an `m`-dimensional space.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffArray {
    dim: usize,
    order: usize,
    data: Vec<f64>,
}

impl CoeffArray {
    pub fn zeros(dim: usize, order: usize) -> Self {
        CoeffArray {
            dim,
            order,
            data: vec![0.0; dim.pow(order as u32)],
        }
    }

    pub fn from_vec(dim: usize, order: usize, data: Vec<f64>) -> Result<Self> {
        let expected = dim.pow(order as u32);
        if data.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: data.len(),
            });
        }
        Ok(CoeffArray { dim, order, data })
    }

    /// Independent standard normal coefficients.
    pub fn random<R: rand::Rng>(dim: usize, order: usize, rng: &mut R) -> Self {
        let n = dim.pow(order as u32);
        let data = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        CoeffArray { dim, order, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.order);
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let i = self.index(idx);
        self.data[i] = value;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |a, x| a.max(x.abs()))
    }

    /// Euclidean coefficient inner product.
    pub fn dot(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|x| *x *= s);
    }

    pub fn sub(&self, other: &Self) -> Self {
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        CoeffArray {
            dim: self.dim,
            order: self.order,
            data,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()))
    }
}

/// For a slot permutation `perm`, the table sending the flat index of
/// `(t_0, .., t_{n-1})` to the flat index of `(t_{perm[0]}, .., t_{perm[n-1]})`.
pub(crate) fn slot_permutation(dim: usize, order: usize, perm: &[usize]) -> Vec<usize> {
    let n = dim.pow(order as u32);
    let mut tuple = vec![0usize; order];
    (0..n)
        .map(|flat| {
            let mut r = flat;
            for k in (0..order).rev() {
                tuple[k] = r % dim;
                r /= dim;
            }
            perm.iter().fold(0, |acc, &k| acc * dim + tuple[k])
        })
        .collect()
}

/// Permutation tables for the symmetry class of a given order.
pub(crate) struct SymmetryTables {
    pub swap01: Vec<usize>,
    pub swap23: Vec<usize>,
    pub pair: Vec<usize>,
    pub bianchi: [Vec<usize>; 2],
    pub second_bianchi: Option<[Vec<usize>; 2]>,
}

impl SymmetryTables {
    pub fn new(dim: usize, order: usize) -> Self {
        assert!(order == 4 || order == 5, "orders 4 and 5 only");
        let ext = |p: &[usize]| -> Vec<usize> {
            let mut v = p.to_vec();
            if order == 5 {
                v.push(4);
            }
            v
        };
        let t = |p: &[usize]| slot_permutation(dim, order, &ext(p));
        SymmetryTables {
            swap01: t(&[1, 0, 2, 3]),
            swap23: t(&[0, 1, 3, 2]),
            pair: t(&[2, 3, 0, 1]),
            bianchi: [t(&[1, 2, 0, 3]), t(&[2, 0, 1, 3])],
            second_bianchi: (order == 5).then(|| {
                [
                    slot_permutation(dim, 5, &[0, 1, 3, 4, 2]),
                    slot_permutation(dim, 5, &[0, 1, 4, 2, 3]),
                ]
            }),
        }
    }
}

/// Per-identity maximum of `|T - P_k T|`, where `P_k` is the averaging
/// projector of identity `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryResidual {
    pub antisymmetry: f64,
    pub pair_symmetry: f64,
    pub first_bianchi: f64,
    /// Present for rank-5 arrays only.
    pub second_bianchi: Option<f64>,
    pub max_abs_coefficient: f64,
    /// Worst residual divided by the largest coefficient (0 for the zero array).
    pub relative: f64,
}

impl SymmetryResidual {
    pub fn max(&self) -> f64 {
        self.antisymmetry
            .max(self.pair_symmetry)
            .max(self.first_bianchi)
            .max(self.second_bianchi.unwrap_or(0.0))
    }

    /// Every identity holds to `tol` in absolute terms.
    pub fn passes(&self, tol: f64) -> bool {
        self.max() <= tol
    }

    pub fn worst(&self) -> (&'static str, f64) {
        let mut items = vec![
            ("antisymmetry", self.antisymmetry),
            ("pair_symmetry", self.pair_symmetry),
            ("first_bianchi", self.first_bianchi),
        ];
        if let Some(s) = self.second_bianchi {
            items.push(("second_bianchi", s));
        }
        items
            .into_iter()
            .fold(("antisymmetry", f64::NEG_INFINITY), |a, b| {
                if b.1 > a.1 {
                    b
                } else {
                    a
                }
            })
    }
}

fn residual_with(t: &CoeffArray, tables: &SymmetryTables) -> SymmetryResidual {
    let d = &t.data;
    let mut anti: f64 = 0.0;
    let mut pair: f64 = 0.0;
    let mut b1: f64 = 0.0;
    let mut b2: f64 = 0.0;
    for i in 0..d.len() {
        anti = anti
            .max((d[i] + d[tables.swap01[i]]).abs() / 2.0)
            .max((d[i] + d[tables.swap23[i]]).abs() / 2.0);
        pair = pair.max((d[i] - d[tables.pair[i]]).abs() / 2.0);
        b1 = b1.max((d[i] + d[tables.bianchi[0][i]] + d[tables.bianchi[1][i]]).abs() / 3.0);
        if let Some(c) = &tables.second_bianchi {
            b2 = b2.max((d[i] + d[c[0][i]] + d[c[1][i]]).abs() / 3.0);
        }
    }
    let max_abs = t.max_abs();
    let mut r = SymmetryResidual {
        antisymmetry: anti,
        pair_symmetry: pair,
        first_bianchi: b1,
        second_bianchi: tables.second_bianchi.as_ref().map(|_| b2),
        max_abs_coefficient: max_abs,
        relative: 0.0,
    };
    r.relative = if max_abs > 0.0 {
        r.max() / max_abs
    } else {
        0.0
    };
    r
}

fn expect_order(t: &CoeffArray, order: usize) -> Result<()> {
    if t.order != order || t.data.len() != t.dim.pow(order as u32) {
        return Err(Error::DimensionMismatch {
            expected: t.dim.pow(order as u32),
            found: t.data.len(),
        });
    }
    Ok(())
}

/// Residuals of the algebraic curvature tensor identities.
pub fn validate_act(t: &CoeffArray) -> Result<SymmetryResidual> {
    expect_order(t, 4)?;
    Ok(residual_with(t, &SymmetryTables::new(t.dim, 4)))
}

/// Residuals of the covariant-derivative curvature tensor identities.
pub fn validate_acdt(t: &CoeffArray) -> Result<SymmetryResidual> {
    expect_order(t, 5)?;
    Ok(residual_with(t, &SymmetryTables::new(t.dim, 5)))
}

fn antisymmetrize(d: &mut [f64], buf: &mut [f64], table: &[usize]) {
    for i in 0..d.len() {
        buf[i] = 0.5 * (d[i] - d[table[i]]);
    }
    d.copy_from_slice(buf);
}

fn symmetrize(d: &mut [f64], buf: &mut [f64], table: &[usize]) {
    for i in 0..d.len() {
        buf[i] = 0.5 * (d[i] + d[table[i]]);
    }
    d.copy_from_slice(buf);
}

fn remove_cyclic_mean(d: &mut [f64], buf: &mut [f64], c: &[Vec<usize>; 2]) {
    for i in 0..d.len() {
        buf[i] = d[i] - (d[i] + d[c[0][i]] + d[c[1][i]]) / 3.0;
    }
    d.copy_from_slice(buf);
}

fn project_with(
    t: &CoeffArray,
    tables: &SymmetryTables,
    tol: f64,
    max_iter: usize,
) -> Result<CoeffArray> {
    let mut out = t.clone();
    let scale = t.max_abs();
    if scale == 0.0 {
        return Ok(out);
    }
    let mut buf = vec![0.0; out.data.len()];
    let mut last = f64::INFINITY;
    for _ in 0..max_iter {
        let d = &mut out.data;
        antisymmetrize(d, &mut buf, &tables.swap01);
        antisymmetrize(d, &mut buf, &tables.swap23);
        symmetrize(d, &mut buf, &tables.pair);
        remove_cyclic_mean(d, &mut buf, &tables.bianchi);
        if let Some(c) = &tables.second_bianchi {
            remove_cyclic_mean(d, &mut buf, c);
        }
        last = residual_with(&out, tables).max();
        if last <= tol * scale {
            return Ok(out);
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        residual: last,
    })
}

/// Orthogonal projection of a rank-4 array onto algebraic curvature tensors.
/// `tol` is relative to the largest input coefficient.
pub fn project_to_act(t: &CoeffArray, tol: f64, max_iter: usize) -> Result<CoeffArray> {
    expect_order(t, 4)?;
    project_with(t, &SymmetryTables::new(t.dim, 4), tol, max_iter)
}

/// Orthogonal projection of a rank-5 array onto covariant-derivative
/// curvature tensors. `tol` is relative to the largest input coefficient.
pub fn project_to_acdt(t: &CoeffArray, tol: f64, max_iter: usize) -> Result<CoeffArray> {
    expect_order(t, 5)?;
    project_with(t, &SymmetryTables::new(t.dim, 5), tol, max_iter)
}

fn check_space(space: &PseudoSpace, coeffs: &CoeffArray) -> Result<()> {
    if coeffs.dim != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: coeffs.dim,
        });
    }
    Ok(())
}

fn reject(res: SymmetryResidual, tol: f64) -> Result<()> {
    if res.relative > tol {
        let (identity, residual) = res.worst();
        return Err(Error::Validation {
            identity,
            residual,
            tol,
        });
    }
    Ok(())
}

/// An algebraic curvature tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct ActTensor {
    space: PseudoSpace,
    coeffs: CoeffArray,
}

impl ActTensor {
    /// Accepts `coeffs` if its relative residual is at most `tol`.
    pub fn new(space: PseudoSpace, coeffs: CoeffArray, tol: f64) -> Result<Self> {
        check_space(&space, &coeffs)?;
        reject(validate_act(&coeffs)?, tol)?;
        Ok(ActTensor { space, coeffs })
    }

    pub fn zero(space: PseudoSpace) -> Self {
        ActTensor {
            coeffs: CoeffArray::zeros(space.dim(), 4),
            space,
        }
    }

    /// Projection of a Gaussian array drawn from `seed`.
    pub fn random(space: PseudoSpace, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = CoeffArray::random(space.dim(), 4, &mut rng);
        let coeffs = project_to_act(&raw, DEFAULT_PROJECTION_TOL, DEFAULT_MAX_ITER)
            .expect("projection converges for Gaussian input");
        ActTensor { space, coeffs }
    }

    pub fn space(&self) -> PseudoSpace {
        self.space
    }

    pub fn coeffs(&self) -> &CoeffArray {
        &self.coeffs
    }

    /// The Jacobi operator `J(v)`, characterized by `(J(v)y, z) = R(y,v,v,z)`.
    pub fn jacobi(&self, v: &Vector) -> SelfAdjointOperator {
        let m = self.space.dim();
        assert_eq!(v.len(), m, "vector length must equal the space dimension");
        let d = &self.coeffs.data;
        let mut form = DMatrix::zeros(m, m);
        for y in 0..m {
            for a in 0..m {
                for b in 0..m {
                    let vab = v[a] * v[b];
                    if vab == 0.0 {
                        continue;
                    }
                    let base = ((y * m + a) * m + b) * m;
                    for z in 0..m {
                        form[(y, z)] += d[base + z] * vab;
                    }
                }
            }
        }
        SelfAdjointOperator::new_unchecked(
            self.space.signature,
            form_to_operator(&self.space, &form),
        )
    }
}

/// Converts a bilinear form `M[y][z] = (A y, z)` into the matrix of `A`:
/// `A = g⁻¹ Mᵀ`, and `g⁻¹ = g` for the canonical metric.
fn form_to_operator(space: &PseudoSpace, form: &DMatrix<f64>) -> DMatrix<f64> {
    let m = space.dim();
    DMatrix::from_fn(m, m, |i, j| space.signature.sign(i) * form[(j, i)])
}

/// An algebraic covariant-derivative curvature tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct AcdtTensor {
    space: PseudoSpace,
    coeffs: CoeffArray,
}

impl AcdtTensor {
    /// Accepts `coeffs` if its relative residual is at most `tol`.
    pub fn new(space: PseudoSpace, coeffs: CoeffArray, tol: f64) -> Result<Self> {
        check_space(&space, &coeffs)?;
        reject(validate_acdt(&coeffs)?, tol)?;
        Ok(AcdtTensor { space, coeffs })
    }

    pub fn zero(space: PseudoSpace) -> Self {
        AcdtTensor {
            coeffs: CoeffArray::zeros(space.dim(), 5),
            space,
        }
    }

    /// Projects an arbitrary rank-5 array into the class.
    pub fn from_projection(space: PseudoSpace, raw: &CoeffArray) -> Result<Self> {
        check_space(&space, raw)?;
        let coeffs = project_to_acdt(raw, DEFAULT_PROJECTION_TOL, DEFAULT_MAX_ITER)?;
        Ok(AcdtTensor { space, coeffs })
    }

    /// Projection of a Gaussian array drawn from `seed`.
    pub fn random(space: PseudoSpace, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(space, &mut rng)
    }

    pub fn random_with<R: rand::Rng>(space: PseudoSpace, rng: &mut R) -> Self {
        let raw = CoeffArray::random(space.dim(), 5, rng);
        Self::from_projection(space, &raw).expect("projection converges for Gaussian input")
    }

    pub fn space(&self) -> PseudoSpace {
        self.space
    }

    pub fn coeffs(&self) -> &CoeffArray {
        &self.coeffs
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.scale(s);
        AcdtTensor {
            space: self.space,
            coeffs,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.max_abs()
    }

    /// The bilinear form `M[y][z] = D(y,v,v,z;v)`.
    pub fn szabo_form(&self, v: &Vector) -> DMatrix<f64> {
        let m = self.space.dim();
        assert_eq!(v.len(), m, "vector length must equal the space dimension");
        let d = &self.coeffs.data;
        let mut form = DMatrix::zeros(m, m);
        for y in 0..m {
            for a in 0..m {
                for b in 0..m {
                    let vab = v[a] * v[b];
                    if vab == 0.0 {
                        continue;
                    }
                    for z in 0..m {
                        let base = (((y * m + a) * m + b) * m + z) * m;
                        let s: f64 = (0..m).map(|c| d[base + c] * v[c]).sum();
                        form[(y, z)] += s * vab;
                    }
                }
            }
        }
        form
    }

    /// The Szabó operator `S(v)`, characterized by `(S(v)y, z) = D(y,v,v,z;v)`.
    pub fn szabo(&self, v: &Vector) -> SelfAdjointOperator {
        let form = self.szabo_form(v);
        SelfAdjointOperator::new_unchecked(
            self.space.signature,
            form_to_operator(&self.space, &form),
        )
    }
}

/// Free-function form of [`ActTensor::jacobi`].
pub fn jacobi(r: &ActTensor, v: &Vector) -> SelfAdjointOperator {
    r.jacobi(v)
}

/// Free-function form of [`AcdtTensor::szabo`].
pub fn szabo(r: &AcdtTensor, v: &Vector) -> SelfAdjointOperator {
    r.szabo(v)
}
