//! Pseudo-Euclidean vector spaces and self-adjoint operators.
//!
//! Coordinates are taken with respect to an orthonormal basis ordered timelike
//! first: the metric is `diag(-1, ..., -1, +1, ..., +1)` with `p` negative
//! entries. In this basis the map that flips the sign of the timelike part
//! has the same array as the metric, and the metric is its own inverse.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::max_abs;

/// Coordinate vectors are plain column vectors.
pub type Vector = DVector<f64>;

/// Default tolerance used to classify vectors as spacelike, timelike or null.
pub const DEFAULT_CLASSIFICATION_TOL: f64 = 1e-12;

/// Numbers of timelike (`p`) and spacelike (`q`) directions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
}

impl Signature {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p + q == 0 {
            return Err(Error::InvalidSignature { p, q });
        }
        Ok(Signature { p, q })
    }

    /// Total dimension `p + q`.
    #[inline]
    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    /// Diagonal metric entry of coordinate `i`.
    #[inline]
    pub fn sign(&self, i: usize) -> f64 {
        if i < self.p {
            -1.0
        } else {
            1.0
        }
    }

    /// The signature of the negated metric.
    pub fn flipped(&self) -> Signature {
        Signature {
            p: self.q,
            q: self.p,
        }
    }

    /// Every nondegenerate signature with `lo <= p + q <= hi`.
    pub fn all_with_dim(lo: usize, hi: usize) -> Vec<Signature> {
        let mut out = Vec::new();
        for m in lo.max(1)..=hi {
            for p in 0..=m {
                out.push(Signature { p, q: m - p });
            }
        }
        out
    }
}

impl std::fmt::Display for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// A real vector space with the canonical diagonal metric of a signature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PseudoSpace {
    pub signature: Signature,
    /// Relative tolerance for causal classification.
    pub classification_tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalType {
    Spacelike,
    Timelike,
    Null,
    Zero,
}

impl PseudoSpace {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        Ok(PseudoSpace {
            signature: Signature::new(p, q)?,
            classification_tol: DEFAULT_CLASSIFICATION_TOL,
        })
    }

    pub fn from_signature(signature: Signature) -> Self {
        PseudoSpace {
            signature,
            classification_tol: DEFAULT_CLASSIFICATION_TOL,
        }
    }

    pub fn with_classification_tol(mut self, tol: f64) -> Self {
        self.classification_tol = tol;
        self
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.signature.dim()
    }

    /// The metric array `diag(-1,..,-1,+1,..,+1)`.
    pub fn metric(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.metric_diagonal())
    }

    pub fn metric_diagonal(&self) -> DVector<f64> {
        DVector::from_fn(self.dim(), |i, _| self.signature.sign(i))
    }

    fn check_len(&self, v: &Vector) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(())
    }

    /// The indefinite inner product `(v, w)`.
    pub fn inner(&self, v: &Vector, w: &Vector) -> Result<f64> {
        if v.len() != w.len() {
            return Err(Error::DimensionMismatch {
                expected: v.len(),
                found: w.len(),
            });
        }
        self.check_len(v)?;
        Ok(self.inner_unchecked(v, w))
    }

    #[inline]
    pub(crate) fn inner_unchecked(&self, v: &Vector, w: &Vector) -> f64 {
        let p = self.signature.p;
        let mut s = 0.0;
        for i in 0..v.len() {
            let t = v[i] * w[i];
            if i < p {
                s -= t;
            } else {
                s += t;
            }
        }
        s
    }

    pub fn causal_type(&self, v: &Vector) -> Result<CausalType> {
        self.check_len(v)?;
        if v.iter().all(|&x| x == 0.0) {
            return Ok(CausalType::Zero);
        }
        let norm = self.inner_unchecked(v, v);
        let scale = self.classification_tol * v.norm_squared();
        Ok(if norm > scale {
            CausalType::Spacelike
        } else if norm < -scale {
            CausalType::Timelike
        } else {
            CausalType::Null
        })
    }

    /// Flips the sign of the timelike coordinates.
    pub fn psi(&self, v: &Vector) -> Result<Vector> {
        self.check_len(v)?;
        let mut out = v.clone();
        for i in 0..self.signature.p {
            out[i] = -out[i];
        }
        Ok(out)
    }

    /// The positive definite product `(psi v, w)`.
    pub fn euclidean_inner(&self, v: &Vector, w: &Vector) -> Result<f64> {
        let pv = self.psi(v)?;
        self.inner(&pv, w)
    }

    /// Splits `w` into its spacelike and timelike coordinate parts, given a
    /// base point `v` that is a unit vector of the coordinate spacelike
    /// subspace and `w` orthogonal to it.
    pub fn tangent_project(&self, v: &Vector, w: &Vector, tol: f64) -> Result<(Vector, Vector)> {
        self.check_len(v)?;
        self.check_len(w)?;
        let p = self.signature.p;
        if v.iter().take(p).any(|&x| x.abs() > tol) {
            return Err(Error::Precondition(
                "base point must have zero timelike coordinates".into(),
            ));
        }
        if (self.inner_unchecked(v, v) - 1.0).abs() > tol {
            return Err(Error::Precondition(
                "base point must be a unit spacelike vector".into(),
            ));
        }
        let vw = self.inner_unchecked(v, w);
        if vw.abs() > tol * w.norm().max(1.0) {
            return Err(Error::Precondition(format!(
                "w is not orthogonal to the base point: (v,w) = {vw:e}"
            )));
        }
        let mut plus = w.clone();
        let mut minus = DVector::zeros(w.len());
        for i in 0..p {
            minus[i] = w[i];
            plus[i] = 0.0;
        }
        Ok((plus, minus))
    }

    /// Checks `(Av, w) = (v, Aw)` through symmetry of `gA`.
    pub fn is_self_adjoint(&self, a: &DMatrix<f64>, tol: f64) -> SelfAdjointCheck {
        let m = self.dim();
        if a.nrows() != m || a.ncols() != m {
            return SelfAdjointCheck {
                is_self_adjoint: false,
                residual: f64::INFINITY,
            };
        }
        let mut residual: f64 = 0.0;
        for i in 0..m {
            for j in (i + 1)..m {
                let d = self.signature.sign(i) * a[(i, j)] - self.signature.sign(j) * a[(j, i)];
                residual = residual.max(d.abs());
            }
        }
        SelfAdjointCheck {
            is_self_adjoint: residual <= tol * max_abs(a).max(1.0),
            residual,
        }
    }

    /// Draws `A = psi * S` with `S` a symmetric matrix of independent standard
    /// normal entries, so `gA = S` is symmetric exactly.
    pub fn random_self_adjoint(&self, seed: u64) -> SelfAdjointOperator {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.random_self_adjoint_with(&mut rng)
    }

    pub fn random_self_adjoint_with<R: rand::Rng>(&self, rng: &mut R) -> SelfAdjointOperator {
        let m = self.dim();
        let mut s = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let x: f64 = StandardNormal.sample(rng);
                s[(i, j)] = x;
                s[(j, i)] = x;
            }
        }
        for i in 0..self.signature.p {
            for j in 0..m {
                s[(i, j)] = -s[(i, j)];
            }
        }
        SelfAdjointOperator {
            matrix: s,
            signature: self.signature,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfAdjointCheck {
    pub is_self_adjoint: bool,
    pub residual: f64,
}

/// A linear map that is self-adjoint for the metric of `signature`.
#[derive(Clone, Debug, PartialEq)]
pub struct SelfAdjointOperator {
    matrix: DMatrix<f64>,
    signature: Signature,
}

impl SelfAdjointOperator {
    pub fn new(space: &PseudoSpace, matrix: DMatrix<f64>, tol: f64) -> Result<Self> {
        if matrix.nrows() != space.dim() || matrix.ncols() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: matrix.nrows(),
            });
        }
        let check = space.is_self_adjoint(&matrix, tol);
        if !check.is_self_adjoint {
            return Err(Error::Precondition(format!(
                "operator is not self-adjoint (residual {:e})",
                check.residual
            )));
        }
        Ok(SelfAdjointOperator {
            matrix,
            signature: space.signature,
        })
    }

    pub(crate) fn new_unchecked(signature: Signature, matrix: DMatrix<f64>) -> Self {
        SelfAdjointOperator { matrix, signature }
    }

    pub fn zero(space: &PseudoSpace) -> Self {
        Self::new_unchecked(space.signature, DMatrix::zeros(space.dim(), space.dim()))
    }

    pub fn identity(space: &PseudoSpace) -> Self {
        Self::new_unchecked(space.signature, DMatrix::identity(space.dim(), space.dim()))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn space(&self) -> PseudoSpace {
        PseudoSpace::from_signature(self.signature)
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        &self.matrix * v
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self::new_unchecked(self.signature, &self.matrix * t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> Vector {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn inner_examples() {
        let s11 = PseudoSpace::new(1, 1).unwrap();
        assert_eq!(s11.inner(&v(&[1.0, 0.0]), &v(&[1.0, 0.0])).unwrap(), -1.0);
        assert_eq!(s11.inner(&v(&[1.0, 1.0]), &v(&[1.0, 1.0])).unwrap(), 0.0);
        let e2 = PseudoSpace::new(0, 2).unwrap();
        assert_eq!(e2.inner(&v(&[3.0, 4.0]), &v(&[3.0, 4.0])).unwrap(), 25.0);
    }

    #[test]
    fn inner_rejects_mismatched_lengths() {
        let s = PseudoSpace::new(1, 2).unwrap();
        let err = s.inner(&v(&[1.0, 0.0]), &v(&[1.0, 0.0, 0.0])).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                found: 3
            }
        );
        assert!(err.to_string().contains('2') && err.to_string().contains('3'));
    }

    #[test]
    fn signature_rejects_zero_dimension() {
        assert!(Signature::new(0, 0).is_err());
    }

    #[test]
    fn causal_examples() {
        let s11 = PseudoSpace::new(1, 1).unwrap();
        assert_eq!(
            s11.causal_type(&v(&[0.0, 1.0])).unwrap(),
            CausalType::Spacelike
        );
        assert_eq!(s11.causal_type(&v(&[1.0, 1.0])).unwrap(), CausalType::Null);
        assert_eq!(s11.causal_type(&v(&[0.0, 0.0])).unwrap(), CausalType::Zero);
        let s22 = PseudoSpace::new(2, 2).unwrap();
        assert_eq!(
            s22.causal_type(&v(&[1.0, 0.0, 0.0, 0.0])).unwrap(),
            CausalType::Timelike
        );
    }

    #[test]
    fn self_adjoint_examples() {
        let s11 = PseudoSpace::new(1, 1).unwrap();
        let id = DMatrix::<f64>::identity(2, 2);
        let c = s11.is_self_adjoint(&id, 1e-12);
        assert!(c.is_self_adjoint);
        assert_eq!(c.residual, 0.0);
        let swap = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(!s11.is_self_adjoint(&swap, 1e-12).is_self_adjoint);
        let nil = DMatrix::from_row_slice(2, 2, &[-1.0, -1.0, 1.0, 1.0]);
        assert!(s11.is_self_adjoint(&nil, 1e-12).is_self_adjoint);
    }

    #[test]
    fn random_self_adjoint_is_deterministic() {
        let s = PseudoSpace::new(1, 1).unwrap();
        let a = s.random_self_adjoint(17);
        let b = s.random_self_adjoint(17);
        assert_eq!(a, b);
        let ga = s.metric() * a.matrix();
        assert_eq!(ga.clone(), ga.transpose());
    }

    #[test]
    fn random_self_adjoint_passes_check() {
        let s = PseudoSpace::new(2, 2).unwrap();
        for seed in 0..1000 {
            let a = s.random_self_adjoint(seed);
            assert!(s.is_self_adjoint(a.matrix(), 1e-12).is_self_adjoint);
        }
    }

    #[test]
    fn psi_examples() {
        let s11 = PseudoSpace::new(1, 1).unwrap();
        let x = v(&[1.0, 1.0]);
        assert_eq!(s11.psi(&x).unwrap(), v(&[-1.0, 1.0]));
        assert_eq!(s11.euclidean_inner(&x, &x).unwrap(), 2.0);
        let e3 = PseudoSpace::new(0, 3).unwrap();
        let y = v(&[1.0, -2.0, 3.0]);
        assert_eq!(e3.psi(&y).unwrap(), y);
    }

    #[test]
    fn euclidean_inner_is_positive_definite() {
        use rand::Rng;
        let s = PseudoSpace::new(2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let x = DVector::from_fn(5, |_, _| rng.random_range(-1.0..1.0));
            assert!(s.euclidean_inner(&x, &x).unwrap() > 0.0);
        }
        let z = DVector::zeros(5);
        assert_eq!(s.euclidean_inner(&z, &z).unwrap(), 0.0);
    }

    #[test]
    fn tangent_project_example() {
        let s = PseudoSpace::new(1, 2).unwrap();
        let (plus, minus) = s
            .tangent_project(&v(&[0.0, 1.0, 0.0]), &v(&[1.0, 0.0, 1.0]), 1e-12)
            .unwrap();
        assert_eq!(plus, v(&[0.0, 0.0, 1.0]));
        assert_eq!(minus, v(&[1.0, 0.0, 0.0]));
        assert_eq!(s.inner(&plus, &v(&[0.0, 1.0, 0.0])).unwrap(), 0.0);

        let (_, minus) = s
            .tangent_project(&v(&[0.0, 1.0, 0.0]), &v(&[0.0, 0.0, 2.0]), 1e-12)
            .unwrap();
        assert_eq!(minus, DVector::zeros(3));
    }

    #[test]
    fn tangent_project_rejects_non_orthogonal() {
        let s = PseudoSpace::new(1, 2).unwrap();
        let err = s
            .tangent_project(&v(&[0.0, 1.0, 0.0]), &v(&[0.0, 1.0, 0.0]), 1e-12)
            .unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }
}
