//! Generalized eigenspaces and Jordan block structure of self-adjoint maps of
//! an indefinite inner product space.
//!
//! For an eigenvalue `λ` the real operator `A_λ` is `A - λ` when `λ` is real
//! and `(A - λ)(A - λ̄)` otherwise. The generalized eigenspace `E_λ` is the
//! kernel of `A_λ^m`, a real subspace that carries both `λ` and `λ̄`.
//!
//! Numerically the kernel of the `m`-th power is never formed. Instead the
//! chain `K_1 ⊂ K_2 ⊂ ... ⊂ K_m` with `K_1 = ker A_λ` and
//! `K_{j+1} = ker((I - P_{K_j}) A_λ)` is built, where `P_{K_j}` is the
//! orthogonal projector onto `K_j`. Each step is a singular value
//! decomposition of a matrix whose conditioning is that of `A_λ`, not of its
//! `m`-th power, and the dimensions `dim K_j` are the rank staircase from
//! which the Jordan block sizes are read off.

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::linalg::{ascending_right_singular, singular_values};
use crate::serde_util;
use crate::space::{PseudoSpace, SelfAdjointOperator};

pub type Complex64 = Complex<f64>;

/// Default tolerance for clustering and kernel thresholds.
pub const DEFAULT_TOL: f64 = 1e-9;

/// One generalized eigenspace.
#[derive(Clone, Debug)]
pub struct JordanEntry {
    /// Eigenvalue representative, `Im λ >= 0`; exactly real for real clusters.
    pub lambda: Complex64,
    /// Algebraic multiplicity of `λ` over the complex numbers.
    pub multiplicity: usize,
    /// Columns form a Euclidean-orthonormal basis of `E_λ`.
    pub basis: DMatrix<f64>,
    /// Numbers of negative and positive directions of the induced metric.
    pub signature: (usize, usize),
    /// Complex Jordan block sizes of `A` at `λ`, descending.
    pub block_sizes: Vec<usize>,
    /// Smallest singular value of the Gram matrix of `basis`.
    pub gram_min_singular: f64,
    /// `dim K_j` for `j = 1..=m`.
    pub kernel_staircase: Vec<usize>,
}

impl JordanEntry {
    pub fn is_real(&self) -> bool {
        self.lambda.im == 0.0
    }

    pub fn real_dim(&self) -> usize {
        self.basis.ncols()
    }
}

#[derive(Clone, Debug)]
pub struct JordanDecomposition {
    pub entries: Vec<JordanEntry>,
    pub tol: f64,
    /// Spectral radius of the input.
    pub spectral_radius: f64,
    /// Two clusters would merge at ten times the clustering radius.
    pub near_merge: bool,
    /// Some kernel chain did not reach the cluster's algebraic multiplicity
    /// and was completed from the smallest singular directions.
    pub multiplicity_mismatch: bool,
    operator: DMatrix<f64>,
    space: PseudoSpace,
}

/// Eigenvalue clusters and their Jordan block multisets; the object compared
/// across sample points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JordanStructure {
    pub entries: Vec<StructureEntry>,
    pub spectral_radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureEntry {
    #[serde(with = "serde_util::complex")]
    pub lambda: Complex64,
    pub blocks: Vec<usize>,
}

/// Eigenvalue multiset: cluster centres with algebraic multiplicities,
/// conjugates listed separately.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: Vec<SpectrumValue>,
    pub spectral_radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumValue {
    #[serde(with = "serde_util::complex")]
    pub lambda: Complex64,
    pub multiplicity: usize,
}

fn cmp_complex(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Clustering radius for a group of `k` eigenvalues. A Jordan block of size
/// `k` splits under a perturbation of relative size `tol` into eigenvalues
/// spread over roughly `tol^(1/k)`.
fn merge_radius(tol: f64, k: usize, scale: f64) -> f64 {
    tol.powf(1.0 / k as f64) * scale
}

fn diameter(points: &[Complex64]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            d = d.max((a - b).norm());
        }
    }
    d
}

/// Agglomerative clustering: repeatedly merge the pair of clusters whose
/// union has the smallest diameter, while that diameter is within the merge
/// radius for the union's size.
pub(crate) fn cluster_eigenvalues(
    eigs: &[Complex64],
    tol: f64,
    scale: f64,
) -> (Vec<Vec<Complex64>>, bool) {
    let mut clusters: Vec<Vec<Complex64>> = eigs.iter().map(|&e| vec![e]).collect();
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..clusters.len() {
            for j in (i + 1)..clusters.len() {
                let mut u = clusters[i].clone();
                u.extend_from_slice(&clusters[j]);
                let d = diameter(&u);
                if best.is_none_or(|(_, _, bd)| d < bd) {
                    best = Some((i, j, d));
                }
            }
        }
        match best {
            Some((i, j, d))
                if d <= merge_radius(tol, clusters[i].len() + clusters[j].len(), scale) =>
            {
                let cj = clusters.remove(j);
                clusters[i].extend(cj);
            }
            _ => break,
        }
    }
    let mut near = false;
    for i in 0..clusters.len() {
        for j in (i + 1)..clusters.len() {
            let mut u = clusters[i].clone();
            u.extend_from_slice(&clusters[j]);
            let k = u.len();
            if diameter(&u) <= 10.0 * merge_radius(tol, k, scale) {
                near = true;
            }
        }
    }
    (clusters, near)
}

fn mean(points: &[Complex64]) -> Complex64 {
    let s: Complex64 = points.iter().sum();
    s / points.len() as f64
}

/// Decomposes a self-adjoint operator into generalized eigenspaces.
pub fn jordan_decompose(a: &SelfAdjointOperator, tol: f64) -> JordanDecomposition {
    let space = a.space();
    let mat = a.matrix().clone();
    let m = mat.nrows();
    let eigs: Vec<Complex64> = mat.complex_eigenvalues().iter().copied().collect();
    let rho = eigs.iter().fold(0.0f64, |r, e| r.max(e.norm()));
    let scale = rho.max(1.0);
    let (clusters, near_merge) = cluster_eigenvalues(&eigs, tol, scale);
    let a_norm = singular_values(&mat).first().copied().unwrap_or(0.0);

    let mut entries = Vec::new();
    let mut mismatch = false;
    for cluster in &clusters {
        let c = mean(cluster);
        let diam = diameter(cluster);
        let real = c.im.abs() <= diam.max(tol * scale);
        if !real && c.im < 0.0 {
            continue;
        }
        let lambda = if real { Complex64::new(c.re, 0.0) } else { c };
        let k = cluster.len();
        let d = if real { k } else { 2 * k };

        let id = DMatrix::<f64>::identity(m, m);
        let a_lambda = if real {
            &mat - &id * lambda.re
        } else {
            &mat * &mat - &mat * (2.0 * lambda.re) + &id * lambda.norm_sqr()
        };
        let spread = cluster
            .iter()
            .map(|mu| {
                if real {
                    (mu - lambda).norm()
                } else {
                    ((mu - lambda) * (mu - lambda.conj())).norm()
                }
            })
            .fold(0.0f64, f64::max);
        let bound = if real {
            a_norm + lambda.norm()
        } else {
            (a_norm + lambda.norm()).powi(2)
        };
        let s_lambda = singular_values(&a_lambda).first().copied().unwrap_or(0.0);
        let theta = tol * s_lambda + 10.0 * spread + 1e3 * f64::EPSILON * bound;

        let mut q = DMatrix::<f64>::zeros(m, 0);
        let mut staircase = Vec::with_capacity(m);
        let mut last_v = DMatrix::<f64>::identity(m, m);
        for _ in 0..m {
            let proj = &id - &q * q.transpose();
            let b = proj * &a_lambda;
            let (vals, v) = ascending_right_singular(&b);
            let mut count = vals.iter().filter(|&&s| s <= theta).count();
            if count > d {
                mismatch = true;
                count = d;
            }
            let prev = staircase.last().copied().unwrap_or(0);
            count = count.max(prev);
            q = v.columns(0, count).into_owned();
            staircase.push(count);
            last_v = v;
        }
        if q.ncols() < d {
            mismatch = true;
            q = last_v.columns(0, d).into_owned();
            if let Some(top) = staircase.last_mut() {
                *top = d;
            }
        }

        let blocks = blocks_from_staircase(&staircase, !real, &mut mismatch);

        let gram = q.transpose() * space.metric() * &q;
        let geig = gram.symmetric_eigen();
        let neg = geig.eigenvalues.iter().filter(|&&x| x < 0.0).count();
        let pos = geig.eigenvalues.len() - neg;
        let gram_min = geig
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |acc, x| acc.min(x.abs()));

        entries.push(JordanEntry {
            lambda,
            multiplicity: k,
            basis: q,
            signature: (neg, pos),
            block_sizes: blocks,
            gram_min_singular: gram_min,
            kernel_staircase: staircase,
        });
    }
    entries.sort_by(|x, y| cmp_complex(&x.lambda, &y.lambda));
    JordanDecomposition {
        entries,
        tol,
        spectral_radius: rho,
        near_merge,
        multiplicity_mismatch: mismatch,
        operator: mat,
        space,
    }
}

/// Reads complex Jordan block sizes from the kernel staircase. For a
/// non-real eigenvalue the real staircase counts each block twice.
fn blocks_from_staircase(staircase: &[usize], complex: bool, mismatch: &mut bool) -> Vec<usize> {
    let n = staircase.len();
    let at_least: Vec<usize> = (0..n)
        .map(|j| staircase[j] - if j == 0 { 0 } else { staircase[j - 1] })
        .collect();
    let mut blocks = Vec::new();
    for j in 0..n {
        let next = if j + 1 < n { at_least[j + 1] } else { 0 };
        let mut count = at_least[j].saturating_sub(next);
        if at_least[j] < next {
            *mismatch = true;
        }
        if complex {
            if count % 2 == 1 {
                *mismatch = true;
            }
            count /= 2;
        }
        for _ in 0..count {
            blocks.push(j + 1);
        }
    }
    blocks.sort_unstable_by(|a, b| b.cmp(a));
    blocks
}

impl JordanDecomposition {
    pub fn space(&self) -> PseudoSpace {
        self.space
    }

    /// Sum of the real dimensions of all generalized eigenspaces.
    pub fn total_dim(&self) -> usize {
        self.entries.iter().map(|e| e.real_dim()).sum()
    }

    /// Every block has size one.
    pub fn is_jordan_simple(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.block_sizes.iter().all(|&b| b == 1))
    }

    /// The matrix whose columns are all eigenspace bases side by side.
    pub fn change_of_basis(&self) -> DMatrix<f64> {
        let m = self.operator.nrows();
        let mut p = DMatrix::zeros(m, self.total_dim());
        let mut col = 0;
        for e in &self.entries {
            p.columns_mut(col, e.real_dim()).copy_from(&e.basis);
            col += e.real_dim();
        }
        p
    }

    /// Max-entry distance between the operator and
    /// `P · blockdiag(Q_i^T A Q_i) · P^{-1}`, or infinity if `P` is singular.
    pub fn reconstruction_residual(&self) -> f64 {
        let m = self.operator.nrows();
        let p = self.change_of_basis();
        if p.ncols() != m {
            return f64::INFINITY;
        }
        let mut blocks = DMatrix::zeros(m, m);
        let mut off = 0;
        for e in &self.entries {
            let d = e.real_dim();
            let c = e.basis.transpose() * &self.operator * &e.basis;
            blocks.view_mut((off, off), (d, d)).copy_from(&c);
            off += d;
        }
        let Some(pinv) = p.clone().try_inverse() else {
            return f64::INFINITY;
        };
        let recon = &p * blocks * pinv;
        (recon - &self.operator)
            .iter()
            .fold(0.0f64, |acc, x| acc.max(x.abs()))
    }

    /// Largest cross inner product between basis vectors of distinct entries.
    pub fn orthogonality_residual(&self) -> f64 {
        let g = self.space.metric();
        let mut worst: f64 = 0.0;
        for (i, a) in self.entries.iter().enumerate() {
            for b in &self.entries[i + 1..] {
                let cross = a.basis.transpose() * &g * &b.basis;
                worst = cross.iter().fold(worst, |acc, x| acc.max(x.abs()));
            }
        }
        worst
    }

    /// Smallest Gram singular value over all entries.
    pub fn min_gram_singular(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.gram_min_singular)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn structure(&self) -> JordanStructure {
        JordanStructure {
            entries: self
                .entries
                .iter()
                .map(|e| StructureEntry {
                    lambda: e.lambda,
                    blocks: e.block_sizes.clone(),
                })
                .collect(),
            spectral_radius: self.spectral_radius,
        }
    }

    pub fn spectrum(&self) -> Spectrum {
        let mut values = Vec::new();
        for e in &self.entries {
            values.push(SpectrumValue {
                lambda: e.lambda,
                multiplicity: e.multiplicity,
            });
            if !e.is_real() {
                values.push(SpectrumValue {
                    lambda: e.lambda.conj(),
                    multiplicity: e.multiplicity,
                });
            }
        }
        values.sort_by(|a, b| cmp_complex(&a.lambda, &b.lambda));
        Spectrum {
            values,
            spectral_radius: self.spectral_radius,
        }
    }
}

/// Whether every block of the decomposition has size one.
pub fn is_jordan_simple(a: &SelfAdjointOperator, tol: f64) -> bool {
    jordan_decompose(a, tol).is_jordan_simple()
}

/// Canonical representative with non-negative imaginary part.
fn upper(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        z.conj()
    } else {
        z
    }
}

fn greedy_match<T>(
    a: &[T],
    b: &[T],
    key: impl Fn(&T) -> Complex64,
    same: impl Fn(&T, &T) -> bool,
    delta: f64,
) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    for x in a {
        let kx = key(x);
        let mut best: Option<(usize, f64)> = None;
        for (j, y) in b.iter().enumerate() {
            if used[j] || !same(x, y) {
                continue;
            }
            let d = (kx - key(y)).norm();
            if d <= delta && best.is_none_or(|(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        match best {
            Some((j, _)) => used[j] = true,
            None => return false,
        }
    }
    true
}

impl JordanStructure {
    /// Structure of the negated operator.
    pub fn negated(&self) -> Self {
        self.scaled(-1.0)
    }

    /// Structure of `t` times the operator, `t != 0`.
    pub fn scaled(&self, t: f64) -> Self {
        let mut entries: Vec<StructureEntry> = self
            .entries
            .iter()
            .map(|e| StructureEntry {
                lambda: upper(e.lambda * t),
                blocks: e.blocks.clone(),
            })
            .collect();
        entries.sort_by(|x, y| cmp_complex(&x.lambda, &y.lambda));
        JordanStructure {
            entries,
            spectral_radius: self.spectral_radius * t.abs(),
        }
    }

    /// Equal eigenvalue clusters (within `rel_tol · max(1, radii)`) carrying
    /// equal block multisets.
    pub fn matches(&self, other: &Self, rel_tol: f64) -> bool {
        let delta = rel_tol * self.spectral_radius.max(other.spectral_radius).max(1.0);
        greedy_match(
            &self.entries,
            &other.entries,
            |e| e.lambda,
            |x, y| x.blocks == y.blocks,
            delta,
        )
    }

    pub fn is_jordan_simple(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.blocks.iter().all(|&b| b == 1))
    }

    pub fn dimension(&self) -> usize {
        self.entries
            .iter()
            .map(|e| {
                let w = if e.lambda.im == 0.0 { 1 } else { 2 };
                w * e.blocks.iter().sum::<usize>()
            })
            .sum()
    }
}

impl Spectrum {
    pub fn negated(&self) -> Self {
        self.scaled(Complex64::new(-1.0, 0.0))
    }

    /// Multiplies every eigenvalue by `z`.
    pub fn scaled(&self, z: Complex64) -> Self {
        let mut values: Vec<SpectrumValue> = self
            .values
            .iter()
            .map(|v| SpectrumValue {
                lambda: v.lambda * z,
                multiplicity: v.multiplicity,
            })
            .collect();
        values.sort_by(|a, b| cmp_complex(&a.lambda, &b.lambda));
        Spectrum {
            values,
            spectral_radius: self.spectral_radius * z.norm(),
        }
    }

    pub fn matches(&self, other: &Self, rel_tol: f64) -> bool {
        let delta = rel_tol * self.spectral_radius.max(other.spectral_radius).max(1.0);
        greedy_match(
            &self.values,
            &other.values,
            |v| v.lambda,
            |x, y| x.multiplicity == y.multiplicity,
            delta,
        )
    }

    /// Distinct eigenvalues, ignoring multiplicity.
    pub fn as_set(&self) -> Vec<Complex64> {
        self.values.iter().map(|v| v.lambda).collect()
    }

    /// All eigenvalues lie within `delta` of the real axis or the imaginary axis.
    pub fn on_axes(&self, delta: f64) -> bool {
        self.values
            .iter()
            .all(|v| v.lambda.im.abs() <= delta || v.lambda.re.abs() <= delta)
    }

    pub fn real(&self, delta: f64) -> bool {
        self.values.iter().all(|v| v.lambda.im.abs() <= delta)
    }

    pub fn imaginary(&self, delta: f64) -> bool {
        self.values.iter().all(|v| v.lambda.re.abs() <= delta)
    }

    pub fn is_nilpotent(&self, delta: f64) -> bool {
        self.values.iter().all(|v| v.lambda.norm() <= delta)
    }
}
