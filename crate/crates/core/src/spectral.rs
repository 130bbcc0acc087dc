//! Spectral and Jordan constancy checks over sampled cones, rank statistics
//! and the Adams number.
//!
//! Constancy can only be refuted by sampling, never certified, so a
//! [`ConstancyVerdict`] is either a concrete witness pair or
//! "no counterexample among the samples".

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jordan::{jordan_decompose, JordanStructure, Spectrum};
use crate::linalg::{max_abs, numerical_rank, poly_from_roots};
use crate::sampling::{sample_cone, Cone, SampleSet, DEFAULT_EUCLIDEAN_BOUND};
use crate::space::{CausalType, SelfAdjointOperator, Vector};
use crate::tensor::AcdtTensor;

/// Adams number `ν(q)`: write `q = 2^l q0` with `q0` odd, then
/// `ν(1)=0, ν(2)=1, ν(4)=3, ν(8)=7` and `ν(2^(l+4)) = ν(2^l) + 8`.
pub fn adams_number(q: i64) -> Result<u32> {
    if q <= 0 {
        return Err(Error::Domain(format!("adams number needs q >= 1, got {q}")));
    }
    let l = q.trailing_zeros();
    Ok(8 * (l / 4) + [0, 1, 3, 7][(l % 4) as usize])
}

/// Number of singular values above `tol` times the largest.
pub fn rank_of(a: &SelfAdjointOperator, tol: f64) -> usize {
    numerical_rank(a.matrix(), tol)
}

/// Coefficients `c_0..c_m` of `p(t, v) = det(P(v) - t I)` where
/// `P(v) = (v, v)^(-3) S(v)^2`.
pub fn char_poly_p(r: &AcdtTensor, v: &Vector) -> Result<Vec<f64>> {
    let space = r.space();
    match space.causal_type(v)? {
        CausalType::Null | CausalType::Zero => {
            return Err(Error::Domain(
                "the operator P(v) is undefined on the null cone".into(),
            ))
        }
        _ => {}
    }
    // Eigenvalues of P(v) are λ² / (v,v)³ for eigenvalues λ of S(v). Expanding
    // from roots avoids the cancellation that trace recursions suffer near
    // the null cone, where P(v) is large and singular.
    let n3 = space.inner_unchecked(v, v).powi(3);
    let roots: Vec<_> = r
        .szabo(v)
        .into_matrix()
        .complex_eigenvalues()
        .iter()
        .map(|l| l * l / n3)
        .collect();
    Ok(poly_from_roots(&roots))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    /// Base points per cone (the sample holds `2n` vectors).
    pub n: usize,
    pub seed: u64,
    pub euclidean_bound: f64,
    /// Cluster and rank tolerance.
    pub tol: f64,
}

impl SamplingConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        SamplingConfig {
            n,
            seed,
            euclidean_bound: DEFAULT_EUCLIDEAN_BOUND,
            tol: crate::jordan::DEFAULT_TOL,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_bound(mut self, bound: f64) -> Self {
        self.euclidean_bound = bound;
        self
    }

    /// Tolerance for comparing spectra of different operators. Eigenvalues
    /// carry errors well above the cluster tolerance once blocks appear, so
    /// comparisons use its square root.
    pub fn comparison_tol(&self) -> f64 {
        self.tol.sqrt()
    }

    /// Seed for `cone`, so each cone gets an independent stream.
    pub fn cone_seed(&self, cone: Cone) -> u64 {
        self.seed ^ cone.stream()
    }

    pub fn sample(&self, r: &AcdtTensor, cone: Cone) -> Result<SampleSet> {
        sample_cone(
            &r.space(),
            cone,
            self.n,
            self.cone_seed(cone),
            self.euclidean_bound,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictStatus {
    NoCounterexample,
    WitnessFound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Compared {
    Spectrum(Spectrum),
    Jordan(JordanStructure),
}

impl Compared {
    fn negated(&self) -> Self {
        match self {
            Compared::Spectrum(s) => Compared::Spectrum(s.negated()),
            Compared::Jordan(j) => Compared::Jordan(j.negated()),
        }
    }

    fn scaled(&self, t: f64) -> Self {
        match self {
            Compared::Spectrum(s) => Compared::Spectrum(s.scaled(t.into())),
            Compared::Jordan(j) => Compared::Jordan(j.scaled(t)),
        }
    }

    pub fn matches(&self, other: &Self, rel_tol: f64) -> bool {
        match (self, other) {
            (Compared::Spectrum(a), Compared::Spectrum(b)) => a.matches(b, rel_tol),
            (Compared::Jordan(a), Compared::Jordan(b)) => a.matches(b, rel_tol),
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(with = "crate::serde_util::dvector")]
    pub first: Vector,
    #[serde(with = "crate::serde_util::dvector")]
    pub second: Vector,
    pub first_structure: Compared,
    pub second_structure: Compared,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstancyVerdict {
    pub cone: Cone,
    pub status: VerdictStatus,
    pub witness: Option<Witness>,
    pub comparison_tol: f64,
    pub base_points: usize,
    /// Always true: agreement on a sample does not prove constancy.
    pub sampling_based: bool,
}

impl ConstancyVerdict {
    pub fn found_witness(&self) -> bool {
        self.status == VerdictStatus::WitnessFound
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Spectrum,
    Jordan,
}

fn analyse(r: &AcdtTensor, v: &Vector, tol: f64, mode: Mode) -> Compared {
    let d = jordan_decompose(&r.szabo(v), tol);
    match mode {
        Mode::Spectrum => Compared::Spectrum(d.spectrum()),
        Mode::Jordan => Compared::Jordan(d.structure()),
    }
}

fn constancy(
    r: &AcdtTensor,
    cone: Cone,
    cfg: &SamplingConfig,
    mode: Mode,
) -> Result<ConstancyVerdict> {
    let sample = cfg.sample(r, cone)?;
    let base: Vec<&Vector> = sample.base_points().collect();
    let structures: Vec<Compared> = base
        .par_iter()
        .map(|v| analyse(r, v, cfg.tol, mode))
        .collect();
    let delta = cfg.comparison_tol();
    let verdict = |witness: Option<Witness>| ConstancyVerdict {
        cone,
        status: if witness.is_some() {
            VerdictStatus::WitnessFound
        } else {
            VerdictStatus::NoCounterexample
        },
        witness,
        comparison_tol: delta,
        base_points: base.len(),
        sampling_based: true,
    };

    // On the null cone S(tv) = t^3 S(v), so constancy forces nilpotency.
    if cone == Cone::Null {
        for (v, s) in base.iter().zip(&structures) {
            let s8 = s.scaled(8.0);
            if !s.matches(&s8, delta) {
                return Ok(verdict(Some(Witness {
                    first: (*v).clone(),
                    second: *v * 2.0,
                    first_structure: s.clone(),
                    second_structure: s8,
                })));
            }
        }
    }

    let Some(reference) = structures.first() else {
        return Ok(verdict(None));
    };
    // Each v_i is compared with v_0, then -v_i via S(-v) = -S(v). The pair
    // (v_0, -v_0) alone is never a witness.
    for (v, s) in base.iter().zip(&structures).skip(1) {
        let neg = s.negated();
        for (w, sw) in [((*v).clone(), s.clone()), (-*v, neg)] {
            if !reference.matches(&sw, delta) {
                return Ok(verdict(Some(Witness {
                    first: base[0].clone(),
                    second: w,
                    first_structure: reference.clone(),
                    second_structure: sw,
                })));
            }
        }
    }
    Ok(verdict(None))
}

/// Compares eigenvalue multisets of `S(v)` across a cone sample.
pub fn spectral_constancy(
    r: &AcdtTensor,
    cone: Cone,
    cfg: &SamplingConfig,
) -> Result<ConstancyVerdict> {
    constancy(r, cone, cfg, Mode::Spectrum)
}

/// Compares Jordan structures (eigenvalue clusters with block sizes) of
/// `S(v)` across a cone sample.
pub fn jordan_constancy(
    r: &AcdtTensor,
    cone: Cone,
    cfg: &SamplingConfig,
) -> Result<ConstancyVerdict> {
    constancy(r, cone, cfg, Mode::Jordan)
}

/// Row and column indices of an invertible `rank × rank` minor, chosen by
/// Gaussian elimination with complete pivoting.
fn pivot_minor(a: &DMatrix<f64>, rank: usize) -> (Vec<usize>, Vec<usize>) {
    let mut w = a.clone();
    let (nr, nc) = w.shape();
    let mut rows: Vec<usize> = (0..nr).collect();
    let mut cols: Vec<usize> = (0..nc).collect();
    for k in 0..rank {
        let mut best = (k, k, -1.0);
        for i in k..nr {
            for j in k..nc {
                if w[(i, j)].abs() > best.2 {
                    best = (i, j, w[(i, j)].abs());
                }
            }
        }
        w.swap_rows(k, best.0);
        w.swap_columns(k, best.1);
        rows.swap(k, best.0);
        cols.swap(k, best.1);
        let p = w[(k, k)];
        for i in (k + 1)..nr {
            let f = w[(i, k)] / p;
            for j in k..nc {
                w[(i, j)] -= f * w[(k, j)];
            }
        }
    }
    let mut r = rows[..rank].to_vec();
    let mut c = cols[..rank].to_vec();
    r.sort_unstable();
    c.sort_unstable();
    (r, c)
}

fn minor_det(a: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> f64 {
    let k = rows.len();
    DMatrix::from_fn(k, k, |i, j| a[(rows[i], cols[j])]).determinant()
}

/// Looks for `v` on `target` whose Szabó operator has a nonvanishing minor
/// on the same rows and columns as an invertible maximal minor of `S(v0)`.
/// Such a `v` has rank at least `rank_of(S(v0))`.
pub fn rank_transfer_witness(
    r: &AcdtTensor,
    v0: &Vector,
    target: Cone,
    cfg: &SamplingConfig,
) -> Result<Option<Vector>> {
    let s0 = r.szabo(v0).into_matrix();
    let rank = numerical_rank(&s0, cfg.tol);
    if rank == 0 {
        return Err(Error::Precondition(
            "rank transfer needs S(v0) of positive rank".into(),
        ));
    }
    let (rows, cols) = pivot_minor(&s0, rank);
    let sample = cfg.sample(r, target)?;
    for v in sample.base_points() {
        let s = r.szabo(v).into_matrix();
        let d = minor_det(&s, &rows, &cols);
        if d.abs() > cfg.tol * max_abs(&s).powi(rank as i32) {
            return Ok(Some(v.clone()));
        }
    }
    Ok(None)
}
