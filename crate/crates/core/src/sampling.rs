//! Seeded samples of the unit pseudo-spheres and the null cone.
//!
//! Pseudo-spheres with `p, q >= 1` are noncompact, so samples are Gaussian
//! draws rescaled onto the sphere and rejected when their Euclidean norm
//! exceeds a cap. Null vectors are built directly: independent unit
//! timelike and spacelike parts, so `(v, v) = -1 + 1 = 0`.
//!
//! Every sample set is closed under `v ↦ -v`: base point `i` sits at index
//! `2i` and its antipode at `2i + 1`.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{PseudoSpace, Vector};

pub const DEFAULT_EUCLIDEAN_BOUND: f64 = 10.0;
/// Cone equation tolerance after rescaling.
pub const CONE_EQUATION_TOL: f64 = 1e-12;
const ATTEMPTS_PER_SAMPLE: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cone {
    Spacelike,
    Timelike,
    Null,
}

impl Cone {
    pub const ALL: [Cone; 3] = [Cone::Spacelike, Cone::Timelike, Cone::Null];

    pub fn name(&self) -> &'static str {
        match self {
            Cone::Spacelike => "spacelike",
            Cone::Timelike => "timelike",
            Cone::Null => "null",
        }
    }

    /// Value of `(v, v)` on the cone.
    pub fn level(&self) -> f64 {
        match self {
            Cone::Spacelike => 1.0,
            Cone::Timelike => -1.0,
            Cone::Null => 0.0,
        }
    }

    pub fn is_feasible(&self, space: &PseudoSpace) -> bool {
        let s = space.signature;
        match self {
            Cone::Spacelike => s.q >= 1,
            Cone::Timelike => s.p >= 1,
            Cone::Null => s.p >= 1 && s.q >= 1,
        }
    }

    /// Distinct stream offset so cones sampled from one seed are independent.
    pub(crate) fn stream(&self) -> u64 {
        match self {
            Cone::Spacelike => 0x5350_4143_454c_494b,
            Cone::Timelike => 0x5449_4d45_4c49_4b45,
            Cone::Null => 0x4e55_4c4c_434f_4e45,
        }
    }
}

impl std::fmt::Display for Cone {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub cone: Cone,
    #[serde(with = "vec_of_vectors")]
    pub vectors: Vec<Vector>,
    pub seed: u64,
    pub euclidean_bound: f64,
}

mod vec_of_vectors {
    use nalgebra::DVector;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[DVector<f64>], s: S) -> Result<S::Ok, S::Error> {
        let raw: Vec<&[f64]> = v.iter().map(|x| x.as_slice()).collect();
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<DVector<f64>>, D::Error> {
        let raw = Vec::<Vec<f64>>::deserialize(d)?;
        Ok(raw.into_iter().map(DVector::from_vec).collect())
    }
}

impl SampleSet {
    /// Base points (even indices).
    pub fn base_points(&self) -> impl Iterator<Item = &Vector> {
        self.vectors.iter().step_by(2)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

fn gaussian(m: usize, rng: &mut ChaCha8Rng) -> Vector {
    DVector::from_fn(m, |_, _| StandardNormal.sample(rng))
}

/// Draws `n` base points on `cone` and closes the set under negation.
pub fn sample_cone(
    space: &PseudoSpace,
    cone: Cone,
    n: usize,
    seed: u64,
    euclidean_bound: f64,
) -> Result<SampleSet> {
    let sig = space.signature;
    if !cone.is_feasible(space) {
        return Err(Error::InfeasibleCone {
            cone: cone.name(),
            p: sig.p,
            q: sig.q,
        });
    }
    let m = space.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vectors = Vec::with_capacity(2 * n);
    let budget = ATTEMPTS_PER_SAMPLE * n.max(1);
    let mut attempts = 0;
    while vectors.len() < 2 * n {
        attempts += 1;
        if attempts > budget {
            return Err(Error::SamplerExhausted {
                cone: cone.name(),
                attempts: budget,
            });
        }
        let v = match cone {
            Cone::Null => {
                let t = gaussian(sig.p, &mut rng);
                let s = gaussian(sig.q, &mut rng);
                let (tn, sn) = (t.norm(), s.norm());
                if tn == 0.0 || sn == 0.0 {
                    continue;
                }
                let mut v = DVector::zeros(m);
                v.rows_mut(0, sig.p).copy_from(&(t / tn));
                v.rows_mut(sig.p, sig.q).copy_from(&(s / sn));
                v
            }
            Cone::Spacelike | Cone::Timelike => {
                let v = gaussian(m, &mut rng);
                let norm = space.inner_unchecked(&v, &v) * cone.level();
                if norm <= f64::EPSILON * v.norm_squared() {
                    continue;
                }
                v / norm.sqrt()
            }
        };
        if v.norm() > euclidean_bound {
            continue;
        }
        if (space.inner_unchecked(&v, &v) - cone.level()).abs() > CONE_EQUATION_TOL {
            continue;
        }
        vectors.push(-&v);
        vectors.insert(vectors.len() - 1, v);
    }
    Ok(SampleSet {
        cone,
        vectors,
        seed,
        euclidean_bound,
    })
}
