//! Consistency report: evaluates the vanishing and rank theorems for Szabó
//! operators against one tensor, as far as sampling allows.
//!
//! A theorem's hypothesis (spectral or Jordan constancy on a cone) can only
//! be refuted by sampling. When sampling finds no counterexample the
//! hypothesis is treated as holding and the conclusion is checked. A failed
//! conclusion is never reported as a disproof; it goes to quarantine for
//! manual, exact re-examination.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::jordan::{jordan_decompose, Complex64, JordanStructure, Spectrum};
use crate::linalg::{max_abs, max_abs_vec};
use crate::nullcone::even_rank_check;
use crate::sampling::Cone;
use crate::space::{SelfAdjointOperator, Signature, Vector};
use crate::spectral::{
    adams_number, char_poly_p, jordan_constancy, rank_of, spectral_constancy, ConstancyVerdict,
    SamplingConfig,
};
use crate::tensor::AcdtTensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlagStatus {
    Consistent,
    ViolatedWithWitness,
    NotApplicable,
}

impl std::fmt::Display for FlagStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FlagStatus::Consistent => "consistent",
            FlagStatus::ViolatedWithWitness => "violated-with-witness",
            FlagStatus::NotApplicable => "not-applicable",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremFlag {
    pub name: String,
    pub status: FlagStatus,
    pub explanation: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuarantineEntry {
    pub source: String,
    pub reason: String,
    pub vectors: Vec<Vec<f64>>,
}

/// Worst per-point identity residuals over one cone's sample.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PointResiduals {
    pub points: usize,
    /// `max |g_i A_ij - g_j A_ji| / max |A_ij|`.
    pub self_adjoint: f64,
    /// `|S(v)v| / (|S(v)| |v|)`, max norms.
    pub kernel: f64,
    /// `max |S(-v) + S(v)|`, exactly zero in exact arithmetic.
    pub oddness: f64,
    /// Antipodal pairs where `Spec S(-v)` differs from `-Spec S(v)`.
    pub antipodal_spectrum_mismatches: usize,
    /// Antipodal pairs with `rank S(-v) != rank S(v)`.
    pub antipodal_rank_mismatches: usize,
}

impl PointResiduals {
    pub fn max_relative(&self) -> f64 {
        self.self_adjoint.max(self.kernel)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeReport {
    pub cone: Cone,
    pub spectral: ConstancyVerdict,
    pub jordan: ConstancyVerdict,
    pub residuals: PointResiduals,
    /// Every sampled `S(v)` is diagonalizable.
    pub jordan_simple_everywhere: bool,
}

/// Comparison of one spacelike and one timelike base point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCone {
    #[serde(with = "crate::serde_util::dvector")]
    pub spacelike: Vector,
    #[serde(with = "crate::serde_util::dvector")]
    pub timelike: Vector,
    pub spacelike_spectrum: Spectrum,
    pub timelike_spectrum: Spectrum,
    /// `Spec S(v-) = i Spec S(v+)` at comparison tolerance.
    pub rotated_by_i: bool,
    /// Largest coefficient gap between `p(t, v+)` and `p(t, v-)`.
    pub char_poly_gap: f64,
}

/// Observed rank multiset: rank ↦ number of sampled vectors.
pub type RankCounts = BTreeMap<usize, usize>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub signature: Signature,
    pub config: SamplingConfig,
    pub tensor_max_abs: f64,
    pub zero_tensor: bool,
    pub cones: Vec<ConeReport>,
    pub r_plus: RankCounts,
    pub r_minus: RankCounts,
    pub r_0: RankCounts,
    pub cross_cone: Option<CrossCone>,
    pub flags: Vec<TheoremFlag>,
    pub quarantine: Vec<QuarantineEntry>,
}

impl TheoremReport {
    pub fn cone(&self, cone: Cone) -> Option<&ConeReport> {
        self.cones.iter().find(|c| c.cone == cone)
    }

    pub fn flag(&self, name: &str) -> Option<&TheoremFlag> {
        self.flags.iter().find(|f| f.name == name)
    }
}

/// The single value of a rank multiset, if there is exactly one.
pub fn constant_rank(r: &RankCounts) -> Option<usize> {
    match r.len() {
        1 => r.keys().next().copied(),
        _ => None,
    }
}

struct Point {
    v: Vector,
    op: SelfAdjointOperator,
    rank: usize,
    spectrum: Spectrum,
    structure: JordanStructure,
}

struct ConeData {
    report: ConeReport,
    ranks: RankCounts,
    points: Vec<Point>,
}

fn relative(x: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        x
    } else {
        x / scale
    }
}

fn analyse_cone(r: &AcdtTensor, cone: Cone, cfg: &SamplingConfig) -> Result<ConeData> {
    let sample = cfg.sample(r, cone)?;
    let space = r.space();
    let points: Vec<Point> = sample
        .vectors
        .par_iter()
        .map(|v| {
            let op = r.szabo(v);
            let d = jordan_decompose(&op, cfg.tol);
            Point {
                v: v.clone(),
                rank: rank_of(&op, cfg.tol),
                spectrum: d.spectrum(),
                structure: d.structure(),
                op,
            }
        })
        .collect();

    let delta = cfg.comparison_tol();
    let mut res = PointResiduals {
        points: points.len(),
        ..Default::default()
    };
    let mut ranks = RankCounts::new();
    for p in &points {
        let a = p.op.matrix();
        let scale = max_abs(a);
        let sa = space.is_self_adjoint(a, cfg.tol).residual;
        res.self_adjoint = res.self_adjoint.max(relative(sa, scale));
        let sv = max_abs_vec(&(a * &p.v));
        res.kernel = res.kernel.max(relative(sv, scale * max_abs_vec(&p.v)));
        *ranks.entry(p.rank).or_default() += 1;
    }
    for pair in points.chunks(2) {
        let (x, y) = (&pair[0], &pair[1]);
        res.oddness = res.oddness.max(max_abs(&(x.op.matrix() + y.op.matrix())));
        if !y.spectrum.matches(&x.spectrum.negated(), delta) {
            res.antipodal_spectrum_mismatches += 1;
        }
        if x.rank != y.rank {
            res.antipodal_rank_mismatches += 1;
        }
    }
    let report = ConeReport {
        cone,
        spectral: spectral_constancy(r, cone, cfg)?,
        jordan: jordan_constancy(r, cone, cfg)?,
        jordan_simple_everywhere: points.iter().all(|p| p.structure.is_jordan_simple()),
        residuals: res,
    };
    Ok(ConeData {
        report,
        ranks,
        points,
    })
}

fn flag(name: &str, status: FlagStatus, explanation: impl Into<String>) -> TheoremFlag {
    TheoremFlag {
        name: name.to_string(),
        status,
        explanation: explanation.into(),
    }
}

fn coords(vs: &[&Vector]) -> Vec<Vec<f64>> {
    vs.iter().map(|v| v.as_slice().to_vec()).collect()
}

struct Ctx<'a> {
    sig: Signature,
    zero: bool,
    delta: f64,
    cones: BTreeMap<Cone, ConeData>,
    cross: Option<&'a CrossCone>,
    quarantine: Vec<QuarantineEntry>,
    tol: f64,
}

impl Ctx<'_> {
    fn spectral_const(&self, cone: Cone) -> Option<bool> {
        self.cones
            .get(&cone)
            .map(|c| !c.report.spectral.found_witness())
    }

    fn jordan_const(&self, cone: Cone) -> Option<bool> {
        self.cones
            .get(&cone)
            .map(|c| !c.report.jordan.found_witness())
    }

    /// Constant spectrum on every feasible pseudo-sphere.
    fn szabo(&self) -> bool {
        [Cone::Spacelike, Cone::Timelike]
            .iter()
            .filter_map(|&c| self.spectral_const(c))
            .all(|x| x)
    }

    fn ranks(&self, cone: Cone) -> RankCounts {
        self.cones
            .get(&cone)
            .map(|c| c.ranks.clone())
            .unwrap_or_default()
    }

    fn first_point(&self, cone: Cone) -> Option<&Point> {
        self.cones.get(&cone).and_then(|c| c.points.first())
    }

    fn quarantine(&mut self, source: &str, reason: String, vectors: Vec<Vec<f64>>) {
        self.quarantine.push(QuarantineEntry {
            source: source.to_string(),
            reason,
            vectors,
        });
    }

    fn violated(&mut self, name: &str, reason: String, cone: Option<Cone>) -> TheoremFlag {
        let vectors = cone
            .and_then(|c| self.first_point(c))
            .map(|p| coords(&[&p.v]))
            .unwrap_or_default();
        self.quarantine(name, reason.clone(), vectors);
        flag(name, FlagStatus::ViolatedWithWitness, reason)
    }

    fn riemannian_lorentzian_vanishing(&mut self) -> TheoremFlag {
        const NAME: &str = "riemannian_lorentzian_vanishing";
        let Signature { p, q } = self.sig;
        if p.min(q) > 1 {
            return flag(NAME, FlagStatus::NotApplicable, "needs min(p, q) <= 1");
        }
        if self.zero {
            return flag(NAME, FlagStatus::Consistent, "the tensor is zero");
        }
        if !self.szabo() {
            return flag(
                NAME,
                FlagStatus::Consistent,
                "a spectral witness shows the nonzero tensor is not Szabó",
            );
        }
        self.violated(
            NAME,
            "nonzero tensor with no spectral witness where only the zero tensor is Szabó".into(),
            Some(if q >= 1 {
                Cone::Spacelike
            } else {
                Cone::Timelike
            }),
        )
    }

    fn spectrum_symmetry(&mut self) -> TheoremFlag {
        const NAME: &str = "spectrum_symmetry";
        let Signature { p, q } = self.sig;
        if p < 2 || q < 2 {
            return flag(NAME, FlagStatus::NotApplicable, "needs p >= 2 and q >= 2");
        }
        if !self.szabo() {
            return flag(
                NAME,
                FlagStatus::NotApplicable,
                "a spectral witness shows the tensor is not Szabó",
            );
        }
        let (plus, minus) = match (
            self.first_point(Cone::Spacelike),
            self.first_point(Cone::Timelike),
        ) {
            (Some(a), Some(b)) => (a.spectrum.clone(), b.spectrum.clone()),
            _ => return flag(NAME, FlagStatus::NotApplicable, "empty sample"),
        };
        let delta = self.delta;
        let ax = |s: &Spectrum| delta * s.spectral_radius.max(1.0);
        let mut failures = Vec::new();
        if !plus.matches(&plus.negated(), delta) || !minus.matches(&minus.negated(), delta) {
            failures.push("Spec is not symmetric under negation");
        }
        if !self.cross.is_some_and(|c| c.rotated_by_i) {
            failures.push("timelike spectrum is not i times the spacelike spectrum");
        }
        if !plus.on_axes(ax(&plus)) || !minus.on_axes(ax(&minus)) {
            failures.push("eigenvalues off the real and imaginary axes");
        }
        if p < q && !(plus.imaginary(ax(&plus)) && minus.real(ax(&minus))) {
            failures.push("p < q needs imaginary spacelike and real timelike spectra");
        }
        if q < p && !(plus.real(ax(&plus)) && minus.imaginary(ax(&minus))) {
            failures.push("q < p needs real spacelike and imaginary timelike spectra");
        }
        if failures.is_empty() {
            flag(
                NAME,
                FlagStatus::Consistent,
                "sampled spectra have the predicted symmetries",
            )
        } else {
            let reason = failures.join("; ");
            let vectors = [Cone::Spacelike, Cone::Timelike]
                .iter()
                .filter_map(|&c| self.first_point(c).map(|pt| pt.v.as_slice().to_vec()))
                .collect();
            self.quarantine(NAME, reason.clone(), vectors);
            flag(NAME, FlagStatus::ViolatedWithWitness, reason)
        }
    }

    /// The dominant pseudo-sphere (spacelike when p < q, timelike when
    /// q < p after replacing g by -g) and its dimension parameter.
    fn dominant(&self) -> Option<(Cone, usize, usize)> {
        let Signature { p, q } = self.sig;
        match p.cmp(&q) {
            std::cmp::Ordering::Less => Some((Cone::Spacelike, p, q)),
            std::cmp::Ordering::Greater => Some((Cone::Timelike, q, p)),
            std::cmp::Ordering::Equal => None,
        }
    }

    fn dominant_cone_flags(&mut self) -> Vec<TheoremFlag> {
        const SIMPLE: &str = "dominant_cone_jordan_simple";
        const BOUND: &str = "adams_rank_bound";
        const ODD: &str = "odd_dimension_vanishing";
        let Some((cone, small, large)) = self.dominant() else {
            let why = "needs p != q";
            return vec![
                flag(SIMPLE, FlagStatus::NotApplicable, why),
                flag(BOUND, FlagStatus::NotApplicable, why),
                flag(ODD, FlagStatus::NotApplicable, why),
            ];
        };
        if self.jordan_const(cone) != Some(true) {
            let why = format!("a Jordan witness on the {cone} cone");
            return vec![
                flag(SIMPLE, FlagStatus::NotApplicable, why.clone()),
                flag(BOUND, FlagStatus::NotApplicable, why.clone()),
                flag(ODD, FlagStatus::NotApplicable, why),
            ];
        }
        let mut out = Vec::new();
        let simple = self.cones[&cone].report.jordan_simple_everywhere;
        out.push(if simple {
            flag(
                SIMPLE,
                FlagStatus::Consistent,
                format!("S(v) diagonalizable at every sampled {cone} v"),
            )
        } else {
            self.violated(
                SIMPLE,
                format!("a sampled {cone} S(v) has a nontrivial Jordan block"),
                Some(cone),
            )
        });

        let nu = adams_number(large as i64).expect("large >= 1") as usize;
        out.push(if small + nu >= large {
            flag(
                BOUND,
                FlagStatus::NotApplicable,
                format!(
                    "needs {small} < {large} - nu({large}) = {}",
                    large as i64 - nu as i64
                ),
            )
        } else {
            let max_rank = self.ranks(cone).keys().max().copied().unwrap_or(0);
            if max_rank <= 2 * nu {
                flag(
                    BOUND,
                    FlagStatus::Consistent,
                    format!("max sampled rank {max_rank} <= 2 nu = {}", 2 * nu),
                )
            } else {
                self.violated(
                    BOUND,
                    format!("sampled rank {max_rank} exceeds 2 nu = {}", 2 * nu),
                    Some(cone),
                )
            }
        });

        out.push(if large % 2 == 0 {
            flag(ODD, FlagStatus::NotApplicable, format!("{large} is even"))
        } else if self.zero {
            flag(ODD, FlagStatus::Consistent, "the tensor is zero")
        } else {
            self.violated(
                ODD,
                format!("nonzero tensor with no Jordan witness on the {cone} cone in odd dimension {large}"),
                Some(cone),
            )
        });
        out
    }

    fn rank_equality(&mut self) -> TheoremFlag {
        const NAME: &str = "rank_equality";
        let Signature { p, q } = self.sig;
        if p == 0 || q == 0 {
            return flag(NAME, FlagStatus::NotApplicable, "needs both pseudo-spheres");
        }
        if self.jordan_const(Cone::Spacelike) != Some(true)
            || self.jordan_const(Cone::Timelike) != Some(true)
        {
            return flag(
                NAME,
                FlagStatus::NotApplicable,
                "a Jordan witness on a pseudo-sphere",
            );
        }
        if self.zero {
            return flag(NAME, FlagStatus::Consistent, "the tensor is zero");
        }
        let (rp, rm) = (
            constant_rank(&self.ranks(Cone::Spacelike)),
            constant_rank(&self.ranks(Cone::Timelike)),
        );
        let mut failures = Vec::new();
        if rp.is_none() || rp != rm {
            failures.push(format!(
                "r+ = {:?}, r- = {:?}",
                self.ranks(Cone::Spacelike),
                self.ranks(Cone::Timelike)
            ));
        }
        if p != q {
            for cone in [Cone::Spacelike, Cone::Timelike] {
                if !self.cones[&cone].report.jordan_simple_everywhere {
                    failures.push(format!("{cone} S(v) not Jordan simple with p != q"));
                }
            }
        }
        if failures.is_empty() {
            flag(
                NAME,
                FlagStatus::Consistent,
                format!("r+ = r- = {}", rp.unwrap_or(0)),
            )
        } else {
            self.violated(NAME, failures.join("; "), Some(Cone::Spacelike))
        }
    }

    fn jordan_szabo(&self) -> bool {
        Cone::ALL
            .iter()
            .all(|&c| self.jordan_const(c) == Some(true))
    }

    fn null_rank_drop(&mut self) -> TheoremFlag {
        const NAME: &str = "null_rank_drop";
        if !self.jordan_szabo() {
            return flag(
                NAME,
                FlagStatus::NotApplicable,
                "needs no Jordan witness on all three cones",
            );
        }
        if self.zero {
            return flag(NAME, FlagStatus::Consistent, "the tensor is zero");
        }
        let (r0, rp) = (
            constant_rank(&self.ranks(Cone::Null)),
            constant_rank(&self.ranks(Cone::Spacelike)),
        );
        match (r0, rp) {
            (Some(a), Some(b)) if a < b => {
                flag(NAME, FlagStatus::Consistent, format!("r0 = {a} < r+ = {b}"))
            }
            _ => self.violated(
                NAME,
                format!(
                    "r0 = {:?}, r+ = {:?}",
                    self.ranks(Cone::Null),
                    self.ranks(Cone::Spacelike)
                ),
                Some(Cone::Null),
            ),
        }
    }

    fn null_cone_vanishing(&mut self) -> TheoremFlag {
        const NAME: &str = "null_cone_vanishing";
        let Signature { p, q } = self.sig;
        let hits = |a: usize, b: usize| b % 4 == 2 && a + 1 < b;
        if !hits(p, q) && !hits(q, p) {
            return flag(
                NAME,
                FlagStatus::NotApplicable,
                "needs q = 2 mod 4 and p < q - 1, or p and q swapped",
            );
        }
        if !self.jordan_szabo() {
            return flag(
                NAME,
                FlagStatus::NotApplicable,
                "needs no Jordan witness on all three cones",
            );
        }
        if self.zero {
            return flag(NAME, FlagStatus::Consistent, "the tensor is zero");
        }
        self.violated(
            NAME,
            "nonzero tensor with no Jordan witness on any cone".into(),
            Some(Cone::Null),
        )
    }

    fn even_null_rank(&mut self) -> TheoremFlag {
        const NAME: &str = "even_null_rank";
        let Signature { p, q } = self.sig;
        if p < 2 || q < 2 {
            return flag(
                NAME,
                FlagStatus::NotApplicable,
                "the null cone is connected only for p, q >= 2",
            );
        }
        if self.jordan_const(Cone::Null) != Some(true) {
            return flag(
                NAME,
                FlagStatus::NotApplicable,
                "a Jordan witness on the null cone",
            );
        }
        let family: Vec<(Vector, SelfAdjointOperator)> = self.cones[&Cone::Null]
            .points
            .iter()
            .map(|pt| (pt.v.clone(), pt.op.clone()))
            .collect();
        match even_rank_check(&family, self.tol) {
            Ok(c) => match c.status {
                FlagStatus::ViolatedWithWitness => self.violated(
                    NAME,
                    format!("constant null rank {} is odd", c.rank.unwrap_or(0)),
                    Some(Cone::Null),
                ),
                FlagStatus::Consistent => flag(
                    NAME,
                    c.status,
                    format!("constant null rank {} is even", c.rank.unwrap_or(0)),
                ),
                FlagStatus::NotApplicable => {
                    flag(NAME, c.status, "null ranks vary across the sample")
                }
            },
            Err(e) => flag(NAME, FlagStatus::NotApplicable, e.to_string()),
        }
    }
}

fn cross_cone(r: &AcdtTensor, plus: &Point, minus: &Point, delta: f64) -> Result<CrossCone> {
    let cp = char_poly_p(r, &plus.v)?;
    let cm = char_poly_p(r, &minus.v)?;
    let gap = cp
        .iter()
        .zip(&cm)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(CrossCone {
        spacelike: plus.v.clone(),
        timelike: minus.v.clone(),
        rotated_by_i: minus
            .spectrum
            .matches(&plus.spectrum.scaled(Complex64::new(0.0, 1.0)), delta),
        spacelike_spectrum: plus.spectrum.clone(),
        timelike_spectrum: minus.spectrum.clone(),
        char_poly_gap: gap,
    })
}

/// Samples every feasible cone and evaluates each theorem flag.
pub fn theorem_report(r: &AcdtTensor, cfg: &SamplingConfig) -> Result<TheoremReport> {
    let space = r.space();
    let feasible: Vec<Cone> = Cone::ALL
        .into_iter()
        .filter(|c| c.is_feasible(&space))
        .collect();
    let mut cones = BTreeMap::new();
    for cone in feasible {
        cones.insert(cone, analyse_cone(r, cone, cfg)?);
    }
    let delta = cfg.comparison_tol();
    let cross = match (
        cones.get(&Cone::Spacelike).and_then(|c| c.points.first()),
        cones.get(&Cone::Timelike).and_then(|c| c.points.first()),
    ) {
        (Some(a), Some(b)) => Some(cross_cone(r, a, b, delta)?),
        _ => None,
    };
    let tensor_max_abs = r.max_abs();
    let mut ctx = Ctx {
        sig: space.signature,
        zero: tensor_max_abs <= cfg.tol,
        delta,
        cones,
        cross: cross.as_ref(),
        quarantine: Vec::new(),
        tol: cfg.tol,
    };

    for (cone, data) in &ctx.cones {
        let res = &data.report.residuals;
        if res.max_relative() > cfg.tol
            || res.oddness != 0.0
            || res.antipodal_spectrum_mismatches > 0
            || res.antipodal_rank_mismatches > 0
        {
            ctx.quarantine.push(QuarantineEntry {
                source: "per_point_identities".into(),
                reason: format!("{cone} cone residuals exceed tolerance: {res:?}"),
                vectors: Vec::new(),
            });
        }
    }

    let mut flags = vec![
        ctx.riemannian_lorentzian_vanishing(),
        ctx.spectrum_symmetry(),
    ];
    flags.extend(ctx.dominant_cone_flags());
    flags.push(ctx.rank_equality());
    flags.push(ctx.null_rank_drop());
    flags.push(ctx.null_cone_vanishing());
    flags.push(ctx.even_null_rank());

    let ranks = |c: Cone| ctx.ranks(c);
    let (r_plus, r_minus, r_0) = (
        ranks(Cone::Spacelike),
        ranks(Cone::Timelike),
        ranks(Cone::Null),
    );
    let zero_tensor = ctx.zero;
    let quarantine = std::mem::take(&mut ctx.quarantine);
    let cones = std::mem::take(&mut ctx.cones)
        .into_values()
        .map(|d| d.report)
        .collect();
    Ok(TheoremReport {
        signature: space.signature,
        config: *cfg,
        tensor_max_abs,
        zero_tensor,
        cones,
        r_plus,
        r_minus,
        r_0,
        cross_cone: cross,
        flags,
        quarantine,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::PseudoSpace;

    fn statuses(r: &TheoremReport) -> Vec<(String, FlagStatus)> {
        r.flags.iter().map(|f| (f.name.clone(), f.status)).collect()
    }

    #[test]
    fn zero_tensor_is_consistent() {
        let s = PseudoSpace::new(2, 3).unwrap();
        let rep = theorem_report(&AcdtTensor::zero(s), &SamplingConfig::new(20, 1)).unwrap();
        for (name, st) in statuses(&rep) {
            assert_ne!(st, FlagStatus::ViolatedWithWitness, "{name}");
        }
        assert!(rep.quarantine.is_empty());
        for r in [&rep.r_plus, &rep.r_minus, &rep.r_0] {
            assert_eq!(constant_rank(r), Some(0));
        }
        assert_eq!(
            rep.flag("odd_dimension_vanishing").unwrap().status,
            FlagStatus::Consistent
        );
        assert_eq!(
            rep.flag("even_null_rank").unwrap().status,
            FlagStatus::Consistent
        );
    }

    #[test]
    fn random_tensor_is_not_applicable() {
        let s = PseudoSpace::new(2, 3).unwrap();
        let rep = theorem_report(&AcdtTensor::random(s, 3), &SamplingConfig::new(30, 1)).unwrap();
        for c in &rep.cones {
            assert!(c.jordan.found_witness() && c.spectral.found_witness());
            assert_eq!(c.residuals.oddness, 0.0);
            assert_eq!(c.residuals.antipodal_rank_mismatches, 0);
            assert_eq!(c.residuals.antipodal_spectrum_mismatches, 0);
        }
        for name in [
            "spectrum_symmetry",
            "dominant_cone_jordan_simple",
            "rank_equality",
            "null_rank_drop",
            "even_null_rank",
        ] {
            assert_eq!(
                rep.flag(name).unwrap().status,
                FlagStatus::NotApplicable,
                "{name}"
            );
        }
        assert!(rep.quarantine.is_empty());
    }

    #[test]
    fn riemannian_witness_is_consistent() {
        let s = PseudoSpace::new(0, 3).unwrap();
        let rep = theorem_report(&AcdtTensor::random(s, 3), &SamplingConfig::new(30, 1)).unwrap();
        assert_eq!(
            rep.flag("riemannian_lorentzian_vanishing").unwrap().status,
            FlagStatus::Consistent
        );
        assert!(rep.cross_cone.is_none());
        assert!(rep.r_minus.is_empty() && rep.r_0.is_empty());
    }

    #[test]
    fn riemannian_survivor_is_quarantined() {
        // A single base point never yields a witness, so a nonzero tensor
        // "passes" and must be escalated rather than accepted.
        let s = PseudoSpace::new(0, 3).unwrap();
        let rep = theorem_report(&AcdtTensor::random(s, 3), &SamplingConfig::new(1, 1)).unwrap();
        let f = rep.flag("riemannian_lorentzian_vanishing").unwrap();
        assert_eq!(f.status, FlagStatus::ViolatedWithWitness);
        assert!(rep
            .quarantine
            .iter()
            .any(|q| q.source == "riemannian_lorentzian_vanishing"));
    }

    #[test]
    fn deterministic() {
        let s = PseudoSpace::new(1, 3).unwrap();
        let r = AcdtTensor::random(s, 9);
        let cfg = SamplingConfig::new(15, 4);
        assert_eq!(
            theorem_report(&r, &cfg).unwrap(),
            theorem_report(&r, &cfg).unwrap()
        );
    }
}
