//! Tensor files and the analysis pipeline behind the `szabo` binary.
//!
//! Tensor files are line-oriented text:
//!
//! ```text
//! szabo-tensor 1
//! index-order x y z w v
//! signature 2 3
//! label example
//! seed 7
//! coeffs 3125
//! 0 0 0 0 0 0.0
//! ...
//! end
//! ```
//!
//! Each coefficient line carries its own indices `x y z w v` for the
//! coefficient `D(x,y,z,w;v)`. Lines appear in row-major order with the last
//! index fastest, and the reader rejects any other order. Blank lines and
//! lines starting with `#` are ignored.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nullcone::{null_cone_pipeline, NullConePipeline};
use crate::report::{theorem_report, FlagStatus, QuarantineEntry, TheoremReport};
use crate::sampling::Cone;
use crate::space::{PseudoSpace, Signature};
use crate::spectral::{SamplingConfig, VerdictStatus};
use crate::symmetry::{dimension_table, DimensionRow};
use crate::tensor::{
    project_to_acdt, validate_acdt, AcdtTensor, CoeffArray, SymmetryResidual, DEFAULT_MAX_ITER,
    DEFAULT_PROJECTION_TOL, DEFAULT_VALIDATION_TOL,
};

pub const FORMAT_VERSION: u32 = 1;
pub const REPORT_SCHEMA: &str = "szabo-report/1";
pub const INDEX_ORDER: &str = "x y z w v";
/// Residual bound promised for generated tensors.
pub const GENERATE_TOL: f64 = 1e-10;
pub const MAX_GENERATE_DIM: usize = 6;

pub mod exit {
    pub const CLEAN: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const SCHEMA: i32 = 2;
    pub const VALIDATION: i32 = 3;
    pub const QUARANTINE: i32 = 4;
}

/// Exit status for an error raised by a command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Schema { .. } => exit::SCHEMA,
        Error::Validation { .. } => exit::VALIDATION,
        _ => exit::USAGE,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TensorFile {
    pub format_version: u32,
    pub signature: Signature,
    pub label: Option<String>,
    pub seed: Option<u64>,
    pub coeffs: Vec<f64>,
}

fn schema(line: usize, message: impl Into<String>) -> Error {
    Error::Schema {
        line,
        message: message.into(),
    }
}

impl TensorFile {
    pub fn dim(&self) -> usize {
        self.signature.dim()
    }

    pub fn to_text(&self) -> String {
        let m = self.dim();
        let mut out = String::new();
        let _ = writeln!(out, "szabo-tensor {}", self.format_version);
        let _ = writeln!(out, "index-order {INDEX_ORDER}");
        let _ = writeln!(out, "signature {} {}", self.signature.p, self.signature.q);
        if let Some(l) = &self.label {
            let _ = writeln!(out, "label {l}");
        }
        if let Some(s) = self.seed {
            let _ = writeln!(out, "seed {s}");
        }
        let _ = writeln!(out, "coeffs {}", self.coeffs.len());
        for (k, c) in self.coeffs.iter().enumerate() {
            let idx = unflatten(k, m);
            let _ = writeln!(
                out,
                "{} {} {} {} {} {c:?}",
                idx[0], idx[1], idx[2], idx[3], idx[4]
            );
        }
        out.push_str("end\n");
        out
    }

    pub fn parse(text: &str) -> Result<TensorFile> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let mut last = 0;
        let mut next = |what: &str| -> Result<(usize, &str)> {
            let r = lines.next();
            match r {
                Some((n, l)) => {
                    last = n;
                    Ok((n, l))
                }
                None => Err(schema(
                    last + 1,
                    format!("unexpected end of file, expected {what}"),
                )),
            }
        };

        let (n, l) = next("header")?;
        let version = match l.split_whitespace().collect::<Vec<_>>()[..] {
            ["szabo-tensor", v] => v
                .parse::<u32>()
                .map_err(|_| schema(n, format!("bad format version '{v}'")))?,
            _ => return Err(schema(n, "expected 'szabo-tensor <version>'")),
        };
        if version != FORMAT_VERSION {
            return Err(schema(n, format!("unsupported format version {version}")));
        }
        let (n, l) = next("index-order")?;
        match l.strip_prefix("index-order") {
            Some(rest) if rest.split_whitespace().collect::<Vec<_>>().join(" ") == INDEX_ORDER => {}
            _ => return Err(schema(n, format!("expected 'index-order {INDEX_ORDER}'"))),
        }
        let (n, l) = next("signature")?;
        let signature = match l.split_whitespace().collect::<Vec<_>>()[..] {
            ["signature", p, q] => {
                let p = p.parse().map_err(|_| schema(n, "bad p"))?;
                let q = q.parse().map_err(|_| schema(n, "bad q"))?;
                Signature::new(p, q).map_err(|e| schema(n, e.to_string()))?
            }
            _ => return Err(schema(n, "expected 'signature <p> <q>'")),
        };

        let mut label = None;
        let mut seed = None;
        let count;
        loop {
            let (n, l) = next("coeffs")?;
            let (key, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
            let rest = rest.trim();
            match key {
                "label" => label = Some(rest.to_string()),
                "seed" => {
                    seed = Some(
                        rest.parse()
                            .map_err(|_| schema(n, format!("bad seed '{rest}'")))?,
                    )
                }
                "coeffs" => {
                    count = rest
                        .parse::<usize>()
                        .map_err(|_| schema(n, format!("bad coefficient count '{rest}'")))?;
                    let expected = signature.dim().pow(5);
                    if count != expected {
                        return Err(schema(n, format!("coeffs {count} but m^5 = {expected}")));
                    }
                    break;
                }
                _ => return Err(schema(n, format!("unknown header field '{key}'"))),
            }
        }

        let m = signature.dim();
        let mut coeffs = Vec::with_capacity(count);
        for k in 0..count {
            let (n, l) = next(&format!("coefficient {} of {count}", k + 1))?;
            let fields: Vec<&str> = l.split_whitespace().collect();
            if fields.len() != 6 {
                return Err(schema(
                    n,
                    format!(
                        "expected 5 indices and a value, found {} fields",
                        fields.len()
                    ),
                ));
            }
            let expected = unflatten(k, m);
            for (slot, (f, e)) in fields[..5].iter().zip(expected).enumerate() {
                let i: usize = f
                    .parse()
                    .map_err(|_| schema(n, format!("bad index '{f}'")))?;
                if i != e {
                    return Err(schema(
                        n,
                        format!("index {slot} is {i}, expected {e} (coefficients must be in row-major order)"),
                    ));
                }
            }
            let v: f64 = fields[5]
                .parse()
                .map_err(|_| schema(n, format!("bad value '{}'", fields[5])))?;
            if !v.is_finite() {
                return Err(schema(n, "non-finite coefficient"));
            }
            coeffs.push(v);
        }
        let (n, l) = next("end")?;
        if l != "end" {
            return Err(schema(
                n,
                format!("expected 'end' after {count} coefficients"),
            ));
        }
        if let Some((n, _)) = lines.next() {
            return Err(schema(n, "content after 'end'"));
        }
        Ok(TensorFile {
            format_version: version,
            signature,
            label,
            seed,
            coeffs,
        })
    }

    pub fn read(path: &std::path::Path) -> Result<TensorFile> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn coeff_array(&self) -> Result<CoeffArray> {
        CoeffArray::from_vec(self.dim(), 5, self.coeffs.clone())
    }

    pub fn from_tensor(r: &AcdtTensor, label: Option<String>, seed: Option<u64>) -> TensorFile {
        TensorFile {
            format_version: FORMAT_VERSION,
            signature: r.space().signature,
            label,
            seed,
            coeffs: r.coeffs().data().to_vec(),
        }
    }
}

fn unflatten(mut k: usize, m: usize) -> [usize; 5] {
    let mut idx = [0; 5];
    for slot in (0..5).rev() {
        idx[slot] = k % m;
        k /= m;
    }
    idx
}

/// A random Gaussian array projected onto the covariant-derivative class
/// and scaled.
pub fn cmd_generate(signature: Signature, seed: u64, scale: f64) -> Result<TensorFile> {
    let m = signature.dim();
    if m > MAX_GENERATE_DIM {
        return Err(Error::UnsupportedDimension {
            m,
            reason: "generate supports p + q <= 6",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = CoeffArray::random(m, 5, &mut rng);
    let mut proj = project_to_acdt(&raw, DEFAULT_PROJECTION_TOL, DEFAULT_MAX_ITER)?;
    proj.scale(scale);
    let mut data = proj.into_data();
    for x in &mut data {
        // drops negative zeros
        *x += 0.0;
    }
    let coeffs = CoeffArray::from_vec(m, 5, data)?;
    let res = validate_acdt(&coeffs)?;
    if res.relative > GENERATE_TOL {
        let (identity, residual) = res.worst();
        return Err(Error::Validation {
            identity,
            residual,
            tol: GENERATE_TOL,
        });
    }
    Ok(TensorFile {
        format_version: FORMAT_VERSION,
        signature,
        label: Some(format!("generated {signature} seed {seed} scale {scale:?}")),
        seed: Some(seed),
        coeffs: coeffs.into_data(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeConfig {
    pub sampling: SamplingConfig,
    pub validation_tol: f64,
}

impl AnalyzeConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        AnalyzeConfig {
            sampling: SamplingConfig::new(n, seed),
            validation_tol: DEFAULT_VALIDATION_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeSummary {
    pub cone: Cone,
    pub spectral: VerdictStatus,
    pub jordan: VerdictStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictSummary {
    pub cones: Vec<ConeSummary>,
    pub flags: Vec<(String, FlagStatus)>,
    pub null_cone_vanishes: Option<bool>,
    pub quarantined: bool,
    pub exit_code: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema: String,
    pub format_version: u32,
    pub label: Option<String>,
    pub signature: Signature,
    pub config: AnalyzeConfig,
    pub symmetry: SymmetryResidual,
    pub theorem: TheoremReport,
    pub null_cone: Option<NullConePipeline>,
    /// Why the null-cone pipeline was skipped, if it was.
    pub null_cone_skipped: Option<String>,
    pub quarantine: Vec<QuarantineEntry>,
    pub summary: VerdictSummary,
}

impl AnalysisReport {
    pub fn exit_code(&self) -> i32 {
        self.summary.exit_code
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are finite")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Schema {
            line: e.line(),
            message: e.to_string(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut o = String::new();
        let t = &self.theorem;
        let _ = writeln!(o, "szabo analysis {}", self.schema);
        if let Some(l) = &self.label {
            let _ = writeln!(o, "label: {l}");
        }
        let s = &self.config.sampling;
        let _ = writeln!(o, "signature: {}", self.signature);
        let _ = writeln!(
            o,
            "sampling: n={} seed={} bound={} tol={:.1e} validation_tol={:.1e}",
            s.n, s.seed, s.euclidean_bound, s.tol, self.config.validation_tol
        );
        let _ = writeln!(
            o,
            "symmetry residual: {:.3e} (relative {:.3e}), max coefficient {:.3e}",
            self.symmetry.max(),
            self.symmetry.relative,
            self.symmetry.max_abs_coefficient
        );
        let _ = writeln!(
            o,
            "\nconstancy (sampling-based, comparison tol {:.3e}):",
            s.comparison_tol()
        );
        for c in &t.cones {
            let _ = writeln!(
                o,
                "  {:<9} spectral: {:<17} jordan: {:<17} self-adjoint {:.1e}  S(v)v {:.1e}  odd {:.1e}",
                c.cone.name(),
                status_name(c.spectral.status),
                status_name(c.jordan.status),
                c.residuals.self_adjoint,
                c.residuals.kernel,
                c.residuals.oddness
            );
        }
        let _ = writeln!(o, "\nranks (rank: count):");
        for (name, r) in [("r+", &t.r_plus), ("r-", &t.r_minus), ("r0", &t.r_0)] {
            let body: Vec<String> = r.iter().map(|(k, v)| format!("{k}: {v}")).collect();
            let _ = writeln!(o, "  {name}  {{{}}}", body.join(", "));
        }
        if let Some(c) = &t.cross_cone {
            let _ = writeln!(
                o,
                "\ncross-cone: timelike spectrum = i * spacelike spectrum: {}; char poly gap {:.3e}",
                c.rotated_by_i, c.char_poly_gap
            );
        }
        let _ = writeln!(o, "\ntheorem flags:");
        for f in &t.flags {
            let _ = writeln!(
                o,
                "  {:<32} {:<22} {}",
                f.name,
                f.status.to_string(),
                f.explanation
            );
        }
        match (&self.null_cone, &self.null_cone_skipped) {
            (Some(p), _) => {
                let _ = writeln!(
                    o,
                    "\nnull cone: divisible {} (remainder {:.3e}), sampled vanishing {} (max {:.3e}), annihilator dim {}, consistent {}",
                    p.vanishing.divisible,
                    p.vanishing.remainder_norm,
                    p.vanishing.sampled_vanishing,
                    p.vanishing.max_sampled_value,
                    p.annihilator_dim,
                    p.consistent
                );
                let _ = writeln!(o, "  {}", p.explanation);
            }
            (None, Some(why)) => {
                let _ = writeln!(o, "\nnull cone: skipped ({why})");
            }
            _ => {}
        }
        let _ = writeln!(o, "\nquarantine: {} entries", self.quarantine.len());
        for q in &self.quarantine {
            let _ = writeln!(o, "  [{}] {}", q.source, q.reason);
        }
        let _ = writeln!(o, "exit code: {}", self.summary.exit_code);
        o
    }
}

fn status_name(s: VerdictStatus) -> &'static str {
    match s {
        VerdictStatus::NoCounterexample => "no-counterexample",
        VerdictStatus::WitnessFound => "witness-found",
    }
}

/// Validates the file, then runs the per-point identities, constancy
/// checks, rank statistics, theorem flags and the null-cone pipeline.
pub fn cmd_analyze(file: &TensorFile, cfg: &AnalyzeConfig) -> Result<AnalysisReport> {
    let coeffs = file.coeff_array()?;
    let symmetry = validate_acdt(&coeffs)?;
    let space = PseudoSpace::from_signature(file.signature);
    let r = AcdtTensor::new(space, coeffs, cfg.validation_tol)?;
    let theorem = theorem_report(&r, &cfg.sampling)?;

    let (null_cone, null_cone_skipped) = if !Cone::Null.is_feasible(&space) {
        (
            None,
            Some("no null vectors in a definite signature".to_string()),
        )
    } else {
        match null_cone_pipeline(&r, cfg.sampling.tol, cfg.sampling.cone_seed(Cone::Null)) {
            Ok(p) => (Some(p), None),
            Err(e @ Error::UnsupportedDimension { .. }) => (None, Some(e.to_string())),
            Err(e) => return Err(e),
        }
    };

    let mut quarantine = theorem.quarantine.clone();
    if let Some(p) = &null_cone {
        if !p.consistent {
            quarantine.push(QuarantineEntry {
                source: "null_cone_pipeline".into(),
                reason: p.explanation.clone(),
                vectors: Vec::new(),
            });
        }
    }
    let exit_code = if quarantine.is_empty() {
        exit::CLEAN
    } else {
        exit::QUARANTINE
    };
    let summary = VerdictSummary {
        cones: theorem
            .cones
            .iter()
            .map(|c| ConeSummary {
                cone: c.cone,
                spectral: c.spectral.status,
                jordan: c.jordan.status,
            })
            .collect(),
        flags: theorem
            .flags
            .iter()
            .map(|f| (f.name.clone(), f.status))
            .collect(),
        null_cone_vanishes: null_cone.as_ref().map(|p| p.vanishing.vanishes()),
        quarantined: !quarantine.is_empty(),
        exit_code,
    };
    Ok(AnalysisReport {
        schema: REPORT_SCHEMA.to_string(),
        format_version: file.format_version,
        label: file.label.clone(),
        signature: file.signature,
        config: *cfg,
        symmetry,
        theorem,
        null_cone,
        null_cone_skipped,
        quarantine,
        summary,
    })
}

pub fn cmd_dimensions(max_m: usize) -> Result<Vec<DimensionRow>> {
    dimension_table(max_m)
}

pub fn dimensions_text(rows: &[DimensionRow]) -> String {
    let mut o = String::new();
    let _ = writeln!(
        o,
        "{:>2} {:>8} {:>9}  szabo map kernel by signature",
        "m", "act_dim", "acdt_dim"
    );
    for r in rows {
        let ks: Vec<String> = r
            .szabo_kernel_dims
            .iter()
            .map(|(s, k)| format!("{s}:{k}"))
            .collect();
        let _ = writeln!(
            o,
            "{:>2} {:>8} {:>9}  {}",
            r.m,
            r.act_dim,
            r.acdt_dim,
            ks.join(" ")
        );
    }
    o
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(p: usize, q: usize) -> Signature {
        Signature::new(p, q).unwrap()
    }

    #[test]
    fn generate_validates_and_is_deterministic() {
        let f = cmd_generate(sig(2, 3), 7, 1.0).unwrap();
        let res = validate_acdt(&f.coeff_array().unwrap()).unwrap();
        assert!(res.relative <= GENERATE_TOL);
        assert_eq!(f, cmd_generate(sig(2, 3), 7, 1.0).unwrap());
        assert_eq!(
            f.to_text(),
            cmd_generate(sig(2, 3), 7, 1.0).unwrap().to_text()
        );
    }

    #[test]
    fn scale_zero_is_zero() {
        let f = cmd_generate(sig(1, 2), 3, 0.0).unwrap();
        assert!(f.coeffs.iter().all(|&c| c == 0.0 && c.is_sign_positive()));
    }

    #[test]
    fn text_round_trip() {
        let f = cmd_generate(sig(1, 2), 11, 2.5).unwrap();
        assert_eq!(TensorFile::parse(&f.to_text()).unwrap(), f);
    }

    #[test]
    fn schema_errors_have_lines() {
        let f = cmd_generate(sig(1, 1), 1, 1.0).unwrap();
        let text = f.to_text();
        let truncated: String = text.lines().take(20).map(|l| format!("{l}\n")).collect();
        match TensorFile::parse(&truncated) {
            Err(Error::Schema { line, .. }) => assert_eq!(line, 21),
            other => panic!("{other:?}"),
        }
        let swapped = text.replacen("0 0 0 0 1 ", "0 0 0 1 0 ", 1);
        assert!(matches!(
            TensorFile::parse(&swapped),
            Err(Error::Schema { line: 8, .. })
        ));
        let bad_order = text.replace("index-order x y z w v", "index-order v x y z w");
        assert!(matches!(
            TensorFile::parse(&bad_order),
            Err(Error::Schema { line: 2, .. })
        ));
        assert!(matches!(
            TensorFile::parse(""),
            Err(Error::Schema { line: 1, .. })
        ));
    }

    #[test]
    fn unsupported_dimension() {
        assert!(matches!(
            cmd_generate(sig(3, 4), 1, 1.0),
            Err(Error::UnsupportedDimension { .. })
        ));
    }

    #[test]
    fn analyze_rejects_invalid_symmetry() {
        let mut f = cmd_generate(sig(1, 2), 1, 0.0).unwrap();
        f.coeffs[0] = 1.0;
        let e = cmd_analyze(&f, &AnalyzeConfig::new(5, 1)).unwrap_err();
        assert_eq!(exit_code(&e), exit::VALIDATION);
    }

    #[test]
    fn zero_tensor_report_is_clean() {
        let f = cmd_generate(sig(2, 3), 1, 0.0).unwrap();
        let rep = cmd_analyze(&f, &AnalyzeConfig::new(10, 1)).unwrap();
        assert_eq!(rep.exit_code(), exit::CLEAN);
        assert!(rep
            .summary
            .flags
            .iter()
            .all(|(_, s)| *s != FlagStatus::ViolatedWithWitness));
        assert_eq!(rep.summary.null_cone_vanishes, Some(true));
        let back = AnalysisReport::from_json(&rep.to_json()).unwrap();
        assert_eq!(back, rep);
    }

    #[test]
    fn dimension_rows() {
        let rows = cmd_dimensions(2).unwrap();
        assert_eq!((rows[0].act_dim, rows[0].acdt_dim), (0, 0));
        assert_eq!((rows[1].act_dim, rows[1].acdt_dim), (1, 2));
        assert!(cmd_dimensions(6).is_err());
    }
}
