//! Acceptance suite: one pass/fail line per criterion.
//!
//! Run with `cargo test --release --test acceptance -- --nocapture`.

use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use szabo::analyzer::{cmd_generate, AnalysisReport, REPORT_SCHEMA};
use szabo::jordan::{jordan_decompose, DEFAULT_TOL};
use szabo::linalg::{max_abs, max_abs_vec};
use szabo::nullcone::{
    divide_by_form, linear_annihilator_space_dim, szabo_cubic, vanishes_on_null_cone,
    MatrixLinearPolynomial,
};
use szabo::sampling::{sample_cone, Cone};
use szabo::space::{CausalType, PseudoSpace, Signature};
use szabo::spectral::{adams_number, char_poly_p, jordan_constancy, SamplingConfig};
use szabo::symmetry::szabo_map_kernel_dim;
use szabo::tensor::{project_to_acdt, validate_acdt, AcdtTensor, CoeffArray};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    if let Some(limit) = limit {
        if took > limit {
            o.pass = false;
        }
    }
    o.detail = format!("{}; {:.2?}", o.detail, took);
    o
}

fn adams_table() -> Outcome {
    let expected = [0, 1, 0, 3, 0, 1, 0, 7, 0, 1, 0, 3, 0, 1, 0, 8];
    let got: Vec<u32> = (1..=16).map(|q| adams_number(q).unwrap()).collect();
    outcome(got == expected, format!("nu(1..16) = {got:?}"))
}

fn symmetry_projector() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut res, mut idem, mut fixed) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..200 {
        let m = 2 + k % 3;
        let t = CoeffArray::random(m, 5, &mut rng);
        let p = project_to_acdt(&t, 1e-13, 10_000).unwrap();
        res = res.max(validate_acdt(&p).unwrap().max());
        idem = idem.max(project_to_acdt(&p, 1e-13, 10_000).unwrap().max_abs_diff(&p));
        let valid = AcdtTensor::random(PseudoSpace::new(1, m - 1).unwrap(), k as u64).scaled(3.0);
        let back = project_to_acdt(valid.coeffs(), 1e-13, 10_000).unwrap();
        fixed = fixed.max(back.max_abs_diff(valid.coeffs()));
    }
    outcome(
        res <= 1e-10 && idem <= 1e-10 && fixed <= 1e-10,
        format!("residual {res:.1e}, idempotence {idem:.1e}, fixed {fixed:.1e}"),
    )
}

/// Criterion 3 samples: 100 tensors in (2,3), each with 50 cone samples
/// (10 spacelike, 10 timelike and 5 null base points with their antipodes).
fn per_point_samples() -> Vec<(AcdtTensor, Vec<DVector<f64>>)> {
    let space = PseudoSpace::new(2, 3).unwrap();
    (0..100)
        .map(|k| {
            let r = AcdtTensor::random(space, 1000 + k);
            let vs = [(Cone::Spacelike, 10), (Cone::Timelike, 10), (Cone::Null, 5)]
                .into_iter()
                .flat_map(|(cone, n)| sample_cone(&space, cone, n, 31 * k, 10.0).unwrap().vectors)
                .collect();
            (r, vs)
        })
        .collect()
}

fn per_point_identities(samples: &[(AcdtTensor, Vec<DVector<f64>>)]) -> Outcome {
    let space = PseudoSpace::new(2, 3).unwrap();
    let (mut sa, mut ker, mut odd, mut hom, mut oracle) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (r, vs) in samples {
        let d = r.coeffs();
        for v in vs {
            let a = r.szabo(v).into_matrix();
            let scale = max_abs(&a);
            sa = sa.max(space.is_self_adjoint(&a, 1e-9).residual / scale);
            ker = ker.max(max_abs_vec(&(&a * v)) / (scale * max_abs_vec(v)));
            odd = odd.max(max_abs(&(r.szabo(&-v).into_matrix() + &a)) / scale);
            hom = hom.max(max_abs(&(r.szabo(&(v * 2.0)).into_matrix() - &a * 8.0)) / (8.0 * scale));
            // (S(v) e_y, e_z) = D(y,v,v,z;v) by direct summation
            for y in 0..5 {
                for z in 0..5 {
                    let lhs = space.signature.sign(z) * a[(z, y)];
                    let mut rhs = 0.0;
                    for i in 0..5 {
                        for j in 0..5 {
                            for k in 0..5 {
                                rhs += d.get(&[y, i, j, z, k]) * v[i] * v[j] * v[k];
                            }
                        }
                    }
                    oracle = oracle.max((lhs - rhs).abs() / rhs.abs().max(1.0));
                }
            }
        }
    }
    outcome(
        sa <= 1e-9 && ker <= 1e-9 && odd <= 1e-9 && hom <= 1e-9 && oracle <= 1e-12,
        format!(
            "self-adjoint {sa:.1e}, S(v)v {ker:.1e}, odd {odd:.1e}, cubic {hom:.1e}, oracle {oracle:.1e}"
        ),
    )
}

fn jordan_suite() -> Outcome {
    let sigs = [(1, 1), (2, 2), (1, 3), (2, 3)];
    let (mut recon, mut orth, mut gram) = (0.0f64, 0.0f64, f64::INFINITY);
    let (mut nonreal, mut pq_ok) = (0usize, true);
    for k in 0..500 {
        let (p, q) = sigs[k % 4];
        let space = PseudoSpace::new(p, q).unwrap();
        let a = space.random_self_adjoint(k as u64);
        let scale = max_abs(a.matrix()).max(1.0);
        let d = jordan_decompose(&a, DEFAULT_TOL);
        recon = recon.max(d.reconstruction_residual() / scale);
        orth = orth.max(d.orthogonality_residual() / scale);
        gram = gram.min(d.min_gram_singular());
        for e in d.entries.iter().filter(|e| !e.is_real()) {
            nonreal += 1;
            pq_ok &= e.signature.0 == e.signature.1;
        }
    }
    outcome(
        recon <= 1e-8 && orth <= 1e-8 && gram > DEFAULT_TOL && pq_ok,
        format!(
            "reconstruction {recon:.1e}, orthogonality {orth:.1e}, min Gram singular value {gram:.2e}, {nonreal} non-real eigenvalues with p = q: {pq_ok}"
        ),
    )
}

fn szabo_kernel() -> Outcome {
    let dims: Vec<(Signature, usize)> = Signature::all_with_dim(1, 5)
        .into_iter()
        .map(|s| {
            (
                s,
                szabo_map_kernel_dim(&PseudoSpace::from_signature(s)).unwrap(),
            )
        })
        .collect();
    let bad: Vec<_> = dims.iter().filter(|(_, k)| *k != 0).collect();
    outcome(
        bad.is_empty(),
        format!("{} signatures, nonzero kernels {bad:?}", dims.len()),
    )
}

fn annihilator() -> Outcome {
    let dims: Vec<(Signature, usize)> = Signature::all_with_dim(2, 6)
        .into_iter()
        .map(|s| {
            (
                s,
                linear_annihilator_space_dim(&PseudoSpace::from_signature(s)).unwrap(),
            )
        })
        .collect();
    let bad: Vec<_> = dims.iter().filter(|(_, k)| *k != 0).collect();
    outcome(
        bad.is_empty(),
        format!("{} signatures, nonzero dims {bad:?}", dims.len()),
    )
}

fn division() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let sigs: Vec<Signature> = Signature::all_with_dim(2, 5);
    let (mut qerr, mut rem) = (0.0f64, 0.0f64);
    for k in 0..50 {
        let space = PseudoSpace::from_signature(sigs[k % sigs.len()]);
        let l = MatrixLinearPolynomial::random(space, &mut rng);
        let d = divide_by_form(&l.times_form());
        qerr = qerr.max(d.quotient.max_abs_diff(&l));
        rem = rem.max(d.remainder_norm);
    }
    let indefinite: Vec<Signature> = Signature::all_with_dim(3, 5)
        .into_iter()
        .filter(|s| s.p >= 1 && s.q >= 1)
        .collect();
    let mut disagree = 0;
    let mut vanishing = 0;
    for k in 0..100 {
        let space = PseudoSpace::from_signature(indefinite[k % indefinite.len()]);
        let r = AcdtTensor::random(space, 500 + k as u64);
        let v = vanishes_on_null_cone(&szabo_cubic(&r), DEFAULT_TOL, k as u64).unwrap();
        disagree += usize::from(!v.routes_agree());
        vanishing += usize::from(v.vanishes());
    }
    outcome(
        qerr <= 1e-10 && rem <= 1e-12 && disagree == 0,
        format!(
            "quotient error {qerr:.1e}, remainder {rem:.1e}, dual-route disagreements {disagree}/100 ({vanishing} vanishing)"
        ),
    )
}

fn falsification_power() -> Outcome {
    let space = PseudoSpace::new(2, 3).unwrap();
    let cfg = SamplingConfig::new(100, 8);
    let found = (0..50)
        .filter(|&k| {
            let r = AcdtTensor::random(space, 9000 + k);
            jordan_constancy(&r, Cone::Spacelike, &cfg)
                .unwrap()
                .found_witness()
        })
        .count();
    let zero = AcdtTensor::zero(space);
    let zero_clean = [1, 10, 100].iter().all(|&n| {
        !jordan_constancy(&zero, Cone::Spacelike, &SamplingConfig::new(n, 1))
            .unwrap()
            .found_witness()
    });
    outcome(
        found * 100 >= 95 * 50 && zero_clean,
        format!("witness rate {found}/50, zero tensor clean at n = 1, 10, 100: {zero_clean}"),
    )
}

fn antipodal_spectrum(samples: &[(AcdtTensor, Vec<DVector<f64>>)]) -> Outcome {
    let mut mismatches = 0;
    let mut pairs = 0;
    let mut worst_cp = 0.0f64;
    for (r, vs) in samples {
        for v in vs {
            let a = jordan_decompose(&r.szabo(v), DEFAULT_TOL).spectrum();
            let b = jordan_decompose(&r.szabo(&-v), DEFAULT_TOL).spectrum();
            pairs += 1;
            mismatches += usize::from(!b.matches(&a.negated(), DEFAULT_TOL));
            if matches!(
                r.space().causal_type(v).unwrap(),
                CausalType::Null | CausalType::Zero
            ) {
                continue;
            }
            let base = char_poly_p(r, v).unwrap();
            let scale = base.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(1.0);
            for t in [-3.0, 0.5, 2.0] {
                let other = char_poly_p(r, &(v * t)).unwrap();
                for (x, y) in base.iter().zip(&other) {
                    worst_cp = worst_cp.max((x - y).abs() / scale);
                }
            }
        }
    }
    outcome(
        mismatches == 0 && worst_cp <= 1e-9,
        format!("{mismatches}/{pairs} antipodal spectrum mismatches, char poly scale gap {worst_cp:.1e}"),
    )
}

fn cli_round_trip() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_szabo");
    let dir = tempfile::tempdir().unwrap();
    let mut notes = Vec::new();
    let mut pass = true;
    for (p, q) in [(2, 2), (2, 3)] {
        let input = dir.path().join(format!("t{p}{q}.txt"));
        let st = Command::new(bin)
            .args([
                "generate",
                "--signature",
                &format!("{p},{q}"),
                "--seed",
                "7",
                "--output",
            ])
            .arg(&input)
            .status()
            .unwrap();
        pass &= st.success();
        let run = || {
            Command::new(bin)
                .args([
                    "analyze",
                    "--seed",
                    "1",
                    "--samples",
                    "100",
                    "--format",
                    "structured",
                ])
                .arg(&input)
                .output()
                .unwrap()
        };
        let (a, b) = (run(), run());
        let ok = a.status.code() == Some(0)
            && a.stdout == b.stdout
            && AnalysisReport::from_json(&String::from_utf8_lossy(&a.stdout))
                .is_ok_and(|r| r.schema == REPORT_SCHEMA);
        pass &= ok;
        notes.push(format!(
            "({p},{q}) exit {:?} deterministic+schema {ok}",
            a.status.code()
        ));
    }
    let full = cmd_generate(Signature::new(2, 3).unwrap(), 7, 1.0)
        .unwrap()
        .to_text();
    let cut: String = full.lines().take(200).map(|l| format!("{l}\n")).collect();
    let trunc = dir.path().join("trunc.txt");
    std::fs::write(&trunc, cut).unwrap();
    let out = Command::new(bin)
        .args(["analyze", "--seed", "1"])
        .arg(&trunc)
        .output()
        .unwrap();
    let schema_err =
        !out.status.success() && String::from_utf8_lossy(&out.stderr).contains("schema error");
    pass &= schema_err;
    notes.push(format!(
        "truncated exit {:?} schema error {schema_err}",
        out.status.code()
    ));
    outcome(pass, notes.join(", "))
}

#[test]
fn acceptance() {
    let samples = per_point_samples();
    let results = [
        (
            "adams table",
            timed(Some(Duration::from_secs(1)), adams_table),
        ),
        (
            "symmetry projector",
            timed(Some(Duration::from_secs(120)), symmetry_projector),
        ),
        (
            "per-point szabo identities",
            timed(None, || per_point_identities(&samples)),
        ),
        ("jordan decomposition suite", timed(None, jordan_suite)),
        (
            "szabo map kernel",
            timed(Some(Duration::from_secs(300)), szabo_kernel),
        ),
        ("linear annihilator", timed(None, annihilator)),
        ("division by the form", timed(None, division)),
        ("falsification power", timed(None, falsification_power)),
        (
            "antipodal spectra and scale invariance",
            timed(None, || antipodal_spectrum(&samples)),
        ),
        ("cli round trip", timed(None, cli_round_trip)),
    ];
    let mut failed = Vec::new();
    for (i, (name, o)) in results.iter().enumerate() {
        println!(
            "criterion {:>2} {:<40} {}  ({})",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
