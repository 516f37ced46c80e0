//! `activate`: threshold, p̂ search, biseparable certificate and its audit.

use gmelab::activation::{find_p_hat, run_activation, ActivationReport, PHatOptions};
use gmelab::distance::{EvidenceOptions, GilbertOptions};
use gmelab::Tolerances;
use serde_json::{json, Value};

use crate::report::{to_value, CliError};

pub struct Activation {
    pub summary: Value,
    pub certificate: Value,
    pub passed: bool,
}

fn validate(n: usize, k: usize, p: Option<f64>, tol: &Tolerances) -> Result<(), CliError> {
    if n < 3 {
        return Err(CliError::Input(format!("--n must be at least 3, got {n}")));
    }
    if k == 0 {
        return Err(CliError::Input("--k must be at least 1".into()));
    }
    if let Some(p) = p {
        if !(0.0..=1.0).contains(&p) {
            return Err(CliError::Input(format!("--p must lie in [0, 1], got {p}")));
        }
    }
    let dim = 4f64.powi(((n - 1) * k) as i32);
    if dim > tol.dimension_cap as f64 {
        return Err(CliError::Input(format!(
            "state dimension {dim} exceeds cap {}",
            tol.dimension_cap
        )));
    }
    Ok(())
}

fn stage(name: &str, e: gmelab::Error, partial: Option<Value>) -> CliError {
    CliError::solver(format!("{name}: {e}"), partial)
}

pub fn run_activate(
    n: usize,
    k: usize,
    p: Option<f64>,
    seed: u64,
    tol: &Tolerances,
) -> Result<Activation, CliError> {
    validate(n, k, p, tol)?;
    let opts = PHatOptions {
        evidence: EvidenceOptions {
            gilbert: GilbertOptions::from_tolerances(tol, seed),
            ..Default::default()
        },
        ..Default::default()
    };
    let search = match p {
        Some(_) => None,
        None => {
            let s = find_p_hat(n, k, &opts, tol).map_err(|e| stage("p-hat search", e, None))?;
            if s.p_hat.is_none() {
                let msg = s
                    .failure
                    .clone()
                    .unwrap_or_else(|| "no candidate certified".into());
                return Err(CliError::solver(
                    format!("p-hat search: {msg}"),
                    Some(to_value(&s)),
                ));
            }
            Some(s)
        }
    };
    let p_hat = p
        .or_else(|| search.as_ref().and_then(|s| s.p_hat))
        .expect("p-hat present");
    let mut report =
        run_activation(n, k, Some(p_hat), &opts, tol).map_err(|e| stage("certificate", e, None))?;
    if let Some(s) = search {
        report.key_state_evidence = s.evidence.clone();
        report.searched = true;
        report.search = Some(s);
    }
    Ok(Activation {
        summary: summarize(&report),
        certificate: json!({ "certificate": report.certificate, "key_state_evidence": report.key_state_evidence }),
        passed: report.verification.passed,
    })
}

fn summarize(r: &ActivationReport) -> Value {
    let terms: Vec<Value> = r
        .certificate
        .terms
        .iter()
        .map(|t| {
            let blocks: Vec<Value> = t
                .blocks
                .iter()
                .map(|b| {
                    json!({
                        "label": b.label,
                        "factors": b.factors,
                        "side": b.side,
                        "evidence": b.evidence.as_ref().map(|e| e.kind()),
                    })
                })
                .collect();
            json!({ "weight": t.weight, "cut": t.cut, "label": t.label, "blocks": blocks })
        })
        .collect();
    let candidates = r.search.as_ref().map(|s| {
        s.candidates
            .iter()
            .map(|c| {
                json!({
                    "p": c.p,
                    "fixed_weight_verdict": c.fixed_weight_verdict,
                    "key_state_verdict": c.key_state_verdict,
                    "evidence": c.key_state_evidence,
                })
            })
            .collect::<Vec<_>>()
    });
    json!({
        "n": r.n,
        "k": r.k,
        "p0": r.p0,
        "p_hat": r.p_hat,
        "searched": r.searched,
        "candidates": candidates,
        "key_state_evidence": r.key_state_evidence.as_ref().map(|e| e.kind()),
        "certificate": {
            "target": r.certificate.target_description,
            "activation_relevant": r.certificate.activation_relevant,
            "evidence_complete": r.certificate.evidence_complete,
            "reconstruction_residual": r.certificate.reconstruction_residual,
            "terms": terms,
        },
        "verification": r.verification,
        "activatability": {
            "verdict": r.activatability.verdict,
            "cuts": r.activatability.cuts.iter().map(|c| json!({
                "cut": c.cut,
                "negativity": c.negativity,
                "evidence": c.evidence.as_ref().map(|e| e.kind()),
            })).collect::<Vec<_>>(),
        },
    })
}
