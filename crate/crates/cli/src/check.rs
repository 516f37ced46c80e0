//! `check`: one criterion on one state, per cut or for the whole state.

use std::str::FromStr;

use gmelab::criteria::{gb_ball_separable_with, negativity_with, ppt_min_eig_with, Verdict};
use gmelab::distance::{
    activatable_via_npt_with, gilbert_upper_bound, ppt_mixture_witness_with, sum_criterion_with,
    t_ppt_with, EvidenceOptions, GilbertOptions,
};
use gmelab::partitions::{enumerate_bipartitions, Bipartition};
use gmelab::tensor::DensityMatrix;
use gmelab::Tolerances;
use serde::Serialize;
use serde_json::{json, Value};

use crate::report::{to_value, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    Ppt,
    Negativity,
    Gb,
    Tppt,
    Gilbert,
    GmeWitness,
    Sum,
    Activatable,
}

impl FromStr for Criterion {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "ppt" => Self::Ppt,
            "negativity" => Self::Negativity,
            "gb" => Self::Gb,
            "tppt" => Self::Tppt,
            "gilbert" => Self::Gilbert,
            "gme-witness" => Self::GmeWitness,
            "sum" => Self::Sum,
            "activatable" => Self::Activatable,
            other => return Err(CliError::Input(format!("unknown criterion {other:?}"))),
        })
    }
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Self::Ppt => "ppt",
            Self::Negativity => "negativity",
            Self::Gb => "gb",
            Self::Tppt => "tppt",
            Self::Gilbert => "gilbert",
            Self::GmeWitness => "gme-witness",
            Self::Sum => "sum",
            Self::Activatable => "activatable",
        }
    }

    /// Evaluated once per cut rather than on the whole state.
    pub fn per_cut(self) -> bool {
        matches!(
            self,
            Self::Ppt | Self::Negativity | Self::Gb | Self::Tppt | Self::Gilbert
        )
    }
}

/// One line of results: a cut (or none for whole-state criteria), a scalar and a verdict.
#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub cut: Option<Bipartition>,
    pub value: f64,
    pub verdict: String,
    pub details: Value,
    #[serde(skip)]
    pub sidecar: Option<Value>,
}

fn verdict_name<T: Serialize>(v: T) -> String {
    to_value(&v).as_str().unwrap_or_default().to_string()
}

pub fn resolve_cuts(rho: &DensityMatrix, cut: Option<&str>) -> Result<Vec<Bipartition>, CliError> {
    let n = rho.layout().party_count();
    if n < 2 {
        return Err(CliError::Input(format!(
            "state has {n} party; cuts need at least two"
        )));
    }
    match cut {
        None => Ok(enumerate_bipartitions(n)?),
        Some(text) => {
            let b: Bipartition = text.parse()?;
            if b.parties().len() + b.complement().len() != n {
                return Err(CliError::Input(format!(
                    "cut {text:?} does not cover the {n} parties of the state"
                )));
            }
            Ok(vec![b])
        }
    }
}

pub fn evaluate_cut(
    rho: &DensityMatrix,
    criterion: Criterion,
    b: &Bipartition,
    seed: u64,
    tol: &Tolerances,
) -> Result<Entry, CliError> {
    let entry = |value: f64, verdict: String, details: Value| Entry {
        cut: Some(b.clone()),
        value,
        verdict,
        details,
        sidecar: None,
    };
    Ok(match criterion {
        Criterion::Ppt => {
            let v = ppt_min_eig_with(rho, b, tol)?;
            entry(v.value, verdict_name(v.verdict), Value::Null)
        }
        Criterion::Negativity => {
            let v = negativity_with(rho, b, tol)?;
            let verdict = if v > tol.npt_activation {
                Verdict::EntangledCertified
            } else {
                Verdict::Inconclusive
            };
            entry(v, verdict_name(verdict), Value::Null)
        }
        Criterion::Gb => {
            let v = gb_ball_separable_with(rho, b, tol)?;
            entry(
                v.value,
                verdict_name(v.verdict),
                json!({ "purity": v.value }),
            )
        }
        Criterion::Tppt => {
            let t = t_ppt_with(rho, b, tol)?;
            let verdict = if t.lower > tol.witness {
                Verdict::EntangledCertified
            } else {
                Verdict::Inconclusive
            };
            entry(t.lower, verdict_name(verdict), to_value(&t))
        }
        Criterion::Gilbert => {
            let g = gilbert_upper_bound(rho, b, &GilbertOptions::from_tolerances(tol, seed))?;
            let verdict = if g.converged {
                Verdict::NumericallySeparable
            } else {
                Verdict::Inconclusive
            };
            let details = json!({
                "frobenius": g.frobenius,
                "iterations": g.iterations,
                "converged": g.converged,
                "atoms": g.mixture.atoms.len(),
            });
            let mut e = entry(g.upper_bound, verdict_name(verdict), details);
            e.sidecar = Some(to_value(&g.mixture));
            e
        }
        _ => unreachable!("whole-state criterion"),
    })
}

pub fn evaluate_state(
    rho: &DensityMatrix,
    criterion: Criterion,
    seed: u64,
    tol: &Tolerances,
) -> Result<Entry, CliError> {
    let evidence = EvidenceOptions {
        gilbert: GilbertOptions::from_tolerances(tol, seed),
        ..Default::default()
    };
    Ok(match criterion {
        Criterion::Sum => {
            let r = sum_criterion_with(rho, tol)?;
            Entry {
                cut: None,
                value: r.sum,
                verdict: verdict_name(r.verdict),
                details: to_value(&r),
                sidecar: None,
            }
        }
        Criterion::GmeWitness => {
            let g = ppt_mixture_witness_with(rho, tol)?;
            let details = json!({ "audit": g.audit, "sdp_iterations": g.sdp_iterations });
            Entry {
                cut: None,
                value: g.value,
                verdict: verdict_name(g.status),
                details,
                sidecar: Some(to_value(&g)),
            }
        }
        Criterion::Activatable => {
            let c = activatable_via_npt_with(rho, &evidence, tol)?;
            let min_neg = c
                .cuts
                .iter()
                .map(|x| x.negativity)
                .fold(f64::INFINITY, f64::min);
            let cuts: Vec<Value> = c
                .cuts
                .iter()
                .map(|x| {
                    json!({
                        "cut": x.cut,
                        "negativity": x.negativity,
                        "evidence": x.evidence.as_ref().map(|e| e.kind()),
                        "evidence_verdict": x.evidence.as_ref().map(|e| verdict_name(e.verdict())),
                    })
                })
                .collect();
            Entry {
                cut: None,
                value: min_neg,
                verdict: verdict_name(c.verdict),
                details: json!({ "cuts": cuts }),
                sidecar: Some(to_value(&c)),
            }
        }
        _ => unreachable!("per-cut criterion"),
    })
}

/// All entries for a `check`; a solver failure returns the entries done so far.
pub fn run_check(
    rho: &DensityMatrix,
    criterion: Criterion,
    cut: Option<&str>,
    seed: u64,
    tol: &Tolerances,
) -> Result<Vec<Entry>, CliError> {
    if !criterion.per_cut() {
        if cut.is_some() {
            return Err(CliError::Input(format!(
                "criterion {} applies to the whole state; drop --cut",
                criterion.name()
            )));
        }
        return Ok(vec![evaluate_state(rho, criterion, seed, tol)?]);
    }
    let mut done = Vec::new();
    for b in resolve_cuts(rho, cut)? {
        match evaluate_cut(rho, criterion, &b, seed, tol) {
            Ok(e) => done.push(e),
            Err(CliError::Solver { message, .. }) => {
                return Err(CliError::solver(
                    format!("cut {b}: {message}"),
                    Some(to_value(&done)),
                ));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(done)
}
