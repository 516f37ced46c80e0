//! `sweep`: criteria over a grid of star networks `σₙ(p)^{⊗k}`, one CSV row per
//! (n, k, p, criterion, cut).

use gmelab::activation::star_copies;
use gmelab::criteria::ppt_min_eig_with;
use gmelab::partitions::Bipartition;
use gmelab::states::{copies_with_cap, isotropic_state};
use gmelab::Tolerances;
use rayon::prelude::*;
use serde::Serialize;

use crate::check::{evaluate_cut, evaluate_state, resolve_cuts, Criterion, Entry};
use crate::report::{fmt_f64, CliError};

pub const MAX_GRID: usize = 10_000;
pub const HEADER: [&str; 7] = ["n", "k", "p", "criterion", "cut", "value", "verdict"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepCriterion {
    /// PPT eigenvalue of each edge's isotropic pair, `k` copies.
    PptPerEdge,
    State(Criterion),
}

impl SweepCriterion {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        if s == "ppt-per-edge" {
            Ok(Self::PptPerEdge)
        } else {
            Ok(Self::State(s.parse()?))
        }
    }

    fn name(self) -> &'static str {
        match self {
            Self::PptPerEdge => "ppt-per-edge",
            Self::State(c) => c.name(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub criterion: &'static str,
    pub cut: String,
    pub value: Option<f64>,
    pub verdict: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RowFailure {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub criterion: &'static str,
    pub error: String,
}

/// `a:b:step` (inclusive) or a comma list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = |what: &str| CliError::Input(format!("bad p grid {text:?}: {what}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let mut grid = if let [a, b, step] = text.split(':').collect::<Vec<_>>()[..] {
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if !(step > 0.0) || b < a {
            return Err(bad("need start <= stop and step > 0"));
        }
        let count = ((b - a) / step + 1e-9).floor() as usize + 1;
        if count > MAX_GRID {
            return Err(bad("too many points"));
        }
        // snap to 12 decimals so 0.3 + 0.05·i lands on the intended decimals
        (0..count)
            .map(|i| ((a + step * i as f64) * 1e12).round() / 1e12)
            .collect()
    } else {
        text.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(bad("visibilities must lie in [0, 1]"));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    Ok(grid)
}

pub fn parse_list(text: &str, what: &str) -> Result<Vec<usize>, CliError> {
    let mut v = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Input(format!("bad {what} {s:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

fn point_rows(
    n: usize,
    k: usize,
    p: f64,
    criteria: &[SweepCriterion],
    seed: u64,
    tol: &Tolerances,
) -> (Vec<Row>, Vec<RowFailure>) {
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let row = |c: SweepCriterion, cut: String, value: Option<f64>, verdict: String| Row {
        n,
        k,
        p,
        criterion: c.name(),
        cut,
        value,
        verdict,
    };
    for &c in criteria {
        match evaluate_point(n, k, p, c, seed, tol) {
            Ok(entries) => {
                for (cut, e) in entries {
                    rows.push(row(c, cut, Some(e.value), e.verdict));
                }
            }
            Err(e) => {
                rows.push(row(c, String::new(), None, "error".into()));
                failures.push(RowFailure {
                    n,
                    k,
                    p,
                    criterion: c.name(),
                    error: e.message().to_string(),
                });
            }
        }
    }
    (rows, failures)
}

fn evaluate_point(
    n: usize,
    k: usize,
    p: f64,
    c: SweepCriterion,
    seed: u64,
    tol: &Tolerances,
) -> Result<Vec<(String, Entry)>, CliError> {
    match c {
        SweepCriterion::PptPerEdge => {
            let pair = copies_with_cap(&isotropic_state(p)?, k, tol.dimension_cap)?;
            let v = ppt_min_eig_with(&pair, &Bipartition::new(&[1], 2)?, tol)?;
            let verdict = serde_json::to_value(v.verdict)
                .expect("verdict")
                .as_str()
                .unwrap_or_default()
                .to_string();
            Ok((2..=n)
                .map(|leaf| {
                    let e = Entry {
                        cut: None,
                        value: v.value,
                        verdict: verdict.clone(),
                        details: Default::default(),
                        sidecar: None,
                    };
                    (format!("1|{leaf}"), e)
                })
                .collect())
        }
        SweepCriterion::State(crit) => {
            let dim = 4f64.powi(((n.max(2) - 1) * k) as i32);
            if dim > tol.dimension_cap as f64 {
                return Err(CliError::Input(format!(
                    "dimension {dim} exceeds cap {}",
                    tol.dimension_cap
                )));
            }
            let rho = star_copies(n, p, k)?;
            if crit.per_cut() {
                resolve_cuts(&rho, None)?
                    .into_iter()
                    .map(|b| Ok((b.to_string(), evaluate_cut(&rho, crit, &b, seed, tol)?)))
                    .collect()
            } else {
                Ok(vec![(
                    String::new(),
                    evaluate_state(&rho, crit, seed, tol)?,
                )])
            }
        }
    }
}

/// Rows in `(n, k, p)` order regardless of which worker finished first.
pub fn run_sweep(
    ns: &[usize],
    ks: &[usize],
    grid: &[f64],
    criteria: &[SweepCriterion],
    seed: u64,
    tol: &Tolerances,
    threads: usize,
) -> Result<(Vec<Row>, Vec<RowFailure>), CliError> {
    let points: Vec<(usize, usize, f64)> = ns
        .iter()
        .flat_map(|&n| {
            ks.iter()
                .flat_map(move |&k| grid.iter().map(move |&p| (n, k, p)))
        })
        .collect();
    if points.is_empty() {
        return Err(CliError::Input("empty sweep grid".into()));
    }
    if points.len() > MAX_GRID {
        return Err(CliError::Input(format!(
            "{} grid points exceed the limit of {MAX_GRID}",
            points.len()
        )));
    }
    if let Some(&n) = ns.iter().find(|&&n| n < 2) {
        return Err(CliError::Input(format!("--n must be at least 2, got {n}")));
    }
    if ks.contains(&0) {
        return Err(CliError::Input("--k must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Input(format!("thread pool: {e}")))?;
    let results: Vec<_> = pool.install(|| {
        points
            .par_iter()
            .map(|&(n, k, p)| point_rows(n, k, p, criteria, seed, tol))
            .collect()
    });
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (r, f) in results {
        rows.extend(r);
        failures.extend(f);
    }
    Ok((rows, failures))
}

pub fn write_csv<W: std::io::Write>(rows: &[Row], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::Input(e.to_string());
    w.write_record(HEADER).map_err(io)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.k.to_string(),
            fmt_f64(r.p),
            r.criterion.to_string(),
            r.cut.clone(),
            r.value.map(fmt_f64).unwrap_or_default(),
            r.verdict.clone(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        let g = parse_grid("0.30:0.60:0.05").unwrap();
        assert_eq!(g.len(), 7);
        assert_eq!(g[1], 0.35);
        assert_eq!(parse_grid("0.5,0.1").unwrap(), vec![0.1, 0.5]);
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("0.5,1.5").is_err());
    }
}
