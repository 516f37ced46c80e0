//! State specifications: `name:params[^k]` strings, inline JSON, or `@file.json`.

use gmelab::states::{
    copies_with_cap, ghz, isotropic_state, max_entangled_qubit, pen_state, star_pen,
    IsotropicVisibility, PenGraph,
};
use gmelab::tensor::{ComplexMatrix, DensityMatrix, Factor, SubsystemLayout, C64};
use gmelab::Tolerances;
use serde::{Deserialize, Serialize};

use crate::report::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum StateSpec {
    Constructor {
        name: String,
        params: Vec<f64>,
        copies: usize,
    },
    Dense(DenseState),
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseFactor {
    pub dimension: usize,
    pub party: usize,
    #[serde(default = "one")]
    pub copy: usize,
    #[serde(default)]
    pub slot: usize,
}

/// Row-major entries as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseState {
    pub layout: Vec<DenseFactor>,
    pub entries: Vec<[f64; 2]>,
}

impl DenseState {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let layout = rho
            .layout()
            .factors()
            .iter()
            .map(|f| DenseFactor {
                dimension: f.dimension,
                party: f.party,
                copy: f.copy,
                slot: f.slot,
            })
            .collect();
        let entries = rho.matrix().data().iter().map(|z| [z.re, z.im]).collect();
        Self { layout, entries }
    }

    fn build(&self, tol: &Tolerances) -> Result<DensityMatrix, CliError> {
        let factors = self
            .layout
            .iter()
            .map(|f| {
                Factor::new(f.dimension, f.party)
                    .with_copy(f.copy)
                    .with_slot(f.slot)
            })
            .collect();
        let layout = SubsystemLayout::new(factors)?;
        let d = layout.total_dimension();
        if d > tol.dimension_cap {
            return Err(CliError::Input(format!(
                "dimension {d} exceeds cap {}",
                tol.dimension_cap
            )));
        }
        let data = self
            .entries
            .iter()
            .map(|&[re, im]| C64::new(re, im))
            .collect();
        let m = ComplexMatrix::from_vec(d, d, data)?;
        Ok(DensityMatrix::new_with(m, layout, tol)?)
    }
}

impl StateSpec {
    /// Accepts `name[:a[:b…]][^k]`, a JSON object, or `@path` to a JSON file.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let text = text.trim();
        if let Some(path) = text.strip_prefix('@') {
            let body = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("{path}: {e}")))?;
            return Self::from_json(&body);
        }
        if text.starts_with('{') {
            return Self::from_json(text);
        }
        let (body, k) = match text.split_once('^') {
            Some((b, k)) => (
                b,
                k.parse()
                    .map_err(|_| CliError::Input(format!("bad copy count {k:?}")))?,
            ),
            None => (text, 1),
        };
        let mut parts = body.split(':');
        let name = parts.next().unwrap_or_default().to_string();
        let mut params = Vec::new();
        for part in parts {
            if name == "pen" && part.contains('=') {
                for edge in part.split(',') {
                    params.extend(parse_edge(edge)?);
                }
            } else {
                params.push(
                    part.parse()
                        .map_err(|_| CliError::Input(format!("bad parameter {part:?}")))?,
                );
            }
        }
        Ok(Self::Constructor {
            name,
            params,
            copies: k,
        })
    }

    fn from_json(body: &str) -> Result<Self, CliError> {
        let bad = |e: serde_json::Error| CliError::Input(format!("state spec: {e}"));
        let v: serde_json::Value = serde_json::from_str(body).map_err(bad)?;
        // untagged derives cannot read arbitrary-precision numbers, so pick the form by its keys
        if v.get("layout").is_some() {
            Ok(Self::Dense(serde_json::from_value(v).map_err(bad)?))
        } else {
            #[derive(Deserialize)]
            struct Named {
                name: String,
                #[serde(default)]
                params: Vec<f64>,
                #[serde(default = "one")]
                copies: usize,
            }
            let n: Named = serde_json::from_value(v).map_err(bad)?;
            Ok(Self::Constructor {
                name: n.name,
                params: n.params,
                copies: n.copies,
            })
        }
    }

    pub fn build(&self, tol: &Tolerances) -> Result<DensityMatrix, CliError> {
        match self {
            Self::Dense(d) => d.build(tol),
            Self::Constructor {
                name,
                params,
                copies,
            } => {
                let base = constructor(name, params)?;
                Ok(copies_with_cap(&base, *copies, tol.dimension_cap)?)
            }
        }
    }
}

/// `a-b=p` into `[a, b, p]`.
fn parse_edge(edge: &str) -> Result<[f64; 3], CliError> {
    let bad = || CliError::Input(format!("bad edge {edge:?}, expected a-b=p"));
    let (ends, p) = edge.split_once('=').ok_or_else(bad)?;
    let (a, b) = ends.split_once('-').ok_or_else(bad)?;
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    Ok([num(a)?, num(b)?, num(p)?])
}

fn count(x: f64, what: &str) -> Result<usize, CliError> {
    if x.fract() != 0.0 || x < 0.0 {
        return Err(CliError::Input(format!(
            "{what} must be a non-negative integer, got {x}"
        )));
    }
    Ok(x as usize)
}

fn arity(name: &str, params: &[f64], want: usize) -> Result<(), CliError> {
    if params.len() != want {
        return Err(CliError::Input(format!(
            "{name} takes {want} parameter(s), got {}",
            params.len()
        )));
    }
    Ok(())
}

fn constructor(name: &str, params: &[f64]) -> Result<DensityMatrix, CliError> {
    match name {
        "isotropic" => {
            arity(name, params, 1)?;
            Ok(isotropic_state(params[0])?)
        }
        "ghz" => {
            arity(name, params, 1)?;
            Ok(ghz(count(params[0], "party count")?)?)
        }
        "bell" => {
            arity(name, params, 0)?;
            Ok(max_entangled_qubit())
        }
        "maximally_mixed" => {
            arity(name, params, 1)?;
            let n = count(params[0], "qubit count")?;
            if n == 0 {
                return Err(CliError::Input("maximally_mixed needs at least one qubit".into()));
            }
            Ok(DensityMatrix::maximally_mixed(SubsystemLayout::qubits(n)))
        }
        "star_pen" => {
            arity(name, params, 2)?;
            Ok(star_pen(count(params[0], "party count")?, IsotropicVisibility::new(params[1])?)?)
        }
        "pen" => {
            if params.is_empty() || (params.len() - 1) % 3 != 0 {
                return Err(CliError::Input("pen takes n followed by a-b=p edges".into()));
            }
            let n = count(params[0], "vertex count")?;
            let edges = params[1..]
                .chunks(3)
                .map(|c| Ok((count(c[0], "vertex")?, count(c[1], "vertex")?, c[2])))
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(pen_state(&PenGraph::isotropic(n, &edges)?)?)
        }
        other => Err(CliError::Input(format!(
            "unknown state {other:?}; expected isotropic, ghz, star_pen, pen, bell or maximally_mixed"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructor_strings() {
        let s = StateSpec::parse("isotropic:0.5^2").unwrap();
        assert_eq!(
            s,
            StateSpec::Constructor {
                name: "isotropic".into(),
                params: vec![0.5],
                copies: 2
            }
        );
        assert_eq!(s.build(&Tolerances::DEFAULT).unwrap().dim(), 16);
        let s = StateSpec::parse("pen:3:1-2=0.5,2-3=0.4").unwrap();
        assert_eq!(s.build(&Tolerances::DEFAULT).unwrap().dim(), 16);
        assert!(StateSpec::parse("isotropic:1.5")
            .unwrap()
            .build(&Tolerances::DEFAULT)
            .is_err());
        assert!(StateSpec::parse("nope")
            .unwrap()
            .build(&Tolerances::DEFAULT)
            .is_err());
    }

    #[test]
    fn json_constructor_form() {
        let s = StateSpec::parse(r#"{"name": "ghz", "params": [3]}"#).unwrap();
        assert_eq!(s.build(&Tolerances::DEFAULT).unwrap().dim(), 8);
    }
}
