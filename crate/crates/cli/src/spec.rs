//! Spec files: a chart, named observables, named corrections, an optional
//! Stäckel system and a list of designated tasks.

use std::path::Path;

use lbq::corrections::{CorrectionFamily, CorrectionPair};
use lbq::integrability::{momenta, QuadraticObservable, StackelSystem};
use lbq::{Chart, Expr, Parser, ZeroTest};
use serde::Deserialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed spec file: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("{place}: cannot parse `{text}`: {reason}")]
    Expr { place: String, text: String, reason: String },
    #[error("{0}")]
    Invalid(String),
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    name: Option<String>,
    description: Option<String>,
    manifold: RawManifold,
    #[serde(default, rename = "observable")]
    observables: Vec<RawObservable>,
    #[serde(default, rename = "correction")]
    corrections: Vec<RawCorrection>,
    system: Option<RawSystem>,
    simultaneous: Option<RawSimultaneous>,
    #[serde(default, rename = "task")]
    tasks: Vec<Task>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifold {
    coordinates: Vec<String>,
    #[serde(default)]
    parameters: Vec<String>,
    #[serde(default)]
    functions: Vec<String>,
    inverse_metric: Option<Vec<Vec<String>>>,
    diagonal: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObservable {
    name: String,
    #[serde(default)]
    hamiltonian: bool,
    tensor: Option<Vec<Vec<String>>>,
    polynomial: Option<String>,
    #[serde(default = "zero_text")]
    potential: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCorrection {
    name: String,
    observable: Option<String>,
    #[serde(rename = "E")]
    e: String,
    #[serde(rename = "E_K", default = "zero_text")]
    e_k: String,
    #[serde(default)]
    constants: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    observables: Vec<String>,
    #[serde(default)]
    separable: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimultaneous {
    items: Vec<String>,
}

/// Designated run: subcommand arguments after the file, and the exit code it must produce.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Task {
    pub args: Vec<String>,
    pub expect: i32,
    #[serde(default)]
    pub note: String,
}

/// Named correction block: an `(E, E_K)` pair for one observable, or a family.
#[derive(Clone, Debug)]
pub struct NamedCorrection {
    pub name: String,
    pub observable: Option<String>,
    pub pair: CorrectionPair,
    pub constants: Vec<String>,
}

impl NamedCorrection {
    pub fn family(&self) -> CorrectionFamily {
        let refs: Vec<&str> = self.constants.iter().map(String::as_str).collect();
        CorrectionFamily::new(self.pair.e.clone(), &refs)
    }
}

#[derive(Clone, Debug)]
pub struct Spec {
    pub name: String,
    pub description: String,
    pub digest: String,
    pub chart: Chart,
    parser: Parser,
    pub observables: Vec<QuadraticObservable>,
    pub corrections: Vec<NamedCorrection>,
    pub system: Option<(Vec<String>, bool)>,
    pub simultaneous: Vec<String>,
    pub tasks: Vec<Task>,
}

fn zero_text() -> String {
    "0".into()
}

pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Spec {
    pub fn load(path: &Path, seed: u64) -> Result<Spec, SpecError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| SpecError::Io { path: path.display().to_string(), source })?;
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Spec::parse(&text, &stem, seed)
    }

    pub fn parse(text: &str, default_name: &str, seed: u64) -> Result<Spec, SpecError> {
        let raw: RawSpec = toml::from_str(text)?;
        let m = &raw.manifold;
        let parser = Parser::new().with_functions(m.functions.iter().cloned());
        let expr = |place: &str, s: &str| {
            parser.parse(s).map_err(|e| SpecError::Expr { place: place.into(), text: s.into(), reason: e.to_string() })
        };
        let n = m.coordinates.len();
        let rows: Vec<Vec<Expr>> = match (&m.inverse_metric, &m.diagonal) {
            (Some(rows), None) => rows
                .iter()
                .map(|r| r.iter().map(|s| expr("manifold.inverse_metric", s)).collect())
                .collect::<Result<_, _>>()?,
            (None, Some(d)) => {
                if d.len() != n {
                    return Err(SpecError::Invalid(format!("diagonal has {} entries for {n} coordinates", d.len())));
                }
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| if i == j { expr("manifold.diagonal", &d[i]) } else { Ok(Expr::zero()) })
                            .collect()
                    })
                    .collect::<Result<_, _>>()?
            }
            _ => return Err(SpecError::Invalid("manifold needs exactly one of inverse_metric, diagonal".into())),
        };
        let coords: Vec<&str> = m.coordinates.iter().map(String::as_str).collect();
        let params: Vec<&str> = m.parameters.iter().map(String::as_str).collect();
        let zero = ZeroTest::default().with_seed(seed);
        let chart = Chart::with_zero_test(&coords, rows, zero)
            .map_err(|e| SpecError::Invalid(format!("manifold: {e}")))?
            .with_parameters(&params);
        let mut spec = Spec {
            name: raw.name.clone().unwrap_or_else(|| default_name.to_string()),
            description: raw.description.clone().unwrap_or_default(),
            digest: digest(text.as_bytes()),
            chart,
            parser,
            observables: Vec::new(),
            corrections: Vec::new(),
            system: raw.system.as_ref().map(|s| (s.observables.clone(), s.separable)),
            simultaneous: raw.simultaneous.as_ref().map(|s| s.items.clone()).unwrap_or_default(),
            tasks: raw.tasks.clone(),
        };
        for o in &raw.observables {
            let place = format!("observable {}", o.name);
            let potential = spec.expr(&place, &o.potential)?;
            let obs = match (o.hamiltonian, &o.tensor, &o.polynomial) {
                (true, None, None) => QuadraticObservable::hamiltonian(&spec.chart, &o.name, potential),
                (false, Some(rows), None) => {
                    let rows: Vec<Vec<Expr>> = rows
                        .iter()
                        .map(|r| r.iter().map(|s| spec.expr(&place, s)).collect())
                        .collect::<Result<_, _>>()?;
                    QuadraticObservable::new(&o.name, &rows, potential)
                        .map_err(|e| SpecError::Invalid(format!("{place}: {e}")))?
                }
                (false, None, Some(poly)) => {
                    let ps = momenta(&spec.chart);
                    let refs: Vec<&str> = ps.iter().map(String::as_str).collect();
                    QuadraticObservable::from_polynomial(&o.name, &spec.expr(&place, poly)?, &refs)
                        .map_err(|e| SpecError::Invalid(format!("{place}: {e}")))?
                }
                _ => {
                    return Err(SpecError::Invalid(format!(
                        "{place}: give exactly one of hamiltonian, tensor, polynomial"
                    )))
                }
            };
            spec.observables.push(obs);
        }
        for c in &raw.corrections {
            let place = format!("correction {}", c.name);
            if let Some(o) = &c.observable {
                spec.observable(o)?;
            }
            let pair = CorrectionPair::new(spec.expr(&place, &c.e)?, spec.expr(&place, &c.e_k)?);
            spec.corrections.push(NamedCorrection {
                name: c.name.clone(),
                observable: c.observable.clone(),
                pair,
                constants: c.constants.clone(),
            });
        }
        if let Some((names, _)) = &spec.system {
            for n in names {
                spec.observable(n)?;
            }
        }
        for n in &spec.simultaneous {
            let c = spec.correction(n)?;
            if c.observable.is_none() {
                return Err(SpecError::Invalid(format!("simultaneous item `{n}` names no observable")));
            }
        }
        Ok(spec)
    }

    /// Parses an expression in the chart's context. `Sc` stands for the
    /// scalar curvature unless it is a coordinate or parameter.
    pub fn expr(&self, place: &str, s: &str) -> Result<Expr, SpecError> {
        let e = self
            .parser
            .parse(s)
            .map_err(|e| SpecError::Expr { place: place.into(), text: s.into(), reason: e.to_string() })?;
        let taken = self.chart.coord_index("Sc").is_some() || self.chart.parameters().iter().any(|p| &**p == "Sc");
        if !taken && e.depends_on("Sc") {
            return Ok(e.subst("Sc", self.chart.scalar_curvature()).normal());
        }
        Ok(e)
    }

    pub fn observable(&self, name: &str) -> Result<&QuadraticObservable, SpecError> {
        self.observables
            .iter()
            .find(|o| o.name() == name)
            .ok_or_else(|| SpecError::Unknown { kind: "observable", name: name.into() })
    }

    pub fn correction(&self, name: &str) -> Result<&NamedCorrection, SpecError> {
        self.corrections
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| SpecError::Unknown { kind: "correction", name: name.into() })
    }

    /// First natural observable, falling back to the bare metric.
    pub fn hamiltonian(&self) -> QuadraticObservable {
        self.observables
            .iter()
            .find(|o| o.is_natural(&self.chart))
            .cloned()
            .unwrap_or_else(|| QuadraticObservable::hamiltonian(&self.chart, "H", Expr::zero()))
    }

    /// Named correction block, or an inline expression with optional constants.
    pub fn candidate(&self, text: &str, constants: &[String]) -> Result<NamedCorrection, SpecError> {
        if let Ok(c) = self.correction(text) {
            return Ok(c.clone());
        }
        Ok(NamedCorrection {
            name: text.into(),
            observable: None,
            pair: CorrectionPair::new(self.expr("--E", text)?, Expr::zero()),
            constants: constants.to_vec(),
        })
    }

    pub fn stackel_system(&self) -> Result<StackelSystem, SpecError> {
        let (names, separable) = self.system.as_ref().ok_or_else(|| SpecError::Invalid("spec has no [system]".into()))?;
        let obs = names.iter().map(|n| self.observable(n).cloned()).collect::<Result<Vec<_>, _>>()?;
        StackelSystem::new(self.chart.clone(), obs, *separable).map_err(|e| SpecError::Invalid(format!("system: {e}")))
    }
}
