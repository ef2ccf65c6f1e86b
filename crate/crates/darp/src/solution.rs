//! Solutions and their text and JSON forms.
//!
//! Text form, times and objective unscaled with two decimals:
//!
//! ```text
//! instance pr01
//! variant darp
//! objective 190.02
//! vehicle 1: 0@0.00 3@12.41 27@30.00 0@61.25
//! ```
//!
//! Visits are file ids; the depot appears at both ends of every vehicle.

use std::fmt::Write as _;

use seqcp::Node;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{scale, unscale, Instance, NodeKind};
use crate::model::Variant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Visit {
    /// Internal node id.
    pub node: Node,
    /// Scaled start of service.
    pub time: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub instance: String,
    pub variant: Variant,
    /// Scaled total distance.
    pub objective: i64,
    /// One route per vehicle, from its start to its end node.
    pub routes: Vec<Vec<Visit>>,
}

#[derive(Debug, Error)]
pub enum SolutionParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Serialize, Deserialize)]
struct JsonVisit {
    node: Node,
    file_id: i64,
    time: f64,
    time_scaled: i64,
}

#[derive(Serialize, Deserialize)]
struct JsonSolution {
    instance: String,
    variant: Variant,
    objective: f64,
    objective_scaled: i64,
    vehicles: Vec<Vec<JsonVisit>>,
}

impl Solution {
    pub fn objective_unscaled(&self) -> f64 {
        unscale(self.objective)
    }

    pub fn to_text(&self, inst: &Instance) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "instance {}", self.instance);
        let _ = writeln!(out, "variant {}", self.variant.name());
        let _ = writeln!(out, "objective {:.2}", unscale(self.objective));
        for (k, route) in self.routes.iter().enumerate() {
            let _ = write!(out, "vehicle {}:", k + 1);
            for v in route {
                let _ = write!(out, " {}@{:.2}", inst.site(v.node).file_id, unscale(v.time));
            }
            out.push('\n');
        }
        out
    }

    /// Reads the text form back; file ids are mapped to internal nodes
    /// through `inst`.
    pub fn from_text(inst: &Instance, text: &str) -> Result<Solution, SolutionParseError> {
        let err = |line: usize, msg: String| SolutionParseError::Syntax { line, msg };
        let layout = inst.layout();
        let mut instance = String::new();
        let mut variant = Variant::Darp;
        let mut objective = None;
        let mut routes = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let raw = raw.trim();
            if raw.is_empty() || raw.starts_with('#') {
                continue;
            }
            let (key, rest) = raw.split_once(char::is_whitespace).unwrap_or((raw, ""));
            let rest = rest.trim();
            match key {
                "instance" => instance = rest.to_string(),
                "variant" => {
                    variant = match rest {
                        "darp" => Variant::Darp,
                        "pdptw" => Variant::Pdptw,
                        "pdp" => Variant::Pdp,
                        other => return Err(err(line, format!("unknown variant {other:?}"))),
                    }
                }
                "objective" => {
                    let x: f64 = rest.parse().map_err(|_| err(line, format!("bad objective {rest:?}")))?;
                    objective = Some(scale(x));
                }
                "vehicle" => {
                    let k = routes.len();
                    if k >= layout.vehicles {
                        return Err(err(line, format!("more than {} vehicles", layout.vehicles)));
                    }
                    let (_, visits) = rest.split_once(':').ok_or_else(|| err(line, "missing ':'".into()))?;
                    let tokens: Vec<&str> = visits.split_whitespace().collect();
                    let mut route = Vec::with_capacity(tokens.len());
                    for (pos, tok) in tokens.iter().enumerate() {
                        let (id, t) = tok.split_once('@').ok_or_else(|| err(line, format!("bad visit {tok:?}")))?;
                        let id: i64 = id.parse().map_err(|_| err(line, format!("bad node id {id:?}")))?;
                        let t: f64 = t.parse().map_err(|_| err(line, format!("bad time {t:?}")))?;
                        let node = if id == inst.depot.file_id || id == 2 * layout.requests as i64 + 1 {
                            if pos == 0 {
                                layout.start(k)
                            } else if pos + 1 == tokens.len() {
                                layout.end(k)
                            } else {
                                return Err(err(line, "depot inside a route".into()));
                            }
                        } else {
                            inst.node_of_file_id(id).ok_or_else(|| err(line, format!("unknown node id {id}")))?
                        };
                        route.push(Visit { node, time: scale(t) });
                    }
                    routes.push(route);
                }
                other => return Err(err(line, format!("unknown key {other:?}"))),
            }
        }
        let objective = objective.ok_or_else(|| err(0, "missing objective line".into()))?;
        Ok(Solution { instance, variant, objective, routes })
    }

    pub fn to_json(&self, inst: &Instance) -> String {
        let js = JsonSolution {
            instance: self.instance.clone(),
            variant: self.variant,
            objective: unscale(self.objective),
            objective_scaled: self.objective,
            vehicles: self
                .routes
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|v| JsonVisit {
                            node: v.node,
                            file_id: inst.site(v.node).file_id,
                            time: unscale(v.time),
                            time_scaled: v.time,
                        })
                        .collect()
                })
                .collect(),
        };
        serde_json::to_string_pretty(&js).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Solution, SolutionParseError> {
        let js: JsonSolution = serde_json::from_str(text)?;
        Ok(Solution {
            instance: js.instance,
            variant: js.variant,
            objective: js.objective_scaled,
            routes: js
                .vehicles
                .into_iter()
                .map(|r| r.into_iter().map(|v| Visit { node: v.node, time: v.time_scaled }).collect())
                .collect(),
        })
    }

    /// Reads either form, JSON when the text starts with `{`.
    pub fn read(inst: &Instance, text: &str) -> Result<Solution, SolutionParseError> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::from_text(inst, text)
        }
    }

    /// Served requests, in order of first appearance.
    pub fn served(&self, inst: &Instance) -> Vec<usize> {
        let l = inst.layout();
        self.routes
            .iter()
            .flatten()
            .filter_map(|v| match l.kind(v.node) {
                NodeKind::Pickup(i) => Some(i),
                _ => None,
            })
            .collect()
    }
}
