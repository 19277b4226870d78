//! Instance files, flow files and report helpers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::coalition::Coalition;
use crate::dag::Dag;
use crate::error::{Error, Result};
use crate::flow::Flow;
use crate::game::{Game, PayoffVector};
use crate::product::{build_product, ProductDigraph, Profile};
use crate::rational::{format_q, parse_q, to_decimal, Q};
use crate::set_system::{validate_set_system, SetSystem};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Block {
    pub ground: Vec<u32>,
    pub feasible: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameEntry {
    pub profile: Vec<Vec<u32>>,
    pub worth: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoalitionEntry {
    pub coalition: Vec<u32>,
    pub worth: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub n: u32,
    pub blocks: Vec<Block>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub game: Vec<GameEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coalition_game: Option<Vec<CoalitionEntry>>,
}

/// A validated instance.
#[derive(Clone, Debug)]
pub struct Model {
    pub systems: Vec<SetSystem>,
    pub pd: ProductDigraph,
    pub game: Option<Game>,
    pub coalition_game: Option<BTreeMap<Coalition, Q>>,
}

fn at(path: String) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Validation { .. } => e,
        other => Error::Validation {
            path: path.clone(),
            message: format!("{}: {}", other.kind(), other),
        },
    }
}

fn coalition(agents: &[u32], n: u32, path: &str) -> Result<Coalition> {
    if let Some(&a) = agents.iter().find(|&&a| a == 0 || a > n) {
        return Err(Error::Validation {
            path: path.to_string(),
            message: format!("agent {a} is outside 1..={n}"),
        });
    }
    Coalition::from_agents(agents.iter().copied()).map_err(at(path.to_string()))
}

fn agent_list(c: Coalition) -> Vec<u32> {
    c.agents().collect()
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let inst: Instance = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    inst.model()?;
    Ok(inst)
}

pub fn parse_model(text: &str) -> Result<Model> {
    let inst: Instance = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    inst.model()
}

pub fn serialize_instance(inst: &Instance) -> String {
    serde_json::to_string_pretty(inst).expect("instance serializes")
}

impl Instance {
    pub fn model(&self) -> Result<Model> {
        let n = self.n;
        if n == 0 || n > crate::coalition::MAX_AGENTS {
            return Err(Error::Validation {
                path: "n".into(),
                message: format!("must be in 1..=20, got {n}"),
            });
        }
        let mut systems = Vec::new();
        for (q, b) in self.blocks.iter().enumerate() {
            let ground = coalition(&b.ground, n, &format!("blocks[{q}].ground"))?;
            let family = b
                .feasible
                .iter()
                .enumerate()
                .map(|(k, f)| coalition(f, n, &format!("blocks[{q}].feasible[{k}]")))
                .collect::<Result<Vec<_>>>()?;
            systems.push(
                validate_set_system(ground, &family)
                    .map_err(at(format!("blocks[{q}].feasible")))?,
            );
        }
        let pd = build_product(&systems, n).map_err(at("blocks".into()))?;

        let game = if self.game.is_empty() {
            None
        } else {
            let mut worth: Vec<Option<Q>> = vec![None; pd.vertex_count()];
            for (k, entry) in self.game.iter().enumerate() {
                let path = format!("game[{k}].profile");
                if entry.profile.len() != pd.m() {
                    return Err(Error::Validation {
                        path,
                        message: format!("expected {} parts", pd.m()),
                    });
                }
                let parts = entry
                    .profile
                    .iter()
                    .map(|p| coalition(p, n, &path))
                    .collect::<Result<Vec<_>>>()?;
                let v = pd.find_profile(&Profile(parts)).map_err(at(path.clone()))?;
                let x = parse_q(&entry.worth).map_err(at(format!("game[{k}].worth")))?;
                if worth[v].is_some() {
                    return Err(Error::Validation {
                        path,
                        message: format!("duplicate profile {}", pd.profile(v)),
                    });
                }
                worth[v] = Some(x);
            }
            let zero = Q::from_integer(0.into());
            match &worth[0] {
                Some(x) if *x != zero => {
                    return Err(Error::Validation {
                        path: "game".into(),
                        message: "worth of the empty profile must be 0".into(),
                    })
                }
                _ => worth[0] = Some(zero),
            }
            if let Some(v) = worth.iter().position(|w| w.is_none()) {
                return Err(Error::Validation {
                    path: "game".into(),
                    message: format!("missing worth for profile {}", pd.profile(v)),
                });
            }
            Some(Game::new(
                &pd,
                worth.into_iter().map(|w| w.unwrap()).collect(),
            )?)
        };

        let coalition_game = match &self.coalition_game {
            None => None,
            Some(entries) => {
                let mut map = BTreeMap::new();
                for (k, entry) in entries.iter().enumerate() {
                    let path = format!("coalition_game[{k}]");
                    let c = coalition(&entry.coalition, n, &format!("{path}.coalition"))?;
                    let x = parse_q(&entry.worth).map_err(at(format!("{path}.worth")))?;
                    if c.is_empty() && x != Q::from_integer(0.into()) {
                        return Err(Error::Validation {
                            path,
                            message: "worth of ∅ must be 0".into(),
                        });
                    }
                    if map.insert(c, x).is_some() {
                        return Err(Error::Validation {
                            path,
                            message: format!("duplicate coalition {c}"),
                        });
                    }
                }
                Some(map)
            }
        };
        Ok(Model {
            systems,
            pd,
            game,
            coalition_game,
        })
    }

    /// Instance for the given systems and optional game.
    pub fn from_parts(
        n: u32,
        systems: &[SetSystem],
        pd: Option<(&ProductDigraph, &Game)>,
    ) -> Instance {
        let blocks = systems
            .iter()
            .map(|s| Block {
                ground: agent_list(s.ground()),
                feasible: s.members().iter().map(|&c| agent_list(c)).collect(),
            })
            .collect();
        let game = match pd {
            None => Vec::new(),
            Some((pd, g)) => (0..pd.vertex_count())
                .map(|v| GameEntry {
                    profile: pd.profile(v).0.iter().map(|&c| agent_list(c)).collect(),
                    worth: format_q(&g.worth[v]),
                })
                .collect(),
        };
        Instance {
            n,
            blocks,
            game,
            coalition_game: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowEntry {
    pub tail: Vec<Vec<u32>>,
    pub head: Vec<Vec<u32>>,
    pub weight: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowFile {
    pub edges: Vec<FlowEntry>,
}

/// Edges not listed carry 0.
pub fn parse_flow(text: &str, pd: &ProductDigraph) -> Result<Flow> {
    let ff: FlowFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let n = pd.n();
    let mut flow = Flow::zero(pd.edge_count());
    let mut seen = vec![false; pd.edge_count()];
    for (k, entry) in ff.edges.iter().enumerate() {
        let path = format!("edges[{k}]");
        let profile = |parts: &[Vec<u32>]| -> Result<usize> {
            let cs = parts
                .iter()
                .map(|p| coalition(p, n, &path))
                .collect::<Result<Vec<_>>>()?;
            pd.find_profile(&Profile(cs)).map_err(at(path.clone()))
        };
        let (t, h) = (profile(&entry.tail)?, profile(&entry.head)?);
        let e = pd.find_edge(t, h).ok_or_else(|| Error::Validation {
            path: path.clone(),
            message: format!("{} -> {} is not an edge", pd.profile(t), pd.profile(h)),
        })?;
        if seen[e] {
            return Err(Error::Validation {
                path,
                message: "duplicate edge".into(),
            });
        }
        seen[e] = true;
        flow.weights[e] = parse_q(&entry.weight).map_err(at(format!("{path}.weight")))?;
    }
    Ok(flow)
}

pub fn flow_file(pd: &ProductDigraph, f: &Flow) -> FlowFile {
    FlowFile {
        edges: pd
            .edges()
            .iter()
            .zip(&f.weights)
            .map(|(pe, w)| FlowEntry {
                tail: pd
                    .profile(pe.tail)
                    .0
                    .iter()
                    .map(|&c| agent_list(c))
                    .collect(),
                head: pd
                    .profile(pe.head)
                    .0
                    .iter()
                    .map(|&c| agent_list(c))
                    .collect(),
                weight: format_q(w),
            })
            .collect(),
    }
}

/// `{"exact": "p/q", "decimal": x}`
pub fn q_json(x: &Q) -> Value {
    json!({ "exact": format_q(x), "decimal": to_decimal(x) })
}

pub fn payoff_json(p: &PayoffVector) -> Value {
    Value::Array(
        p.pay
            .iter()
            .map(|(i, x)| json!({ "agent": i, "exact": format_q(x), "decimal": to_decimal(x) }))
            .collect(),
    )
}

pub fn product_flow_json(pd: &ProductDigraph, f: &Flow) -> Value {
    Value::Array(
        pd.edges()
            .iter()
            .zip(&f.weights)
            .map(|(pe, w)| {
                json!({
                    "tail": pd.profile(pe.tail).to_string(),
                    "head": pd.profile(pe.head).to_string(),
                    "block": pe.q + 1,
                    "movers": pe.movers.to_string(),
                    "weight": format_q(w),
                    "decimal": to_decimal(w),
                })
            })
            .collect(),
    )
}

pub fn error_json(e: &Error) -> Value {
    let mut obj = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
    if let Error::Validation { path, .. } = e {
        obj["error"]["path"] = json!(path);
    }
    obj
}
