//! Two-step flows: composition, extraction and the flow-level axioms.

use std::collections::HashMap;

use num_traits::Zero;

use crate::dag::Dag;
use crate::error::{Error, Result};
use crate::flow::{check_flow, Flow};
use crate::product::{Hypercube, ProductDigraph};
use crate::rational::{format_q, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub edges: Vec<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomCheck {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl AxiomCheck {
    fn ok() -> AxiomCheck {
        AxiomCheck {
            holds: true,
            witness: None,
        }
    }

    fn fail(edges: Vec<usize>, detail: String) -> AxiomCheck {
        AxiomCheck {
            holds: false,
            witness: Some(Witness { edges, detail }),
        }
    }
}

fn domain<D: Dag + ?Sized>(d: &D, f: &Flow, what: &str) -> Result<()> {
    if f.len() != d.edge_count() {
        return Err(Error::DomainMismatch(format!(
            "{what}: {} weights for {} edges",
            f.len(),
            d.edge_count()
        )));
    }
    Ok(())
}

fn require_unitary<D: Dag + ?Sized>(d: &D, f: &Flow, what: &str) -> Result<()> {
    let r = check_flow(d, f)?;
    if !r.is_unitary {
        return Err(Error::NotUnitary(format!(
            "{what} (value {}, {} conservation violations)",
            format_q(&r.value),
            r.violations.len()
        )));
    }
    Ok(())
}

/// `Λ(K_{S,K_q}, K_{S,K'_q}) = Λ_M(R_{S\q}, R_S)·Λ^q(K_q, K'_q)`, zero elsewhere.
pub fn compose_two_step_flow(
    pd: &ProductDigraph,
    lambda_m: &Flow,
    factor_flows: &[Flow],
) -> Result<Flow> {
    let h = Hypercube::new(pd.m())?;
    require_unitary(h.digraph(), lambda_m, "hypercube flow")?;
    if factor_flows.len() != pd.m() {
        return Err(Error::DomainMismatch(format!(
            "{} factor flows for {} blocks",
            factor_flows.len(),
            pd.m()
        )));
    }
    for (q, ff) in factor_flows.iter().enumerate() {
        require_unitary(pd.factor(q), ff, &format!("factor flow of block {}", q + 1))?;
    }
    let weights = (0..pd.edge_count())
        .map(|e| match pd.layer_of(e) {
            Some((s, q)) => {
                &lambda_m.weights[h.edge(s, q)] * &factor_flows[q].weights[pd.edge(e).factor_edge]
            }
            None => Q::zero(),
        })
        .collect();
    Ok(Flow::new(weights))
}

/// Hypercube aggregate of `f`, no precondition checks.
pub fn hypercube_aggregate(pd: &ProductDigraph, h: &Hypercube, f: &Flow) -> Flow {
    let hd = h.digraph();
    let weights = (0..hd.edge_count())
        .map(|he| {
            let (s, q) = h.edge_label(he);
            pd.factor(q)
                .out_edges(0)
                .iter()
                .map(|&fe| &f.weights[pd.layer_edge(s, q, fe)])
                .sum()
        })
        .collect();
    Flow::new(weights)
}

/// Recover `Λ_M` from a two-step flow.
pub fn extract_hypercube_flow(pd: &ProductDigraph, f: &Flow) -> Result<Flow> {
    let r = check_flow(pd, f)?;
    if !r.is_unitary {
        return Err(Error::AxiomViolated("input flow is not unitary".into()));
    }
    let nf = check_null_flow_nonrelevant(pd, f)?;
    if let Some(w) = nf.witness {
        return Err(Error::AxiomViolated(w.detail));
    }
    let h = Hypercube::new(pd.m())?;
    Ok(hypercube_aggregate(pd, &h, f))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorExtraction {
    pub flow: Flow,
    /// The `S*` used, as a mask over 0-based blocks.
    pub s_star: u64,
    /// False if another admissible `S` would give a different factor flow.
    pub s_star_independent: bool,
}

/// Recover `Λ^q` by dividing the layer of the smallest admissible `S*`.
pub fn extract_factor_flow(pd: &ProductDigraph, f: &Flow, q: usize) -> Result<FactorExtraction> {
    domain(pd, f, "flow")?;
    if q >= pd.m() {
        return Err(Error::DomainMismatch(format!(
            "block {} does not exist",
            q + 1
        )));
    }
    let h = Hypercube::new(pd.m())?;
    let agg = hypercube_aggregate(pd, &h, f);
    let mut layers: Vec<u64> = (0..1u64 << pd.m()).filter(|s| s >> q & 1 == 1).collect();
    layers.sort_by_key(|s| (s.count_ones(), *s));
    let factor = pd.factor(q);
    let s_star = layers
        .iter()
        .copied()
        .find(|&s| !agg.weights[h.edge(s, q)].is_zero())
        .ok_or(Error::NoNonzeroWitness(q + 1))?;
    let denom = agg.weights[h.edge(s_star, q)].clone();
    let flow = Flow::new(
        (0..factor.edge_count())
            .map(|fe| &f.weights[pd.layer_edge(s_star, q, fe)] / &denom)
            .collect(),
    );
    let s_star_independent = layers.iter().all(|&s| {
        let lm = &agg.weights[h.edge(s, q)];
        (0..factor.edge_count())
            .all(|fe| f.weights[pd.layer_edge(s, q, fe)] == lm * &flow.weights[fe])
    });
    Ok(FactorExtraction {
        flow,
        s_star,
        s_star_independent,
    })
}

/// Zero weight on every edge that is not relevant.
pub fn check_null_flow_nonrelevant(pd: &ProductDigraph, f: &Flow) -> Result<AxiomCheck> {
    domain(pd, f, "flow")?;
    for (e, pe) in pd.edges().iter().enumerate() {
        let relevant = pd.is_relevant_vertex(pe.tail) && pd.is_relevant_vertex(pe.head);
        if !relevant && !f.weights[e].is_zero() {
            return Ok(AxiomCheck::fail(
                vec![e],
                format!(
                    "non-relevant edge {} -> {} carries {}",
                    pd.profile(pe.tail),
                    pd.profile(pe.head),
                    format_q(&f.weights[e])
                ),
            ));
        }
    }
    Ok(AxiomCheck::ok())
}

/// All 2×2 minors of the (layer S) × (factor edge) matrix vanish, for each block.
pub fn check_flow_proportionality(pd: &ProductDigraph, f: &Flow) -> Result<AxiomCheck> {
    domain(pd, f, "flow")?;
    for q in 0..pd.m() {
        let layers: Vec<u64> = (0..1u64 << pd.m()).filter(|s| s >> q & 1 == 1).collect();
        let fes = pd.factor(q).edge_count();
        let ids: Vec<Vec<usize>> = layers
            .iter()
            .map(|&s| (0..fes).map(|fe| pd.layer_edge(s, q, fe)).collect())
            .collect();
        let w = |r: usize, c: usize| &f.weights[ids[r][c]];
        for r1 in 0..layers.len() {
            for r2 in r1 + 1..layers.len() {
                for a in 0..fes {
                    for b in a + 1..fes {
                        if w(r1, a) * w(r2, b) != w(r2, a) * w(r1, b) {
                            return Ok(AxiomCheck::fail(
                                vec![ids[r1][a], ids[r2][b], ids[r2][a], ids[r1][b]],
                                format!(
                                    "block {}: layers {:#b} and {:#b} are not proportional",
                                    q + 1,
                                    layers[r1],
                                    layers[r2]
                                ),
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(AxiomCheck::ok())
}

fn require_power_sets(pd: &ProductDigraph) -> Result<()> {
    match (0..pd.m()).find(|&q| !pd.system(q).is_power_set()) {
        Some(q) => Err(Error::NotPowerSet(q + 1)),
        None => Ok(()),
    }
}

/// Weight of `((K_q, K_{-q}), (K_q ∪ i, K_{-q}))` depends only on `q`, `K_{-q}` and `|K_q|`.
///
/// Permutations of `P_q` act transitively on the pairs `(K_q, i)` with a fixed
/// `|K_q|`, so this is the same statement as invariance under every `σ_q`.
pub fn check_intracoalitional_anonymity(pd: &ProductDigraph, f: &Flow) -> Result<AxiomCheck> {
    require_power_sets(pd)?;
    domain(pd, f, "flow")?;
    let mut seen: HashMap<(usize, usize, u32), usize> = HashMap::new();
    for (e, pe) in pd.edges().iter().enumerate() {
        let rest = pd.with_coord(pe.tail, pe.q, 0);
        let k = pd.factor(pe.q).vertex(pd.coord(pe.tail, pe.q)).len();
        match seen.get(&(pe.q, rest, k)) {
            None => {
                seen.insert((pe.q, rest, k), e);
            }
            Some(&e0) if f.weights[e0] != f.weights[e] => {
                return Ok(AxiomCheck::fail(
                    vec![e0, e],
                    format!(
                        "edges {} -> {} and {} -> {} differ",
                        pd.profile(pd.edge(e0).tail),
                        pd.profile(pd.edge(e0).head),
                        pd.profile(pe.tail),
                        pd.profile(pe.head)
                    ),
                ));
            }
            _ => {}
        }
    }
    Ok(AxiomCheck::ok())
}

/// `Σ_{i∈P_q} Λ(K_{S\q}, K_{S,{i}})` depends only on `|S|`.
pub fn check_coalitional_anonymity(pd: &ProductDigraph, f: &Flow) -> Result<AxiomCheck> {
    require_power_sets(pd)?;
    domain(pd, f, "flow")?;
    let mut seen: HashMap<u32, (u64, usize, Q)> = HashMap::new();
    for q in 0..pd.m() {
        for s in (0..1u64 << pd.m()).filter(|s| s >> q & 1 == 1) {
            let edges: Vec<usize> = pd
                .factor(q)
                .out_edges(0)
                .iter()
                .map(|&fe| pd.layer_edge(s, q, fe))
                .collect();
            let total: Q = edges.iter().map(|&e| &f.weights[e]).sum();
            match seen.get(&s.count_ones()) {
                None => {
                    seen.insert(s.count_ones(), (s, q, total));
                }
                Some((s0, q0, t0)) if *t0 != total => {
                    return Ok(AxiomCheck::fail(
                        edges,
                        format!(
                            "aggregate {} for (S={:#b}, q={}) vs {} for (S={:#b}, q={})",
                            format_q(&total),
                            s,
                            q + 1,
                            format_q(t0),
                            s0,
                            q0 + 1
                        ),
                    ));
                }
                _ => {}
            }
        }
    }
    Ok(AxiomCheck::ok())
}
