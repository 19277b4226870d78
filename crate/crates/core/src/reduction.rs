//! From coalition profiles to coalitions: reachable coalitions and induced values.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use crate::coalition::Coalition;
use crate::dag::{AgentDigraph, Dag};
use crate::error::{Error, Result};
use crate::flow::Flow;
use crate::game::{flow_method_value, Game, PayoffVector};
use crate::product::{ProductDigraph, Profile};
use crate::rational::{format_q, Q};

pub fn union_map(p: &Profile) -> Coalition {
    p.0.iter().fold(Coalition::EMPTY, |a, &k| a.union(k))
}

/// `F⁰` with the digraph `Γ*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachableSystem {
    n: u32,
    /// Canonical order.
    pub coalitions: Vec<Coalition>,
    /// Pairs of indices into `coalitions`, sorted.
    pub star_edges: Vec<(usize, usize)>,
    /// One product edge per star edge.
    pub witness: Vec<usize>,
    /// Product vertex → index of its union.
    pub vertex_map: Vec<usize>,
}

impl ReachableSystem {
    pub fn index_of(&self, r: Coalition) -> Option<usize> {
        self.coalitions
            .binary_search_by_key(&r.canonical_key(), |c| c.canonical_key())
            .ok()
    }

    pub fn find_star_edge(&self, r: Coalition, r2: Coalition) -> Option<usize> {
        let key = (self.index_of(r)?, self.index_of(r2)?);
        self.star_edges.binary_search(&key).ok()
    }

    /// Covering pairs of `(F⁰, ⊆)`, as coalition pairs.
    pub fn covering_pairs(&self) -> Vec<(Coalition, Coalition)> {
        let f = &self.coalitions;
        let mut out = Vec::new();
        for (i, &a) in f.iter().enumerate() {
            for &b in &f[i + 1..] {
                if a.is_proper_subset(b)
                    && !f
                        .iter()
                        .any(|&k| a.is_proper_subset(k) && k.is_proper_subset(b))
                {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn star_pairs(&self) -> Vec<(Coalition, Coalition)> {
        self.star_edges
            .iter()
            .map(|&(a, b)| (self.coalitions[a], self.coalitions[b]))
            .collect()
    }
}

impl Dag for ReachableSystem {
    fn vertex_count(&self) -> usize {
        self.coalitions.len()
    }
    fn arcs(&self) -> &[(usize, usize)] {
        &self.star_edges
    }
}

impl AgentDigraph for ReachableSystem {
    fn agents(&self) -> Coalition {
        Coalition::full(self.n)
    }
    fn movers(&self, e: usize) -> Coalition {
        let (a, b) = self.star_edges[e];
        self.coalitions[b].difference(self.coalitions[a])
    }
}

pub fn reachable_system(pd: &ProductDigraph) -> ReachableSystem {
    let unions: Vec<Coalition> = (0..pd.vertex_count()).map(|v| pd.union_of(v)).collect();
    let mut coalitions = unions.clone();
    coalitions.sort_by_key(|c| c.canonical_key());
    coalitions.dedup();
    let pos: HashMap<Coalition, usize> = coalitions
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, i))
        .collect();
    let vertex_map: Vec<usize> = unions.iter().map(|u| pos[u]).collect();
    let mut star: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (e, pe) in pd.edges().iter().enumerate() {
        let (a, b) = (vertex_map[pe.tail], vertex_map[pe.head]);
        if a != b {
            star.entry((a, b)).or_insert(e);
        }
    }
    ReachableSystem {
        n: pd.n(),
        coalitions,
        star_edges: star.keys().copied().collect(),
        witness: star.values().copied().collect(),
        vertex_map,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionReport {
    pub holds: bool,
    /// First violating edge in canonical edge order.
    pub counterexample: Option<usize>,
    pub violations: Vec<usize>,
}

/// Each edge has `u(K) = u(K')` or `u(K') \ u(K) = K'_q \ K_q`.
pub fn check_reduction_condition(pd: &ProductDigraph) -> ConditionReport {
    let violations: Vec<usize> = pd
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, pe)| {
            let (u, u2) = (pd.union_of(pe.tail), pd.union_of(pe.head));
            u != u2 && u2.difference(u) != pe.movers
        })
        .map(|(e, _)| e)
        .collect();
    ConditionReport {
        holds: violations.is_empty(),
        counterexample: violations.first().copied(),
        violations,
    }
}

/// `v*(K) = v0(u(K))`.
pub fn lift_game(pd: &ProductDigraph, v0: &BTreeMap<Coalition, Q>) -> Result<Game> {
    let mut worth = Vec::with_capacity(pd.vertex_count());
    for v in 0..pd.vertex_count() {
        let u = pd.union_of(v);
        match v0.get(&u) {
            Some(x) => worth.push(x.clone()),
            None if u.is_empty() => worth.push(Q::zero()),
            None => return Err(Error::MissingWorth(u.to_string())),
        }
    }
    Game::new(pd, worth)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedValue {
    pub pay: PayoffVector,
    pub system: ReachableSystem,
    /// Indexed by star edge.
    pub star_flow: Flow,
}

pub fn induced_value(
    pd: &ProductDigraph,
    f: &Flow,
    v0: &BTreeMap<Coalition, Q>,
) -> Result<InducedValue> {
    let cond = check_reduction_condition(pd);
    if let Some(e) = cond.counterexample {
        let pe = pd.edge(e);
        return Err(Error::ConditionViolated(format!(
            "{} -> {}",
            pd.profile(pe.tail),
            pd.profile(pe.head)
        )));
    }
    let g = lift_game(pd, v0)?;
    let pay = flow_method_value(pd, &g, f)?;
    let system = reachable_system(pd);
    let mut star_flow = Flow::zero(system.star_edges.len());
    for (e, pe) in pd.edges().iter().enumerate() {
        let (a, b) = (system.vertex_map[pe.tail], system.vertex_map[pe.head]);
        if a != b {
            let k = system.star_edges.binary_search(&(a, b)).expect("star edge");
            star_flow.weights[k] += &f.weights[e];
        }
    }
    Ok(InducedValue {
        pay,
        system,
        star_flow,
    })
}

/// Human-readable form of a star edge, for reports.
pub fn describe_star_edge(rs: &ReachableSystem, k: usize, f: Option<&Flow>) -> String {
    let (a, b) = rs.star_edges[k];
    match f {
        Some(f) => format!(
            "{} -> {} : {}",
            rs.coalitions[a],
            rs.coalitions[b],
            format_q(&f.weights[k])
        ),
        None => format!("{} -> {}", rs.coalitions[a], rs.coalitions[b]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::check_flow;
    use crate::product::build_product;
    use crate::rational::int;
    use crate::set_system::{uniform_path_flow, validate_set_system, SetSystem};
    use crate::values::az_flow;

    fn c(a: &[u32]) -> Coalition {
        Coalition::of(a)
    }

    fn example1() -> ProductDigraph {
        let f1 = validate_set_system(c(&[1, 2, 3]), &[c(&[]), c(&[1]), c(&[2, 3]), c(&[1, 2, 3])])
            .unwrap();
        let f2 = validate_set_system(c(&[3, 4, 5]), &[c(&[]), c(&[3, 4]), c(&[3, 4, 5])]).unwrap();
        build_product(&[f1, f2], 5).unwrap()
    }

    #[test]
    fn unions() {
        assert_eq!(
            union_map(&Profile(vec![c(&[2, 3]), c(&[3, 4, 5])])),
            c(&[2, 3, 4, 5])
        );
        assert_eq!(union_map(&Profile(vec![c(&[]), c(&[])])), Coalition::EMPTY);
    }

    #[test]
    fn example1_reduction() {
        let pd = example1();
        let rs = reachable_system(&pd);
        assert_eq!(rs.coalitions.len(), 12);
        assert!(rs.index_of(c(&[2, 3, 4, 5])).is_some());
        assert!(rs.find_star_edge(c(&[1, 3, 4]), c(&[1, 3, 4, 5])).is_some());
        let cond = check_reduction_condition(&pd);
        assert!(!cond.holds);
        let t = pd.find_profile(&Profile(vec![c(&[2, 3]), c(&[])])).unwrap();
        let h = pd
            .find_profile(&Profile(vec![c(&[2, 3]), c(&[3, 4])]))
            .unwrap();
        assert!(cond.violations.contains(&pd.find_edge(t, h).unwrap()));
        let v0: BTreeMap<Coalition, Q> = rs
            .coalitions
            .iter()
            .map(|&r| (r, int(r.len() as i64)))
            .collect();
        let f = crate::two_step::compose_two_step_flow(
            &pd,
            &crate::values::shapley_hypercube_flow(&crate::product::Hypercube::new(2).unwrap()),
            &pd.factors()
                .iter()
                .map(uniform_path_flow)
                .collect::<Vec<_>>(),
        )
        .unwrap();
        assert!(matches!(
            induced_value(&pd, &f, &v0),
            Err(Error::ConditionViolated(_))
        ));
    }

    #[test]
    fn lifted_games() {
        let pd = example1();
        let rs = reachable_system(&pd);
        let mut v0: BTreeMap<Coalition, Q> = rs
            .coalitions
            .iter()
            .map(|&r| (r, int((r == c(&[1, 2, 3, 4, 5])) as i64)))
            .collect();
        let g = lift_game(&pd, &v0).unwrap();
        for v in 0..pd.vertex_count() {
            assert_eq!(
                g.worth[v],
                int((pd.union_of(v) == Coalition::full(5)) as i64)
            );
        }
        assert!(g.worth[0].is_zero());
        v0.remove(&c(&[1, 3, 4]));
        assert!(matches!(lift_game(&pd, &v0), Err(Error::MissingWorth(_))));
    }

    #[test]
    fn partition_reduction() {
        let pd = build_product(
            &[
                SetSystem::power_set(c(&[1, 2])).unwrap(),
                SetSystem::power_set(c(&[3])).unwrap(),
            ],
            3,
        )
        .unwrap();
        assert!(check_reduction_condition(&pd).holds);
        let rs = reachable_system(&pd);
        assert_eq!(rs.coalitions.len(), pd.vertex_count());
        assert_eq!(rs.star_edges.len(), pd.edge_count());
        let v0: BTreeMap<Coalition, Q> = rs
            .coalitions
            .iter()
            .map(|&r| (r, int((r.len() * r.len()) as i64)))
            .collect();
        let iv = induced_value(&pd, &az_flow(&pd).unwrap(), &v0).unwrap();
        assert!(check_flow(&iv.system, &iv.star_flow).unwrap().is_unitary);
        assert_eq!(iv.pay.total(), int(9));
    }

    #[test]
    fn single_block_is_identity() {
        let s = validate_set_system(c(&[1, 2, 3]), &[c(&[]), c(&[1]), c(&[2, 3]), c(&[1, 2, 3])])
            .unwrap();
        let pd = build_product(std::slice::from_ref(&s), 3).unwrap();
        let rs = reachable_system(&pd);
        assert_eq!(rs.coalitions, s.members());
        assert_eq!(rs.star_edges, pd.arcs());
    }
}
