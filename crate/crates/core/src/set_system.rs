//! Set systems, their covering digraphs and path counts.

use crate::coalition::Coalition;
use crate::dag::{AgentDigraph, Dag};
use crate::error::{Error, Result};
use crate::flow::Flow;
use crate::rational::from_u128;

/// A normal set system over `ground`, members in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetSystem {
    ground: Coalition,
    members: Vec<Coalition>,
}

pub fn validate_set_system(ground: Coalition, family: &[Coalition]) -> Result<SetSystem> {
    if ground.is_empty() {
        return Err(Error::NotNormal("ground is empty".into()));
    }
    for &k in family {
        if !k.is_subset(ground) {
            return Err(Error::OutOfGround {
                member: k.to_string(),
                ground: ground.to_string(),
            });
        }
    }
    let mut members = family.to_vec();
    members.sort_by_key(|c| c.canonical_key());
    members.dedup();
    if members.first() != Some(&Coalition::EMPTY) {
        return Err(Error::NotNormal("∅ is missing".into()));
    }
    if members.last() != Some(&ground) {
        return Err(Error::NotNormal(format!("ground {ground} is missing")));
    }
    Ok(SetSystem { ground, members })
}

impl SetSystem {
    pub fn power_set(ground: Coalition) -> Result<SetSystem> {
        validate_set_system(ground, &ground.subsets())
    }

    pub fn ground(&self) -> Coalition {
        self.ground
    }

    pub fn members(&self) -> &[Coalition] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn index_of(&self, k: Coalition) -> Option<usize> {
        self.members
            .binary_search_by_key(&k.canonical_key(), |c| c.canonical_key())
            .ok()
    }

    pub fn contains(&self, k: Coalition) -> bool {
        self.index_of(k).is_some()
    }

    pub fn is_power_set(&self) -> bool {
        self.members.len() as u64 == 1u64 << self.ground.len()
    }
}

/// Hasse diagram of `(F, ⊆)`. Vertex `i` is `members[i]`; ∅ is vertex 0, the ground is last.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoveringDigraph {
    system: SetSystem,
    arcs: Vec<(usize, usize)>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

pub fn covering_digraph(s: &SetSystem) -> CoveringDigraph {
    let f = &s.members;
    let mut arcs = Vec::new();
    for i in 0..f.len() {
        for j in i + 1..f.len() {
            if !f[i].is_proper_subset(f[j]) {
                continue;
            }
            let between = f[i + 1..j]
                .iter()
                .any(|&k| f[i].is_proper_subset(k) && k.is_proper_subset(f[j]));
            if !between {
                arcs.push((i, j));
            }
        }
    }
    let mut out_adj = vec![Vec::new(); f.len()];
    let mut in_adj = vec![Vec::new(); f.len()];
    for (e, &(a, b)) in arcs.iter().enumerate() {
        out_adj[a].push(e);
        in_adj[b].push(e);
    }
    CoveringDigraph {
        system: s.clone(),
        arcs,
        out_adj,
        in_adj,
    }
}

impl CoveringDigraph {
    pub fn system(&self) -> &SetSystem {
        &self.system
    }

    pub fn vertex(&self, v: usize) -> Coalition {
        self.system.members[v]
    }

    pub fn vertices(&self) -> &[Coalition] {
        &self.system.members
    }

    /// Edge ids leaving `v`.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    /// Edge ids entering `v`.
    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    pub fn find_edge(&self, tail: usize, head: usize) -> Option<usize> {
        self.out_adj[tail]
            .iter()
            .copied()
            .find(|&e| self.arcs[e].1 == head)
    }
}

impl Dag for CoveringDigraph {
    fn vertex_count(&self) -> usize {
        self.system.members.len()
    }
    fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }
}

impl AgentDigraph for CoveringDigraph {
    fn agents(&self) -> Coalition {
        self.system.ground
    }
    fn movers(&self, e: usize) -> Coalition {
        let (a, b) = self.arcs[e];
        self.vertex(b).difference(self.vertex(a))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathCounts {
    pub from_bottom: Vec<u128>,
    pub to_top: Vec<u128>,
    pub total_maximal: u128,
}

/// Path counts by DP in canonical (topological) order.
pub fn count_paths(d: &CoveringDigraph) -> PathCounts {
    let n = d.vertex_count();
    let mut from_bottom = vec![0u128; n];
    let mut to_top = vec![0u128; n];
    from_bottom[0] = 1;
    for v in 1..n {
        from_bottom[v] = d
            .in_edges(v)
            .iter()
            .map(|&e| from_bottom[d.arcs[e].0])
            .sum();
    }
    to_top[n - 1] = 1;
    for v in (0..n - 1).rev() {
        to_top[v] = d.out_edges(v).iter().map(|&e| to_top[d.arcs[e].1]).sum();
    }
    PathCounts {
        total_maximal: from_bottom[n - 1],
        from_bottom,
        to_top,
    }
}

/// Every maximal path gets weight `1/ℓ`.
pub fn uniform_path_flow(d: &CoveringDigraph) -> Flow {
    let pc = count_paths(d);
    let total = from_u128(pc.total_maximal);
    Flow::new(
        d.arcs
            .iter()
            .map(|&(a, b)| from_u128(pc.from_bottom[a] * pc.to_top[b]) / &total)
            .collect(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub is_regular: bool,
    pub is_convex_geometry: bool,
    pub is_augmenting: bool,
}

pub fn classify(s: &SetSystem) -> Classification {
    let d = covering_digraph(s);
    let n = d.vertex_count();
    // shortest path from ∅ to each vertex, in edges
    let mut shortest = vec![usize::MAX; n];
    shortest[0] = 0;
    for v in 1..n {
        shortest[v] = d
            .in_edges(v)
            .iter()
            .map(|&e| shortest[d.arcs[e].0].saturating_add(1))
            .min()
            .unwrap_or(usize::MAX);
    }
    let is_regular = shortest[n - 1] == s.ground.len() as usize;

    let f = &s.members;
    let one_point =
        |a: Coalition, b: Coalition| b.difference(a).agents().any(|i| s.contains(a.with(i)));
    let intersection_closed = f
        .iter()
        .all(|&a| f.iter().all(|&b| s.contains(a.intersection(b))));
    let extension = f
        .iter()
        .filter(|&&a| a != s.ground)
        .all(|&a| one_point(a, s.ground));
    let is_convex_geometry = intersection_closed && extension;

    let union_stable = f.iter().all(|&a| {
        f.iter()
            .all(|&b| a.intersection(b).is_empty() || s.contains(a.union(b)))
    });
    let augmentation = f.iter().all(|&a| {
        f.iter()
            .filter(|&&b| a.is_proper_subset(b))
            .all(|&b| one_point(a, b))
    });
    let is_augmenting = s.contains(Coalition::EMPTY) && union_stable && augmentation;

    Classification {
        is_regular,
        is_convex_geometry,
        is_augmenting,
    }
}
