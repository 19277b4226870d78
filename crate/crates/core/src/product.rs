//! Coalition profiles and the product digraph.

use std::fmt;

use crate::coalition::{Coalition, MAX_AGENTS};
use crate::dag::{AgentDigraph, Dag};
use crate::error::{Error, Result};
use crate::set_system::{covering_digraph, CoveringDigraph, SetSystem};

pub const MAX_BLOCKS: usize = 8;
pub const DEFAULT_SIZE_CAP: u128 = 1_000_000;

/// The vertex cap, overridable through `CFGFLOW_SIZE_CAP`.
pub fn size_cap() -> u128 {
    std::env::var("CFGFLOW_SIZE_CAP")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SIZE_CAP)
}

/// One feasible coalition per block.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile(pub Vec<Coalition>);

impl Profile {
    pub fn parts(&self) -> &[Coalition] {
        &self.0
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Set of block indices (bit `q` for 0-based block `q`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Support(pub u64);

impl Support {
    pub fn contains(self, q: usize) -> bool {
        self.0 >> q & 1 == 1
    }
    pub fn len(self) -> u32 {
        self.0.count_ones()
    }
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
    /// 1-based block labels.
    pub fn blocks(self) -> Vec<usize> {
        (0..64)
            .filter(|&q| self.contains(q))
            .map(|q| q + 1)
            .collect()
    }
}

pub fn support(p: &Profile) -> Support {
    Support(
        p.0.iter()
            .enumerate()
            .filter(|(_, k)| !k.is_empty())
            .fold(0, |acc, (q, _)| acc | 1 << q),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProductEdge {
    pub tail: usize,
    pub head: usize,
    /// 0-based block whose coordinate moves.
    pub q: usize,
    pub movers: Coalition,
    /// Edge id in the factor digraph of block `q`.
    pub factor_edge: usize,
}

#[derive(Clone, Debug)]
pub struct ProductDigraph {
    n: u32,
    factors: Vec<CoveringDigraph>,
    strides: Vec<usize>,
    vertex_count: usize,
    arcs: Vec<(usize, usize)>,
    edges: Vec<ProductEdge>,
    out_start: Vec<usize>,
    in_edges: Vec<Vec<usize>>,
}

pub fn build_product(systems: &[SetSystem], n: u32) -> Result<ProductDigraph> {
    build_product_with_cap(systems, n, size_cap())
}

pub fn build_product_with_cap(systems: &[SetSystem], n: u32, cap: u128) -> Result<ProductDigraph> {
    let m = systems.len();
    if m == 0 || m > MAX_BLOCKS {
        return Err(Error::BlockCount(m));
    }
    if n == 0 || n > MAX_AGENTS {
        return Err(Error::AgentOutOfRange(n));
    }
    let covered = systems
        .iter()
        .fold(Coalition::EMPTY, |acc, s| acc.union(s.ground()));
    let expected = Coalition::full(n);
    if covered != expected {
        return Err(Error::CoverageViolation {
            covered: covered.to_string(),
            expected: expected.to_string(),
        });
    }
    let size: u128 = systems.iter().map(|s| s.len() as u128).product();
    if size > cap {
        return Err(Error::SizeCap { size, cap });
    }
    let factors: Vec<CoveringDigraph> = systems.iter().map(covering_digraph).collect();
    let sizes: Vec<usize> = systems.iter().map(|s| s.len()).collect();
    let mut strides = vec![1usize; m];
    for q in (0..m.saturating_sub(1)).rev() {
        strides[q] = strides[q + 1] * sizes[q + 1];
    }
    let vertex_count = size as usize;

    let mut edges = Vec::new();
    let mut out_start = Vec::with_capacity(vertex_count + 1);
    let mut coords = vec![0usize; m];
    for v in 0..vertex_count {
        out_start.push(edges.len());
        for q in 0..m {
            let c = coords[q];
            for &fe in factors[q].out_edges(c) {
                let (_, h) = factors[q].arcs()[fe];
                edges.push(ProductEdge {
                    tail: v,
                    head: v + (h - c) * strides[q],
                    q,
                    movers: factors[q].movers(fe),
                    factor_edge: fe,
                });
            }
        }
        // advance mixed-radix counter, last coordinate fastest
        for q in (0..m).rev() {
            coords[q] += 1;
            if coords[q] < sizes[q] {
                break;
            }
            coords[q] = 0;
        }
    }
    out_start.push(edges.len());
    let mut in_edges = vec![Vec::new(); vertex_count];
    for (e, pe) in edges.iter().enumerate() {
        in_edges[pe.head].push(e);
    }
    let arcs = edges.iter().map(|e| (e.tail, e.head)).collect();
    Ok(ProductDigraph {
        n,
        factors,
        strides,
        vertex_count,
        arcs,
        edges,
        out_start,
        in_edges,
    })
}

impl ProductDigraph {
    /// Directed hypercube of dimension `m`: block `q` is `({q}, {∅, {q}})`.
    pub fn hypercube(m: usize) -> Result<ProductDigraph> {
        if m == 0 || m > MAX_BLOCKS {
            return Err(Error::BlockCount(m));
        }
        let systems: Vec<SetSystem> = (1..=m as u32)
            .map(|q| SetSystem::power_set(Coalition::singleton(q)))
            .collect::<Result<_>>()?;
        build_product_with_cap(&systems, m as u32, u128::MAX)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[CoveringDigraph] {
        &self.factors
    }

    pub fn factor(&self, q: usize) -> &CoveringDigraph {
        &self.factors[q]
    }

    pub fn system(&self, q: usize) -> &SetSystem {
        self.factors[q].system()
    }

    pub fn block(&self, q: usize) -> Coalition {
        self.system(q).ground()
    }

    pub fn edges(&self) -> &[ProductEdge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &ProductEdge {
        &self.edges[e]
    }

    pub fn out_edges(&self, v: usize) -> std::ops::Range<usize> {
        self.out_start[v]..self.out_start[v + 1]
    }

    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    pub fn bottom(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.vertex_count - 1
    }

    pub fn coord(&self, v: usize, q: usize) -> usize {
        v / self.strides[q] % self.factors[q].vertex_count()
    }

    pub fn coords(&self, v: usize) -> Vec<usize> {
        (0..self.m()).map(|q| self.coord(v, q)).collect()
    }

    pub fn vertex_of_coords(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.strides).map(|(c, s)| c * s).sum()
    }

    /// Replace coordinate `q` of vertex `v`.
    pub fn with_coord(&self, v: usize, q: usize, c: usize) -> usize {
        v - self.coord(v, q) * self.strides[q] + c * self.strides[q]
    }

    pub fn profile(&self, v: usize) -> Profile {
        Profile(
            (0..self.m())
                .map(|q| self.factors[q].vertex(self.coord(v, q)))
                .collect(),
        )
    }

    pub fn find_profile(&self, p: &Profile) -> Result<usize> {
        if p.0.len() != self.m() {
            return Err(Error::UnknownProfile(p.to_string()));
        }
        let mut coords = Vec::with_capacity(self.m());
        for (q, &k) in p.0.iter().enumerate() {
            match self.system(q).index_of(k) {
                Some(i) => coords.push(i),
                None => return Err(Error::UnknownProfile(p.to_string())),
            }
        }
        Ok(self.vertex_of_coords(&coords))
    }

    pub fn find_edge(&self, tail: usize, head: usize) -> Option<usize> {
        self.out_edges(tail).find(|&e| self.edges[e].head == head)
    }

    pub fn union_of(&self, v: usize) -> Coalition {
        (0..self.m()).fold(Coalition::EMPTY, |acc, q| {
            acc.union(self.factors[q].vertex(self.coord(v, q)))
        })
    }

    pub fn support_of(&self, v: usize) -> Support {
        Support(
            (0..self.m())
                .filter(|&q| self.coord(v, q) != 0)
                .fold(0, |acc, q| acc | 1 << q),
        )
    }

    fn is_extreme(&self, v: usize, q: usize) -> bool {
        let c = self.coord(v, q);
        c == 0 || c == self.factors[q].vertex_count() - 1
    }

    /// At most one coordinate strictly between ∅ and its block.
    pub fn is_relevant_vertex(&self, v: usize) -> bool {
        (0..self.m()).filter(|&q| !self.is_extreme(v, q)).count() <= 1
    }

    pub fn is_relevant_profile(&self, p: &Profile) -> Result<bool> {
        Ok(self.is_relevant_vertex(self.find_profile(p)?))
    }

    pub fn relevant_edges(&self) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| {
                let pe = &self.edges[e];
                self.is_relevant_vertex(pe.tail) && self.is_relevant_vertex(pe.head)
            })
            .collect()
    }

    /// If edge `e` is `(K_{S,K_q}, K_{S,K'_q})`, return `(S, q)`.
    pub fn layer_of(&self, e: usize) -> Option<(u64, usize)> {
        let pe = &self.edges[e];
        let mut s = 1u64 << pe.q;
        for r in 0..self.m() {
            if r == pe.q {
                continue;
            }
            let c = self.coord(pe.tail, r);
            if c == self.factors[r].vertex_count() - 1 {
                s |= 1 << r;
            } else if c != 0 {
                return None;
            }
        }
        Some((s, pe.q))
    }

    /// Vertex `K_{S,K_q}` with `K_q` given by factor vertex index `kq`.
    pub fn layer_vertex(&self, s: u64, q: usize, kq: usize) -> usize {
        let coords: Vec<usize> = (0..self.m())
            .map(|r| {
                if r == q {
                    kq
                } else if s >> r & 1 == 1 {
                    self.factors[r].vertex_count() - 1
                } else {
                    0
                }
            })
            .collect();
        self.vertex_of_coords(&coords)
    }

    /// Edge `(K_{S,K_q}, K_{S,K'_q})` for factor edge `fe` of block `q`.
    pub fn layer_edge(&self, s: u64, q: usize, fe: usize) -> usize {
        let (a, b) = self.factors[q].arcs()[fe];
        let tail = self.layer_vertex(s, q, a);
        let head = self.layer_vertex(s, q, b);
        self.find_edge(tail, head).expect("layer edge exists")
    }

    pub fn agent_subdigraph(&self, i: u32) -> Result<AgentSubdigraph> {
        if i == 0 || i > self.n {
            return Err(Error::UnknownAgent(i));
        }
        let edges: Vec<usize> = (0..self.edges.len())
            .filter(|&e| self.edges[e].movers.contains(i))
            .collect();
        let mut vertices: Vec<usize> = edges
            .iter()
            .flat_map(|&e| [self.edges[e].tail, self.edges[e].head])
            .collect();
        vertices.sort_unstable();
        vertices.dedup();
        Ok(AgentSubdigraph { edges, vertices })
    }

    /// Blocks that contain agent `i`.
    pub fn blocks_of(&self, i: u32) -> Vec<usize> {
        (0..self.m())
            .filter(|&q| self.block(q).contains(i))
            .collect()
    }
}

impl Dag for ProductDigraph {
    fn vertex_count(&self) -> usize {
        self.vertex_count
    }
    fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }
}

impl AgentDigraph for ProductDigraph {
    fn agents(&self) -> Coalition {
        Coalition::full(self.n)
    }
    fn movers(&self, e: usize) -> Coalition {
        self.edges[e].movers
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgentSubdigraph {
    pub edges: Vec<usize>,
    pub vertices: Vec<usize>,
}

impl AgentSubdigraph {
    pub fn components(&self, pd: &ProductDigraph) -> Vec<Vec<usize>> {
        let arcs: Vec<(usize, usize)> = self.edges.iter().map(|&e| pd.arcs()[e]).collect();
        crate::dag::components(&self.vertices, &arcs)
    }
}

/// The m-dimensional directed hypercube with subset addressing.
#[derive(Clone, Debug)]
pub struct Hypercube {
    pd: ProductDigraph,
}

impl Hypercube {
    pub fn new(m: usize) -> Result<Hypercube> {
        Ok(Hypercube {
            pd: ProductDigraph::hypercube(m)?,
        })
    }

    pub fn m(&self) -> usize {
        self.pd.m()
    }

    pub fn digraph(&self) -> &ProductDigraph {
        &self.pd
    }

    /// Vertex `R_S`.
    pub fn vertex(&self, s: u64) -> usize {
        let coords: Vec<usize> = (0..self.m()).map(|q| (s >> q & 1) as usize).collect();
        self.pd.vertex_of_coords(&coords)
    }

    /// Mask `S` of vertex `R_S`.
    pub fn mask(&self, v: usize) -> u64 {
        (0..self.m())
            .filter(|&q| self.pd.coord(v, q) == 1)
            .fold(0, |acc, q| acc | 1 << q)
    }

    /// Edge `(R_{S\q}, R_S)`; requires `q ∈ S`.
    pub fn edge(&self, s: u64, q: usize) -> usize {
        debug_assert!(s >> q & 1 == 1);
        let tail = self.vertex(s & !(1 << q));
        let head = self.vertex(s);
        self.pd.find_edge(tail, head).expect("hypercube edge")
    }

    /// `(S, q)` of edge `e`.
    pub fn edge_label(&self, e: usize) -> (u64, usize) {
        let pe = self.pd.edge(e);
        (self.mask(pe.head), pe.q)
    }
}
