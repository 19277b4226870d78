use crate::coalition::Coalition;

/// A finite digraph with a distinguished source and sink, edges addressed by id.
pub trait Dag {
    fn vertex_count(&self) -> usize;
    fn arcs(&self) -> &[(usize, usize)];
    fn source(&self) -> usize {
        0
    }
    fn sink(&self) -> usize {
        self.vertex_count() - 1
    }
    fn edge_count(&self) -> usize {
        self.arcs().len()
    }
}

/// A DAG whose edges are joined by sets of agents.
pub trait AgentDigraph: Dag {
    /// Agents the payoffs are defined on.
    fn agents(&self) -> Coalition;
    /// Agents that join along edge `e`.
    fn movers(&self, e: usize) -> Coalition;

    /// `E^i`: edges where agent `i` joins.
    fn agent_edges(&self, i: u32) -> Vec<usize> {
        (0..self.edge_count())
            .filter(|&e| self.movers(e).contains(i))
            .collect()
    }
}

/// A plain edge list. Used for random DAGs and digraph fragments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeList {
    pub vertices: usize,
    pub arcs: Vec<(usize, usize)>,
    pub source: usize,
    pub sink: usize,
}

impl Dag for EdgeList {
    fn vertex_count(&self) -> usize {
        self.vertices
    }
    fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }
    fn source(&self) -> usize {
        self.source
    }
    fn sink(&self) -> usize {
        self.sink
    }
}

/// Union-find over `0..n`.
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Weakly connected components of the fragment `(vertices, edges)`.
///
/// Edge endpoints not listed in `vertices` are added. Components come out sorted,
/// each sorted ascending.
pub fn components(vertices: &[usize], edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut ids: Vec<usize> = vertices.to_vec();
    ids.extend(edges.iter().flat_map(|&(a, b)| [a, b]));
    ids.sort_unstable();
    ids.dedup();
    let pos = |v: usize| ids.binary_search(&v).unwrap();
    let mut uf = UnionFind::new(ids.len());
    for &(a, b) in edges {
        uf.union(pos(a), pos(b));
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (k, &v) in ids.iter().enumerate() {
        groups.entry(uf.find(k)).or_default().push(v);
    }
    groups.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn component_counts() {
        assert_eq!(components(&[0, 1, 2], &[]).len(), 3);
        assert_eq!(components(&[], &[(0, 1), (2, 1), (2, 3)]).len(), 1);
        assert_eq!(
            components(&[5], &[(0, 1), (2, 3)]),
            vec![vec![0, 1], vec![2, 3], vec![5]]
        );
    }
}
