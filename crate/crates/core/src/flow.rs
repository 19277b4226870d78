//! Flows on DAGs, cuts, and the edge decomposition of zero-sum charges.

use num_traits::Zero;

use crate::dag::{Dag, UnionFind};
use crate::error::{Error, Result};
use crate::rational::{format_q, int, Q};

/// Rational weight per edge id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flow {
    pub weights: Vec<Q>,
}

impl Flow {
    pub fn new(weights: Vec<Q>) -> Flow {
        Flow { weights }
    }

    pub fn zero(edges: usize) -> Flow {
        Flow::new(vec![Q::zero(); edges])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn add_scaled(&mut self, other: &Flow, alpha: &Q) {
        for (w, o) in self.weights.iter_mut().zip(&other.weights) {
            *w += alpha * o;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowCheck {
    pub is_flow: bool,
    pub is_unitary: bool,
    /// Outflow of the source.
    pub value: Q,
    /// Interior vertices where inflow ≠ outflow.
    pub violations: Vec<usize>,
}

/// Net inflow minus outflow at each vertex.
pub fn net_inflow<D: Dag + ?Sized>(d: &D, f: &Flow) -> Vec<Q> {
    let mut net = vec![Q::zero(); d.vertex_count()];
    for (&(a, b), w) in d.arcs().iter().zip(&f.weights) {
        net[b] += w;
        net[a] -= w;
    }
    net
}

pub fn check_flow<D: Dag + ?Sized>(d: &D, f: &Flow) -> Result<FlowCheck> {
    if f.len() != d.edge_count() {
        return Err(Error::DomainMismatch(format!(
            "flow has {} weights, digraph has {} edges",
            f.len(),
            d.edge_count()
        )));
    }
    let net = net_inflow(d, f);
    let (s, t) = (d.source(), d.sink());
    let violations: Vec<usize> = (0..d.vertex_count())
        .filter(|&v| v != s && v != t && !net[v].is_zero())
        .collect();
    let value = -net[s].clone();
    let is_flow = violations.is_empty();
    Ok(FlowCheck {
        is_flow,
        is_unitary: is_flow && value == int(1),
        value,
        violations,
    })
}

/// Bottom side of a cut; the rest is the top side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cut {
    pub bottom: Vec<usize>,
}

/// Forward minus backward weight across the cut.
pub fn cut_value<D: Dag + ?Sized>(d: &D, f: &Flow, c: &Cut) -> Result<Q> {
    if f.len() != d.edge_count() {
        return Err(Error::DomainMismatch("flow length".into()));
    }
    let mut side = vec![false; d.vertex_count()];
    for &v in &c.bottom {
        if v >= side.len() {
            return Err(Error::NotAPartition(format!("vertex {v} out of range")));
        }
        if side[v] {
            return Err(Error::NotAPartition(format!("vertex {v} listed twice")));
        }
        side[v] = true;
    }
    if !side[d.source()] || side[d.sink()] {
        return Err(Error::NotAPartition(
            "source must be below and sink above".into(),
        ));
    }
    let mut total = Q::zero();
    for (&(a, b), w) in d.arcs().iter().zip(&f.weights) {
        match (side[a], side[b]) {
            (true, false) => total += w,
            (false, true) => total -= w,
            _ => {}
        }
    }
    Ok(total)
}

fn weakly_connected(
    n: usize,
    alive: &[bool],
    arcs: &[(usize, usize)],
    skip: Option<usize>,
) -> bool {
    let mut uf = UnionFind::new(n);
    for &(a, b) in arcs {
        if alive[a] && alive[b] && Some(a) != skip && Some(b) != skip {
            uf.union(a, b);
        }
    }
    let mut root = None;
    for v in 0..n {
        if !alive[v] || Some(v) == skip {
            continue;
        }
        let r = uf.find(v);
        match root {
            None => root = Some(r),
            Some(r0) if r0 != r => return false,
            _ => {}
        }
    }
    true
}

/// Edge weights `λ` with `x(j) = Σ_in λ − Σ_out λ` at every vertex.
///
/// Peels vertices one at a time. The preferred vertex is the highest-index sink
/// whose removal leaves the rest weakly connected; its charge is split equally over
/// its incoming edges. If no sink qualifies (e.g. `a → b ← c`), the highest non-cut
/// vertex is peeled instead, splitting over all incident edges.
pub fn edge_decomposition(vertices: usize, arcs: &[(usize, usize)], x: &[Q]) -> Result<Vec<Q>> {
    if x.len() != vertices || arcs.iter().any(|&(a, b)| a >= vertices || b >= vertices) {
        return Err(Error::DomainMismatch("charges or arcs out of range".into()));
    }
    let total: Q = x.iter().sum();
    if !total.is_zero() {
        return Err(Error::NonZeroSum(format_q(&total)));
    }
    let mut alive = vec![true; vertices];
    if vertices == 0 || !weakly_connected(vertices, &alive, arcs, None) {
        return Err(Error::NotConnected);
    }
    let mut charge = x.to_vec();
    let mut lambda = vec![Q::zero(); arcs.len()];
    let mut remaining = vertices;
    while remaining > 1 {
        let incident = |v: usize, alive: &[bool]| -> Vec<usize> {
            (0..arcs.len())
                .filter(|&e| {
                    let (a, b) = arcs[e];
                    alive[a] && alive[b] && (a == v || b == v) && a != b
                })
                .collect()
        };
        let out_degree = |v: usize, alive: &[bool]| {
            arcs.iter()
                .filter(|&&(a, b)| a == v && b != v && alive[b])
                .count()
        };
        let non_cut: Vec<usize> = (0..vertices)
            .rev()
            .filter(|&v| alive[v] && weakly_connected(vertices, &alive, arcs, Some(v)))
            .collect();
        let j0 = non_cut
            .iter()
            .copied()
            .find(|&v| out_degree(v, &alive) == 0)
            .or_else(|| non_cut.first().copied())
            .expect("a connected graph has a non-cut vertex");
        let inc = incident(j0, &alive);
        let share = &charge[j0] / Q::from_integer((inc.len() as i64).into());
        for &e in &inc {
            let (a, b) = arcs[e];
            if b == j0 {
                lambda[e] = share.clone();
                charge[a] += &share;
            } else {
                lambda[e] = -share.clone();
                charge[b] += &share;
            }
        }
        charge[j0] = Q::zero();
        alive[j0] = false;
        remaining -= 1;
    }
    Ok(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag::EdgeList;
    use crate::rational::frac;

    fn square() -> EdgeList {
        EdgeList {
            vertices: 4,
            arcs: vec![(0, 1), (0, 2), (1, 3), (2, 3)],
            source: 0,
            sink: 3,
        }
    }

    #[test]
    fn checks() {
        let d = square();
        let f = Flow::new(vec![frac(1, 2); 4]);
        let r = check_flow(&d, &f).unwrap();
        assert!(r.is_flow && r.is_unitary);
        let r = check_flow(&d, &Flow::zero(4)).unwrap();
        assert!(r.is_flow && !r.is_unitary);
        let mut g = f.clone();
        g.weights[2] += int(1);
        let r = check_flow(&d, &g).unwrap();
        assert_eq!(r.violations, vec![1]);
        assert!(matches!(
            check_flow(&d, &Flow::zero(3)),
            Err(Error::DomainMismatch(_))
        ));
    }

    #[test]
    fn cuts() {
        let d = square();
        let f = Flow::new(vec![frac(1, 2); 4]);
        for bottom in [vec![0], vec![0, 1], vec![0, 2], vec![0, 1, 2]] {
            assert_eq!(cut_value(&d, &f, &Cut { bottom }).unwrap(), int(1));
        }
        assert!(matches!(
            cut_value(&d, &f, &Cut { bottom: vec![1] }),
            Err(Error::NotAPartition(_))
        ));
        assert!(matches!(
            cut_value(&d, &f, &Cut { bottom: vec![0, 3] }),
            Err(Error::NotAPartition(_))
        ));
    }

    #[test]
    fn decomposition_examples() {
        let l = edge_decomposition(2, &[(0, 1)], &[int(-1), int(1)]).unwrap();
        assert_eq!(l, vec![int(1)]);
        let d = square();
        let l = edge_decomposition(4, &d.arcs, &vec![int(0); 4]).unwrap();
        assert!(l.iter().all(|x| x.is_zero()));
        let l = edge_decomposition(4, &d.arcs, &[int(-1), int(0), int(0), int(1)]).unwrap();
        assert_eq!(l, vec![frac(1, 2); 4]);
        assert!(matches!(
            edge_decomposition(2, &[(0, 1)], &[int(1), int(1)]),
            Err(Error::NonZeroSum(_))
        ));
        assert!(matches!(
            edge_decomposition(3, &[(0, 1)], &vec![int(0); 3]),
            Err(Error::NotConnected)
        ));
    }

    #[test]
    fn decomposition_without_peelable_sink() {
        // a -> b <- c: the only sink is a cut vertex
        let arcs = [(0, 1), (2, 1)];
        let x = [int(2), int(-5), int(3)];
        let l = edge_decomposition(3, &arcs, &x).unwrap();
        let mut rebuilt = vec![Q::zero(); 3];
        for (&(a, b), w) in arcs.iter().zip(&l) {
            rebuilt[b] += w;
            rebuilt[a] -= w;
        }
        assert_eq!(rebuilt, x.to_vec());
    }
}
