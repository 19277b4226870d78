//! Games on digraph vertices, marginalist values and flow methods.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::coalition::Coalition;
use crate::dag::{AgentDigraph, Dag};
use crate::error::{Error, Result};
use crate::flow::{check_flow, Flow};
use crate::rational::{format_q, int, Q};

/// Worth per vertex, `worth[0] = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Game {
    pub worth: Vec<Q>,
}

impl Game {
    pub fn new<D: Dag + ?Sized>(d: &D, worth: Vec<Q>) -> Result<Game> {
        if worth.len() != d.vertex_count() {
            return Err(Error::DomainMismatch(format!(
                "{} worths for {} vertices",
                worth.len(),
                d.vertex_count()
            )));
        }
        if !worth[d.source()].is_zero() {
            return Err(Error::Validation {
                path: "worth(∅)".into(),
                message: format!("must be 0, got {}", format_q(&worth[d.source()])),
            });
        }
        Ok(Game { worth })
    }

    pub fn zero<D: Dag + ?Sized>(d: &D) -> Game {
        Game {
            worth: vec![Q::zero(); d.vertex_count()],
        }
    }

    pub fn from_fn<D: Dag + ?Sized>(d: &D, f: impl Fn(usize) -> Q) -> Result<Game> {
        Game::new(d, (0..d.vertex_count()).map(f).collect())
    }

    /// `α·self + other`
    pub fn combine(&self, alpha: &Q, other: &Game) -> Game {
        Game {
            worth: self
                .worth
                .iter()
                .zip(&other.worth)
                .map(|(a, b)| alpha * a + b)
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PayoffVector {
    pub pay: BTreeMap<u32, Q>,
}

impl PayoffVector {
    pub fn zero(agents: Coalition) -> PayoffVector {
        PayoffVector {
            pay: agents.agents().map(|i| (i, Q::zero())).collect(),
        }
    }

    pub fn get(&self, i: u32) -> Q {
        self.pay.get(&i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&mut self, i: u32, x: &Q) {
        *self.pay.entry(i).or_insert_with(Q::zero) += x;
    }

    pub fn total(&self) -> Q {
        self.pay.values().sum()
    }
}

/// `λ_i` per agent, keyed by edge id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MarginalistCoefficients {
    pub per_agent: BTreeMap<u32, BTreeMap<usize, Q>>,
}

impl MarginalistCoefficients {
    /// Edge sums `Σ_{i∈Q(e)} λ_i(e)`.
    pub fn edge_sums(&self, edges: usize) -> Flow {
        let mut f = Flow::zero(edges);
        for m in self.per_agent.values() {
            for (&e, l) in m {
                f.weights[e] += l;
            }
        }
        f
    }
}

pub fn dirac_game<D: Dag + ?Sized>(d: &D, v: usize) -> Result<Game> {
    if v == d.source() {
        return Err(Error::EmptyProfile);
    }
    if v >= d.vertex_count() {
        return Err(Error::DomainMismatch(format!("vertex {v} out of range")));
    }
    let mut g = Game::zero(d);
    g.worth[v] = int(1);
    Ok(g)
}

fn check_game<D: Dag + ?Sized>(d: &D, g: &Game) -> Result<()> {
    if g.worth.len() != d.vertex_count() {
        return Err(Error::DomainMismatch("game does not match digraph".into()));
    }
    Ok(())
}

fn diff<D: Dag + ?Sized>(d: &D, g: &Game, e: usize) -> Q {
    let (a, b) = d.arcs()[e];
    &g.worth[b] - &g.worth[a]
}

/// Agents whose every edge has zero worth difference.
pub fn null_agents<D: AgentDigraph + ?Sized>(d: &D, g: &Game) -> Vec<u32> {
    let mut active = Coalition::EMPTY;
    for e in 0..d.edge_count() {
        if !diff(d, g, e).is_zero() {
            active = active.union(d.movers(e));
        }
    }
    d.agents().difference(active).agents().collect()
}

pub fn marginalist_value<D: AgentDigraph + ?Sized>(
    d: &D,
    g: &Game,
    coeffs: &MarginalistCoefficients,
) -> Result<PayoffVector> {
    check_game(d, g)?;
    let mut out = PayoffVector::zero(d.agents());
    if let Some(&i) = coeffs.per_agent.keys().find(|i| !d.agents().contains(**i)) {
        return Err(Error::DomainMismatch(format!(
            "coefficients for unknown agent {i}"
        )));
    }
    for i in d.agents().agents() {
        let edges = d.agent_edges(i);
        let empty = BTreeMap::new();
        let li = coeffs.per_agent.get(&i).unwrap_or(&empty);
        if li.len() != edges.len() || !edges.iter().all(|e| li.contains_key(e)) {
            return Err(Error::DomainMismatch(format!(
                "coefficients of agent {i} are not defined exactly on its edges"
            )));
        }
        let mut total = Q::zero();
        for (&e, l) in li {
            let dv = diff(d, g, e);
            if !dv.is_zero() && !l.is_zero() {
                total += l * dv;
            }
        }
        out.pay.insert(i, total);
    }
    Ok(out)
}

/// `λ_i(e) = Λ(e)/|Q(e)|` for each `i ∈ Q(e)`.
pub fn equal_split_coefficients<D: AgentDigraph + ?Sized>(
    d: &D,
    f: &Flow,
) -> MarginalistCoefficients {
    let mut c = MarginalistCoefficients::default();
    for i in d.agents().agents() {
        c.per_agent.insert(i, BTreeMap::new());
    }
    for (e, w) in f.weights.iter().enumerate() {
        let movers = d.movers(e);
        let share = w / Q::from_integer(movers.len().into());
        for i in movers.agents() {
            c.per_agent.entry(i).or_default().insert(e, share.clone());
        }
    }
    c
}

/// Equal-split evaluation of a unitary flow.
pub fn flow_method_value<D: AgentDigraph + ?Sized>(
    d: &D,
    g: &Game,
    f: &Flow,
) -> Result<PayoffVector> {
    check_game(d, g)?;
    let r = check_flow(d, f)?;
    if !r.is_unitary {
        return Err(Error::NotUnitary(format!(
            "value {}, {} conservation violations",
            format_q(&r.value),
            r.violations.len()
        )));
    }
    Ok(equal_split_value(d, g, f))
}

/// Equal-split evaluation without checking the flow.
pub fn equal_split_value<D: AgentDigraph + ?Sized>(d: &D, g: &Game, f: &Flow) -> PayoffVector {
    let mut out = PayoffVector::zero(d.agents());
    for (e, w) in f.weights.iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        let dv = diff(d, g, e);
        if dv.is_zero() {
            continue;
        }
        let movers = d.movers(e);
        let share = w * dv / Q::from_integer(movers.len().into());
        for i in movers.agents() {
            out.add(i, &share);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product::{build_product, ProductDigraph};
    use crate::rational::frac;
    use crate::set_system::{covering_digraph, uniform_path_flow, validate_set_system, SetSystem};

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
    fn dirac() {
        let pd = example1();
        let top = pd.top();
        let g = dirac_game(&pd, top).unwrap();
        assert_eq!(g.worth[top], int(1));
        assert_eq!(g.worth.iter().filter(|w| !w.is_zero()).count(), 1);
        assert!(matches!(dirac_game(&pd, 0), Err(Error::EmptyProfile)));
        // v = Σ v(K) 1_K
        let v = Game::from_fn(&pd, |k| frac(k as i64 * 3 - 1, 7)).unwrap_err();
        assert!(matches!(v, Error::Validation { .. }));
        let v = Game::from_fn(&pd, |k| frac(k as i64 * 3, 7)).unwrap();
        let mut rebuilt = Game::zero(&pd);
        for k in 1..pd.vertex_count() {
            rebuilt = dirac_game(&pd, k).unwrap().combine(&v.worth[k], &rebuilt);
        }
        assert_eq!(rebuilt, v);
    }

    #[test]
    fn null_agent_detection() {
        let pd = example1();
        assert_eq!(null_agents(&pd, &Game::zero(&pd)), vec![1, 2, 3, 4, 5]);
        // agent 4 only moves at the bottom of block 2
        assert_eq!(
            null_agents(&pd, &dirac_game(&pd, pd.top()).unwrap()),
            vec![4]
        );
        // constant on each component of agent 3's subdigraph, varying elsewhere
        let g3 = pd.agent_subdigraph(3).unwrap();
        let comps = g3.components(&pd);
        let comp_of = |v: usize| comps.iter().position(|c| c.contains(&v));
        let base = comp_of(0).unwrap() as i64;
        let worth: Vec<Q> = (0..pd.vertex_count())
            .map(|v| match comp_of(v) {
                Some(k) => int(k as i64 - base),
                None => int(v as i64 * 5),
            })
            .collect();
        let g = Game::new(&pd, worth).unwrap();
        let nulls = null_agents(&pd, &g);
        assert!(nulls.contains(&3));
        assert!(nulls.len() < 5);
    }

    #[test]
    fn marginalist_and_flow_method() {
        let pd = example1();
        let zero = Game::zero(&pd);
        let coeffs = equal_split_coefficients(&pd, &Flow::zero(pd.edge_count()));
        let g = dirac_game(&pd, pd.top()).unwrap();
        assert!(marginalist_value(&pd, &zero, &coeffs)
            .unwrap()
            .total()
            .is_zero());
        assert!(marginalist_value(&pd, &g, &coeffs)
            .unwrap()
            .total()
            .is_zero());
        let mut bad = coeffs.clone();
        bad.per_agent
            .get_mut(&1)
            .unwrap()
            .insert(usize::MAX, int(1));
        assert!(matches!(
            marginalist_value(&pd, &g, &bad),
            Err(Error::DomainMismatch(_))
        ));
        assert!(matches!(
            flow_method_value(&pd, &g, &Flow::zero(pd.edge_count())),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn shapley_on_power_set_factor() {
        // v(S) = |S|^2 on {1,2,3}: symmetric, Shapley gives 3 each
        let s = SetSystem::power_set(c(&[1, 2, 3])).unwrap();
        let d = covering_digraph(&s);
        let g = Game::from_fn(&d, |k| int((d.vertex(k).len() * d.vertex(k).len()) as i64)).unwrap();
        let pay = flow_method_value(&d, &g, &uniform_path_flow(&d)).unwrap();
        for i in 1..=3 {
            assert_eq!(pay.get(i), int(3));
        }
    }
}
