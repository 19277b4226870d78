//! Two-step values, the AZ value, the configuration value and value audits.

use num_traits::Zero;

use crate::coalition::Coalition;
use crate::dag::{AgentDigraph, Dag};
use crate::error::{Error, Result};
use crate::flow::Flow;
use crate::game::{dirac_game, flow_method_value, null_agents, Game, PayoffVector};
use crate::product::{Hypercube, ProductDigraph};
use crate::rational::{fact_ratio, format_q, frac, from_u128, Q};
use crate::set_system::{count_paths, CoveringDigraph};
use crate::two_step::compose_two_step_flow;

/// `v_M^{K_q}` on the hypercube: `v(K_S)` if `q ∉ S`, else `v(K_{S,K_q})`.
pub fn upper_game(
    pd: &ProductDigraph,
    h: &Hypercube,
    g: &Game,
    q: usize,
    kq: Coalition,
) -> Result<Game> {
    let idx = pd
        .system(q)
        .index_of(kq)
        .ok_or_else(|| Error::InfeasibleCoalition(kq.to_string(), q + 1))?;
    Game::from_fn(h.digraph(), |r| {
        let s = h.mask(r);
        let v = if s >> q & 1 == 1 {
            pd.layer_vertex(s, q, idx)
        } else {
            pd.layer_vertex(s, q, 0)
        };
        g.worth[v].clone()
    })
}

/// `(m−s)!(s−1)!/m!` on the edge `(R_{S\q}, R_S)`.
pub fn shapley_hypercube_flow(h: &Hypercube) -> Flow {
    let m = h.m();
    Flow::new(
        (0..h.digraph().edge_count())
            .map(|e| {
                let s = h.edge_label(e).0.count_ones() as usize;
                fact_ratio(m - s, s - 1, m)
            })
            .collect(),
    )
}

/// `(p−k−1)!k!/p!` on `(K, K∪i)` for a power-set factor.
pub fn power_set_shapley_flow(pd: &ProductDigraph, q: usize) -> Result<Flow> {
    if !pd.system(q).is_power_set() {
        return Err(Error::NotPowerSet(q + 1));
    }
    let d = pd.factor(q);
    let p = d.agents().len() as usize;
    Ok(Flow::new(
        (0..d.edge_count())
            .map(|e| {
                let k = d.vertex(d.arcs()[e].0).len() as usize;
                fact_ratio(p - k - 1, k, p)
            })
            .collect(),
    ))
}

/// Two-step procedure: the upper flow method gives each block a lower game,
/// which the block's own flow method divides among its agents.
pub fn two_step_value(
    pd: &ProductDigraph,
    g: &Game,
    lambda_m: &Flow,
    factor_flows: &[Flow],
) -> Result<PayoffVector> {
    if factor_flows.len() != pd.m() {
        return Err(Error::DomainMismatch(format!(
            "{} factor flows for {} blocks",
            factor_flows.len(),
            pd.m()
        )));
    }
    let h = Hypercube::new(pd.m())?;
    let mut out = PayoffVector::zero(pd.agents());
    for q in 0..pd.m() {
        let d = pd.factor(q);
        let mut lower = Vec::with_capacity(d.vertex_count());
        for &kq in d.vertices() {
            let up = upper_game(pd, &h, g, q, kq)?;
            let phi = flow_method_value(h.digraph(), &up, lambda_m)?;
            lower.push(phi.get(q as u32 + 1));
        }
        let lower = Game::new(d, lower)?;
        let phi_q = flow_method_value(d, &lower, &factor_flows[q])?;
        for (i, x) in phi_q.pay {
            out.add(i, &x);
        }
    }
    Ok(out)
}

/// Equal weight on every maximal path, contributions shared among movers.
pub fn shapley_like_value(d: &CoveringDigraph, g: &Game) -> Result<PayoffVector> {
    if g.worth.len() != d.vertex_count() {
        return Err(Error::DomainMismatch("game does not match digraph".into()));
    }
    let pc = count_paths(d);
    let total = from_u128(pc.total_maximal);
    let mut out = PayoffVector::zero(d.agents());
    for (e, &(a, b)) in d.arcs().iter().enumerate() {
        let dv = &g.worth[b] - &g.worth[a];
        if dv.is_zero() {
            continue;
        }
        let movers = d.movers(e);
        let coef = from_u128(pc.from_bottom[a] * pc.to_top[b])
            / (&total * Q::from_integer(movers.len().into()));
        let share = coef * dv;
        for i in movers.agents() {
            out.add(i, &share);
        }
    }
    Ok(out)
}

fn require_power_sets(pd: &ProductDigraph) -> Result<()> {
    match (0..pd.m()).find(|&q| !pd.system(q).is_power_set()) {
        Some(q) => Err(Error::NotPowerSet(q + 1)),
        None => Ok(()),
    }
}

/// Closed form of the AZ value on power-set factors.
pub fn az_value(pd: &ProductDigraph, g: &Game) -> Result<PayoffVector> {
    require_power_sets(pd)?;
    if g.worth.len() != pd.vertex_count() {
        return Err(Error::DomainMismatch("game does not match digraph".into()));
    }
    let m = pd.m();
    let mut out = PayoffVector::zero(pd.agents());
    for i in pd.agents().agents() {
        let mut total = Q::zero();
        for q in pd.blocks_of(i) {
            let sys = pd.system(q);
            let p = sys.ground().len() as usize;
            let rest = sys.ground().difference(Coalition::singleton(i));
            for s in (1..1u64 << m).filter(|s| s >> q & 1 == 1) {
                let outer = fact_ratio(m - s.count_ones() as usize, s.count_ones() as usize - 1, m);
                for kq in rest.subsets() {
                    let k = kq.len() as usize;
                    let lo = pd.layer_vertex(s, q, sys.index_of(kq).unwrap());
                    let hi = pd.layer_vertex(s, q, sys.index_of(kq.with(i)).unwrap());
                    let dv = &g.worth[hi] - &g.worth[lo];
                    if !dv.is_zero() {
                        total += &outer * fact_ratio(p - k - 1, k, p) * dv;
                    }
                }
            }
        }
        out.pay.insert(i, total);
    }
    Ok(out)
}

/// The flow of the AZ value: Shapley hypercube flow composed with per-block Shapley flows.
pub fn az_flow(pd: &ProductDigraph) -> Result<Flow> {
    require_power_sets(pd)?;
    let h = Hypercube::new(pd.m())?;
    let factors: Vec<Flow> = (0..pd.m())
        .map(|q| power_set_shapley_flow(pd, q))
        .collect::<Result<_>>()?;
    compose_two_step_flow(pd, &shapley_hypercube_flow(&h), &factors)
}

/// A classical TU game on `2^N`, indexed by coalition mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TuGame {
    pub n: u32,
    pub worth: Vec<Q>,
}

impl TuGame {
    pub fn new(n: u32, worth: Vec<Q>) -> Result<TuGame> {
        if n == 0 || n > crate::coalition::MAX_AGENTS {
            return Err(Error::AgentOutOfRange(n));
        }
        if worth.len() != 1usize << n {
            return Err(Error::DomainMismatch(format!(
                "{} worths for 2^{n} coalitions",
                worth.len()
            )));
        }
        if !worth[0].is_zero() {
            return Err(Error::Validation {
                path: "worth(∅)".into(),
                message: format!("must be 0, got {}", format_q(&worth[0])),
            });
        }
        Ok(TuGame { n, worth })
    }

    pub fn v(&self, k: Coalition) -> &Q {
        &self.worth[k.0 as usize]
    }
}

/// Configuration value of a TU game with coalition configuration `blocks`.
pub fn configuration_value(v: &TuGame, blocks: &[Coalition]) -> Result<PayoffVector> {
    let n = v.n;
    let covered = blocks.iter().fold(Coalition::EMPTY, |a, &b| a.union(b));
    if blocks.is_empty() || covered != Coalition::full(n) || blocks.iter().any(|b| b.is_empty()) {
        return Err(Error::CoverageViolation {
            covered: covered.to_string(),
            expected: Coalition::full(n).to_string(),
        });
    }
    let m = blocks.len();
    let mut out = PayoffVector::zero(Coalition::full(n));
    for i in 1..=n {
        let mut total = Q::zero();
        for (q, &pq) in blocks.iter().enumerate() {
            if !pq.contains(i) {
                continue;
            }
            let p = pq.len() as usize;
            for s in (1..1u64 << m).filter(|s| s >> q & 1 == 1) {
                let others = (0..m)
                    .filter(|&r| r != q && s >> r & 1 == 1)
                    .fold(Coalition::EMPTY, |a, r| a.union(blocks[r]));
                if others.contains(i) {
                    continue;
                }
                let sz = s.count_ones() as usize;
                let outer = fact_ratio(m - sz, sz - 1, m);
                for kq in pq.difference(Coalition::singleton(i)).subsets() {
                    let k = kq.len() as usize;
                    let dv = v.v(kq.with(i).union(others)) - v.v(kq.union(others));
                    if !dv.is_zero() {
                        total += &outer * fact_ratio(p - k - 1, k, p) * dv;
                    }
                }
            }
        }
        out.pay.insert(i, total);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub efficiency: bool,
    pub null_agent: bool,
    pub linearity: bool,
    pub efficiency_witness: Option<String>,
    pub null_agent_witness: Option<String>,
    pub linearity_witness: Option<String>,
    pub games_checked: usize,
}

fn alpha(k: usize) -> Q {
    let sign = if k.is_multiple_of(2) { 1 } else { -1 };
    frac(sign * (k % 7 + 2) as i64, (k % 3 + 1) as i64)
}

/// Checks efficiency, the null agent axiom and linearity on `sample` plus every Dirac game.
pub fn audit_value<D, F>(d: &D, value: F, sample: &[Game]) -> Result<AuditReport>
where
    D: AgentDigraph + ?Sized,
    F: Fn(&Game) -> Result<PayoffVector>,
{
    let mut games: Vec<(String, Game)> = sample
        .iter()
        .enumerate()
        .map(|(k, g)| (format!("sample game #{k}"), g.clone()))
        .collect();
    for v in 0..d.vertex_count() {
        if v != d.source() {
            games.push((format!("Dirac game of vertex {v}"), dirac_game(d, v)?));
        }
    }
    let mut rep = AuditReport {
        efficiency: true,
        null_agent: true,
        linearity: true,
        efficiency_witness: None,
        null_agent_witness: None,
        linearity_witness: None,
        games_checked: games.len(),
    };
    let pays: Vec<PayoffVector> = games.iter().map(|(_, g)| value(g)).collect::<Result<_>>()?;
    let top = d.sink();
    for ((name, g), pay) in games.iter().zip(&pays) {
        if rep.efficiency && pay.total() != g.worth[top] {
            rep.efficiency = false;
            rep.efficiency_witness = Some(format!(
                "{name}: payoffs sum to {}, worth of the grand profile is {}",
                format_q(&pay.total()),
                format_q(&g.worth[top])
            ));
        }
        if rep.null_agent {
            if let Some(i) = null_agents(d, g)
                .into_iter()
                .find(|&i| !pay.get(i).is_zero())
            {
                rep.null_agent = false;
                rep.null_agent_witness = Some(format!(
                    "{name}: null agent {i} receives {}",
                    format_q(&pay.get(i))
                ));
            }
        }
    }
    for k in 0..games.len() {
        if !rep.linearity {
            break;
        }
        let j = (k + 1) % games.len();
        let a = alpha(k);
        let combo = games[k].1.combine(&a, &games[j].1);
        let lhs = value(&combo)?;
        for i in d.agents().agents() {
            if lhs.get(i) != &a * pays[k].get(i) + pays[j].get(i) {
                rep.linearity = false;
                rep.linearity_witness = Some(format!(
                    "α = {} on {} and {}: agent {i} is not linear",
                    format_q(&a),
                    games[k].0,
                    games[j].0
                ));
                break;
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{equal_split_coefficients, marginalist_value};
    use crate::product::{build_product, Profile};
    use crate::rational::int;
    use crate::set_system::{uniform_path_flow, validate_set_system, SetSystem};

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
    fn hypercube_flows() {
        let h2 = Hypercube::new(2).unwrap();
        assert!(shapley_hypercube_flow(&h2)
            .weights
            .iter()
            .all(|w| *w == frac(1, 2)));
        let h1 = Hypercube::new(1).unwrap();
        assert_eq!(shapley_hypercube_flow(&h1).weights, vec![int(1)]);
        let h3 = Hypercube::new(3).unwrap();
        let f = shapley_hypercube_flow(&h3);
        for e in 0..h3.digraph().edge_count() {
            if h3.edge_label(e).0.count_ones() == 2 {
                assert_eq!(f.weights[e], frac(1, 6));
            }
        }
    }

    #[test]
    fn upper_games() {
        let pd = example1();
        let h = Hypercube::new(2).unwrap();
        let g = Game::from_fn(&pd, |v| int(v as i64)).unwrap();
        let up = upper_game(&pd, &h, &g, 0, c(&[1, 2, 3])).unwrap();
        for s in 0..4u64 {
            let kq = if s & 1 == 1 {
                pd.factor(0).vertex_count() - 1
            } else {
                0
            };
            let k = pd.layer_vertex(s, 0, kq);
            assert_eq!(up.worth[h.vertex(s)], g.worth[k]);
        }
        let up = upper_game(&pd, &h, &g, 0, c(&[1])).unwrap();
        let k = pd
            .find_profile(&Profile(vec![c(&[1]), c(&[3, 4, 5])]))
            .unwrap();
        assert_eq!(up.worth[h.vertex(0b11)], g.worth[k]);
        let up = upper_game(&pd, &h, &g, 0, Coalition::EMPTY).unwrap();
        assert!(null_agents(h.digraph(), &up).contains(&1));
        assert!(matches!(
            upper_game(&pd, &h, &g, 0, c(&[2])),
            Err(Error::InfeasibleCoalition(..))
        ));
    }

    #[test]
    fn shapley_like() {
        let f1 = validate_set_system(c(&[1, 2, 3]), &[c(&[]), c(&[1]), c(&[2, 3]), c(&[1, 2, 3])])
            .unwrap();
        let d = crate::set_system::covering_digraph(&f1);
        let g = dirac_game(&d, d.sink()).unwrap();
        let pay = shapley_like_value(&d, &g).unwrap();
        assert_eq!(pay.get(1), frac(1, 2));
        assert_eq!(pay.get(2), frac(1, 4));
        assert_eq!(pay.get(3), frac(1, 4));
        let f2 = validate_set_system(c(&[3, 4, 5]), &[c(&[]), c(&[3, 4]), c(&[3, 4, 5])]).unwrap();
        let d = crate::set_system::covering_digraph(&f2);
        let g = Game::new(&d, vec![int(0), int(4), int(10)]).unwrap();
        let pay = shapley_like_value(&d, &g).unwrap();
        assert_eq!(
            (pay.get(3), pay.get(4), pay.get(5)),
            (int(2), int(2), int(6))
        );
    }

    #[test]
    fn az_zero_and_errors() {
        let pd = example1();
        assert!(matches!(
            az_value(&pd, &Game::zero(&pd)),
            Err(Error::NotPowerSet(1))
        ));
        let p = build_product(
            &[
                SetSystem::power_set(c(&[1, 2])).unwrap(),
                SetSystem::power_set(c(&[2, 3])).unwrap(),
            ],
            3,
        )
        .unwrap();
        let z = az_value(&p, &Game::zero(&p)).unwrap();
        assert!(z.pay.values().all(|x| x.is_zero()));
        let g = Game::from_fn(&p, |v| int((v * v) as i64)).unwrap();
        let f = az_flow(&p).unwrap();
        assert_eq!(
            az_value(&p, &g).unwrap(),
            flow_method_value(&p, &g, &f).unwrap()
        );
    }

    #[test]
    fn two_step_matches_composition_on_example1() {
        let pd = example1();
        let h = Hypercube::new(2).unwrap();
        let lm = shapley_hypercube_flow(&h);
        let ff: Vec<Flow> = pd.factors().iter().map(uniform_path_flow).collect();
        let g = Game::from_fn(&pd, |v| frac((v * 7 % 5) as i64, (v % 3 + 1) as i64)).unwrap();
        let a = two_step_value(&pd, &g, &lm, &ff).unwrap();
        let f = compose_two_step_flow(&pd, &lm, &ff).unwrap();
        assert_eq!(a, flow_method_value(&pd, &g, &f).unwrap());
        assert_eq!(a.total(), g.worth[pd.top()]);
        let z = two_step_value(&pd, &Game::zero(&pd), &lm, &ff).unwrap();
        assert!(z.pay.values().all(|x| x.is_zero()));
    }

    #[test]
    fn configuration_value_single_block_is_shapley() {
        // v(S) = 1 iff {1,2} ⊆ S: Shapley gives 1/2, 1/2, 0
        let worth: Vec<Q> = (0..8u64)
            .map(|s| if s & 0b011 == 0b011 { int(1) } else { int(0) })
            .collect();
        let v = TuGame::new(3, worth).unwrap();
        let pay = configuration_value(&v, &[Coalition::full(3)]).unwrap();
        assert_eq!(
            (pay.get(1), pay.get(2), pay.get(3)),
            (frac(1, 2), frac(1, 2), int(0))
        );
    }

    #[test]
    fn audits() {
        let pd = example1();
        let h = Hypercube::new(2).unwrap();
        let ff: Vec<Flow> = pd.factors().iter().map(uniform_path_flow).collect();
        let f = compose_two_step_flow(&pd, &shapley_hypercube_flow(&h), &ff).unwrap();
        let sample: Vec<Game> = (0..20)
            .map(|k| {
                Game::from_fn(&pd, |v| {
                    frac(((v * (k + 3)) % 11) as i64, (k % 4 + 1) as i64)
                })
                .unwrap()
            })
            .map(|g| {
                let mut g = g;
                g.worth[0] = Q::zero();
                g
            })
            .collect();
        let rep = audit_value(&pd, |g| flow_method_value(&pd, g, &f), &sample).unwrap();
        assert!(rep.efficiency && rep.null_agent && rep.linearity);
        // broken conservation
        let mut bad = f.clone();
        bad.weights[3] += int(1);
        let coeffs = equal_split_coefficients(&pd, &bad);
        let rep = audit_value(&pd, |g| marginalist_value(&pd, g, &coeffs), &sample).unwrap();
        assert!(!rep.efficiency && rep.null_agent && rep.linearity);
        let zero = |_: &Game| Ok(PayoffVector::zero(pd.agents()));
        let rep = audit_value(&pd, zero, &sample).unwrap();
        assert!(!rep.efficiency);
    }
}
