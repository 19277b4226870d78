//! Brute-force oracles, fixtures and random generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use cfgflow_core::rational::{frac, int};
use cfgflow_core::{
    build_product, validate_set_system, Coalition, Dag, EdgeList, Flow, Game, ProductDigraph,
    Profile, SetSystem, Q,
};
use itertools::Itertools;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(a: &[u32]) -> Coalition {
    Coalition::of(a)
}

pub fn f1() -> SetSystem {
    validate_set_system(c(&[1, 2, 3]), &[c(&[]), c(&[1]), c(&[2, 3]), c(&[1, 2, 3])]).unwrap()
}

pub fn f2() -> SetSystem {
    validate_set_system(c(&[3, 4, 5]), &[c(&[]), c(&[3, 4]), c(&[3, 4, 5])]).unwrap()
}

pub fn example1() -> ProductDigraph {
    build_product(&[f1(), f2()], 5).unwrap()
}

/// P₁ = {1,2,3,4}, P₂ = {1,5}.
pub fn overlap_instance() -> ProductDigraph {
    let a = validate_set_system(
        c(&[1, 2, 3, 4]),
        &[c(&[]), c(&[1, 2]), c(&[2, 3]), c(&[1, 2, 3, 4])],
    )
    .unwrap();
    let b = validate_set_system(c(&[1, 5]), &[c(&[]), c(&[1, 5])]).unwrap();
    build_product(&[a, b], 5).unwrap()
}

pub fn profile(parts: &[&[u32]]) -> Profile {
    Profile(parts.iter().map(|p| c(p)).collect())
}

pub fn edge_between(pd: &ProductDigraph, a: &[&[u32]], b: &[&[u32]]) -> usize {
    let t = pd.find_profile(&profile(a)).unwrap();
    let h = pd.find_profile(&profile(b)).unwrap();
    pd.find_edge(t, h).expect("edge exists")
}

/// Shapley value by averaging marginal contributions over all n! orders.
pub fn shapley_oracle(n: u32, v: impl Fn(Coalition) -> Q) -> BTreeMap<u32, Q> {
    let mut out: BTreeMap<u32, Q> = (1..=n).map(|i| (i, Q::zero())).collect();
    let mut count = 0u64;
    for order in (1..=n).permutations(n as usize) {
        let mut s = Coalition::EMPTY;
        for i in order {
            let t = s.with(i);
            *out.get_mut(&i).unwrap() += v(t) - v(s);
            s = t;
        }
        count += 1;
    }
    for x in out.values_mut() {
        *x /= int(count as i64);
    }
    out
}

/// Owen value of a partition: average over block orders and orders inside each block.
pub fn owen_oracle(n: u32, blocks: &[Coalition], v: impl Fn(Coalition) -> Q) -> BTreeMap<u32, Q> {
    let m = blocks.len();
    let all = blocks.iter().fold(Coalition::EMPTY, |a, &b| a.union(b));
    let sizes: u32 = blocks.iter().map(|b| b.len()).sum();
    assert!(all == Coalition::full(n) && sizes == n, "not a partition");
    let mut out: BTreeMap<u32, Q> = (1..=n).map(|i| (i, Q::zero())).collect();
    let inner: Vec<Vec<Vec<u32>>> = blocks
        .iter()
        .map(|b| {
            let a: Vec<u32> = b.agents().collect();
            a.iter().copied().permutations(a.len()).collect()
        })
        .collect();
    let mut count = 0u64;
    for outer in (0..m).permutations(m) {
        for choice in inner.iter().map(|v| v.iter()).multi_cartesian_product() {
            let mut s = Coalition::EMPTY;
            for &q in &outer {
                for &i in choice[q] {
                    let t = s.with(i);
                    *out.get_mut(&i).unwrap() += v(t) - v(s);
                    s = t;
                }
            }
            count += 1;
        }
    }
    for x in out.values_mut() {
        *x /= int(count as i64);
    }
    out
}

/// Maximal chains of a set system, computed from the covering relation directly.
pub fn maximal_chains(sys: &SetSystem) -> Vec<Vec<Coalition>> {
    let f = sys.members();
    let covers = |a: Coalition, b: Coalition| {
        a.is_proper_subset(b)
            && !f
                .iter()
                .any(|&k| a.is_proper_subset(k) && k.is_proper_subset(b))
    };
    let mut done = Vec::new();
    let mut stack = vec![vec![Coalition::EMPTY]];
    while let Some(chain) = stack.pop() {
        let last = *chain.last().unwrap();
        if last == sys.ground() {
            done.push(chain);
            continue;
        }
        for &k in f {
            if covers(last, k) {
                let mut next = chain.clone();
                next.push(k);
                stack.push(next);
            }
        }
    }
    done
}

/// Relevant maximal paths of the product as profile sequences, one per
/// (block order, factor chain per block).
pub fn relevant_maximal_paths(systems: &[SetSystem]) -> Vec<Vec<Profile>> {
    let m = systems.len();
    let chains: Vec<Vec<Vec<Coalition>>> = systems.iter().map(maximal_chains).collect();
    let mut out = Vec::new();
    for order in (0..m).permutations(m) {
        for pick in chains.iter().map(|c| c.iter()).multi_cartesian_product() {
            let mut cur = vec![Coalition::EMPTY; m];
            let mut path = vec![Profile(cur.clone())];
            for &q in &order {
                for &k in &pick[q][1..] {
                    cur[q] = k;
                    path.push(Profile(cur.clone()));
                }
            }
            out.push(path);
        }
    }
    out
}

/// Sum of path indicators over all relevant maximal paths, divided by their number.
pub fn relevant_path_flow(pd: &ProductDigraph, systems: &[SetSystem]) -> Flow {
    let paths = relevant_maximal_paths(systems);
    let w = frac(1, paths.len() as i64);
    let mut f = Flow::zero(pd.edge_count());
    for p in &paths {
        for (a, b) in p.iter().tuple_windows() {
            let e = pd
                .find_edge(pd.find_profile(a).unwrap(), pd.find_profile(b).unwrap())
                .expect("path edge");
            f.weights[e] += &w;
        }
    }
    f
}

/// Average over relevant maximal paths of marginal contributions, split equally among the
/// agents that join on each step.
pub fn relevant_path_value(
    pd: &ProductDigraph,
    systems: &[SetSystem],
    g: &Game,
) -> BTreeMap<u32, Q> {
    let paths = relevant_maximal_paths(systems);
    let mut out: BTreeMap<u32, Q> = (1..=pd.n()).map(|i| (i, Q::zero())).collect();
    for p in &paths {
        for (a, b) in p.iter().tuple_windows() {
            let (va, vb) = (pd.find_profile(a).unwrap(), pd.find_profile(b).unwrap());
            let q = (0..a.0.len()).find(|&q| a.0[q] != b.0[q]).unwrap();
            let movers = b.0[q].difference(a.0[q]);
            let share = (&g.worth[vb] - &g.worth[va]) / int(movers.len() as i64);
            for i in movers.agents() {
                *out.get_mut(&i).unwrap() += &share;
            }
        }
    }
    let k = int(paths.len() as i64);
    for x in out.values_mut() {
        *x /= &k;
    }
    out
}

pub fn random_q<R: Rng>(rng: &mut R) -> Q {
    frac(rng.gen_range(-9..=9), rng.gen_range(1..=4))
}

pub fn random_nonzero_q<R: Rng>(rng: &mut R) -> Q {
    loop {
        let x = random_q(rng);
        if !x.is_zero() {
            return x;
        }
    }
}

/// Normal set system on `ground` with up to `extra` random intermediate members.
pub fn random_system<R: Rng>(rng: &mut R, ground: Coalition, extra: usize) -> SetSystem {
    let mut family = vec![Coalition::EMPTY, ground];
    let subsets = ground.subsets();
    for _ in 0..extra {
        family.push(*subsets.choose(rng).unwrap());
    }
    family.sort_by_key(|k| k.canonical_key());
    family.dedup();
    validate_set_system(ground, &family).unwrap()
}

/// Blocks covering `1..=n`, each non-empty, overlaps allowed.
pub fn random_blocks<R: Rng>(rng: &mut R, n: u32, m: usize) -> Vec<Coalition> {
    let mut agents: Vec<u32> = (1..=n).collect();
    agents.shuffle(rng);
    let mut blocks = vec![Coalition::EMPTY; m];
    for (k, &i) in agents.iter().enumerate() {
        let q = if k < m { k } else { rng.gen_range(0..m) };
        blocks[q] = blocks[q].with(i);
    }
    for i in 1..=n {
        if rng.gen_bool(0.2) {
            let q = rng.gen_range(0..m);
            blocks[q] = blocks[q].with(i);
        }
    }
    blocks
}

pub struct RandomInstance {
    pub n: u32,
    pub systems: Vec<SetSystem>,
    pub pd: ProductDigraph,
}

pub fn random_instance<R: Rng>(rng: &mut R, n_max: u32, m_max: usize) -> RandomInstance {
    let m = rng.gen_range(1..=m_max);
    let n = rng.gen_range(m as u32..=n_max);
    let blocks = random_blocks(rng, n, m);
    let systems: Vec<SetSystem> = blocks
        .iter()
        .map(|&b| {
            let extra = rng.gen_range(0..=8);
            random_system(rng, b, extra)
        })
        .collect();
    let pd = build_product(&systems, n).unwrap();
    RandomInstance { n, systems, pd }
}

pub fn random_game<R: Rng, D: Dag + ?Sized>(rng: &mut R, d: &D) -> Game {
    let mut w: Vec<Q> = (0..d.vertex_count()).map(|_| random_q(rng)).collect();
    w[d.source()] = Q::zero();
    Game::new(d, w).unwrap()
}

/// Random walk from the source to the sink, as edge ids.
pub fn random_path<R: Rng, D: Dag + ?Sized>(rng: &mut R, d: &D) -> Vec<usize> {
    let mut out_adj = vec![Vec::new(); d.vertex_count()];
    for (e, &(a, _)) in d.arcs().iter().enumerate() {
        out_adj[a].push(e);
    }
    let mut v = d.source();
    let mut path = Vec::new();
    while v != d.sink() {
        let e = *out_adj[v]
            .choose(rng)
            .expect("every non-sink vertex has an out-edge");
        path.push(e);
        v = d.arcs()[e].1;
    }
    path
}

pub fn path_flow(edges: usize, path: &[usize]) -> Flow {
    let mut f = Flow::zero(edges);
    for &e in path {
        f.weights[e] += Q::one();
    }
    f
}

/// Affine combination of random maximal path indicators (coefficients sum to 1).
pub fn random_unitary_flow<R: Rng, D: Dag + ?Sized>(rng: &mut R, d: &D) -> Flow {
    let k = rng.gen_range(1..=4);
    let mut f = Flow::zero(d.edge_count());
    let mut left = Q::one();
    for j in 0..k {
        let coef = if j + 1 == k {
            left.clone()
        } else {
            random_q(rng)
        };
        left -= &coef;
        f.add_scaled(&path_flow(d.edge_count(), &random_path(rng, d)), &coef);
    }
    f
}

/// Weakly connected DAG: a random spanning tree plus extra arcs, all oriented
/// along a hidden random topological order.
pub fn random_connected_dag<R: Rng>(rng: &mut R, vertices: usize) -> EdgeList {
    let mut order: Vec<usize> = (0..vertices).collect();
    order.shuffle(rng);
    let mut pairs: Vec<(usize, usize)> = (1..vertices).map(|b| (rng.gen_range(0..b), b)).collect();
    for _ in 0..rng.gen_range(0..=vertices) {
        let a = rng.gen_range(0..vertices);
        let b = rng.gen_range(0..vertices);
        if a < b && !pairs.contains(&(a, b)) {
            pairs.push((a, b));
        }
    }
    pairs.shuffle(rng);
    EdgeList {
        vertices,
        arcs: pairs.iter().map(|&(a, b)| (order[a], order[b])).collect(),
        source: order[0],
        sink: order[vertices - 1],
    }
}

/// Charges summing to zero.
pub fn random_charges<R: Rng>(rng: &mut R, vertices: usize) -> Vec<Q> {
    let mut x: Vec<Q> = (0..vertices).map(|_| random_q(rng)).collect();
    let total: Q = x.iter().sum();
    let j = rng.gen_range(0..vertices);
    x[j] -= total;
    x
}
