//! Corpus generators shared by the integration tests.
#![allow(dead_code)]

use fairdiv_core::efx_multigraph::{classify_components, BiValuedGraph};
use fairdiv_core::fairness::{check, Criterion};
use fairdiv_core::gadgets::Circuit;
use fairdiv_core::model::{graphical_to_instance, Edge, Instance, Multigraph, Orientation};
use fairdiv_core::rational::int;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_instance(rng: &mut ChaCha8Rng, n: usize, m: usize, lo: i64, hi: i64) -> Instance {
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|_| (0..m).map(|_| rng.gen_range(lo..=hi)).collect())
        .collect();
    Instance::from_ints(&rows).unwrap()
}

/// Vertex pairs `(a, b)` with `a < b` on `n` vertices.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect()
}

pub fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            for (x, y) in [(a, b), (b, a)] {
                if x == v && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    seen.iter().all(|&s| s)
}

/// Every connected simple graph on exactly `n` labelled vertices with at
/// most `max_edges` edges.
pub fn connected_graphs(n: usize, max_edges: usize) -> Vec<Vec<(usize, usize)>> {
    let all = pairs(n);
    let mut out = Vec::new();
    for mask in 0u32..1 << all.len() {
        if mask.count_ones() as usize > max_edges || (n > 1 && (mask.count_ones() as usize) < n - 1)
        {
            continue;
        }
        let edges: Vec<(usize, usize)> = (0..all.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| all[i])
            .collect();
        if is_connected(n, &edges) {
            out.push(edges);
        }
    }
    out
}

/// Chores graph on `pairs` with integer endpoint weights.
pub fn chores_graph(n: usize, pairs: &[(usize, usize)], weights: &[(i64, i64)]) -> Multigraph {
    let es: Vec<(usize, usize, i64, i64)> = pairs
        .iter()
        .zip(weights)
        .map(|(&(a, b), &(wa, wb))| (a, b, wa, wb))
        .collect();
    Multigraph::from_int_edges(n, &es).unwrap()
}

/// A simple chores graph (self-loops allowed, no parallel edges) with
/// endpoint weights drawn from `weights`.
pub fn random_chores_graph(
    rng: &mut ChaCha8Rng,
    max_v: usize,
    max_e: usize,
    weights: &[i64],
) -> Multigraph {
    let n = rng.gen_range(1..=max_v);
    let mut slots: Vec<(usize, usize)> = pairs(n);
    slots.extend((0..n).map(|v| (v, v)));
    slots.shuffle(rng);
    let m = rng.gen_range(0..=max_e.min(slots.len()));
    let es: Vec<(usize, usize, i64, i64)> = slots[..m]
        .iter()
        .map(|&(a, b)| {
            let wa = *weights.choose(rng).unwrap();
            let wb = if a == b {
                wa
            } else {
                *weights.choose(rng).unwrap()
            };
            (a, b, wa, wb)
        })
        .collect();
    Multigraph::from_int_edges(n, &es).unwrap()
}

/// A symmetric bi-valued multigraph with weights `alpha` and `beta` and at
/// most `q` copies of any edge or self-loop.
pub fn random_bivalued(
    rng: &mut ChaCha8Rng,
    max_v: usize,
    max_e: usize,
    q: usize,
    alpha: i64,
    beta: i64,
) -> BiValuedGraph {
    let n = rng.gen_range(1..=max_v);
    let m = rng.gen_range(0..=max_e);
    let mut edges: Vec<Edge> = Vec::new();
    for _ in 0..m {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let mult = edges
            .iter()
            .filter(|e| (e.a, e.b) == (a, b) || (e.a, e.b) == (b, a))
            .count();
        if mult >= q {
            continue;
        }
        let w = if rng.gen_bool(0.5) { alpha } else { beta };
        edges.push(Edge::new(
            format!("e{}", edges.len() + 1),
            a,
            b,
            int(w),
            int(w),
        ));
    }
    BiValuedGraph::new(Multigraph::new(n, edges).unwrap(), int(alpha), int(beta)).unwrap()
}

pub fn has_ntom(bg: &BiValuedGraph) -> bool {
    classify_components(bg).iter().any(|k| k.ntom)
}

/// Two vertices joined by one heavy edge, each with `q` light self-loops.
pub fn ntom_pair(q: usize, alpha: i64, beta: i64) -> BiValuedGraph {
    let mut edges = vec![Edge::new("h", 0, 1, int(alpha), int(alpha))];
    for v in 0..2 {
        for k in 0..q {
            edges.push(Edge::new(format!("l{v}_{k}"), v, v, int(beta), int(beta)));
        }
    }
    BiValuedGraph::new(Multigraph::new(2, edges).unwrap(), int(alpha), int(beta)).unwrap()
}

/// Whether `pi` is a complete orientation meeting `criterion` according to
/// the allocation checker.
pub fn passes(g: &Multigraph, pi: &Orientation, criterion: Criterion) -> bool {
    pi.is_complete(g).unwrap()
        && check(
            &graphical_to_instance(g),
            &pi.to_allocation(g).unwrap(),
            criterion,
        )
        .unwrap()
        .holds
}

/// Circuits over exactly `k` inputs with at most `max_gates` NOT, OR and
/// TRUE gates, every signal used and the last gate the output. OR inputs
/// are ordered and no gate repeats an earlier one.
pub fn circuits(k: usize, max_gates: usize) -> Vec<Circuit> {
    fn rec(k: usize, max: usize, gates: &mut Vec<(u8, usize, usize)>, out: &mut Vec<Circuit>) {
        if !gates.is_empty() {
            let n = k + gates.len();
            let mut used = vec![false; n];
            used[n - 1] = true;
            for &(t, a, b) in gates.iter() {
                used[a] |= t >= 1;
                used[b] |= t == 2;
            }
            if used.iter().all(|&u| u) {
                let mut s: String = (0..k).map(|i| format!("s{i} = INPUT\n")).collect();
                for (i, &(t, a, b)) in gates.iter().enumerate() {
                    s += &match t {
                        0 => format!("s{} = TRUE\n", k + i),
                        1 => format!("s{} = NOT s{a}\n", k + i),
                        _ => format!("s{} = OR s{a} s{b}\n", k + i),
                    };
                }
                s += &format!("OUTPUT s{}\n", n - 1);
                out.push(s.parse().unwrap());
            }
        }
        if gates.len() == max {
            return;
        }
        let n = k + gates.len();
        let mut cands = vec![(0u8, 0, 0)];
        for a in 0..n {
            cands.push((1, a, 0));
            cands.extend((a + 1..n).map(|b| (2, a, b)));
        }
        for c in cands {
            if !gates.contains(&c) {
                gates.push(c);
                rec(k, max, gates, out);
                gates.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(k, max_gates, &mut Vec::new(), &mut out);
    out
}
