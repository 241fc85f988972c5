//! Round-robin and envy-cycle allocation algorithms.

use std::collections::VecDeque;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, precondition, Result};
use crate::model::{Allocation, Instance, InstanceKind, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvyGraphKind {
    Plain,
    TopTrading,
}

/// Envy relation of a (partial) allocation, restricted to `active` agents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvyGraph {
    pub kind: EnvyGraphKind,
    pub adj: Vec<Vec<usize>>,
}

impl EnvyGraph {
    pub fn build(
        inst: &Instance,
        bundles: &[Vec<usize>],
        kind: EnvyGraphKind,
        active: &[bool],
    ) -> Self {
        let n = inst.n;
        let mut adj = vec![Vec::new(); n];
        for i in (0..n).filter(|&i| active[i]) {
            let vals: Vec<Value> = bundles.iter().map(|b| inst.value_of(i, b)).collect();
            let best = vals.iter().max().cloned().expect("n >= 1");
            for j in (0..n).filter(|&j| j != i && active[j]) {
                let envies = vals[i] < vals[j];
                let top = kind == EnvyGraphKind::Plain || vals[j] == best;
                if envies && top {
                    adj[i].push(j);
                }
            }
        }
        EnvyGraph { kind, adj }
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.adj.iter().filter(|a| a.contains(&v)).count()
    }

    /// Shortest cycle through the lowest vertex lying on any cycle; paths are
    /// explored in increasing vertex order.
    pub fn find_cycle(&self) -> Option<Vec<usize>> {
        let n = self.adj.len();
        for s in 0..n {
            let mut parent = vec![usize::MAX; n];
            let mut seen = vec![false; n];
            let mut q = VecDeque::from([s]);
            seen[s] = true;
            while let Some(u) = q.pop_front() {
                for &v in &self.adj[u] {
                    if v == s {
                        let mut cyc = vec![u];
                        let mut x = u;
                        while x != s {
                            x = parent[x];
                            cyc.push(x);
                        }
                        cyc.reverse();
                        return Some(cyc);
                    }
                    if !seen[v] {
                        seen[v] = true;
                        parent[v] = u;
                        q.push_back(v);
                    }
                }
            }
        }
        None
    }
}

fn check_order(order: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if order.len() != n
        || order
            .iter()
            .any(|&i| i >= n || std::mem::replace(&mut seen[i], true))
    {
        return invalid(format!("picking order must be a permutation of 0..{n}"));
    }
    Ok(())
}

/// Picks for agents in turn; ties go to the smallest item index. With
/// `pass`, an agent who values every remaining item below zero skips its
/// turn, as if taking a zero dummy. Every item must then be worth at least
/// zero to some agent.
fn picking(
    inst: &Instance,
    items: &[usize],
    order: &[usize],
    pass: bool,
    bundles: &mut [Vec<usize>],
) {
    let mut left: Vec<usize> = items.to_vec();
    let mut turn = 0;
    while !left.is_empty() {
        let i = order[turn % order.len()];
        turn += 1;
        let mut best = 0;
        for k in 1..left.len() {
            if inst.value(i, left[k]) > inst.value(i, left[best]) {
                best = k;
            }
        }
        if pass && inst.value(i, left[best]) < Value::zero() {
            continue;
        }
        bundles[i].push(left.remove(best));
    }
}

pub fn round_robin(inst: &Instance, order: &[usize]) -> Result<Allocation> {
    if inst.kind() == InstanceKind::Mixed {
        return precondition(
            "round-robin needs a goods or a chores instance; use double_round_robin",
        );
    }
    round_robin_any(inst, order)
}

/// Round-robin without the instance-kind precondition. On mixed instances
/// the result need not be EF1.
pub fn round_robin_any(inst: &Instance, order: &[usize]) -> Result<Allocation> {
    check_order(order, inst.n)?;
    let mut bundles = vec![Vec::new(); inst.n];
    picking(
        inst,
        &(0..inst.m()).collect::<Vec<_>>(),
        order,
        false,
        &mut bundles,
    );
    Ok(Allocation::from_indices(inst, &bundles))
}

fn is_objective_chore(inst: &Instance, j: usize) -> bool {
    (0..inst.n).all(|i| inst.is_forbidden(i, j) || !inst.utilities[i][j].is_positive())
}

/// Objective chores first with order `0..n`, padded with zero dummies to a
/// multiple of `n`; then the rest with the reversed order. In the second
/// phase an agent passes when every remaining item is negative to it.
pub fn double_round_robin(inst: &Instance) -> Result<Allocation> {
    let n = inst.n;
    let m = inst.m();
    let minus: Vec<usize> = (0..m).filter(|&j| is_objective_chore(inst, j)).collect();
    let plus: Vec<usize> = (0..m).filter(|&j| !is_objective_chore(inst, j)).collect();
    let pad = (n - minus.len() % n) % n;
    let (padded, _) = inst.with_dummies(pad);
    let mut phase1 = minus.clone();
    phase1.extend(m..m + pad);
    let forward: Vec<usize> = (0..n).collect();
    let backward: Vec<usize> = (0..n).rev().collect();
    let mut bundles = vec![Vec::new(); n];
    picking(&padded, &phase1, &forward, false, &mut bundles);
    picking(&padded, &plus, &backward, true, &mut bundles);
    for b in &mut bundles {
        b.retain(|&j| j < m);
    }
    Ok(Allocation::from_indices(inst, &bundles))
}

fn total_envy(inst: &Instance, bundles: &[Vec<usize>]) -> Value {
    let mut t = Value::zero();
    for i in 0..inst.n {
        let own = inst.value_of(i, &bundles[i]);
        for b in bundles {
            let v = inst.value_of(i, b);
            if v > own {
                t = t + (v - own.clone());
            }
        }
    }
    t
}

/// Every agent on `cycle` takes the bundle of the agent it envies.
fn shift(inst: &Instance, bundles: &mut [Vec<usize>], cycle: &[usize]) {
    let before = total_envy(inst, bundles);
    let first = bundles[cycle[0]].clone();
    for w in 0..cycle.len() {
        let next = if w + 1 < cycle.len() {
            bundles[cycle[w + 1]].clone()
        } else {
            first.clone()
        };
        bundles[cycle[w]] = next;
    }
    debug_assert!(
        total_envy(inst, bundles) < before,
        "cycle shift must reduce total envy"
    );
}

fn eliminate(
    inst: &Instance,
    bundles: &mut [Vec<usize>],
    kind: EnvyGraphKind,
    active: &[bool],
) -> EnvyGraph {
    loop {
        let g = EnvyGraph::build(inst, bundles, kind, active);
        match g.find_cycle() {
            Some(c) => shift(inst, bundles, &c),
            None => return g,
        }
    }
}

fn give_unenvied(inst: &Instance, bundles: &mut [Vec<usize>], j: usize, active: &[bool]) {
    let g = eliminate(inst, bundles, EnvyGraphKind::Plain, active);
    let i = (0..inst.n)
        .find(|&v| active[v] && g.in_degree(v) == 0)
        .expect("acyclic graph has a source");
    bundles[i].push(j);
}

fn give_sink(inst: &Instance, bundles: &mut [Vec<usize>], j: usize) {
    let all = vec![true; inst.n];
    let g = eliminate(inst, bundles, EnvyGraphKind::TopTrading, &all);
    let i = (0..inst.n)
        .find(|&v| g.adj[v].is_empty())
        .expect("acyclic graph has a sink");
    bundles[i].push(j);
}

pub fn envy_cycle_elimination(inst: &Instance) -> Result<Allocation> {
    if inst.kind() != InstanceKind::Goods {
        return precondition("envy-cycle elimination needs a goods instance");
    }
    let all = vec![true; inst.n];
    let mut bundles = vec![Vec::new(); inst.n];
    for j in 0..inst.m() {
        give_unenvied(inst, &mut bundles, j, &all);
    }
    Ok(Allocation::from_indices(inst, &bundles))
}

/// Each chore goes to an agent who envies nobody, after clearing all
/// top-trading cycles.
pub fn top_trading_ece(inst: &Instance) -> Result<Allocation> {
    if !(0..inst.m()).all(|j| is_objective_chore(inst, j)) {
        return precondition("top-trading envy-cycle elimination needs a chores instance");
    }
    let mut bundles = vec![Vec::new(); inst.n];
    for j in 0..inst.m() {
        give_sink(inst, &mut bundles, j);
    }
    Ok(Allocation::from_indices(inst, &bundles))
}

pub fn double_ece(inst: &Instance) -> Result<Allocation> {
    let mut bundles = vec![Vec::new(); inst.n];
    let m = inst.m();
    for j in (0..m).filter(|&j| !is_objective_chore(inst, j)) {
        let active: Vec<bool> = (0..inst.n)
            .map(|i| !inst.is_forbidden(i, j) && !inst.utilities[i][j].is_negative())
            .collect();
        give_unenvied(inst, &mut bundles, j, &active);
    }
    for j in (0..m).filter(|&j| is_objective_chore(inst, j)) {
        give_sink(inst, &mut bundles, j);
    }
    Ok(Allocation::from_indices(inst, &bundles))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Rr,
    Drr,
    Ece,
    Ttece,
    Dece,
}

impl std::str::FromStr for Algorithm {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "rr" => Algorithm::Rr,
            "drr" => Algorithm::Drr,
            "ece" => Algorithm::Ece,
            "ttece" => Algorithm::Ttece,
            "dece" => Algorithm::Dece,
            _ => return Err(crate::Error::Parse(format!("unknown algorithm {s:?}"))),
        })
    }
}

pub fn allocate(inst: &Instance, algo: Algorithm, order: Option<&[usize]>) -> Result<Allocation> {
    match algo {
        Algorithm::Rr => {
            let default: Vec<usize> = (0..inst.n).collect();
            round_robin(inst, order.unwrap_or(&default))
        }
        Algorithm::Drr => double_round_robin(inst),
        Algorithm::Ece => envy_cycle_elimination(inst),
        Algorithm::Ttece => top_trading_ece(inst),
        Algorithm::Dece => double_ece(inst),
    }
}
