//! Brute-force ground truth. Every search enumerates candidates in a fixed
//! lexicographic order and returns the first witness.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fairness::{pair_violation, Criterion, PairCrit};
use crate::gadgets::Circuit;
use crate::model::{
    graphical_to_instance, Allocation, Instance, InstanceKind, Multigraph, Orientation,
};
use crate::rational::scale_rows;
use crate::twosat::TwoSatFormula;

pub const DEFAULT_BUDGET: u64 = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OnExceed {
    Error,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_states: u64,
    pub on_exceed: OnExceed,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_states: DEFAULT_BUDGET,
            on_exceed: OnExceed::Error,
        }
    }
}

impl SearchBudget {
    pub fn new(max_states: u64, on_exceed: OnExceed) -> Result<Self> {
        if max_states == 0 {
            return invalid("a search budget needs at least one state");
        }
        Ok(SearchBudget {
            max_states,
            on_exceed,
        })
    }

    /// `Ok(true)` when `states` fits, `Ok(false)` when it does not and the
    /// budget asks for an unknown verdict.
    fn admits(&self, states: Option<u64>) -> Result<bool> {
        match states {
            Some(s) if s <= self.max_states => Ok(true),
            _ if self.on_exceed == OnExceed::Unknown => Ok(false),
            _ => Err(Error::BudgetExceeded(self.max_states)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "verdict", content = "witness")]
pub enum Search<T> {
    Found(T),
    None,
    Unknown,
}

impl<T> Search<T> {
    pub fn found(&self) -> Option<&T> {
        match self {
            Search::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn into_option(self) -> Option<T> {
        match self {
            Search::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn exists(&self) -> Option<bool> {
        match self {
            Search::Found(_) => Some(true),
            Search::None => Some(false),
            Search::Unknown => None,
        }
    }
}

/// Every orientation of `g`. Each non-loop edge picks endpoint `a` before
/// endpoint `b`, with the first edge varying slowest. `visit` sees the head
/// of every edge. Costs 2^(non-loop edges) states.
pub fn enumerate_orientations(
    g: &Multigraph,
    budget: &SearchBudget,
    mut visit: impl FnMut(&[usize]) -> bool,
) -> Result<Search<Orientation>> {
    let free: Vec<usize> = (0..g.edges.len())
        .filter(|&k| !g.edges[k].is_loop())
        .collect();
    let states = u32::try_from(free.len())
        .ok()
        .and_then(|k| 1u64.checked_shl(k));
    if !budget.admits(states)? {
        return Ok(Search::Unknown);
    }
    let mut heads: Vec<usize> = g.edges.iter().map(|e| e.a).collect();
    let k = free.len();
    for mask in 0..states.expect("admitted budgets are finite") {
        for (pos, &e) in free.iter().enumerate() {
            let edge = &g.edges[e];
            heads[e] = if mask >> (k - 1 - pos) & 1 == 1 {
                edge.b
            } else {
                edge.a
            };
        }
        if visit(&heads) {
            return Ok(Search::Found(Orientation::from_heads(g, &heads)));
        }
    }
    Ok(Search::None)
}

/// Edge weights scaled to integers, with the instance kind of the graph.
struct IntGraph<'a> {
    g: &'a Multigraph,
    wa: Vec<i64>,
    wb: Vec<i64>,
    /// Edges touching each vertex, loops listed once.
    inc: Vec<Vec<usize>>,
    kind: InstanceKind,
    crit: PairCrit,
}

impl<'a> IntGraph<'a> {
    fn new(g: &'a Multigraph, criterion: Criterion) -> Result<Self> {
        let crit = match criterion {
            Criterion::Ef => PairCrit::Ef,
            Criterion::Ef1 => PairCrit::Ef1,
            Criterion::Efx0 => PairCrit::Efx0,
            Criterion::EfxMinus => PairCrit::EfxMinus,
            c => return invalid(format!("orientation search does not support {c}")),
        };
        let rows = vec![
            g.edges.iter().map(|e| e.wa.clone()).collect(),
            g.edges.iter().map(|e| e.wb.clone()).collect(),
        ];
        let (mut w, _) = scale_rows(&rows)
            .ok_or_else(|| Error::TooLarge("edge weights too large to scale".into()))?;
        let wb = w.pop().expect("two rows");
        let wa = w.pop().expect("two rows");
        let inc = (0..g.vertices)
            .map(|v| g.incident(v).map(|(k, _)| k).collect())
            .collect();
        Ok(IntGraph {
            g,
            wa,
            wb,
            inc,
            kind: graphical_to_instance(g).kind(),
            crit,
        })
    }

    fn at(&self, k: usize, v: usize) -> i64 {
        if self.g.edges[k].a == v {
            self.wa[k]
        } else {
            self.wb[k]
        }
    }

    /// Assigned edges per vertex. Unassigned heads are `usize::MAX`.
    fn received(&self, heads: &[usize]) -> Vec<usize> {
        let mut recv = vec![0; self.g.vertices];
        for &h in heads.iter().filter(|&&h| h != usize::MAX) {
            recv[h] += 1;
        }
        recv
    }

    /// Whether `v` violates the criterion toward some vertex, looking only at
    /// assigned edges, with `extra` added to its own bundle as one more item.
    /// `recv` counts the assigned edges of each vertex. Items not touching
    /// `v` are worth zero to it, so each other bundle reduces to the `v`
    /// edges it holds plus at most one zero.
    fn envies(&self, v: usize, heads: &[usize], recv: &[usize], extra: i64) -> bool {
        let mut own = Vec::new();
        if extra != 0 {
            own.push(extra);
        }
        let mut held: Vec<(usize, i64)> = Vec::new();
        for &k in &self.inc[v] {
            match heads[k] {
                usize::MAX => {}
                h if h == v => own.push(self.at(k, v)),
                h => held.push((h, self.at(k, v))),
            }
        }
        held.sort_unstable();
        let mut other = Vec::new();
        for group in held.chunk_by(|x, y| x.0 == y.0) {
            let j = group[0].0;
            other.clear();
            other.extend(group.iter().map(|&(_, w)| w));
            if recv[j] > group.len() {
                other.push(0);
            }
            if pair_violation(self.crit, self.kind, &own, &other).is_some() {
                return true;
            }
        }
        let (mut empty, mut zero) = (false, false);
        for j in (0..self.g.vertices).filter(|&j| j != v) {
            if held.iter().any(|&(h, _)| h == j) {
                continue;
            }
            if recv[j] > 0 {
                zero = true;
            } else {
                empty = true;
            }
        }
        (empty && pair_violation::<i64>(self.crit, self.kind, &own, &[]).is_some())
            || (zero && pair_violation(self.crit, self.kind, &own, &[0]).is_some())
    }
}

/// Whether a complete orientation meets a pairwise criterion (EF, EF1, EFX₀
/// or EFX₋), evaluated on integer-scaled weights.
pub fn orientation_holds(g: &Multigraph, heads: &[usize], criterion: Criterion) -> Result<bool> {
    let ig = IntGraph::new(g, criterion)?;
    let recv = ig.received(heads);
    Ok((0..g.vertices).all(|v| !ig.envies(v, heads, &recv, 0)))
}

/// Non-loop edges sorted so that each vertex's edges are assigned close
/// together: by the later, then the earlier, breadth-first rank of their
/// endpoints.
fn closing_order(g: &Multigraph) -> Vec<usize> {
    let mut rank = vec![usize::MAX; g.vertices];
    let mut next = 0;
    for s in 0..g.vertices {
        if rank[s] != usize::MAX {
            continue;
        }
        rank[s] = next;
        next += 1;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for (_, e) in g.incident(v) {
                let u = e.other(v);
                if rank[u] == usize::MAX {
                    rank[u] = next;
                    next += 1;
                    queue.push_back(u);
                }
            }
        }
    }
    let mut free: Vec<usize> = (0..g.edges.len())
        .filter(|&k| !g.edges[k].is_loop())
        .collect();
    free.sort_by_key(|&k| {
        let (x, y) = (rank[g.edges[k].a], rank[g.edges[k].b]);
        (x.max(y), x.min(y), k)
    });
    free
}

/// Depth-first search for an orientation meeting a pairwise criterion.
/// Two prunings, both sound:
/// - A vertex whose edges are all assigned is checked as the envier right
///   away. Later edges only add items it values at zero to other bundles,
///   which cannot remove a violation.
/// - On goods, a vertex that loses an edge is checked with its own bundle
///   topped up by everything it could still receive. Each criterion's
///   envy bound only grows as the envied bundle gains items.
///
/// A closed neighbour of the vertex that just received an edge is checked
/// again, since that edge is worth zero to it and only tightens its bounds.
/// Complete orientations get the full check. The budget counts edge
/// assignments.
pub fn search_orientation(
    g: &Multigraph,
    criterion: Criterion,
    budget: &SearchBudget,
) -> Result<Search<Orientation>> {
    let ig = IntGraph::new(g, criterion)?;
    let free = closing_order(g);
    let heads: Vec<usize> = g
        .edges
        .iter()
        .map(|e| if e.is_loop() { e.a } else { usize::MAX })
        .collect();
    let mut open = vec![0usize; g.vertices];
    let mut slack = vec![0i64; g.vertices];
    for &k in &free {
        let e = &g.edges[k];
        open[e.a] += 1;
        open[e.b] += 1;
        slack[e.a] += ig.wa[k];
        slack[e.b] += ig.wb[k];
    }
    struct Dfs<'a, 'b> {
        ig: &'b IntGraph<'a>,
        free: Vec<usize>,
        heads: Vec<usize>,
        recv: Vec<usize>,
        open: Vec<usize>,
        slack: Vec<i64>,
        goods: bool,
        nodes: u64,
        budget: SearchBudget,
    }
    impl Dfs<'_, '_> {
        fn dead(&self, v: usize) -> bool {
            if self.open[v] == 0 {
                self.ig.envies(v, &self.heads, &self.recv, 0)
            } else {
                self.goods && self.ig.envies(v, &self.heads, &self.recv, self.slack[v])
            }
        }

        /// Closed vertices other than `a` and `b` that value an edge at `h`.
        fn closed_neighbour_envies(&self, h: usize, a: usize, b: usize) -> bool {
            self.ig.inc[h].iter().any(|&k| {
                let c = self.ig.g.edges[k].other(h);
                c != a
                    && c != b
                    && self.open[c] == 0
                    && self.ig.envies(c, &self.heads, &self.recv, 0)
            })
        }

        /// `Ok(None)` when the budget ran out under `OnExceed::Unknown`.
        fn go(&mut self, p: usize) -> Result<Option<bool>> {
            if p == self.free.len() {
                return Ok(Some(
                    (0..self.ig.g.vertices).all(|v| !self.ig.envies(v, &self.heads, &self.recv, 0)),
                ));
            }
            let k = self.free[p];
            let e = &self.ig.g.edges[k];
            let (a, b) = (e.a, e.b);
            let (wa, wb) = (self.ig.wa[k], self.ig.wb[k]);
            self.open[a] -= 1;
            self.open[b] -= 1;
            self.slack[a] -= wa;
            self.slack[b] -= wb;
            for h in [a, b] {
                self.nodes += 1;
                if self.nodes > self.budget.max_states {
                    if self.budget.on_exceed == OnExceed::Error {
                        return Err(Error::BudgetExceeded(self.budget.max_states));
                    }
                    return Ok(None);
                }
                self.heads[k] = h;
                self.recv[h] += 1;
                if !self.dead(a) && !self.dead(b) && !self.closed_neighbour_envies(h, a, b) {
                    match self.go(p + 1)? {
                        Some(false) => {}
                        other => return Ok(other),
                    }
                }
                self.recv[h] -= 1;
            }
            self.heads[k] = usize::MAX;
            self.open[a] += 1;
            self.open[b] += 1;
            self.slack[a] += wa;
            self.slack[b] += wb;
            Ok(Some(false))
        }
    }
    let goods = ig.kind == InstanceKind::Goods;
    let recv = ig.received(&heads);
    let mut dfs = Dfs {
        ig: &ig,
        free,
        heads,
        recv,
        open,
        slack,
        goods,
        nodes: 0,
        budget: *budget,
    };
    Ok(match dfs.go(0)? {
        Some(true) => Search::Found(Orientation::from_heads(g, &dfs.heads)),
        Some(false) => Search::None,
        None => Search::Unknown,
    })
}

/// Every complete allocation. Item `o` picks its owner from agent 0 upward,
/// with the first item varying slowest. Costs n^m states.
pub fn brute_exists_allocation(
    inst: &Instance,
    budget: &SearchBudget,
    mut pred: impl FnMut(&Allocation) -> bool,
) -> Result<Search<Allocation>> {
    let (n, m) = (inst.n, inst.m());
    let states = u32::try_from(m)
        .ok()
        .and_then(|m| (n as u64).checked_pow(m));
    if !budget.admits(states)? {
        return Ok(Search::Unknown);
    }
    if n == 0 {
        return Ok(Search::None);
    }
    let mut owners = vec![0usize; m];
    loop {
        let a = Allocation::from_owners(inst, &owners);
        if pred(&a) {
            return Ok(Search::Found(a));
        }
        let Some(pos) = (0..m).rev().find(|&o| owners[o] + 1 < n) else {
            return Ok(Search::None);
        };
        owners[pos] += 1;
        owners[pos + 1..].iter_mut().for_each(|x| *x = 0);
    }
}

pub const EQUIPARTITION_GUARD: usize = 24;

/// Index sets `(a, b)` of equal sum, with `a` the first subset in bitmask
/// order (bit `i` for value `i`) that reaches half the total.
pub fn brute_equipartition(values: &[u64]) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    if values.len() > EQUIPARTITION_GUARD {
        return Err(Error::TooLarge(format!(
            "equipartition scan is limited to {EQUIPARTITION_GUARD} values"
        )));
    }
    let total: u64 = values.iter().sum();
    if total % 2 == 1 {
        return Ok(None);
    }
    let k = values.len();
    for mask in 0u32..1 << k {
        let sum: u64 = (0..k)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| values[i])
            .sum();
        if 2 * sum == total {
            let (a, b) = (0..k).partition(|&i| mask >> i & 1 == 1);
            return Ok(Some((a, b)));
        }
    }
    Ok(None)
}

pub const CIRCUIT_GUARD: usize = 20;

/// First satisfying input in truth-table order over [`Circuit::variables`].
pub fn brute_circuit_sat(c: &Circuit) -> Result<Option<Vec<bool>>> {
    c.validate()?;
    let k = c.variables().len();
    if k > CIRCUIT_GUARD {
        return Err(Error::TooLarge(format!(
            "truth-table scan is limited to {CIRCUIT_GUARD} variables"
        )));
    }
    for mask in 0u32..1 << k {
        let a: Vec<bool> = (0..k).map(|v| mask >> (k - 1 - v) & 1 == 1).collect();
        if c.evaluate(&a) {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

pub const TWOSAT_GUARD: usize = 20;

/// First satisfying assignment in truth-table order: `false < true`, with
/// variable 1 varying slowest.
pub fn brute_2sat(f: &TwoSatFormula) -> Result<Option<Vec<bool>>> {
    f.validate()?;
    let k = f.variable_count;
    if k > TWOSAT_GUARD {
        return Err(Error::TooLarge(format!(
            "truth-table scan is limited to {TWOSAT_GUARD} variables"
        )));
    }
    for mask in 0u32..1 << k {
        let a: Vec<bool> = (0..k).map(|v| mask >> (k - 1 - v) & 1 == 1).collect();
        if f.satisfied_by(&a) {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_order() {
        let g = Multigraph::from_int_edges(2, &[(0, 1, 1, 1)]).unwrap();
        let o = enumerate_orientations(&g, &SearchBudget::default(), |_| true).unwrap();
        assert_eq!(o.found().unwrap().assign["e1"], 0);
        let mut seen = Vec::new();
        let g2 =
            Multigraph::from_int_edges(3, &[(0, 1, 1, 1), (1, 2, 1, 1), (2, 2, 1, 1)]).unwrap();
        let r = enumerate_orientations(&g2, &SearchBudget::default(), |h| {
            seen.push(h.to_vec());
            false
        });
        assert_eq!(r.unwrap(), Search::None);
        assert_eq!(
            seen,
            vec![vec![0, 1, 2], vec![0, 2, 2], vec![1, 1, 2], vec![1, 2, 2]]
        );
    }

    #[test]
    fn budgets() {
        let g = Multigraph::from_int_edges(2, &[(0, 1, 1, 1), (0, 1, 1, 1)]).unwrap();
        let tight = SearchBudget::new(3, OnExceed::Error).unwrap();
        assert_eq!(
            enumerate_orientations(&g, &tight, |_| true),
            Err(Error::BudgetExceeded(3))
        );
        let soft = SearchBudget::new(3, OnExceed::Unknown).unwrap();
        assert_eq!(
            enumerate_orientations(&g, &soft, |_| true).unwrap(),
            Search::Unknown
        );
        assert!(SearchBudget::new(0, OnExceed::Error).is_err());
    }

    #[test]
    fn allocation_order() {
        let inst = Instance::from_ints(&[[1, 1], [1, 1]]).unwrap();
        let mut seen = Vec::new();
        brute_exists_allocation(&inst, &SearchBudget::default(), |a| {
            seen.push(
                a.owners(&inst)
                    .unwrap()
                    .into_iter()
                    .map(Option::unwrap)
                    .collect::<Vec<_>>(),
            );
            false
        })
        .unwrap();
        assert_eq!(seen, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn equipartitions() {
        assert_eq!(
            brute_equipartition(&[1, 1]).unwrap(),
            Some((vec![0], vec![1]))
        );
        assert_eq!(
            brute_equipartition(&[3, 1, 2]).unwrap(),
            Some((vec![0], vec![1, 2]))
        );
        assert_eq!(brute_equipartition(&[1]).unwrap(), None);
        assert!(brute_equipartition(&[1; 25]).is_err());
    }

    #[test]
    fn truth_tables() {
        assert_eq!(
            brute_2sat(&TwoSatFormula::new(2, vec![]).unwrap()).unwrap(),
            Some(vec![false, false])
        );
        assert_eq!(
            brute_2sat(&TwoSatFormula::new(1, vec![vec![1], vec![-1]]).unwrap()).unwrap(),
            None
        );
        assert_eq!(
            brute_2sat(&TwoSatFormula::new(2, vec![vec![1, 2]]).unwrap()).unwrap(),
            Some(vec![false, true])
        );
    }
}
