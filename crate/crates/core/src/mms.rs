//! Constructive search for MMS allocations when `m <= n + 5`: same-order
//! transform, valid reduction rules, the three-agent case analysis, and the
//! mimic transform for instances with a non-negative agent.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fairness::{
    best_partition, canonical_bundles, check_mms_against, find_partition, mms_guard,
    mms_thresholds, power_within, SizeBounds, PO_GUARD,
};
use crate::model::{agent_flags, Allocation, Instance};
use crate::rational::Rational;

const ANY: SizeBounds = (0, usize::MAX);

/// An instance whose rows are sorted non-increasingly. Position `k` of every
/// row carries the `k`-th item id of the source instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SopInstance {
    pub original: Instance,
    pub inst: Instance,
    /// For each agent, the original item id at each sorted position.
    pub row_permutations: Vec<Vec<String>>,
}

pub fn to_sop(inst: &Instance) -> Result<SopInstance> {
    if inst.has_forbidden() {
        return invalid("same-order transform needs finite utilities");
    }
    let mut rows = Vec::with_capacity(inst.n);
    let mut perms = Vec::with_capacity(inst.n);
    for row in &inst.utilities {
        let mut idx: Vec<usize> = (0..row.len()).collect();
        idx.sort_by(|&a, &b| row[b].cmp(&row[a]));
        rows.push(idx.iter().map(|&j| row[j].clone()).collect());
        perms.push(idx.iter().map(|&j| inst.items[j].clone()).collect());
    }
    let sorted = Instance::new(inst.items.clone(), rows)?;
    Ok(SopInstance {
        original: inst.clone(),
        inst: sorted,
        row_permutations: perms,
    })
}

/// Positions are visited in rank order; the owner of each position takes
/// their favourite remaining original item, ties to the smallest index.
fn lift_owners(orig: &Instance, owners: &[usize]) -> Vec<Vec<usize>> {
    let mut taken = vec![false; orig.m()];
    let mut bundles = vec![Vec::new(); orig.n];
    for &i in owners {
        let row = &orig.utilities[i];
        let pick = (0..orig.m())
            .filter(|&j| !taken[j])
            .reduce(|a, b| if row[b] > row[a] { b } else { a })
            .expect("as many positions as items");
        taken[pick] = true;
        bundles[i].push(pick);
    }
    bundles
}

fn owners_of(m: usize, bundles: &[Vec<usize>]) -> Vec<usize> {
    let mut owners = vec![usize::MAX; m];
    for (i, b) in bundles.iter().enumerate() {
        for &j in b {
            owners[j] = i;
        }
    }
    owners
}

pub fn lift_from_sop(sop: &SopInstance, alloc: &Allocation) -> Result<Allocation> {
    let bundles = alloc.index_bundles(&sop.inst)?;
    if !alloc.is_complete(&sop.inst)? {
        return invalid("lift needs a complete allocation");
    }
    let lifted = lift_owners(&sop.original, &owners_of(sop.inst.m(), &bundles));
    Ok(Allocation::from_indices(&sop.original, &lifted))
}

// ---------------------------------------------------------------------------
// Per-agent MMS partitions with a preferred shape.

/// Largest `j` such that some MMS partition has `{j}` as a bundle.
fn singleton_partition(
    vals: &[Rational],
    n: usize,
    t: &Rational,
) -> Option<(usize, Vec<Vec<usize>>)> {
    if n < 2 {
        return None;
    }
    for j in (0..vals.len()).rev() {
        if vals[j] < *t {
            continue;
        }
        let rest: Vec<usize> = (0..vals.len()).filter(|&k| k != j).collect();
        let rv: Vec<Rational> = rest.iter().map(|&k| vals[k].clone()).collect();
        let (v, parts) = best_partition(&rv, n - 1);
        if v >= *t {
            let mut out = vec![vec![j]];
            out.extend(
                parts
                    .into_iter()
                    .map(|p| p.into_iter().map(|k| rest[k]).collect()),
            );
            return Some((j, out));
        }
    }
    None
}

fn empty_partition(vals: &[Rational], n: usize, t: &Rational) -> Option<Vec<Vec<usize>>> {
    if n < 2 || t.is_positive() {
        return None;
    }
    let (v, mut parts) = best_partition(vals, n - 1);
    (v >= *t).then(|| {
        parts.push(Vec::new());
        parts
    })
}

/// `n - 1` bundles of one or two items plus one unconstrained bundle, which
/// comes first.
fn atmost2_partition(vals: &[Rational], n: usize, t: &Rational) -> Option<Vec<Vec<usize>>> {
    let mut bounds = vec![ANY];
    bounds.extend(std::iter::repeat((1, 2)).take(n - 1));
    find_partition(vals, t, &bounds)
}

fn preferred_partition(vals: &[Rational], n: usize, t: &Rational) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![(0..vals.len()).collect()];
    }
    if let Some((_, p)) = singleton_partition(vals, n, t) {
        return p;
    }
    if let Some(p) = empty_partition(vals, n, t) {
        return p;
    }
    if let Some(p) = atmost2_partition(vals, n, t) {
        return p;
    }
    best_partition(vals, n).1
}

/// An MMS partition for `agent`, preferring one with a singleton bundle
/// (largest such item), then one with an empty bundle, then one with
/// `n - 1` bundles of one or two items.
pub fn mms_partition_for_agent(inst: &Instance, agent: usize) -> Result<Allocation> {
    if agent >= inst.n {
        return invalid(format!("agent {agent} out of range"));
    }
    let t = crate::fairness::mms_threshold(inst, agent)?.0;
    let p = preferred_partition(&inst.utilities[agent], inst.n, &t);
    Ok(Allocation::from_indices(inst, &canonical_bundles(p)))
}

// ---------------------------------------------------------------------------
// Reduction rules.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionRule {
    /// One item to one agent, every agent having a singleton MMS bundle.
    SingleItem,
    /// Bundles of one or two items matched along a Hall-violator cut.
    AtMostTwo,
    /// The satisfaction graph of an `n - 1` small-bundle partition has a
    /// perfect matching, which allocates everything.
    PerfectMatching,
    /// The least valuable item to a chores agent.
    ChoresAgent,
}

/// One application of a valid reduction rule to `instance`, whose rows
/// belong to the agents listed in `level_agents`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStep {
    pub rule: ReductionRule,
    /// Agent indices of the input instance.
    pub removed_agents: Vec<usize>,
    pub removed_items: Vec<String>,
    pub granted: BTreeMap<usize, Vec<String>>,
    /// Input-instance index of each row of `instance`.
    pub level_agents: Vec<usize>,
    /// The instance the rule was applied to.
    pub instance: Instance,
}

impl ReductionStep {
    /// Row of `instance` belonging to the input agent `agent`.
    pub fn local(&self, agent: usize) -> Option<usize> {
        self.level_agents.iter().position(|&a| a == agent)
    }

    /// Rows and item indices of `instance` that survive the step.
    pub fn survivors(&self) -> (Vec<usize>, Vec<usize>) {
        let agents = (0..self.instance.n)
            .filter(|&r| !self.removed_agents.contains(&self.level_agents[r]))
            .collect();
        let items = (0..self.instance.m())
            .filter(|&j| !self.removed_items.contains(&self.instance.items[j]))
            .collect();
        (agents, items)
    }

    pub fn reduced_instance(&self) -> Instance {
        let (agents, items) = self.survivors();
        self.instance.restrict(&agents, &items)
    }
}

fn satisfies(inst: &Instance, t: &[Rational], agent: usize, bundle: &[usize]) -> bool {
    inst.utility_of(agent, bundle) >= t[agent]
}

/// Maximum matching of `left` vertices into `right` vertices by augmenting
/// paths; returns the partner of each left vertex.
fn max_matching(
    left: &[usize],
    right: &[usize],
    adj: impl Fn(usize, usize) -> bool,
) -> Vec<Option<usize>> {
    fn augment(
        u: usize,
        left: &[usize],
        right: &[usize],
        adj: &dyn Fn(usize, usize) -> bool,
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for r in 0..right.len() {
            if seen[r] || !adj(left[u], right[r]) {
                continue;
            }
            seen[r] = true;
            if owner[r].is_none() || augment(owner[r].unwrap(), left, right, adj, seen, owner) {
                owner[r] = Some(u);
                return true;
            }
        }
        false
    }
    let mut owner: Vec<Option<usize>> = vec![None; right.len()];
    for u in 0..left.len() {
        let mut seen = vec![false; right.len()];
        augment(u, left, right, &adj, &mut seen, &mut owner);
    }
    let mut partner = vec![None; left.len()];
    for (r, o) in owner.iter().enumerate() {
        if let Some(u) = o {
            partner[*u] = Some(right[r]);
        }
    }
    partner
}

struct Level<'a> {
    inst: &'a Instance,
    t: &'a [Rational],
    agents: &'a [usize],
}

impl Level<'_> {
    fn step(&self, rule: ReductionRule, grants: Vec<(usize, Vec<usize>)>) -> ReductionStep {
        let mut removed_items: Vec<usize> =
            grants.iter().flat_map(|g| g.1.iter().copied()).collect();
        removed_items.sort_unstable();
        let mut removed_agents: Vec<usize> = grants.iter().map(|g| self.agents[g.0]).collect();
        removed_agents.sort_unstable();
        ReductionStep {
            rule,
            removed_agents,
            removed_items: removed_items
                .iter()
                .map(|&j| self.inst.items[j].clone())
                .collect(),
            granted: grants
                .into_iter()
                .map(|(r, b)| {
                    let mut b = b;
                    b.sort_unstable();
                    (
                        self.agents[r],
                        b.iter().map(|&j| self.inst.items[j].clone()).collect(),
                    )
                })
                .collect(),
            level_agents: self.agents.to_vec(),
            instance: self.inst.clone(),
        }
    }

    fn single_item(&self) -> Option<ReductionStep> {
        let n = self.inst.n;
        let mut best: Option<(usize, usize)> = None;
        for i in 0..n {
            let (a, _) = singleton_partition(&self.inst.utilities[i], n, &self.t[i])?;
            if best.is_none_or(|(b, _)| a > b) {
                best = Some((a, i));
            }
        }
        let (a, j) = best?;
        Some(self.step(ReductionRule::SingleItem, vec![(j, vec![a])]))
    }

    fn at_most_two(&self) -> Option<ReductionStep> {
        let n = self.inst.n;
        let (_, parts) = (0..n).find_map(|i| {
            Some((
                i,
                atmost2_partition(&self.inst.utilities[i], n, &self.t[i])?,
            ))
        })?;
        let sat = |a: usize, b: usize| satisfies(self.inst, self.t, a, &parts[b]);
        let all_agents: Vec<usize> = (0..n).collect();
        let all_bundles: Vec<usize> = (0..n).collect();
        let partner = max_matching(&all_agents, &all_bundles, sat);
        if partner.iter().all(Option::is_some) {
            let grants = (0..n)
                .map(|a| (a, parts[partner[a].unwrap()].clone()))
                .collect();
            return Some(self.step(ReductionRule::PerfectMatching, grants));
        }
        let neighbours = |ys: &[usize]| -> Vec<usize> {
            (0..n).filter(|&a| ys.iter().any(|&b| sat(a, b))).collect()
        };
        let y = (1..=n).find_map(|k| subsets(n, k).find(|ys| neighbours(ys).len() < ys.len()))?;
        let drop = if y.contains(&0) {
            0
        } else {
            *y.last().expect("violator is non-empty")
        };
        let y2: Vec<usize> = y.into_iter().filter(|&b| b != drop).collect();
        let ny = neighbours(&y2);
        if ny.len() != y2.len() || y2.iter().any(|&b| !(1..=2).contains(&parts[b].len())) {
            return None;
        }
        let partner = max_matching(&ny, &y2, sat);
        let grants: Option<Vec<_>> = ny
            .iter()
            .zip(&partner)
            .map(|(&a, p)| p.map(|b| (a, parts[b].clone())))
            .collect();
        Some(self.step(ReductionRule::AtMostTwo, grants?))
    }

    fn chores_agent(&self) -> Option<ReductionStep> {
        let n = self.inst.n;
        let m = self.inst.m();
        if m == 0 || m > n + 5 || self.t.iter().any(|t| !t.is_negative()) {
            return None;
        }
        let c = (0..n).find(|&i| agent_flags(self.inst, i).chores)?;
        let last = m - 1;
        for i in 0..n {
            let vals = &self.inst.utilities[i];
            if vals[last].is_positive() {
                return None;
            }
            let small = singleton_partition(vals, n, &self.t[i]).is_some()
                || empty_partition(vals, n, &self.t[i]).is_some();
            if !small {
                return None;
            }
        }
        Some(self.step(ReductionRule::ChoresAgent, vec![(c, vec![last])]))
    }

    fn find(&self) -> Option<ReductionStep> {
        self.single_item()
            .or_else(|| self.at_most_two())
            .or_else(|| self.chores_agent())
    }
}

/// Index sets of size `k` drawn from `0..n`, in increasing bitmask order.
fn subsets(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n)
        .filter(move |mask| mask.count_ones() as usize == k)
        .map(move |mask| (0..n).filter(|&b| mask >> b & 1 == 1).collect())
}

/// A valid reduction of a same-order instance: a single-item step when every
/// agent has a singleton MMS bundle, else a Hall-matching step from a
/// partition with `n - 1` bundles of one or two items, else a chores-agent
/// step. The step of a perfect matching allocates everything.
pub fn find_valid_reduction(inst: &Instance) -> Result<Option<ReductionStep>> {
    let t = mms_thresholds(inst)?;
    let agents: Vec<usize> = (0..inst.n).collect();
    Ok(Level {
        inst,
        t: &t,
        agents: &agents,
    }
    .find())
}

// ---------------------------------------------------------------------------
// Three agents.

fn is_partition(m: usize, bundles: &[Vec<usize>]) -> bool {
    let mut seen = vec![false; m];
    for &j in bundles.iter().flatten() {
        if j >= m || seen[j] {
            return false;
        }
        seen[j] = true;
    }
    seen.into_iter().all(|s| s)
}

const PERMS3: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Hands the three bundles to the three agents in the first order that
/// satisfies everyone.
fn assign3(inst: &Instance, t: &[Rational], triple: &[Vec<usize>]) -> Option<Vec<Vec<usize>>> {
    if !is_partition(inst.m(), triple) {
        return None;
    }
    PERMS3.iter().find_map(|p| {
        let out: Vec<Vec<usize>> = p.iter().map(|&k| triple[k].clone()).collect();
        (0..3)
            .all(|a| satisfies(inst, t, a, &out[a]))
            .then_some(out)
    })
}

fn complement(m: usize, used: &[&[usize]]) -> Vec<usize> {
    (0..m)
        .filter(|j| !used.iter().any(|b| b.contains(j)))
        .collect()
}

fn disjoint(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| !b.contains(x))
}

/// Disjoint-bundle pairs from two agents' partitions, plus every partition
/// handed out whole.
fn edge_candidates(
    inst: &Instance,
    t: &[Rational],
    parts: &[Vec<Vec<usize>>],
) -> Option<Vec<Vec<usize>>> {
    let m = inst.m();
    for p in parts {
        if let Some(a) = assign3(inst, t, p) {
            return Some(a);
        }
    }
    for i in 0..3 {
        for j in (0..3).filter(|&j| j != i) {
            for x in &parts[i] {
                for y in parts[j].iter().filter(|y| disjoint(x, y)) {
                    let triple = [x.clone(), y.clone(), complement(m, &[x, y])];
                    if let Some(a) = assign3(inst, t, &triple) {
                        return Some(a);
                    }
                }
            }
        }
    }
    None
}

/// Case analysis for three agents whose MMS partitions are all 3-3-3 on a
/// same-order nine-item instance.
fn nine_item_candidates(
    inst: &Instance,
    t: &[Rational],
    parts: &[Vec<Vec<usize>>],
) -> Option<Vec<Vec<usize>>> {
    let m = inst.m();
    for p in parts {
        if let Some(a) = assign3(inst, t, p) {
            return Some(a);
        }
    }
    for w in 0..3 {
        for o in (0..3).filter(|&o| o != w) {
            for wb in &parts[w] {
                for ob in &parts[o] {
                    let x: Vec<usize> = wb.iter().copied().filter(|j| !ob.contains(j)).collect();
                    let y: Vec<usize> = ob.iter().copied().filter(|j| !wb.contains(j)).collect();
                    // The better bundle holds the smaller-index differing item.
                    if x.len() != 1 || y.len() != 1 || x[0] < y[0] {
                        continue;
                    }
                    let (x, y) = (x[0], y[0]);
                    let rest: Vec<&Vec<usize>> = parts[w].iter().filter(|b| *b != wb).collect();
                    if let Some(a) =
                        assign3(inst, t, &[wb.clone(), rest[0].clone(), rest[1].clone()])
                    {
                        return Some(a);
                    }
                    let Some(c) = parts[o].iter().find(|b| b.contains(&x)) else {
                        continue;
                    };
                    let Some(d) = parts[o].iter().find(|b| *b != ob && *b != c) else {
                        continue;
                    };
                    let mut c2: Vec<usize> = c.iter().copied().filter(|&j| j != x).collect();
                    c2.push(y);
                    if let Some(a) = assign3(inst, t, &[wb.clone(), c2, d.clone()]) {
                        return Some(a);
                    }
                }
            }
        }
    }
    let last = m - 1;
    let holding: Vec<&Vec<usize>> = parts
        .iter()
        .map(|p| {
            p.iter()
                .find(|b| b.contains(&last))
                .expect("partition covers every item")
        })
        .collect();
    let outside = complement(m, &[holding[0], holding[1], holding[2]]);
    if outside.len() != 2 {
        return None;
    }
    for p in PERMS3 {
        for (x, y) in [(outside[0], outside[1]), (outside[1], outside[0])] {
            let swap = |b: &Vec<usize>, z: usize| -> Vec<usize> {
                b.iter().map(|&j| if j == last { z } else { j }).collect()
            };
            let mut out = vec![Vec::new(); 3];
            out[p[2]] = holding[p[2]].clone();
            out[p[1]] = swap(holding[p[1]], x);
            out[p[0]] = swap(holding[p[0]], y);
            let rest = complement(m, &[&out[0], &out[1], &out[2]]);
            out[p[2]].extend(rest);
            if is_partition(m, &out) && (0..3).all(|a| satisfies(inst, t, a, &out[a])) {
                return Some(out);
            }
        }
    }
    None
}

fn three_partition(vals: &[Rational], t: &Rational) -> Vec<Vec<usize>> {
    find_partition(vals, t, &[(0, 1), ANY, ANY])
        .or_else(|| find_partition(vals, t, &[(2, 2), (2, 2), ANY]))
        .unwrap_or_else(|| best_partition(vals, 3).1)
}

fn drop_items(bundles: Vec<Vec<usize>>, m: usize) -> Vec<Vec<usize>> {
    bundles
        .into_iter()
        .map(|b| b.into_iter().filter(|&j| j < m).collect())
        .collect()
}

/// The case analysis alone, without a brute-force fallback.
pub(crate) fn three_agent_constructive(
    inst: &Instance,
    t: &[Rational],
) -> Result<Option<Vec<Vec<usize>>>> {
    let m = inst.m();
    if inst.n != 3 || m > 8 {
        return Ok(None);
    }
    let (padded, _) = inst.with_dummies(8 - m);
    let sop = to_sop(&padded)?;
    let s = &sop.inst;
    let parts: Vec<_> = (0..3)
        .map(|i| three_partition(&s.utilities[i], &t[i]))
        .collect();
    let found = match edge_candidates(s, t, &parts) {
        Some(b) => Some(b),
        None => {
            let (s9, _) = s.with_dummies(1);
            let sop9 = to_sop(&s9)?;
            let parts9: Option<Vec<_>> = (0..3)
                .map(|i| find_partition(&sop9.inst.utilities[i], &t[i], &[(3, 3); 3]))
                .collect();
            parts9
                .and_then(|p| nine_item_candidates(&sop9.inst, t, &p))
                .map(|b| drop_items(lift_owners(&s9, &owners_of(9, &b)), 8))
        }
    };
    Ok(found.map(|b| drop_items(lift_owners(&padded, &owners_of(8, &b)), m)))
}

/// MMS allocation for three agents and at most eight items.
pub fn solve_three_agent(inst: &Instance) -> Result<Option<Allocation>> {
    if inst.n != 3 || inst.m() > 8 {
        return invalid("three-agent solver needs 3 agents and at most 8 items");
    }
    let t = mms_thresholds(inst)?;
    let b = match three_agent_constructive(inst, &t)? {
        Some(b) => Some(b),
        None => brute_mms(inst, &t)?,
    };
    Ok(b.map(|b| Allocation::from_indices(inst, &b)))
}

// ---------------------------------------------------------------------------
// Mimicking.

fn mimic_rows(inst: &Instance, agent: usize, replace: impl Fn(usize) -> bool) -> Instance {
    let mut out = inst.clone();
    for j in (0..inst.n).filter(|&j| j != agent && replace(j)) {
        out.utilities[j] = inst.utilities[agent].clone();
    }
    out
}

/// Every agent with a negative MMS threshold takes over `agent`'s utilities.
pub fn mimic_instance(inst: &Instance, agent: usize) -> Result<Instance> {
    let t = mms_thresholds(inst)?;
    if agent >= inst.n {
        return invalid(format!("agent {agent} out of range"));
    }
    if t[agent].is_negative() {
        return Err(Error::Precondition(format!(
            "agent {agent} has a negative MMS threshold"
        )));
    }
    Ok(mimic_rows(inst, agent, |j| t[j].is_negative()))
}

/// Moves the bundle of every agent left below their threshold to `agent`.
fn unmimic(
    inst: &Instance,
    t: &[Rational],
    agent: usize,
    mut bundles: Vec<Vec<usize>>,
) -> Vec<Vec<usize>> {
    for j in (0..inst.n).filter(|&j| j != agent) {
        if !satisfies(inst, t, j, &bundles[j]) {
            let moved = std::mem::take(&mut bundles[j]);
            bundles[agent].extend(moved);
        }
    }
    bundles
}

// ---------------------------------------------------------------------------
// Brute force.

/// Exhaustive search for an allocation meeting every threshold.
pub(crate) fn brute_mms(inst: &Instance, t: &[Rational]) -> Result<Option<Vec<Vec<usize>>>> {
    let (n, m) = (inst.n, inst.m());
    if !power_within(n, m, PO_GUARD) {
        return Err(Error::TooLarge(format!(
            "exhaustive MMS search too large ({n}^{m} allocations)"
        )));
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&j| std::cmp::Reverse((0..n).map(|i| inst.utilities[i][j].abs()).max()));
    // rem[k][i]: positive utility agent i can still gain from order[k..].
    let mut rem = vec![vec![Rational::zero(); n]; m + 1];
    for k in (0..m).rev() {
        for i in 0..n {
            let v = &inst.utilities[i][order[k]];
            rem[k][i] = &rem[k + 1][i]
                + if v.is_positive() {
                    v.clone()
                } else {
                    Rational::zero()
                };
        }
    }
    fn go(
        k: usize,
        inst: &Instance,
        t: &[Rational],
        order: &[usize],
        rem: &[Vec<Rational>],
        sums: &mut [Rational],
        owner: &mut [usize],
    ) -> bool {
        if (0..inst.n).any(|i| &sums[i] + &rem[k][i] < t[i]) {
            return false;
        }
        if k == order.len() {
            return true;
        }
        let j = order[k];
        for i in 0..inst.n {
            sums[i] += &inst.utilities[i][j];
            owner[j] = i;
            if go(k + 1, inst, t, order, rem, sums, owner) {
                return true;
            }
            sums[i] -= &inst.utilities[i][j];
        }
        false
    }
    let mut sums = vec![Rational::zero(); n];
    let mut owner = vec![0; m];
    if !go(0, inst, t, &order, &rem, &mut sums, &mut owner) {
        return Ok(None);
    }
    let mut bundles = vec![Vec::new(); n];
    for (j, &i) in owner.iter().enumerate() {
        bundles[i].push(j);
    }
    Ok(Some(bundles))
}

// ---------------------------------------------------------------------------
// Driver.

struct Solver {
    trail: Vec<ReductionStep>,
}

impl Solver {
    fn solve(&mut self, inst: &Instance, agents: &[usize]) -> Result<Option<Vec<Vec<usize>>>> {
        let (n, m) = (inst.n, inst.m());
        if n == 1 {
            return Ok(Some(vec![(0..m).collect()]));
        }
        mms_guard(m.max(n + 5), n)?;
        let t = mms_thresholds(inst)?;
        if n == 2 {
            let (_, mut parts) = best_partition(&inst.utilities[1], 2);
            if inst.utility_of(0, &parts[1]) > inst.utility_of(0, &parts[0]) {
                parts.swap(0, 1);
            }
            return Ok(Some(parts));
        }
        if n == 3 && m <= 8 {
            return three_agent_constructive(inst, &t);
        }
        if t.iter().any(|x| !x.is_negative()) {
            if t.iter().all(|x| !x.is_positive()) {
                let i = t
                    .iter()
                    .position(Zero::is_zero)
                    .expect("some threshold is zero");
                let mut b = vec![Vec::new(); n];
                b[i] = (0..m).collect();
                return Ok(Some(b));
            }
            let i = t
                .iter()
                .position(Signed::is_positive)
                .expect("some threshold is positive");
            if t.iter().any(|x| !x.is_positive()) {
                let mim = mimic_rows(inst, i, |j| !t[j].is_positive());
                return Ok(self.solve(&mim, agents)?.map(|b| unmimic(inst, &t, i, b)));
            }
            return self.reduce(inst, agents);
        }
        if (0..n).any(|i| agent_flags(inst, i).chores) {
            return self.reduce(inst, agents);
        }
        Ok(None)
    }

    /// Pads to `n + 5` items, sorts rows, applies one valid reduction,
    /// solves the rest and lifts the result back.
    fn reduce(&mut self, inst: &Instance, agents: &[usize]) -> Result<Option<Vec<Vec<usize>>>> {
        let (n, m) = (inst.n, inst.m());
        let (padded, _) = inst.with_dummies((n + 5).saturating_sub(m));
        let sop = to_sop(&padded)?;
        let s = &sop.inst;
        let t = mms_thresholds(s)?;
        let Some(step) = (Level {
            inst: s,
            t: &t,
            agents,
        })
        .find() else {
            return Ok(None);
        };
        let (rows, items) = step.survivors();
        let mut bundles = vec![Vec::new(); n];
        for (a, ids) in &step.granted {
            let r = step.local(*a).expect("granted agents belong to the level");
            bundles[r] = ids
                .iter()
                .map(|id| s.item_index(id).expect("granted ids exist"))
                .collect();
        }
        self.trail.push(step.clone());
        if !rows.is_empty() {
            let sub = step.reduced_instance();
            let sub_agents: Vec<usize> = rows.iter().map(|&r| agents[r]).collect();
            let Some(sb) = self.solve(&sub, &sub_agents)? else {
                return Ok(None);
            };
            for (k, &r) in rows.iter().enumerate() {
                bundles[r] = sb[k].iter().map(|&j| items[j]).collect();
            }
        }
        let lifted = lift_owners(&padded, &owners_of(padded.m(), &bundles));
        Ok(Some(drop_items(lifted, m)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MmsVerdict {
    Found,
    /// The exhaustive search ran to completion without a success.
    NoneExists,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MmsMethod {
    Constructive,
    BruteForce,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MmsOutcome {
    pub verdict: MmsVerdict,
    pub method: MmsMethod,
    #[serde(with = "crate::rational::vec")]
    pub thresholds: Vec<Rational>,
    pub allocation: Option<Allocation>,
    pub trail: Vec<ReductionStep>,
}

/// Constructive search first; if it does not apply, an exhaustive search
/// within [`PO_GUARD`] allocations.
pub fn solve_mms(inst: &Instance) -> Result<MmsOutcome> {
    if inst.has_forbidden() {
        return invalid("MMS allocations are undefined with forbidden entries");
    }
    let unknown = |thresholds| MmsOutcome {
        verdict: MmsVerdict::Unknown,
        method: MmsMethod::None,
        thresholds,
        allocation: None,
        trail: vec![],
    };
    let t = match mms_thresholds(inst) {
        Ok(t) => t,
        Err(Error::TooLarge(_)) => return Ok(unknown(vec![])),
        Err(e) => return Err(e),
    };
    let agents: Vec<usize> = (0..inst.n).collect();
    let mut solver = Solver { trail: vec![] };
    let constructed = match solver.solve(inst, &agents) {
        Ok(b) => b,
        Err(Error::TooLarge(_)) => None,
        Err(e) => return Err(e),
    };
    if let Some(b) = constructed {
        let alloc = Allocation::from_indices(inst, &b);
        let ok = check_mms_against(inst, &alloc, &t)?.holds;
        debug_assert!(ok, "constructed allocation must be MMS");
        if ok {
            return Ok(MmsOutcome {
                verdict: MmsVerdict::Found,
                method: MmsMethod::Constructive,
                thresholds: t,
                allocation: Some(alloc),
                trail: solver.trail,
            });
        }
    }
    match brute_mms(inst, &t) {
        Ok(Some(b)) => Ok(MmsOutcome {
            verdict: MmsVerdict::Found,
            method: MmsMethod::BruteForce,
            thresholds: t,
            allocation: Some(Allocation::from_indices(inst, &b)),
            trail: vec![],
        }),
        Ok(None) => Ok(MmsOutcome {
            verdict: MmsVerdict::NoneExists,
            method: MmsMethod::BruteForce,
            thresholds: t,
            allocation: None,
            trail: vec![],
        }),
        Err(Error::TooLarge(_)) => Ok(unknown(t)),
        Err(e) => Err(e),
    }
}
