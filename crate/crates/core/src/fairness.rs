//! Fairness and efficiency checkers with witnesses, plus exact MMS thresholds.

use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, precondition, Error, Result};
use crate::model::{Allocation, Instance, InstanceKind, Multigraph, Orientation, Value};
use crate::rational::{format_rational, int, scale_one, Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Criterion {
    #[serde(rename = "ef")]
    Ef,
    #[serde(rename = "prop")]
    Prop,
    #[serde(rename = "ef1")]
    Ef1,
    #[serde(rename = "efx0")]
    Efx0,
    #[serde(rename = "efx-")]
    EfxMinus,
    #[serde(rename = "mms")]
    Mms,
    #[serde(rename = "po")]
    Po,
}

impl Criterion {
    pub const ALL: [Criterion; 7] = [
        Criterion::Ef,
        Criterion::Prop,
        Criterion::Ef1,
        Criterion::Efx0,
        Criterion::EfxMinus,
        Criterion::Mms,
        Criterion::Po,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Criterion::Ef => "ef",
            Criterion::Prop => "prop",
            Criterion::Ef1 => "ef1",
            Criterion::Efx0 => "efx0",
            Criterion::EfxMinus => "efx-",
            Criterion::Mms => "mms",
            Criterion::Po => "po",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Criterion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.tag() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Parse(format!("unknown criterion {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Witness {
    /// `envier` envies `envied`; `item` is the pivotal item whose removal
    /// does not eliminate the envy, when the criterion has one.
    Envy {
        envier: usize,
        envied: usize,
        item: Option<String>,
    },
    /// `agent` receives `value` below the required `threshold`.
    Threshold {
        agent: usize,
        value: String,
        threshold: String,
    },
    /// A Pareto improvement.
    Dominated { allocation: Allocation },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FairnessReport {
    pub criterion: Criterion,
    pub holds: bool,
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl FairnessReport {
    fn ok(criterion: Criterion) -> Self {
        FairnessReport {
            criterion,
            holds: true,
            witness: None,
            note: None,
        }
    }

    fn fail(criterion: Criterion, w: Witness) -> Self {
        FairnessReport {
            criterion,
            holds: false,
            witness: Some(w),
            note: None,
        }
    }
}

pub const MIXED_EFX_NOTE: &str = "mixed instance: strong-envy extension";
pub const PARTIAL_NOTE: &str = "partial allocation";

/// Values the envy comparisons run on: exact [`Value`]s or scaled integers.
pub(crate) trait Util: Clone + Ord + Add<Output = Self> + Sub<Output = Self> {
    fn zero() -> Self;
}

impl Util for i64 {
    fn zero() -> Self {
        0
    }
}

impl Util for Value {
    fn zero() -> Self {
        Value::zero()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum PairCrit {
    Ef,
    Ef1,
    Efx0,
    EfxMinus,
}

/// Which item breaks an EFX comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Pivot {
    None,
    Own(usize),
    Other(usize),
}

fn total<T: Util>(xs: &[T]) -> T {
    xs.iter().cloned().fold(T::zero(), |a, b| a + b)
}

/// Checks one ordered pair. `own` holds the envier's values for its own
/// items, `other` its values for the envied bundle. Returns the violation.
pub(crate) fn pair_violation<T: Util>(
    crit: PairCrit,
    kind: InstanceKind,
    own: &[T],
    other: &[T],
) -> Option<Pivot> {
    let so = total(own);
    let st = total(other);
    let zero = T::zero();
    match crit {
        PairCrit::Ef => (so < st).then_some(Pivot::None),
        PairCrit::Ef1 => {
            if so >= st
                || own.iter().any(|o| so.clone() - o.clone() >= st)
                || other.iter().any(|o| so >= st.clone() - o.clone())
            {
                None
            } else {
                Some(Pivot::None)
            }
        }
        PairCrit::Efx0 | PairCrit::EfxMinus => {
            if so >= st {
                return None;
            }
            let strict = crit == PairCrit::EfxMinus;
            let check_other = kind != InstanceKind::Chores;
            let check_own = kind != InstanceKind::Goods;
            if check_other {
                for (k, o) in other.iter().enumerate() {
                    let relevant = match kind {
                        InstanceKind::Goods => !strict || *o > zero,
                        _ => {
                            if strict {
                                *o > zero
                            } else {
                                *o >= zero
                            }
                        }
                    };
                    if relevant && so < st.clone() - o.clone() {
                        return Some(Pivot::Other(k));
                    }
                }
            }
            if check_own {
                for (k, o) in own.iter().enumerate() {
                    let relevant = match kind {
                        InstanceKind::Chores => !strict || *o < zero,
                        _ => {
                            if strict {
                                *o < zero
                            } else {
                                *o <= zero
                            }
                        }
                    };
                    if relevant && so.clone() - o.clone() < st {
                        return Some(Pivot::Own(k));
                    }
                }
            }
            None
        }
    }
}

/// Decides `criterion` for `alloc`. Only EFX₀ accepts a partial allocation.
pub fn check(inst: &Instance, alloc: &Allocation, criterion: Criterion) -> Result<FairnessReport> {
    let bundles = alloc.index_bundles(inst)?;
    let complete = bundles.iter().map(Vec::len).sum::<usize>() == inst.m();
    if !complete && criterion != Criterion::Efx0 {
        return precondition(format!("criterion {criterion} needs a complete allocation"));
    }
    let mut report = match criterion {
        Criterion::Ef => pairwise(inst, &bundles, PairCrit::Ef, criterion),
        Criterion::Ef1 => pairwise(inst, &bundles, PairCrit::Ef1, criterion),
        Criterion::Efx0 => pairwise(inst, &bundles, PairCrit::Efx0, criterion),
        Criterion::EfxMinus => pairwise(inst, &bundles, PairCrit::EfxMinus, criterion),
        Criterion::Prop => check_prop(inst, &bundles),
        Criterion::Mms => return check_mms(inst, alloc),
        Criterion::Po => return check_po(inst, alloc),
    };
    if !complete {
        report.note = Some(PARTIAL_NOTE.to_string());
    }
    Ok(report)
}

/// Convenience wrapper: `check(..).holds`.
pub fn holds(inst: &Instance, alloc: &Allocation, criterion: Criterion) -> Result<bool> {
    Ok(check(inst, alloc, criterion)?.holds)
}

fn pairwise(
    inst: &Instance,
    bundles: &[Vec<usize>],
    crit: PairCrit,
    criterion: Criterion,
) -> FairnessReport {
    let kind = inst.kind();
    let efx = matches!(crit, PairCrit::Efx0 | PairCrit::EfxMinus);
    let mut report = FairnessReport::ok(criterion);
    'outer: for i in 0..inst.n {
        let own: Vec<Value> = bundles[i].iter().map(|&j| inst.value(i, j)).collect();
        for (k, bk) in bundles.iter().enumerate() {
            if k == i {
                continue;
            }
            let other: Vec<Value> = bk.iter().map(|&j| inst.value(i, j)).collect();
            if let Some(p) = pair_violation(crit, kind, &own, &other) {
                let item = match p {
                    Pivot::None => None,
                    Pivot::Own(x) => Some(inst.items[bundles[i][x]].clone()),
                    Pivot::Other(x) => Some(inst.items[bk[x]].clone()),
                };
                report = FairnessReport::fail(
                    criterion,
                    Witness::Envy {
                        envier: i,
                        envied: k,
                        item,
                    },
                );
                break 'outer;
            }
        }
    }
    if efx && kind == InstanceKind::Mixed {
        report.note = Some(MIXED_EFX_NOTE.to_string());
    }
    report
}

fn value_string(v: &Value) -> String {
    v.to_string()
}

fn check_prop(inst: &Instance, bundles: &[Vec<usize>]) -> FairnessReport {
    let n = inst.n as i64;
    for (i, b) in bundles.iter().enumerate() {
        let mine = inst.value_of(i, b);
        let all = inst.total_value(i);
        if mine.scale(n) < all {
            let share = if all.is_finite() {
                format_rational(&(&all.finite / int(n)))
            } else {
                value_string(&all)
            };
            return FairnessReport::fail(
                Criterion::Prop,
                Witness::Threshold {
                    agent: i,
                    value: value_string(&mine),
                    threshold: share,
                },
            );
        }
    }
    FairnessReport::ok(Criterion::Prop)
}

/// Private envy-freeness of `i` and `j` on the non-loop edges joining them.
pub fn check_pef(g: &Multigraph, pi: &Orientation, i: usize, j: usize) -> Result<bool> {
    if i == j {
        return precondition("PEF needs two distinct vertices");
    }
    if i >= g.vertices || j >= g.vertices {
        return invalid("vertex out of range");
    }
    let heads = pi.heads(g)?;
    let mut to_i = [Rational::zero(), Rational::zero()];
    let mut to_j = [Rational::zero(), Rational::zero()];
    for (e, h) in g.edges.iter().zip(&heads) {
        if e.is_loop() || !(e.touches(i) && e.touches(j)) {
            continue;
        }
        match h {
            Some(h) if *h == i => {
                to_i[0] += e.weight_at(i);
                to_i[1] += e.weight_at(j);
            }
            Some(_) => {
                to_j[0] += e.weight_at(i);
                to_j[1] += e.weight_at(j);
            }
            None => {}
        }
    }
    Ok(to_i[0] >= to_j[0] && to_j[1] >= to_i[1])
}

/// Thresholds and one optimal partition per agent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MmsProfile {
    pub thresholds: Vec<Rational>,
    pub witnesses: Vec<Allocation>,
}

/// Largest `m * ceil(log2 n)` accepted by the exact MMS search.
pub const MMS_GUARD: u32 = 34;

pub(crate) fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

pub(crate) fn mms_guard(m: usize, n: usize) -> Result<()> {
    if (m as u64) * u64::from(ceil_log2(n)) > u64::from(MMS_GUARD) {
        return Err(Error::TooLarge(format!(
            "instance too large for exact MMS ({m} items, {n} agents)"
        )));
    }
    Ok(())
}

/// Sorts members, then orders bundles by least member with empty bundles last.
pub(crate) fn canonical_bundles(mut b: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for x in &mut b {
        x.sort_unstable();
    }
    b.sort_by_key(|x| x.first().copied().unwrap_or(usize::MAX));
    b
}

/// Exact MMS threshold of `agent`, with a partition attaining it.
pub fn mms_threshold(inst: &Instance, agent: usize) -> Result<(Rational, Allocation)> {
    if agent >= inst.n {
        return invalid(format!("agent {agent} out of range"));
    }
    if inst.has_forbidden() {
        return invalid("MMS thresholds are undefined with forbidden entries");
    }
    mms_guard(inst.m(), inst.n)?;
    let (t, parts) = best_partition(&inst.utilities[agent], inst.n);
    Ok((t, Allocation::from_indices(inst, &canonical_bundles(parts))))
}

pub fn mms_profile(inst: &Instance) -> Result<MmsProfile> {
    let mut thresholds = Vec::with_capacity(inst.n);
    let mut witnesses = Vec::with_capacity(inst.n);
    for i in 0..inst.n {
        let (t, w) = mms_threshold(inst, i)?;
        thresholds.push(t);
        witnesses.push(w);
    }
    Ok(MmsProfile {
        thresholds,
        witnesses,
    })
}

pub fn mms_thresholds(inst: &Instance) -> Result<Vec<Rational>> {
    (0..inst.n)
        .map(|i| mms_threshold(inst, i).map(|p| p.0))
        .collect()
}

pub fn check_mms(inst: &Instance, alloc: &Allocation) -> Result<FairnessReport> {
    let thresholds = mms_thresholds(inst)?;
    check_mms_against(inst, alloc, &thresholds)
}

pub(crate) fn check_mms_against(
    inst: &Instance,
    alloc: &Allocation,
    thresholds: &[Rational],
) -> Result<FairnessReport> {
    let bundles = alloc.index_bundles(inst)?;
    if bundles.iter().map(Vec::len).sum::<usize>() != inst.m() {
        return precondition("MMS check needs a complete allocation");
    }
    for (i, b) in bundles.iter().enumerate() {
        let u = inst.utility_of(i, b);
        if u < thresholds[i] {
            return Ok(FairnessReport::fail(
                Criterion::Mms,
                Witness::Threshold {
                    agent: i,
                    value: format_rational(&u),
                    threshold: format_rational(&thresholds[i]),
                },
            ));
        }
    }
    Ok(FairnessReport::ok(Criterion::Mms))
}

/// Best worst-bundle value of `vals` split into `n` bundles, with bundles as
/// indices into `vals`. No size guard; callers apply one.
pub(crate) fn best_partition(vals: &[Rational], n: usize) -> (Rational, Vec<Vec<usize>>) {
    match scale_one(vals) {
        Some((v, scale)) => {
            let (t, p) = bnb(&v, n);
            (t.to_rational(&scale), p)
        }
        None => {
            let (t, p) = bnb(vals, n);
            (t.to_rational(&BigInt::one()), p)
        }
    }
}

fn bnb<T: Scalar>(vals: &[T], n: usize) -> (T, Vec<Vec<usize>>) {
    let m = vals.len();
    let total = vals.iter().cloned().fold(T::zero(), |a, b| a + b);
    if n == 1 {
        return (total, vec![(0..m).collect()]);
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| vals[b].abs().cmp(&vals[a].abs()));
    let mut rem_pos = vec![T::zero(); m + 1];
    for k in (0..m).rev() {
        let v = &vals[order[k]];
        rem_pos[k] = rem_pos[k + 1].clone()
            + if v.is_positive() {
                v.clone()
            } else {
                T::zero()
            };
    }

    // Greedy start: goods to the poorest bundle, chores to the richest.
    let mut by_value: Vec<usize> = (0..m).collect();
    by_value.sort_by(|&a, &b| vals[b].cmp(&vals[a]));
    let mut sums = vec![T::zero(); n];
    let mut assign = vec![0usize; m];
    for &j in &by_value {
        let b = if vals[j].is_negative() {
            (0..n)
                .max_by(|&x, &y| sums[x].cmp(&sums[y]).then(y.cmp(&x)))
                .unwrap()
        } else {
            (0..n)
                .min_by(|&x, &y| sums[x].cmp(&sums[y]).then(x.cmp(&y)))
                .unwrap()
        };
        sums[b] = sums[b].clone() + vals[j].clone();
        assign[j] = b;
    }
    let mut s = Bnb {
        vals,
        order,
        rem_pos,
        n,
        cap: total / T::from_usize(n).expect("small n"),
        best: sums.iter().min().cloned().expect("n >= 1"),
        best_assign: assign,
        sums: vec![T::zero(); n],
        cur: vec![0; m],
        done: false,
    };
    if s.best < s.cap {
        s.go(0);
    }
    let mut parts = vec![Vec::new(); n];
    for (j, &b) in s.best_assign.iter().enumerate() {
        parts[b].push(j);
    }
    (s.best, parts)
}

struct Bnb<'a, T> {
    vals: &'a [T],
    order: Vec<usize>,
    rem_pos: Vec<T>,
    n: usize,
    cap: T,
    best: T,
    best_assign: Vec<usize>,
    sums: Vec<T>,
    cur: Vec<usize>,
    done: bool,
}

impl<T: Scalar> Bnb<'_, T> {
    fn go(&mut self, k: usize) {
        if self.done {
            return;
        }
        if k == self.order.len() {
            let v = self.sums.iter().min().cloned().expect("n >= 1");
            if v > self.best {
                self.best = v;
                self.best_assign = self.cur.clone();
                if self.best >= self.cap {
                    self.done = true;
                }
            }
            return;
        }
        let bound = self.sums.iter().min().cloned().expect("n >= 1") + self.rem_pos[k].clone();
        if bound <= self.best {
            return;
        }
        let j = self.order[k];
        let x = self.vals[j].clone();
        for b in 0..self.n {
            if (0..b).any(|c| self.sums[c] == self.sums[b]) {
                continue;
            }
            self.sums[b] = self.sums[b].clone() + x.clone();
            self.cur[j] = b;
            self.go(k + 1);
            self.sums[b] = self.sums[b].clone() - x.clone();
            if self.done {
                return;
            }
        }
    }
}

/// Size window `(lo, hi)` for one labelled bundle.
pub(crate) type SizeBounds = (usize, usize);

/// A partition into `bounds.len()` bundles, every bundle worth at least `t`
/// and with its size inside its window. `None` when there is none.
pub(crate) fn find_partition(
    vals: &[Rational],
    t: &Rational,
    bounds: &[SizeBounds],
) -> Option<Vec<Vec<usize>>> {
    let mut all: Vec<Rational> = vals.to_vec();
    all.push(t.clone());
    match scale_one(&all) {
        Some((mut v, _)) => {
            let tt = v.pop().expect("threshold appended");
            constrained(&v, &tt, bounds)
        }
        None => constrained(vals, t, bounds),
    }
}

fn constrained<T: Scalar>(vals: &[T], t: &T, bounds: &[SizeBounds]) -> Option<Vec<Vec<usize>>> {
    let m = vals.len();
    let n = bounds.len();
    let lo_total: usize = bounds.iter().map(|b| b.0).sum();
    let hi_total: usize = bounds.iter().map(|b| b.1.min(m)).sum();
    if lo_total > m || hi_total < m {
        return None;
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| vals[b].abs().cmp(&vals[a].abs()));
    let mut rem_pos = vec![T::zero(); m + 1];
    for k in (0..m).rev() {
        let v = &vals[order[k]];
        rem_pos[k] = rem_pos[k + 1].clone()
            + if v.is_positive() {
                v.clone()
            } else {
                T::zero()
            };
    }
    struct S<'a, T> {
        vals: &'a [T],
        t: &'a T,
        bounds: &'a [SizeBounds],
        order: Vec<usize>,
        rem_pos: Vec<T>,
        sums: Vec<T>,
        sizes: Vec<usize>,
        cur: Vec<usize>,
    }
    impl<T: Scalar> S<'_, T> {
        fn go(&mut self, k: usize) -> bool {
            let m = self.order.len();
            let left = m - k;
            let need: usize = self
                .bounds
                .iter()
                .zip(&self.sizes)
                .map(|(b, &s)| b.0.saturating_sub(s))
                .sum();
            if need > left {
                return false;
            }
            for b in 0..self.bounds.len() {
                if self.sums[b].clone() + self.rem_pos[k].clone() < *self.t {
                    return false;
                }
            }
            if k == m {
                return true;
            }
            let j = self.order[k];
            for b in 0..self.bounds.len() {
                if self.sizes[b] >= self.bounds[b].1 {
                    continue;
                }
                if (0..b).any(|c| {
                    self.bounds[c] == self.bounds[b]
                        && self.sums[c] == self.sums[b]
                        && self.sizes[c] == self.sizes[b]
                }) {
                    continue;
                }
                self.sums[b] = self.sums[b].clone() + self.vals[j].clone();
                self.sizes[b] += 1;
                self.cur[j] = b;
                if self.go(k + 1) {
                    return true;
                }
                self.sums[b] = self.sums[b].clone() - self.vals[j].clone();
                self.sizes[b] -= 1;
            }
            false
        }
    }
    let mut s = S {
        vals,
        t,
        bounds,
        order,
        rem_pos,
        sums: vec![T::zero(); n],
        sizes: vec![0; n],
        cur: vec![0; m],
    };
    if !s.go(0) {
        return None;
    }
    let mut parts = vec![Vec::new(); n];
    for (j, &b) in s.cur.iter().enumerate() {
        parts[b].push(j);
    }
    Some(parts)
}

/// Largest `n^m` accepted by the Pareto-optimality search.
pub const PO_GUARD: u64 = 1 << 22;

pub(crate) fn power_within(n: usize, m: usize, limit: u64) -> bool {
    let mut acc: u64 = 1;
    for _ in 0..m {
        acc = match acc.checked_mul(n as u64) {
            Some(a) if a <= limit => a,
            _ => return false,
        };
    }
    true
}

/// Exhaustive Pareto-dominance search; the witness is the first dominating
/// allocation in lexicographic order of item owners.
pub fn check_po(inst: &Instance, alloc: &Allocation) -> Result<FairnessReport> {
    let bundles = alloc.index_bundles(inst)?;
    if bundles.iter().map(Vec::len).sum::<usize>() != inst.m() {
        return precondition("PO check needs a complete allocation");
    }
    if !power_within(inst.n, inst.m(), PO_GUARD) {
        return Err(Error::TooLarge(format!(
            "n^m exceeds {PO_GUARD} for the PO search"
        )));
    }
    let n = inst.n;
    let m = inst.m();
    let target: Vec<Value> = bundles
        .iter()
        .enumerate()
        .map(|(i, b)| inst.value_of(i, b))
        .collect();
    let vals: Vec<Vec<Value>> = (0..n)
        .map(|i| (0..m).map(|j| inst.value(i, j)).collect())
        .collect();
    let mut rem_pos = vec![vec![Value::zero(); m + 1]; n];
    for i in 0..n {
        for j in (0..m).rev() {
            let v = &vals[i][j];
            let add = if v.is_finite() && v.finite.is_positive() {
                v.clone()
            } else {
                Value::zero()
            };
            rem_pos[i][j] = rem_pos[i][j + 1].clone() + add;
        }
    }
    struct S<'a> {
        vals: &'a [Vec<Value>],
        target: &'a [Value],
        rem_pos: &'a [Vec<Value>],
        cur: Vec<Value>,
        owners: Vec<usize>,
    }
    impl S<'_> {
        fn go(&mut self, j: usize) -> bool {
            let n = self.cur.len();
            for i in 0..n {
                if self.cur[i].clone() + self.rem_pos[i][j].clone() < self.target[i] {
                    return false;
                }
            }
            if j == self.owners.len() {
                return (0..n).any(|i| self.cur[i] > self.target[i]);
            }
            for i in 0..n {
                let v = self.vals[i][j].clone();
                self.cur[i] = self.cur[i].clone() + v.clone();
                self.owners[j] = i;
                if self.go(j + 1) {
                    return true;
                }
                self.cur[i] = self.cur[i].clone() - v;
            }
            false
        }
    }
    let mut s = S {
        vals: &vals,
        target: &target,
        rem_pos: &rem_pos,
        cur: vec![Value::zero(); n],
        owners: vec![0; m],
    };
    if s.go(0) {
        let better = Allocation::from_owners(inst, &s.owners);
        return Ok(FairnessReport::fail(
            Criterion::Po,
            Witness::Dominated { allocation: better },
        ));
    }
    Ok(FairnessReport::ok(Criterion::Po))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Edge;

    fn alloc(b: &[&[&str]]) -> Allocation {
        Allocation::new(
            b.iter()
                .map(|x| x.iter().map(|s| s.to_string()).collect())
                .collect(),
        )
    }

    #[test]
    fn prop_but_not_ef() {
        let inst = Instance::from_ints(&[[1, 2, 0], [0, 1, 2], [2, 0, 1]]).unwrap();
        let a = alloc(&[&["o1"], &["o2"], &["o3"]]);
        assert!(check(&inst, &a, Criterion::Prop).unwrap().holds);
        let ef = check(&inst, &a, Criterion::Ef).unwrap();
        assert!(!ef.holds);
        assert_eq!(
            ef.witness,
            Some(Witness::Envy {
                envier: 0,
                envied: 1,
                item: None
            })
        );
    }

    #[test]
    fn ef1_but_not_efx() {
        let inst = Instance::from_ints(&[[3, 2, 1], [3, 2, 1]]).unwrap();
        let a = alloc(&[&["o2"], &["o1", "o3"]]);
        assert!(check(&inst, &a, Criterion::Ef1).unwrap().holds);
        let r = check(&inst, &a, Criterion::Efx0).unwrap();
        assert_eq!(
            r.witness,
            Some(Witness::Envy {
                envier: 0,
                envied: 1,
                item: Some("o3".into())
            })
        );
        assert!(!check(&inst, &a, Criterion::EfxMinus).unwrap().holds);
    }

    #[test]
    fn single_agent_satisfies_everything() {
        let inst = Instance::from_ints(&[[3, -2, 1]]).unwrap();
        let a = alloc(&[&["o1", "o2", "o3"]]);
        for c in Criterion::ALL {
            assert!(check(&inst, &a, c).unwrap().holds, "{c}");
        }
    }

    #[test]
    fn partial_allocations_only_for_efx0() {
        let inst = Instance::from_ints(&[[1, 1], [1, 1]]).unwrap();
        let a = alloc(&[&["o1"], &[]]);
        assert!(check(&inst, &a, Criterion::Ef1).is_err());
        let r = check(&inst, &a, Criterion::Efx0).unwrap();
        assert_eq!(r.note.as_deref(), Some(PARTIAL_NOTE));
    }

    #[test]
    fn zero_goods_make_efx0_strict() {
        // Agent 0 envies a bundle holding a zero-valued good.
        let inst = Instance::from_ints(&[[1, 0, 2], [1, 1, 1]]).unwrap();
        let a = alloc(&[&["o1"], &["o2", "o3"]]);
        assert!(!check(&inst, &a, Criterion::Efx0).unwrap().holds);
        assert!(check(&inst, &a, Criterion::EfxMinus).unwrap().holds);
    }

    #[test]
    fn mms_thresholds_of_the_three_agent_example() {
        let inst =
            Instance::from_ints(&[[1, 2, 3, 4, 5, 6], [1, 10, 6, 0, 0, 0], [10, 1, 1, 1, 1, 1]])
                .unwrap();
        assert_eq!(mms_thresholds(&inst).unwrap(), vec![int(7), int(1), int(2)]);
        let good = alloc(&[&["o1", "o6"], &["o2"], &["o3", "o4", "o5"]]);
        assert!(check_mms(&inst, &good).unwrap().holds);
        let greedy = alloc(&[&["o1", "o2", "o3", "o4", "o5", "o6"], &[], &[]]);
        let r = check_mms(&inst, &greedy).unwrap();
        assert_eq!(
            r.witness,
            Some(Witness::Threshold {
                agent: 1,
                value: "0".into(),
                threshold: "1".into()
            })
        );
    }

    #[test]
    fn mms_small_cases() {
        let one = Instance::from_ints(&[[4, -1, 2]]).unwrap();
        assert_eq!(mms_threshold(&one, 0).unwrap().0, int(5));
        let chores = Instance::from_ints(&[[-1, -1, -1, -1], [-1, -1, -1, -1]]).unwrap();
        assert_eq!(mms_threshold(&chores, 0).unwrap().0, int(-2));
        let big = Instance::from_ints(&[vec![1; 35], vec![1; 35]]).unwrap();
        assert!(matches!(mms_threshold(&big, 0), Err(Error::TooLarge(_))));
    }

    #[test]
    fn constrained_partitions_respect_sizes() {
        let vals: Vec<Rational> = [5, 4, 3, 3, 2, 1].iter().map(|&v| int(v)).collect();
        let p = find_partition(&vals, &int(6), &[(3, 3), (3, 3)]).unwrap();
        assert!(p.iter().all(|b| b.len() == 3));
        assert!(find_partition(&vals, &int(10), &[(0, 6), (0, 6)]).is_none());
    }

    #[test]
    fn po_detects_wasted_goods() {
        let inst = Instance::from_ints(&[[0], [1]]).unwrap();
        let r = check_po(&inst, &alloc(&[&["o1"], &[]])).unwrap();
        assert!(!r.holds);
        assert_eq!(
            r.witness,
            Some(Witness::Dominated {
                allocation: alloc(&[&[], &["o1"]])
            })
        );
        assert!(check_po(&inst, &alloc(&[&[], &["o1"]])).unwrap().holds);
    }

    #[test]
    fn pef_on_parallel_edges() {
        let g = Multigraph::new(
            2,
            vec![
                Edge::new("h", 0, 1, int(3), int(3)),
                Edge::new("l", 0, 1, int(1), int(1)),
            ],
        )
        .unwrap();
        assert!(!check_pef(&g, &Orientation::from_heads(&g, &[0, 1]), 0, 1).unwrap());
        let two = Multigraph::from_int_edges(2, &[(0, 1, 1, 1), (0, 1, 1, 1)]).unwrap();
        assert!(check_pef(&two, &Orientation::from_heads(&two, &[0, 1]), 0, 1).unwrap());
        assert!(!check_pef(&two, &Orientation::from_heads(&two, &[0, 0]), 0, 1).unwrap());
        assert!(check_pef(&two, &Orientation::default(), 0, 0).is_err());
    }
}
