//! Instances, multigraphs, allocations and orientations.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::ops::{Add, Sub};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rational::{self, format_rational, int, Rational};

/// Utility of a bundle. Forbidden items behave like chores of unbounded
/// magnitude: fewer forbidden items always wins, ties fall to the finite part.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Value {
    pub forbidden: i64,
    pub finite: Rational,
}

impl Value {
    pub fn finite(r: Rational) -> Self {
        Value {
            forbidden: 0,
            finite: r,
        }
    }

    pub fn neg_infinity() -> Self {
        Value {
            forbidden: 1,
            finite: Rational::zero(),
        }
    }

    pub fn zero() -> Self {
        Value::finite(Rational::zero())
    }

    pub fn is_finite(&self) -> bool {
        self.forbidden == 0
    }

    pub fn scale(&self, k: i64) -> Self {
        Value {
            forbidden: self.forbidden * k,
            finite: &self.finite * int(k),
        }
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .forbidden
            .cmp(&self.forbidden)
            .then_with(|| self.finite.cmp(&other.finite))
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Value {
    type Output = Value;
    fn add(self, o: Value) -> Value {
        Value {
            forbidden: self.forbidden + o.forbidden,
            finite: self.finite + o.finite,
        }
    }
}

impl Sub for Value {
    type Output = Value;
    fn sub(self, o: Value) -> Value {
        Value {
            forbidden: self.forbidden - o.forbidden,
            finite: self.finite - o.finite,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self.forbidden {
            0 => f.write_str(&format_rational(&self.finite)),
            k if k > 0 => write!(f, "-inf*{k}{:+}", self.finite),
            k => write!(f, "+inf*{}{:+}", -k, self.finite),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceRepr", into = "InstanceRepr")]
pub struct Instance {
    pub n: usize,
    pub items: Vec<String>,
    pub utilities: Vec<Vec<Rational>>,
    /// `(agent, item)` entries whose utility is negative infinity.
    pub forbidden: BTreeSet<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceRepr {
    agents: usize,
    items: Vec<String>,
    #[serde(with = "rational::matrix")]
    utilities: Vec<Vec<Rational>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    forbidden: Vec<(usize, usize)>,
}

impl TryFrom<InstanceRepr> for Instance {
    type Error = Error;
    fn try_from(r: InstanceRepr) -> Result<Self> {
        let inst = Instance {
            n: r.agents,
            items: r.items,
            utilities: r.utilities,
            forbidden: r.forbidden.into_iter().collect(),
        };
        inst.checked()
    }
}

impl From<Instance> for InstanceRepr {
    fn from(i: Instance) -> Self {
        InstanceRepr {
            agents: i.n,
            items: i.items,
            utilities: i.utilities,
            forbidden: i.forbidden.into_iter().collect(),
        }
    }
}

/// Default item names `o1..om`.
pub fn default_item_ids(m: usize) -> Vec<String> {
    (1..=m).map(|j| format!("o{j}")).collect()
}

/// Lists every structural problem of `inst`; empty means well-formed.
pub fn validate_instance(inst: &Instance) -> Vec<String> {
    let mut out = Vec::new();
    if inst.n == 0 {
        out.push("instance needs at least one agent".to_string());
    }
    if inst.utilities.len() != inst.n {
        out.push(format!(
            "expected {} utility rows, found {}",
            inst.n,
            inst.utilities.len()
        ));
    }
    if inst
        .utilities
        .iter()
        .any(|row| row.len() != inst.items.len())
    {
        out.push("row length mismatch".to_string());
    }
    let mut seen = HashSet::new();
    for id in &inst.items {
        if !seen.insert(id.as_str()) {
            out.push(format!("duplicate item id {id}"));
        }
    }
    for &(i, j) in &inst.forbidden {
        if i >= inst.n || j >= inst.items.len() {
            out.push(format!("forbidden entry ({i},{j}) out of range"));
        }
    }
    out
}

impl Instance {
    /// Builds an instance with one row per agent; fails on malformed input.
    pub fn new(items: Vec<String>, utilities: Vec<Vec<Rational>>) -> Result<Self> {
        Instance {
            n: utilities.len(),
            items,
            utilities,
            forbidden: BTreeSet::new(),
        }
        .checked()
    }

    /// Integer rows with items named `o1..om`.
    pub fn from_ints<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let m = rows.first().map_or(0, |r| r.as_ref().len());
        let utilities = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&v| int(v)).collect())
            .collect();
        Instance::new(default_item_ids(m), utilities)
    }

    pub fn with_forbidden(
        mut self,
        cells: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        for (i, j) in cells {
            self.forbidden.insert((i, j));
            if i < self.n && j < self.items.len() {
                self.utilities[i][j] = Rational::zero();
            }
        }
        self.checked()
    }

    fn checked(self) -> Result<Self> {
        let problems = validate_instance(&self);
        if problems.is_empty() {
            Ok(self)
        } else {
            invalid(problems.join("; "))
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }

    pub fn m(&self) -> usize {
        self.items.len()
    }

    pub fn item_index(&self, id: &str) -> Option<usize> {
        self.items.iter().position(|x| x == id)
    }

    pub fn item_lookup(&self) -> HashMap<&str, usize> {
        self.items
            .iter()
            .enumerate()
            .map(|(j, s)| (s.as_str(), j))
            .collect()
    }

    pub fn is_forbidden(&self, agent: usize, item: usize) -> bool {
        !self.forbidden.is_empty() && self.forbidden.contains(&(agent, item))
    }

    pub fn has_forbidden(&self) -> bool {
        !self.forbidden.is_empty()
    }

    pub fn value(&self, agent: usize, item: usize) -> Value {
        if self.is_forbidden(agent, item) {
            Value::neg_infinity()
        } else {
            Value::finite(self.utilities[agent][item].clone())
        }
    }

    /// Utility of a bundle given by item indices.
    pub fn value_of(&self, agent: usize, bundle: &[usize]) -> Value {
        bundle
            .iter()
            .fold(Value::zero(), |acc, &j| acc + self.value(agent, j))
    }

    /// Finite additive utility of a bundle given by item indices.
    pub fn utility_of(&self, agent: usize, bundle: &[usize]) -> Rational {
        bundle.iter().map(|&j| &self.utilities[agent][j]).sum()
    }

    pub fn total_value(&self, agent: usize) -> Value {
        self.value_of(agent, &(0..self.m()).collect::<Vec<_>>())
    }

    pub fn kind(&self) -> InstanceKind {
        let neg =
            |i: usize, j: usize| self.is_forbidden(i, j) || self.utilities[i][j].is_negative();
        let pos =
            |i: usize, j: usize| !self.is_forbidden(i, j) && self.utilities[i][j].is_positive();
        let cells = || (0..self.n).flat_map(|i| (0..self.m()).map(move |j| (i, j)));
        if cells().all(|(i, j)| !neg(i, j)) {
            InstanceKind::Goods
        } else if cells().all(|(i, j)| !pos(i, j)) {
            InstanceKind::Chores
        } else {
            InstanceKind::Mixed
        }
    }

    /// Keeps the given agents and items, in the given order.
    pub fn restrict(&self, agents: &[usize], items: &[usize]) -> Instance {
        let mut forbidden = BTreeSet::new();
        for (a, &i) in agents.iter().enumerate() {
            for (b, &j) in items.iter().enumerate() {
                if self.is_forbidden(i, j) {
                    forbidden.insert((a, b));
                }
            }
        }
        Instance {
            n: agents.len(),
            items: items.iter().map(|&j| self.items[j].clone()).collect(),
            utilities: agents
                .iter()
                .map(|&i| {
                    items
                        .iter()
                        .map(|&j| self.utilities[i][j].clone())
                        .collect()
                })
                .collect(),
            forbidden,
        }
    }

    /// Appends `k` items worth zero to everyone, with ids not already in use.
    pub fn with_dummies(&self, k: usize) -> (Instance, Vec<String>) {
        let mut out = self.clone();
        let mut added = Vec::new();
        let used: HashSet<String> = self.items.iter().cloned().collect();
        let mut c = 1;
        while added.len() < k {
            let id = format!("dummy{c}");
            c += 1;
            if used.contains(&id) {
                continue;
            }
            out.items.push(id.clone());
            for row in &mut out.utilities {
                row.push(Rational::zero());
            }
            added.push(id);
        }
        (out, added)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceKind {
    Goods,
    Chores,
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AgentClass {
    GoodsAgent,
    ChoresAgent,
    MixedAgent,
}

/// Both sign flags of an agent's row; an all-zero row has both set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AgentFlags {
    pub goods: bool,
    pub chores: bool,
}

pub fn agent_flags(inst: &Instance, agent: usize) -> AgentFlags {
    let m = inst.m();
    let goods =
        (0..m).all(|j| !inst.is_forbidden(agent, j) && !inst.utilities[agent][j].is_negative());
    let chores =
        (0..m).all(|j| inst.is_forbidden(agent, j) || !inst.utilities[agent][j].is_positive());
    AgentFlags { goods, chores }
}

pub fn agent_class(inst: &Instance, agent: usize) -> AgentClass {
    let f = agent_flags(inst, agent);
    if f.goods {
        AgentClass::GoodsAgent
    } else if f.chores {
        AgentClass::ChoresAgent
    } else {
        AgentClass::MixedAgent
    }
}

/// Additive utility of a bundle of item ids. Forbidden items are rejected
/// here because they have no finite utility; use [`bundle_value`] instead.
pub fn bundle_utility<S: AsRef<str>>(
    inst: &Instance,
    agent: usize,
    bundle: &[S],
) -> Result<Rational> {
    let v = bundle_value(inst, agent, bundle)?;
    if !v.is_finite() {
        return invalid(format!(
            "bundle contains an item forbidden to agent {agent}"
        ));
    }
    Ok(v.finite)
}

pub fn bundle_value<S: AsRef<str>>(inst: &Instance, agent: usize, bundle: &[S]) -> Result<Value> {
    if agent >= inst.n {
        return invalid(format!("agent {agent} out of range"));
    }
    let mut total = Value::zero();
    for id in bundle {
        let j = inst
            .item_index(id.as_ref())
            .ok_or_else(|| Error::UnknownItem(id.as_ref().to_string()))?;
        total = total + inst.value(agent, j);
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Allocation {
    pub bundles: Vec<Vec<String>>,
}

impl Allocation {
    pub fn new(bundles: Vec<Vec<String>>) -> Self {
        Allocation { bundles }
    }

    /// Builds from item indices; each bundle is listed in instance item order.
    pub fn from_indices(inst: &Instance, bundles: &[Vec<usize>]) -> Self {
        Allocation {
            bundles: bundles
                .iter()
                .map(|b| {
                    let mut b = b.clone();
                    b.sort_unstable();
                    b.into_iter().map(|j| inst.items[j].clone()).collect()
                })
                .collect(),
        }
    }

    /// Builds from an owner per item.
    pub fn from_owners(inst: &Instance, owners: &[usize]) -> Self {
        let mut bundles = vec![Vec::new(); inst.n];
        for (j, &i) in owners.iter().enumerate() {
            bundles[i].push(j);
        }
        Allocation::from_indices(inst, &bundles)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("allocation serializes")
    }

    /// Bundles as item indices, checking ids, disjointness and bundle count.
    pub fn index_bundles(&self, inst: &Instance) -> Result<Vec<Vec<usize>>> {
        if self.bundles.len() != inst.n {
            return invalid(format!(
                "allocation has {} bundles for {} agents",
                self.bundles.len(),
                inst.n
            ));
        }
        let lookup = inst.item_lookup();
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(self.bundles.len());
        for b in &self.bundles {
            let mut ib = Vec::with_capacity(b.len());
            for id in b {
                let j = *lookup
                    .get(id.as_str())
                    .ok_or_else(|| Error::UnknownItem(id.clone()))?;
                if !seen.insert(j) {
                    return invalid(format!("item {id} allocated twice"));
                }
                ib.push(j);
            }
            out.push(ib);
        }
        Ok(out)
    }

    pub fn is_complete(&self, inst: &Instance) -> Result<bool> {
        let b = self.index_bundles(inst)?;
        Ok(b.iter().map(Vec::len).sum::<usize>() == inst.m())
    }

    /// Owner of each item, `None` when unallocated.
    pub fn owners(&self, inst: &Instance) -> Result<Vec<Option<usize>>> {
        let mut out = vec![None; inst.m()];
        for (i, b) in self.index_bundles(inst)?.iter().enumerate() {
            for &j in b {
                out[j] = Some(i);
            }
        }
        Ok(out)
    }

    /// Same bundles with every item listed in instance order.
    pub fn normalized(&self, inst: &Instance) -> Result<Allocation> {
        Ok(Allocation::from_indices(inst, &self.index_bundles(inst)?))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub id: String,
    pub a: usize,
    pub b: usize,
    #[serde(
        serialize_with = "rational::serialize",
        deserialize_with = "rational::deserialize"
    )]
    pub wa: Rational,
    #[serde(
        serialize_with = "rational::serialize",
        deserialize_with = "rational::deserialize"
    )]
    pub wb: Rational,
}

impl Edge {
    pub fn new(id: impl Into<String>, a: usize, b: usize, wa: Rational, wb: Rational) -> Self {
        Edge {
            id: id.into(),
            a,
            b,
            wa,
            wb,
        }
    }

    pub fn is_loop(&self) -> bool {
        self.a == self.b
    }

    pub fn other(&self, v: usize) -> usize {
        if v == self.a {
            self.b
        } else {
            self.a
        }
    }

    pub fn touches(&self, v: usize) -> bool {
        self.a == v || self.b == v
    }

    /// Weight at endpoint `v`; zero if `v` is not an endpoint.
    pub fn weight_at(&self, v: usize) -> Rational {
        if v == self.a {
            self.wa.clone()
        } else if v == self.b {
            self.wb.clone()
        } else {
            Rational::zero()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MultigraphRepr", into = "MultigraphRepr")]
pub struct Multigraph {
    pub vertices: usize,
    pub edges: Vec<Edge>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MultigraphRepr {
    vertices: usize,
    edges: Vec<Edge>,
}

impl TryFrom<MultigraphRepr> for Multigraph {
    type Error = Error;
    fn try_from(r: MultigraphRepr) -> Result<Self> {
        Multigraph::new(r.vertices, r.edges)
    }
}

impl From<Multigraph> for MultigraphRepr {
    fn from(g: Multigraph) -> Self {
        MultigraphRepr {
            vertices: g.vertices,
            edges: g.edges,
        }
    }
}

/// Structural problems of a multigraph; empty means well-formed.
pub fn validate_multigraph(g: &Multigraph) -> Vec<String> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for e in &g.edges {
        if e.a >= g.vertices || e.b >= g.vertices {
            out.push(format!("edge {} has an endpoint out of range", e.id));
        }
        if !seen.insert(e.id.as_str()) {
            out.push(format!("duplicate edge id {}", e.id));
        }
        if e.is_loop() && e.wa != e.wb {
            out.push(format!("self-loop {} has two different weights", e.id));
        }
    }
    out
}

impl Multigraph {
    pub fn new(vertices: usize, edges: Vec<Edge>) -> Result<Self> {
        let g = Multigraph { vertices, edges };
        let problems = validate_multigraph(&g);
        if problems.is_empty() {
            Ok(g)
        } else {
            invalid(problems.join("; "))
        }
    }

    /// Integer weights; ids `e1..`.
    pub fn from_int_edges(vertices: usize, edges: &[(usize, usize, i64, i64)]) -> Result<Self> {
        let es = edges
            .iter()
            .enumerate()
            .map(|(k, &(a, b, wa, wb))| Edge::new(format!("e{}", k + 1), a, b, int(wa), int(wb)))
            .collect();
        Multigraph::new(vertices, es)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("multigraph serializes")
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn is_symmetric(&self) -> bool {
        self.edges.iter().all(|e| e.wa == e.wb)
    }

    /// Number of edges joining `u` and `v` (self-loops when `u == v`).
    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|e| (e.a == u && e.b == v) || (e.a == v && e.b == u))
            .count()
    }

    pub fn incident(&self, v: usize) -> impl Iterator<Item = (usize, &Edge)> {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.touches(v))
    }
}

/// One item per edge; agents are the vertices.
pub fn graphical_to_instance(g: &Multigraph) -> Instance {
    let utilities = (0..g.vertices)
        .map(|v| g.edges.iter().map(|e| e.weight_at(v)).collect())
        .collect();
    Instance {
        n: g.vertices,
        items: g.edges.iter().map(|e| e.id.clone()).collect(),
        utilities,
        forbidden: BTreeSet::new(),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Orientation {
    pub assign: BTreeMap<String, usize>,
}

impl Orientation {
    /// `heads[k]` is the vertex receiving edge `k`.
    pub fn from_heads(g: &Multigraph, heads: &[usize]) -> Self {
        Orientation {
            assign: g
                .edges
                .iter()
                .zip(heads)
                .map(|(e, &h)| (e.id.clone(), h))
                .collect(),
        }
    }

    /// Partial form: `None` leaves an edge unoriented.
    pub fn from_partial(g: &Multigraph, heads: &[Option<usize>]) -> Self {
        Orientation {
            assign: g
                .edges
                .iter()
                .zip(heads)
                .filter_map(|(e, h)| h.map(|h| (e.id.clone(), h)))
                .collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("orientation serializes")
    }

    /// Head per edge in graph order, checking ids and endpoints.
    pub fn heads(&self, g: &Multigraph) -> Result<Vec<Option<usize>>> {
        let mut out = vec![None; g.edges.len()];
        for (id, &v) in &self.assign {
            let k = g
                .edge_index(id)
                .ok_or_else(|| Error::UnknownEdge(id.clone()))?;
            if !g.edges[k].touches(v) {
                return invalid(format!("edge {id} assigned to non-endpoint {v}"));
            }
            out[k] = Some(v);
        }
        Ok(out)
    }

    pub fn complete_heads(&self, g: &Multigraph) -> Result<Vec<usize>> {
        self.heads(g)?
            .into_iter()
            .zip(&g.edges)
            .map(|(h, e)| h.ok_or_else(|| Error::Invalid(format!("edge {} is not oriented", e.id))))
            .collect()
    }

    pub fn is_complete(&self, g: &Multigraph) -> Result<bool> {
        Ok(self.heads(g)?.iter().all(Option::is_some))
    }

    /// The allocation over `graphical_to_instance(g)`; unoriented edges stay unallocated.
    pub fn to_allocation(&self, g: &Multigraph) -> Result<Allocation> {
        let mut bundles = vec![Vec::new(); g.vertices];
        for (k, h) in self.heads(g)?.into_iter().enumerate() {
            if let Some(v) = h {
                bundles[v].push(g.edges[k].id.clone());
            }
        }
        Ok(Allocation { bundles })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn validation_reports_problems() {
        let ok = Instance::from_ints(&[[1, 2, 3], [3, 2, 1]]).unwrap();
        assert!(validate_instance(&ok).is_empty());
        let mut bad = ok.clone();
        bad.utilities = vec![vec![int(1), int(2)], vec![int(1), int(2)]];
        assert_eq!(validate_instance(&bad), vec!["row length mismatch"]);
        let mut dup = ok.clone();
        dup.items[1] = "o1".into();
        assert_eq!(validate_instance(&dup), vec!["duplicate item id o1"]);
    }

    #[test]
    fn bundle_utilities_are_additive() {
        let inst = Instance::from_ints(&[[1, 2, 3, 4]]).unwrap();
        assert_eq!(bundle_utility(&inst, 0, &["o2", "o4"]).unwrap(), int(6));
        assert_eq!(bundle_utility::<&str>(&inst, 0, &[]).unwrap(), int(0));
        assert_eq!(
            bundle_utility(&inst, 0, &["o9"]),
            Err(Error::UnknownItem("o9".into()))
        );
    }

    #[test]
    fn forbidden_values_order_below_everything() {
        assert!(Value::neg_infinity() < Value::finite(int(-1000)));
        let two = Value::neg_infinity() + Value::neg_infinity();
        assert!(two < Value::neg_infinity());
        assert_eq!((two - Value::neg_infinity()), Value::neg_infinity());
    }

    #[test]
    fn agent_classes() {
        let inst = Instance::from_ints(&[
            vec![1, 0, 6, 5],
            vec![-1, -1, -1, 0],
            vec![2, -3, -3, -3],
            vec![0, 0, 0, 0],
        ])
        .unwrap();
        assert_eq!(agent_class(&inst, 0), AgentClass::GoodsAgent);
        assert_eq!(agent_class(&inst, 1), AgentClass::ChoresAgent);
        assert_eq!(agent_class(&inst, 2), AgentClass::MixedAgent);
        assert_eq!(agent_class(&inst, 3), AgentClass::GoodsAgent);
        assert_eq!(
            agent_flags(&inst, 3),
            AgentFlags {
                goods: true,
                chores: true
            }
        );
    }

    #[test]
    fn graphical_translation() {
        let g = Multigraph::from_int_edges(2, &[(0, 1, -1, -1)]).unwrap();
        assert_eq!(
            graphical_to_instance(&g).utilities,
            vec![vec![int(-1)], vec![int(-1)]]
        );
        let g = Multigraph::from_int_edges(2, &[(0, 0, -5, -5)]).unwrap();
        assert_eq!(
            graphical_to_instance(&g).utilities,
            vec![vec![int(-5)], vec![int(0)]]
        );
        assert!(Multigraph::from_int_edges(2, &[(0, 0, -5, -4)]).is_err());
        assert!(Multigraph::from_int_edges(2, &[(0, 2, 1, 1)]).is_err());
    }

    #[test]
    fn json_round_trips() {
        let inst = Instance::new(
            vec!["a".into(), "b".into()],
            vec![vec![ratio(1, 2), int(-3)]],
        )
        .unwrap()
        .with_forbidden([(0, 1)])
        .unwrap();
        assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst);
        let parsed =
            Instance::from_json(r#"{"agents":1,"items":["x"],"utilities":[[3]]}"#).unwrap();
        assert_eq!(parsed.utilities[0][0], int(3));
        assert!(Instance::from_json(r#"{"agents":2,"items":["x"],"utilities":[[3]]}"#).is_err());

        let g = Multigraph::new(2, vec![Edge::new("e1", 0, 1, int(-1), ratio(-1, 3))]).unwrap();
        let text = g.to_json();
        assert!(text.contains(r#""wb":"-1/3""#));
        assert_eq!(Multigraph::from_json(&text).unwrap(), g);

        let alloc = Allocation::new(vec![vec!["o1".into()], vec!["o2".into(), "o3".into()]]);
        assert_eq!(Allocation::from_json(&alloc.to_json()).unwrap(), alloc);
        let pi = Orientation::from_heads(&g, &[1]);
        assert_eq!(pi.to_json(), r#"{"assign":{"e1":1}}"#);
        assert_eq!(Orientation::from_json(&pi.to_json()).unwrap(), pi);
    }

    #[test]
    fn orientation_converts_to_allocation() {
        let g = Multigraph::from_int_edges(3, &[(0, 1, 1, 1), (1, 2, 1, 1)]).unwrap();
        let pi = Orientation::from_heads(&g, &[0, 2]);
        assert_eq!(
            pi.to_allocation(&g).unwrap().bundles,
            vec![vec!["e1".to_string()], vec![], vec!["e2".to_string()]]
        );
        let bad = Orientation {
            assign: [("e1".to_string(), 2)].into_iter().collect(),
        };
        assert!(bad.heads(&g).is_err());
    }
}
