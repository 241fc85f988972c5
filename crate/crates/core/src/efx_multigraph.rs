//! EFX₀ orientations of bi-valued symmetric multigraphs of goods whose heavy
//! components are not non-trivial odd multitrees (NTOMs).

use std::collections::{BTreeMap, VecDeque};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, precondition, Result};
use crate::fairness::{check, Criterion};
use crate::model::{graphical_to_instance, Multigraph, Orientation};
use crate::oracle::{enumerate_orientations, SearchBudget};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiValuedGraph {
    pub g: Multigraph,
    #[serde(with = "crate::rational")]
    pub alpha: Rational,
    #[serde(with = "crate::rational")]
    pub beta: Rational,
}

impl BiValuedGraph {
    pub fn new(g: Multigraph, alpha: Rational, beta: Rational) -> Result<Self> {
        if beta.is_negative() || alpha <= beta {
            return invalid("bi-valued weights need alpha > beta >= 0");
        }
        if !g.is_symmetric() {
            return invalid("bi-valued graphs must be symmetric");
        }
        if let Some(e) = g.edges.iter().find(|e| e.wa != alpha && e.wa != beta) {
            return invalid(format!(
                "edge {} has a weight other than alpha or beta",
                e.id
            ));
        }
        Ok(BiValuedGraph { g, alpha, beta })
    }

    /// Reads alpha and beta off the edge weights. A graph with one distinct
    /// weight `w` is read as all light, with alpha = w + 1.
    pub fn infer(g: Multigraph) -> Result<Self> {
        let mut ws: Vec<Rational> = g.edges.iter().map(|e| e.wa.clone()).collect();
        ws.sort();
        ws.dedup();
        let (alpha, beta) = match ws.as_slice() {
            [] => (Rational::from_integer(1.into()), Rational::zero()),
            [w] => (w + Rational::from_integer(1.into()), w.clone()),
            [b, a] => (a.clone(), b.clone()),
            _ => return invalid("a bi-valued graph has at most two distinct weights"),
        };
        BiValuedGraph::new(g, alpha, beta)
    }

    pub fn is_heavy(&self, edge: usize) -> bool {
        self.g.edges[edge].wa == self.alpha
    }

    fn between(&self, i: usize, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.g
            .edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| !e.is_loop() && e.touches(i) && e.touches(j))
            .map(|(k, _)| k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentKind {
    Type1,
    Type2,
    Trivial,
    Ntom,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ComponentWitness {
    /// Two vertices joined by an even number of heavy edges.
    EvenPair { v: usize, w: usize },
    /// A heavy self-loop at `v`.
    HeavyLoop { edge: usize, v: usize },
    /// A heavy edge between `v` and `w` whose pair carries no tree edge.
    ExtraEdge { edge: usize, v: usize, w: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeavyComponent {
    pub vertices: Vec<usize>,
    pub kind: ComponentKind,
    pub ntom: bool,
    pub witness: Option<ComponentWitness>,
    /// Heavy spanning tree, as edge indices.
    pub tree: Vec<usize>,
}

/// Heavy components in order of their smallest vertex.
pub fn classify_components(bg: &BiValuedGraph) -> Vec<HeavyComponent> {
    let g = &bg.g;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); g.vertices];
    for (k, e) in g.edges.iter().enumerate() {
        if bg.is_heavy(k) && !e.is_loop() {
            adj[e.a].push(k);
            adj[e.b].push(k);
        }
    }
    let mut seen = vec![false; g.vertices];
    let mut out = Vec::new();
    for s in 0..g.vertices {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut verts = vec![s];
        let mut tree = Vec::new();
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &k in &adj[v] {
                let u = g.edges[k].other(v);
                if !seen[u] {
                    seen[u] = true;
                    verts.push(u);
                    tree.push(k);
                    queue.push_back(u);
                }
            }
        }
        verts.sort_unstable();
        if verts.len() == 1 {
            out.push(HeavyComponent {
                vertices: verts,
                kind: ComponentKind::Trivial,
                ntom: false,
                witness: None,
                tree,
            });
            continue;
        }
        let inside = |v: usize| verts.binary_search(&v).is_ok();
        let heavy: Vec<usize> = (0..g.edges.len())
            .filter(|&k| bg.is_heavy(k) && inside(g.edges[k].a))
            .collect();
        let mut pairs: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for &k in &heavy {
            let e = &g.edges[k];
            if !e.is_loop() {
                *pairs.entry((e.a.min(e.b), e.a.max(e.b))).or_default() += 1;
            }
        }
        let has_loop = heavy.iter().any(|&k| g.edges[k].is_loop());
        let (kind, witness) = if !has_loop && pairs.len() + 1 == verts.len() {
            match pairs.iter().find(|(_, &c)| c % 2 == 0) {
                Some((&(v, w), _)) => (
                    ComponentKind::Type1,
                    Some(ComponentWitness::EvenPair { v, w }),
                ),
                None => (ComponentKind::Ntom, None),
            }
        } else {
            let tree_pairs: Vec<(usize, usize)> = tree
                .iter()
                .map(|&k| {
                    (
                        g.edges[k].a.min(g.edges[k].b),
                        g.edges[k].a.max(g.edges[k].b),
                    )
                })
                .collect();
            let k = *heavy
                .iter()
                .find(|&&k| {
                    let e = &g.edges[k];
                    e.is_loop() || !tree_pairs.contains(&(e.a.min(e.b), e.a.max(e.b)))
                })
                .expect("a heavy component that is not a multitree has a loop or an extra pair");
            let e = &g.edges[k];
            let w = if e.is_loop() {
                ComponentWitness::HeavyLoop { edge: k, v: e.a }
            } else {
                ComponentWitness::ExtraEdge {
                    edge: k,
                    v: e.a.min(e.b),
                    w: e.a.max(e.b),
                }
            };
            (ComponentKind::Type2, Some(w))
        };
        out.push(HeavyComponent {
            vertices: verts,
            kind,
            ntom: kind == ComponentKind::Ntom,
            witness,
            tree,
        });
    }
    out
}

/// Orients `tree` edges away from `roots`.
fn orient_tree_from(g: &Multigraph, tree: &[usize], roots: &[usize], heads: &mut [Option<usize>]) {
    let mut reached: Vec<usize> = roots.to_vec();
    let mut queue: VecDeque<usize> = roots.iter().copied().collect();
    while let Some(v) = queue.pop_front() {
        for &k in tree {
            let e = &g.edges[k];
            if heads[k].is_none() && e.touches(v) {
                let u = e.other(v);
                if !reached.contains(&u) {
                    heads[k] = Some(u);
                    reached.push(u);
                    queue.push_back(u);
                }
            }
        }
    }
}

fn type1_heads(
    bg: &BiValuedGraph,
    k: &HeavyComponent,
    heads: &mut [Option<usize>],
) -> Result<(usize, usize)> {
    let (ComponentKind::Type1, Some(ComponentWitness::EvenPair { v, w })) = (k.kind, &k.witness)
    else {
        return precondition("component is not of type 1");
    };
    let (v, w) = (*v, *w);
    let (heavy, light): (Vec<usize>, Vec<usize>) = bg.between(v, w).partition(|&e| bg.is_heavy(e));
    for (x, &e) in heavy.iter().enumerate() {
        heads[e] = Some(if x % 2 == 0 { v } else { w });
    }
    for (x, &e) in light.iter().enumerate().take(light.len() / 2 * 2) {
        heads[e] = Some(if x % 2 == 0 { v } else { w });
    }
    let rest: Vec<usize> = k
        .tree
        .iter()
        .copied()
        .filter(|&e| !(bg.g.edges[e].touches(v) && bg.g.edges[e].touches(w)))
        .collect();
    orient_tree_from(&bg.g, &rest, &[v, w], heads);
    Ok((v, w))
}

fn type2_heads(bg: &BiValuedGraph, k: &HeavyComponent, heads: &mut [Option<usize>]) -> Result<()> {
    let (edge, v) = match (k.kind, &k.witness) {
        (ComponentKind::Type2, Some(ComponentWitness::HeavyLoop { edge, v }))
        | (ComponentKind::Type2, Some(ComponentWitness::ExtraEdge { edge, v, .. })) => (*edge, *v),
        _ => return precondition("component is not of type 2"),
    };
    orient_tree_from(&bg.g, &k.tree, &[v], heads);
    heads[edge] = Some(v);
    Ok(())
}

/// Splits one heavy edge pair evenly between `(v, w)` together with half of
/// their light edges, then orients a heavy spanning tree away from the pair.
/// Returns the partial orientation and the pair.
pub fn orient_type1(
    bg: &BiValuedGraph,
    k: &HeavyComponent,
) -> Result<(Orientation, (usize, usize))> {
    let mut heads = vec![None; bg.g.edges.len()];
    let pair = type1_heads(bg, k, &mut heads)?;
    Ok((Orientation::from_partial(&bg.g, &heads), pair))
}

/// Orients a heavy spanning tree away from the witness vertex `v` and the
/// witness edge toward `v`.
pub fn orient_type2(bg: &BiValuedGraph, k: &HeavyComponent) -> Result<Orientation> {
    let mut heads = vec![None; bg.g.edges.len()];
    type2_heads(bg, k, &mut heads)?;
    Ok(Orientation::from_partial(&bg.g, &heads))
}

/// Splits non-negative items into two bundles, each EFX₀ towards the other
/// under `weights`. Longest-processing-time greedy: items in decreasing
/// weight go to the lighter bundle. The first bundle is never lighter.
pub fn two_agent_efx_split(weights: &[Rational]) -> Result<(Vec<usize>, Vec<usize>)> {
    if weights.iter().any(Signed::is_negative) {
        return precondition("two-bundle split needs non-negative weights");
    }
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&x, &y| weights[y].cmp(&weights[x]));
    let (mut a, mut b) = (Vec::new(), Vec::new());
    let (mut sa, mut sb) = (Rational::zero(), Rational::zero());
    for x in order {
        if sa <= sb {
            sa += &weights[x];
            a.push(x);
        } else {
            sb += &weights[x];
            b.push(x);
        }
    }
    if sa < sb {
        std::mem::swap(&mut a, &mut b);
    }
    Ok((a, b))
}

fn received(bg: &BiValuedGraph, heads: &[Option<usize>]) -> Vec<Rational> {
    let mut own = vec![Rational::zero(); bg.g.vertices];
    for (e, h) in bg.g.edges.iter().zip(heads) {
        if let Some(h) = *h {
            own[h] += &e.wa;
        }
    }
    own
}

/// No vertex values another vertex's bundle above its own.
fn is_envy_free(bg: &BiValuedGraph, heads: &[Option<usize>]) -> bool {
    let own = received(bg, heads);
    let mut toward: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for (e, h) in bg.g.edges.iter().zip(heads) {
        if let Some(h) = *h {
            if !e.is_loop() {
                *toward.entry((e.other(h), h)).or_insert_with(Rational::zero) += &e.wa;
            }
        }
    }
    toward.iter().all(|(&(i, _), x)| own[i] >= *x)
}

/// Connected components of the whole graph, each sorted.
fn connected_components(g: &Multigraph) -> Vec<Vec<usize>> {
    let mut comp: Vec<usize> = (0..g.vertices).collect();
    fn find(c: &mut [usize], v: usize) -> usize {
        let mut r = v;
        while c[r] != r {
            r = c[r];
        }
        c[v] = r;
        r
    }
    for e in &g.edges {
        let (x, y) = (find(&mut comp, e.a), find(&mut comp, e.b));
        comp[x.max(y)] = x.min(y);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..g.vertices {
        let r = find(&mut comp, v);
        groups.entry(r).or_default().push(v);
    }
    groups.into_values().collect()
}

fn all_but_matching_heads(
    bg: &BiValuedGraph,
    comps: &[HeavyComponent],
) -> Result<(Vec<Option<usize>>, Vec<usize>)> {
    let g = &bg.g;
    if comps.iter().any(|k| k.ntom) {
        return precondition("a heavy component is an NTOM");
    }
    if !comps
        .iter()
        .any(|k| matches!(k.kind, ComponentKind::Type1 | ComponentKind::Type2))
    {
        return precondition("no non-trivial heavy component");
    }
    let mut heads = vec![None; g.edges.len()];
    let mut special = Vec::new();
    let mut processed = vec![false; g.vertices];
    for k in comps {
        match k.kind {
            ComponentKind::Type1 => special.push(type1_heads(bg, k, &mut heads)?),
            ComponentKind::Type2 => type2_heads(bg, k, &mut heads)?,
            _ => continue,
        }
        k.vertices.iter().for_each(|&v| processed[v] = true);
    }
    let mut queue: VecDeque<usize> = (0..g.vertices).filter(|&v| processed[v]).collect();
    while let Some(i) = queue.pop_front() {
        let mut fresh: BTreeMap<usize, usize> = BTreeMap::new();
        for (k, e) in g.edges.iter().enumerate() {
            if !e.is_loop() && e.touches(i) && !processed[e.other(i)] {
                fresh.entry(e.other(i)).or_insert(k);
            }
        }
        for (j, k) in fresh {
            heads[k] = Some(j);
            processed[j] = true;
            queue.push_back(j);
        }
    }
    debug_assert!(is_envy_free(bg, &heads));
    for i in 0..g.vertices {
        for j in i + 1..g.vertices {
            if !processed[i] || special.contains(&(i, j)) {
                continue;
            }
            let between: Vec<usize> = bg.between(i, j).collect();
            let open: Vec<usize> = between
                .iter()
                .copied()
                .filter(|&k| heads[k].is_none())
                .collect();
            if open.is_empty() {
                continue;
            }
            // `x` already holds the pre-oriented edge, if any; `y` picks first.
            let x = between.iter().find_map(|&k| heads[k]).unwrap_or(i);
            let y = if x == i { j } else { i };
            let weights: Vec<Rational> = open.iter().map(|&k| g.edges[k].wa.clone()).collect();
            let (big, small) = two_agent_efx_split(&weights)?;
            big.iter().for_each(|&p| heads[open[p]] = Some(y));
            small.iter().for_each(|&p| heads[open[p]] = Some(x));
            debug_assert!(is_envy_free(bg, &heads));
        }
    }
    let mut matching = Vec::new();
    for (k, e) in g.edges.iter().enumerate() {
        if heads[k].is_none() && processed[e.a] {
            if e.is_loop() {
                heads[k] = Some(e.a);
            } else {
                matching.push(k);
            }
        }
    }
    Ok((heads, matching))
}

/// Envy-free partial orientation of every connected component that holds a
/// non-trivial heavy component: all heavy edges oriented, the unoriented
/// edges a matching of light edges, each privately envy-free. Components
/// without a non-trivial heavy component are left untouched.
pub fn orient_all_but_matching(bg: &BiValuedGraph) -> Result<(Orientation, Vec<String>)> {
    let (heads, matching) = all_but_matching_heads(bg, &classify_components(bg))?;
    let ids = matching.iter().map(|&k| bg.g.edges[k].id.clone()).collect();
    Ok((Orientation::from_partial(&bg.g, &heads), ids))
}

fn finalize_heads(
    bg: &BiValuedGraph,
    heads: &mut [Option<usize>],
    matching: &[usize],
) -> Result<()> {
    let g = &bg.g;
    let mut used = vec![false; g.vertices];
    for &k in matching {
        let e = &g.edges[k];
        if heads[k].is_some() || e.is_loop() || bg.is_heavy(k) || used[e.a] || used[e.b] {
            return precondition(format!(
                "edge {} cannot be part of the light matching",
                e.id
            ));
        }
        used[e.a] = true;
        used[e.b] = true;
    }
    for &k in matching {
        let e = &g.edges[k];
        let (mut v, mut w) = (e.a.min(e.b), e.a.max(e.b));
        let outside = |x: usize| {
            g.edges
                .iter()
                .zip(heads.iter())
                .any(|(f, h)| *h == Some(x) && !(f.touches(v) && f.touches(w) && !f.is_loop()))
        };
        if outside(w) && !outside(v) {
            std::mem::swap(&mut v, &mut w);
        }
        heads[k] = Some(w);
    }
    Ok(())
}

/// Orients each matching edge away from an endpoint that already holds an
/// edge from outside the pair.
pub fn finalize_matching(
    bg: &BiValuedGraph,
    partial: &Orientation,
    matching: &[String],
) -> Result<Orientation> {
    let mut heads = partial.heads(&bg.g)?;
    let idx = matching
        .iter()
        .map(|id| {
            bg.g.edge_index(id)
                .ok_or_else(|| crate::Error::UnknownEdge(id.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    finalize_heads(bg, &mut heads, &idx)?;
    Ok(Orientation::from_partial(&bg.g, &heads))
}

fn is_efx0(g: &Multigraph, heads: &[usize]) -> Result<bool> {
    let o = Orientation::from_heads(g, heads);
    Ok(check(
        &graphical_to_instance(g),
        &o.to_allocation(g)?,
        Criterion::Efx0,
    )?
    .holds)
}

/// Reverses directed paths until no vertex can pass an edge along a path to
/// a vertex with at least two fewer received edges. Self-loops count once.
fn balance(g: &Multigraph, heads: &mut [usize]) {
    let mut indeg = vec![0usize; g.vertices];
    heads.iter().for_each(|&h| indeg[h] += 1);
    'outer: loop {
        for u in 0..g.vertices {
            let mut via: Vec<Option<usize>> = vec![None; g.vertices];
            let mut seen = vec![false; g.vertices];
            seen[u] = true;
            let mut queue = VecDeque::from([u]);
            while let Some(x) = queue.pop_front() {
                if indeg[x] + 2 <= indeg[u] {
                    let mut y = x;
                    while y != u {
                        let k = via[y].expect("path edge");
                        let from = g.edges[k].other(y);
                        heads[k] = y;
                        y = from;
                    }
                    indeg[u] -= 1;
                    indeg[x] += 1;
                    continue 'outer;
                }
                for (k, e) in g.edges.iter().enumerate() {
                    if !e.is_loop() && heads[k] == x && !seen[e.other(x)] {
                        let y = e.other(x);
                        seen[y] = true;
                        via[y] = Some(k);
                        queue.push_back(y);
                    }
                }
            }
        }
        break;
    }
}

/// EFX₀ orientation when no heavy edge joins two distinct vertices.
pub fn orient_trivial_case(bg: &BiValuedGraph) -> Result<Orientation> {
    let g = &bg.g;
    if (0..g.edges.len()).any(|k| bg.is_heavy(k) && !g.edges[k].is_loop()) {
        return precondition("a heavy edge joins two vertices");
    }
    let mut heads: Vec<usize> = g.edges.iter().map(|e| e.a.min(e.b)).collect();
    if bg.beta.is_zero() {
        return Ok(Orientation::from_heads(g, &heads));
    }
    balance(g, &mut heads);
    if !is_efx0(g, &heads)? {
        let found = enumerate_orientations(g, &SearchBudget::default(), |h| {
            is_efx0(g, h).unwrap_or(false)
        })?;
        let o = found
            .into_option()
            .expect("balanced light orientations are EFX0");
        heads = o.complete_heads(g)?;
    }
    Ok(Orientation::from_heads(g, &heads))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BiValuedVerdict {
    Oriented,
    NtomBlocked,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiValuedOutcome {
    pub verdict: BiValuedVerdict,
    pub orientation: Option<Orientation>,
    pub components: Vec<HeavyComponent>,
}

/// Vertices `verts` (sorted) and the edges among them, renumbered.
fn induced(g: &Multigraph, verts: &[usize]) -> (Multigraph, Vec<usize>) {
    let pos = |v: usize| verts.binary_search(&v).ok();
    let mut edges = Vec::new();
    let mut map = Vec::new();
    for (k, e) in g.edges.iter().enumerate() {
        if let (Some(a), Some(b)) = (pos(e.a), pos(e.b)) {
            let mut f = e.clone();
            f.a = a;
            f.b = b;
            edges.push(f);
            map.push(k);
        }
    }
    (
        Multigraph {
            vertices: verts.len(),
            edges,
        },
        map,
    )
}

pub fn efx_orient_bivalued(bg: &BiValuedGraph) -> Result<BiValuedOutcome> {
    let components = classify_components(bg);
    if components.iter().any(|k| k.ntom) {
        return Ok(BiValuedOutcome {
            verdict: BiValuedVerdict::NtomBlocked,
            orientation: None,
            components,
        });
    }
    let g = &bg.g;
    let mut rich = vec![false; g.vertices];
    for k in &components {
        if matches!(k.kind, ComponentKind::Type1 | ComponentKind::Type2) {
            k.vertices.iter().for_each(|&v| rich[v] = true);
        }
    }
    let mut heads: Vec<Option<usize>> = vec![None; g.edges.len()];
    if rich.iter().any(|&r| r) {
        let (h, matching) = all_but_matching_heads(bg, &components)?;
        heads = h;
        finalize_heads(bg, &mut heads, &matching)?;
    }
    let poor: Vec<usize> = connected_components(g)
        .into_iter()
        .filter(|c| !c.iter().any(|&v| rich[v]))
        .flatten()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    if !poor.is_empty() {
        let (sub, map) = induced(g, &poor);
        let sbg = BiValuedGraph {
            g: sub,
            alpha: bg.alpha.clone(),
            beta: bg.beta.clone(),
        };
        let o = orient_trivial_case(&sbg)?;
        for (local, h) in o.complete_heads(&sbg.g)?.into_iter().enumerate() {
            heads[map[local]] = Some(poor[h]);
        }
    }
    let full: Vec<usize> = heads
        .into_iter()
        .map(|h| h.expect("every edge is oriented"))
        .collect();
    debug_assert!(is_efx0(g, &full).unwrap_or(false));
    Ok(BiValuedOutcome {
        verdict: BiValuedVerdict::Oriented,
        orientation: Some(Orientation::from_heads(g, &full)),
        components,
    })
}
