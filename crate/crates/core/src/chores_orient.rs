//! EF1 and EFX₀ orientation deciders for graphs of chores (multiplicity one,
//! self-loops allowed).

use std::collections::VecDeque;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, precondition, Result};
use crate::model::{Edge, Multigraph, Orientation};
use crate::rational::Rational;
use crate::twosat::{solve_2sat, TwoSatFormula};

fn check_chores_graph(g: &Multigraph) -> Result<()> {
    if let Some(e) = g
        .edges
        .iter()
        .find(|e| e.wa.is_positive() || e.wb.is_positive())
    {
        return precondition(format!("edge {} has a positive weight", e.id));
    }
    for (k, e) in g.edges.iter().enumerate() {
        if g.edges[..k]
            .iter()
            .any(|f| (f.a == e.a && f.b == e.b) || (f.a == e.b && f.b == e.a))
        {
            return precondition(format!("edge {} is parallel to another edge", e.id));
        }
    }
    Ok(())
}

/// Orients `edges` (indices into `g`, forming one connected piece over
/// `verts`) so that every vertex receives at most one of them. Needs at most
/// `|verts|` edges. A tree is rooted at `root`, or at its smallest vertex.
fn orient_piece(
    g: &Multigraph,
    verts: &[usize],
    edges: &[usize],
    root: Option<usize>,
    heads: &mut [usize],
) {
    let mut inc: Vec<Vec<usize>> = vec![Vec::new(); g.vertices];
    for &k in edges {
        let e = &g.edges[k];
        inc[e.a].push(k);
        if !e.is_loop() {
            inc[e.b].push(k);
        }
    }
    let mut done = vec![false; g.edges.len()];
    let mut reached = vec![false; g.vertices];
    let mut queue = VecDeque::new();
    if edges.len() == verts.len() {
        // Peel leaves until only the unique cycle is left.
        let mut deg: Vec<usize> = (0..g.vertices)
            .map(|v| {
                inc[v]
                    .iter()
                    .map(|&k| 1 + usize::from(g.edges[k].is_loop()))
                    .sum()
            })
            .collect();
        let mut alive = vec![false; g.vertices];
        for &v in verts {
            alive[v] = true;
        }
        let mut leaves: Vec<usize> = verts.iter().copied().filter(|&v| deg[v] == 1).collect();
        while let Some(v) = leaves.pop() {
            alive[v] = false;
            for &k in &inc[v] {
                let u = g.edges[k].other(v);
                if alive[u] {
                    deg[u] -= 1;
                    if deg[u] == 1 {
                        leaves.push(u);
                    }
                }
            }
        }
        let start = *verts
            .iter()
            .find(|&&v| alive[v])
            .expect("a unicyclic piece has a cycle");
        let mut v = start;
        loop {
            reached[v] = true;
            queue.push_back(v);
            let Some(&k) = inc[v]
                .iter()
                .find(|&&k| !done[k] && alive[g.edges[k].other(v)])
            else {
                break;
            };
            let u = g.edges[k].other(v);
            done[k] = true;
            heads[k] = u;
            if u == start {
                break;
            }
            v = u;
        }
    } else {
        let r = root.unwrap_or(verts[0]);
        reached[r] = true;
        queue.push_back(r);
    }
    while let Some(v) = queue.pop_front() {
        for &k in &inc[v] {
            if done[k] {
                continue;
            }
            let u = g.edges[k].other(v);
            done[k] = true;
            heads[k] = u;
            if !reached[u] {
                reached[u] = true;
                queue.push_back(u);
            }
        }
    }
}

/// Connected pieces of the subgraph formed by `edges`, as (vertices, edges),
/// each listed from its smallest vertex. Untouched vertices are omitted.
fn pieces(g: &Multigraph, edges: &[usize]) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); g.vertices];
    for &k in edges {
        adj[g.edges[k].a].push(k);
        adj[g.edges[k].b].push(k);
    }
    let mut comp = vec![usize::MAX; g.vertices];
    let mut out = Vec::new();
    for s in 0..g.vertices {
        if comp[s] != usize::MAX || adj[s].is_empty() {
            continue;
        }
        let id = out.len();
        comp[s] = id;
        let mut verts = vec![s];
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &k in &adj[v] {
                let u = g.edges[k].other(v);
                if comp[u] == usize::MAX {
                    comp[u] = id;
                    verts.push(u);
                    queue.push_back(u);
                }
            }
        }
        verts.sort_unstable();
        let es = edges
            .iter()
            .copied()
            .filter(|&k| comp[g.edges[k].a] == id)
            .collect();
        out.push((verts, es));
    }
    out
}

fn zero_endpoint(e: &Edge) -> Option<usize> {
    if e.wa.is_zero() {
        Some(e.a)
    } else if e.wb.is_zero() {
        Some(e.b)
    } else {
        None
    }
}

/// Each vertex receives at most one edge it values negatively.
pub fn ef1_graph_predicate(g: &Multigraph, heads: &[usize]) -> bool {
    let mut count = vec![0usize; g.vertices];
    for (e, &h) in g.edges.iter().zip(heads) {
        if e.weight_at(h).is_negative() {
            count[h] += 1;
        }
    }
    count.iter().all(|&c| c <= 1)
}

/// An EF1 orientation, or `None` when some component of the edges negative
/// to both endpoints has more edges than vertices.
pub fn ef1_orient_graph(g: &Multigraph) -> Result<Option<Orientation>> {
    check_chores_graph(g)?;
    let mut heads = vec![usize::MAX; g.edges.len()];
    let mut negative = Vec::new();
    for (k, e) in g.edges.iter().enumerate() {
        match zero_endpoint(e) {
            Some(v) => heads[k] = v,
            None => negative.push(k),
        }
    }
    for (verts, es) in pieces(g, &negative) {
        if es.len() > verts.len() {
            return Ok(None);
        }
        orient_piece(g, &verts, &es, None, &mut heads);
    }
    debug_assert!(ef1_graph_predicate(g, &heads));
    Ok(Some(Orientation::from_heads(g, &heads)))
}

// ---------------------------------------------------------------------------
// PD vertex cover.

/// A graph `h` on `vertices` vertices, disjoint vertex sets `p` and a vertex
/// set `d`. A cover must touch every edge of `h`, take at most one vertex
/// from each set in `p` and none from `d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PdCoverInstance {
    pub vertices: usize,
    pub h: Vec<(usize, usize)>,
    pub p: Vec<Vec<usize>>,
    pub d: Vec<usize>,
}

impl PdCoverInstance {
    pub fn validate(&self) -> Result<()> {
        let mut seen = vec![false; self.vertices];
        let in_range = |v: &usize| *v < self.vertices;
        if !self.h.iter().all(|(a, b)| in_range(a) && in_range(b)) || !self.d.iter().all(in_range) {
            return invalid("vertex out of range");
        }
        for &v in self.p.iter().flatten() {
            if !in_range(&v) || std::mem::replace(&mut seen[v], true) {
                return invalid("the sets in P must be disjoint and in range");
            }
        }
        Ok(())
    }

    pub fn is_cover(&self, c: &[usize]) -> bool {
        let mut inside = vec![false; self.vertices];
        for &v in c {
            inside[v] = true;
        }
        self.h.iter().all(|&(a, b)| inside[a] || inside[b])
            && self
                .p
                .iter()
                .all(|s| s.iter().filter(|&&v| inside[v]).count() <= 1)
            && self.d.iter().all(|&v| !inside[v])
    }

    pub fn to_2sat(&self) -> TwoSatFormula {
        let lit = |v: usize| v as i64 + 1;
        let mut clauses: Vec<Vec<i64>> =
            self.h.iter().map(|&(a, b)| vec![lit(a), lit(b)]).collect();
        for s in &self.p {
            for (x, &a) in s.iter().enumerate() {
                for &b in &s[x + 1..] {
                    clauses.push(vec![-lit(a), -lit(b)]);
                }
            }
        }
        clauses.extend(self.d.iter().map(|&v| vec![-lit(v)]));
        TwoSatFormula {
            variable_count: self.vertices,
            clauses,
        }
    }
}

pub fn find_pd_vertex_cover(pd: &PdCoverInstance) -> Result<Option<Vec<usize>>> {
    pd.validate()?;
    let Some(f) = solve_2sat(&pd.to_2sat())? else {
        return Ok(None);
    };
    let c: Vec<usize> = (0..pd.vertices).filter(|&v| f[v]).collect();
    assert!(pd.is_cover(&c), "2SAT solution must be a PD cover");
    Ok(Some(c))
}

// ---------------------------------------------------------------------------
// EFX₀ orientations.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeTag {
    Dummy,
    Negative,
}

/// A chores graph in which every edge is worth zero to both endpoints or
/// negative to both.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectiveChoresGraph {
    pub g: Multigraph,
    pub tags: Vec<EdgeTag>,
}

impl ObjectiveChoresGraph {
    pub fn new(g: Multigraph) -> Result<Self> {
        check_chores_graph(&g)?;
        let mut tags = Vec::with_capacity(g.edges.len());
        for e in &g.edges {
            tags.push(match (e.wa.is_zero(), e.wb.is_zero()) {
                (true, true) => EdgeTag::Dummy,
                (false, false) => EdgeTag::Negative,
                _ => return precondition(format!("edge {} is not objective", e.id)),
            });
        }
        Ok(ObjectiveChoresGraph { g, tags })
    }
}

/// Every vertex receives exactly one edge, or only dummy edges.
pub fn efx0_objective_predicate(og: &ObjectiveChoresGraph, heads: &[usize]) -> bool {
    let mut count = vec![0usize; og.g.vertices];
    let mut negative = vec![false; og.g.vertices];
    for (k, &h) in heads.iter().enumerate() {
        count[h] += 1;
        negative[h] |= og.tags[k] == EdgeTag::Negative;
    }
    (0..og.g.vertices).all(|v| count[v] <= 1 || !negative[v])
}

pub fn efx_orient_objective(og: &ObjectiveChoresGraph) -> Result<Option<Orientation>> {
    let g = &og.g;
    let negative: Vec<usize> = (0..g.edges.len())
        .filter(|&k| og.tags[k] == EdgeTag::Negative)
        .collect();
    // Vertices without negative edges form one-vertex components with no edges.
    let mut comps = pieces(g, &negative);
    let mut covered = vec![false; g.vertices];
    for (verts, _) in &comps {
        for &v in verts {
            covered[v] = true;
        }
    }
    comps.extend(
        (0..g.vertices)
            .filter(|&v| !covered[v])
            .map(|v| (vec![v], vec![])),
    );
    if comps.iter().any(|(v, e)| e.len() > v.len()) {
        return Ok(None);
    }
    let pd = PdCoverInstance {
        vertices: g.vertices,
        h: (0..g.edges.len())
            .filter(|&k| og.tags[k] == EdgeTag::Dummy)
            .map(|k| (g.edges[k].a, g.edges[k].b))
            .collect(),
        p: comps
            .iter()
            .filter(|(v, e)| e.len() + 1 == v.len())
            .map(|(v, _)| v.clone())
            .collect(),
        d: comps
            .iter()
            .filter(|(v, e)| e.len() == v.len())
            .flat_map(|(v, _)| v.clone())
            .collect(),
    };
    let Some(cover) = find_pd_vertex_cover(&pd)? else {
        return Ok(None);
    };
    let mut in_cover = vec![false; g.vertices];
    for &v in &cover {
        in_cover[v] = true;
    }
    let mut heads = vec![usize::MAX; g.edges.len()];
    let mut got_dummy = vec![false; g.vertices];
    for (k, e) in g.edges.iter().enumerate() {
        if og.tags[k] == EdgeTag::Dummy {
            let h = if in_cover[e.a.min(e.b)] {
                e.a.min(e.b)
            } else {
                e.a.max(e.b)
            };
            heads[k] = h;
            got_dummy[h] = true;
        }
    }
    for (verts, es) in &comps {
        let root = verts.iter().copied().find(|&v| got_dummy[v]);
        orient_piece(g, verts, es, root, &mut heads);
    }
    debug_assert!(efx0_objective_predicate(og, &heads));
    Ok(Some(Orientation::from_heads(g, &heads)))
}

/// How each edge of the input graph maps into the objective graph.
enum Part {
    Kept(usize),
    /// Index of the zero-side dummy edge and the zero-side endpoint.
    Split(usize, usize),
}

/// Subdivides every edge that is zero to one endpoint and negative to the
/// other: the zero side keeps a dummy edge to a new vertex, the negative
/// side a negative edge to it.
fn subdivide(g: &Multigraph) -> (Multigraph, Vec<Part>) {
    let mut edges = Vec::new();
    let mut parts = Vec::new();
    let mut next = g.vertices;
    for e in &g.edges {
        if e.wa.is_zero() == e.wb.is_zero() {
            parts.push(Part::Kept(edges.len()));
            edges.push(e.clone());
            continue;
        }
        let (i, j, beta) = if e.wa.is_zero() {
            (e.a, e.b, e.wb.clone())
        } else {
            (e.b, e.a, e.wa.clone())
        };
        let k = next;
        next += 1;
        parts.push(Part::Split(edges.len(), i));
        edges.push(Edge::new(
            format!("{}#zero", e.id),
            i,
            k,
            Rational::zero(),
            Rational::zero(),
        ));
        edges.push(Edge::new(format!("{}#neg", e.id), j, k, beta.clone(), beta));
    }
    (
        Multigraph {
            vertices: next,
            edges,
        },
        parts,
    )
}

/// An EFX₀ orientation of a chores graph, through subdivision into an
/// objective graph and a PD vertex cover.
pub fn efx_orient_chores(g: &Multigraph) -> Result<Option<Orientation>> {
    check_chores_graph(g)?;
    let (go, parts) = subdivide(g);
    let og = ObjectiveChoresGraph::new(go)?;
    let Some(o) = efx_orient_objective(&og)? else {
        return Ok(None);
    };
    let oh = o.complete_heads(&og.g)?;
    let heads: Vec<usize> = g
        .edges
        .iter()
        .zip(&parts)
        .map(|(e, p)| match *p {
            Part::Kept(k) => oh[k],
            Part::Split(k, i) => {
                if oh[k] == i {
                    i
                } else {
                    e.other(i)
                }
            }
        })
        .collect();
    Ok(Some(Orientation::from_heads(g, &heads)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fairness::{check, Criterion};
    use crate::model::graphical_to_instance;

    fn k4(w: i64) -> Multigraph {
        let mut es = Vec::new();
        for a in 0..4 {
            for b in a + 1..4 {
                es.push((a, b, w, w));
            }
        }
        Multigraph::from_int_edges(4, &es).unwrap()
    }

    fn holds(g: &Multigraph, o: &Orientation, c: Criterion) -> bool {
        check(&graphical_to_instance(g), &o.to_allocation(g).unwrap(), c)
            .unwrap()
            .holds
    }

    #[test]
    fn ef1_examples() {
        assert!(ef1_orient_graph(&k4(-1)).unwrap().is_none());
        let c4 = Multigraph::from_int_edges(
            4,
            &[
                (0, 1, -1, -1),
                (1, 2, -1, -1),
                (2, 3, -1, -1),
                (3, 0, -1, -1),
            ],
        )
        .unwrap();
        let o = ef1_orient_graph(&c4).unwrap().unwrap();
        assert!(holds(&c4, &o, Criterion::Ef1));
        let single = Multigraph::from_int_edges(2, &[(0, 1, 0, -1)]).unwrap();
        assert_eq!(ef1_orient_graph(&single).unwrap().unwrap().assign["e1"], 0);
        let pos = Multigraph::from_int_edges(2, &[(0, 1, 1, 1)]).unwrap();
        assert!(ef1_orient_graph(&pos).is_err());
    }

    #[test]
    fn pd_cover_examples() {
        let none = PdCoverInstance {
            vertices: 3,
            h: vec![],
            p: vec![],
            d: vec![0, 1, 2],
        };
        assert_eq!(find_pd_vertex_cover(&none).unwrap(), Some(vec![]));
        let one = PdCoverInstance {
            vertices: 2,
            h: vec![(0, 1)],
            p: vec![vec![0, 1]],
            d: vec![],
        };
        let c = find_pd_vertex_cover(&one).unwrap().unwrap();
        assert_eq!(c.len(), 1);
        let blocked = PdCoverInstance {
            vertices: 2,
            h: vec![(0, 1)],
            p: vec![],
            d: vec![0, 1],
        };
        assert_eq!(find_pd_vertex_cover(&blocked).unwrap(), None);
    }

    #[test]
    fn efx_examples() {
        let path = Multigraph::from_int_edges(3, &[(0, 1, -1, -1), (1, 2, -1, -1)]).unwrap();
        let o = efx_orient_chores(&path).unwrap().unwrap();
        assert!(holds(&path, &o, Criterion::Efx0));
        assert!(efx_orient_chores(&k4(-1)).unwrap().is_none());
        let single = Multigraph::from_int_edges(2, &[(0, 1, 0, -1)]).unwrap();
        let o = efx_orient_chores(&single).unwrap().unwrap();
        assert!(holds(&single, &o, Criterion::Efx0));
        let heavy = Multigraph::from_int_edges(
            3,
            &[
                (0, 1, -1, -1),
                (1, 2, -1, -1),
                (2, 0, -1, -1),
                (0, 0, -1, -1),
            ],
        )
        .unwrap();
        assert!(efx_orient_chores(&heavy).unwrap().is_none());
    }
}
