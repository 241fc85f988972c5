//! 2SAT by strongly connected components of the implication graph.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Clauses of one or two literals. A literal is `+v` or `-v` for a variable
/// `v` in `1..=variable_count`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoSatFormula {
    pub variable_count: usize,
    pub clauses: Vec<Vec<i64>>,
}

impl TwoSatFormula {
    pub fn new(variable_count: usize, clauses: Vec<Vec<i64>>) -> Result<Self> {
        let f = TwoSatFormula {
            variable_count,
            clauses,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        for c in &self.clauses {
            if c.is_empty() || c.len() > 2 {
                return invalid("every clause needs one or two literals");
            }
            if c.iter()
                .any(|&l| l == 0 || l.unsigned_abs() as usize > self.variable_count)
            {
                return invalid(format!("literal out of range in clause {c:?}"));
            }
        }
        Ok(())
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0))
        })
    }
}

/// Node `2v` is the negative literal of variable `v`, node `2v + 1` the
/// positive one.
fn node(lit: i64) -> usize {
    let v = lit.unsigned_abs() as usize - 1;
    2 * v + usize::from(lit > 0)
}

/// Tarjan's algorithm, iterative. Components are numbered in the order they
/// complete, which is a reverse topological order.
fn tarjan(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut next = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut k)) = call.last_mut() {
            if *k < adj[v].len() {
                let w = adj[v][*k];
                *k += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(u, _)) = call.last() {
                low[u] = low[u].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("component root is on the stack");
                    on_stack[w] = false;
                    comp[w] = ncomp;
                    if w == v {
                        break;
                    }
                }
                ncomp += 1;
            }
        }
    }
    comp
}

/// A satisfying assignment (index `v - 1` for variable `v`), or `None`.
pub fn solve_2sat(f: &TwoSatFormula) -> Result<Option<Vec<bool>>> {
    f.validate()?;
    let mut adj = vec![Vec::new(); 2 * f.variable_count];
    for c in &f.clauses {
        let (a, b) = (c[0], *c.last().expect("non-empty clause"));
        adj[node(-a)].push(node(b));
        adj[node(-b)].push(node(a));
    }
    let comp = tarjan(&adj);
    let mut out = Vec::with_capacity(f.variable_count);
    for v in 0..f.variable_count {
        let (neg, pos) = (comp[2 * v], comp[2 * v + 1]);
        if neg == pos {
            return Ok(None);
        }
        out.push(pos < neg);
    }
    debug_assert!(f.satisfied_by(&out));
    Ok(Some(out))
}
