//! Generators for the hardness reductions: Boolean circuits as bi-valued
//! symmetric multigraphs of goods, and Partition sets as chores multigraphs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::efx_multigraph::{classify_components, BiValuedGraph};
use crate::error::{invalid, precondition, Error, Result};
use crate::model::{Edge, Multigraph};
use crate::rational::{int, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    Input,
    True,
    Not,
    Or,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub id: String,
    pub kind: GateKind,
    pub inputs: Vec<String>,
}

/// Gates listed so that every gate comes after its inputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub gates: Vec<Gate>,
    pub output: String,
}

impl Circuit {
    pub fn new(gates: Vec<Gate>, output: impl Into<String>) -> Result<Self> {
        let c = Circuit {
            gates,
            output: output.into(),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for g in &self.gates {
            let arity = match g.kind {
                GateKind::Input | GateKind::True => 0,
                GateKind::Not => 1,
                GateKind::Or => 2,
            };
            if g.inputs.len() != arity {
                return invalid(format!("gate {} needs {arity} inputs", g.id));
            }
            if let Some(x) = g.inputs.iter().find(|x| !seen.contains(x.as_str())) {
                return invalid(format!("gate {} reads {x} before it is defined", g.id));
            }
            if !seen.insert(g.id.as_str()) {
                return invalid(format!("gate {} is defined twice", g.id));
            }
        }
        if !seen.contains(self.output.as_str()) {
            return invalid(format!("output {} is not a gate", self.output));
        }
        Ok(())
    }

    pub fn variables(&self) -> Vec<String> {
        self.gates
            .iter()
            .filter(|g| g.kind == GateKind::Input)
            .map(|g| g.id.clone())
            .collect()
    }

    /// Output value under `values`, given in the order of [`Circuit::variables`].
    pub fn evaluate(&self, values: &[bool]) -> bool {
        let mut val: BTreeMap<&str, bool> = BTreeMap::new();
        let mut next = values.iter();
        for g in &self.gates {
            let x = match g.kind {
                GateKind::Input => *next.next().expect("one value per variable"),
                GateKind::True => true,
                GateKind::Not => !val[g.inputs[0].as_str()],
                GateKind::Or => val[g.inputs[0].as_str()] || val[g.inputs[1].as_str()],
            };
            val.insert(&g.id, x);
        }
        val[self.output.as_str()]
    }
}

/// One gate per line: `id = INPUT | TRUE | NOT id | OR id id`, then a final
/// `OUTPUT id`. Blank lines and `#` comments are skipped.
impl FromStr for Circuit {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        let mut gates = Vec::new();
        let mut output = None;
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if output.is_some() {
                return Err(Error::Parse("OUTPUT must be the last line".into()));
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            if let ["OUTPUT", id] = words.as_slice() {
                output = Some(id.to_string());
                continue;
            }
            let (id, rest) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected `id = ...`: {line}")))?;
            let rest: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
            let (kind, inputs) = match rest.split_first() {
                Some((k, args)) => match k.to_ascii_uppercase().as_str() {
                    "INPUT" => (GateKind::Input, args),
                    "TRUE" => (GateKind::True, args),
                    "NOT" => (GateKind::Not, args),
                    "OR" => (GateKind::Or, args),
                    "AND" => {
                        return Err(Error::Parse(
                            "AND gates are not supported; rewrite with NOT and OR".into(),
                        ))
                    }
                    other => return Err(Error::Parse(format!("unknown gate kind {other}"))),
                },
                None => return Err(Error::Parse(format!("missing gate kind: {line}"))),
            };
            gates.push(Gate {
                id: id.trim().to_string(),
                kind,
                inputs: inputs.to_vec(),
            });
        }
        let output = output.ok_or_else(|| Error::Parse("missing OUTPUT line".into()))?;
        Circuit::new(gates, output)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        for g in &self.gates {
            let kind = match g.kind {
                GateKind::Input => "INPUT",
                GateKind::True => "TRUE",
                GateKind::Not => "NOT",
                GateKind::Or => "OR",
            };
            write!(f, "{} = {kind}", g.id)?;
            for x in &g.inputs {
                write!(f, " {x}")?;
            }
            writeln!(f)?;
        }
        writeln!(f, "OUTPUT {}", self.output)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Colour {
    Red,
    Black,
}

/// A heavy edge carrying a truth value: true when oriented toward `red`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wire {
    pub red: usize,
    pub black: usize,
    pub edge: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitGadget {
    pub graph: BiValuedGraph,
    pub colours: Vec<Colour>,
    /// Wire of each variable, in the order of [`Circuit::variables`].
    pub variables: Vec<Wire>,
    pub output: Wire,
}

struct Builder {
    colours: Vec<Colour>,
    edges: Vec<Edge>,
    alpha: Rational,
    beta: Rational,
}

impl Builder {
    fn vertex(&mut self, c: Colour) -> usize {
        self.colours.push(c);
        self.colours.len() - 1
    }

    fn edge(&mut self, a: usize, b: usize, heavy: bool) -> usize {
        debug_assert_ne!(self.colours[a], self.colours[b]);
        let w = if heavy {
            self.alpha.clone()
        } else {
            self.beta.clone()
        };
        self.edges.push(Edge::new(
            format!("e{}", self.edges.len() + 1),
            a,
            b,
            w.clone(),
            w,
        ));
        self.edges.len() - 1
    }

    fn wire(&mut self, red: usize, black: usize) -> Wire {
        let edge = self.edge(red, black, true);
        Wire { red, black, edge }
    }

    fn fresh_wire(&mut self) -> Wire {
        let r = self.vertex(Colour::Red);
        let b = self.vertex(Colour::Black);
        self.wire(r, b)
    }

    fn duplicate(&mut self, x: Wire) -> Wire {
        let y = self.fresh_wire();
        self.edge(x.red, y.black, false);
        self.edge(x.black, y.red, false);
        y
    }

    /// Heavy and light edge in parallel on `a`-`b` and `b`-`c`.
    fn double_path(&mut self, a: usize, b: usize, c: usize) {
        self.edge(a, b, true);
        self.edge(b, c, true);
        self.edge(a, b, false);
        self.edge(b, c, false);
    }

    fn not(&mut self, x: Wire) -> Wire {
        let (v1, w5) = (x.red, x.black);
        let v2 = self.vertex(Colour::Black);
        let v3 = self.vertex(Colour::Red);
        let v4 = self.vertex(Colour::Black);
        let v5 = self.vertex(Colour::Red);
        let w4 = self.vertex(Colour::Red);
        let w3 = self.vertex(Colour::Black);
        let w2 = self.vertex(Colour::Red);
        let w1 = self.vertex(Colour::Black);
        let out = self.wire(v5, w1);
        self.double_path(v2, v3, v4);
        self.double_path(w4, w3, w2);
        self.edge(v1, v2, false);
        self.edge(v4, v5, false);
        self.edge(w5, w4, false);
        self.edge(w2, w1, false);
        out
    }

    fn or(&mut self, x: Wire, y: Wire) -> Wire {
        let v = self.vertex(Colour::Red);
        let w = self.vertex(Colour::Black);
        let u = self.vertex(Colour::Red);
        let v_ = self.vertex(Colour::Black);
        let u_ = self.vertex(Colour::Black);
        let out = self.fresh_wire();
        self.edge(v, w, true);
        self.edge(w, u, true);
        self.edge(v, v_, true);
        self.edge(u, u_, true);
        self.edge(x.black, v, false);
        self.edge(w, out.red, false);
        self.edge(u, y.black, false);
        self.edge(x.red, out.black, false);
        self.edge(y.red, out.black, false);
        out
    }

    /// Attaches the forcing part of the TRUE gadget to `out`, whose red end
    /// plays `v9` and black end `v8`.
    fn force_true(&mut self, out: Wire, q: usize) {
        let v1 = self.vertex(Colour::Black);
        let v2 = self.vertex(Colour::Red);
        let v3 = self.vertex(Colour::Black);
        let v4 = self.vertex(Colour::Red);
        let v5 = self.vertex(Colour::Black);
        let v6 = self.vertex(Colour::Red);
        let v7 = self.vertex(Colour::Red);
        self.double_path(v2, v3, v4);
        self.edge(v5, v6, true);
        self.edge(v1, v7, true);
        self.edge(v1, v2, false);
        self.edge(v4, v5, false);
        for _ in 0..q {
            self.edge(v6, v1, false);
        }
        self.edge(v7, out.black, false);
    }
}

/// The reduction from circuit satisfiability. Each gate output gets one
/// wire, copied by a chain of duplication gadgets once per use. The output
/// wire and every TRUE gate's wire double as the `v8`-`v9` edge of a TRUE
/// gadget, which forces them true.
pub fn build_circuit_gadget(
    c: &Circuit,
    q: usize,
    alpha: Rational,
    beta: Rational,
) -> Result<CircuitGadget> {
    c.validate()?;
    if q < 2 {
        return precondition("the circuit reduction needs q >= 2");
    }
    if beta.is_negative() || alpha <= &beta * int(q as i64) {
        return precondition("the circuit reduction needs alpha > q * beta >= 0");
    }
    let mut uses: BTreeMap<&str, usize> = BTreeMap::new();
    for g in &c.gates {
        for x in &g.inputs {
            *uses.entry(x).or_default() += 1;
        }
    }
    *uses.entry(&c.output).or_default() += 1;
    let mut b = Builder {
        colours: Vec::new(),
        edges: Vec::new(),
        alpha,
        beta,
    };
    let mut copies: BTreeMap<&str, Vec<Wire>> = BTreeMap::new();
    let mut variables = Vec::new();
    let mut forced = Vec::new();
    for g in &c.gates {
        let mut take = |name: &str| {
            copies
                .get_mut(name)
                .and_then(|v| v.pop())
                .expect("one copy per use")
        };
        let wire = match g.kind {
            GateKind::Input => {
                let w = b.fresh_wire();
                variables.push(w);
                w
            }
            GateKind::True => {
                let w = b.fresh_wire();
                forced.push(w);
                w
            }
            GateKind::Not => {
                let x = take(&g.inputs[0]);
                b.not(x)
            }
            GateKind::Or => {
                let x = take(&g.inputs[0]);
                let y = take(&g.inputs[1]);
                b.or(x, y)
            }
        };
        let k = uses.get(g.id.as_str()).copied().unwrap_or(0);
        let mut chain = vec![wire];
        while chain.len() < k {
            let last = *chain.last().expect("chain starts with the gate wire");
            chain.push(b.duplicate(last));
        }
        chain.reverse();
        copies.insert(&g.id, chain);
    }
    let output = copies
        .get_mut(c.output.as_str())
        .and_then(|v| v.pop())
        .expect("the output has a copy");
    if !forced.contains(&output) {
        forced.push(output);
    }
    for w in forced {
        b.force_true(w, q);
    }
    let graph = BiValuedGraph::new(Multigraph::new(b.colours.len(), b.edges)?, b.alpha, b.beta)?;
    assert!(classify_components(&graph)
        .iter()
        .all(|k| k.ntom || k.vertices.len() == 1));
    Ok(CircuitGadget {
        graph,
        colours: b.colours,
        variables,
        output,
    })
}

/// The duplication gadget on its own: `x` and its copy.
pub fn duplication_gadget(alpha: Rational, beta: Rational) -> Result<(BiValuedGraph, Wire, Wire)> {
    let mut b = Builder {
        colours: Vec::new(),
        edges: Vec::new(),
        alpha,
        beta,
    };
    let x = b.fresh_wire();
    let y = b.duplicate(x);
    let graph = BiValuedGraph::new(Multigraph::new(b.colours.len(), b.edges)?, b.alpha, b.beta)?;
    Ok((graph, x, y))
}

/// A proper two-colouring, if one exists.
pub fn two_colouring(g: &Multigraph) -> Option<Vec<Colour>> {
    let mut col: Vec<Option<Colour>> = vec![None; g.vertices];
    for s in 0..g.vertices {
        if col[s].is_some() {
            continue;
        }
        col[s] = Some(Colour::Red);
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            let flip = if col[v] == Some(Colour::Red) {
                Colour::Black
            } else {
                Colour::Red
            };
            for (_, e) in g.incident(v) {
                let u = e.other(v);
                match col[u] {
                    None => {
                        col[u] = Some(flip);
                        stack.push(u);
                    }
                    Some(c) if c != flip => return None,
                    _ => {}
                }
            }
        }
    }
    col.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionSet {
    pub values: Vec<u64>,
}

impl PartitionSet {
    pub fn new(values: Vec<u64>) -> Result<Self> {
        if values.is_empty() || values.contains(&0) {
            return invalid("a partition set needs positive values");
        }
        Ok(PartitionSet { values })
    }

    pub fn total(&self) -> u64 {
        self.values.iter().sum()
    }
}

impl FromStr for PartitionSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<u64>()
                    .map_err(|e| Error::Parse(format!("bad value {x:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        PartitionSet::new(values)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoopVariant {
    Ef1,
    Efx0,
}

fn neg(x: u64) -> Rational {
    -Rational::from_integer(x.into())
}

/// Two vertices `a = 0`, `b = 1`, one edge of weight `-s_i` per value and a
/// self-loop at each vertex: weight `-(max s_i + 1)` for EF1, zero for EFX₀.
pub fn build_partition_selfloop_gadget(
    s: &PartitionSet,
    variant: LoopVariant,
) -> Result<Multigraph> {
    let max = *s.values.iter().max().expect("non-empty set");
    let lw = match variant {
        LoopVariant::Ef1 => neg(max + 1),
        LoopVariant::Efx0 => Rational::zero(),
    };
    let mut edges: Vec<Edge> = s
        .values
        .iter()
        .enumerate()
        .map(|(i, &x)| Edge::new(format!("s{}", i + 1), 0, 1, neg(x), neg(x)))
        .collect();
    edges.push(Edge::new("loop_a", 0, 0, lw.clone(), lw.clone()));
    edges.push(Edge::new("loop_b", 1, 1, lw.clone(), lw));
    Multigraph::new(2, edges)
}

/// Vertices `a = 0`, `b = 1`, `c = 2`: one `a`-`b` edge of weight `-s_i` per
/// value and two edges of weight `-T` from `c` to each of `a` and `b`.
pub fn build_partition_triangle_gadget(s: &PartitionSet) -> Result<Multigraph> {
    let t = s.total();
    let mut edges: Vec<Edge> = s
        .values
        .iter()
        .enumerate()
        .map(|(i, &x)| Edge::new(format!("s{}", i + 1), 0, 1, neg(x), neg(x)))
        .collect();
    for (k, (v, name)) in [(0, "a"), (0, "a"), (1, "b"), (1, "b")]
        .into_iter()
        .enumerate()
    {
        edges.push(Edge::new(
            format!("c{name}{}", k % 2 + 1),
            2,
            v,
            neg(t),
            neg(t),
        ));
    }
    Multigraph::new(3, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_circuits() {
        let c: Circuit = "x = INPUT\ny = NOT x # negation\n\nOUTPUT y\n"
            .parse()
            .unwrap();
        assert_eq!(c.variables(), vec!["x"]);
        assert!(c.evaluate(&[false]));
        assert_eq!(c.to_string().parse::<Circuit>().unwrap(), c);
        assert!("x = INPUT\ny = AND x x\nOUTPUT y"
            .parse::<Circuit>()
            .is_err());
        assert!("y = NOT x\nOUTPUT y".parse::<Circuit>().is_err());
        assert!("x = INPUT".parse::<Circuit>().is_err());
    }

    #[test]
    fn duplication_shape() {
        let (g, x, y) = duplication_gadget(int(5), int(1)).unwrap();
        assert_eq!(g.g.vertices, 4);
        assert_eq!((0..4).filter(|&k| g.is_heavy(k)).count(), 2);
        assert_eq!(g.g.edges.len(), 4);
        assert_ne!(x, y);
    }

    #[test]
    fn true_circuit_is_the_true_gadget() {
        let c: Circuit = "t = TRUE\nOUTPUT t".parse().unwrap();
        let out = build_circuit_gadget(&c, 2, int(5), int(1)).unwrap();
        assert_eq!(out.graph.g.vertices, 9);
        assert!(two_colouring(&out.graph.g).is_some());
        assert!(build_circuit_gadget(&c, 2, int(2), int(1)).is_err());
    }

    #[test]
    fn partition_shapes() {
        let s: PartitionSet = "3,1,2".parse().unwrap();
        let t = build_partition_triangle_gadget(&s).unwrap();
        assert_eq!(t.edges.len(), s.values.len() + 4);
        assert_eq!(t.incident(2).count(), 4);
        let l = build_partition_selfloop_gadget(&s, LoopVariant::Ef1).unwrap();
        assert_eq!(l.edges.iter().filter(|e| e.is_loop()).count(), 2);
        assert_eq!(l.edges.last().unwrap().wa, int(-4));
        assert!("1,0".parse::<PartitionSet>().is_err());
    }
}
