use std::collections::{HashMap, VecDeque};
use std::fmt::Write;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::name::Name;
use crate::subst::{free_names_in_order, restricted_names};
use crate::syntax::{readable_names, Process, Value};

use super::simple::{received_names, SimpleEnv, SimpleType};
use super::InferError;

/// A name followed by payload positions: `(a, [])` is `a`, `(a, [0])` is
/// `son(a)`, and so on.
pub type NodePath = (Name, Vec<usize>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    /// Source level at least the target level.
    Ge,
    /// Source level strictly above the target level.
    Gt,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub path: NodePath,
    pub labels: Vec<String>,
}

impl Node {
    pub fn label_set(&self) -> String {
        format!("{{{}}}", self.labels.join(", "))
    }
}

/// Level constraints between names and payload positions.
#[derive(Debug, Clone, Default)]
pub struct LevelGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    /// Least level of each node regardless of edges: 1 for subjects of
    /// replicated inputs, which must exceed the weight of their body.
    pub floor: Vec<u32>,
    /// Filled in once levels are assigned.
    pub levels: Option<Vec<u32>>,
    index: HashMap<NodePath, usize>,
}

impl LevelGraph {
    pub fn node_at(&self, path: &NodePath) -> Option<usize> {
        self.index.get(path).copied()
    }

    /// The node carrying `label`, e.g. `"a"`, `"son(c)"` or a received name.
    pub fn node_labelled(&self, label: &str) -> Option<usize> {
        self.nodes
            .iter()
            .position(|n| n.labels.iter().any(|l| l == label))
    }

    pub fn level_of(&self, path: &NodePath) -> Option<u32> {
        let i = self.node_at(path)?;
        self.levels.as_ref().map(|l| l[i])
    }

    fn add_node(&mut self, path: NodePath, label: String) -> usize {
        let id = self.nodes.len();
        self.index.insert(path.clone(), id);
        self.floor.push(0);
        self.nodes.push(Node {
            path,
            labels: vec![label],
        });
        id
    }

    fn add_edge(&mut self, src: usize, dst: usize, kind: EdgeKind) {
        let e = Edge { src, dst, kind };
        if !self.edges.contains(&e) {
            self.edges.push(e);
        }
    }

    /// Adds the reverse of every `>=` edge, so that both ends of such an
    /// edge must get the same level.
    pub fn equalize(&mut self) {
        let reversed: Vec<Edge> = self
            .edges
            .iter()
            .filter(|e| e.kind == EdgeKind::Ge)
            .map(|e| Edge {
                src: e.dst,
                dst: e.src,
                kind: EdgeKind::Ge,
            })
            .collect();
        for e in reversed {
            self.add_edge(e.src, e.dst, e.kind);
        }
    }

    /// `NODE` lines then `EDGE` lines, sorted by node id.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = write!(out, "NODE {i}: {}", n.label_set());
            if self.floor[i] > 0 {
                let _ = write!(out, " min {}", self.floor[i]);
            }
            if let Some(l) = &self.levels {
                let _ = write!(out, " level {}", l[i]);
            }
            out.push('\n');
        }
        let mut edges = self.edges.clone();
        edges.sort();
        for e in edges {
            let op = match e.kind {
                EdgeKind::Ge => ">=",
                EdgeKind::Gt => ">",
            };
            let _ = writeln!(out, "EDGE {} {op} {}", e.src, e.dst);
        }
        out
    }
}

fn son_label(parent: &str, position: usize, arity: usize) -> String {
    if arity == 1 {
        format!("son({parent})")
    } else {
        format!("son{}({parent})", position + 1)
    }
}

/// Simple type at a node path, if the path exists in the type.
fn type_at<'t>(root: &'t SimpleType, path: &[usize]) -> Option<&'t SimpleType> {
    let mut t = root;
    for &i in path {
        match t {
            SimpleType::Chan(ps) => t = ps.get(i)?,
            _ => return None,
        }
    }
    Some(t)
}

struct Builder<'e> {
    env: &'e SimpleEnv,
    received: HashMap<Name, (Name, usize)>,
    g: LevelGraph,
}

impl Builder<'_> {
    /// Path of the node standing for `n`.
    fn path_of(&self, n: &Name) -> NodePath {
        match self.received.get(n) {
            Some((father, i)) => {
                let (root, mut path) = self.path_of(father);
                path.push(*i);
                (root, path)
            }
            None => (n.clone(), Vec::new()),
        }
    }

    fn simple_at(&self, path: &NodePath) -> Option<&SimpleType> {
        type_at(self.env.get(&path.0)?, &path.1)
    }

    /// Sons below a channel node; deeper than the first level only channel
    /// positions get nodes.
    fn add_sons(&mut self, path: &NodePath, label: &str, ty: &SimpleType) {
        let SimpleType::Chan(ps) = ty else { return };
        for (i, p) in ps.iter().enumerate() {
            let wanted = if path.1.is_empty() {
                *p != SimpleType::Nat
            } else {
                p.is_channel()
            };
            if !wanted {
                continue;
            }
            let mut child = path.clone();
            child.1.push(i);
            let l = son_label(label, i, ps.len());
            self.g.add_node(child.clone(), l.clone());
            self.add_sons(&child, &l, p);
        }
    }

    /// `son(dst) >= src` for a value of path `src` sent at position path
    /// `dst`, followed by the constraints on their payloads, whose direction
    /// alternates with depth.
    fn flow(&mut self, dst: &NodePath, src: &NodePath) {
        if let (Some(d), Some(s)) = (self.g.node_at(dst), self.g.node_at(src)) {
            self.g.add_edge(d, s, EdgeKind::Ge);
        }
        let Some(SimpleType::Chan(ps)) = self.simple_at(dst).cloned() else {
            return;
        };
        for j in 0..ps.len() {
            let mut d = dst.clone();
            d.1.push(j);
            let mut s = src.clone();
            s.1.push(j);
            self.flow(&s, &d);
        }
    }

    /// `guard` is the subject of the innermost enclosing replicated input.
    fn edges(&mut self, p: &Process, guard: Option<&Name>) {
        match p {
            Process::Nil => {}
            Process::Par(l, r) => {
                self.edges(l, guard);
                self.edges(r, guard);
            }
            Process::Res { body, .. } | Process::In { body, .. } => self.edges(body, guard),
            Process::RepIn { subject, body, .. } => {
                if let Some(a) = self.g.node_at(&self.path_of(subject)) {
                    self.g.floor[a] = 1;
                }
                self.edges(body, Some(subject))
            }
            Process::Out { subject, payload } => {
                let n = self.path_of(subject);
                if let Some(a) = guard {
                    let a = self.path_of(a);
                    if let (Some(src), Some(dst)) = (self.g.node_at(&a), self.g.node_at(&n)) {
                        self.g.add_edge(src, dst, EdgeKind::Gt);
                    }
                }
                for (i, v) in payload.iter().enumerate() {
                    if let Value::Name(m) = v {
                        let mut dst = n.clone();
                        dst.1.push(i);
                        let src = self.path_of(m);
                        self.flow(&dst, &src);
                    }
                }
            }
        }
    }
}

/// The constraint graph of a localised process.
pub fn build_graph(p: &Process, env: &SimpleEnv) -> LevelGraph {
    let mut b = Builder {
        env,
        received: received_names(p),
        g: LevelGraph::default(),
    };
    let spell = readable_names(p);
    let spelling = |n: &Name| {
        spell
            .get(n)
            .cloned()
            .unwrap_or_else(|| n.display().to_string())
    };

    let mut roots = free_names_in_order(p);
    for r in restricted_names(p) {
        if !roots.contains(&r) {
            roots.push(r);
        }
    }
    for n in &roots {
        let Some(t) = env.get(n).cloned() else {
            continue;
        };
        let label = spelling(n);
        match &t {
            SimpleType::Unit | SimpleType::Nat => {}
            SimpleType::Var(_) => {
                b.g.add_node((n.clone(), Vec::new()), label.clone());
                b.g.add_node((n.clone(), vec![0]), son_label(&label, 0, 1));
            }
            SimpleType::Chan(_) => {
                let path = (n.clone(), Vec::new());
                b.g.add_node(path.clone(), label.clone());
                b.add_sons(&path, &label, &t);
            }
        }
    }

    let mut received: Vec<(&Name, &(Name, usize))> = b.received.iter().collect();
    received.sort_by_key(|(x, _)| x.id());
    let received: Vec<(Name, NodePath)> = received
        .into_iter()
        .map(|(x, _)| (x.clone(), b.path_of(x)))
        .collect();
    for (x, path) in received {
        if let Some(i) = b.g.node_at(&path) {
            b.g.nodes[i].labels.push(spelling(&x));
        }
    }

    b.edges(p, None);
    b.g
}

/// Least levels satisfying every edge, or a cycle through a `>` edge.
pub fn assign_levels(g: &LevelGraph) -> Result<Vec<u32>, InferError> {
    let mut dg: DiGraph<(), EdgeKind> = DiGraph::new();
    let ids: Vec<NodeIndex> = g.nodes.iter().map(|_| dg.add_node(())).collect();
    for e in &g.edges {
        dg.add_edge(ids[e.src], ids[e.dst], e.kind);
    }
    // Components come out sinks first, so every edge leaving a component
    // reaches one that already has its level.
    let sccs = tarjan_scc(&dg);
    let mut comp = vec![0usize; g.nodes.len()];
    for (c, members) in sccs.iter().enumerate() {
        for v in members {
            comp[v.index()] = c;
        }
    }
    let mut comp_level = vec![0u32; sccs.len()];
    let mut out_edges: Vec<Vec<&Edge>> = vec![Vec::new(); g.nodes.len()];
    for e in &g.edges {
        out_edges[e.src].push(e);
    }
    for (c, members) in sccs.iter().enumerate() {
        let mut level = members
            .iter()
            .map(|v| g.floor[v.index()])
            .max()
            .unwrap_or(0);
        for v in members {
            for e in &out_edges[v.index()] {
                let bump = u32::from(e.kind == EdgeKind::Gt);
                if comp[e.dst] == c {
                    if bump == 1 {
                        return Err(InferError::CyclicLevelConstraint {
                            cycle: witness(g, &comp, e),
                        });
                    }
                    continue;
                }
                level = level.max(comp_level[comp[e.dst]] + bump);
            }
        }
        comp_level[c] = level;
    }
    Ok((0..g.nodes.len()).map(|v| comp_level[comp[v]]).collect())
}

/// Labels along a cycle through the strict edge `e`, starting and ending at
/// its source.
fn witness(g: &LevelGraph, comp: &[usize], e: &Edge) -> Vec<String> {
    let mut prev: HashMap<usize, usize> = HashMap::new();
    let mut queue = VecDeque::from([e.dst]);
    let mut seen = vec![false; g.nodes.len()];
    seen[e.dst] = true;
    while let Some(v) = queue.pop_front() {
        if v == e.src {
            break;
        }
        for f in g
            .edges
            .iter()
            .filter(|f| f.src == v && comp[f.dst] == comp[v])
        {
            if !seen[f.dst] {
                seen[f.dst] = true;
                prev.insert(f.dst, v);
                queue.push_back(f.dst);
            }
        }
    }
    // Walk back from the source to the target of `e`.
    let mut back = vec![e.src];
    let mut v = e.src;
    while v != e.dst {
        v = prev[&v];
        back.push(v);
    }
    back.reverse();
    let mut cycle = vec![e.src];
    cycle.extend(back);
    cycle.iter().map(|&i| g.nodes[i].label_set()).collect()
}
