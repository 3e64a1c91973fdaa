use std::collections::BTreeMap;

use super::family::{Convention, Mode, PathFamily};
use super::grid::{Cell, Grid};
use crate::carpets::scene::Label;
use crate::error::{domain, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Node {
    Cell(usize),
    /// All cells of one hole, contracted.
    Hole(Label),
}

/// Cell adjacency with every hole contracted to a single node.
#[derive(Clone, Debug)]
pub struct NodeGraph {
    pub nodes: Vec<Node>,
    /// Node of each cell; `None` for exterior cells.
    pub cell_node: Vec<Option<usize>>,
    pub adj: Vec<Vec<usize>>,
    pub hole_node: BTreeMap<Label, usize>,
}

impl NodeGraph {
    pub fn new(g: &Grid) -> NodeGraph {
        let mut nodes = Vec::new();
        let mut cell_node = vec![None; g.len()];
        let mut hole_node = BTreeMap::new();
        for (k, c) in g.cells.iter().enumerate() {
            cell_node[k] = match *c {
                Cell::Interior => {
                    nodes.push(Node::Cell(k));
                    Some(nodes.len() - 1)
                }
                Cell::Hole(l) => Some(*hole_node.entry(l).or_insert_with(|| {
                    nodes.push(Node::Hole(l));
                    nodes.len() - 1
                })),
                Cell::Exterior => None,
            };
        }
        let mut adj = vec![Vec::new(); nodes.len()];
        for k in 0..g.len() {
            let Some(a) = cell_node[k] else { continue };
            for n in g.neighbors(k) {
                if let Some(b) = cell_node[n] {
                    if a != b {
                        adj[a].push(b);
                    }
                }
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        NodeGraph { nodes, cell_node, adj, hole_node }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// A cell standing for the node: the cell itself, or the first cell of a hole.
    pub fn representative(&self, node: usize) -> usize {
        match self.nodes[node] {
            Node::Cell(c) => c,
            Node::Hole(_) => self.cell_node.iter().position(|n| *n == Some(node)).expect("hole has cells"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    /// Not allowed on a path.
    Blocked,
    /// Allowed and never counted.
    Free,
    /// Counted through variable `k`.
    Var(usize),
}

/// The optimization instance: which nodes carry variables, and the endpoint sets.
#[derive(Clone, Debug)]
pub struct Problem {
    pub graph: NodeGraph,
    pub role: Vec<Role>,
    pub in_e: Vec<bool>,
    pub in_f: Vec<bool>,
    /// Node of each variable.
    pub var_node: Vec<usize>,
    /// Metric length of each variable's node: the cell length, or 1 for a hole.
    pub var_length: Vec<f64>,
    pub mode: Mode,
    pub convention: Convention,
}

impl Problem {
    pub fn new(g: &Grid, fam: &PathFamily, mode: &Mode) -> Result<Problem> {
        let graph = NodeGraph::new(g);
        let convention = if *mode == Mode::Carpet { Convention::Open } else { fam.convention };
        if let Some(r) = &fam.region {
            if r.len() != g.len() {
                return domain(format!("region mask has {} entries for {} cells", r.len(), g.len()));
            }
        }
        let mut in_e = vec![false; graph.len()];
        let mut in_f = vec![false; graph.len()];
        for c in fam.e.cells(g)? {
            in_e[graph.cell_node[c].expect("selected cells are not exterior")] = true;
        }
        for c in fam.f.cells(g)? {
            let n = graph.cell_node[c].expect("selected cells are not exterior");
            if in_e[n] {
                return domain("the two ends of the family overlap");
            }
            in_f[n] = true;
        }
        let mut allowed = vec![fam.region.is_none(); graph.len()];
        if let Some(r) = &fam.region {
            for (k, &ok) in r.iter().enumerate() {
                if let (true, Some(n)) = (ok, graph.cell_node[k]) {
                    allowed[n] = true;
                }
            }
        }
        let mut role = vec![Role::Blocked; graph.len()];
        let mut var_node = Vec::new();
        let mut var_length = Vec::new();
        for (n, node) in graph.nodes.iter().enumerate() {
            let endpoint = in_e[n] || in_f[n];
            // would this node carry a variable if it were an intermediate?
            let weighted = match (node, mode) {
                (Node::Cell(_), Mode::Carpet) => Some(false),
                (Node::Cell(_), _) => Some(true),
                (Node::Hole(_), Mode::Classical) => None,
                (Node::Hole(l), Mode::Transboundary(w)) => w.contains(l).then_some(true),
                (Node::Hole(_), Mode::Carpet) => Some(true),
            };
            role[n] = if endpoint {
                match (convention, weighted) {
                    (Convention::Closed, Some(true)) => Role::Var(0),
                    _ => Role::Free,
                }
            } else if !allowed[n] {
                Role::Blocked
            } else {
                match weighted {
                    Some(true) => Role::Var(0),
                    Some(false) => Role::Free,
                    None => Role::Blocked,
                }
            };
            if role[n] == Role::Var(0) {
                role[n] = Role::Var(var_node.len());
                var_node.push(n);
                var_length.push(match *node {
                    Node::Cell(c) => g.lengths[c],
                    Node::Hole(_) => 1.0,
                });
            }
        }
        Ok(Problem { graph, role, in_e, in_f, var_node, var_length, mode: mode.clone(), convention })
    }

    pub fn var_count(&self) -> usize {
        self.var_node.len()
    }

    /// Variables met by a node path, deduplicated and sorted.
    pub fn path_vars(&self, path: &[usize]) -> Vec<u32> {
        let mut v: Vec<u32> = path
            .iter()
            .filter_map(|&n| match self.role[n] {
                Role::Var(k) => Some(k as u32),
                _ => None,
            })
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}
