//! Graph representations for causal discovery: DAGs, partially directed
//! graphs, d-separation, v-structures, Meek orientation rules, essential
//! graphs, and the structural loss metric.
//!
//! All graph values are immutable after construction from the caller's
//! perspective; operations are pure.

mod dsep;
mod meek;
mod text;

pub use dsep::{oracle_ci, OracleCiTester};
pub use meek::meek_closure;

use std::collections::HashMap;

use crate::error::{Error, Result};

/// A directed acyclic graph over named vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Dag {
    names: Vec<String>,
    index: HashMap<String, usize>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

fn build_index(names: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.clone(), i).is_some() {
            return Err(Error::DuplicateName(n.clone()));
        }
    }
    Ok(index)
}

impl Dag {
    /// Build from vertex names and directed (parent, child) index pairs.
    /// Rejects self-loops, duplicate vertices, out-of-range indices, and
    /// directed cycles.
    pub fn new_indexed(names: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let index = build_index(&names)?;
        let m = names.len();
        let mut parents = vec![Vec::new(); m];
        let mut children = vec![Vec::new(); m];
        for &(a, b) in edges {
            if a >= m || b >= m {
                return Err(Error::UnknownVertex(format!("index {}", a.max(b))));
            }
            if a == b {
                return Err(Error::SelfLoop(names[a].clone()));
            }
            if !children[a].contains(&b) {
                children[a].push(b);
                parents[b].push(a);
            }
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
        }
        let dag = Self {
            names,
            index,
            parents,
            children,
        };
        if dag.has_cycle() {
            return Err(Error::CyclicGraph);
        }
        Ok(dag)
    }

    /// Build from vertex names and named (parent, child) edges.
    pub fn from_edges(vertices: &[&str], edges: &[(&str, &str)]) -> Result<Self> {
        let names: Vec<String> = vertices.iter().map(|s| s.to_string()).collect();
        let index = build_index(&names)?;
        let idx_edges: Vec<(usize, usize)> = edges
            .iter()
            .map(|(a, b)| {
                let ai = *index
                    .get(*a)
                    .ok_or_else(|| Error::UnknownVertex(a.to_string()))?;
                let bi = *index
                    .get(*b)
                    .ok_or_else(|| Error::UnknownVertex(b.to_string()))?;
                Ok((ai, bi))
            })
            .collect::<Result<_>>()?;
        Self::new_indexed(names, &idx_edges)
    }

    fn has_cycle(&self) -> bool {
        // Kahn's algorithm: a topological order exists iff acyclic.
        let m = self.names.len();
        let mut in_deg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut queue: Vec<usize> = (0..m).filter(|&v| in_deg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = queue.pop() {
            seen += 1;
            for &c in &self.children[v] {
                in_deg[c] -= 1;
                if in_deg[c] == 0 {
                    queue.push(c);
                }
            }
        }
        seen != m
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn parents_of(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub fn children_of(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.children[a].binary_search(&b).is_ok()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.has_edge(a, b) || self.has_edge(b, a)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n() {
            for &b in &self.children[a] {
                out.push((a, b));
            }
        }
        out
    }

    /// The maximum vertex degree (in + out).
    pub fn max_degree(&self) -> usize {
        (0..self.n())
            .map(|v| self.parents[v].len() + self.children[v].len())
            .max()
            .unwrap_or(0)
    }

    /// Skeleton: same adjacencies, all edges undirected.
    pub fn skeleton(&self) -> Pdag {
        let undirected: Vec<(usize, usize)> = self
            .edges()
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        Pdag::new_indexed(self.names.clone(), &[], &undirected)
            .expect("skeleton of a valid DAG is a valid PDAG")
    }
}

/// A partially directed graph: a shared vertex set with directed and
/// undirected edge marks. Represents skeletons, CPDAGs, and essential
/// graphs. Construction enforces consistency: no self-loops and no pair
/// carrying two marks.
#[derive(Debug, Clone, PartialEq)]
pub struct Pdag {
    names: Vec<String>,
    index: HashMap<String, usize>,
    directed: std::collections::BTreeSet<(usize, usize)>,
    undirected: std::collections::BTreeSet<(usize, usize)>,
}

impl Pdag {
    pub fn new_indexed(
        names: Vec<String>,
        directed: &[(usize, usize)],
        undirected: &[(usize, usize)],
    ) -> Result<Self> {
        let index = build_index(&names)?;
        let m = names.len();
        let mut dir = std::collections::BTreeSet::new();
        let mut und = std::collections::BTreeSet::new();
        let mut pairs = std::collections::BTreeSet::new();
        for &(a, b) in directed {
            if a >= m || b >= m {
                return Err(Error::UnknownVertex(format!("index {}", a.max(b))));
            }
            if a == b {
                return Err(Error::SelfLoop(names[a].clone()));
            }
            if !pairs.insert((a.min(b), a.max(b))) {
                return Err(Error::InconsistentEdge(names[a].clone(), names[b].clone()));
            }
            dir.insert((a, b));
        }
        for &(a, b) in undirected {
            if a >= m || b >= m {
                return Err(Error::UnknownVertex(format!("index {}", a.max(b))));
            }
            if a == b {
                return Err(Error::SelfLoop(names[a].clone()));
            }
            if !pairs.insert((a.min(b), a.max(b))) {
                return Err(Error::InconsistentEdge(names[a].clone(), names[b].clone()));
            }
            und.insert((a.min(b), a.max(b)));
        }
        Ok(Self {
            names,
            index,
            directed: dir,
            undirected: und,
        })
    }

    /// The complete undirected graph on the given vertices.
    pub fn complete_undirected(names: Vec<String>) -> Result<Self> {
        let m = names.len();
        let mut undirected = Vec::with_capacity(m * (m - 1) / 2);
        for a in 0..m {
            for b in a + 1..m {
                undirected.push((a, b));
            }
        }
        Self::new_indexed(names, &[], &undirected)
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn has_directed(&self, a: usize, b: usize) -> bool {
        self.directed.contains(&(a, b))
    }

    pub fn has_undirected(&self, a: usize, b: usize) -> bool {
        self.undirected.contains(&(a.min(b), a.max(b)))
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.has_undirected(a, b) || self.has_directed(a, b) || self.has_directed(b, a)
    }

    pub fn directed_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.directed.iter().copied()
    }

    pub fn undirected_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.undirected.iter().copied()
    }

    pub fn n_edges(&self) -> usize {
        self.directed.len() + self.undirected.len()
    }

    /// All vertices adjacent to v by any mark, ascending.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.n())
            .filter(|&u| u != v && self.adjacent(v, u))
            .collect();
        out.sort_unstable();
        out
    }

    /// Parents by directed edges only.
    pub fn parents_of(&self, v: usize) -> Vec<usize> {
        (0..self.n()).filter(|&u| self.has_directed(u, v)).collect()
    }

    pub(crate) fn add_undirected(&mut self, a: usize, b: usize) {
        debug_assert!(a != b);
        if !self.adjacent(a, b) {
            self.undirected.insert((a.min(b), a.max(b)));
        }
    }

    /// Turn the undirected edge a--b into a -> b. No effect if the pair is
    /// not currently undirected.
    pub(crate) fn orient(&mut self, a: usize, b: usize) -> bool {
        if self.undirected.remove(&(a.min(b), a.max(b))) {
            self.directed.insert((a, b));
            true
        } else {
            false
        }
    }

    /// Interpret as a DAG; errors if any edge is undirected or the directed
    /// part has a cycle.
    pub fn to_dag(&self) -> Result<Dag> {
        if !self.undirected.is_empty() {
            let &(a, b) = self.undirected.iter().next().unwrap();
            return Err(Error::GraphParse(format!(
                "graph has undirected edge {} -- {}, expected a DAG",
                self.names[a], self.names[b]
            )));
        }
        let edges: Vec<(usize, usize)> = self.directed.iter().copied().collect();
        Dag::new_indexed(self.names.clone(), &edges)
    }
}

/// Total of missing, extra, and misoriented edges of `estimated` against
/// `truth`. Vertex sets must agree (by name; order may differ). A shared
/// adjacency whose mark differs in any way counts one.
pub fn structural_loss(estimated: &Pdag, truth: &Pdag) -> Result<usize> {
    if estimated.n() != truth.n() {
        return Err(Error::VertexSetMismatch(format!(
            "{} vs {} vertices",
            estimated.n(),
            truth.n()
        )));
    }
    let mut t_index = Vec::with_capacity(estimated.n());
    for name in estimated.vertex_names() {
        match truth.index_of(name) {
            Ok(i) => t_index.push(i),
            Err(_) => {
                return Err(Error::VertexSetMismatch(format!(
                    "vertex `{name}` missing from truth"
                )))
            }
        }
    }
    let mut missing = 0usize;
    let mut extra = 0usize;
    let mut misoriented = 0usize;
    let m = estimated.n();
    for a in 0..m {
        for b in a + 1..m {
            let (ta, tb) = (t_index[a], t_index[b]);
            let in_est = estimated.adjacent(a, b);
            let in_truth = truth.adjacent(ta, tb);
            match (in_est, in_truth) {
                (false, true) => missing += 1,
                (true, false) => extra += 1,
                (true, true) => {
                    let est_mark = (estimated.has_directed(a, b), estimated.has_directed(b, a));
                    let truth_mark = (truth.has_directed(ta, tb), truth.has_directed(tb, ta));
                    if est_mark != truth_mark {
                        misoriented += 1;
                    }
                }
                (false, false) => {}
            }
        }
    }
    Ok(missing + extra + misoriented)
}
