//! Adjacency structure, labeled networks, edge vectors and partitions.
//!
//! Community labels are 0-based (`0..k`) everywhere in the library. Text
//! files and the CLI use 1-based labels; conversion happens at that boundary.

use nalgebra::DMatrix;

use crate::error::ClassifyError;

/// Undirected simple graph stored as sorted neighbor lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    neighbors: Vec<Vec<usize>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            neighbors: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from undirected edges. Duplicates (in either
    /// orientation) collapse to one edge; self-loops are dropped and counted.
    ///
    /// Panics if an endpoint is `>= n`.
    pub fn from_edges<I>(n: usize, edges: I) -> (Self, usize)
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut neighbors = vec![Vec::new(); n];
        let mut self_loops = 0;
        for (i, j) in edges {
            assert!(i < n && j < n, "edge ({i}, {j}) outside 0..{n}");
            if i == j {
                self_loops += 1;
                continue;
            }
            neighbors[i].push(j);
            neighbors[j].push(i);
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        (Graph { neighbors }, self_loops)
    }

    /// Builds a graph from a dense 0/1 matrix, reading the upper triangle.
    pub fn from_dense(a: &DMatrix<f64>) -> Self {
        let n = a.nrows();
        let edges = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .filter(|&(i, j)| a[(i, j)] != 0.0);
        Graph::from_edges(n, edges).0
    }

    pub fn n(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors[i].binary_search(&j).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    /// Row `i` as a dense 0/1 vector.
    pub fn row(&self, i: usize) -> Vec<f64> {
        let mut row = vec![0.0; self.n()];
        for &j in &self.neighbors[i] {
            row[j] = 1.0;
        }
        row
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut a = DMatrix::zeros(n, n);
        for (i, list) in self.neighbors.iter().enumerate() {
            for &j in list {
                a[(i, j)] = 1.0;
            }
        }
        a
    }

    /// Subgraph induced by `nodes`; node `nodes[t]` becomes local index `t`.
    pub fn induced(&self, nodes: &[usize]) -> Graph {
        let mut local = vec![usize::MAX; self.n()];
        for (t, &v) in nodes.iter().enumerate() {
            local[v] = t;
        }
        let neighbors = nodes
            .iter()
            .map(|&v| {
                let mut list: Vec<usize> = self.neighbors[v]
                    .iter()
                    .filter_map(|&w| (local[w] != usize::MAX).then_some(local[w]))
                    .collect();
                list.sort_unstable();
                list
            })
            .collect();
        Graph { neighbors }
    }

    /// Connected components, each sorted, ordered by decreasing size and
    /// then by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &w in &self.neighbors[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        comps
    }

    /// The graph with one extra node attached to `edge_vector`'s neighbors.
    pub fn with_new_node(&self, x: &EdgeVector) -> Graph {
        let mut g = self.clone();
        let new = g.n();
        g.neighbors.push(x.neighbors().to_vec());
        for &j in x.neighbors() {
            g.neighbors[j].push(new);
        }
        g
    }
}

/// Edges between a new node and the `n` existing nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeVector {
    n: usize,
    neighbors: Vec<usize>,
}

impl EdgeVector {
    /// From the list of existing nodes the new node links to.
    pub fn from_neighbors(n: usize, mut neighbors: Vec<usize>) -> Result<Self, ClassifyError> {
        neighbors.sort_unstable();
        neighbors.dedup();
        if let Some(&bad) = neighbors.iter().find(|&&j| j >= n) {
            return Err(ClassifyError::InvalidInput(format!(
                "neighbor {bad} outside 0..{n}"
            )));
        }
        Ok(EdgeVector { n, neighbors })
    }

    /// From a 0/1 vector of length `n`.
    pub fn from_binary(x: &[u8]) -> Result<Self, ClassifyError> {
        let mut neighbors = Vec::new();
        for (j, &v) in x.iter().enumerate() {
            match v {
                0 => {}
                1 => neighbors.push(j),
                other => {
                    return Err(ClassifyError::InvalidInput(format!(
                        "edge vector entry {j} is {other}, expected 0 or 1"
                    )))
                }
            }
        }
        Ok(EdgeVector {
            n: x.len(),
            neighbors,
        })
    }

    /// Dimension `n`, not the number of edges.
    pub fn len(&self) -> usize {
        self.n
    }

    /// True when the node has no edge.
    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn neighbors(&self) -> &[usize] {
        &self.neighbors
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for &j in &self.neighbors {
            x[j] = 1.0;
        }
        x
    }
}

/// Which nodes carry observed labels, and the induced split into the
/// labeled set `L` and the unlabeled set `U` (both in increasing order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelLayout {
    n: usize,
    k: usize,
    labeled: Vec<usize>,
    labels: Vec<usize>,
    unlabeled: Vec<usize>,
    /// `position[v]` = index of `v` inside `labeled` or `unlabeled`.
    position: Vec<usize>,
    is_labeled: Vec<bool>,
}

impl LabelLayout {
    /// `labeled` pairs are `(node, community)`; order does not matter.
    pub fn new(n: usize, k: usize, mut labeled: Vec<(usize, usize)>) -> Result<Self, ClassifyError> {
        if k == 0 {
            return Err(ClassifyError::InvalidInput("k must be positive".into()));
        }
        labeled.sort_unstable();
        let mut is_labeled = vec![false; n];
        for (t, &(v, c)) in labeled.iter().enumerate() {
            if v >= n {
                return Err(ClassifyError::InvalidInput(format!("labeled node {v} outside 0..{n}")));
            }
            if c >= k {
                return Err(ClassifyError::InvalidInput(format!(
                    "label {c} of node {v} outside 0..{k}"
                )));
            }
            if t > 0 && labeled[t - 1].0 == v {
                return Err(ClassifyError::InvalidInput(format!("node {v} labeled twice")));
            }
            is_labeled[v] = true;
        }
        let unlabeled: Vec<usize> = (0..n).filter(|&v| !is_labeled[v]).collect();
        let mut position = vec![0; n];
        for (t, &(v, _)) in labeled.iter().enumerate() {
            position[v] = t;
        }
        for (t, &v) in unlabeled.iter().enumerate() {
            position[v] = t;
        }
        Ok(LabelLayout {
            n,
            k,
            labeled: labeled.iter().map(|p| p.0).collect(),
            labels: labeled.iter().map(|p| p.1).collect(),
            unlabeled,
            position,
            is_labeled,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labeled(&self) -> &[usize] {
        &self.labeled
    }

    /// Labels aligned with [`labeled`](Self::labeled).
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn unlabeled(&self) -> &[usize] {
        &self.unlabeled
    }

    pub fn is_labeled(&self, v: usize) -> bool {
        self.is_labeled[v]
    }

    /// Index of node `v` inside `unlabeled()`, if unlabeled.
    pub fn unlabeled_position(&self, v: usize) -> Option<usize> {
        (!self.is_labeled[v]).then(|| self.position[v])
    }

    pub fn label_of(&self, v: usize) -> Option<usize> {
        self.is_labeled[v].then(|| self.labels[self.position[v]])
    }

    /// Number of labeled nodes in each community.
    pub fn label_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.k];
        for &c in &self.labels {
            counts[c] += 1;
        }
        counts
    }

    /// Most common label among the labeled nodes in `nodes`; ties and the
    /// no-labeled-node case resolve to the smallest community.
    pub fn majority_label(&self, nodes: &[usize]) -> usize {
        let mut counts = vec![0usize; self.k];
        for &j in nodes {
            if let Some(c) = self.label_of(j) {
                counts[c] += 1;
            }
        }
        argmax_first(&counts)
    }

    /// First community without a labeled node.
    pub fn missing_community(&self) -> Option<usize> {
        self.label_counts().iter().position(|&c| c == 0)
    }
}

/// Observed data: adjacency among existing nodes plus the partial labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    graph: Graph,
    layout: LabelLayout,
}

impl Network {
    pub fn new(graph: Graph, k: usize, labeled: Vec<(usize, usize)>) -> Result<Self, ClassifyError> {
        let layout = LabelLayout::new(graph.n(), k, labeled)?;
        Ok(Network { graph, layout })
    }

    pub fn from_parts(graph: Graph, layout: LabelLayout) -> Result<Self, ClassifyError> {
        if graph.n() != layout.n() {
            return Err(ClassifyError::InvalidInput(format!(
                "graph has {} nodes, labels cover {}",
                graph.n(),
                layout.n()
            )));
        }
        Ok(Network { graph, layout })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn layout(&self) -> &LabelLayout {
        &self.layout
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn k(&self) -> usize {
        self.layout.k()
    }

    /// `A_UU`, indexed by position in `layout().unlabeled()`.
    pub fn unlabeled_subgraph(&self) -> Graph {
        self.graph.induced(self.layout.unlabeled())
    }

    /// `A_LL`, indexed by position in `layout().labeled()`.
    pub fn labeled_subgraph(&self) -> Graph {
        self.graph.induced(self.layout.labeled())
    }

    /// Majority label among the labeled neighbors in `neighbors`; ties and
    /// the no-labeled-neighbor case resolve to the smallest community.
    pub fn majority_labeled_neighbor(&self, neighbors: &[usize]) -> usize {
        self.layout.majority_label(neighbors)
    }
}

pub(crate) fn argmax_first(counts: &[usize]) -> usize {
    let mut best = 0;
    for (c, &v) in counts.iter().enumerate() {
        if v > counts[best] {
            best = c;
        }
    }
    best
}

/// Hard assignment of an ordered node set into `k` groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    nodes: Vec<usize>,
    assignment: Vec<usize>,
    k: usize,
}

impl Partition {
    pub fn new(nodes: Vec<usize>, assignment: Vec<usize>, k: usize) -> Result<Self, ClassifyError> {
        if nodes.len() != assignment.len() {
            return Err(ClassifyError::InvalidInput(format!(
                "{} nodes but {} assignments",
                nodes.len(),
                assignment.len()
            )));
        }
        if let Some(&bad) = assignment.iter().find(|&&c| c >= k) {
            return Err(ClassifyError::InvalidInput(format!("label {bad} outside 0..{k}")));
        }
        Ok(Partition { nodes, assignment, k })
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }

    /// One-hot membership matrix, rows aligned with `nodes()`.
    pub fn one_hot(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nodes.len(), self.k);
        for (t, &c) in self.assignment.iter().enumerate() {
            m[(t, c)] = 1.0;
        }
        m
    }

    /// Same grouping, relabeled by `map[old] = new`.
    pub fn relabeled(&self, map: &[usize]) -> Partition {
        Partition {
            nodes: self.nodes.clone(),
            assignment: self.assignment.iter().map(|&c| map[c]).collect(),
            k: self.k,
        }
    }

    /// True if both partitions group the same nodes together.
    pub fn same_grouping(&self, other: &Partition) -> bool {
        if self.nodes != other.nodes || self.k != other.k {
            return false;
        }
        let mut map = vec![usize::MAX; self.k];
        let mut used = vec![false; self.k];
        for (&a, &b) in self.assignment.iter().zip(&other.assignment) {
            if map[a] == usize::MAX {
                if used[b] {
                    return false;
                }
                map[a] = b;
                used[b] = true;
            } else if map[a] != b {
                return false;
            }
        }
        true
    }
}
