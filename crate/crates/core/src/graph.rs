//! Graph value types, erasure of loops and parallel edges, degree accounting.

use std::collections::BTreeMap;
use std::io::{self, Write};

pub type NodeId = u32;

pub(crate) fn pair_key(u: NodeId, v: NodeId) -> u64 {
    let (a, b) = if u <= v { (u, v) } else { (v, u) };
    (u64::from(a) << 32) | u64::from(b)
}

fn unkey(key: u64) -> (NodeId, NodeId) {
    ((key >> 32) as NodeId, key as NodeId)
}

/// Raw output of stub pairing: loops and parallel edges allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    n: usize,
    edges: Vec<(NodeId, NodeId)>,
}

impl Multigraph {
    /// Panics if an endpoint is out of range.
    pub fn new(n: usize, edges: Vec<(NodeId, NodeId)>) -> Self {
        assert!(
            edges.iter().all(|&(u, v)| (u as usize) < n && (v as usize) < n),
            "edge endpoint out of range for n = {n}"
        );
        Multigraph { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn loop_count(&self) -> usize {
        self.edges.iter().filter(|(u, v)| u == v).count()
    }

    /// Non-loop edges minus distinct non-loop pairs.
    pub fn parallel_excess(&self) -> usize {
        let mut keys = self.non_loop_keys();
        let total = keys.len();
        keys.dedup();
        total - keys.len()
    }

    /// Multigraph degrees; a loop adds two to its vertex.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        deg
    }

    pub fn is_simple(&self) -> bool {
        if self.edges.iter().any(|(u, v)| u == v) {
            return false;
        }
        let keys = self.non_loop_keys();
        keys.windows(2).all(|w| w[0] != w[1])
    }

    fn non_loop_keys(&self) -> Vec<u64> {
        let mut keys: Vec<u64> = self
            .edges
            .iter()
            .filter(|(u, v)| u != v)
            .map(|&(u, v)| pair_key(u, v))
            .collect();
        keys.sort_unstable();
        keys
    }
}

/// Loop-free, duplicate-free undirected graph in compressed adjacency form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
}

impl SimpleGraph {
    pub fn empty(n: usize) -> Self {
        SimpleGraph {
            offsets: vec![0; n + 1],
            neighbors: Vec::new(),
        }
    }

    /// Builds from arbitrary pairs, dropping loops and repeated pairs.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (NodeId, NodeId)>) -> Self {
        let mut keys: Vec<u64> = pairs
            .into_iter()
            .filter(|(u, v)| u != v)
            .map(|(u, v)| pair_key(u, v))
            .collect();
        keys.sort_unstable();
        keys.dedup();
        Self::from_sorted_keys(n, &keys)
    }

    /// `keys` must be sorted, unique and loop-free.
    pub(crate) fn from_sorted_keys(n: usize, keys: &[u64]) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for &key in keys {
            let (u, v) = unkey(key);
            assert!((v as usize) < n, "edge endpoint out of range for n = {n}");
            offsets[u as usize + 1] += 1;
            offsets[v as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut neighbors = vec![0 as NodeId; 2 * keys.len()];
        // Keys ascend by (u, v); writing v into u's list and u into v's list
        // in that order keeps every adjacency list sorted.
        for &key in keys {
            let (u, v) = unkey(key);
            neighbors[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        for &key in keys {
            let (u, v) = unkey(key);
            neighbors[fill[u as usize]] = v;
            fill[u as usize] += 1;
        }
        SimpleGraph { offsets, neighbors }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn neighbors(&self, i: usize) -> &[NodeId] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors(i).binary_search(&(j as NodeId)).is_ok()
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| v as usize > u)
                .map(move |&v| (u as NodeId, v))
        })
    }

    /// `N_j`: number of vertices of degree `j`.
    pub fn degree_counts(&self) -> BTreeMap<usize, usize> {
        let mut counts = BTreeMap::new();
        for d in self.degrees() {
            *counts.entry(d).or_insert(0) += 1;
        }
        counts
    }

    /// Checks loop-freeness, strict sortedness and symmetry of adjacency.
    pub fn check_invariants(&self) -> Result<(), String> {
        let n = self.n();
        for i in 0..n {
            let adj = self.neighbors(i);
            if adj.iter().any(|&j| j as usize == i) {
                return Err(format!("vertex {i} lists itself"));
            }
            if adj.iter().any(|&j| j as usize >= n) {
                return Err(format!("vertex {i} has an out-of-range neighbor"));
            }
            if !adj.windows(2).all(|w| w[0] < w[1]) {
                return Err(format!("adjacency of {i} is not strictly increasing"));
            }
            if let Some(&j) = adj.iter().find(|&&j| !self.has_edge(j as usize, i)) {
                return Err(format!("edge {i}-{j} is not symmetric"));
            }
        }
        Ok(())
    }

    /// Writes the edge-list text format: `# n=<n>` then `u v` per edge.
    pub fn write_edge_list<W: Write>(&self, out: W) -> io::Result<()> {
        let mut out = io::BufWriter::new(out);
        writeln!(out, "# n={}", self.n())?;
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}")?;
        }
        out.flush()
    }

    pub fn to_edge_list_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_edge_list(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("edge list is ASCII")
    }
}

/// Telemetry for one generation run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GenerationReport {
    pub n: usize,
    /// Stubs removed at each vertex by erasure.
    pub erased_stub_counts: Vec<usize>,
    /// Vertices that lost at least one stub.
    pub affected_vertices: usize,
    pub attempts: usize,
    pub odd_sum_fixed: bool,
    pub seed: u64,
}

impl GenerationReport {
    pub(crate) fn clean(n: usize) -> Self {
        GenerationReport {
            n,
            erased_stub_counts: vec![0; n],
            affected_vertices: 0,
            attempts: 1,
            odd_sum_fixed: false,
            seed: 0,
        }
    }
}

/// Removes loops and merges parallel edges. A loop charges two erased stubs
/// to its vertex; each copy of a pair beyond the first charges one stub to
/// each endpoint.
pub fn erase(mg: &Multigraph) -> (SimpleGraph, GenerationReport) {
    let n = mg.n;
    let mut report = GenerationReport::clean(n);
    let mut keys = Vec::with_capacity(mg.edges.len());
    for &(u, v) in &mg.edges {
        if u == v {
            report.erased_stub_counts[u as usize] += 2;
        } else {
            keys.push(pair_key(u, v));
        }
    }
    keys.sort_unstable();
    let mut unique = Vec::with_capacity(keys.len());
    for &key in &keys {
        if unique.last() == Some(&key) {
            let (u, v) = unkey(key);
            report.erased_stub_counts[u as usize] += 1;
            report.erased_stub_counts[v as usize] += 1;
        } else {
            unique.push(key);
        }
    }
    report.affected_vertices = report.erased_stub_counts.iter().filter(|&&e| e > 0).count();
    (SimpleGraph::from_sorted_keys(n, &unique), report)
}
