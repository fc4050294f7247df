//! Multi-edge network data model and its on-disk formats.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer interaction counts between labelled nodes.
///
/// Counts are stored as a dense row-major `n × n` matrix. Undirected networks
/// keep the matrix symmetric, so every undirected edge appears in both
/// `(i, j)` and `(j, i)`. [`MultiEdgeNetwork::m`] always counts matrix entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiEdgeNetwork {
    node_ids: Vec<String>,
    counts: Vec<u64>,
    directed: bool,
    self_loops: bool,
}

impl MultiEdgeNetwork {
    /// Network without edges.
    pub fn empty(node_ids: Vec<String>, directed: bool) -> Result<Self> {
        check_ids(&node_ids)?;
        let n = node_ids.len();
        Ok(Self {
            node_ids,
            counts: vec![0; n * n],
            directed,
            self_loops: false,
        })
    }

    pub fn from_counts(
        node_ids: Vec<String>,
        counts: Vec<u64>,
        directed: bool,
        self_loops: bool,
    ) -> Result<Self> {
        check_ids(&node_ids)?;
        let n = node_ids.len();
        if counts.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "count matrix has {} entries, expected {}",
                counts.len(),
                n * n
            )));
        }
        if !self_loops && (0..n).any(|i| counts[i * n + i] != 0) {
            return Err(Error::InvalidInput(
                "self-loop counts present but self-loops are disabled".into(),
            ));
        }
        if !directed {
            for i in 0..n {
                for j in (i + 1)..n {
                    if counts[i * n + j] != counts[j * n + i] {
                        return Err(Error::InvalidInput(format!(
                            "undirected network has asymmetric counts at ({i}, {j})"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            node_ids,
            counts,
            directed,
            self_loops,
        })
    }

    /// Builds a network from `(source, target, count)` triples. Repeated
    /// triples accumulate; undirected edges are mirrored.
    pub fn from_edges<I>(node_ids: Vec<String>, edges: I, directed: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, u64)>,
    {
        let mut net = Self::empty(node_ids, directed)?;
        let n = net.n();
        for (i, j, c) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidInput(format!(
                    "edge ({i}, {j}) references a node outside 0..{n}"
                )));
            }
            if i == j {
                return Err(Error::InvalidInput(format!(
                    "self-loop on node {i} while self-loops are disabled"
                )));
            }
            net.counts[i * n + j] += c;
            if !directed {
                net.counts[j * n + i] += c;
            }
        }
        Ok(net)
    }

    pub fn n(&self) -> usize {
        self.node_ids.len()
    }

    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.node_ids.iter().position(|x| x == id)
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn allows_self_loops(&self) -> bool {
        self.self_loops
    }

    #[inline]
    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.n() + j]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Total of all matrix entries, `Σ â_ij`.
    pub fn m(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn out_degree(&self, i: usize) -> u64 {
        let n = self.n();
        self.counts[i * n..(i + 1) * n].iter().sum()
    }

    pub fn in_degree(&self, j: usize) -> u64 {
        let n = self.n();
        (0..n).map(|i| self.counts[i * n + j]).sum()
    }

    /// In plus out degree for directed networks, row sum for undirected ones.
    pub fn total_degree(&self, i: usize) -> u64 {
        if self.directed {
            self.out_degree(i) + self.in_degree(i)
        } else {
            self.out_degree(i)
        }
    }

    /// Number of interactions, counting each undirected edge once.
    pub fn interaction_count(&self) -> u64 {
        if self.directed {
            self.m()
        } else {
            let n = self.n();
            let diag: u64 = (0..n).map(|i| self.count(i, i)).sum();
            (self.m() - diag) / 2 + diag
        }
    }

    /// Symmetric weight matrix `w_ij = â_ij + â_ji` (directed) or `â_ij`
    /// (undirected), diagonal zeroed. Multi-edges collapse to weights here.
    pub fn symmetric_weights(&self) -> Vec<f64> {
        let n = self.n();
        let mut w = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let c = if self.directed {
                    self.count(i, j) + self.count(j, i)
                } else {
                    self.count(i, j)
                };
                w[i * n + j] = c as f64;
            }
        }
        w
    }

    /// Undirected view with `â_ij + â_ji` on both orientations.
    pub fn symmetrized(&self) -> Self {
        if !self.directed {
            return self.clone();
        }
        let n = self.n();
        let mut counts = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                counts[i * n + j] = if i == j {
                    self.count(i, i)
                } else {
                    self.count(i, j) + self.count(j, i)
                };
            }
        }
        Self {
            node_ids: self.node_ids.clone(),
            counts,
            directed: false,
            self_loops: self.self_loops,
        }
    }

    /// Subnetwork induced by `keep`, in the given order.
    pub fn induced(&self, keep: &[usize]) -> Self {
        let n = self.n();
        let k = keep.len();
        let mut counts = vec![0; k * k];
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                counts[a * k + b] = self.counts[i * n + j];
            }
        }
        Self {
            node_ids: keep.iter().map(|&i| self.node_ids[i].clone()).collect(),
            counts,
            directed: self.directed,
            self_loops: self.self_loops,
        }
    }

    /// Same nodes, counts replaced by `f(i, j, count)`.
    pub fn map_counts(&self, mut f: impl FnMut(usize, usize, u64) -> u64) -> Self {
        let n = self.n();
        let mut counts = self.counts.clone();
        for i in 0..n {
            for j in 0..n {
                counts[i * n + j] = f(i, j, self.counts[i * n + j]);
            }
        }
        Self {
            node_ids: self.node_ids.clone(),
            counts,
            directed: self.directed,
            self_loops: self.self_loops,
        }
    }

    /// Non-zero entries as `(i, j, count)` in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        let n = self.n();
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(move |(idx, &c)| (idx / n, idx % n, c))
    }

    pub fn to_file(&self) -> NetworkFile {
        NetworkFile {
            node_ids: self.node_ids.clone(),
            directed: self.directed,
            self_loops: self.self_loops,
            edges: self
                .edges()
                .filter(|&(i, j, _)| self.directed || i <= j)
                .map(|(i, j, c)| [i as u64, j as u64, c])
                .collect(),
        }
    }

    /// GraphML with a `count` attribute on edges and, when given, a
    /// `coreness` attribute on nodes.
    pub fn write_graphml<W: Write>(&self, mut out: W, coreness: Option<&[f64]>) -> Result<()> {
        let mut s = String::new();
        s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        s.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
        s.push_str("  <key id=\"coreness\" for=\"node\" attr.name=\"coreness\" attr.type=\"double\"/>\n");
        s.push_str("  <key id=\"count\" for=\"edge\" attr.name=\"count\" attr.type=\"long\"/>\n");
        let kind = if self.directed { "directed" } else { "undirected" };
        let _ = writeln!(s, "  <graph id=\"G\" edgedefault=\"{kind}\">");
        for (i, id) in self.node_ids.iter().enumerate() {
            match coreness {
                Some(c) => {
                    let _ = writeln!(
                        s,
                        "    <node id=\"{}\"><data key=\"coreness\">{}</data></node>",
                        xml_escape(id),
                        c[i]
                    );
                }
                None => {
                    let _ = writeln!(s, "    <node id=\"{}\"/>", xml_escape(id));
                }
            }
        }
        for (i, j, c) in self.edges().filter(|&(i, j, _)| self.directed || i <= j) {
            let _ = writeln!(
                s,
                "    <edge source=\"{}\" target=\"{}\"><data key=\"count\">{c}</data></edge>",
                xml_escape(&self.node_ids[i]),
                xml_escape(&self.node_ids[j])
            );
        }
        s.push_str("  </graph>\n</graphml>\n");
        out.write_all(s.as_bytes())?;
        Ok(())
    }

    /// Dense adjacency dump: a header of node ids, then one row per node.
    pub fn write_adjacency_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![String::from("node")];
        header.extend(self.node_ids.iter().cloned());
        w.write_record(&header)?;
        let n = self.n();
        for i in 0..n {
            let mut row = vec![self.node_ids[i].clone()];
            row.extend((0..n).map(|j| self.count(i, j).to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Sparse JSON form of a network: `{node_ids, directed, self_loops, edges: [[i, j, count], ...]}`.
/// Undirected networks list each edge once with `i <= j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkFile {
    pub node_ids: Vec<String>,
    pub directed: bool,
    #[serde(default)]
    pub self_loops: bool,
    pub edges: Vec<[u64; 3]>,
}

impl TryFrom<NetworkFile> for MultiEdgeNetwork {
    type Error = Error;

    fn try_from(file: NetworkFile) -> Result<Self> {
        check_ids(&file.node_ids)?;
        let n = file.node_ids.len();
        let mut counts = vec![0u64; n * n];
        for [i, j, c] in file.edges {
            let (i, j) = (i as usize, j as usize);
            if i >= n || j >= n {
                return Err(Error::InvalidInput(format!(
                    "edge ({i}, {j}) references a node outside 0..{n}"
                )));
            }
            counts[i * n + j] += c;
            if !file.directed && i != j {
                counts[j * n + i] += c;
            }
        }
        Self::from_counts(file.node_ids, counts, file.directed, file.self_loops)
    }
}

fn check_ids(ids: &[String]) -> Result<()> {
    let mut seen = HashSet::with_capacity(ids.len());
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(Error::InvalidInput(format!("duplicate node id {id:?}")));
        }
    }
    Ok(())
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

#[cfg(test)]
pub(crate) fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("n{i}")).collect()
}
