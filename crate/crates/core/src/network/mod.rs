//! Network topology: a directed acyclic multigraph with one source and one sink.
//!
//! Edge order is significant. The `i`-th edge (in file order) carries the
//! `i`-th packet, so its noise occupies rows `m*i .. m*(i+1)` of the noise
//! matrix and its impulse response is column `i` of `T̂`.
//!
//! Text format, one directive per line (`#` starts a comment):
//!
//! ```text
//! net 4
//! source 0
//! sink 3
//! edge 0 1
//! edge 0 2
//! edge 1 3
//! edge 2 3
//! ```

mod coding;
mod flow;

pub use coding::{
    assign_coefficients, cauchy_transfer, check_every_square_submatrix_invertible,
    compute_transfer, mds_family, random_mds_transfer, sample_until_mds, CodedNetwork,
    TransferPair, MAX_FAMILY_BITS,
};

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    num_nodes: usize,
    source: usize,
    sink: usize,
    edges: Vec<(usize, usize)>,
}

/// Mincut capacity `C` and edge count `E` of a validated network.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Capacity {
    pub c: usize,
    pub e: usize,
}

impl Network {
    pub fn new(
        num_nodes: usize,
        source: usize,
        sink: usize,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self> {
        for (name, id) in [("source", source), ("sink", sink)] {
            if id >= num_nodes {
                return Err(Error::Topology(format!(
                    "{name} {id} is not a node of a {num_nodes}-node network"
                )));
            }
        }
        if source == sink {
            return Err(Error::Topology("source and sink coincide".into()));
        }
        if let Some(&(t, h)) = edges.iter().find(|&&(t, h)| t >= num_nodes || h >= num_nodes) {
            return Err(Error::Topology(format!("edge {t} -> {h} references an unknown node")));
        }
        Ok(Network {
            num_nodes,
            source,
            sink,
            edges,
        })
    }

    /// `c` parallel source-to-sink edges.
    pub fn direct(c: usize) -> Self {
        Network::new(2, 0, 1, vec![(0, 1); c]).expect("valid by construction")
    }

    /// `c` disjoint two-hop paths `s -> v_i -> t`; edges are listed path by path.
    pub fn parallel_paths(c: usize) -> Self {
        let sink = c + 1;
        let mut edges = Vec::with_capacity(2 * c);
        for i in 0..c {
            edges.push((0, i + 1));
            edges.push((i + 1, sink));
        }
        Network::new(c + 2, 0, sink, edges).expect("valid by construction")
    }

    /// `c` edges into a single relay node and `c` edges from it to the sink.
    pub fn relay(c: usize) -> Self {
        let mut edges = vec![(0, 1); c];
        edges.extend(std::iter::repeat_n((1, 2), c));
        Network::new(3, 0, 2, edges).expect("valid by construction")
    }

    pub fn diamond() -> Self {
        Network::new(4, 0, 3, vec![(0, 1), (0, 2), (1, 3), (2, 3)]).expect("valid by construction")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut num_nodes = None;
        let mut source = None;
        let mut sink = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: line_no, msg };
            let mut parts = line.split_whitespace();
            let directive = parts.next().unwrap_or_default();
            let args: Vec<usize> = parts
                .map(|p| p.parse::<usize>().map_err(|_| err(format!("expected a node id, found {p:?}"))))
                .collect::<Result<_>>()?;
            let arity = match directive {
                "net" | "source" | "sink" => 1,
                "edge" => 2,
                other => return Err(err(format!("unknown directive {other:?}"))),
            };
            if args.len() != arity {
                return Err(err(format!("{directive} takes {arity} argument(s), found {}", args.len())));
            }
            match directive {
                "net" if num_nodes.is_some() => return Err(err("duplicate net header".into())),
                "net" => num_nodes = Some(args[0]),
                "source" if source.is_some() => return Err(err("duplicate source".into())),
                "source" => source = Some(args[0]),
                "sink" if sink.is_some() => return Err(err("duplicate sink".into())),
                "sink" => sink = Some(args[0]),
                _ => {
                    if num_nodes.is_none() {
                        return Err(err("edge before net header".into()));
                    }
                    edges.push((args[0], args[1]));
                }
            }
        }
        let missing = |what: &str| Error::Parse {
            line: 0,
            msg: format!("missing {what} directive"),
        };
        Network::new(
            num_nodes.ok_or_else(|| missing("net"))?,
            source.ok_or_else(|| missing("source"))?,
            sink.ok_or_else(|| missing("sink"))?,
            edges,
        )
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "net {}", self.num_nodes);
        let _ = writeln!(s, "source {}", self.source);
        let _ = writeln!(s, "sink {}", self.sink);
        for (t, h) in &self.edges {
            let _ = writeln!(s, "edge {t} {h}");
        }
        s
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Indices of edges entering `v`, in edge order.
    pub fn in_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&i| self.edges[i].1 == v).collect()
    }

    /// Indices of edges leaving `v`, in edge order.
    pub fn out_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&i| self.edges[i].0 == v).collect()
    }

    pub fn source_edges(&self) -> Vec<usize> {
        self.out_edges(self.source)
    }

    pub fn sink_edges(&self) -> Vec<usize> {
        self.in_edges(self.sink)
    }

    /// Kahn's algorithm; smallest ready node first so the order is canonical.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let mut indeg = vec![0usize; self.num_nodes];
        let mut succ = vec![Vec::new(); self.num_nodes];
        for &(t, h) in &self.edges {
            indeg[h] += 1;
            succ[t].push(h);
        }
        let mut ready: std::collections::BTreeSet<usize> =
            (0..self.num_nodes).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(self.num_nodes);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &h in &succ[v] {
                indeg[h] -= 1;
                if indeg[h] == 0 {
                    ready.insert(h);
                }
            }
        }
        if order.len() != self.num_nodes {
            return Err(Error::Cyclic);
        }
        Ok(order)
    }

    /// Edge indices sorted so every edge comes after all edges entering its tail.
    pub(crate) fn edges_in_topological_order(&self) -> Result<Vec<usize>> {
        let order = self.topological_order()?;
        let mut rank = vec![0usize; self.num_nodes];
        for (r, &v) in order.iter().enumerate() {
            rank[v] = r;
        }
        let mut idx: Vec<usize> = (0..self.edges.len()).collect();
        idx.sort_by_key(|&i| (rank[self.edges[i].0], i));
        Ok(idx)
    }

    /// Checks acyclicity and that the unit-capacity mincut equals both the
    /// source out-degree and the sink in-degree.
    pub fn validate(&self) -> Result<Capacity> {
        self.topological_order()?;
        if !self.in_edges(self.source).is_empty() {
            return Err(Error::Topology("source has incoming edges".into()));
        }
        let out_degree = self.source_edges().len();
        let in_degree = self.sink_edges().len();
        let mincut = flow::max_flow(self.num_nodes, &self.edges, self.source, self.sink);
        if mincut != out_degree || mincut != in_degree {
            return Err(Error::CapacityMismatch {
                mincut,
                out_degree,
                in_degree,
            });
        }
        if mincut == 0 {
            return Err(Error::Topology("sink is unreachable from the source".into()));
        }
        Ok(Capacity {
            c: mincut,
            e: self.edges.len(),
        })
    }

    /// Relabels internal nodes by `perm` (a permutation of `0..num_nodes`) keeping edge order.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.num_nodes {
            return Err(Error::LengthMismatch {
                expected: self.num_nodes,
                found: perm.len(),
            });
        }
        let mut seen = vec![false; self.num_nodes];
        for &p in perm {
            if p >= self.num_nodes || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Invalid("relabelling is not a permutation".into()));
            }
        }
        Network::new(
            self.num_nodes,
            perm[self.source],
            perm[self.sink],
            self.edges.iter().map(|&(t, h)| (perm[t], perm[h])).collect(),
        )
    }
}
