//! Finite connected metric graphs with exact rational edge lengths.
//!
//! Graphs are loop-free after construction: a loop edge is subdivided at
//! its midpoint into two half-length edges through a fresh node, which is
//! what the regular cell structure downstream requires. Parallel edges are
//! kept as given.

use crate::rational::{format_rational, parse_rational, rat, rat_int, Rational};
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("edge {a} -- {b} has non-positive length {len}")]
    NonPositiveLength { a: String, b: String, len: String },
    #[error("graph has no edges")]
    Empty,
    #[error("graph is not connected")]
    Disconnected,
    #[error("corolla requires k >= 1")]
    ZeroCorolla,
}

/// An undirected edge; `a` is the endpoint at coordinate 0, `b` at `length`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub length: Rational,
}

#[derive(Clone, Debug)]
pub struct MetricGraph {
    names: Vec<String>,
    edges: Vec<Edge>,
}

impl MetricGraph {
    /// Builds a graph from `(a, b, length)` triples, interning node names,
    /// subdividing loops, and validating the invariants.
    pub fn from_named_edges<S: AsRef<str>>(list: &[(S, S, Rational)]) -> Result<Self, GraphError> {
        let mut names: Vec<String> = Vec::new();
        let intern = |names: &mut Vec<String>, s: &str| -> usize {
            match names.iter().position(|n| n == s) {
                Some(i) => i,
                None => {
                    names.push(s.to_string());
                    names.len() - 1
                }
            }
        };

        let mut edges = Vec::new();
        for (idx, (a, b, len)) in list.iter().enumerate() {
            let (a, b) = (a.as_ref(), b.as_ref());
            if !len.is_positive() {
                return Err(GraphError::NonPositiveLength {
                    a: a.to_string(),
                    b: b.to_string(),
                    len: format_rational(len),
                });
            }
            let ia = intern(&mut names, a);
            let ib = intern(&mut names, b);
            if ia == ib {
                // subdivide the loop at its midpoint
                let mut mid = format!("{a}.mid{idx}");
                while names.contains(&mid) {
                    mid.push('_');
                }
                let im = intern(&mut names, &mid);
                let half = len / rat_int(2);
                edges.push(Edge {
                    a: ia,
                    b: im,
                    length: half.clone(),
                });
                edges.push(Edge {
                    a: im,
                    b: ib,
                    length: half,
                });
            } else {
                edges.push(Edge {
                    a: ia,
                    b: ib,
                    length: len.clone(),
                });
            }
        }

        let g = MetricGraph { names, edges };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<(), GraphError> {
        if self.edges.is_empty() {
            return Err(GraphError::Empty);
        }
        // connectivity by union-find over edge endpoints
        let mut parent: Vec<usize> = (0..self.names.len()).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let root = find(parent, parent[x]);
                parent[x] = root;
            }
            parent[x]
        }
        for e in &self.edges {
            let (ra, rb) = (find(&mut parent, e.a), find(&mut parent, e.b));
            parent[ra] = rb;
        }
        let root = find(&mut parent, 0);
        for v in 1..self.names.len() {
            if find(&mut parent, v) != root {
                return Err(GraphError::Disconnected);
            }
        }
        Ok(())
    }

    /// Parses the line-oriented graph file format: `#` comment lines, and
    /// `a b length` edge lines where `length` is `p/q` or an integer.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut list: Vec<(String, String, Rational)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = trimmed.split_whitespace().collect();
            if tokens.len() != 3 {
                return Err(GraphError::Parse {
                    line,
                    msg: format!("expected `a b length`, got {} tokens", tokens.len()),
                });
            }
            let len = parse_rational(tokens[2]).map_err(|msg| GraphError::Parse { line, msg })?;
            list.push((tokens[0].to_string(), tokens[1].to_string(), len));
        }
        Self::from_named_edges(&list)
    }

    /// Renders the graph in the file format accepted by [`MetricGraph::parse`].
    pub fn to_file_string(&self) -> String {
        let mut out = String::from("# metric graph: one `a b length` line per edge\n");
        for e in &self.edges {
            out.push_str(&format!(
                "{} {} {}\n",
                self.names[e.a],
                self.names[e.b],
                format_rational(&e.length)
            ));
        }
        out
    }

    /// The star with `k` edges from one hub, edge `i` of length `1 + 1/2^i`.
    pub fn corolla(k: usize) -> Result<Self, GraphError> {
        if k == 0 {
            return Err(GraphError::ZeroCorolla);
        }
        let mut list = Vec::with_capacity(k);
        for i in 1..=k {
            let len = rat_int(1) + rat(1, 1i64 << i);
            list.push(("hub".to_string(), format!("leaf{i}"), len));
        }
        Self::from_named_edges(&list)
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    /// Length of the shortest edge.
    pub fn min_edge_length(&self) -> Rational {
        self.edges
            .iter()
            .map(|e| e.length.clone())
            .min()
            .expect("graph has edges")
    }

    /// All-pairs shortest path distances between nodes, exactly.
    ///
    /// Parallel edges are collapsed to their minimum before relaxation.
    pub fn distances(&self) -> DistanceMatrix {
        let n = self.names.len();
        let mut d: Vec<Vec<Option<Rational>>> = vec![vec![None; n]; n];
        for v in 0..n {
            d[v][v] = Some(Rational::zero());
        }
        for e in &self.edges {
            let better = match &d[e.a][e.b] {
                None => true,
                Some(cur) => e.length < *cur,
            };
            if better {
                d[e.a][e.b] = Some(e.length.clone());
                d[e.b][e.a] = Some(e.length.clone());
            }
        }
        for k in 0..n {
            for i in 0..n {
                let Some(dik) = d[i][k].clone() else { continue };
                for j in 0..n {
                    let Some(dkj) = &d[k][j] else { continue };
                    let via = &dik + dkj;
                    let better = match &d[i][j] {
                        None => true,
                        Some(cur) => via < *cur,
                    };
                    if better {
                        d[i][j] = Some(via);
                    }
                }
            }
        }
        DistanceMatrix {
            d: d.into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|x| x.expect("graph is connected"))
                        .collect()
                })
                .collect(),
        }
    }
}

/// Exact node-to-node shortest-path distances.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMatrix {
    d: Vec<Vec<Rational>>,
}

impl DistanceMatrix {
    pub fn get(&self, u: usize, v: usize) -> &Rational {
        &self.d[u][v]
    }

    pub fn node_count(&self) -> usize {
        self.d.len()
    }
}

/// A point of the geometric realization: a node, or an offset along an edge
/// measured from the edge's `a` endpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphPoint {
    Node(usize),
    OnEdge { edge: usize, offset: Rational },
}

/// Exact distance between two points of the graph.
///
/// Routes are enumerated directly: the in-edge segment when both points
/// share an edge, and the four paths through the edge endpoints otherwise.
/// This is independent of the constraint-system machinery and serves as
/// its ground truth in tests.
pub fn point_distance(
    g: &MetricGraph,
    dist: &DistanceMatrix,
    p: &GraphPoint,
    q: &GraphPoint,
) -> Rational {
    let ends = |pt: &GraphPoint| -> Vec<(usize, Rational)> {
        // (node, cost of reaching it from the point)
        match pt {
            GraphPoint::Node(v) => vec![(*v, Rational::zero())],
            GraphPoint::OnEdge { edge, offset } => {
                let e = g.edge(*edge);
                vec![(e.a, offset.clone()), (e.b, &e.length - offset)]
            }
        }
    };

    let mut best: Option<Rational> = None;
    if let (
        GraphPoint::OnEdge {
            edge: e1,
            offset: s,
        },
        GraphPoint::OnEdge {
            edge: e2,
            offset: t,
        },
    ) = (p, q)
    {
        if e1 == e2 {
            best = Some((s - t).abs());
        }
    }
    for (u, cu) in ends(p) {
        for (v, cv) in ends(q) {
            let via = &cu + dist.get(u, v) + &cv;
            if best.as_ref().is_none_or(|b| via < *b) {
                best = Some(via);
            }
        }
    }
    best.expect("at least one route exists")
}
