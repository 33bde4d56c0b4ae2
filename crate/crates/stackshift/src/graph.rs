//! Finite labelled directed graphs, paths and the handful of graph
//! operations the rest of the crate is built on.
//!
//! Graphs are immutable after construction and all operations return new
//! graphs, so values can be shared freely across threads.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::{EdgeId, Symbol, VertexId};

/// A finite directed graph with string-named vertices and edges.
///
/// Parallel edges and self-loops are allowed; edge ids are unique and both
/// endpoints of every edge are vertices of the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    vertices: BTreeSet<VertexId>,
    edges: BTreeMap<EdgeId, (VertexId, VertexId)>,
}

impl DirectedGraph {
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator,
        V::Item: Into<VertexId>,
        E: IntoIterator<Item = (EdgeId, VertexId, VertexId)>,
    {
        let vertices: BTreeSet<VertexId> = vertices.into_iter().map(Into::into).collect();
        let mut edge_map = BTreeMap::new();
        for (id, src, dst) in edges {
            if !vertices.contains(&src) {
                return Err(Error::NoSuchVertex(src));
            }
            if !vertices.contains(&dst) {
                return Err(Error::NoSuchVertex(dst));
            }
            if edge_map.insert(id.clone(), (src, dst)).is_some() {
                return Err(Error::DuplicateEdge(id));
            }
        }
        Ok(Self {
            vertices,
            edges: edge_map,
        })
    }

    /// Convenience constructor from `(edge, src, dst)` string triples; the
    /// vertex set is exactly the set of mentioned endpoints.
    pub fn from_edges<'a, I>(edges: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, &'a str, &'a str)>,
    {
        let triples: Vec<(EdgeId, VertexId, VertexId)> = edges
            .into_iter()
            .map(|(e, s, t)| (EdgeId::from(e), VertexId::from(s), VertexId::from(t)))
            .collect();
        let vertices: BTreeSet<VertexId> = triples
            .iter()
            .flat_map(|(_, s, t)| [s.clone(), t.clone()])
            .collect();
        Self::new(vertices, triples).expect("endpoints are vertices by construction")
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexId> {
        self.vertices.iter()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_vertex(&self, v: &VertexId) -> bool {
        self.vertices.contains(v)
    }

    pub fn has_edge(&self, e: &EdgeId) -> bool {
        self.edges.contains_key(e)
    }

    pub fn edges(&self) -> impl Iterator<Item = (&EdgeId, &VertexId, &VertexId)> {
        self.edges.iter().map(|(e, (s, t))| (e, s, t))
    }

    pub fn source(&self, e: &EdgeId) -> Result<&VertexId> {
        self.edges
            .get(e)
            .map(|(s, _)| s)
            .ok_or_else(|| Error::NoSuchEdge(e.clone()))
    }

    pub fn target(&self, e: &EdgeId) -> Result<&VertexId> {
        self.edges
            .get(e)
            .map(|(_, t)| t)
            .ok_or_else(|| Error::NoSuchEdge(e.clone()))
    }

    pub fn out_edges(&self, v: &VertexId) -> Result<BTreeSet<EdgeId>> {
        if !self.vertices.contains(v) {
            return Err(Error::NoSuchVertex(v.clone()));
        }
        Ok(self
            .edges
            .iter()
            .filter(|(_, (s, _))| s == v)
            .map(|(e, _)| e.clone())
            .collect())
    }

    pub fn in_edges(&self, v: &VertexId) -> Result<BTreeSet<EdgeId>> {
        if !self.vertices.contains(v) {
            return Err(Error::NoSuchVertex(v.clone()));
        }
        Ok(self
            .edges
            .iter()
            .filter(|(_, (_, t))| t == v)
            .map(|(e, _)| e.clone())
            .collect())
    }

    pub fn out_degree(&self, v: &VertexId) -> Result<usize> {
        Ok(self.out_edges(v)?.len())
    }

    pub fn in_degree(&self, v: &VertexId) -> Result<usize> {
        Ok(self.in_edges(v)?.len())
    }

    /// The subgraph induced by `keep`: kept vertices plus every edge whose
    /// endpoints both survive.
    pub fn induced_subgraph(&self, keep: &BTreeSet<VertexId>) -> DirectedGraph {
        let vertices: BTreeSet<VertexId> = self.vertices.intersection(keep).cloned().collect();
        let edges = self
            .edges
            .iter()
            .filter(|(_, (s, t))| vertices.contains(s) && vertices.contains(t))
            .map(|(e, (s, t))| (e.clone(), s.clone(), t.clone()));
        DirectedGraph::new(vertices.clone(), edges).expect("induced subgraph is well formed")
    }
}

/// The maximal subgraph in which every vertex has in-degree and out-degree
/// at least one; exactly the vertices and edges lying on bi-infinite paths.
pub fn trim_biinfinite(g: &DirectedGraph) -> DirectedGraph {
    trim_by(g, true, true)
}

/// The maximal subgraph in which every vertex has in-degree at least one;
/// exactly the vertices with arbitrarily long incoming paths.
pub fn trim_unbounded_past(g: &DirectedGraph) -> DirectedGraph {
    trim_by(g, true, false)
}

fn trim_by(g: &DirectedGraph, need_in: bool, need_out: bool) -> DirectedGraph {
    let mut current = g.clone();
    loop {
        let keep: BTreeSet<VertexId> = current
            .vertices()
            .filter(|v| {
                (!need_in || current.in_degree(v).unwrap() >= 1)
                    && (!need_out || current.out_degree(v).unwrap() >= 1)
            })
            .cloned()
            .collect();
        if keep.len() == current.vertex_count() {
            return current;
        }
        current = current.induced_subgraph(&keep);
    }
}

/// A finite sequence of composable edges. The empty path carries no source
/// or target of its own; callers supply an anchor vertex where one is needed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path(pub Vec<EdgeId>);

impl Path {
    pub fn empty() -> Self {
        Path(Vec::new())
    }

    /// Checks composability against `g`: the target of each edge must be the
    /// source of the next.
    pub fn new(edges: Vec<EdgeId>, g: &DirectedGraph) -> Result<Self> {
        for pair in edges.windows(2) {
            if g.target(&pair[0])? != g.source(&pair[1])? {
                return Err(Error::NotAPath(pair[1].clone()));
            }
        }
        if let Some(last) = edges.last() {
            g.target(last)?; // validates the single-edge case too
        }
        Ok(Path(edges))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn source<'a>(&'a self, g: &'a DirectedGraph) -> Option<&'a VertexId> {
        self.0.first().map(|e| g.source(e).expect("edge in graph"))
    }

    pub fn target<'a>(&'a self, g: &'a DirectedGraph) -> Option<&'a VertexId> {
        self.0.last().map(|e| g.target(e).expect("edge in graph"))
    }
}

/// A directed graph together with an edge labelling over a finite alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelledDirectedGraph {
    graph: DirectedGraph,
    alphabet: BTreeSet<Symbol>,
    labels: BTreeMap<EdgeId, Symbol>,
}

impl LabelledDirectedGraph {
    pub fn new(
        graph: DirectedGraph,
        alphabet: impl IntoIterator<Item = Symbol>,
        labels: impl IntoIterator<Item = (EdgeId, Symbol)>,
    ) -> Result<Self> {
        let alphabet: BTreeSet<Symbol> = alphabet.into_iter().collect();
        let labels: BTreeMap<EdgeId, Symbol> = labels.into_iter().collect();
        for (e, _, _) in graph.edges() {
            let label = labels
                .get(e)
                .ok_or_else(|| Error::spec("labels", format!("edge {e} has no label")))?;
            if !alphabet.contains(label) {
                return Err(Error::spec(
                    "labels",
                    format!("label {label} of edge {e} is not in the alphabet"),
                ));
            }
        }
        for e in labels.keys() {
            if !graph.has_edge(e) {
                return Err(Error::NoSuchEdge(e.clone()));
            }
        }
        Ok(Self {
            graph,
            alphabet,
            labels,
        })
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn alphabet(&self) -> &BTreeSet<Symbol> {
        &self.alphabet
    }

    pub fn label(&self, e: &EdgeId) -> Result<&Symbol> {
        self.labels
            .get(e)
            .ok_or_else(|| Error::NoSuchEdge(e.clone()))
    }

    pub fn out_edges(&self, v: &VertexId) -> Result<BTreeSet<EdgeId>> {
        self.graph.out_edges(v)
    }

    /// Restricts the labelled graph to the given vertex set.
    pub fn induced_subgraph(&self, keep: &BTreeSet<VertexId>) -> LabelledDirectedGraph {
        let graph = self.graph.induced_subgraph(keep);
        let labels: Vec<(EdgeId, Symbol)> = graph
            .edges()
            .map(|(e, _, _)| (e.clone(), self.labels[e].clone()))
            .collect();
        LabelledDirectedGraph::new(graph, self.alphabet.clone(), labels)
            .expect("restriction preserves labelling")
    }
}

/// True iff no vertex has two outgoing edges sharing a label.
pub fn is_shannon(g: &LabelledDirectedGraph) -> bool {
    let mut seen: BTreeSet<(&VertexId, &Symbol)> = BTreeSet::new();
    for (e, s, _) in g.graph().edges() {
        if !seen.insert((s, &g.labels[e])) {
            return false;
        }
    }
    true
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Renders the graph as DOT text. Vertices are sorted by id and edges by
/// (source, label, target, id), so equal graphs produce byte-identical
/// output.
pub fn export_dot(g: &LabelledDirectedGraph) -> String {
    let mut out = String::from("digraph {\n");
    for v in g.graph().vertices() {
        writeln!(out, "  \"{}\";", dot_escape(v.as_str())).unwrap();
    }
    let mut edges: Vec<(&VertexId, &Symbol, &VertexId, &EdgeId)> = g
        .graph()
        .edges()
        .map(|(e, s, t)| (s, &g.labels[e], t, e))
        .collect();
    edges.sort();
    for (s, label, t, _) in edges {
        writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{}\"];",
            dot_escape(s.as_str()),
            dot_escape(t.as_str()),
            dot_escape(label.as_str())
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

/// Serialization shape for [`DirectedGraph`]:
/// `{"vertices": [...], "edges": [{"id", "src", "dst"}, ...]}`.
#[derive(Serialize, Deserialize)]
struct RawGraph {
    vertices: Vec<VertexId>,
    edges: Vec<RawEdge>,
}

#[derive(Serialize, Deserialize)]
struct RawEdge {
    id: EdgeId,
    src: VertexId,
    dst: VertexId,
}

impl Serialize for DirectedGraph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let raw = RawGraph {
            vertices: self.vertices.iter().cloned().collect(),
            edges: self
                .edges
                .iter()
                .map(|(e, (s, t))| RawEdge {
                    id: e.clone(),
                    src: s.clone(),
                    dst: t.clone(),
                })
                .collect(),
        };
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DirectedGraph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawGraph::deserialize(deserializer)?;
        DirectedGraph::new(
            raw.vertices,
            raw.edges.into_iter().map(|e| (e.id, e.src, e.dst)),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// Parses a graph from its JSON form, validating edge endpoints.
pub fn load_graph(text: &str) -> Result<DirectedGraph> {
    serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))
}

/// Serializes a graph with sorted keys; `load_graph` inverts this exactly.
pub fn save_graph(g: &DirectedGraph) -> String {
    let value = serde_json::to_value(g).expect("graph serializes");
    serde_json::to_string_pretty(&value).expect("value prints")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden_mean() -> DirectedGraph {
        DirectedGraph::from_edges([("e1", "u", "u"), ("e2", "u", "w"), ("e3", "w", "u")])
    }

    #[test]
    fn out_edges_single_loop() {
        let g = DirectedGraph::from_edges([("l", "v", "v")]);
        assert_eq!(
            g.out_edges(&"v".into()).unwrap(),
            BTreeSet::from([EdgeId::from("l")])
        );
    }

    #[test]
    fn out_edges_golden_mean() {
        let g = golden_mean();
        assert_eq!(
            g.out_edges(&"u".into()).unwrap(),
            BTreeSet::from([EdgeId::from("e1"), EdgeId::from("e2")])
        );
    }

    #[test]
    fn out_edges_isolated_vertex_is_empty() {
        let g = DirectedGraph::new(["v"], std::iter::empty()).unwrap();
        assert!(g.out_edges(&"v".into()).unwrap().is_empty());
    }

    #[test]
    fn out_edges_unknown_vertex_errors() {
        let g = golden_mean();
        assert_eq!(
            g.out_edges(&"zz".into()),
            Err(Error::NoSuchVertex("zz".into()))
        );
    }

    #[test]
    fn shannon_distinct_loop_labels() {
        let g = DirectedGraph::from_edges([("x", "v", "v"), ("y", "v", "v")]);
        let labelled = LabelledDirectedGraph::new(
            g.clone(),
            [Symbol::from("a"), Symbol::from("b")],
            [("x".into(), "a".into()), ("y".into(), "b".into())],
        )
        .unwrap();
        assert!(is_shannon(&labelled));

        let clashing = LabelledDirectedGraph::new(
            g,
            [Symbol::from("a")],
            [("x".into(), "a".into()), ("y".into(), "a".into())],
        )
        .unwrap();
        assert!(!is_shannon(&clashing));
    }

    #[test]
    fn trim_keeps_loop_drops_tail() {
        let loop_only = DirectedGraph::from_edges([("l", "v", "v")]);
        assert_eq!(trim_biinfinite(&loop_only), loop_only);

        let single_edge = DirectedGraph::from_edges([("e", "a", "b")]);
        assert_eq!(trim_biinfinite(&single_edge).vertex_count(), 0);

        // chain a -> b -> c plus a loop at c: only the loop survives
        let chain = DirectedGraph::from_edges([("e1", "a", "b"), ("e2", "b", "c"), ("l", "c", "c")]);
        let trimmed = trim_biinfinite(&chain);
        assert_eq!(trimmed, chain.induced_subgraph(&BTreeSet::from(["c".into()])));
    }

    #[test]
    fn trim_is_idempotent_and_shrinking() {
        let g = DirectedGraph::from_edges([
            ("e1", "a", "b"),
            ("e2", "b", "c"),
            ("l", "c", "c"),
            ("e3", "c", "d"),
        ]);
        let once = trim_biinfinite(&g);
        let twice = trim_biinfinite(&once);
        assert_eq!(once, twice);
        for v in once.vertices() {
            assert!(once.in_degree(v).unwrap() >= 1);
            assert!(once.out_degree(v).unwrap() >= 1);
            assert!(g.has_vertex(v));
        }
    }

    #[test]
    fn trim_unbounded_past_keeps_cycle_descendants() {
        // cycle -> v1 -> v2: everything has an unbounded past except nothing;
        // v2 has no outgoing edge but still survives.
        let g = DirectedGraph::from_edges([("l", "c", "c"), ("e1", "c", "v1"), ("e2", "v1", "v2")]);
        let trimmed = trim_unbounded_past(&g);
        assert_eq!(trimmed.vertex_count(), 3);
        // a pure tail in front of the cycle does not survive
        let g = DirectedGraph::from_edges([("t", "x", "c"), ("l", "c", "c")]);
        assert!(!trim_unbounded_past(&g).has_vertex(&"x".into()));
    }

    #[test]
    fn path_composability() {
        let g = golden_mean();
        assert!(Path::new(vec!["e2".into(), "e3".into()], &g).is_ok());
        assert_eq!(
            Path::new(vec!["e2".into(), "e2".into()], &g),
            Err(Error::NotAPath("e2".into()))
        );
        let p = Path::new(vec!["e2".into(), "e3".into()], &g).unwrap();
        assert_eq!(p.source(&g), Some(&"u".into()));
        assert_eq!(p.target(&g), Some(&"u".into()));
        assert_eq!(Path::empty().source(&g), None);
    }

    #[test]
    fn dot_output_is_deterministic() {
        let g = golden_mean();
        let labelled = LabelledDirectedGraph::new(
            g,
            [Symbol::from("a"), Symbol::from("b"), Symbol::from("c")],
            [
                ("e1".into(), "a".into()),
                ("e2".into(), "b".into()),
                ("e3".into(), "c".into()),
            ],
        )
        .unwrap();
        let first = export_dot(&labelled);
        let second = export_dot(&labelled);
        assert_eq!(first, second);
        assert!(first.contains("\"u\" -> \"w\" [label=\"b\"];"));
    }

    #[test]
    fn dot_empty_graph() {
        let g = DirectedGraph::new(Vec::<VertexId>::new(), std::iter::empty()).unwrap();
        let labelled = LabelledDirectedGraph::new(g, [], []).unwrap();
        assert_eq!(export_dot(&labelled), "digraph {\n}\n");
    }

    #[test]
    fn graph_json_round_trip() {
        let g = golden_mean();
        let text = save_graph(&g);
        assert_eq!(load_graph(&text).unwrap(), g);
    }

    fn arb_graph() -> impl proptest::strategy::Strategy<Value = DirectedGraph> {
        use proptest::prelude::*;
        (1usize..=4).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n), 0..=6).prop_map(move |pairs| {
                let vertices: Vec<VertexId> =
                    (0..n).map(|i| VertexId::new(format!("v{i}"))).collect();
                DirectedGraph::new(
                    vertices.clone(),
                    pairs.iter().enumerate().map(|(i, (s, t))| {
                        (
                            EdgeId::new(format!("e{i}")),
                            vertices[*s].clone(),
                            vertices[*t].clone(),
                        )
                    }),
                )
                .unwrap()
            })
        })
    }

    proptest::proptest! {
        #[test]
        fn trim_is_idempotent_on_random_graphs(g in arb_graph()) {
            let once = trim_biinfinite(&g);
            proptest::prop_assert_eq!(&trim_biinfinite(&once), &once);
            for v in once.vertices() {
                proptest::prop_assert!(g.has_vertex(v));
                proptest::prop_assert!(once.in_degree(v).unwrap() >= 1);
                proptest::prop_assert!(once.out_degree(v).unwrap() >= 1);
            }
        }

        #[test]
        fn shannon_is_renaming_invariant(g in arb_graph(), labels in proptest::collection::vec(0usize..3, 6)) {
            let alphabet: Vec<Symbol> = (0..3).map(|i| Symbol::new(format!("s{i}"))).collect();
            let edge_ids: Vec<EdgeId> = g.edges().map(|(e, _, _)| e.clone()).collect();
            let labelling: Vec<(EdgeId, Symbol)> = edge_ids
                .iter()
                .enumerate()
                .map(|(i, e)| (e.clone(), alphabet[labels[i % labels.len()]].clone()))
                .collect();
            let original =
                LabelledDirectedGraph::new(g.clone(), alphabet.clone(), labelling.clone()).unwrap();

            // rename every vertex and edge with a prefix
            let renamed_graph = DirectedGraph::new(
                g.vertices().map(|v| VertexId::new(format!("x_{v}"))),
                g.edges().map(|(e, s, t)| {
                    (
                        EdgeId::new(format!("x_{e}")),
                        VertexId::new(format!("x_{s}")),
                        VertexId::new(format!("x_{t}")),
                    )
                }),
            )
            .unwrap();
            let renamed = LabelledDirectedGraph::new(
                renamed_graph,
                alphabet,
                labelling
                    .iter()
                    .map(|(e, s)| (EdgeId::new(format!("x_{e}")), s.clone())),
            )
            .unwrap();
            proptest::prop_assert_eq!(is_shannon(&original), is_shannon(&renamed));
        }
    }

    #[test]
    fn graph_json_rejects_dangling_edge() {
        let text = r#"{"vertices": ["u"], "edges": [{"id": "e", "src": "u", "dst": "zz"}]}"#;
        assert!(load_graph(text).is_err());
    }
}
