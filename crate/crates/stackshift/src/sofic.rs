//! The finite presentation of the deep pop-only language, the projection
//! hypothesis test, and the visibility constants.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::graph::{
    trim_biinfinite, DirectedGraph, LabelledDirectedGraph,
};
use crate::ids::{ControlId, EdgeId, Symbol, VertexId};
use crate::machine::{IState, Machine, StepKind, SymIx};
use crate::spec::AutomatonSpec;

/// The finite labelled control graph of pop transitions: one vertex per
/// control, and for every stack edge `e` and `σ ∈ Σ⁻_e(U)` an edge
/// `U --σ--> χ_e(U,σ)`. Restricted to vertices on bi-infinite pop chains
/// its path labels are exactly the words readable during a direct descent
/// from arbitrarily deep stacks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YPresentation {
    pub graph: LabelledDirectedGraph,
    /// presentation edge -> (control, stack edge, symbol) it came from
    pub provenance: BTreeMap<EdgeId, (ControlId, EdgeId, Symbol)>,
}

impl YPresentation {
    /// The presentation restricted to vertices on bi-infinite pop chains.
    pub fn trimmed(&self) -> LabelledDirectedGraph {
        let kept: BTreeSet<VertexId> = trim_biinfinite(self.graph.graph())
            .vertices()
            .cloned()
            .collect();
        self.graph.induced_subgraph(&kept)
    }
}

pub fn build_y_presentation(spec: &AutomatonSpec) -> YPresentation {
    let vertices: Vec<VertexId> = spec.controls().map(|c| VertexId::new(c.as_str())).collect();
    let mut edges = Vec::new();
    let mut labels = Vec::new();
    let mut provenance = BTreeMap::new();
    for (control, stack_edge, symbol, target) in spec.pops() {
        let id = EdgeId::new(format!("{control}|{stack_edge}|{symbol}"));
        edges.push((
            id.clone(),
            VertexId::new(control.as_str()),
            VertexId::new(target.as_str()),
        ));
        labels.push((id.clone(), symbol.clone()));
        provenance.insert(id, (control.clone(), stack_edge.clone(), symbol.clone()));
    }
    let graph = DirectedGraph::new(vertices, edges).expect("pop targets are controls");
    let graph = LabelledDirectedGraph::new(graph, spec.alphabet().iter().cloned(), labels)
        .expect("pop labels are alphabet symbols");
    YPresentation { graph, provenance }
}

/// Decides whether the label map of the trimmed pop presentation is
/// injective on bi-infinite paths.
///
/// Two distinct bi-infinite paths with equal labels yield a bi-infinite
/// path in the product graph of label-equal edge pairs that passes through
/// at least one genuinely distinct pair, and conversely. Diagonal pairs
/// must stay in the product: distinct paths may merge forward or backward,
/// and the merged tail is what extends the off-diagonal pair to a
/// bi-infinite witness.
pub fn test_projection_hypothesis(spec: &AutomatonSpec) -> bool {
    let presentation = build_y_presentation(spec);
    let trimmed = presentation.trimmed();
    let g = trimmed.graph();

    let pair_vertex = |a: &VertexId, b: &VertexId| VertexId::new(format!("{a}\u{1}{b}"));
    let mut vertices = BTreeSet::new();
    for a in g.vertices() {
        for b in g.vertices() {
            vertices.insert(pair_vertex(a, b));
        }
    }
    let mut edges = Vec::new();
    let mut off_diagonal = BTreeSet::new();
    let all_edges: Vec<(&EdgeId, &VertexId, &VertexId)> = g.edges().collect();
    for (f, fs, ft) in &all_edges {
        for (h, hs, ht) in &all_edges {
            if trimmed.label(f).unwrap() != trimmed.label(h).unwrap() {
                continue;
            }
            let id = EdgeId::new(format!("{f}\u{1}{h}"));
            if f != h {
                off_diagonal.insert(id.clone());
            }
            edges.push((id, pair_vertex(fs, hs), pair_vertex(ft, ht)));
        }
    }
    let product = DirectedGraph::new(vertices, edges).expect("pair endpoints exist");
    let surviving = trim_biinfinite(&product);
    !off_diagonal.iter().any(|e| surviving.has_edge(e))
}

/// The constants of the bounded-visibility condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VisibilityConstants {
    /// Smallest window length for which deep pop words pin their terminal
    /// control and force pops from position `m_circ` on.
    #[serde(rename = "M")]
    pub m: usize,
    /// Smallest admissible offset for that window length.
    #[serde(rename = "M_circ")]
    pub m_circ: usize,
    /// Longest push path.
    #[serde(rename = "J")]
    pub j: usize,
    /// `M_circ * (J + 1) + M`.
    #[serde(rename = "M_G")]
    pub m_g: usize,
}

/// Result of the bounded search: the constants, or a typed "not found"
/// (the spec may simply not satisfy the visibility hypothesis, or the cap
/// may be too small).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum VisibilityOutcome {
    Found(VisibilityConstants),
    NotFound { cap: usize },
}

impl VisibilityOutcome {
    pub fn found(&self) -> Option<VisibilityConstants> {
        match self {
            VisibilityOutcome::Found(c) => Some(*c),
            VisibilityOutcome::NotFound { .. } => None,
        }
    }
}

/// Words of length exactly `len` readable in the trimmed pop presentation.
fn deep_pop_words(trimmed: &LabelledDirectedGraph, m: &Machine, len: usize) -> BTreeSet<Vec<SymIx>> {
    let g = trimmed.graph();
    let mut words: BTreeSet<Vec<SymIx>> = BTreeSet::new();
    let mut frontier: Vec<(VertexId, Vec<SymIx>)> = g
        .vertices()
        .map(|v| (v.clone(), Vec::new()))
        .collect();
    for _ in 0..len {
        let mut next = Vec::new();
        for (at, word) in frontier {
            for e in g.out_edges(&at).unwrap() {
                let sym = m
                    .symbol_index(trimmed.label(&e).unwrap())
                    .expect("presentation labels are spec symbols");
                let mut longer = word.clone();
                longer.push(sym);
                next.push((g.target(&e).unwrap().clone(), longer));
            }
        }
        frontier = next;
    }
    for (_, word) in frontier {
        words.insert(word);
    }
    words
}

/// Checks the visibility condition at window length `len`: every automaton
/// path labelled by a deep pop word of that length ends in a control
/// determined by the word alone, and pushes only happen before some common
/// offset. Returns the smallest admissible offset, or `None` if the
/// condition fails at this length.
///
/// Start states of stack length `len + 1` stand in for all deeper states:
/// a run of `len` steps pops at most `len` edges, so nothing below the top
/// `len + 1` edges is ever exposed, and such a run can never empty the
/// stack either, exactly like every deeper state.
fn visibility_offset_at(
    m: &Machine,
    trimmed: &LabelledDirectedGraph,
    len: usize,
) -> Option<usize> {
    let words = deep_pop_words(trimmed, m, len);
    let starts = m.states_with_stack_up_to(len + 1);
    let mut worst_push_position = 0usize;
    for word in &words {
        let mut terminal: Option<u32> = None;
        for start in &starts {
            let mut state: IState = start.clone();
            let mut alive = true;
            for (position, &sym) in word.iter().enumerate() {
                match m.step(&state, sym) {
                    Some((next, StepKind::Pop)) => state = next,
                    Some((next, StepKind::Push(_))) => {
                        worst_push_position = worst_push_position.max(position + 1);
                        state = next;
                    }
                    None => {
                        alive = false;
                        break;
                    }
                }
            }
            if alive {
                match terminal {
                    None => terminal = Some(state.control),
                    Some(t) if t == state.control => {}
                    Some(_) => return None, // terminal control not a function of the word
                }
            }
        }
    }
    // a push at position p forces the offset past p; all-pop runs allow 1
    let required = worst_push_position + 1;
    if required <= len {
        Some(required)
    } else {
        None
    }
}

/// Bounded search for the visibility constants: the least window length
/// `M <= cap` satisfying the condition, the least offset for it, the
/// longest push path `J`, and `M_G = M_circ * (J + 1) + M`.
pub fn visibility_constants(spec: &AutomatonSpec, cap: usize) -> VisibilityOutcome {
    let m = Machine::compile(spec);
    let presentation = build_y_presentation(spec);
    let trimmed = presentation.trimmed();
    let j = spec.pushes().map(|(_, _, p, _)| p.len()).max().unwrap_or(0);
    for len in 1..=cap {
        if let Some(m_circ) = visibility_offset_at(&m, &trimmed, len) {
            return VisibilityOutcome::Found(VisibilityConstants {
                m: len,
                m_circ,
                j,
                m_g: m_circ * (j + 1) + len,
            });
        }
    }
    VisibilityOutcome::NotFound { cap }
}
