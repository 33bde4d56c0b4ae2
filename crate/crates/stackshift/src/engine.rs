//! The lazily materialized automaton: stepping, language operations and
//! pushdown saturation analyses.
//!
//! States are pairs of a stack (a finite path of the base graph, possibly
//! empty) and a control; the full state space is infinite, so every
//! exploration is either bounded by a caller-supplied length or replaced by
//! a finite saturation argument.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::Result;
use crate::graph::trim_unbounded_past;
use crate::ids::{ControlId, EdgeId, Symbol, Word};
use crate::machine::{CtrlIx, EdgeIx, IState, Machine};
use crate::spec::AutomatonSpec;

/// A vertex of the (infinite) automaton graph: a stack path and a control.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PdaState {
    pub stack: Vec<EdgeId>,
    pub control: ControlId,
}

impl PdaState {
    pub fn boundary(control: impl Into<ControlId>) -> Self {
        PdaState {
            stack: Vec::new(),
            control: control.into(),
        }
    }

    pub fn new(stack: Vec<EdgeId>, control: impl Into<ControlId>) -> Self {
        PdaState {
            stack,
            control: control.into(),
        }
    }
}

/// `Σ⁺(control)` at the boundary, `Σ⁻_e(control) ∪ Σ⁺(control)` when the
/// top stack edge is `e`.
pub fn acceptance_set(spec: &AutomatonSpec, state: &PdaState) -> Result<BTreeSet<Symbol>> {
    let m = Machine::compile(spec);
    let istate = m.state_from_public(state)?;
    Ok(m.acceptance(&istate)
        .into_iter()
        .map(|s| m.symbol_ids[s as usize].clone())
        .collect())
}

/// One transition; `Ok(None)` is rejection, which is a value, not an error.
pub fn step(spec: &AutomatonSpec, state: &PdaState, symbol: &Symbol) -> Result<Option<PdaState>> {
    let m = Machine::compile(spec);
    let istate = m.state_from_public(state)?;
    let sym = m.symbol_index(symbol)?;
    Ok(m.step(&istate, sym).map(|(next, _)| m.state_to_public(&next)))
}

/// Left fold of [`step`]; rejection is absorbing.
pub fn run(spec: &AutomatonSpec, state: &PdaState, word: &[Symbol]) -> Result<Option<PdaState>> {
    let m = Machine::compile(spec);
    let istate = m.state_from_public(state)?;
    let word = m.word_indices(word)?;
    Ok(m.run(&istate, &word).map(|s| m.state_to_public(&s)))
}

/// True iff some state accepts `word`.
///
/// Only start states of stack length at most `|word|` are tried: a symbol
/// pops at most one stack edge, so a word readable from any state is also
/// readable from the state whose stack keeps only the top `|word|` edges
/// (the discarded part is never exposed), and that truncated state is in
/// the tried set.
pub fn member(spec: &AutomatonSpec, word: &[Symbol]) -> Result<bool> {
    let m = Machine::compile(spec);
    let word = m.word_indices(word)?;
    Ok(m.states_with_stack_up_to(word.len())
        .iter()
        .any(|s| m.run(s, &word).is_some()))
}

/// All admissible words of length at most `n`, by forward exploration from
/// every state of stack length at most `n`.
pub fn enumerate_language(spec: &AutomatonSpec, n: usize) -> Result<BTreeSet<Word>> {
    let m = Machine::compile(spec);
    let mut result: BTreeSet<Word> = BTreeSet::new();
    result.insert(Vec::new());

    // The language is factorial, so explore by extending live prefixes: a
    // prefix is live in the set of states that have not rejected it.
    let starts = m.states_with_stack_up_to(n);
    let mut intern: HashMap<IState, u32> = HashMap::new();
    let mut states: Vec<IState> = Vec::new();
    let intern_state = |s: IState, states: &mut Vec<IState>, intern: &mut HashMap<IState, u32>| {
        *intern.entry(s.clone()).or_insert_with(|| {
            states.push(s);
            (states.len() - 1) as u32
        })
    };

    let all: Vec<u32> = starts
        .into_iter()
        .map(|s| intern_state(s, &mut states, &mut intern))
        .collect();
    let mut level: Vec<(Vec<u16>, Vec<u32>)> = vec![(Vec::new(), all)];

    for _ in 0..n {
        let mut next_level = Vec::new();
        for (word, live) in &level {
            for sym in 0..m.n_symbols() as u16 {
                let mut survivors = Vec::new();
                for &ix in live {
                    let state = states[ix as usize].clone();
                    if let Some((next, _)) = m.step(&state, sym) {
                        survivors.push(intern_state(next, &mut states, &mut intern));
                    }
                }
                if !survivors.is_empty() {
                    survivors.sort_unstable();
                    survivors.dedup();
                    let mut extended = word.clone();
                    extended.push(sym);
                    result.insert(m.word_symbols(&extended));
                    next_level.push((extended, survivors));
                }
            }
        }
        level = next_level;
    }
    Ok(result)
}

/// `|L_k|` for `k = 0..=n`.
pub fn count_words(spec: &AutomatonSpec, n: usize) -> Result<Vec<u64>> {
    let words = enumerate_language(spec, n)?;
    let mut counts = vec![0u64; n + 1];
    for w in &words {
        counts[w.len()] += 1;
    }
    Ok(counts)
}

/// The "can empty one stack edge" relation: `table[(e, U)]` is the set of
/// controls reachable by completely unwinding `e` from control `U`,
/// through arbitrary push excursions. Keys exist for every pair of a stack
/// edge and a control anchored at its target; an un-poppable pair keeps an
/// empty set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PopSummary {
    pub table: BTreeMap<(EdgeId, ControlId), BTreeSet<ControlId>>,
}

pub fn pop_summaries(spec: &AutomatonSpec) -> PopSummary {
    let m = Machine::compile(spec);
    let table = m.pop_summaries();
    PopSummary {
        table: table
            .into_iter()
            .map(|((e, c), targets)| {
                (
                    (m.edge_ids[e as usize].clone(), m.control_ids[c as usize].clone()),
                    targets
                        .into_iter()
                        .map(|t| m.control_ids[t as usize].clone())
                        .collect(),
                )
            })
            .collect(),
    }
}

/// Why a spec failed the connectedness test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ConnectivityWitness {
    /// A reachable state exposes this stack edge under this control and can
    /// never finish popping it.
    UnpoppableExposedPair { edge: EdgeId, control: ControlId },
    /// A boundary state that cannot reach another boundary state over the
    /// same anchor vertex.
    DisconnectedBoundary { from: ControlId, to: ControlId },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConnectivityReport {
    pub connected: bool,
    pub witness: Option<ConnectivityWitness>,
}

/// Tests strong connectedness of the automaton, per stack root.
///
/// A stack can only shrink back to where it started growing, so states
/// whose stacks are rooted at different base vertices are never mutually
/// reachable; the meaningful property is that within each root the
/// reachable part of the automaton is one strongly connected piece. Two
/// finite checks decide it:
///
/// 1. every (top edge, control) pair exposed by some state reachable from a
///    boundary state has a nonempty pop summary, so every reachable state
///    can finish descending to a boundary state of its root; and
/// 2. for each anchor vertex, the summary graph on its boundary states
///    (edges: pushes of an empty path, and push-then-fully-unwind
///    composites) is strongly connected.
pub fn strongly_connected(spec: &AutomatonSpec) -> ConnectivityReport {
    let m = Machine::compile(spec);
    let table = m.pop_summaries();

    // -- exposed (edge, control) pairs reachable from boundary states
    let mut exposed: BTreeSet<(EdgeIx, CtrlIx)> = BTreeSet::new();
    let mut work: Vec<(EdgeIx, CtrlIx)> = Vec::new();

    let expose = |pair: (EdgeIx, CtrlIx),
                      exposed: &mut BTreeSet<(EdgeIx, CtrlIx)>,
                      work: &mut Vec<(EdgeIx, CtrlIx)>| {
        if exposed.insert(pair) {
            work.push(pair);
        }
    };

    // pushing a path exposes its top, then each lower edge once the part
    // above it has been fully unwound
    let expose_push = |path: &[EdgeIx],
                       target: CtrlIx,
                       exposed: &mut BTreeSet<(EdgeIx, CtrlIx)>,
                       work: &mut Vec<(EdgeIx, CtrlIx)>| {
        let mut at: Vec<CtrlIx> = vec![target];
        for (i, &e) in path.iter().enumerate().rev() {
            for &c in &at {
                if exposed.insert((e, c)) {
                    work.push((e, c));
                }
            }
            if i == 0 {
                break;
            }
            let mut lower: Vec<CtrlIx> = Vec::new();
            for &c in &at {
                for &t in &table[&(e, c)] {
                    if !lower.contains(&t) {
                        lower.push(t);
                    }
                }
            }
            at = lower;
            if at.is_empty() {
                break;
            }
        }
    };

    // every boundary state exists, so every control pushes
    for c in 0..m.n_controls() as CtrlIx {
        for (_, path, target) in &m.pushes_from[c as usize] {
            if !path.is_empty() {
                expose_push(path, *target, &mut exposed, &mut work);
            }
        }
    }
    while let Some((e, c)) = work.pop() {
        for (_, path, target) in &m.pushes_from[c as usize] {
            if path.is_empty() {
                // empty push on top of the exposed edge
                expose((e, *target), &mut exposed, &mut work);
            } else {
                expose_push(path, *target, &mut exposed, &mut work);
                // once the pushed path unwinds completely, e is exposed
                // again under the controls the unwind lands at
                for w in m.unwind(path, *target, &table) {
                    expose((e, w), &mut exposed, &mut work);
                }
            }
        }
    }

    for &(e, c) in &exposed {
        if table[&(e, c)].is_empty() {
            return ConnectivityReport {
                connected: false,
                witness: Some(ConnectivityWitness::UnpoppableExposedPair {
                    edge: m.edge_ids[e as usize].clone(),
                    control: m.control_ids[c as usize].clone(),
                }),
            };
        }
    }

    // -- boundary summary graph, one strongly connected class per anchor
    let n = m.n_controls();
    let mut succ: Vec<BTreeSet<CtrlIx>> = vec![BTreeSet::new(); n];
    for c in 0..n as CtrlIx {
        for (_, path, target) in &m.pushes_from[c as usize] {
            if path.is_empty() {
                succ[c as usize].insert(*target);
            } else {
                for w in m.unwind(path, *target, &table) {
                    succ[c as usize].insert(w);
                }
            }
        }
    }
    for anchor in 0..m.vertex_ids.len() {
        let class = &m.controls_at[anchor];
        for &from in class {
            // reachability closure within the summary graph
            let mut seen: BTreeSet<CtrlIx> = BTreeSet::from([from]);
            let mut work = vec![from];
            while let Some(c) = work.pop() {
                for &t in &succ[c as usize] {
                    if seen.insert(t) {
                        work.push(t);
                    }
                }
            }
            for &to in class {
                if !seen.contains(&to) {
                    return ConnectivityReport {
                        connected: false,
                        witness: Some(ConnectivityWitness::DisconnectedBoundary {
                            from: m.control_ids[from as usize].clone(),
                            to: m.control_ids[to as usize].clone(),
                        }),
                    };
                }
            }
        }
    }

    ConnectivityReport {
        connected: true,
        witness: None,
    }
}

/// Controls of states reachable by pop-only paths from arbitrarily deep
/// stacks: the vertices of the pop presentation with arbitrarily long
/// incoming pop chains.
pub fn directly_accessible_controls(spec: &AutomatonSpec) -> BTreeSet<ControlId> {
    let presentation = crate::sofic::build_y_presentation(spec);
    let kept = trim_unbounded_past(presentation.graph.graph());
    kept.vertices()
        .map(|v| ControlId::new(v.as_str()))
        .collect()
}

/// The summary graph on boundary states used by [`strongly_connected`]:
/// vertices are the controls, and an edge labelled σ records either an
/// empty push or a push-then-fully-unwind composite starting with σ.
pub fn boundary_summary_graph(spec: &AutomatonSpec) -> crate::graph::LabelledDirectedGraph {
    let m = Machine::compile(spec);
    let table = m.pop_summaries();
    let vertices: Vec<crate::ids::VertexId> = m
        .control_ids
        .iter()
        .map(|c| crate::ids::VertexId::new(c.as_str()))
        .collect();
    let mut edges = Vec::new();
    let mut labels = Vec::new();
    for c in 0..m.n_controls() as CtrlIx {
        for (sym, path, target) in &m.pushes_from[c as usize] {
            let landings = if path.is_empty() {
                vec![*target]
            } else {
                m.unwind(path, *target, &table)
            };
            let symbol = m.symbol_ids[*sym as usize].clone();
            for w in landings {
                let from = &m.control_ids[c as usize];
                let to = &m.control_ids[w as usize];
                let id = EdgeId::new(format!("{from}|{symbol}|{to}"));
                edges.push((
                    id.clone(),
                    crate::ids::VertexId::new(from.as_str()),
                    crate::ids::VertexId::new(to.as_str()),
                ));
                labels.push((id, symbol.clone()));
            }
        }
    }
    let graph = crate::graph::DirectedGraph::new(vertices, edges).expect("controls are vertices");
    crate::graph::LabelledDirectedGraph::new(graph, spec.alphabet().iter().cloned(), labels)
        .expect("labels are alphabet symbols")
}

/// The automaton graph truncated to states of stack depth at most `depth`:
/// vertices are the states, edges the transitions whose source and target
/// both stay within the depth bound.
pub fn automaton_view(spec: &AutomatonSpec, depth: usize) -> crate::graph::LabelledDirectedGraph {
    let m = Machine::compile(spec);
    let name = |s: &IState| {
        let stack = if s.stack.is_empty() {
            "ε".to_owned()
        } else {
            s.stack
                .iter()
                .map(|&e| m.edge_ids[e as usize].to_string())
                .collect::<Vec<_>>()
                .join(".")
        };
        crate::ids::VertexId::new(format!(
            "({},{})",
            stack, m.control_ids[s.control as usize]
        ))
    };
    let states = m.states_with_stack_up_to(depth);
    let vertices: BTreeSet<crate::ids::VertexId> = states.iter().map(&name).collect();
    let mut edges = Vec::new();
    let mut labels = Vec::new();
    for state in &states {
        for sym in m.acceptance(state) {
            let (next, _) = m.step(state, sym).expect("accepted");
            if next.stack.len() > depth {
                continue;
            }
            let symbol = m.symbol_ids[sym as usize].clone();
            let from = name(state);
            let to = name(&next);
            let id = EdgeId::new(format!("{from}|{symbol}"));
            edges.push((id.clone(), from, to));
            labels.push((id, symbol));
        }
    }
    let graph = crate::graph::DirectedGraph::new(vertices, edges).expect("states are vertices");
    crate::graph::LabelledDirectedGraph::new(graph, spec.alphabet().iter().cloned(), labels)
        .expect("labels are alphabet symbols")
}
