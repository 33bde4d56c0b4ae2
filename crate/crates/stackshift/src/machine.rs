//! Index-compiled view of an [`AutomatonSpec`].
//!
//! The public modules speak in string ids; everything that explores the
//! (lazily materialized, infinite) state space works on this compiled form
//! instead: vertices, edges, controls and symbols become dense indices and
//! the push/pop maps become index tables.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::ids::{ControlId, EdgeId, Symbol, VertexId};
use crate::spec::AutomatonSpec;

pub(crate) type VertIx = u32;
pub(crate) type EdgeIx = u32;
pub(crate) type CtrlIx = u32;
pub(crate) type SymIx = u16;

/// An automaton state over indices: a stack (path of base edge indices,
/// possibly empty) and a control.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct IState {
    pub stack: Vec<EdgeIx>,
    pub control: CtrlIx,
}

/// How a symbol was consumed by a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum StepKind {
    Push(usize), // length of the pushed path
    Pop,
}

pub(crate) struct Machine {
    pub vertex_ids: Vec<VertexId>,
    pub edge_ids: Vec<EdgeId>,
    pub edge_src: Vec<VertIx>,
    pub edge_dst: Vec<VertIx>,
    pub control_ids: Vec<ControlId>,
    pub control_anchor: Vec<VertIx>,
    pub symbol_ids: Vec<Symbol>,

    edge_ix: HashMap<EdgeId, EdgeIx>,
    control_ix: HashMap<ControlId, CtrlIx>,
    symbol_ix: HashMap<Symbol, SymIx>,

    /// controls anchored at each vertex, sorted
    pub controls_at: Vec<Vec<CtrlIx>>,
    /// outgoing base edges per vertex, sorted
    pub edges_from: Vec<Vec<EdgeIx>>,
    /// pushes per control, sorted by symbol: (symbol, path, target)
    pub pushes_from: Vec<Vec<(SymIx, Vec<EdgeIx>, CtrlIx)>>,
    /// pops per (edge, control), sorted by symbol: (symbol, target)
    pub pops_at: HashMap<(EdgeIx, CtrlIx), Vec<(SymIx, CtrlIx)>>,
}

impl Machine {
    pub fn compile(spec: &AutomatonSpec) -> Machine {
        let vertex_ids: Vec<VertexId> = spec.base().vertices().cloned().collect();
        let vertex_ix: HashMap<VertexId, VertIx> = vertex_ids
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i as VertIx))
            .collect();

        let mut edge_ids = Vec::new();
        let mut edge_src = Vec::new();
        let mut edge_dst = Vec::new();
        for (e, s, t) in spec.base().edges() {
            edge_ids.push(e.clone());
            edge_src.push(vertex_ix[s]);
            edge_dst.push(vertex_ix[t]);
        }
        let edge_ix: HashMap<EdgeId, EdgeIx> = edge_ids
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i as EdgeIx))
            .collect();

        let control_ids: Vec<ControlId> = spec.controls().cloned().collect();
        let control_ix: HashMap<ControlId, CtrlIx> = control_ids
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i as CtrlIx))
            .collect();
        let control_anchor: Vec<VertIx> = control_ids
            .iter()
            .map(|c| vertex_ix[spec.anchor_of(c).expect("anchored")])
            .collect();

        let symbol_ids: Vec<Symbol> = spec.alphabet().iter().cloned().collect();
        let symbol_ix: HashMap<Symbol, SymIx> = symbol_ids
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as SymIx))
            .collect();

        let mut controls_at = vec![Vec::new(); vertex_ids.len()];
        for (i, anchor) in control_anchor.iter().enumerate() {
            controls_at[*anchor as usize].push(i as CtrlIx);
        }
        let mut edges_from = vec![Vec::new(); vertex_ids.len()];
        for (i, src) in edge_src.iter().enumerate() {
            edges_from[*src as usize].push(i as EdgeIx);
        }

        let mut pushes_from = vec![Vec::new(); control_ids.len()];
        for (c, s, path, target) in spec.pushes() {
            let path_ix: Vec<EdgeIx> = path.0.iter().map(|e| edge_ix[e]).collect();
            pushes_from[control_ix[c] as usize].push((symbol_ix[s], path_ix, control_ix[target]));
        }
        for list in &mut pushes_from {
            list.sort();
        }

        let mut pops_at: HashMap<(EdgeIx, CtrlIx), Vec<(SymIx, CtrlIx)>> = HashMap::new();
        for (c, e, s, target) in spec.pops() {
            pops_at
                .entry((edge_ix[e], control_ix[c]))
                .or_default()
                .push((symbol_ix[s], control_ix[target]));
        }
        for list in pops_at.values_mut() {
            list.sort();
        }

        Machine {
            vertex_ids,
            edge_ids,
            edge_src,
            edge_dst,
            control_ids,
            control_anchor,
            symbol_ids,
            edge_ix,
            control_ix,
            symbol_ix,
            controls_at,
            edges_from,
            pushes_from,
            pops_at,
        }
    }

    pub fn n_symbols(&self) -> usize {
        self.symbol_ids.len()
    }

    pub fn n_controls(&self) -> usize {
        self.control_ids.len()
    }

    pub fn symbol_index(&self, s: &Symbol) -> Result<SymIx> {
        self.symbol_ix
            .get(s)
            .copied()
            .ok_or_else(|| Error::UnknownSymbol(s.clone()))
    }

    pub fn control_index(&self, c: &ControlId) -> Result<CtrlIx> {
        self.control_ix
            .get(c)
            .copied()
            .ok_or_else(|| Error::NoSuchControl(c.clone()))
    }

    pub fn edge_index(&self, e: &EdgeId) -> Result<EdgeIx> {
        self.edge_ix
            .get(e)
            .copied()
            .ok_or_else(|| Error::NoSuchEdge(e.clone()))
    }

    pub fn word_indices(&self, word: &[Symbol]) -> Result<Vec<SymIx>> {
        word.iter().map(|s| self.symbol_index(s)).collect()
    }

    pub fn word_symbols(&self, word: &[SymIx]) -> Vec<Symbol> {
        word.iter()
            .map(|&s| self.symbol_ids[s as usize].clone())
            .collect()
    }

    /// The vertex the control of `state` must be anchored at: the target of
    /// the top stack edge, or the control's own anchor when the stack is
    /// empty.
    pub fn state_is_valid(&self, state: &IState) -> bool {
        // stack must be a path
        for pair in state.stack.windows(2) {
            if self.edge_dst[pair[0] as usize] != self.edge_src[pair[1] as usize] {
                return false;
            }
        }
        let anchor = self.control_anchor[state.control as usize];
        match state.stack.last() {
            Some(&top) => self.edge_dst[top as usize] == anchor,
            None => true,
        }
    }

    /// The acceptance set of a state, sorted: pop labels of the top stack
    /// edge (when there is one) plus the push labels of the control.
    pub fn acceptance(&self, state: &IState) -> Vec<SymIx> {
        let mut out: Vec<SymIx> = self.pushes_from[state.control as usize]
            .iter()
            .map(|(s, _, _)| *s)
            .collect();
        if let Some(&top) = state.stack.last() {
            if let Some(pops) = self.pops_at.get(&(top, state.control)) {
                out.extend(pops.iter().map(|(s, _)| *s));
            }
        }
        out.sort_unstable();
        out
    }

    pub fn push_entry(&self, control: CtrlIx, sym: SymIx) -> Option<(&[EdgeIx], CtrlIx)> {
        self.pushes_from[control as usize]
            .iter()
            .find(|(s, _, _)| *s == sym)
            .map(|(_, path, target)| (path.as_slice(), *target))
    }

    pub fn pop_entry(&self, top: EdgeIx, control: CtrlIx, sym: SymIx) -> Option<CtrlIx> {
        self.pops_at
            .get(&(top, control))?
            .iter()
            .find(|(s, _)| *s == sym)
            .map(|(_, target)| *target)
    }

    /// One transition. `None` is rejection. Push and pop are exclusive
    /// because push and pop label sets are disjoint per control.
    pub fn step(&self, state: &IState, sym: SymIx) -> Option<(IState, StepKind)> {
        if let Some((path, target)) = self.push_entry(state.control, sym) {
            let mut stack = state.stack.clone();
            stack.extend_from_slice(path);
            return Some((
                IState {
                    stack,
                    control: target,
                },
                StepKind::Push(path.len()),
            ));
        }
        let &top = state.stack.last()?;
        let target = self.pop_entry(top, state.control, sym)?;
        let mut stack = state.stack.clone();
        stack.pop();
        Some((
            IState {
                stack,
                control: target,
            },
            StepKind::Pop,
        ))
    }

    pub fn run(&self, state: &IState, word: &[SymIx]) -> Option<IState> {
        let mut current = state.clone();
        for &sym in word {
            current = self.step(&current, sym)?.0;
        }
        Some(current)
    }

    /// All base paths of length at most `n`, grouped with every compatible
    /// control: exactly the states of stack length `<= n`. Deterministic
    /// order.
    pub fn states_with_stack_up_to(&self, n: usize) -> Vec<IState> {
        let mut out = Vec::new();
        for v in 0..self.vertex_ids.len() {
            for &c in &self.controls_at[v] {
                out.push(IState {
                    stack: Vec::new(),
                    control: c,
                });
            }
        }
        let mut frontier: Vec<Vec<EdgeIx>> = vec![Vec::new()];
        for _ in 0..n {
            let mut next = Vec::new();
            for stack in &frontier {
                let from = match stack.last() {
                    Some(&e) => self.edge_dst[e as usize],
                    None => u32::MAX, // placeholder; expanded per start vertex below
                };
                if stack.is_empty() {
                    for v in 0..self.vertex_ids.len() {
                        for &e in &self.edges_from[v] {
                            next.push(vec![e]);
                        }
                    }
                } else {
                    for &e in &self.edges_from[from as usize] {
                        let mut longer = stack.clone();
                        longer.push(e);
                        next.push(longer);
                    }
                }
            }
            for stack in &next {
                let end = self.edge_dst[*stack.last().unwrap() as usize];
                for &c in &self.controls_at[end as usize] {
                    out.push(IState {
                        stack: stack.clone(),
                        control: c,
                    });
                }
            }
            frontier = next;
        }
        out
    }

    pub fn state_to_public(&self, state: &IState) -> crate::engine::PdaState {
        crate::engine::PdaState {
            stack: state
                .stack
                .iter()
                .map(|&e| self.edge_ids[e as usize].clone())
                .collect(),
            control: self.control_ids[state.control as usize].clone(),
        }
    }

    pub fn state_from_public(&self, state: &crate::engine::PdaState) -> Result<IState> {
        let control = self.control_index(&state.control)?;
        let stack: Vec<EdgeIx> = state
            .stack
            .iter()
            .map(|e| self.edge_index(e))
            .collect::<Result<_>>()?;
        let istate = IState { stack, control };
        if !self.state_is_valid(&istate) {
            return Err(Error::InvalidState(format!(
                "stack is not a path ending at the anchor of {}",
                state.control
            )));
        }
        // control must be anchored at the stack's endpoint
        let anchor = self.control_anchor[control as usize];
        if let Some(&top) = istate.stack.last() {
            if self.edge_dst[top as usize] != anchor {
                return Err(Error::InvalidState(format!(
                    "control {} is not anchored at the top of the stack",
                    state.control
                )));
            }
        }
        Ok(istate)
    }

    /// Pop summaries: `table[(e, U)]` is the set of controls reachable by
    /// completely unwinding the stack edge `e` starting from control `U`,
    /// allowing arbitrary push excursions above `e`. Least fixpoint.
    pub fn pop_summaries(&self) -> BTreeMap<(EdgeIx, CtrlIx), Vec<CtrlIx>> {
        let mut keys = Vec::new();
        for e in 0..self.edge_ids.len() {
            let tgt = self.edge_dst[e];
            for &c in &self.controls_at[tgt as usize] {
                keys.push((e as EdgeIx, c));
            }
        }
        let mut table: BTreeMap<(EdgeIx, CtrlIx), Vec<CtrlIx>> =
            keys.iter().map(|k| (*k, Vec::new())).collect();

        let insert = |table: &mut BTreeMap<(EdgeIx, CtrlIx), Vec<CtrlIx>>,
                      key: (EdgeIx, CtrlIx),
                      value: CtrlIx| {
            let list = table.get_mut(&key).expect("key preallocated");
            match list.binary_search(&value) {
                Ok(_) => false,
                Err(pos) => {
                    list.insert(pos, value);
                    true
                }
            }
        };

        loop {
            let mut changed = false;
            for &(e, c) in &keys {
                // direct pops
                if let Some(pops) = self.pops_at.get(&(e, c)) {
                    for &(_, target) in pops {
                        changed |= insert(&mut table, (e, c), target);
                    }
                }
                // push excursions: push a path, fully unwind it, continue
                // popping e from wherever the unwind lands
                for (_, path, target) in &self.pushes_from[c as usize] {
                    for w in self.unwind(path, *target, &table) {
                        let continued: Vec<CtrlIx> = table[&(e, w)].clone();
                        for t in continued {
                            changed |= insert(&mut table, (e, c), t);
                        }
                    }
                }
            }
            if !changed {
                return table;
            }
        }
    }

    /// Controls reachable by completely popping `path` (top edge last in
    /// the slice) starting from `control`, per the given summary table.
    pub fn unwind(
        &self,
        path: &[EdgeIx],
        control: CtrlIx,
        table: &BTreeMap<(EdgeIx, CtrlIx), Vec<CtrlIx>>,
    ) -> Vec<CtrlIx> {
        let mut current = vec![control];
        for &e in path.iter().rev() {
            let mut next = Vec::new();
            for &c in &current {
                for &t in &table[&(e, c)] {
                    if !next.contains(&t) {
                        next.push(t);
                    }
                }
            }
            next.sort_unstable();
            current = next;
            if current.is_empty() {
                break;
            }
        }
        current
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{build_dyck, build_markov_dyck, golden_mean};

    #[test]
    fn dyck_steps() {
        let spec = build_dyck(2).unwrap();
        let m = Machine::compile(&spec);
        let boundary = IState {
            stack: vec![],
            control: 0,
        };
        let p1 = m.symbol_index(&"p1".into()).unwrap();
        let q1 = m.symbol_index(&"q1".into()).unwrap();
        let q2 = m.symbol_index(&"q2".into()).unwrap();

        let (pushed, kind) = m.step(&boundary, p1).unwrap();
        assert_eq!(kind, StepKind::Push(1));
        assert_eq!(pushed.stack.len(), 1);
        assert!(m.step(&pushed, q2).is_none());
        let (back, kind) = m.step(&pushed, q1).unwrap();
        assert_eq!(kind, StepKind::Pop);
        assert_eq!(back, boundary);
    }

    #[test]
    fn state_count_by_depth() {
        let spec = build_dyck(2).unwrap();
        let m = Machine::compile(&spec);
        // stacks of length <= 3 over two loops: 1 + 2 + 4 + 8 = 15
        assert_eq!(m.states_with_stack_up_to(3).len(), 15);
    }

    #[test]
    fn golden_mean_summaries_are_root_fixed() {
        let spec = build_markov_dyck(&golden_mean()).unwrap();
        let m = Machine::compile(&spec);
        let table = m.pop_summaries();
        for ((e, _), targets) in &table {
            // controls are vertices; unwinding e lands exactly at s(e)
            assert_eq!(targets.len(), 1, "edge {e}");
            let target = targets[0];
            assert_eq!(
                m.control_anchor[target as usize],
                m.edge_src[*e as usize]
            );
        }
    }
}
