//! The forward-separation decision procedure: a saturation-based
//! reachability check on the equal-length pair system, a finite bounded
//! pair system with nondeterministic jump edges, and a brute-force witness
//! oracle for cross-validation.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::engine::PdaState;
use crate::error::{Error, Result};
use crate::ids::{ControlId, Symbol, Word};
use crate::machine::{CtrlIx, EdgeIx, IState, Machine};
use crate::sofic::VisibilityConstants;
use crate::spec::AutomatonSpec;

// ---------------------------------------------------------------------------
// The equal-length pair pushdown and its saturation
// ---------------------------------------------------------------------------

/// A control of the pair pushdown: the two automaton controls plus the top
/// stack-edge pair (`None` when both stacks are empty). Keeping the top in
/// the control makes acceptance sets, and hence every separation flag, a
/// function of the control alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct PairCtrl {
    left: CtrlIx,
    right: CtrlIx,
    top: Option<(EdgeIx, EdgeIx)>,
}

/// Stack symbols of the pair pushdown: edge pairs plus a bottom marker.
/// Index 0 is the bottom marker; pair `(a, b)` is `1 + a * n_edges + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct PairSym(u32);

const BOTTOM: PairSym = PairSym(0);

struct PairAlphabet {
    n_edges: u32,
}

impl PairAlphabet {
    fn pair(&self, a: EdgeIx, b: EdgeIx) -> PairSym {
        PairSym(1 + a * self.n_edges + b)
    }

    fn unpair(&self, s: PairSym) -> Option<(EdgeIx, EdgeIx)> {
        if s == BOTTOM {
            None
        } else {
            let v = s.0 - 1;
            Some((v / self.n_edges, v % self.n_edges))
        }
    }

    fn all(&self) -> impl Iterator<Item = PairSym> + '_ {
        (0..=self.n_edges * self.n_edges).map(PairSym)
    }
}

/// A pushdown rule `<from, pop> -> <to, push>`: in a configuration with
/// control `from` and stack top `pop`, replace the top by the word `push`
/// (leftmost symbol becomes the new top) and move to `to`.
struct Rule {
    from: usize,
    pop: PairSym,
    to: usize,
    push: Vec<PairSym>,
}

/// The product pushdown underlying the equal-length pair transition system:
/// synchronized stepping of two automaton copies on a common symbol, defined
/// only while both sides make moves of the same kind and push length.
pub struct PairPushdown {
    machine: Machine,
    alphabet: PairAlphabet,
    controls: Vec<PairCtrl>,
    control_ix: HashMap<PairCtrl, usize>,
    rules: Vec<Rule>,
    /// controls whose two acceptance sets differ (one step past such a
    /// control is an acceptance-set separation)
    mismatched: Vec<bool>,
    /// controls where some common symbol changes the two stack lengths
    /// differently (length separations)
    length_split: Vec<bool>,
}

impl PairPushdown {
    pub fn build(spec: &AutomatonSpec) -> PairPushdown {
        let machine = Machine::compile(spec);
        let alphabet = PairAlphabet {
            n_edges: machine.edge_ids.len() as u32,
        };

        // enumerate every pair control eagerly; the space is
        // |controls|^2 * (|edges|^2 + 1)
        let mut controls = Vec::new();
        let mut control_ix = HashMap::new();
        let n_ctrl = machine.n_controls() as CtrlIx;
        let n_edges = machine.edge_ids.len() as EdgeIx;
        for left in 0..n_ctrl {
            for right in 0..n_ctrl {
                let mut tops = vec![None];
                for a in 0..n_edges {
                    for b in 0..n_edges {
                        tops.push(Some((a, b)));
                    }
                }
                for top in tops {
                    let c = PairCtrl { left, right, top };
                    control_ix.insert(c, controls.len());
                    controls.push(c);
                }
            }
        }

        let probe = |ctrl: CtrlIx, top: Option<EdgeIx>| -> IState {
            IState {
                stack: top.map(|e| vec![e]).unwrap_or_default(),
                control: ctrl,
            }
        };

        let mut mismatched = vec![false; controls.len()];
        let mut length_split = vec![false; controls.len()];
        let mut rules = Vec::new();

        for (ix, c) in controls.iter().enumerate() {
            // controls with an incompatible top (an edge whose target is
            // not the control's anchor) describe no actual configuration;
            // their flags and rules are never reachable, so computing them
            // is harmless
            let left_state = probe(c.left, c.top.map(|(a, _)| a));
            let right_state = probe(c.right, c.top.map(|(_, b)| b));
            if !machine.state_is_valid(&left_state) || !machine.state_is_valid(&right_state) {
                continue;
            }
            let acc_left = machine.acceptance(&left_state);
            let acc_right = machine.acceptance(&right_state);
            if acc_left != acc_right {
                mismatched[ix] = true;
                continue; // not a pair-system state; a target only
            }
            for &sym in &acc_left {
                let left_push = machine.push_entry(c.left, sym);
                let right_push = machine.push_entry(c.right, sym);
                match (left_push, right_push) {
                    (Some((path_l, tgt_l)), Some((path_r, tgt_r))) => {
                        if path_l.len() != path_r.len() {
                            length_split[ix] = true;
                            continue;
                        }
                        let deltas: Vec<PairSym> = path_l
                            .iter()
                            .zip(path_r)
                            .map(|(&a, &b)| alphabet.pair(a, b))
                            .collect();
                        let (to_top, below) = match deltas.split_last() {
                            Some((&last, rest)) => (Some(last), rest.to_vec()),
                            None => (None, Vec::new()),
                        };
                        let new_top = match to_top {
                            Some(last) => Some(alphabet.unpair(last).unwrap()),
                            None => c.top,
                        };
                        let to = PairCtrl {
                            left: tgt_l,
                            right: tgt_r,
                            top: new_top,
                        };
                        let to_ix = control_ix[&to];
                        let betas: Vec<PairSym> = if c.top.is_some() {
                            alphabet.all().collect()
                        } else {
                            vec![BOTTOM]
                        };
                        for beta in betas {
                            // machine stack gains, top first: the pushed
                            // path below its new top (reversed), then the
                            // old control-held top, then beta
                            let mut push: Vec<PairSym> =
                                below.iter().rev().copied().collect();
                            if to_top.is_some() {
                                if let Some((a, b)) = c.top {
                                    push.push(alphabet.pair(a, b));
                                }
                            }
                            push.push(beta);
                            rules.push(Rule {
                                from: ix,
                                pop: beta,
                                to: to_ix,
                                push,
                            });
                        }
                    }
                    (None, None) => {
                        // both pop; acceptance guarantees the tops exist
                        let (ea, eb) = c.top.expect("pops need a top");
                        let tgt_l = machine.pop_entry(ea, c.left, sym).expect("accepted");
                        let tgt_r = machine.pop_entry(eb, c.right, sym).expect("accepted");
                        for beta in alphabet.all() {
                            let to = PairCtrl {
                                left: tgt_l,
                                right: tgt_r,
                                top: alphabet.unpair(beta),
                            };
                            let to_ix = control_ix[&to];
                            // the consumed beta becomes the control-held
                            // top; the bottom marker is put back
                            let push = if beta == BOTTOM { vec![BOTTOM] } else { vec![] };
                            rules.push(Rule {
                                from: ix,
                                pop: beta,
                                to: to_ix,
                                push,
                            });
                        }
                    }
                    _ => {
                        // push on one side, pop on the other: the lengths
                        // diverge on this common symbol
                        length_split[ix] = true;
                    }
                }
            }
        }

        PairPushdown {
            machine,
            alphabet,
            controls,
            control_ix,
            rules,
            mismatched,
            length_split,
        }
    }

    /// Backward saturation: can the configuration `((ε,left),(ε,right))`
    /// reach a configuration whose control is flagged (an acceptance-set
    /// mismatch, necessarily entered from a state one step before it, or a
    /// length split)?
    fn saturate_reaches_flag(&self, left: CtrlIx, right: CtrlIx) -> bool {
        let n = self.controls.len();
        let fin = n; // single accepting automaton state
        let n_syms = (self.alphabet.n_edges * self.alphabet.n_edges + 1) as usize;
        // NFA transitions: state -> symbol -> set of states
        let mut delta: Vec<Vec<BTreeSet<usize>>> = vec![vec![BTreeSet::new(); n_syms]; n + 1];
        for set in &mut delta[fin] {
            set.insert(fin);
        }
        for (ix, row) in delta.iter_mut().enumerate().take(n) {
            if self.mismatched[ix] || self.length_split[ix] {
                for set in row {
                    set.insert(fin);
                }
            }
        }

        let word_reach = |delta: &Vec<Vec<BTreeSet<usize>>>, from: usize, w: &[PairSym]| {
            let mut set = BTreeSet::from([from]);
            for sym in w {
                let mut next = BTreeSet::new();
                for &s in &set {
                    next.extend(delta[s][sym.0 as usize].iter().copied());
                }
                set = next;
                if set.is_empty() {
                    break;
                }
            }
            set
        };

        loop {
            let mut changed = false;
            for rule in &self.rules {
                let targets = word_reach(&delta, rule.to, &rule.push);
                for q in targets {
                    changed |= delta[rule.from][rule.pop.0 as usize].insert(q);
                }
            }
            if !changed {
                break;
            }
        }

        let start = PairCtrl {
            left,
            right,
            top: None,
        };
        let ix = self.control_ix[&start];
        if self.mismatched[ix] || self.length_split[ix] {
            return true;
        }
        delta[ix][BOTTOM.0 as usize].contains(&fin)
    }
}

/// True iff from the boundary pair `((ε,u),(ε,v))` some word reaches a
/// state where a common symbol either exposes different acceptance sets or
/// changes the two stack lengths differently. Pairs whose acceptance sets
/// already differ are separated at distance zero.
///
/// Decided by saturation on the equal-length pair pushdown, so no length
/// bound is needed.
pub fn xi_p_reachable(spec: &AutomatonSpec, u: &ControlId, v: &ControlId) -> Result<bool> {
    if u == v {
        return Err(Error::InvalidState("controls must be distinct".into()));
    }
    if spec.push_labels_of(u) != spec.push_labels_of(v) {
        return Ok(true);
    }
    let pd = PairPushdown::build(spec);
    let left = pd.machine.control_index(u)?;
    let right = pd.machine.control_index(v)?;
    Ok(pd.saturate_reaches_flag(left, right))
}

// ---------------------------------------------------------------------------
// The bounded pair system with jump edges
// ---------------------------------------------------------------------------

/// The finite transition system on pairs of states with distinct controls,
/// equal acceptance sets and stack lengths below `M_G`; ordinary edges are
/// synchronized steps, jump edges realize the nondeterministic transits
/// through same-control pairs.
#[derive(Debug, Clone)]
pub struct QBoundedSystem {
    pub states: Vec<(PdaState, PdaState)>,
    pub ordinary_edges: Vec<(usize, Symbol, usize)>,
    pub jump_edges: Vec<(usize, Symbol, usize)>,
    /// states with a one-step acceptance-set separation
    pub xi: BTreeSet<usize>,
    /// states with a one-step stack-length escape past the bound
    pub xi_prime: BTreeSet<usize>,
    pub bound: usize,
}

/// Chases the common pop descents of a same-control pair with distinct
/// stacks: returns whether some descent exposes an acceptance mismatch
/// (membership in the excluded class), and the set of distinct-control
/// pairs reachable by one further pop after a common descent.
///
/// A descent of length zero only needs the two top pop label sets to
/// agree; longer descents additionally require the stack remainders below
/// the final position to differ.
fn same_control_transits(
    m: &Machine,
    a: &IState,
    b: &IState,
) -> (bool, Vec<(IState, IState)>) {
    debug_assert_eq!(a.control, b.control);
    debug_assert_ne!(a.stack, b.stack);
    let la = a.stack.len();
    let lb = b.stack.len();
    let mut excluded = false;
    let mut q_targets: BTreeSet<(IState, IState)> = BTreeSet::new();

    let mut seen: HashSet<(usize, CtrlIx)> = HashSet::new();
    let mut branches: Vec<(usize, CtrlIx)> = vec![(0, a.control)];
    seen.insert((0, a.control));

    while let Some((depth, control)) = branches.pop() {
        if depth >= la.min(lb) {
            continue;
        }
        let ea = a.stack[la - 1 - depth];
        let eb = b.stack[lb - 1 - depth];
        let pops_a = m.pops_at.get(&(ea, control));
        let pops_b = m.pops_at.get(&(eb, control));
        let (pops_a, pops_b) = match (pops_a, pops_b) {
            (Some(x), Some(y)) => (x, y),
            (None, None) => continue,
            _ => continue, // pop sets differ (one empty): chain stops
        };
        let set_a: Vec<u16> = pops_a.iter().map(|(s, _)| *s).collect();
        let set_b: Vec<u16> = pops_b.iter().map(|(s, _)| *s).collect();
        if set_a != set_b {
            continue; // common descent requires equal pop label sets
        }

        let rem_a = &a.stack[..la - (depth + 1)];
        let rem_b = &b.stack[..lb - (depth + 1)];
        if depth == 0 || rem_a != rem_b {
            // a genuine witness: evaluate the splitting pop
            for (sym, tgt_a) in pops_a {
                let tgt_b = m.pop_entry(eb, control, *sym).expect("equal sets");
                let s1 = IState {
                    stack: rem_a.to_vec(),
                    control: *tgt_a,
                };
                let s2 = IState {
                    stack: rem_b.to_vec(),
                    control: tgt_b,
                };
                if m.acceptance(&s1) != m.acceptance(&s2) {
                    excluded = true;
                } else if s1.control != s2.control {
                    q_targets.insert((s1, s2));
                }
            }
        }

        // extend the common descent along symbols with equal pop targets
        for (sym, tgt_a) in pops_a {
            let tgt_b = m.pop_entry(eb, control, *sym).expect("equal sets");
            if *tgt_a == tgt_b && seen.insert((depth + 1, *tgt_a)) {
                branches.push((depth + 1, *tgt_a));
            }
        }
    }
    (excluded, q_targets.into_iter().collect())
}

/// Builds the bounded pair system for the given visibility constants.
pub fn build_q_system(spec: &AutomatonSpec, consts: &VisibilityConstants) -> QBoundedSystem {
    let m = Machine::compile(spec);
    let bound = consts.m_g;

    // all states with stack length < bound, paired
    let singles = m.states_with_stack_up_to(bound.saturating_sub(1));
    let mut states: Vec<(IState, IState)> = Vec::new();
    let mut state_ix: HashMap<(IState, IState), usize> = HashMap::new();
    for s1 in &singles {
        for s2 in &singles {
            if s1.control == s2.control {
                continue;
            }
            if m.acceptance(s1) != m.acceptance(s2) {
                continue;
            }
            state_ix.insert((s1.clone(), s2.clone()), states.len());
            states.push((s1.clone(), s2.clone()));
        }
    }

    let mut ordinary = Vec::new();
    let mut jumps = Vec::new();
    let mut xi = BTreeSet::new();
    let mut xi_prime = BTreeSet::new();

    for (ix, (s1, s2)) in states.iter().enumerate() {
        for sym in m.acceptance(s1) {
            let (t1, _) = m.step(s1, sym).expect("accepted");
            let (t2, _) = m.step(s2, sym).expect("accepted");
            let symbol = m.symbol_ids[sym as usize].clone();
            if m.acceptance(&t1) != m.acceptance(&t2) {
                xi.insert(ix);
                continue;
            }
            if t1.stack.len().max(t2.stack.len()) > bound {
                xi_prime.insert(ix);
                continue;
            }
            if t1.control != t2.control {
                if let Some(&to) = state_ix.get(&(t1.clone(), t2.clone())) {
                    ordinary.push((ix, symbol, to));
                }
                continue;
            }
            if t1.stack == t2.stack {
                continue; // the two runs merged; nothing separates them later
            }
            let (excluded, targets) = same_control_transits(&m, &t1, &t2);
            if excluded || targets.is_empty() {
                continue;
            }
            for (q1, q2) in targets {
                if let Some(&to) = state_ix.get(&(q1, q2)) {
                    jumps.push((ix, symbol.clone(), to));
                }
            }
        }
    }

    QBoundedSystem {
        states: states
            .into_iter()
            .map(|(a, b)| (m.state_to_public(&a), m.state_to_public(&b)))
            .collect(),
        ordinary_edges: ordinary,
        jump_edges: jumps,
        xi,
        xi_prime,
        bound,
    }
}

/// True iff inside the bounded pair system the boundary pair
/// `((ε,u),(ε,v))` reaches a state with a one-step acceptance or length
/// separation. Pairs with different boundary acceptance sets are separated
/// at distance zero.
pub fn xi_q_reachable(
    spec: &AutomatonSpec,
    consts: &VisibilityConstants,
    u: &ControlId,
    v: &ControlId,
) -> Result<bool> {
    if u == v {
        return Err(Error::InvalidState("controls must be distinct".into()));
    }
    spec.anchor_of(u)?;
    spec.anchor_of(v)?;
    if spec.push_labels_of(u) != spec.push_labels_of(v) {
        return Ok(true);
    }
    let system = build_q_system(spec, consts);
    let start = system
        .states
        .iter()
        .position(|(a, b)| {
            a.stack.is_empty() && b.stack.is_empty() && a.control == *u && b.control == *v
        })
        .expect("boundary pair with equal acceptance sets is a system state");

    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); system.states.len()];
    for (from, _, to) in system.ordinary_edges.iter().chain(&system.jump_edges) {
        succ[*from].push(*to);
    }
    let mut seen = vec![false; system.states.len()];
    let mut work = vec![start];
    seen[start] = true;
    while let Some(ix) = work.pop() {
        if system.xi.contains(&ix) || system.xi_prime.contains(&ix) {
            return Ok(true);
        }
        for &t in &succ[ix] {
            if !seen[t] {
                seen[t] = true;
                work.push(t);
            }
        }
    }
    Ok(false)
}

// ---------------------------------------------------------------------------
// The decision and the brute-force oracle
// ---------------------------------------------------------------------------

/// Which of the two reachability conditions failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FailedCondition {
    #[serde(rename = "a")]
    BoundedSystem,
    #[serde(rename = "b")]
    PairSaturation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationVerdict {
    pub separated: bool,
    pub failing_pair: Option<(ControlId, ControlId)>,
    pub condition: Option<FailedCondition>,
}

/// The automaton is forward separated iff for every pair of distinct
/// boundary controls with equal acceptance sets both reachability
/// conditions hold. Pairs with different acceptance sets are separated at
/// distance zero and skipped.
pub fn decide_forward_separated(
    spec: &AutomatonSpec,
    consts: &VisibilityConstants,
) -> Result<SeparationVerdict> {
    let controls: Vec<ControlId> = spec.controls().cloned().collect();
    for (i, u) in controls.iter().enumerate() {
        for v in &controls[i + 1..] {
            if spec.push_labels_of(u) == spec.push_labels_of(v) {
                if !xi_q_reachable(spec, consts, u, v)? {
                    return Ok(SeparationVerdict {
                        separated: false,
                        failing_pair: Some((u.clone(), v.clone())),
                        condition: Some(FailedCondition::BoundedSystem),
                    });
                }
                if !xi_p_reachable(spec, u, v)? {
                    return Ok(SeparationVerdict {
                        separated: false,
                        failing_pair: Some((u.clone(), v.clone())),
                        condition: Some(FailedCondition::PairSaturation),
                    });
                }
            }
        }
    }
    Ok(SeparationVerdict {
        separated: true,
        failing_pair: None,
        condition: None,
    })
}

/// The shortest word of length at most `limit` accepted by exactly one of
/// the two states (lexicographic tie-break), or `None`.
pub fn brute_force_separable(
    spec: &AutomatonSpec,
    s1: &PdaState,
    s2: &PdaState,
    limit: usize,
) -> Result<Option<Word>> {
    if s1 == s2 {
        return Err(Error::InvalidState(
            "brute-force separation needs distinct states".into(),
        ));
    }
    let m = Machine::compile(spec);
    let a = m.state_from_public(s1)?;
    let b = m.state_from_public(s2)?;

    let mut queue: VecDeque<(IState, IState, Vec<u16>)> = VecDeque::new();
    let mut visited: HashSet<(IState, IState)> = HashSet::new();
    queue.push_back((a.clone(), b.clone(), Vec::new()));
    visited.insert((a, b));

    while let Some((x, y, word)) = queue.pop_front() {
        if word.len() >= limit {
            continue;
        }
        for sym in 0..m.n_symbols() as u16 {
            let nx = m.step(&x, sym);
            let ny = m.step(&y, sym);
            let mut extended = word.clone();
            extended.push(sym);
            match (nx, ny) {
                (Some(_), None) | (None, Some(_)) => {
                    return Ok(Some(m.word_symbols(&extended)));
                }
                (Some((nx, _)), Some((ny, _))) => {
                    if visited.insert((nx.clone(), ny.clone())) {
                        queue.push_back((nx, ny, extended));
                    }
                }
                (None, None) => {}
            }
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Shortest-word diagnostics over the boundary pair classes
// ---------------------------------------------------------------------------

/// Shortest-word statistics of the equal-length pair system, explored up to
/// the stack bound `M_G`. Diagnostics only: the decision procedure above
/// does not depend on them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairDiagnostics {
    /// boundary pairs with equal acceptance sets
    pub boundary_pairs: usize,
    /// ordered boundary-pair pairs connected by some word (within the cap)
    pub connected_boundary_pairs: usize,
    /// longest shortest word between distinct connected boundary pairs
    pub lambda_zero: Option<usize>,
    /// longest shortest word from a boundary pair to an interior pair
    pub lambda_plus: Option<usize>,
    pub stack_cap: usize,
}

pub fn pair_diagnostics(spec: &AutomatonSpec, consts: &VisibilityConstants) -> PairDiagnostics {
    let m = Machine::compile(spec);
    let cap = consts.m_g;
    let n_ctrl = m.n_controls() as CtrlIx;

    let mut boundary: Vec<(CtrlIx, CtrlIx)> = Vec::new();
    for u in 0..n_ctrl {
        for v in 0..n_ctrl {
            if u == v {
                continue;
            }
            let su = IState {
                stack: vec![],
                control: u,
            };
            let sv = IState {
                stack: vec![],
                control: v,
            };
            if m.acceptance(&su) == m.acceptance(&sv) {
                boundary.push((u, v));
            }
        }
    }

    let mut connected = 0usize;
    let mut lambda_zero: Option<usize> = None;
    let mut lambda_plus: Option<usize> = None;

    for &(u, v) in &boundary {
        let start = (
            IState {
                stack: vec![],
                control: u,
            },
            IState {
                stack: vec![],
                control: v,
            },
        );
        let mut dist: HashMap<(IState, IState), usize> = HashMap::new();
        let mut queue = VecDeque::new();
        dist.insert(start.clone(), 0);
        queue.push_back(start);
        while let Some((x, y)) = queue.pop_front() {
            let d = dist[&(x.clone(), y.clone())];
            if x.stack.is_empty() && y.stack.is_empty() && d > 0 {
                connected += 1;
                lambda_zero = Some(lambda_zero.map_or(d, |l| l.max(d)));
            }
            if !x.stack.is_empty() && d > 0 {
                lambda_plus = Some(lambda_plus.map_or(d, |l| l.max(d)));
            }
            if x.stack.len() >= cap {
                continue;
            }
            let acc_x = m.acceptance(&x);
            if acc_x != m.acceptance(&y) {
                continue; // left the pair system
            }
            for sym in acc_x {
                let (nx, kx) = m.step(&x, sym).expect("accepted");
                let (ny, ky) = m.step(&y, sym).expect("accepted");
                if kx != ky {
                    continue; // lengths diverge: outside the system
                }
                if nx == ny {
                    continue;
                }
                let key = (nx.clone(), ny.clone());
                if !dist.contains_key(&key) {
                    dist.insert(key.clone(), d + 1);
                    queue.push_back(key);
                }
            }
        }
    }

    PairDiagnostics {
        boundary_pairs: boundary.len(),
        connected_boundary_pairs: connected,
        lambda_zero,
        lambda_plus,
        stack_cap: cap,
    }
}
