//! The finite specification of a pushdown Shannon-graph automaton and its
//! validation.
//!
//! A spec consists of a finite stack graph (the *base*), finite nonempty
//! boundary control sets anchored at the base vertices, disjoint push and
//! pop label sets per control, a push map `(control, symbol) -> (path,
//! control)` and a pop map `(control, stack edge, symbol) -> control`. The
//! automaton it presents has state space
//! `({ε} ∪ paths of base) × controls` and is realized lazily by the engine
//! module.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Path};
use crate::ids::{ControlId, EdgeId, Symbol, VertexId};

/// Finite data of the automaton construction.
///
/// Structural well-formedness (every reference resolves, push/pop label
/// sets are disjoint per control, push paths start at the control's anchor,
/// push and pop targets lie in the right boundary sets) is enforced at
/// construction; the semantic conditions (a), (b), (c) and hypothesis (h)
/// are *reported* by [`validate`], never enforced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomatonSpec {
    base: DirectedGraph,
    alphabet: BTreeSet<Symbol>,
    controls: BTreeMap<VertexId, BTreeSet<ControlId>>,
    push_labels: BTreeMap<ControlId, BTreeSet<Symbol>>,
    pop_labels: BTreeMap<(ControlId, EdgeId), BTreeSet<Symbol>>,
    push: BTreeMap<(ControlId, Symbol), (Path, ControlId)>,
    pop: BTreeMap<(ControlId, EdgeId, Symbol), ControlId>,
    // derived: control -> anchor vertex
    anchor: BTreeMap<ControlId, VertexId>,
}

impl AutomatonSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        base: DirectedGraph,
        alphabet: BTreeSet<Symbol>,
        controls: BTreeMap<VertexId, BTreeSet<ControlId>>,
        push_labels: BTreeMap<ControlId, BTreeSet<Symbol>>,
        pop_labels: BTreeMap<(ControlId, EdgeId), BTreeSet<Symbol>>,
        push: BTreeMap<(ControlId, Symbol), (Path, ControlId)>,
        pop: BTreeMap<(ControlId, EdgeId, Symbol), ControlId>,
    ) -> Result<Self> {
        let mut anchor: BTreeMap<ControlId, VertexId> = BTreeMap::new();
        for (v, set) in &controls {
            if !base.has_vertex(v) {
                return Err(Error::NoSuchVertex(v.clone()));
            }
            if set.is_empty() {
                return Err(Error::spec(
                    "controls",
                    format!("boundary set at vertex {v} is empty"),
                ));
            }
            for c in set {
                if anchor.insert(c.clone(), v.clone()).is_some() {
                    return Err(Error::spec(
                        "controls",
                        format!("control {c} listed under two vertices"),
                    ));
                }
            }
        }
        for v in base.vertices() {
            if !controls.contains_key(v) {
                return Err(Error::spec(
                    "controls",
                    format!("vertex {v} has no boundary set"),
                ));
            }
        }

        let spec = Self {
            base,
            alphabet,
            controls,
            push_labels,
            pop_labels,
            push,
            pop,
            anchor,
        };
        spec.check_structure()?;
        Ok(spec)
    }

    fn check_structure(&self) -> Result<()> {
        for (c, syms) in &self.push_labels {
            let anchor = self.anchor_of(c)?;
            for s in syms {
                if !self.alphabet.contains(s) {
                    return Err(Error::UnknownSymbol(s.clone()));
                }
                let (path, target) = self.push.get(&(c.clone(), s.clone())).ok_or_else(|| {
                    Error::spec("push", format!("no push entry for ({c}, {s})"))
                })?;
                Path::new(path.0.clone(), &self.base)?;
                let endpoint = path.target(&self.base).unwrap_or(anchor);
                if let Some(src) = path.source(&self.base) {
                    if src != anchor {
                        return Err(Error::spec(
                            "push",
                            format!("push path for ({c}, {s}) does not start at anchor {anchor}"),
                        ));
                    }
                }
                if !self.controls_at(endpoint).contains(target) {
                    return Err(Error::spec(
                        "push",
                        format!(
                            "push target {target} for ({c}, {s}) is not a control at {endpoint}"
                        ),
                    ));
                }
            }
        }
        for (c, s) in self.push.keys() {
            if !self.push_labels.get(c).is_some_and(|set| set.contains(s)) {
                return Err(Error::spec(
                    "push",
                    format!("push entry ({c}, {s}) has no matching push label"),
                ));
            }
        }

        for ((c, e), syms) in &self.pop_labels {
            let anchor = self.anchor_of(c)?;
            if self.base.target(e)? != anchor {
                return Err(Error::spec(
                    "pop_labels",
                    format!("edge {e} does not end at the anchor of control {c}"),
                ));
            }
            for s in syms {
                if !self.alphabet.contains(s) {
                    return Err(Error::UnknownSymbol(s.clone()));
                }
                if self.push_labels.get(c).is_some_and(|set| set.contains(s)) {
                    return Err(Error::PushPopOverlap {
                        control: c.clone(),
                        symbol: s.clone(),
                    });
                }
                let target = self
                    .pop
                    .get(&(c.clone(), e.clone(), s.clone()))
                    .ok_or_else(|| {
                        Error::spec("pop", format!("no pop entry for ({c}, {e}, {s})"))
                    })?;
                let source = self.base.source(e)?;
                if !self.controls_at(source).contains(target) {
                    return Err(Error::PopTargetNotInBoundary {
                        edge: e.clone(),
                        target: target.clone(),
                    });
                }
            }
        }
        for (c, e, s) in self.pop.keys() {
            let listed = self
                .pop_labels
                .get(&(c.clone(), e.clone()))
                .is_some_and(|set| set.contains(s));
            if !listed {
                return Err(Error::spec(
                    "pop",
                    format!("pop entry ({c}, {e}, {s}) has no matching pop label"),
                ));
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &DirectedGraph {
        &self.base
    }

    pub fn alphabet(&self) -> &BTreeSet<Symbol> {
        &self.alphabet
    }

    pub fn controls(&self) -> impl Iterator<Item = &ControlId> {
        self.anchor.keys()
    }

    pub fn controls_at(&self, v: &VertexId) -> &BTreeSet<ControlId> {
        static EMPTY: BTreeSet<ControlId> = BTreeSet::new();
        self.controls.get(v).unwrap_or(&EMPTY)
    }

    pub fn anchor_of(&self, c: &ControlId) -> Result<&VertexId> {
        self.anchor
            .get(c)
            .ok_or_else(|| Error::NoSuchControl(c.clone()))
    }

    /// `Σ⁺(U)`: the push labels of a control.
    pub fn push_labels_of(&self, c: &ControlId) -> &BTreeSet<Symbol> {
        static EMPTY: BTreeSet<Symbol> = BTreeSet::new();
        self.push_labels.get(c).unwrap_or(&EMPTY)
    }

    /// `Σ⁻_e(U)`: the pop labels of a control for one incoming stack edge.
    pub fn pop_labels_of(&self, c: &ControlId, e: &EdgeId) -> &BTreeSet<Symbol> {
        static EMPTY: BTreeSet<Symbol> = BTreeSet::new();
        self.pop_labels
            .get(&(c.clone(), e.clone()))
            .unwrap_or(&EMPTY)
    }

    /// `(π(U,σ), χ(U,σ))` for `σ ∈ Σ⁺(U)`.
    pub fn push_of(&self, c: &ControlId, s: &Symbol) -> Option<&(Path, ControlId)> {
        self.push.get(&(c.clone(), s.clone()))
    }

    /// `χ_e(U,σ)` for `σ ∈ Σ⁻_e(U)`.
    pub fn pop_of(&self, c: &ControlId, e: &EdgeId, s: &Symbol) -> Option<&ControlId> {
        self.pop.get(&(c.clone(), e.clone(), s.clone()))
    }

    pub fn pushes(&self) -> impl Iterator<Item = (&ControlId, &Symbol, &Path, &ControlId)> {
        self.push
            .iter()
            .map(|((c, s), (p, t))| (c, s, p, t))
    }

    pub fn pops(&self) -> impl Iterator<Item = (&ControlId, &EdgeId, &Symbol, &ControlId)> {
        self.pop.iter().map(|((c, e, s), t)| (c, e, s, t))
    }
}

/// Severity of a validation message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Info,
    Warning,
    Error,
}

/// Outcome of [`validate`]: one boolean per semantic condition plus
/// messages explaining every `false`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub condition_a: bool,
    pub condition_b: bool,
    pub condition_c: bool,
    pub hypothesis_h: bool,
    pub messages: Vec<(Severity, String)>,
}

impl ValidationReport {
    pub fn conditions_hold(&self) -> bool {
        self.condition_a && self.condition_b && self.condition_c
    }
}

/// Checks conditions (a), (b), (c) and hypothesis (h).
///
/// * (a): every control has a nonempty pop label set for every stack edge
///   ending at its anchor.
/// * (b): at every control the intersection of the pop label sets over all
///   incoming stack edges is empty. A control whose anchor has exactly one
///   incoming edge fails (b): the intersection over a singleton family is
///   the set itself, and by (a) it is nonempty.
/// * (c): distinct incoming stack edges at a control either have different
///   pop label sets, or some shared symbol pops them to different controls.
/// * (h): the pop label sets of distinct incoming stack edges at a control
///   are disjoint, which is exactly what makes the pop presentation
///   deterministic.
pub fn validate(spec: &AutomatonSpec) -> ValidationReport {
    let mut messages = Vec::new();
    let mut condition_a = true;
    let mut condition_b = true;
    let mut condition_c = true;
    let mut hypothesis_h = true;

    let mut every_anchor_has_two_incoming = true;

    for control in spec.controls() {
        let anchor = spec.anchor_of(control).expect("control has anchor");
        let incoming: Vec<EdgeId> = spec
            .base
            .in_edges(anchor)
            .expect("anchor in base")
            .into_iter()
            .collect();

        if incoming.len() < 2 {
            every_anchor_has_two_incoming = false;
        }

        for e in &incoming {
            if spec.pop_labels_of(control, e).is_empty() {
                condition_a = false;
                messages.push((
                    Severity::Error,
                    format!("condition (a): pop label set for ({control}, {e}) is empty"),
                ));
            }
        }

        if incoming.is_empty() {
            // no incoming stack edge at all: the intersection over an empty
            // family is everything, so (b) cannot hold
            condition_b = false;
            messages.push((
                Severity::Error,
                format!("condition (b): anchor {anchor} of {control} has no incoming stack edge"),
            ));
        } else {
            let mut common: BTreeSet<Symbol> =
                spec.pop_labels_of(control, &incoming[0]).clone();
            for e in &incoming[1..] {
                let set = spec.pop_labels_of(control, e);
                common = common.intersection(set).cloned().collect();
            }
            if !common.is_empty() {
                condition_b = false;
                let shared = common
                    .iter()
                    .map(|s| s.as_str())
                    .collect::<Vec<_>>()
                    .join(", ");
                let detail = if incoming.len() == 1 {
                    format!(
                        "condition (b): anchor {anchor} of {control} has a single incoming \
                         stack edge, so the intersection {{{shared}}} is nonempty"
                    )
                } else {
                    format!(
                        "condition (b): symbols {{{shared}}} pop every incoming stack edge \
                         at {control}"
                    )
                };
                messages.push((Severity::Error, detail));
            }
        }

        for (i, e) in incoming.iter().enumerate() {
            for e2 in &incoming[i + 1..] {
                let set1 = spec.pop_labels_of(control, e);
                let set2 = spec.pop_labels_of(control, e2);
                if !set1.is_disjoint(set2) {
                    hypothesis_h = false;
                    messages.push((
                        Severity::Error,
                        format!(
                            "hypothesis (h): pop label sets of {e} and {e2} at {control} overlap"
                        ),
                    ));
                }
                if set1 == set2 {
                    let separable = set1.iter().any(|s| {
                        spec.pop_of(control, e, s) != spec.pop_of(control, e2, s)
                    });
                    if !separable {
                        condition_c = false;
                        messages.push((
                            Severity::Error,
                            format!(
                                "condition (c): stack edges {e} and {e2} at {control} have \
                                 equal pop label sets and equal pop targets"
                            ),
                        ));
                    }
                }
            }
        }
    }

    // cross-check: pairwise disjoint nonempty pop sets over >= 2 incoming
    // edges have empty intersection
    if hypothesis_h && condition_a && every_anchor_has_two_incoming {
        debug_assert!(condition_b, "hypothesis (h) with >=2 incoming edges implies (b)");
    }

    ValidationReport {
        condition_a,
        condition_b,
        condition_c,
        hypothesis_h,
        messages,
    }
}

// ---------------------------------------------------------------------------
// JSON form
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct RawSpec {
    base: DirectedGraph,
    alphabet: Vec<Symbol>,
    controls: BTreeMap<VertexId, Vec<ControlId>>,
    push_labels: BTreeMap<ControlId, Vec<Symbol>>,
    pop_labels: Vec<RawPopLabels>,
    push: Vec<RawPush>,
    pop: Vec<RawPop>,
}

#[derive(Serialize, Deserialize)]
struct RawPopLabels {
    control: ControlId,
    edge: EdgeId,
    symbols: Vec<Symbol>,
}

#[derive(Serialize, Deserialize)]
struct RawPush {
    control: ControlId,
    symbol: Symbol,
    path: Vec<EdgeId>,
    target_control: ControlId,
}

#[derive(Serialize, Deserialize)]
struct RawPop {
    control: ControlId,
    edge: EdgeId,
    symbol: Symbol,
    target_control: ControlId,
}

impl Serialize for AutomatonSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let raw = RawSpec {
            base: self.base.clone(),
            alphabet: self.alphabet.iter().cloned().collect(),
            controls: self
                .controls
                .iter()
                .map(|(v, set)| (v.clone(), set.iter().cloned().collect()))
                .collect(),
            push_labels: self
                .push_labels
                .iter()
                .map(|(c, set)| (c.clone(), set.iter().cloned().collect()))
                .collect(),
            pop_labels: self
                .pop_labels
                .iter()
                .map(|((c, e), set)| RawPopLabels {
                    control: c.clone(),
                    edge: e.clone(),
                    symbols: set.iter().cloned().collect(),
                })
                .collect(),
            push: self
                .push
                .iter()
                .map(|((c, s), (p, t))| RawPush {
                    control: c.clone(),
                    symbol: s.clone(),
                    path: p.0.clone(),
                    target_control: t.clone(),
                })
                .collect(),
            pop: self
                .pop
                .iter()
                .map(|((c, e, s), t)| RawPop {
                    control: c.clone(),
                    edge: e.clone(),
                    symbol: s.clone(),
                    target_control: t.clone(),
                })
                .collect(),
        };
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AutomatonSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSpec::deserialize(deserializer)?;
        let spec = AutomatonSpec::new(
            raw.base,
            raw.alphabet.into_iter().collect(),
            raw.controls
                .into_iter()
                .map(|(v, cs)| (v, cs.into_iter().collect()))
                .collect(),
            raw.push_labels
                .into_iter()
                .map(|(c, ss)| (c, ss.into_iter().collect()))
                .collect(),
            raw.pop_labels
                .into_iter()
                .map(|p| ((p.control, p.edge), p.symbols.into_iter().collect()))
                .collect(),
            raw.push
                .into_iter()
                .map(|p| ((p.control, p.symbol), (Path(p.path), p.target_control)))
                .collect(),
            raw.pop
                .into_iter()
                .map(|p| ((p.control, p.edge, p.symbol), p.target_control))
                .collect(),
        )
        .map_err(serde::de::Error::custom)?;
        Ok(spec)
    }
}

/// Parses a spec from JSON, validating structure (schema, references,
/// push/pop disjointness, boundary membership of targets).
pub fn load_spec(text: &str) -> Result<AutomatonSpec> {
    serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))
}

/// Canonical JSON with sorted keys; `load_spec(save_spec(s)) == s`.
pub fn save_spec(spec: &AutomatonSpec) -> String {
    let value = serde_json::to_value(spec).expect("spec serializes");
    serde_json::to_string_pretty(&value).expect("value prints")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{build_dyck, clone_controls_fixture};

    #[test]
    fn dyck_2_satisfies_everything() {
        let spec = build_dyck(2).unwrap();
        let report = validate(&spec);
        assert!(report.condition_a, "{:?}", report.messages);
        assert!(report.condition_b);
        assert!(report.condition_c);
        assert!(report.hypothesis_h);
        assert!(report.messages.is_empty());
    }

    #[test]
    fn single_loop_fails_condition_b() {
        // card(D) = 1 cannot be built via build_dyck; assemble it by hand
        let base = DirectedGraph::from_edges([("d1", "v", "v")]);
        let spec = AutomatonSpec::new(
            base,
            ["p1", "q1"].map(Symbol::from).into_iter().collect(),
            BTreeMap::from([("v".into(), BTreeSet::from(["V".into()]))]),
            BTreeMap::from([("V".into(), BTreeSet::from(["p1".into()]))]),
            BTreeMap::from([(("V".into(), "d1".into()), BTreeSet::from(["q1".into()]))]),
            BTreeMap::from([(
                ("V".into(), "p1".into()),
                (Path(vec!["d1".into()]), "V".into()),
            )]),
            BTreeMap::from([(("V".into(), "d1".into(), "q1".into()), "V".into())]),
        )
        .unwrap();
        let report = validate(&spec);
        assert!(report.condition_a);
        assert!(!report.condition_b);
        assert!(report.condition_c); // no pair of distinct edges exists
    }

    #[test]
    fn clone_controls_fail_condition_c() {
        let spec = clone_controls_fixture();
        let report = validate(&spec);
        assert!(report.condition_a);
        assert!(!report.condition_b);
        assert!(!report.condition_c);
        assert!(!report.hypothesis_h);
        assert!(report
            .messages
            .iter()
            .any(|(_, m)| m.contains("condition (c)")));
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = build_dyck(2).unwrap();
        let text = save_spec(&spec);
        let reloaded = load_spec(&text).unwrap();
        assert_eq!(reloaded, spec);
        // canonical output is stable
        assert_eq!(save_spec(&reloaded), text);
    }

    #[test]
    fn load_rejects_pop_target_outside_boundary() {
        let spec = build_dyck(2).unwrap();
        let text = save_spec(&spec).replace(
            r#""edge": "d1",
      "symbol": "q1",
      "target_control": "V""#,
            r#""edge": "d1",
      "symbol": "q1",
      "target_control": "W""#,
        );
        assert_ne!(text, save_spec(&spec), "replacement must hit");
        let err = load_spec(&text).unwrap_err();
        assert!(
            err.to_string().contains("pop target not in boundary set"),
            "{err}"
        );
    }

    #[test]
    fn load_rejects_push_pop_overlap() {
        let spec = build_dyck(2).unwrap();
        // make q1 also a push label of V: overlap with the pop labels
        let text = save_spec(&spec).replace(
            r#""V": [
      "p1",
      "p2"
    ]"#,
            r#""V": [
      "p1",
      "p2",
      "q1"
    ]"#,
        );
        assert_ne!(text, save_spec(&spec), "replacement must hit");
        let err = load_spec(&text).unwrap_err();
        assert!(
            err.to_string().contains("push/pop label overlap")
                || err.to_string().contains("no push entry"),
            "{err}"
        );
    }

    use crate::testgen::random_spec;

    proptest::proptest! {
        #[test]
        fn random_specs_round_trip(seed in proptest::num::u64::ANY) {
            let spec = random_spec(seed);
            let text = save_spec(&spec);
            let reloaded = load_spec(&text).unwrap();
            proptest::prop_assert_eq!(&reloaded, &spec);
            // canonical form is a fixpoint
            proptest::prop_assert_eq!(save_spec(&reloaded), text);
            // validation is pure and deterministic
            proptest::prop_assert_eq!(validate(&spec), validate(&spec));
        }
    }

    #[test]
    fn control_under_two_vertices_rejected() {
        let base = DirectedGraph::from_edges([("e", "a", "b"), ("f", "b", "a")]);
        let result = AutomatonSpec::new(
            base,
            BTreeSet::new(),
            BTreeMap::from([
                ("a".into(), BTreeSet::from(["C".into()])),
                ("b".into(), BTreeSet::from(["C".into()])),
            ]),
            BTreeMap::new(),
            BTreeMap::new(),
            BTreeMap::new(),
            BTreeMap::new(),
        );
        assert!(result.is_err());
    }
}
