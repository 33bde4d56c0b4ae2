//! Resolving-word radius search, the tagging block map, and the export to
//! (and import from) finite-type-Dyck data for automata whose push paths
//! have length at most one.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Path};
use crate::ids::{ControlId, EdgeId, Symbol, VertexId, Word};
use crate::machine::{CtrlIx, IState, Machine};
use crate::spec::AutomatonSpec;

/// A successful radius search: every admissible word of length
/// `2 * radius + 1` pins the control its center symbol is read from, and
/// `centers` records that control per word.
///
/// Serializes with comma-joined words as keys, matching the CLI word
/// syntax.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvingReport {
    pub radius: usize,
    pub centers: BTreeMap<Word, ControlId>,
}

impl Serialize for ResolvingReport {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let centers: BTreeMap<String, &ControlId> = self
            .centers
            .iter()
            .map(|(w, c)| {
                let key = w.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(",");
                (key, c)
            })
            .collect();
        let mut out = serializer.serialize_struct("ResolvingReport", 2)?;
        out.serialize_field("radius", &self.radius)?;
        out.serialize_field("centers", &centers)?;
        out.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum RadiusSearch {
    Found(ResolvingReport),
    NotFound { cap: usize },
}

impl RadiusSearch {
    pub fn found(&self) -> Option<&ResolvingReport> {
        match self {
            RadiusSearch::Found(r) => Some(r),
            RadiusSearch::NotFound { .. } => None,
        }
    }
}

/// Tries to certify each radius `m = 0..=cap` in turn: every path labelled
/// by a word of length `2m+1`, from every start state of stack length at
/// most `2m+2` (deeper states behave identically over that many steps),
/// must read the center symbol from the same control.
pub fn resolving_radius(spec: &AutomatonSpec, cap: usize) -> RadiusSearch {
    let machine = Machine::compile(spec);
    'radius: for m in 0..=cap {
        let len = 2 * m + 1;
        let mut centers: BTreeMap<Vec<u16>, CtrlIx> = BTreeMap::new();
        for start in machine.states_with_stack_up_to(len + 1) {
            // depth-first over accepted words of the full window length,
            // remembering the control the position-m symbol is read from
            let mut stack: Vec<(IState, Vec<u16>, Option<CtrlIx>)> =
                vec![(start, Vec::new(), None)];
            while let Some((state, word, center)) = stack.pop() {
                let center = if word.len() == m {
                    Some(state.control)
                } else {
                    center
                };
                for sym in machine.acceptance(&state) {
                    let (next, _) = machine.step(&state, sym).expect("accepted");
                    let mut extended = word.clone();
                    extended.push(sym);
                    if extended.len() == len {
                        let center = center.expect("window is longer than its radius");
                        match centers.get(&extended) {
                            None => {
                                centers.insert(extended, center);
                            }
                            Some(&seen) if seen == center => {}
                            Some(_) => continue 'radius,
                        }
                    } else {
                        stack.push((next, extended, center));
                    }
                }
            }
        }
        return RadiusSearch::Found(ResolvingReport {
            radius: m,
            centers: centers
                .into_iter()
                .map(|(w, c)| {
                    (
                        machine.word_symbols(&w),
                        machine.control_ids[c as usize].clone(),
                    )
                })
                .collect(),
        });
    }
    RadiusSearch::NotFound { cap }
}

/// Tag of a symbol occurrence under the block map.
fn classify(spec: &AutomatonSpec, control: &ControlId, symbol: &Symbol) -> char {
    if spec.push_labels_of(control).contains(symbol) {
        match spec.push_of(control, symbol) {
            Some((path, _)) if path.is_empty() => 'i',
            _ => 'c',
        }
    } else {
        'r'
    }
}

fn tagged(symbol: &Symbol, tag: char) -> Symbol {
    Symbol::new(format!("{symbol}:{tag}"))
}

/// Applies the block map to a word with full windows available: positions
/// `radius..len-radius` are tagged `c` (push of a nonempty path), `i`
/// (push of the empty path) or `r` (pop) according to the control the
/// center window pins down.
pub fn apply_block_map(spec: &AutomatonSpec, report: &ResolvingReport, w: &[Symbol]) -> Result<Word> {
    let m = report.radius;
    if w.len() < 2 * m + 1 {
        return Err(Error::WindowNotAdmissible {
            want: 2 * m + 1,
            got: format!("word of length {}", w.len()),
        });
    }
    let mut out = Vec::new();
    for i in m..w.len() - m {
        let window = &w[i - m..=i + m];
        let control = report.centers.get(window).ok_or_else(|| {
            Error::WindowNotAdmissible {
                want: 2 * m + 1,
                got: window
                    .iter()
                    .map(|s| s.as_str())
                    .collect::<Vec<_>>()
                    .join(","),
            }
        })?;
        out.push(tagged(&w[i], classify(spec, control, &w[i])));
    }
    Ok(out)
}

/// The recoded automaton over the tagged alphabet: each push label becomes
/// `σ:c` or `σ:i` and each pop label `σ:r`, per control. Dropping tags is a
/// bijection on languages exactly when the radius search succeeds.
pub fn recode_spec(spec: &AutomatonSpec) -> AutomatonSpec {
    let mut alphabet = BTreeSet::new();
    let mut push_labels: BTreeMap<ControlId, BTreeSet<Symbol>> = BTreeMap::new();
    let mut pop_labels: BTreeMap<(ControlId, EdgeId), BTreeSet<Symbol>> = BTreeMap::new();
    let mut push = BTreeMap::new();
    let mut pop = BTreeMap::new();

    for (c, s, path, target) in spec.pushes() {
        let t = tagged(s, if path.is_empty() { 'i' } else { 'c' });
        alphabet.insert(t.clone());
        push_labels.entry(c.clone()).or_default().insert(t.clone());
        push.insert((c.clone(), t), (path.clone(), target.clone()));
    }
    for c in spec.controls() {
        push_labels.entry(c.clone()).or_default();
    }
    for (c, e, s, target) in spec.pops() {
        let t = tagged(s, 'r');
        alphabet.insert(t.clone());
        pop_labels
            .entry((c.clone(), e.clone()))
            .or_default()
            .insert(t.clone());
        pop.insert((c.clone(), e.clone(), t), target.clone());
    }

    let controls: BTreeMap<VertexId, BTreeSet<ControlId>> = spec
        .base()
        .vertices()
        .map(|v| (v.clone(), spec.controls_at(v).clone()))
        .collect();

    AutomatonSpec::new(
        spec.base().clone(),
        alphabet,
        controls,
        push_labels,
        pop_labels,
        push,
        pop,
    )
    .expect("tagging preserves structure")
}

/// Drops the `:tag` suffix added by [`recode_spec`] / [`apply_block_map`].
pub fn drop_tag(symbol: &Symbol) -> Symbol {
    match symbol.as_str().rsplit_once(':') {
        Some((base, _)) => Symbol::new(base),
        None => symbol.clone(),
    }
}

/// One edge of a deterministic Dyck automaton.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FtdEdge {
    pub source: ControlId,
    pub symbol: Symbol,
    pub target: ControlId,
}

/// A deterministic Dyck automaton: a finite graph over the controls, whose
/// edges split into push and pop edges, plus the set of matching pairs
/// (indices into the two edge lists).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteTypeDyckData {
    pub vertices: Vec<ControlId>,
    pub push_edges: Vec<FtdEdge>,
    pub pop_edges: Vec<FtdEdge>,
    pub matching: Vec<(usize, usize)>,
}

/// Exports the automaton as finite-type-Dyck data. Defined only when every
/// push path has length at most one: a push edge that pushes the stack
/// edge `d` matches every pop edge popping `d`.
pub fn export_finite_type_dyck(spec: &AutomatonSpec) -> Result<FiniteTypeDyckData> {
    for (c, s, path, _) in spec.pushes() {
        if path.len() > 1 {
            return Err(Error::NotFiniteTypeDyck {
                control: c.clone(),
                symbol: s.clone(),
                len: path.len(),
            });
        }
    }

    let vertices: Vec<ControlId> = spec.controls().cloned().collect();
    let mut push_edges = Vec::new();
    let mut pushed_edge: Vec<Option<EdgeId>> = Vec::new();
    for (c, s, path, target) in spec.pushes() {
        push_edges.push(FtdEdge {
            source: c.clone(),
            symbol: s.clone(),
            target: target.clone(),
        });
        pushed_edge.push(path.0.first().cloned());
    }
    let mut pop_edges = Vec::new();
    let mut popped_edge: Vec<EdgeId> = Vec::new();
    for (c, e, s, target) in spec.pops() {
        pop_edges.push(FtdEdge {
            source: c.clone(),
            symbol: s.clone(),
            target: target.clone(),
        });
        popped_edge.push(e.clone());
    }

    let mut matching = Vec::new();
    for (i, pushed) in pushed_edge.iter().enumerate() {
        if let Some(d) = pushed {
            for (j, popped) in popped_edge.iter().enumerate() {
                if popped == d {
                    matching.push((i, j));
                }
            }
        }
    }

    Ok(FiniteTypeDyckData {
        vertices,
        push_edges,
        pop_edges,
        matching,
    })
}

/// Rebuilds an automaton from finite-type-Dyck data: one stack vertex, one
/// stack loop per matched push edge, all vertices of the data as controls.
pub fn import_finite_type_dyck(data: &FiniteTypeDyckData) -> Result<AutomatonSpec> {
    if data.vertices.is_empty() {
        return Err(Error::spec("vertices", "no controls"));
    }
    for (i, j) in &data.matching {
        if *i >= data.push_edges.len() || *j >= data.pop_edges.len() {
            return Err(Error::spec("matching", format!("index pair ({i}, {j}) out of range")));
        }
    }
    let matched: BTreeSet<usize> = data.matching.iter().map(|(i, _)| *i).collect();
    let pop_matched: BTreeSet<usize> = data.matching.iter().map(|(_, j)| *j).collect();
    for j in 0..data.pop_edges.len() {
        if !pop_matched.contains(&j) {
            return Err(Error::spec(
                "matching",
                format!("pop edge {j} matches no push edge"),
            ));
        }
    }

    let loop_of = |i: usize| EdgeId::new(format!("s{i}"));
    let base = DirectedGraph::new(
        ["v"],
        matched
            .iter()
            .map(|&i| (loop_of(i), VertexId::from("v"), VertexId::from("v"))),
    )?;

    let mut alphabet = BTreeSet::new();
    let mut push_labels: BTreeMap<ControlId, BTreeSet<Symbol>> = data
        .vertices
        .iter()
        .map(|c| (c.clone(), BTreeSet::new()))
        .collect();
    let mut push = BTreeMap::new();
    for (i, e) in data.push_edges.iter().enumerate() {
        alphabet.insert(e.symbol.clone());
        let labels = push_labels
            .get_mut(&e.source)
            .ok_or_else(|| Error::NoSuchControl(e.source.clone()))?;
        if !labels.insert(e.symbol.clone()) {
            return Err(Error::spec(
                "push_edges",
                format!("duplicate push edge for ({}, {})", e.source, e.symbol),
            ));
        }
        let path = if matched.contains(&i) {
            Path(vec![loop_of(i)])
        } else {
            Path::empty()
        };
        push.insert((e.source.clone(), e.symbol.clone()), (path, e.target.clone()));
    }

    let mut pop_labels: BTreeMap<(ControlId, EdgeId), BTreeSet<Symbol>> = BTreeMap::new();
    let mut pop = BTreeMap::new();
    for (i, j) in &data.matching {
        let e = &data.pop_edges[*j];
        alphabet.insert(e.symbol.clone());
        pop_labels
            .entry((e.source.clone(), loop_of(*i)))
            .or_default()
            .insert(e.symbol.clone());
        let old = pop.insert(
            (e.source.clone(), loop_of(*i), e.symbol.clone()),
            e.target.clone(),
        );
        if old.is_some_and(|t| t != e.target) {
            return Err(Error::spec(
                "matching",
                format!("conflicting pop targets for ({}, {})", e.source, e.symbol),
            ));
        }
    }

    AutomatonSpec::new(
        base,
        alphabet,
        BTreeMap::from([("v".into(), data.vertices.iter().cloned().collect())]),
        push_labels,
        pop_labels,
        push,
        pop,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{
        build_beal_heller, build_dyck, build_example_84, build_markov_dyck,
        clone_controls_fixture, golden_mean,
    };
    use crate::ids::word;

    #[test]
    fn dyck_radius_is_zero() {
        let spec = build_dyck(2).unwrap();
        let report = resolving_radius(&spec, 4);
        let report = report.found().unwrap();
        assert_eq!(report.radius, 0);
        assert_eq!(report.centers.len(), 4);
        for control in report.centers.values() {
            assert_eq!(control, &ControlId::from("V"));
        }
    }

    #[test]
    fn markov_dyck_radius_is_zero() {
        // every signed edge symbol pins the control it is read from
        let spec = build_markov_dyck(&golden_mean()).unwrap();
        let report = resolving_radius(&spec, 2);
        assert_eq!(report.found().unwrap().radius, 0);
    }

    #[test]
    fn clone_controls_never_resolve() {
        let spec = clone_controls_fixture();
        assert_eq!(
            resolving_radius(&spec, 2),
            RadiusSearch::NotFound { cap: 2 }
        );
    }

    #[test]
    fn block_map_tags() {
        let spec = build_dyck(2).unwrap();
        let report = resolving_radius(&spec, 0).found().unwrap().clone();
        assert_eq!(
            apply_block_map(&spec, &report, &word(["p1", "q1"])).unwrap(),
            word(["p1:c", "q1:r"])
        );
        let ex84 = build_example_84();
        let report = resolving_radius(&ex84, 2).found().unwrap().clone();
        assert_eq!(report.radius, 1); // pops are ambiguous between V and Vp
        let tagged = apply_block_map(&ex84, &report, &word(["a0-", "a", "a0+"])).unwrap();
        assert_eq!(tagged, word(["a:i"]));
        assert!(apply_block_map(&ex84, &report, &word(["a"])).is_err());
    }

    #[test]
    fn export_dyck_matching() {
        let spec = build_dyck(2).unwrap();
        let data = export_finite_type_dyck(&spec).unwrap();
        assert_eq!(data.vertices, vec![ControlId::from("V")]);
        assert_eq!(data.push_edges.len(), 2);
        assert_eq!(data.pop_edges.len(), 2);
        let pairs: BTreeSet<(String, String)> = data
            .matching
            .iter()
            .map(|(i, j)| {
                (
                    data.push_edges[*i].symbol.to_string(),
                    data.pop_edges[*j].symbol.to_string(),
                )
            })
            .collect();
        assert_eq!(
            pairs,
            BTreeSet::from([
                ("p1".to_owned(), "q1".to_owned()),
                ("p2".to_owned(), "q2".to_owned())
            ])
        );
    }

    #[test]
    fn export_rejects_long_push_paths() {
        let spec =
            build_beal_heller(&BTreeMap::from([("K".to_owned(), 2)])).unwrap();
        assert!(matches!(
            export_finite_type_dyck(&spec),
            Err(Error::NotFiniteTypeDyck { len: 2, .. })
        ));
    }

    #[test]
    fn export_golden_mean_counts() {
        let spec = build_markov_dyck(&golden_mean()).unwrap();
        let data = export_finite_type_dyck(&spec).unwrap();
        assert_eq!(data.push_edges.len(), 3);
        assert_eq!(data.pop_edges.len(), 3);
        assert_eq!(data.matching.len(), 3);
        for (i, j) in &data.matching {
            // e- matches e+ for the same base edge
            let push = &data.push_edges[*i].symbol;
            let pop = &data.pop_edges[*j].symbol;
            assert_eq!(
                push.as_str().strip_suffix('-'),
                pop.as_str().strip_suffix('+')
            );
        }
    }

    #[test]
    fn import_round_trips_the_language() {
        for spec in [
            build_dyck(2).unwrap(),
            build_markov_dyck(&golden_mean()).unwrap(),
        ] {
            let data = export_finite_type_dyck(&spec).unwrap();
            let reimported = import_finite_type_dyck(&data).unwrap();
            let original = crate::engine::enumerate_language(&spec, 4).unwrap();
            let round_tripped = crate::engine::enumerate_language(&reimported, 4).unwrap();
            assert_eq!(original, round_tripped);
        }
    }

    #[test]
    fn recode_preserves_structure() {
        let spec = build_dyck(2).unwrap();
        let recoded = recode_spec(&spec);
        assert!(crate::spec::validate(&recoded).conditions_hold());
        let tagged_alphabet: BTreeSet<String> =
            recoded.alphabet().iter().map(|s| s.to_string()).collect();
        assert_eq!(
            tagged_alphabet,
            ["p1:c", "p2:c", "q1:r", "q2:r"]
                .map(str::to_owned)
                .into_iter()
                .collect()
        );
    }
}
