//! Builders for the standard automaton families, each returning an
//! [`AutomatonSpec`], plus the fixtures used by the test suites.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Path};
use crate::ids::{ControlId, EdgeId, Symbol, VertexId};
use crate::spec::AutomatonSpec;

/// The golden-mean graph: vertices `u`, `w`; edges `e1: u->u`, `e2: u->w`,
/// `e3: w->u`.
pub fn golden_mean() -> DirectedGraph {
    DirectedGraph::from_edges([("e1", "u", "u"), ("e2", "u", "w"), ("e3", "w", "u")])
}

fn require_positive_degrees(g: &DirectedGraph, field: &str) -> Result<()> {
    if g.vertex_count() == 0 {
        return Err(Error::spec(field, "graph has no vertices"));
    }
    for v in g.vertices() {
        if g.in_degree(v)? == 0 || g.out_degree(v)? == 0 {
            return Err(Error::spec(
                field,
                format!("vertex {v} must have incoming and outgoing edges"),
            ));
        }
    }
    Ok(())
}

/// The Dyck automaton on `n >= 2` bracket pairs: one stack vertex with `n`
/// loops `d1..dn`, a single control `V`, pushes `p_i` and pops `q_i`.
pub fn build_dyck(n: usize) -> Result<AutomatonSpec> {
    if n < 2 {
        return Err(Error::Builder(format!(
            "the Dyck construction needs card(D) > 1 stack loops, got {n}"
        )));
    }
    let loops: Vec<EdgeId> = (1..=n).map(|i| EdgeId::new(format!("d{i}"))).collect();
    let base = DirectedGraph::new(
        ["v"],
        loops
            .iter()
            .map(|d| (d.clone(), VertexId::from("v"), VertexId::from("v"))),
    )?;
    let control = ControlId::from("V");

    let mut alphabet = BTreeSet::new();
    let mut push_labels = BTreeMap::new();
    let mut pop_labels = BTreeMap::new();
    let mut push = BTreeMap::new();
    let mut pop = BTreeMap::new();

    let mut pushes = BTreeSet::new();
    for (i, d) in loops.iter().enumerate() {
        let p = Symbol::new(format!("p{}", i + 1));
        let q = Symbol::new(format!("q{}", i + 1));
        alphabet.insert(p.clone());
        alphabet.insert(q.clone());
        pushes.insert(p.clone());
        push.insert(
            (control.clone(), p),
            (Path(vec![d.clone()]), control.clone()),
        );
        pop_labels.insert((control.clone(), d.clone()), BTreeSet::from([q.clone()]));
        pop.insert((control.clone(), d.clone(), q), control.clone());
    }
    push_labels.insert(control.clone(), pushes);

    AutomatonSpec::new(
        base,
        alphabet,
        BTreeMap::from([("v".into(), BTreeSet::from([control]))]),
        push_labels,
        pop_labels,
        push,
        pop,
    )
}

/// The product-style construction over an aperiodic control graph `h` and
/// `m` stack loops: controls are the vertices of `h`; pushes walk `h`
/// forward while pushing a chosen loop, pops re-read an edge leaving the
/// current control without moving it.
pub fn build_product(h: &DirectedGraph, m: usize) -> Result<AutomatonSpec> {
    require_positive_degrees(h, "product.h")?;
    if m == 0 {
        return Err(Error::Builder("product needs at least one stack loop".into()));
    }
    let loops: Vec<EdgeId> = (0..m).map(|i| EdgeId::new(format!("d{i}"))).collect();
    let base = DirectedGraph::new(
        ["v"],
        loops
            .iter()
            .map(|d| (d.clone(), VertexId::from("v"), VertexId::from("v"))),
    )?;

    let controls: BTreeSet<ControlId> = h.vertices().map(|v| ControlId::new(v.as_str())).collect();

    let mut alphabet = BTreeSet::new();
    let mut push_labels: BTreeMap<ControlId, BTreeSet<Symbol>> =
        controls.iter().map(|c| (c.clone(), BTreeSet::new())).collect();
    let mut pop_labels: BTreeMap<(ControlId, EdgeId), BTreeSet<Symbol>> = BTreeMap::new();
    let mut push = BTreeMap::new();
    let mut pop = BTreeMap::new();

    for (he, hs, ht) in h.edges() {
        for d in &loops {
            let minus = Symbol::new(format!("{he}-@{d}"));
            let plus = Symbol::new(format!("{he}+@{d}"));
            alphabet.insert(minus.clone());
            alphabet.insert(plus.clone());

            let src = ControlId::new(hs.as_str());
            let dst = ControlId::new(ht.as_str());
            push_labels.get_mut(&src).unwrap().insert(minus.clone());
            push.insert(
                (src.clone(), minus),
                (Path(vec![d.clone()]), dst),
            );
            pop_labels
                .entry((src.clone(), d.clone()))
                .or_default()
                .insert(plus.clone());
            pop.insert((src.clone(), d.clone(), plus), src);
        }
    }

    AutomatonSpec::new(
        base,
        alphabet,
        BTreeMap::from([("v".into(), controls)]),
        push_labels,
        pop_labels,
        push,
        pop,
    )
}

/// The Béal–Heller family: one control, one stack vertex, and for each key
/// `K` a push symbol `K-` that pushes the `I_K`-edge path
/// `d_K_1 .. d_K_IK` bottom-to-top, so pops happen in reverse index order
/// `K+IK, .., K+1`.
pub fn build_beal_heller(arities: &BTreeMap<String, usize>) -> Result<AutomatonSpec> {
    if arities.values().any(|&i| i == 0) {
        return Err(Error::Builder("every key needs arity at least 1".into()));
    }
    let total: usize = arities.values().sum();
    if total <= 1 {
        return Err(Error::Builder(format!(
            "the construction assumes the arities sum to more than 1, got {total}"
        )));
    }

    let mut edges = Vec::new();
    for (key, &arity) in arities {
        for i in 1..=arity {
            edges.push((
                EdgeId::new(format!("d_{key}_{i}")),
                VertexId::from("v"),
                VertexId::from("v"),
            ));
        }
    }
    let base = DirectedGraph::new(["v"], edges)?;
    let control = ControlId::from("V");

    let mut alphabet = BTreeSet::new();
    let mut pushes = BTreeSet::new();
    let mut pop_labels = BTreeMap::new();
    let mut push = BTreeMap::new();
    let mut pop = BTreeMap::new();

    for (key, &arity) in arities {
        let call = Symbol::new(format!("{key}-"));
        alphabet.insert(call.clone());
        pushes.insert(call.clone());
        let path: Vec<EdgeId> = (1..=arity)
            .map(|i| EdgeId::new(format!("d_{key}_{i}")))
            .collect();
        push.insert((control.clone(), call), (Path(path), control.clone()));
        for i in 1..=arity {
            let ret = Symbol::new(format!("{key}+{i}"));
            alphabet.insert(ret.clone());
            let d = EdgeId::new(format!("d_{key}_{i}"));
            pop_labels.insert((control.clone(), d.clone()), BTreeSet::from([ret.clone()]));
            pop.insert((control.clone(), d, ret), control.clone());
        }
    }

    AutomatonSpec::new(
        base,
        alphabet,
        BTreeMap::from([("v".into(), BTreeSet::from([control.clone()]))]),
        BTreeMap::from([(control, pushes)]),
        pop_labels,
        push,
        pop,
    )
}

/// A two-control automaton whose `V'`-states cannot be reached by pop-only
/// paths: every pop targets `V`, and `V'` (spelled `Vp`) is entered only by
/// an empty push from `V`.
///
/// The published tables for this example are internally inconsistent; this
/// is the minimal consistent completion that keeps the headline property.
pub fn build_example_84() -> AutomatonSpec {
    let base = DirectedGraph::from_edges([("d0", "v", "v"), ("d1", "v", "v")]);
    let v = ControlId::from("V");
    let vp = ControlId::from("Vp");

    let alphabet: BTreeSet<Symbol> = ["a0-", "a1-", "a0+", "a1+", "a"]
        .map(Symbol::from)
        .into_iter()
        .collect();

    let mut push = BTreeMap::new();
    push.insert(
        (v.clone(), Symbol::from("a0-")),
        (Path(vec!["d0".into()]), v.clone()),
    );
    push.insert(
        (v.clone(), Symbol::from("a1-")),
        (Path(vec!["d1".into()]), v.clone()),
    );
    push.insert((v.clone(), Symbol::from("a")), (Path::empty(), vp.clone()));

    let mut pop_labels = BTreeMap::new();
    let mut pop = BTreeMap::new();
    for (i, d) in ["d0", "d1"].into_iter().enumerate() {
        let ret = Symbol::new(format!("a{i}+"));
        for c in [&v, &vp] {
            pop_labels.insert(
                (c.clone(), EdgeId::from(d)),
                BTreeSet::from([ret.clone()]),
            );
            pop.insert((c.clone(), EdgeId::from(d), ret.clone()), v.clone());
        }
    }

    AutomatonSpec::new(
        base,
        alphabet,
        BTreeMap::from([("v".into(), BTreeSet::from([v.clone(), vp.clone()]))]),
        BTreeMap::from([
            (
                v,
                ["a0-", "a1-", "a"].map(Symbol::from).into_iter().collect(),
            ),
            (vp, BTreeSet::new()),
        ]),
        pop_labels,
        push,
        pop,
    )
    .expect("fixture is structurally valid")
}

/// The Markov-Dyck automaton of a finite graph `g` in which every vertex
/// has incoming and outgoing edges: the stack graph is `g` itself, with one
/// control per vertex; `e-` pushes the edge `e` and `e+` pops it.
pub fn build_markov_dyck(g: &DirectedGraph) -> Result<AutomatonSpec> {
    require_positive_degrees(g, "markov_dyck.g")?;

    let controls: BTreeMap<VertexId, BTreeSet<ControlId>> = g
        .vertices()
        .map(|v| (v.clone(), BTreeSet::from([ControlId::new(v.as_str())])))
        .collect();

    let mut alphabet = BTreeSet::new();
    let mut push_labels: BTreeMap<ControlId, BTreeSet<Symbol>> = g
        .vertices()
        .map(|v| (ControlId::new(v.as_str()), BTreeSet::new()))
        .collect();
    let mut pop_labels = BTreeMap::new();
    let mut push = BTreeMap::new();
    let mut pop = BTreeMap::new();

    for (e, s, t) in g.edges() {
        let minus = Symbol::new(format!("{e}-"));
        let plus = Symbol::new(format!("{e}+"));
        alphabet.insert(minus.clone());
        alphabet.insert(plus.clone());

        let src = ControlId::new(s.as_str());
        let dst = ControlId::new(t.as_str());
        push_labels.get_mut(&src).unwrap().insert(minus.clone());
        push.insert((src.clone(), minus), (Path(vec![e.clone()]), dst.clone()));
        pop_labels.insert((dst.clone(), e.clone()), BTreeSet::from([plus.clone()]));
        pop.insert((dst, e.clone(), plus), src);
    }

    AutomatonSpec::new(g.clone(), alphabet, controls, push_labels, pop_labels, push, pop)
}

/// Combines the Markov-Dyck construction over an irreducible graph `g` with
/// a control walk on an aperiodic graph `h`: controls are pairs `U@V`
/// (`U` from `h`, `V` from `g`); a push `(h-,e-)` pushes `e` and walks `h`
/// forward along `h`; a pop `(h+,e+)` pops `e` and walks `h` backward.
pub fn build_combined(g: &DirectedGraph, h: &DirectedGraph) -> Result<AutomatonSpec> {
    require_positive_degrees(g, "combined.g")?;
    require_positive_degrees(h, "combined.h")?;

    let pair = |hu: &VertexId, gv: &VertexId| ControlId::new(format!("{hu}@{gv}"));

    let controls: BTreeMap<VertexId, BTreeSet<ControlId>> = g
        .vertices()
        .map(|gv| {
            (
                gv.clone(),
                h.vertices().map(|hu| pair(hu, gv)).collect(),
            )
        })
        .collect();

    let mut alphabet = BTreeSet::new();
    let mut push_labels: BTreeMap<ControlId, BTreeSet<Symbol>> = controls
        .values()
        .flatten()
        .map(|c| (c.clone(), BTreeSet::new()))
        .collect();
    let mut pop_labels: BTreeMap<(ControlId, EdgeId), BTreeSet<Symbol>> = BTreeMap::new();
    let mut push = BTreeMap::new();
    let mut pop = BTreeMap::new();

    for (he, hs, ht) in h.edges() {
        for (ge, gs, gt) in g.edges() {
            let minus = Symbol::new(format!("{he}-@{ge}-"));
            let plus = Symbol::new(format!("{he}+@{ge}+"));
            alphabet.insert(minus.clone());
            alphabet.insert(plus.clone());

            // push from (s(h), s(e)) to (t(h), t(e)), pushing e
            let src = pair(hs, gs);
            let dst = pair(ht, gt);
            push_labels.get_mut(&src).unwrap().insert(minus.clone());
            push.insert((src, minus), (Path(vec![ge.clone()]), dst));

            // pop of e at (t(h), t(e)) back to (s(h), s(e))
            let at = pair(ht, gt);
            pop_labels
                .entry((at.clone(), ge.clone()))
                .or_default()
                .insert(plus.clone());
            pop.insert((at, ge.clone(), plus), pair(hs, gs));
        }
    }

    AutomatonSpec::new(g.clone(), alphabet, controls, push_labels, pop_labels, push, pop)
}

/// Two controls whose rows mirror each other: every push and pop at `U`
/// stays at `U`, and likewise for `U2`. Swapping the two controls is an
/// automorphism of the whole spec, so `(ε,U)` and `(ε,U2)` are bisimilar
/// and no word separates them, and no window of any radius can pin down
/// which of the two a path sits at. Conditions (b), (c) and hypothesis (h)
/// all fail.
pub fn clone_controls_fixture() -> AutomatonSpec {
    let base = DirectedGraph::from_edges([("d1", "v", "v"), ("d2", "v", "v")]);
    let u = ControlId::from("U");
    let u2 = ControlId::from("U2");
    let p = Symbol::from("p");
    let q = Symbol::from("q");

    let mut push = BTreeMap::new();
    let mut pop_labels = BTreeMap::new();
    let mut pop = BTreeMap::new();
    for c in [&u, &u2] {
        push.insert(
            (c.clone(), p.clone()),
            (Path(vec!["d1".into()]), c.clone()),
        );
        for d in ["d1", "d2"] {
            pop_labels.insert(
                (c.clone(), EdgeId::from(d)),
                BTreeSet::from([q.clone()]),
            );
            pop.insert((c.clone(), EdgeId::from(d), q.clone()), c.clone());
        }
    }

    AutomatonSpec::new(
        base,
        BTreeSet::from([p.clone(), q]),
        BTreeMap::from([("v".into(), BTreeSet::from([u.clone(), u2.clone()]))]),
        BTreeMap::from([
            (u, BTreeSet::from([p.clone()])),
            (u2, BTreeSet::from([p])),
        ]),
        pop_labels,
        push,
        pop,
    )
    .expect("fixture is structurally valid")
}

/// Two controls at separate stack vertices whose pop presentations are
/// loops carrying the same label `z`; the label map of the pop presentation
/// is not injective on bi-infinite paths.
pub fn duplicate_label_fixture() -> AutomatonSpec {
    let base = DirectedGraph::from_edges([("lx", "x", "x"), ("ly", "y", "y")]);
    let cx = ControlId::from("X");
    let cy = ControlId::from("Y");
    let z = Symbol::from("z");

    AutomatonSpec::new(
        base,
        ["z", "px", "py"].map(Symbol::from).into_iter().collect(),
        BTreeMap::from([
            ("x".into(), BTreeSet::from([cx.clone()])),
            ("y".into(), BTreeSet::from([cy.clone()])),
        ]),
        BTreeMap::from([
            (cx.clone(), BTreeSet::from(["px".into()])),
            (cy.clone(), BTreeSet::from(["py".into()])),
        ]),
        BTreeMap::from([
            ((cx.clone(), "lx".into()), BTreeSet::from([z.clone()])),
            ((cy.clone(), "ly".into()), BTreeSet::from([z.clone()])),
        ]),
        BTreeMap::from([
            (
                (cx.clone(), "px".into()),
                (Path(vec!["lx".into()]), cx.clone()),
            ),
            (
                (cy.clone(), "py".into()),
                (Path(vec!["ly".into()]), cy.clone()),
            ),
        ]),
        BTreeMap::from([
            ((cx.clone(), "lx".into(), z.clone()), cx),
            ((cy.clone(), "ly".into(), z), cy),
        ]),
    )
    .expect("fixture is structurally valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{load_spec, save_spec, validate};

    #[test]
    fn dyck_needs_two_loops() {
        let err = build_dyck(1).unwrap_err();
        assert!(err.to_string().contains("card(D) > 1"), "{err}");
        assert!(build_dyck(0).is_err());
    }

    #[test]
    fn dyck_3_has_alphabet_of_six() {
        let spec = build_dyck(3).unwrap();
        assert_eq!(spec.alphabet().len(), 6);
    }

    #[test]
    fn product_counts_symbols() {
        let spec = build_product(&golden_mean(), 2).unwrap();
        assert_eq!(spec.controls().count(), 2);
        assert_eq!(spec.alphabet().len(), 12);
        assert!(validate(&spec).conditions_hold());
    }

    #[test]
    fn product_with_one_loop_fails_condition_b() {
        let spec = build_product(&golden_mean(), 1).unwrap();
        let report = validate(&spec);
        assert!(report.condition_a);
        assert!(!report.condition_b);
    }

    #[test]
    fn product_over_one_vertex_control_graph_is_a_dyck_product() {
        use crate::engine::enumerate_language;
        use crate::ids::Word;
        // a single control loop contributes a trivial factor, leaving the
        // bracket structure of the stack loops
        let h = DirectedGraph::from_edges([("h", "x", "x")]);
        let product = build_product(&h, 2).unwrap();
        let dyck = build_dyck(2).unwrap();
        let rename = |w: &Word| -> Word {
            w.iter()
                .map(|s| match s.as_str() {
                    "h-@d0" => "p1".into(),
                    "h-@d1" => "p2".into(),
                    "h+@d0" => "q1".into(),
                    _ => "q2".into(),
                })
                .collect()
        };
        let product_words: std::collections::BTreeSet<Word> =
            enumerate_language(&product, 6)
                .unwrap()
                .iter()
                .map(rename)
                .collect();
        assert_eq!(product_words, enumerate_language(&dyck, 6).unwrap());
    }

    #[test]
    fn beal_heller_arity_checks() {
        assert!(build_beal_heller(&BTreeMap::from([("K".to_owned(), 1)])).is_err());
        assert!(build_beal_heller(&BTreeMap::from([("K".to_owned(), 2)])).is_ok());
        let two_keys = BTreeMap::from([("K".to_owned(), 1), ("L".to_owned(), 1)]);
        let spec = build_beal_heller(&two_keys).unwrap();
        assert_eq!(spec.alphabet().len(), 4);
        assert!(validate(&spec).conditions_hold());
    }

    #[test]
    fn beal_heller_pops_in_reverse_push_order() {
        use crate::engine::{run, PdaState};
        use crate::ids::word;
        let spec = build_beal_heller(&BTreeMap::from([("K".to_owned(), 2)])).unwrap();
        let boundary = PdaState::boundary("V");
        // the call pushes bottom-to-top, so returns come top-down
        let balanced = word(["K-", "K+2", "K+1"]);
        assert_eq!(
            run(&spec, &boundary, &balanced).unwrap(),
            Some(boundary.clone())
        );
        let wrong_order = word(["K-", "K+1"]);
        assert_eq!(run(&spec, &boundary, &wrong_order).unwrap(), None);
    }

    #[test]
    fn beal_heller_unit_arities_are_the_dyck_language() {
        use crate::engine::enumerate_language;
        use crate::ids::Word;
        use std::collections::BTreeSet;
        let two_keys = BTreeMap::from([("K".to_owned(), 1), ("L".to_owned(), 1)]);
        let bh = build_beal_heller(&two_keys).unwrap();
        let dyck = build_dyck(2).unwrap();
        // K ↦ bracket 1, L ↦ bracket 2
        let rename = |w: &Word| -> Word {
            w.iter()
                .map(|s| match s.as_str() {
                    "K-" => "p1".into(),
                    "K+1" => "q1".into(),
                    "L-" => "p2".into(),
                    _ => "q2".into(),
                })
                .collect()
        };
        let bh_words: BTreeSet<Word> = enumerate_language(&bh, 6)
            .unwrap()
            .iter()
            .map(rename)
            .collect();
        assert_eq!(bh_words, enumerate_language(&dyck, 6).unwrap());
    }

    #[test]
    fn markov_dyck_of_one_vertex_matches_dyck_shape() {
        let g = DirectedGraph::from_edges([("d1", "v", "v"), ("d2", "v", "v")]);
        let spec = build_markov_dyck(&g).unwrap();
        assert_eq!(spec.alphabet().len(), 4);
        assert!(validate(&spec).conditions_hold());
    }

    #[test]
    fn markov_dyck_single_loop_fails_condition_b() {
        let g = DirectedGraph::from_edges([("l", "v", "v")]);
        let spec = build_markov_dyck(&g).unwrap();
        assert!(!validate(&spec).condition_b);
    }

    #[test]
    fn markov_dyck_rejects_missing_degrees() {
        let g = DirectedGraph::from_edges([("e", "a", "b"), ("l", "b", "b")]);
        assert!(build_markov_dyck(&g).is_err());
    }

    #[test]
    fn combined_over_a_multi_loop_vertex_validates() {
        // the conditions_hold case needs every stack vertex to have at
        // least two incoming edges, as with a one-vertex two-loop G
        let g = DirectedGraph::from_edges([("d1", "v", "v"), ("d2", "v", "v")]);
        let spec = build_combined(&g, &golden_mean()).unwrap();
        assert!(validate(&spec).conditions_hold());
        assert_eq!(spec.controls().count(), 2);
    }

    #[test]
    fn combined_golden_mean_fails_b_at_single_incoming_vertices() {
        let spec = build_combined(&golden_mean(), &golden_mean()).unwrap();
        let report = validate(&spec);
        assert!(report.condition_a);
        assert!(!report.condition_b); // vertex w has one incoming edge
        assert!(report.condition_c);
        assert!(report.hypothesis_h);
        assert_eq!(spec.controls().count(), 4);
    }

    #[test]
    fn example_84_shape() {
        let spec = build_example_84();
        let report = validate(&spec);
        assert!(report.condition_a, "{:?}", report.messages);
        assert!(report.condition_b);
        assert!(report.condition_c);
        assert!(report.hypothesis_h);
        assert!(spec.push_labels_of(&"Vp".into()).is_empty());
        assert_eq!(
            spec.push_labels_of(&"V".into()),
            &["a", "a0-", "a1-"].map(Symbol::from).into_iter().collect()
        );
    }

    #[test]
    fn builders_round_trip_and_satisfy_condition_a() {
        let specs = vec![
            build_dyck(2).unwrap(),
            build_dyck(3).unwrap(),
            build_product(&golden_mean(), 2).unwrap(),
            build_beal_heller(&BTreeMap::from([("K".to_owned(), 2)])).unwrap(),
            build_example_84(),
            build_markov_dyck(&golden_mean()).unwrap(),
            build_combined(&golden_mean(), &golden_mean()).unwrap(),
            clone_controls_fixture(),
            duplicate_label_fixture(),
        ];
        for spec in specs {
            assert_eq!(load_spec(&save_spec(&spec)).unwrap(), spec);
            assert!(validate(&spec).condition_a);
        }
    }
}
