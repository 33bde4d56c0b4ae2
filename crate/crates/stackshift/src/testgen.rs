//! Deterministic pseudo-random spec generation for property tests.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{DirectedGraph, Path};
use crate::ids::{ControlId, EdgeId, Symbol, VertexId};
use crate::spec::AutomatonSpec;

/// A structurally valid spec derived deterministically from a seed:
/// random base graph, controls, push walks and pop assignments.
pub(crate) fn random_spec(seed: u64) -> AutomatonSpec {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);

    let n_vertices = rng.random_range(1..=3usize);
    let vertices: Vec<VertexId> = (0..n_vertices)
        .map(|i| VertexId::new(format!("v{i}")))
        .collect();
    let n_edges = rng.random_range(1..=5usize);
    let edges: Vec<(EdgeId, VertexId, VertexId)> = (0..n_edges)
        .map(|i| {
            (
                EdgeId::new(format!("e{i}")),
                vertices[rng.random_range(0..n_vertices)].clone(),
                vertices[rng.random_range(0..n_vertices)].clone(),
            )
        })
        .collect();
    let base = DirectedGraph::new(vertices.clone(), edges).unwrap();

    let mut controls: BTreeMap<VertexId, BTreeSet<ControlId>> = BTreeMap::new();
    for (i, v) in vertices.iter().enumerate() {
        let count = rng.random_range(1..=2usize);
        controls.insert(
            v.clone(),
            (0..count)
                .map(|k| ControlId::new(format!("c{i}_{k}")))
                .collect(),
        );
    }
    let pick_control = |rng: &mut rand_chacha::ChaCha8Rng,
                        controls: &BTreeMap<VertexId, BTreeSet<ControlId>>,
                        at: &VertexId| {
        let set: Vec<&ControlId> = controls[at].iter().collect();
        set[rng.random_range(0..set.len())].clone()
    };

    let pool: Vec<Symbol> = (0..10).map(|i| Symbol::new(format!("a{i}"))).collect();
    let mut push_labels: BTreeMap<ControlId, BTreeSet<Symbol>> = BTreeMap::new();
    let mut pop_labels: BTreeMap<(ControlId, EdgeId), BTreeSet<Symbol>> = BTreeMap::new();
    let mut push = BTreeMap::new();
    let mut pop = BTreeMap::new();
    let mut alphabet = BTreeSet::new();

    let all_controls: Vec<(VertexId, ControlId)> = controls
        .iter()
        .flat_map(|(v, set)| set.iter().map(move |c| (v.clone(), c.clone())))
        .collect();
    for (anchor, control) in &all_controls {
        let mut pushes = BTreeSet::new();
        for _ in 0..rng.random_range(0..=2usize) {
            let symbol = pool[rng.random_range(0..pool.len())].clone();
            if !pushes.insert(symbol.clone()) {
                continue;
            }
            alphabet.insert(symbol.clone());
            // random walk from the anchor, truncated at dead ends
            let mut path = Vec::new();
            let mut at = anchor.clone();
            for _ in 0..rng.random_range(0..=2usize) {
                let out: Vec<EdgeId> = base.out_edges(&at).unwrap().into_iter().collect();
                if out.is_empty() {
                    break;
                }
                let e = out[rng.random_range(0..out.len())].clone();
                at = base.target(&e).unwrap().clone();
                path.push(e);
            }
            let target = pick_control(&mut rng, &controls, &at);
            push.insert((control.clone(), symbol), (Path(path), target));
        }
        let incoming = base.in_edges(anchor).unwrap();
        for e in incoming {
            let mut symbols = BTreeSet::new();
            for _ in 0..rng.random_range(0..=2usize) {
                let symbol = pool[rng.random_range(0..pool.len())].clone();
                if pushes.contains(&symbol) {
                    continue;
                }
                alphabet.insert(symbol.clone());
                symbols.insert(symbol.clone());
                let source = base.source(&e).unwrap().clone();
                let target = pick_control(&mut rng, &controls, &source);
                pop.insert((control.clone(), e.clone(), symbol), target);
            }
            if !symbols.is_empty() {
                pop_labels.insert((control.clone(), e.clone()), symbols);
            }
        }
        push_labels.insert(control.clone(), pushes);
    }

    AutomatonSpec::new(base, alphabet, controls, push_labels, pop_labels, push, pop)
        .expect("generated spec is structurally valid")
}


/// A spec satisfying conditions (a), (b), (c) and hypothesis (h) by
/// construction: one stack vertex with at least two loops, each loop
/// owning a disjoint nonempty pop label set per control.
pub(crate) fn random_dycklike_spec(seed: u64) -> AutomatonSpec {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);

    let n_loops = rng.random_range(2..=3usize);
    let n_controls = rng.random_range(1..=3usize);
    let loops: Vec<EdgeId> = (0..n_loops).map(|i| EdgeId::new(format!("d{i}"))).collect();
    let base = DirectedGraph::new(
        ["v"],
        loops
            .iter()
            .map(|d| (d.clone(), VertexId::from("v"), VertexId::from("v"))),
    )
    .unwrap();
    let controls: Vec<ControlId> = (0..n_controls)
        .map(|i| ControlId::new(format!("c{i}")))
        .collect();

    // each loop owns a slice of the pop pool, so pop label sets are
    // pairwise disjoint and nonempty per control; each pop symbol owns a
    // global target control, which makes short windows pin the terminal
    // control often enough for the visibility filters in the sweeps
    let pop_pool: Vec<Vec<Symbol>> = (0..n_loops)
        .map(|i| (0..3).map(|j| Symbol::new(format!("r{i}_{j}"))).collect())
        .collect();
    let pop_target: BTreeMap<Symbol, ControlId> = pop_pool
        .iter()
        .flatten()
        .map(|s| {
            (
                s.clone(),
                ControlId::new(format!("c{}", rng.random_range(0..n_controls))),
            )
        })
        .collect();
    let push_pool: Vec<Symbol> = (0..4).map(|i| Symbol::new(format!("x{i}"))).collect();

    let mut alphabet = BTreeSet::new();
    let mut push_labels: BTreeMap<ControlId, BTreeSet<Symbol>> = BTreeMap::new();
    let mut pop_labels = BTreeMap::new();
    let mut push = BTreeMap::new();
    let mut pop = BTreeMap::new();

    for control in &controls {
        let mut pushes = BTreeSet::new();
        for symbol in &push_pool {
            if rng.random_range(0..3usize) == 0 {
                continue;
            }
            pushes.insert(symbol.clone());
            alphabet.insert(symbol.clone());
            let len = rng.random_range(0..=1usize);
            let path: Vec<EdgeId> = (0..len)
                .map(|_| loops[rng.random_range(0..n_loops)].clone())
                .collect();
            let target = controls[rng.random_range(0..n_controls)].clone();
            push.insert((control.clone(), symbol.clone()), (Path(path), target));
        }
        push_labels.insert(control.clone(), pushes);

        for (i, d) in loops.iter().enumerate() {
            let count = rng.random_range(1..=pop_pool[i].len());
            let symbols: BTreeSet<Symbol> = pop_pool[i][..count].iter().cloned().collect();
            for symbol in &symbols {
                alphabet.insert(symbol.clone());
                pop.insert(
                    (control.clone(), d.clone(), symbol.clone()),
                    pop_target[symbol].clone(),
                );
            }
            pop_labels.insert((control.clone(), d.clone()), symbols);
        }
    }

    AutomatonSpec::new(
        base,
        alphabet,
        BTreeMap::from([(VertexId::from("v"), controls.into_iter().collect())]),
        push_labels,
        pop_labels,
        push,
        pop,
    )
    .expect("generated spec is structurally valid")
}
