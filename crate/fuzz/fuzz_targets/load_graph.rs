#![no_main]

use libfuzzer_sys::fuzz_target;
use stackshift::graph::{load_graph, save_graph, trim_biinfinite};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(graph) = load_graph(text) else {
        return;
    };
    let canonical = save_graph(&graph);
    assert_eq!(load_graph(&canonical).expect("canonical reloads"), graph);

    let trimmed = trim_biinfinite(&graph);
    // trimming is shrinking and idempotent
    assert!(trimmed.vertex_count() <= graph.vertex_count());
    assert_eq!(trim_biinfinite(&trimmed), trimmed);
});
