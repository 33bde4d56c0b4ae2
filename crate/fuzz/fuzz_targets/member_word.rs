#![no_main]

use libfuzzer_sys::fuzz_target;
use stackshift::engine::member;
use stackshift::examples::build_dyck;
use stackshift::ids::Symbol;
use stackshift::semigroup::{semigroup_admissible, SignedEdge};

// Differential target: membership in the Dyck language must agree with the
// graph inverse semigroup oracle on every word, and foreign symbols must
// error instead of panicking.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let spec = build_dyck(2).unwrap();
    let word: Vec<Symbol> = if text.is_empty() {
        Vec::new()
    } else {
        text.split(',').map(Symbol::new).collect()
    };
    if word.len() > 10 {
        return; // keep single runs fast
    }
    match member(&spec, &word) {
        Err(_) => {} // foreign symbol
        Ok(is_member) => {
            let to_edge = |s: &Symbol| -> SignedEdge {
                match s.as_str() {
                    "p1" => SignedEdge::minus("d1"),
                    "p2" => SignedEdge::minus("d2"),
                    "q1" => SignedEdge::plus("d1"),
                    _ => SignedEdge::plus("d2"),
                }
            };
            let signed: Vec<SignedEdge> = word.iter().map(to_edge).collect();
            let oracle = semigroup_admissible(spec.base(), &signed).unwrap();
            assert_eq!(is_member, oracle, "word {word:?}");

            // factoriality: members only have member subwords
            if is_member && !word.is_empty() {
                assert!(member(&spec, &word[1..]).unwrap());
                assert!(member(&spec, &word[..word.len() - 1]).unwrap());
            }
        }
    }
});
