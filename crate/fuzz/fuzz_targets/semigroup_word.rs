#![no_main]

use libfuzzer_sys::fuzz_target;
use stackshift::examples::golden_mean;
use stackshift::semigroup::{semigroup_reduce, SignedEdge};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let mut word = Vec::new();
    for part in text.split(',') {
        match SignedEdge::parse(part) {
            Ok(signed) => word.push(signed),
            Err(_) => return,
        }
    }
    if word.is_empty() || word.len() > 16 {
        return;
    }
    let base = golden_mean();
    let Ok(product) = semigroup_reduce(&base, &word) else {
        return; // an unknown edge name
    };
    // reduction is deterministic and zero is absorbing
    assert_eq!(semigroup_reduce(&base, &word).unwrap(), product);
    if product.is_zero() {
        for extra in [SignedEdge::minus("e1"), SignedEdge::plus("e3")] {
            let mut longer = word.clone();
            longer.push(extra);
            assert!(semigroup_reduce(&base, &longer).unwrap().is_zero());
        }
    }
});
