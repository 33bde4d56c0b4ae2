#![no_main]

use libfuzzer_sys::fuzz_target;
use stackshift::spec::{load_spec, save_spec, validate};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(spec) = load_spec(text) else {
        return;
    };
    // any spec the loader accepts must survive a canonical round trip and
    // a validation pass
    let canonical = save_spec(&spec);
    let reloaded = load_spec(&canonical).expect("canonical output reloads");
    assert_eq!(reloaded, spec);
    let _ = validate(&spec);
});
