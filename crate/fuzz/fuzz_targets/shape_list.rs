#![no_main]

use kernel_entropy::formats::parse_shape_list;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cs) = parse_shape_list(text) {
        assert!(!cs.is_empty());
        for c in cs {
            assert!(c == -1.0 || (c >= 0.0 && c.is_finite()), "accepted invalid shape {c}");
        }
    }
});
