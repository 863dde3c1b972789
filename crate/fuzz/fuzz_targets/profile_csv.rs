#![no_main]

use kernel_entropy::formats::{parse_profile_csv, profile_csv_string};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rows) = parse_profile_csv(text) {
        // anything accepted must serialize to a canonical form that is a fixed point
        let canonical = profile_csv_string(&rows).expect("serializing parsed rows");
        let reparsed = parse_profile_csv(&canonical).expect("canonical CSV parses");
        assert_eq!(profile_csv_string(&reparsed).unwrap(), canonical);
    }
});
