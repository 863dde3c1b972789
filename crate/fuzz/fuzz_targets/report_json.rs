#![no_main]

use kernel_entropy::formats::parse_report_json;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(doc) = parse_report_json(text) {
        let json = doc.to_json().expect("serializing a parsed report");
        assert_eq!(parse_report_json(&json).expect("re-parsing"), doc);
    }
});
