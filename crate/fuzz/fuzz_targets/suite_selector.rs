#![no_main]

use kernel_entropy::verifier::SuiteSelector;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(sel) = text.parse::<SuiteSelector>() {
        assert!(!sel.checks().is_empty());
        let joined: Vec<&str> = sel.checks().iter().map(|c| c.name()).collect();
        let again: SuiteSelector = joined.join(",").parse().expect("canonical selector parses");
        assert_eq!(again, sel);
    }
});
