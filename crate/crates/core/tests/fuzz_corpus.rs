//! Replays the checked-in fuzz seeds through the invariants the fuzz targets assert,
//! so the seeds stay meaningful on a stable toolchain.

use std::fs;
use std::path::PathBuf;

use kernel_entropy::formats::{parse_profile_csv, parse_report_json, parse_shape_list, profile_csv_string};
use kernel_entropy::verifier::SuiteSelector;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            (name, fs::read_to_string(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn profile_csv_seeds() {
    let mut accepted = 0;
    for (name, text) in seeds("profile_csv") {
        if let Ok(rows) = parse_profile_csv(&text) {
            accepted += 1;
            let canonical = profile_csv_string(&rows).unwrap();
            let reparsed = parse_profile_csv(&canonical).unwrap();
            assert_eq!(profile_csv_string(&reparsed).unwrap(), canonical, "{name}");
        }
    }
    assert!(accepted >= 3);
}

#[test]
fn suite_selector_seeds() {
    let mut outcomes = Vec::new();
    for (name, text) in seeds("suite_selector") {
        let parsed = text.parse::<SuiteSelector>();
        if let Ok(sel) = &parsed {
            let joined: Vec<&str> = sel.checks().iter().map(|c| c.name()).collect();
            assert_eq!(&joined.join(",").parse::<SuiteSelector>().unwrap(), sel, "{name}");
        }
        outcomes.push((name, parsed.is_ok()));
    }
    assert!(outcomes.iter().any(|o| o.1) && outcomes.iter().any(|o| !o.1));
}

#[test]
fn shape_list_seeds() {
    for (name, text) in seeds("shape_list") {
        match name.as_str() {
            "standard" | "single" => assert!(parse_shape_list(&text).is_ok(), "{name}"),
            _ => assert!(parse_shape_list(&text).is_err(), "{name}"),
        }
    }
}

#[test]
fn report_json_seeds() {
    let mut accepted = 0;
    for (name, text) in seeds("report_json") {
        if let Ok(doc) = parse_report_json(&text) {
            accepted += 1;
            assert_eq!(parse_report_json(&doc.to_json().unwrap()).unwrap(), doc, "{name}");
        }
    }
    assert_eq!(accepted, 2);
}
