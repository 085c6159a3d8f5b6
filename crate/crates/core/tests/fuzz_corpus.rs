//! Replays the checked-in fuzz seeds through the same properties the fuzz
//! targets assert.

use std::fs;
use std::path::PathBuf;

use nbrefute::certify::parse_certificate;
use nbrefute::instances::{fourier_decompose, parse_instance, parse_predicate};

fn seeds(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut files: Vec<_> = fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert!(!files.is_empty(), "no seeds in {}", dir.display());
    files.into_iter().map(|p| fs::read_to_string(p).unwrap()).collect()
}

#[test]
fn instance_seeds() {
    let mut accepted = 0;
    for text in seeds("parse_instance") {
        if let Ok(inst) = parse_instance(&text) {
            assert_eq!(parse_instance(&inst.to_json()).unwrap(), inst);
            accepted += 1;
        }
    }
    assert!(accepted >= 2);
}

#[test]
fn certificate_seeds() {
    let mut accepted = 0;
    for text in seeds("parse_certificate") {
        if let Ok(cert) = parse_certificate(&text) {
            assert_eq!(parse_certificate(&cert.to_json()).unwrap(), cert);
            accepted += 1;
        }
    }
    assert!(accepted >= 2);
}

#[test]
fn predicate_seeds() {
    for text in seeds("parse_predicate") {
        if let Ok(table) = parse_predicate(&text) {
            assert_eq!(fourier_decompose(&table).unwrap().reconstruct(), table);
        }
    }
}
