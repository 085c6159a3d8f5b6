#![no_main]

use libfuzzer_sys::fuzz_target;
use nbrefute::instances::{fourier_decompose, parse_predicate};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(table) = parse_predicate(text) {
        if table.len() <= 1 << 10 {
            let f = fourier_decompose(&table).expect("valid table");
            assert_eq!(f.reconstruct(), table);
        }
    }
});
