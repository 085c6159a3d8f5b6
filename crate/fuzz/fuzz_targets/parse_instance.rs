#![no_main]

use libfuzzer_sys::fuzz_target;
use nbrefute::instances::parse_instance;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(inst) = parse_instance(text) {
        // Accepted instances must survive a round trip.
        let again = parse_instance(&inst.to_json()).expect("re-parse");
        assert_eq!(again, inst);
    }
});
