#![no_main]

use libfuzzer_sys::fuzz_target;
use nbrefute::certify::parse_certificate;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cert) = parse_certificate(text) {
        let again = parse_certificate(&cert.to_json()).expect("re-parse");
        assert_eq!(again.final_bound, cert.final_bound);
        assert_eq!(again.steps.len(), cert.steps.len());
    }
});
