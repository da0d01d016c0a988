#![no_main]

use libfuzzer_sys::fuzz_target;

// The JSON signal parser must reject or accept arbitrary input without
// panicking; accepted signals must round-trip through the serializer.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(signal) = emac::io::signal_from_json(text) {
            let round = emac::io::signal_to_json(&signal);
            emac::io::signal_from_json(&round).expect("serializer output must parse");
        }
    }
});
