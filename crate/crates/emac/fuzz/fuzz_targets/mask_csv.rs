#![no_main]

use libfuzzer_sys::fuzz_target;

// The mask CSV parser must reject or accept arbitrary input without
// panicking; accepted masks must round-trip through the renderer.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cells) = emac::io::mask_from_csv(text) {
            let round = emac::io::mask_to_csv(&cells);
            emac::io::mask_from_csv(&round).expect("renderer output must parse");
        }
    }
});
