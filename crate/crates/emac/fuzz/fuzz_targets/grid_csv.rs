#![no_main]

use libfuzzer_sys::fuzz_target;

// The grid CSV parser must reject or accept arbitrary input without
// panicking; accepted grids must round-trip through the renderer.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(grid) = emac::io::grid_from_csv(text) {
            let round = emac::io::grid_to_csv(&grid);
            emac::io::grid_from_csv(&round).expect("renderer output must parse");
        }
    }
});
