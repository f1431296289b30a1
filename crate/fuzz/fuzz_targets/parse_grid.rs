#![no_main]

use hpsym_cli::grid::{parse_grid, parse_index_grid};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(g) = parse_grid(s) {
            assert!(!g.is_empty() && g.iter().all(|x| x.is_finite()));
        }
        let _ = parse_index_grid(s);
    }
});
