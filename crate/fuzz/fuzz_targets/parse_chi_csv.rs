#![no_main]

use hpsym_core::io::read_chi_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(chi) = read_chi_csv(data) {
        let total: f64 = chi.to_vec().iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
    }
});
