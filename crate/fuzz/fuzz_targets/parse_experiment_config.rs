#![no_main]
use libfuzzer_sys::fuzz_target;
use netinfer_core::io::parse_experiment_config;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(config) = parse_experiment_config(text) {
            assert_eq!(config.networks_per_cell % config.models.len(), 0);
        }
    }
});
