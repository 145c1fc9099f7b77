#![no_main]
use libfuzzer_sys::fuzz_target;
use netinfer_core::io::{parse_transform_csv, write_transform_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_transform_csv(text) {
        let again = parse_transform_csv(&write_transform_csv(&m).unwrap()).unwrap();
        assert_eq!(again, m);
    }
});
