#![no_main]
use libfuzzer_sys::fuzz_target;
use netinfer_core::io::{parse_influencers, parse_layout};
use netinfer_core::reduction::decode_feasible_set;

// layout JSON and influencer JSON separated by a NUL byte
fuzz_target!(|data: &[u8]| {
    let Some(split) = data.iter().position(|&b| b == 0) else { return };
    let (Ok(layout), Ok(set)) = (std::str::from_utf8(&data[..split]), std::str::from_utf8(&data[split + 1..])) else {
        return;
    };
    let (Ok(layout), Ok(set)) = (parse_layout(layout), parse_influencers(set)) else { return };
    if let Ok(chosen) = decode_feasible_set(&set, &layout) {
        assert_eq!(chosen.len(), layout.budget);
    }
});
