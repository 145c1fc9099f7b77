#![no_main]
use libfuzzer_sys::fuzz_target;
use netinfer_core::io::parse_examples;
use netinfer_core::{waterfall, TieBreak, WaterfallConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(file) = parse_examples(text) else { return };
    let m = file.matching_transform().expect("validated examples always transform");
    assert_eq!(m.to_examples(), file.examples);
    if m.n() <= 16 && m.m() <= 64 {
        let result = waterfall(&m, &WaterfallConfig::majority(TieBreak::Filters)).unwrap();
        if let Some(f) = result.influencers() {
            assert!(netinfer_core::is_feasible(&m, f, netinfer_core::Protocol::MAJORITY));
        }
    }
});
