#![no_main]
use libfuzzer_sys::fuzz_target;
use netinfer_core::io::parse_instance;
use netinfer_core::reduction::encode_hitting_set;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(instance) = parse_instance(text) else { return };
    if instance.universe().len() + instance.budget() > 256 || instance.sets().len() > 256 {
        return;
    }
    let (m, layout) = encode_hitting_set(&instance);
    assert_eq!(m.n(), layout.n());
    assert_eq!(m.m(), instance.sets().len() + instance.budget() + 2);
    assert!(m.predictions().iter().all(|&c| c));
});
