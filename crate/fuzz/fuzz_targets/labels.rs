#![no_main]

use h4n_core::algebra::Family;
use h4n_core::representation::{parse_product, IndecLabel};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&sel, rest)) = data.split_first() else { return };
    let family = Family::ALL[usize::from(sel) % 4];
    let n = u32::from(sel >> 2) % 6 + 1;
    let Ok(s) = std::str::from_utf8(rest) else { return };
    if let Ok(l) = IndecLabel::parse(s, family, n) {
        assert!(l.is_valid_for(family, n));
        assert_eq!(IndecLabel::parse(&l.to_string(), family, n).unwrap(), l);
    }
    if let Ok(labels) = parse_product(s, family, n) {
        assert!(!labels.is_empty());
    }
});
