#![no_main]

use h4n_core::algebra::{Algebra, Family};
use h4n_core::representation::{decompose, Representation};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&sel, rest)) = data.split_first() else { return };
    let family = Family::ALL[usize::from(sel) % 4];
    let n = u32::from(sel >> 2) % 3 + 1;
    let alg = Algebra::from_parts(family, n, 1).unwrap();
    let Ok(v) = serde_json::from_slice::<serde_json::Value>(rest) else { return };
    let Ok(rep) = Representation::from_json(&alg, &v) else { return };
    assert_eq!(Representation::from_json(&alg, &rep.to_json()).unwrap(), rep);
    if rep.is_valid() && rep.dim() <= 12 {
        let d = decompose(&rep).unwrap();
        let total: usize = d.blocks.iter().map(|l| l.dim_in(family)).sum();
        assert_eq!(total, rep.dim());
    }
});
