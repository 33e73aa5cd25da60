#![no_main]

use h4n_core::algebra::{Algebra, AlgebraElement, Family};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    // first line selects the family, the rest is the element
    let (head, body) = s.split_once('\n').unwrap_or((s, ""));
    let Ok(family) = head.trim().parse::<Family>() else { return };
    let alg = Algebra::from_parts(family, 2, 1).unwrap();
    let Ok(v) = serde_json::from_str::<serde_json::Value>(body) else { return };
    if let Ok(u) = AlgebraElement::from_json(&alg, &v) {
        let back = AlgebraElement::from_json(&alg, &u.to_json()).unwrap();
        assert!(back.eq_elem(&u));
        let _ = u.mul(&u);
    }
});
