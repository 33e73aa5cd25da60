#![no_main]

use h4n_core::scalar::{CycField, CycScalar};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&order, rest)) = data.split_first() else { return };
    let field = CycField::new(2 * (u32::from(order) % 8 + 1)).unwrap();
    let Ok(v) = serde_json::from_slice::<serde_json::Value>(rest) else { return };
    if let Ok(s) = CycScalar::from_json_value(&field, &v) {
        let back = CycScalar::from_json_strings(&field, &s.to_json_strings()).unwrap();
        assert_eq!(back, s);
        if !s.is_zero() {
            assert!((&s * &s.inv().unwrap()).is_one());
        }
    }
});
