#![no_main]

use h3nr::classfield::{h3_units_global, LocalData};
use h3nr::zlinalg::Int;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(d) = LocalData::from_json(s) else { return };
    assert!(d.validate().is_ok());
    let json = serde_json::to_string(&d).unwrap();
    assert_eq!(LocalData::from_json(&json).unwrap(), d);
    let h = h3_units_global(&d).unwrap();
    assert!(h.torsion.len() <= 1);
    assert!(h.torsion_order().divides(&Int::from(d.n)));
});
