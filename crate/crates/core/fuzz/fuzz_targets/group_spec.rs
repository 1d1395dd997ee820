#![no_main]

use h3nr::groups::parse_group_spec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(g) = parse_group_spec(s) else { return };
    let f = g.invariant_factors();
    assert!(f.iter().all(|&n| n >= 2));
    assert!(f.windows(2).all(|w| w[1] % w[0] == 0));
    // the canonical form parses back to itself
    if !f.is_empty() {
        let again = parse_group_spec(&f.iter().map(u64::to_string).collect::<Vec<_>>().join(",")).unwrap();
        assert_eq!(again, g);
    }
});
