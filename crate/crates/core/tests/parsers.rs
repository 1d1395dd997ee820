//! The fuzz-target properties, run on the checked-in seed corpus and on
//! random strings.

use std::fs;
use std::path::Path;

use proptest::prelude::*;

use h3nr::classfield::{h3_units_global, LocalData};
use h3nr::groups::parse_group_spec;
use h3nr::zlinalg::Int;

fn check_group_spec(s: &str) {
    let Ok(g) = parse_group_spec(s) else { return };
    let f = g.invariant_factors();
    assert!(f.iter().all(|&n| n >= 2));
    assert!(f.windows(2).all(|w| w[1] % w[0] == 0));
    if !f.is_empty() {
        let joined = f.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        assert_eq!(parse_group_spec(&joined).unwrap(), g);
    }
}

fn check_local_data(s: &str) {
    let Ok(d) = LocalData::from_json(s) else { return };
    assert!(d.validate().is_ok());
    let json = serde_json::to_string(&d).unwrap();
    assert_eq!(LocalData::from_json(&json).unwrap(), d);
    let h = h3_units_global(&d).unwrap();
    assert!(h.torsion.len() <= 1);
    assert!(h.torsion_order().divides(&Int::from(d.n)));
}

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, String::from_utf8_lossy(&fs::read(&p).unwrap()).into_owned())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn group_spec_seeds() {
    let s = seeds("group_spec");
    assert!(s.len() >= 5);
    for (_, text) in &s {
        check_group_spec(text);
    }
    let get = |name: &str| &s.iter().find(|(n, _)| n == name).unwrap().1;
    assert_eq!(parse_group_spec(get("unordered")).unwrap().invariant_factors(), &[3, 9]);
    assert_eq!(parse_group_spec(get("spaces")).unwrap().invariant_factors(), &[2, 2, 4]);
    assert!(parse_group_spec(get("trivial")).unwrap().invariant_factors().is_empty());
    for bad in ["zero", "empty_part", "overflow", "junk"] {
        assert!(parse_group_spec(get(bad)).is_err(), "{bad}");
    }
}

#[test]
fn local_data_seeds() {
    let s = seeds("local_data");
    assert!(s.len() >= 5);
    for (name, text) in &s {
        check_local_data(text);
        let ok = LocalData::from_json(text).is_ok();
        assert_eq!(ok, !["bad_degree", "zero", "unknown_field"].contains(&name.as_str()), "{name}");
    }
}

proptest! {
    #[test]
    fn group_spec_never_panics(s in "[0-9, ]{0,24}|\\PC{0,16}") {
        check_group_spec(&s);
    }

    #[test]
    fn local_data_never_panics(n in 0u64..100, degrees in proptest::collection::vec(0u64..100, 0..5), junk in "\\PC{0,8}") {
        let s = format!(r#"{{"n":{n},"local_degrees":{degrees:?}}}"#);
        check_local_data(&s);
        check_local_data(&junk);
        check_local_data(&s[..s.len() / 2]);
    }
}
