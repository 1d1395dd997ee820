//! `H³(G, K*)` of a finite abelian extension from its local degrees.
//!
//! For a global extension the invariant maps identify `H³(G, K*)` with the
//! cokernel of `⊕_v (1/n_v)Z/Z → (1/n)Z/Z`, where `n_v` is the local degree
//! at `v`. For a local extension the group vanishes.

use serde::{Deserialize, Serialize};

use crate::zlinalg::{cokernel, FgAbGroup, Int, IntMatrix};
use crate::{Error, Result};

/// Degree of a global extension and the local degrees at finitely many
/// places; omitted places have local degree 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalData {
    pub n: u64,
    pub local_degrees: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl LocalData {
    pub fn new(n: u64, local_degrees: Vec<u64>) -> Result<Self> {
        let d = LocalData {
            n,
            local_degrees,
            labels: None,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("extension degree must be positive".into()));
        }
        if let Some(&bad) = self.local_degrees.iter().find(|&&d| d == 0 || self.n % d != 0) {
            return Err(Error::InvalidInput(format!(
                "local degree {bad} does not divide the extension degree {}",
                self.n
            )));
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.local_degrees.len() {
                return Err(Error::InvalidInput("labels and local degrees differ in length".into()));
            }
        }
        Ok(())
    }

    /// Parses and validates the JSON form `{"n": 9, "local_degrees": [3, 3, 1]}`.
    pub fn from_json(s: &str) -> Result<Self> {
        let d: LocalData =
            serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("bad local data: {e}")))?;
        d.validate()?;
        Ok(d)
    }
}

/// Cokernel of `⊕_v (1/n_v)Z/Z → (1/n)Z/Z`. In the generator `1/n` of
/// `(1/n)Z/Z ≅ Z/n` the image of `(1/n_v)Z/Z` is generated by `n/n_v`.
pub fn h3_units_global(data: &LocalData) -> Result<FgAbGroup> {
    data.validate()?;
    let mut rows = vec![vec![Int::from(data.n)]];
    rows.extend(data.local_degrees.iter().map(|&d| vec![Int::from(data.n / d)]));
    Ok(cokernel(&IntMatrix::from_rows(rows, 1)))
}

/// `H³(G, K*)` for an extension of local fields, which always vanishes.
pub fn h3_units_local() -> FgAbGroup {
    FgAbGroup::trivial()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;

    fn lcm_oracle(n: u64, degrees: &[u64]) -> FgAbGroup {
        let l = degrees.iter().fold(1u64, |a, &b| a.lcm(&b));
        FgAbGroup::cyclic(n / l)
    }

    #[test]
    fn examples() {
        let h = |n, d: &[u64]| h3_units_global(&LocalData::new(n, d.to_vec()).unwrap()).unwrap();
        assert!(h(9, &[9, 3, 1]).is_trivial());
        assert_eq!(h(9, &[3, 3, 1]), FgAbGroup::cyclic(3));
        assert_eq!(h(27, &[1, 3, 9]), FgAbGroup::cyclic(3));
        assert_eq!(h(4, &[2, 2, 1]), FgAbGroup::cyclic(2));
        assert_eq!(h(4, &[]), FgAbGroup::cyclic(4));
        assert!(h3_units_local().is_trivial());
    }

    #[test]
    fn json_parsing() {
        let d = LocalData::from_json(r#"{"n":9,"local_degrees":[3,3]}"#).unwrap();
        assert_eq!(d.local_degrees, vec![3, 3]);
        let d = LocalData::from_json(r#"{"n":9,"local_degrees":[3],"labels":["p7"]}"#).unwrap();
        assert_eq!(d.labels.unwrap(), vec!["p7".to_string()]);
        for bad in [
            r#"{"n":9,"local_degrees":[2]}"#,
            r#"{"n":0,"local_degrees":[]}"#,
            r#"{"n":9}"#,
            r#"{"n":9,"local_degrees":[3],"extra":1}"#,
            r#"{"n":9,"local_degrees":[3],"labels":[]}"#,
            r#"[1,2]"#,
            "",
        ] {
            assert!(matches!(LocalData::from_json(bad), Err(Error::InvalidInput(_))), "{bad}");
        }
    }

    proptest::proptest! {
        #[test]
        fn agrees_with_lcm_formula(n in 1u64..200, picks in proptest::collection::vec(0usize..16, 0..6)) {
            let divisors: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
            let degrees: Vec<u64> = picks.iter().map(|&i| divisors[i % divisors.len()]).collect();
            let got = h3_units_global(&LocalData::new(n, degrees.clone()).unwrap()).unwrap();
            proptest::prop_assert_eq!(&got, &lcm_oracle(n, &degrees));
            // order divides n; a place of full degree kills it; a split place changes nothing
            proptest::prop_assert!(got.torsion_order().divides(&Int::from(n)));
            let mut full = degrees.clone();
            full.push(n);
            proptest::prop_assert!(h3_units_global(&LocalData::new(n, full).unwrap()).unwrap().is_trivial());
            let mut split = degrees.clone();
            split.push(1);
            proptest::prop_assert_eq!(h3_units_global(&LocalData::new(n, split).unwrap()).unwrap(), got);
        }
    }
}
