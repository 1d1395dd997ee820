//! The assembled invariant: for an abelian extension with group
//! `G = C_1 ⊕ ... ⊕ C_m` (`#C_i | #C_{i+1}`) and any odd prime `p`,
//!
//! `H̄³_nr{p} ≅ H³(G, K*){p} ⊕ ⨁_{i=1}^{m-2} C_i{p}^{d_i}`, `d_i = (m-i)(m-i-1)/2`,
//!
//! together with the cross-checks that tie the lattice summand to cup
//! products, to `S²(T̂)^G/Dec` and to `H¹(G, N)`, and the unramified Brauer
//! group `H¹(G, T̂)`.

mod verify;

pub use verify::{table_groups, verify_all, Cell, VerifyOptions, VerifyReport};

use std::sync::Arc;

use serde::Serialize;

use crate::classfield::{h3_units_global, LocalData};
use crate::cohomres::{
    cohomology, cohomology_group, connecting_delta_invariant, cup_coker_2_2_4, ChainMap, Resolution,
};
use crate::decomp::s2_mod_dec;
use crate::glattice::{flasque_resolution, invariants_basis, norm_one_lattice, sym2_kernel_sequence, sym_product};
use crate::groups::{cyclic_subgroups, FinAbGroup, Group};
use crate::zlinalg::{hom_kernel, p_primary, prime_factors, FgAbGroup, Int, IntMatrix, SparseVec};
use crate::{Error, Result};

/// JSON form of a finitely generated abelian group:
/// `{"invariant_factors": [...]}`, plus `"free_rank"` when it is nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupJson {
    pub invariant_factors: Vec<Int>,
    #[serde(skip_serializing_if = "is_zero")]
    pub free_rank: usize,
}

fn is_zero(x: &usize) -> bool {
    *x == 0
}

impl From<&FgAbGroup> for GroupJson {
    fn from(g: &FgAbGroup) -> Self {
        GroupJson {
            invariant_factors: g.torsion.clone(),
            free_rank: g.free_rank,
        }
    }
}

impl From<FgAbGroup> for GroupJson {
    fn from(g: FgAbGroup) -> Self {
        GroupJson::from(&g)
    }
}

/// `⨁_{i=1}^{m-2} C_i^{d_i}` with `d_i = (m-i)(m-i-1)/2`.
pub fn closed_form_coker(g: &FinAbGroup) -> FgAbGroup {
    let f = g.invariant_factors();
    let m = f.len();
    let mut orders = Vec::new();
    for i in 1..=m.saturating_sub(2) {
        let d = (m - i) * (m - i - 1) / 2;
        orders.extend(std::iter::repeat(Int::from(f[i - 1])).take(d));
    }
    FgAbGroup::from_cyclic_orders(0, &orders)
}

/// `⨁_{i=1}^{m-1} H³(G_i, Z)` with `G_i = C_1 ⊕ ... ⊕ C_i`, each summand
/// computed from a resolution.
pub fn intermediate_form(g: &FinAbGroup) -> Result<FgAbGroup> {
    let f = g.invariant_factors();
    let mut total = FgAbGroup::trivial();
    for i in 1..f.len() {
        let gi = Arc::new(Group::from_cyclic_factors(&f[..i])?);
        let res = Resolution::product(&gi, 4)?;
        let z = crate::glattice::trivial_lattice(&gi, 1);
        total = total.direct_sum(&cohomology_group(&res, &z, 3)?);
    }
    Ok(total)
}

/// How the arithmetic summand `H³(G, K*)` enters the report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arithmetic {
    Local(LocalData),
    Supplied(FgAbGroup),
    Omitted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArithmeticSource {
    LocalData,
    Supplied,
    Omitted,
}

/// One summand of the report: the arithmetic part (absent when omitted),
/// the lattice part, their sum, and a readable expression.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Summand {
    pub arithmetic: Option<GroupJson>,
    pub lattice: GroupJson,
    pub total: Option<GroupJson>,
    pub expression: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimePart {
    pub p: u64,
    #[serde(flatten)]
    pub summand: Summand,
}

pub const TWO_PART_UNDETERMINED: &str = "undetermined-by-method";
pub const TWO_PART_TRIVIAL: &str = "trivial";

/// `H̄³_nr` of the norm-one torus, split into odd primary parts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct H3Report {
    /// canonical invariant factors of `G`
    pub group: Vec<u64>,
    pub order: u64,
    pub arithmetic_source: ArithmeticSource,
    /// one entry per odd prime dividing the order, ascending
    pub p_parts: Vec<PrimePart>,
    /// the whole group; present exactly when the order is odd
    pub full: Option<Summand>,
    pub two_part_status: &'static str,
    /// always null for even order
    pub two_part: Option<GroupJson>,
}

fn summand(arith: Option<&FgAbGroup>, lattice: FgAbGroup, label: &str) -> Summand {
    let expression = match arith {
        Some(a) => a.direct_sum(&lattice).to_string(),
        None if lattice.is_trivial() => format!("H^3(G,K*){label}"),
        None => format!("H^3(G,K*){label} + {lattice}"),
    };
    Summand {
        arithmetic: arith.map(GroupJson::from),
        total: arith.map(|a| GroupJson::from(a.direct_sum(&lattice))),
        lattice: GroupJson::from(lattice),
        expression,
    }
}

/// Assembles `H̄³_nr` from the arithmetic input and the closed-form lattice
/// summand.
pub fn unramified_h3(g: &FinAbGroup, arithmetic: &Arithmetic) -> Result<H3Report> {
    let n = u64::try_from(g.order()).map_err(|_| Error::InvalidInput("group order too large".into()))?;
    let (source, arith) = match arithmetic {
        Arithmetic::Local(d) => {
            if d.n != n {
                return Err(Error::InvalidInput(format!(
                    "local data has degree {} but the group has order {n}",
                    d.n
                )));
            }
            (ArithmeticSource::LocalData, Some(h3_units_global(d)?))
        }
        Arithmetic::Supplied(a) => {
            // a quotient of Z/n
            if !a.is_finite() || a.torsion.len() > 1 || !a.is_killed_by(&Int::from(n)) {
                return Err(Error::InvalidInput(format!(
                    "H^3(G,K*) = {a} is not a cyclic group of order dividing {n}"
                )));
            }
            (ArithmeticSource::Supplied, Some(a.clone()))
        }
        Arithmetic::Omitted => (ArithmeticSource::Omitted, None),
    };
    let lattice = closed_form_coker(g);
    let mut p_parts = Vec::new();
    for p in prime_factors(n).into_iter().filter(|&p| p != 2) {
        let a = arith.as_ref().map(|a| p_primary(a, p)).transpose()?;
        let l = p_primary(&lattice, p)?;
        p_parts.push(PrimePart {
            p,
            summand: summand(a.as_ref(), l, &format!("{{{p}}}")),
        });
    }
    let odd = n % 2 == 1;
    Ok(H3Report {
        group: g.invariant_factors().to_vec(),
        order: n,
        arithmetic_source: source,
        p_parts,
        full: odd.then(|| summand(arith.as_ref(), lattice, "")),
        two_part_status: if odd { TWO_PART_TRIVIAL } else { TWO_PART_UNDETERMINED },
        two_part: odd.then(|| GroupJson::from(FgAbGroup::trivial())),
    })
}

/// The unramified Brauer group `H¹(G, T̂)` computed twice: directly, and as
/// `Ш²_ω(Ŵ) = ker(H²(G, Ŵ) → ∏_{H cyclic} H²(H, Ŵ))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrauerRoutes {
    pub h1_flasque: FgAbGroup,
    pub sha_norm_one: FgAbGroup,
}

pub fn brauer_routes(g: &FinAbGroup) -> Result<BrauerRoutes> {
    let group = Arc::new(Group::abelian(g)?);
    let fr = flasque_resolution(&group)?;
    let res = Resolution::product(&group, 3)?;
    let h1_flasque = cohomology_group(&res, fr.t(), 1)?;
    let sha_norm_one = sha2_cyclic(&group, &res)?;
    Ok(BrauerRoutes { h1_flasque, sha_norm_one })
}

/// `H¹(G, T̂)`, failing if the `Ш²_ω(Ŵ)` route disagrees.
pub fn brauer_nr(g: &FinAbGroup) -> Result<FgAbGroup> {
    let r = brauer_routes(g)?;
    if r.h1_flasque != r.sha_norm_one {
        return Err(Error::Internal(format!(
            "H^1(G,T) = {} but Sha^2_cyclic(W) = {}",
            r.h1_flasque, r.sha_norm_one
        )));
    }
    Ok(r.h1_flasque)
}

/// Classes of `H²(G, Ŵ)` restricting to zero on every cyclic subgroup.
fn sha2_cyclic(group: &Arc<Group>, res: &Resolution) -> Result<FgAbGroup> {
    let (w, _) = norm_one_lattice(group)?;
    let h2 = cohomology(res, &w, 2)?;
    if h2.generators.is_empty() {
        return Ok(FgAbGroup::trivial());
    }
    let mut target_orders = Vec::new();
    let mut columns: Vec<Vec<Vec<Int>>> = Vec::new();
    for (sub, x) in cyclic_subgroups(group) {
        let k = sub.order();
        if k == 1 {
            continue;
        }
        let hgrp = Arc::new(Group::cyclic(k as u64)?);
        let emb: Vec<usize> = (0..k).map(|j| group.pow(x, j as u64)).collect();
        let hres = Resolution::product(&hgrp, 3)?;
        let psi = ChainMap::lift(&hres, res, &emb, 2)?;
        let wh = w.restrict(&hgrp, &emb);
        let hh = cohomology(&hres, &wh, 2)?;
        if hh.generators.is_empty() {
            continue;
        }
        let images = h2
            .generators
            .iter()
            .map(|f| hh.classify(&psi.pullback(res, &w, 2, f)))
            .collect::<Result<Vec<_>>>()?;
        target_orders.extend(hh.orders());
        columns.push(images);
    }
    if target_orders.is_empty() {
        return Ok(h2.group.clone());
    }
    let rows: Vec<Vec<Int>> = (0..h2.generators.len())
        .map(|i| columns.iter().flat_map(|c| c[i].iter().cloned()).collect())
        .collect();
    let map = IntMatrix::from_rows(rows, target_orders.len());
    hom_kernel(&h2.orders(), &target_orders, &map)
}

/// Both sides of `S²(T̂)^G/Dec ≅ H¹(G, N) / δ(products of T̂^G)`, where `N`
/// is the kernel of `S²P̂ → S²T̂` and `δ` its connecting map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecVsH1 {
    pub s2_mod_dec: FgAbGroup,
    pub h1_quotient: FgAbGroup,
}

pub fn dec_vs_h1n(g: &FinAbGroup) -> Result<DecVsH1> {
    let group = Arc::new(Group::abelian(g)?);
    let fr = flasque_resolution(&group)?;
    let s2_mod_dec = s2_mod_dec(fr.t())?;
    let nseq = sym2_kernel_sequence(&fr)?;
    let res = Resolution::product(&group, 2)?;
    let h1 = cohomology(&res, &nseq.a, 1)?;
    let rt = fr.t().rank();
    let inv = invariants_basis(fr.t());
    let basis: Vec<SparseVec> = (0..inv.rows()).map(|i| SparseVec::from_dense(inv.row(i))).collect();
    let mut classes = Vec::new();
    for k in 0..basis.len() {
        for l in k..basis.len() {
            let x = sym_product(rt, &basis[k], &basis[l]);
            classes.push(h1.classify(&connecting_delta_invariant(&res, &nseq, &x)?)?);
        }
    }
    Ok(DecVsH1 {
        s2_mod_dec,
        h1_quotient: h1.quotient_by(&classes),
    })
}

/// For each odd prime `p | #G`: the `p`-parts of `S²(T̂)^G/Dec` and of the
/// cup product cokernel.
pub fn odd_part_comparison(g: &FinAbGroup) -> Result<Vec<(u64, FgAbGroup, FgAbGroup)>> {
    let n = u64::try_from(g.order()).map_err(|_| Error::InvalidInput("group order too large".into()))?;
    let odd: Vec<u64> = prime_factors(n).into_iter().filter(|&p| p != 2).collect();
    if odd.is_empty() {
        return Ok(Vec::new());
    }
    let group = Arc::new(Group::abelian(g)?);
    let dec = s2_mod_dec(flasque_resolution(&group)?.t())?;
    let cup = cup_coker_2_2_4(g)?;
    odd.into_iter()
        .map(|p| Ok((p, p_primary(&dec, p)?, p_primary(&cup, p)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::parse_group_spec;

    fn g(s: &str) -> FinAbGroup {
        parse_group_spec(s).unwrap()
    }

    fn c(orders: &[u64]) -> FgAbGroup {
        FgAbGroup::from_u64(0, orders)
    }

    #[test]
    fn closed_form_examples() {
        assert!(closed_form_coker(&g("7")).is_trivial());
        assert!(closed_form_coker(&g("4,6")).is_trivial());
        assert_eq!(closed_form_coker(&g("3,3,3")), c(&[3]));
        assert_eq!(closed_form_coker(&g("2,2,4,4")), c(&[2, 2, 2, 2]));
        // m = 4: d_1 = 3, d_2 = 1
        assert_eq!(closed_form_coker(&g("2,6,6,6")), c(&[2, 2, 2, 6]));
    }

    #[test]
    fn intermediate_form_matches_closed_form() {
        for s in ["5", "2,2", "2,2,2", "3,3,3", "2,4,4", "2,2,2,2", "2,2,4,4"] {
            assert_eq!(intermediate_form(&g(s)).unwrap(), closed_form_coker(&g(s)), "{s}");
        }
    }

    #[test]
    fn report_examples() {
        let local = |n, d: &[u64]| Arithmetic::Local(LocalData::new(n, d.to_vec()).unwrap());
        let r = unramified_h3(&g("3,3"), &local(9, &[9, 3, 1])).unwrap();
        assert_eq!(r.full.unwrap().total, Some(GroupJson::from(FgAbGroup::trivial())));
        let r = unramified_h3(&g("3,3"), &local(9, &[3, 3, 1])).unwrap();
        assert_eq!(r.full.unwrap().total, Some(GroupJson::from(c(&[3]))));
        let r = unramified_h3(&g("3,3,3"), &local(27, &[1, 3, 9])).unwrap();
        assert_eq!(r.arithmetic_source, ArithmeticSource::LocalData);
        assert_eq!(r.full.unwrap().total, Some(GroupJson::from(c(&[3, 3]))));
        assert!(unramified_h3(&g("3,3"), &local(27, &[3])).is_err());
    }

    #[test]
    fn report_shape() {
        let r = unramified_h3(&g("2,6"), &Arithmetic::Supplied(c(&[6]))).unwrap();
        assert!(r.full.is_none() && r.two_part.is_none());
        assert_eq!(r.two_part_status, TWO_PART_UNDETERMINED);
        assert_eq!(r.p_parts.len(), 1);
        assert_eq!(r.p_parts[0].p, 3);
        assert_eq!(r.p_parts[0].summand.total, Some(GroupJson::from(c(&[3]))));
        let r = unramified_h3(&g("3,3,3"), &Arithmetic::Omitted).unwrap();
        let full = r.full.unwrap();
        assert!(full.total.is_none() && full.arithmetic.is_none());
        assert_eq!(full.expression, "H^3(G,K*) + Z/3");
        assert!(unramified_h3(&g("3"), &Arithmetic::Supplied(c(&[9]))).is_err());
        assert!(unramified_h3(&g("3,3"), &Arithmetic::Supplied(c(&[3, 3]))).is_err());
        // canonicalisation makes the report independent of the factor order
        let a = unramified_h3(&g("9,3,5"), &Arithmetic::Supplied(c(&[3]))).unwrap();
        let b = unramified_h3(&g("5,3,9"), &Arithmetic::Supplied(c(&[3]))).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn report_json() {
        let r = unramified_h3(&g("3,3"), &Arithmetic::Supplied(c(&[3]))).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["group"], serde_json::json!([3, 3]));
        assert_eq!(v["arithmetic_source"], "supplied");
        assert_eq!(v["full"]["total"], serde_json::json!({"invariant_factors": [3]}));
        assert_eq!(v["p_parts"][0]["p"], 3);
        assert_eq!(v["two_part_status"], TWO_PART_TRIVIAL);
    }

    proptest::proptest! {
        #[test]
        fn report_invariants(factors in proptest::collection::vec(2u64..10, 0..4), k in 0usize..8, shift in 0usize..4) {
            let gr = crate::groups::canonicalize_abelian(&factors).unwrap();
            let n = gr.order() as u64;
            let divisors: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
            let a = c(&[divisors[k % divisors.len()]]);
            let r = unramified_h3(&gr, &Arithmetic::Supplied(a.clone())).unwrap();
            proptest::prop_assert_eq!(r.full.is_some(), n % 2 == 1);
            proptest::prop_assert_eq!(r.two_part.is_none(), n % 2 == 0);
            let lattice = closed_form_coker(&gr);
            for part in &r.p_parts {
                let expected = p_primary(&a, part.p).unwrap().direct_sum(&p_primary(&lattice, part.p).unwrap());
                proptest::prop_assert_eq!(&part.summand.total, &Some(GroupJson::from(expected)));
            }
            let mut rotated = factors.clone();
            let len = rotated.len().max(1);
            rotated.rotate_left(shift % len);
            let again = unramified_h3(&crate::groups::canonicalize_abelian(&rotated).unwrap(), &Arithmetic::Supplied(a)).unwrap();
            proptest::prop_assert_eq!(r, again);
        }
    }

    #[test]
    fn brauer_small() {
        assert!(brauer_nr(&g("5")).unwrap().is_trivial());
        assert_eq!(brauer_nr(&g("2,2")).unwrap(), c(&[2]));
        assert_eq!(brauer_nr(&g("3,3")).unwrap(), c(&[3]));
        assert_eq!(brauer_nr(&g("2,4")).unwrap(), c(&[2]));
    }

    #[test]
    fn dec_matches_h1_of_n() {
        for s in ["3", "2,2", "2,4"] {
            let r = dec_vs_h1n(&g(s)).unwrap();
            assert_eq!(r.s2_mod_dec, r.h1_quotient, "{s}");
        }
    }
}
