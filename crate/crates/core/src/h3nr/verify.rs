//! Runs the structural checks of the whole pipeline over all abelian
//! groups up to a given order (and optionally a few nonabelian table
//! groups), one record per (check, group) cell.

use std::sync::Arc;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use super::{brauer_routes, closed_form_coker, dec_vs_h1n, intermediate_form, odd_part_comparison};
use crate::cohomres::{cohomology_group, cup_coker_2_2_4, Resolution};
use crate::decomp::s2_mod_dec;
use crate::glattice::{
    direct_sum, flasque_resolution, n_sequence, permutation_lattice, phi_sequence, regular_lattice, sym2, wedge2,
};
use crate::groups::{abelian_groups_up_to, subgroups, FinAbGroup, Group, TableGroup};
use crate::zlinalg::Int;
use crate::Result;

/// Largest group order for which each check runs; beyond it the check is
/// not attempted (no cell is emitted).
const MAX_ORDER_DEC_H1: usize = 16;
const MAX_ORDER_PERMUTATION_PAIRS: usize = 27;

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub max_order: u64,
    pub include_table_groups: bool,
    /// Corrupt the first map of every `N`-sequence before verifying it.
    pub inject_fault: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub check: &'static str,
    pub group: String,
    pub order: usize,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub max_order: u64,
    pub passed: usize,
    pub failed: usize,
    pub all_passed: bool,
    pub cells: Vec<Cell>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Check {
    NSequence,
    PhiSequence,
    Flasque,
    RegularSquares,
    PermutationDec,
    DecH1,
    OddParts,
    ClosedForm,
    Brauer,
}

impl Check {
    fn name(self) -> &'static str {
        match self {
            Check::NSequence => "n-sequence-exact",
            Check::PhiSequence => "phi-sequence-exact",
            Check::Flasque => "flasque-resolution",
            Check::RegularSquares => "regular-squares-2-torsion",
            Check::PermutationDec => "permutation-dec-vanishes",
            Check::DecH1 => "dec-h1n-isomorphism",
            Check::OddParts => "odd-part-equivalence",
            Check::ClosedForm => "closed-form-equivalence",
            Check::Brauer => "brauer-routes",
        }
    }
}

#[derive(Clone, Debug)]
enum Subject {
    Abelian(FinAbGroup),
    Table(String, TableGroup),
}

impl Subject {
    fn label(&self) -> String {
        match self {
            Subject::Abelian(g) => {
                let f = g.invariant_factors();
                if f.is_empty() {
                    "1".into()
                } else {
                    f.iter().join(",")
                }
            }
            Subject::Table(name, _) => name.clone(),
        }
    }

    fn group(&self) -> Result<Group> {
        match self {
            Subject::Abelian(g) => Group::abelian(g),
            Subject::Table(name, t) => Ok(Group::from_table(t).with_name(name.clone())),
        }
    }
}

/// The nonabelian groups used by the checks that make sense for any
/// finite group.
pub fn table_groups() -> Vec<(String, TableGroup)> {
    let mut out = Vec::new();
    for (name, t) in [
        ("S3", TableGroup::symmetric(3)),
        ("D4", TableGroup::dihedral(4)),
        ("Q8", TableGroup::quaternion()),
        ("A4", TableGroup::alternating4()),
    ] {
        out.push((name.to_string(), t.expect("built-in table group")));
    }
    out
}

/// Runs every applicable check on every group and returns the cells sorted
/// by check, then order, then group label.
pub fn verify_all(opts: &VerifyOptions) -> VerifyReport {
    let mut tasks: Vec<(Check, Subject)> = Vec::new();
    for g in abelian_groups_up_to(opts.max_order, 4) {
        let n = g.order() as usize;
        if n < 2 {
            continue;
        }
        let mut checks = vec![
            Check::NSequence,
            Check::PhiSequence,
            Check::Flasque,
            Check::RegularSquares,
            Check::PermutationDec,
            Check::ClosedForm,
            Check::Brauer,
        ];
        if n <= MAX_ORDER_DEC_H1 {
            checks.push(Check::DecH1);
        }
        if n % 2 == 1 || n & (n - 1) != 0 {
            checks.push(Check::OddParts);
        }
        tasks.extend(checks.into_iter().map(|c| (c, Subject::Abelian(g.clone()))));
    }
    if opts.include_table_groups {
        for (name, t) in table_groups() {
            if t.order() as u64 <= opts.max_order {
                for c in [Check::PhiSequence, Check::RegularSquares] {
                    tasks.push((c, Subject::Table(name.clone(), t.clone())));
                }
            }
        }
    }
    let mut cells: Vec<Cell> = tasks
        .into_par_iter()
        .map(|(check, subject)| {
            let (passed, detail) = match run(check, &subject, opts) {
                Ok(r) => r,
                Err(e) => (false, e.to_string()),
            };
            let order = subject.group().map(|g| g.order()).unwrap_or(0);
            Cell {
                check: check.name(),
                group: subject.label(),
                order,
                passed,
                detail,
            }
        })
        .collect();
    cells.sort_by(|a, b| (a.check, a.order, &a.group).cmp(&(b.check, b.order, &b.group)));
    let passed = cells.iter().filter(|c| c.passed).count();
    VerifyReport {
        max_order: opts.max_order,
        passed,
        failed: cells.len() - passed,
        all_passed: passed == cells.len(),
        cells,
    }
}

fn run(check: Check, subject: &Subject, opts: &VerifyOptions) -> Result<(bool, String)> {
    let group = Arc::new(subject.group()?);
    let ab = match subject {
        Subject::Abelian(g) => Some(g),
        Subject::Table(..) => None,
    };
    match check {
        Check::NSequence => {
            let fr = flasque_resolution(&group)?;
            let mut ses = n_sequence(&fr)?;
            if opts.inject_fault {
                ses = ses.with_corrupted_first_map();
            }
            Ok(match ses.verify() {
                Ok(()) => (true, format!("ranks {} -> {} -> {}", ses.a.rank(), ses.b.rank(), ses.c.rank())),
                Err(e) => (false, e.to_string()),
            })
        }
        Check::PhiSequence => {
            let ses = phi_sequence(&group)?;
            ses.verify()?;
            Ok((true, format!("ranks {} -> {} -> {}", ses.a.rank(), ses.b.rank(), ses.c.rank())))
        }
        Check::Flasque => {
            let fr = flasque_resolution(&group)?;
            let ok = crate::glattice::is_flasque(fr.t())?;
            Ok((ok, format!("rank of T = {}", fr.t().rank())))
        }
        Check::RegularSquares => {
            let zg = regular_lattice(&group);
            let res = if ab.is_some() {
                Resolution::product(&group, 3)?
            } else {
                Resolution::bar(&group, 3)?
            };
            let two = Int::from(2);
            let mut parts = Vec::new();
            let mut ok = true;
            for (name, l) in [("S2", sym2(&zg)), ("L2", wedge2(&zg))] {
                for i in 1..=2 {
                    let h = cohomology_group(&res, &l, i)?;
                    ok &= h.is_killed_by(&two);
                    parts.push(format!("H{i}({name}) = {h}"));
                }
            }
            Ok((ok, parts.join("; ")))
        }
        Check::PermutationDec => {
            let lats = subgroups(&group)?
                .iter()
                .map(|h| permutation_lattice(&group, h))
                .collect::<Result<Vec<_>>>()?;
            let mut count = 0;
            for l in &lats {
                let q = s2_mod_dec(l)?;
                if !q.is_trivial() {
                    return Ok((false, format!("S2/Dec = {q} for a lattice of rank {}", l.rank())));
                }
                count += 1;
            }
            if group.order() <= MAX_ORDER_PERMUTATION_PAIRS {
                for i in 0..lats.len() {
                    for j in i..lats.len() {
                        let q = s2_mod_dec(&direct_sum(&lats[i], &lats[j])?)?;
                        if !q.is_trivial() {
                            return Ok((false, format!("S2/Dec = {q} for a sum of ranks {} and {}", lats[i].rank(), lats[j].rank())));
                        }
                        count += 1;
                    }
                }
            }
            Ok((true, format!("{count} permutation lattices")))
        }
        Check::DecH1 => {
            let g = ab.expect("abelian check");
            let r = dec_vs_h1n(g)?;
            Ok((r.s2_mod_dec == r.h1_quotient, format!("S2/Dec = {}; H1(N)/delta = {}", r.s2_mod_dec, r.h1_quotient)))
        }
        Check::OddParts => {
            let g = ab.expect("abelian check");
            let rows = odd_part_comparison(g)?;
            let ok = rows.iter().all(|(_, a, b)| a == b);
            let detail = rows.iter().map(|(p, a, b)| format!("p={p}: {a} vs {b}")).join("; ");
            Ok((ok, detail))
        }
        Check::ClosedForm => {
            let g = ab.expect("abelian check");
            let cup = cup_coker_2_2_4(g)?;
            let closed = closed_form_coker(g);
            let inter = intermediate_form(g)?;
            Ok((cup == closed && inter == closed, format!("cup {cup}; closed {closed}; intermediate {inter}")))
        }
        Check::Brauer => {
            let g = ab.expect("abelian check");
            let r = brauer_routes(g)?;
            Ok((r.h1_flasque == r.sha_norm_one, format!("H1(T) = {}; Sha2(W) = {}", r.h1_flasque, r.sha_norm_one)))
        }
    }
}
