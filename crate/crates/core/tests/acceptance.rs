//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use h3nr::classfield::LocalData;
use h3nr::cohomres::{
    bar_cup, cohomology, cohomology_group, cup, cup_coker_2_2_4, integer_pairing, ChainMap, DiagonalApprox,
    Resolution,
};
use h3nr::decomp::{dec_generators, qtr, s2_mod_dec};
use h3nr::glattice::{
    direct_sum, flasque_resolution, invariants_under, is_flasque, n_sequence, norm_one_lattice, permutation_lattice,
    phi_sequence, regular_lattice, sym2, trivial_lattice, wedge2, GLattice,
};
use h3nr::groups::{abelian_groups_up_to, canonicalize_abelian, parse_group_spec, subgroups, FinAbGroup, Group, TableGroup};
use h3nr::h3nr::{brauer_nr, brauer_routes, closed_form_coker, dec_vs_h1n, unramified_h3, Arithmetic};
use h3nr::zlinalg::{p_primary, prime_factors, FgAbGroup, Int, SparseVec};

type Outcome = Result<String, String>;

fn g(s: &str) -> FinAbGroup {
    parse_group_spec(s).unwrap()
}

fn label(g: &FinAbGroup) -> String {
    g.invariant_factors().iter().join(",")
}

fn grp(g: &FinAbGroup) -> Arc<Group> {
    Arc::new(Group::abelian(g).unwrap())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

/// All abelian groups of order at most 81 with at most four invariant
/// factors, together with Z/2+Z/2+Z/4+Z/4 (already among them).
fn main_corpus() -> Vec<FinAbGroup> {
    let mut v: Vec<FinAbGroup> = abelian_groups_up_to(81, 4).into_iter().filter(|g| g.order() > 1).collect();
    v.push(canonicalize_abelian(&[2, 2, 4, 4]).unwrap());
    v.sort();
    v.dedup();
    v
}

/// Groups on which the symmetric-square machinery runs in memory: every
/// abelian group of order at most 16 plus the odd groups used for the
/// cup product comparison.
fn small_corpus() -> Vec<FinAbGroup> {
    let mut v: Vec<FinAbGroup> = abelian_groups_up_to(16, 4).into_iter().filter(|g| g.order() > 1).collect();
    v.extend(["3,9", "3,3,3", "5,5"].map(g));
    v.sort();
    v.dedup();
    v
}

fn comparison_groups() -> Vec<FinAbGroup> {
    ["3", "3,3", "3,9", "3,3,3", "5,5", "15", "2,2", "2,4"].map(g).to_vec()
}

/// Independent count: the cokernel has one copy of `C_i` for every triple
/// `i < j < k` of factor positions.
fn triple_count_oracle(g: &FinAbGroup) -> FgAbGroup {
    let f = g.invariant_factors();
    let orders: Vec<u64> = (0..f.len()).combinations(3).map(|t| f[t[0]]).collect();
    FgAbGroup::from_u64(0, &orders)
}

fn criterion_1() -> Outcome {
    let corpus = main_corpus();
    for gr in &corpus {
        let cup = cup_coker_2_2_4(gr).map_err(e)?;
        let closed = closed_form_coker(gr);
        let oracle = triple_count_oracle(gr);
        ensure(cup == closed && closed == oracle, || {
            format!("G = {}: cup {cup}, closed form {closed}, triple count {oracle}", label(gr))
        })?;
    }
    Ok(format!("{} groups", corpus.len()))
}

fn criterion_2() -> Outcome {
    let cases = [
        ("3,3", 9, vec![9, 3, 1], FgAbGroup::trivial()),
        ("3,3", 9, vec![3, 3, 1, 1], FgAbGroup::cyclic(3)),
        ("3,3,3", 27, vec![1, 3, 9, 3], FgAbGroup::from_u64(0, &[3, 3])),
    ];
    for (spec, n, degrees, expected) in cases {
        let data = LocalData::new(n, degrees.clone()).map_err(e)?;
        let report = unramified_h3(&g(spec), &Arithmetic::Local(data)).map_err(e)?;
        let full = report.full.ok_or("missing full group for odd order")?;
        ensure(full.total == Some(expected.clone().into()), || {
            format!("G = {spec}, degrees {degrees:?}: got {}, expected {expected}", full.expression)
        })?;
    }
    Ok("examples 0, Z/3, (Z/3)^2".into())
}

fn criterion_3() -> Outcome {
    let mut compared = Vec::new();
    for gr in comparison_groups() {
        let group = grp(&gr);
        let dec = s2_mod_dec(flasque_resolution(&group).map_err(e)?.t()).map_err(e)?;
        let cup = cup_coker_2_2_4(&gr).map_err(e)?;
        let odd: Vec<u64> = prime_factors(gr.order() as u64).into_iter().filter(|&p| p != 2).collect();
        for p in &odd {
            let (a, b) = (p_primary(&dec, *p).map_err(e)?, p_primary(&cup, *p).map_err(e)?);
            ensure(a == b, || format!("G = {}, p = {p}: Dec side {a}, cup side {b}", label(&gr)))?;
        }
        compared.push(format!("{}:{}", label(&gr), if odd.is_empty() { "no odd p".into() } else { odd.iter().join("/") }));
    }
    Ok(compared.join(" "))
}

fn regular_squares_killed_by_two(group: &Arc<Group>, res: &Resolution) -> Result<(), String> {
    let zg = regular_lattice(group);
    let two = Int::from(2);
    for (name, l) in [("S2", sym2(&zg)), ("L2", wedge2(&zg))] {
        for i in 1..=2 {
            let h = cohomology_group(res, &l, i).map_err(e)?;
            ensure(h.is_killed_by(&two), || format!("{}: H{i}({name} Z[G]) = {h}", group.name()))?;
        }
    }
    Ok(())
}

fn criterion_4() -> Outcome {
    let abelian: Vec<FinAbGroup> = abelian_groups_up_to(27, 4).into_iter().filter(|g| g.order() > 1).collect();
    for gr in &abelian {
        let group = grp(gr);
        regular_squares_killed_by_two(&group, &Resolution::product(&group, 3).map_err(e)?)?;
    }
    let tables = [
        ("S3", TableGroup::symmetric(3)),
        ("D4", TableGroup::dihedral(4)),
        ("Q8", TableGroup::quaternion()),
    ];
    for (name, t) in tables {
        let group = Arc::new(Group::from_table(&t.map_err(e)?).with_name(name));
        ensure(!group.is_abelian(), || format!("{name} is abelian"))?;
        regular_squares_killed_by_two(&group, &Resolution::bar(&group, 3).map_err(e)?)?;
    }
    Ok(format!("{} abelian groups, S3, D4, Q8", abelian.len()))
}

fn permutation_lattices(group: &Arc<Group>) -> Result<Vec<GLattice>, String> {
    subgroups(group)
        .map_err(e)?
        .iter()
        .map(|h| permutation_lattice(group, h).map_err(e))
        .collect()
}

fn criterion_5() -> Outcome {
    let mut singles = 0;
    for gr in main_corpus() {
        for l in permutation_lattices(&grp(&gr))? {
            let q = s2_mod_dec(&l).map_err(e)?;
            ensure(q.is_trivial(), || format!("G = {}: S2/Dec = {q} for rank {}", label(&gr), l.rank()))?;
            singles += 1;
        }
    }
    let mut pairs = 0;
    for gr in small_corpus() {
        let lats = permutation_lattices(&grp(&gr))?;
        for (a, b) in lats.iter().tuple_combinations().chain(lats.iter().map(|l| (l, l))) {
            let q = s2_mod_dec(&direct_sum(a, b).map_err(e)?).map_err(e)?;
            ensure(q.is_trivial(), || {
                format!("G = {}: S2/Dec = {q} for a sum of ranks {} and {}", label(&gr), a.rank(), b.rank())
            })?;
            pairs += 1;
        }
    }
    Ok(format!("{singles} lattices Z[G/H] over the main corpus, {pairs} pairwise sums over the small corpus"))
}

fn criterion_6() -> Outcome {
    let corpus = main_corpus();
    for gr in &corpus {
        let group = grp(gr);
        let fr = flasque_resolution(&group).map_err(e)?;
        ensure(is_flasque(fr.t()).map_err(e)?, || format!("G = {}: T is not flasque", label(gr)))?;
        n_sequence(&fr).and_then(|s| s.verify()).map_err(|x| format!("G = {}: {x}", label(gr)))?;
        phi_sequence(&group).and_then(|s| s.verify()).map_err(|x| format!("G = {}: {x}", label(gr)))?;
    }
    Ok(format!("{} groups", corpus.len()))
}

fn criterion_7() -> Outcome {
    let groups: Vec<FinAbGroup> = abelian_groups_up_to(8, 4).into_iter().filter(|g| g.order() > 1).collect();
    let mut cup_checks = 0;
    for gr in &groups {
        let group = grp(gr);
        let small = Resolution::product(&group, 5).map_err(e)?;
        let bar = Resolution::bar(&group, 5).map_err(e)?;
        let (w, _) = norm_one_lattice(&group).map_err(e)?;
        let t = flasque_resolution(&group).map_err(e)?.t().clone();
        let z = trivial_lattice(&group, 1);
        for (name, l) in [("Z", &z), ("Z[G]", &regular_lattice(&group)), ("W", &w), ("T", &t)] {
            for i in 0..=4 {
                let a = cohomology_group(&small, l, i).map_err(e)?;
                let b = cohomology_group(&bar, l, i).map_err(e)?;
                ensure(a == b, || format!("G = {}: H{i}({name}) small {a}, bar {b}", label(gr)))?;
            }
        }
        // transport classes small -> bar -> small and compare the cups
        let identity: Vec<usize> = (0..group.order()).collect();
        let to_small = ChainMap::lift(&bar, &small, &identity, 4).map_err(e)?;
        let to_bar = ChainMap::lift(&small, &bar, &identity, 4).map_err(e)?;
        let diag = DiagonalApprox::new(&small, 4).map_err(e)?;
        let h2 = cohomology(&small, &z, 2).map_err(e)?;
        let h4 = cohomology(&small, &z, 4).map_err(e)?;
        let pairing = integer_pairing();
        for (x, y) in h2.generators.iter().cartesian_product(&h2.generators) {
            let small_cup = cup(&small, &diag, (2, x, &z), (2, y, &z), &pairing).map_err(e)?;
            let bx = to_small.pullback(&small, &z, 2, x);
            let by = to_small.pullback(&small, &z, 2, y);
            let bar_product = bar_cup(&bar, (2, &bx, &z), (2, &by, &z), &pairing).map_err(e)?;
            let back = to_bar.pullback(&bar, &z, 4, &bar_product);
            let (c1, c2) = (h4.classify(&small_cup).map_err(e)?, h4.classify(&back).map_err(e)?);
            ensure(c1 == c2, || format!("G = {}: cup classes {c1:?} vs {c2:?}", label(gr)))?;
            cup_checks += 1;
        }
    }
    Ok(format!("{} groups, 4 coefficient lattices, degrees 0..4, {cup_checks} cup pairs", groups.len()))
}

fn criterion_8() -> Outcome {
    for n in [2u64, 3, 4, 6] {
        let b = brauer_nr(&canonicalize_abelian(&[n, n]).unwrap()).map_err(e)?;
        ensure(b == FgAbGroup::cyclic(n), || format!("(Z/{n})^2: got {b}"))?;
    }
    let corpus = main_corpus();
    for gr in &corpus {
        let r = brauer_routes(gr).map_err(e)?;
        ensure(r.h1_flasque == r.sha_norm_one, || {
            format!("G = {}: H1(T) = {}, Sha2(W) = {}", label(gr), r.h1_flasque, r.sha_norm_one)
        })?;
    }
    Ok(format!("(Z/n)^2 for n = 2,3,4,6; routes agree on {} groups", corpus.len()))
}

fn criterion_9() -> Outcome {
    let mut out = Vec::new();
    for spec in ["2,2", "3,3", "2,4"] {
        let r = dec_vs_h1n(&g(spec)).map_err(e)?;
        ensure(r.s2_mod_dec == r.h1_quotient, || {
            format!("G = {spec}: S2/Dec = {}, H1(N)/delta = {}", r.s2_mod_dec, r.h1_quotient)
        })?;
        out.push(format!("{spec}: {}", r.s2_mod_dec));
    }
    Ok(out.join("; "))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51_7e_d0);
    let corpus = small_corpus();
    for gr in &corpus {
        let group = grp(gr);
        let t = flasque_resolution(&group).map_err(e)?.t().clone();
        let dec = dec_generators(&t).map_err(e)?;
        let subs = subgroups(&group).map_err(e)?;
        let bases: Vec<Vec<SparseVec>> = subs
            .iter()
            .map(|h| {
                let m = invariants_under(&t, h.elements());
                (0..m.rows()).map(|i| SparseVec::from_dense(m.row(i))).collect()
            })
            .collect();
        for trial in 0..200 {
            let k = rng.gen_range(0..subs.len());
            let mut a = SparseVec::new();
            for b in &bases[k] {
                a = a.add_scaled(b, &Int::from(rng.gen_range(-3i64..=3)));
            }
            let q = qtr(&t, &subs[k], &a).map_err(e)?;
            ensure(dec.contains(&q).map_err(e)?, || {
                format!("G = {}, trial {trial}: Qtr over a subgroup of order {} not in Dec", label(gr), subs[k].order())
            })?;
        }
    }
    Ok(format!("200 trials on each of {} groups", corpus.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("cup cokernel equals the closed formula", criterion_1),
        ("worked examples of the unramified H3", criterion_2),
        ("odd parts: S2(T)^G/Dec vs cup cokernel", criterion_3),
        ("H1, H2 of S2 Z[G] and L2 Z[G] killed by 2", criterion_4),
        ("S2/Dec vanishes on permutation lattices", criterion_5),
        ("flasqueness and exact sequences", criterion_6),
        ("small resolution agrees with bar resolution", criterion_7),
        ("unramified Brauer group, two routes", criterion_8),
        ("S2(T)^G/Dec vs H1(G,N)/delta", criterion_9),
        ("Qtr samples lie in the generated Dec", criterion_10),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({detail}) [{secs:.1}s]", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
