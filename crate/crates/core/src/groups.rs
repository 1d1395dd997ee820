//! Finite groups: abelian groups by invariant factors and general groups by
//! multiplication table, with subgroup enumeration and coset
//! representatives.
//!
//! Every group is materialised as a [`Group`] with full multiplication and
//! inverse tables; element `0` is always the identity. Elements of an
//! abelian group `Z/n_1 ⊕ ... ⊕ Z/n_m` are tuples `(a_1, ..., a_m)`, indexed
//! lexicographically with `a_1` most significant.

use std::collections::BTreeSet;
use std::fmt;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::zlinalg::{FgAbGroup, HermiteBasis, Int};
use crate::{Error, Result};

/// Largest abelian group accepted by [`subgroups`].
pub const MAX_ABELIAN_SUBGROUP_ORDER: usize = 512;
/// Largest table group accepted by [`subgroups`].
pub const MAX_TABLE_SUBGROUP_ORDER: usize = 24;
/// Largest group that is materialised with multiplication tables.
pub const MAX_GROUP_ORDER: usize = 1 << 16;

/// Finite abelian group given by invariant factors `n_1 | n_2 | ... | n_m`,
/// each at least 2.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FinAbGroup {
    invariant_factors: Vec<u64>,
}

impl FinAbGroup {
    pub fn trivial() -> Self {
        FinAbGroup {
            invariant_factors: Vec::new(),
        }
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        canonicalize_abelian(&[n])
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.invariant_factors
    }

    /// Number of invariant factors `m`.
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    pub fn order(&self) -> u128 {
        self.invariant_factors.iter().map(|&n| n as u128).product()
    }

    pub fn exponent(&self) -> u64 {
        self.invariant_factors.last().copied().unwrap_or(1)
    }

    pub fn to_fg(&self) -> FgAbGroup {
        FgAbGroup::from_u64(0, &self.invariant_factors)
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.invariant_factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.invariant_factors.iter().map(|n| format!("Z/{n}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Invariant factors of `⊕ Z/factors[i]`.
pub fn canonicalize_abelian(factors: &[u64]) -> Result<FinAbGroup> {
    if let Some(bad) = factors.iter().find(|&&n| n < 2) {
        return Err(Error::InvalidInput(format!("cyclic factor {bad} is smaller than 2")));
    }
    let fg = FgAbGroup::from_u64(0, factors);
    let invariant_factors = fg
        .torsion
        .iter()
        .map(|t| t.to_u64().ok_or_else(|| Error::InvalidInput("group order too large".into())))
        .collect::<Result<_>>()?;
    Ok(FinAbGroup { invariant_factors })
}

/// Parses a group spec: comma-separated positive integers such as `"3,9"`.
/// Factors equal to 1 are dropped, so `"1"` is the trivial group.
pub fn parse_group_spec(spec: &str) -> Result<FinAbGroup> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(Error::InvalidInput("empty group spec".into()));
    }
    let mut factors = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        let n: u64 = part
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad cyclic factor {part:?}")))?;
        if n == 0 {
            return Err(Error::InvalidInput("cyclic factors must be positive".into()));
        }
        if n > 1 {
            factors.push(n);
        }
    }
    let mut order: u128 = 1;
    for &n in &factors {
        order = order
            .checked_mul(n as u128)
            .filter(|&o| o <= u64::MAX as u128)
            .ok_or_else(|| Error::InvalidInput("group order too large".into()))?;
    }
    canonicalize_abelian(&factors)
}

/// All abelian groups of order `n` with at most `max_rank` invariant
/// factors, ordered by their invariant factors.
pub fn abelian_groups_of_order(n: u64, max_rank: usize) -> Vec<FinAbGroup> {
    fn chains(n: u64, min: u64, slots: usize, acc: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        // acc holds the factors from the largest down; each divides the previous
        if n == 1 {
            let mut f = acc.clone();
            f.reverse();
            out.push(f);
            return;
        }
        if slots == 0 {
            return;
        }
        let bound = acc.last().copied().unwrap_or(n);
        for d in min..=n.min(bound) {
            if n % d == 0 && acc.last().map_or(true, |&l| l % d == 0) {
                acc.push(d);
                chains(n / d, 2, slots - 1, acc, out);
                acc.pop();
            }
        }
    }
    if n == 1 {
        return vec![FinAbGroup::trivial()];
    }
    let mut out = Vec::new();
    chains(n, 2, max_rank, &mut Vec::new(), &mut out);
    let mut groups: Vec<FinAbGroup> = out
        .into_iter()
        .filter(|f| f.windows(2).all(|w| w[1] % w[0] == 0))
        .map(|f| FinAbGroup { invariant_factors: f })
        .collect();
    groups.sort_by(|a, b| a.invariant_factors.cmp(&b.invariant_factors));
    groups.dedup();
    groups
}

/// All abelian groups of order at most `max_order` with at most `max_rank`
/// invariant factors, by order and then invariant factors.
pub fn abelian_groups_up_to(max_order: u64, max_rank: usize) -> Vec<FinAbGroup> {
    (1..=max_order).flat_map(|n| abelian_groups_of_order(n, max_rank)).collect()
}

/// A finite group given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableGroup {
    order: usize,
    table: Vec<Vec<usize>>,
    identity: usize,
}

impl TableGroup {
    /// Validates the group axioms.
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidInput("empty multiplication table".into()));
        }
        if n > MAX_GROUP_ORDER {
            return Err(Error::CostBound(format!("table group of order {n}")));
        }
        for row in &table {
            if row.len() != n || row.iter().any(|&x| x >= n) {
                return Err(Error::InvalidInput("table is not a square over 0..order".into()));
            }
            let set: FxHashSet<usize> = row.iter().copied().collect();
            if set.len() != n {
                return Err(Error::InvalidInput("table is not a Latin square".into()));
            }
        }
        for c in 0..n {
            let set: FxHashSet<usize> = (0..n).map(|r| table[r][c]).collect();
            if set.len() != n {
                return Err(Error::InvalidInput("table is not a Latin square".into()));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::InvalidInput("no identity element".into()))?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidInput("multiplication is not associative".into()));
                    }
                }
            }
        }
        Ok(TableGroup { order: n, table, identity })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    /// Closure of a set of permutations (as images of `0..k`) under
    /// composition, with product `(στ)(i) = σ(τ(i))`.
    pub fn from_permutations(gens: &[Vec<usize>]) -> Result<Self> {
        let k = gens.first().map_or(0, |g| g.len());
        let id: Vec<usize> = (0..k).collect();
        let mut elems = vec![id.clone()];
        let mut seen: FxHashSet<Vec<usize>> = [id].into_iter().collect();
        let mut i = 0;
        while i < elems.len() {
            for g in gens {
                let p: Vec<usize> = (0..k).map(|x| g[elems[i][x]]).collect();
                if seen.insert(p.clone()) {
                    elems.push(p);
                    if elems.len() > MAX_GROUP_ORDER {
                        return Err(Error::CostBound("permutation group too large".into()));
                    }
                }
            }
            i += 1;
        }
        elems.sort();
        let index: rustc_hash::FxHashMap<&Vec<usize>, usize> =
            elems.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let table = elems
            .iter()
            .map(|a| {
                elems
                    .iter()
                    .map(|b| index[&(0..k).map(|x| a[b[x]]).collect::<Vec<_>>()])
                    .collect()
            })
            .collect();
        Self::new(table)
    }

    /// Symmetric group on `k` letters.
    pub fn symmetric(k: usize) -> Result<Self> {
        if k < 2 {
            return Self::from_permutations(&[(0..k.max(1)).collect()]);
        }
        let mut cycle: Vec<usize> = (1..k).collect();
        cycle.push(0);
        let mut swap: Vec<usize> = (0..k).collect();
        swap.swap(0, 1);
        Self::from_permutations(&[swap, cycle])
    }

    /// Dihedral group of order `2n`, as symmetries of an `n`-gon.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidInput("dihedral groups here need n >= 3".into()));
        }
        let rot: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        let refl: Vec<usize> = (0..n).map(|i| (n - i) % n).collect();
        Self::from_permutations(&[rot, refl])
    }

    /// Alternating group on 4 letters.
    pub fn alternating4() -> Result<Self> {
        Self::from_permutations(&[vec![1, 2, 0, 3], vec![1, 0, 3, 2]])
    }

    /// Quaternion group `{±1, ±i, ±j, ±k}`.
    pub fn quaternion() -> Result<Self> {
        // element 2*u + s stands for (-1)^s * q_u with q = [1, i, j, k]
        const UNIT: [[(usize, usize); 4]; 4] = [
            [(0, 0), (1, 0), (2, 0), (3, 0)],
            [(1, 0), (0, 1), (3, 0), (2, 1)],
            [(2, 0), (3, 1), (0, 1), (1, 0)],
            [(3, 0), (2, 0), (1, 1), (0, 1)],
        ];
        let table = (0..8)
            .map(|a| {
                (0..8)
                    .map(|b| {
                        let (u, s) = UNIT[a / 2][b / 2];
                        2 * u + (s + a % 2 + b % 2) % 2
                    })
                    .collect()
            })
            .collect();
        Self::new(table)
    }
}

/// A finite group with full multiplication and inverse tables. Element `0`
/// is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    order: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    /// Cyclic decomposition when the group was built as a product of cyclic
    /// groups.
    cyclic: Option<Vec<u64>>,
    gens: Vec<usize>,
    name: String,
}

impl Group {
    /// `Z/factors[0] ⊕ ... ⊕ Z/factors[m-1]` for any cyclic decomposition
    /// (factors need not be invariant factors; factors equal to 1 are kept
    /// as trivial summands).
    pub fn from_cyclic_factors(factors: &[u64]) -> Result<Self> {
        if factors.iter().any(|&n| n == 0) {
            return Err(Error::InvalidInput("cyclic factors must be positive".into()));
        }
        let order = factors
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n as usize))
            .filter(|&o| o <= MAX_GROUP_ORDER)
            .ok_or_else(|| Error::CostBound(format!("group {factors:?} exceeds order {MAX_GROUP_ORDER}")))?;
        let m = factors.len();
        let mut strides = vec![1usize; m];
        for i in (0..m.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * factors[i + 1] as usize;
        }
        let tuple = |x: usize| -> Vec<usize> { (0..m).map(|i| (x / strides[i]) % factors[i] as usize).collect() };
        let tuples: Vec<Vec<usize>> = (0..order).map(tuple).collect();
        let index = |t: &[usize]| -> usize { t.iter().zip(&strides).map(|(a, s)| a * s).sum() };
        let mut mul = Vec::with_capacity(order * order);
        for a in &tuples {
            for b in &tuples {
                let s: Vec<usize> = (0..m).map(|i| (a[i] + b[i]) % factors[i] as usize).collect();
                mul.push(index(&s) as u32);
            }
        }
        let inv = tuples
            .iter()
            .map(|a| {
                let s: Vec<usize> = (0..m)
                    .map(|i| (factors[i] as usize - a[i]) % factors[i] as usize)
                    .collect();
                index(&s) as u32
            })
            .collect();
        let gens = (0..m).map(|i| if factors[i] > 1 { strides[i] } else { 0 }).collect();
        let name = if m == 0 {
            "1".to_string()
        } else {
            factors.iter().map(|n| format!("Z/{n}")).collect::<Vec<_>>().join(" + ")
        };
        Ok(Group {
            order,
            mul,
            inv,
            cyclic: Some(factors.to_vec()),
            gens,
            name,
        })
    }

    pub fn abelian(g: &FinAbGroup) -> Result<Self> {
        Self::from_cyclic_factors(g.invariant_factors())
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        Self::from_cyclic_factors(&[n])
    }

    /// Relabels so that the identity is element 0.
    pub fn from_table(t: &TableGroup) -> Self {
        let n = t.order;
        let e = t.identity;
        let relabel = |x: usize| if x == e { 0 } else if x == 0 { e } else { x };
        let mut mul = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                mul[relabel(a) * n + relabel(b)] = relabel(t.table[a][b]) as u32;
            }
        }
        let mut inv = vec![0u32; n];
        for a in 0..n {
            inv[a] = (0..n).find(|&b| mul[a * n + b] == 0).unwrap() as u32;
        }
        let mut g = Group {
            order: n,
            mul,
            inv,
            cyclic: None,
            gens: Vec::new(),
            name: format!("table group of order {n}"),
        };
        g.gens = g.greedy_generators();
        g
    }

    /// Subgroup `H` as a group in its own right, with the embedding
    /// `H -> self` as a list of element indices.
    pub fn subgroup_group(&self, h: &Subgroup) -> (Group, Vec<usize>) {
        let elems = h.elements();
        let pos: rustc_hash::FxHashMap<usize, usize> = elems.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let table = elems
            .iter()
            .map(|&a| elems.iter().map(|&b| pos[&self.mul(a, b)]).collect())
            .collect();
        let t = TableGroup::new(table).expect("subgroup of a group is a group");
        (Group::from_table(&t), elems.to_vec())
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn pow(&self, a: usize, k: u64) -> usize {
        let mut r = 0;
        for _ in 0..k {
            r = self.mul(r, a);
        }
        r
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Cyclic decomposition, when the group was built from one.
    pub fn cyclic_factors(&self) -> Option<&[u64]> {
        self.cyclic.as_deref()
    }

    /// Generators: the standard basis of the cyclic decomposition, or a
    /// greedy generating set for table groups.
    pub fn generators(&self) -> &[usize] {
        &self.gens
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Element index of a tuple in the cyclic decomposition.
    pub fn element(&self, tuple: &[u64]) -> usize {
        let f = self.cyclic.as_ref().expect("element tuples need a cyclic decomposition");
        assert_eq!(tuple.len(), f.len());
        tuple
            .iter()
            .zip(f)
            .fold(0usize, |acc, (&a, &n)| acc * n as usize + (a % n) as usize)
    }

    /// Tuple of an element in the cyclic decomposition.
    pub fn tuple(&self, x: usize) -> Vec<u64> {
        let f = self.cyclic.as_ref().expect("element tuples need a cyclic decomposition");
        let mut out = vec![0; f.len()];
        let mut x = x as u64;
        for i in (0..f.len()).rev() {
            out[i] = x % f[i];
            x /= f[i];
        }
        out
    }

    fn greedy_generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = vec![0usize];
        for g in 0..self.order {
            if span.len() == self.order {
                break;
            }
            if !span.contains(&g) {
                gens.push(g);
                span = self.closure(&gens);
            }
        }
        gens
    }

    /// Subgroup generated by `gens`, as a sorted element list.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut in_set = vec![false; self.order];
        in_set[0] = true;
        let mut elems = vec![0usize];
        let mut i = 0;
        while i < elems.len() {
            for &g in gens {
                let x = self.mul(elems[i], g);
                if !in_set[x] {
                    in_set[x] = true;
                    elems.push(x);
                }
            }
            i += 1;
        }
        elems.sort_unstable();
        elems
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// A subgroup, as the sorted list of its elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    elements: Vec<usize>,
}

impl Subgroup {
    /// Checks closure; `elements` may be unsorted.
    pub fn new(g: &Group, mut elements: Vec<usize>) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        if elements.first() != Some(&0) {
            return Err(Error::InvalidInput("subgroup must contain the identity".into()));
        }
        if elements.iter().any(|&x| x >= g.order()) {
            return Err(Error::InvalidInput("element out of range".into()));
        }
        let s = Subgroup { elements };
        for &a in &s.elements {
            if !s.contains(g.inv(a)) || s.elements.iter().any(|&b| !s.contains(g.mul(a, b))) {
                return Err(Error::InvalidInput("element set is not closed".into()));
            }
        }
        Ok(s)
    }

    pub fn generated_by(g: &Group, gens: &[usize]) -> Self {
        Subgroup {
            elements: g.closure(gens),
        }
    }

    pub fn trivial() -> Self {
        Subgroup { elements: vec![0] }
    }

    pub fn whole(g: &Group) -> Self {
        Subgroup {
            elements: (0..g.order()).collect(),
        }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn is_cyclic(&self, g: &Group) -> bool {
        self.elements.iter().any(|&x| g.element_order(x) == self.order())
    }
}

/// All subgroups of `g`, sorted by order and then by element list.
pub fn subgroups(g: &Group) -> Result<Vec<Subgroup>> {
    match g.cyclic_factors() {
        Some(f) => {
            if g.order() > MAX_ABELIAN_SUBGROUP_ORDER {
                return Err(Error::CostBound(format!(
                    "subgroup enumeration of an abelian group of order {} (limit {MAX_ABELIAN_SUBGROUP_ORDER})",
                    g.order()
                )));
            }
            Ok(abelian_subgroups(g, f))
        }
        None => {
            if g.order() > MAX_TABLE_SUBGROUP_ORDER {
                return Err(Error::CostBound(format!(
                    "subgroup enumeration of a table group of order {} (limit {MAX_TABLE_SUBGROUP_ORDER})",
                    g.order()
                )));
            }
            Ok(closure_subgroups(g))
        }
    }
}

/// Subgroups of `⊕ Z/n_i` correspond to lattices `L` with
/// `⊕ n_i Z ⊆ L ⊆ Z^m`; these are enumerated through their Hermite bases,
/// built from the last coordinate upwards.
fn abelian_subgroups(g: &Group, factors: &[u64]) -> Vec<Subgroup> {
    let mut out = BTreeSet::new();
    let mut rows: Vec<Vec<i64>> = Vec::new();
    fn rec(
        i: usize,
        g: &Group,
        factors: &[u64],
        rows: &mut Vec<Vec<i64>>,
        out: &mut BTreeSet<Subgroup>,
    ) {
        let m = factors.len();
        if i == 0 {
            let gens: Vec<usize> = rows
                .iter()
                .map(|r| g.element(&r.iter().map(|&v| v as u64).collect::<Vec<_>>()))
                .collect();
            out.insert(Subgroup::generated_by(g, &gens));
            return;
        }
        let i = i - 1;
        let n = factors[i];
        // lattice spanned by the rows below, in coordinates i+1..m
        let int_rows: Vec<Vec<Int>> = rows.iter().map(|r| r.iter().map(|&v| Int::from(v)).collect()).collect();
        let below = HermiteBasis::from_rows(m, int_rows.iter().map(Vec::as_slice));
        let pivots_below: Vec<(usize, i64)> = rows
            .iter()
            .map(|r| {
                let c = r.iter().position(|&v| v != 0).unwrap();
                (c, r[c])
            })
            .collect();
        for d in (1..=n).filter(|d| n % d == 0) {
            // off-diagonal entries a_j in [0, d_j) for j > i
            let ranges: Vec<i64> = (i + 1..m)
                .map(|j| pivots_below.iter().find(|p| p.0 == j).map_or(1, |p| p.1))
                .collect();
            let mut a = vec![0i64; m - i - 1];
            loop {
                // n e_i must lie in L: (n/d) * (a_j) in the lattice below
                let k = (n / d) as i64;
                let test: Vec<Int> = (0..m)
                    .map(|c| if c <= i { Int::zero() } else { Int::from(k * a[c - i - 1]) })
                    .collect();
                if below.contains(&test) {
                    let mut row = vec![0i64; m];
                    row[i] = d as i64;
                    row[i + 1..].copy_from_slice(&a);
                    rows.push(row);
                    rec(i, g, factors, rows, out);
                    rows.pop();
                }
                // next off-diagonal choice
                let mut t = 0;
                while t < a.len() {
                    a[t] += 1;
                    if a[t] < ranges[t] {
                        break;
                    }
                    a[t] = 0;
                    t += 1;
                }
                if t == a.len() {
                    break;
                }
            }
        }
    }
    rec(factors.len(), g, factors, &mut rows, &mut out);
    let mut v: Vec<Subgroup> = out.into_iter().collect();
    v.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.cmp(b)));
    v
}

fn closure_subgroups(g: &Group) -> Vec<Subgroup> {
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut frontier = vec![vec![0usize]];
    found.insert(vec![0]);
    while let Some(h) = frontier.pop() {
        let in_h: FxHashSet<usize> = h.iter().copied().collect();
        for x in 0..g.order() {
            if in_h.contains(&x) {
                continue;
            }
            let mut gens = h.clone();
            gens.push(x);
            let k = g.closure(&gens);
            if found.insert(k.clone()) {
                frontier.push(k);
            }
        }
    }
    let mut v: Vec<Subgroup> = found.into_iter().map(|elements| Subgroup { elements }).collect();
    v.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.cmp(b)));
    v
}

/// One representative per left coset `xH`, the smallest element index of
/// each coset, in increasing order.
pub fn coset_reps(g: &Group, h: &Subgroup) -> Result<Vec<usize>> {
    if h.elements().iter().any(|&x| x >= g.order()) {
        return Err(Error::InvalidInput("subgroup does not belong to this group".into()));
    }
    if g.order() % h.order() != 0 {
        return Err(Error::InvalidInput("element set is not a subgroup".into()));
    }
    let mut covered = vec![false; g.order()];
    let mut reps = Vec::with_capacity(g.order() / h.order());
    for x in 0..g.order() {
        if covered[x] {
            continue;
        }
        reps.push(x);
        for &y in h.elements() {
            let z = g.mul(x, y);
            if covered[z] {
                return Err(Error::InvalidInput("element set is not a subgroup".into()));
            }
            covered[z] = true;
        }
    }
    Ok(reps)
}

/// Subgroup generated by all commutators `a b a^-1 b^-1`.
pub fn commutator_subgroup(g: &Group) -> Subgroup {
    let mut comms = BTreeSet::new();
    for a in 0..g.order() {
        for b in 0..g.order() {
            comms.insert(g.mul(g.mul(a, b), g.mul(g.inv(a), g.inv(b))));
        }
    }
    let gens: Vec<usize> = comms.into_iter().collect();
    Subgroup::generated_by(g, &gens)
}

/// Cyclic subgroups, each with a generator of smallest index.
pub fn cyclic_subgroups(g: &Group) -> Vec<(Subgroup, usize)> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for x in 0..g.order() {
        let s = Subgroup::generated_by(g, &[x]);
        if seen.insert(s.clone()) {
            out.push((s, x));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abelian_group_counts() {
        // partitions of the exponents: order 16 -> 5, 72 = 2^3·3^2 -> 3·2, 81 -> 5
        assert_eq!(abelian_groups_of_order(16, 4).len(), 5);
        assert_eq!(abelian_groups_of_order(72, 4).len(), 6);
        assert_eq!(abelian_groups_of_order(81, 4).len(), 5);
        assert_eq!(abelian_groups_of_order(81, 3).len(), 4);
        assert_eq!(abelian_groups_of_order(1, 4), vec![FinAbGroup::trivial()]);
        assert_eq!(abelian_groups_of_order(12, 4).iter().map(|g| g.invariant_factors().to_vec()).collect::<Vec<_>>(), vec![vec![2, 6], vec![12]]);
        for g in abelian_groups_up_to(64, 6) {
            assert_eq!(canonicalize_abelian(g.invariant_factors()).unwrap(), g);
        }
    }


    fn brute_subgroup_count(g: &Group) -> usize {
        // closure of every subset of size <= 3 covers all subgroups of the small groups below
        let n = g.order();
        let mut set = BTreeSet::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    set.insert(g.closure(&[a, b, c]));
                }
            }
        }
        set.len()
    }

    #[test]
    fn canonical_factors() {
        assert_eq!(canonicalize_abelian(&[2, 3]).unwrap().invariant_factors(), &[6]);
        assert_eq!(canonicalize_abelian(&[3, 3]).unwrap().invariant_factors(), &[3, 3]);
        assert_eq!(canonicalize_abelian(&[4, 2, 2]).unwrap().invariant_factors(), &[2, 2, 4]);
        assert!(canonicalize_abelian(&[1, 3]).is_err());
        let g = canonicalize_abelian(&[12, 18]).unwrap();
        assert_eq!(canonicalize_abelian(g.invariant_factors()).unwrap(), g);
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(parse_group_spec("9, 3").unwrap().invariant_factors(), &[3, 9]);
        assert_eq!(parse_group_spec("1").unwrap(), FinAbGroup::trivial());
        assert!(parse_group_spec("").is_err());
        assert!(parse_group_spec("0").is_err());
        assert!(parse_group_spec("3,x").is_err());
        assert!(parse_group_spec("-3").is_err());
    }

    #[test]
    fn subgroup_counts() {
        let z4 = Group::cyclic(4).unwrap();
        let s = subgroups(&z4).unwrap();
        assert_eq!(s.iter().map(Subgroup::order).collect::<Vec<_>>(), vec![1, 2, 4]);
        assert_eq!(subgroups(&Group::from_cyclic_factors(&[2, 2]).unwrap()).unwrap().len(), 5);
        assert_eq!(subgroups(&Group::from_cyclic_factors(&[]).unwrap()).unwrap().len(), 1);
        for p in [2u64, 3, 5] {
            let g = Group::from_cyclic_factors(&[p, p]).unwrap();
            assert_eq!(subgroups(&g).unwrap().len() as u64, p + 3);
            let g = Group::cyclic(p * p * p).unwrap();
            assert_eq!(subgroups(&g).unwrap().len(), 4);
        }
        for f in [&[2u64, 4][..], &[2, 2, 2], &[3, 9], &[2, 6], &[4, 4]] {
            let g = Group::from_cyclic_factors(f).unwrap();
            assert_eq!(subgroups(&g).unwrap().len(), brute_subgroup_count(&g), "{f:?}");
        }
        let s3 = Group::from_table(&TableGroup::symmetric(3).unwrap());
        assert_eq!(subgroups(&s3).unwrap().len(), 6);
        let q8 = Group::from_table(&TableGroup::quaternion().unwrap());
        assert_eq!(subgroups(&q8).unwrap().len(), 6);
    }

    #[test]
    fn cosets() {
        let z4 = Group::cyclic(4).unwrap();
        let h = Subgroup::new(&z4, vec![0, 2]).unwrap();
        assert_eq!(coset_reps(&z4, &h).unwrap(), vec![0, 1]);
        assert_eq!(coset_reps(&z4, &Subgroup::whole(&z4)).unwrap(), vec![0]);
        assert_eq!(coset_reps(&z4, &Subgroup::trivial()).unwrap(), vec![0, 1, 2, 3]);
        assert!(Subgroup::new(&z4, vec![0, 1]).is_err());
    }

    #[test]
    fn commutators() {
        let z6 = Group::cyclic(6).unwrap();
        assert_eq!(commutator_subgroup(&z6).order(), 1);
        let s3 = Group::from_table(&TableGroup::symmetric(3).unwrap());
        assert_eq!(commutator_subgroup(&s3).order(), 3);
        let q8 = Group::from_table(&TableGroup::quaternion().unwrap());
        let c = commutator_subgroup(&q8);
        assert_eq!(c.order(), 2);
        // the commutator subgroup of Q8 is its centre
        for &z in c.elements() {
            assert!((0..8).all(|x| q8.mul(z, x) == q8.mul(x, z)));
        }
    }

    #[test]
    fn tables_are_validated() {
        assert!(TableGroup::new(vec![vec![0, 1], vec![1, 1]]).is_err());
        assert_eq!(TableGroup::dihedral(4).unwrap().order(), 8);
        assert_eq!(TableGroup::alternating4().unwrap().order(), 12);
        assert!(!Group::from_table(&TableGroup::quaternion().unwrap()).is_abelian());
    }

    #[test]
    fn tuples_roundtrip() {
        let g = Group::from_cyclic_factors(&[2, 3, 4]).unwrap();
        for x in 0..g.order() {
            assert_eq!(g.element(&g.tuple(x)), x);
        }
        assert_eq!(g.tuple(1), vec![0, 0, 1]);
        assert_eq!(g.generators(), &[12, 4, 1]);
    }
}
