//! Lattices with a finite group action, the standard constructions on them,
//! and the exact sequences built from the norm-one lattice.
//!
//! A lattice of rank `r` has basis `e_0, ..., e_{r-1}`; the action stores,
//! for every group element `g` and basis index `i`, the image `g·e_i` as a
//! sparse vector. Fixed basis conventions:
//!
//! * `S²L`: basis `e_i·e_j` for `i <= j`, lexicographic;
//! * `∧²L`: basis `e_i∧e_j` for `i < j`, lexicographic;
//! * `L₁⊗L₂`: basis `e_i⊗f_j` at index `i·rank(L₂) + j`;
//! * `Ŵ = Z[G]/Z·N_G`: basis the images of the non-identity elements, so
//!   `ē_g` has index `g - 1` and `ē_1 = -Σ ē_g`;
//! * `P̂ = Z[G]^r`: basis `(i, g)` at index `i·|G| + g`.

use std::fmt;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::groups::{coset_reps, subgroups, Group, Subgroup};
use crate::zlinalg::sparse::independent_mod_p_up_to;
use crate::zlinalg::{
    cokernel, hermite_normal_form, saturate, smith_normal_form, sparse_cokernel, FgAbGroup, Int, IntMatrix,
    SparseVec, UnitReduced,
};
use crate::{Error, Result};

/// Prime used for rank certificates; independence modulo `p` implies
/// independence over `Q`.
const RANK_PRIME: u64 = 4_294_967_291;

/// Finite-rank free Z-module with an action of a finite group.
#[derive(Clone)]
pub struct GLattice {
    group: Arc<Group>,
    rank: usize,
    /// `action[g][i] = g·e_i`
    action: Arc<Vec<Vec<SparseVec>>>,
    name: String,
}

impl fmt::Debug for GLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GLattice({}, rank {}, over {})", self.name, self.rank, self.group)
    }
}

impl GLattice {
    /// Builds the action of every element from `f(g, i) = g·e_i`. The
    /// caller guarantees that `f` is an action.
    pub fn from_action_fn(
        group: &Arc<Group>,
        rank: usize,
        f: impl Fn(usize, usize) -> SparseVec + Sync,
    ) -> Self {
        let action: Vec<Vec<SparseVec>> = (0..group.order())
            .into_par_iter()
            .map(|g| (0..rank).map(|i| f(g, i)).collect())
            .collect();
        GLattice {
            group: group.clone(),
            rank,
            action: Arc::new(action),
            name: String::from("L"),
        }
    }

    /// Lattice given by one matrix per group generator (row `i` is the image
    /// of `e_i`). Fails unless the matrices define an action of the group.
    pub fn from_generator_matrices(group: &Arc<Group>, mats: &[IntMatrix]) -> Result<Self> {
        let gens = group.generators();
        if mats.len() != gens.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} generator matrices, got {}",
                gens.len(),
                mats.len()
            )));
        }
        let rank = mats.first().map_or(0, |m| m.rows());
        for m in mats {
            if m.rows() != rank || m.cols() != rank {
                return Err(Error::InvalidInput("generator matrices must be square of equal size".into()));
            }
            if !m.determinant().is_unit() {
                return Err(Error::InvalidInput("generator matrix is not unimodular".into()));
            }
        }
        let gen_images: Vec<Vec<SparseVec>> = mats
            .iter()
            .map(|m| (0..rank).map(|i| SparseVec::from_dense(m.row(i))).collect())
            .collect();
        let n = group.order();
        let mut action: Vec<Option<Vec<SparseVec>>> = vec![None; n];
        action[0] = Some((0..rank).map(SparseVec::unit).collect());
        let mut queue = vec![0usize];
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            for (k, &s) in gens.iter().enumerate() {
                // (x s)·e_i = x·(s·e_i)
                let ax = action[x].as_ref().unwrap();
                let img: Vec<SparseVec> = gen_images[k].iter().map(|v| apply_action(ax, v)).collect();
                let y = group.mul(x, s);
                match &action[y] {
                    Some(prev) if *prev != img => {
                        return Err(Error::InvalidInput(
                            "generator matrices do not satisfy the group relations".into(),
                        ))
                    }
                    Some(_) => {}
                    None => {
                        action[y] = Some(img);
                        queue.push(y);
                    }
                }
            }
        }
        if action.iter().any(Option::is_none) {
            return Err(Error::Internal("group generators do not generate".into()));
        }
        Ok(GLattice {
            group: group.clone(),
            rank,
            action: Arc::new(action.into_iter().map(Option::unwrap).collect()),
            name: String::from("L"),
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `g·e_i`
    pub fn image(&self, g: usize, i: usize) -> &SparseVec {
        &self.action[g][i]
    }

    /// `g·v`
    pub fn act(&self, g: usize, v: &SparseVec) -> SparseVec {
        apply_action(&self.action[g], v)
    }

    /// Matrix of `g` in the row convention (row `i` is `g·e_i`).
    pub fn action_matrix(&self, g: usize) -> IntMatrix {
        IntMatrix::from_rows(self.action[g].iter().map(|v| v.to_dense(self.rank)).collect(), self.rank)
    }

    /// Every element maps basis vectors to basis vectors.
    pub fn is_permutation(&self) -> bool {
        self.action
            .iter()
            .all(|a| a.iter().all(|v| v.len() == 1 && v.entries()[0].1.is_one()))
    }

    /// Every element maps basis vectors to `±` basis vectors.
    pub fn is_signed_permutation(&self) -> bool {
        self.action
            .iter()
            .all(|a| a.iter().all(|v| v.len() == 1 && v.entries()[0].1.is_unit()))
    }

    /// The same module viewed over a subgroup; `embedding[k]` is the image
    /// in `self.group()` of element `k` of `sub`.
    pub fn restrict(&self, sub: &Arc<Group>, embedding: &[usize]) -> GLattice {
        assert_eq!(sub.order(), embedding.len());
        GLattice {
            group: sub.clone(),
            rank: self.rank,
            action: Arc::new(embedding.iter().map(|&g| self.action[g].clone()).collect()),
            name: self.name.clone(),
        }
    }

    /// `Σ_{h ∈ elements} h·v`
    pub fn norm_over(&self, elements: &[usize], v: &SparseVec) -> SparseVec {
        let mut pairs = Vec::new();
        for &h in elements {
            pairs.extend(self.act(h, v).entries().iter().cloned());
        }
        SparseVec::from_pairs(pairs)
    }

    fn same_group(&self, other: &GLattice) -> bool {
        Arc::ptr_eq(&self.group, &other.group) || *self.group == *other.group
    }
}

fn apply_action(images: &[SparseVec], v: &SparseVec) -> SparseVec {
    if v.len() == 1 {
        let (i, c) = &v.entries()[0];
        return if c.is_one() { images[*i].clone() } else { images[*i].scale(c) };
    }
    let mut pairs = Vec::new();
    for (i, c) in v.iter() {
        for (j, a) in images[*i].iter() {
            pairs.push((*j, a * c));
        }
    }
    SparseVec::from_pairs(pairs)
}

/// Index of `e_i·e_j` (`i <= j`) in `S²` of a rank-`r` lattice.
#[inline]
pub fn sym2_index(r: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * r - i * i.saturating_sub(1) / 2 + (j - i)
}

/// Index of `e_i∧e_j` (`i < j`) in `∧²` of a rank-`r` lattice.
#[inline]
pub fn wedge2_index(r: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    i * (r - 1) - i * i.saturating_sub(1) / 2 + (j - i - 1)
}

/// Pairs `(i, j)`, `i <= j`, in `S²` order.
pub fn sym2_pairs(r: usize) -> Vec<(usize, usize)> {
    (0..r).flat_map(|i| (i..r).map(move |j| (i, j))).collect()
}

/// Pairs `(i, j)`, `i < j`, in `∧²` order.
pub fn wedge2_pairs(r: usize) -> Vec<(usize, usize)> {
    (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).collect()
}

/// `u·v` in `S²` of a rank-`r` lattice.
pub fn sym_product(r: usize, u: &SparseVec, v: &SparseVec) -> SparseVec {
    let mut pairs = Vec::with_capacity(u.len() * v.len());
    for (a, x) in u.iter() {
        for (b, y) in v.iter() {
            pairs.push((sym2_index(r, *a, *b), x * y));
        }
    }
    SparseVec::from_pairs(pairs)
}

/// `u∧v` in `∧²` of a rank-`r` lattice.
pub fn wedge_product(r: usize, u: &SparseVec, v: &SparseVec) -> SparseVec {
    let mut pairs = Vec::with_capacity(u.len() * v.len());
    for (a, x) in u.iter() {
        for (b, y) in v.iter() {
            if a < b {
                pairs.push((wedge2_index(r, *a, *b), x * y));
            } else if a > b {
                pairs.push((wedge2_index(r, *b, *a), -(x * y)));
            }
        }
    }
    SparseVec::from_pairs(pairs)
}

/// `u⊗v` in `L₁⊗L₂` with `rank(L₂) = r2`.
pub fn tensor_product(r2: usize, u: &SparseVec, v: &SparseVec) -> SparseVec {
    let mut pairs = Vec::with_capacity(u.len() * v.len());
    for (a, x) in u.iter() {
        for (b, y) in v.iter() {
            pairs.push((a * r2 + b, x * y));
        }
    }
    SparseVec::from_pairs(pairs)
}

pub fn trivial_lattice(group: &Arc<Group>, rank: usize) -> GLattice {
    GLattice::from_action_fn(group, rank, |_, i| SparseVec::unit(i)).with_name(if rank == 1 {
        "Z".to_string()
    } else {
        format!("Z^{rank}")
    })
}

/// `Z[G]` with basis the group elements.
pub fn regular_lattice(group: &Arc<Group>) -> GLattice {
    let g = group.clone();
    GLattice::from_action_fn(group, group.order(), move |x, h| SparseVec::unit(g.mul(x, h))).with_name("Z[G]")
}

/// `Z[G/H]` with basis the left cosets, ordered by their representatives.
pub fn permutation_lattice(group: &Arc<Group>, h: &Subgroup) -> Result<GLattice> {
    let reps = coset_reps(group, h)?;
    let mut coset_of = vec![0usize; group.order()];
    for (k, &r) in reps.iter().enumerate() {
        for &y in h.elements() {
            coset_of[group.mul(r, y)] = k;
        }
    }
    let g = group.clone();
    Ok(
        GLattice::from_action_fn(group, reps.len(), move |x, k| SparseVec::unit(coset_of[g.mul(x, reps[k])]))
            .with_name(format!("Z[G/H], |H| = {}", h.order())),
    )
}

pub fn direct_sum(a: &GLattice, b: &GLattice) -> Result<GLattice> {
    if !a.same_group(b) {
        return Err(Error::InvalidInput("direct sum of lattices over different groups".into()));
    }
    let ra = a.rank;
    Ok(GLattice::from_action_fn(&a.group, ra + b.rank, |g, i| {
        if i < ra {
            a.image(g, i).clone()
        } else {
            a_shift(b.image(g, i - ra), ra)
        }
    })
    .with_name(format!("{} + {}", a.name, b.name)))
}

fn a_shift(v: &SparseVec, by: usize) -> SparseVec {
    v.remap(|i| Some(i + by))
}

/// Dual lattice `Hom(L, Z)` with the contragredient action, in the dual basis.
pub fn dual(l: &GLattice) -> GLattice {
    let r = l.rank;
    let g = l.group.clone();
    // g·e_i^* has j-th coordinate (g^{-1}·e_j)_i
    let transposed: Vec<Vec<SparseVec>> = (0..g.order())
        .into_par_iter()
        .map(|x| {
            let xi = g.inv(x);
            let mut cols: Vec<Vec<(usize, Int)>> = vec![Vec::new(); r];
            for j in 0..r {
                for (i, a) in l.image(xi, j).iter() {
                    cols[*i].push((j, a.clone()));
                }
            }
            cols.into_iter().map(SparseVec::from_pairs).collect()
        })
        .collect();
    GLattice {
        group: l.group.clone(),
        rank: r,
        action: Arc::new(transposed),
        name: format!("dual({})", l.name),
    }
}

pub fn tensor(a: &GLattice, b: &GLattice) -> Result<GLattice> {
    if !a.same_group(b) {
        return Err(Error::InvalidInput("tensor product of lattices over different groups".into()));
    }
    let rb = b.rank;
    Ok(GLattice::from_action_fn(&a.group, a.rank * rb, |g, k| {
        tensor_product(rb, a.image(g, k / rb), b.image(g, k % rb))
    })
    .with_name(format!("{} (x) {}", a.name, b.name)))
}

pub fn sym2(l: &GLattice) -> GLattice {
    let r = l.rank;
    let pairs = sym2_pairs(r);
    GLattice::from_action_fn(&l.group, pairs.len(), |g, k| {
        let (i, j) = pairs[k];
        sym_product(r, l.image(g, i), l.image(g, j))
    })
    .with_name(format!("S2({})", l.name))
}

pub fn wedge2(l: &GLattice) -> GLattice {
    let r = l.rank;
    let pairs = wedge2_pairs(r);
    GLattice::from_action_fn(&l.group, pairs.len(), |g, k| {
        let (i, j) = pairs[k];
        wedge_product(r, l.image(g, i), l.image(g, j))
    })
    .with_name(format!("L2({})", l.name))
}

/// Saturated basis (Hermite form) of the fixed sublattice `L^G`.
pub fn invariants_basis(l: &GLattice) -> IntMatrix {
    let all: Vec<usize> = (0..l.group.order()).collect();
    invariants_under(l, &all)
}

/// Rank of `L^H`, from the character: `(1/|H|) Σ_h tr(h)`.
pub fn fixed_rank(l: &GLattice, elements: &[usize]) -> usize {
    let total: Int = elements
        .iter()
        .flat_map(|&h| (0..l.rank).map(move |i| l.image(h, i).get(i)))
        .sum();
    total
        .div_exact(&Int::from(elements.len() as u64))
        .to_u64()
        .expect("fixed rank is a small nonnegative integer") as usize
}

/// Saturated basis (Hermite form) of `L^H` for the subgroup with the given
/// elements.
///
/// `L^H` is saturated and contains `N_H·L` with finite index, so it is the
/// saturation of the span of the norms `N_H(e_i)`. Norms independent modulo
/// a prime are independent over `Q`; once their number reaches the rank
/// given by the character, their saturation is `L^H`. For signed
/// permutation lattices the orbit sums give the basis directly.
pub fn invariants_under(l: &GLattice, elements: &[usize]) -> IntMatrix {
    if l.rank == 0 {
        return IntMatrix::zeros(0, 0);
    }
    if l.is_signed_permutation() {
        return hermite_normal_form(&signed_orbit_invariants(l, elements));
    }
    let target = fixed_rank(l, elements);
    if target == 0 {
        return IntMatrix::zeros(0, l.rank);
    }
    let norms: Vec<SparseVec> = (0..l.rank)
        .into_par_iter()
        .map(|i| l.norm_over(elements, &SparseVec::unit(i)))
        .collect();
    let chosen = independent_mod_p_up_to(&norms, RANK_PRIME, target);
    let picked = if chosen.len() == target { chosen } else { (0..norms.len()).collect() };
    let dense = IntMatrix::from_rows(picked.iter().map(|&i| norms[i].to_dense(l.rank)).collect(), l.rank);
    hermite_normal_form(&saturate(&dense))
}

fn signed_orbit_invariants(l: &GLattice, elements: &[usize]) -> IntMatrix {
    let r = l.rank;
    let mut seen = vec![false; r];
    let mut rows = Vec::new();
    for b in 0..r {
        if seen[b] {
            continue;
        }
        // orbit of e_b with signs relative to a fixed path from e_b
        let mut sign: FxHashMap<usize, Int> = FxHashMap::default();
        let mut consistent = true;
        for &h in elements {
            let (j, c) = l.image(h, b).entries()[0].clone();
            match sign.get(&j) {
                Some(prev) if *prev != c => consistent = false,
                Some(_) => {}
                None => {
                    sign.insert(j, c);
                }
            }
        }
        for &j in sign.keys() {
            seen[j] = true;
        }
        if consistent {
            let mut row = vec![Int::zero(); r];
            for (j, c) in sign {
                row[j] = c;
            }
            rows.push(row);
        }
    }
    IntMatrix::from_rows(rows, r)
}

/// Linear map between lattices: `rows[i]` is the image of the `i`-th source
/// basis vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeMap {
    pub source_rank: usize,
    pub target_rank: usize,
    pub rows: Vec<SparseVec>,
}

impl LatticeMap {
    pub fn new(source_rank: usize, target_rank: usize, rows: Vec<SparseVec>) -> Self {
        assert_eq!(rows.len(), source_rank);
        debug_assert!(rows.iter().all(|r| r.iter().all(|(i, _)| *i < target_rank)));
        LatticeMap {
            source_rank,
            target_rank,
            rows,
        }
    }

    pub fn from_fn(source_rank: usize, target_rank: usize, f: impl Fn(usize) -> SparseVec + Sync + Send) -> Self {
        Self::new(source_rank, target_rank, (0..source_rank).into_par_iter().map(f).collect())
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        apply_action(&self.rows, v)
    }

    /// `other ∘ self`
    pub fn then(&self, other: &LatticeMap) -> LatticeMap {
        assert_eq!(self.target_rank, other.source_rank);
        LatticeMap::new(
            self.source_rank,
            other.target_rank,
            self.rows.iter().map(|r| other.apply(r)).collect(),
        )
    }

    pub fn to_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(self.rows.iter().map(|r| r.to_dense(self.target_rank)).collect(), self.target_rank)
    }

    /// Checks `f(s·e_i) = s·f(e_i)` for every group generator `s`.
    pub fn is_equivariant(&self, source: &GLattice, target: &GLattice) -> bool {
        source.group.generators().iter().all(|&s| {
            (0..self.source_rank)
                .into_par_iter()
                .all(|i| self.apply(source.image(s, i)) == target.act(s, &self.rows[i]))
        })
    }
}

/// Short exact sequence `0 → A →f B →g C → 0` of lattices, with a
/// Z-linear section of `g` and retraction of `f` for lifting cocycles.
#[derive(Clone, Debug)]
pub struct LatticeSES {
    pub a: GLattice,
    pub b: GLattice,
    pub c: GLattice,
    pub f: LatticeMap,
    pub g: LatticeMap,
    section: OnceLock<LatticeMap>,
    retraction: OnceLock<LatticeMap>,
}

impl LatticeSES {
    /// Builds and verifies the sequence.
    pub fn new(a: GLattice, b: GLattice, c: GLattice, f: LatticeMap, g: LatticeMap) -> Result<Self> {
        let s = Self::unchecked(a, b, c, f, g);
        s.verify()?;
        Ok(s)
    }

    fn unchecked(a: GLattice, b: GLattice, c: GLattice, f: LatticeMap, g: LatticeMap) -> Self {
        LatticeSES {
            a,
            b,
            c,
            f,
            g,
            section: OnceLock::new(),
            retraction: OnceLock::new(),
        }
    }

    /// Injectivity of `f`, surjectivity of `g`, `g∘f = 0`, and
    /// `im f = ker g` (via `im f` saturated of the right rank), plus
    /// equivariance of both maps.
    pub fn verify(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Internal(format!("sequence {} -> {} -> {}: {msg}", self.a.name, self.b.name, self.c.name)));
        if !(self.a.same_group(&self.b) && self.b.same_group(&self.c)) {
            return fail("lattices over different groups".into());
        }
        if self.f.source_rank != self.a.rank
            || self.f.target_rank != self.b.rank
            || self.g.source_rank != self.b.rank
            || self.g.target_rank != self.c.rank
        {
            return fail("map shapes do not match the lattices".into());
        }
        if self.a.rank + self.c.rank != self.b.rank {
            return fail(format!("ranks {} + {} != {}", self.a.rank, self.c.rank, self.b.rank));
        }
        let gf = self.f.then(&self.g);
        if gf.rows.iter().any(|r| !r.is_empty()) {
            return fail("composite is not zero".into());
        }
        let cf = sparse_cokernel(&self.f.rows, self.b.rank);
        if cf != FgAbGroup::free(self.b.rank - self.a.rank) {
            return fail(format!("first map is not a saturated injection (cokernel {cf})"));
        }
        let cg = sparse_cokernel(&self.g.rows, self.c.rank);
        if !cg.is_trivial() {
            return fail(format!("second map is not surjective (cokernel {cg})"));
        }
        if !self.f.is_equivariant(&self.a, &self.b) || !self.g.is_equivariant(&self.b, &self.c) {
            return fail("maps are not equivariant".into());
        }
        Ok(())
    }

    /// Copy with one entry of the first map doubled, for negative controls.
    pub fn with_corrupted_first_map(&self) -> Self {
        let mut f = self.f.clone();
        if let Some(row) = f.rows.iter_mut().find(|r| !r.is_empty()) {
            *row = row.scale(&Int::from(2));
        }
        Self::unchecked(self.a.clone(), self.b.clone(), self.c.clone(), f, self.g.clone())
    }

    /// Z-linear map `s: C → B` with `g∘s = id`.
    pub fn section(&self) -> &LatticeMap {
        self.section.get_or_init(|| generic_section(&self.g))
    }

    /// Z-linear map `r: B → A` with `r∘f = id`.
    pub fn retraction(&self) -> &LatticeMap {
        self.retraction.get_or_init(|| generic_retraction(&self.f))
    }

    fn with_splitting(self, section: Option<LatticeMap>, retraction: Option<LatticeMap>) -> Self {
        if let Some(s) = section {
            debug_assert!(s.then(&self.g).rows.iter().enumerate().all(|(i, r)| *r == SparseVec::unit(i)));
            let _ = self.section.set(s);
        }
        if let Some(r) = retraction {
            debug_assert!(self.f.then(&r).rows.iter().enumerate().all(|(i, v)| *v == SparseVec::unit(i)));
            let _ = self.retraction.set(r);
        }
        self
    }
}

/// Section of a surjection `g: Z^b → Z^c`, from its Smith form
/// `L·G·R = [I; 0]`: `S = [R 0]·L`.
fn generic_section(g: &LatticeMap) -> LatticeMap {
    let m = g.to_matrix();
    let s = smith_normal_form(&m);
    let c = g.target_rank;
    let mut rows = Vec::with_capacity(c);
    for i in 0..c {
        // row i of [R 0]·L = Σ_{k<c} R[i][k]·L[k]
        let mut acc = vec![Int::zero(); g.source_rank];
        for k in 0..c {
            let coef = &s.right[(i, k)];
            if coef.is_zero() {
                continue;
            }
            for (a, l) in acc.iter_mut().zip(s.left.row(k)) {
                if !l.is_zero() {
                    a.add_mul(coef, l);
                }
            }
        }
        rows.push(SparseVec::from_dense(&acc));
    }
    LatticeMap::new(c, g.source_rank, rows)
}

/// Retraction of a saturated injection `f: Z^a → Z^b`, from its Smith form
/// `L·F·R = [I 0]`: `X = R·[L; 0]`.
fn generic_retraction(f: &LatticeMap) -> LatticeMap {
    let m = f.to_matrix();
    let s = smith_normal_form(&m);
    let a = f.source_rank;
    let rows = (0..f.target_rank)
        .map(|j| {
            let mut acc = vec![Int::zero(); a];
            for k in 0..a {
                let coef = &s.right[(j, k)];
                if coef.is_zero() {
                    continue;
                }
                for (x, l) in acc.iter_mut().zip(s.left.row(k)) {
                    if !l.is_zero() {
                        x.add_mul(coef, l);
                    }
                }
            }
            SparseVec::from_dense(&acc)
        })
        .collect();
    LatticeMap::new(f.target_rank, a, rows)
}

/// Kernel of a surjection `φ: B → C` that maps a set of coordinates `F` of
/// `B` bijectively onto the basis of `C` (`split[j] = Some(k)` when
/// `φ(e_j) = e_k`). The kernel has basis `e_s - Σ_k φ(e_s)_k e_{F⁻¹(k)}`
/// for `s ∉ F`, and the coordinates of a kernel element are its entries
/// outside `F`.
pub fn coordinate_split_kernel(b: &GLattice, c: &GLattice, phi: &LatticeMap, split: &[Option<usize>]) -> Result<LatticeSES> {
    assert_eq!(split.len(), b.rank);
    let mut preimage = vec![usize::MAX; c.rank];
    for (j, k) in split.iter().enumerate() {
        if let Some(k) = *k {
            if phi.rows[j] != SparseVec::unit(k) || preimage[k] != usize::MAX {
                return Err(Error::Internal("coordinate split is not a bijection onto the basis".into()));
            }
            preimage[k] = j;
        }
    }
    if preimage.contains(&usize::MAX) {
        return Err(Error::Internal("coordinate split does not cover the target".into()));
    }
    let outside: Vec<usize> = (0..b.rank).filter(|&j| split[j].is_none()).collect();
    let mut pos = vec![usize::MAX; b.rank];
    for (k, &s) in outside.iter().enumerate() {
        pos[s] = k;
    }
    let basis: Vec<SparseVec> = outside
        .par_iter()
        .map(|&s| {
            let mut pairs = vec![(s, Int::one())];
            for (k, v) in phi.rows[s].iter() {
                pairs.push((preimage[*k], -v));
            }
            SparseVec::from_pairs(pairs)
        })
        .collect();
    let restrict = |v: &SparseVec| v.remap(|j| (pos[j] != usize::MAX).then_some(pos[j]));
    let kernel = GLattice::from_action_fn(&b.group, outside.len(), |g, k| restrict(&b.act(g, &basis[k])))
        .with_name(format!("ker({} -> {})", b.name, c.name));
    let f = LatticeMap::new(outside.len(), b.rank, basis);
    let retraction = LatticeMap::new(
        b.rank,
        outside.len(),
        (0..b.rank)
            .map(|j| if pos[j] != usize::MAX { SparseVec::unit(pos[j]) } else { SparseVec::new() })
            .collect(),
    );
    let section = LatticeMap::new(c.rank, b.rank, preimage.iter().map(|&j| SparseVec::unit(j)).collect());
    let ses = LatticeSES::new(kernel, b.clone(), c.clone(), f, phi.clone())?;
    Ok(ses.with_splitting(Some(section), Some(retraction)))
}

/// `Ŵ = Z[G]/Z·N_G` and the sequence `0 → Z →N_G Z[G] → Ŵ → 0`.
pub fn norm_one_lattice(group: &Arc<Group>) -> Result<(GLattice, LatticeSES)> {
    let n = group.order();
    let w = norm_one_only(group);
    let z = trivial_lattice(group, 1);
    let zg = regular_lattice(group);
    let f = LatticeMap::new(1, n, vec![SparseVec::from_pairs((0..n).map(|g| (g, Int::one())).collect())]);
    let g = LatticeMap::new(n, n - 1, (0..n).map(|h| bar(n, h)).collect());
    let section = LatticeMap::new(n - 1, n, (1..n).map(SparseVec::unit).collect());
    let mut ret_rows = vec![SparseVec::unit(0)];
    ret_rows.extend((1..n).map(|_| SparseVec::new()));
    let retraction = LatticeMap::new(n, 1, ret_rows);
    let ses = LatticeSES::new(z, zg, w.clone(), f, g)?.with_splitting(Some(section), Some(retraction));
    Ok((w, ses))
}

/// Image of `e_h` in `Ŵ`.
fn bar(n: usize, h: usize) -> SparseVec {
    if h == 0 {
        SparseVec::from_pairs((0..n - 1).map(|k| (k, Int::from(-1))).collect())
    } else {
        SparseVec::unit(h - 1)
    }
}

fn norm_one_only(group: &Arc<Group>) -> GLattice {
    let n = group.order();
    let g = group.clone();
    GLattice::from_action_fn(group, n - 1, move |x, k| bar(n, g.mul(x, k + 1))).with_name("W")
}

/// The sequence `0 → Ŵ →ι P̂ →π T̂ → 0` with `P̂ = Z[G]^r` and
/// `ι(x̄) = ((g_1 - 1)x, ..., (g_r - 1)x)` for the chosen generators.
#[derive(Clone, Debug)]
pub struct FlasqueResolution {
    pub generators: Vec<usize>,
    pub ses: LatticeSES,
    /// Unit-pivot presentation of `ι(Ŵ) ⊆ P̂`; `T̂` has basis the images of
    /// the free coordinates of `P̂`.
    pub quotient: UnitReduced,
}

impl FlasqueResolution {
    pub fn w(&self) -> &GLattice {
        &self.ses.a
    }
    pub fn p(&self) -> &GLattice {
        &self.ses.b
    }
    pub fn t(&self) -> &GLattice {
        &self.ses.c
    }
    pub fn iota(&self) -> &LatticeMap {
        &self.ses.f
    }
    pub fn pi(&self) -> &LatticeMap {
        &self.ses.g
    }
    pub fn group(&self) -> &Arc<Group> {
        self.ses.a.group()
    }
}

/// Flasque resolution with the group's standard generators (one per
/// cyclic factor).
pub fn flasque_resolution(group: &Arc<Group>) -> Result<FlasqueResolution> {
    let gens: Vec<usize> = group.generators().iter().copied().filter(|&g| g != 0).collect();
    flasque_resolution_with_generators(group, &gens)
}

/// Flasque resolution for an arbitrary generating set.
pub fn flasque_resolution_with_generators(group: &Arc<Group>, gens: &[usize]) -> Result<FlasqueResolution> {
    let n = group.order();
    if group.closure(gens).len() != n {
        return Err(Error::InvalidInput("elements do not generate the group".into()));
    }
    let r = gens.len();
    let w = norm_one_only(group);
    let g2 = group.clone();
    let p = GLattice::from_action_fn(group, r * n, move |x, k| SparseVec::unit((k / n) * n + g2.mul(x, k % n)))
        .with_name("P");
    let iota_rows: Vec<SparseVec> = (1..n)
        .map(|h| {
            let mut pairs = Vec::with_capacity(2 * r);
            for (i, &gi) in gens.iter().enumerate() {
                pairs.push((i * n + group.mul(gi, h), Int::one()));
                pairs.push((i * n + h, Int::from(-1)));
            }
            SparseVec::from_pairs(pairs)
        })
        .collect();
    // injectivity: the common kernel of the (g_i - 1) on Z[G] must be Z·N_G
    if sparse_cokernel(&iota_rows, r * n).free_rank != r * n - (n - 1) {
        return Err(Error::Internal("flasque embedding is not injective".into()));
    }
    let quotient = UnitReduced::new(&iota_rows, r * n)
        .ok_or_else(|| Error::Internal("flasque embedding has no unit-pivot reduction".into()))?;
    let tr = quotient.quotient_rank();
    let t = GLattice::from_action_fn(group, tr, |x, k| {
        quotient.project(&p.act(x, &SparseVec::unit(quotient.free_cols[k])))
    })
    .with_name("T");
    let pi = LatticeMap::from_fn(r * n, tr, |j| quotient.project(&SparseVec::unit(j)));
    let iota = LatticeMap::new(n - 1, r * n, iota_rows);
    let section = LatticeMap::new(tr, r * n, quotient.free_cols.iter().map(|&c| SparseVec::unit(c)).collect());
    let ses = LatticeSES::new(w, p, t, iota, pi)?.with_splitting(Some(section), None);
    let res = FlasqueResolution {
        generators: gens.to_vec(),
        ses,
        quotient,
    };
    if !is_flasque(res.t())? {
        return Err(Error::Internal("quotient lattice of the flasque resolution is not flasque".into()));
    }
    Ok(res)
}

/// `S²π: S²P̂ → S²T̂` and its kernel `N`.
pub fn sym2_kernel_sequence(fr: &FlasqueResolution) -> Result<LatticeSES> {
    let (p, t, q) = (fr.p(), fr.t(), &fr.quotient);
    let (rp, rt) = (p.rank(), t.rank());
    let s2p = sym2(p);
    let s2t = sym2(t);
    let pairs = sym2_pairs(rp);
    let pi = fr.pi();
    let phi = LatticeMap::from_fn(pairs.len(), s2t.rank(), |k| {
        let (a, b) = pairs[k];
        sym_product(rt, &pi.rows[a], &pi.rows[b])
    });
    let split: Vec<Option<usize>> = pairs
        .iter()
        .map(|&(a, b)| match (q.free_pos[a], q.free_pos[b]) {
            (Some(x), Some(y)) => Some(sym2_index(rt, x, y)),
            _ => None,
        })
        .collect();
    let mut ses = coordinate_split_kernel(&s2p, &s2t, &phi, &split)?;
    ses.a = ses.a.clone().with_name("N");
    Ok(ses)
}

/// `N' = ker(P̂⊗T̂ → S²T̂)`, `p⊗t ↦ π(p)·t`.
pub fn n_prime_sequence(fr: &FlasqueResolution) -> Result<LatticeSES> {
    let (p, t, q) = (fr.p(), fr.t(), &fr.quotient);
    let rt = t.rank();
    let pt = tensor(p, t)?;
    let s2t = sym2(t);
    let pi = fr.pi();
    let phi = LatticeMap::from_fn(pt.rank(), s2t.rank(), |k| {
        sym_product(rt, &pi.rows[k / rt], &SparseVec::unit(k % rt))
    });
    let split: Vec<Option<usize>> = (0..pt.rank())
        .map(|k| {
            let (a, j) = (k / rt, k % rt);
            q.free_pos[a].filter(|&x| x <= j).map(|x| sym2_index(rt, x, j))
        })
        .collect();
    let mut ses = coordinate_split_kernel(&pt, &s2t, &phi, &split)?;
    ses.a = ses.a.clone().with_name("N'");
    Ok(ses)
}

/// `N'' = ker(P̂⊗P̂ → S²T̂)`, `p⊗p' ↦ π(p)·π(p')`.
pub fn n_double_prime_sequence(fr: &FlasqueResolution) -> Result<LatticeSES> {
    let (p, t, q) = (fr.p(), fr.t(), &fr.quotient);
    let (rp, rt) = (p.rank(), t.rank());
    let pp = tensor(p, p)?;
    let s2t = sym2(t);
    let pi = fr.pi();
    let phi = LatticeMap::from_fn(pp.rank(), s2t.rank(), |k| sym_product(rt, &pi.rows[k / rp], &pi.rows[k % rp]));
    let split: Vec<Option<usize>> = (0..pp.rank())
        .map(|k| {
            let (a, b) = (k / rp, k % rp);
            match (q.free_pos[a], q.free_pos[b]) {
                (Some(x), Some(y)) if a <= b => Some(sym2_index(rt, x, y)),
                _ => None,
            }
        })
        .collect();
    let mut ses = coordinate_split_kernel(&pp, &s2t, &phi, &split)?;
    ses.a = ses.a.clone().with_name("N''");
    Ok(ses)
}

/// The sequence `0 → ∧²Ŵ →f Ŵ⊗P̂ →f' N → 0` with
/// `f(a∧b) = a⊗ι(b) - b⊗ι(a)` and `f'(a⊗p) = ι(a)·p`.
pub fn n_sequence(fr: &FlasqueResolution) -> Result<LatticeSES> {
    let nseq = sym2_kernel_sequence(fr)?;
    n_sequence_from(fr, &nseq)
}

/// As [`n_sequence`], reusing a computed `N ⊆ S²P̂`.
pub fn n_sequence_from(fr: &FlasqueResolution, nseq: &LatticeSES) -> Result<LatticeSES> {
    let (w, p) = (fr.w(), fr.p());
    let (rw, rp) = (w.rank(), p.rank());
    let iota = fr.iota();
    let w2 = wedge2(w);
    let wp = tensor(w, p)?;
    let wpairs = wedge2_pairs(rw);
    let f = LatticeMap::from_fn(w2.rank(), wp.rank(), |k| {
        let (a, b) = wpairs[k];
        let x = tensor_product(rp, &SparseVec::unit(a), &iota.rows[b]);
        let y = tensor_product(rp, &SparseVec::unit(b), &iota.rows[a]);
        x.add_scaled(&y, &Int::from(-1))
    });
    let retract = nseq.retraction();
    let fp = LatticeMap::from_fn(wp.rank(), nseq.a.rank(), |k| {
        let (a, j) = (k / rp, k % rp);
        retract.apply(&sym_product(rp, &iota.rows[a], &SparseVec::unit(j)))
    });
    LatticeSES::new(w2, wp, nseq.a.clone(), f, fp)
}

/// The sequence `0 → Ŵ →φ ∧²Z[G] → ∧²Ŵ → 0` with `φ(b̄) = b∧N_G(1)`.
pub fn phi_sequence(group: &Arc<Group>) -> Result<LatticeSES> {
    let n = group.order();
    let w = norm_one_only(group);
    let zg = regular_lattice(group);
    let l2 = wedge2(&zg);
    let l2w = wedge2(&w);
    let norm = SparseVec::from_pairs((0..n).map(|g| (g, Int::one())).collect());
    let phi = LatticeMap::from_fn(n - 1, l2.rank(), |k| wedge_product(n, &SparseVec::unit(k + 1), &norm));
    let pairs = wedge2_pairs(n);
    let proj = LatticeMap::from_fn(l2.rank(), l2w.rank(), |k| {
        let (a, b) = pairs[k];
        wedge_product(n - 1, &bar(n, a), &bar(n, b))
    });
    LatticeSES::new(w, l2, l2w, phi, proj)
}

/// `H¹(H, L)` for the subgroup with the given elements, as the torsion of
/// the cokernel of `m ↦ (h·m - m)_{h ≠ 1}` on normalised 1-cochains.
pub fn h1_over(l: &GLattice, elements: &[usize]) -> FgAbGroup {
    let others: Vec<usize> = elements.iter().copied().filter(|&h| h != 0).collect();
    let r = l.rank;
    let rows: Vec<SparseVec> = (0..r)
        .map(|i| {
            let mut pairs = Vec::new();
            for (k, &h) in others.iter().enumerate() {
                for (j, a) in l.image(h, i).iter() {
                    pairs.push((k * r + j, a.clone()));
                }
                pairs.push((k * r + i, Int::from(-1)));
            }
            SparseVec::from_pairs(pairs)
        })
        .collect();
    sparse_cokernel(&rows, r * others.len()).torsion_part()
}

/// `H¹(H, L^*) = 0` for every subgroup `H`.
pub fn is_flasque(l: &GLattice) -> Result<bool> {
    let d = dual(l);
    Ok(subgroups(l.group())?.iter().all(|h| h1_over(&d, h.elements()).is_trivial()))
}

/// `H¹(H, L) = 0` for every subgroup `H`.
pub fn is_coflasque(l: &GLattice) -> Result<bool> {
    Ok(subgroups(l.group())?.iter().all(|h| h1_over(l, h.elements()).is_trivial()))
}

/// `Ĥ⁰(H, L) = L^H / N_H·L` over the subgroup with the given elements.
pub fn tate_h0_over(l: &GLattice, elements: &[usize]) -> FgAbGroup {
    let inv = invariants_under(l, elements);
    let norms = IntMatrix::from_rows(
        (0..l.rank).map(|i| l.norm_over(elements, &SparseVec::unit(i)).to_dense(l.rank)).collect(),
        l.rank,
    );
    crate::zlinalg::subquotient(&inv, &norms).expect("norms are invariant")
}

/// `Ĥ^{-1}(H, L) = ker N_H / I_H·L` over the subgroup with the given elements.
pub fn tate_hm1_over(l: &GLattice, elements: &[usize]) -> FgAbGroup {
    let r = l.rank;
    let norm_map = IntMatrix::from_rows(
        (0..r).map(|i| l.norm_over(elements, &SparseVec::unit(i)).to_dense(r)).collect(),
        r,
    );
    let ker = crate::zlinalg::kernel_basis(&norm_map);
    let mut aug = IntMatrix::zeros(0, r);
    for &h in elements.iter().filter(|&&h| h != 0) {
        for i in 0..r {
            aug.push_row(&l.image(h, i).add_scaled(&SparseVec::unit(i), &Int::from(-1)).to_dense(r));
        }
    }
    crate::zlinalg::subquotient(&ker, &aug).expect("augmentation ideal lies in the norm kernel")
}

/// `coker` of an integer matrix, re-exported for lattice-level callers.
pub fn lattice_cokernel(m: &IntMatrix) -> FgAbGroup {
    cokernel(m)
}
