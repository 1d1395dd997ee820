//! The decomposable subgroup `Dec(A) ⊆ S²(A)^G` and the quotient
//! `S²(A)^G / Dec(A)`.
//!
//! `Dec(A)` is generated by the products of invariants and by the quadratic
//! traces `Qtr_H(a) = Σ_{i<j} σ_i(a)·σ_j(a)` over all subgroups `H` and
//! `a ∈ A^H`, where `σ_i` runs over left coset representatives of `H`.
//! Since `Qtr_H(a + b) - Qtr_H(a) - Qtr_H(b) = Tr_H(a)·Tr_H(b) - Tr_H(a·b)`
//! and `Tr_H(a·a) = Tr_H(a)² - 2·Qtr_H(a)`, the finite set
//!
//! * `u·v` for `u, v` in a basis of `A^G`,
//! * `Qtr_H(e_k)` and `Tr_H^G(e_k·e_l)`, `k < l`, for a basis `e` of `A^H`,
//!
//! generates the same subgroup.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::glattice::{invariants_basis, invariants_under, sym2, sym_product, GLattice};
use crate::groups::{coset_reps, subgroups, Subgroup};
use crate::zlinalg::{sparse_cokernel, FgAbGroup, HermiteBasis, Int, SparseVec};
use crate::{Error, Result};

const FINGERPRINT_PRIME: u64 = (1 << 61) - 1;

/// `Qtr_H(a)` in `S²(A)` for `a ∈ A^H`.
pub fn qtr(a_lat: &GLattice, h: &Subgroup, a: &SparseVec) -> Result<SparseVec> {
    if h.elements().iter().any(|&x| a_lat.act(x, a) != *a) {
        return Err(Error::InvalidInput("element is not fixed by the subgroup".into()));
    }
    let reps = coset_reps(a_lat.group(), h)?;
    let images: Vec<SparseVec> = reps.iter().map(|&s| a_lat.act(s, a)).collect();
    let r = a_lat.rank();
    let mut pairs = Vec::new();
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            pairs.extend(sym_product(r, &images[i], &images[j]).entries().iter().cloned());
        }
    }
    Ok(SparseVec::from_pairs(pairs))
}

/// `Tr_H^G(u·v) = Σ_i σ_i(u)·σ_i(v)` for `u, v ∈ A^H`.
pub fn trace_product(a_lat: &GLattice, reps: &[usize], u: &SparseVec, v: &SparseVec) -> SparseVec {
    let r = a_lat.rank();
    let mut pairs = Vec::new();
    for &s in reps {
        pairs.extend(sym_product(r, &a_lat.act(s, u), &a_lat.act(s, v)).entries().iter().cloned());
    }
    SparseVec::from_pairs(pairs)
}

/// `Dec(A)` inside `S²(A)^G`, held in coordinates of a basis of the invariants.
#[derive(Clone, Debug)]
pub struct DecSubgroup {
    lattice: GLattice,
    /// basis of `S²(A)^G` in `S²(A)` coordinates
    invariants: HermiteBasis,
    /// `Dec(A)` in coordinates of `invariants`
    span: HermiteBasis,
    generator_count: usize,
}

impl DecSubgroup {
    pub fn lattice(&self) -> &GLattice {
        &self.lattice
    }

    /// Rank of `S²(A)^G`.
    pub fn invariant_rank(&self) -> usize {
        self.invariants.rank()
    }

    /// Basis of `S²(A)^G` in `S²(A)` coordinates.
    pub fn invariants(&self) -> &HermiteBasis {
        &self.invariants
    }

    /// Basis of `Dec(A)` in coordinates of [`invariants`](Self::invariants).
    pub fn span(&self) -> &HermiteBasis {
        &self.span
    }

    /// Number of generators produced before reduction.
    pub fn generator_count(&self) -> usize {
        self.generator_count
    }

    /// Coordinates of an element of `S²(A)` in the basis of `S²(A)^G`.
    pub fn invariant_coords(&self, x: &SparseVec) -> Result<Vec<Int>> {
        self.invariants
            .coords(&x.to_dense(self.invariants.dim()))
            .ok_or_else(|| Error::NotContained("element is not invariant".into()))
    }

    /// Exact membership of an element of `S²(A)` in `Dec(A)`.
    pub fn contains(&self, x: &SparseVec) -> Result<bool> {
        Ok(self.span.contains(&self.invariant_coords(x)?))
    }

    /// `S²(A)^G / Dec(A)`.
    pub fn quotient(&self) -> FgAbGroup {
        let rows: Vec<SparseVec> = self.span.rows().iter().map(|r| SparseVec::from_dense(r)).collect();
        sparse_cokernel(&rows, self.invariants.rank())
    }
}

/// Random linear functional on `S²(A)` modulo a large prime, used to
/// certify invariance and basis coordinates of many generators cheaply.
struct Fingerprint {
    w: Vec<u64>,
    /// for each group generator `σ`: `i ↦ w(σ·e_i) - w(e_i)`
    moved: Vec<Vec<u64>>,
    /// `w` on the rows of the invariant basis
    basis: Vec<u64>,
}

fn modp(x: &Int) -> u64 {
    x.mod_u64(FINGERPRINT_PRIME)
}

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % FINGERPRINT_PRIME as u128) as u64
}

fn addmod(a: u64, b: u64) -> u64 {
    (a + b) % FINGERPRINT_PRIME
}

impl Fingerprint {
    fn new(s2: &GLattice, invariants: &HermiteBasis) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_dec0);
        let w: Vec<u64> = (0..s2.rank()).map(|_| rng.gen_range(0..FINGERPRINT_PRIME)).collect();
        let moved = s2
            .group()
            .generators()
            .iter()
            .map(|&g| {
                (0..s2.rank())
                    .map(|i| addmod(Self::eval_with(&w, s2.image(g, i)), FINGERPRINT_PRIME - w[i]))
                    .collect()
            })
            .collect();
        let basis = invariants
            .rows()
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&w)
                    .filter(|(x, _)| !x.is_zero())
                    .fold(0, |acc, (x, &wi)| addmod(acc, mulmod(modp(x), wi)))
            })
            .collect();
        Fingerprint { w, moved, basis }
    }

    fn eval_with(w: &[u64], x: &SparseVec) -> u64 {
        x.iter().fold(0, |acc, (i, c)| addmod(acc, mulmod(modp(c), w[*i])))
    }

    fn is_invariant(&self, x: &SparseVec) -> bool {
        self.moved.iter().all(|m| Self::eval_with(m, x) == 0)
    }

    fn matches(&self, x: &SparseVec, coords: &[Int]) -> bool {
        let lhs = Self::eval_with(&self.w, x);
        let rhs = coords
            .iter()
            .zip(&self.basis)
            .fold(0, |acc, (c, &b)| addmod(acc, mulmod(modp(c), b)));
        lhs == rhs
    }
}

/// Generators of `Dec(A)` reduced to a basis of their span.
pub fn dec_generators(a_lat: &GLattice) -> Result<DecSubgroup> {
    let group = a_lat.group();
    let r = a_lat.rank();
    let s2 = sym2(a_lat);
    let invariants = HermiteBasis::from_matrix(&invariants_basis(&s2));
    let fp = Fingerprint::new(&s2, &invariants);
    let to_coords = |x: &SparseVec| -> Result<Vec<Int>> {
        if !fp.is_invariant(x) {
            return Err(Error::Internal("decomposable generator is not invariant".into()));
        }
        let piv = invariants.pivots().iter().map(|&c| x.get(c)).collect();
        let c = invariants.coords_from_pivot_values(piv);
        if !fp.matches(x, &c) {
            return Err(Error::Internal("decomposable generator is outside the invariant lattice".into()));
        }
        Ok(c)
    };

    // products of invariants
    let inv_a: Vec<SparseVec> = HermiteBasis::from_matrix(&invariants_basis(a_lat))
        .rows()
        .iter()
        .map(|v| SparseVec::from_dense(v))
        .collect();
    let mut batches: Vec<Vec<Vec<Int>>> = Vec::new();
    let products: Vec<Vec<Int>> = (0..inv_a.len())
        .flat_map(|k| (k..inv_a.len()).map(move |l| (k, l)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(k, l)| to_coords(&sym_product(r, &inv_a[k], &inv_a[l])))
        .collect::<Result<_>>()?;
    batches.push(products);

    // quadratic traces and traces of products, by increasing index
    let mut subs = subgroups(group)?;
    subs.reverse();
    let per_subgroup: Vec<Vec<Vec<Int>>> = subs
        .par_iter()
        .filter(|h| h.order() < group.order())
        .map(|h| -> Result<Vec<Vec<Int>>> {
            let reps = coset_reps(group, h)?;
            let basis: Vec<SparseVec> = HermiteBasis::from_matrix(&invariants_under(a_lat, h.elements()))
                .rows()
                .iter()
                .map(|v| SparseVec::from_dense(v))
                .collect();
            let mut out = Vec::new();
            for (k, e) in basis.iter().enumerate() {
                out.push(to_coords(&qtr(a_lat, h, e)?)?);
                for f in &basis[k + 1..] {
                    out.push(to_coords(&trace_product(a_lat, &reps, e, f))?);
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    batches.extend(per_subgroup);

    let generator_count = batches.iter().map(Vec::len).sum();
    let span = reduce_span(invariants.rank(), batches);
    Ok(DecSubgroup {
        lattice: a_lat.clone(),
        invariants,
        span,
        generator_count,
    })
}

/// Hermite basis of the span of many vectors, merging per-batch bases.
fn reduce_span(dim: usize, batches: Vec<Vec<Vec<Int>>>) -> HermiteBasis {
    let partial: Vec<HermiteBasis> = batches
        .into_par_iter()
        .map(|b| {
            let mut h = HermiteBasis::new(dim);
            for v in b {
                h.insert(v);
            }
            h
        })
        .collect();
    let mut out = HermiteBasis::new(dim);
    for h in partial {
        for row in h.rows() {
            out.insert(row.clone());
        }
    }
    out.normalize();
    out
}

/// `S²(A)^G / Dec(A)`.
pub fn s2_mod_dec(a_lat: &GLattice) -> Result<FgAbGroup> {
    Ok(dec_generators(a_lat)?.quotient())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glattice::{direct_sum, flasque_resolution, permutation_lattice, regular_lattice, trivial_lattice};
    use crate::groups::Group;
    use std::sync::Arc;

    fn ab(f: &[u64]) -> Arc<Group> {
        Arc::new(Group::from_cyclic_factors(f).unwrap())
    }

    #[test]
    fn qtr_examples() {
        let g = ab(&[2]);
        let zg = regular_lattice(&g);
        let e = SparseVec::unit(0);
        // e·g is the basis element (0, 1) of S², index 1
        assert_eq!(qtr(&zg, &Subgroup::trivial(), &e).unwrap(), SparseVec::unit(1));
        let norm = SparseVec::from_dense(&[Int::one(), Int::one()]);
        assert!(qtr(&zg, &Subgroup::whole(&g), &norm).unwrap().is_empty());
        assert!(qtr(&zg, &Subgroup::whole(&g), &e).is_err());
        let two = e.scale(&Int::from(2));
        assert_eq!(qtr(&zg, &Subgroup::trivial(), &two).unwrap(), qtr(&zg, &Subgroup::trivial(), &e).unwrap().scale(&Int::from(4)));
    }

    #[test]
    fn trivial_and_permutation_lattices() {
        let g = ab(&[3]);
        let z = trivial_lattice(&g, 1);
        let dec = dec_generators(&z).unwrap();
        assert_eq!(dec.invariant_rank(), 1);
        assert!(dec.quotient().is_trivial());
        assert!(s2_mod_dec(&regular_lattice(&ab(&[2]))).unwrap().is_trivial());
        let g = ab(&[2, 2]);
        for h in subgroups(&g).unwrap() {
            let p = permutation_lattice(&g, &h).unwrap();
            assert!(s2_mod_dec(&p).unwrap().is_trivial());
            let pz = direct_sum(&p, &regular_lattice(&g)).unwrap();
            assert!(s2_mod_dec(&pz).unwrap().is_trivial());
        }
    }

    #[test]
    fn cyclic_flasque_quotient_is_trivial() {
        for n in [3u64, 4, 5] {
            let fr = flasque_resolution(&ab(&[n])).unwrap();
            assert!(s2_mod_dec(fr.t()).unwrap().is_trivial());
        }
    }

    #[test]
    fn qtr_of_sums_lies_in_dec() {
        let g = ab(&[3, 3]);
        let fr = flasque_resolution(&g).unwrap();
        let dec = dec_generators(fr.t()).unwrap();
        for h in subgroups(&g).unwrap() {
            let basis = HermiteBasis::from_matrix(&invariants_under(fr.t(), h.elements()));
            let rows: Vec<SparseVec> = basis.rows().iter().map(|v| SparseVec::from_dense(v)).collect();
            if rows.len() < 2 {
                continue;
            }
            let a = rows[0].add_scaled(&rows[1], &Int::from(-2));
            assert!(dec.contains(&qtr(fr.t(), &h, &a).unwrap()).unwrap());
        }
    }
}
