use std::fmt;

use serde::{Deserialize, Serialize};

use super::hermite::{coordinates_in, kernel_basis, HermiteBasis};
use super::smith::smith_diagonal;
use super::sparse::{sparse_cokernel, SparseVec};
use super::{Int, IntMatrix};
use crate::{Error, Result};

/// Finitely generated abelian group `Z^free_rank ⊕ Z/t_1 ⊕ ... ⊕ Z/t_k`
/// with `t_1 | t_2 | ... | t_k` and every `t_i >= 2`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct FgAbGroup {
    pub free_rank: usize,
    pub torsion: Vec<Int>,
}

impl FgAbGroup {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        FgAbGroup {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    pub fn cyclic(n: impl Into<Int>) -> Self {
        Self::from_cyclic_orders(0, &[n.into()])
    }

    /// Canonical form of `Z^free ⊕ ⨁ Z/orders[i]`. Orders `0` count as free
    /// summands and orders `±1` are dropped.
    pub fn from_cyclic_orders(free: usize, orders: &[Int]) -> Self {
        let mut extra_free = 0;
        let diag: Vec<Int> = orders
            .iter()
            .filter_map(|o| {
                if o.is_zero() {
                    extra_free += 1;
                    None
                } else if o.is_unit() {
                    None
                } else {
                    Some(o.abs())
                }
            })
            .collect();
        let torsion = if diag.iter().all(|d| d.divides(diag.last().unwrap()))
            && diag.windows(2).all(|w| w[0].divides(&w[1]))
        {
            diag
        } else {
            smith_diagonal(&IntMatrix::diagonal(&diag))
                .into_iter()
                .filter(|d| !d.is_unit())
                .collect()
        };
        FgAbGroup {
            free_rank: free + extra_free,
            torsion,
        }
    }

    pub fn from_u64(free: usize, orders: &[u64]) -> Self {
        let o: Vec<Int> = orders.iter().map(|&v| Int::from(v)).collect();
        Self::from_cyclic_orders(free, &o)
    }

    /// Group with the given invariant factors; rejects non-canonical input.
    pub fn new(free_rank: usize, torsion: Vec<Int>) -> Result<Self> {
        if torsion.iter().any(|t| t < &Int::from(2)) {
            return Err(Error::InvalidInput("torsion coefficients must be >= 2".into()));
        }
        if !torsion.windows(2).all(|w| w[0].divides(&w[1])) {
            return Err(Error::InvalidInput("torsion coefficients must form a divisibility chain".into()));
        }
        Ok(FgAbGroup { free_rank, torsion })
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> Int {
        self.torsion.iter().fold(Int::one(), |a, b| &a * b)
    }

    pub fn order(&self) -> Option<Int> {
        self.is_finite().then(|| self.torsion_order())
    }

    pub fn exponent(&self) -> Int {
        self.torsion.last().cloned().unwrap_or_else(Int::one)
    }

    pub fn torsion_part(&self) -> FgAbGroup {
        FgAbGroup {
            free_rank: 0,
            torsion: self.torsion.clone(),
        }
    }

    pub fn direct_sum(&self, other: &FgAbGroup) -> FgAbGroup {
        let mut t = self.torsion.clone();
        t.extend(other.torsion.iter().cloned());
        Self::from_cyclic_orders(self.free_rank + other.free_rank, &t)
    }

    pub fn power(&self, k: usize) -> FgAbGroup {
        (0..k).fold(FgAbGroup::trivial(), |acc, _| acc.direct_sum(self))
    }

    /// `true` when `n` kills the torsion and there is no free part.
    pub fn is_killed_by(&self, n: &Int) -> bool {
        self.is_finite() && self.torsion.iter().all(|t| t.divides(n))
    }

    /// Prime-to-`p` part of the torsion.
    pub fn prime_to(&self, p: u64) -> FgAbGroup {
        let pi = Int::from(p);
        let orders: Vec<Int> = self
            .torsion
            .iter()
            .map(|t| {
                let mut t = t.clone();
                while pi.divides(&t) {
                    t = t.div_exact(&pi);
                }
                t
            })
            .collect();
        Self::from_cyclic_orders(0, &orders)
    }

    /// Elementary divisors as `(prime, exponent)` pairs.
    pub fn elementary_divisors(&self) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        for t in &self.torsion {
            let mut t = t.to_u64().expect("elementary divisors need machine-size torsion");
            let mut p = 2;
            while p * p <= t {
                let mut e = 0;
                while t % p == 0 {
                    t /= p;
                    e += 1;
                }
                if e > 0 {
                    out.push((p, e));
                }
                p += 1;
            }
            if t > 1 {
                out.push((t, 1));
            }
        }
        out.sort_unstable();
        out
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        if self.free_rank == 1 {
            parts.push("Z".to_string());
        } else if self.free_rank > 1 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        let mut i = 0;
        while i < self.torsion.len() {
            let mut j = i;
            while j < self.torsion.len() && self.torsion[j] == self.torsion[i] {
                j += 1;
            }
            if j - i == 1 {
                parts.push(format!("Z/{}", self.torsion[i]));
            } else {
                parts.push(format!("(Z/{})^{}", self.torsion[i], j - i));
            }
            i = j;
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FgAbGroup({self})")
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `Z^cols / rowspan(M)` in canonical form.
pub fn cokernel(m: &IntMatrix) -> FgAbGroup {
    let rows: Vec<SparseVec> = (0..m.rows()).map(|r| SparseVec::from_dense(m.row(r))).collect();
    sparse_cokernel(&rows, m.cols())
}

/// `span(numerator) / span(denominator)`; fails when the denominator is not
/// contained in the numerator.
pub fn subquotient(numerator: &IntMatrix, denominator: &IntMatrix) -> Result<FgAbGroup> {
    if numerator.cols() != denominator.cols() && denominator.rows() > 0 {
        return Err(Error::InvalidInput(format!(
            "column mismatch: {} vs {}",
            numerator.cols(),
            denominator.cols()
        )));
    }
    let basis = HermiteBasis::from_matrix(numerator);
    let coords = coordinates_in(&basis, denominator)?;
    Ok(cokernel(&coords))
}

/// The `p`-primary part `A{p}`; the free rank is dropped.
pub fn p_primary(a: &FgAbGroup, p: u64) -> Result<FgAbGroup> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let pi = Int::from(p);
    let orders: Vec<Int> = a
        .torsion
        .iter()
        .map(|t| {
            let mut t = t.clone();
            let mut part = Int::one();
            while pi.divides(&t) {
                t = t.div_exact(&pi);
                part = &part * &pi;
            }
            part
        })
        .collect();
    Ok(FgAbGroup::from_cyclic_orders(0, &orders))
}

/// Kernel of a homomorphism between finite groups given in Smith
/// coordinates: `source = ⨁ Z/a_i`, `target = ⨁ Z/b_j`, and row `i` of
/// `map` is the image of the `i`-th source generator.
pub fn hom_kernel(source: &[Int], target: &[Int], map: &IntMatrix) -> Result<FgAbGroup> {
    let k = source.len();
    assert_eq!(map.rows(), k);
    assert_eq!(map.cols(), target.len());
    // x in Z^k with x*map in rowspan(diag(target))
    let stacked = map.vstack(&IntMatrix::diagonal(target));
    let ker = kernel_basis(&stacked);
    let proj = ker.select_cols(&(0..k).collect::<Vec<_>>());
    subquotient(&proj, &IntMatrix::diagonal(source))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64(rows)
    }

    #[test]
    fn cokernel_examples() {
        assert_eq!(cokernel(&m(&[&[5]])), FgAbGroup::cyclic(5));
        assert_eq!(cokernel(&m(&[&[2, 0], &[0, 3]])), FgAbGroup::cyclic(6));
        assert_eq!(cokernel(&IntMatrix::zeros(0, 3)), FgAbGroup::free(3));
    }

    #[test]
    fn subquotient_examples() {
        let q = subquotient(&m(&[&[1, 0], &[0, 1]]), &m(&[&[2, 0], &[0, 2]])).unwrap();
        assert_eq!(q, FgAbGroup::from_u64(0, &[2, 2]));
        let a = m(&[&[3, 1], &[0, 2]]);
        assert!(subquotient(&a, &a).unwrap().is_trivial());
        let q = subquotient(&m(&[&[1, 0]]), &IntMatrix::zeros(0, 2)).unwrap();
        assert_eq!(q, FgAbGroup::free(1));
        assert!(matches!(
            subquotient(&m(&[&[2, 0]]), &m(&[&[1, 0]])),
            Err(Error::NotContained(_))
        ));
    }

    #[test]
    fn p_primary_examples() {
        assert_eq!(p_primary(&FgAbGroup::cyclic(6), 3).unwrap(), FgAbGroup::cyclic(3));
        assert!(p_primary(&FgAbGroup::from_u64(0, &[4, 8]), 3).unwrap().is_trivial());
        assert_eq!(p_primary(&FgAbGroup::cyclic(45), 3).unwrap(), FgAbGroup::cyclic(9));
        assert!(matches!(p_primary(&FgAbGroup::cyclic(6), 4), Err(Error::NotPrime(4))));
    }

    #[test]
    fn canonical_form() {
        assert_eq!(FgAbGroup::from_u64(0, &[2, 3]), FgAbGroup::cyclic(6));
        assert_eq!(FgAbGroup::from_u64(0, &[4, 2, 2]).torsion, vec![Int::from(2), Int::from(2), Int::from(4)]);
        assert_eq!(FgAbGroup::from_u64(0, &[3, 9]).to_string(), "Z/3 + Z/9");
        assert_eq!(FgAbGroup::from_u64(1, &[2, 2]).to_string(), "Z + (Z/2)^2");
    }

    #[test]
    fn kernel_of_multiplication_by_two() {
        // Z/4 --x2--> Z/4 has kernel Z/2
        let k = hom_kernel(&[Int::from(4)], &[Int::from(4)], &m(&[&[2]])).unwrap();
        assert_eq!(k, FgAbGroup::cyclic(2));
        // Z/6 -> Z/2 reduction has kernel Z/3
        let k = hom_kernel(&[Int::from(6)], &[Int::from(2)], &m(&[&[1]])).unwrap();
        assert_eq!(k, FgAbGroup::cyclic(3));
    }
}
