//! Hermite forms, kernels, saturation and linear solving over Z.

use super::smith::{smith_left, smith_normal_form};
use super::{Int, IntMatrix};
use crate::{Error, Result};

/// Sublattice of `Z^n` held as a basis in row Hermite normal form: echelon
/// with positive pivots and entries above each pivot reduced into `[0, pivot)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermiteBasis {
    dim: usize,
    rows: Vec<Vec<Int>>,
    pivots: Vec<usize>,
}

impl HermiteBasis {
    pub fn new(dim: usize) -> Self {
        HermiteBasis {
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_rows<'a>(dim: usize, rows: impl IntoIterator<Item = &'a [Int]>) -> Self {
        let mut h = Self::new(dim);
        for r in rows {
            h.insert(r.to_vec());
        }
        h.normalize();
        h
    }

    pub fn from_matrix(m: &IntMatrix) -> Self {
        Self::from_rows(m.cols(), (0..m.rows()).map(|r| m.row(r)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Int>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn to_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(self.rows.clone(), self.dim)
    }

    /// Adds a vector to the spanning set, keeping the echelon shape.
    /// Entries above pivots are not reduced until [`normalize`](Self::normalize).
    pub fn insert(&mut self, mut x: Vec<Int>) {
        assert_eq!(x.len(), self.dim);
        let mut start = 0;
        loop {
            let Some(lc) = (start..self.dim).find(|&c| !x[c].is_zero()) else {
                return;
            };
            match self.pivots.binary_search(&lc) {
                Err(pos) => {
                    if x[lc].is_negative() {
                        x.iter_mut().for_each(|v| *v = -&*v);
                    }
                    self.rows.insert(pos, x);
                    self.pivots.insert(pos, lc);
                    return;
                }
                Ok(pos) => {
                    let h = &self.rows[pos];
                    let a = h[lc].clone();
                    let b = x[lc].clone();
                    if a.divides(&b) {
                        let q = b.div_exact(&a);
                        for (xv, hv) in x.iter_mut().zip(h).skip(lc) {
                            if !hv.is_zero() {
                                xv.sub_mul(&q, hv);
                            }
                        }
                    } else {
                        let (g, s, t) = Int::ext_gcd(&a, &b);
                        let (ag, bg) = (a.div_exact(&g), b.div_exact(&g));
                        let h = &mut self.rows[pos];
                        for c in lc..self.dim {
                            let (hv, xv) = (h[c].clone(), x[c].clone());
                            if hv.is_zero() && xv.is_zero() {
                                continue;
                            }
                            h[c] = &(&s * &hv) + &(&t * &xv);
                            x[c] = &(&ag * &xv) - &(&bg * &hv);
                        }
                    }
                    start = lc + 1;
                }
            }
        }
    }

    /// Reduces entries above pivots into `[0, pivot)`.
    pub fn normalize(&mut self) {
        for i in (0..self.rows.len()).rev() {
            let c = self.pivots[i];
            let (upper, lower) = self.rows.split_at_mut(i);
            let piv_row = &lower[0];
            let p = &piv_row[c];
            for row in upper.iter_mut() {
                if row[c].is_zero() {
                    continue;
                }
                let q = row[c].div_floor(p);
                if q.is_zero() {
                    continue;
                }
                for (rv, pv) in row.iter_mut().zip(piv_row).skip(c) {
                    if !pv.is_zero() {
                        rv.sub_mul(&q, pv);
                    }
                }
            }
        }
    }

    /// Coordinates of `x` in this basis, or `None` when `x` is not in the lattice.
    pub fn coords(&self, x: &[Int]) -> Option<Vec<Int>> {
        assert_eq!(x.len(), self.dim);
        let mut r = x.to_vec();
        let mut out = Vec::with_capacity(self.rows.len());
        let mut prev = 0;
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            if r[prev..c].iter().any(|v| !v.is_zero()) {
                return None;
            }
            let p = &row[c];
            if !p.divides(&r[c]) {
                return None;
            }
            let q = r[c].div_exact(p);
            if !q.is_zero() {
                for (rv, hv) in r.iter_mut().zip(row).skip(c) {
                    if !hv.is_zero() {
                        rv.sub_mul(&q, hv);
                    }
                }
            }
            out.push(q);
            prev = c + 1;
        }
        if r[prev..].iter().any(|v| !v.is_zero()) {
            return None;
        }
        Some(out)
    }

    pub fn contains(&self, x: &[Int]) -> bool {
        self.coords(x).is_some()
    }

    /// Coordinates computed from the pivot entries only, assuming membership.
    /// Cheaper than [`coords`](Self::coords) when the vector is known to lie
    /// in the lattice; membership is still checked in debug builds.
    pub fn coords_unchecked(&self, x: &[Int]) -> Vec<Int> {
        let out = self.coords_from_pivot_values(self.pivots.iter().map(|&c| x[c].clone()).collect());
        debug_assert_eq!(self.coords(x).as_ref(), Some(&out), "vector not in lattice");
        out
    }

    /// Coordinates of a lattice vector from its entries at the pivot
    /// columns alone. The caller guarantees membership.
    pub fn coords_from_pivot_values(&self, mut piv: Vec<Int>) -> Vec<Int> {
        let k = self.rows.len();
        assert_eq!(piv.len(), k);
        let mut out = Vec::with_capacity(k);
        for i in 0..k {
            let q = piv[i].div_exact(&self.rows[i][self.pivots[i]]);
            if !q.is_zero() {
                for j in i + 1..k {
                    let h = &self.rows[i][self.pivots[j]];
                    if !h.is_zero() {
                        piv[j].sub_mul(&q, h);
                    }
                }
            }
            out.push(q);
        }
        out
    }
}

/// Row Hermite normal form; zero rows are dropped.
pub fn hermite_normal_form(m: &IntMatrix) -> IntMatrix {
    HermiteBasis::from_matrix(m).to_matrix()
}

/// Basis of the integer left kernel `{x : x M = 0}`, in Hermite form.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    if m.cols() == 0 {
        return IntMatrix::identity(m.rows());
    }
    let (d, left) = smith_left(m);
    let rank = d.iter().take_while(|v| !v.is_zero()).count();
    let idx: Vec<usize> = (rank..m.rows()).collect();
    hermite_normal_form(&left.select_rows(&idx))
}

/// Basis (Hermite form) of the saturation `Q·span(rows) ∩ Z^n`.
pub fn saturate(m: &IntMatrix) -> IntMatrix {
    if m.rows() == 0 {
        return IntMatrix::zeros(0, m.cols());
    }
    let (d, left) = smith_left(m);
    let lm = left.mul(m);
    let mut rows = Vec::new();
    for (i, di) in d.iter().enumerate() {
        if di.is_zero() {
            break;
        }
        rows.push(lm.row(i).iter().map(|v| v.div_exact(di)).collect());
    }
    hermite_normal_form(&IntMatrix::from_rows(rows, m.cols()))
}

/// An integer solution of `x M = b`, if one exists.
pub fn solve(m: &IntMatrix, b: &[Int]) -> Option<Vec<Int>> {
    assert_eq!(b.len(), m.cols());
    let s = smith_normal_form(m);
    let br = s.right.transpose().apply_col(b);
    let mut y = vec![Int::zero(); m.rows()];
    for (j, v) in br.iter().enumerate() {
        let dj = s.d.get(j).cloned().unwrap_or_else(Int::zero);
        if dj.is_zero() {
            if !v.is_zero() {
                return None;
            }
        } else {
            if !dj.divides(v) {
                return None;
            }
            y[j] = v.div_exact(&dj);
        }
    }
    Some(s.left.apply(&y))
}

impl IntMatrix {
    /// Matrix times column vector.
    pub fn apply_col(&self, x: &[Int]) -> Vec<Int> {
        assert_eq!(x.len(), self.cols());
        (0..self.rows())
            .map(|r| {
                let mut acc = Int::zero();
                for (a, b) in self.row(r).iter().zip(x) {
                    if !a.is_zero() && !b.is_zero() {
                        acc.add_mul(a, b);
                    }
                }
                acc
            })
            .collect()
    }
}

/// Expresses every row of `sub` in the basis `basis`; fails when a row is
/// outside the lattice.
pub fn coordinates_in(basis: &HermiteBasis, sub: &IntMatrix) -> Result<IntMatrix> {
    let mut rows = Vec::with_capacity(sub.rows());
    for r in 0..sub.rows() {
        match basis.coords(sub.row(r)) {
            Some(c) => rows.push(c),
            None => {
                return Err(Error::NotContained(format!(
                    "row {r} of the denominator is not in the numerator lattice"
                )))
            }
        }
    }
    Ok(IntMatrix::from_rows(rows, basis.rank()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64(rows)
    }

    #[test]
    fn kernel_of_column() {
        // 2x + 3y = 0
        let k = kernel_basis(&m(&[&[2], &[3]]));
        assert_eq!(k.rows(), 1);
        let row: Vec<i64> = k.row(0).iter().map(|v| v.to_i64().unwrap()).collect();
        assert!(row == vec![3, -2] || row == vec![-3, 2]);
    }

    #[test]
    fn kernel_identity_and_zero() {
        assert_eq!(kernel_basis(&IntMatrix::identity(3)).rows(), 0);
        assert_eq!(kernel_basis(&IntMatrix::zeros(2, 2)).rows(), 2);
    }

    #[test]
    fn saturation_recovers_primitive_vector() {
        let s = saturate(&m(&[&[2, 4, 6]]));
        assert_eq!(s, m(&[&[1, 2, 3]]));
        let s = saturate(&m(&[&[1, 1, 0], &[1, -1, 0]]));
        assert_eq!(s, m(&[&[1, 0, 0], &[0, 1, 0]]));
    }

    #[test]
    fn hermite_is_canonical() {
        let a = hermite_normal_form(&m(&[&[2, 3], &[4, 1]]));
        let b = hermite_normal_form(&m(&[&[6, 4], &[2, 3]]));
        assert_eq!(a, b);
        assert_eq!(a, m(&[&[2, 3], &[0, 5]]));
    }

    #[test]
    fn coords_roundtrip() {
        let h = HermiteBasis::from_matrix(&m(&[&[2, 3, 1], &[0, 5, 2]]));
        let x: Vec<Int> = [4, 1, 0].iter().map(|&v| Int::from(v)).collect();
        let c = h.coords(&x).unwrap();
        let back = h.to_matrix().apply(&c);
        assert_eq!(back, x);
        assert_eq!(h.coords_unchecked(&x), c);
        assert!(!h.contains(&[Int::from(1), Int::zero(), Int::zero()]));
    }

    #[test]
    fn solve_linear_system() {
        let a = m(&[&[2, 0], &[0, 3], &[1, 1]]);
        let b = vec![Int::from(5), Int::from(7)];
        let x = solve(&a, &b).unwrap();
        assert_eq!(a.apply(&x), b);
        assert!(solve(&m(&[&[2]]), &[Int::from(3)]).is_none());
    }
}
