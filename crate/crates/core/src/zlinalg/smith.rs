//! Smith normal form with unimodular transforms.

use super::{Int, IntMatrix};

/// `left * M * right` is diagonal with entries `d` (padded with zeros).
#[derive(Clone, Debug)]
pub struct SmithForm {
    /// Diagonal entries, length `min(rows, cols)`; nonzero ones come first and
    /// form a divisibility chain.
    pub d: Vec<Int>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.d.iter().take_while(|v| !v.is_zero()).count()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let mut left = IntMatrix::identity(m.rows());
    let mut right = IntMatrix::identity(m.cols());
    let d = run(m.clone(), Some(&mut left), Some(&mut right));
    SmithForm { d, left, right }
}

/// Smith form tracking only the row transform.
pub fn smith_left(m: &IntMatrix) -> (Vec<Int>, IntMatrix) {
    let mut left = IntMatrix::identity(m.rows());
    let d = run(m.clone(), Some(&mut left), None);
    (d, left)
}

/// Diagonal of the Smith form without transforms.
pub fn smith_diagonal(m: &IntMatrix) -> Vec<Int> {
    run(m.clone(), None, None)
}

fn run(mut a: IntMatrix, mut left: Option<&mut IntMatrix>, mut right: Option<&mut IntMatrix>) -> Vec<Int> {
    let (rows, cols) = (a.rows(), a.cols());
    let n = rows.min(cols);
    let mut d = vec![Int::zero(); n];
    for t in 0..n {
        loop {
            // smallest nonzero absolute value, then lowest (row, col)
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let v = &a[(i, j)];
                    if v.is_zero() {
                        continue;
                    }
                    let better = match best {
                        None => true,
                        Some(b) => v.cmp_abs(&a[b]) == std::cmp::Ordering::Less,
                    };
                    if better {
                        best = Some((i, j));
                        if v.is_unit() {
                            break;
                        }
                    }
                }
                if best.is_some_and(|b| a[b].is_unit()) {
                    break;
                }
            }
            let Some((pi, pj)) = best else {
                return d;
            };
            a.swap_rows(t, pi);
            if let Some(l) = left.as_deref_mut() {
                l.swap_rows(t, pi);
            }
            a.swap_cols(t, pj);
            if let Some(r) = right.as_deref_mut() {
                r.swap_cols(t, pj);
            }
            let p = a[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = a[(i, t)].div_round(&p);
                a.row_sub_mul(i, t, &q);
                if let Some(l) = left.as_deref_mut() {
                    l.row_sub_mul(i, t, &q);
                }
                if !a[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = a[(t, j)].div_round(&p);
                a.col_sub_mul(j, t, &q);
                if let Some(r) = right.as_deref_mut() {
                    r.col_sub_mul(j, t, &q);
                }
                if !a[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            if !p.is_unit() {
                let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !p.divides(&a[(i, j)])));
                if let Some(i) = bad {
                    // row_t += row_i
                    a.row_sub_mul(t, i, &Int::from(-1));
                    if let Some(l) = left.as_deref_mut() {
                        l.row_sub_mul(t, i, &Int::from(-1));
                    }
                    continue;
                }
            }
            break;
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            if let Some(l) = left.as_deref_mut() {
                l.negate_row(t);
            }
        }
        d[t] = a[(t, t)].clone();
    }
    d
}
