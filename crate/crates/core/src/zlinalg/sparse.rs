//! Sparse integer rows and elimination by unit pivots.
//!
//! Cochain complexes of group cohomology are large but extremely sparse and
//! mostly have `±1` entries; eliminating unit pivots first leaves a small
//! dense residue for the Smith form.

use std::collections::BTreeSet;

use rustc_hash::FxHashSet;

use super::abgroup::FgAbGroup;
use super::smith::smith_diagonal;
use super::{Int, IntMatrix};

/// Sparse vector: strictly increasing indices, no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, Int)>,
}

impl SparseVec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_dense(v: &[Int]) -> Self {
        SparseVec {
            entries: v
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (i, x.clone()))
                .collect(),
        }
    }

    /// Builds from unsorted `(index, value)` pairs, summing duplicates.
    pub fn from_pairs(mut pairs: Vec<(usize, Int)>) -> Self {
        pairs.sort_by_key(|p| p.0);
        let mut entries: Vec<(usize, Int)> = Vec::with_capacity(pairs.len());
        for (i, v) in pairs {
            match entries.last_mut() {
                Some((j, w)) if *j == i => *w += &v,
                _ => entries.push((i, v)),
            }
        }
        entries.retain(|(_, v)| !v.is_zero());
        SparseVec { entries }
    }

    pub fn unit(i: usize) -> Self {
        SparseVec {
            entries: vec![(i, Int::one())],
        }
    }

    pub fn entries(&self) -> &[(usize, Int)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> Int {
        match self.entries.binary_search_by_key(&i, |e| e.0) {
            Ok(k) => self.entries[k].1.clone(),
            Err(_) => Int::zero(),
        }
    }

    pub fn to_dense(&self, n: usize) -> Vec<Int> {
        let mut out = vec![Int::zero(); n];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn scale(&self, c: &Int) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec {
            entries: self.entries.iter().map(|(i, v)| (*i, v * c)).collect(),
        }
    }

    /// `self + q * other`.
    pub fn add_scaled(&self, other: &SparseVec, q: &Int) -> SparseVec {
        if q.is_zero() {
            return self.clone();
        }
        let (a, b) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, q * &b[j].1));
                j += 1;
            } else {
                let mut v = a[i].1.clone();
                v.add_mul(q, &b[j].1);
                if !v.is_zero() {
                    out.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        SparseVec { entries: out }
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, Int)> {
        self.entries.iter()
    }

    /// Renames indices through `f`, dropping those mapped to `None`.
    pub fn remap(&self, f: impl Fn(usize) -> Option<usize>) -> SparseVec {
        SparseVec::from_pairs(
            self.entries
                .iter()
                .filter_map(|(i, v)| f(*i).map(|j| (j, v.clone())))
                .collect(),
        )
    }
}

/// Working state of unit-pivot elimination on a list of rows.
struct Eliminator {
    rows: Vec<SparseVec>,
    alive: Vec<bool>,
    col_rows: Vec<FxHashSet<usize>>,
    col_alive: Vec<bool>,
    /// `(len, row)` for live rows that contain a unit entry.
    queue: BTreeSet<(usize, usize)>,
    queued_len: Vec<Option<usize>>,
}

impl Eliminator {
    fn new(rows: Vec<SparseVec>, ncols: usize) -> Self {
        let n = rows.len();
        let mut col_rows = vec![FxHashSet::default(); ncols];
        for (r, row) in rows.iter().enumerate() {
            for (c, _) in row.iter() {
                col_rows[*c].insert(r);
            }
        }
        let mut e = Eliminator {
            alive: rows.iter().map(|r| !r.is_empty()).collect(),
            rows,
            col_rows,
            col_alive: vec![true; ncols],
            queue: BTreeSet::new(),
            queued_len: vec![None; n],
        };
        for r in 0..n {
            e.requeue(r);
        }
        e
    }

    fn requeue(&mut self, r: usize) {
        if let Some(l) = self.queued_len[r].take() {
            self.queue.remove(&(l, r));
        }
        if self.alive[r] && self.rows[r].iter().any(|(_, v)| v.is_unit()) {
            let l = self.rows[r].len();
            self.queue.insert((l, r));
            self.queued_len[r] = Some(l);
        }
    }

    /// Pivots on unit entries until none remain. Returns the pivots
    /// `(row, col)` in elimination order. With `full`, pivot columns are
    /// also cleared from earlier pivot rows (Gauss-Jordan).
    fn run(&mut self, full: bool) -> Vec<(usize, usize)> {
        let mut pivots = Vec::new();
        while let Some(&(l, r)) = self.queue.iter().next() {
            self.queue.remove(&(l, r));
            self.queued_len[r] = None;
            let c = self.rows[r]
                .iter()
                .filter(|(_, v)| v.is_unit())
                .map(|(c, _)| *c)
                .min_by_key(|&c| (self.col_rows[c].len(), c))
                .expect("queued row has a unit");
            let p = self.rows[r].get(c);
            let mut others: Vec<usize> = self.col_rows[c].iter().copied().filter(|&o| o != r).collect();
            others.sort_unstable();
            for o in others {
                if !full && !self.alive[o] {
                    continue;
                }
                let q = -(&self.rows[o].get(c) * &p);
                let new = self.rows[o].add_scaled(&self.rows[r], &q);
                self.replace_row(o, new);
                self.requeue(o);
            }
            // in Gauss-Jordan mode retired rows stay indexed so later pivots clear them
            self.alive[r] = false;
            self.col_alive[c] = false;
            if !full {
                let old = std::mem::take(&mut self.rows[r]);
                for (cc, _) in old.iter() {
                    self.col_rows[*cc].remove(&r);
                }
                self.rows[r] = old;
            }
            pivots.push((r, c));
        }
        pivots
    }

    fn replace_row(&mut self, r: usize, new: SparseVec) {
        let old = std::mem::replace(&mut self.rows[r], new);
        for (c, _) in old.iter() {
            self.col_rows[*c].remove(&r);
        }
        for (c, _) in self.rows[r].iter() {
            self.col_rows[*c].insert(r);
        }
        if self.rows[r].is_empty() {
            self.alive[r] = false;
        }
    }

    /// Live rows restricted to live columns, as a dense matrix.
    fn residual(&self) -> (IntMatrix, Vec<usize>) {
        let cols: Vec<usize> = (0..self.col_alive.len()).filter(|&c| self.col_alive[c]).collect();
        let mut pos = vec![usize::MAX; self.col_alive.len()];
        for (k, &c) in cols.iter().enumerate() {
            pos[c] = k;
        }
        let mut m = IntMatrix::zeros(0, cols.len());
        for (r, row) in self.rows.iter().enumerate() {
            if !self.alive[r] {
                continue;
            }
            let mut dense = vec![Int::zero(); cols.len()];
            for (c, v) in row.iter() {
                debug_assert!(self.col_alive[*c]);
                dense[pos[*c]] = v.clone();
            }
            m.push_row(&dense);
        }
        (m, cols)
    }
}

/// `Z^ncols / span(rows)`.
pub fn sparse_cokernel(rows: &[SparseVec], ncols: usize) -> FgAbGroup {
    let mut e = Eliminator::new(rows.to_vec(), ncols);
    e.run(false);
    let (m, cols) = e.residual();
    let d = smith_diagonal(&m);
    let rank = d.iter().take_while(|v| !v.is_zero()).count();
    FgAbGroup::from_cyclic_orders(cols.len() - rank, &d[..rank])
}

/// Rank of the span of `rows` (over Q).
pub fn sparse_rank(rows: &[SparseVec], ncols: usize) -> usize {
    let mut e = Eliminator::new(rows.to_vec(), ncols);
    let pivots = e.run(false).len();
    let (m, _) = e.residual();
    pivots + smith_diagonal(&m).iter().take_while(|v| !v.is_zero()).count()
}

/// A sublattice `S ⊆ Z^n` with `Z^n / S` torsion-free, presented so that
/// the quotient map is explicit: `S` has a basis `e_s + Σ_f a_{s,f} e_f`
/// for pivot coordinates `s` and free coordinates `f`, and the quotient
/// `Z^n/S ≅ Z^free` sends `e_s ↦ -Σ_f a_{s,f} e_f`.
#[derive(Clone, Debug)]
pub struct UnitReduced {
    pub ncols: usize,
    /// Pivot coordinate of each basis row.
    pub pivot_cols: Vec<usize>,
    /// Basis rows, pivot entry `1`, zero in every other pivot coordinate.
    pub basis: Vec<SparseVec>,
    /// Coordinates not used as pivots, ascending.
    pub free_cols: Vec<usize>,
    /// Position of each coordinate in `free_cols`, if free.
    pub free_pos: Vec<Option<usize>>,
    /// Row index in `basis` for each pivot coordinate.
    pub pivot_row: Vec<Option<usize>>,
}

impl UnitReduced {
    /// Reduces `rows` by unit pivots. Returns `None` if some nonzero
    /// combination is left without a unit entry (the quotient may then have
    /// torsion, or a unimodular change of basis would be needed).
    pub fn new(rows: &[SparseVec], ncols: usize) -> Option<Self> {
        let mut e = Eliminator::new(rows.to_vec(), ncols);
        let pivots = e.run(true);
        if e.alive.iter().any(|&a| a) {
            return None;
        }
        let mut pivot_row = vec![None; ncols];
        let mut pivot_cols = Vec::with_capacity(pivots.len());
        let mut basis = Vec::with_capacity(pivots.len());
        for (k, &(r, c)) in pivots.iter().enumerate() {
            let row = &e.rows[r];
            let p = row.get(c);
            basis.push(if p.is_one() { row.clone() } else { row.scale(&p) });
            pivot_cols.push(c);
            pivot_row[c] = Some(k);
        }
        let free_cols: Vec<usize> = (0..ncols).filter(|&c| pivot_row[c].is_none()).collect();
        let mut free_pos = vec![None; ncols];
        for (k, &c) in free_cols.iter().enumerate() {
            free_pos[c] = Some(k);
        }
        Some(UnitReduced {
            ncols,
            pivot_cols,
            basis,
            free_cols,
            free_pos,
            pivot_row,
        })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn quotient_rank(&self) -> usize {
        self.free_cols.len()
    }

    /// Image of `x ∈ Z^n` in the quotient `Z^free`.
    pub fn project(&self, x: &SparseVec) -> SparseVec {
        let mut pairs = Vec::new();
        for (c, v) in x.iter() {
            if let Some(f) = self.free_pos[*c] {
                pairs.push((f, v.clone()));
            } else {
                let row = &self.basis[self.pivot_row[*c].unwrap()];
                for (cc, a) in row.iter() {
                    if let Some(f) = self.free_pos[*cc] {
                        pairs.push((f, -(a * v)));
                    }
                }
            }
        }
        SparseVec::from_pairs(pairs)
    }

    /// Coordinates of `x` in the basis, assuming `x ∈ S`.
    pub fn coords(&self, x: &SparseVec) -> SparseVec {
        SparseVec::from_pairs(
            x.iter()
                .filter_map(|(c, v)| self.pivot_row[*c].map(|k| (k, v.clone())))
                .collect(),
        )
    }

    /// Lift of a quotient vector: free coordinates placed back in `Z^n`.
    pub fn lift(&self, y: &SparseVec) -> SparseVec {
        y.remap(|f| Some(self.free_cols[f]))
    }
}

/// Rank of a set of rows modulo a prime `p`.
pub fn rank_mod_p(rows: &[SparseVec], p: u64) -> usize {
    independent_mod_p(rows, p).len()
}

/// Indices of a maximal subset of `rows` independent modulo `p`, chosen
/// greedily in order.
pub fn independent_mod_p(rows: &[SparseVec], p: u64) -> Vec<usize> {
    independent_mod_p_up_to(rows, p, usize::MAX)
}

/// As [`independent_mod_p`], stopping once `limit` rows are chosen.
pub fn independent_mod_p_up_to(rows: &[SparseVec], p: u64, limit: usize) -> Vec<usize> {
    let inv = |a: u64| -> u64 { pow_mod(a, p - 2, p) };
    // reduced rows keyed by leading column, each normalized to leading 1
    let mut basis: rustc_hash::FxHashMap<usize, Vec<(usize, u64)>> = Default::default();
    let mut chosen = Vec::new();
    for (idx, row) in rows.iter().enumerate() {
        if chosen.len() >= limit {
            break;
        }
        let mut v: std::collections::BTreeMap<usize, u64> = row
            .iter()
            .filter_map(|(c, x)| {
                let r = x.mod_u64(p);
                (r != 0).then_some((*c, r))
            })
            .collect();
        loop {
            let Some((lead, a)) = v.iter().find(|(c, _)| basis.contains_key(c)).map(|(&c, &a)| (c, a)) else {
                break;
            };
            let b = &basis[&lead];
            for &(c, bv) in b {
                let e = v.entry(c).or_insert(0);
                *e = (*e + p - (a * bv) % p) % p;
                if *e == 0 {
                    v.remove(&c);
                }
            }
        }
        if let Some((&lead, &a)) = v.iter().next() {
            let ai = inv(a);
            basis.insert(lead, v.into_iter().map(|(c, x)| (c, x * ai % p)).collect());
            chosen.push(idx);
        }
    }
    chosen
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % m;
        }
        a = a * a % m;
        e >>= 1;
    }
    r
}
