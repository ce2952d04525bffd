//! Exact sparse linear algebra: vectors, column-major matrices, and an
//! incremental fully reduced echelon structure supporting rank, kernel,
//! membership, and solving, over any `Field`.
//!
//! The echelon keeps one column per pivot row, pivot entry 1, and no other
//! echelon column nonzero at any pivot row. That invariant makes reduction a
//! single batch pass driven by the incoming vector's entries, and bounds
//! fill-in: every column lives on its own pivot row plus non-pivot rows only.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::field::Field;

pub type Idx = u32;

/// Sparse vector: entries sorted by index, no explicit zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseVec<E> {
    entries: Vec<(Idx, E)>,
}

impl<E: Clone + PartialEq> SparseVec<E> {
    pub fn new() -> Self {
        SparseVec { entries: Vec::new() }
    }

    pub fn unit<F: Field<Elem = E>>(field: &F, i: Idx) -> Self {
        SparseVec { entries: vec![(i, field.one())] }
    }

    /// Build from arbitrary (index, value) pairs: sorts, merges, drops zeros.
    pub fn collect<F: Field<Elem = E>>(field: &F, pairs: impl IntoIterator<Item = (Idx, E)>) -> Self {
        let mut acc = Accumulator::new();
        for (i, c) in pairs {
            acc.add(field, i, c);
        }
        acc.into_vec(field)
    }

    /// From entries already sorted by strictly increasing index, zeros removed.
    pub fn from_sorted(entries: Vec<(Idx, E)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        SparseVec { entries }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Idx, E)> {
        self.entries.iter()
    }

    pub fn get(&self, i: Idx) -> Option<&E> {
        self.entries
            .binary_search_by_key(&i, |e| e.0)
            .ok()
            .map(|k| &self.entries[k].1)
    }

    /// Smallest index with a nonzero entry.
    pub fn min_index(&self) -> Option<Idx> {
        self.entries.first().map(|e| e.0)
    }

    pub fn map_indices(&self, f: impl Fn(Idx) -> Idx) -> Self {
        let mut entries: Vec<(Idx, E)> =
            self.entries.iter().map(|(i, c)| (f(*i), c.clone())).collect();
        entries.sort_by_key(|e| e.0);
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        SparseVec { entries }
    }

    pub fn scaled<F: Field<Elem = E>>(&self, field: &F, c: &E) -> Self {
        if field.is_zero(c) {
            return SparseVec::new();
        }
        SparseVec {
            entries: self
                .entries
                .iter()
                .map(|(i, v)| (*i, field.mul(v, c)))
                .collect(),
        }
    }

    pub fn neg<F: Field<Elem = E>>(&self, field: &F) -> Self {
        SparseVec {
            entries: self
                .entries
                .iter()
                .map(|(i, v)| (*i, field.neg(v)))
                .collect(),
        }
    }

    /// self + c * other, by sorted merge.
    pub fn add_scaled<F: Field<Elem = E>>(&self, field: &F, c: &E, other: &Self) -> Self {
        if field.is_zero(c) || other.is_empty() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (0usize, 0usize);
        while a < self.entries.len() || b < other.entries.len() {
            let pick_a = match (self.entries.get(a), other.entries.get(b)) {
                (Some(x), Some(y)) => {
                    if x.0 == y.0 {
                        let v = field.add(&x.1, &field.mul(c, &y.1));
                        if !field.is_zero(&v) {
                            out.push((x.0, v));
                        }
                        a += 1;
                        b += 1;
                        continue;
                    }
                    x.0 < y.0
                }
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => break,
            };
            if pick_a {
                out.push(self.entries[a].clone());
                a += 1;
            } else {
                let (i, v) = &other.entries[b];
                out.push((*i, field.mul(c, v)));
                b += 1;
            }
        }
        SparseVec { entries: out }
    }

    pub fn sub<F: Field<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        let minus_one = field.neg(&field.one());
        self.add_scaled(field, &minus_one, other)
    }
}

impl<E: Clone + PartialEq> Default for SparseVec<E> {
    fn default() -> Self {
        SparseVec::new()
    }
}

/// Mutable accumulator over indices; cheaper than repeated merges when a
/// vector is assembled term by term.
pub struct Accumulator<E> {
    map: BTreeMap<Idx, E>,
}

impl<E: Clone + PartialEq> Accumulator<E> {
    pub fn new() -> Self {
        Accumulator { map: BTreeMap::new() }
    }

    pub fn add<F: Field<Elem = E>>(&mut self, field: &F, i: Idx, c: E) {
        match self.map.entry(i) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = field.add(e.get(), &c);
                if field.is_zero(&v) {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn add_vec<F: Field<Elem = E>>(&mut self, field: &F, c: &E, v: &SparseVec<E>) {
        if field.is_zero(c) {
            return;
        }
        for (i, x) in v.iter() {
            self.add(field, *i, field.mul(c, x));
        }
    }

    pub fn into_vec<F: Field<Elem = E>>(self, field: &F) -> SparseVec<E> {
        let entries: Vec<(Idx, E)> = self
            .map
            .into_iter()
            .filter(|(_, c)| !field.is_zero(c))
            .collect();
        SparseVec { entries }
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

impl<E: Clone + PartialEq> Default for Accumulator<E> {
    fn default() -> Self {
        Accumulator::new()
    }
}

/// Column-major sparse matrix with an explicit row count.
#[derive(Clone, Debug)]
pub struct SparseMatrix<E> {
    pub rows: usize,
    pub cols: Vec<SparseVec<E>>,
}

impl<E: Clone + PartialEq> SparseMatrix<E> {
    pub fn zero(rows: usize, ncols: usize) -> Self {
        SparseMatrix { rows, cols: vec![SparseVec::new(); ncols] }
    }

    pub fn identity<F: Field<Elem = E>>(field: &F, n: usize) -> Self {
        SparseMatrix {
            rows: n,
            cols: (0..n).map(|i| SparseVec::unit(field, i as Idx)).collect(),
        }
    }

    pub fn from_columns(rows: usize, cols: Vec<SparseVec<E>>) -> Self {
        SparseMatrix { rows, cols }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn col(&self, j: usize) -> &SparseVec<E> {
        &self.cols[j]
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.nnz()).sum()
    }

    /// Matrix-vector product; `v` lives in the column index space.
    pub fn apply<F: Field<Elem = E>>(&self, field: &F, v: &SparseVec<E>) -> SparseVec<E> {
        let mut acc = Accumulator::new();
        for (j, c) in v.iter() {
            acc.add_vec(field, c, &self.cols[*j as usize]);
        }
        acc.into_vec(field)
    }

    /// self ∘ other (apply `other` first).
    pub fn compose<F: Field<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        debug_assert_eq!(self.ncols(), other.rows);
        SparseMatrix {
            rows: self.rows,
            cols: other.cols.iter().map(|c| self.apply(field, c)).collect(),
        }
    }

    pub fn add_scaled<F: Field<Elem = E>>(&self, field: &F, c: &E, other: &Self) -> Self {
        debug_assert_eq!(self.rows, other.rows);
        debug_assert_eq!(self.ncols(), other.ncols());
        SparseMatrix {
            rows: self.rows,
            cols: self
                .cols
                .iter()
                .zip(&other.cols)
                .map(|(a, b)| a.add_scaled(field, c, b))
                .collect(),
        }
    }

    pub fn sub<F: Field<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        self.add_scaled(field, &field.neg(&field.one()), other)
    }

    pub fn neg<F: Field<Elem = E>>(&self, field: &F) -> Self {
        SparseMatrix {
            rows: self.rows,
            cols: self.cols.iter().map(|c| c.neg(field)).collect(),
        }
    }
}

/// Outcome of inserting a column into an `Echelon`.
#[derive(Clone, Debug)]
pub enum Insert<E> {
    Added { pivot: Idx },
    /// Dependent on earlier insertions. With transform tracking the combo
    /// expresses the zero vector: `inserted[j] - Σ combo_i · inserted[i] = 0`,
    /// i.e. combo (including the final unit at j) is a kernel coordinate.
    Dependent { combo: Option<SparseVec<E>> },
}

/// Incrementally built fully reduced column echelon form.
#[derive(Clone)]
pub struct Echelon<F: Field> {
    field: F,
    cols: Vec<EchCol<F::Elem>>,
    pivot_of: HashMap<Idx, usize>,
    row_members: HashMap<Idx, BTreeSet<usize>>,
    track: bool,
    inserted: usize,
}

#[derive(Clone)]
struct EchCol<E> {
    pivot: Idx,
    vec: SparseVec<E>,
    /// Expression of `vec` over the originally inserted columns.
    expr: Option<SparseVec<E>>,
}

impl<F: Field> Echelon<F> {
    pub fn new(field: F) -> Self {
        Echelon {
            field,
            cols: Vec::new(),
            pivot_of: HashMap::new(),
            row_members: HashMap::new(),
            track: false,
            inserted: 0,
        }
    }

    pub fn with_transform(field: F) -> Self {
        let mut e = Echelon::new(field);
        e.track = true;
        e
    }

    pub fn rank(&self) -> usize {
        self.cols.len()
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    pub fn pivots(&self) -> impl Iterator<Item = Idx> + '_ {
        self.cols.iter().map(|c| c.pivot)
    }

    pub fn has_pivot(&self, row: Idx) -> bool {
        self.pivot_of.contains_key(&row)
    }

    /// Residual of `v` modulo the span. Entries at pivot rows are eliminated
    /// in one batch pass; echelon columns are nonzero only at their own pivot
    /// row and at non-pivot rows, so no second pass is needed.
    pub fn reduce(&self, v: &SparseVec<F::Elem>) -> SparseVec<F::Elem> {
        self.reduce_tracked(v, None).0
    }

    fn reduce_tracked(
        &self,
        v: &SparseVec<F::Elem>,
        expr: Option<SparseVec<F::Elem>>,
    ) -> (SparseVec<F::Elem>, Option<SparseVec<F::Elem>>) {
        let f = &self.field;
        let hits: Vec<(usize, F::Elem)> = v
            .iter()
            .filter_map(|(i, c)| self.pivot_of.get(i).map(|&k| (k, c.clone())))
            .collect();
        if hits.is_empty() {
            return (v.clone(), expr);
        }
        let mut acc = Accumulator::new();
        for (i, c) in v.iter() {
            acc.add(f, *i, c.clone());
        }
        let mut eacc = expr.map(|e| {
            let mut a = Accumulator::new();
            for (i, c) in e.iter() {
                a.add(f, *i, c.clone());
            }
            a
        });
        for (k, c) in &hits {
            let m = f.neg(c);
            acc.add_vec(f, &m, &self.cols[*k].vec);
            if let Some(ea) = eacc.as_mut() {
                ea.add_vec(f, &m, self.cols[*k].expr.as_ref().expect("transform on"));
            }
        }
        let out = acc.into_vec(f);
        debug_assert!(out.iter().all(|(i, _)| !self.pivot_of.contains_key(i)));
        (out, eacc.map(|a| a.into_vec(f)))
    }

    /// Insert a column; returns whether it extended the span.
    pub fn insert(&mut self, v: SparseVec<F::Elem>) -> Insert<F::Elem> {
        let f = self.field.clone();
        let expr0 = if self.track {
            Some(SparseVec::unit(&f, self.inserted as Idx))
        } else {
            None
        };
        self.inserted += 1;
        let (mut red, mut expr) = self.reduce_tracked(&v, expr0);
        if red.is_empty() {
            return Insert::Dependent { combo: expr };
        }
        let pivot = red.min_index().expect("nonempty");
        let lead = red.get(pivot).expect("pivot entry").clone();
        let ilead = f.inv(&lead).expect("nonzero pivot");
        red = red.scaled(&f, &ilead);
        if let Some(e) = expr.as_mut() {
            *e = e.scaled(&f, &ilead);
        }
        // Retro-eliminate: clear the new pivot row from existing columns.
        let holders: Vec<usize> = self
            .row_members
            .get(&pivot)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default();
        for k in holders {
            let coeff = match self.cols[k].vec.get(pivot) {
                Some(c) => c.clone(),
                None => continue,
            };
            let m = f.neg(&coeff);
            let old_rows: Vec<Idx> = self.cols[k].vec.iter().map(|e| e.0).collect();
            let nv = self.cols[k].vec.add_scaled(&f, &m, &red);
            let ne = match (&self.cols[k].expr, &expr) {
                (Some(te), Some(xe)) => Some(te.add_scaled(&f, &m, xe)),
                _ => None,
            };
            for r in old_rows {
                if let Some(s) = self.row_members.get_mut(&r) {
                    s.remove(&k);
                }
            }
            for (r, _) in nv.iter() {
                self.row_members.entry(*r).or_default().insert(k);
            }
            self.cols[k].vec = nv;
            self.cols[k].expr = ne;
        }
        let slot = self.cols.len();
        for (r, _) in red.iter() {
            self.row_members.entry(*r).or_default().insert(slot);
        }
        self.pivot_of.insert(pivot, slot);
        self.cols.push(EchCol { pivot, vec: red, expr });
        Insert::Added { pivot }
    }

    /// Insert a column known to be pivot-disjoint from everything present:
    /// its min row is nobody's pivot and no existing column touches that row,
    /// and its other rows are not pivot rows. Skips reduction entirely.
    pub fn insert_unchecked(&mut self, v: SparseVec<F::Elem>) {
        let f = self.field.clone();
        let pivot = v.min_index().expect("nonzero column");
        debug_assert!(!self.pivot_of.contains_key(&pivot));
        debug_assert!(!self.row_members.contains_key(&pivot));
        debug_assert!(v.iter().skip(1).all(|(r, _)| !self.pivot_of.contains_key(r)));
        let lead = v.get(pivot).expect("pivot entry").clone();
        let nv = if lead == f.one() {
            v
        } else {
            v.scaled(&f, &f.inv(&lead).expect("nonzero pivot"))
        };
        let expr = if self.track {
            Some(SparseVec::unit(&f, self.inserted as Idx))
        } else {
            None
        };
        self.inserted += 1;
        let slot = self.cols.len();
        for (r, _) in nv.iter() {
            self.row_members.entry(*r).or_default().insert(slot);
        }
        self.pivot_of.insert(pivot, slot);
        self.cols.push(EchCol { pivot, vec: nv, expr });
    }

    pub fn contains(&self, v: &SparseVec<F::Elem>) -> bool {
        self.reduce(v).is_empty()
    }

    /// Express `v` over the originally inserted columns, if it lies in the span.
    pub fn express(&self, v: &SparseVec<F::Elem>) -> Option<SparseVec<F::Elem>> {
        assert!(self.track, "express requires transform tracking");
        let f = &self.field;
        let hits: Vec<(usize, F::Elem)> = v
            .iter()
            .filter_map(|(i, c)| self.pivot_of.get(i).map(|&k| (k, c.clone())))
            .collect();
        let mut acc = Accumulator::new();
        for (i, c) in v.iter() {
            acc.add(f, *i, c.clone());
        }
        let mut eacc = Accumulator::new();
        for (k, c) in &hits {
            let m = f.neg(c);
            acc.add_vec(f, &m, &self.cols[*k].vec);
            eacc.add_vec(f, c, self.cols[*k].expr.as_ref().expect("transform on"));
        }
        if acc.is_empty() {
            Some(eacc.into_vec(f))
        } else {
            None
        }
    }

    /// Total nonzero entries held (diagnostic).
    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.vec.nnz()).sum()
    }

    /// The reduced columns currently held. Their span equals the span of
    /// everything inserted; there are exactly `rank()` of them.
    pub fn columns(&self) -> impl Iterator<Item = &SparseVec<F::Elem>> {
        self.cols.iter().map(|c| &c.vec)
    }
}

/// Rank of a stream of columns.
pub fn rank_of<F: Field>(field: &F, cols: impl IntoIterator<Item = SparseVec<F::Elem>>) -> usize {
    let mut ech = Echelon::new(field.clone());
    for c in cols {
        ech.insert(c);
    }
    ech.rank()
}

pub fn rank_of_matrix<F: Field>(field: &F, m: &SparseMatrix<F::Elem>) -> usize {
    rank_of(field, m.cols.iter().cloned())
}

/// Basis of the kernel of `m`, as vectors over the column index space.
pub fn kernel_basis<F: Field>(field: &F, m: &SparseMatrix<F::Elem>) -> Vec<SparseVec<F::Elem>> {
    let mut ech = Echelon::with_transform(field.clone());
    let mut out = Vec::new();
    for (j, c) in m.cols.iter().enumerate() {
        match ech.insert(c.clone()) {
            Insert::Added { .. } => {}
            Insert::Dependent { combo } => {
                // The tracked combo already expresses the zero vector over the
                // original columns, unit coordinate at j included.
                let _ = j;
                out.push(combo.expect("transform on"));
            }
        }
    }
    out
}

/// Solve m x = target; returns x over column indices if target is in the span.
pub fn solve<F: Field>(
    field: &F,
    m: &SparseMatrix<F::Elem>,
    target: &SparseVec<F::Elem>,
) -> Option<SparseVec<F::Elem>> {
    let mut ech = Echelon::with_transform(field.clone());
    for c in &m.cols {
        ech.insert(c.clone());
    }
    ech.express(target)
}

/// Plain dense Gaussian elimination rank, as an independent oracle.
pub fn dense_rank<F: Field>(field: &F, rows: usize, cols: &[SparseVec<F::Elem>]) -> usize {
    let f = field;
    let mut a: Vec<Vec<F::Elem>> = cols
        .iter()
        .map(|c| {
            let mut dense = vec![f.zero(); rows];
            for (i, v) in c.iter() {
                dense[*i as usize] = v.clone();
            }
            dense
        })
        .collect();
    let mut rank = 0usize;
    for r in 0..rows {
        let Some(p) = (rank..a.len()).find(|&j| !f.is_zero(&a[j][r])) else {
            continue;
        };
        a.swap(rank, p);
        let inv = f.inv(&a[rank][r]).expect("nonzero");
        for x in a[rank].iter_mut() {
            *x = f.mul(x, &inv);
        }
        for j in 0..a.len() {
            if j != rank && !f.is_zero(&a[j][r]) {
                let c = a[j][r].clone();
                for i in 0..rows {
                    let t = f.mul(&c, &a[rank][i]);
                    a[j][i] = f.sub(&a[j][i], &t);
                }
            }
        }
        rank += 1;
        if rank == a.len() {
            break;
        }
    }
    rank
}

/// dim(span(a) ∩ span(b)) = rank a + rank b − rank [a | b].
pub fn intersection_dim<F: Field>(
    field: &F,
    a: &[SparseVec<F::Elem>],
    b: &[SparseVec<F::Elem>],
) -> usize {
    let ra = rank_of(field, a.iter().cloned());
    let rb = rank_of(field, b.iter().cloned());
    let run = rank_of(field, a.iter().chain(b.iter()).cloned());
    ra + rb - run
}

/// Guard helper used by complex builders.
pub fn check_cap(needed: usize, cap: usize) -> Result<()> {
    if needed > cap {
        Err(Error::MemoryCap { needed, cap })
    } else {
        Ok(())
    }
}
