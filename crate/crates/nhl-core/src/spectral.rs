//! Filtration of the relative complex by trailing kernel depth, the spectral
//! pages it generates, and the identities those pages satisfy.
//!
//! Level r at sub degree k keeps the chains whose trailing r + 1 tensor slots
//! lie in the kernel of the wedge projection. Page dimensions come from rank
//! arithmetic over one memoized primitive: the rank of the boundary of a
//! level after reduction modulo a lower level. An independently assembled
//! page-one complex (explicit induced boundaries on the level quotients)
//! cross-checks the rank formula.

use std::collections::HashMap;

use serde::Serialize;

use crate::algebra::CheckOutcome;
use crate::complexes::{
    build_complex, head_kernel_sub, tail_kernel_sub, ComplexKind, Homology, Setting, SubComplex,
};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::les::MatrixChain;
use crate::linalg::{Echelon, Idx, SparseMatrix, SparseVec};
use crate::words::{reduce_mod_kernel, KernelWords};

fn guard_setting<F: Field>(s: &Setting<F>, max_degree: usize) -> Result<()> {
    if s.alg.arity < 3 {
        return Err(Error::Hypothesis(format!(
            "input '{}' has arity {}: the trailing-kernel filtration collapses below arity 3",
            s.alg.name, s.alg.arity
        )));
    }
    if !s.wedge_ok() {
        return Err(Error::Hypothesis(format!(
            "input '{}' is not antisymmetric: the wedge quotient needs an antisymmetric bracket",
            s.alg.name
        )));
    }
    if s.alg.dim == 0 {
        return Err(Error::Hypothesis(format!(
            "input '{}' is zero-dimensional: there is nothing to filter",
            s.alg.name
        )));
    }
    if max_degree == 0 {
        return Err(Error::Hypothesis(
            "the verification window needs a max degree of at least 1".into(),
        ));
    }
    Ok(())
}

/// Trailing-kernel filtration of the relative complex, stored up to a fixed
/// top sub degree. All chain vectors use the coordinates of the ambient
/// parent degree k + 1: base index times word count plus word rank.
pub struct FilteredComplex<F: Field> {
    field: F,
    /// Highest sub degree with stored levels.
    pub max_degree: usize,
    /// Base-space dimension.
    head: usize,
    /// Tensor-letter alphabet size.
    dcount: usize,
    /// Wedge-letter count.
    ccount: usize,
    /// canonical_letter[l]: the tensor letter l survives the wedge projection.
    canonical_letter: Vec<bool>,
    /// The filtered relative complex, top degree `max_degree`.
    pub rel: SubComplex<F>,
    /// kernels[m]: kernel words of length m, for m = 0 ..= max_degree + 1.
    kernels: Vec<KernelWords>,
}

impl<F: Field> FilteredComplex<F> {
    pub fn build(s: &Setting<F>, max_degree: usize, cap: usize) -> Result<Self> {
        guard_setting(s, max_degree)?;
        let rel = tail_kernel_sub(s, max_degree, cap)?;
        let kernels: Vec<KernelWords> = (0..=max_degree + 1)
            .map(|m| KernelWords::new(&s.canon, m))
            .collect();
        let mut canonical_letter = vec![false; s.canon.tensor_count()];
        for c in 0..s.canon.wedge_count() {
            canonical_letter[s.canon.section(c as u32) as usize] = true;
        }
        Ok(FilteredComplex {
            field: s.alg.field.clone(),
            max_degree,
            head: s.alg.dim,
            dcount: s.canon.tensor_count(),
            ccount: s.canon.wedge_count(),
            canonical_letter,
            rel,
            kernels,
        })
    }

    /// Dimension of level r at sub degree k. Level -1 is zero; levels at or
    /// beyond k fill the whole degree.
    pub fn level_dim(&self, k: usize, r: isize) -> usize {
        if r < 0 {
            return 0;
        }
        let r = (r as usize).min(k);
        let total = (self.head as u128)
            * (self.dcount as u128).pow((k - r) as u32)
            * self.kernels[r + 1].count() as u128;
        usize::try_from(total).expect("level dimension fits usize")
    }

    /// i-th basis vector of level r (head-major, kernel word minor), in
    /// ambient parent coordinates; the sub degree only sets the head range.
    fn basis_vec(&self, r: usize, i: usize) -> SparseVec<F::Elem> {
        let kw = &self.kernels[r + 1];
        let kc = kw.count();
        let offset = (i / kc) as u64 * kw.ambient_count() as u64;
        let entries: Vec<(Idx, F::Elem)> = kw
            .basis_entries(&self.field, (i % kc) as u32)
            .into_iter()
            .map(|(idx, c)| {
                let shifted = idx as u64 + offset;
                (Idx::try_from(shifted).expect("ambient index fits"), c)
            })
            .collect();
        SparseVec::from_sorted(entries)
    }

    /// Residual of a sub-degree-m chain after reduction modulo level j
    /// (j < 0: no reduction; j >= m: reduction modulo the full relative span).
    fn residual_level(&self, m: usize, j: isize, v: &SparseVec<F::Elem>) -> SparseVec<F::Elem> {
        if j < 0 {
            return v.clone();
        }
        let j = (j as usize).min(m);
        reduce_mod_kernel(&self.field, &self.kernels[j + 1], v).residual
    }

    /// Boundary of a sub-degree-k chain in ambient coordinates. Sub degree 0
    /// is the bottom of the truncated complex, so its boundary is zero.
    fn boundary(&self, k: usize, v: &SparseVec<F::Elem>) -> SparseVec<F::Elem> {
        if k == 0 {
            return SparseVec::new();
        }
        self.rel.parent.boundary_of(k + 1, v)
    }
}

/// Rank engine over a filtration. Memoizes, per sub degree, the rank of the
/// boundary of a level after reduction modulo a lower level; every page and
/// limit dimension is a signed sum of those ranks and level dimensions.
pub struct PageEngine<'a, F: Field> {
    fc: &'a FilteredComplex<F>,
    ranks: HashMap<(usize, usize, isize), usize>,
}

fn rank_arithmetic_failure(a: usize, r: usize, s: usize, what: &str) -> Error {
    Error::CheckFailed(format!(
        "page {a} cell ({r},{s}): {what} went negative; the boundary square or the \
         filtration containment must be broken"
    ))
}

impl<'a, F: Field> PageEngine<'a, F> {
    pub fn new(fc: &'a FilteredComplex<F>) -> Self {
        PageEngine { fc, ranks: HashMap::new() }
    }

    /// Rank of d restricted to level p at sub degree kp, reduced modulo level
    /// j at sub degree kp - 1.
    fn boundary_rank_after(&mut self, kp: usize, p: isize, j: isize) -> usize {
        if kp == 0 || p < 0 {
            return 0;
        }
        let p = (p as usize).min(kp);
        let j = j.clamp(-1, kp as isize - 1);
        if let Some(&r) = self.ranks.get(&(kp, p, j)) {
            return r;
        }
        let mut ech = Echelon::new(self.fc.field.clone());
        for i in 0..self.fc.level_dim(kp, p as isize) {
            let dv = self.fc.boundary(kp, &self.fc.basis_vec(p, i));
            if dv.is_empty() {
                continue;
            }
            let res = self.fc.residual_level(kp - 1, j, &dv);
            if !res.is_empty() {
                let _ = ech.insert(res);
            }
        }
        let rank = ech.rank();
        self.ranks.insert((kp, p, j), rank);
        rank
    }

    /// dim of (level rr intersected with d^{-1}(level b)) at sub degree k.
    fn cycle_dim(&mut self, k: usize, rr: isize, b: isize) -> usize {
        if rr < 0 {
            return 0;
        }
        let full = self.fc.level_dim(k, rr);
        if k == 0 {
            return full;
        }
        full - self.boundary_rank_after(k, rr, b)
    }

    /// dim of page a at cell (r, s): level-r chains whose boundary drops a
    /// levels, modulo level r - 1 and boundaries arriving from level
    /// r + a - 1 one degree up.
    pub fn page_dim(&mut self, a: usize, r: usize, s: usize) -> Result<usize> {
        let k = r + s;
        let b = r as isize - a as isize;
        let p = r as isize + a as isize - 1;
        let zr = self.cycle_dim(k, r as isize, b);
        let zr1 = self.cycle_dim(k, r as isize - 1, b);
        let dr1 = self.boundary_rank_after(k + 1, p, r as isize - 1);
        let dr = self.boundary_rank_after(k + 1, p, r as isize);
        let num = zr
            .checked_sub(zr1)
            .ok_or_else(|| rank_arithmetic_failure(a, r, s, "the cycle count"))?;
        let den = dr1
            .checked_sub(dr)
            .ok_or_else(|| rank_arithmetic_failure(a, r, s, "the boundary count"))?;
        num.checked_sub(den)
            .ok_or_else(|| rank_arithmetic_failure(a, r, s, "the page subtraction"))
    }

    /// dim of the image of the homology of level rr inside the homology at
    /// sub degree k.
    fn graded_homology_through(&mut self, k: usize, rr: isize) -> Result<usize> {
        if rr < 0 {
            return Ok(0);
        }
        let cycles = self.cycle_dim(k, rr, -1);
        let full = (k + 1) as isize;
        let rank_all = self.boundary_rank_after(k + 1, full, -1);
        let rank_mod = self.boundary_rank_after(k + 1, full, rr);
        let boundaries_inside = rank_all.checked_sub(rank_mod).ok_or_else(|| {
            rank_arithmetic_failure(0, rr.max(0) as usize, k, "the boundary intersection")
        })?;
        cycles.checked_sub(boundaries_inside).ok_or_else(|| {
            rank_arithmetic_failure(0, rr.max(0) as usize, k, "the graded homology count")
        })
    }

    /// dim of the limit term at cell (r, s): the graded piece the filtration
    /// induces on the homology of the relative complex.
    pub fn infinity_dim(&mut self, r: usize, s: usize) -> Result<usize> {
        let k = r + s;
        let through_r = self.graded_homology_through(k, r as isize)?;
        let through_r1 = self.graded_homology_through(k, r as isize - 1)?;
        through_r
            .checked_sub(through_r1)
            .ok_or_else(|| rank_arithmetic_failure(0, r, s, "the graded limit"))
    }
}

/// Dense coordinates on a level quotient (level r modulo level r - 1) at sub
/// degree k. The class of a level chain is its residual modulo length-r
/// kernel words acting on the trailing r slots, projected to the words whose
/// slot just before those r is non-canonical; on the quotient that composite
/// is a bijection, and the section basis vectors hit distinct unit words.
struct LevelClasses {
    k: usize,
    r: usize,
    /// Level-r basis indices forming the section, in dense class order.
    section: Vec<usize>,
    /// Ambient word index of a section image -> dense class position.
    dense: HashMap<Idx, usize>,
}

impl LevelClasses {
    fn build<F: Field>(fc: &FilteredComplex<F>, k: usize, r: usize) -> Self {
        let kw = &fc.kernels[r + 1];
        let kc = kw.count();
        let mut tail_sec: Vec<u32> = Vec::new();
        for j in 0..kc as u32 {
            let word = kw.ambient.unrank(kw.word_of(j) as usize);
            if !fc.canonical_letter[word[0] as usize]
                && word[1..].iter().all(|&l| fc.canonical_letter[l as usize])
            {
                tail_sec.push(j);
            }
        }
        let heads = fc.head * fc.dcount.pow((k - r) as u32);
        let mut section = Vec::with_capacity(heads * tail_sec.len());
        let mut dense = HashMap::new();
        for h in 0..heads {
            let offset = h as u64 * kw.ambient_count() as u64;
            for &j in &tail_sec {
                let image = offset + kw.word_of(j) as u64;
                dense.insert(Idx::try_from(image).expect("ambient index fits"), section.len());
                section.push(h * kc + j as usize);
            }
        }
        assert_eq!(
            section.len(),
            fc.level_dim(k, r as isize) - fc.level_dim(k, r as isize - 1),
            "section size must match the level quotient at degree {k}, level {r}"
        );
        LevelClasses { k, r, section, dense }
    }

    /// Dense class coordinates of a level-r chain at sub degree k.
    fn class_of<F: Field>(
        &self,
        fc: &FilteredComplex<F>,
        v: &SparseVec<F::Elem>,
    ) -> SparseVec<F::Elem> {
        let res = fc.residual_level(self.k, self.r as isize - 1, v);
        let entries: Vec<(Idx, F::Elem)> = res
            .iter()
            .filter_map(|(idx, c)| self.dense.get(idx).map(|&p| (p as Idx, c.clone())))
            .collect();
        SparseVec::from_sorted(entries)
    }
}

/// One cell of the page table: dims[a] is the page-a dimension, for a from 0
/// through the page where the cell provably settles; `stable` is the graded
/// limit induced on homology.
#[derive(Clone, Debug, Serialize)]
pub struct PageCell {
    pub r: usize,
    pub s: usize,
    pub dims: Vec<usize>,
    pub stable: usize,
}

/// Per-degree comparison of the summed graded limits against the homology of
/// the relative complex, computed through an independent pipeline.
#[derive(Clone, Debug, Serialize)]
pub struct AbutmentRow {
    pub degree: usize,
    pub graded_total: usize,
    pub homology_dim: usize,
}

#[derive(Debug, Serialize)]
pub struct SpectralReport {
    pub max_degree: usize,
    pub cells: Vec<PageCell>,
    pub abutment: Vec<AbutmentRow>,
    pub checks: Vec<CheckOutcome>,
}

impl SpectralReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn cell_at<'c>(cells: &'c [PageCell], r: usize, s: usize) -> &'c PageCell {
    let k = r + s;
    &cells[k * (k + 1) / 2 + r]
}

/// Build the trailing-kernel filtration and verify the page identities over
/// all cells with r + s < max_degree: the start page is a product of chain
/// blocks, page one and page two are products of homology blocks, pages
/// shrink monotonically, and the graded limits sum to the homology of the
/// relative complex.
pub fn verify_pages<F: Field>(
    s: &Setting<F>,
    max_degree: usize,
    cap: usize,
) -> Result<SpectralReport> {
    let fc = FilteredComplex::build(s, max_degree, cap)?;
    let kk = fc.max_degree;
    let mut engine = PageEngine::new(&fc);

    let hypotheses = if s.alg.dim >= s.alg.arity {
        CheckOutcome::from_violations("hypotheses", 3, Vec::new())
    } else {
        CheckOutcome::skipped(
            "hypotheses",
            &format!(
                "dimension {} is below the arity {}; the page identities are verified \
                 outside the stated hypotheses",
                s.alg.dim, s.alg.arity
            ),
        )
    };

    let structure = {
        let mut viol = Vec::new();
        let mut checked = 0usize;
        let dd = fc.dcount as u128;
        let cc = fc.ccount as u128;
        for k in 0..=kk {
            let top = fc.level_dim(k, k as isize);
            let closed_top = fc.head as u128 * (dd.pow(k as u32 + 1) - cc.pow(k as u32 + 1));
            checked += 2;
            if top as u128 != closed_top {
                viol.push(format!(
                    "degree {k}: top level dimension {top} differs from the closed form {closed_top}"
                ));
            }
            if top != fc.rel.dim(k) {
                viol.push(format!(
                    "degree {k}: top level does not exhaust the relative space ({top} vs {})",
                    fc.rel.dim(k)
                ));
            }
            for r in 0..k {
                checked += 1;
                let closed = fc.head as u128
                    * dd.pow((k - r) as u32)
                    * (dd.pow(r as u32 + 1) - cc.pow(r as u32 + 1));
                if fc.level_dim(k, r as isize) as u128 != closed {
                    viol.push(format!(
                        "degree {k}: level {r} dimension {} differs from the closed form {closed}",
                        fc.level_dim(k, r as isize)
                    ));
                }
            }
            for r in 1..=k {
                for i in 0..fc.level_dim(k, r as isize - 1) {
                    checked += 1;
                    let v = fc.basis_vec(r - 1, i);
                    if !fc.residual_level(k, r as isize, &v).is_empty() {
                        viol.push(format!(
                            "degree {k}: level {} basis vector {i} escapes level {r}",
                            r - 1
                        ));
                    }
                }
            }
        }
        for k in 1..=kk {
            for r in 0..=k {
                checked += 1;
                let escape = engine.boundary_rank_after(k, r as isize, r as isize);
                if escape != 0 {
                    viol.push(format!(
                        "degree {k}: the boundary of level {r} has rank {escape} outside level {r}"
                    ));
                }
            }
        }
        CheckOutcome::from_violations("filtration_structure", checked, viol)
    };

    let mut cells = Vec::new();
    for k in 0..kk {
        for r in 0..=k {
            let s_deg = k - r;
            let settle = (r + 1).max(k + 2 - r);
            let mut dims = Vec::with_capacity(settle + 1);
            for a in 0..=settle {
                dims.push(engine.page_dim(a, r, s_deg)?);
            }
            let stable = engine.infinity_dim(r, s_deg)?;
            cells.push(PageCell { r, s: s_deg, dims, stable });
        }
    }

    let hk = head_kernel_sub(s, kk, cap)?;
    let hk_dims: Vec<usize> = (0..kk).map(|r| hk.dim(r)).collect();
    let mut hl = Homology::new(build_complex(s, ComplexKind::BaseOverTensor, kk, cap)?, cap);
    let mut hl_b = Vec::with_capacity(kk);
    for s_deg in 0..kk {
        hl_b.push(hl.betti(s_deg)?);
    }
    let mut hd = Homology::new(hk, cap);
    let mut hd_b = Vec::with_capacity(kk);
    for r in 0..kk {
        hd_b.push(hd.betti(r)?);
    }

    let page_zero = {
        let mut viol = Vec::new();
        let mut checked = 0usize;
        for (r, &dim_r) in hk_dims.iter().enumerate() {
            checked += 1;
            let closed = (fc.dcount - fc.ccount) * fc.ccount.pow(r as u32);
            if dim_r != closed {
                viol.push(format!(
                    "depth {r}: kernel block dimension {dim_r} differs from the closed form {closed}"
                ));
            }
        }
        for c in &cells {
            checked += 1;
            let expect = fc.rel.parent.dim(c.s) * hk_dims[c.r];
            if c.dims[0] != expect {
                viol.push(format!(
                    "cell ({},{}): start page {} differs from the block product {expect}",
                    c.r, c.s, c.dims[0]
                ));
            }
        }
        CheckOutcome::from_violations("page_zero_blocks", checked, viol)
    };

    let page_one = {
        let mut viol = Vec::new();
        let mut checked = 0usize;
        for c in &cells {
            checked += 1;
            let expect = hl_b[c.s] * hk_dims[c.r];
            if c.dims[1] != expect {
                viol.push(format!(
                    "cell ({},{}): page one {} differs from the block product {expect}",
                    c.r, c.s, c.dims[1]
                ));
            }
        }
        CheckOutcome::from_violations("page_one_blocks", checked, viol)
    };

    let page_two = {
        let mut viol = Vec::new();
        let mut checked = 0usize;
        for c in &cells {
            checked += 1;
            let expect = hl_b[c.s] * hd_b[c.r];
            if c.dims[2] != expect {
                viol.push(format!(
                    "cell ({},{}): page two {} differs from the block product {expect}",
                    c.r, c.s, c.dims[2]
                ));
            }
        }
        CheckOutcome::from_violations("page_two_blocks", checked, viol)
    };

    let independent = page_one_via_induced(&fc, &cells, cap)?;

    let monotonicity = {
        let mut viol = Vec::new();
        let mut checked = 0usize;
        for c in &cells {
            for a in 1..c.dims.len() {
                checked += 1;
                if c.dims[a] > c.dims[a - 1] {
                    viol.push(format!(
                        "cell ({},{}): page {a} grew from {} to {}",
                        c.r,
                        c.s,
                        c.dims[a - 1],
                        c.dims[a]
                    ));
                }
            }
        }
        CheckOutcome::from_violations("page_monotonicity", checked, viol)
    };

    let mut abutment = Vec::new();
    let convergence = {
        let mut relh = Homology::new(tail_kernel_sub(s, kk, cap)?, cap);
        let mut viol = Vec::new();
        let mut checked = 0usize;
        for k in 0..kk {
            let total: usize = cells.iter().filter(|c| c.r + c.s == k).map(|c| c.stable).sum();
            let hom = relh.betti(k)?;
            checked += 1;
            if total != hom {
                viol.push(format!(
                    "degree {k}: graded limit total {total} differs from the relative \
                     homology dimension {hom}"
                ));
            }
            abutment.push(AbutmentRow { degree: k, graded_total: total, homology_dim: hom });
        }
        for c in &cells {
            checked += 1;
            let settled = *c.dims.last().expect("cells store at least the start page");
            if settled != c.stable {
                viol.push(format!(
                    "cell ({},{}): settled page {settled} differs from the graded limit {}",
                    c.r, c.s, c.stable
                ));
            }
        }
        CheckOutcome::from_violations("abutment", checked, viol)
    };

    Ok(SpectralReport {
        max_degree: kk,
        cells,
        abutment,
        checks: vec![
            hypotheses,
            structure,
            page_zero,
            page_one,
            page_two,
            independent,
            monotonicity,
            convergence,
        ],
    })
}

/// Assemble, per level, the complex the start page carries (induced
/// boundaries between level quotients in dense class coordinates), check it
/// squares to zero, and compare its homology with the rank-formula page one.
fn page_one_via_induced<F: Field>(
    fc: &FilteredComplex<F>,
    cells: &[PageCell],
    cap: usize,
) -> Result<CheckOutcome> {
    let kk = fc.max_degree;
    let f = fc.field.clone();
    let mut viol = Vec::new();
    let mut checked = 0usize;
    for r in 0..kk {
        let classes: Vec<LevelClasses> =
            (r..=kk).map(|k| LevelClasses::build(fc, k, r)).collect();
        let mut dims = Vec::with_capacity(kk - r + 1);
        let mut mats = Vec::with_capacity(kk - r + 1);
        for s_deg in 0..=kk - r {
            let lc = &classes[s_deg];
            dims.push(lc.section.len());
            if s_deg == 0 {
                mats.push(SparseMatrix::zero(0, lc.section.len()));
                continue;
            }
            let prev = &classes[s_deg - 1];
            let k = r + s_deg;
            let cols: Vec<SparseVec<F::Elem>> = lc
                .section
                .iter()
                .map(|&i| {
                    let dv = fc.boundary(k, &fc.basis_vec(r, i));
                    prev.class_of(fc, &dv)
                })
                .collect();
            mats.push(SparseMatrix::from_columns(prev.section.len(), cols));
        }
        for s_deg in 2..=kk - r {
            checked += 1;
            if !mats[s_deg - 1].compose(&f, &mats[s_deg]).is_zero() {
                viol.push(format!(
                    "level {r}: the induced boundary does not square to zero into degree {}",
                    s_deg - 2
                ));
            }
        }
        let chain =
            MatrixChain::assemble(f.clone(), format!("level-{r} quotient"), dims, mats);
        let mut h = Homology::new(chain, cap);
        for s_deg in 0..kk - r {
            checked += 1;
            let induced = h.betti(s_deg)?;
            let formula = cell_at(cells, r, s_deg).dims[1];
            if induced != formula {
                viol.push(format!(
                    "cell ({r},{s_deg}): induced-boundary homology {induced} differs from \
                     the rank formula {formula}"
                ));
            }
        }
    }
    Ok(CheckOutcome::from_violations("page_one_independent", checked, viol))
}

/// For binary inputs both kernel subcomplexes vanish identically; check the
/// degree-wise dimensions up to `max_degree`.
pub fn degenerate_binary_check<F: Field>(
    s: &Setting<F>,
    max_degree: usize,
    cap: usize,
) -> Result<CheckOutcome> {
    if s.alg.arity != 2 {
        return Err(Error::Hypothesis(format!(
            "input '{}' has arity {}: the degeneracy statement is about binary brackets",
            s.alg.name, s.alg.arity
        )));
    }
    let rel = tail_kernel_sub(s, max_degree, cap)?;
    let dr = head_kernel_sub(s, max_degree, cap)?;
    let mut viol = Vec::new();
    let mut checked = 0usize;
    for k in 0..=max_degree {
        checked += 2;
        if rel.dim(k) != 0 {
            viol.push(format!(
                "relative space has dimension {} at degree {k}",
                rel.dim(k)
            ));
        }
        if dr.dim(k) != 0 {
            viol.push(format!(
                "kernel coefficient space has dimension {} at degree {k}",
                dr.dim(k)
            ));
        }
    }
    Ok(CheckOutcome::from_violations("binary_degeneracy", checked, viol))
}

/// If the wedge-coefficient homology vanishes through `max_degree`, the
/// tensor-coefficient homology must vanish through `max_degree - 1`. Vacuous
/// when the hypothesis fails; the outcome records which branch ran.
pub fn vanishing_transfer_check<F: Field>(
    s: &Setting<F>,
    max_degree: usize,
    cap: usize,
) -> Result<CheckOutcome> {
    guard_setting(s, max_degree)?;
    let mut wedge_h =
        Homology::new(build_complex(s, ComplexKind::BaseOverWedge, max_degree + 1, cap)?, cap);
    for k in 0..=max_degree {
        let b = wedge_h.betti(k)?;
        if b != 0 {
            return Ok(CheckOutcome::skipped(
                "vanishing_transfer",
                &format!(
                    "hypothesis fails: the wedge-coefficient homology has dimension {b} \
                     at degree {k}, so there is nothing to transfer"
                ),
            ));
        }
    }
    let mut tensor_h =
        Homology::new(build_complex(s, ComplexKind::BaseOverTensor, max_degree, cap)?, cap);
    let mut viol = Vec::new();
    let mut checked = 0usize;
    for k in 0..max_degree {
        checked += 1;
        let b = tensor_h.betti(k)?;
        if b != 0 {
            viol.push(format!(
                "tensor-coefficient homology has dimension {b} at degree {k} despite the \
                 vanishing hypothesis"
            ));
        }
    }
    Ok(CheckOutcome::from_violations("vanishing_transfer", checked, viol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Algebra, AlgebraDocument, CheckStatus};
    use crate::complexes::DEFAULT_COLUMN_CAP;
    use crate::field::{PrimeField, Rationals};

    const CAP: usize = DEFAULT_COLUMN_CAP;

    fn f() -> PrimeField {
        PrimeField::new(32003).unwrap()
    }

    fn setting_simple3() -> Setting<PrimeField> {
        Setting::new(Algebra::simple_filippov(f(), 3))
    }

    fn setting_abelian(d: usize) -> Setting<PrimeField> {
        Setting::new(Algebra::abelian(f(), d, 3))
    }

    fn binary_member() -> Setting<PrimeField> {
        let doc = AlgebraDocument::from_json(
            r#"{"name":"b","n":2,"dim":2,"field":"prime:32003",
                "brackets":[{"args":[1,1],"value":[[0,"1"]]}]}"#,
        )
        .unwrap();
        Setting::new(Algebra::from_document(&doc, f()).unwrap())
    }

    fn non_filippov() -> Setting<PrimeField> {
        let doc = AlgebraDocument::from_json(
            r#"{"name":"nf","n":3,"dim":2,"field":"prime:32003",
                "brackets":[{"args":[0,0,0],"value":[[1,"1"]]}]}"#,
        )
        .unwrap();
        Setting::new(Algebra::from_document(&doc, f()).unwrap())
    }

    fn assert_all_pass(report: &SpectralReport) {
        for c in &report.checks {
            assert!(
                c.passed(),
                "{} failed: {} (+{} omitted)",
                c.name,
                c.violations.join("; "),
                c.omitted_violations
            );
        }
    }

    #[test]
    fn filtration_counts_match_the_block_structure() {
        let s = setting_abelian(2);
        let fc = FilteredComplex::build(&s, 3, CAP).unwrap();
        assert_eq!(fc.level_dim(0, 0), 6);
        assert_eq!(fc.level_dim(1, 0), 24);
        assert_eq!(fc.level_dim(1, 1), 30);
        assert_eq!(fc.level_dim(2, -1), 0);
        assert_eq!(fc.level_dim(0, 5), fc.rel.dim(0));
        for k in 0..=3 {
            assert_eq!(fc.level_dim(k, k as isize), fc.rel.dim(k));
        }
    }

    #[test]
    fn pages_collapse_on_an_abelian_input() {
        let s = setting_abelian(2);
        let report = verify_pages(&s, 3, CAP).unwrap();
        assert_all_pass(&report);
        assert_eq!(report.checks.len(), 8);
        // Zero boundary: every page equals the start page and the limit.
        for c in &report.cells {
            for a in 1..c.dims.len() {
                assert_eq!(c.dims[a], c.dims[0], "cell ({},{})", c.r, c.s);
            }
            assert_eq!(c.stable, c.dims[0]);
        }
        let c11 = report.cells.iter().find(|c| c.r == 1 && c.s == 1).unwrap();
        assert_eq!(c11.dims[2], 24);
        let row1 = &report.abutment[1];
        assert_eq!(row1.graded_total, 30);
        assert_eq!(row1.homology_dim, 30);
        // Dimension 2 sits below arity 3: noted, not refused.
        assert_eq!(report.check("hypotheses").unwrap().status, CheckStatus::Skipped);
    }

    #[test]
    fn pages_hold_on_the_abelian_triple() {
        let s = setting_abelian(3);
        let report = verify_pages(&s, 2, CAP).unwrap();
        assert_all_pass(&report);
        assert_eq!(report.check("hypotheses").unwrap().status, CheckStatus::Pass);
        let c00 = report.cells.iter().find(|c| c.r == 0 && c.s == 0).unwrap();
        assert_eq!(c00.dims[0], 18);
    }

    #[test]
    fn pages_hold_on_the_simple_member() {
        let s = setting_simple3();
        let report = verify_pages(&s, 2, CAP).unwrap();
        assert_all_pass(&report);
        assert_eq!(report.check("hypotheses").unwrap().status, CheckStatus::Pass);
        assert_eq!(report.cells.len(), 3);
        for row in &report.abutment {
            assert_eq!(row.graded_total, row.homology_dim);
        }
    }

    #[test]
    fn rational_pages_agree_on_a_small_input() {
        let s = Setting::new(Algebra::abelian(Rationals, 2, 3));
        let report = verify_pages(&s, 2, CAP).unwrap();
        assert_all_pass(&report);
    }

    #[test]
    fn binary_inputs_degenerate_and_are_refused() {
        let s = binary_member();
        let outcome = degenerate_binary_check(&s, 3, CAP).unwrap();
        assert!(outcome.passed(), "{:?}", outcome.violations);
        assert_eq!(outcome.checked, 8);
        assert!(matches!(verify_pages(&s, 2, CAP), Err(Error::Hypothesis(_))));
        assert!(matches!(
            vanishing_transfer_check(&s, 2, CAP),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn non_wedge_inputs_are_refused() {
        let s = non_filippov();
        assert!(matches!(verify_pages(&s, 1, CAP), Err(Error::Hypothesis(_))));
        assert!(matches!(
            degenerate_binary_check(&s, 1, CAP),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn zero_dimensional_inputs_are_refused() {
        let s = Setting::new(Algebra::abelian(f(), 0, 3));
        assert!(matches!(verify_pages(&s, 1, CAP), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn vanishing_transfer_branches() {
        // Abelian: the wedge-coefficient homology never vanishes, so the
        // check records the vacuous branch.
        let outcome = vanishing_transfer_check(&setting_abelian(2), 2, CAP).unwrap();
        assert_eq!(outcome.status, CheckStatus::Skipped);
        assert!(outcome.violations[0].contains("hypothesis fails"));
        // Simple member: whichever branch runs must come out clean.
        let outcome = vanishing_transfer_check(&setting_simple3(), 2, CAP).unwrap();
        assert!(outcome.passed(), "{:?}", outcome.violations);
    }
}
