//! Binary algebras induced by an n-ary algebra on tensor and exterior powers,
//! the sorting projection between them, and the co-representation actions the
//! chain complexes use.
//!
//! Action catalogue (h acts on M; left(x, m) and right(m, x)):
//!   base_on_tensor:  h = tensor power, M = base space.
//!   base_on_wedge:   h = wedge power, M = base space (canonical section).
//!   tensor_on_wedge: h = wedge power, M = tensor power; right ≡ 0.
//!   pair_on_tensor:  h = tensor power, M = base ⊗ tensor.
//!   pair_on_wedge:   h = wedge power, M = base ⊗ tensor.
//!   trivial:         zero actions on a one-dimensional module.

use crate::algebra::{Algebra, CheckOutcome};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{Accumulator, Idx, SparseMatrix, SparseVec};
use crate::words::{CanonStructure, KernelWords, TensorWords};

/// A binary algebra given by its multiplication table on basis pairs.
#[derive(Clone, Debug)]
pub struct BinaryLeibniz<F: Field> {
    pub dim: usize,
    pub field: F,
    /// table[x * dim + y] = [e_x; e_y].
    table: Vec<SparseVec<F::Elem>>,
}

impl<F: Field> BinaryLeibniz<F> {
    pub fn bracket(&self, x: u32, y: u32) -> &SparseVec<F::Elem> {
        &self.table[x as usize * self.dim + y as usize]
    }

    pub fn bracket_vec_left(&self, v: &SparseVec<F::Elem>, y: u32) -> SparseVec<F::Elem> {
        let f = &self.field;
        let mut acc = Accumulator::new();
        for (x, c) in v.iter() {
            acc.add_vec(f, c, self.bracket(*x, y));
        }
        acc.into_vec(f)
    }

    pub fn bracket_vec_right(&self, x: u32, v: &SparseVec<F::Elem>) -> SparseVec<F::Elem> {
        let f = &self.field;
        let mut acc = Accumulator::new();
        for (y, c) in v.iter() {
            acc.add_vec(f, c, self.bracket(x, *y));
        }
        acc.into_vec(f)
    }

    pub fn bracket_bilinear(
        &self,
        u: &SparseVec<F::Elem>,
        v: &SparseVec<F::Elem>,
    ) -> SparseVec<F::Elem> {
        let f = &self.field;
        let mut acc = Accumulator::new();
        for (x, cx) in u.iter() {
            for (y, cy) in v.iter() {
                acc.add_vec(f, &f.mul(cx, cy), self.bracket(*x, *y));
            }
        }
        acc.into_vec(f)
    }

    /// [[x,y],z] = [[x,z],y] + [x,[y,z]] over all basis triples.
    pub fn check_binary_identity(&self) -> CheckOutcome {
        let f = &self.field;
        let mut violations = Vec::new();
        for x in 0..self.dim as u32 {
            for y in 0..self.dim as u32 {
                let xy = self.bracket(x, y).clone();
                for z in 0..self.dim as u32 {
                    let lhs = self.bracket_vec_left(&xy, z);
                    let xz = self.bracket(x, z);
                    let yz = self.bracket(y, z);
                    let t1 = self.bracket_vec_left(xz, y);
                    let t2 = self.bracket_vec_right(x, yz);
                    let rhs = t1.add_scaled(f, &f.one(), &t2);
                    if lhs != rhs {
                        violations.push(format!("triple ({x},{y},{z})"));
                    }
                }
            }
        }
        CheckOutcome::from_violations("binary_identity", self.dim.pow(3), violations)
    }
}

/// Tensor-power binary algebra: slotwise derivation action of one word on
/// another through the base bracket.
pub fn tensor_algebra<F: Field>(alg: &Algebra<F>) -> BinaryLeibniz<F> {
    let f = alg.field.clone();
    let m = alg.arity - 1;
    let dwords = TensorWords::new(alg.dim, m);
    let dim = dwords.count();
    let mut table = vec![SparseVec::new(); dim * dim];
    for xu in 0..dim {
        let u = dwords.unrank(xu);
        for xv in 0..dim {
            let v = dwords.unrank(xv);
            let mut acc = Accumulator::new();
            for i in 0..m {
                let mut args = Vec::with_capacity(alg.arity);
                args.push(u[i]);
                args.extend_from_slice(&v);
                let w = alg.bracket(&args);
                for (j, c) in w.iter() {
                    let mut nu = u.clone();
                    nu[i] = *j;
                    acc.add(&f, dwords.rank(&nu) as Idx, c.clone());
                }
            }
            table[xu * dim + xv] = acc.into_vec(&f);
        }
    }
    BinaryLeibniz { dim, field: f, table }
}

/// Wedge-power binary algebra (canonical representatives, letterwise sorting
/// after substitution). Well defined exactly when the base bracket is
/// antisymmetric; `wedge_algebra_rep_independent` checks that.
pub fn wedge_algebra<F: Field>(alg: &Algebra<F>, canon: &CanonStructure) -> BinaryLeibniz<F> {
    let f = alg.field.clone();
    let m = alg.arity - 1;
    let wwords = &canon.wwords;
    let dim = wwords.count();
    let mut table = vec![SparseVec::new(); dim * dim];
    for xw in 0..dim {
        let w = wwords.unrank(xw);
        for xv in 0..dim {
            let vhat = canon.dwords.unrank(canon.section(xv as u32) as usize);
            let mut acc = Accumulator::new();
            for i in 0..m {
                let mut args = Vec::with_capacity(alg.arity);
                args.push(w[i]);
                args.extend_from_slice(&vhat);
                let bw = alg.bracket(&args);
                for (j, c) in bw.iter() {
                    let mut nw = w.clone();
                    nw[i] = *j;
                    if let Some((sorted, sign)) = crate::words::sort_with_sign(&nw) {
                        let idx = wwords.rank(&sorted) as Idx;
                        let cc = if sign > 0 { c.clone() } else { f.neg(c) };
                        acc.add(&f, idx, cc);
                    }
                }
            }
            table[xw * dim + xv] = acc.into_vec(&f);
        }
    }
    BinaryLeibniz { dim, field: f, table }
}

/// The second slot of the tensor bracket factors through the sorting
/// projection: acting by any signed representative of a wedge letter agrees
/// with acting by the canonical one.
pub fn wedge_action_rep_independent<F: Field>(
    canon: &CanonStructure,
    dn: &BinaryLeibniz<F>,
) -> CheckOutcome {
    let f = &dn.field;
    let mut violations = Vec::new();
    let mut checked = 0usize;
    for letter in 0..canon.tensor_count() as u32 {
        let Some((wedge, sign)) = canon.project(letter) else { continue };
        let canonical = canon.section(wedge);
        if letter == canonical {
            continue;
        }
        for b in 0..dn.dim as u32 {
            checked += 1;
            let via_rep = dn.bracket(b, letter);
            let via_canon = dn.bracket(b, canonical);
            let scaled = if sign > 0 {
                via_canon.clone()
            } else {
                via_canon.neg(f)
            };
            if *via_rep != scaled {
                violations.push(format!("letter {letter} vs canonical {canonical}, b={b}"));
            }
        }
    }
    CheckOutcome::from_violations("wedge_action_rep_independent", checked, violations)
}

/// Left/right action matrices of a binary algebra on a module, one matrix per
/// acting basis element.
#[derive(Clone, Debug)]
pub struct Corep<F: Field> {
    pub module_dim: usize,
    pub left: Vec<SparseMatrix<F::Elem>>,
    pub right: Vec<SparseMatrix<F::Elem>>,
    /// True when the right action is identically zero by construction.
    pub right_is_zero: bool,
}

impl<F: Field> Corep<F> {
    pub fn apply_left(&self, field: &F, x: u32, m: &SparseVec<F::Elem>) -> SparseVec<F::Elem> {
        self.left[x as usize].apply(field, m)
    }

    pub fn apply_right(&self, field: &F, m: &SparseVec<F::Elem>, x: u32) -> SparseVec<F::Elem> {
        self.right[x as usize].apply(field, m)
    }

    /// Left action by a vector of the acting algebra.
    pub fn apply_left_vec(
        &self,
        field: &F,
        x: &SparseVec<F::Elem>,
        m: &SparseVec<F::Elem>,
    ) -> SparseVec<F::Elem> {
        let mut acc = Accumulator::new();
        for (i, c) in x.iter() {
            acc.add_vec(field, c, &self.left[*i as usize].apply(field, m));
        }
        acc.into_vec(field)
    }
}

fn matrices_from<F: Field>(
    field: &F,
    hdim: usize,
    mdim: usize,
    f: impl Fn(u32, u32) -> SparseVec<F::Elem>,
) -> Vec<SparseMatrix<F::Elem>> {
    let _ = field;
    (0..hdim as u32)
        .map(|x| {
            SparseMatrix::from_columns(mdim, (0..mdim as u32).map(|m| f(x, m)).collect())
        })
        .collect()
}

/// Base space as a module over the tensor power: left(b, v) = -[v; b],
/// right(v, b) = +[v; b], where [v; b] is the base bracket with b's letters.
pub fn base_on_tensor<F: Field>(alg: &Algebra<F>) -> Corep<F> {
    let f = alg.field.clone();
    let m = alg.arity - 1;
    let dwords = TensorWords::new(alg.dim, m);
    let act = |b: u32, v: u32| -> SparseVec<F::Elem> {
        let letters = dwords.unrank(b as usize);
        let mut args = Vec::with_capacity(alg.arity);
        args.push(v);
        args.extend_from_slice(&letters);
        alg.bracket(&args).clone()
    };
    let left = matrices_from(&f, dwords.count(), alg.dim, |b, v| act(b, v).neg(&f));
    let right = matrices_from(&f, dwords.count(), alg.dim, act);
    Corep { module_dim: alg.dim, left, right, right_is_zero: false }
}

/// Base space as a module over the wedge power, through canonical sections.
pub fn base_on_wedge<F: Field>(alg: &Algebra<F>, canon: &CanonStructure) -> Corep<F> {
    let f = alg.field.clone();
    let act = |w: u32, v: u32| -> SparseVec<F::Elem> {
        let letters = canon.dwords.unrank(canon.section(w) as usize);
        let mut args = Vec::with_capacity(alg.arity);
        args.push(v);
        args.extend_from_slice(&letters);
        alg.bracket(&args).clone()
    };
    let left = matrices_from(&f, canon.wedge_count(), alg.dim, |w, v| act(w, v).neg(&f));
    let right = matrices_from(&f, canon.wedge_count(), alg.dim, act);
    Corep { module_dim: alg.dim, left, right, right_is_zero: false }
}

/// Tensor power as a module over the wedge power:
/// left(w, b) = -[b; section(w)] in the tensor algebra, right ≡ 0.
pub fn tensor_on_wedge<F: Field>(
    canon: &CanonStructure,
    dn: &BinaryLeibniz<F>,
) -> Corep<F> {
    let f = dn.field.clone();
    let ddim = dn.dim;
    let left = matrices_from(&f, canon.wedge_count(), ddim, |w, b| {
        dn.bracket(b, canon.section(w)).neg(&f)
    });
    let right = matrices_from(&f, canon.wedge_count(), ddim, |_, _| SparseVec::new());
    Corep { module_dim: ddim, left, right, right_is_zero: true }
}

/// Left action of the tensor power on base ⊗ tensor:
/// left(c, (v, b)) = (left0(c, v), b) - (v, [b; c]).
/// Module index = v * tensor_dim + b.
fn pair_left_on_tensor<F: Field>(
    alg: &Algebra<F>,
    dn: &BinaryLeibniz<F>,
) -> Vec<SparseMatrix<F::Elem>> {
    let f = alg.field.clone();
    let base = base_on_tensor(alg);
    let ddim = dn.dim;
    let mdim = alg.dim * ddim;
    let dec = |m: u32| -> (u32, u32) { (m / ddim as u32, m % ddim as u32) };
    matrices_from(&f, ddim, mdim, |c, m| {
        let (v, b) = dec(m);
        let mut acc = Accumulator::new();
        for (v2, cv) in base.left[c as usize].col(v as usize).iter() {
            acc.add(&f, v2 * ddim as Idx + b, cv.clone());
        }
        let br = dn.bracket(b, c);
        for (b2, cb) in br.iter() {
            acc.add(&f, v * ddim as Idx + b2, f.neg(cb));
        }
        acc.into_vec(&f)
    })
}

/// base ⊗ tensor as a module over the tensor power. The right action is the
/// exact negative of the left one: right((v, b), c) = (right0(v, c), b) +
/// (v, [b; c]). The variant with the head term negated (see
/// `pair_on_tensor_transcribed`) fails axiom (c) and is not used.
pub fn pair_on_tensor<F: Field>(alg: &Algebra<F>, dn: &BinaryLeibniz<F>) -> Corep<F> {
    let f = alg.field.clone();
    let left = pair_left_on_tensor(alg, dn);
    let right = left.iter().map(|m| m.neg(&f)).collect();
    Corep { module_dim: alg.dim * dn.dim, left, right, right_is_zero: false }
}

/// The same module with the right action head term negated:
/// right((v, b), c) = (v, [b; c]) - (right0(v, c), b). Kept only as a
/// documented negative control; it violates axiom (c) on non-abelian inputs.
pub fn pair_on_tensor_transcribed<F: Field>(
    alg: &Algebra<F>,
    dn: &BinaryLeibniz<F>,
) -> Corep<F> {
    let f = alg.field.clone();
    let base = base_on_tensor(alg);
    let ddim = dn.dim;
    let mdim = alg.dim * ddim;
    let dec = |m: u32| -> (u32, u32) { (m / ddim as u32, m % ddim as u32) };
    let left = pair_left_on_tensor(alg, dn);
    let right = matrices_from(&f, ddim, mdim, |c, m| {
        let (v, b) = dec(m);
        let mut acc = Accumulator::new();
        let br = dn.bracket(b, c);
        for (b2, cb) in br.iter() {
            acc.add(&f, v * ddim as Idx + b2, cb.clone());
        }
        for (v2, cv) in base.right[c as usize].col(v as usize).iter() {
            acc.add(&f, v2 * ddim as Idx + b, f.neg(cv));
        }
        acc.into_vec(&f)
    });
    Corep { module_dim: mdim, left, right, right_is_zero: false }
}

/// base ⊗ tensor as a module over the wedge power, acting through canonical
/// sections; right action is the exact negative of the left one.
pub fn pair_on_wedge<F: Field>(
    alg: &Algebra<F>,
    canon: &CanonStructure,
    dn: &BinaryLeibniz<F>,
) -> Corep<F> {
    let f = alg.field.clone();
    let base = base_on_tensor(alg);
    let ddim = dn.dim;
    let mdim = alg.dim * ddim;
    let dec = |m: u32| -> (u32, u32) { (m / ddim as u32, m % ddim as u32) };
    let left = matrices_from(&f, canon.wedge_count(), mdim, |w, m| {
        let (v, b) = dec(m);
        let what = canon.section(w);
        let mut acc = Accumulator::new();
        for (v2, cv) in base.left[what as usize].col(v as usize).iter() {
            acc.add(&f, v2 * ddim as Idx + b, cv.clone());
        }
        let br = dn.bracket(b, what);
        for (b2, cb) in br.iter() {
            acc.add(&f, v * ddim as Idx + b2, f.neg(cb));
        }
        acc.into_vec(&f)
    });
    let right = left.iter().map(|m| m.neg(&f)).collect();
    Corep { module_dim: mdim, left, right, right_is_zero: false }
}

/// One-dimensional module with zero actions.
pub fn trivial_corep<F: Field>(field: &F, hdim: usize) -> Corep<F> {
    let left = matrices_from(field, hdim, 1, |_, _| SparseVec::new());
    let right = matrices_from(field, hdim, 1, |_, _| SparseVec::new());
    Corep { module_dim: 1, left, right, right_is_zero: true }
}

/// The three compatibility axioms for a module over a binary algebra, checked
/// as exact matrix identities on all basis pairs:
///   (a) L_{[x,y]} = L_x L_y - L_y L_x
///   (b) L_y R_x = R_x L_y - R_{[x,y]}
///   (c) R_y R_x = R_{[x,y]} - R_x L_y
pub fn check_corep_axioms<F: Field>(
    h: &BinaryLeibniz<F>,
    corep: &Corep<F>,
    name: &str,
) -> CheckOutcome {
    let f = &h.field;
    let mut violations = Vec::new();
    let lcomb = |v: &SparseVec<F::Elem>, mats: &Vec<SparseMatrix<F::Elem>>| -> SparseMatrix<F::Elem> {
        let mut acc = SparseMatrix::zero(corep.module_dim, corep.module_dim);
        for (z, c) in v.iter() {
            acc = acc.add_scaled(f, c, &mats[*z as usize]);
        }
        acc
    };
    for x in 0..h.dim as u32 {
        for y in 0..h.dim as u32 {
            let bxy = h.bracket(x, y);
            let lx = &corep.left[x as usize];
            let ly = &corep.left[y as usize];
            let rx = &corep.right[x as usize];
            let ry = &corep.right[y as usize];
            let a_lhs = lcomb(bxy, &corep.left);
            let a_rhs = lx.compose(f, ly).sub(f, &ly.compose(f, lx));
            if !a_lhs.sub(f, &a_rhs).is_zero() {
                violations.push(format!("axiom a at ({x},{y})"));
            }
            let rxy = lcomb(bxy, &corep.right);
            let b_lhs = ly.compose(f, rx);
            let b_rhs = rx.compose(f, ly).sub(f, &rxy);
            if !b_lhs.sub(f, &b_rhs).is_zero() {
                violations.push(format!("axiom b at ({x},{y})"));
            }
            let c_lhs = ry.compose(f, rx);
            let c_rhs = rxy.sub(f, &rx.compose(f, ly));
            if !c_lhs.sub(f, &c_rhs).is_zero() {
                violations.push(format!("axiom c at ({x},{y})"));
            }
        }
    }
    CheckOutcome::from_violations(name, h.dim * h.dim * 3, violations)
}

/// Letterwise projection matrix from the tensor power to the wedge power.
pub fn projection_matrix<F: Field>(field: &F, canon: &CanonStructure) -> SparseMatrix<F::Elem> {
    let cols = (0..canon.tensor_count() as u32)
        .map(|l| match canon.project(l) {
            None => SparseVec::new(),
            Some((w, s)) => {
                let c = if s > 0 { field.one() } else { field.neg(&field.one()) };
                SparseVec::from_sorted(vec![(w as Idx, c)])
            }
        })
        .collect();
    SparseMatrix::from_columns(canon.wedge_count(), cols)
}

/// Canonical section matrix from the wedge power into the tensor power.
pub fn section_matrix<F: Field>(field: &F, canon: &CanonStructure) -> SparseMatrix<F::Elem> {
    let cols = (0..canon.wedge_count() as u32)
        .map(|w| SparseVec::unit(field, canon.section(w) as Idx))
        .collect();
    SparseMatrix::from_columns(canon.tensor_count(), cols)
}

/// The projection intertwines the tensor and wedge algebras:
/// proj([a; b]) = [proj a; proj b] on all basis pairs.
pub fn check_projection_homomorphism<F: Field>(
    canon: &CanonStructure,
    dn: &BinaryLeibniz<F>,
    ln: &BinaryLeibniz<F>,
) -> CheckOutcome {
    let f = &dn.field;
    let proj = projection_matrix(f, canon);
    let mut violations = Vec::new();
    for a in 0..dn.dim as u32 {
        for b in 0..dn.dim as u32 {
            let lhs = proj.apply(f, dn.bracket(a, b));
            let pa = proj.col(a as usize);
            let pb = proj.col(b as usize);
            let mut acc = Accumulator::new();
            for (wa, ca) in pa.iter() {
                for (wb, cb) in pb.iter() {
                    acc.add_vec(f, &f.mul(ca, cb), ln.bracket(*wa, *wb));
                }
            }
            let rhs = acc.into_vec(f);
            if lhs != rhs {
                violations.push(format!("pair ({a},{b})"));
            }
        }
    }
    CheckOutcome::from_violations("projection_homomorphism", dn.dim * dn.dim, violations)
}

/// The kernel of the projection is a two-sided ideal of the tensor algebra.
pub fn check_kernel_ideal<F: Field>(
    canon: &CanonStructure,
    dn: &BinaryLeibniz<F>,
    gamma: &KernelWords,
) -> CheckOutcome {
    let f = &dn.field;
    let proj = projection_matrix(f, canon);
    let mut violations = Vec::new();
    let mut checked = 0usize;
    for s in 0..gamma.count() as u32 {
        let g = SparseVec::from_sorted({
            let mut e = gamma.basis_entries(f, s);
            e.sort_by_key(|x| x.0);
            e
        });
        for b in 0..dn.dim as u32 {
            checked += 2;
            let lv = dn.bracket_vec_left(&g, b);
            if !proj.apply(f, &lv).is_empty() {
                violations.push(format!("left product escapes at (kernel {s}, {b})"));
            }
            let rv = dn.bracket_vec_right(b, &g);
            if !proj.apply(f, &rv).is_empty() {
                violations.push(format!("right product escapes at ({b}, kernel {s})"));
            }
        }
    }
    CheckOutcome::from_violations("kernel_ideal", checked, violations)
}

/// Express the kernel of the projection as a binary algebra in its structured
/// basis coordinates. Errors if a product escapes the kernel.
pub fn kernel_subalgebra<F: Field>(
    dn: &BinaryLeibniz<F>,
    gamma: &KernelWords,
) -> Result<BinaryLeibniz<F>> {
    let f = dn.field.clone();
    let dim = gamma.count();
    let gvec = |s: u32| -> SparseVec<F::Elem> {
        let mut e = gamma.basis_entries(&f, s);
        e.sort_by_key(|x| x.0);
        SparseVec::from_sorted(e)
    };
    let mut table = vec![SparseVec::new(); dim * dim];
    for a in 0..dim as u32 {
        let ga = gvec(a);
        for b in 0..dim as u32 {
            let gb = gvec(b);
            let prod = dn.bracket_bilinear(&ga, &gb);
            let red = crate::words::reduce_mod_kernel(&f, gamma, &prod);
            if !red.residual.is_empty() {
                return Err(Error::SubspaceEscape(format!(
                    "kernel product ({a},{b}) leaves the kernel"
                )));
            }
            table[a as usize * dim + b as usize] = SparseVec::collect(
                &f,
                red.coeffs.into_iter().map(|((head, sub), c)| {
                    debug_assert_eq!(head, 0);
                    (sub as Idx, c)
                }),
            );
        }
    }
    Ok(BinaryLeibniz { dim, field: f, table })
}

/// Restrict a corep on head ⊗ tensor to head ⊗ kernel, re-expressing the
/// action matrices in structured kernel coordinates. Errors if an action
/// escapes the subspace.
pub fn restrict_to_kernel<F: Field>(
    field: &F,
    corep: &Corep<F>,
    head_dim: usize,
    gamma: &KernelWords,
) -> Result<Corep<F>> {
    let tdim = gamma.ambient_count();
    debug_assert_eq!(corep.module_dim, head_dim * tdim);
    let sdim = head_dim * gamma.count();
    let expand = |idx: u32| -> SparseVec<F::Elem> {
        let head = idx / gamma.count() as u32;
        let sub = idx % gamma.count() as u32;
        SparseVec::collect(
            field,
            gamma
                .basis_entries(field, sub)
                .into_iter()
                .map(|(j, c)| (head * tdim as Idx + j, c)),
        )
    };
    let build = |mats: &Vec<SparseMatrix<F::Elem>>| -> Result<Vec<SparseMatrix<F::Elem>>> {
        let mut out = Vec::with_capacity(mats.len());
        for m in mats {
            let mut cols = Vec::with_capacity(sdim);
            for idx in 0..sdim as u32 {
                let img = m.apply(field, &expand(idx));
                let red = crate::words::reduce_mod_kernel(field, gamma, &img);
                if !red.residual.is_empty() {
                    return Err(Error::SubspaceEscape(
                        "action does not preserve the kernel submodule".into(),
                    ));
                }
                cols.push(SparseVec::collect(
                    field,
                    red.coeffs
                        .into_iter()
                        .map(|((h, s), c)| (h * gamma.count() as Idx + s, c)),
                ));
            }
            out.push(SparseMatrix::from_columns(sdim, cols));
        }
        Ok(out)
    };
    let left = build(&corep.left)?;
    let right = build(&corep.right)?;
    Ok(Corep { module_dim: sdim, left, right, right_is_zero: corep.right_is_zero })
}

/// Left and right actions of a corep sum to zero generator by generator.
/// Holds by construction for the pair actions; fails for the transcribed
/// variant, whose sum is -2·(head right action).
pub fn check_left_right_sum_zero<F: Field>(
    field: &F,
    corep: &Corep<F>,
    name: &str,
) -> CheckOutcome {
    let mut violations = Vec::new();
    for c in 0..corep.left.len() {
        let sum = corep.left[c].add_scaled(field, &field.one(), &corep.right[c]);
        if !sum.is_zero() {
            violations.push(format!("generator {c}"));
        }
    }
    CheckOutcome::from_violations(name, corep.left.len(), violations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::CheckLevel;
    use crate::field::PrimeField;

    fn f() -> PrimeField {
        PrimeField::new(32003).unwrap()
    }

    fn simple3() -> Algebra<PrimeField> {
        Algebra::simple_filippov(f(), 3)
    }

    #[test]
    fn tensor_algebra_spot_values() {
        let alg = simple3();
        let dn = tensor_algebra(&alg);
        assert_eq!(dn.dim, 16);
        let dw = TensorWords::new(4, 2);
        // [e0⊗e1 ; e2⊗e3] = [e0,e2,e3]⊗e1 + e0⊗[e1,e2,e3] = e1⊗e1 - e0⊗e0.
        let v = dn.bracket(dw.rank(&[0, 1]) as u32, dw.rank(&[2, 3]) as u32);
        let expect = SparseVec::collect(
            &f(),
            vec![
                (dw.rank(&[1, 1]) as Idx, f().one()),
                (dw.rank(&[0, 0]) as Idx, f().neg(&f().one())),
            ],
        );
        assert_eq!(*v, expect);
    }

    #[test]
    fn induced_algebras_satisfy_binary_identity() {
        for alg in [simple3(), Algebra::abelian(f(), 2, 3), Algebra::abelian(f(), 3, 3)] {
            let dn = tensor_algebra(&alg);
            let out = dn.check_binary_identity();
            assert!(out.passed(), "{}: {:?}", alg.name, out.violations);
            let canon = CanonStructure::new(alg.dim, alg.arity);
            let ln = wedge_algebra(&alg, &canon);
            let out = ln.check_binary_identity();
            assert!(out.passed(), "{} wedge: {:?}", alg.name, out.violations);
        }
        // The binary member: tensor power of an n=2 algebra is itself.
        let doc = crate::algebra::AlgebraDocument::from_json(
            r#"{"name":"b","n":2,"dim":2,"field":"prime:32003",
                "brackets":[{"args":[1,1],"value":[[0,"1"]]}]}"#,
        )
        .unwrap();
        let b = Algebra::from_document(&doc, f()).unwrap();
        let dn = tensor_algebra(&b);
        assert!(dn.check_binary_identity().passed());
        assert_eq!(dn.dim, 2);
        assert_eq!(*dn.bracket(1, 1), SparseVec::unit(&f(), 0));
    }

    #[test]
    fn wedge_independence_holds_for_filippov() {
        let alg = simple3();
        let canon = CanonStructure::new(4, 3);
        let dn = tensor_algebra(&alg);
        assert!(wedge_action_rep_independent(&canon, &dn).passed());
        let hom = check_projection_homomorphism(&canon, &dn, &wedge_algebra(&alg, &canon));
        assert!(hom.passed(), "{:?}", hom.violations);
    }

    #[test]
    fn corep_axioms_pass_on_corpus() {
        for alg in [simple3(), Algebra::abelian(f(), 2, 3)] {
            let canon = CanonStructure::new(alg.dim, alg.arity);
            let dn = tensor_algebra(&alg);
            let ln = wedge_algebra(&alg, &canon);
            let cases: Vec<(&str, &BinaryLeibniz<PrimeField>, Corep<PrimeField>)> = vec![
                ("base_on_tensor", &dn, base_on_tensor(&alg)),
                ("base_on_wedge", &ln, base_on_wedge(&alg, &canon)),
                ("tensor_on_wedge", &ln, tensor_on_wedge(&canon, &dn)),
                ("pair_on_tensor", &dn, pair_on_tensor(&alg, &dn)),
                ("pair_on_wedge", &ln, pair_on_wedge(&alg, &canon, &dn)),
                ("trivial", &ln, trivial_corep(&f(), ln.dim)),
            ];
            for (name, h, corep) in cases {
                let out = check_corep_axioms(h, &corep, name);
                assert!(
                    out.passed(),
                    "{} on {}: {:?}",
                    name,
                    alg.name,
                    out.violations
                );
            }
        }
    }

    #[test]
    fn corep_axioms_fail_on_broken_action() {
        let alg = simple3();
        let dn = tensor_algebra(&alg);
        let mut corep = base_on_tensor(&alg);
        // Flip the sign of one left action generator; axiom (a) must break.
        corep.left[3] = corep.left[3].sub(&f(), &corep.left[3]).sub(&f(), &corep.left[3]);
        let out = check_corep_axioms(&dn, &corep, "broken");
        assert!(!out.passed());
    }

    #[test]
    fn pair_action_sum_and_transcribed_variant() {
        let alg = simple3();
        let dn = tensor_algebra(&alg);
        let pair = pair_on_tensor(&alg, &dn);
        assert!(check_left_right_sum_zero(&f(), &pair, "pair_sum").passed());
        // The variant with the negated head term in the right action is not a
        // co-representation: axiom (c) breaks, and left + right lands on
        // -2·(head right action) instead of zero.
        let transcribed = pair_on_tensor_transcribed(&alg, &dn);
        let out = check_corep_axioms(&dn, &transcribed, "transcribed");
        assert!(!out.passed());
        assert!(out.violations.iter().all(|v| v.starts_with("axiom c")));
        assert!(!check_left_right_sum_zero(&f(), &transcribed, "t_sum").passed());
        let base = base_on_tensor(&alg);
        let ddim = dn.dim;
        for c in 0..ddim {
            let sum = transcribed.left[c].add_scaled(&f(), &f().one(), &transcribed.right[c]);
            let expected = SparseMatrix::from_columns(
                transcribed.module_dim,
                (0..transcribed.module_dim as u32)
                    .map(|m| {
                        let (v, b) = (m / ddim as u32, m % ddim as u32);
                        let mut acc = Accumulator::new();
                        for (v2, cv) in base.right[c].col(v as usize).iter() {
                            acc.add(&f(), v2 * ddim as Idx + b, f().mul(&f().from_i64(-2), cv));
                        }
                        acc.into_vec(&f())
                    })
                    .collect(),
            );
            assert!(sum.sub(&f(), &expected).is_zero(), "generator {c}");
        }
    }

    #[test]
    fn kernel_ideal_and_subalgebra() {
        let alg = simple3();
        let canon = CanonStructure::new(4, 3);
        let dn = tensor_algebra(&alg);
        let gamma = KernelWords::new(&canon, 1);
        assert_eq!(gamma.count(), 10);
        let out = check_kernel_ideal(&canon, &dn, &gamma);
        assert!(out.passed(), "{:?}", out.violations);
        let sub = kernel_subalgebra(&dn, &gamma).unwrap();
        assert!(sub.check_binary_identity().passed());
    }

    #[test]
    fn restricted_coreps_pass_axioms() {
        let alg = simple3();
        let canon = CanonStructure::new(4, 3);
        let dn = tensor_algebra(&alg);
        let ln = wedge_algebra(&alg, &canon);
        let gamma = KernelWords::new(&canon, 1);
        // tensor_on_wedge restricted to the kernel (head = 1).
        let tw = tensor_on_wedge(&canon, &dn);
        let restricted = restrict_to_kernel(&f(), &tw, 1, &gamma).unwrap();
        assert_eq!(restricted.module_dim, 10);
        let out = check_corep_axioms(&ln, &restricted, "kernel_on_wedge");
        assert!(out.passed(), "{:?}", out.violations);
        // pair_on_wedge restricted to base ⊗ kernel (head = dim g).
        let pw = pair_on_wedge(&alg, &canon, &dn);
        let restricted = restrict_to_kernel(&f(), &pw, 4, &gamma).unwrap();
        assert_eq!(restricted.module_dim, 40);
        let out = check_corep_axioms(&ln, &restricted, "pair_kernel_on_wedge");
        assert!(out.passed(), "{:?}", out.violations);
    }

    #[test]
    fn base_identity_check_levels() {
        let alg = simple3();
        let out = alg.check_fundamental_identity(CheckLevel::Certify);
        assert!(out.passed());
    }

    #[test]
    fn abelian_induced_tables_vanish() {
        let alg = Algebra::abelian(f(), 3, 3);
        let dn = tensor_algebra(&alg);
        for a in 0..dn.dim as u32 {
            for b in 0..dn.dim as u32 {
                assert!(dn.bracket(a, b).is_empty());
            }
        }
    }
}
