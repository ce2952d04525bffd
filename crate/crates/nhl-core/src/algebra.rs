//! n-ary algebras given by structure constants: input documents, validation,
//! axiom checks, builtin families, and content fingerprints.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec};
use crate::linalg::{Accumulator, Idx, SparseVec};
use crate::words::{sort_with_sign, TensorWords};

/// Largest allowed structure-constant table (alphabet^arity).
const MAX_TABLE: usize = 1 << 21;

/// How much work the checkers do.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckLevel {
    /// Complete basis-level checks (multilinearity makes these exhaustive).
    Fast,
    /// Basis-level checks plus structural cross-checks.
    Full,
    /// Full plus seeded randomized probes through the linear-extension paths.
    Certify,
}

impl std::str::FromStr for CheckLevel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(CheckLevel::Fast),
            "full" => Ok(CheckLevel::Full),
            "certify" => Ok(CheckLevel::Certify),
            _ => Err(Error::Parse(format!("unknown check level {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

/// Result of one named check. Violations are rendered strings in a
/// deterministic (construction) order, truncated after a fixed budget.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub status: CheckStatus,
    /// Number of instances examined.
    pub checked: usize,
    pub violations: Vec<String>,
    /// Count of violations beyond the recorded ones.
    pub omitted_violations: usize,
}

pub const MAX_RECORDED_VIOLATIONS: usize = 32;

impl CheckOutcome {
    pub fn from_violations(name: &str, checked: usize, mut violations: Vec<String>) -> Self {
        let total = violations.len();
        violations.truncate(MAX_RECORDED_VIOLATIONS);
        CheckOutcome {
            name: name.into(),
            status: if total == 0 { CheckStatus::Pass } else { CheckStatus::Fail },
            checked,
            violations,
            omitted_violations: total.saturating_sub(MAX_RECORDED_VIOLATIONS),
        }
    }

    pub fn skipped(name: &str, reason: &str) -> Self {
        CheckOutcome {
            name: name.into(),
            status: CheckStatus::Skipped,
            checked: 0,
            violations: vec![format!("skipped: {reason}")],
            omitted_violations: 0,
        }
    }

    pub fn passed(&self) -> bool {
        self.status != CheckStatus::Fail
    }
}

/// One bracket value in the input document: argument tuple and the value as
/// (basis index, coefficient string) pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BracketEntry {
    pub args: Vec<u32>,
    pub value: Vec<(u32, String)>,
}

/// Input document describing an algebra by structure constants.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDocument {
    pub name: String,
    pub n: usize,
    pub dim: usize,
    pub field: FieldSpec,
    /// When true, entries are listed on strictly increasing argument tuples
    /// only and the table is completed by antisymmetry.
    #[serde(default)]
    pub skew_complete: bool,
    pub brackets: Vec<BracketEntry>,
}

impl AlgebraDocument {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("algebra document: {e}")))
    }
}

/// An n-ary algebra over an exact field, with the full structure-constant
/// table expanded on basis tuples.
#[derive(Clone, Debug)]
pub struct Algebra<F: Field> {
    pub name: String,
    pub arity: usize,
    pub dim: usize,
    pub field: F,
    words: TensorWords,
    table: Vec<SparseVec<F::Elem>>,
}

impl<F: Field> Algebra<F> {
    pub fn from_document(doc: &AlgebraDocument, field: F) -> Result<Self> {
        if doc.n < 2 {
            return Err(Error::Parse(format!("arity must be at least 2, got {}", doc.n)));
        }
        if doc.dim == 0 {
            return Err(Error::Parse("dimension must be positive".into()));
        }
        let words = TensorWords::new(doc.dim, doc.n);
        let table_size = (doc.dim as u128).checked_pow(doc.n as u32);
        match table_size {
            Some(t) if t <= MAX_TABLE as u128 => {}
            _ => {
                return Err(Error::Parse(format!(
                    "structure table dim^n = {}^{} exceeds the supported size",
                    doc.dim, doc.n
                )))
            }
        }
        let mut table = vec![SparseVec::new(); words.count()];
        let mut seen = vec![false; words.count()];
        for entry in &doc.brackets {
            if entry.args.len() != doc.n {
                return Err(Error::Parse(format!(
                    "bracket args {:?} do not have arity {}",
                    entry.args, doc.n
                )));
            }
            if entry.args.iter().any(|&a| a as usize >= doc.dim) {
                return Err(Error::Parse(format!(
                    "bracket args {:?} out of range for dimension {}",
                    entry.args, doc.dim
                )));
            }
            if doc.skew_complete && !entry.args.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::Parse(format!(
                    "skew_complete documents list strictly increasing tuples only, got {:?}",
                    entry.args
                )));
            }
            let rank = words.rank(&entry.args);
            if seen[rank] {
                return Err(Error::Parse(format!("duplicate bracket entry for {:?}", entry.args)));
            }
            seen[rank] = true;
            let mut acc = Accumulator::new();
            for (j, cs) in &entry.value {
                if *j as usize >= doc.dim {
                    return Err(Error::Parse(format!(
                        "bracket value index {} out of range for dimension {}",
                        j, doc.dim
                    )));
                }
                acc.add(&field, *j, field.parse(cs)?);
            }
            table[rank] = acc.into_vec(&field);
        }
        if doc.skew_complete {
            // Complete by antisymmetry: every permutation of a listed tuple.
            let mut full = vec![SparseVec::new(); words.count()];
            for r in 0..words.count() {
                let w = words.unrank(r);
                if let Some((sorted, sign)) = sort_with_sign(&w) {
                    let src = &table[words.rank(&sorted)];
                    full[r] = if sign > 0 { src.clone() } else { src.neg(&field) };
                }
            }
            table = full;
        }
        Ok(Algebra { name: doc.name.clone(), arity: doc.n, dim: doc.dim, field, words, table })
    }

    fn from_table(name: &str, arity: usize, dim: usize, field: F, table: Vec<SparseVec<F::Elem>>) -> Self {
        let words = TensorWords::new(dim, arity);
        debug_assert_eq!(table.len(), words.count());
        Algebra { name: name.into(), arity, dim, field, words, table }
    }

    /// The zero algebra of a given dimension and arity.
    pub fn abelian(field: F, dim: usize, arity: usize) -> Self {
        let words = TensorWords::new(dim, arity);
        let table = vec![SparseVec::new(); words.count()];
        Self::from_table(&format!("abelian({dim},{arity})"), arity, dim, field, table)
    }

    /// The (n+1)-dimensional simple Filippov algebra: on the increasing tuple
    /// omitting basis vector i (0-based), the bracket is (-1)^(dim-1-i) e_i,
    /// the Levi-Civita pattern.
    pub fn simple_filippov(field: F, arity: usize) -> Self {
        let dim = arity + 1;
        let words = TensorWords::new(dim, arity);
        let mut table = vec![SparseVec::new(); words.count()];
        for i in 0..dim {
            let args: Vec<u32> = (0..dim as u32).filter(|&j| j as usize != i).collect();
            let sign = if (dim - 1 - i) % 2 == 0 { 1i64 } else { -1 };
            let value = SparseVec::collect(&field, [(i as Idx, field.from_i64(sign))]);
            table[words.rank(&args)] = value;
        }
        // Complete by antisymmetry.
        let mut full = vec![SparseVec::new(); words.count()];
        for r in 0..words.count() {
            let w = words.unrank(r);
            if let Some((sorted, sign)) = sort_with_sign(&w) {
                let src = &table[words.rank(&sorted)];
                full[r] = if sign > 0 { src.clone() } else { src.neg(&field) };
            }
        }
        Self::from_table(&format!("simple_filippov({arity})"), arity, dim, field, full)
    }

    /// Direct sum: brackets vanish on mixed tuples.
    pub fn direct_sum(a: &Self, b: &Self) -> Result<Self> {
        if a.arity != b.arity {
            return Err(Error::Hypothesis(format!(
                "direct sum needs equal arities, got {} and {}",
                a.arity, b.arity
            )));
        }
        let field = a.field.clone();
        let dim = a.dim + b.dim;
        let words = TensorWords::new(dim, a.arity);
        let mut table = vec![SparseVec::new(); words.count()];
        for r in 0..words.count() {
            let w = words.unrank(r);
            if w.iter().all(|&x| (x as usize) < a.dim) {
                table[r] = a.table[a.words.rank(&w)].clone();
            } else if w.iter().all(|&x| (x as usize) >= a.dim) {
                let shifted: Vec<u32> = w.iter().map(|&x| x - a.dim as u32).collect();
                table[r] = b.table[b.words.rank(&shifted)]
                    .map_indices(|i| i + a.dim as Idx);
            }
        }
        Ok(Self::from_table(
            &format!("direct_sum({},{})", a.name, b.name),
            a.arity,
            dim,
            field,
            table,
        ))
    }

    /// Bracket value on a basis tuple.
    pub fn bracket(&self, args: &[u32]) -> &SparseVec<F::Elem> {
        &self.table[self.words.rank(args)]
    }

    /// Bracket with one slot replaced by a vector, others basis indices.
    pub fn bracket_with(&self, args: &[u32], slot: usize, v: &SparseVec<F::Elem>) -> SparseVec<F::Elem> {
        let f = &self.field;
        let mut acc = Accumulator::new();
        let mut a = args.to_vec();
        for (j, c) in v.iter() {
            a[slot] = *j;
            acc.add_vec(f, c, &self.table[self.words.rank(&a)]);
        }
        acc.into_vec(f)
    }

    /// Fully multilinear bracket of vector arguments (certify-level probes).
    pub fn bracket_multi(&self, args: &[SparseVec<F::Elem>]) -> SparseVec<F::Elem> {
        debug_assert_eq!(args.len(), self.arity);
        let f = &self.field;
        let mut acc = Accumulator::new();
        let mut tuple = vec![0u32; self.arity];
        fn rec<F: Field>(
            alg: &Algebra<F>,
            args: &[SparseVec<F::Elem>],
            slot: usize,
            coeff: F::Elem,
            tuple: &mut Vec<u32>,
            acc: &mut Accumulator<F::Elem>,
        ) {
            let f = &alg.field;
            if slot == args.len() {
                acc.add_vec(f, &coeff, alg.bracket(tuple));
                return;
            }
            for (j, c) in args[slot].iter() {
                tuple[slot] = *j;
                rec(alg, args, slot + 1, f.mul(&coeff, c), tuple, acc);
            }
        }
        rec(self, args, 0, f.one(), &mut tuple, &mut acc);
        acc.into_vec(f)
    }

    fn render_vec(&self, v: &SparseVec<F::Elem>) -> String {
        if v.is_empty() {
            return "0".into();
        }
        v.iter()
            .map(|(i, c)| format!("{}*e{}", self.field.render(c), i))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// The defining derivation property of the bracket over basis tuples:
    /// applying the bracket to a bracketed tuple expands slotwise.
    pub fn check_fundamental_identity(&self, level: CheckLevel) -> CheckOutcome {
        let f = &self.field;
        let outer = TensorWords::new(self.dim, self.arity);
        let inner = TensorWords::new(self.dim, self.arity - 1);
        let violations: Vec<String> = (0..outer.count())
            .into_par_iter()
            .map(|xr| {
                let xs = outer.unrank(xr);
                let mut local = Vec::new();
                for yr in 0..inner.count() {
                    let ys = inner.unrank(yr);
                    // lhs = [[x1..xn], y1..y_{n-1}] by linearity in slot 0.
                    let bx = self.bracket(&xs);
                    let mut args = vec![0u32; self.arity];
                    args[1..].copy_from_slice(&ys);
                    let lhs = self.bracket_with(&args, 0, bx);
                    // rhs = sum_i [x1.., [x_i, y..], ..xn].
                    let mut acc = Accumulator::new();
                    for i in 0..self.arity {
                        let mut iargs = vec![xs[i]; self.arity];
                        iargs[0] = xs[i];
                        iargs[1..].copy_from_slice(&ys);
                        let inner_val = self.bracket(&iargs).clone();
                        let term = self.bracket_with(&xs, i, &inner_val);
                        acc.add_vec(f, &f.one(), &term);
                    }
                    let rhs = acc.into_vec(f);
                    if lhs != rhs {
                        local.push(format!(
                            "args x={xs:?} y={ys:?}: lhs {} != rhs {}",
                            self.render_vec(&lhs),
                            self.render_vec(&rhs)
                        ));
                    }
                }
                local
            })
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect();
        let mut checked = outer.count() * inner.count();
        let mut violations = violations;
        if level == CheckLevel::Certify {
            let extra = self.certify_identity_probes();
            checked += extra.0;
            violations.extend(extra.1);
        }
        CheckOutcome::from_violations("fundamental_identity", checked, violations)
    }

    /// Seeded random multilinear probes of the identity (certify level).
    fn certify_identity_probes(&self) -> (usize, Vec<String>) {
        use rand::{Rng, SeedableRng};
        let f = &self.field;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x6e68_6c01);
        let mut violations = Vec::new();
        let trials = 8;
        for t in 0..trials {
            let rand_vec = |rng: &mut rand_chacha::ChaCha8Rng| {
                SparseVec::collect(
                    f,
                    (0..self.dim).map(|i| (i as Idx, f.from_i64(rng.gen_range(-3i64..=3)))),
                )
            };
            let xs: Vec<SparseVec<F::Elem>> = (0..self.arity).map(|_| rand_vec(&mut rng)).collect();
            let ys: Vec<SparseVec<F::Elem>> = (0..self.arity - 1).map(|_| rand_vec(&mut rng)).collect();
            let bx = self.bracket_multi(&xs);
            let mut outer_args = vec![bx];
            outer_args.extend(ys.iter().cloned());
            let lhs = self.bracket_multi(&outer_args);
            let mut acc = Accumulator::new();
            for i in 0..self.arity {
                let mut inner_args = vec![xs[i].clone()];
                inner_args.extend(ys.iter().cloned());
                let inner_val = self.bracket_multi(&inner_args);
                let mut slot_args = xs.clone();
                slot_args[i] = inner_val;
                acc.add_vec(f, &f.one(), &self.bracket_multi(&slot_args));
            }
            let rhs = acc.into_vec(f);
            if lhs != rhs {
                violations.push(format!("random probe {t}: multilinear identity failed"));
            }
        }
        (trials, violations)
    }

    /// Antisymmetry in every pair of arguments: adjacent swaps negate and any
    /// repeated argument kills the bracket.
    pub fn check_antisymmetry(&self, _level: CheckLevel) -> CheckOutcome {
        let f = &self.field;
        let words = &self.words;
        let violations: Vec<String> = (0..words.count())
            .into_par_iter()
            .map(|r| {
                let w = words.unrank(r);
                let mut local = Vec::new();
                let val = &self.table[r];
                if w.windows(2).any(|p| p[0] == p[1]) || {
                    let mut s = w.clone();
                    s.sort_unstable();
                    s.windows(2).any(|p| p[0] == p[1])
                } {
                    if !val.is_empty() {
                        local.push(format!(
                            "repeated argument {w:?} has nonzero bracket {}",
                            self.render_vec(val)
                        ));
                    }
                }
                for i in 0..self.arity - 1 {
                    let mut sw = w.clone();
                    sw.swap(i, i + 1);
                    let swapped = &self.table[words.rank(&sw)];
                    if *swapped != val.neg(f) {
                        local.push(format!(
                            "swap at slot {i} of {w:?}: {} != -({})",
                            self.render_vec(swapped),
                            self.render_vec(val)
                        ));
                    }
                }
                local
            })
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect();
        CheckOutcome::from_violations("antisymmetry", words.count() * self.arity, violations)
    }

    pub fn is_filippov(&self) -> bool {
        self.check_antisymmetry(CheckLevel::Fast).passed()
    }

    /// Content hash over arity, dimension, field, and the expanded table.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("n={};dim={};field={};", self.arity, self.dim, self.field.name()));
        for r in 0..self.words.count() {
            let v = &self.table[r];
            if v.is_empty() {
                continue;
            }
            h.update(format!("w{r}:"));
            for (i, c) in v.iter() {
                h.update(format!("{i}={};", self.field.render(c)));
            }
        }
        let digest = h.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    fn f() -> PrimeField {
        PrimeField::new(32003).unwrap()
    }

    #[test]
    fn abelian_passes_all_checks() {
        for (d, n) in [(2usize, 3usize), (3, 3), (4, 3), (2, 2)] {
            let a = Algebra::abelian(f(), d, n);
            assert!(a.check_fundamental_identity(CheckLevel::Certify).passed());
            assert!(a.check_antisymmetry(CheckLevel::Fast).passed());
            assert!(a.is_filippov());
        }
    }

    #[test]
    fn simple_filippov_satisfies_axioms() {
        for n in [2usize, 3, 4] {
            let a = Algebra::simple_filippov(f(), n);
            assert_eq!(a.dim, n + 1);
            let id = a.check_fundamental_identity(CheckLevel::Certify);
            assert!(id.passed(), "identity violations (n={n}): {:?}", id.violations);
            assert!(a.check_antisymmetry(CheckLevel::Fast).passed());
        }
        // Over Q as well.
        let a = Algebra::simple_filippov(Rationals, 3);
        assert!(a.check_fundamental_identity(CheckLevel::Fast).passed());
    }

    #[test]
    fn simple_filippov_bracket_values() {
        let a = Algebra::simple_filippov(f(), 3);
        // Omitting e0 from (e1,e2,e3): sign (-1)^(3-0)... table says (-1)^(dim-1-i).
        let v = a.bracket(&[1, 2, 3]);
        assert_eq!(v.iter().count(), 1);
        let (i, c) = v.iter().next().unwrap();
        assert_eq!(*i, 0);
        assert_eq!(*c, f().neg(&f().one())); // dim-1-i = 3, odd
        let v = a.bracket(&[0, 1, 2]);
        let (i, c) = v.iter().next().unwrap();
        assert_eq!((*i, *c), (3, f().one())); // dim-1-i = 0, even
        // Antisymmetry expansion.
        let v = a.bracket(&[2, 1, 3]);
        let (i, c) = v.iter().next().unwrap();
        assert_eq!((*i, *c), (0, f().one()));
        assert!(a.bracket(&[1, 1, 3]).is_empty());
    }

    #[test]
    fn direct_sum_preserves_axioms() {
        let a = Algebra::simple_filippov(f(), 3);
        let b = Algebra::abelian(f(), 1, 3);
        let s = Algebra::direct_sum(&a, &b).unwrap();
        assert_eq!(s.dim, 5);
        assert!(s.check_fundamental_identity(CheckLevel::Fast).passed());
        assert!(s.check_antisymmetry(CheckLevel::Fast).passed());
        // Mixed tuples vanish.
        assert!(s.bracket(&[0, 1, 4]).is_empty());
        // Embedded values survive.
        assert_eq!(s.bracket(&[1, 2, 3]), a.bracket(&[1, 2, 3]));
    }

    #[test]
    fn document_round_trip_and_expansion() {
        let json = r#"{
            "name": "binary-nonlie",
            "n": 2,
            "dim": 2,
            "field": "prime:32003",
            "brackets": [ {"args": [1, 1], "value": [[0, "1"]]} ]
        }"#;
        let doc = AlgebraDocument::from_json(json).unwrap();
        let a = Algebra::from_document(&doc, f()).unwrap();
        assert!(a.check_fundamental_identity(CheckLevel::Certify).passed());
        assert!(!a.is_filippov());
        assert_eq!(a.bracket(&[1, 1]).iter().next().unwrap().0, 0);
    }

    #[test]
    fn skew_complete_documents_expand() {
        let json = r#"{
            "name": "cross-product",
            "n": 2,
            "dim": 3,
            "field": "rational",
            "skew_complete": true,
            "brackets": [
                {"args": [0, 1], "value": [[2, "1"]]},
                {"args": [0, 2], "value": [[1, "-1"]]},
                {"args": [1, 2], "value": [[0, "1"]]}
            ]
        }"#;
        let doc = AlgebraDocument::from_json(json).unwrap();
        let a = Algebra::from_document(&doc, Rationals).unwrap();
        assert!(a.check_fundamental_identity(CheckLevel::Fast).passed());
        assert!(a.is_filippov());
        let v = a.bracket(&[1, 0]);
        let (i, c) = v.iter().next().unwrap();
        assert_eq!(*i, 2);
        assert_eq!(Rationals.render(c), "-1");
    }

    #[test]
    fn corrupted_rejects() {
        // Break the identity: one bracket perturbed.
        let mut a = Algebra::simple_filippov(f(), 3);
        let words = TensorWords::new(4, 3);
        a.table[words.rank(&[1, 2, 3])] = SparseVec::collect(&a.field, [(1u32, a.field.one())]);
        let id = a.check_fundamental_identity(CheckLevel::Fast);
        assert!(!id.passed());
        assert!(!id.violations.is_empty());
        // Break antisymmetry while keeping args valid.
        let mut b = Algebra::abelian(f(), 2, 3);
        let r = words_rank_of(&b, &[0, 0, 1]);
        b.table[r] = SparseVec::collect(&b.field, [(0u32, b.field.one())]);
        assert!(!b.check_antisymmetry(CheckLevel::Fast).passed());
    }

    fn words_rank_of<F: Field>(a: &Algebra<F>, w: &[u32]) -> usize {
        TensorWords::new(a.dim, a.arity).rank(w)
    }

    #[test]
    fn document_validation_errors() {
        let bad = [
            // arity 1
            r#"{"name":"x","n":1,"dim":2,"field":"rational","brackets":[]}"#,
            // arg out of range
            r#"{"name":"x","n":2,"dim":2,"field":"rational","brackets":[{"args":[0,2],"value":[]}]}"#,
            // value index out of range
            r#"{"name":"x","n":2,"dim":2,"field":"rational","brackets":[{"args":[0,1],"value":[[5,"1"]]}]}"#,
            // duplicate entry
            r#"{"name":"x","n":2,"dim":2,"field":"rational","brackets":[{"args":[0,1],"value":[]},{"args":[0,1],"value":[]}]}"#,
            // non-increasing skew_complete tuple
            r#"{"name":"x","n":2,"dim":2,"field":"rational","skew_complete":true,"brackets":[{"args":[1,0],"value":[]}]}"#,
            // bad coefficient
            r#"{"name":"x","n":2,"dim":2,"field":"rational","brackets":[{"args":[0,1],"value":[[0,"x"]]}]}"#,
        ];
        for json in bad {
            let r = AlgebraDocument::from_json(json)
                .and_then(|doc| Algebra::from_document(&doc, Rationals));
            assert!(r.is_err(), "accepted bad document {json}");
        }
        // Field mismatch in string: p = 2 rejected at the FieldSpec layer.
        assert!(AlgebraDocument::from_json(
            r#"{"name":"x","n":2,"dim":2,"field":"prime:2","brackets":[]}"#
        )
        .is_err());
    }

    #[test]
    fn fingerprints_are_stable_and_semantic() {
        let a1 = Algebra::simple_filippov(f(), 3);
        let mut a2 = Algebra::simple_filippov(f(), 3);
        a2.name = "renamed".into();
        assert_eq!(a1.fingerprint(), a2.fingerprint());
        let b = Algebra::abelian(f(), 4, 3);
        assert_ne!(a1.fingerprint(), b.fingerprint());
        // Field participates.
        let q = Algebra::simple_filippov(Rationals, 3);
        assert_ne!(a1.fingerprint(), q.fingerprint());
    }
}
