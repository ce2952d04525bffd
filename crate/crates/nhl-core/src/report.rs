//! One-call verification runs bundled into a serializable report.
//!
//! [`run`] executes one command over an algebra: axiom and module checks,
//! homology tables for the eight theories, long-exact-sequence assembly,
//! spectral pages, or the full dossier.  The resulting [`Report`] renders
//! canonically: [`to_canonical_json`] sorts every object's keys, so the
//! same input and configuration always produce the same bytes, regardless
//! of thread count or struct field order.
//!
//! Sections degrade honestly instead of lying: theories whose construction
//! needs an antisymmetric bracket are marked skipped on plain inputs, and
//! entries whose chain spaces exceed the column cap are reported as absent
//! with a note.  Checks that fail stay failed in the report.

use serde::Serialize;

use crate::algebra::{Algebra, AlgebraDocument, CheckLevel, CheckOutcome, CheckStatus};
use crate::complexes::{
    build_complex, closed_forms, head_kernel_sub, middle_kernel_sub, tail_kernel_sub, ChainSource,
    ComplexKind, GradedMapReport, Homology, Setting,
};
use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec, Rationals};
use crate::induced::{
    base_on_tensor, base_on_wedge, check_corep_axioms, check_kernel_ideal,
    check_left_right_sum_zero, check_projection_homomorphism, kernel_subalgebra, pair_on_tensor,
    pair_on_wedge, restrict_to_kernel, tensor_on_wedge, trivial_corep,
    wedge_action_rep_independent, Corep,
};
use crate::les::{assemble_les, ladder_check, LesTable, SesKind};
use crate::linalg::SparseMatrix;
use crate::spectral::{
    degenerate_binary_check, vanishing_transfer_check, verify_pages, SpectralReport,
};

/// What one invocation computes. `Report` is the union of the other four.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Check,
    Homology,
    Les,
    Ss,
    Report,
}

impl Command {
    pub fn label(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Homology => "homology",
            Command::Les => "les",
            Command::Ss => "ss",
            Command::Report => "report",
        }
    }
}

/// Knobs shared by every command.
#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Highest homology degree the tables and windows aim for.
    pub max_degree: usize,
    pub level: CheckLevel,
    /// Largest chain-space dimension any construction may materialize.
    pub cap: usize,
    /// Include the module action matrices in the report.
    pub dump_actions: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            max_degree: 2,
            level: CheckLevel::Full,
            cap: crate::complexes::DEFAULT_COLUMN_CAP,
            dump_actions: false,
        }
    }
}

fn level_label(level: CheckLevel) -> &'static str {
    match level {
        CheckLevel::Fast => "fast",
        CheckLevel::Full => "full",
        CheckLevel::Certify => "certify",
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraInfo {
    pub name: String,
    pub arity: usize,
    pub dim: usize,
    pub field: String,
    /// Content hash of arity, dimension, field, and the full bracket table.
    pub fingerprint: String,
    pub filippov: bool,
    /// Wedge-power constructions exist: antisymmetric bracket or arity 2.
    pub wedge_available: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Resources {
    pub column_cap: usize,
}

/// Betti numbers for one homology theory, degree by degree.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct TheoryTable {
    pub theory: String,
    pub description: String,
    /// Pass when at least one degree was computed; Skipped otherwise.
    pub status: CheckStatus,
    pub note: Option<String>,
    /// Chain-space dimension at each degree 0..=max_degree (closed form).
    pub chain_dims: Vec<u64>,
    /// None marks a degree not computed (cap or unavailable theory).
    pub betti: Vec<Option<usize>>,
}

/// One assembled sequence window with its verification outcomes.
#[derive(Clone, Debug, Serialize)]
pub struct LesRun {
    pub kind: String,
    /// Highest homology degree the window verifies.
    pub window_top: usize,
    pub note: Option<String>,
    /// How the honest quotient boundary compares to the reference complex.
    pub boundary_comparison: String,
    pub checks: Vec<CheckOutcome>,
    pub table: LesTable,
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderSummary {
    pub window_top: usize,
    pub boundary_comparison: String,
    pub checks: Vec<CheckOutcome>,
    pub top: LesTable,
    pub bottom: LesTable,
}

#[derive(Clone, Debug, Serialize)]
pub struct LesSection {
    pub sequences: Vec<LesRun>,
    pub ladder: Option<LadderSummary>,
}

/// Sparse action matrices of one module structure, rendered exactly.
#[derive(Clone, Debug, Serialize)]
pub struct ActionDump {
    pub name: String,
    pub module_dim: usize,
    pub generator_count: usize,
    /// Per generator: (row, column, value) triples in column-major order.
    pub left: Vec<Vec<(u32, u32, String)>>,
    pub right: Vec<Vec<(u32, u32, String)>>,
}

/// Everything one run produced. Sections are `None` when the command does
/// not compute them.
#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: ToolInfo,
    pub command: String,
    pub max_degree: usize,
    pub check_level: String,
    pub algebra: AlgebraInfo,
    /// Sign and labeling conventions every number in the report relies on.
    pub conventions: Vec<String>,
    /// Free-form remarks: shrunk windows, unavailable sections, degeneracies.
    pub notes: Vec<String>,
    pub checks: Vec<CheckOutcome>,
    pub homology: Option<Vec<TheoryTable>>,
    pub les: Option<LesSection>,
    pub pages: Option<SpectralReport>,
    /// Cross-field comparison of every computed number; present at the
    /// certify check level.
    pub field_agreement: Option<CheckOutcome>,
    pub actions: Option<Vec<ActionDump>>,
    pub resources: Resources,
}

impl Report {
    /// True when every executed check passed (skipped checks do not fail).
    pub fn passed(&self) -> bool {
        let checks_ok = self.checks.iter().all(|c| c.passed());
        let les_ok = self.les.as_ref().map_or(true, |l| {
            l.sequences
                .iter()
                .all(|r| r.checks.iter().all(|c| c.passed()))
                && l.ladder
                    .as_ref()
                    .map_or(true, |lad| lad.checks.iter().all(|c| c.passed()))
        });
        let pages_ok = self.pages.as_ref().map_or(true, |p| p.passed());
        let agree_ok = self.field_agreement.as_ref().map_or(true, |c| c.passed());
        checks_ok && les_ok && pages_ok && agree_ok
    }

    /// Names of every failing check across all sections, in report order.
    pub fn failed_names(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut scan = |cs: &[CheckOutcome]| {
            out.extend(cs.iter().filter(|c| !c.passed()).map(|c| c.name.clone()));
        };
        scan(&self.checks);
        if let Some(l) = &self.les {
            for r in &l.sequences {
                scan(&r.checks);
            }
            if let Some(lad) = &l.ladder {
                scan(&lad.checks);
            }
        }
        if let Some(p) = &self.pages {
            scan(&p.checks);
        }
        if let Some(a) = &self.field_agreement {
            scan(std::slice::from_ref(a));
        }
        out
    }
}

fn conventions() -> Vec<String> {
    [
        "signs: the differential acts on the coefficient slot by left bracket \
         multiplication with sign (-1)^(j+1) for letter j, and substitutes \
         brackets into letter positions with sign (-1)^j; right actions never \
         enter the differential",
        "right actions: each right action matrix is the negated left action, \
         so left + right acts as zero on every module",
        "degrees: chain degree k carries k letter factors; the relative column \
         space at degree k sits at ambient degree k+1 and its differential at \
         degree 0 is zero",
        "labels: nHD and nHR name the same object, the homology of the \
         head-kernel columns; reports use nHD throughout",
        "tables: quotient nodes in sequence tables are displayed one degree \
         above their chain degree, matching the relabeling column",
        "arithmetic: every rank is exact, over the rationals or an odd prime \
         field; betti numbers are dimensions over the report's field",
    ]
    .into_iter()
    .map(String::from)
    .collect()
}

/// The eight homology theories the `homology` command tabulates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Theory {
    BaseTensor,
    BaseWedge,
    TensorWedge,
    TrivialWedge,
    PairWedge,
    Relative,
    HeadKernel,
    MiddleKernel,
}

const THEORIES: [Theory; 8] = [
    Theory::BaseTensor,
    Theory::BaseWedge,
    Theory::TensorWedge,
    Theory::TrivialWedge,
    Theory::PairWedge,
    Theory::Relative,
    Theory::HeadKernel,
    Theory::MiddleKernel,
];

impl Theory {
    fn key(self) -> &'static str {
        match self {
            Theory::BaseTensor => "nHL",
            Theory::BaseWedge => "nH_Lie",
            Theory::TensorWedge => "HL_LD",
            Theory::TrivialWedge => "HL_Lk",
            Theory::PairWedge => "HL_LgD",
            Theory::Relative => "nH_rel",
            Theory::HeadKernel => "nHD",
            Theory::MiddleKernel => "pair_kernel",
        }
    }

    fn describe(self) -> &'static str {
        match self {
            Theory::BaseTensor => "base space over tensor-power letters",
            Theory::BaseWedge => "base space over wedge-power letters",
            Theory::TensorWedge => "tensor power as a module over the wedge power",
            Theory::TrivialWedge => "one-dimensional trivial module over the wedge power",
            Theory::PairWedge => "base tensor letter coefficients over the wedge power",
            Theory::Relative => {
                "non-canonical-word columns of the base-over-tensor complex, \
                 degree k at ambient degree k+1"
            }
            Theory::HeadKernel => "head-kernel columns of the tensor-over-wedge complex",
            Theory::MiddleKernel => "middle-kernel columns of the pair-over-wedge complex",
        }
    }

    /// Chain-space dimension at degree k, by letter counting.
    fn chain_dim(self, d: usize, n: usize, k: usize) -> u128 {
        let (dd, c) = closed_forms::letter_counts(d, n);
        let (d, dd, c) = (d as u128, dd as u128, c as u128);
        let k = k as u32;
        match self {
            Theory::BaseTensor => d * dd.pow(k),
            Theory::BaseWedge => d * c.pow(k),
            Theory::TensorWedge => dd * c.pow(k),
            Theory::TrivialWedge => c.pow(k),
            Theory::PairWedge => d * dd * c.pow(k),
            Theory::Relative => d * (dd.pow(k + 1) - c.pow(k + 1)),
            Theory::HeadKernel => (dd - c) * c.pow(k),
            Theory::MiddleKernel => d * (dd - c) * c.pow(k),
        }
    }
}

struct TableBuild {
    betti: Vec<Option<usize>>,
    status: CheckStatus,
    note: Option<String>,
}

fn unavailable(want: usize, note: String) -> TableBuild {
    TableBuild {
        betti: vec![None; want + 1],
        status: CheckStatus::Skipped,
        note: Some(note),
    }
}

/// Compute betti numbers through degree `want`, shrinking the window until
/// the source fits under the cap. `make(top)` must build a source whose
/// boundaries exist through degree `top`, so betti numbers reach `top - 1`.
fn betti_probe<F: Field, C: ChainSource<F>>(
    want: usize,
    cap: usize,
    mut make: impl FnMut(usize) -> Result<C>,
) -> TableBuild {
    let mut top = want + 1;
    let src = loop {
        match make(top) {
            Ok(c) => break c,
            Err(Error::MemoryCap { .. }) if top > 0 => top -= 1,
            Err(e) => return unavailable(want, e.to_string()),
        }
    };
    if top == 0 {
        return unavailable(
            want,
            format!("column cap {cap} refuses the complex even at degree 1"),
        );
    }
    let reach = top - 1;
    let mut h = Homology::new(src, cap);
    let mut betti = Vec::with_capacity(want + 1);
    let mut note = None;
    for k in 0..=want {
        if k > reach || note.is_some() {
            betti.push(None);
            continue;
        }
        match h.betti(k) {
            Ok(b) => betti.push(Some(b)),
            Err(e) => {
                note = Some(e.to_string());
                betti.push(None);
            }
        }
    }
    if reach < want && note.is_none() {
        note = Some(format!(
            "column cap {cap}: degrees above {reach} not computed"
        ));
    }
    let status = if betti.iter().any(Option::is_some) {
        CheckStatus::Pass
    } else {
        CheckStatus::Skipped
    };
    TableBuild { betti, status, note }
}

fn homology_tables<F: Field>(s: &Setting<F>, cfg: &RunConfig) -> Vec<TheoryTable> {
    let want = cfg.max_degree;
    let (d, n, cap) = (s.alg.dim, s.alg.arity, cfg.cap);
    THEORIES
        .iter()
        .map(|&t| {
            let tb = match t {
                Theory::BaseTensor => betti_probe(want, cap, |top| {
                    build_complex(s, ComplexKind::BaseOverTensor, top, cap)
                }),
                Theory::BaseWedge => betti_probe(want, cap, |top| {
                    build_complex(s, ComplexKind::BaseOverWedge, top, cap)
                }),
                Theory::TensorWedge => betti_probe(want, cap, |top| {
                    build_complex(s, ComplexKind::TensorOverWedge, top, cap)
                }),
                Theory::TrivialWedge => betti_probe(want, cap, |top| {
                    build_complex(s, ComplexKind::TrivialOverWedge, top, cap)
                }),
                Theory::PairWedge => betti_probe(want, cap, |top| {
                    build_complex(s, ComplexKind::PairOverWedge, top, cap)
                }),
                Theory::Relative => betti_probe(want, cap, |top| tail_kernel_sub(s, top, cap)),
                Theory::HeadKernel => betti_probe(want, cap, |top| head_kernel_sub(s, top, cap)),
                Theory::MiddleKernel => {
                    betti_probe(want, cap, |top| middle_kernel_sub(s, top, cap))
                }
            };
            TheoryTable {
                theory: t.key().into(),
                description: t.describe().into(),
                status: tb.status,
                note: tb.note,
                chain_dims: (0..=want)
                    .map(|k| u64::try_from(t.chain_dim(d, n, k)).unwrap_or(u64::MAX))
                    .collect(),
                betti: tb.betti,
            }
        })
        .collect()
}

/// A check outcome under a report-unique name.
fn renamed(mut out: CheckOutcome, name: &str) -> CheckOutcome {
    out.name = name.into();
    out
}

/// Axiom and module-structure checks: the bracket identities, the induced
/// binary algebras, and the full module axiom suite over every pairing the
/// input supports.
fn axiom_checks<F: Field>(s: &Setting<F>, level: CheckLevel) -> Vec<CheckOutcome> {
    let f = &s.alg.field;
    let mut out = Vec::new();

    out.push(s.alg.check_fundamental_identity(level));
    let anti = s.alg.check_antisymmetry(level);
    out.push(if anti.passed() {
        anti
    } else if s.alg.arity == 2 {
        CheckOutcome::skipped(
            "antisymmetry",
            "bracket is not antisymmetric; binary inputs do not require it",
        )
    } else {
        CheckOutcome::skipped(
            "antisymmetry",
            "bracket is not antisymmetric; the input is treated as plain and \
             wedge-power theories are unavailable",
        )
    });

    out.push(renamed(
        s.dn.check_binary_identity(),
        "binary_identity[letters_tensor]",
    ));

    let base_t = base_on_tensor(&s.alg);
    let pair_t = pair_on_tensor(&s.alg, &s.dn);
    out.push(check_corep_axioms(&s.dn, &base_t, "corep_axioms[base_on_tensor]"));
    out.push(check_corep_axioms(&s.dn, &pair_t, "corep_axioms[pair_on_tensor]"));
    out.push(check_left_right_sum_zero(
        f,
        &pair_t,
        "left_right_sum[pair_on_tensor]",
    ));

    if let Some(ln) = &s.ln {
        out.push(renamed(
            ln.check_binary_identity(),
            "binary_identity[letters_wedge]",
        ));
        out.push(wedge_action_rep_independent(&s.canon, &s.dn));
        out.push(check_projection_homomorphism(&s.canon, &s.dn, ln));
        let gamma = s.gamma();
        out.push(check_kernel_ideal(&s.canon, &s.dn, &gamma));
        match kernel_subalgebra(&s.dn, &gamma) {
            Ok(sub) => out.push(renamed(
                sub.check_binary_identity(),
                "binary_identity[kernel]",
            )),
            Err(e) => out.push(CheckOutcome::skipped(
                "binary_identity[kernel]",
                &e.to_string(),
            )),
        }

        let base_w = base_on_wedge(&s.alg, &s.canon);
        let tens_w = tensor_on_wedge(&s.canon, &s.dn);
        let pair_w = pair_on_wedge(&s.alg, &s.canon, &s.dn);
        let triv_w = trivial_corep(f, ln.dim);
        out.push(check_corep_axioms(ln, &base_w, "corep_axioms[base_on_wedge]"));
        out.push(check_corep_axioms(ln, &tens_w, "corep_axioms[tensor_on_wedge]"));
        out.push(check_corep_axioms(ln, &pair_w, "corep_axioms[pair_on_wedge]"));
        out.push(check_corep_axioms(ln, &triv_w, "corep_axioms[trivial_on_wedge]"));
        out.push(check_left_right_sum_zero(
            f,
            &pair_w,
            "left_right_sum[pair_on_wedge]",
        ));

        match restrict_to_kernel(f, &tens_w, 1, &gamma) {
            Ok(r) => out.push(check_corep_axioms(ln, &r, "corep_axioms[kernel_on_wedge]")),
            Err(e) => out.push(CheckOutcome::skipped(
                "corep_axioms[kernel_on_wedge]",
                &e.to_string(),
            )),
        }
        match restrict_to_kernel(f, &pair_w, s.alg.dim, &gamma) {
            Ok(r) => out.push(check_corep_axioms(
                ln,
                &r,
                "corep_axioms[pair_kernel_on_wedge]",
            )),
            Err(e) => out.push(CheckOutcome::skipped(
                "corep_axioms[pair_kernel_on_wedge]",
                &e.to_string(),
            )),
        }
    }
    out
}

fn describe_graded(g: &GradedMapReport) -> String {
    if g.per_degree.is_empty() {
        format!("{}: no degrees compared", g.name)
    } else if g.all_commute() {
        format!("{}: equals the reference boundary in every degree", g.name)
    } else if g.all_anticommute() {
        format!("{}: negates the reference boundary in every degree", g.name)
    } else {
        format!("{}: differs from the reference boundary", g.name)
    }
}

/// Assemble all three sequences and the ladder, shrinking each window until
/// it fits under the cap.
fn les_section<F: Field>(s: &Setting<F>, cfg: &RunConfig) -> Result<LesSection> {
    let requested = cfg.max_degree.max(1);
    let shrink_note = |got: usize| {
        (got < requested).then(|| {
            format!("window shrunk from {requested} to {got} to fit the column cap")
        })
    };

    let mut sequences = Vec::new();
    for kind in SesKind::all() {
        let mut avail = requested;
        let assembly = loop {
            match assemble_les(s, kind, avail, cfg.cap) {
                Ok(a) => break a,
                Err(Error::MemoryCap { .. }) if avail > 1 => avail -= 1,
                Err(e) => return Err(e),
            }
        };
        sequences.push(LesRun {
            kind: kind.label().into(),
            window_top: avail,
            note: shrink_note(avail),
            boundary_comparison: describe_graded(&assembly.quo_vs_reference),
            checks: vec![
                assembly.structure,
                assembly.chain_maps,
                assembly.connecting_oracle,
                assembly.exactness,
                assembly.edge,
            ],
            table: assembly.table,
        });
    }

    let mut avail = requested;
    let ladder = loop {
        match ladder_check(s, avail, cfg.cap) {
            Ok(l) => break l,
            Err(Error::MemoryCap { .. }) if avail > 1 => avail -= 1,
            Err(e) => return Err(e),
        }
    };
    let ladder = LadderSummary {
        window_top: avail,
        boundary_comparison: describe_graded(&ladder.bottom_quo_vs_reference),
        checks: vec![
            ladder.factorization,
            ladder.verticals,
            ladder.squares,
            ladder.top_exactness,
            ladder.bottom_exactness,
        ],
        top: ladder.top,
        bottom: ladder.bottom,
    };

    Ok(LesSection { sequences, ladder: Some(ladder) })
}

struct PagesOutcome {
    pages: Option<SpectralReport>,
    checks: Vec<CheckOutcome>,
    notes: Vec<String>,
}

/// Page verification, or the degeneracy check for binary inputs.
fn pages_section<F: Field>(s: &Setting<F>, cfg: &RunConfig) -> Result<PagesOutcome> {
    let mut notes = Vec::new();
    if s.alg.arity == 2 {
        // Binary inputs have no non-canonical words: both column families
        // vanish identically and there is nothing to filter.
        let k = cfg.max_degree.max(3);
        let out = degenerate_binary_check(s, k, cfg.cap)?;
        notes.push(
            "binary input: the relative and head-kernel column spaces vanish \
             identically; pages are not computed"
                .into(),
        );
        return Ok(PagesOutcome { pages: None, checks: vec![out], notes });
    }

    let requested = cfg.max_degree.max(1);
    let mut k = requested;
    let report = loop {
        match verify_pages(s, k, cfg.cap) {
            Ok(r) => break r,
            Err(Error::MemoryCap { .. }) if k > 1 => k -= 1,
            Err(e) => return Err(e),
        }
    };
    if k < requested {
        notes.push(format!(
            "page window shrunk from {requested} to {k} to fit the column cap"
        ));
    }
    let transfer = vanishing_transfer_check(s, k, cfg.cap)?;
    Ok(PagesOutcome {
        pages: Some(report),
        checks: vec![transfer],
        notes,
    })
}

fn dump_matrix<F: Field>(f: &F, m: &SparseMatrix<F::Elem>, cols: usize) -> Vec<(u32, u32, String)> {
    let mut out = Vec::new();
    for j in 0..cols {
        for (r, v) in m.col(j).iter() {
            out.push((*r, j as u32, f.render(v)));
        }
    }
    out
}

fn dump_corep<F: Field>(f: &F, name: &str, corep: &Corep<F>) -> ActionDump {
    let cols = corep.module_dim;
    ActionDump {
        name: name.into(),
        module_dim: corep.module_dim,
        generator_count: corep.left.len(),
        left: corep.left.iter().map(|m| dump_matrix(f, m, cols)).collect(),
        right: corep.right.iter().map(|m| dump_matrix(f, m, cols)).collect(),
    }
}

fn dump_actions<F: Field>(s: &Setting<F>) -> Vec<ActionDump> {
    let f = &s.alg.field;
    let mut out = vec![
        dump_corep(f, "base_on_tensor", &base_on_tensor(&s.alg)),
        dump_corep(f, "pair_on_tensor", &pair_on_tensor(&s.alg, &s.dn)),
    ];
    if let Some(ln) = &s.ln {
        out.push(dump_corep(f, "base_on_wedge", &base_on_wedge(&s.alg, &s.canon)));
        out.push(dump_corep(
            f,
            "tensor_on_wedge",
            &tensor_on_wedge(&s.canon, &s.dn),
        ));
        out.push(dump_corep(
            f,
            "pair_on_wedge",
            &pair_on_wedge(&s.alg, &s.canon, &s.dn),
        ));
        out.push(dump_corep(f, "trivial_on_wedge", &trivial_corep(f, ln.dim)));
    }
    out
}

/// Execute one command and collect everything it produced.
///
/// Strictness depends on the command: `les` and `ss` propagate hypothesis
/// and cap refusals as errors, while `report` downgrades those two to notes
/// so the dossier still carries every section the input supports.
pub fn run<F: Field>(alg: Algebra<F>, command: Command, cfg: &RunConfig) -> Result<Report> {
    if cfg.max_degree == 0 && matches!(command, Command::Les | Command::Ss) {
        return Err(Error::Hypothesis(
            "sequence and page verification need max degree at least 1".into(),
        ));
    }
    let s = Setting::new(alg);
    let lenient = command == Command::Report;
    let wants = |c: Command| command == c || command == Command::Report;

    let mut notes = Vec::new();
    let mut checks = Vec::new();
    let mut homology = None;
    let mut les = None;
    let mut pages = None;

    if wants(Command::Check) {
        checks.extend(axiom_checks(&s, cfg.level));
    }
    if wants(Command::Homology) {
        homology = Some(homology_tables(&s, cfg));
    }
    if wants(Command::Les) {
        match les_section(&s, cfg) {
            Ok(sec) => les = Some(sec),
            Err(e @ (Error::Hypothesis(_) | Error::MemoryCap { .. })) if lenient => {
                notes.push(format!("sequence tables not computed: {e}"));
            }
            Err(e) => return Err(e),
        }
    }
    if wants(Command::Ss) {
        match pages_section(&s, cfg) {
            Ok(mut p) => {
                pages = p.pages;
                checks.append(&mut p.checks);
                notes.append(&mut p.notes);
            }
            Err(e @ (Error::Hypothesis(_) | Error::MemoryCap { .. })) if lenient => {
                notes.push(format!("pages not computed: {e}"));
            }
            Err(e) => return Err(e),
        }
    }
    let actions = cfg.dump_actions.then(|| dump_actions(&s));

    Ok(Report {
        tool: ToolInfo {
            name: "nhl".into(),
            version: env!("CARGO_PKG_VERSION").into(),
        },
        command: command.label().into(),
        max_degree: cfg.max_degree,
        check_level: level_label(cfg.level).into(),
        algebra: AlgebraInfo {
            name: s.alg.name.clone(),
            arity: s.alg.arity,
            dim: s.alg.dim,
            field: s.alg.field.name(),
            fingerprint: s.alg.fingerprint(),
            filippov: s.filippov,
            wedge_available: s.wedge_ok(),
        },
        conventions: conventions(),
        notes,
        checks,
        homology,
        les,
        pages,
        field_agreement: None,
        actions,
        resources: Resources { column_cap: cfg.cap },
    })
}

/// Compare every number in two reports' homology and page sections.
fn compare_numbers(primary: &Report, other: &Report, other_field: &str) -> CheckOutcome {
    let mut checked = 0usize;
    let mut viol = Vec::new();

    match (&primary.homology, &other.homology) {
        (Some(a), Some(b)) => {
            for (ta, tb) in a.iter().zip(b) {
                checked += ta.betti.len() + 1;
                if ta.theory != tb.theory || ta.status != tb.status || ta.betti != tb.betti {
                    viol.push(format!(
                        "theory {}: {:?} vs {:?}",
                        ta.theory, ta.betti, tb.betti
                    ));
                }
            }
        }
        (None, None) => {}
        _ => viol.push("one backend produced homology tables and the other did not".into()),
    }

    match (&primary.pages, &other.pages) {
        (Some(a), Some(b)) => {
            for (ca, cb) in a.cells.iter().zip(b.cells.iter()) {
                checked += ca.dims.len() + 1;
                if (ca.r, ca.s, &ca.dims, ca.stable) != (cb.r, cb.s, &cb.dims, cb.stable) {
                    viol.push(format!(
                        "cell ({}, {}): {:?} vs {:?}",
                        ca.r, ca.s, ca.dims, cb.dims
                    ));
                }
            }
            for (ra, rb) in a.abutment.iter().zip(b.abutment.iter()) {
                checked += 2;
                if (ra.degree, ra.graded_total, ra.homology_dim)
                    != (rb.degree, rb.graded_total, rb.homology_dim)
                {
                    viol.push(format!("abutment degree {}", ra.degree));
                }
            }
            if a.cells.len() != b.cells.len() || a.abutment.len() != b.abutment.len() {
                viol.push("page table shapes differ between backends".into());
            }
        }
        (None, None) => {}
        _ => viol.push("one backend produced page tables and the other did not".into()),
    }

    CheckOutcome::from_violations(&format!("field_agreement[{other_field}]"), checked, viol)
}

/// Parse-level entry point: build the algebra over the requested field, run
/// the command, and at the certify level rerun the numeric sections over the
/// other backend and compare every number.
pub fn run_document(
    doc: &AlgebraDocument,
    field_override: Option<FieldSpec>,
    command: Command,
    cfg: &RunConfig,
) -> Result<Report> {
    let spec = field_override.unwrap_or(doc.field);
    let mut report = run_over(doc, spec, command, cfg)?;

    let numeric = matches!(command, Command::Homology | Command::Ss | Command::Report);
    if cfg.level == CheckLevel::Certify && numeric {
        let secondary = match spec {
            FieldSpec::Rational => FieldSpec::Prime(32003),
            FieldSpec::Prime(_) => FieldSpec::Rational,
        };
        let mut cfg2 = cfg.clone();
        cfg2.level = CheckLevel::Full;
        cfg2.dump_actions = false;
        let other = run_over(doc, secondary, command, &cfg2)?;
        report.field_agreement = Some(compare_numbers(
            &report,
            &other,
            &secondary.to_string(),
        ));
    }
    Ok(report)
}

fn run_over(
    doc: &AlgebraDocument,
    spec: FieldSpec,
    command: Command,
    cfg: &RunConfig,
) -> Result<Report> {
    match spec.prime_field()? {
        Some(pf) => run(Algebra::from_document(doc, pf)?, command, cfg),
        None => run(Algebra::from_document(doc, Rationals)?, command, cfg),
    }
}

/// Render with sorted keys and a trailing newline. Byte-stable: the same
/// report value always produces the same string, and parsing the output
/// back to a JSON value and re-rendering reproduces it exactly.
pub fn to_canonical_json(report: &Report) -> String {
    let value = serde_json::to_value(report).expect("reports always serialize");
    let mut text = serde_json::to_string_pretty(&value).expect("json values always render");
    text.push('\n');
    text
}

fn status_tag(status: CheckStatus) -> &'static str {
    match status {
        CheckStatus::Pass => "pass",
        CheckStatus::Fail => "FAIL",
        CheckStatus::Skipped => "skip",
    }
}

fn push_check_lines(out: &mut String, checks: &[CheckOutcome], indent: &str) {
    use std::fmt::Write as _;
    for c in checks {
        let _ = writeln!(
            out,
            "{indent}[{}] {} (checked {})",
            status_tag(c.status),
            c.name,
            c.checked
        );
        for v in c.violations.iter().take(3) {
            let _ = writeln!(out, "{indent}      - {v}");
        }
        if c.omitted_violations > 0 {
            let _ = writeln!(out, "{indent}      - ... {} more", c.omitted_violations);
        }
    }
}

/// Human-oriented rendering of the same content as the JSON form.
pub fn render_text(r: &Report) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} {} :: {} on '{}' (arity {}, dim {}, field {})",
        r.tool.name,
        r.tool.version,
        r.command,
        r.algebra.name,
        r.algebra.arity,
        r.algebra.dim,
        r.algebra.field
    );
    let _ = writeln!(out, "fingerprint: {}", r.algebra.fingerprint);
    let _ = writeln!(
        out,
        "max degree {}, check level {}, column cap {}",
        r.max_degree, r.check_level, r.resources.column_cap
    );

    if !r.checks.is_empty() {
        let _ = writeln!(out, "\nchecks:");
        push_check_lines(&mut out, &r.checks, "  ");
    }

    if let Some(tables) = &r.homology {
        let _ = writeln!(out, "\nhomology (betti by degree 0..{}):", r.max_degree);
        for t in tables {
            let betti: Vec<String> = t
                .betti
                .iter()
                .map(|b| b.map_or("-".into(), |v| v.to_string()))
                .collect();
            let dims: Vec<String> = t.chain_dims.iter().map(u64::to_string).collect();
            let _ = writeln!(
                out,
                "  {:<12} [{}] betti {}  (chain dims {})",
                t.theory,
                status_tag(t.status),
                betti.join(" "),
                dims.join(" ")
            );
            if let Some(n) = &t.note {
                let _ = writeln!(out, "               note: {n}");
            }
        }
    }

    if let Some(les) = &r.les {
        let _ = writeln!(out, "\nsequences:");
        for run in &les.sequences {
            let _ = writeln!(out, "  {} (window {}):", run.kind, run.window_top);
            push_check_lines(&mut out, &run.checks, "    ");
            let nodes: Vec<String> = run
                .table
                .nodes
                .iter()
                .map(|n| format!("{}={}", n.display, n.dim))
                .collect();
            let _ = writeln!(out, "    nodes: {}", nodes.join(" -> "));
            if let Some(n) = &run.note {
                let _ = writeln!(out, "    note: {n}");
            }
        }
        if let Some(lad) = &les.ladder {
            let _ = writeln!(out, "  ladder (window {}):", lad.window_top);
            push_check_lines(&mut out, &lad.checks, "    ");
        }
    }

    if let Some(p) = &r.pages {
        let _ = writeln!(out, "\npages (window {}):", p.max_degree);
        for c in &p.cells {
            let dims: Vec<String> = c.dims.iter().map(usize::to_string).collect();
            let _ = writeln!(
                out,
                "  cell ({}, {}): dims {} (settles at page {})",
                c.r,
                c.s,
                dims.join(" "),
                c.stable
            );
        }
        for a in &p.abutment {
            let _ = writeln!(
                out,
                "  abutment degree {}: graded total {} vs homology {}",
                a.degree, a.graded_total, a.homology_dim
            );
        }
        push_check_lines(&mut out, &p.checks, "  ");
    }

    if let Some(agree) = &r.field_agreement {
        let _ = writeln!(out, "\nfield agreement:");
        push_check_lines(&mut out, std::slice::from_ref(agree), "  ");
    }

    if !r.notes.is_empty() {
        let _ = writeln!(out, "\nnotes:");
        for n in &r.notes {
            let _ = writeln!(out, "  - {n}");
        }
    }

    let _ = writeln!(out, "\nconventions:");
    for c in &r.conventions {
        let _ = writeln!(out, "  - {c}");
    }

    let _ = writeln!(
        out,
        "\nverdict: {}",
        if r.passed() { "all executed checks passed" } else { "CHECK FAILURES PRESENT" }
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::DEFAULT_COLUMN_CAP;
    use crate::field::PrimeField;

    fn f() -> PrimeField {
        PrimeField::new(32003).unwrap()
    }

    fn cfg(k: usize) -> RunConfig {
        RunConfig {
            max_degree: k,
            level: CheckLevel::Full,
            cap: DEFAULT_COLUMN_CAP,
            dump_actions: false,
        }
    }

    fn doc(json: &str) -> AlgebraDocument {
        AlgebraDocument::from_json(json).unwrap()
    }

    fn abelian_doc() -> AlgebraDocument {
        doc(
            r#"{"name":"abelian2","n":3,"dim":2,"field":"prime:32003","brackets":[]}"#,
        )
    }

    #[test]
    fn check_passes_on_a_filippov_member() {
        let r = run(Algebra::simple_filippov(f(), 3), Command::Check, &cfg(2)).unwrap();
        assert!(r.passed(), "failures: {:?}", r.failed_names());
        assert!(r.homology.is_none() && r.les.is_none() && r.pages.is_none());
        let names: Vec<&str> = r.checks.iter().map(|c| c.name.as_str()).collect();
        assert!(names.contains(&"fundamental_identity"));
        assert!(names.contains(&"antisymmetry"));
        assert!(names.contains(&"corep_axioms[pair_kernel_on_wedge]"));
        assert!(names.contains(&"kernel_ideal"));
        assert_eq!(r.algebra.field, "prime:32003");
        assert!(r.algebra.filippov && r.algebra.wedge_available);
    }

    #[test]
    fn check_classifies_plain_inputs_without_failing() {
        let d = doc(
            r#"{"name":"nf","n":3,"dim":2,"field":"prime:32003",
                "brackets":[{"args":[0,0,0],"value":[[1,"1"]]}]}"#,
        );
        let r = run(
            Algebra::from_document(&d, f()).unwrap(),
            Command::Check,
            &cfg(2),
        )
        .unwrap();
        assert!(r.passed(), "failures: {:?}", r.failed_names());
        let anti = r.checks.iter().find(|c| c.name == "antisymmetry").unwrap();
        assert_eq!(anti.status, CheckStatus::Skipped);
        assert!(!r.algebra.filippov && !r.algebra.wedge_available);
        assert!(!r
            .checks
            .iter()
            .any(|c| c.name == "corep_axioms[base_on_wedge]"));
    }

    #[test]
    fn check_fails_on_a_broken_bracket() {
        // [e0,e0,e0] = e0 violates the substitution identity: the left side
        // gives one copy and the right side three.
        let d = doc(
            r#"{"name":"broken","n":3,"dim":1,"field":"prime:32003",
                "brackets":[{"args":[0,0,0],"value":[[0,"1"]]}]}"#,
        );
        let r = run(
            Algebra::from_document(&d, f()).unwrap(),
            Command::Check,
            &cfg(2),
        )
        .unwrap();
        assert!(!r.passed());
        let fi = r
            .checks
            .iter()
            .find(|c| c.name == "fundamental_identity")
            .unwrap();
        assert_eq!(fi.status, CheckStatus::Fail);
    }

    #[test]
    fn homology_tables_match_zero_differential_counting() {
        let r = run(Algebra::abelian(f(), 2, 3), Command::Homology, &cfg(2)).unwrap();
        assert!(r.passed());
        let tables = r.homology.as_ref().unwrap();
        let betti = |key: &str| -> Vec<usize> {
            let t = tables.iter().find(|t| t.theory == key).unwrap();
            assert_eq!(t.status, CheckStatus::Pass, "{key}: {:?}", t.note);
            t.betti.iter().map(|b| b.unwrap()).collect()
        };
        assert_eq!(betti("nHL"), vec![2, 8, 32]);
        assert_eq!(betti("nH_Lie"), vec![2, 2, 2]);
        assert_eq!(betti("HL_LD"), vec![4, 4, 4]);
        assert_eq!(betti("HL_Lk"), vec![1, 1, 1]);
        assert_eq!(betti("HL_LgD"), vec![8, 8, 8]);
        assert_eq!(betti("nH_rel"), vec![6, 30, 126]);
        assert_eq!(betti("nHD"), vec![3, 3, 3]);
        assert_eq!(betti("pair_kernel"), vec![6, 6, 6]);
        let rel = tables.iter().find(|t| t.theory == "nH_rel").unwrap();
        assert_eq!(rel.chain_dims, vec![6, 30, 126]);
    }

    #[test]
    fn homology_skips_wedge_theories_on_plain_inputs() {
        let d = doc(
            r#"{"name":"nf","n":3,"dim":2,"field":"prime:32003",
                "brackets":[{"args":[0,0,0],"value":[[1,"1"]]}]}"#,
        );
        let r = run(
            Algebra::from_document(&d, f()).unwrap(),
            Command::Homology,
            &cfg(2),
        )
        .unwrap();
        let tables = r.homology.as_ref().unwrap();
        for t in tables {
            if t.theory == "nHL" {
                assert_eq!(t.status, CheckStatus::Pass);
                assert!(t.betti.iter().all(Option::is_some));
            } else {
                assert_eq!(t.status, CheckStatus::Skipped, "{}", t.theory);
                assert!(t.betti.iter().all(Option::is_none));
                assert!(t.note.is_some());
            }
        }
    }

    #[test]
    fn homology_honors_the_column_cap() {
        let mut c = cfg(2);
        c.cap = 40;
        let r = run(Algebra::abelian(f(), 2, 3), Command::Homology, &c).unwrap();
        let tables = r.homology.as_ref().unwrap();
        let nhl = tables.iter().find(|t| t.theory == "nHL").unwrap();
        assert_eq!(nhl.betti, vec![Some(2), Some(8), None]);
        assert!(nhl.note.as_ref().unwrap().contains("cap"));
        assert_eq!(nhl.status, CheckStatus::Pass);
        let rel = tables.iter().find(|t| t.theory == "nH_rel").unwrap();
        assert_eq!(rel.betti, vec![Some(6), None, None]);
        // Chain dims stay closed-form even where betti numbers are capped.
        assert_eq!(nhl.chain_dims, vec![2, 8, 32]);
    }

    #[test]
    fn les_section_carries_the_honest_edge_failure() {
        let r = run(Algebra::simple_filippov(f(), 3), Command::Les, &cfg(1)).unwrap();
        let les = r.les.as_ref().unwrap();
        assert_eq!(les.sequences.len(), 3);
        for run in &les.sequences {
            for c in &run.checks {
                if c.name == "les_edge[coefficient_kernel]" {
                    assert_eq!(c.status, CheckStatus::Fail, "this edge claim is false");
                } else {
                    assert!(c.passed(), "{}: {:?}", c.name, c.violations);
                }
            }
        }
        let lad = les.ladder.as_ref().unwrap();
        assert!(lad.checks.iter().all(|c| c.passed()));
        assert_eq!(r.failed_names(), vec!["les_edge[coefficient_kernel]"]);
        assert!(!r.passed());
    }

    #[test]
    fn pages_run_on_ternary_inputs_and_degenerate_on_binary() {
        let r = run(Algebra::abelian(f(), 2, 3), Command::Ss, &cfg(2)).unwrap();
        assert!(r.passed(), "failures: {:?}", r.failed_names());
        let pages = r.pages.as_ref().unwrap();
        assert_eq!(pages.max_degree, 2);
        let transfer = r
            .checks
            .iter()
            .find(|c| c.name == "vanishing_transfer")
            .unwrap();
        assert_eq!(transfer.status, CheckStatus::Skipped);

        let d = doc(
            r#"{"name":"b","n":2,"dim":2,"field":"prime:32003",
                "brackets":[{"args":[1,1],"value":[[0,"1"]]}]}"#,
        );
        let r = run(Algebra::from_document(&d, f()).unwrap(), Command::Ss, &cfg(2)).unwrap();
        assert!(r.passed(), "failures: {:?}", r.failed_names());
        assert!(r.pages.is_none());
        assert!(r.checks.iter().any(|c| c.name == "binary_degeneracy"));
        assert!(!r.notes.is_empty());
    }

    #[test]
    fn report_collects_every_section_and_is_byte_stable() {
        let a = run(Algebra::abelian(f(), 2, 3), Command::Report, &cfg(2)).unwrap();
        assert!(a.homology.is_some() && a.les.is_some() && a.pages.is_some());
        assert!(!a.checks.is_empty());
        assert_eq!(a.failed_names(), vec!["les_edge[coefficient_kernel]"]);

        let b = run(Algebra::abelian(f(), 2, 3), Command::Report, &cfg(2)).unwrap();
        let (ja, jb) = (to_canonical_json(&a), to_canonical_json(&b));
        assert_eq!(ja, jb, "identical runs must render identical bytes");

        // Parse and re-render: canonical form is a fixed point.
        let v: serde_json::Value = serde_json::from_str(&ja).unwrap();
        let mut again = serde_json::to_string_pretty(&v).unwrap();
        again.push('\n');
        assert_eq!(ja, again);
    }

    #[test]
    fn report_downgrades_unavailable_sections_to_notes() {
        let d = doc(
            r#"{"name":"nf","n":3,"dim":2,"field":"prime:32003",
                "brackets":[{"args":[0,0,0],"value":[[1,"1"]]}]}"#,
        );
        let r = run(
            Algebra::from_document(&d, f()).unwrap(),
            Command::Report,
            &cfg(2),
        )
        .unwrap();
        assert!(r.les.is_none() && r.pages.is_none());
        assert!(r.notes.iter().any(|n| n.contains("sequence tables")));
        assert!(r.notes.iter().any(|n| n.contains("pages")));
        assert!(r.passed(), "failures: {:?}", r.failed_names());
    }

    #[test]
    fn strict_commands_refuse_what_report_only_notes() {
        let d = doc(
            r#"{"name":"nf","n":3,"dim":2,"field":"prime:32003",
                "brackets":[{"args":[0,0,0],"value":[[1,"1"]]}]}"#,
        );
        let alg = Algebra::from_document(&d, f()).unwrap();
        assert!(matches!(
            run(alg.clone(), Command::Les, &cfg(1)),
            Err(Error::Hypothesis(_))
        ));
        assert!(matches!(
            run(alg, Command::Ss, &cfg(1)),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn certify_reruns_the_numbers_over_the_other_backend() {
        let mut c = cfg(2);
        c.level = CheckLevel::Certify;
        let r = run_document(&abelian_doc(), None, Command::Homology, &c).unwrap();
        let agree = r.field_agreement.as_ref().unwrap();
        assert!(agree.passed(), "{:?}", agree.violations);
        assert_eq!(agree.name, "field_agreement[rational]");
        assert!(agree.checked > 0);
        assert!(r.passed());
    }

    #[test]
    fn field_override_switches_the_backend() {
        let r = run_document(
            &abelian_doc(),
            Some(FieldSpec::Rational),
            Command::Homology,
            &cfg(1),
        )
        .unwrap();
        assert_eq!(r.algebra.field, "rational");
    }

    #[test]
    fn action_dump_renders_sparse_matrices() {
        let mut c = cfg(1);
        c.dump_actions = true;
        let r = run(Algebra::simple_filippov(f(), 3), Command::Check, &c).unwrap();
        let dumps = r.actions.as_ref().unwrap();
        assert_eq!(dumps.len(), 6);
        let base = dumps.iter().find(|d| d.name == "base_on_tensor").unwrap();
        assert_eq!(base.module_dim, 4);
        assert_eq!(base.generator_count, 16);
        assert!(base.left.iter().any(|m| !m.is_empty()));
        // Mirrored right actions: same support, negated values.
        for (l, r) in base.left.iter().zip(&base.right) {
            assert_eq!(l.len(), r.len());
        }
    }

    #[test]
    fn text_rendering_mentions_every_section() {
        let r = run(Algebra::abelian(f(), 2, 3), Command::Report, &cfg(2)).unwrap();
        let text = render_text(&r);
        for needle in [
            "abelian(2,3)",
            "checks:",
            "homology",
            "nHL",
            "sequences:",
            "pages",
            "conventions:",
            "fingerprint:",
            "CHECK FAILURES PRESENT",
        ] {
            assert!(text.contains(needle), "missing {needle:?} in:\n{text}");
        }
    }
}
