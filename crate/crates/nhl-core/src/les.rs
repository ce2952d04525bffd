//! Short exact sequences of chain complexes, the long exact homology
//! sequences they induce, and the two-row homology ladder driven by the
//! first-slot split of the base-over-tensor complex.
//!
//! Each sequence couples a kernel subcomplex, its ambient complex, and a
//! quotient carried on fixed word coordinates with the honest boundary
//! P d s (P the projection, s the word-wise section). Homology-level maps
//! are matrices over fixed ordered representative bases; exactness at a
//! node is a vanishing composite plus rank accounting.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::CheckOutcome;
use crate::complexes::{
    build_complex, graded_map_report, head_kernel_sub, middle_kernel_sub, proj_base_matrix,
    proj_coeff_matrix, proj_first_slot_matrix, proj_pair_matrix, tail_kernel_sub, ChainSource,
    ComplexKind, GradedMapReport, Homology, LodayComplex, Setting, SubComplex,
};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{check_cap, rank_of_matrix, Echelon, Idx, Insert, SparseMatrix, SparseVec};
use crate::words::TensorWords;

/// Which short exact sequence of complexes to assemble.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SesKind {
    /// 0 -> tail kernel (shifted by one) -> base over tensor -> base over wedge -> 0.
    Relative,
    /// 0 -> head kernel -> tensor over wedge -> wedge words, degree + 1 -> 0.
    CoefficientKernel,
    /// 0 -> middle kernel -> pair over wedge -> base over wedge, degree + 1 -> 0.
    PairKernel,
}

impl SesKind {
    pub fn label(self) -> &'static str {
        match self {
            SesKind::Relative => "relative",
            SesKind::CoefficientKernel => "coefficient_kernel",
            SesKind::PairKernel => "pair_kernel",
        }
    }

    pub fn all() -> [SesKind; 3] {
        [SesKind::Relative, SesKind::CoefficientKernel, SesKind::PairKernel]
    }
}

/// Position of a node within one window of the sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Sub,
    Mid,
    Quo,
}

impl Role {
    fn short(self) -> &'static str {
        match self {
            Role::Sub => "sub",
            Role::Mid => "mid",
            Role::Quo => "quo",
        }
    }
}

/// Chain source backed by explicitly stored boundary matrices.
pub struct MatrixChain<F: Field> {
    field: F,
    label: String,
    /// dims[m] for every stored chain degree m.
    pub dims: Vec<usize>,
    /// d[m]: degree m to degree m - 1; d[0] is the zero map.
    pub d: Vec<SparseMatrix<F::Elem>>,
}

impl<F: Field> MatrixChain<F> {
    pub fn assemble(
        field: F,
        label: String,
        dims: Vec<usize>,
        d: Vec<SparseMatrix<F::Elem>>,
    ) -> Self {
        assert_eq!(dims.len(), d.len(), "one boundary matrix per stored degree");
        MatrixChain { field, label, dims, d }
    }
}

impl<F: Field> ChainSource<F> for MatrixChain<F> {
    fn chain_dim(&self, k: usize) -> usize {
        assert!(
            k < self.dims.len(),
            "degree {k} beyond the stored horizon of {}",
            self.label
        );
        self.dims[k]
    }
    fn chain_boundary_col(&self, k: usize, idx: Idx) -> Result<SparseVec<F::Elem>> {
        if k == 0 {
            return Ok(SparseVec::new());
        }
        Ok(self.d[k].col(idx as usize).clone())
    }
    fn chain_field(&self) -> &F {
        &self.field
    }
    fn chain_label(&self) -> String {
        self.label.clone()
    }
}

/// Fixed ordered homology basis at one node: representatives plus a solver
/// expressing any cycle as boundary plus representative combination.
pub struct NodeData<F: Field> {
    pub dim: usize,
    pub reps: Vec<SparseVec<F::Elem>>,
    solver: Echelon<F>,
    n_boundary: usize,
}

impl<F: Field> NodeData<F> {
    fn empty(f: &F) -> Self {
        NodeData {
            dim: 0,
            reps: Vec::new(),
            solver: Echelon::with_transform(f.clone()),
            n_boundary: 0,
        }
    }

    /// Class coordinates of a cycle over the representative basis.
    pub fn class_of(&self, f: &F, z: &SparseVec<F::Elem>) -> Result<SparseVec<F::Elem>> {
        let e = self.solver.express(z).ok_or_else(|| {
            Error::CheckFailed("chain is not a cycle within the node's span".into())
        })?;
        let nb = self.n_boundary as Idx;
        Ok(SparseVec::collect(
            f,
            e.iter().filter(|(i, _)| *i >= nb).map(|(i, c)| (i - nb, c.clone())),
        ))
    }
}

fn node_data<F: Field, C: ChainSource<F>>(
    h: &mut Homology<F, C>,
    k: usize,
) -> Result<NodeData<F>> {
    let f = h.field();
    let reps = h.reps(k)?;
    let img: Vec<SparseVec<F::Elem>> = h.image_echelon(k)?.columns().cloned().collect();
    let n_boundary = img.len();
    let mut solver = Echelon::with_transform(f.clone());
    for c in img {
        match solver.insert(c) {
            Insert::Added { .. } => {}
            Insert::Dependent { .. } => {
                return Err(Error::CheckFailed(
                    "image echelon columns must be independent".into(),
                ))
            }
        }
    }
    for r in &reps {
        match solver.insert(r.clone()) {
            Insert::Added { .. } => {}
            Insert::Dependent { .. } => {
                return Err(Error::CheckFailed(
                    "homology representative lies in the boundary span".into(),
                ))
            }
        }
    }
    Ok(NodeData { dim: reps.len(), reps, solver, n_boundary })
}

/// Outcome of the exactness bookkeeping at one node.
#[derive(Clone, Debug, Serialize)]
pub enum NodeStatus {
    Pass { rank_in: usize, rank_out: usize },
    Fail { rank_in: usize, rank_out: usize, composite_nnz: usize },
    Skipped { reason: String },
}

impl NodeStatus {
    pub fn failed(&self) -> bool {
        matches!(self, NodeStatus::Fail { .. })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NodeReport {
    pub role: Role,
    pub chain_degree: usize,
    pub display: String,
    pub dim: usize,
    pub status: NodeStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct MapReport {
    pub name: String,
    pub from: String,
    pub to: String,
    pub rank: usize,
}

/// Serializable summary of one assembled long exact sequence.
#[derive(Clone, Debug, Serialize)]
pub struct LesTable {
    pub label: String,
    /// Nodes in sequence order, highest degree first.
    pub nodes: Vec<NodeReport>,
    pub maps: Vec<MapReport>,
    /// Chain-degree node name against the displayed theory name.
    pub relabeling: Vec<(String, String)>,
}

/// One short exact sequence with its homology layer fully materialized.
pub struct SesAssembly<F: Field> {
    pub kind: SesKind,
    /// Highest homology degree available at sub and mid nodes.
    pub avail: usize,
    /// Highest homology degree available at quotient nodes.
    pub avail_quo: usize,
    pub sub_h: Homology<F, SubComplex<F>>,
    pub mid_h: Homology<F, LodayComplex<F>>,
    pub quo_h: Homology<F, MatrixChain<F>>,
    /// Chain-level inclusion and projection per chain degree, 0..=avail+1.
    pub iota: Vec<SparseMatrix<F::Elem>>,
    pub project: Vec<SparseMatrix<F::Elem>>,
    /// Word-wise section per chain degree, 0..=avail_quo+1.
    pub section: Vec<SparseMatrix<F::Elem>>,
    /// Honest quotient boundary against the reference complex living on the
    /// same coordinates (commutes = equal, anticommutes = negated).
    pub quo_vs_reference: GradedMapReport,
    /// Per-degree short-exactness of the chain rows.
    pub structure: CheckOutcome,
    /// Boundary-intertwining identities for inclusion and projection.
    pub chain_maps: CheckOutcome,
    /// Connecting values do not depend on the chosen lift.
    pub connecting_oracle: CheckOutcome,
    /// Exactness across all verifiable nodes.
    pub exactness: CheckOutcome,
    /// Sequence-specific claims at the bottom of the window.
    pub edge: CheckOutcome,
    pub table: LesTable,
    seq: Vec<(Role, usize)>,
    nodes: HashMap<(Role, usize), NodeData<F>>,
    /// Homology-level map out of each node (the quotient at degree 0 maps
    /// into the zero space below the window).
    hom: HashMap<(Role, usize), SparseMatrix<F::Elem>>,
    field: F,
}

impl<F: Field> SesAssembly<F> {
    pub(crate) fn node(&self, role: Role, m: usize) -> &NodeData<F> {
        &self.nodes[&(role, m)]
    }

    pub fn node_dim(&self, role: Role, m: usize) -> usize {
        self.nodes[&(role, m)].dim
    }

    /// Homology map out of the given node, when within the window.
    pub fn hom_map(&self, role: Role, m: usize) -> Option<&SparseMatrix<F::Elem>> {
        self.hom.get(&(role, m))
    }
}

fn display_name(kind: SesKind, role: Role, m: usize) -> String {
    match (kind, role) {
        (SesKind::Relative, Role::Sub) => {
            if m == 0 {
                "0".into()
            } else {
                format!("nH_rel[{}]", m - 1)
            }
        }
        (SesKind::Relative, Role::Mid) => format!("nHL[{m}]"),
        (SesKind::Relative, Role::Quo) => format!("nH_Lie[{m}]"),
        (SesKind::CoefficientKernel, Role::Sub) => format!("nHD[{m}]"),
        (SesKind::CoefficientKernel, Role::Mid) => format!("HL_LD[{m}]"),
        (SesKind::CoefficientKernel, Role::Quo) => format!("HL_Lk[{}]", m + 1),
        (SesKind::PairKernel, Role::Sub) => format!("H_pair_kernel[{m}]"),
        (SesKind::PairKernel, Role::Mid) => format!("HL_LgD[{m}]"),
        (SesKind::PairKernel, Role::Quo) => format!("nH_Lie_q[{}]", m + 1),
    }
}

fn random_vec<F: Field>(f: &F, dim: usize, rng: &mut ChaCha8Rng) -> SparseVec<F::Elem> {
    SparseVec::collect(
        f,
        (0..dim).filter_map(|i| {
            let c = rng.gen_range(-9i64..=9);
            if c == 0 {
                None
            } else {
                Some((i as Idx, f.from_i64(c)))
            }
        }),
    )
}

/// Reduce an ambient chain at parent degree `chain_m` into sub coordinates.
/// Errors when anything survives outside the subcomplex.
fn pull_to_sub<F: Field>(
    sub: &SubComplex<F>,
    shift: usize,
    chain_m: usize,
    w: &SparseVec<F::Elem>,
) -> Result<SparseVec<F::Elem>> {
    if chain_m < shift {
        if w.is_empty() {
            return Ok(SparseVec::new());
        }
        return Err(Error::SubspaceEscape(
            "connecting chain survives below the subcomplex window".into(),
        ));
    }
    let (subv, res) = sub.reduce(chain_m - shift, w);
    if !res.is_empty() {
        return Err(Error::SubspaceEscape(
            "connecting chain leaves the kernel subcomplex".into(),
        ));
    }
    Ok(subv)
}

/// Push each source representative through a chain map and read off class
/// coordinates at the target node. Errors when an image fails to be a cycle.
fn induced_map<F: Field>(
    f: &F,
    fm: &SparseMatrix<F::Elem>,
    src: &NodeData<F>,
    tgt: &NodeData<F>,
) -> Result<SparseMatrix<F::Elem>> {
    let cols = src
        .reps
        .iter()
        .map(|z| tgt.class_of(f, &fm.apply(f, z)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SparseMatrix::from_columns(tgt.dim, cols))
}

fn node_statuses<F: Field>(
    f: &F,
    seq: &[(Role, usize)],
    dims: &HashMap<(Role, usize), usize>,
    hom: &HashMap<(Role, usize), SparseMatrix<F::Elem>>,
) -> Vec<NodeStatus> {
    let ranks: HashMap<(Role, usize), usize> = hom
        .iter()
        .map(|(k, m)| (*k, rank_of_matrix(f, m)))
        .collect();
    seq.iter()
        .enumerate()
        .map(|(i, key)| {
            if i == 0 {
                return NodeStatus::Skipped {
                    reason: "incoming map lies beyond the computed window".into(),
                };
            }
            let fin = &hom[&seq[i - 1]];
            let fout = &hom[key];
            let rank_in = ranks[&seq[i - 1]];
            let rank_out = ranks[key];
            let composite_nnz = fout.compose(f, fin).nnz();
            if composite_nnz == 0 && rank_in + rank_out == dims[key] {
                NodeStatus::Pass { rank_in, rank_out }
            } else {
                NodeStatus::Fail { rank_in, rank_out, composite_nnz }
            }
        })
        .collect()
}

fn exactness_outcome(
    label: &str,
    kind: SesKind,
    seq: &[(Role, usize)],
    dims: &HashMap<(Role, usize), usize>,
    statuses: &[NodeStatus],
) -> CheckOutcome {
    let mut checked = 0;
    let mut violations = Vec::new();
    for (key, st) in seq.iter().zip(statuses) {
        match st {
            NodeStatus::Skipped { .. } => {}
            NodeStatus::Pass { .. } => checked += 1,
            NodeStatus::Fail { rank_in, rank_out, composite_nnz } => {
                checked += 1;
                violations.push(format!(
                    "{} (dim {}): rank in {} + rank out {} vs dim, composite nnz {}",
                    display_name(kind, key.0, key.1),
                    dims[key],
                    rank_in,
                    rank_out,
                    composite_nnz
                ));
            }
        }
    }
    CheckOutcome::from_violations(label, checked, violations)
}

/// Build one short exact sequence, its homology nodes through degree
/// `avail`, all homology-level maps, and the exactness bookkeeping.
pub fn assemble_les<F: Field>(
    s: &Setting<F>,
    kind: SesKind,
    avail: usize,
    cap: usize,
) -> Result<SesAssembly<F>> {
    let f = s.alg.field.clone();
    let dim_g = s.alg.dim;
    let cc = s.canon.wedge_count();

    let (sub, mid, sub_shift) = match kind {
        SesKind::Relative => (
            tail_kernel_sub(s, avail, cap)?,
            build_complex(s, ComplexKind::BaseOverTensor, avail + 1, cap)?,
            1usize,
        ),
        SesKind::CoefficientKernel => (
            head_kernel_sub(s, avail + 1, cap)?,
            build_complex(s, ComplexKind::TensorOverWedge, avail + 1, cap)?,
            0,
        ),
        SesKind::PairKernel => (
            middle_kernel_sub(s, avail + 1, cap)?,
            build_complex(s, ComplexKind::PairOverWedge, avail + 1, cap)?,
            0,
        ),
    };
    let sub_dim_chain =
        |m: usize| if m < sub_shift { 0 } else { sub.dim(m - sub_shift) };
    let quo_dim = |m: usize| match kind {
        SesKind::Relative => dim_g * TensorWords::new(cc, m).count(),
        SesKind::CoefficientKernel => TensorWords::new(cc, m + 1).count(),
        SesKind::PairKernel => dim_g * TensorWords::new(cc, m + 1).count(),
    };

    // The quotient is cheap, so its window extends one degree past the
    // sub and mid nodes whenever the cap allows; that closes the top sub
    // node's incoming connecting map.
    let avail_quo = if check_cap(quo_dim(avail + 2), cap).is_ok() {
        avail + 1
    } else {
        avail
    };

    let iota: Vec<SparseMatrix<F::Elem>> = (0..=avail + 1)
        .map(|m| {
            let n = sub_dim_chain(m);
            let cols = (0..n).map(|i| sub.expand(m - sub_shift, i as Idx)).collect();
            SparseMatrix::from_columns(mid.dim(m), cols)
        })
        .collect();
    let project: Vec<SparseMatrix<F::Elem>> = (0..=avail + 1)
        .map(|m| match kind {
            SesKind::Relative => proj_base_matrix(s, m),
            SesKind::CoefficientKernel => proj_coeff_matrix(s, m),
            SesKind::PairKernel => proj_pair_matrix(s, m),
        })
        .collect();
    let section: Vec<SparseMatrix<F::Elem>> =
        (0..=avail_quo + 1).map(|m| section_matrix(s, kind, m)).collect();

    // Honest quotient boundary P d s per degree.
    let mut d_quo: Vec<SparseMatrix<F::Elem>> = vec![SparseMatrix::zero(0, quo_dim(0))];
    for m in 1..=avail_quo + 1 {
        let cols = (0..quo_dim(m))
            .map(|j| {
                let lifted = section[m].col(j);
                project[m - 1].apply(&f, &mid.boundary_of(m, lifted))
            })
            .collect();
        d_quo.push(SparseMatrix::from_columns(quo_dim(m - 1), cols));
    }

    // Reference complex on the quotient coordinates.
    let (ref_kind, ref_shift) = match kind {
        SesKind::Relative => (ComplexKind::BaseOverWedge, 0usize),
        SesKind::CoefficientKernel => (ComplexKind::TrivialOverWedge, 1),
        SesKind::PairKernel => (ComplexKind::BaseOverWedge, 1),
    };
    let reference = build_complex(s, ref_kind, avail_quo + 1 + ref_shift, cap)?;
    let mut triples = Vec::new();
    for m in 1..=avail_quo + 1 {
        triples.push((m, d_quo[m].clone(), reference.boundary_matrix(m + ref_shift, cap)?));
    }
    let quo_vs_reference = graded_map_report(
        &f,
        &format!("quotient_boundary_vs_{}[{}]", ref_kind.label(), kind.label()),
        triples.into_iter(),
    );

    let d_mid: Vec<SparseMatrix<F::Elem>> = {
        let mut v = vec![SparseMatrix::zero(0, mid.dim(0))];
        for m in 1..=avail + 1 {
            v.push(mid.boundary_matrix(m, cap)?);
        }
        v
    };
    let d_sub_c: Vec<SparseMatrix<F::Elem>> = {
        let mut v = Vec::with_capacity(avail + 2);
        for m in 0..=avail + 1 {
            if m <= sub_shift {
                let rows = if m == 0 { 0 } else { sub_dim_chain(m - 1) };
                v.push(SparseMatrix::zero(rows, sub_dim_chain(m)));
            } else {
                v.push(sub.boundary_matrix(m - sub_shift, cap)?);
            }
        }
        v
    };

    // Per-degree short-exactness of the rows.
    let structure = {
        let mut checked = 0;
        let mut viol = Vec::new();
        for m in 0..=avail + 1 {
            checked += 1;
            if sub_dim_chain(m) + quo_dim(m) != mid.dim(m) {
                viol.push(format!(
                    "degree {m}: {} + {} does not fill the ambient dimension {}",
                    sub_dim_chain(m),
                    quo_dim(m),
                    mid.dim(m)
                ));
            }
            checked += 1;
            if !project[m].compose(&f, &iota[m]).is_zero() {
                viol.push(format!("degree {m}: projection does not kill the sub"));
            }
            checked += 1;
            if m < section.len()
                && !project[m]
                    .compose(&f, &section[m])
                    .sub(&f, &SparseMatrix::identity(&f, quo_dim(m)))
                    .is_zero()
            {
                viol.push(format!("degree {m}: section is not a right inverse"));
            }
            for i in 0..sub_dim_chain(m) {
                checked += 1;
                let (subv, res) = sub.reduce(m - sub_shift, iota[m].col(i));
                if !res.is_empty() || subv != SparseVec::unit(&f, i as Idx) {
                    viol.push(format!("degree {m}: reduce is not a left inverse at column {i}"));
                }
            }
        }
        for m in 1..=avail_quo {
            checked += 1;
            if !d_quo[m].compose(&f, &d_quo[m + 1]).is_zero() {
                viol.push(format!("quotient boundary fails d d = 0 at degree {}", m + 1));
            }
        }
        // The honest quotient boundary must match the reference complex on
        // the nose for the head projection and up to a global sign for the
        // coefficient projection.
        for row in &quo_vs_reference.per_degree {
            match kind {
                SesKind::Relative => {
                    checked += 1;
                    if !row.1 {
                        viol.push(format!(
                            "quotient boundary differs from the reference at degree {} ({} nonzeros)",
                            row.0, row.3
                        ));
                    }
                }
                SesKind::CoefficientKernel => {
                    checked += 1;
                    if !row.2 {
                        viol.push(format!(
                            "quotient boundary is not the negated reference at degree {} ({} nonzeros)",
                            row.0, row.3
                        ));
                    }
                }
                SesKind::PairKernel => {}
            }
        }
        CheckOutcome::from_violations(&format!("ses_structure[{}]", kind.label()), checked, viol)
    };

    // Boundary intertwining for inclusion and projection. The constructions
    // above force these identities, so a failure is fatal.
    let chain_maps = {
        let mut checked = 0;
        let mut viol = Vec::new();
        for m in 1..=avail + 1 {
            checked += 1;
            let lhs = d_mid[m].compose(&f, &iota[m]);
            let rhs = iota[m - 1].compose(&f, &d_sub_c[m]);
            if !lhs.sub(&f, &rhs).is_zero() {
                viol.push(format!("inclusion fails to intertwine boundaries at degree {m}"));
            }
            checked += 1;
            let lhs = d_quo[m].compose(&f, &project[m]);
            let rhs = project[m - 1].compose(&f, &d_mid[m]);
            if !lhs.sub(&f, &rhs).is_zero() {
                viol.push(format!("projection fails to intertwine boundaries at degree {m}"));
            }
        }
        CheckOutcome::from_violations(&format!("chain_maps[{}]", kind.label()), checked, viol)
    };
    if !chain_maps.passed() {
        return Err(Error::CheckFailed(format!(
            "{}: {}",
            chain_maps.name,
            chain_maps.violations.join("; ")
        )));
    }

    let mut sub_h = Homology::new(sub, cap);
    let mut mid_h = Homology::new(mid, cap);
    let mut quo_h = Homology::new(
        MatrixChain {
            field: f.clone(),
            label: format!("quotient[{}]", kind.label()),
            dims: (0..=avail_quo + 1).map(quo_dim).collect(),
            d: d_quo,
        },
        cap,
    );

    let mut nodes: HashMap<(Role, usize), NodeData<F>> = HashMap::new();
    for m in 0..=avail {
        let nd = if m < sub_shift {
            NodeData::empty(&f)
        } else {
            node_data(&mut sub_h, m - sub_shift)?
        };
        nodes.insert((Role::Sub, m), nd);
        nodes.insert((Role::Mid, m), node_data(&mut mid_h, m)?);
        nodes.insert((Role::Quo, m), node_data(&mut quo_h, m)?);
    }
    if avail_quo > avail {
        nodes.insert((Role::Quo, avail + 1), node_data(&mut quo_h, avail + 1)?);
    }

    // Homology-level maps out of every node.
    let mut hom: HashMap<(Role, usize), SparseMatrix<F::Elem>> = HashMap::new();
    for m in 0..=avail {
        hom.insert(
            (Role::Sub, m),
            induced_map(&f, &iota[m], &nodes[&(Role::Sub, m)], &nodes[&(Role::Mid, m)])?,
        );
        hom.insert(
            (Role::Mid, m),
            induced_map(&f, &project[m], &nodes[&(Role::Mid, m)], &nodes[&(Role::Quo, m)])?,
        );
    }
    for m in 1..=avail_quo {
        let src = &nodes[&(Role::Quo, m)];
        let tgt = &nodes[&(Role::Sub, m - 1)];
        let mut cols = Vec::with_capacity(src.dim);
        for z in &src.reps {
            let lift = section[m].apply(&f, z);
            let w = mid_h.src.boundary_of(m, &lift);
            let pull = pull_to_sub(&sub_h.src, sub_shift, m - 1, &w)?;
            cols.push(tgt.class_of(&f, &pull)?);
        }
        hom.insert((Role::Quo, m), SparseMatrix::from_columns(tgt.dim, cols));
    }
    hom.insert(
        (Role::Quo, 0),
        SparseMatrix::zero(0, nodes[&(Role::Quo, 0)].dim),
    );

    // The connecting map must not depend on the chosen lift: perturb each
    // lift by a random sub chain and compare classes.
    let connecting_oracle = {
        let mut rng = ChaCha8Rng::seed_from_u64(
            0x6e68_6c5f_6c65_73u64
                ^ match kind {
                    SesKind::Relative => 1,
                    SesKind::CoefficientKernel => 2,
                    SesKind::PairKernel => 3,
                },
        );
        let mut checked = 0;
        let mut viol = Vec::new();
        for m in 1..=avail_quo {
            let src = &nodes[&(Role::Quo, m)];
            let tgt = &nodes[&(Role::Sub, m - 1)];
            let base = &hom[&(Role::Quo, m)];
            for (j, z) in src.reps.iter().enumerate() {
                let y = random_vec(&f, iota[m].ncols(), &mut rng);
                let lift = section[m]
                    .apply(&f, z)
                    .add_scaled(&f, &f.one(), &iota[m].apply(&f, &y));
                let w = mid_h.src.boundary_of(m, &lift);
                let pull = pull_to_sub(&sub_h.src, sub_shift, m - 1, &w)?;
                checked += 1;
                if tgt.class_of(&f, &pull)? != *base.col(j) {
                    viol.push(format!("degree {m} representative {j}: value depends on the lift"));
                }
            }
        }
        CheckOutcome::from_violations(
            &format!("connecting_lift_independent[{}]", kind.label()),
            checked,
            viol,
        )
    };

    // Sequence order, highest degree first.
    let mut seq: Vec<(Role, usize)> = Vec::new();
    if avail_quo > avail {
        seq.push((Role::Quo, avail + 1));
    }
    for m in (0..=avail).rev() {
        seq.push((Role::Sub, m));
        seq.push((Role::Mid, m));
        seq.push((Role::Quo, m));
    }

    let dims: HashMap<(Role, usize), usize> =
        nodes.iter().map(|(k, n)| (*k, n.dim)).collect();
    let statuses = node_statuses(&f, &seq, &dims, &hom);
    let exactness = exactness_outcome(
        &format!("les_exactness[{}]", kind.label()),
        kind,
        &seq,
        &dims,
        &statuses,
    );

    // Edge claims at the bottom of the window.
    let edge = match kind {
        SesKind::Relative => {
            let mut checked = 0;
            let mut viol = Vec::new();
            checked += 1;
            if nodes[&(Role::Sub, 0)].dim != 0 {
                viol.push("window floor: shifted sub is nonzero at degree 0".into());
            }
            let r0 = rank_of_matrix(&f, &hom[&(Role::Mid, 0)]);
            let (m0, q0) = (nodes[&(Role::Mid, 0)].dim, nodes[&(Role::Quo, 0)].dim);
            checked += 1;
            if !(r0 == m0 && m0 == q0) {
                viol.push(format!(
                    "degree 0: projection is not an isomorphism ({m0} vs {q0}, rank {r0})"
                ));
            }
            if avail >= 1 {
                checked += 1;
                let r1 = rank_of_matrix(&f, &hom[&(Role::Mid, 1)]);
                if r1 != nodes[&(Role::Quo, 1)].dim {
                    viol.push(format!(
                        "degree 1: projection is not surjective (rank {r1} of {})",
                        nodes[&(Role::Quo, 1)].dim
                    ));
                }
            }
            CheckOutcome::from_violations("les_edge[relative]", checked, viol)
        }
        SesKind::CoefficientKernel => {
            let mut viol = Vec::new();
            let r0 = rank_of_matrix(&f, &hom[&(Role::Mid, 0)]);
            let (m0, q0) = (nodes[&(Role::Mid, 0)].dim, nodes[&(Role::Quo, 0)].dim);
            if !(r0 == m0 && m0 == q0) {
                viol.push(format!(
                    "degree 0: projection is not an isomorphism ({m0} vs {q0}, rank {r0})"
                ));
            }
            CheckOutcome::from_violations("les_edge[coefficient_kernel]", 1, viol)
        }
        SesKind::PairKernel => {
            CheckOutcome::skipped("les_edge[pair_kernel]", "no edge claim for this row")
        }
    };

    // Serializable table.
    let ranks: HashMap<(Role, usize), usize> = hom
        .iter()
        .map(|(k, m)| (*k, rank_of_matrix(&f, m)))
        .collect();
    let node_reports: Vec<NodeReport> = seq
        .iter()
        .zip(&statuses)
        .map(|(key, st)| NodeReport {
            role: key.0,
            chain_degree: key.1,
            display: display_name(kind, key.0, key.1),
            dim: dims[key],
            status: st.clone(),
        })
        .collect();
    let map_reports: Vec<MapReport> = seq
        .iter()
        .map(|key| {
            let (name, to) = match key.0 {
                Role::Sub => (format!("iota*@{}", key.1), display_name(kind, Role::Mid, key.1)),
                Role::Mid => (format!("pi*@{}", key.1), display_name(kind, Role::Quo, key.1)),
                Role::Quo => {
                    let to = if key.1 == 0 {
                        "0".to_string()
                    } else {
                        display_name(kind, Role::Sub, key.1 - 1)
                    };
                    (format!("delta@{}", key.1), to)
                }
            };
            MapReport {
                name,
                from: display_name(kind, key.0, key.1),
                to,
                rank: ranks[key],
            }
        })
        .collect();
    let relabeling: Vec<(String, String)> = seq
        .iter()
        .map(|key| {
            (
                format!("{} homology at chain degree {}", key.0.short(), key.1),
                display_name(kind, key.0, key.1),
            )
        })
        .collect();
    let table = LesTable {
        label: kind.label().into(),
        nodes: node_reports,
        maps: map_reports,
        relabeling,
    };

    Ok(SesAssembly {
        kind,
        avail,
        avail_quo,
        sub_h,
        mid_h,
        quo_h,
        iota,
        project,
        section,
        quo_vs_reference,
        structure,
        chain_maps,
        connecting_oracle,
        exactness,
        edge,
        table,
        seq,
        nodes,
        hom,
        field: f,
    })
}

/// Word-wise section of the projection, one chain degree at a time.
fn section_matrix<F: Field>(s: &Setting<F>, kind: SesKind, m: usize) -> SparseMatrix<F::Elem> {
    let f = &s.alg.field;
    let dn = s.canon.tensor_count();
    let cn = s.canon.wedge_count();
    let one = f.one();
    match kind {
        SesKind::Relative => {
            let cw = TensorWords::new(cn, m);
            let dw = TensorWords::new(dn, m);
            let rows = s.alg.dim * dw.count();
            let cols = (0..s.alg.dim * cw.count())
                .map(|idx| {
                    let head = idx / cw.count();
                    let w = cw.unrank(idx % cw.count());
                    let lifted: Vec<u32> = w.iter().map(|&x| s.canon.section(x)).collect();
                    SparseVec::from_sorted(vec![(
                        (head * dw.count() + dw.rank(&lifted)) as Idx,
                        one.clone(),
                    )])
                })
                .collect();
            SparseMatrix::from_columns(rows, cols)
        }
        SesKind::CoefficientKernel => {
            let tw = TensorWords::new(cn, m + 1);
            let cw = TensorWords::new(cn, m);
            let rows = dn * cw.count();
            let cols = (0..tw.count())
                .map(|idx| {
                    let w = tw.unrank(idx);
                    let letter = s.canon.section(w[0]) as usize;
                    let t = cw.rank(&w[1..]);
                    SparseVec::from_sorted(vec![(
                        (letter * cw.count() + t) as Idx,
                        one.clone(),
                    )])
                })
                .collect();
            SparseMatrix::from_columns(rows, cols)
        }
        SesKind::PairKernel => {
            let tw = TensorWords::new(cn, m + 1);
            let cw = TensorWords::new(cn, m);
            let rows = s.alg.dim * dn * cw.count();
            let cols = (0..s.alg.dim * tw.count())
                .map(|idx| {
                    let a = idx / tw.count();
                    let w = tw.unrank(idx % tw.count());
                    let b = s.canon.section(w[0]) as usize;
                    let t = cw.rank(&w[1..]);
                    SparseVec::from_sorted(vec![(
                        ((a * dn + b) * cw.count() + t) as Idx,
                        one.clone(),
                    )])
                })
                .collect();
            SparseMatrix::from_columns(rows, cols)
        }
    }
}

/// Deliberate damage applied to one homology-level map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapCorruption {
    /// Replace the first map of positive rank with zero. This always breaks
    /// exactness at an adjacent node, because the lost rank unbalances the
    /// bookkeeping there.
    ZeroFirstNonzero,
    /// Negate the first map of positive rank. This can never break
    /// exactness: a sign flip preserves both kernel and image.
    NegateFirstNonzero,
}

/// Re-run the exactness bookkeeping with one map deliberately altered.
/// Returns the name of the altered map and the resulting outcome.
pub fn exactness_under_corruption<F: Field>(
    a: &SesAssembly<F>,
    what: MapCorruption,
) -> (String, CheckOutcome) {
    let f = &a.field;
    let target = a
        .seq
        .iter()
        .find(|key| rank_of_matrix(f, &a.hom[key]) > 0)
        .copied();
    let Some(key) = target else {
        return (
            "none".into(),
            CheckOutcome::skipped(
                &format!("les_exactness_corrupted[{}]", a.kind.label()),
                "every homology-level map vanishes",
            ),
        );
    };
    let mut hom = a.hom.clone();
    let old = &a.hom[&key];
    // Rows of the replacement must match the original target space.
    let replacement = match what {
        MapCorruption::ZeroFirstNonzero => {
            let rows = match key.0 {
                Role::Sub => a.nodes[&(Role::Mid, key.1)].dim,
                Role::Mid => a.nodes[&(Role::Quo, key.1)].dim,
                Role::Quo => {
                    if key.1 == 0 {
                        0
                    } else {
                        a.nodes[&(Role::Sub, key.1 - 1)].dim
                    }
                }
            };
            SparseMatrix::zero(rows, old.ncols())
        }
        MapCorruption::NegateFirstNonzero => old.neg(f),
    };
    hom.insert(key, replacement);
    let dims: HashMap<(Role, usize), usize> =
        a.nodes.iter().map(|(k, n)| (*k, n.dim)).collect();
    let statuses = node_statuses(f, &a.seq, &dims, &hom);
    let name = format!("{}@{}", key.0.short(), key.1);
    let label = match what {
        MapCorruption::ZeroFirstNonzero => {
            format!("les_exactness_zeroed[{}|{}]", a.kind.label(), name)
        }
        MapCorruption::NegateFirstNonzero => {
            format!("les_exactness_negated[{}|{}]", a.kind.label(), name)
        }
    };
    (name, exactness_outcome(&label, a.kind, &a.seq, &dims, &statuses))
}

/// The two-row homology ladder: the head-projection sequence on top, the
/// pair-kernel sequence below, verticals induced by the first-slot split
/// (which drops the chain degree by one).
pub struct LadderReport {
    /// Chain-level factorization: pair projection after first-slot split
    /// equals the head projection, on the nose.
    pub factorization: CheckOutcome,
    /// Every vertical sends representatives to cycles in the right space.
    pub verticals: CheckOutcome,
    /// Every ladder square commutes at homology level.
    pub squares: CheckOutcome,
    pub top: LesTable,
    pub bottom: LesTable,
    pub top_exactness: CheckOutcome,
    pub bottom_exactness: CheckOutcome,
    /// How the honest bottom quotient boundary compares to the plain
    /// base-over-wedge boundary on the same coordinates (informational).
    pub bottom_quo_vs_reference: GradedMapReport,
}

impl LadderReport {
    pub fn passed(&self) -> bool {
        self.factorization.passed()
            && self.verticals.passed()
            && self.squares.passed()
            && self.top_exactness.passed()
            && self.bottom_exactness.passed()
    }
}

pub fn ladder_check<F: Field>(s: &Setting<F>, avail: usize, cap: usize) -> Result<LadderReport> {
    assert!(avail >= 1, "the ladder needs at least one full window");
    let f = s.alg.field.clone();

    let factorization = {
        let mut viol = Vec::new();
        for m in 1..=avail {
            let lhs = proj_pair_matrix(s, m - 1).compose(&f, &proj_first_slot_matrix(s, m));
            let rhs = proj_base_matrix(s, m);
            if !lhs.sub(&f, &rhs).is_zero() {
                viol.push(format!(
                    "degree {m}: split-then-project differs from the head projection"
                ));
            }
        }
        CheckOutcome::from_violations("ladder_factorization", avail, viol)
    };

    let a = assemble_les(s, SesKind::Relative, avail, cap)?;
    let b = assemble_les(s, SesKind::PairKernel, avail - 1, cap)?;

    // Verticals per window w: top homology degree w down to bottom w - 1.
    let mut vchecked = 0;
    let mut vviol = Vec::new();
    let mut vs: HashMap<usize, SparseMatrix<F::Elem>> = HashMap::new();
    let mut vm: HashMap<usize, SparseMatrix<F::Elem>> = HashMap::new();
    let mut vq: HashMap<usize, SparseMatrix<F::Elem>> = HashMap::new();
    for w in 1..=avail {
        let p1 = proj_first_slot_matrix(s, w);
        // Sub vertical: restrict the split to the kernel rows.
        {
            let srcn = a.node(Role::Sub, w);
            let tgtn = b.node(Role::Sub, w - 1);
            let mut cols = Vec::with_capacity(srcn.dim);
            let mut ok = true;
            for (j, r) in srcn.reps.iter().enumerate() {
                vchecked += 1;
                let ch = p1.apply(&f, &a.iota[w].apply(&f, r));
                let (subv, res) = b.sub_h.src.reduce(w - 1, &ch);
                if !res.is_empty() {
                    vviol.push(format!(
                        "sub vertical at window {w}, representative {j}: image escapes the kernel row"
                    ));
                    ok = false;
                    break;
                }
                match tgtn.class_of(&f, &subv) {
                    Ok(c) => cols.push(c),
                    Err(_) => {
                        vviol.push(format!(
                            "sub vertical at window {w}, representative {j}: image is not a cycle"
                        ));
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                vs.insert(w, SparseMatrix::from_columns(tgtn.dim, cols));
            }
        }
        // Mid vertical: the split itself.
        {
            let srcn = a.node(Role::Mid, w);
            let tgtn = b.node(Role::Mid, w - 1);
            let mut cols = Vec::with_capacity(srcn.dim);
            let mut ok = true;
            for (j, z) in srcn.reps.iter().enumerate() {
                vchecked += 1;
                match tgtn.class_of(&f, &p1.apply(&f, z)) {
                    Ok(c) => cols.push(c),
                    Err(_) => {
                        vviol.push(format!(
                            "mid vertical at window {w}, representative {j}: image is not a cycle"
                        ));
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                vm.insert(w, SparseMatrix::from_columns(tgtn.dim, cols));
            }
        }
    }
    // Quotient verticals reuse the coordinates: the top quotient at degree w
    // and the bottom quotient at degree w - 1 live on the same word space.
    let vq_top = if a.avail_quo == avail + 1 && b.avail_quo == avail { avail + 1 } else { avail };
    for w in 1..=vq_top {
        let srcn = a.node(Role::Quo, w);
        let tgtn = b.node(Role::Quo, w - 1);
        let mut cols = Vec::with_capacity(srcn.dim);
        let mut ok = true;
        for (j, z) in srcn.reps.iter().enumerate() {
            vchecked += 1;
            match tgtn.class_of(&f, z) {
                Ok(c) => cols.push(c),
                Err(_) => {
                    vviol.push(format!(
                        "quotient vertical at window {w}, representative {j}: not a cycle for the honest boundary"
                    ));
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            vq.insert(w, SparseMatrix::from_columns(tgtn.dim, cols));
        }
    }
    let verticals = CheckOutcome::from_violations("ladder_verticals", vchecked, vviol);

    // Squares, as matrix identities over the representative bases.
    let mut schecked = 0;
    let mut sviol = Vec::new();
    let square = |name: String,
                      lhs: Option<SparseMatrix<F::Elem>>,
                      rhs: Option<SparseMatrix<F::Elem>>,
                      schecked: &mut usize,
                      sviol: &mut Vec<String>| {
        *schecked += 1;
        match (lhs, rhs) {
            (Some(l), Some(r)) => {
                let d = l.sub(&f, &r);
                if !d.is_zero() {
                    sviol.push(format!("{name}: defect has {} nonzeros", d.nnz()));
                }
            }
            _ => sviol.push(format!("{name}: a vertical is undefined")),
        }
    };
    for w in 1..=avail {
        square(
            format!("inclusion square at window {w}"),
            vm.get(&w)
                .zip(a.hom_map(Role::Sub, w))
                .map(|(v, h)| v.compose(&f, h)),
            b.hom_map(Role::Sub, w - 1)
                .zip(vs.get(&w))
                .map(|(h, v)| h.compose(&f, v)),
            &mut schecked,
            &mut sviol,
        );
        square(
            format!("projection square at window {w}"),
            vq.get(&w)
                .zip(a.hom_map(Role::Mid, w))
                .map(|(v, h)| v.compose(&f, h)),
            b.hom_map(Role::Mid, w - 1)
                .zip(vm.get(&w))
                .map(|(h, v)| h.compose(&f, v)),
            &mut schecked,
            &mut sviol,
        );
    }
    for w in 2..=vq_top {
        square(
            format!("connecting square at window {w}"),
            vs.get(&(w - 1))
                .zip(a.hom_map(Role::Quo, w))
                .map(|(v, h)| v.compose(&f, h)),
            b.hom_map(Role::Quo, w - 1)
                .zip(vq.get(&w))
                .map(|(h, v)| h.compose(&f, v)),
            &mut schecked,
            &mut sviol,
        );
    }
    let squares = CheckOutcome::from_violations("ladder_squares", schecked, sviol);

    Ok(LadderReport {
        factorization,
        verticals,
        squares,
        top: a.table.clone(),
        bottom: b.table.clone(),
        top_exactness: a.exactness.clone(),
        bottom_exactness: b.exactness.clone(),
        bottom_quo_vs_reference: b.quo_vs_reference.clone(),
    })
}
