//! Standard-form builders for the level-one semidefinite bounds.
//!
//! Every bound comes in two independently built shapes:
//!
//! * [`Side::Primal`]: maximization over a moment matrix `X` (or a bordered
//!   matrix `Y = [[1, x'], [x, X]]`, index 0 being the border).
//! * [`Side::Dual`]: minimization over multipliers, written as a linear
//!   matrix inequality `F0 + sum_k y_k F_k ⪰ 0` and handed to the solver in
//!   inequality form (see [`Lmi::into_problem`]).
//!
//! Vertices of a bipartite graph use the flattened order (part 2 after
//! part 1), so `f = χ^{V1} - χ^{V2}` and `C = ½[[0, J], [J, 0]]`.

use std::collections::BTreeMap;

use bibound_sdp::{entry, solve, BlockKind, Entry, SdpProblem, Sense, SolveResult, SolverConfig, Status};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::graph::{BipartiteGraph, Graph};
use crate::reduce::{primal_face, restrict_primal, sign_face_basis, Face};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Primal,
    Dual,
}

/// Semidefinite bounds on a bipartite graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// Trace-normalized theta of the flattened graph.
    Theta,
    /// Arrow (bordered) form of theta; equal to `Theta`.
    Las1,
    H1,
    G1,
    H1Prime,
    HHatSdp,
    HHatPrime,
    LasBal1,
    ThetaBal,
    GBal1,
    HBal1,
    ThetaBalHat,
    LasBalHat,
    GBalHat,
    LasBalTilde,
}

impl Bound {
    pub const ALL: [Bound; 15] = [
        Bound::Theta,
        Bound::Las1,
        Bound::H1,
        Bound::G1,
        Bound::H1Prime,
        Bound::HHatSdp,
        Bound::HHatPrime,
        Bound::LasBal1,
        Bound::ThetaBal,
        Bound::GBal1,
        Bound::HBal1,
        Bound::ThetaBalHat,
        Bound::LasBalHat,
        Bound::GBalHat,
        Bound::LasBalTilde,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Bound::Theta => "theta",
            Bound::Las1 => "las1",
            Bound::H1 => "h1",
            Bound::G1 => "g1",
            Bound::H1Prime => "h1_prime",
            Bound::HHatSdp => "h_hat_sdp",
            Bound::HHatPrime => "h_hat_prime",
            Bound::LasBal1 => "las_bal1",
            Bound::ThetaBal => "theta_bal",
            Bound::GBal1 => "g_bal1",
            Bound::HBal1 => "h_bal1",
            Bound::ThetaBalHat => "theta_bal_hat",
            Bound::LasBalHat => "las_bal_hat",
            Bound::GBalHat => "g_bal_hat",
            Bound::LasBalTilde => "las_bal_tilde",
        }
    }

    pub fn from_id(s: &str) -> Option<Bound> {
        Bound::ALL.iter().copied().find(|b| b.id() == s)
    }

    /// Bounds whose value is 0 on a complete bipartite graph, where the
    /// solver is skipped. For the balanced ones, `<ff', X> = 0` together with
    /// `<A, X> = 0` (or zeros on every edge) forces `Xe = 0`, so the feasible
    /// set has no interior in any face the solver could be given.
    pub fn vanishes_on_complete(self) -> bool {
        !matches!(self, Bound::Theta | Bound::Las1)
    }

    /// Trace-normalized balanced programs: infeasible exactly when no
    /// nonzero PSD matrix satisfies the balancing constraints.
    fn infeasible_means_zero(self) -> bool {
        matches!(self, Bound::ThetaBal | Bound::HBal1 | Bound::ThetaBalHat)
    }

    /// Programs carrying the constraint `<ff', X> = 0`.
    pub fn is_balanced(self) -> bool {
        matches!(
            self,
            Bound::LasBal1
                | Bound::ThetaBal
                | Bound::GBal1
                | Bound::HBal1
                | Bound::ThetaBalHat
                | Bound::LasBalHat
                | Bound::GBalHat
                | Bound::LasBalTilde
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaForm {
    Trace,
    Arrow,
}

// ---------------------------------------------------------------------------
// Primal helpers

/// Upper-triangle nonzeros of a symmetric matrix, shifted by `off`.
fn triplets(m: &DMatrix<f64>, off: usize) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            if m[(i, j)] != 0.0 {
                out.push((i + off, j + off, m[(i, j)]));
            }
        }
    }
    out
}

fn entries(b: usize, t: &[(usize, usize, f64)]) -> Vec<Entry> {
    t.iter().map(|&(i, j, v)| entry(b, i, j, v)).collect()
}

fn diag_matrix(v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_column_slice(v))
}

fn outer(v: &[f64]) -> DMatrix<f64> {
    let v = DVector::from_column_slice(v);
    &v * v.transpose()
}

fn ones(n: usize) -> DMatrix<f64> {
    DMatrix::from_element(n, n, 1.0)
}

/// `max <obj, X>` over `X ⪰ 0` with `Tr X = 1`, `X_ij = 0` on `zeros`, and
/// `<A_k, X> = 0` for each extra matrix.
fn trace_primal(name: &str, obj: &DMatrix<f64>, zeros: &[(usize, usize)], extra: &[DMatrix<f64>]) -> SdpProblem {
    let n = obj.nrows();
    let mut p = SdpProblem::new(name, Sense::Maximize);
    let b = p.add_block(BlockKind::Psd, n);
    for (i, j, v) in triplets(obj, 0) {
        p.obj(b, i, j, v);
    }
    p.add_constraint((0..n).map(|i| entry(b, i, i, 1.0)).collect(), 1.0);
    for &(i, j) in zeros {
        p.add_constraint(vec![entry(b, i, j, 1.0)], 0.0);
    }
    for a in extra {
        p.add_constraint(entries(b, &triplets(a, 0)), 0.0);
    }
    p
}

/// Bordered program over `Y = [[1, x'], [x, X]] ⪰ 0` maximizing `<obj, X>`.
/// Each extra constraint is given directly on `Y` (index 0 = border).
fn bordered_primal(
    name: &str,
    obj: &DMatrix<f64>,
    link_diagonal: bool,
    zeros: &[(usize, usize)],
    extra: Vec<(Vec<(usize, usize, f64)>, f64)>,
) -> SdpProblem {
    let n = obj.nrows();
    let mut p = SdpProblem::new(name, Sense::Maximize);
    let b = p.add_block(BlockKind::Psd, n + 1);
    for (i, j, v) in triplets(obj, 1) {
        p.obj(b, i, j, v);
    }
    p.add_constraint(vec![entry(b, 0, 0, 1.0)], 1.0);
    if link_diagonal {
        for i in 1..=n {
            p.add_constraint(vec![entry(b, i, i, 1.0), entry(b, 0, i, -0.5)], 0.0);
        }
    }
    for &(i, j) in zeros {
        p.add_constraint(vec![entry(b, i + 1, j + 1, 1.0)], 0.0);
    }
    for (t, rhs) in extra {
        p.add_constraint(entries(b, &t), rhs);
    }
    p
}

// ---------------------------------------------------------------------------
// Linear matrix inequalities

/// One inequality `F0 + sum_k y_k F_k ⪰ 0`, stored as upper-triangle maps.
#[derive(Debug, Clone)]
pub struct LmiBlock {
    pub(crate) dim: usize,
    pub(crate) constant: BTreeMap<(usize, usize), f64>,
    pub(crate) terms: BTreeMap<(usize, usize), BTreeMap<usize, f64>>,
}

impl LmiBlock {
    pub fn new(dim: usize) -> Self {
        LmiBlock { dim, constant: BTreeMap::new(), terms: BTreeMap::new() }
    }

    fn key(i: usize, j: usize) -> (usize, usize) {
        (i.min(j), i.max(j))
    }

    pub fn constant(&mut self, i: usize, j: usize, v: f64) {
        *self.constant.entry(Self::key(i, j)).or_default() += v;
    }

    pub fn term(&mut self, var: usize, i: usize, j: usize, v: f64) {
        *self.terms.entry(Self::key(i, j)).or_default().entry(var).or_default() += v;
    }

    pub fn constant_matrix(&mut self, m: &DMatrix<f64>, off: usize, scale: f64) {
        for (i, j, v) in triplets(m, off) {
            self.constant(i, j, scale * v);
        }
    }

    pub fn term_matrix(&mut self, var: usize, m: &DMatrix<f64>, off: usize, scale: f64) {
        for (i, j, v) in triplets(m, off) {
            self.term(var, i, j, scale * v);
        }
    }
}

/// `min c'y` subject to a list of linear matrix inequalities in free `y`.
#[derive(Debug, Clone)]
pub struct Lmi {
    pub name: String,
    pub cost: Vec<f64>,
    pub blocks: Vec<LmiBlock>,
}

impl Lmi {
    pub fn new(name: &str, vars: usize) -> Self {
        Lmi { name: name.into(), cost: vec![0.0; vars], blocks: Vec::new() }
    }

    /// Standard form whose Lagrangian dual is the inequality: maximize
    /// `<-F0, X>` over block-diagonal `X ⪰ 0` subject to `<F_k, X> = c_k`.
    /// The solver's multipliers are then exactly `y`, and its dual objective
    /// is the value of the inequality program. Encoding `F(y)` as equality
    /// constraints on a slack instead makes the Newton system condition like
    /// the square of the slack's.
    pub fn into_problem(self) -> SdpProblem {
        let mut p = SdpProblem::new(self.name, Sense::Maximize);
        let ids: Vec<usize> = self.blocks.iter().map(|b| p.add_block(BlockKind::Psd, b.dim)).collect();
        let mut rows: Vec<Vec<Entry>> = vec![Vec::new(); self.cost.len()];
        for (blk, &b) in self.blocks.iter().zip(&ids) {
            for (&(i, j), &v) in &blk.constant {
                if v != 0.0 {
                    p.obj(b, i, j, -v);
                }
            }
            for (&(i, j), t) in &blk.terms {
                for (&k, &v) in t {
                    if v != 0.0 {
                        rows[k].push(entry(b, i, j, v));
                    }
                }
            }
        }
        for (row, c) in rows.into_iter().zip(self.cost) {
            p.add_constraint(row, c);
        }
        p.note("inequality form: constraint multipliers are the program variables, value is the dual objective");
        p
    }
}

/// Edge list of a bipartite graph in flattened indices.
fn flat_edges(g: &BipartiteGraph) -> Vec<(usize, usize)> {
    g.edges().iter().map(|&(i, j)| (i, g.n1() + j)).collect()
}

/// `λ I - obj + Z + extra ⪰ 0`, `Z` supported on `zeros`; variable 0 is `λ`,
/// then one per zero position, then one per extra matrix.
fn trace_dual(name: &str, obj: &DMatrix<f64>, zeros: &[(usize, usize)], extra: &[DMatrix<f64>]) -> Lmi {
    let n = obj.nrows();
    let mut lmi = Lmi::new(name, 1 + zeros.len() + extra.len());
    lmi.cost[0] = 1.0;
    let mut b = LmiBlock::new(n);
    b.constant_matrix(obj, 0, -1.0);
    for i in 0..n {
        b.term(0, i, i, 1.0);
    }
    for (k, &(i, j)) in zeros.iter().enumerate() {
        b.term(1 + k, i, j, 1.0);
    }
    let base = 1 + zeros.len();
    for (k, a) in extra.iter().enumerate() {
        b.term_matrix(base + k, a, 0, 1.0);
    }
    lmi.blocks.push(b);
    lmi
}

/// `[[λ, -u'/2], [-u/2, Diag(u) - obj + Z + extra]] ⪰ 0`, minimizing `λ`.
/// Variables: `λ`, then `u`, then `Z` on `zeros`, then extra multipliers.
fn arrow_dual(name: &str, obj: &DMatrix<f64>, zeros: &[(usize, usize)], extra: &[DMatrix<f64>]) -> Lmi {
    let n = obj.nrows();
    let mut lmi = Lmi::new(name, 1 + n + zeros.len() + extra.len());
    lmi.cost[0] = 1.0;
    let mut b = LmiBlock::new(n + 1);
    b.term(0, 0, 0, 1.0);
    for i in 0..n {
        b.term(1 + i, 0, i + 1, -0.5);
        b.term(1 + i, i + 1, i + 1, 1.0);
    }
    b.constant_matrix(obj, 1, -1.0);
    for (k, &(i, j)) in zeros.iter().enumerate() {
        b.term(1 + n + k, i + 1, j + 1, 1.0);
    }
    let base = 1 + n + zeros.len();
    for (k, a) in extra.iter().enumerate() {
        b.term_matrix(base + k, a, 1, 1.0);
    }
    lmi.blocks.push(b);
    lmi
}

/// Lovász theta of a general graph in either form.
pub fn model_theta(g: &Graph, form: ThetaForm, side: Side) -> SdpProblem {
    let n = g.n();
    let id = DMatrix::identity(n, n);
    let mut p = match (form, side) {
        (ThetaForm::Trace, Side::Primal) => trace_primal("theta", &ones(n), g.edges(), &[]),
        (ThetaForm::Trace, Side::Dual) => trace_dual("theta", &ones(n), g.edges(), &[]).into_problem(),
        (ThetaForm::Arrow, Side::Primal) => bordered_primal("las1", &id, true, g.edges(), vec![]),
        (ThetaForm::Arrow, Side::Dual) => arrow_dual("las1", &id, g.edges(), &[]).into_problem(),
    };
    p.digest = g.digest();
    p
}

/// Builds the standard-form program of `bound` on `g`.
pub fn build(bound: Bound, g: &BipartiteGraph, side: Side) -> Result<SdpProblem, Error> {
    let n = g.n();
    let n1 = g.n1();
    let c = g.objective_matrix();
    let id = DMatrix::<f64>::identity(n, n);
    let f = g.sign_vector();
    let fft = outer(&f);
    let diag_f = diag_matrix(&f);
    let edges = flat_edges(g);
    let adj = g.flatten().adjacency();
    let name = bound.id();
    let program = match (bound, side) {
        (Bound::Theta, _) => Program::Primal(model_theta(&g.flatten(), ThetaForm::Trace, side)),
        (Bound::Las1, _) => Program::Primal(model_theta(&g.flatten(), ThetaForm::Arrow, side)),
        (Bound::H1, Side::Primal) => Program::Primal(trace_primal(name, &c, &edges, &[])),
        (Bound::H1, Side::Dual) => Program::Dual(trace_dual(name, &c, &edges, &[])),
        (Bound::G1, Side::Primal) => Program::Primal(bordered_primal(name, &c, true, &edges, vec![])),
        (Bound::G1, Side::Dual) => Program::Dual(arrow_dual(name, &c, &edges, &[])),
        (Bound::H1Prime, Side::Primal) => {
            let tr = (1..=n).map(|i| (i, i, 1.0)).collect();
            Program::Primal(bordered_primal(name, &c, true, &edges, vec![(tr, 1.0)]))
        }
        (Bound::H1Prime, Side::Dual) => {
            // min λ + η; η multiplies the identity on the X part.
            let mut lmi = Lmi::new(name, 2 + n + edges.len());
            lmi.cost[0] = 1.0;
            lmi.cost[1] = 1.0;
            let mut b = LmiBlock::new(n + 1);
            b.term(0, 0, 0, 1.0);
            for i in 0..n {
                b.term(1, i + 1, i + 1, 1.0);
                b.term(2 + i, 0, i + 1, -0.5);
                b.term(2 + i, i + 1, i + 1, 1.0);
            }
            b.constant_matrix(&c, 1, -1.0);
            for (k, &(i, j)) in edges.iter().enumerate() {
                b.term(2 + n + k, i + 1, j + 1, 1.0);
            }
            lmi.blocks.push(b);
            Program::Dual(lmi)
        }
        (Bound::HHatSdp, Side::Primal) => Program::Primal(trace_primal(name, &c, &[], &[adj])),
        (Bound::HHatSdp, Side::Dual) => Program::Dual(trace_dual(name, &c, &[], &[adj])),
        (Bound::HHatPrime, Side::Primal) => {
            let tr = (1..=n).map(|i| (i, i, 1.0)).collect();
            let ex = (1..=n).map(|i| (0, i, 0.5)).collect();
            Program::Primal(bordered_primal(name, &c, false, &[], vec![(tr, 1.0), (ex, 1.0), (triplets(&adj, 1), 0.0)]))
        }
        (Bound::HHatPrime, Side::Dual) => {
            // min λ + η + μ over [[λ, μe'/2], [μe/2, ηI + tA - C]].
            let mut lmi = Lmi::new(name, 4);
            lmi.cost[..3].copy_from_slice(&[1.0, 1.0, 1.0]);
            let mut b = LmiBlock::new(n + 1);
            b.term(0, 0, 0, 1.0);
            for i in 0..n {
                b.term(1, i + 1, i + 1, 1.0);
                b.term(2, 0, i + 1, 0.5);
            }
            b.term_matrix(3, &adj, 1, 1.0);
            b.constant_matrix(&c, 1, -1.0);
            lmi.blocks.push(b);
            Program::Dual(lmi)
        }
        (Bound::LasBal1, Side::Primal) => {
            Program::Primal(bordered_primal(name, &id, true, &edges, vec![(triplets(&fft, 1), 0.0)]))
        }
        (Bound::LasBal1, Side::Dual) => Program::Dual(arrow_dual(name, &id, &edges, &[fft])),
        (Bound::ThetaBal, Side::Primal) => Program::Primal(trace_primal(name, &ones(n), &edges, &[fft, diag_f])),
        (Bound::ThetaBal, Side::Dual) => Program::Dual(trace_dual(name, &ones(n), &edges, &[fft, diag_f])),
        (Bound::GBal1, Side::Primal) => Program::Primal(bordered_primal(name, &c, true, &edges, vec![(triplets(&fft, 1), 0.0)])),
        (Bound::GBal1, Side::Dual) => Program::Dual(arrow_dual(name, &c, &edges, &[fft])),
        (Bound::HBal1, Side::Primal) => Program::Primal(trace_primal(name, &c, &edges, &[fft, diag_f])),
        (Bound::HBal1, Side::Dual) => Program::Dual(trace_dual(name, &c, &edges, &[fft, diag_f])),
        (Bound::ThetaBalHat, Side::Primal) => Program::Primal(trace_primal(name, &ones(n), &[], &[adj, fft, diag_f])),
        (Bound::ThetaBalHat, Side::Dual) => Program::Dual(trace_dual(name, &ones(n), &[], &[adj, fft, diag_f])),
        (Bound::LasBalHat | Bound::GBalHat, Side::Primal) => {
            let obj = if bound == Bound::LasBalHat { &id } else { &c };
            // Tr X - e'x = 0
            let mut tr: Vec<_> = (1..=n).map(|i| (i, i, 1.0)).collect();
            tr.extend((1..=n).map(|i| (0, i, -0.5)));
            let extra = vec![
                (tr, 0.0),
                (triplets(&adj, 1), 0.0),
                (triplets(&fft, 1), 0.0),
                (triplets(&diag_f, 1), 0.0),
            ];
            Program::Primal(bordered_primal(name, obj, false, &[], extra))
        }
        (Bound::LasBalHat | Bound::GBalHat, Side::Dual) => {
            // [[λ, -μe'/2], [-μe/2, μI - obj + tA + s ff' + v Diag f]]
            let obj = if bound == Bound::LasBalHat { &id } else { &c };
            let mut lmi = Lmi::new(name, 5);
            lmi.cost[0] = 1.0;
            let mut b = LmiBlock::new(n + 1);
            b.term(0, 0, 0, 1.0);
            for i in 0..n {
                b.term(1, 0, i + 1, -0.5);
                b.term(1, i + 1, i + 1, 1.0);
            }
            b.constant_matrix(obj, 1, -1.0);
            b.term_matrix(2, &adj, 1, 1.0);
            b.term_matrix(3, &fft, 1, 1.0);
            b.term_matrix(4, &diag_f, 1, 1.0);
            lmi.blocks.push(b);
            Program::Dual(lmi)
        }
        (Bound::LasBalTilde, Side::Primal) => {
            // <Diag χ^{Vk}, X> = x'χ^{Vk} for k = 1, 2
            let side_link = |range: std::ops::Range<usize>| {
                let mut t: Vec<_> = range.clone().map(|i| (i + 1, i + 1, 1.0)).collect();
                t.extend(range.map(|i| (0, i + 1, -0.5)));
                (t, 0.0)
            };
            let extra = vec![
                side_link(0..n1),
                side_link(n1..n),
                (triplets(&adj, 1), 0.0),
                (triplets(&fft, 1), 0.0),
                (triplets(&diag_f, 1), 0.0),
            ];
            Program::Primal(bordered_primal(name, &id, false, &[], extra))
        }
        (Bound::LasBalTilde, Side::Dual) => {
            // u = μ1 χ^{V1} + μ2 χ^{V2}
            let mut lmi = Lmi::new(name, 6);
            lmi.cost[0] = 1.0;
            let mut b = LmiBlock::new(n + 1);
            b.term(0, 0, 0, 1.0);
            for i in 0..n {
                let var = if i < n1 { 1 } else { 2 };
                b.term(var, 0, i + 1, -0.5);
                b.term(var, i + 1, i + 1, 1.0);
            }
            b.constant_matrix(&id, 1, -1.0);
            b.term_matrix(3, &adj, 1, 1.0);
            b.term_matrix(4, &fft, 1, 1.0);
            b.term_matrix(5, &diag_f, 1, 1.0);
            lmi.blocks.push(b);
            Program::Dual(lmi)
        }
    };
    let mut p = match program {
        Program::Primal(p) if bound.is_balanced() => {
            let border = p.blocks[0].dim > n;
            restrict_primal(&p, &sign_face_basis(&f, border)).map_err(|_| infeasible(bound, side))?
        }
        Program::Primal(p) => p,
        Program::Dual(lmi) => {
            let dim = lmi.blocks[0].dim;
            let q = if bound.is_balanced() {
                sign_face_basis(&f, dim > n)
            } else {
                DMatrix::identity(dim, dim)
            };
            lmi.restrict(&q).map_err(|_| infeasible(bound, side))?.into_problem()
        }
    };
    p.digest = g.digest();
    p.note(format!("bound {name}, side {side:?}, {} vertices in flattened order", n));
    Ok(p)
}

enum Program {
    Primal(SdpProblem),
    Dual(Lmi),
}

fn infeasible(bound: Bound, side: Side) -> Error {
    let what = match side {
        Side::Primal => "has no feasible point",
        Side::Dual => "is unbounded below",
    };
    Error::Infeasible(format!("{} ({side:?}) {what}", bound.id()))
}

/// Haemers' `φ(H)`: smallest `t` with `-tI ⪯ M ⪯ tI`, where `M` is 1 on the
/// edges of `H` and free on the diagonal and on non-edges.
pub fn model_phi(h: &Graph) -> SdpProblem {
    let n = h.n();
    let free: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).filter(|&(i, j)| i == j || !h.has_edge(i, j)).collect();
    let mut lmi = Lmi::new("phi", 1 + free.len());
    lmi.cost[0] = 1.0;
    for sign in [-1.0, 1.0] {
        let mut b = LmiBlock::new(n);
        for i in 0..n {
            b.term(0, i, i, 1.0);
        }
        for &(i, j) in h.edges() {
            b.constant(i, j, sign);
        }
        for (k, &(i, j)) in free.iter().enumerate() {
            b.term(1 + k, i, j, sign);
        }
        lmi.blocks.push(b);
    }
    let mut p = lmi.into_problem();
    p.digest = h.digest();
    p
}

/// Orthonormal basis of the complement of the all-ones vector (Helmert).
pub fn helmert_basis(n: usize) -> DMatrix<f64> {
    let mut p = DMatrix::zeros(n, n.saturating_sub(1));
    for k in 1..n {
        let s = ((k * (k + 1)) as f64).sqrt();
        for i in 0..k {
            p[(i, k - 1)] = 1.0 / s;
        }
        p[(k, k - 1)] = -(k as f64) / s;
    }
    p
}

/// Projected form of Haemers' `φ'(H)`: `M = I - L_w` with free weights `w` on
/// non-edges of `H` (so `Me = e` and `M` vanishes on edges), minimizing the
/// largest absolute eigenvalue of `P'MP` over `e^⊥`. Variable 0 is `t`.
pub fn model_phi_prime(h: &Graph) -> SdpProblem {
    let n = h.n();
    let p = helmert_basis(n);
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| !h.has_edge(i, j)).collect();
    let d = n - 1;
    let mut lmi = Lmi::new("phi_prime", 1 + pairs.len());
    lmi.cost[0] = 1.0;
    // P'(I - L_w)P = I - sum_w w_ij q q' with q = P'(e_i - e_j).
    let qs: Vec<DVector<f64>> =
        pairs.iter().map(|&(i, j)| (p.row(i) - p.row(j)).transpose()).collect();
    for sign in [1.0, -1.0] {
        // tI - sign * (I - sum w q q') ⪰ 0
        let mut b = LmiBlock::new(d);
        for a in 0..d {
            b.term(0, a, a, 1.0);
            b.constant(a, a, -sign);
        }
        for (k, q) in qs.iter().enumerate() {
            b.term_matrix(1 + k, &(q * q.transpose()), 0, sign);
        }
        lmi.blocks.push(b);
    }
    let mut prob = lmi.into_problem();
    prob.digest = h.digest();
    prob
}

// ---------------------------------------------------------------------------
// Border completion

/// Given `X ⪰ 0` with `Tr X = 1` and `<J, X> >= 1`, returns `x` with `e'x = 1`
/// and `X - xx' ⪰ 0`, built from the eigendecomposition `X = sum β_i u_i u_i'`
/// as `x = sum β_i (e'u_i) u_i / ‖a‖²` with `a_i = √β_i e'u_i`.
pub fn complete_arrow_border(x: &DMatrix<f64>, tol: f64) -> Result<DVector<f64>, Error> {
    let n = x.nrows();
    if n == 0 || x.ncols() != n {
        return Err(Error::InvalidParameter("square nonempty matrix required".into()));
    }
    if (x - x.transpose()).amax() > tol {
        return Err(Error::Precondition("matrix is not symmetric".into()));
    }
    if (x.trace() - 1.0).abs() > tol {
        return Err(Error::Precondition(format!("trace is {} instead of 1", x.trace())));
    }
    let eig = SymmetricEigen::new(x.clone());
    if eig.eigenvalues.min() < -tol {
        return Err(Error::Precondition("matrix is not positive semidefinite".into()));
    }
    let total = x.sum();
    if total < 1.0 - tol {
        return Err(Error::Precondition(format!(
            "<J, X> = {total} < 1; a border vector with e'x = 1 and X - xx' ⪰ 0 exists if and only if <J, X> >= 1"
        )));
    }
    let mut out = DVector::zeros(n);
    let mut norm2 = 0.0;
    for (k, &beta) in eig.eigenvalues.iter().enumerate() {
        let beta = beta.max(0.0);
        let u = eig.eigenvectors.column(k);
        let eu = u.sum();
        norm2 += beta * eu * eu;
        out += u * (beta * eu);
    }
    Ok(out / norm2)
}

// ---------------------------------------------------------------------------
// Solving

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Value from the interior-point solver.
    Solver,
    /// Complete bipartite input; the value is 0 without solving.
    CompleteBipartite,
    /// The balanced trace-normalized program has no feasible point, which
    /// happens only when no balanced pair survives; reported as 0.
    InfeasibleAsZero,
}

/// A problem together with its solver output.
#[derive(Debug, Clone)]
pub struct Certified {
    pub problem: SdpProblem,
    pub result: SolveResult,
}

#[derive(Debug, Clone)]
pub struct BoundValue {
    pub value: f64,
    pub method: Method,
    pub certified: Option<Certified>,
}

/// Solves a standard-form problem, accepting only an optimal status.
pub fn solve_optimal(problem: SdpProblem, cfg: &SolverConfig) -> Result<Certified, Error> {
    let (problem, result) = solve_reducing(problem, cfg)?;
    if result.status != Status::Optimal {
        return Err(Error::Solver(format!(
            "{}: status {:?} after {} iterations (gap {:.2e}, infeasibility {:.2e}/{:.2e})",
            problem.name,
            result.status,
            result.iterations,
            result.gap,
            result.primal_infeasibility,
            result.dual_infeasibility
        )));
    }
    Ok(Certified { problem, result })
}

/// Largest number of face reductions tried after a stalled solve.
const MAX_REDUCTIONS: usize = 4;

/// Solves `problem`; when the solver stalls, looks for a proper face holding
/// every feasible point, restricts to it and solves again. A program whose
/// matrix variable is empty comes back as [`Status::Infeasible`].
fn solve_reducing(mut problem: SdpProblem, cfg: &SolverConfig) -> Result<(SdpProblem, SolveResult), Error> {
    let mut result = solve(&problem, cfg)?;
    for _ in 0..MAX_REDUCTIONS {
        if !matches!(result.status, Status::Stalled | Status::IterationLimit) {
            break;
        }
        let q = match primal_face(&problem, cfg) {
            Face::Interior => break,
            Face::Empty => {
                result.status = Status::Infeasible;
                break;
            }
            Face::Reduced(q) => q,
        };
        let Ok(reduced) = restrict_primal(&problem, &q) else {
            result.status = Status::Infeasible;
            break;
        };
        if q.ncols() == 0 {
            // Only X = 0 remains.
            let zero = reduced.constraints.iter().all(|c| c.rhs == 0.0);
            if !zero {
                result.status = Status::Infeasible;
            }
            break;
        }
        problem = reduced;
        result = solve(&problem, cfg)?;
    }
    Ok((problem, result))
}

/// Value of `bound` on `g` from the requested side.
pub fn solve_bound(bound: Bound, g: &BipartiteGraph, side: Side, cfg: &SolverConfig) -> Result<BoundValue, Error> {
    if bound.vanishes_on_complete() && g.is_complete() {
        return Ok(BoundValue { value: 0.0, method: Method::CompleteBipartite, certified: None });
    }
    let problem = match build(bound, g, side) {
        Ok(p) => p,
        Err(Error::Infeasible(_)) if bound.infeasible_means_zero() => {
            return Ok(BoundValue { value: 0.0, method: Method::InfeasibleAsZero, certified: None });
        }
        Err(e) => return Err(e),
    };
    let (problem, result) = solve_reducing(problem, cfg)?;
    match result.status {
        Status::Optimal => Ok(BoundValue {
            value: match side {
                Side::Primal => result.primal_value,
                Side::Dual => result.dual_value,
            },
            method: Method::Solver,
            certified: Some(Certified { problem, result }),
        }),
        // On the dual side an infeasible standard form means the inequality
        // program is unbounded below.
        Status::Infeasible if bound.infeasible_means_zero() => {
            Ok(BoundValue { value: 0.0, method: Method::InfeasibleAsZero, certified: None })
        }
        s => Err(Error::Solver(format!(
            "{} ({:?}) on {}: status {:?} after {} iterations",
            bound.id(),
            side,
            g,
            s,
            result.iterations
        ))),
    }
}

/// Optimal value of a program built directly in standard form.
pub fn solve_value(problem: SdpProblem, cfg: &SolverConfig) -> Result<(f64, Certified), Error> {
    let c = solve_optimal(problem, cfg)?;
    Ok((c.result.primal_value, c))
}

/// Optimal value of a program produced by [`Lmi::into_problem`], such as
/// [`model_phi`].
pub fn solve_lmi_value(problem: SdpProblem, cfg: &SolverConfig) -> Result<(f64, Certified), Error> {
    let c = solve_optimal(problem, cfg)?;
    Ok((c.result.dual_value, c))
}
