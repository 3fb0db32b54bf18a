//! Facial reduction by a known basis of the face, plus removal of linearly
//! dependent constraints and multipliers.
//!
//! A constraint `<ff', X> = 0` with `X ⪰ 0` forces `Xf = 0`, so every
//! feasible point is `Q W Q'` for an orthonormal basis `Q` of `f^⊥`. Solving
//! over `W` restores a strictly feasible point; on the dual side the same
//! congruence removes the multiplier of `ff'`, whose optimal set is
//! unbounded.

use bibound_sdp::{entry, solve, BlockKind, Entry, SdpProblem, Sense, SolverConfig, Status};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::models::{Lmi, LmiBlock};

/// Relative tolerance for linear dependence and for dropping round-off.
const DEPENDENCE_TOL: f64 = 1e-10;

/// A program turned out to have no feasible point (primal) or an unbounded
/// direction (dual) while removing dependent rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inconsistent;

/// Gram-Schmidt over vectors that each carry a scalar label.
#[derive(Default)]
struct Independent {
    basis: Vec<(DVector<f64>, f64)>,
}

impl Independent {
    /// `Ok(true)` when `v` is new, `Ok(false)` when it is a combination of
    /// earlier vectors with the matching combination of labels.
    fn insert(&mut self, v: DVector<f64>, label: f64) -> Result<bool, Inconsistent> {
        let scale = v.norm().max(label.abs()).max(1.0);
        let (mut r, mut l) = (v, label);
        for _ in 0..2 {
            for (u, b) in &self.basis {
                let c = r.dot(u);
                r.axpy(-c, u, 1.0);
                l -= c * b;
            }
        }
        let nr = r.norm();
        if nr <= DEPENDENCE_TOL * scale {
            return if l.abs() <= 1e3 * DEPENDENCE_TOL * scale { Ok(false) } else { Err(Inconsistent) };
        }
        self.basis.push((r / nr, l / nr));
        Ok(true)
    }
}

fn clean(mut m: DMatrix<f64>) -> DMatrix<f64> {
    let cut = DEPENDENCE_TOL * m.amax();
    m.iter_mut().filter(|v| v.abs() <= cut).for_each(|v| *v = 0.0);
    m
}

fn dense(es: &[Entry], n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for e in es {
        m[(e.i, e.j)] += e.v;
        if e.i != e.j {
            m[(e.j, e.i)] += e.v;
        }
    }
    m
}

fn congruence(q: &DMatrix<f64>, m: &DMatrix<f64>) -> DMatrix<f64> {
    clean(q.transpose() * m * q)
}

fn upper_entries(block: usize, m: &DMatrix<f64>) -> Vec<Entry> {
    let mut out = Vec::new();
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            if m[(i, j)] != 0.0 {
                out.push(entry(block, i, j, m[(i, j)]));
            }
        }
    }
    out
}

/// Substitutes `X = Q W Q'` in a program with a single PSD block and drops
/// constraints that become dependent.
pub fn restrict_primal(p: &SdpProblem, q: &DMatrix<f64>) -> Result<SdpProblem, Inconsistent> {
    assert!(
        p.blocks.len() == 1 && p.blocks[0].kind == BlockKind::Psd && p.blocks[0].dim == q.nrows(),
        "restriction needs one PSD block matching the basis"
    );
    let n = q.nrows();
    let mut out = SdpProblem::new(p.name.clone(), p.sense);
    out.digest = p.digest.clone();
    out.offset = p.offset;
    out.notes = p.notes.clone();
    let b = out.add_block(BlockKind::Psd, q.ncols());
    out.objective = upper_entries(b, &congruence(q, &dense(&p.objective, n)));
    let mut seen = Independent::default();
    for con in &p.constraints {
        let g = congruence(q, &dense(&con.entries, n));
        if seen.insert(DVector::from_column_slice(g.as_slice()), con.rhs)? {
            out.add_constraint(upper_entries(b, &g), con.rhs);
        }
    }
    if q.ncols() < n {
        out.note(format!("restricted to a face of dimension {} in {}", q.ncols(), n));
    }
    Ok(out)
}

impl LmiBlock {
    fn dense_parts(&self, vars: usize) -> (DMatrix<f64>, Vec<DMatrix<f64>>) {
        let n = self.dim;
        let sym = |m: &mut DMatrix<f64>, i: usize, j: usize, v: f64| {
            m[(i, j)] += v;
            if i != j {
                m[(j, i)] += v;
            }
        };
        let mut c = DMatrix::zeros(n, n);
        for (&(i, j), &v) in &self.constant {
            sym(&mut c, i, j, v);
        }
        let mut fs = vec![DMatrix::zeros(n, n); vars];
        for (&(i, j), t) in &self.terms {
            for (&k, &v) in t {
                sym(&mut fs[k], i, j, v);
            }
        }
        (c, fs)
    }
}

impl Lmi {
    /// Replaces `F(y) ⪰ 0` by `Q' F(y) Q ⪰ 0` and drops multipliers whose
    /// restricted matrices are dependent.
    pub fn restrict(self, q: &DMatrix<f64>) -> Result<Lmi, Inconsistent> {
        assert!(self.blocks.len() == 1 && self.blocks[0].dim == q.nrows(), "restriction needs one matching block");
        let vars = self.cost.len();
        let (c, fs) = self.blocks[0].dense_parts(vars);
        let mut seen = Independent::default();
        let mut keep = Vec::new();
        let mut reduced = Vec::new();
        for (k, f) in fs.iter().enumerate() {
            let g = congruence(q, f);
            if seen.insert(DVector::from_column_slice(g.as_slice()), self.cost[k])? {
                keep.push(k);
                reduced.push(g);
            }
        }
        let mut out = Lmi::new(&self.name, keep.len());
        let mut b = LmiBlock::new(q.ncols());
        b.constant_matrix(&congruence(q, &c), 0, 1.0);
        for (new, (&old, g)) in keep.iter().zip(&reduced).enumerate() {
            out.cost[new] = self.cost[old];
            b.term_matrix(new, g, 0, 1.0);
        }
        out.blocks.push(b);
        Ok(out)
    }
}

/// Orthonormal basis of `f^⊥` for a `±1` vector `f`, optionally bordered by
/// a leading unit coordinate.
pub fn sign_face_basis(f: &[f64], border: bool) -> DMatrix<f64> {
    let n = f.len();
    let h = crate::models::helmert_basis(n);
    let off = usize::from(border);
    let mut q = DMatrix::zeros(n + off, n - 1 + off);
    if border {
        q[(0, 0)] = 1.0;
    }
    for i in 0..n {
        for k in 0..n - 1 {
            q[(i + off, k + off)] = f[i] * h[(i, k)];
        }
    }
    q
}

/// Optimal value of the interiority program below which the feasible set is
/// taken to lie in a proper face.
const INTERIOR_CUT: f64 = 1e-7;
/// Eigenvalues of a reducing certificate below this fraction of the largest
/// one span the face.
const FACE_CUT: f64 = 1e-6;

/// Outcome of [`primal_face`].
#[derive(Debug, Clone)]
pub enum Face {
    /// No reduction found; the program has a strictly feasible point or the
    /// search was inconclusive.
    Interior,
    /// Orthonormal basis of a proper face containing every feasible point.
    Reduced(DMatrix<f64>),
    /// A certificate `A'y ⪰ 0` with `b'y < 0`: no feasible point.
    Empty,
}

/// Searches for `y` with `A'y ⪰ 0`, `A'y ≠ 0` and `b'y = 0` for a program with
/// one PSD block. Such `y` confines every feasible `X` to the kernel of
/// `A'y`. The search solves
///
/// ```text
/// max t  s.t.  A(X) + t A(I) = τ b,  Tr X + n t = 1,  X ⪰ 0,  τ >= 0
/// ```
///
/// whose value is positive exactly when a strictly feasible point (or an
/// interior recession direction) exists, and whose dual at value 0 is the
/// certificate.
pub fn primal_face(p: &SdpProblem, cfg: &SolverConfig) -> Face {
    if p.blocks.len() != 1 || p.blocks[0].kind != BlockKind::Psd {
        return Face::Interior;
    }
    let n = p.blocks[0].dim;
    let mut aux = SdpProblem::new(format!("{} interiority", p.name), Sense::Maximize);
    let x = aux.add_block(BlockKind::Psd, n);
    let tau = aux.add_block(BlockKind::Nonneg, 1);
    let t = aux.add_block(BlockKind::Free, 1);
    aux.obj(t, 0, 0, 1.0);
    let mats: Vec<DMatrix<f64>> = p.constraints.iter().map(|c| dense(&c.entries, n)).collect();
    for (c, a) in p.constraints.iter().zip(&mats) {
        let mut row: Vec<Entry> = c.entries.iter().map(|e| entry(x, e.i, e.j, e.v)).collect();
        row.push(entry(t, 0, 0, a.trace()));
        row.push(entry(tau, 0, 0, -c.rhs));
        aux.add_constraint(row, 0.0);
    }
    let mut tr: Vec<Entry> = (0..n).map(|i| entry(x, i, i, 1.0)).collect();
    tr.push(entry(t, 0, 0, n as f64));
    aux.add_constraint(tr, 1.0);
    let Ok(r) = solve(&aux, cfg) else {
        return Face::Interior;
    };
    if r.status != Status::Optimal || r.primal_value > INTERIOR_CUT {
        return Face::Interior;
    }
    let mut z = DMatrix::zeros(n, n);
    let mut by = 0.0;
    for ((c, a), &y) in p.constraints.iter().zip(&mats).zip(&r.y) {
        z += a * y;
        by += c.rhs * y;
    }
    let eig = SymmetricEigen::new(z);
    let top = eig.eigenvalues.max();
    if top <= 0.0 {
        return Face::Interior;
    }
    if by < -FACE_CUT * top {
        return Face::Empty;
    }
    let keep: Vec<usize> = (0..n).filter(|&k| eig.eigenvalues[k] <= FACE_CUT * top).collect();
    if keep.len() == n {
        return Face::Interior;
    }
    Face::Reduced(eig.eigenvectors.select_columns(&keep))
}
