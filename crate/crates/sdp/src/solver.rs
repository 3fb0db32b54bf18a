//! Infeasible-start primal-dual interior-point method.
//!
//! Internally every problem is a maximization
//!
//! ```text
//! max <C,X> + c_u'u   s.t.  A(X) + B u = b,  X in K
//! min b'y             s.t.  A*(y) - S = C,  B'y = c_u,  S in K
//! ```
//!
//! where `K` is a product of PSD cones and a nonnegative orthant and `u` are
//! the free scalars. Search directions use Nesterov-Todd scaling with a
//! Mehrotra predictor-corrector step. Free scalars are handled by an
//! augmented Schur system instead of splitting them into two nonnegatives.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use serde::{Deserialize, Serialize};

use crate::problem::{BlockKind, SdpProblem, Sense};
use crate::SdpError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub max_iter: usize,
    pub step_fraction: f64,
    /// Overrides the heuristic starting multiple of the identity.
    pub initial_scale: Option<f64>,
    /// Largest total PSD dimension accepted.
    pub max_psd_dim: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            gap_tol: 1e-8,
            feas_tol: 1e-8,
            max_iter: 200,
            step_fraction: 0.98,
            initial_scale: None,
            max_psd_dim: 400,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SdpError> {
        let ok = self.gap_tol > 0.0
            && self.feas_tol > 0.0
            && self.max_iter >= 1
            && self.step_fraction > 0.0
            && self.step_fraction < 1.0
            && self.initial_scale.is_none_or(|s| s > 0.0);
        if ok {
            Ok(())
        } else {
            Err(SdpError::Config(format!("{self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Optimal,
    /// The constraints admit no point of the cone; `certificate` holds a Farkas ray.
    Infeasible,
    /// The objective is unbounded along a primal ray.
    Unbounded,
    IterationLimit,
    /// Steps collapsed before the tolerances were met.
    Stalled,
}

/// Value of one block of a primal or dual-slack iterate.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockValue {
    Matrix(DMatrix<f64>),
    Vector(DVector<f64>),
}

impl BlockValue {
    pub fn matrix(&self) -> Option<&DMatrix<f64>> {
        match self {
            BlockValue::Matrix(m) => Some(m),
            BlockValue::Vector(_) => None,
        }
    }

    pub fn vector(&self) -> Option<&DVector<f64>> {
        match self {
            BlockValue::Vector(v) => Some(v),
            BlockValue::Matrix(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: Status,
    /// `<C,X> + offset` at the returned primal point, in the problem's own sense.
    pub primal_value: f64,
    /// Dual objective `b'y + offset`, in the problem's own sense.
    pub dual_value: f64,
    pub gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub iterations: usize,
    /// Primal point, one value per problem block.
    pub x: Vec<BlockValue>,
    /// Dual slack, one value per problem block; free blocks carry the
    /// residual of their dual equality.
    pub s: Vec<BlockValue>,
    /// Constraint multipliers with `C - A*(y) = -S` for maximization and
    /// `C - A*(y) = S` for minimization.
    pub y: Vec<f64>,
    /// Farkas ray for [`Status::Infeasible`]: multipliers with `A*(y)` in the
    /// cone, `B'y = 0` and `b'y < 0`, normalized to `b'y = -1`.
    pub certificate: Option<Vec<f64>>,
}

impl SolveResult {
    pub fn value(&self) -> f64 {
        self.primal_value
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    /// Smallest eigenvalue over all PSD blocks of `x` and `s` and over all
    /// nonnegative blocks.
    pub fn min_cone_eigenvalue(&self, problem: &SdpProblem) -> f64 {
        let mut lo = f64::INFINITY;
        for (k, b) in problem.blocks.iter().enumerate() {
            for v in [&self.x[k], &self.s[k]] {
                match (b.kind, v) {
                    (BlockKind::Psd, BlockValue::Matrix(m)) => {
                        lo = lo.min(min_eigenvalue(m));
                    }
                    (BlockKind::Nonneg, BlockValue::Vector(v)) => {
                        lo = lo.min(v.min());
                    }
                    _ => {}
                }
            }
        }
        lo
    }
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    SymmetricEigen::new(m.clone()).eigenvalues.min()
}

type Sparse = Vec<(usize, usize, f64)>;

struct PsdBlock {
    dim: usize,
    c: DMatrix<f64>,
    /// Constraints touching this block and their coefficient triplets.
    touching: Vec<(usize, Sparse)>,
}

struct Model {
    sign: f64,
    offset: f64,
    m: usize,
    b: DVector<f64>,
    psd: Vec<PsdBlock>,
    /// Problem block index and kind for each internal slot.
    layout: Vec<Slot>,
    c_lp: DVector<f64>,
    lp_cols: Vec<Vec<(usize, f64)>>,
    c_free: DVector<f64>,
    bmat: DMatrix<f64>,
    norm_c: f64,
}

#[derive(Clone, Copy)]
enum Slot {
    Psd(usize),
    Lp(usize, usize),
    Free(usize, usize),
}

fn weight(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        2.0
    }
}

fn sparse_dot(a: &Sparse, x: &DMatrix<f64>) -> f64 {
    a.iter().map(|&(i, j, v)| weight(i, j) * v * x[(i, j)]).sum()
}

fn sparse_to_dense(a: &Sparse, n: usize) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(n, n);
    for &(i, j, v) in a {
        d[(i, j)] += v;
        if i != j {
            d[(j, i)] += v;
        }
    }
    d
}

fn merge(mut entries: Sparse) -> Sparse {
    entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    let mut out: Sparse = Vec::with_capacity(entries.len());
    for (i, j, v) in entries {
        match out.last_mut() {
            Some(last) if last.0 == i && last.1 == j => last.2 += v,
            _ => out.push((i, j, v)),
        }
    }
    out.retain(|e| e.2 != 0.0);
    out
}

impl Model {
    fn build(p: &SdpProblem) -> Model {
        let sign = match p.sense {
            Sense::Maximize => 1.0,
            Sense::Minimize => -1.0,
        };
        let m = p.constraints.len();
        let mut layout = Vec::new();
        let mut psd: Vec<PsdBlock> = Vec::new();
        let (mut n_lp, mut n_free) = (0, 0);
        for b in &p.blocks {
            match b.kind {
                BlockKind::Psd => {
                    layout.push(Slot::Psd(psd.len()));
                    psd.push(PsdBlock {
                        dim: b.dim,
                        c: DMatrix::zeros(b.dim, b.dim),
                        touching: Vec::new(),
                    });
                }
                BlockKind::Nonneg => {
                    layout.push(Slot::Lp(n_lp, b.dim));
                    n_lp += b.dim;
                }
                BlockKind::Free => {
                    layout.push(Slot::Free(n_free, b.dim));
                    n_free += b.dim;
                }
            }
        }
        let mut c_lp: DVector<f64> = DVector::zeros(n_lp);
        let mut c_free: DVector<f64> = DVector::zeros(n_free);
        for e in &p.objective {
            match layout[e.block] {
                Slot::Psd(k) => {
                    psd[k].c[(e.i, e.j)] += sign * e.v;
                    if e.i != e.j {
                        psd[k].c[(e.j, e.i)] += sign * e.v;
                    }
                }
                Slot::Lp(off, _) => c_lp[off + e.i] += sign * e.v,
                Slot::Free(off, _) => c_free[off + e.i] += sign * e.v,
            }
        }
        let mut lp_cols = vec![Vec::new(); n_lp];
        let mut bmat = DMatrix::zeros(m, n_free);
        let mut b = DVector::zeros(m);
        for (ci, con) in p.constraints.iter().enumerate() {
            b[ci] = con.rhs;
            let mut per_block: Vec<Sparse> = vec![Vec::new(); psd.len()];
            let mut lp_acc: Vec<(usize, f64)> = Vec::new();
            for e in &con.entries {
                match layout[e.block] {
                    Slot::Psd(k) => per_block[k].push((e.i, e.j, e.v)),
                    Slot::Lp(off, _) => lp_acc.push((off + e.i, e.v)),
                    Slot::Free(off, _) => bmat[(ci, off + e.i)] += e.v,
                }
            }
            for (k, entries) in per_block.into_iter().enumerate() {
                let merged = merge(entries);
                if !merged.is_empty() {
                    psd[k].touching.push((ci, merged));
                }
            }
            lp_acc.sort_by_key(|a| a.0);
            let mut last: Option<(usize, f64)> = None;
            for (l, v) in lp_acc {
                match last {
                    Some((pl, pv)) if pl == l => last = Some((l, pv + v)),
                    Some((pl, pv)) => {
                        lp_cols[pl].push((ci, pv));
                        last = Some((l, v));
                    }
                    None => last = Some((l, v)),
                }
            }
            if let Some((pl, pv)) = last {
                lp_cols[pl].push((ci, pv));
            }
        }
        let norm_c = (psd.iter().map(|b| b.c.norm_squared()).sum::<f64>()
            + c_lp.norm_squared()
            + c_free.norm_squared())
        .sqrt();
        Model {
            sign,
            offset: p.offset,
            m,
            b,
            psd,
            layout,
            c_lp,
            lp_cols,
            c_free,
            bmat,
            norm_c,
        }
    }

    fn apply_a(&self, x: &[DMatrix<f64>], xl: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.m);
        for (k, blk) in self.psd.iter().enumerate() {
            for (ci, a) in &blk.touching {
                out[*ci] += sparse_dot(a, &x[k]);
            }
        }
        for (l, col) in self.lp_cols.iter().enumerate() {
            for &(ci, v) in col {
                out[ci] += v * xl[l];
            }
        }
        if u.len() > 0 {
            out += &self.bmat * u;
        }
        out
    }

    fn apply_at(&self, y: &DVector<f64>) -> (Vec<DMatrix<f64>>, DVector<f64>, DVector<f64>) {
        let mats = self
            .psd
            .iter()
            .map(|blk| {
                let mut s = DMatrix::zeros(blk.dim, blk.dim);
                for (ci, a) in &blk.touching {
                    let yc = y[*ci];
                    if yc == 0.0 {
                        continue;
                    }
                    for &(i, j, v) in a {
                        s[(i, j)] += yc * v;
                        if i != j {
                            s[(j, i)] += yc * v;
                        }
                    }
                }
                s
            })
            .collect();
        let lp = DVector::from_iterator(
            self.lp_cols.len(),
            self.lp_cols.iter().map(|col| col.iter().map(|&(ci, v)| v * y[ci]).sum()),
        );
        let free = self.bmat.transpose() * y;
        (mats, lp, free)
    }

    fn nu(&self) -> f64 {
        (self.psd.iter().map(|b| b.dim).sum::<usize>() + self.lp_cols.len()) as f64
    }
}

/// Nesterov-Todd scaling of one PSD block: `W = G G'`, `G^{-1} X G^{-T} = G' S G = D`.
struct Scaling {
    g: DMatrix<f64>,
    ginv: DMatrix<f64>,
    d: DVector<f64>,
    w: DMatrix<f64>,
}

fn sym_factor(x: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(x.clone());
    let n = x.nrows();
    let top = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max).max(1e-300);
    let mut f = eig.eigenvectors.clone();
    let mut finv = eig.eigenvectors.transpose();
    for k in 0..n {
        let lam = eig.eigenvalues[k].max(top * 1e-30);
        let r = lam.sqrt();
        for i in 0..n {
            f[(i, k)] *= r;
            finv[(k, i)] /= r;
        }
    }
    (f, finv)
}

fn nt_scaling(x: &DMatrix<f64>, s: &DMatrix<f64>) -> Scaling {
    let (fx, fx_inv) = sym_factor(x);
    let (fs, _) = sym_factor(s);
    let k = fs.transpose() * &fx;
    let svd = SVD::new(k, true, true);
    let v = svd.v_t.expect("svd v").transpose();
    let sig = svd.singular_values.map(|t| t.max(1e-300));
    let n = x.nrows();
    let mut g = &fx * &v;
    let mut ginv = v.transpose() * &fx_inv;
    for k in 0..n {
        let r = sig[k].sqrt();
        for i in 0..n {
            g[(i, k)] /= r;
            ginv[(k, i)] *= r;
        }
    }
    let w = &g * g.transpose();
    Scaling { g, ginv, d: sig, w }
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let a = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = a;
            m[(j, i)] = a;
        }
    }
}

/// Largest step `a <= cap` keeping `x + a dx` in the PSD cone, given `finv`
/// with `finv x finv' = I`.
fn psd_step(finv: &DMatrix<f64>, dx: &DMatrix<f64>) -> f64 {
    let mut t = finv * dx * finv.transpose();
    symmetrize(&mut t);
    let lo = min_eigenvalue(&t);
    if lo < 0.0 {
        -1.0 / lo
    } else {
        f64::INFINITY
    }
}

fn lp_step(x: &DVector<f64>, dx: &DVector<f64>) -> f64 {
    let mut a = f64::INFINITY;
    for i in 0..x.len() {
        if dx[i] < 0.0 {
            a = a.min(-x[i] / dx[i]);
        }
    }
    a
}

struct Iterate {
    x: Vec<DMatrix<f64>>,
    s: Vec<DMatrix<f64>>,
    xl: DVector<f64>,
    sl: DVector<f64>,
    u: DVector<f64>,
    y: DVector<f64>,
}

#[derive(Clone)]
struct Direction {
    dx: Vec<DMatrix<f64>>,
    ds: Vec<DMatrix<f64>>,
    dxl: DVector<f64>,
    dsl: DVector<f64>,
    du: DVector<f64>,
    dy: DVector<f64>,
}

/// Factorized Newton system `[M -B; B' 0]`.
struct Newton {
    chol: Option<nalgebra::Cholesky<f64, nalgebra::Dyn>>,
    lu: Option<nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>>,
    minv_b: DMatrix<f64>,
    schur_lu: Option<nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>>,
}

impl Newton {
    fn new(mut mmat: DMatrix<f64>, bmat: &DMatrix<f64>) -> Option<Newton> {
        let m = mmat.nrows();
        let scale = (0..m).map(|i| mmat[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
        let mut chol = nalgebra::Cholesky::new(mmat.clone());
        if chol.is_none() {
            for i in 0..m {
                mmat[(i, i)] += 1e-13 * scale;
            }
            chol = nalgebra::Cholesky::new(mmat.clone());
        }
        let lu = if chol.is_none() { Some(mmat.clone().lu()) } else { None };
        let mut nt = Newton {
            chol,
            lu,
            minv_b: DMatrix::zeros(m, bmat.ncols()),
            schur_lu: None,
        };
        if bmat.ncols() > 0 {
            let minv_b = nt.solve_m(bmat.clone())?;
            let schur = bmat.transpose() * &minv_b;
            nt.schur_lu = Some(schur.lu());
            nt.minv_b = minv_b;
        }
        Some(nt)
    }

    fn solve_m(&self, rhs: DMatrix<f64>) -> Option<DMatrix<f64>> {
        if let Some(c) = &self.chol {
            Some(c.solve(&rhs))
        } else {
            self.lu.as_ref()?.solve(&rhs)
        }
    }

    /// Solves `M dy - B du = h`, `B' dy = ru`.
    fn solve(&self, h: &DVector<f64>, ru: &DVector<f64>, bmat: &DMatrix<f64>) -> Option<(DVector<f64>, DVector<f64>)> {
        let hm = DMatrix::from_column_slice(h.len(), 1, h.as_slice());
        let minv_h = DVector::from_column_slice(self.solve_m(hm)?.as_slice());
        if bmat.ncols() == 0 {
            return Some((minv_h, DVector::zeros(0)));
        }
        let rhs = ru - bmat.transpose() * &minv_h;
        let du = self.schur_lu.as_ref()?.solve(&rhs)?;
        let dy = minv_h + &self.minv_b * &du;
        Some((dy, du))
    }
}

pub fn solve(problem: &SdpProblem, config: &SolverConfig) -> Result<SolveResult, SdpError> {
    config.validate()?;
    problem.validate()?;
    let dim = problem.psd_dimension();
    if dim > config.max_psd_dim {
        return Err(SdpError::DimensionCap { dim, cap: config.max_psd_dim });
    }
    let model = Model::build(problem);
    Ok(run(&model, config))
}

fn initial_point(model: &Model, config: &SolverConfig) -> Iterate {
    let b_norms: Vec<f64> = model.b.iter().map(|b| 1.0 + b.abs()).collect();
    let x = model
        .psd
        .iter()
        .map(|blk| {
            let n = blk.dim as f64;
            let (xi, eta) = match config.initial_scale {
                Some(s) => (s, s),
                None => {
                    let mut xi = 10f64.max(n.sqrt());
                    let mut eta = 10f64.max(n.sqrt()).max(blk.c.norm());
                    for (ci, a) in &blk.touching {
                        let an = sparse_to_dense(a, blk.dim).norm();
                        xi = xi.max(n * b_norms[*ci] / (1.0 + an));
                        eta = eta.max(an);
                    }
                    (xi, eta)
                }
            };
            (DMatrix::identity(blk.dim, blk.dim) * xi, DMatrix::identity(blk.dim, blk.dim) * eta)
        })
        .collect::<Vec<_>>();
    let n_lp = model.lp_cols.len();
    let (xl0, sl0) = match config.initial_scale {
        Some(s) => (s, s),
        None => {
            let mut xi: f64 = 10.0;
            let mut eta: f64 = 10f64.max(model.c_lp.amax());
            for col in &model.lp_cols {
                for &(ci, v) in col {
                    xi = xi.max(b_norms[ci] / (1.0 + v.abs()));
                    eta = eta.max(v.abs());
                }
            }
            (xi, eta)
        }
    };
    Iterate {
        s: x.iter().map(|p| p.1.clone()).collect(),
        x: x.into_iter().map(|p| p.0).collect(),
        xl: DVector::from_element(n_lp, xl0),
        sl: DVector::from_element(n_lp, sl0),
        u: DVector::zeros(model.c_free.len()),
        y: DVector::zeros(model.m),
    }
}

fn inner(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p.dot(q)).sum()
}

fn schur(model: &Model, scal: &[Scaling], wl: &DVector<f64>) -> DMatrix<f64> {
    let m = model.m;
    let mut mm = DMatrix::zeros(m, m);
    for (k, blk) in model.psd.iter().enumerate() {
        let w = &scal[k].w;
        let n = blk.dim;
        let dense: Vec<bool> = blk.touching.iter().map(|(_, a)| a.len() > n).collect();
        for (tj, (cj, aj)) in blk.touching.iter().enumerate() {
            if dense[tj] {
                let q = w * sparse_to_dense(aj, n) * w;
                for (ti, (ci, ai)) in blk.touching.iter().enumerate() {
                    let val = sparse_dot(ai, &q);
                    mm[(*ci, *cj)] += val;
                    if !dense[ti] {
                        mm[(*cj, *ci)] += val;
                    }
                }
            } else {
                for (ti, (ci, ai)) in blk.touching.iter().enumerate().take(tj + 1) {
                    if dense[ti] {
                        continue;
                    }
                    let mut val = 0.0;
                    for &(a, b, v) in ai {
                        for &(c, d, t) in aj {
                            val += 0.5
                                * weight(a, b)
                                * weight(c, d)
                                * v
                                * t
                                * (w[(a, c)] * w[(b, d)] + w[(a, d)] * w[(b, c)]);
                        }
                    }
                    mm[(*ci, *cj)] += val;
                    if ti != tj {
                        mm[(*cj, *ci)] += val;
                    }
                }
            }
        }
    }
    for (l, col) in model.lp_cols.iter().enumerate() {
        for &(ci, vi) in col {
            for &(cj, vj) in col {
                mm[(ci, cj)] += vi * vj * wl[l];
            }
        }
    }
    mm
}

/// `A(W A'(y) W)` plus the linear-block analogue, without forming the matrix.
fn apply_schur(model: &Model, scal: &[Scaling], wl: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
    let (aty, atyl, _) = model.apply_at(y);
    let xs: Vec<DMatrix<f64>> = aty.iter().zip(scal).map(|(a, sc)| &sc.w * a * &sc.w).collect();
    model.apply_a(&xs, &wl.component_mul(&atyl), &DVector::zeros(0))
}

struct Residuals {
    rp: DVector<f64>,
    rd: Vec<DMatrix<f64>>,
    rdl: DVector<f64>,
    ru: DVector<f64>,
    pobj: f64,
    dobj: f64,
    pinf: f64,
    dinf: f64,
}

fn residuals(model: &Model, it: &Iterate) -> Residuals {
    let rp = &model.b - model.apply_a(&it.x, &it.xl, &it.u);
    let (aty, atyl, atyu) = model.apply_at(&it.y);
    let rd: Vec<DMatrix<f64>> = model
        .psd
        .iter()
        .enumerate()
        .map(|(k, blk)| &blk.c + &it.s[k] - &aty[k])
        .collect();
    let rdl = &model.c_lp + &it.sl - atyl;
    let ru = &model.c_free - atyu;
    let pobj = model.psd.iter().zip(&it.x).map(|(b, x)| b.c.dot(x)).sum::<f64>()
        + model.c_lp.dot(&it.xl)
        + model.c_free.dot(&it.u);
    let dobj = model.b.dot(&it.y);
    let pinf = rp.norm() / (1.0 + model.b.norm());
    let dnorm = (rd.iter().map(|r| r.norm_squared()).sum::<f64>()
        + rdl.norm_squared()
        + ru.norm_squared())
    .sqrt();
    let dinf = dnorm / (1.0 + model.norm_c);
    Residuals { rp, rd, rdl, ru, pobj, dobj, pinf, dinf }
}

/// Checks whether the dual iterate has turned into a Farkas ray proving
/// primal infeasibility.
fn farkas_ray(model: &Model, y: &DVector<f64>, tol: f64) -> Option<DVector<f64>> {
    let by = model.b.dot(y);
    if by >= 0.0 {
        return None;
    }
    let yhat = y / (-by);
    let (aty, atyl, atyu) = model.apply_at(&yhat);
    let scale = 1.0 + yhat.amax();
    if atyu.amax() > tol * scale {
        return None;
    }
    if atyl.len() > 0 && atyl.min() < -tol * scale {
        return None;
    }
    for m in &aty {
        if min_eigenvalue(m) < -tol * scale {
            return None;
        }
    }
    Some(yhat)
}

/// Checks whether the primal iterate has turned into an improving ray.
fn improving_ray(model: &Model, it: &Iterate, pobj: f64, tol: f64) -> bool {
    if pobj <= 0.0 {
        return false;
    }
    let xs: Vec<DMatrix<f64>> = it.x.iter().map(|x| x / pobj).collect();
    let r = model.apply_a(&xs, &(&it.xl / pobj), &(&it.u / pobj));
    let size = xs.iter().map(|x| x.norm()).sum::<f64>() + it.xl.norm() / pobj + it.u.norm() / pobj;
    r.norm() <= tol * (1.0 + size) && pobj > 1e8 * (1.0 + model.b.norm())
}

fn run(model: &Model, config: &SolverConfig) -> SolveResult {
    let mut it = initial_point(model, config);
    let nu = model.nu().max(1.0);
    let mut status = Status::IterationLimit;
    let mut iterations = 0;
    let mut certificate = None;
    let mut stall = 0;
    let mut res = residuals(model, &it);
    let mut gram: Option<Gram> = None;
    for iter in 0..config.max_iter {
        iterations = iter;
        let gap = (res.pobj - res.dobj).abs();
        let reported = model.sign * res.pobj + model.offset;
        let gap_ok = gap <= config.gap_tol * (1.0 + reported.abs());
        if res.pinf <= config.feas_tol && res.dinf <= config.feas_tol && gap_ok {
            status = Status::Optimal;
            break;
        }
        if gap_ok && res.pinf.max(res.dinf) <= POLISH_RANGE * config.feas_tol {
            let gram = gram.get_or_insert_with(|| Gram::new(model));
            if let Some((p, r)) = polish(model, gram, &it, config) {
                it = p;
                res = r;
                status = Status::Optimal;
                break;
            }
        }
        if let Some(ray) = farkas_ray(model, &it.y, config.feas_tol) {
            if res.dobj < -1e8 * (1.0 + model.norm_c) {
                certificate = Some(ray.iter().map(|v| model.sign * v).collect());
                status = Status::Infeasible;
                break;
            }
        }
        if improving_ray(model, &it, res.pobj, config.feas_tol) {
            status = Status::Unbounded;
            break;
        }
        let mu = (inner(&it.x, &it.s) + it.xl.dot(&it.sl)) / nu;

        let scal: Vec<Scaling> = it.x.iter().zip(&it.s).map(|(x, s)| nt_scaling(x, s)).collect();
        let wl = it.xl.component_div(&it.sl);
        let mmat = schur(model, &scal, &wl);
        let Some(newton) = Newton::new(mmat, &model.bmat) else {
            status = Status::Stalled;
            break;
        };

        // Predictor: affine-scaling direction.
        let t_aff: Vec<DMatrix<f64>> = it.x.iter().map(|x| -x).collect();
        let tl_aff = -&it.xl;
        let Some(aff) = direction(model, &res, &scal, &wl, &newton, &t_aff, &tl_aff) else {
            status = Status::Stalled;
            break;
        };
        let (ap, ad) = step_lengths(&it, &scal, &aff, 1.0);
        let mut xs_aff = 0.0;
        for k in 0..it.x.len() {
            let xa = &it.x[k] + &aff.dx[k] * ap;
            let sa = &it.s[k] + &aff.ds[k] * ad;
            xs_aff += xa.dot(&sa);
        }
        xs_aff += (&it.xl + &aff.dxl * ap).dot(&(&it.sl + &aff.dsl * ad));
        let ratio = (xs_aff / (mu * nu)).clamp(0.0, 1.0);
        let sigma = ratio.powi(3);

        // Corrector with second-order term.
        let mut t_cor = Vec::with_capacity(it.x.len());
        for (k, sc) in scal.iter().enumerate() {
            let n = sc.d.len();
            let dxt = &sc.ginv * &aff.dx[k] * sc.ginv.transpose();
            let dst = sc.g.transpose() * &aff.ds[k] * &sc.g;
            let mut prod = &dxt * &dst;
            symmetrize(&mut prod);
            let mut r = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    let mut v = -prod[(i, j)];
                    if i == j {
                        v += sigma * mu - sc.d[i] * sc.d[i];
                    }
                    r[(i, j)] = 2.0 * v / (sc.d[i] + sc.d[j]);
                }
            }
            let mut t = &sc.g * r * sc.g.transpose();
            symmetrize(&mut t);
            t_cor.push(t);
        }
        let tl_cor = DVector::from_iterator(
            it.xl.len(),
            (0..it.xl.len()).map(|l| {
                (sigma * mu - aff.dxl[l] * aff.dsl[l]) / it.sl[l] - it.xl[l]
            }),
        );
        let Some(mut dir) = direction(model, &res, &scal, &wl, &newton, &t_cor, &tl_cor) else {
            status = Status::Stalled;
            break;
        };
        let (mut ap, ad) = step_lengths(&it, &scal, &dir, config.step_fraction);
        if res.pinf <= POLISH_RANGE * config.feas_tol {
            // Near the boundary the scaled primal step drifts off the
            // linearised constraints; pull it back along the Euclidean
            // normal unless that cuts the step short.
            let gram = gram.get_or_insert_with(|| Gram::new(model));
            let e = &res.rp - model.apply_a(&dir.dx, &dir.dxl, &dir.du);
            let (cx, cxl, cu) = model.apply_at(&gram.solve(&e));
            let mut fixed = dir.clone();
            for (d, c) in fixed.dx.iter_mut().zip(&cx) {
                *d += c;
                symmetrize(d);
            }
            fixed.dxl += cxl;
            fixed.du += cu;
            let (fp, _) = step_lengths(&it, &scal, &fixed, config.step_fraction);
            if fp >= PROJECTED_STEP * ap {
                dir = fixed;
                ap = fp;
            }
        }
        for k in 0..it.x.len() {
            it.x[k] += &dir.dx[k] * ap;
            it.s[k] += &dir.ds[k] * ad;
            symmetrize(&mut it.x[k]);
            symmetrize(&mut it.s[k]);
        }
        it.xl += &dir.dxl * ap;
        it.u += &dir.du * ap;
        it.sl += &dir.dsl * ad;
        it.y += &dir.dy * ad;
        iterations = iter + 1;
        res = residuals(model, &it);
        if ap.max(ad) < 1e-10 {
            stall += 1;
            if stall >= 3 {
                status = Status::Stalled;
                break;
            }
        } else {
            stall = 0;
        }
    }
    if status == Status::IterationLimit && iterations < config.max_iter {
        iterations = config.max_iter;
    }
    finish(model, it, res, status, iterations, certificate)
}

/// Polishing is attempted once the gap has converged and the residuals are
/// within this factor of the tolerance.
const POLISH_RANGE: f64 = 1e3;
const POLISH_ROUNDS: usize = 20;
/// A projected primal step is taken if it is at least this fraction of the
/// unprojected one.
const PROJECTED_STEP: f64 = 0.9;

/// Pseudo-inverse of `A A'`, the Euclidean Gram matrix of the constraints.
struct Gram {
    vectors: DMatrix<f64>,
    inv: DVector<f64>,
}

impl Gram {
    fn new(model: &Model) -> Gram {
        let m = model.m;
        let mut g = DMatrix::zeros(m, m);
        let mut e = DVector::zeros(m);
        for j in 0..m {
            e[j] = 1.0;
            let (mats, lp, free) = model.apply_at(&e);
            g.set_column(j, &model.apply_a(&mats, &lp, &free));
            e[j] = 0.0;
        }
        let eig = SymmetricEigen::new(g);
        let top = eig.eigenvalues.amax();
        let inv = eig.eigenvalues.map(|v| if v > 1e-12 * top { 1.0 / v } else { 0.0 });
        Gram { vectors: eig.eigenvectors, inv }
    }

    fn solve(&self, r: &DVector<f64>) -> DVector<f64> {
        let t = (self.vectors.transpose() * r).component_mul(&self.inv);
        &self.vectors * t
    }
}

fn clip_psd(m: &mut DMatrix<f64>) {
    if m.nrows() == 0 {
        return;
    }
    let eig = SymmetricEigen::new(m.clone());
    let d = eig.eigenvalues.map(|v| v.max(0.0));
    *m = &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.transpose();
    symmetrize(m);
}

/// Final clean-up near the optimum: alternately projects the primal point
/// onto the affine constraint set along `A'(AA')^+ rp` and onto the cone,
/// and recomputes the dual slack as `A'y - C`. Interior-point steps on
/// degenerate programs stall with residuals just above tolerance because
/// rounding in the scaled directions grows like `1/mu`. The polished point
/// is accepted only if it passes every test of an optimal status, with cone
/// membership checked to `-feas_tol` on the smallest eigenvalue.
fn polish(model: &Model, gram: &Gram, it: &Iterate, config: &SolverConfig) -> Option<(Iterate, Residuals)> {
    let tol = config.feas_tol;
    let (aty, atyl, _) = model.apply_at(&it.y);
    let mut p = Iterate {
        x: it.x.clone(),
        s: aty.iter().zip(&model.psd).map(|(a, b)| a - &b.c).collect(),
        xl: it.xl.clone(),
        sl: atyl - &model.c_lp,
        u: it.u.clone(),
        y: it.y.clone(),
    };
    for m in &mut p.s {
        symmetrize(m);
    }
    // Alternate between the affine set and the cone. Either end of a round
    // may pass: the affine end with a slightly negative eigenvalue, or the
    // cone end with a small residual.
    let accept = |p: &Iterate| {
        let cone_ok = p.x.iter().chain(&p.s).all(|m| m.nrows() == 0 || min_eigenvalue(m) >= -tol)
            && p.xl.iter().chain(p.sl.iter()).all(|&v| v >= -tol);
        if !cone_ok {
            return None;
        }
        let r = residuals(model, p);
        let reported = model.sign * r.pobj + model.offset;
        let ok = r.pinf <= tol && r.dinf <= tol && (r.pobj - r.dobj).abs() <= config.gap_tol * (1.0 + reported.abs());
        ok.then_some(r)
    };
    for _ in 0..POLISH_ROUNDS {
        let res = residuals(model, &p);
        let v = gram.solve(&res.rp);
        let (dx, dxl, du) = model.apply_at(&v);
        for (x, d) in p.x.iter_mut().zip(&dx) {
            *x += d;
            symmetrize(x);
        }
        p.xl += dxl;
        p.u += du;
        if let Some(r) = accept(&p) {
            return Some((p, r));
        }
        for m in &mut p.x {
            clip_psd(m);
        }
        p.xl.iter_mut().for_each(|v| *v = v.max(0.0));
        if let Some(r) = accept(&p) {
            return Some((p, r));
        }
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn direction(
    model: &Model,
    res: &Residuals,
    scal: &[Scaling],
    wl: &DVector<f64>,
    newton: &Newton,
    t: &[DMatrix<f64>],
    tl: &DVector<f64>,
) -> Option<Direction> {
    // h = A(T) + A(W Rd W) - rp
    let mut h = -&res.rp;
    for (k, blk) in model.psd.iter().enumerate() {
        let w = &scal[k].w;
        let q = &t[k] + w * &res.rd[k] * w;
        for (ci, a) in &blk.touching {
            h[*ci] += sparse_dot(a, &q);
        }
    }
    for (l, col) in model.lp_cols.iter().enumerate() {
        let q = tl[l] + wl[l] * res.rdl[l];
        for &(ci, v) in col {
            h[ci] += v * q;
        }
    }
    let (mut dy, mut du) = newton.solve(&h, &res.ru, &model.bmat)?;
    // Refine against the operator itself; the assembled Schur matrix loses
    // accuracy as the iterates approach the boundary.
    for _ in 0..2 {
        let mut e1 = &h - apply_schur(model, scal, wl, &dy);
        if du.len() > 0 {
            e1 += &model.bmat * &du;
        }
        let e2 = &res.ru - model.bmat.transpose() * &dy;
        let (cy, cu) = newton.solve(&e1, &e2, &model.bmat)?;
        dy += cy;
        du += cu;
    }
    if dy.iter().chain(du.iter()).any(|v| !v.is_finite()) {
        return None;
    }
    let (aty, atyl, _) = model.apply_at(&dy);
    let mut dx = Vec::with_capacity(t.len());
    let mut ds = Vec::with_capacity(t.len());
    for k in 0..t.len() {
        let mut dsk = &aty[k] - &res.rd[k];
        symmetrize(&mut dsk);
        let w = &scal[k].w;
        let mut dxk = &t[k] - w * &dsk * w;
        symmetrize(&mut dxk);
        dx.push(dxk);
        ds.push(dsk);
    }
    let dsl = atyl - &res.rdl;
    let dxl = tl - wl.component_mul(&dsl);
    Some(Direction { dx, ds, dxl, dsl, du, dy })
}

fn step_lengths(it: &Iterate, scal: &[Scaling], dir: &Direction, frac: f64) -> (f64, f64) {
    let mut ap = f64::INFINITY;
    let mut ad = f64::INFINITY;
    for (k, sc) in scal.iter().enumerate() {
        // Factor X and S directly; the scaling factors X = F F' with
        // F = G D^{1/2} and S = H H' with H = G^{-T} D^{1/2} lose accuracy
        // once the iterates are badly conditioned.
        let dinv_sqrt = sc.d.map(|v| 1.0 / v.sqrt());
        let fx_inv = inverse_factor(&it.x[k]).unwrap_or_else(|| DMatrix::from_diagonal(&dinv_sqrt) * &sc.ginv);
        let fs_inv = inverse_factor(&it.s[k]).unwrap_or_else(|| DMatrix::from_diagonal(&dinv_sqrt) * sc.g.transpose());
        ap = ap.min(psd_step(&fx_inv, &dir.dx[k]));
        ad = ad.min(psd_step(&fs_inv, &dir.ds[k]));
    }
    ap = ap.min(lp_step(&it.xl, &dir.dxl));
    ad = ad.min(lp_step(&it.sl, &dir.dsl));
    ((frac * ap).min(1.0), (frac * ad).min(1.0))
}

/// `L^{-1}` for the Cholesky factor `L` of a positive definite `m`.
fn inverse_factor(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let l = m.clone().cholesky()?.unpack();
    l.solve_lower_triangular(&DMatrix::identity(m.nrows(), m.nrows()))
}

fn finish(
    model: &Model,
    it: Iterate,
    res: Residuals,
    status: Status,
    iterations: usize,
    certificate: Option<Vec<f64>>,
) -> SolveResult {
    let sign = model.sign;
    let mut x = Vec::with_capacity(model.layout.len());
    let mut s = Vec::with_capacity(model.layout.len());
    for slot in &model.layout {
        match *slot {
            Slot::Psd(k) => {
                x.push(BlockValue::Matrix(it.x[k].clone()));
                s.push(BlockValue::Matrix(it.s[k].clone()));
            }
            Slot::Lp(off, n) => {
                x.push(BlockValue::Vector(it.xl.rows(off, n).into_owned()));
                s.push(BlockValue::Vector(it.sl.rows(off, n).into_owned()));
            }
            Slot::Free(off, n) => {
                x.push(BlockValue::Vector(it.u.rows(off, n).into_owned()));
                s.push(BlockValue::Vector(res.ru.rows(off, n).map(|v| -sign * v)));
            }
        }
    }
    let primal_value = sign * res.pobj + model.offset;
    let dual_value = sign * res.dobj + model.offset;
    SolveResult {
        status,
        primal_value,
        dual_value,
        gap: (primal_value - dual_value).abs(),
        primal_infeasibility: res.pinf,
        dual_infeasibility: res.dinf,
        iterations,
        x,
        s,
        y: it.y.iter().map(|v| sign * v).collect(),
        certificate,
    }
}
