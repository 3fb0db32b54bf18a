//! Eigenvalues and closed-form spectral bounds.
//!
//! Closed forms assume regular input and refuse anything else. Bipartite
//! spectra come from the singular values of the biadjacency matrix so the
//! `±` symmetry is exact.

use bibound_sdp::SolverConfig;
use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::graph::{extended_bipartite_double, BipartiteGraph, Graph};
use crate::models::{model_phi_prime, solve_lmi_value, Certified};
use crate::Error;

/// Tolerance for predicates on eigenvalue expressions.
pub const PREDICATE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub n: usize,
    pub regular: Option<usize>,
    /// Adjacency eigenvalues, descending.
    pub adjacency: Vec<f64>,
    /// Laplacian eigenvalues, ascending.
    pub laplacian: Vec<f64>,
    /// Singular values of the biadjacency matrix, descending (bipartite only).
    pub singular_values: Option<Vec<f64>>,
    pub lambda2: f64,
}

fn eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

pub fn spectral_summary(g: &Graph) -> SpectralSummary {
    let mut adjacency = eigenvalues(g.adjacency());
    adjacency.reverse();
    SpectralSummary {
        n: g.n(),
        regular: g.regular_degree(),
        lambda2: adjacency.get(1).copied().unwrap_or(0.0),
        adjacency,
        laplacian: eigenvalues(g.laplacian()),
        singular_values: None,
    }
}

/// Singular values of `M_G`, descending. Complete bipartite graphs get
/// exact zeros after the first.
pub fn singular_values(g: &BipartiteGraph) -> Vec<f64> {
    let k = g.n1().min(g.n2());
    if k == 0 {
        return Vec::new();
    }
    if g.is_complete() {
        let mut v = vec![0.0; k];
        v[0] = ((g.n1() * g.n2()) as f64).sqrt();
        return v;
    }
    let mut s: Vec<f64> = g.biadjacency().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn bipartite_spectral_summary(g: &BipartiteGraph) -> SpectralSummary {
    let s = singular_values(g);
    let zeros = g.n() - 2 * s.len();
    let mut adjacency: Vec<f64> = s.clone();
    adjacency.extend(std::iter::repeat_n(0.0, zeros));
    adjacency.extend(s.iter().rev().map(|x| -x));
    SpectralSummary {
        n: g.n(),
        regular: g.regular_degree(),
        lambda2: adjacency.get(1).copied().unwrap_or(0.0),
        adjacency,
        laplacian: eigenvalues(g.flatten().laplacian()),
        singular_values: Some(s),
    }
}

/// `(n, r, λ2)` for a regular bipartite graph with equal parts.
fn regular_balanced(g: &BipartiteGraph) -> Result<(f64, f64, f64), Error> {
    if !g.is_balanced() {
        return Err(Error::NotApplicable(format!("parts of size {} and {} differ", g.n1(), g.n2())));
    }
    let r = g
        .regular_degree()
        .ok_or_else(|| Error::NotApplicable("bipartite graph is not regular".into()))?;
    let s = singular_values(g);
    Ok((g.n1() as f64, r as f64, s.get(1).copied().unwrap_or(0.0)))
}

/// `ĥ(G) = (n/2) λ2 / (r + λ2)` for regular `G` with parts of size `n`.
/// The edgeless graph gives `0/0`; its program value `n/2` is returned.
pub fn h_hat(g: &BipartiteGraph) -> Result<f64, Error> {
    let (n, r, l2) = regular_balanced(g)?;
    if r == 0.0 {
        return Ok(n / 2.0);
    }
    Ok(n / 2.0 * l2 / (r + l2))
}

/// The weaker bound `(n/r) λ2` that `ĥ` sharpens.
pub fn vallentin_bound(g: &BipartiteGraph) -> Result<f64, Error> {
    let (n, r, l2) = regular_balanced(g)?;
    if r == 0.0 {
        return Err(Error::NotApplicable("degree 0".into()));
    }
    Ok(n / r * l2)
}

/// Two-regime closed form for `ĝ`; the edgeless graph gives `n²`.
pub fn g_hat(g: &BipartiteGraph) -> Result<f64, Error> {
    let (n, r, l2) = regular_balanced(g)?;
    Ok(g_hat_formula(n, r, l2))
}

fn g_hat_formula(n: f64, r: f64, l2: f64) -> f64 {
    if r == 0.0 {
        n * n
    } else if r <= 3.0 * l2 {
        n * n * l2 * l2 / ((l2 + r) * (l2 + r))
    } else {
        n * n * l2 / (8.0 * (r - l2))
    }
}

/// Hoffman's ratio bound `n(-λ_n)/(r - λ_n)`; `n` when there are no edges.
pub fn hoffman_bound(g: &Graph) -> Result<f64, Error> {
    let r = g
        .regular_degree()
        .ok_or_else(|| Error::NotApplicable("graph is not regular".into()))?;
    let n = g.n() as f64;
    if r == 0 {
        return Ok(n);
    }
    let s = spectral_summary(g);
    let ln = *s.adjacency.last().expect("nonempty");
    Ok(n * (-ln) / (r as f64 - ln))
}

/// `φ_H(G) = (n/2)(1 - μ2/μn)` from Laplacian eigenvalues.
pub fn haemers_phi_h(g: &Graph) -> Result<f64, Error> {
    if g.n() < 2 {
        return Err(Error::NotApplicable("at least two vertices required".into()));
    }
    if g.m() == 0 {
        return Err(Error::NotApplicable("edgeless graph has largest Laplacian eigenvalue 0".into()));
    }
    let l = spectral_summary(g).laplacian;
    let (mu2, mun) = (l[1].max(0.0), l[l.len() - 1]);
    Ok(g.n() as f64 / 2.0 * (1.0 - mu2 / mun))
}

/// Projected surrogate of Haemers' `φ'(G)` solved as a semidefinite program:
/// `nλ/(1+λ)` with `λ` the smallest possible spectral radius on `e^⊥`.
pub fn haemers_phi_prime(g: &Graph, cfg: &SolverConfig) -> Result<(f64, Certified), Error> {
    if g.n() < 2 {
        return Err(Error::NotApplicable("at least two vertices required".into()));
    }
    let (t, cert) = solve_lmi_value(model_phi_prime(g), cfg)?;
    let t = t.max(0.0);
    Ok((g.n() as f64 * t / (1.0 + t), cert))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoubleBoundComparison {
    pub half_phi_h: f64,
    /// `ĥ(B0(G))` from the eigenvalues of `G`.
    pub h_hat_extended_double: f64,
    /// Equality predicate `λ2 = r` or `λ2 + λn + 2 = 0`.
    pub equality_predicted: bool,
    pub hoffman: f64,
    /// `2 ĥ(B(G)) = n λ2(B(G)) / (r + λ2(B(G)))`.
    pub twice_h_hat_double: f64,
}

pub fn compare_double_bounds(g: &Graph) -> Result<DoubleBoundComparison, Error> {
    let r = g
        .regular_degree()
        .ok_or_else(|| Error::NotApplicable("graph is not regular".into()))? as f64;
    let n = g.n() as f64;
    let s = spectral_summary(g);
    let l2 = s.lambda2;
    let ln = *s.adjacency.last().expect("nonempty");
    let mu = (l2 + 1.0).max(-ln - 1.0);
    let half_phi_h = if g.m() == 0 { 0.0 } else { haemers_phi_h(g)? / 2.0 };
    let h_hat_extended_double = n / 2.0 * mu / (mu + r + 1.0);
    let equality_predicted = (l2 - r).abs() <= PREDICATE_TOL || (l2 + ln + 2.0).abs() <= PREDICATE_TOL;
    let lb = l2.max(-ln);
    let twice_h_hat_double = if r == 0.0 { n } else { n * lb / (r + lb) };
    Ok(DoubleBoundComparison {
        half_phi_h,
        h_hat_extended_double,
        equality_predicted,
        hoffman: hoffman_bound(g)?,
        twice_h_hat_double,
    })
}

/// Cross-check of [`compare_double_bounds`] via the spectrum of `B0(G)`.
pub fn h_hat_extended_double_direct(g: &Graph) -> Result<f64, Error> {
    h_hat(&extended_bipartite_double(g))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplementComparison {
    /// `ĥ` of the bipartite complement.
    pub h_hat_complement: f64,
    /// `½ φ_H` of the full complement of the flattened graph.
    pub half_phi_h_complement: f64,
    /// `λ2 < r < n`, where the inequality between the two is strict.
    pub strict_predicted: bool,
    /// `4 ĥ(Ḡᵇ)²` and `φ_H(Ḡ)²`, the squared forms compared against `g`.
    pub four_h_hat_sq: f64,
    pub phi_h_sq: f64,
}

pub fn bipartite_complement_bounds(g: &BipartiteGraph) -> Result<ComplementComparison, Error> {
    let (n, r, l2) = regular_balanced(g)?;
    // The bipartite complement is (n - r)-regular with the same second
    // singular value.
    let h_hat_complement = if r == n { n / 2.0 } else { n / 2.0 * l2 / (l2 + n - r) };
    let half_phi_h_complement = n / 2.0 * (l2 + r) / (2.0 * n - r + l2);
    Ok(ComplementComparison {
        h_hat_complement,
        half_phi_h_complement,
        strict_predicted: l2 < r - PREDICATE_TOL && r < n,
        four_h_hat_sq: 4.0 * h_hat_complement * h_hat_complement,
        phi_h_sq: 4.0 * half_phi_h_complement * half_phi_h_complement,
    })
}

/// `2nλ2/(r + λ2)`, which is `4ĥ(G)`.
pub fn theta_bal_hat_closed_form(g: &BipartiteGraph) -> Result<f64, Error> {
    let (n, r, l2) = regular_balanced(g)?;
    if r == 0.0 {
        return Ok(2.0 * n);
    }
    Ok(2.0 * n * l2 / (r + l2))
}
