//! Named bound reports with inequality validation.

use std::collections::BTreeMap;
use std::time::Instant;

use bibound_sdp::SolverConfig;
use serde::{Deserialize, Serialize};

use crate::exact::{self, exact_bipartite_parameters, verify_relation_chain};
use crate::graph::{BipartiteGraph, Graph};
use crate::models::{self, model_phi, solve_bound, solve_lmi_value, solve_value, Bound, Certified, Side, ThetaForm};
use crate::spectral;
use crate::{to_f64, Error, Rational};

/// Every identifier a report can carry, in display order.
pub const ALL_IDS: [&str; 26] = [
    "alpha",
    "alpha_bal",
    "g",
    "h",
    "g_bal",
    "h_bal",
    "theta",
    "las1",
    "h1",
    "g1",
    "h1_prime",
    "h_hat",
    "g_hat",
    "h_hat_sdp",
    "las_bal1",
    "theta_bal",
    "g_bal1",
    "h_bal1",
    "theta_bal_hat",
    "las_bal_hat",
    "g_bal_hat",
    "hoffman",
    "phi",
    "phi_prime",
    "phi_H",
    "vallentin",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Sdp,
    ClosedForm,
    /// Known value substituted for a degenerate program.
    Shortcut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fraction {
    pub num: i64,
    pub den: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<Fraction>,
    pub method: Method,
    /// `ok`, or the reason the bound was not computed.
    pub status: String,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub relation: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub digest: String,
    pub graph: String,
    pub entries: BTreeMap<String, BoundEntry>,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub certified: Vec<Certified>,
}

#[derive(Debug, Clone, Copy)]
pub struct ReportConfig {
    pub solver: SolverConfig,
    pub budget: u64,
    /// Slack for inequalities involving floating-point values, relative to
    /// `1 + |rhs|`.
    pub slack: f64,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig { solver: SolverConfig::default(), budget: exact::DEFAULT_BUDGET, slack: 1e-6 }
    }
}

impl BoundReport {
    fn new(digest: String, graph: String) -> Self {
        BoundReport { digest, graph, entries: BTreeMap::new(), checks: Vec::new(), certified: Vec::new() }
    }

    pub fn value(&self, id: &str) -> Option<f64> {
        self.entries.get(id).and_then(|e| e.value)
    }

    pub fn violations(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.holds).collect()
    }

    fn put(&mut self, id: &str, method: Method, start: Instant, r: Result<f64, Error>) {
        let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        let entry = match r {
            Ok(v) => BoundEntry { value: Some(v), exact: None, method, status: "ok".into(), runtime_ms },
            Err(e) => BoundEntry { value: None, exact: None, method, status: e.to_string(), runtime_ms },
        };
        self.entries.insert(id.to_string(), entry);
    }

    fn put_computed(&mut self, id: &str, c: Computed) {
        let (value, status) = match c.value {
            Ok(v) => (Some(v), "ok".to_string()),
            Err(e) => (None, e.to_string()),
        };
        self.entries.insert(id.to_string(), BoundEntry { value, exact: None, method: c.method, status, runtime_ms: c.runtime_ms });
        self.certified.extend(c.certified);
    }

    fn put_exact(&mut self, id: &str, v: Rational, runtime_ms: f64) {
        self.entries.insert(
            id.to_string(),
            BoundEntry {
                value: Some(to_f64(&v)),
                exact: Some(Fraction { num: *v.numer(), den: *v.denom() }),
                method: Method::Exact,
                status: "ok".into(),
                runtime_ms,
            },
        );
    }

    /// `lhs <= rhs` or `lhs = rhs` with slack; skipped when either
    /// side is missing.
    fn relate(&mut self, lhs: &str, op: &str, rhs: &str, slack: f64) {
        let parse = |expr: &str| -> Option<f64> {
            // Forms: `id`, `k*id`, `k*sqrt:id`.
            let (scale, rest) = match expr.split_once('*') {
                Some((k, rest)) => (k.parse::<f64>().ok()?, rest),
                None => (1.0, expr),
            };
            let v = match rest.strip_prefix("sqrt:") {
                Some(id) => self.value(id)?.max(0.0).sqrt(),
                None => self.value(rest)?,
            };
            Some(scale * v)
        };
        let (Some(a), Some(b)) = (parse(lhs), parse(rhs)) else { return };
        let tol = slack * (1.0 + b.abs().max(a.abs()));
        let holds = match op {
            "<=" => a <= b + tol,
            "=" => (a - b).abs() <= tol,
            _ => unreachable!("relation operator"),
        };
        self.checks.push(Check { relation: format!("{lhs} {op} {rhs}"), lhs: a, rhs: b, holds });
    }

    /// Checks every applicable inequality among the computed entries.
    pub fn validate(&mut self, slack: f64) {
        self.checks.clear();
        let rel: &[(&str, &str, &str)] = &[
            // exact chain, re-checked in floating point
            ("0.25*alpha_bal", "=", "h_bal"),
            ("h_bal", "<=", "h"),
            ("h", "<=", "0.5*sqrt:g"),
            ("0.5*sqrt:g", "<=", "0.25*alpha"),
            // unbalanced semidefinite chain
            ("0.5*sqrt:g", "<=", "h1"),
            ("h1", "<=", "0.5*sqrt:g1"),
            ("0.5*sqrt:g1", "<=", "0.25*las1"),
            ("theta", "=", "las1"),
            ("alpha", "<=", "theta"),
            ("h", "<=", "h1_prime"),
            ("h1_prime", "<=", "h1"),
            ("g", "<=", "g1"),
            // eigenvalue bounds
            ("h1", "<=", "h_hat_sdp"),
            ("h_hat_sdp", "=", "h_hat"),
            ("h_hat", "<=", "vallentin"),
            ("g1", "<=", "g_hat"),
            ("alpha", "<=", "hoffman"),
            ("0.5*phi", "=", "h1"),
            ("phi", "<=", "phi_prime"),
            ("phi_prime", "<=", "phi_H"),
            // balanced chain
            ("alpha_bal", "<=", "las_bal1"),
            ("g_bal", "<=", "g_bal1"),
            ("h_bal", "<=", "h_bal1"),
            ("0.25*las_bal1", "<=", "0.5*sqrt:g_bal1"),
            ("0.5*sqrt:g_bal1", "<=", "h_bal1"),
            ("h_bal1", "=", "0.25*theta_bal"),
            ("las_bal1", "<=", "las1"),
            ("h_bal1", "<=", "h1"),
            ("g_bal1", "<=", "g1"),
            ("las_bal1", "<=", "las_bal_hat"),
            ("theta_bal", "<=", "theta_bal_hat"),
            ("g_bal1", "<=", "g_bal_hat"),
        ];
        for (a, op, b) in rel {
            self.relate(a, op, b, slack);
        }
    }
}

struct Computed {
    method: Method,
    value: Result<f64, Error>,
    certified: Vec<Certified>,
    runtime_ms: f64,
}

fn bound_of(id: &str) -> Option<Bound> {
    Bound::from_id(id).filter(|b| !matches!(b, Bound::HHatPrime | Bound::LasBalTilde))
}

fn selected(ids: &[&str]) -> Result<Vec<String>, Error> {
    for id in ids {
        if !ALL_IDS.contains(id) {
            return Err(Error::InvalidParameter(format!("unknown bound identifier {id}")));
        }
    }
    Ok(ALL_IDS.iter().filter(|id| ids.contains(id)).map(|s| s.to_string()).collect())
}

/// Report on a bipartite graph. Haemers' parameters are taken on the
/// flattened bipartite complement `K`, whose bicliques are the biindependent
/// pairs of `G`: `φ(K)`, `φ'(K)` and `φ_H` of the complement of `K`.
pub fn bipartite_report(g: &BipartiteGraph, ids: &[&str], cfg: &ReportConfig) -> Result<BoundReport, Error> {
    let ids = selected(ids)?;
    let mut rep = BoundReport::new(g.digest(), g.to_string());
    let want = |id: &str| ids.iter().any(|x| x == id);
    let exact_ids = ["alpha", "alpha_bal", "g", "h", "g_bal", "h_bal"];
    if exact_ids.iter().any(|id| want(id)) {
        let start = Instant::now();
        let ex = exact_bipartite_parameters(g, cfg.budget)?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        if !ex.witnesses_valid(g) || !verify_relation_chain(&ex).holds {
            return Err(Error::Solver("exact witnesses failed re-verification".into()));
        }
        let vals = [
            ("alpha", Rational::from_integer(ex.alpha as i64)),
            ("alpha_bal", Rational::from_integer(ex.alpha_bal as i64)),
            ("g", Rational::from_integer(ex.g as i64)),
            ("h", ex.h),
            ("g_bal", Rational::from_integer(ex.g_bal as i64)),
            ("h_bal", ex.h_bal),
        ];
        for (id, v) in vals {
            if want(id) {
                rep.put_exact(id, v, ms);
            }
        }
    }
    let k = g.bipartite_complement().flatten();
    let compute = |id: &str| -> Result<Option<Computed>, Error> {
        let start = Instant::now();
        let done = |method, r: Result<f64, Error>, certified: Vec<Certified>| {
            Ok(Some(Computed { method, value: r, certified, runtime_ms: start.elapsed().as_secs_f64() * 1e3 }))
        };
        if let Some(b) = bound_of(id) {
            let v = solve_bound(b, g, Side::Primal, &cfg.solver)?;
            let method = if v.method == models::Method::Solver { Method::Sdp } else { Method::Shortcut };
            return done(method, Ok(v.value), v.certified.into_iter().collect());
        }
        match id {
            "h_hat" => done(Method::ClosedForm, spectral::h_hat(g), vec![]),
            "g_hat" => done(Method::ClosedForm, spectral::g_hat(g), vec![]),
            "vallentin" => done(Method::ClosedForm, spectral::vallentin_bound(g), vec![]),
            "hoffman" => done(Method::ClosedForm, spectral::hoffman_bound(&g.flatten()), vec![]),
            "phi_H" => done(Method::ClosedForm, spectral::haemers_phi_h(&k.complement()), vec![]),
            "phi" => {
                let (v, c) = solve_lmi_value(model_phi(&k), &cfg.solver)?;
                done(Method::Sdp, Ok(v), vec![c])
            }
            "phi_prime" => {
                let (v, c) = spectral::haemers_phi_prime(&k, &cfg.solver)?;
                done(Method::Sdp, Ok(v), vec![c])
            }
            _ => Ok(None),
        }
    };
    // One thread per bound; results are gathered in display order.
    let results: Vec<Result<Option<Computed>, Error>> = std::thread::scope(|scope| {
        let handles: Vec<_> = ids.iter().map(|id| scope.spawn(|| compute(id))).collect();
        handles.into_iter().map(|h| h.join().expect("bound computation panicked")).collect()
    });
    for (id, r) in ids.iter().zip(results) {
        if let Some(c) = r? {
            rep.put_computed(id, c);
        }
    }
    rep.validate(cfg.slack);
    Ok(rep)
}

/// Report on a general graph: `alpha` (exact), `theta`, `las1`, `hoffman`,
/// and Haemers' `phi`, `phi_prime`, `phi_H` of the graph itself.
pub fn general_report(g: &Graph, ids: &[&str], cfg: &ReportConfig) -> Result<BoundReport, Error> {
    let ids = selected(ids)?;
    let mut rep = BoundReport::new(g.digest(), g.to_string());
    for id in &ids {
        let start = Instant::now();
        let id = id.as_str();
        match id {
            "alpha" => {
                let a = exact::alpha_general(g, cfg.budget)?;
                rep.put_exact(id, Rational::from_integer(a as i64), start.elapsed().as_secs_f64() * 1e3);
            }
            "theta" | "las1" => {
                let form = if id == "theta" { ThetaForm::Trace } else { ThetaForm::Arrow };
                let (v, c) = solve_value(models::model_theta(g, form, Side::Primal), &cfg.solver)?;
                rep.certified.push(c);
                rep.put(id, Method::Sdp, start, Ok(v));
            }
            "hoffman" => rep.put(id, Method::ClosedForm, start, spectral::hoffman_bound(g)),
            "phi_H" => rep.put(id, Method::ClosedForm, start, spectral::haemers_phi_h(&g.complement())),
            "phi" => {
                let (v, c) = solve_lmi_value(model_phi(g), &cfg.solver)?;
                rep.certified.push(c);
                rep.put(id, Method::Sdp, start, Ok(v));
            }
            "phi_prime" => {
                let (v, c) = spectral::haemers_phi_prime(g, &cfg.solver)?;
                rep.certified.push(c);
                rep.put(id, Method::Sdp, start, Ok(v));
            }
            _ => rep.put(id, Method::Exact, start, Err(Error::NotApplicable("bipartite input required".into()))),
        }
    }
    rep.validate(cfg.slack);
    Ok(rep)
}
