//! Side-by-side tables for the example families.

use std::f64::consts::PI;

use bibound::exact::{a_sequence, exact_bipartite_parameters};
use bibound::graph::family;
use bibound::models::{solve_bound, Bound, Side};
use bibound::spectral::{h_hat, haemers_phi_h};
use bibound::{extended_bipartite_double, BipartiteGraph, Error, Rational};
use bibound_sdp::SolverConfig;
use clap::ValueEnum;

use crate::output::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Matching,
    Crown,
    Cycle,
    Hypercube,
}

impl Family {
    pub fn default_range(self) -> (usize, usize) {
        match self {
            Family::Matching => (2, 8),
            Family::Crown => (3, 8),
            Family::Cycle => (4, 12),
            Family::Hypercube => (2, 5),
        }
    }

    fn limit(self) -> usize {
        match self {
            Family::Matching | Family::Crown => 40,
            Family::Cycle => 60,
            Family::Hypercube => 7,
        }
    }
}

struct Calc<'a> {
    solver: &'a SolverConfig,
    budget: u64,
}

impl Calc<'_> {
    fn sdp(&self, b: Bound, g: &BipartiteGraph) -> Result<f64, Error> {
        Ok(solve_bound(b, g, Side::Primal, self.solver)?.value)
    }
}

pub fn build(fam: Family, from: usize, to: usize, solver: &SolverConfig, budget: u64) -> Result<Table, Error> {
    if from > to || to > fam.limit() {
        return Err(Error::InvalidParameter(format!("size range {from}..{to} outside 1..{}", fam.limit())));
    }
    let cx = Calc { solver, budget };
    match fam {
        Family::Matching => matching(&cx, from.max(1), to),
        Family::Crown => crown(&cx, from.max(2), to),
        Family::Cycle => cycle(&cx, from.max(3), to),
        Family::Hypercube => hypercube(&cx, from.max(1), to),
    }
}

fn ratio(a: f64, b: f64) -> Cell {
    if b == 0.0 {
        Cell::Missing
    } else {
        Cell::Num(a / b)
    }
}

fn matching(cx: &Calc, from: usize, to: usize) -> Result<Table, Error> {
    let mut t = Table::new(
        "perfect matching M_n",
        &["n", "h", "h1", "n/4", "g", "g1", "n^2/4", "g1/g"],
    );
    for n in from..=to {
        let g = family::perfect_matching(n);
        let ex = exact_bipartite_parameters(&g, cx.budget)?;
        let h1 = cx.sdp(Bound::H1, &g)?;
        let g1 = cx.sdp(Bound::G1, &g)?;
        let k = n as i64;
        t.rows.push(vec![
            Cell::Int(k),
            Cell::frac(ex.h),
            Cell::Num(h1),
            Cell::frac(Rational::new(k, 4)),
            Cell::Int(ex.g as i64),
            Cell::Num(g1),
            Cell::frac(Rational::new(k * k, 4)),
            ratio(g1, ex.g as f64),
        ]);
    }
    Ok(t)
}

fn crown(cx: &Calc, from: usize, to: usize) -> Result<Table, Error> {
    let mut t = Table::new(
        "crown K_{n,n} minus a perfect matching",
        &["n", "h", "h1", "h_hat", "g", "g1", "g1 formula", "g1/g"],
    );
    for n in from..=to {
        let g = family::crown(n);
        let ex = exact_bipartite_parameters(&g, cx.budget)?;
        let h1 = cx.sdp(Bound::H1, &g)?;
        let g1 = cx.sdp(Bound::G1, &g)?;
        let k = n as i64;
        let formula = if n <= 4 { Rational::from_integer(1) } else { Rational::new(k * k, 8 * (k - 2)) };
        t.rows.push(vec![
            Cell::Int(k),
            Cell::frac(ex.h),
            Cell::Num(h1),
            Cell::Num(h_hat(&g)?),
            Cell::Int(ex.g as i64),
            Cell::Num(g1),
            Cell::frac(formula),
            ratio(g1, ex.g as f64),
        ]);
    }
    Ok(t)
}

/// Even cycles directly; every cycle through its extended double, where
/// `h1(B0(C_n))` meets half of Haemers' `φ_H(C_n)`.
fn cycle(cx: &Calc, from: usize, to: usize) -> Result<Table, Error> {
    let mut t = Table::new(
        "cycles C_n and extended doubles B0(C_n)",
        &["n", "h", "h1", "h1 formula", "h_hat", "g", "g1", "h(B0)", "h1(B0)", "phi_H/2"],
    );
    for n in from..=to {
        let c = (2.0 * PI / n as f64).cos();
        let mut row = vec![Cell::Int(n as i64)];
        if n % 2 == 0 {
            let g = family::cycle_bipartite(n)?;
            let ex = exact_bipartite_parameters(&g, cx.budget)?;
            row.extend([
                Cell::frac(ex.h),
                Cell::Num(cx.sdp(Bound::H1, &g)?),
                Cell::Num(n as f64 / 4.0 * c / (c + 1.0)),
                Cell::Num(h_hat(&g)?),
                Cell::Int(ex.g as i64),
                Cell::Num(cx.sdp(Bound::G1, &g)?),
            ]);
        } else {
            row.extend((0..6).map(|_| Cell::Missing));
        }
        let cn = family::cycle(n);
        let b0 = extended_bipartite_double(&cn);
        let ex0 = exact_bipartite_parameters(&b0, cx.budget)?;
        row.extend([
            Cell::frac(ex0.h),
            Cell::Num(cx.sdp(Bound::H1, &b0)?),
            Cell::Num(haemers_phi_h(&cn)? / 2.0),
        ]);
        t.rows.push(row);
    }
    Ok(t)
}

fn hypercube(cx: &Calc, from: usize, to: usize) -> Result<Table, Error> {
    let mut t = Table::new(
        "hypercubes Q_r",
        &["r", "alpha_bal", "a(r-1)", "h", "a(r-1)/4", "h1", "h1 formula", "h_hat", "g", "g1"],
    );
    for r in from..=to {
        let g = family::hypercube(r);
        let ex = exact_bipartite_parameters(&g, cx.budget)?;
        let a = a_sequence(r as u32 - 1) as i64;
        let formula = if r == 1 {
            Cell::Missing
        } else {
            Cell::frac(Rational::new((r as i64 - 2) << r.saturating_sub(3).min(62), (r as i64 - 1) << (3usize.saturating_sub(r))))
        };
        t.rows.push(vec![
            Cell::Int(r as i64),
            Cell::Int(ex.alpha_bal as i64),
            Cell::Int(a),
            Cell::frac(ex.h),
            Cell::frac(Rational::new(a, 4)),
            Cell::Num(cx.sdp(Bound::H1, &g)?),
            formula,
            Cell::Num(h_hat(&g)?),
            Cell::Int(ex.g as i64),
            Cell::Num(cx.sdp(Bound::G1, &g)?),
        ]);
    }
    Ok(t)
}
