//! Biindependent pairs in bipartite graphs: exact values on small instances,
//! level-one semidefinite bounds, closed-form eigenvalue bounds, the graph
//! constructions that relate them, and group-theoretic instances.

pub mod exact;
pub mod graph;
pub mod groups;
pub mod models;
pub mod reduce;
pub mod report;
pub mod spectral;
pub mod verify;

pub use graph::{
    bipartite_double, extended_bipartite_double, family, hardness_gadget, half_size_reduction,
    AnyGraph, BiindependentPair, BipartiteGraph, Graph,
};

/// Exact rational used for `h`-type values.
pub type Rational = num_rational::Ratio<i64>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("enumeration budget of {0} exceeded")]
    Budget(u64),
    #[error("solver: {0}")]
    Solver(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl From<bibound_sdp::SdpError> for Error {
    fn from(e: bibound_sdp::SdpError) -> Self {
        Error::Solver(e.to_string())
    }
}

/// Serde adapter writing a [`Rational`] as `{"num": p, "den": q}`.
pub mod rational_json {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::Rational;

    #[derive(Serialize, Deserialize)]
    struct Repr {
        num: i64,
        den: i64,
    }

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        Repr { num: *r.numer(), den: *r.denom() }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let r = Repr::deserialize(d)?;
        if r.den == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Rational::new(r.num, r.den))
    }
}

/// Converts a rational to the nearest double.
pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
