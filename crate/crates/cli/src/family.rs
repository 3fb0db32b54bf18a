//! `name:params` family specs.
//!
//! ```text
//! spec   := name [":" params]
//! matching:N  crown:N  kbip:A,B  ebip:A,B  hypercube:R  cycle:N
//! complete:N  empty:N  path:N  petersen
//! double:SPEC   xdouble:SPEC          (bipartite double, extended double)
//! cayley:GROUP:E1,E2,...              (GROUP as in `group_spec`)
//! ```
//!
//! `cycle:N` is bipartite (evens against odds) when `N` is even.

use bibound::graph::family;
use bibound::groups::FiniteGroup;
use bibound::{bipartite_double, extended_bipartite_double, AnyGraph, Error};

/// Largest group order accepted from a spec.
const MAX_ORDER: usize = 512;

fn bad(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn number(s: &str, what: &str) -> Result<usize, Error> {
    s.trim().parse().map_err(|_| bad(format!("{what}: expected a nonnegative integer, got {s:?}")))
}

fn list(s: &str, what: &str) -> Result<Vec<usize>, Error> {
    s.split(',').map(|x| number(x, what)).collect()
}

fn pair(s: &str, what: &str) -> Result<(usize, usize), Error> {
    match list(s, what)?[..] {
        [a, b] => Ok((a, b)),
        _ => Err(bad(format!("{what}: expected two comma-separated sizes, got {s:?}"))),
    }
}

/// Groups: `zN`, `zAxzB[x..]`, `sK` (K <= 4), `dN` (dihedral of order 2N).
pub fn group_spec(s: &str) -> Result<FiniteGroup, Error> {
    let s = s.trim().to_ascii_lowercase();
    if s.contains('x') {
        let orders = s
            .split('x')
            .map(|f| f.strip_prefix('z').ok_or_else(|| bad(format!("group factor {f:?} is not zN"))).and_then(|n| number(n, "cyclic order")))
            .collect::<Result<Vec<_>, _>>()?;
        if orders.iter().any(|&n| n == 0) {
            return Err(bad("cyclic order must be positive"));
        }
        if orders.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n)).is_none_or(|n| n > MAX_ORDER) {
            return Err(bad(format!("group order above {MAX_ORDER}")));
        }
        return Ok(FiniteGroup::product_of_cyclic(&orders));
    }
    let (kind, n) = s.split_at(1.min(s.len()));
    let n = number(n, "group size")?;
    if n > MAX_ORDER {
        return Err(bad(format!("group order above {MAX_ORDER}")));
    }
    match kind {
        "z" if n >= 1 => Ok(FiniteGroup::cyclic(n)),
        "s" if (1..=4).contains(&n) => Ok(FiniteGroup::symmetric(n)),
        "d" if n >= 1 => Ok(FiniteGroup::dihedral(n)),
        _ => Err(bad(format!("unknown group {s:?}; use zN, zAxzB, sK (K <= 4) or dN"))),
    }
}

pub fn parse(spec: &str) -> Result<AnyGraph, Error> {
    let (name, rest) = match spec.split_once(':') {
        Some((n, r)) => (n, Some(r)),
        None => (spec, None),
    };
    let arg = |what: &str| rest.ok_or_else(|| bad(format!("{name} needs parameters ({what})")));
    let positive = |what: &str| -> Result<usize, Error> {
        let n = number(arg(what)?, what)?;
        if n == 0 {
            return Err(bad(format!("{name}: {what} must be positive")));
        }
        Ok(n)
    };
    let key = name.trim().to_ascii_lowercase();
    let g = match key.as_str() {
        "matching" => AnyGraph::Bipartite(family::perfect_matching(positive("n")?)),
        "crown" => AnyGraph::Bipartite(family::crown(positive("n")?)),
        "kbip" => {
            let (a, b) = pair(arg("a,b")?, "part sizes")?;
            AnyGraph::Bipartite(family::complete_bipartite(a, b))
        }
        "ebip" => {
            let (a, b) = pair(arg("a,b")?, "part sizes")?;
            AnyGraph::Bipartite(family::empty_bipartite(a, b))
        }
        "hypercube" => {
            let r = positive("r")?;
            if r > 12 {
                return Err(bad("hypercube dimension above 12 is out of range"));
            }
            AnyGraph::Bipartite(family::hypercube(r))
        }
        "cycle" => {
            let n = number(arg("n")?, "n")?;
            if n < 3 {
                return Err(bad("cycle needs n >= 3"));
            }
            if n % 2 == 0 {
                AnyGraph::Bipartite(family::cycle_bipartite(n)?)
            } else {
                AnyGraph::General(family::cycle(n))
            }
        }
        "complete" => AnyGraph::General(family::complete(positive("n")?)),
        "empty" => AnyGraph::General(family::empty(positive("n")?)),
        "path" => AnyGraph::General(family::path(positive("n")?)),
        "petersen" => AnyGraph::General(family::petersen()),
        "double" | "xdouble" => {
            let inner = match parse(arg("inner spec")?)? {
                AnyGraph::General(g) => g,
                AnyGraph::Bipartite(b) => b.flatten(),
            };
            AnyGraph::Bipartite(if key == "double" { bipartite_double(&inner) } else { extended_bipartite_double(&inner) })
        }
        "cayley" => {
            let (group, set) = arg("group:set")?
                .split_once(':')
                .ok_or_else(|| bad("cayley needs GROUP:E1,E2,..."))?;
            let group = group_spec(group)?;
            AnyGraph::Bipartite(bibound::groups::cayley_bipartite(&group, &list(set, "connection set")?)?)
        }
        other => return Err(bad(format!("unknown family {other:?}"))),
    };
    Ok(g)
}
