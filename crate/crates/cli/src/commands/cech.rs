use clap::Subcommand;
use serde::Deserialize;
use serde_json::{json, Map, Value};
use torelli_core::cech::{
    coboundary, cohomology, is_cocycle, solve_coboundary, Cochain, CochainJson, FiniteAbelianGroup,
    Nerve, NerveJson, SolveOutcome,
};

use super::InputArgs;
use crate::config::Config;
use crate::io::{self, CliError, CliResult, Reply};

#[derive(Debug, Subcommand)]
pub enum CechOp {
    /// Coboundary δc of a cochain
    D(InputArgs),
    /// Whether a cochain is a cocycle
    Cocycle(InputArgs),
    /// Solve δx = c, or report the obstruction class of c
    Solve(InputArgs),
    /// Invariant factors of Ȟ^k (all k ≤ 2 unless `degree` is given)
    Cohomology(InputArgs),
}

impl CechOp {
    pub fn input(&self) -> &InputArgs {
        match self {
            CechOp::D(a) | CechOp::Cocycle(a) | CechOp::Solve(a) | CechOp::Cohomology(a) => a,
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NerveSpec {
    Name(String),
    Json(NerveJson),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GroupSpec {
    Cyclic(u64),
    Factors { factors: Vec<u64> },
    List(Vec<u64>),
}

fn nerve(input: &Value) -> CliResult<Nerve> {
    match io::field::<NerveSpec>(input, "nerve")? {
        NerveSpec::Name(n) if n == "octahedron" => Ok(Nerve::octahedron()),
        NerveSpec::Name(n) => match n.strip_prefix("simplex:").map(str::parse::<usize>) {
            Some(Ok(k)) => Ok(Nerve::simplex(k)),
            _ => Err(CliError::Input(format!("unknown nerve {n:?}"))),
        },
        NerveSpec::Json(j) => Ok(Nerve::from_json(&j)?),
    }
}

fn group(input: &Value) -> CliResult<FiniteAbelianGroup> {
    let factors = match io::field::<GroupSpec>(input, "group")? {
        GroupSpec::Cyclic(k) => vec![k],
        GroupSpec::Factors { factors } | GroupSpec::List(factors) => factors,
    };
    Ok(FiniteAbelianGroup::new(factors)?)
}

fn cochain(input: &Value, nerve: &Nerve, group: &FiniteAbelianGroup) -> CliResult<Cochain> {
    let j: CochainJson = io::field(input, "cochain")?;
    Ok(Cochain::from_json(nerve, group, &j)?)
}

fn cochain_json(c: &Cochain, nerve: &Nerve) -> Value {
    serde_json::to_value(c.to_json(nerve)).expect("serializable")
}

pub fn run(op: &CechOp, input: &Value, _cfg: &Config) -> CliResult<Reply> {
    let n = nerve(input)?;
    let g = group(input)?;
    let diag =
        json!({"simplices": (0..=2).map(|d| n.count(d)).collect::<Vec<_>>(), "group": g.factors()});
    match op {
        CechOp::D(_) => {
            let c = cochain(input, &n, &g)?;
            let dc = coboundary(&n, &g, &c)?;
            Ok(Reply::ok(
                json!({"cochain": cochain_json(&dc, &n), "zero": dc.is_zero()}),
                diag,
            ))
        }
        CechOp::Cocycle(_) => {
            let c = cochain(input, &n, &g)?;
            Ok(Reply::ok(json!({"cocycle": is_cocycle(&n, &g, &c)?}), diag))
        }
        CechOp::Solve(_) => {
            let c = cochain(input, &n, &g)?;
            match solve_coboundary(&n, &g, &c)? {
                SolveOutcome::Solved(x) => {
                    Ok(Reply::ok(json!({"primitive": cochain_json(&x, &n)}), diag))
                }
                SolveOutcome::Obstructed(o) => {
                    let mut fields = Map::new();
                    fields.insert("obstruction".into(), json!(o.coordinates));
                    fields.insert(
                        "diagnostics".into(),
                        json!({"moduli": o.moduli, "group": g.factors()}),
                    );
                    Ok(Reply::refused(
                        "obstructed",
                        "cocycle is not a coboundary",
                        fields,
                    ))
                }
            }
        }
        CechOp::Cohomology(_) => {
            let result = match io::opt_field::<usize>(input, "degree")? {
                Some(k) => json!(cohomology(&n, &g, k)?),
                None => {
                    let mut m = Map::new();
                    for k in 0..=2 {
                        m.insert(format!("H{k}"), json!(cohomology(&n, &g, k)?));
                    }
                    Value::Object(m)
                }
            };
            Ok(Reply::ok(result, diag))
        }
    }
}
