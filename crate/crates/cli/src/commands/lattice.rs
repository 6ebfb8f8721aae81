use clap::Subcommand;
use serde_json::{json, Value};
use torelli_core::json::{IsometryJson, VectorJson};
use torelli_core::lattice::{
    dual_value, negative_form_check, reflection, reflection_decomposition, spinor_norm_sign,
    Isometry, WallForm,
};
use torelli_core::rational::Rat;

use super::InputArgs;
use crate::config::Config;
use crate::io::{self, CliError, CliResult, Reply};

#[derive(Debug, Subcommand)]
pub enum LatticeOp {
    /// Signature (p, m) of a gram matrix
    Signature(InputArgs),
    /// Dual value q^∨(δ) of a form (`form`) or of b(v, ·) (`vector`)
    Dual(InputArgs),
    /// Two-route negativity test of a form
    Negative(InputArgs),
    /// Real spinor norm of an isometry (`matrix`) or of a product of reflections
    Spinor(InputArgs),
}

impl LatticeOp {
    pub fn input(&self) -> &InputArgs {
        match self {
            LatticeOp::Signature(a)
            | LatticeOp::Dual(a)
            | LatticeOp::Negative(a)
            | LatticeOp::Spinor(a) => a,
        }
    }
}

fn exact(v: &VectorJson, what: &str) -> CliResult<Vec<Rat>> {
    v.exact()
        .ok_or_else(|| CliError::Input(format!("{what} must have exact entries")))
}

fn wall_form(lattice: &torelli_core::lattice::QuadLattice, input: &Value) -> CliResult<WallForm> {
    if let Some(f) = io::opt_field::<VectorJson>(input, "form")? {
        return Ok(WallForm::new(exact(&f, "form")?));
    }
    let v: VectorJson = io::field(input, "vector")
        .map_err(|_| CliError::Input("expected field \"form\" or \"vector\"".into()))?;
    Ok(WallForm::dual_to(lattice, &exact(&v, "vector")?))
}

pub fn run(op: &LatticeOp, input: &Value, _cfg: &Config) -> CliResult<Reply> {
    let lattice = io::lattice(input)?;
    match op {
        LatticeOp::Signature(_) => {
            let (p, m) = lattice.signature();
            Ok(Reply::ok(
                json!([p, m]),
                json!({"rank": lattice.rank(), "det": lattice.det().to_string()}),
            ))
        }
        LatticeOp::Dual(_) => {
            let w = wall_form(&lattice, input)?;
            let d = dual_value(&lattice, &w)?;
            Ok(Reply::ok(
                json!({"dual_value": io::rat(&d), "form": io::form(&w)}),
                json!({"indivisible": w.is_indivisible()}),
            ))
        }
        LatticeOp::Negative(_) => {
            let w = wall_form(&lattice, input)?;
            let report = negative_form_check(&lattice, &w)?;
            Ok(Reply::ok(
                json!({"negative": report.negative}),
                serde_json::to_value(&report).expect("serializable"),
            ))
        }
        LatticeOp::Spinor(_) => {
            let n = lattice.rank();
            let g = match io::opt_field::<IsometryJson>(input, "isometry")? {
                Some(m) => Isometry::new(&lattice, m.exact()?)?,
                None if input.get("matrix").is_some() => {
                    let m: IsometryJson = serde_json::from_value(input.clone())
                        .map_err(|e| CliError::Input(format!("matrix: {e}")))?;
                    Isometry::new(&lattice, m.exact()?)?
                }
                None => {
                    let vs: Vec<VectorJson> = io::field(input, "reflections").map_err(|_| {
                        CliError::Input("expected \"matrix\" or \"reflections\"".into())
                    })?;
                    let mut g = Isometry::identity(&lattice);
                    for v in &vs {
                        g = g.compose(
                            &reflection(&lattice, &exact(v, "reflection vector")?)?.isometry,
                        );
                    }
                    g
                }
            };
            let sign = spinor_norm_sign(&lattice, &g)?;
            let order: Vec<usize> = (0..n).collect();
            let vs = reflection_decomposition(&lattice, &g, &order)?;
            let factors: Vec<Value> = vs
                .iter()
                .map(|v| json!({"vector": io::rats(v), "q": io::rat(&lattice.q(v))}))
                .collect();
            Ok(Reply::ok(
                json!({"spinor_norm_sign": sign, "in_o_sharp": sign == 1}),
                json!({"integral": g.is_integral(), "reflections": factors}),
            ))
        }
    }
}
