use clap::Subcommand;
use serde_json::{json, Value};
use torelli_core::json::VectorJson;
use torelli_core::period::{
    is_fully_irrational, rational_closure_detect, rational_closure_exact, ChainOptions,
    PeriodDomain,
};

use super::InputArgs;
use crate::config::Config;
use crate::io::{self, CliError, CliResult, Reply};

#[derive(Debug, Subcommand)]
pub enum PeriodOp {
    /// Normalize a period vector {re, im} and report its residuals
    Validate(InputArgs),
    /// Period point ⇄ oriented positive 2-plane {a, b}
    Convert(InputArgs),
    /// Membership of `vector` in the positive cone of `point`
    Cone(InputArgs),
    /// Seeded sample of a period point
    Sample(InputArgs),
}

#[derive(Debug, Subcommand)]
pub enum TwistorOp {
    /// Positive 3-plane Π_z + R·line
    Plane(InputArgs),
    /// Period point on the conic of `plane` through the line `u`
    Point(InputArgs),
    /// Chain of twistor conics from `source` to `target`
    Chain(InputArgs),
}

#[derive(Debug, Subcommand)]
pub enum IrrationalOp {
    /// Rational closure of span(vectors): exact for rational entries, else detected
    Closure(InputArgs),
    /// Full-irrationality test up to `height`
    Test(InputArgs),
    /// Search for lattice vectors orthogonal to Π_z up to `height`
    Picard(InputArgs),
}

impl PeriodOp {
    pub fn input(&self) -> &InputArgs {
        match self {
            PeriodOp::Validate(a)
            | PeriodOp::Convert(a)
            | PeriodOp::Cone(a)
            | PeriodOp::Sample(a) => a,
        }
    }
}

impl TwistorOp {
    pub fn input(&self) -> &InputArgs {
        match self {
            TwistorOp::Plane(a) | TwistorOp::Point(a) | TwistorOp::Chain(a) => a,
        }
    }
}

impl IrrationalOp {
    pub fn input(&self) -> &InputArgs {
        match self {
            IrrationalOp::Closure(a) | IrrationalOp::Test(a) | IrrationalOp::Picard(a) => a,
        }
    }
}

pub fn domain(input: &Value, cfg: &Config) -> CliResult<PeriodDomain> {
    Ok(PeriodDomain::with_tolerances(
        io::lattice(input)?,
        cfg.period,
    )?)
}

pub fn run_period(op: &PeriodOp, input: &Value, cfg: &Config) -> CliResult<Reply> {
    match op {
        PeriodOp::Validate(_) => {
            let d = domain(input, cfg)?;
            let p: torelli_core::json::PointJson = match input.get("point") {
                Some(_) => io::field(input, "point")?,
                None => serde_json::from_value(input.clone())
                    .map_err(|_| CliError::Input("expected \"point\" or top-level re/im".into()))?,
            };
            let (re, im) = (p.re.to_f64(), p.im.to_f64());
            let diag = d.diagnose(&re, &im)?;
            let z = d.point(&re, &im)?;
            Ok(Reply::ok(
                json!({"valid": true, "point": io::point_json(&z)}),
                json!({"isotropy_residual": diag.isotropy_residual, "hq": diag.hq}),
            ))
        }
        PeriodOp::Convert(_) => {
            let d = domain(input, cfg)?;
            if input.get("plane").is_some() {
                let a = io::vector(&input["plane"], "a")?;
                let b = io::vector(&input["plane"], "b")?;
                let plane = d.two_plane(&a, &b)?;
                let z = d.plane_to_point(&plane)?;
                Ok(Reply::ok(json!({"point": io::point_json(&z)}), json!({})))
            } else {
                let z = io::point(&d, input, "point")?;
                let plane = d.point_to_plane(&z);
                Ok(Reply::ok(
                    json!({"plane": {"a": io::vec_f(&plane.a), "b": io::vec_f(&plane.b)}}),
                    json!({}),
                ))
            }
        }
        PeriodOp::Cone(_) => {
            let d = domain(input, cfg)?;
            let z = io::point(&d, input, "point")?;
            let c = io::vector(input, "vector")?;
            io::check_len(&c, d.rank())?;
            let contains = d.positive_cone_contains(&z, &c)?;
            Ok(Reply::ok(
                json!({"contains": contains}),
                json!({"q": d.q(&c), "perp_residual": d.perp_residual(&z, &c)}),
            ))
        }
        PeriodOp::Sample(_) => {
            let seed = cfg.seed()?;
            let d = domain(input, cfg)?;
            let z = d.sample_period_point(seed);
            let diag = d.diagnose(z.re(), z.im())?;
            Ok(Reply::ok(
                json!({"point": io::point_json(&z)}),
                json!({"seed": seed, "isotropy_residual": diag.isotropy_residual}),
            ))
        }
    }
}

pub fn run_twistor(op: &TwistorOp, input: &Value, cfg: &Config) -> CliResult<Reply> {
    let d = domain(input, cfg)?;
    match op {
        TwistorOp::Plane(_) => {
            let z = io::point(&d, input, "point")?;
            let line = io::vector(input, "line")?;
            io::check_len(&line, d.rank())?;
            let plane = d.twistor_plane(&z, &line)?;
            let positivity = d.positivity_margin(&plane.frame().iter().collect::<Vec<_>>())?;
            Ok(Reply::ok(
                io::plane_json(&plane),
                json!({"positivity_margin": positivity}),
            ))
        }
        TwistorOp::Point(_) => {
            let frame = io::frame3(input, "plane")?;
            let u = io::vector(input, "u")?;
            let plane = d.orient_three_plane(&frame)?;
            let z = d.conic_point(&plane, &u)?;
            Ok(Reply::ok(
                json!({"point": io::point_json(&z), "orientation": plane.orientation()}),
                json!({"conic_residual": d.conic_residual(&plane, &z)}),
            ))
        }
        TwistorOp::Chain(_) => {
            let source = io::point(&d, input, "source")?;
            let target = io::point(&d, input, "target")?;
            let mut opts = ChainOptions {
                tau_pos: cfg.period.pos,
                ..ChainOptions::default()
            };
            if let Some(m) = io::opt_field::<usize>(input, "max_links")? {
                opts.max_links = m;
            }
            let chain = d.chain_connect(&source, &target, &opts)?;
            d.verify_chain(&source, &target, &chain, &opts)?;
            let links: Vec<Value> = chain
                .links
                .iter()
                .map(|l| {
                    json!({
                        "plane": io::plane_json(&l.plane),
                        "entry": io::point_json(&l.entry),
                        "exit": io::point_json(&l.exit),
                    })
                })
                .collect();
            Ok(Reply::ok(
                json!({"length": chain.len(), "links": links}),
                json!({"verified": true, "max_links": opts.max_links}),
            ))
        }
    }
}

const DEFAULT_HEIGHT: u64 = 100;
const DEFAULT_TOL: f64 = 1e-9;

fn height_tol(input: &Value) -> CliResult<(u64, f64)> {
    let height = io::opt_field(input, "height")?.unwrap_or(DEFAULT_HEIGHT);
    let tol: f64 = io::opt_field(input, "tol")?.unwrap_or(DEFAULT_TOL);
    if !(tol > 0.0) {
        return Err(CliError::Input("tol must be positive".into()));
    }
    Ok((height, tol))
}

pub fn run_irrational(op: &IrrationalOp, input: &Value, cfg: &Config) -> CliResult<Reply> {
    let (height, tol) = height_tol(input)?;
    let diag = json!({"height": height, "tol": tol});
    match op {
        IrrationalOp::Closure(_) => {
            let vs = io::vectors(input, "vectors")?;
            let exact: Option<Vec<_>> = vs.iter().map(VectorJson::exact).collect();
            let report = match exact {
                Some(rs) => rational_closure_exact(&rs)?,
                None => rational_closure_detect(
                    &vs.iter().map(VectorJson::to_f64).collect::<Vec<_>>(),
                    height,
                    tol,
                )?,
            };
            Ok(Reply::ok(
                serde_json::to_value(&report).expect("serializable"),
                diag,
            ))
        }
        IrrationalOp::Test(_) => {
            let vs: Vec<_> = io::vectors(input, "vectors")?
                .iter()
                .map(VectorJson::to_f64)
                .collect();
            let verdict = is_fully_irrational(&vs, height, tol)?;
            Ok(Reply::ok(
                serde_json::to_value(&verdict).expect("serializable"),
                diag,
            ))
        }
        IrrationalOp::Picard(_) => {
            let d = domain(input, cfg)?;
            let z = io::point(&d, input, "point")?;
            let verdict = d.picard_trivial(&z, height, tol)?;
            Ok(Reply::ok(
                serde_json::to_value(&verdict).expect("serializable"),
                diag,
            ))
        }
    }
}
