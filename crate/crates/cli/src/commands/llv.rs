use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde_json::{json, Value};
use torelli_core::json::VectorJson;
use torelli_core::llv::{
    deligne_generator, fujiki_constant, fujiki_constant_with, grading_h, h2_spectrum,
    hodge_decompose, lefschetz_basis, lefschetz_e, lefschetz_f, lefschetz_generators, lie_closure,
    plane_generators, sl2_residuals, ClosureOptions, CohomologyRing, GradedOperator, RingJson,
};
use torelli_core::period::PeriodDomain;

use super::InputArgs;
use crate::config::Config;
use crate::io::{self, CliError, CliResult, Reply};

#[derive(Debug, Clone, Args)]
pub struct RingArgs {
    #[command(flatten)]
    pub io: InputArgs,
    /// `k3` for the built-in K3 ring, otherwise a ring JSON file
    #[arg(long, default_value = "k3")]
    pub ring: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Span {
    /// η over a positive 3-plane (`plane`, default the reference plane)
    Plane,
    /// η over a spanning set of H²
    Full,
}

#[derive(Debug, Clone, Args)]
pub struct ClosureArgs {
    #[command(flatten)]
    pub ring: RingArgs,
    #[arg(long, value_enum, default_value = "plane")]
    pub span: Span,
}

#[derive(Debug, Subcommand)]
pub enum LlvOp {
    /// Lefschetz operator e_η
    E(RingArgs),
    /// Dual operator f_η completing (e, h, f)
    F(RingArgs),
    /// Lie algebra generated by Lefschetz triples
    Closure(ClosureArgs),
    /// Fujiki constant from seeded integer samples
    Fujiki(RingArgs),
    /// Hodge decomposition of H² at a period point
    Hodge(RingArgs),
    /// Deligne generator of a conic point and its spectrum on H²
    Deligne(RingArgs),
}

impl LlvOp {
    fn ring_args(&self) -> &RingArgs {
        match self {
            LlvOp::E(a) | LlvOp::F(a) | LlvOp::Fujiki(a) | LlvOp::Hodge(a) | LlvOp::Deligne(a) => a,
            LlvOp::Closure(c) => &c.ring,
        }
    }

    pub fn input(&self) -> &InputArgs {
        &self.ring_args().io
    }
}

fn load_ring(spec: &str) -> CliResult<CohomologyRing> {
    if spec.eq_ignore_ascii_case("k3") {
        return Ok(CohomologyRing::k3());
    }
    let path = PathBuf::from(spec);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Usage(format!("cannot read ring {}: {e}", path.display())))?;
    let j: RingJson =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("ring file: {e}")))?;
    Ok(CohomologyRing::from_json(&j)?)
}

fn matrix_json(op: &GradedOperator) -> Value {
    let m = &op.matrix;
    let rows: Vec<Vec<f64>> = (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect();
    json!({"shift": op.shift, "matrix": rows})
}

fn eta(input: &Value, ring: &CohomologyRing) -> CliResult<Vec<f64>> {
    let v = io::vector(input, "eta")?;
    io::check_len(&v, ring.lattice_block().lattice.rank())?;
    Ok(v.iter().copied().collect())
}

/// Eigenvalue parts below 1e-12 print as zero.
fn chop(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        0.0
    } else {
        x
    }
}

fn ring_domain(ring: &CohomologyRing, cfg: &Config) -> CliResult<PeriodDomain> {
    Ok(PeriodDomain::with_tolerances(
        ring.lattice_block().lattice.clone(),
        cfg.period,
    )?)
}

fn closure_opts(cfg: &Config) -> ClosureOptions {
    ClosureOptions {
        tau: cfg.tol_lie,
        workers: cfg.workers,
        ..ClosureOptions::default()
    }
}

fn plane_or_reference(input: &Value, domain: &PeriodDomain) -> CliResult<[DVector<f64>; 3]> {
    if input.get("plane").is_some() {
        let f = io::frame3(input, "plane")?;
        for v in &f {
            io::check_len(v, domain.rank())?;
        }
        Ok(f)
    } else {
        Ok(domain.reference_plane().clone())
    }
}

pub fn run(op: &LlvOp, input: &Value, cfg: &Config) -> CliResult<Reply> {
    let ring = load_ring(&op.ring_args().ring)?;
    match op {
        LlvOp::E(_) => {
            let e = lefschetz_e(&ring, &eta(input, &ring)?)?;
            Ok(Reply::ok(
                matrix_json(&e),
                json!({"grading_defect": e.grading_defect(&ring)}),
            ))
        }
        LlvOp::F(_) => {
            let x = eta(input, &ring)?;
            let e = lefschetz_e(&ring, &x)?;
            let f = lefschetz_f(&ring, &x)?;
            let r = sl2_residuals(&e, &grading_h(&ring), &f);
            Ok(Reply::ok(matrix_json(&f), json!({"sl2_residuals": r})))
        }
        LlvOp::Closure(args) => {
            let gens = match args.span {
                Span::Plane => {
                    let domain = ring_domain(&ring, cfg)?;
                    let frame = plane_or_reference(input, &domain)?;
                    plane_generators(&ring, &domain, &frame)?
                }
                Span::Full => {
                    let etas: Vec<Vec<f64>> = lefschetz_basis(&ring.lattice_block().lattice)
                        .iter()
                        .map(|v| v.iter().map(|&x| x as f64).collect())
                        .collect();
                    lefschetz_generators(&ring, &etas)?
                }
            };
            let c = lie_closure(&gens, &closure_opts(cfg))?;
            let by_degree: serde_json::Map<String, Value> = c
                .by_degree
                .iter()
                .map(|(d, n)| (d.to_string(), json!(n)))
                .collect();
            let mut diag =
                json!({"residual": c.residual, "generators": gens.len(), "tau": cfg.tol_lie});
            if c.dimension <= 64 {
                let (p, n, z) = c.killing_signature();
                diag["killing_signature"] = json!([p, n, z]);
            }
            Ok(Reply::ok(
                json!({"dimension": c.dimension, "by_degree": by_degree}),
                diag,
            ))
        }
        LlvOp::Fujiki(_) => {
            let seed = cfg.seed()?;
            let fit = match io::opt_field::<usize>(input, "samples")? {
                Some(n) => fujiki_constant_with(&ring, n, seed)?,
                None => fujiki_constant(&ring, seed)?,
            };
            Ok(Reply::ok(
                json!({"c": io::rat(&fit.c)}),
                json!({"samples": fit.samples, "seed": seed}),
            ))
        }
        LlvOp::Hodge(_) => {
            let domain = ring_domain(&ring, cfg)?;
            let z = io::point(&domain, input, "point")?;
            let h = hodge_decompose(&domain, &z)?;
            Ok(Reply::ok(
                json!({"dims": h.dims, "h11_inertia": [h.h11_inertia.0, h.h11_inertia.1]}),
                json!({
                    "h20_norm": h.h20_norm,
                    "isotropy_residual": h.isotropy_residual,
                    "orthogonality_residual": h.orthogonality_residual,
                }),
            ))
        }
        LlvOp::Deligne(_) => {
            let domain = ring_domain(&ring, cfg)?;
            let frame = plane_or_reference(input, &domain)?;
            let plane = domain.orient_three_plane(&frame)?;
            let z = match input.get("point") {
                Some(_) => io::point(&domain, input, "point")?,
                None => {
                    let u: VectorJson = io::field(input, "u")
                        .map_err(|_| CliError::Input("expected \"point\" or \"u\"".into()))?;
                    let u = u.to_f64();
                    io::check_len(&u, domain.rank())?;
                    let q = domain.q(&u);
                    let u = if q > 0.0 { u / q.sqrt() } else { u };
                    domain.conic_point(&plane, &u)?
                }
            };
            let gens = plane_generators(&ring, &domain, plane.frame())?;
            let closure = lie_closure(&gens, &closure_opts(cfg))?;
            let x = deligne_generator(&ring, &closure, &domain, &plane, &z)?;
            let spectrum: Vec<[f64; 2]> = h2_spectrum(&ring, &x.operator)
                .iter()
                .map(|c| [chop(c.re), chop(c.im)])
                .collect();
            Ok(Reply::ok(
                json!({"spectrum": spectrum, "point": io::point_json(&z)}),
                json!({"residual": x.residual, "closure_dimension": closure.dimension}),
            ))
        }
    }
}
