use clap::Subcommand;
use nalgebra::DVector;
use serde_json::{json, Value};
use torelli_core::json::{Scalar, VectorJson};
use torelli_core::lattice::QuadLattice;
use torelli_core::walls::{
    enumerate_walls_near, in_u_eps, kahler_chamber_contains, split, wall_avoidance,
    EnumerationOptions, MajorantForm, WallSet, WallSetJson,
};

use super::period::domain;
use super::InputArgs;
use crate::config::Config;
use crate::io::{self, CliError, CliResult, Reply};

#[derive(Debug, Subcommand)]
pub enum WallsOp {
    /// Walls with q^∨(δ) = d near a positive plane, one per ± pair
    Enum(InputArgs),
    /// Whether a positive plane avoids every wall of a set
    Avoid(InputArgs),
    /// Whether κ lies in the chamber of a period point cut out by a wall set
    Chamber(InputArgs),
    /// Membership of a vector in U_ε(P)
    Ueps(InputArgs),
}

impl WallsOp {
    pub fn input(&self) -> &InputArgs {
        match self {
            WallsOp::Enum(a) | WallsOp::Avoid(a) | WallsOp::Chamber(a) | WallsOp::Ueps(a) => a,
        }
    }
}

fn frame(input: &Value, lattice: &QuadLattice) -> CliResult<Vec<VectorJson>> {
    let vs = io::vectors(input, "plane")?;
    if let Some(v) = vs.iter().find(|v| v.0.len() != lattice.rank()) {
        return Err(torelli_core::error::Error::Dimension {
            expected: lattice.rank(),
            got: v.0.len(),
        }
        .into());
    }
    Ok(vs)
}

fn float_frame(vs: &[VectorJson]) -> Vec<DVector<f64>> {
    vs.iter().map(VectorJson::to_f64).collect()
}

fn wall_set(input: &Value, lattice: &QuadLattice) -> CliResult<WallSet> {
    let j: WallSetJson = io::field(input, "walls")?;
    Ok(WallSet::from_json(lattice, &j)?)
}

pub fn run(op: &WallsOp, input: &Value, cfg: &Config) -> CliResult<Reply> {
    let lattice = io::lattice(input)?;
    let tau = cfg.tol_wall;
    match op {
        WallsOp::Enum(_) => {
            let vs = frame(input, &lattice)?;
            let exact: Option<Vec<_>> = vs.iter().map(VectorJson::exact).collect();
            let majorant = match exact {
                Some(rs) => MajorantForm::exact(&lattice, &rs)?,
                None => MajorantForm::new(&lattice, &float_frame(&vs))?,
            };
            let d = match io::field::<Scalar>(input, "d")? {
                Scalar::Exact(r) => r,
                Scalar::Float(_) => return Err(CliError::Input("d must be exact".into())),
            };
            let radius: f64 = io::field(input, "radius")?;
            let opts = EnumerationOptions {
                workers: cfg.workers,
                ..EnumerationOptions::default()
            };
            let e = enumerate_walls_near(&lattice, &majorant, &d, radius, &opts)?;
            Ok(Reply::ok(
                json!({"count": e.walls.len(), "walls": e.walls.iter().map(io::form).collect::<Vec<_>>()}),
                json!({"dual_value": io::rat(&e.dual_value), "radius": e.radius, "nodes": e.nodes, "exact_majorant": majorant.exact_gram().is_some()}),
            ))
        }
        WallsOp::Avoid(_) => {
            let vs = float_frame(&frame(input, &lattice)?);
            let walls = wall_set(input, &lattice)?;
            let r = wall_avoidance(&vs, &walls, tau)?;
            Ok(Reply::ok(
                json!({"avoids": r.avoids}),
                json!({"nearest": r.nearest.as_ref().map(io::form), "min_restriction": io::num(r.min_restriction), "tau": tau}),
            ))
        }
        WallsOp::Chamber(_) => {
            let d = domain(input, cfg)?;
            let z = io::point(&d, input, "point")?;
            let kappa = io::vector(input, "kappa")?;
            io::check_len(&kappa, d.rank())?;
            let walls = wall_set(input, d.lattice())?;
            let r = kahler_chamber_contains(&d, &z, &walls, &kappa, tau)?;
            Ok(Reply::ok(
                json!({"inside": r.inside}),
                json!({"in_positive_cone": r.in_positive_cone, "witness": r.witness.as_ref().map(io::form), "tau": tau}),
            ))
        }
        WallsOp::Ueps(_) => {
            let vs = float_frame(&frame(input, &lattice)?);
            let v = io::vector(input, "vector")?;
            io::check_len(&v, lattice.rank())?;
            let eps: f64 = io::field(input, "eps")?;
            let inside = in_u_eps(&lattice, &vs, &v, eps)?;
            let (vp, vn) = split(&lattice, &vs, &v)?;
            Ok(Reply::ok(
                json!({"in_u_eps": inside}),
                json!({"q_plane": lattice.q_f64(&vp), "q_complement": lattice.q_f64(&vn), "eps": eps}),
            ))
        }
    }
}
