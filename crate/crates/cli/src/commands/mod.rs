//! Subcommand grammar and dispatch.

pub mod cech;
pub mod lattice;
pub mod llv;
pub mod period;
pub mod walls;

use std::path::PathBuf;

use clap::{Args, Subcommand};
use serde_json::Value;

use crate::config::Config;
use crate::io::{CliResult, Reply};

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// JSON input file; stdin when omitted or `-`
    pub input: Option<PathBuf>,
    /// Inline JSON input, instead of a file
    #[arg(long, value_name = "TEXT")]
    pub json: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quadratic lattices: signature, dual values, negative forms, spinor norms
    #[command(subcommand)]
    Lattice(lattice::LatticeOp),
    /// Period points and positive cones
    #[command(subcommand)]
    Period(period::PeriodOp),
    /// Twistor planes, conic points and chains
    #[command(subcommand)]
    Twistor(period::TwistorOp),
    /// Rational closures and irrationality tests
    #[command(subcommand)]
    Irrational(period::IrrationalOp),
    /// Wall enumeration, avoidance and chambers
    #[command(subcommand)]
    Walls(walls::WallsOp),
    /// Lefschetz operators and the Lie algebras they generate
    #[command(subcommand)]
    Llv(llv::LlvOp),
    /// Čech cochains over finite abelian groups
    #[command(subcommand)]
    Cech(cech::CechOp),
}

impl Command {
    pub fn input(&self) -> &InputArgs {
        match self {
            Command::Lattice(op) => op.input(),
            Command::Period(op) => op.input(),
            Command::Twistor(op) => op.input(),
            Command::Irrational(op) => op.input(),
            Command::Walls(op) => op.input(),
            Command::Llv(op) => op.input(),
            Command::Cech(op) => op.input(),
        }
    }

    pub fn run(&self, input: &Value, cfg: &Config) -> CliResult<Reply> {
        match self {
            Command::Lattice(op) => lattice::run(op, input, cfg),
            Command::Period(op) => period::run_period(op, input, cfg),
            Command::Twistor(op) => period::run_twistor(op, input, cfg),
            Command::Irrational(op) => period::run_irrational(op, input, cfg),
            Command::Walls(op) => walls::run(op, input, cfg),
            Command::Llv(op) => llv::run(op, input, cfg),
            Command::Cech(op) => cech::run(op, input, cfg),
        }
    }
}
