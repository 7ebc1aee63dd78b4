//! `cosserat-fv`: run manufactured-solution convergence studies for the two
//! Cosserat discretizations, generate the structured mesh families, and run
//! the structural verification suite.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use cosserat_core::harness::{self, ExampleId, Method, RunConfig};
use cosserat_core::mesh::{self, MeshFamily};
use cosserat_core::solver::SolveMethod;

#[derive(Parser)]
#[command(
    name = "cosserat-fv",
    about = "Finite volume and mixed finite element solvers for linear Cosserat elasticity, \
             driven by manufactured-solution convergence experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a convergence experiment and write its table as CSV.
    Run(RunArgs),
    /// Mesh utilities.
    #[command(subcommand)]
    Mesh(MeshCommand),
    /// Run the structural verification suite (operator identities, patch
    /// test, hand-derived stencil oracle); exits nonzero on any failure.
    Verify,
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Generate a structured mesh family member and write it as plain text.
    Gen(GenArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment: smooth, heterogeneous, or cosserat.
    #[arg(long, value_parser = ExampleId::from_str)]
    example: ExampleId,
    /// Discretization: tpsa, mfem, or both.
    #[arg(long, default_value = "both")]
    method: String,
    /// Coarsest resolution; each level doubles it.
    #[arg(long)]
    base_n: usize,
    /// Number of refinement levels.
    #[arg(long)]
    levels: usize,
    /// Lame parameter sweep for the smooth example (comma separated; `inf`
    /// is accepted). Default: 10,1e2,1e4,1e8.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    lambda: Option<Vec<f64>>,
    /// Stiffness-ratio sweep for the heterogeneous example (comma
    /// separated). Default: 1e4,1e-4.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    kappa: Option<Vec<f64>>,
    /// Mesh family override: uniform, crisscross, interface_half, or
    /// interface_thirds. Default: the example's canonical family.
    #[arg(long, value_parser = MeshFamily::from_str)]
    mesh_family: Option<MeshFamily>,
    /// Linear solver: direct or iterative (iterative applies to the
    /// symmetric mixed systems only).
    #[arg(long, default_value = "direct", value_parser = SolveMethod::from_str)]
    solver: SolveMethod,
    /// Interpret the cosserat example's rotation polynomial as the rotation
    /// stress r = 2 mu r_s instead of the rotation r_s.
    #[arg(long)]
    rotation_is_stress: bool,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    /// Resolution (squares per side before splitting into triangles).
    #[arg(long)]
    n: usize,
    /// Family: uniform, crisscross, interface_half, or interface_thirds.
    #[arg(long, value_parser = MeshFamily::from_str)]
    family: MeshFamily,
    /// Output mesh path.
    #[arg(long)]
    out: PathBuf,
}

fn parse_methods(s: &str) -> anyhow::Result<Vec<Method>> {
    Ok(match s {
        "tpsa" => vec![Method::Tpsa],
        "mfem" => vec![Method::Mfem],
        "both" => vec![Method::Tpsa, Method::Mfem],
        other => bail!("unknown method `{other}` (expected tpsa, mfem, or both)"),
    })
}

fn run(args: RunArgs) -> anyhow::Result<()> {
    let methods = parse_methods(&args.method)?;
    if args.lambda.is_some() && args.example != ExampleId::Smooth {
        bail!("--lambda only applies to the smooth example");
    }
    if args.kappa.is_some() && args.example != ExampleId::Heterogeneous {
        bail!("--kappa only applies to the heterogeneous example");
    }
    if args.rotation_is_stress && args.example != ExampleId::Cosserat {
        bail!("--rotation-is-stress only applies to the cosserat example");
    }
    if args.solver == SolveMethod::Iterative && methods.contains(&Method::Tpsa) {
        bail!(
            "the iterative solver handles symmetric systems only; the finite volume matrices \
             are nonsymmetric (use --solver direct, or --method mfem)"
        );
    }

    let mut config = RunConfig::defaults(args.example);
    config.methods = methods;
    config.base_n = args.base_n;
    config.levels = args.levels;
    if let Some(lambda) = args.lambda {
        config.lambdas = lambda;
    }
    if let Some(kappa) = args.kappa {
        config.kappas = kappa;
    }
    config.family = args.mesh_family;
    config.solver = args.solver;
    config.rotation_is_stress = args.rotation_is_stress;

    let table = harness::run_convergence(&config)?;
    let file = File::create(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let mut out = BufWriter::new(file);
    table.write_csv(&mut out)?;
    out.flush()?;

    // One summary line per (method, parameter) sequence: the last row holds
    // the finest-level errors and final observed orders.
    for chunk in table.rows.chunks(config.levels) {
        let last = match chunk.last() {
            Some(row) => row,
            None => continue,
        };
        let rates = match (last.rate_u, last.rate_sigma) {
            (Some(u), Some(s)) => format!("final rate_u {u:.2}, rate_sigma {s:.2}"),
            _ => "single level, no rates".to_string(),
        };
        println!(
            "{}/{} {}={}: e_u {:.3e}, e_sigma {:.3e}, {}",
            last.example,
            last.method.name(),
            last.param_name,
            last.param_value,
            last.e_u,
            last.e_sigma,
            rates
        );
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn mesh_gen(args: GenArgs) -> anyhow::Result<()> {
    let mesh = mesh::generate_structured(args.family, args.n)?;
    mesh::write_mesh(&mesh, &args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    let report = mesh.angle_report();
    println!(
        "wrote {} ({} vertices, {} cells; angles {:.1}-{:.1} deg, {} obtuse)",
        args.out.display(),
        mesh.n_vertices(),
        mesh.n_cells(),
        report.min_deg,
        report.max_deg,
        report.obtuse_cells,
    );
    Ok(())
}

fn verify() -> anyhow::Result<()> {
    let report = harness::verify_suite();
    for check in &report.checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!("{status}  {:<34} {}", check.name, check.detail);
    }
    if !report.passed() {
        bail!("verification failed");
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Mesh(MeshCommand::Gen(args)) => mesh_gen(args),
        Command::Verify => verify(),
    }
}
