//! Command-line front end. Every subcommand is a thin shell over the
//! library; exit codes are 0 for success/accept/yes, 1 for reject/no or a
//! failed computation, 2 for malformed input.

use crate::barycenter::{
    decide_scmp, solve_1d, solve_exact, solve_two_measures, uc3p_bruteforce, BarycenterResult,
};
use crate::error::Error;
use crate::formats;
use crate::measures::{random_instance, square_instance, ProblemInstance};
use crate::pattern::{decode_matching, detect_alternating};
use crate::rational::{format_rational, parse_rational};
use crate::reduction::{
    build_gadget, emit_uc3p, induced_graph, layout_rectilinear, scale_layout,
};
use crate::svg::{plot_gadget, plot_instance};
use crate::verify::verify_scmp_certificate;
use clap::{Args, Parser, Subcommand};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

const DEFAULT_CAP: u64 = 200_000;
const CAP_ENV: &str = "WBARY_CAP";

#[derive(Parser)]
#[command(
    name = "wbary",
    about = "Exact rational toolkit for discrete Wasserstein barycenters",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate problem instances.
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
    /// Solve a barycenter instance (auto-dispatches to the d = 1 and m = 2
    /// special cases).
    Solve(SolveArgs),
    /// Verify a combination-measure certificate against sparsity and cost
    /// bounds.
    Verify(VerifyArgs),
    /// Compute an optimal transport plan for a fixed candidate support.
    Plan(PlanArgs),
    /// Compile a planar matching instance into a uniform 3-measure instance.
    Reduce(ReduceArgs),
    /// Decode a certificate on a compiled instance back into a matching.
    Decode(DecodeArgs),
    /// Decide the bounded-sparsity, bounded-cost questions.
    Decide {
        #[command(subcommand)]
        what: DecideCommand,
    },
    /// Render an instance or gadget as SVG.
    Plot(PlotArgs),
}

#[derive(Subcommand)]
enum GenCommand {
    /// Two measures on opposite corners of a square.
    Square {
        #[arg(long, default_value = "6")]
        side: String,
        /// Mass on each corner; the remainder goes to a far shared point.
        #[arg(long, default_value = "1/2")]
        corner_mass: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Uniform random instance with integer coordinates.
    Random {
        /// Comma-separated support sizes, one per measure.
        #[arg(long)]
        sizes: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 10)]
        coord_bound: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SolveArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Write the barycenter as a combination-measure file.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    cap: Option<u64>,
    /// Cross-check special-case solvers against the full linear program.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    certificate: PathBuf,
    #[arg(long)]
    n_bound: usize,
    /// Cost bound as an exact rational, e.g. 50/9.
    #[arg(long)]
    phi: String,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Candidate measure file.
    #[arg(short, long)]
    measure: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ReduceArgs {
    /// Planar matching instance file.
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1000)]
    scale: i64,
    /// Externally supplied rectilinear layout (pre-scaling).
    #[arg(long)]
    layout_in: Option<PathBuf>,
    /// Where to write the compiled instance.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    gadget_out: Option<PathBuf>,
    #[arg(long)]
    layout_out: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(short, long)]
    gadget: PathBuf,
    #[arg(short, long)]
    certificate: PathBuf,
    /// The matching instance the gadget was compiled from.
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum DecideCommand {
    /// Does a combination measure with at most N tuples and cost at most
    /// phi exist?
    Scmp {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        n_bound: usize,
        #[arg(long)]
        phi: String,
        #[arg(long)]
        cap: Option<u64>,
        #[arg(short, long)]
        witness: Option<PathBuf>,
    },
    /// Uniform 3-measure decision at N = n by exhaustive matching search.
    Uc3p {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        phi: String,
        #[arg(short, long)]
        witness: Option<PathBuf>,
    },
}

#[derive(Args)]
struct PlotArgs {
    /// Instance file to draw.
    #[arg(short, long, conflicts_with = "gadget")]
    input: Option<PathBuf>,
    /// Gadget file to draw.
    #[arg(short, long)]
    gadget: Option<PathBuf>,
    /// Combination measure to shade on a gadget.
    #[arg(short, long)]
    certificate: Option<PathBuf>,
    #[arg(short, long)]
    output: PathBuf,
}

pub fn run(args: &[String], out: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version with success exit codes
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Parse(_)
        | Error::Io(_)
        | Error::InvalidInstance(_)
        | Error::InvalidCombination(_)
        | Error::InvalidPlan(_)
        | Error::InvalidP3dm(_)
        | Error::InvalidGadget(_)
        | Error::InvalidLayout(_)
        | Error::InvalidCover(_)
        | Error::MarginalViolation { .. }
        | Error::IndexOutOfRange(_)
        | Error::DimensionMismatch(_)
        | Error::NonPlanar(_)
        | Error::Precondition(_) => 2,
        Error::TupleCapExceeded { .. }
        | Error::ScanCapExceeded { .. }
        | Error::SearchGuardExceeded { .. }
        | Error::BudgetExhausted { .. }
        | Error::LayoutFailed(_)
        | Error::RoutingFailed { .. } => 1,
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

/// Atomic write: temp file in the target directory, then rename.
fn write_atomic(path: &Path, content: &str) -> Result<(), Error> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => tempfile::NamedTempFile::new_in(d)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    tmp.write_all(content.as_bytes())?;
    tmp.persist(path)
        .map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn effective_cap(cli_cap: Option<u64>) -> u64 {
    cli_cap
        .or_else(|| {
            std::env::var(CAP_ENV)
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(DEFAULT_CAP)
}

fn load_instance(path: &Path) -> Result<ProblemInstance, Error> {
    let inst = formats::instance_from_json(&read(path)?)?;
    let report = inst.validate();
    if !report.is_valid() {
        return Err(Error::InvalidInstance(report.issues.join("; ")));
    }
    Ok(inst)
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32, Error> {
    match cli.command {
        Command::Gen { what } => gen(what, out),
        Command::Solve(args) => solve(args, out),
        Command::Verify(args) => verify(args, out),
        Command::Plan(args) => plan(args, out),
        Command::Reduce(args) => reduce(args, out),
        Command::Decode(args) => decode(args, out),
        Command::Decide { what } => decide(what, out),
        Command::Plot(args) => plot(args, out),
    }
}

fn emit(out: &mut dyn Write, path: &Option<PathBuf>, content: &str) -> Result<(), Error> {
    match path {
        Some(p) => write_atomic(p, content),
        None => {
            out.write_all(content.as_bytes())?;
            Ok(())
        }
    }
}

fn gen(what: GenCommand, out: &mut dyn Write) -> Result<i32, Error> {
    let (inst, output) = match what {
        GenCommand::Square {
            side,
            corner_mass,
            output,
        } => (
            square_instance(&parse_rational(&side)?, &parse_rational(&corner_mass)?)?,
            output,
        ),
        GenCommand::Random {
            sizes,
            dim,
            coord_bound,
            seed,
            output,
        } => {
            let sizes: Vec<usize> = sizes
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad size {s:?}")))
                })
                .collect::<Result<_, _>>()?;
            if sizes.is_empty() || sizes.contains(&0) || dim == 0 {
                return Err(Error::Parse("sizes and dim must be positive".into()));
            }
            (random_instance(&sizes, dim, coord_bound, seed), output)
        }
    };
    emit(out, &output, &formats::instance_to_json(&inst))?;
    Ok(0)
}

fn solve(args: SolveArgs, out: &mut dyn Write) -> Result<i32, Error> {
    let inst = load_instance(&args.input)?;
    let cap = effective_cap(args.cap);
    let (result, method): (BarycenterResult, &str) = if inst.dim() == 1 {
        (solve_1d(&inst)?, "1d-sweep")
    } else if inst.num_measures() == 2 {
        (solve_two_measures(&inst)?, "transportation")
    } else {
        (solve_exact(&inst, cap)?, "lp")
    };
    if args.check && method != "lp" {
        let full = solve_exact(&inst, cap)?;
        if full.value != result.value {
            return Err(Error::InvalidInstance(format!(
                "solver cross-check failed: {} vs {}",
                format_rational(&result.value),
                format_rational(&full.value)
            )));
        }
        writeln!(out, "check ok")?;
    }
    writeln!(out, "method {method}")?;
    writeln!(out, "value {}", format_rational(&result.value))?;
    writeln!(out, "support {}", result.support_size)?;
    if let Some(path) = &args.output {
        write_atomic(path, &formats::combination_to_json(&result.measure))?;
    }
    Ok(0)
}

fn verify(args: VerifyArgs, out: &mut dyn Write) -> Result<i32, Error> {
    let inst = load_instance(&args.input)?;
    let cert = formats::combination_from_json(&read(&args.certificate)?)?;
    let phi = parse_rational(&args.phi)?;
    let report = verify_scmp_certificate(&cert, &inst, args.n_bound, &phi)?;
    let json = formats::report_to_json(&report);
    match &args.report {
        Some(path) => write_atomic(path, &json)?,
        None => writeln!(out, "{json}")?,
    }
    Ok(if report.accepted() { 0 } else { 1 })
}

fn plan(args: PlanArgs, out: &mut dyn Write) -> Result<i32, Error> {
    let inst = load_instance(&args.input)?;
    let candidate = formats::measure_from_json(&read(&args.measure)?, inst.dim())?;
    let (plan, value) = crate::verify::optimal_plan_for_support(&candidate, &inst)?;
    let (non_splitting, _) = crate::verify::is_non_mass_splitting(&plan);
    writeln!(out, "value {}", format_rational(&value))?;
    writeln!(
        out,
        "non-mass-splitting {}",
        if non_splitting { "yes" } else { "no" }
    )?;
    if let Some(path) = &args.output {
        write_atomic(path, &formats::plan_to_json(&plan))?;
    }
    Ok(0)
}

fn reduce(args: ReduceArgs, out: &mut dyn Write) -> Result<i32, Error> {
    let p = formats::p3dm_from_json(&read(&args.input)?)?;
    let graph = induced_graph(&p)?;
    let layout = match &args.layout_in {
        Some(path) => formats::layout_from_json(&read(path)?, &graph, &p)?,
        None => layout_rectilinear(&graph)?,
    };
    let scaled = scale_layout(&layout, args.scale)?;
    let gadget = build_gadget(&scaled, &p)?;
    let inst = emit_uc3p(&gadget)?;
    writeln!(out, "n {}", gadget.n)?;
    writeln!(out, "triangles {}", gadget.triangles.len())?;
    if let Some(path) = &args.output {
        write_atomic(path, &formats::instance_to_json(&inst))?;
    }
    if let Some(path) = &args.gadget_out {
        write_atomic(path, &formats::gadget_to_json(&gadget))?;
    }
    if let Some(path) = &args.layout_out {
        write_atomic(path, &formats::layout_to_json(&scaled, &graph, &p))?;
    }
    Ok(0)
}

fn decode(args: DecodeArgs, out: &mut dyn Write) -> Result<i32, Error> {
    let gadget = formats::gadget_from_json(&read(&args.gadget)?)?;
    let cert = formats::combination_from_json(&read(&args.certificate)?)?;
    let p = formats::p3dm_from_json(&read(&args.input)?)?;
    match detect_alternating(&gadget, &cert) {
        Ok(pattern) => {
            let cover = decode_matching(&pattern, &p)?;
            let json = formats::cover_to_json(&cover, &p);
            emit(out, &args.output, &json)?;
            Ok(0)
        }
        Err(violation) => {
            writeln!(out, "violation: {violation}")?;
            Ok(1)
        }
    }
}

fn decide(what: DecideCommand, out: &mut dyn Write) -> Result<i32, Error> {
    let (decision, witness_path) = match what {
        DecideCommand::Scmp {
            input,
            n_bound,
            phi,
            cap,
            witness,
        } => {
            let inst = load_instance(&input)?;
            let phi = parse_rational(&phi)?;
            (
                decide_scmp(&inst, n_bound, &phi, effective_cap(cap))?,
                witness,
            )
        }
        DecideCommand::Uc3p {
            input,
            phi,
            witness,
        } => {
            let inst = load_instance(&input)?;
            let phi = parse_rational(&phi)?;
            (uc3p_bruteforce(&inst, &phi)?, witness)
        }
    };
    writeln!(out, "{}", if decision.yes { "yes" } else { "no" })?;
    if let (Some(path), Some(w)) = (witness_path, &decision.witness) {
        write_atomic(&path, &formats::combination_to_json(w))?;
    }
    Ok(if decision.yes { 0 } else { 1 })
}

fn plot(args: PlotArgs, _out: &mut dyn Write) -> Result<i32, Error> {
    let svg = match (&args.input, &args.gadget) {
        (Some(path), None) => {
            let inst = load_instance(path)?;
            plot_instance(&inst)?
        }
        (None, Some(path)) => {
            let gadget = formats::gadget_from_json(&read(path)?)?;
            let cert = match &args.certificate {
                Some(c) => Some(formats::combination_from_json(&read(c)?)?),
                None => None,
            };
            plot_gadget(&gadget, cert.as_ref())?
        }
        _ => {
            return Err(Error::Parse(
                "plot needs exactly one of --input or --gadget".into(),
            ))
        }
    };
    write_atomic(&args.output, &svg)?;
    Ok(0)
}
