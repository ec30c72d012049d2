//! `qxform` — synthesize, lower, simulate, verify and count the transform
//! circuits exposed by the `qxform` library.
//!
//! Exit codes: 0 success, 2 usage or malformed input, 3 verification
//! failure (oracle mismatch or ancilla leak), 1 internal failure.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use qxform::analyze::{self, CountMode};
use qxform::format;
use qxform::ir::Circuit;
use qxform::lower::{LowerOptions, lower_circuit};
use qxform::simulate::{self, SimError, StateVector};
use qxform::synth::{QftPermStyle, SynthRequest, Transform, build_qft_with};

/// Seed used when `--seed` is not given.
const DEFAULT_SEED: u64 = 42;
/// Verification tolerance when `--tolerance` is not given.
const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Parser)]
#[command(
    name = "qxform",
    version,
    about = "Quantum circuits for fast unitary transforms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a transform circuit and write it as qc-text.
    Synth(SynthArgs),
    /// Check a circuit against its transform's dense oracle.
    Verify(VerifyArgs),
    /// Dump an oracle matrix, or the extracted matrix of a circuit file.
    Matrix(MatrixArgs),
    /// Run a circuit on an input state; optionally sample measurements.
    Sim(SimArgs),
    /// Print gate-count tables and growth fits for a transform.
    Count(CountArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// Transform family: dft, walsh, slant or hartley.
    #[arg(long, value_parser = Transform::from_str)]
    transform: Transform,
    /// Qubit count.
    #[arg(long)]
    n: usize,
    /// Lower the circuit to elementary gates.
    #[arg(long)]
    lower: bool,
    /// Lower all the way to controlled NOTs and single-qubit gates
    /// (implies --lower).
    #[arg(long)]
    strict_elementary: bool,
    /// Emit the Fourier wire permutations level by level instead of one
    /// trailing bit reversal.
    #[arg(long)]
    figure_perms: bool,
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    build: BuildArgs,
    /// Output file (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    build: BuildArgs,
    /// Verify this qc-text file instead of a freshly synthesized circuit.
    #[arg(long)]
    circuit: Option<PathBuf>,
    /// Max-entry tolerance for the oracle comparison.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
}

#[derive(Args)]
struct MatrixArgs {
    /// Oracle to dump (with --n).
    #[arg(long, value_parser = Transform::from_str)]
    transform: Option<Transform>,
    #[arg(long)]
    n: Option<usize>,
    /// Extract the matrix of this qc-text circuit instead.
    #[arg(long)]
    circuit: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    /// Circuit to run (qc-text).
    #[arg(long)]
    circuit: PathBuf,
    /// Start from this basis state.
    #[arg(long)]
    basis: Option<usize>,
    /// Start from this vec-text state file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Write the output state here (stdout when omitted and not sampling).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Sample this many measurements of the output state.
    #[arg(long)]
    shots: Option<u64>,
    /// Seed for the measurement sampler.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long, value_parser = Transform::from_str)]
    transform: Transform,
    /// Largest qubit count to profile (lowered modes cap at 10).
    #[arg(long, default_value_t = 8)]
    n_max: usize,
}

enum CliError {
    /// Bad arguments or malformed input files.
    Usage(String),
    /// The circuit does not match the oracle (or leaks into its ancillas).
    Verification(String),
    /// Everything else.
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Internal(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Verification(m) | CliError::Internal(m) => m,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// 17 significant digits, matching the file formats.
fn fmt_f(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

fn read_file(path: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(output: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn build_circuit(args: &BuildArgs) -> Result<Circuit, CliError> {
    let request = SynthRequest {
        transform: args.transform,
        n: args.n,
        lower: args.lower || args.strict_elementary,
    };
    let circuit = match (request.transform, args.figure_perms) {
        (Transform::Dft, true) => build_qft_with(request.n, QftPermStyle::PerLevelRotations),
        _ => request.transform.build(request.n),
    }
    .map_err(usage)?;
    if request.lower {
        let opts = if args.strict_elementary {
            LowerOptions::strict()
        } else {
            LowerOptions::default()
        };
        let (lowered, _) = lower_circuit(&circuit, opts).map_err(usage)?;
        Ok(lowered)
    } else {
        Ok(circuit)
    }
}

fn extract(circuit: &Circuit) -> Result<simulate::Extraction, CliError> {
    simulate::extract_matrix(circuit).map_err(|e| match e {
        SimError::AncillaLeak { .. } => CliError::Verification(e.to_string()),
        other => usage(other),
    })
}

fn cmd_synth(args: &SynthArgs) -> Result<(), CliError> {
    let circuit = build_circuit(&args.build)?;
    let text = format::write_circuit(&circuit).map_err(|e| CliError::Internal(e.to_string()))?;

    // Counts in all three modes, from the un-lowered build.
    let high = args.build.transform.build(args.build.n).map_err(usage)?;
    let mut counts = format!(
        "gates: high-level={}",
        analyze::count_gates(&high, CountMode::HighLevel).map_err(usage)?
    );
    for (mode, opts) in [
        (CountMode::Lowered, LowerOptions::default()),
        (CountMode::StrictElementary, LowerOptions::strict()),
    ] {
        let (lowered, report) = lower_circuit(&high, opts).map_err(usage)?;
        let count = analyze::count_gates(&lowered, mode).map_err(usage)?;
        write!(
            counts,
            " {}={count} (ancillas {})",
            mode.label(),
            report.ancillas_used
        )
        .unwrap();
    }
    eprintln!("{counts}");

    emit(args.output.as_ref(), &text)
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let circuit = match &args.circuit {
        Some(path) => {
            let parsed = format::parse_circuit(&read_file(path)?).map_err(usage)?;
            if args.build.lower || args.build.strict_elementary {
                let opts = if args.build.strict_elementary {
                    LowerOptions::strict()
                } else {
                    LowerOptions::default()
                };
                lower_circuit(&parsed, opts).map_err(usage)?.0
            } else {
                parsed
            }
        }
        None => build_circuit(&args.build)?,
    };
    if circuit.data_qubits() != args.build.n {
        return Err(CliError::Verification(format!(
            "circuit acts on {} data qubits, expected {}",
            circuit.data_qubits(),
            args.build.n
        )));
    }
    let oracle = args.build.transform.oracle(args.build.n).map_err(usage)?;
    let extraction = extract(&circuit)?;
    let (row, col, err) = extraction.matrix.worst_entry_diff(&oracle);
    let ok = err < args.tolerance;
    println!(
        "verify transform={} n={} gates={} max-entry-error={} ancilla-residual={} tolerance={} => {}",
        args.build.transform,
        args.build.n,
        circuit.len(),
        fmt_f(err),
        fmt_f(extraction.max_ancilla_residual),
        fmt_f(args.tolerance),
        if ok { "PASS" } else { "FAIL" },
    );
    if !ok {
        let got = extraction.matrix.get(row, col);
        let want = oracle.get(row, col);
        return Err(CliError::Verification(format!(
            "worst entry ({row},{col}): circuit {} + {}i, oracle {} + {}i",
            fmt_f(got.re),
            fmt_f(got.im),
            fmt_f(want.re),
            fmt_f(want.im),
        )));
    }
    Ok(())
}

fn cmd_matrix(args: &MatrixArgs) -> Result<(), CliError> {
    let matrix = match (&args.circuit, args.transform, args.n) {
        (Some(path), _, _) => {
            extract(&format::parse_circuit(&read_file(path)?).map_err(usage)?)?.matrix
        }
        (None, Some(transform), Some(n)) => transform.oracle(n).map_err(usage)?,
        _ => {
            return Err(usage(
                "matrix needs either --circuit FILE or --transform T --n N",
            ));
        }
    };
    emit(args.output.as_ref(), &format::write_matrix(&matrix))
}

fn cmd_sim(args: &SimArgs) -> Result<(), CliError> {
    let circuit = format::parse_circuit(&read_file(&args.circuit)?).map_err(usage)?;
    let input = match (args.basis, &args.input) {
        (Some(k), None) => StateVector::basis(circuit.data_qubits(), k).map_err(usage)?,
        (None, Some(path)) => format::parse_state(&read_file(path)?).map_err(usage)?,
        _ => return Err(usage("sim needs exactly one of --basis K or --input FILE")),
    };
    let out = simulate::run(&circuit, &input).map_err(usage)?;

    if args.output.is_some() || args.shots.is_none() {
        emit(args.output.as_ref(), &format::write_state(&out))?;
    }
    if let Some(shots) = args.shots {
        let counts = simulate::sample_counts(&out, shots, args.seed);
        println!("shots {shots} seed {}", args.seed);
        println!("index\tbitstring\tcount\tfrequency");
        let width = out.qubits();
        for (index, count) in counts {
            println!(
                "{index}\t{index:0width$b}\t{count}\t{}",
                fmt_f(count as f64 / shots as f64)
            );
        }
    }
    Ok(())
}

fn cmd_count(args: &CountArgs) -> Result<(), CliError> {
    analyze::check_recurrence(args.transform, args.n_max).map_err(usage)?;
    let profiles = analyze::full_profiles(args.transform, args.n_max).map_err(usage)?;
    print!("{}", analyze::render_table(&profiles));
    for p in &profiles {
        println!(
            "# fit {}: count ~ c*n^p with p={} c={} residual={} quadratic-bound-C={}",
            p.mode.label(),
            fmt_f(p.fit.exponent),
            fmt_f(p.fit.coefficient),
            fmt_f(p.fit.residual),
            fmt_f(p.quadratic_bound()),
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    // Die quietly when a pager or `head` closes the pipe.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Synth(args) => cmd_synth(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Matrix(args) => cmd_matrix(args),
        Command::Sim(args) => cmd_sim(args),
        Command::Count(args) => cmd_count(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
