//! `clockham` command-line tool.

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use clockham::format::{parse_circuit_file, parse_state_file, parse_truth_table_file};
use clockham::hamiltonian::TermDump;
use clockham::revcomp::end_to_end_instance;
use clockham::spectral::{report_for, GapOptions, MethodChoice, SpectralReport, Verdict};
use clockham::verifier::MonteCarloSummary;
use clockham::{Bits, Circuit, CircuitHamiltonian, ClockedState, Verifier};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "clockham",
    version,
    about = "Clock Hamiltonians for quantum circuits: spectral gaps and verifier simulation"
)]
struct Cli {
    /// Output style.
    #[arg(long, value_enum, global = true, default_value_t = OutputFormat::Human)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Human,
    /// A single JSON document carrying `"schema": 1`.
    Structured,
}

#[derive(clap::Args, Debug)]
struct Instance {
    /// Circuit file (JSON).
    #[arg(short, long)]
    circuit: PathBuf,
    /// Classical input bits, e.g. `01`.
    #[arg(short = 'x', long)]
    input: String,
    /// Omit the ancilla initialization penalties (K = n).
    #[arg(long)]
    paper_literal: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Dense,
    Iterative,
    Auto,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the Hamiltonian terms of an instance.
    Build {
        #[command(flatten)]
        instance: Instance,
        /// Include each term's dense matrix as [re, im] pairs (row-major).
        #[arg(long)]
        dense: bool,
    },
    /// Ground energy and promise-gap verdict. Exits 1 if the energy falls inside the gap.
    Spectrum {
        #[command(flatten)]
        instance: Instance,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        /// Residual tolerance of the iterative solver.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Cap on matrix-vector products for the iterative solver.
        #[arg(long, default_value_t = 20_000)]
        max_iter: usize,
        /// Seed of the iterative start vector.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact rejection probability of a proof and, optionally, seeded verifier shots.
    Verify {
        #[command(flatten)]
        instance: Instance,
        /// `history`, `zero`, or a JSON file of [re, im] amplitudes.
        #[arg(long, default_value = "history")]
        proof: String,
        /// Number of verifier shots to simulate.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compile a truth table and report the gap on every input.
    DemoRevcomp {
        /// Truth-table file (JSON with `arity` and `values`).
        #[arg(long)]
        table: PathBuf,
    },
}

/// An input or computation error; reported on stderr with exit code 2.
struct Failure(String);

impl From<clockham::Error> for Failure {
    fn from(e: clockham::Error) -> Self {
        Failure(e.to_string())
    }
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    schema: u32,
    command: &'a str,
    #[serde(flatten)]
    body: T,
}

fn emit<T: Serialize>(format: OutputFormat, command: &str, body: &T, human: impl FnOnce() -> String) {
    let text = match format {
        OutputFormat::Human => human(),
        OutputFormat::Structured => {
            let doc = Document {
                schema: 1,
                command,
                body,
            };
            serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
        }
    };
    // a closed pipe downstream is not an error worth reporting
    let _ = io::stdout().lock().write_all(text.as_bytes());
}

fn load_instance(args: &Instance) -> Result<(Circuit, Bits, CircuitHamiltonian), Failure> {
    let circuit = load_circuit(&args.circuit)?;
    let x: Bits = args.input.parse()?;
    circuit.check_input(&x)?;
    let h = CircuitHamiltonian::build(&circuit, &x, !args.paper_literal)?;
    Ok((circuit, x, h))
}

fn load_circuit(path: &Path) -> Result<Circuit, Failure> {
    parse_circuit_file(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn build(format: OutputFormat, args: &Instance, dense: bool) -> Result<ExitCode, Failure> {
    let (_, _, h) = load_instance(args)?;
    let dump: TermDump = h.dump(dense)?;
    emit(format, "build", &dump, || {
        let mut out = format!(
            "S = {}, n = {}, T = {}, x = {}, ancilla checks {}, dim = {}\n",
            dump.qubits,
            dump.input_bits,
            dump.steps,
            dump.input,
            if dump.ancilla_checks { "on" } else { "off" },
            dump.dim
        );
        for term in &dump.terms {
            match term.index {
                Some(i) => out.push_str(&format!("{}({i})\n", term.tag)),
                None => out.push_str(&format!("{}\n", term.tag)),
            }
            if let Some(m) = &term.matrix {
                let n = dump.dim;
                for row in m.chunks(n) {
                    let cells: Vec<String> = row.iter().map(|[re, im]| format_complex(*re, *im)).collect();
                    out.push_str(&format!("  {}\n", cells.join(" ")));
                }
            }
        }
        out
    });
    Ok(ExitCode::SUCCESS)
}

fn format_complex(re: f64, im: f64) -> String {
    if im == 0.0 {
        format!("{re:>6.3}")
    } else {
        format!("{re:.3}{im:+.3}i")
    }
}

fn human_report(r: &SpectralReport) -> String {
    format!(
        "lambda_min  {:.6e}\nbound       {:.6e}\nverdict     {}\nmethod      {}\niterations  {}\nresidual    {:.3e}\ndims        S={} T={} n={} K={}\n",
        r.lambda_min,
        r.bound,
        r.verdict,
        r.method,
        r.iterations,
        r.residual,
        r.dims.qubits,
        r.dims.steps,
        r.dims.n,
        r.dims.input_checks
    )
}

fn spectrum(format: OutputFormat, args: &Instance, opts: GapOptions) -> Result<ExitCode, Failure> {
    let (_, _, h) = load_instance(args)?;
    let report = report_for(&h, &opts)?;
    emit(format, "spectrum", &report, || human_report(&report));
    Ok(if report.verdict == Verdict::Violation {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

#[derive(Serialize)]
struct VerifyReport {
    proof: String,
    slots: usize,
    energy: f64,
    exact_rejection: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    monte_carlo: Option<MonteCarloSummary>,
}

fn load_proof(source: &str, h: &CircuitHamiltonian) -> Result<ClockedState, Failure> {
    match source {
        "history" => Ok(h.history_state()),
        "zero" => Ok(ClockedState::basis(h.num_qubits(), h.num_steps(), 0, 0)),
        path => {
            parse_state_file(path, h.num_qubits(), h.num_steps()).map_err(|e| Failure(format!("proof {path}: {e}")))
        }
    }
}

fn verify(
    format: OutputFormat,
    args: &Instance,
    proof: &str,
    samples: Option<u64>,
    seed: u64,
) -> Result<ExitCode, Failure> {
    if samples == Some(0) {
        return Err(Failure("--samples must be positive".into()));
    }
    let (_, _, h) = load_instance(args)?;
    let psi = load_proof(proof, &h)?;
    let v = Verifier::new(&h);
    let energy = h.energy(&psi)?;
    let exact = v.rejection_probability_exact(&psi)?;
    let monte_carlo = samples.map(|n| v.monte_carlo(&psi, n, seed)).transpose()?;
    let report = VerifyReport {
        proof: proof.to_string(),
        slots: v.num_slots(),
        energy,
        exact_rejection: exact,
        monte_carlo,
    };
    emit(format, "verify", &report, || {
        let mut out = format!(
            "proof             {}\nslots             {}\nenergy            {:.6e}\nexact rejection   {:.6e}\n",
            report.proof, report.slots, report.energy, report.exact_rejection
        );
        if let Some(mc) = &report.monte_carlo {
            out.push_str(&format!(
                "shots             {} (seed {})\nrejections        {}\nempirical rate    {:.6} ± {:.6}\ndigest            {}\n",
                mc.samples, mc.seed, mc.rejections, mc.reject_rate, mc.stderr, mc.transcript_digest
            ));
            out.push_str("slot histogram (y, slot, draws, rejections)\n");
            for c in &mc.histogram {
                out.push_str(&format!(
                    "  {:>4}  {:<16} {:>10} {:>10}\n",
                    c.y,
                    c.slot.to_string(),
                    c.draws,
                    c.rejections
                ));
            }
        }
        out
    });
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct GapRow {
    input: String,
    value: bool,
    report: SpectralReport,
    /// The verdict is completeness-like exactly when `f(x) = 1`.
    consistent: bool,
}

#[derive(Serialize)]
struct RevcompReport {
    arity: usize,
    qubits: usize,
    steps: usize,
    rows: Vec<GapRow>,
}

fn demo_revcomp(format: OutputFormat, table: &Path) -> Result<ExitCode, Failure> {
    let f = parse_truth_table_file(table).map_err(|e| Failure(format!("{}: {e}", table.display())))?;
    let m = f.arity();
    let mut rows = Vec::with_capacity(1 << m);
    for k in 0..1usize << m {
        let x = Bits::from_index(k, m);
        let value = f.eval(&x)?;
        let (_, report) = end_to_end_instance(&f, &x)?;
        let consistent = (report.verdict == Verdict::CompletenessLike) == value;
        rows.push(GapRow {
            input: x.to_string(),
            value,
            report,
            consistent,
        });
    }
    let dims = rows[0].report.dims;
    let ok = rows
        .iter()
        .all(|r| r.consistent && r.report.verdict != Verdict::Violation);
    let report = RevcompReport {
        arity: m,
        qubits: dims.qubits,
        steps: dims.steps,
        rows,
    };
    emit(format, "demo-revcomp", &report, || {
        let mut out = format!(
            "arity {}, S = {}, T = {}, bound = {:.6e}\n",
            m, dims.qubits, dims.steps, report.rows[0].report.bound
        );
        out.push_str(&format!(
            "{:<w$}  f  {:>13}  {:<17}  ok\n",
            "x",
            "lambda_min",
            "verdict",
            w = m.max(1)
        ));
        for r in &report.rows {
            out.push_str(&format!(
                "{:<w$}  {}  {:>13.6e}  {:<17}  {}\n",
                r.input,
                r.value as u8,
                r.report.lambda_min,
                r.report.verdict.to_string(),
                if r.consistent { "yes" } else { "NO" },
                w = m.max(1)
            ));
        }
        out
    });
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match &cli.command {
        Command::Build { instance, dense } => build(cli.format, instance, *dense),
        Command::Spectrum {
            instance,
            method,
            tol,
            max_iter,
            seed,
        } => {
            let opts = GapOptions {
                method: match method {
                    MethodArg::Dense => MethodChoice::Dense,
                    MethodArg::Iterative => MethodChoice::Iterative,
                    MethodArg::Auto => MethodChoice::Auto,
                },
                include_ancilla_checks: !instance.paper_literal,
                tol: *tol,
                max_iter: *max_iter,
                seed: *seed,
            };
            spectrum(cli.format, instance, opts)
        }
        Command::Verify {
            instance,
            proof,
            samples,
            seed,
        } => verify(cli.format, instance, proof, *samples, *seed),
        Command::DemoRevcomp { table } => demo_revcomp(cli.format, table),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
