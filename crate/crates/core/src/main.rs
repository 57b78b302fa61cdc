use std::io::Read;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde_json::json;

use dualbimod::bimodule::{hom_space, tensor, BimoduleJson};
use dualbimod::canonical::matrix_strings;
use dualbimod::cells::{self, CellCalculus, MAX_LEVEL};
use dualbimod::decompose::{decompose, shuffled, DecompositionResult};
use dualbimod::{actmat, suite, Label, QBimodule, Scalar};

// Writes that fail (e.g. a closed pipe) are ignored rather than panicking.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! out_raw {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESIDUAL: u8 = 3;

/// Exact computations with bimodules over the dual numbers k[x]/(x²).
///
/// Labels: D | DxD | W:k | S:k | N:k | M:k | B:k:p/q
#[derive(Parser)]
#[command(name = "dualbimod", version)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Catalog level m: the identity plus all cells down to J_m.
    #[arg(long, global = true, default_value_t = suite::DEFAULT_LEVEL)]
    level: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the bimodule with the given label as JSON.
    Construct { label: String },
    /// Tensor two labelled bimodules over D.
    Tensor {
        lhs: String,
        rhs: String,
        /// List the indecomposable summands.
        #[arg(long)]
        decompose: bool,
        /// Drop summands in cells strictly above this one (Jsplit, J0, J1, ..., Jid).
        #[arg(long, requires = "decompose")]
        mod_cell: Option<String>,
    },
    /// Dimension and basis of Hom(lhs, rhs).
    Hom { lhs: String, rhs: String },
    /// Decompose a sum of labels (`M:1+S:2`), a JSON file, or `-` for JSON on stdin.
    Decompose {
        input: String,
        /// Apply a seeded random change of basis first.
        #[arg(long)]
        shuffle: Option<u64>,
    },
    /// Two-sided cells, egg-boxes and idempotency at the chosen level.
    Cells {
        /// Print the cell order as a DOT graph.
        #[arg(long)]
        dot: bool,
        /// Print the full multiplication table.
        #[arg(long, conflicts_with = "dot")]
        table: bool,
    },
    /// Run the verification suite.
    Verify {
        /// Run only these checks (an id, or a prefix such as `actmat`).
        #[arg(long)]
        only: Vec<String>,
        /// Include elapsed times; output is then no longer reproducible byte for byte.
        #[arg(long)]
        timings: bool,
    },
    /// Root action matrices and the quadruple search.
    Actmat {
        /// Largest matrix size.
        #[arg(long, default_value_t = actmat::MAX_SIZE)]
        n: usize,
    },
}

enum Failure {
    Usage(String),
    Verification(String),
    Residual(String),
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("DUALBIMOD_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(EXIT_FAIL)
        }
        Err(Failure::Residual(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(EXIT_RESIDUAL)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    if cli.level == 0 || cli.level > MAX_LEVEL {
        return Err(Failure::Usage(format!("unsupported level {}; choose 1..={MAX_LEVEL}", cli.level)));
    }
    match &cli.command {
        Command::Construct { label } => {
            let m = QBimodule::construct(&parse_label(label)?);
            print_json(&serde_json::to_value(m.to_json()).expect("serializable"));
            Ok(())
        }
        Command::Tensor { lhs, rhs, decompose: dec, mod_cell } => {
            let a = Arc::new(QBimodule::construct(&parse_label(lhs)?));
            let b = Arc::new(QBimodule::construct(&parse_label(rhs)?));
            let t = Arc::new(tensor(&a, &b).module);
            if !dec {
                if cli.json {
                    print_json(&serde_json::to_value(t.to_json()).expect("serializable"));
                } else {
                    out!("dim {}", t.dim());
                }
                return Ok(());
            }
            let d = decompose(&t);
            let mut labels = d.labels();
            if let Some(name) = mod_cell {
                let calc = CellCalculus::at_level(cli.level).map_err(|e| Failure::Residual(e.to_string()))?;
                let cell = calc.cells.cell_by_name(name).ok_or_else(|| {
                    let known: Vec<String> = (0..calc.cells.two_sided_cells.len()).map(|c| calc.cells.name(c)).collect();
                    Failure::Usage(format!("unknown cell '{name}'; cells at level {}: {}", cli.level, known.join(", ")))
                })?;
                labels = cells::reduce_mod_higher(&labels, cell, &calc.cells);
            }
            report_decomposition(cli.json, t.dim(), &labels, &d)
        }
        Command::Hom { lhs, rhs } => {
            let a = Arc::new(QBimodule::construct(&parse_label(lhs)?));
            let b = Arc::new(QBimodule::construct(&parse_label(rhs)?));
            let basis = hom_space(&a, &b);
            if cli.json {
                let mats: Vec<_> = basis.iter().map(|h| matrix_strings(h.matrix())).collect();
                print_json(&json!({ "src": lhs, "dst": rhs, "dim": basis.len(), "basis": mats }));
            } else {
                out!("dim Hom({lhs}, {rhs}) = {}", basis.len());
            }
            Ok(())
        }
        Command::Decompose { input, shuffle } => {
            let mut m = read_module(input)?;
            if let Some(seed) = shuffle {
                m = shuffled(&m, *seed);
            }
            let m = Arc::new(m);
            let d = decompose(&m);
            report_decomposition(cli.json, m.dim(), &d.labels(), &d)
        }
        Command::Cells { dot, table } => {
            let calc = CellCalculus::at_level(cli.level).map_err(|e| Failure::Residual(e.to_string()))?;
            if *dot {
                out_raw!("{}", cells::order_dot(&calc.cells));
            } else if *table {
                if cli.json {
                    print_json(&cells::table_json(&calc.table));
                } else {
                    out_raw!("{}", cells::table_grid(&calc.table));
                }
            } else if cli.json {
                print_json(&cells::cells_json(&calc.cells, &calc.idempotent));
            } else {
                out_raw!("{}", cells::cells_report(&calc.cells, &calc.idempotent));
            }
            Ok(())
        }
        Command::Verify { only, timings } => {
            let report = suite::run(cli.level, only).map_err(|e| Failure::Usage(e.to_string()))?;
            if cli.json {
                print_json(&report.to_json(*timings));
            } else {
                out_raw!("{}", report.to_text(*timings));
                let passed = report.checks.len() - report.failing().len();
                out!("{passed}/{} checks passed at level {}", report.checks.len(), report.level);
            }
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Verification(format!("failing checks: {}", report.failing().join(", "))))
            }
        }
        Command::Actmat { n } => {
            let report = actmat::verify_proposition(*n).map_err(|e| Failure::Usage(e.to_string()))?;
            if cli.json {
                print_json(&serde_json::to_value(&report).expect("serializable"));
            } else {
                for (size, roots) in report.roots.iter().enumerate() {
                    let shown: Vec<String> = roots.iter().map(ToString::to_string).collect();
                    out!("n = {}: {} root(s) {}", size + 1, roots.len(), shown.join(" "));
                }
                for s in &report.searches {
                    out!(
                        "F = {}: {} idempotent parts, {} sums, {} after table, {} after zero transfer, {} class(es)",
                        s.f,
                        s.parts,
                        s.sums,
                        s.after_table,
                        s.after_zero_transfer,
                        s.solutions.len()
                    );
                }
                out!("survivors:");
                for q in &report.survivors {
                    out!("  {q:?}");
                }
            }
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Verification("unexpected survivors".into()))
            }
        }
    }
}

fn parse_label(s: &str) -> Result<Label, Failure> {
    s.parse().map_err(|e: dualbimod::label::LabelError| Failure::Usage(e.to_string()))
}

fn read_module(input: &str) -> Result<QBimodule, Failure> {
    let json_text = if input == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).map_err(|e| Failure::Usage(e.to_string()))?;
        Some(buf)
    } else if std::path::Path::new(input).is_file() {
        Some(std::fs::read_to_string(input).map_err(|e| Failure::Usage(format!("{input}: {e}")))?)
    } else {
        None
    };
    match json_text {
        Some(text) => {
            let j: BimoduleJson = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("bad JSON: {e}")))?;
            QBimodule::from_json(&j).map_err(|e| Failure::Usage(e.to_string()))
        }
        None => {
            let parts: Vec<QBimodule> = input
                .split('+')
                .map(|s| parse_label(s.trim()).map(|l| QBimodule::construct(&l)))
                .collect::<Result<_, _>>()?;
            Ok(QBimodule::direct_sum_all(parts.iter()))
        }
    }
}

fn report_decomposition(as_json: bool, dim: usize, labels: &[Label], d: &DecompositionResult<Scalar>) -> Outcome {
    let mut shown: Vec<String> = labels.iter().map(ToString::to_string).collect();
    shown.sort();
    if as_json {
        print_json(&json!({ "dim": dim, "summands": shown, "residual_dim": d.residual_dim() }));
    } else {
        out!("{}", if shown.is_empty() { "0".to_string() } else { shown.join(" + ") });
    }
    match d.residual_dim() {
        0 => Ok(()),
        r => Err(Failure::Residual(format!("residual of dim {r} is not a sum of classified indecomposables"))),
    }
}

fn print_json(v: &serde_json::Value) {
    out!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}
