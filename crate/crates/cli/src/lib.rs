//! The `afsum` command line: builds sums and operators, writes operator
//! documents as JSON and error tables as CSV.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use afsum_core::classics::{
    bessel_j0_prime_sum, bessel_j0_sinc_sum, bessel_j0_sum, error_table, gauss_chebyshev_pipeline, gauss_legendre,
    ErrorRow, Grid, QuadratureRule,
};
use afsum_core::diffop::build_diff_operator_with;
use afsum_core::extrapop::build_extrap_operator_with;
use afsum_core::io::{error_table_csv, fmt17, parse_complex, parse_function_spec, parse_moments, OperatorDocument};
use afsum_core::prony::solve_with;
use afsum_core::regularize::{choose_p, correction_binomial, regularized_interpolant_with, regularized_solution, varied_moments};
use afsum_core::series::{bessel_j0, bessel_j1};
use afsum_core::{AfsumError, Execution, FunctionSpec, MomentSequence, Tolerances, C64};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Amplitude-and-frequency sums, differentiation and extrapolation operators.
#[derive(Debug, Parser)]
#[command(name = "afsum", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Relative pivot threshold of the Hankel and Vandermonde solves.
    #[arg(long, global = true, default_value_t = Tolerances::default().pivot)]
    pivot_tol: f64,
    /// Relative minimum separation for roots to count as distinct.
    #[arg(long, global = true, default_value_t = Tolerances::default().separation)]
    separation_tol: f64,
    /// Relative moment residual accepted after solving.
    #[arg(long, global = true, default_value_t = Tolerances::default().residual)]
    residual_tol: f64,
    /// Evaluate grids on a single thread.
    #[arg(long, global = true)]
    sequential: bool,
}

impl GlobalArgs {
    fn tolerances(&self) -> Tolerances {
        Tolerances {
            pivot: self.pivot_tol,
            separation: self.separation_tol,
            residual: self.residual_tol,
        }
    }

    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }
}

/// Where a function table goes; `--f` and `--grid` are needed together.
#[derive(Debug, Args)]
struct TableArgs {
    /// Test function: exp, cos, sinc, j0, invzm1, poly:c0,c1,... or series:<path>.
    #[arg(long = "f", value_parser = function_arg, requires = "grid")]
    function: Option<FunctionSpec>,
    /// Evaluation grid `start:end:count`.
    #[arg(long, value_parser = grid_arg, requires = "function", allow_hyphen_values = true)]
    grid: Option<Grid>,
    /// Write the error table here instead of standard output.
    #[arg(long, requires = "function")]
    table: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the moment problem in a moments file (or the moments of a document).
    Solve {
        input: PathBuf,
        /// Basis recorded in the document; defaults to the input document's basis, else exp.
        #[arg(long, value_parser = function_arg)]
        basis: Option<FunctionSpec>,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Interpolating sum of `f` over the basis `h`, regularized when needed.
    Interp {
        #[arg(long = "f", value_parser = function_arg)]
        function: FunctionSpec,
        #[arg(long = "h", value_parser = function_arg)]
        basis: FunctionSpec,
        #[arg(short = 'n')]
        n: usize,
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Compare `f` with the sum on `start:end:count`.
        #[arg(long, value_parser = grid_arg, allow_hyphen_values = true)]
        grid: Option<Grid>,
        #[arg(long, requires = "grid")]
        table: Option<PathBuf>,
    },
    /// Universal operator for `z f'(z)`.
    Diff {
        #[arg(short = 'n')]
        n: usize,
        #[arg(short = 'p', value_parser = complex_arg, default_value = "-1", allow_hyphen_values = true)]
        p: C64,
        #[arg(long)]
        emit: Option<PathBuf>,
        #[command(flatten)]
        table: TableArgs,
    },
    /// Universal operator for `f(az)`.
    Extrap {
        #[arg(short = 'n')]
        n: usize,
        #[arg(short = 'a', value_parser = real_arg, allow_hyphen_values = true)]
        a: f64,
        #[arg(short = 'p', value_parser = real_arg, allow_hyphen_values = true)]
        p: f64,
        #[arg(long)]
        emit: Option<PathBuf>,
        #[command(flatten)]
        table: TableArgs,
    },
    /// Gauss rule obtained from its moments, printed as `node,weight` rows.
    Quad {
        #[arg(long, value_enum)]
        rule: Rule,
        #[arg(short = 'n')]
        n: usize,
    },
    /// Error table of a Bessel approximant against J0 or J0'.
    Bessel {
        #[arg(long, value_enum)]
        which: Which,
        #[arg(short = 'n')]
        n: usize,
        #[arg(long, value_parser = grid_arg, allow_hyphen_values = true)]
        grid: Grid,
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Solve the varied moment problem with explicit or automatic `p`, `q`.
    Regularize {
        input: PathBuf,
        #[arg(short = 'p', value_parser = complex_arg, allow_hyphen_values = true)]
        p: Option<C64>,
        #[arg(short = 'q', value_parser = complex_arg, allow_hyphen_values = true)]
        q: Option<C64>,
        #[arg(long, value_parser = function_arg, default_value = "exp")]
        basis: FunctionSpec,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Rule {
    Legendre,
    Chebyshev,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Which {
    J0,
    J0prime,
    J0sinc,
}

fn function_arg(s: &str) -> Result<FunctionSpec, String> {
    parse_function_spec(s).map_err(|e| e.to_string())
}

fn grid_arg(s: &str) -> Result<Grid, String> {
    s.parse().map_err(|e: AfsumError| e.to_string())
}

fn complex_arg(s: &str) -> Result<C64, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

fn real_arg(s: &str) -> Result<f64, String> {
    afsum_core::io::parse_real(s).map_err(|e| e.to_string())
}

/// Parse `args` (program name first), run, and return the exit status:
/// 0 on success, 1 on a computational failure, 2 on a usage error.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "afsum: {e} [{}]", e.verdict());
            1
        }
    }
}

type Outcome = afsum_core::Result<()>;

fn execute(cli: &Cli, out: &mut dyn Write) -> Outcome {
    let tol = cli.global.tolerances();
    let exec = cli.global.execution();
    match &cli.command {
        Command::Solve { input, basis, emit } => {
            let (moments, doc_basis) = read_input(input)?;
            let basis = match (basis, doc_basis) {
                (Some(b), _) => b.clone(),
                (None, Some(name)) => parse_function_spec(&name)?,
                (None, None) => FunctionSpec::Exp,
            };
            let sum = solve_with(&moments, &tol)?.into_sum(basis, None);
            emit_document(&OperatorDocument::from_sum(&sum, &moments, None), emit.as_deref(), out)
        }
        Command::Interp {
            function,
            basis,
            n,
            emit,
            grid,
            table,
        } => {
            check_order(*n, 1)?;
            let (sum, params) = regularized_interpolant_with(function, basis, *n, None, &tol)?;
            let moments = varied_moments(
                &afsum_core::prony::moment_sequence(function, basis, *n)?,
                params.p,
                params.effective_q(),
            );
            let doc = OperatorDocument::from_sum(&sum, &moments, Some(&params));
            let rows = grid
                .map(|g| error_table(|x| function.evaluate(real(x)), |x| sum.evaluate(real(x)), &g, exec))
                .transpose()?;
            finish(&doc, emit.as_deref(), rows.as_deref(), table.as_deref(), out)
        }
        Command::Diff { n, p, emit, table } => {
            let op = build_diff_operator_with(*n, *p, &tol)?;
            let rows = table_rows(table, exec, |f, x| Ok(real(x) * f.derivative_at(real(x))?), |f, x| {
                op.apply(f, real(x))
            })?;
            finish(&OperatorDocument::from_diff(&op), emit.as_deref(), rows.as_deref(), table.table.as_deref(), out)
        }
        Command::Extrap { n, a, p, emit, table } => {
            let op = build_extrap_operator_with(*n, *a, *p, &tol)?;
            let rows = table_rows(table, exec, |f, x| f.evaluate(real(*a * x)), |f, x| op.apply(f, real(x)))?;
            finish(&OperatorDocument::from_extrap(&op), emit.as_deref(), rows.as_deref(), table.table.as_deref(), out)
        }
        Command::Quad { rule, n } => {
            check_order(*n, 1)?;
            let rule = match rule {
                Rule::Legendre => gauss_legendre(*n)?,
                Rule::Chebyshev => gauss_chebyshev_pipeline(*n)?,
            };
            out.write_all(quadrature_csv(&rule).as_bytes())?;
            Ok(())
        }
        Command::Bessel { which, n, grid, table } => {
            check_order(*n, 1)?;
            let rows = match which {
                Which::J0 => {
                    let h = bessel_j0_sum(*n);
                    error_table(|x| Ok(bessel_j0(real(x))), |x| Ok(real(h.eval(x))), grid, exec)?
                }
                Which::J0prime => {
                    let h = bessel_j0_prime_sum(*n);
                    error_table(|x| Ok(-bessel_j1(real(x))), |x| Ok(real(h.eval(x))), grid, exec)?
                }
                Which::J0sinc => {
                    let h = bessel_j0_sinc_sum(*n)?;
                    error_table(|x| Ok(bessel_j0(real(x))), |x| Ok(h.eval(real(x))), grid, exec)?
                }
            };
            write_data(table.as_deref(), &error_table_csv(&rows), out)
        }
        Command::Regularize { input, p, q, basis, emit } => {
            let (moments, _) = read_input(input)?;
            let params = match (p, q) {
                (None, None) => None,
                (p, q) => Some((
                    p.unwrap_or_else(|| real(choose_p(&moments))),
                    q.unwrap_or(C64::new(0.0, 0.0)),
                )),
            };
            let (solution, used) = regularized_solution(&moments, params, &tol)?;
            let binomial = used
                .is_active()
                .then(|| correction_binomial(basis, moments.n(), &used));
            let varied = varied_moments(&moments, used.p, used.effective_q());
            let sum = solution.into_sum(basis.clone(), binomial);
            emit_document(&OperatorDocument::from_sum(&sum, &varied, Some(&used)), emit.as_deref(), out)
        }
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn check_order(n: usize, min: usize) -> Outcome {
    if n < min {
        return Err(AfsumError::InvalidArgument(format!("n must be at least {min}, got {n}")));
    }
    Ok(())
}

/// Moments from a moments file, or from a JSON operator document together
/// with its basis name.
fn read_input(path: &Path) -> afsum_core::Result<(MomentSequence, Option<String>)> {
    let text = fs::read_to_string(path).map_err(|e| AfsumError::Io(format!("{}: {e}", path.display())))?;
    if text.trim_start().starts_with('{') {
        let doc = OperatorDocument::from_json(&text)?;
        let basis = (doc.basis != "universal").then(|| doc.basis.clone());
        Ok((doc.moments()?, basis))
    } else {
        Ok((parse_moments(&text)?, None))
    }
}

fn table_rows<E, A>(table: &TableArgs, exec: Execution, exact: E, approx: A) -> afsum_core::Result<Option<Vec<ErrorRow>>>
where
    E: Fn(&FunctionSpec, f64) -> afsum_core::Result<C64> + Sync + Send,
    A: Fn(&FunctionSpec, f64) -> afsum_core::Result<C64> + Sync + Send,
{
    match (&table.function, &table.grid) {
        (Some(f), Some(grid)) => error_table(|x| exact(f, x), |x| approx(f, x), grid, exec).map(Some),
        _ => Ok(None),
    }
}

/// The document goes to `emit`; a table goes to `table`. Whatever has no
/// file of its own is printed, the table taking precedence.
fn finish(
    doc: &OperatorDocument,
    emit: Option<&Path>,
    rows: Option<&[ErrorRow]>,
    table: Option<&Path>,
    out: &mut dyn Write,
) -> Outcome {
    match rows {
        Some(rows) => {
            if let Some(path) = emit {
                write_file(path, &doc.to_json()?)?;
            }
            write_data(table, &error_table_csv(rows), out)
        }
        None => emit_document(doc, emit, out),
    }
}

fn emit_document(doc: &OperatorDocument, emit: Option<&Path>, out: &mut dyn Write) -> Outcome {
    write_data(emit, &doc.to_json()?, out)
}

fn write_data(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Outcome {
    match path {
        Some(path) => write_file(path, text),
        None => {
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| AfsumError::Io(format!("{}: {e}", path.display())))
}

fn quadrature_csv(rule: &QuadratureRule) -> String {
    let mut text = String::from("node,weight\n");
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        text.push_str(&format!("{},{}\n", fmt17(*x), fmt17(*w)));
    }
    text
}
