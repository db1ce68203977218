//! Command line driver for the fractional calculus toolkit.
//!
//! The binary exposes the library workflows as subcommands: `reduce` and
//! `solve` operate on problem files, `stability` classifies a linear
//! problem's equilibrium, `ml` evaluates the Mittag-Leffler function, and
//! `verify` checks the derivative index law on a power sum. Exit status is
//! 0 on success, 1 when a computation fails on its domain, and 2 on usage
//! errors.

use std::error::Error;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use fraccalc::expr::{BinOp, ExprKind};
use fraccalc::problem::{load_problem, Loaded, LoadedProblem};
use fraccalc::reduce::SingleOrderSystem;
use fraccalc::stability::{EigenClass, StabilityVerdict};
use fraccalc::{
    assess_stability, characteristic_polynomial, check_semigroup, mittag_leffler,
    multi_order_to_single, parse_expr, reduce_to_single_order, solve_multi_order,
    solve_single_order, Bindings, Expr, OperatorKind, PowerSum, Regularity, SemigroupVerdict,
    Trajectory,
};

#[derive(Parser)]
#[command(
    name = "fraccalc",
    version,
    about = "Fractional-order differential equations: reduce, solve, classify"
)]
struct Cli {
    /// Reserved; every computation here is deterministic.
    #[arg(long, global = true, hide = true)]
    seed: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Flatten a problem file to one system of a single common order.
    Reduce {
        /// Problem file (JSON).
        file: PathBuf,
    },
    /// Integrate a problem file and emit the trajectory as CSV.
    Solve {
        /// Problem file (JSON).
        file: PathBuf,
        /// Step size; overrides the solver block in the file.
        #[arg(long)]
        h: Option<f64>,
        /// Final time; overrides the solver block in the file.
        #[arg(long = "t-end")]
        t_end: Option<f64>,
        /// Write the CSV to this path instead of standard output.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Classify the equilibrium of a linear problem by the sector criterion.
    Stability {
        /// Problem file (JSON).
        file: PathBuf,
    },
    /// Evaluate the two-parameter Mittag-Leffler function E_{alpha,beta}(z).
    Ml {
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long, allow_negative_numbers = true)]
        z: f64,
    },
    /// Check the derivative index law D^gamma D^beta f = D^{beta+gamma} f.
    Verify {
        /// Which operators to compose.
        #[arg(long, value_enum)]
        mode: Mode,
        /// The function, written as a sum of powers of t, for example
        /// "2*t^0.5 - (t - 1)^2" or "(t)^0.5".
        #[arg(long, value_parser = parse_power_sum)]
        f: PowerSum,
        /// Inner order.
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
        /// Outer order.
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    /// Riemann-Liouville derivatives on both legs.
    Rl,
    /// Caputo derivatives on both legs.
    Caputo,
    /// Classical derivative inside, Caputo outside.
    Split,
}

impl Mode {
    fn kind(self) -> OperatorKind {
        match self {
            Mode::Rl => OperatorKind::RiemannLiouville,
            Mode::Caputo => OperatorKind::Caputo,
            Mode::Split => OperatorKind::IntegerSplit,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Mode::Rl => "rl",
            Mode::Caputo => "caputo",
            Mode::Split => "split",
        }
    }
}

/// Runs the command line given full argv (program name first), writing to
/// the supplied output and error streams. Returns the process exit code.
pub fn run_cli(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                return 2;
            }
            let _ = write!(out, "{rendered}");
            return 0;
        }
    };
    if cli.seed.is_some() {
        let _ = writeln!(err, "error: --seed is reserved; every computation is deterministic");
        return 2;
    }
    let result = match cli.command {
        Command::Reduce { file } => cmd_reduce(&file, out),
        Command::Solve { file, h, t_end, csv } => cmd_solve(&file, h, t_end, csv.as_deref(), out),
        Command::Stability { file } => cmd_stability(&file, out),
        Command::Ml { alpha, beta, z } => cmd_ml(alpha, beta, z, out),
        Command::Verify { mode, f, beta, gamma } => cmd_verify(mode, &f, beta, gamma, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

type CmdResult = Result<(), Box<dyn Error>>;

fn flatten(loaded: &Loaded) -> Result<SingleOrderSystem, Box<dyn Error>> {
    match &loaded.problem {
        LoadedProblem::MultiTerm(p) => Ok(reduce_to_single_order(p)?),
        LoadedProblem::MultiOrder(s) => Ok(multi_order_to_single(s)?),
    }
}

fn join_numbers(values: &[f64]) -> String {
    // Adding positive zero collapses IEEE negative zeros before printing.
    values.iter().map(|v| (v + 0.0).to_string()).collect::<Vec<_>>().join(", ")
}

fn cmd_reduce(file: &Path, out: &mut dyn Write) -> CmdResult {
    let loaded = load_problem(file)?;
    let source = match &loaded.problem {
        LoadedProblem::MultiTerm(_) => "multi-term scalar equation",
        LoadedProblem::MultiOrder(_) => "multi-order system",
    };
    let single = flatten(&loaded)?;
    writeln!(out, "reduced {source} to a common-order system")?;
    writeln!(out, "gamma = {}", single.order())?;
    writeln!(out, "dimension = {}", single.dim())?;
    match single.rhs().matrix() {
        Some(m) => {
            writeln!(out, "matrix:")?;
            for row in m.to_rows() {
                writeln!(out, "  [{}]", join_numbers(&row))?;
            }
            writeln!(
                out,
                "characteristic polynomial (monic, descending): [{}]",
                join_numbers(&characteristic_polynomial(m))
            )?;
        }
        None => writeln!(out, "matrix: none (right-hand side is not linear)")?,
    }
    writeln!(out, "initial = [{}]", join_numbers(single.initial()))?;
    writeln!(out, "components = {}", single.labels().join(", "))?;
    Ok(())
}

fn cmd_solve(
    file: &Path,
    h: Option<f64>,
    t_end: Option<f64>,
    csv: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let loaded = load_problem(file)?;
    let h = match h.or(loaded.solver.map(|s| s.h)) {
        Some(h) => h,
        None => return Err("no step size: pass --h or add a solver block to the file".into()),
    };
    let t_end = t_end.or(loaded.solver.and_then(|s| s.t_end)).unwrap_or(loaded.interval.b);
    let traj: Trajectory = match &loaded.problem {
        LoadedProblem::MultiTerm(p) => solve_single_order(&reduce_to_single_order(p)?, h, t_end)?,
        LoadedProblem::MultiOrder(s) => solve_multi_order(s, h, t_end)?,
    };
    match csv {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            traj.write_csv(&mut w)?;
            w.flush()?;
            writeln!(out, "wrote {} states to {}", traj.len(), path.display())?;
        }
        None => traj.write_csv(out)?,
    }
    Ok(())
}

fn class_word(class: EigenClass) -> &'static str {
    match class {
        EigenClass::Stable => "stable",
        EigenClass::Marginal => "marginal",
        EigenClass::Unstable => "unstable",
    }
}

fn cmd_stability(file: &Path, out: &mut dyn Write) -> CmdResult {
    let loaded = load_problem(file)?;
    let single = flatten(&loaded)?;
    let report = assess_stability(&single)?;
    let verdict = match report.verdict {
        StabilityVerdict::Stable => "STABLE",
        StabilityVerdict::Marginal => "MARGINAL",
        StabilityVerdict::Unstable => "UNSTABLE",
    };
    writeln!(out, "{verdict} gamma={}", single.order())?;
    writeln!(out, "sector half-angle gamma*pi/2 = {:.6} rad", report.threshold)?;
    writeln!(out, "eigenvalues:")?;
    for e in &report.eigenvalues {
        let zero_note = if e.near_zero { ", numerically zero" } else { "" };
        writeln!(
            out,
            "  {:.6}{:+.6}i  multiplicity {}  |arg| = {:.6}  margin = {:+.6}  {}{}",
            e.value.re,
            e.value.im,
            e.multiplicity,
            e.arg_abs,
            e.margin,
            class_word(e.class),
            zero_note
        )?;
    }
    Ok(())
}

fn cmd_ml(alpha: f64, beta: f64, z: f64, out: &mut dyn Write) -> CmdResult {
    let value = mittag_leffler(alpha, beta, z)?;
    writeln!(out, "{value:.12}")?;
    Ok(())
}

fn cmd_verify(mode: Mode, f: &PowerSum, beta: f64, gamma: f64, out: &mut dyn Write) -> CmdResult {
    let report = check_semigroup(mode.kind(), f, beta, gamma)?;
    let verdict = match report.verdict {
        SemigroupVerdict::Holds => "HOLDS",
        SemigroupVerdict::Violated => "VIOLATED",
        SemigroupVerdict::OuterUndefined => "UNDEFINED",
    };
    writeln!(out, "{verdict}")?;
    writeln!(out, "mode = {}, beta = {beta}, gamma = {gamma}", mode.name())?;
    writeln!(out, "hypothesis satisfied: {}", if report.hypothesis_met { "yes" } else { "no" })?;
    writeln!(out, "f(t) = {f}")?;
    match &report.inner {
        Some(g) => writeln!(out, "inner D^{beta} f = {g}")?,
        None => writeln!(out, "inner D^{beta} f: undefined")?,
    }
    if let Some(reg) = report.inner_regularity {
        let word = match reg {
            Regularity::Continuous { value_at_base } => {
                format!("continuous, value {value_at_base} at the base point")
            }
            Regularity::L1Only => "integrable but unbounded at the base point".to_string(),
            Regularity::NotL1 => "not integrable".to_string(),
        };
        writeln!(out, "inner regularity: {word}")?;
    }
    match &report.stepwise {
        Some(g) => writeln!(out, "stepwise D^{gamma} D^{beta} f = {g}")?,
        None => writeln!(out, "stepwise D^{gamma} D^{beta} f: undefined")?,
    }
    let total = beta + gamma;
    match &report.direct {
        Some(g) => writeln!(out, "direct D^{total} f = {g}")?,
        None => writeln!(out, "direct D^{total} f: undefined")?,
    }
    Ok(())
}

struct NoBindings;

impl Bindings for NoBindings {
    fn get(&self, _name: &str) -> Option<f64> {
        None
    }
}

fn const_eval(e: &Expr) -> Option<f64> {
    if e.free_variables().is_empty() {
        e.eval(&NoBindings).ok()
    } else {
        None
    }
}

/// Parses the textual power-sum form used by `verify --f`, a signed sum of
/// terms `c * (t - a)^p` where the coefficient, base offset, and exponent
/// may be any constant expressions and every term shares one base point.
fn parse_power_sum(src: &str) -> Result<PowerSum, String> {
    let ast = parse_expr(src).map_err(|e| e.to_string())?;
    let mut terms: Vec<(f64, f64, Option<f64>)> = Vec::new();
    collect_terms(&ast, 1.0, &mut terms)?;
    let mut base: Option<f64> = None;
    for &(_, _, b) in &terms {
        match (base, b) {
            (None, Some(b)) => base = Some(b),
            (Some(prev), Some(b)) if prev != b => {
                return Err(format!("terms use different base points {prev} and {b}"));
            }
            _ => {}
        }
    }
    let flat: Vec<(f64, f64)> = terms.iter().map(|&(c, p, _)| (c, p)).collect();
    PowerSum::new(base.unwrap_or(0.0), &flat).map_err(|e| e.to_string())
}

fn collect_terms(
    e: &Expr,
    sign: f64,
    terms: &mut Vec<(f64, f64, Option<f64>)>,
) -> Result<(), String> {
    match &e.kind {
        ExprKind::Binary(BinOp::Add, l, r) => {
            collect_terms(l, sign, terms)?;
            collect_terms(r, sign, terms)
        }
        ExprKind::Binary(BinOp::Sub, l, r) => {
            collect_terms(l, sign, terms)?;
            collect_terms(r, -sign, terms)
        }
        ExprKind::Neg(inner) => collect_terms(inner, -sign, terms),
        _ => {
            let (coeff, exponent, base) = parse_term(e)?;
            terms.push((sign * coeff, exponent, base));
            Ok(())
        }
    }
}

fn parse_term(e: &Expr) -> Result<(f64, f64, Option<f64>), String> {
    if let Some(v) = const_eval(e) {
        return Ok((v, 0.0, None));
    }
    match &e.kind {
        ExprKind::Neg(inner) => {
            let (c, p, b) = parse_term(inner)?;
            Ok((-c, p, b))
        }
        ExprKind::Binary(BinOp::Mul, l, r) => {
            if let Some(c) = const_eval(l) {
                let (c2, p, b) = parse_term(r)?;
                Ok((c * c2, p, b))
            } else if let Some(c) = const_eval(r) {
                let (c2, p, b) = parse_term(l)?;
                Ok((c * c2, p, b))
            } else {
                Err(format!("cannot read '{e}' as coefficient * power of t"))
            }
        }
        ExprKind::Binary(BinOp::Div, l, r) => match const_eval(r) {
            Some(c) => {
                let (c2, p, b) = parse_term(l)?;
                Ok((c2 / c, p, b))
            }
            None => Err(format!("cannot read '{e}' as a power of t over a constant")),
        },
        ExprKind::Binary(BinOp::Pow, b, ex) => {
            let base = parse_base(b)?;
            match const_eval(ex) {
                Some(p) => Ok((1.0, p, Some(base))),
                None => Err(format!("exponent '{ex}' is not a constant")),
            }
        }
        _ => {
            let base = parse_base(e)?;
            Ok((1.0, 1.0, Some(base)))
        }
    }
}

fn parse_base(e: &Expr) -> Result<f64, String> {
    match &e.kind {
        ExprKind::Var(name) if name == "t" => Ok(0.0),
        ExprKind::Binary(BinOp::Sub, l, r) => match (&l.kind, const_eval(r)) {
            (ExprKind::Var(name), Some(a)) if name == "t" => Ok(a),
            _ => Err(format!("expected t or (t - a), found '{e}'")),
        },
        ExprKind::Binary(BinOp::Add, l, r) => match (&l.kind, const_eval(r)) {
            (ExprKind::Var(name), Some(a)) if name == "t" => Ok(-a),
            _ => Err(format!("expected t or (t - a), found '{e}'")),
        },
        _ => Err(format!("expected t or (t - a), found '{e}'")),
    }
}

#[cfg(test)]
mod tests {
    use super::parse_power_sum;

    #[test]
    fn parses_rendered_power_sums() {
        let f = parse_power_sum("2 - t^0.5 + t^3").unwrap();
        assert_eq!(f.to_string(), "2 - t^0.5 + t^3");
        let g = parse_power_sum("2.5*(t - 1)").unwrap();
        assert_eq!(g.to_string(), "2.5*(t - 1)");
        assert_eq!(g.base(), 1.0);
    }

    #[test]
    fn parses_parenthesized_and_scaled_forms() {
        let f = parse_power_sum("(t)^0.5").unwrap();
        assert_eq!(f.to_string(), "t^0.5");
        let g = parse_power_sum("3*(t - 2)^1.5 - (t - 2)/4").unwrap();
        assert_eq!(g.base(), 2.0);
        assert_eq!(g.terms().len(), 2);
        let h = parse_power_sum("gamma(1.5)*t^2").unwrap();
        assert!((h.terms()[0].coeff - 0.886226925452758).abs() < 1e-12);
    }

    #[test]
    fn unscaled_first_powers_flatten_into_the_sum() {
        let f = parse_power_sum("t + (t - 1)").unwrap();
        assert_eq!(f.base(), 0.0);
        assert_eq!(f.eval(3.0), 5.0);
    }

    #[test]
    fn rejects_mixed_bases_and_nonpowers() {
        assert!(parse_power_sum("t^0.5 + (t - 1)^0.5").is_err());
        assert!(parse_power_sum("t*t").is_err());
        assert!(parse_power_sum("sin(t)").is_err());
        assert!(parse_power_sum("t^t").is_err());
    }
}
