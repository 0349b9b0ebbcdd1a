//! `vpt` — command-line front end for the quartic-oscillator
//! wave-function toolkit.
//!
//! Every subcommand writes deterministic text: floats are fixed to 12
//! significant digits of scientific notation, tables carry a header
//! line, and identical invocations produce identical bytes.  Data goes
//! to stdout unless `--out` names a file (relative paths land under
//! `$VPT_OUT_DIR` when that is set).
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 when the numerics
//! refuse (no admissible trial frequency, divergent branch, solver
//! non-convergence).

use std::env;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use thiserror::Error;

use vpt_core::analysis::{mean_square_deviation, AnalysisError};
use vpt_core::grid::GridFunction;
use vpt_core::lowtemp::{assemble_w_exponent_logged, LowTempError};
use vpt_core::oracle::{ground_state, EigenResult, OracleError};
use vpt_core::poly::{GPoly, Rat};
use vpt_core::series::{
    check_normalization, energy_series, psi_exponent_series, psi_pert_series, rho_diagonal_series,
    SeriesError,
};
use vpt_core::units::{dim_exponents, energy_dim_exponents, Order, OscillatorParams, ParamsError};
use vpt_core::variational::{
    psi_variational, resum, solve_omega_profile, RootKind, SeedBranch, SolverPolicy,
    VariationalError,
};
use vpt_core::wick::{connected_w_terms, wick_reduce, WickError};

/// Anything that can go wrong after argument parsing succeeded; all of
/// it maps to exit code 2.
#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    LowTemp(#[from] LowTempError),
    #[error(transparent)]
    Wick(#[from] WickError),
    #[error(transparent)]
    Variational(#[from] VariationalError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("writing output: {0}")]
    Io(#[from] io::Error),
}

#[derive(Parser)]
#[command(
    name = "vpt",
    version,
    about = "Optimized perturbative ground states of the quartic oscillator",
    after_help = "Floats are printed with 12 significant digits; runs are \
                  bit-stable for identical arguments."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the moment reductions, the connected diagram sums, and the
    /// per-diagram derivation log of the exponent assembly.
    Diagrams(DiagramsCmd),
    /// Print the coefficient tables of the density and wave-function
    /// series, the normalization residuals, and the energy series.
    Series(SeriesCmd),
    /// Solve the trial-frequency profile on a position grid (CSV).
    Omega(OmegaCmd),
    /// Evaluate optimized wave functions on a position grid (CSV).
    Psi(PsiCmd),
    /// Solve the reference ground state numerically (CSV).
    Exact(ExactCmd),
    /// Mean square deviation of both optimized orders from the
    /// reference state, per coupling (CSV).
    Msd(MsdCmd),
}

/// Physical parameters shared by all numeric subcommands.
#[derive(Args)]
struct PhysArgs {
    /// Quartic coupling; repeat the flag to sweep several values.
    #[arg(long = "g", required = true)]
    g: Vec<f64>,
    /// Reduced Planck constant.
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    /// Particle mass.
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    /// Harmonic frequency of the quadratic term.
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
}

impl PhysArgs {
    fn params_for(&self, g: f64) -> Result<OscillatorParams, ParamsError> {
        OscillatorParams {
            mass: self.mass,
            omega: self.omega,
            g,
            hbar: self.hbar,
        }
        .validated()
    }
}

/// Position-grid shape.
#[derive(Args)]
struct GridArgs {
    /// Upper end of the position grid (the state is even, so only
    /// x >= 0 is tabulated).
    #[arg(long = "x-max", default_value_t = 8.0)]
    x_max: f64,
    /// Number of grid points on [0, x-max].
    #[arg(long, default_value_t = 2001, value_parser = clap::value_parser!(u32).range(2..))]
    points: u32,
}

impl GridArgs {
    fn positions(&self) -> Vec<f64> {
        let n = self.points as usize;
        let h = self.x_max / (n - 1) as f64;
        (0..n).map(|i| i as f64 * h).collect()
    }
}

/// Trial-frequency search window and branch selection.
#[derive(Args)]
struct PolicyArgs {
    /// Lower edge of the trial-frequency search window.
    #[arg(long = "omega-min", default_value_t = 1e-3)]
    omega_min: f64,
    /// Upper edge of the trial-frequency search window.
    #[arg(long = "omega-max", default_value_t = 1e2)]
    omega_max: f64,
    /// Points of the logarithmic root scan per position.
    #[arg(long = "scan-points", default_value_t = 400, value_parser = clap::value_parser!(u32).range(8..))]
    scan_points: u32,
    /// Which candidate branch to seed at the outermost grid point.
    #[arg(long = "seed-branch", value_enum, default_value_t = SeedBranchArg::Largest)]
    seed_branch: SeedBranchArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeedBranchArg {
    Largest,
    Smallest,
}

impl PolicyArgs {
    fn policy(&self) -> SolverPolicy {
        SolverPolicy {
            omega_min: self.omega_min,
            omega_max: self.omega_max,
            scan_points: self.scan_points as usize,
            seed: match self.seed_branch {
                SeedBranchArg::Largest => SeedBranch::Largest,
                SeedBranchArg::Smallest => SeedBranch::Smallest,
            },
            ..SolverPolicy::default()
        }
    }
}

/// Output destination (stdout by default).
#[derive(Args)]
struct OutArg {
    /// Output file; relative paths are resolved under $VPT_OUT_DIR when
    /// that variable is set.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiagramsCmd {
    /// Highest coupling order to derive.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=2))]
    order: u32,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct SeriesCmd {
    /// Highest coupling order to tabulate.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=2))]
    order: u32,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct OmegaCmd {
    /// Resummation order of the exponent.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=2))]
    order: u32,
    #[command(flatten)]
    phys: PhysArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    policy: PolicyArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct PsiCmd {
    /// Resummation order of the exponent.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=2))]
    order: u32,
    #[command(flatten)]
    phys: PhysArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    policy: PolicyArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct ExactCmd {
    #[command(flatten)]
    phys: PhysArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct MsdCmd {
    #[command(flatten)]
    phys: PhysArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    policy: PolicyArgs,
    #[command(flatten)]
    out: OutArg,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        // A reader hanging up mid-stream (`vpt ... | head`) is not a
        // failure of the run itself.
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("vpt: {err}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Diagrams(cmd) => {
            let mut w = open_output(&cmd.out)?;
            write_diagrams(&mut w, cmd.order)?;
            w.flush().map_err(CliError::from)
        }
        Command::Series(cmd) => {
            let mut w = open_output(&cmd.out)?;
            write_series(&mut w, cmd.order)?;
            w.flush().map_err(CliError::from)
        }
        Command::Omega(cmd) => {
            let mut w = open_output(&cmd.out)?;
            write_omega(&mut w, &cmd)?;
            w.flush().map_err(CliError::from)
        }
        Command::Psi(cmd) => {
            let mut w = open_output(&cmd.out)?;
            write_psi(&mut w, &cmd)?;
            w.flush().map_err(CliError::from)
        }
        Command::Exact(cmd) => {
            let mut w = open_output(&cmd.out)?;
            write_exact(&mut w, &cmd)?;
            w.flush().map_err(CliError::from)
        }
        Command::Msd(cmd) => {
            let mut w = open_output(&cmd.out)?;
            write_msd(&mut w, &cmd)?;
            w.flush().map_err(CliError::from)
        }
    }
}

/// Resolves `--out` against `$VPT_OUT_DIR` and opens the writer; bare
/// runs stream to stdout.
fn open_output(out: &OutArg) -> Result<Box<dyn Write>, CliError> {
    match &out.out {
        None => Ok(Box::new(io::stdout().lock())),
        Some(p) => {
            let path = resolve_out_path(p);
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)?;
                }
            }
            Ok(Box::new(BufWriter::new(File::create(path)?)))
        }
    }
}

fn resolve_out_path(p: &Path) -> PathBuf {
    if p.is_absolute() {
        return p.to_path_buf();
    }
    match env::var_os("VPT_OUT_DIR") {
        Some(dir) => PathBuf::from(dir).join(p),
        None => p.to_path_buf(),
    }
}

/// 12 significant digits, scientific — the fixed CSV float format.
fn sci(v: f64) -> String {
    format!("{v:.11e}")
}

fn order_of(n: u32) -> Order {
    Order::try_from(n).expect("clap range keeps the order in 1..=2")
}

fn write_diagrams(w: &mut dyn Write, order: u32) -> Result<(), CliError> {
    writeln!(w, "# moment reduction <x^4> (one vertex)")?;
    let first = wick_reduce(&[(1, 4)]);
    write!(w, "{}", first.to_lines())?;
    writeln!(w, "# pairings: {}", first.multiplicity_total())?;

    if order >= 2 {
        writeln!(w, "# moment reduction <x^4 x^4> (two vertices)")?;
        let second = wick_reduce(&[(1, 4), (2, 4)]);
        write!(w, "{}", second.to_lines())?;
        writeln!(w, "# pairings: {}", second.multiplicity_total())?;
    }

    for n in 1..=order {
        let ord = order_of(n);
        writeln!(w, "# connected terms, order {n}")?;
        let connected = connected_w_terms(ord)?;
        write!(w, "{}", connected.to_lines())?;
        let mults: Vec<String> = connected
            .terms()
            .iter()
            .map(|t| t.multiplicity().to_string())
            .collect();
        writeln!(w, "# connected multiplicities: {}", mults.join(","))?;
    }

    for n in 1..=order {
        let ord = order_of(n);
        writeln!(w, "# derivation log, order {n}")?;
        let (_, log) = assemble_w_exponent_logged(ord)?;
        for line in &log {
            writeln!(w, "{line}")?;
        }
    }
    Ok(())
}

/// One table row: the bracket-convention coefficient of `g^r x^p`.
///
/// Series are stored as plain Taylor coefficients `c` of `g^r x^p`; the
/// published tables pull a `g^r / (r! hbar^r)` prefactor out of each
/// order, so the printed entry is `r! c` and its dimensional exponents
/// shift by `hbar^r` relative to the bare monomial.
fn write_bracket_row(
    w: &mut dyn Write,
    series: &str,
    r: u32,
    p: u32,
    c: Rat,
) -> Result<(), CliError> {
    let factorial: i128 = (1..=i128::from(r)).product::<i128>().max(1);
    let bracket = c * Rat::from_integer(factorial);
    let (h, m, om) = dim_exponents(r, p / 2);
    writeln!(
        w,
        "{series},{r},{p},{},{},{},{m},{om}",
        bracket.numer(),
        bracket.denom(),
        h + r as i32,
    )?;
    Ok(())
}

fn write_series(w: &mut dyn Write, order: u32) -> Result<(), CliError> {
    writeln!(
        w,
        "# coefficient tables in the g^r/(r! hbar^r) bracket convention; \
         dimensional exponents restore physical units"
    )?;
    writeln!(
        w,
        "series,g_order,x_power,num,den,hbar_exp,mass_exp,omega_exp"
    )?;

    let tables: [(&str, GPoly); 2] = [("rho", rho_diagonal_series()?), ("psi", psi_pert_series()?)];
    for (name, gpoly) in &tables {
        for (r, p, c) in gpoly.terms() {
            if r <= order && c != Rat::from_integer(0) {
                write_bracket_row(w, name, r, p, c)?;
            }
        }
    }

    let energy = energy_series()?;
    for (r, c) in [(0u32, energy.e0), (1, energy.e1), (2, energy.e2)] {
        if r <= order {
            let (h, m, om) = energy_dim_exponents(r);
            writeln!(w, "energy,{r},0,{},{},{h},{m},{om}", c.numer(), c.denom())?;
        }
    }

    let (r1, r2) = check_normalization(&psi_pert_series()?);
    writeln!(
        w,
        "# psi normalization residuals: order g: {r1}, order g^2: {r2}"
    )?;
    Ok(())
}

fn kind_label(kind: RootKind) -> &'static str {
    match kind {
        RootKind::Extremum => "extremum",
        RootKind::TurningPoint => "turning_point",
    }
}

fn write_omega(w: &mut dyn Write, cmd: &OmegaCmd) -> Result<(), CliError> {
    let series = resum(order_of(cmd.order), &psi_exponent_series()?);
    let xs = cmd.grid.positions();
    let policy = cmd.policy.policy();

    let profiles = cmd
        .phys
        .g
        .par_iter()
        .map(|&g| {
            let params = cmd.phys.params_for(g)?;
            Ok((g, solve_omega_profile(&series, &params, &xs, &policy)?))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    writeln!(w, "g,x,omega,kind,branch_id")?;
    for (g, profile) in &profiles {
        for i in 0..profile.xs.len() {
            writeln!(
                w,
                "{},{},{},{},{}",
                sci(*g),
                sci(profile.xs[i]),
                sci(profile.omega[i]),
                kind_label(profile.kind[i]),
                profile.branch_id[i],
            )?;
        }
    }
    Ok(())
}

fn write_psi(w: &mut dyn Write, cmd: &PsiCmd) -> Result<(), CliError> {
    let series = resum(order_of(cmd.order), &psi_exponent_series()?);
    let xs = cmd.grid.positions();
    let policy = cmd.policy.policy();

    let curves = cmd
        .phys
        .g
        .par_iter()
        .map(|&g| {
            let params = cmd.phys.params_for(g)?;
            let (psi, _) = psi_variational(&series, &params, &xs, &policy)?;
            Ok((g, psi))
        })
        .collect::<Result<Vec<(f64, GridFunction)>, CliError>>()?;

    writeln!(w, "g,x,psi")?;
    for (g, psi) in &curves {
        for (x, v) in psi.xs().iter().zip(psi.values()) {
            writeln!(w, "{},{},{}", sci(*g), sci(*x), sci(*v))?;
        }
    }
    Ok(())
}

fn write_exact(w: &mut dyn Write, cmd: &ExactCmd) -> Result<(), CliError> {
    let states = cmd
        .phys
        .g
        .par_iter()
        .map(|&g| {
            let params = cmd.phys.params_for(g)?;
            let state = ground_state(&params, cmd.grid.x_max, cmd.grid.points as usize)?;
            Ok((g, state))
        })
        .collect::<Result<Vec<(f64, EigenResult)>, CliError>>()?;

    for (g, state) in &states {
        writeln!(w, "# g={} energy={}", sci(*g), sci(state.energy))?;
    }
    writeln!(w, "g,x,psi")?;
    for (g, state) in &states {
        for (x, v) in state.psi.xs().iter().zip(state.psi.values()) {
            writeln!(w, "{},{},{}", sci(*g), sci(*x), sci(*v))?;
        }
    }
    Ok(())
}

fn write_msd(w: &mut dyn Write, cmd: &MsdCmd) -> Result<(), CliError> {
    let exponent = psi_exponent_series()?;
    let first = resum(Order::First, &exponent);
    let second = resum(Order::Second, &exponent);
    let policy = cmd.policy.policy();

    let rows = cmd
        .phys
        .g
        .par_iter()
        .map(|&g| {
            let params = cmd.phys.params_for(g)?;
            let oracle = ground_state(&params, cmd.grid.x_max, cmd.grid.points as usize)?;
            // At very strong coupling the reference solver tightens its
            // box below the requested half-width; the comparison grid
            // must not outrun the reference state.
            let xs: Vec<f64> = cmd
                .grid
                .positions()
                .into_iter()
                .filter(|&x| x <= oracle.x_max)
                .collect();
            let (psi1, _) = psi_variational(&first, &params, &xs, &policy)?;
            let (psi2, _) = psi_variational(&second, &params, &xs, &policy)?;
            let d1 = mean_square_deviation(&psi1, &oracle.psi)?;
            let d2 = mean_square_deviation(&psi2, &oracle.psi)?;
            Ok((g, d1, d2))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    writeln!(w, "g,d1,d2")?;
    for (g, d1, d2) in &rows {
        writeln!(w, "{},{},{}", sci(*g), sci(*d1), sci(*d2))?;
    }
    Ok(())
}
