//! `bmparab`: tables of the distribution of the maximum of Brownian motion
//! minus a parabola, the Chernoff density, and Monte Carlo checks.

mod grid;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use bmparab_core::chernoff::{self, ChernoffTable};
use bmparab_core::mc::{self, McConfig};
use bmparab_core::parabola::{self, DriftCoefficient, Side};
use bmparab_core::{Error, QuadratureSpec};
use clap::{Args, Parser, Subcommand, ValueEnum};

use grid::GridSpec;
use output::{Cell, Table};

#[derive(Parser, Debug)]
#[command(name = "bmparab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Distribution function of the maximum.
    Cdf {
        #[command(flatten)]
        drift: Drift,
        #[arg(long, value_enum, default_value_t = SideArg::One)]
        side: SideArg,
        #[command(flatten)]
        points: Points,
        #[command(flatten)]
        common: Common,
    },
    /// Density of the maximum.
    Pdf {
        #[command(flatten)]
        drift: Drift,
        #[arg(long, value_enum, default_value_t = SideArg::One)]
        side: SideArg,
        #[command(flatten)]
        points: Points,
        #[command(flatten)]
        common: Common,
    },
    /// Distribution function and density of the two-sided maximum.
    TwoSided {
        #[command(flatten)]
        drift: Drift,
        #[command(flatten)]
        points: Points,
        #[command(flatten)]
        common: Common,
    },
    /// Density of the location of the maximum of W(t) - t^2 (the Chernoff density).
    Chernoff {
        #[command(flatten)]
        points: Points,
        #[command(flatten)]
        common: Common,
    },
    /// Moment E[max^k], k <= 8.
    Moment {
        #[command(flatten)]
        drift: Drift,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, value_enum, default_value_t = SideArg::One)]
        side: SideArg,
        #[command(flatten)]
        common: Common,
    },
    /// Quantiles of the maximum.
    Quantile {
        #[command(flatten)]
        drift: Drift,
        /// Probabilities in (0, 1), comma separated.
        #[arg(long, required = true, value_delimiter = ',')]
        p: Vec<f64>,
        #[arg(long, value_enum, default_value_t = SideArg::One)]
        side: SideArg,
        #[command(flatten)]
        common: Common,
    },
    /// Compare simulated distribution functions with the computed ones.
    ///
    /// Each row is one check: `cdf` compares the empirical and computed
    /// distribution functions, `square` compares the two-sided empirical CDF with
    /// the square of the one-sided one. With --argmax, `ks` and `sign` test the
    /// simulated locations of the two-sided maximum against the Chernoff density
    /// (c = 1 only); their `empirical` column is the statistic and `analytic` the
    /// p-value.
    McCheck {
        #[command(flatten)]
        drift: Drift,
        #[arg(long, default_value_t = 200_000)]
        paths: usize,
        #[arg(long, default_value_t = 5e-4)]
        step: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Points to check, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0.5,1.0,1.5")]
        x: Vec<f64>,
        /// Check one side only; both by default.
        #[arg(long, value_enum)]
        side: Option<SideArg>,
        /// Use the plain grid maximum without the Brownian-bridge correction.
        #[arg(long)]
        no_bridge: bool,
        /// Also test the two-sided argmax sample against the Chernoff density.
        #[arg(long)]
        argmax: bool,
        /// Write the simulated (max, argmax) pairs of the last sample as CSV.
        #[arg(long)]
        samples_out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Data for the standard figures: 1 one-sided CDF, 2 one-sided density,
    /// 3 two-sided density, 4 Chernoff density.
    Figure {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        which: u8,
        /// Drift coefficient for figures 1-3 (default 0.5); figure 4 is for c = 1.
        #[arg(long, allow_negative_numbers = true)]
        c: Option<f64>,
        /// start:stop:step; 0:5:0.01 for figures 1-3, -2:2:0.01 for figure 4.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<GridSpec>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Drift {
    /// Coefficient c > 0 of the parabola c t^2.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    c: f64,
}

#[derive(Args, Debug)]
struct Points {
    /// Evaluation points, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "grid")]
    x: Vec<f64>,
    /// Inclusive grid start:stop:step.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<GridSpec>,
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Absolute quadrature tolerance [default: 1e-10]
    #[arg(long)]
    abs_tol: Option<f64>,
    /// Relative quadrature tolerance [default: 1e-10]
    #[arg(long)]
    rel_tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SideArg {
    One,
    Two,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::One => Side::One,
            SideArg::Two => Side::Two,
        }
    }
}

/// Failure classes with their exit codes.
#[derive(Debug)]
enum Failure {
    /// Bad parameters: exit 2.
    Usage(String),
    /// The computation failed or a check did not pass: exit 1.
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::ResourceCap { .. } => Failure::Usage(e.to_string()),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

impl Common {
    fn spec(&self) -> Result<QuadratureSpec, Failure> {
        let defaults = QuadratureSpec::default();
        let spec = QuadratureSpec::with_tolerances(
            self.abs_tol.unwrap_or(defaults.abs_tol),
            self.rel_tol.unwrap_or(defaults.rel_tol),
        );
        spec.validate()
            .map_err(|e| Failure::Usage(format!("tolerances: {e}")))?;
        Ok(spec)
    }

    fn emit(&self, table: &Table) -> Outcome {
        let text = match self.format {
            Format::Csv => table.to_csv(),
            Format::Json => table.to_json(),
        };
        let written = match &self.out {
            Some(path) => std::fs::write(path, text),
            None => std::io::stdout().lock().write_all(text.as_bytes()),
        };
        written.map_err(|e| Failure::Numerical(format!("writing output: {e}")))
    }
}

impl Drift {
    fn coefficient(&self) -> Result<DriftCoefficient, Failure> {
        Ok(DriftCoefficient::new(self.c)?)
    }
}

impl Points {
    fn values(&self) -> Result<Vec<f64>, Failure> {
        match (&self.grid, self.x.is_empty()) {
            (Some(g), _) => Ok(g.points()),
            (None, false) => Ok(self.x.clone()),
            (None, true) => Err(Failure::Usage("give evaluation points with --x or --grid".into())),
        }
    }
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::One => "one",
        Side::Two => "two",
    }
}

fn distribution(drift: &Drift, side: SideArg, points: &Points, common: &Common, want_cdf: bool) -> Outcome {
    let c = drift.coefficient()?;
    let spec = common.spec()?;
    let xs = points.values()?;
    let side = Side::from(side);
    let values = parabola::evaluate_grid(c, &xs, side, &spec)?;
    let name = if want_cdf { "cdf" } else { "pdf" };
    let mut table = Table::new(&["c", "side", "x", name]);
    for p in values {
        let v = if want_cdf { p.cdf } else { p.pdf };
        table.push(vec![c.value().into(), side_name(side).into(), p.x.into(), v.into()]);
    }
    common.emit(&table)
}

fn two_sided(drift: &Drift, points: &Points, common: &Common) -> Outcome {
    let c = drift.coefficient()?;
    let spec = common.spec()?;
    let xs = points.values()?;
    let values = parabola::evaluate_grid(c, &xs, Side::Two, &spec)?;
    let mut table = Table::new(&["c", "x", "cdf", "pdf"]);
    for p in values {
        table.push(vec![c.value().into(), p.x.into(), p.cdf.into(), p.pdf.into()]);
    }
    common.emit(&table)
}

fn chernoff_table(points: &Points, common: &Common) -> Outcome {
    let spec = common.spec()?;
    let ts = points.values()?;
    let values = chernoff::chernoff_grid(&ts, &spec)?;
    let mut table = Table::new(&["t", "phi_plus", "phi_minus", "density"]);
    for p in values {
        table.push(vec![p.t.into(), p.phi_plus.into(), p.phi_minus.into(), p.density.into()]);
    }
    common.emit(&table)
}

fn moment(drift: &Drift, k: u32, side: SideArg, common: &Common) -> Outcome {
    let c = drift.coefficient()?;
    let spec = common.spec()?;
    let side = Side::from(side);
    let value = parabola::moment(c, k, side, &spec)?;
    let mut table = Table::new(&["c", "side", "k", "moment"]);
    table.push(vec![c.value().into(), side_name(side).into(), k.into(), value.into()]);
    common.emit(&table)
}

fn quantiles(drift: &Drift, ps: &[f64], side: SideArg, common: &Common) -> Outcome {
    let c = drift.coefficient()?;
    let spec = common.spec()?;
    let side = Side::from(side);
    let mut table = Table::new(&["c", "side", "p", "quantile"]);
    for &p in ps {
        let x = parabola::quantile(c, p, side, &spec)?;
        table.push(vec![c.value().into(), side_name(side).into(), p.into(), x.into()]);
    }
    common.emit(&table)
}

/// Allowance for the remaining discretization bias in the Monte Carlo CDF.
const MC_BIAS_ALLOWANCE: f64 = 0.003;

/// Significance level of the argmax goodness-of-fit tests.
const ARGMAX_LEVEL: f64 = 0.01;

struct McCheckArgs<'a> {
    drift: &'a Drift,
    paths: usize,
    step: f64,
    seed: u64,
    xs: &'a [f64],
    side: Option<SideArg>,
    bridge: bool,
    argmax: bool,
    samples_out: Option<&'a PathBuf>,
    common: &'a Common,
}

fn mc_check(args: McCheckArgs<'_>) -> Outcome {
    let c = args.drift.coefficient()?;
    let spec = args.common.spec()?;
    if args.argmax && c.value() != 1.0 {
        return Err(Failure::Usage("--argmax compares with the Chernoff density, which needs --c 1".into()));
    }
    let sides: Vec<Side> = match args.side {
        Some(s) => vec![s.into()],
        None => vec![Side::One, Side::Two],
    };
    let mut sides_needed = sides.clone();
    if args.argmax && !sides_needed.contains(&Side::Two) {
        sides_needed.push(Side::Two);
    }
    let mut samples = Vec::new();
    for &side in &sides_needed {
        let config = McConfig::new(c, args.paths, args.step, args.seed, side).with_bridge(args.bridge);
        samples.push((side, mc::simulate(&config)?));
    }

    let mut table = Table::new(&[
        "check", "side", "x", "empirical", "std_error", "analytic", "tolerance", "status",
    ]);
    let mut all_pass = true;
    let mut verdict = |pass: bool| {
        all_pass &= pass;
        Cell::from(if pass { "PASS" } else { "FAIL" })
    };
    for (side, sample) in samples.iter().filter(|(s, _)| sides.contains(s)) {
        for &x in args.xs {
            let (est, se) = mc::empirical_cdf(sample, x)?;
            let exact = parabola::cdf(c, x, *side, &spec)?;
            let tol = 3.0 * se + MC_BIAS_ALLOWANCE;
            let status = verdict((est - exact).abs() <= tol);
            table.push(vec![
                "cdf".into(),
                side_name(*side).into(),
                x.into(),
                est.into(),
                se.into(),
                exact.into(),
                tol.into(),
                status,
            ]);
        }
    }
    let one = samples.iter().find(|(s, _)| *s == Side::One);
    let two = samples.iter().find(|(s, _)| *s == Side::Two);
    if let (Some((_, one)), Some((_, two))) = (one, two) {
        if sides.len() == 2 {
            for &x in args.xs {
                let (f_one, _) = mc::empirical_cdf(one, x)?;
                let (f_two, se) = mc::empirical_cdf(two, x)?;
                let tol = 3.0 * se + MC_BIAS_ALLOWANCE;
                let status = verdict((f_two - f_one * f_one).abs() <= tol);
                table.push(vec![
                    "square".into(),
                    "two".into(),
                    x.into(),
                    f_two.into(),
                    se.into(),
                    (f_one * f_one).into(),
                    tol.into(),
                    status,
                ]);
            }
        }
    }
    if args.argmax {
        let (_, two) = two.expect("two-sided sample is simulated for --argmax");
        let reference = ChernoffTable::new(chernoff::PHI_DOMAIN, 0.01, &spec)?;
        let (d, p_ks) = mc::ks_test(&two.argmaxes, |t| reference.cdf(t))?;
        let status = verdict(p_ks > ARGMAX_LEVEL);
        table.push(vec![
            "ks".into(),
            "two".into(),
            "".into(),
            d.into(),
            "".into(),
            p_ks.into(),
            ARGMAX_LEVEL.into(),
            status,
        ]);
        let (positives, _, p_sign) = mc::sign_test(&two.argmaxes)?;
        let status = verdict(p_sign > ARGMAX_LEVEL);
        table.push(vec![
            "sign".into(),
            "two".into(),
            "".into(),
            (positives as f64 / two.argmaxes.len() as f64).into(),
            "".into(),
            p_sign.into(),
            ARGMAX_LEVEL.into(),
            status,
        ]);
    }
    if let Some(path) = args.samples_out {
        let (_, last) = samples.last().expect("at least one side is simulated");
        let file = std::fs::File::create(path)
            .map_err(|e| Failure::Numerical(format!("{}: {e}", path.display())))?;
        mc::write_csv(last, std::io::BufWriter::new(file))?;
    }
    args.common.emit(&table)?;
    if all_pass {
        Ok(())
    } else {
        Err(Failure::Numerical("Monte Carlo check failed".into()))
    }
}

fn figure(which: u8, c: Option<f64>, grid: Option<GridSpec>, common: &Common) -> Outcome {
    let spec = common.spec()?;
    if which == 4 {
        if c.is_some_and(|c| c != 1.0) {
            return Err(Failure::Usage("figure 4 is the Chernoff density, defined for c = 1".into()));
        }
        let grid = grid.unwrap_or(GridSpec {
            start: -2.0,
            stop: 2.0,
            step: 0.01,
        });
        let values = chernoff::chernoff_grid(&grid.points(), &spec)?;
        let mut table = Table::new(&["x", "density"]);
        for p in values {
            table.push(vec![p.t.into(), p.density.into()]);
        }
        return common.emit(&table);
    }
    let c = DriftCoefficient::new(c.unwrap_or(0.5))?;
    let grid = grid.unwrap_or(GridSpec {
        start: 0.0,
        stop: 5.0,
        step: 0.01,
    });
    let (side, column) = match which {
        1 => (Side::One, "cdf"),
        2 => (Side::One, "pdf"),
        _ => (Side::Two, "pdf"),
    };
    let values = parabola::evaluate_grid(c, &grid.points(), side, &spec)?;
    let mut table = Table::new(&["x", column]);
    for p in values {
        let v = if which == 1 { p.cdf } else { p.pdf };
        table.push(vec![p.x.into(), v.into()]);
    }
    common.emit(&table)
}

fn run(cli: Cli) -> Outcome {
    bmparab_core::configure_threads_from_env()?;
    match &cli.command {
        Command::Cdf { drift, side, points, common } => distribution(drift, *side, points, common, true),
        Command::Pdf { drift, side, points, common } => distribution(drift, *side, points, common, false),
        Command::TwoSided { drift, points, common } => two_sided(drift, points, common),
        Command::Chernoff { points, common } => chernoff_table(points, common),
        Command::Moment { drift, k, side, common } => moment(drift, *k, *side, common),
        Command::Quantile { drift, p, side, common } => quantiles(drift, p, *side, common),
        Command::McCheck {
            drift,
            paths,
            step,
            seed,
            x,
            side,
            no_bridge,
            argmax,
            samples_out,
            common,
        } => mc_check(McCheckArgs {
            drift,
            paths: *paths,
            step: *step,
            seed: *seed,
            xs: x,
            side: *side,
            bridge: !no_bridge,
            argmax: *argmax,
            samples_out: samples_out.as_ref(),
            common,
        }),
        Command::Figure { which, c, grid, common } => figure(*which, *c, *grid, common),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
