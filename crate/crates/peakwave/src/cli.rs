//! `peakwave` command line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use peakwave_core::dynamics::{simulate_with, Perturbation, PerturbationKind, SimConfig};
use peakwave_core::profile::{validate_params, ProfileEvaluator, Side};
use peakwave_core::spectral::{
    discretize_operator, odd_fraction, spectrum_report, zero_mode_guard, GridSpec, OperatorKind, Sector,
};
use peakwave_core::stability::{classify_analytic, classify_numeric, Outcome, Space};
use peakwave_core::vk::{self, ZSTAR_PROBE};
use peakwave_core::{Error, WaveParameters};

use crate::report::{emit_report, fmt_num, Cell, Format, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "peakwave", version, about = "Peak standing waves of the NLS equation with a delta defect")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Directory for output files; relative --out paths are resolved against it.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ParamArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub l1: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub l2: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub omega: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub z: f64,
}

impl ParamArgs {
    fn build(&self) -> Result<WaveParameters, Error> {
        validate_params(self.l1, self.l2, self.omega, self.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OperatorArg {
    L1,
    L2,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SectorArg {
    Full,
    Even,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PerturbationArg {
    None,
    Even,
    Odd,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample φ and φ' on [−xmax, xmax].
    Profile {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 10.0)]
        xmax: f64,
        #[arg(long, default_value_t = 2001)]
        n: usize,
    },
    /// ‖φ‖² and its ω-derivative on an (ω, Z) grid.
    VkScan {
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        l1: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        l2: f64,
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',', required = true)]
        z: Vec<f64>,
        #[arg(long, allow_hyphen_values = true, default_value_t = -10.0)]
        omega_min: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = -0.05)]
        omega_max: f64,
        #[arg(long, default_value_t = 50)]
        n_omega: usize,
    },
    /// Lowest eigenvalues of L1, L2 or −d² − Zδ.
    Spectrum {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = OperatorArg::L1)]
        operator: OperatorArg,
        #[arg(long, value_enum, default_value_t = SectorArg::Full)]
        sector: SectorArg,
        #[arg(long, default_value_t = 5)]
        k: usize,
        /// Grid spacing (default: 2001 nodes on the working window).
        #[arg(long)]
        h: Option<f64>,
        /// Half-width of the window (default 30/√(−ω) + |b|).
        #[arg(long)]
        xmax: Option<f64>,
    },
    /// Numeric and analytic stability verdicts.
    Classify {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = SectorArg::Full)]
        space: SectorArg,
    },
    /// Threshold Z* where −∂ω‖φ‖² changes sign, for λ₁ = λ₂ = 1.
    FindZstar {
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true,
              default_values_t = [-0.95, -0.75])]
        bracket: Vec<f64>,
        /// ω probe values (comma separated).
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        omegas: Option<Vec<f64>>,
    },
    /// Evolve φ plus a small bump and track the conserved quantities.
    Simulate {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = PerturbationArg::None)]
        perturbation: PerturbationArg,
        #[arg(long, default_value_t = 1e-2)]
        amplitude: f64,
        #[arg(long, default_value_t = 10.0)]
        horizon: f64,
        #[arg(long, default_value_t = 0.02)]
        h: f64,
        /// Time step (default h/4).
        #[arg(long)]
        dt: Option<f64>,
        /// Output interval in time units.
        #[arg(long, default_value_t = 0.1)]
        every: f64,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("usage: {0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_validation() => EXIT_VALIDATION,
            CliError::Core(_) => EXIT_NUMERIC,
            CliError::Io(_) => EXIT_IO,
            CliError::Usage(_) => EXIT_VALIDATION,
        }
    }
}

fn ext(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn output_path(cli: &Cli, command: &str) -> Option<PathBuf> {
    match (&cli.out, &cli.out_dir) {
        (Some(o), Some(d)) if o.is_relative() => Some(d.join(o)),
        (Some(o), _) => Some(o.clone()),
        (None, Some(d)) => Some(d.join(format!("{command}.{}", ext(cli.format)))),
        (None, None) => None,
    }
}

fn put_params(r: &mut Report, p: &WaveParameters) {
    r.set("lambda1", p.lambda1)
        .set("lambda2", p.lambda2)
        .set("omega", p.omega)
        .set("z", p.z)
        .set("regime", format!("{:?}", p.regime));
}

fn put_grid(r: &mut Report, g: &GridSpec) {
    r.set("grid_half_width", g.half_width)
        .set("grid_n_points", g.n_points)
        .set("grid_spacing", g.spacing)
        .set("grid_sector", format!("{:?}", g.sector));
}

fn new_report(command: &str, columns: Vec<&'static str>) -> Report {
    let mut r = Report::new(command, columns);
    r.set("version", env!("CARGO_PKG_VERSION"));
    r
}

/// Runs a parsed command, writing tables and returning the stdout line (if any).
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Profile { params, xmax, n } => {
            let p = params.build()?;
            if *n < 2 || !(*xmax > 0.0) {
                return Err(CliError::Usage("profile needs --n >= 2 and --xmax > 0".into()));
            }
            let ev = ProfileEvaluator::new(p);
            let mut r = new_report("profile", vec!["x", "phi", "dphi"]);
            put_params(&mut r, &p);
            r.set("xmax", *xmax).set("n", *n).set("dphi_at_0", "mean of one-sided limits");
            for i in 0..*n {
                let x = -xmax + 2.0 * xmax * i as f64 / (*n - 1) as f64;
                let d = if x > 0.0 {
                    ev.phi_derivative(x, Side::Right)
                } else if x < 0.0 {
                    ev.phi_derivative(x, Side::Left)
                } else {
                    0.5 * (ev.phi_derivative(0.0, Side::Left) + ev.phi_derivative(0.0, Side::Right))
                };
                r.push(vec![x.into(), ev.phi(x).into(), d.into()]);
            }
            emit(cli, "profile", &r)
        }
        Command::VkScan { l1, l2, z, omega_min, omega_max, n_omega } => {
            if *n_omega < 1 || !(omega_min <= omega_max) {
                return Err(CliError::Usage("vk-scan needs --n-omega >= 1 and --omega-min <= --omega-max".into()));
            }
            let mut r = new_report("vk-scan", vec!["omega", "z", "norm_sq", "dnorm_domega", "p_index"]);
            r.set("lambda1", *l1)
                .set("lambda2", *l2)
                .set("omega_min", *omega_min)
                .set("omega_max", *omega_max)
                .set("n_omega", *n_omega)
                .set("degenerate_slope", vk::DEGENERATE_SLOPE);
            let unit = *l1 == 1.0 && *l2 == 1.0;
            r.set("method", if unit { "closed form" } else { "quadrature + Richardson central difference" });
            let mut skipped = 0usize;
            let mut first_err = None;
            for &zz in z {
                for i in 0..*n_omega {
                    let w = if *n_omega == 1 {
                        *omega_min
                    } else {
                        omega_min + (omega_max - omega_min) * i as f64 / (*n_omega - 1) as f64
                    };
                    match validate_params(*l1, *l2, w, zz) {
                        Ok(p) => {
                            let row = vk::vk_row(&p)?;
                            r.push(vec![
                                row.omega.into(),
                                row.z.into(),
                                row.norm_sq.into(),
                                row.dnorm_domega.into(),
                                row.p_index.into(),
                            ]);
                        }
                        Err(e) => {
                            skipped += 1;
                            first_err.get_or_insert(e);
                        }
                    }
                }
            }
            if r.rows.is_empty() {
                return Err(first_err.expect("no points at all").into());
            }
            r.set("skipped_inadmissible", skipped);
            if skipped > 0 {
                eprintln!("vk-scan: skipped {skipped} inadmissible (omega, z) points");
            }
            emit(cli, "vk-scan", &r)
        }
        Command::Spectrum { params, operator, sector, k, h, xmax } => {
            let p = params.build()?;
            let sec = match sector {
                SectorArg::Full => Sector::FullLine,
                SectorArg::Even => Sector::EvenSector,
            };
            let working = GridSpec::working(&p, sec);
            let grid = match (h, xmax) {
                (None, None) => working,
                (h, l) => GridSpec::with_spacing(l.unwrap_or(working.half_width), h.unwrap_or(working.spacing), sec)?,
            };
            let kind = match operator {
                OperatorArg::L1 => OperatorKind::L1,
                OperatorArg::L2 => OperatorKind::L2,
                OperatorArg::Free => OperatorKind::FreeWithDelta,
            };
            let op = discretize_operator(kind, &p, grid)?;
            let rep = spectrum_report(&op, *k)?;
            let mut r = new_report(
                "spectrum",
                vec!["index", "eigenvalue", "odd_fraction", "negative_count", "kernel_residual", "essential_edge"],
            );
            put_params(&mut r, &p);
            put_grid(&mut r, &grid);
            r.set("operator", format!("{kind:?}"))
                .set("k", *k)
                .set("zero_mode_guard", zero_mode_guard(p.omega, grid.spacing))
                .set("bisection_tol", 1e-10)
                .set("inverse_iteration_residual", 1e-8);
            for (i, (l, v)) in rep.lowest_pairs.iter().enumerate() {
                r.push(vec![
                    i.into(),
                    (*l).into(),
                    odd_fraction(v).into(),
                    rep.negative_count.into(),
                    rep.kernel_residual.into(),
                    rep.essential_edge.into(),
                ]);
            }
            emit(cli, "spectrum", &r)
        }
        Command::Classify { params, space } => {
            let p = params.build()?;
            let sp = match space {
                SectorArg::Full => Space::FullH1,
                SectorArg::Even => Space::EvenH1,
            };
            let num = classify_numeric(&p, sp)?;
            let ana = classify_analytic(&p, sp)?;
            let line = if ana.outcome == Outcome::Indeterminate && num.outcome != Outcome::Indeterminate {
                format!("{:?} (numeric; analytic: Indeterminate)", num.outcome)
            } else if num.outcome == ana.outcome {
                format!("{:?} (numeric=analytic)", num.outcome)
            } else {
                format!("{:?} (numeric) != {:?} (analytic)", num.outcome, ana.outcome)
            };
            println!("{line}");
            for note in [&num.note, &ana.note].into_iter().flatten() {
                eprintln!("note: {note}");
            }
            let mut r = new_report("classify", vec!["space", "n_hessian", "p_index", "numeric", "analytic", "agree"]);
            put_params(&mut r, &p);
            put_grid(&mut r, &GridSpec::working(&p, Sector::FullLine));
            let opt = |v: Option<usize>| v.map_or(Cell::Num(f64::NAN), Cell::from);
            r.push(vec![
                format!("{sp:?}").into(),
                opt(num.n_hessian),
                opt(num.p_index.map(usize::from)),
                format!("{:?}", num.outcome).into(),
                format!("{:?}", ana.outcome).into(),
                (num.outcome == ana.outcome).into(),
            ]);
            emit_file_only(cli, "classify", &r)
        }
        Command::FindZstar { bracket, omegas } => {
            let probe: Vec<f64> = omegas.clone().unwrap_or_else(|| ZSTAR_PROBE.to_vec());
            let zs = vk::find_zstar(&probe, bracket[0], bracket[1])?;
            println!("{}", fmt_num(zs));
            let delta = 1e-3;
            let mut r = new_report("find-zstar", vec!["omega", "z", "neg_dnorm_domega"]);
            r.set("zstar", zs)
                .set("bracket_lo", bracket[0])
                .set("bracket_hi", bracket[1])
                .set("bisection_width", 1e-7)
                .set("probe_delta", delta);
            for (w, z, g) in vk::sign_table(&probe, &[zs - delta, zs + delta])? {
                r.push(vec![w.into(), z.into(), g.into()]);
            }
            emit_file_only(cli, "find-zstar", &r)
        }
        Command::Simulate { params, perturbation, amplitude, horizon, h, dt, every } => {
            let p = params.build()?;
            let ev = ProfileEvaluator::new(p);
            let grid = GridSpec::with_spacing(30.0 / ev.root_minus_omega + ev.shift_b.abs(), *h, Sector::FullLine)?;
            let dt = dt.unwrap_or(h / 4.0);
            if !(*every > 0.0) {
                return Err(CliError::Usage("--every must be positive".into()));
            }
            let cfg = SimConfig {
                grid,
                dt,
                horizon: *horizon,
                stride: ((every / dt).round() as usize).max(1),
            };
            let pert = match perturbation {
                PerturbationArg::None => Perturbation::none(),
                PerturbationArg::Even => Perturbation { kind: PerturbationKind::EvenBump, amplitude: *amplitude },
                PerturbationArg::Odd => Perturbation { kind: PerturbationKind::OddBump, amplitude: *amplitude },
            };
            let res = simulate_with(&p, pert, cfg)?;
            let mut r = new_report("simulate", vec!["time", "energy", "charge", "orbital_distance"]);
            put_params(&mut r, &p);
            put_grid(&mut r, &grid);
            let d0 = res.initial_distance();
            r.set("perturbation", format!("{:?}", pert.kind))
                .set("amplitude", pert.amplitude)
                .set("horizon", *horizon)
                .set("dt", dt)
                .set("stride", cfg.stride)
                .set("phi_h1_norm", res.phi_h1_norm)
                .set("initial_distance", d0)
                .set("max_distance", res.max_distance())
                .set("instability_factor", 20.0)
                .set("exceeds_instability_factor", res.max_distance() > 20.0 * d0 && d0 > 0.0)
                .set("blowup_at", res.blowup_at.unwrap_or(f64::NAN));
            for row in &res.rows {
                r.push(vec![
                    row.time.into(),
                    row.energy.into(),
                    row.charge.into(),
                    row.orbital_distance.into(),
                ]);
            }
            emit(cli, "simulate", &r)?;
            res.check()?;
            Ok(())
        }
    }
}

fn emit(cli: &Cli, command: &str, r: &Report) -> Result<(), CliError> {
    let path = output_path(cli, command);
    emit_report(r, cli.format, path.as_deref())?;
    Ok(())
}

// Commands whose stdout is a one-line answer write their table only on request.
fn emit_file_only(cli: &Cli, command: &str, r: &Report) -> Result<(), CliError> {
    match output_path(cli, command) {
        Some(p) => Ok(emit_report(r, cli.format, Some(Path::new(&p)))?),
        None => Ok(()),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            match &e {
                CliError::Core(c) => eprintln!("peakwave: {}::{c}", c.module()),
                other => eprintln!("peakwave: {other}"),
            }
            e.exit_code()
        }
    }
}
