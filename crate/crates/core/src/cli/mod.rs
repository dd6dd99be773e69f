//! Command-line front end. Every run prints one line per check and ends
//! with `summary pass` or `summary fail`.

pub mod cavity;
pub mod config;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use clap::Parser;

use crate::error::{Error, Result};
use crate::pointcloud::{self, GenerationParams, Lcg64, DEFAULT_RADIUS_FACTOR};
use crate::solvers::{self, FieldState, ProblemData, Scheme, StepStats, Stepper};
use crate::stencil::Discretization;
use crate::verify::{
    self, error_report, ConvergenceReport, DtRule, ErrorReport, PostProcessor, SteadySolution, UnsteadySolution,
};
use crate::Vec2;

pub use cavity::{run_cavity, CavityOutcome, CavityParams, GhiaReference};
pub use config::{Cli, Command, Flags, ProblemKind, RunConfig, Task, UsageError};

/// Tolerance on fitted slopes.
pub const SLOPE_TOLERANCE: f64 = 0.35;
/// Scaled boundary-row residual every evolution step must meet.
pub const BOUNDARY_TOLERANCE: f64 = 1e-8;
/// Accepted band of the measured stability constant.
pub const STABILITY_BAND: (f64, f64) = (0.15, 0.35);
/// Accuracy of the stability bisection in `C`.
pub const STABILITY_RESOLUTION: f64 = 0.005;
/// Largest accepted centerline deviation from the reference data.
pub const CAVITY_TOLERANCE: f64 = 0.1;

/// One pass/fail line.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, pass: bool) -> Self {
        Check { name: name.into(), value, pass }
    }

    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, value, value <= bound)
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status: 0 when every check passes, 1 on failure, 2 on usage errors.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let cfg = match configure(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(&cfg, &mut out) {
        Ok(checks) => {
            let pass = all_pass(&checks);
            let _ = writeln!(out, "summary {}", if pass { "pass" } else { "fail" });
            if pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            let _ = writeln!(out, "summary fail");
            1
        }
    }
}

/// Merges the config file under the flags and resolves defaults.
pub fn configure(cli: Cli) -> std::result::Result<RunConfig, UsageError> {
    let (task, mut flags) = match cli.command {
        Command::Cloud(f) => (Task::Cloud, f),
        Command::Vpe(f) => (Task::Vpe, f),
        Command::Vhe(f) => (Task::Vhe, f),
        Command::Nse(f) => (Task::Nse, f),
        Command::Convergence { problem, flags } => (Task::Convergence(problem), flags),
        Command::Cavity(f) => (Task::Cavity, f),
        Command::Stability(f) => (Task::Stability, f),
    };
    if let Some(path) = &cli.config {
        flags.merge_file(&config::read_config_file(path)?)?;
    }
    RunConfig::resolve(task, flags)
}

/// Runs the configured command, printing progress and checks to `out`.
pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> Result<Vec<Check>> {
    let checks = match cfg.task {
        Task::Cloud => run_cloud(cfg, out)?,
        Task::Vpe => run_single(cfg, ProblemKind::Vpe, out)?,
        Task::Vhe => run_single(cfg, ProblemKind::Vhe, out)?,
        Task::Nse => run_single(cfg, ProblemKind::Nse, out)?,
        Task::Convergence(p) => run_convergence(cfg, p, out)?.1,
        Task::Cavity => run_cavity_command(cfg, out)?,
        Task::Stability => run_stability(cfg, out)?.1,
    };
    for c in &checks {
        writeln!(out, "{} {:.6e} {}", c.name, c.value, if c.pass { "pass" } else { "fail" })?;
    }
    Ok(checks)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

pub fn run_cloud(cfg: &RunConfig, out: &mut dyn Write) -> Result<Vec<Check>> {
    let cloud = pointcloud::generate(&cfg.domain, cfg.n, cfg.seed, &GenerationParams::default())?;
    let hood = pointcloud::neighbors(&cloud, DEFAULT_RADIUS_FACTOR, |_| 1)?;
    let report = pointcloud::validate(&cloud, &hood);
    writeln!(
        out,
        "cloud domain={} n={} interior={} boundary={} h={:.6e}",
        cfg.domain.kind(),
        cloud.len(),
        cloud.n_interior(),
        cloud.n_boundary(),
        cloud.h()
    )?;
    writeln!(
        out,
        "min_spacing/h={:.4} neighbors={}..{} band_violations={}",
        report.min_spacing_over_h, report.min_neighbors, report.max_neighbors, report.band_violations
    )?;
    if let Some(path) = &cfg.out {
        let mut f = create(path)?;
        cloud.write_to(&mut f)?;
        f.flush()?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(vec![Check::new("cloud_valid", report.min_spacing_over_h, report.is_valid())])
}

fn write_fields(path: &Path, disc: &Discretization, u: &[Vec2], p: Option<&[f64]>) -> Result<()> {
    let mut f = create(path)?;
    writeln!(f, "{}", if p.is_some() { "x,y,u,v,p" } else { "x,y,u,v" })?;
    for (i, x) in disc.cloud().points().iter().enumerate() {
        write!(f, "{:e},{:e},{:e},{:e}", x.x, x.y, u[i].x, u[i].y)?;
        if let Some(p) = p {
            write!(f, ",{:e}", p[i])?;
        }
        writeln!(f)?;
    }
    f.flush()?;
    Ok(())
}

fn print_report(out: &mut dyn Write, n: usize, r: &ErrorReport) -> Result<()> {
    write!(out, "level n={n} h={:.6e}", r.h)?;
    for (name, e) in r.quantities() {
        write!(out, " err_{name}={e:.6e}")?;
    }
    writeln!(out)?;
    Ok(())
}

fn evolution_checks(stats: &StepStats, nse: bool) -> Vec<Check> {
    let mut checks = vec![Check::at_most("boundary_residual", stats.max_boundary_residual, BOUNDARY_TOLERANCE)];
    if nse {
        checks.push(Check::new(
            "pressure_contract",
            stats.max_pressure_residual,
            stats.pressure_contract_held,
        ));
    }
    checks
}

/// Final state of a manufactured evolution run.
fn evolve(cfg: &RunConfig, disc: &Discretization, problem: ProblemKind) -> Result<(FieldState, StepStats)> {
    let params = cfg.evolution();
    let (_, spec) = params.scheme_spec(disc.cloud().h());
    let nse = problem == ProblemKind::Nse;
    let data = if nse { verify::nse_problem(cfg.nu, cfg.lambda)? } else { verify::heat_problem(cfg.nu)? };
    let mut stepper = if nse {
        Stepper::navier_stokes(disc, cfg.nu, spec)?
    } else {
        Stepper::heat(disc, cfg.nu, spec)?
    };
    let u0: Vec<Vec2> = disc.cloud().points().iter().map(|&x| verify::base_velocity(x)).collect();
    let state = stepper.initial_state(u0, 0.0, &data)?;
    let end = stepper.run(state, &data, cfg.t_end, |_| true)?;
    Ok((end, stepper.stats().clone()))
}

pub fn run_single(cfg: &RunConfig, problem: ProblemKind, out: &mut dyn Write) -> Result<Vec<Check>> {
    let disc = verify::level_discretization(&cfg.domain, cfg.n, cfg.seed, cfg.order)?;
    let post = PostProcessor::new(disc.cloud())?;
    let (report, u, p, checks) = match problem {
        ProblemKind::Vpe => {
            let g = |x| verify::manufactured_vpe(x).g;
            let u = solvers::solve_vpe(&disc, |x| verify::manufactured_vpe(x).f, g)?;
            let res = solvers::boundary_residual(&disc, &u, g);
            let r = error_report(&post, disc.cloud(), &u, None, &SteadySolution, 0.0)?;
            (r, u, None, vec![Check::at_most("boundary_residual", res, BOUNDARY_TOLERANCE)])
        }
        ProblemKind::Vhe | ProblemKind::Nse => {
            let nse = problem == ProblemKind::Nse;
            let (end, stats) = evolve(cfg, &disc, problem)?;
            let exact = UnsteadySolution { with_pressure: nse };
            let p = nse.then_some(end.p.as_slice());
            let r = error_report(&post, disc.cloud(), &end.u, p, &exact, end.t)?;
            writeln!(out, "steps={} t={:.6}", stats.steps, end.t)?;
            (r, end.u, nse.then_some(end.p), evolution_checks(&stats, nse))
        }
    };
    print_report(out, cfg.n, &report)?;
    if let Some(path) = &cfg.out {
        write_fields(path, &disc, &u, p.as_deref())?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(checks)
}

/// Convergence order the ladder should show: the stencil order, capped by
/// the time error expressed in powers of `h`.
pub fn expected_slope(problem: ProblemKind, order: usize, scheme: Scheme, dt: DtRule) -> f64 {
    let k = order as f64;
    if problem == ProblemKind::Vpe {
        return k;
    }
    let time_order = match scheme {
        Scheme::Imex2 => 2.0,
        _ => 1.0,
    };
    let per_h = match dt {
        DtRule::Diffusive(_) => 2.0,
        DtRule::Linear(_) => 1.0,
        DtRule::Absolute(_) => f64::INFINITY,
    };
    k.min(time_order * per_h)
}

/// Quantities whose slopes are checked.
fn checked_quantities(problem: ProblemKind) -> &'static [&'static str] {
    match problem {
        ProblemKind::Vhe => &["u", "grad_u"],
        _ => &["u", "grad_u", "div_u", "p", "grad_p"],
    }
}

pub fn run_convergence(
    cfg: &RunConfig,
    problem: ProblemKind,
    out: &mut dyn Write,
) -> Result<(ConvergenceReport, Vec<Check>)> {
    let params = cfg.evolution();
    let levels = verify::run_ladder(&cfg.ladder, cfg.workers, |n| {
        let context = |e: Error| Error::InvalidInput(format!("ladder level n={n}: {e}"));
        let disc = verify::level_discretization(&cfg.domain, n, cfg.seed, cfg.order).map_err(context)?;
        match problem {
            ProblemKind::Vpe => Ok((n, verify::vpe_errors(&disc).map_err(context)?, None)),
            ProblemKind::Vhe => {
                let o = verify::vhe_errors(&disc, &params).map_err(context)?;
                Ok((n, o.report, Some(o.stats)))
            }
            ProblemKind::Nse => {
                let o = verify::nse_errors(&disc, &params).map_err(context)?;
                Ok((n, o.report, Some(o.stats)))
            }
        }
    })?;
    let mut checks = Vec::new();
    for (n, report, stats) in &levels {
        print_report(out, *n, report)?;
        if let Some(s) = stats {
            for mut c in evolution_checks(s, problem == ProblemKind::Nse) {
                c.name = format!("{}_n{n}", c.name);
                checks.push(c);
            }
        }
    }
    let report = ConvergenceReport::new(levels.into_iter().map(|(_, r, _)| r).collect());
    let expected = expected_slope(problem, cfg.order, cfg.scheme, cfg.dt);
    writeln!(out, "expected slope {expected} +- {SLOPE_TOLERANCE}")?;
    for (name, slope) in report.slopes()? {
        if checked_quantities(problem).contains(&name) {
            checks.push(Check::new(format!("slope_{name}"), slope, (slope - expected).abs() <= SLOPE_TOLERANCE));
        } else {
            writeln!(out, "slope_{name} {slope:.6e} unchecked")?;
        }
    }
    if let Some(path) = &cfg.out {
        let mut f = create(path)?;
        report.write_csv(&mut f)?;
        f.flush()?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok((report, checks))
}

/// Pseudo-random initial field with entries in `[-1, 1]`.
pub fn random_field(n: usize, seed: u64) -> Vec<Vec2> {
    let mut rng = Lcg64::new(seed);
    (0..n)
        .map(|_| Vec2::new(2.0 * rng.next_f64() - 1.0, 2.0 * rng.next_f64() - 1.0))
        .collect()
}

/// Stability constant of forward Euler for the homogeneous heat equation
/// from a random initial field.
pub fn stability_constant(disc: &Discretization, nu: f64, seed: u64) -> Result<f64> {
    let data = ProblemData::homogeneous(nu, 0.0)?;
    let u0 = random_field(disc.cloud().len(), seed);
    solvers::measure_stability_constant(disc, &data, &u0, STABILITY_RESOLUTION)
}

pub fn run_stability(cfg: &RunConfig, out: &mut dyn Write) -> Result<(Vec<(usize, f64)>, Vec<Check>)> {
    let measured = verify::run_ladder(&cfg.ladder, cfg.workers, |n| {
        let disc = verify::level_discretization(&cfg.domain, n, cfg.seed, cfg.order)?;
        Ok((n, stability_constant(&disc, cfg.nu, cfg.seed)?))
    })?;
    let (lo, hi) = STABILITY_BAND;
    let checks = measured
        .iter()
        .map(|&(n, c)| Check::new(format!("stability_c_n{n}"), c, (lo..=hi).contains(&c)))
        .collect();
    writeln!(out, "stability band [{lo}, {hi}]")?;
    Ok((measured, checks))
}

pub fn run_cavity_command(cfg: &RunConfig, out: &mut dyn Write) -> Result<Vec<Check>> {
    let reference = GhiaReference::from_file(&cfg.reference)?;
    let params = CavityParams { n: cfg.n, seed: cfg.seed, order: cfg.order, evolution: cfg.evolution() };
    let outcome = run_cavity(&params, &reference)?;
    for s in &outcome.samples {
        writeln!(out, "{} {:.4} num={:+.5} ref={:+.5} diff={:+.5}", s.profile, s.coord, s.numerical, s.reference, s.diff())?;
    }
    writeln!(out, "steps={} max_normal_flow={:.3e}", outcome.stats.steps, outcome.max_normal_flow)?;
    if let Some(dir) = &cfg.out {
        std::fs::create_dir_all(dir)?;
        let mut f = create(&dir.join("cavity_fields.csv"))?;
        outcome.write_fields(&mut f)?;
        f.flush()?;
        let mut f = create(&dir.join("cavity_centerlines.csv"))?;
        outcome.write_comparison(&mut f)?;
        f.flush()?;
        writeln!(out, "wrote {}", dir.display())?;
    }
    let mut checks = vec![Check::at_most("centerline_max_diff", outcome.max_deviation(), CAVITY_TOLERANCE)];
    checks.extend(evolution_checks(&outcome.stats, true));
    Ok(checks)
}
