//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 when the
//! mathematics fails (regime violation, non-convergence, failed stability
//! verdict). Errors are printed to stderr as `ERROR <code>: <message>`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::{parse_config, IbvpInit, SimulationConfig};
use crate::csv_io::{write_field_csv, write_snapshots_csv, write_table, write_text};
use crate::error::{Error, Result};
use crate::field::PeriodicField;
use crate::fixed_point::{solve_periodic, Grid, SolverReport};
use crate::friction::validate_beta;
use crate::ibvp::{check_compatibility, make_compatible_perturbation, Ibvp};
use crate::model::{subsonic_check, Perturbation};
use crate::refinement::refinement_study;
use crate::stability::{stability_from_solution, uniqueness_experiment, StabilityConfig};

#[derive(Debug, Parser)]
#[command(name = "pipeflow", version, about = "Time-periodic pipe flows with friction: solve, simulate, verify")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Configuration file (`section.key = value` lines); defaults apply without one.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory, overriding `output.dir`.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Grid override, e.g. `128x128`.
    #[arg(long, global = true, value_name = "NTxNX", value_parser = parse_grid)]
    grid: Option<Grid>,

    /// Print errors only.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for the time-periodic solution; writes periodic_field.csv and the solver report.
    Periodic,
    /// Run the initial-boundary value problem; writes trajectory.csv.
    Ibvp,
    /// Perturb the periodic solution and measure the decay per window.
    Stability,
    /// Refinement study over `grid.ladder` (or n/4, n/2, n with --grid).
    Convergence,
    /// Check friction, boundary data and initial compatibility without solving at full size.
    Validate,
}

fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NTxNX, got `{s}`"))?;
    let nt = a.trim().parse::<usize>().map_err(|e| format!("bad NT `{a}`: {e}"))?;
    let nx = b.trim().parse::<usize>().map_err(|e| format!("bad NX `{b}`: {e}"))?;
    if nt < 16 || nx < 16 {
        return Err(format!("grid must be at least 16x16 (got {nt}x{nx})"));
    }
    Ok(Grid::new(nt, nx))
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_regime() || matches!(e, Error::InsufficientData(_)) {
        2
    } else {
        1
    }
}

fn report_error(e: &Error) -> i32 {
    match e {
        Error::Config(violations) => {
            for v in violations {
                eprintln!("ERROR {}: {v}", e.code());
            }
        }
        _ => eprintln!("ERROR {}: {}", e.code(), e.to_string().replace('\n', " ")),
    }
    exit_code(e)
}

struct Ctx {
    cfg: SimulationConfig,
    out: PathBuf,
    quiet: bool,
    grid_override: bool,
}

impl Ctx {
    fn say(&self, text: &str) {
        if !self.quiet {
            print!("{text}");
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn prepare_out(&self) -> Result<()> {
        std::fs::create_dir_all(&self.out).map_err(|source| Error::Io {
            path: self.out.clone(),
            source,
        })
    }
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn cli_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprint!("{}", e.render());
            let first = e.to_string().lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            eprintln!("ERROR usage: {first}");
            return 1;
        }
    };
    let ctx = match load(&cli) {
        Ok(c) => c,
        Err(e) => return report_error(&e),
    };
    let result = match cli.command {
        Command::Periodic => cmd_periodic(&ctx),
        Command::Ibvp => cmd_ibvp(&ctx),
        Command::Stability => cmd_stability(&ctx),
        Command::Convergence => cmd_convergence(&ctx),
        Command::Validate => cmd_validate(&ctx),
    };
    match result {
        Ok(code) => code,
        Err(e) => report_error(&e),
    }
}

fn load(cli: &Cli) -> Result<Ctx> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?,
        None => String::new(),
    };
    let mut cfg = parse_config(&text)?;
    if let Some(g) = cli.grid {
        cfg.grid = g;
    }
    let out = cli.out.clone().unwrap_or_else(|| cfg.out_dir.clone());
    Ok(Ctx {
        cfg,
        out,
        quiet: cli.quiet,
        grid_override: cli.grid.is_some(),
    })
}

fn solve(ctx: &Ctx) -> Result<(PeriodicField, SolverReport)> {
    let c = &ctx.cfg;
    solve_periodic(&c.boundary, &c.friction, &c.gas, c.grid, c.solver)
}

fn solver_summary(rep: &SolverReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "converged: {}", rep.converged);
    let _ = writeln!(s, "sweeps: {}", rep.iterations);
    for (l, d) in rep.sup_diffs.iter().enumerate() {
        let kappa = if l == 0 { String::new() } else { format!("  kappa_hat = {:.6e}", rep.kappa_hats[l - 1]) };
        let _ = writeln!(s, "  sweep {:>3}: sup_diff = {d:.6e}{kappa}", l + 1);
    }
    let _ = writeln!(s, "c0_norm: {:.6e}", rep.c0_norm);
    let _ = writeln!(s, "c1_norm_fd: {:.6e}", rep.c1_norm_fd);
    let _ = writeln!(s, "nu_max: {:.9}", rep.nu_max);
    let _ = writeln!(s, "T0: {:.9}", rep.t0_window);
    if let Some(sub) = &rep.subsonic {
        let _ = writeln!(
            s,
            "subsonic: {} (min -lambda1 = {:.6e}, min lambda2 = {:.6e})",
            sub.pass, sub.min_neg_lambda1, sub.min_lambda2
        );
    }
    s
}

fn write_sweeps(path: &Path, rep: &SolverReport) -> Result<()> {
    let rows = rep.sup_diffs.iter().enumerate().map(|(l, d)| {
        let kappa = if l == 0 { f64::NAN } else { rep.kappa_hats[l - 1] };
        vec![(l + 1) as f64, *d, kappa]
    });
    write_table(path, &["sweep", "sup_diff", "kappa_hat"], rows)
}

fn cmd_periodic(ctx: &Ctx) -> Result<i32> {
    ctx.prepare_out()?;
    let (field, rep) = match solve(ctx) {
        Ok(v) => v,
        Err(Error::NonConvergence(rep)) => {
            let text = solver_summary(&rep);
            write_text(&ctx.path("solver_report.txt"), &text)?;
            write_sweeps(&ctx.path("solver_sweeps.csv"), &rep)?;
            ctx.say(&text);
            return Err(Error::NonConvergence(rep));
        }
        Err(e) => return Err(e),
    };
    write_field_csv(&field, &ctx.cfg.gas, &ctx.path("periodic_field.csv"))?;
    write_sweeps(&ctx.path("solver_sweeps.csv"), &rep)?;
    let text = solver_summary(&rep);
    write_text(&ctx.path("solver_report.txt"), &text)?;
    ctx.say(&text);
    Ok(0)
}

fn ibvp_init(ctx: &Ctx) -> Result<Vec<Perturbation>> {
    let c = &ctx.cfg;
    match c.ibvp_init {
        IbvpInit::Rest => Ok(vec![Perturbation::ZERO; c.grid.nx]),
        IbvpInit::Periodic => {
            let (field, _) = solve(ctx)?;
            Ok(make_compatible_perturbation(&field.row(0), c.amplitude, &c.gas))
        }
    }
}

fn cmd_ibvp(ctx: &Ctx) -> Result<i32> {
    ctx.prepare_out()?;
    let c = &ctx.cfg;
    let init = ibvp_init(ctx)?;
    let prob = Ibvp::new(&c.boundary, &c.friction, &c.gas)
        .with_mode(c.mode)
        .with_cfl(c.cfl);
    let path = ctx.path("trajectory.csv");
    match prob.run(&init, c.ibvp_duration, c.snapshot_every) {
        Ok(traj) => {
            write_snapshots_csv(&traj.snapshots, &c.gas, &path)?;
            let last = traj.last().expect("a successful run ends with a snapshot");
            ctx.say(&format!(
                "steps: {}\nsnapshots: {}\nfinal t: {:.9}\nmax |phi|: {:.6e}\nfinal max |phi|: {:.6e}\n",
                traj.steps,
                traj.snapshots.len(),
                last.t,
                traj.max_c0,
                last.sup_norm()
            ));
            Ok(0)
        }
        Err(run) => {
            write_snapshots_csv(&run.partial.snapshots, &c.gas, &path)?;
            ctx.say(&format!("partial trajectory: {} snapshots\n", run.partial.snapshots.len()));
            Err(run.error)
        }
    }
}

fn stability_cfg(c: &SimulationConfig) -> StabilityConfig {
    let mut s = StabilityConfig::new(c.gas, c.friction.clone(), c.boundary.clone(), c.grid, c.amplitude);
    s.solve = c.solver;
    s.cfl = c.cfl;
    s.windows = c.windows;
    s.mode = c.mode;
    s
}

fn fit_line(fit: &std::result::Result<crate::stability::DecayFit, String>) -> String {
    match fit {
        Ok(f) => format!("{:.6e} (windows {:?})", f.xi_hat, f.used),
        Err(e) => format!("none ({e})"),
    }
}

fn cmd_stability(ctx: &Ctx) -> Result<i32> {
    ctx.prepare_out()?;
    let (field, rep) = solve(ctx)?;
    let cfg = stability_cfg(&ctx.cfg);
    let st = stability_from_solution(&cfg, &field, &rep)?;
    let un = uniqueness_experiment(&cfg, &field, &rep)?;

    let rows = (0..st.distances.len()).map(|k| {
        vec![
            k as f64,
            k as f64 * st.t0_window,
            st.distances[k],
            st.orbit_distances[k],
            un.distances[k],
        ]
    });
    write_table(
        &ctx.path("stability.csv"),
        &["k", "t", "distance", "orbit_distance", "pair_distance"],
        rows,
    )?;

    let mut s = String::new();
    let _ = writeln!(s, "T0: {:.9}", st.t0_window);
    let _ = writeln!(s, "amplitude: {:e}", st.amplitude);
    let _ = writeln!(s, "closure residual: {:.6e}", st.closure_residual);
    let _ = writeln!(s, "noise floor: {:.6e}", st.noise_floor);
    for (k, d) in st.distances.iter().enumerate() {
        let _ = writeln!(
            s,
            "  k = {k}: d = {d:.6e}  orbit = {:.6e}  pair = {:.6e}",
            st.orbit_distances[k], un.distances[k]
        );
    }
    let _ = writeln!(s, "xi_hat: {}", fit_line(&st.fit));
    let _ = writeln!(s, "monotone_fraction: {:.3}", st.monotone_fraction);
    let _ = writeln!(s, "d_K / d_0: {:.6e}", st.final_ratio);
    let _ = writeln!(s, "orbit xi_hat: {}", fit_line(&st.orbit_fit));
    let _ = writeln!(s, "pair xi_hat: {}", fit_line(&un.fit));
    let _ = writeln!(s, "trivial: {}", st.trivial);
    let _ = writeln!(s, "pass: {}", st.pass);
    let _ = writeln!(s, "uniqueness pass: {}", un.pass);
    write_text(&ctx.path("stability_report.txt"), &s)?;
    ctx.say(&s);
    if st.pass && un.pass {
        Ok(0)
    } else {
        let why = match &st.fit {
            Err(e) if !st.pass => e.trim_start_matches("insufficient data: ").to_string(),
            _ => format!("stability pass = {}, uniqueness pass = {}", st.pass, un.pass),
        };
        Err(Error::InsufficientData(format!("stability verdict failed: {why}")))
    }
}

fn cmd_convergence(ctx: &Ctx) -> Result<i32> {
    ctx.prepare_out()?;
    let c = &ctx.cfg;
    let ladder = if ctx.grid_override {
        let n = c.grid.nx;
        vec![n / 4, n / 2, n]
    } else {
        c.ladder.clone()
    };
    if let Some(&n) = ladder.iter().find(|&&n| n < 16) {
        return Err(Error::Config(vec![format!("refinement grids must be at least 16 (got {n})")]));
    }
    let rows = refinement_study(&ladder, &c.boundary, &c.friction, &c.gas, c.solver, c.cfl)?;
    let nan = f64::NAN;
    write_table(
        &ctx.path("convergence.csv"),
        &["n", "sweeps", "closure", "closure_order", "oracle", "oracle_order"],
        rows.iter().map(|r| {
            vec![
                r.n as f64,
                r.sweeps as f64,
                r.closure,
                r.closure_order.unwrap_or(nan),
                r.oracle,
                r.oracle_order.unwrap_or(nan),
            ]
        }),
    )?;
    let mut s = format!("{:>6} {:>6} {:>14} {:>8} {:>14} {:>8}\n", "n", "sweeps", "closure", "order", "oracle", "order");
    for r in &rows {
        let o = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.3}"));
        let _ = writeln!(
            s,
            "{:>6} {:>6} {:>14} {:>8} {:>14} {:>8}",
            r.n,
            r.sweeps,
            format!("{:.6e}", r.closure),
            o(r.closure_order),
            format!("{:.6e}", r.oracle),
            o(r.oracle_order)
        );
    }
    ctx.say(&s);
    Ok(0)
}

fn cmd_validate(ctx: &Ctx) -> Result<i32> {
    let c = &ctx.cfg;
    let mut s = String::new();
    let mut ok = true;
    let mut line = |name: &str, pass: bool, detail: String| {
        ok &= pass;
        let _ = writeln!(s, "{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    };

    let beta = validate_beta(&c.friction, &c.gas, 256)?;
    line(
        "friction",
        beta.pass,
        format!(
            "C1 sample {:.6e} vs claimed {:.6e}, periodicity residual {:e}",
            beta.c1_sample, c.friction.c0_claimed, beta.periodicity_residual
        ),
    );
    let bd = c.boundary.validate(c.gas.period, 4096);
    line(
        "boundary",
        bd.pass,
        format!(
            "C1 sample {:.6e} vs eps {:.6e}, periodicity residual {:e}",
            bd.c1_sample, bd.eps, bd.periodicity_residual
        ),
    );

    // initial data of the `ibvp` command, from a coarse periodic solve
    let init = match c.ibvp_init {
        IbvpInit::Rest => Ok(vec![Perturbation::ZERO; c.grid.nx]),
        IbvpInit::Periodic => solve_periodic(&c.boundary, &c.friction, &c.gas, Grid::new(32, 33), c.solver)
            .map(|(f, _)| make_compatible_perturbation(&f.row(0), c.amplitude, &c.gas)),
    };
    match init {
        Ok(init) => {
            let rep = check_compatibility(&init, &c.boundary, c.mode, &c.friction, &c.gas)?;
            line(
                "compatibility",
                rep.pass,
                format!(
                    "order-0 {:.3e}, order-1 {:.3e}{}",
                    rep.max_order0(),
                    rep.max_order1(),
                    if rep.order1_checked { format!(" (limit {:.3e})", 10.0 * rep.h_x) } else { " (not checked in reflective mode)".into() }
                ),
            );
            let sub = subsonic_check(init.iter().copied(), &c.gas);
            line("subsonic initial data", sub.pass, format!("nu_max {:.6}", sub.nu_max));
        }
        Err(e) => line("compatibility", false, format!("coarse periodic solve failed: {e}")),
    }
    ctx.say(&s);
    if ok {
        Ok(0)
    } else {
        if ctx.quiet {
            eprint!("{s}");
        }
        Err(Error::Config(vec!["validation failed".to_string()]))
    }
}
