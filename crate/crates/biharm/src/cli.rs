//! Command-line front end. Exit codes: 0 success, 1 failure (a Failed
//! certificate, no sign change, no blowup, a defect over threshold),
//! 2 an Inconclusive certificate, 64 usage errors.

use std::ffi::OsString;
use std::f64::consts::{FRAC_PI_2, PI};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::audit::{energy_audit, EnergyMode};
use crate::cert::{run_task, CertStatus, TaskId};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::manifest::{OutDir, RunManifest};
use crate::manifold::classify::{sign_changes, theta_grid, write_grid_csv};
use crate::manifold::{classify_grid, find_heteroclinic, theta0, Outcome};
use crate::ode::{linearization, Dimension, Parity};
use crate::profile::{build_winding_profile, WindingSeed};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Environment variable holding the worker-thread count.
pub const THREADS_ENV: &str = "BIHARM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "biharm", version, about = "Certificates, shooting and winding profiles for equivariant biharmonic maps")]
pub struct Cli {
    /// TOML file merged over the built-in defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run interval certificates.
    Verify(VerifyArgs),
    /// Locate the heteroclinic orbit by bisection on the seeding circle.
    Shoot(ShootArgs),
    /// Classify orbits over a grid of seed angles.
    Classify(ClassifyArgs),
    /// Build the winding profile from a blowup orbit.
    Wind(WindArgs),
    /// Audit energy conservation (d = 4) or monotonicity (d > 4).
    Energy(EnergyArgs),
    /// Print the linearization at a critical point.
    Spectrum(SpectrumArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// V1..V9 or `all`.
    #[arg(long, default_value = "all")]
    pub task: String,
    /// Overrides each task's default minimum box width.
    #[arg(long)]
    pub min_width: Option<f64>,
    #[arg(long, default_value = "out/verify")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ShootArgs {
    #[arg(long, default_value_t = 5)]
    pub d: u32,
    #[arg(long)]
    pub eps0: Option<f64>,
    #[arg(long)]
    pub theta_tol: Option<f64>,
    #[arg(long)]
    pub span: Option<f64>,
    /// `a:b`, default `-pi/2:theta0+0.05`.
    #[arg(long, allow_hyphen_values = true)]
    pub bracket: Option<String>,
    #[arg(long, default_value = "out/shoot")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub grid: Option<usize>,
    /// `a:b` with terms like `-pi/2`, `theta0+0.01`, `1.2`.
    #[arg(long, allow_hyphen_values = true, default_value = "-pi/2:theta0")]
    pub theta_range: String,
    #[arg(long)]
    pub eps0: Option<f64>,
    #[arg(long, default_value = "out/classify")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct WindArgs {
    /// Seed angle; defaults to θ₀ plus the configured offset.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub eps0: Option<f64>,
    #[arg(long)]
    pub blowup_norm: Option<f64>,
    #[arg(long)]
    pub max_span: Option<f64>,
    #[arg(long, default_value = "out/wind")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    #[arg(long, default_value_t = 4)]
    pub d: u32,
    /// Defaults to conservation for d = 4 and monotonicity otherwise.
    #[arg(long)]
    pub mode: Option<EnergyMode>,
    #[arg(long)]
    pub orbits: Option<usize>,
    #[arg(long)]
    pub span: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "out/energy")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long, default_value_t = 5)]
    pub d: u32,
    #[arg(long, default_value = "even")]
    pub parity: Parity,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Worst conservation defect accepted by `energy`.
pub const CONSERVATION_TOL: f64 = 1e-7;
/// Most negative energy increment accepted by `energy`.
pub const MONOTONICITY_TOL: f64 = -1e-8;

/// Parses one angle: a number, `[k]pi[/n]` with optional sign, or
/// `theta0` with an optional signed offset.
pub fn parse_angle(text: &str, theta0: f64) -> Result<f64> {
    let t = text.trim();
    let bad = || Error::Config(format!("cannot parse angle `{text}`"));
    if let Some(rest) = t.strip_prefix("theta0") {
        return if rest.is_empty() { Ok(theta0) } else { rest.parse::<f64>().map(|o| theta0 + o).map_err(|_| bad()) };
    }
    if let Some(i) = t.find("pi") {
        let (head, tail) = (&t[..i], &t[i + 2..]);
        let coef = match head.trim_end_matches('*') {
            "" | "+" => 1.0,
            "-" => -1.0,
            h => h.parse::<f64>().map_err(|_| bad())?,
        };
        let den = match tail.strip_prefix('/') {
            Some(n) => n.parse::<f64>().map_err(|_| bad())?,
            None if tail.is_empty() => 1.0,
            None => return Err(bad()),
        };
        return Ok(coef * PI / den);
    }
    t.parse::<f64>().map_err(|_| bad())
}

/// Parses `a:b` with a < b.
pub fn parse_range(text: &str, theta0: f64) -> Result<(f64, f64)> {
    let (a, b) = text.split_once(':').ok_or_else(|| Error::Config(format!("range `{text}` needs the form a:b")))?;
    let (a, b) = (parse_angle(a, theta0)?, parse_angle(b, theta0)?);
    if !(a < b) {
        return Err(Error::Config(format!("empty range {a}:{b}")));
    }
    Ok((a, b))
}

fn code_for(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Dimension { .. } | Error::UnknownTask(_) | Error::Toml(_) => EXIT_USAGE,
        _ => EXIT_FAILED,
    }
}

/// Parses `args` (including the program name), runs the command on a pool
/// sized by `BIHARM_THREADS`, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => pool = pool.num_threads(n),
            _ => {
                eprintln!("error: {THREADS_ENV} must be a positive integer, got `{v}`");
                return EXIT_USAGE;
            }
        }
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAILED;
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            code_for(&e)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let cfg = Config::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Verify(a) => cmd_verify(a, cfg),
        Command::Shoot(a) => cmd_shoot(a, cfg),
        Command::Classify(a) => cmd_classify(a, cfg),
        Command::Wind(a) => cmd_wind(a, cfg),
        Command::Energy(a) => cmd_energy(a, cfg),
        Command::Spectrum(a) => cmd_spectrum(a, cfg),
    }
}

/// Writes the resolved config next to the outputs and returns the argv
/// prefix that points back at it.
fn base_argv(out: &mut OutDir, cfg: &Config, command: &str) -> Result<Vec<String>> {
    let text = toml::to_string(cfg).map_err(|e| Error::Config(e.to_string()))?;
    out.write("config.toml", text.as_bytes())?;
    let cfg_path = out.path().join("config.toml");
    Ok(vec!["--config".into(), cfg_path.display().to_string(), command.into()])
}

fn out_arg(argv: &mut Vec<String>, out: &Path) {
    argv.extend(["--out".to_string(), out.display().to_string()]);
}

pub fn cmd_verify(a: &VerifyArgs, cfg: Config) -> Result<i32> {
    let tasks: Vec<TaskId> = if a.task.eq_ignore_ascii_case("all") { TaskId::ALL.to_vec() } else { vec![a.task.parse()?] };
    if let Some(w) = a.min_width {
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::Config(format!("min_width must be positive, got {w}")));
        }
    }
    let start = Instant::now();
    let mut out = OutDir::create(&a.out)?;
    let mut argv = base_argv(&mut out, &cfg, "verify")?;
    argv.extend(["--task".into(), a.task.clone()]);
    if let Some(w) = a.min_width {
        argv.extend(["--min-width".into(), w.to_string()]);
    }
    out_arg(&mut argv, &a.out);
    let mut statuses = Vec::new();
    for id in tasks {
        let cert = run_task(id, a.min_width.unwrap_or(id.default_min_width()))?;
        println!("{id}: {:?} ({} boxes, {} ms)", cert.status, cert.boxes_examined, cert.wall_ms);
        out.write_json(&format!("certificate_{id}.json"), &cert)?;
        statuses.push((id.to_string(), cert.status));
    }
    let code = if statuses.iter().any(|s| s.1 == CertStatus::Failed) {
        EXIT_FAILED
    } else if statuses.iter().any(|s| s.1 == CertStatus::Inconclusive) {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    };
    let mut m = RunManifest::new("verify", argv, json!({ "task": a.task, "min_width": a.min_width }), cfg);
    m.summary = json!({ "statuses": statuses, "exit_code": code });
    m.wall_ms = start.elapsed().as_millis() as u64;
    out.finish(m)?;
    Ok(code)
}

pub fn cmd_shoot(a: &ShootArgs, mut cfg: Config) -> Result<i32> {
    Dimension::new(a.d)?.require_five()?;
    if let Some(e) = a.eps0 {
        cfg.shoot.shoot.eps0 = e;
    }
    if let Some(t) = a.theta_tol {
        cfg.shoot.theta_tol = t;
    }
    if let Some(s) = a.span {
        cfg.shoot.shoot.span = s;
        cfg.shoot.shoot.horizon = cfg.shoot.shoot.horizon.max(s);
    }
    cfg.validate()?;
    let sc = cfg.shoot.shoot;
    let t0 = theta0(sc.eps0)?;
    let bracket_text = a.bracket.clone().unwrap_or_else(|| "-pi/2:theta0+0.05".into());
    let bracket = parse_range(&bracket_text, t0)?;
    let start = Instant::now();
    let mut out = OutDir::create(&a.out)?;
    let mut argv = base_argv(&mut out, &cfg, "shoot")?;
    argv.extend(["--d".into(), a.d.to_string(), "--bracket".into(), bracket_text.clone()]);
    out_arg(&mut argv, &a.out);
    let params = json!({ "d": a.d, "eps0": sc.eps0, "theta_tol": cfg.shoot.theta_tol, "span": sc.span, "bracket": bracket });
    let mut m = RunManifest::new("shoot", argv, params, cfg);
    let code = match find_heteroclinic(bracket, cfg.shoot.theta_tol, &sc) {
        Ok(h) => {
            out.write_json("theta_star.json", &h)?;
            let mut csv = Vec::new();
            h.orbit.write_csv(&mut csv)?;
            out.write("orbit.csv", &csv)?;
            let ok = h.classification.outcome == Outcome::HeteroclinicCandidate;
            println!(
                "theta* = {:.17} (width {:.3e}, {} iterations, floor {}), {:?}, end distance {:.3e}",
                h.theta_star,
                h.width,
                h.iterations,
                h.floor_reached,
                h.classification.outcome,
                h.classification.end_distance()
            );
            m.summary = json!({
                "theta_star": h.theta_star,
                "width": h.width,
                "floor_reached": h.floor_reached,
                "outcome": h.classification.outcome,
                "end_distance": h.classification.end_distance(),
            });
            if ok {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        Err(e @ Error::NoSignChange { .. }) => {
            eprintln!("error: {e}");
            m.summary = json!({ "error": e.to_string() });
            EXIT_FAILED
        }
        Err(e) => return Err(e),
    };
    m.wall_ms = start.elapsed().as_millis() as u64;
    out.finish(m)?;
    Ok(code)
}

pub fn cmd_classify(a: &ClassifyArgs, mut cfg: Config) -> Result<i32> {
    if let Some(e) = a.eps0 {
        cfg.classify.eps0 = e;
    }
    if let Some(n) = a.grid {
        cfg.classify.grid = n;
    }
    cfg.validate()?;
    let eps0 = cfg.classify.eps0;
    let (lo, hi) = parse_range(&a.theta_range, theta0(eps0)?)?;
    let start = Instant::now();
    let mut out = OutDir::create(&a.out)?;
    let mut argv = base_argv(&mut out, &cfg, "classify")?;
    argv.push(format!("--theta-range={}", a.theta_range));
    out_arg(&mut argv, &a.out);
    let results = classify_grid(eps0, &theta_grid(lo, hi, cfg.classify.grid), &cfg.integration)?;
    let mut csv = Vec::new();
    write_grid_csv(&results, &mut csv)?;
    out.write("grid.csv", &csv)?;
    let changes = sign_changes(&results);
    let undecided = results.iter().filter(|r| r.g.is_none()).count();
    let plus = results.iter().filter(|r| r.g == Some(1)).count();
    println!("{} seeds on [{lo}, {hi}]: {changes} sign changes, {plus} with g = +1, {undecided} undecided", results.len());
    let params = json!({ "grid": cfg.classify.grid, "theta_range": [lo, hi], "eps0": eps0 });
    let mut m = RunManifest::new("classify", argv, params, cfg);
    m.summary = json!({ "sign_changes": changes, "undecided": undecided, "g_plus": plus, "outcomes": results.iter().map(|r| r.outcome).collect::<Vec<_>>() });
    m.wall_ms = start.elapsed().as_millis() as u64;
    out.finish(m)?;
    Ok(EXIT_OK)
}

pub fn cmd_wind(a: &WindArgs, mut cfg: Config) -> Result<i32> {
    if let Some(e) = a.eps0 {
        cfg.wind.eps0 = e;
    }
    if let Some(b) = a.blowup_norm {
        cfg.wind.blowup_norm = b;
    }
    if let Some(s) = a.max_span {
        cfg.wind.max_span = s;
    }
    let w = cfg.wind;
    let seed = match a.theta {
        Some(theta) => WindingSeed { eps0: w.eps0, theta },
        None => WindingSeed::beyond_theta0(w.eps0, w.theta_offset)?,
    };
    let icfg = cfg.integration.with_blowup_norm(w.blowup_norm).with_span(w.max_span);
    icfg.validate()?;
    let start = Instant::now();
    let mut out = OutDir::create(&a.out)?;
    let mut argv = base_argv(&mut out, &cfg, "wind")?;
    argv.push(format!("--theta={:e}", seed.theta));
    out_arg(&mut argv, &a.out);
    let params = json!({ "eps0": w.eps0, "theta": seed.theta, "blowup_norm": w.blowup_norm, "max_span": w.max_span });
    let mut m = RunManifest::new("wind", argv, params, cfg);
    let code = match build_winding_profile(&icfg, seed) {
        Ok((traj, prof, report)) => {
            let mut csv = Vec::new();
            prof.write_csv(&mut csv)?;
            out.write("profile.csv", &csv)?;
            let mut csv = Vec::new();
            traj.write_csv(&mut csv)?;
            out.write("trajectory.csv", &csv)?;
            out.write_json("winding.json", &report)?;
            println!(
                "winding count {} (crossings at s = {:?}), s_f ≈ {:.6}, psi(r_min) = {:.3e}",
                report.winding_count,
                report.crossings.iter().map(|c| c.s).collect::<Vec<_>>(),
                report.s_f_estimate,
                prof.samples[0].psi
            );
            m.summary = json!({ "winding_count": report.winding_count, "s_f_estimate": report.s_f_estimate, "psi_at_r_min": prof.samples[0].psi });
            EXIT_OK
        }
        Err(e @ Error::NoBlowup(_)) => {
            eprintln!("error: {e}");
            m.summary = json!({ "error": e.to_string() });
            EXIT_FAILED
        }
        Err(e) => return Err(e),
    };
    m.wall_ms = start.elapsed().as_millis() as u64;
    out.finish(m)?;
    Ok(code)
}

pub fn cmd_energy(a: &EnergyArgs, mut cfg: Config) -> Result<i32> {
    let d = Dimension::new(a.d)?;
    let mode = a.mode.unwrap_or(if a.d == 4 { EnergyMode::Conservation } else { EnergyMode::Monotonicity });
    if let Some(n) = a.orbits {
        cfg.energy.orbits = n;
    }
    if let Some(s) = a.span {
        cfg.energy.span = s;
    }
    if let Some(s) = a.seed {
        cfg.energy.seed = s;
    }
    cfg.validate()?;
    let e = cfg.energy;
    let icfg = cfg.integration.with_span(e.span);
    icfg.validate()?;
    let start = Instant::now();
    let audit = energy_audit(d, mode, e.orbits, &icfg, e.seed)?;
    let mut out = OutDir::create(&a.out)?;
    let mut argv = base_argv(&mut out, &cfg, "energy")?;
    argv.extend(["--d".into(), a.d.to_string(), "--mode".into(), format!("{mode:?}").to_lowercase()]);
    out_arg(&mut argv, &a.out);
    out.write_json("energy.json", &audit)?;
    let ok = match mode {
        EnergyMode::Conservation => audit.worst < CONSERVATION_TOL,
        EnergyMode::Monotonicity => audit.worst > MONOTONICITY_TOL,
    };
    println!("d = {}, {mode:?} over {} orbits: worst defect {:.3e}", a.d, e.orbits, audit.worst);
    let mut m = RunManifest::new("energy", argv, json!({ "d": a.d, "mode": mode, "orbits": e.orbits, "span": e.span, "seed": e.seed }), cfg);
    m.summary = json!({ "worst": audit.worst, "pass": ok });
    m.wall_ms = start.elapsed().as_millis() as u64;
    out.finish(m)?;
    Ok(if ok { EXIT_OK } else { EXIT_FAILED })
}

pub fn cmd_spectrum(a: &SpectrumArgs, cfg: Config) -> Result<i32> {
    let d = Dimension::new(a.d)?;
    let lin = linearization(d, a.parity)?;
    let at = match a.parity {
        Parity::Even => 0.0,
        Parity::Odd => FRAC_PI_2,
    };
    println!("d = {}, {:?} parity, linearization at phi = {at}:", a.d, a.parity);
    for row in &lin.matrix {
        println!("  [{}]", row.iter().map(|v| format!("{v:>8}")).collect::<Vec<_>>().join(" "));
    }
    let residuals = lin.eigen_residuals();
    for ((l, v), r) in lin.eigenvalues.iter().zip(&lin.eigenvectors).zip(&residuals) {
        println!("  eigenvalue {l:>4}: vector {v:?}, residual {r:.1e}");
    }
    if lin.eigenvalues.is_empty() {
        println!("  eigensystem not tabulated for odd parity");
    }
    if let Some(path) = &a.out {
        let mut out = OutDir::create(path)?;
        let mut argv = base_argv(&mut out, &cfg, "spectrum")?;
        argv.extend(["--d".into(), a.d.to_string(), "--parity".into(), format!("{:?}", a.parity).to_lowercase()]);
        out_arg(&mut argv, path);
        out.write_json("spectrum.json", &json!({ "linearization": lin, "residuals": residuals }))?;
        let mut m = RunManifest::new("spectrum", argv, json!({ "d": a.d, "parity": a.parity }), cfg);
        m.summary = json!({ "eigenvalues": lin.eigenvalues });
        out.finish(m)?;
    }
    Ok(EXIT_OK)
}
