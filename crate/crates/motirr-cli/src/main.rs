//! `motirr` command-line interface: resonator computations and CSV emission.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical error,
//! 4 i/o error.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use motirr::ftir::{complex_reflection, evanescent_b, match_gap, CouplerParams};
use motirr::photon::{exact_distribution, ifm_merit, simulate_trials};
use motirr::ring::{asymptotic_spectral_ratio, eta_curve, eta_limit};
use motirr::spectral::{make_grid, SourceSpec, DEFAULT_GRID_POINTS, DEFAULT_SPAN_SIGMAS};
use motirr::transient::{rounds_to_threshold, run_switch_experiment, SwitchScenario};

use config::{check_range, CliError, CliResult, Config};
use output::{emit_csv, fmt_real};

#[derive(Parser)]
#[command(
    name = "motirr",
    about = "Interaction-free detection in a total-internal-reflection ring resonator",
    version
)]
struct Cli {
    /// key=value configuration file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Sweep the coupler reflectivity r(x) over the gap width.
    Reflectivity(ReflectivityArgs),
    /// Solve the impedance-matching gap |r(x_m)| = e^-alpha.
    MatchGap(MatchGapArgs),
    /// Energy ratio eta_n versus round-trip count.
    EtaCurve(EtaCurveArgs),
    /// Asymptotic energy ratio (infinite round trips) for a pulse source.
    EtaLimit(EtaLimitArgs),
    /// Asymptotic spectral ratio |B_r/A|^2 versus detuning phase.
    Spectrum(SpectrumArgs),
    /// Exact and Monte Carlo single-photon outcome statistics.
    Outcomes(OutcomesArgs),
    /// Pockels-switching click timeline and build-up threshold report.
    Transient(TransientArgs),
    /// Run the command named by the config file.
    Run,
}

#[derive(Args, Clone, Default)]
struct CouplerArgs {
    /// Vacuum wavelength in nm.
    #[arg(long)]
    lambda0_nm: Option<f64>,
    #[arg(long)]
    n1: Option<f64>,
    #[arg(long)]
    n2: Option<f64>,
    #[arg(long)]
    n_gap: Option<f64>,
    /// Internal incidence angle in degrees.
    #[arg(long)]
    theta1_deg: Option<f64>,
}

impl CouplerArgs {
    fn resolve(&self, cfg: &Config) -> CliResult<CouplerParams<f64>> {
        let lambda0_nm = cfg.real(self.lambda0_nm, "coupler.lambda0_nm", Some(633.0))?;
        let n1 = cfg.real(self.n1, "coupler.n1", Some(1.5))?;
        let n2 = cfg.real(self.n2, "coupler.n2", Some(1.5))?;
        let n_gap = cfg.real(self.n_gap, "coupler.n_gap", Some(1.0))?;
        let theta1_deg = cfg.real(self.theta1_deg, "coupler.theta1_deg", Some(45.0))?;
        CouplerParams::new(
            lambda0_nm * 1e-9,
            n1,
            n2,
            n_gap,
            theta1_deg.to_radians(),
        )
        .map_err(Into::into)
    }
}

#[derive(Args, Clone, Default)]
struct ReflectivityArgs {
    #[command(flatten)]
    coupler: CouplerArgs,
    /// Largest gap in the sweep, nm.
    #[arg(long)]
    x_max_nm: Option<f64>,
    #[arg(long)]
    points: Option<u64>,
    #[arg(long, short)]
    output: Option<String>,
}

#[derive(Args, Clone, Default)]
struct MatchGapArgs {
    #[command(flatten)]
    coupler: CouplerArgs,
    /// Round-trip amplitude loss constant.
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Args, Clone, Default)]
struct SourceArgs {
    /// cw or pulse.
    #[arg(long)]
    source: Option<String>,
    /// Coherence ratio tau/T (pulse only).
    #[arg(long)]
    a: Option<f64>,
}

impl SourceArgs {
    fn resolve(&self, cfg: &Config) -> CliResult<SourceSpec<f64>> {
        let kind = self
            .source
            .clone()
            .or_else(|| cfg.get("source.kind").map(str::to_string))
            .unwrap_or_else(|| "cw".to_string());
        match kind.as_str() {
            "cw" => {
                if self.a.is_some() {
                    return Err(CliError::Config(
                        "key \"source.a\": cw sources carry no coherence ratio".into(),
                    ));
                }
                Ok(SourceSpec::cw(1.0)?)
            }
            "pulse" => {
                let a = self.a.map(Ok).unwrap_or_else(|| {
                    cfg.real(None, "source.a", None) // pulse requires a
                })?;
                Ok(SourceSpec::pulse(a, 1.0)?)
            }
            other => Err(CliError::Config(format!(
                "key \"source.kind\": expected cw or pulse, got \"{other}\""
            ))),
        }
    }
}

#[derive(Args, Clone, Default)]
struct EtaCurveArgs {
    #[arg(long = "R")]
    big_r: Option<f64>,
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long)]
    n_max: Option<u64>,
    #[arg(long, short)]
    output: Option<String>,
}

#[derive(Args, Clone, Default)]
struct EtaLimitArgs {
    #[arg(long = "R")]
    big_r: Option<f64>,
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long)]
    grid_points: Option<u64>,
    #[arg(long)]
    span_sigmas: Option<f64>,
}

#[derive(Args, Clone, Default)]
struct SpectrumArgs {
    #[arg(long = "R")]
    big_r: Option<f64>,
    #[arg(long)]
    points: Option<u64>,
    #[arg(long)]
    psi_min: Option<f64>,
    #[arg(long)]
    psi_max: Option<f64>,
    #[arg(long, short)]
    output: Option<String>,
}

#[derive(Args, Clone, Default)]
struct OutcomesArgs {
    #[arg(long = "R")]
    big_r: Option<f64>,
    #[arg(long)]
    bomb: Option<bool>,
    /// Monte Carlo trial count; 0 for the exact distribution only.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    efficiency: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short)]
    output: Option<String>,
    /// Optional per-trial record CSV (trial_id, outcome, detected).
    #[arg(long)]
    records: Option<String>,
}

#[derive(Args, Clone, Default)]
struct TransientArgs {
    #[arg(long = "R")]
    big_r: Option<f64>,
    /// Transitions as time_ns:on|off pairs, e.g. "0:off,100:on".
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long)]
    duration_ns: Option<f64>,
    #[arg(long)]
    rate_per_ns: Option<f64>,
    #[arg(long)]
    round_trip_ns: Option<f64>,
    #[arg(long)]
    pockels_reaction_ns: Option<f64>,
    #[arg(long)]
    info_delay_ns: Option<f64>,
    /// Build-up threshold on the reflected power.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short)]
    output: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("motirr: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let command = match cli.command {
        Some(Command::Run) | None => command_from_config(&cfg)?,
        Some(c) => c,
    };
    match command {
        Command::Reflectivity(a) => cmd_reflectivity(&a, &cfg),
        Command::MatchGap(a) => cmd_match_gap(&a, &cfg),
        Command::EtaCurve(a) => cmd_eta_curve(&a, &cfg),
        Command::EtaLimit(a) => cmd_eta_limit(&a, &cfg),
        Command::Spectrum(a) => cmd_spectrum(&a, &cfg),
        Command::Outcomes(a) => cmd_outcomes(&a, &cfg),
        Command::Transient(a) => cmd_transient(&a, &cfg),
        Command::Run => unreachable!("resolved above"),
    }
}

fn command_from_config(cfg: &Config) -> CliResult<Command> {
    match cfg.get("command") {
        Some("reflectivity") => Ok(Command::Reflectivity(Default::default())),
        Some("match-gap") => Ok(Command::MatchGap(Default::default())),
        Some("eta-curve") => Ok(Command::EtaCurve(Default::default())),
        Some("eta-limit") => Ok(Command::EtaLimit(Default::default())),
        Some("spectrum") => Ok(Command::Spectrum(Default::default())),
        Some("outcomes") => Ok(Command::Outcomes(Default::default())),
        Some("transient") => Ok(Command::Transient(Default::default())),
        Some(other) => Err(CliError::Config(format!(
            "key \"command\": unknown command \"{other}\""
        ))),
        None => Err(CliError::Config(
            "no subcommand given and no \"command\" key in config".into(),
        )),
    }
}

fn resolve_big_r(flag: Option<f64>, cfg: &Config) -> CliResult<f64> {
    check_range("R", cfg.real(flag, "R", None)?, 0.0, 1.0)
}

fn out_path(flag: &Option<String>, cfg: &Config) -> Option<PathBuf> {
    cfg.string(flag.clone(), "output").map(PathBuf::from)
}

fn cmd_reflectivity(args: &ReflectivityArgs, cfg: &Config) -> CliResult<()> {
    let p = args.coupler.resolve(cfg)?;
    let x_max = cfg.real(args.x_max_nm, "sweep.x_max_nm", Some(2000.0))? * 1e-9;
    let points = cfg.integer(args.points, "sweep.points", Some(201))?;
    if points < 2 {
        return Err(CliError::Config("key \"sweep.points\": need >= 2".into()));
    }
    let mut rows = Vec::with_capacity(points as usize);
    for k in 0..points {
        let x = x_max * k as f64 / (points - 1) as f64;
        let refl = complex_reflection(x, &p)?;
        rows.push(vec![fmt_real(x), fmt_real(refl.r), fmt_real(refl.delta)]);
    }
    emit_csv(&["x_m", "r", "delta_rad"], &rows, out_path(&args.output, cfg).as_deref())?;
    let b = evanescent_b(&p)?;
    eprintln!(
        "reflectivity: lambda0={} m, n1={}, n2={}, n_gap={}, theta1={} rad, b={} 1/m, \
         sweep 0..{} m over {points} points",
        fmt_real(p.lambda0),
        p.n1,
        p.n2,
        p.n_gap,
        fmt_real(p.theta1),
        fmt_real(b),
        fmt_real(x_max)
    );
    Ok(())
}

fn cmd_match_gap(args: &MatchGapArgs, cfg: &Config) -> CliResult<()> {
    let p = args.coupler.resolve(cfg)?;
    let alpha = cfg.real(args.alpha, "alpha", Some(0.0015))?;
    let xm = match_gap(alpha, &p)?;
    let refl = complex_reflection(xm, &p)?;
    println!("impedance match report");
    println!("  alpha              = {}", fmt_real(alpha));
    println!("  target |r|         = {}", fmt_real((-alpha).exp()));
    println!("  matched gap x_m    = {} m", fmt_real(xm));
    println!("  r(x_m)             = {}", fmt_real(refl.r));
    println!("  delta(x_m)         = {} rad", fmt_real(refl.delta));
    println!("  round-trip power loss 1-e^-2a = {}", fmt_real(1.0 - (-2.0 * alpha).exp()));
    println!("  reflectivity tolerance        = 1e-10 (bisection)");
    Ok(())
}

fn cmd_eta_curve(args: &EtaCurveArgs, cfg: &Config) -> CliResult<()> {
    let big_r = resolve_big_r(args.big_r, cfg)?;
    let source = args.source.resolve(cfg)?;
    let n_max = cfg.integer(args.n_max, "n_max", Some(300))?;
    if n_max > u32::MAX as u64 {
        return Err(CliError::Config("key \"n_max\": too large".into()));
    }
    let curve = eta_curve(big_r, n_max as u32, &source)?;
    let rows: Vec<Vec<String>> = curve
        .n_values
        .iter()
        .zip(&curve.eta_values)
        .map(|(n, eta)| vec![n.to_string(), fmt_real(*eta)])
        .collect();
    emit_csv(&["n", "eta"], &rows, out_path(&args.output, cfg).as_deref())?;
    Ok(())
}

fn cmd_eta_limit(args: &EtaLimitArgs, cfg: &Config) -> CliResult<()> {
    let big_r = resolve_big_r(args.big_r, cfg)?;
    let source = args.source.resolve(cfg)?;
    let points = cfg.integer(args.grid_points, "grid.points", Some(DEFAULT_GRID_POINTS as u64))?;
    let span = cfg.real(args.span_sigmas, "grid.span_sigmas", Some(DEFAULT_SPAN_SIGMAS))?;
    let limit = match source {
        SourceSpec::Cw { .. } => 0.0,
        SourceSpec::Pulse { a, .. } => {
            let grid = make_grid(a, points as usize, span)?;
            eta_limit(big_r, &source, &grid)?
        }
    };
    println!("asymptotic energy ratio report");
    println!("  R                = {}", fmt_real(big_r));
    match source {
        SourceSpec::Cw { .. } => println!("  source           = cw (symbolic limit)"),
        SourceSpec::Pulse { a, .. } => println!("  source           = pulse, a = {}", fmt_real(a)),
    }
    println!("  grid             = {points} points, +-{span} sigma");
    println!("  eta_limit        = {}", fmt_real(limit));
    println!("  refinement check = 1e-8 relative");
    Ok(())
}

fn cmd_spectrum(args: &SpectrumArgs, cfg: &Config) -> CliResult<()> {
    let big_r = resolve_big_r(args.big_r, cfg)?;
    let points = cfg.integer(args.points, "spectrum.points", Some(1001))?;
    if points < 2 {
        return Err(CliError::Config("key \"spectrum.points\": need >= 2".into()));
    }
    let psi_min = cfg.real(args.psi_min, "spectrum.psi_min", Some(-std::f64::consts::PI))?;
    let psi_max = cfg.real(args.psi_max, "spectrum.psi_max", Some(std::f64::consts::PI))?;
    if psi_min >= psi_max {
        return Err(CliError::Config(
            "key \"spectrum.psi_min\": must be below spectrum.psi_max".into(),
        ));
    }
    let mut rows = Vec::with_capacity(points as usize);
    for k in 0..points {
        let u = psi_min + (psi_max - psi_min) * k as f64 / (points - 1) as f64;
        rows.push(vec![fmt_real(u), fmt_real(asymptotic_spectral_ratio(big_r, u))]);
    }
    emit_csv(&["u", "ratio"], &rows, out_path(&args.output, cfg).as_deref())?;
    Ok(())
}

fn cmd_outcomes(args: &OutcomesArgs, cfg: &Config) -> CliResult<()> {
    let big_r = resolve_big_r(args.big_r, cfg)?;
    let bomb = cfg.boolean(args.bomb, "bomb", true)?;
    let trials = cfg.integer(args.trials, "trials", Some(0))?;
    let efficiency = check_range(
        "efficiency",
        cfg.real(args.efficiency, "efficiency", Some(0.85))?,
        0.0,
        1.0 + 1e-15,
    )?;
    let seed = cfg.integer(args.seed, "seed", Some(0))?;
    let exact = exact_distribution(big_r, bomb)?;
    let summary = if trials > 0 {
        Some(simulate_trials(big_r, bomb, trials, efficiency, seed)?)
    } else {
        None
    };
    let emp = |f: fn(&motirr::photon::OutcomeDistribution) -> f64| -> String {
        summary
            .as_ref()
            .map(|s| fmt_real(f(&s.empirical)))
            .unwrap_or_default()
    };
    let rows = vec![
        vec!["DR".into(), fmt_real(exact.p_dr), emp(|d| d.p_dr)],
        vec!["EXPLODE".into(), fmt_real(exact.p_explode), emp(|d| d.p_explode)],
        vec!["DT".into(), fmt_real(exact.p_dt), emp(|d| d.p_dt)],
        vec!["LOST".into(), fmt_real(exact.p_lost), emp(|d| d.p_lost)],
    ];
    emit_csv(
        &["outcome", "probability", "empirical"],
        &rows,
        out_path(&args.output, cfg).as_deref(),
    )?;
    if let Some(path) = cfg.string(args.records.clone(), "records") {
        let s = summary.as_ref().ok_or_else(|| {
            CliError::Config("key \"records\": requires trials > 0".into())
        })?;
        let rec_rows: Vec<Vec<String>> = s
            .records
            .iter()
            .map(|r| {
                vec![
                    r.trial_id.to_string(),
                    r.outcome.as_str().to_string(),
                    r.detected.to_string(),
                ]
            })
            .collect();
        emit_csv(
            &["trial_id", "outcome", "detected"],
            &rec_rows,
            Some(PathBuf::from(path).as_path()),
        )?;
    }
    let merit = ifm_merit(big_r)?;
    eprintln!(
        "outcomes: R={}, bomb={bomb}, trials={trials}, efficiency={}, seed={seed}; \
         p_dr={}, p_dr/(p_dr+p_explode)={}",
        fmt_real(big_r),
        fmt_real(efficiency),
        fmt_real(merit.p_dr),
        fmt_real(merit.dr_to_hazard_ratio)
    );
    Ok(())
}

fn parse_schedule(text: &str) -> CliResult<Vec<(f64, bool)>> {
    let mut schedule = Vec::new();
    if text.trim().is_empty() {
        return Ok(schedule);
    }
    for item in text.split(',') {
        let (t, state) = item.trim().split_once(':').ok_or_else(|| {
            CliError::Config(format!(
                "key \"scenario.schedule\": expected time:on|off, got \"{item}\""
            ))
        })?;
        let time: f64 = t.trim().parse().map_err(|_| {
            CliError::Config(format!("key \"scenario.schedule\": bad time \"{t}\""))
        })?;
        let blocked = match state.trim() {
            "on" => true, // Pockels on redirects the round-trip path
            "off" => false,
            other => {
                return Err(CliError::Config(format!(
                    "key \"scenario.schedule\": expected on/off, got \"{other}\""
                )))
            }
        };
        schedule.push((time, blocked));
    }
    Ok(schedule)
}

fn cmd_transient(args: &TransientArgs, cfg: &Config) -> CliResult<()> {
    let big_r = resolve_big_r(args.big_r, cfg)?;
    let epsilon = cfg.real(args.epsilon, "threshold.epsilon", Some(0.01))?;
    let n_thresh = rounds_to_threshold(big_r, epsilon)?;
    println!("build-up threshold report");
    println!("  R                       = {}", fmt_real(big_r));
    println!("  epsilon                 = {}", fmt_real(epsilon));
    println!("  rounds to eta <= eps    = {n_thresh}");
    println!(
        "  100 ns build-up implies T = {} ps per round trip",
        fmt_real(100.0e3 / n_thresh.max(1) as f64)
    );

    let schedule_text = cfg
        .string(args.schedule.clone(), "scenario.schedule")
        .unwrap_or_default();
    let sc = SwitchScenario {
        schedule: parse_schedule(&schedule_text)?,
        round_trip_time_ns: cfg.real(args.round_trip_ns, "scenario.round_trip_ns", Some(0.004))?,
        photon_rate_per_ns: cfg.real(args.rate_per_ns, "scenario.rate_per_ns", Some(10.0))?,
        pockels_reaction_ns: cfg.real(
            args.pockels_reaction_ns,
            "scenario.pockels_reaction_ns",
            Some(0.1),
        )?,
        info_delay_ns: cfg.real(args.info_delay_ns, "scenario.info_delay_ns", Some(4.0))?,
        duration_ns: cfg.real(args.duration_ns, "scenario.duration_ns", Some(120.0))?,
    };
    let seed = cfg.integer(args.seed, "seed", Some(0))?;
    let timeline = run_switch_experiment(&sc, big_r, seed)?;
    let rows: Vec<Vec<String>> = timeline
        .events
        .iter()
        .map(|e| {
            vec![
                fmt_real(e.time_ns),
                e.detector.as_str().to_string(),
                e.hypothesis.as_str().to_string(),
            ]
        })
        .collect();
    emit_csv(
        &["time_ns", "detector", "hypothesis"],
        &rows,
        out_path(&args.output, cfg).as_deref(),
    )?;
    eprintln!(
        "transient: {} photons over {} ns at {} /ns, seed={seed}",
        timeline.events.len() / 2,
        sc.duration_ns,
        sc.photon_rate_per_ns
    );
    Ok(())
}
