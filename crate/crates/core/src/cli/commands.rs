use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{OdiRunConfig, SystemRunConfig, WaveRunConfig};
use super::{
    CertifyCommand, CliError, Command, LevineArgs, RegionArgs, RegionKindArg, Result,
    SimulateArgs, SimulateKind, SystemFace, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_VERIFICATION,
};
use crate::format::{fmt_f64, to_json_string};
use crate::integrate::{
    check_envelope, detect_blowup, extremal_scalar_field, extremal_system_field,
    first_region_exit, integrate_ivp, BlowupEstimate, EnvelopeReport, IntegratorOptions,
    Termination, Trajectory,
};
use crate::odi::{
    admissible_boundary_super_quadratic, boundary_f, boundary_f2, certify_scalar, certify_system,
    certify_wave, in_region_sub_quadratic, in_region_super_quadratic, levine_region,
    levine_threshold, reduce_elliptic, reduce_parabolic, sub_quadratic_constants, Certificate,
    OdiError, OdiParams, ParabolicHypothesis, RegionKind, SystemData, SystemParams,
};
use crate::spectral::{
    build_wave_problem, simulate_wave, verify_theorem, ProblemKind, TheoremReport, RESIDUAL_TOL,
};

pub(super) fn dispatch(command: Command, out: &mut dyn Write) -> Result<u8> {
    match command {
        Command::Certify(cmd) => certify(cmd, out),
        Command::Region(args) => region(&args, out),
        Command::Simulate(args) => simulate(&args, out),
        Command::CompareLevine(args) => compare_levine(&args, out),
    }
}

#[derive(Serialize)]
struct Verdict<'a> {
    certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    certificate: Option<&'a Certificate>,
}

fn certify(cmd: CertifyCommand, out: &mut dyn Write) -> Result<u8> {
    let result = match cmd {
        CertifyCommand::Scalar { a, b, q, v0, v1 } => {
            OdiParams::new(a, b, q).and_then(|p| certify_scalar(&p, v0, v1))
        }
        CertifyCommand::Wave { lambda, growth, q, v0, v1, phi_sup } => {
            certify_wave(lambda, growth, q, v0, v1, phi_sup)
        }
        CertifyCommand::System { a, p, q, u0, v0, u1, v1, phi_sup } => SystemParams::new(a, p, q)
            .and_then(|sp| certify_system(&sp, &SystemData { u0, v0, u1, v1 }, phi_sup)),
        CertifyCommand::Elliptic { lambda, q, u0, u1, phi_sup } => {
            reduce_elliptic(lambda, q, u0, u1, phi_sup)
        }
        CertifyCommand::Parabolic { lambda, q, beta, m, p, u0, v0, u1, phi_sup } => {
            let h = ParabolicHypothesis { lambda, q, beta, m, p };
            reduce_parabolic(&h, u0, v0, u1, phi_sup)
        }
    };
    match result {
        Ok(cert) => {
            let v = Verdict { certified: true, reason: None, certificate: Some(&cert) };
            out.write_all(to_json_string(&v)?.as_bytes())?;
            Ok(EXIT_OK)
        }
        Err(e) => match CliError::from(e) {
            CliError::Inconclusive(reason) => {
                let v = Verdict { certified: false, reason: Some(reason), certificate: None };
                out.write_all(to_json_string(&v)?.as_bytes())?;
                Ok(EXIT_INCONCLUSIVE)
            }
            other => Err(other),
        },
    }
}

fn require(name: &str, value: Option<f64>) -> Result<f64> {
    value.ok_or_else(|| CliError::Invalid(format!("--{name} is required for this region kind")))
}

fn emit(text: &str, output: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Invalid(format!("cannot write {}: {e}", path.display()))),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

/// `samples + 1` abscissae spread uniformly over `[lo, hi]`.
fn abscissae(range: &[f64], samples: usize) -> Result<Vec<f64>> {
    let [lo, hi] = range else {
        return Err(CliError::Invalid("--range LO HI is required".into()));
    };
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(CliError::Invalid(format!("need finite LO < HI, got [{lo}, {hi}]")));
    }
    if samples == 0 {
        return Err(CliError::Invalid("--samples must be positive".into()));
    }
    Ok((0..=samples).map(|i| lo + (hi - lo) * i as f64 / samples as f64).collect())
}

fn region(args: &RegionArgs, out: &mut dyn Write) -> Result<u8> {
    let xs = abscissae(&args.range, args.samples)?;
    let ys: Vec<f64> = match args.kind {
        RegionKindArg::Subq => {
            let p = OdiParams::new(require("a", args.a)?, require("b", args.b)?, require("q", args.q)?)?;
            let c = sub_quadratic_constants(&p)?;
            xs.iter().map(|&x| boundary_f(&c, &p, x)).collect()
        }
        RegionKindArg::Superq => {
            let p = OdiParams::new(require("a", args.a)?, require("b", args.b)?, require("q", args.q)?)?;
            match (args.v0, args.v1) {
                (Some(v0), Some(v1)) => {
                    let cert = certify_scalar(&p, v0, v1)?;
                    let RegionKind::SuperQuadratic { epsilon, a_shift } = cert.region else {
                        return Err(CliError::Invalid(format!("q = {} is not super-quadratic", p.q())));
                    };
                    // F2 reaches zero at a x + A = 0; below that the region edge is y = 0.
                    xs.iter().map(|&x| boundary_f2(&p, epsilon, a_shift, x).unwrap_or(0.0)).collect()
                }
                (None, None) => xs
                    .iter()
                    .map(|&x| admissible_boundary_super_quadratic(&p, x))
                    .collect::<std::result::Result<_, _>>()?,
                _ => return Err(CliError::Invalid("give both --v0 and --v1, or neither".into())),
            }
        }
        RegionKindArg::Levine => {
            let s0 = levine_threshold(require("lambda", args.lambda)?, require("C", args.growth)?, require("q", args.q)?)?;
            xs.iter().map(|&x| x.max(s0)).collect()
        }
        RegionKindArg::System => {
            let sp = SystemParams::new(require("a", args.a)?, require("p", args.p)?, require("q", args.q)?)?;
            match args.face {
                SystemFace::P => xs.iter().map(|&x| sp.boundary_p(x)).collect(),
                SystemFace::Q => xs.iter().map(|&x| sp.boundary_q(x)).collect(),
            }
        }
    };
    let mut csv = String::from("x,y\n");
    for (x, y) in xs.iter().zip(&ys) {
        csv.push_str(&format!("{},{}\n", fmt_f64(*x), fmt_f64(*y)));
    }
    emit(&csv, args.output.as_deref(), out)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioCount {
    pub count: usize,
    pub total: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub v0: f64,
    pub v1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevineComparison {
    pub lambda: f64,
    #[serde(rename = "C")]
    pub growth: f64,
    pub q: f64,
    pub seed: u64,
    pub samples: usize,
    pub s0: f64,
    /// Whether inclusion of the wedge in our region is claimed (`q <= 2`).
    pub inclusion_claimed: bool,
    pub levine_in_ours: RatioCount,
    pub ours_not_levine: RatioCount,
    /// Sampled points of our region with `v0 < 0`, hence outside the wedge.
    pub witnesses: Vec<Witness>,
}

/// Samples `samples` points from each region (deterministically in `seed`)
/// and cross-tests membership. Our region is that of `v'' + lambda v >= C v'^q`.
pub fn levine_comparison(
    lambda: f64,
    growth: f64,
    q: f64,
    samples: usize,
    seed: u64,
    max_witnesses: usize,
) -> std::result::Result<LevineComparison, OdiError> {
    let s0 = levine_threshold(lambda, growth, q)?;
    let params = OdiParams::new(lambda, growth, q)?;
    let ours = |v0: f64, v1: f64| {
        if params.is_sub_quadratic() {
            in_region_sub_quadratic(&params, v0, v1)
        } else {
            in_region_super_quadratic(&params, v0, v1)
        }
    };
    let span = 2.0 * (s0 + 2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_attempts = 1000 * samples + 1000;

    let mut levine_in_ours = RatioCount { count: 0, total: 0 };
    let mut attempts = 0;
    while levine_in_ours.total < samples {
        attempts += 1;
        if attempts > max_attempts {
            return Err(OdiError::InvalidParameter("could not sample the comparison wedge".into()));
        }
        let v0 = s0 + span * rng.gen::<f64>();
        let v1 = v0 + span * rng.gen::<f64>();
        if !levine_region(lambda, growth, q, v0, v1)? {
            continue;
        }
        levine_in_ours.total += 1;
        if ours(v0, v1)? {
            levine_in_ours.count += 1;
        }
    }

    let mut ours_not_levine = RatioCount { count: 0, total: 0 };
    let mut witnesses = Vec::new();
    attempts = 0;
    while ours_not_levine.total < samples {
        attempts += 1;
        if attempts > max_attempts {
            return Err(OdiError::InvalidParameter("could not sample the admissible region".into()));
        }
        let v0 = span * (2.0 * rng.gen::<f64>() - 1.0);
        let v1 = span * (1.0 - rng.gen::<f64>());
        if !ours(v0, v1)? {
            continue;
        }
        ours_not_levine.total += 1;
        if !levine_region(lambda, growth, q, v0, v1)? {
            ours_not_levine.count += 1;
            if v0 < 0.0 && witnesses.len() < max_witnesses {
                witnesses.push(Witness { v0, v1 });
            }
        }
    }
    Ok(LevineComparison {
        lambda,
        growth,
        q,
        seed,
        samples,
        s0,
        inclusion_claimed: params.is_sub_quadratic(),
        levine_in_ours,
        ours_not_levine,
        witnesses,
    })
}

fn compare_levine(args: &LevineArgs, out: &mut dyn Write) -> Result<u8> {
    let cmp = levine_comparison(args.lambda, args.growth, args.q, args.samples, args.seed, args.witnesses)?;
    emit(&to_json_string(&cmp)?, args.output.as_deref(), out)?;
    if cmp.inclusion_claimed && cmp.levine_in_ours.count < cmp.levine_in_ours.total {
        return Ok(EXIT_VERIFICATION);
    }
    Ok(EXIT_OK)
}

fn read_config<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| CliError::Invalid(format!("cannot write {}: {e}", path.display())))
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::Invalid(format!("cannot create {}: {e}", dir.display())))
}

fn check_slack(slack: f64) -> Result<()> {
    if (0.0..=0.1).contains(&slack) {
        Ok(())
    } else {
        Err(CliError::Invalid(format!("slack must lie in [0, 0.1], got {slack}")))
    }
}

#[derive(Serialize)]
struct RegionExit {
    index: usize,
    t: f64,
}

#[derive(Serialize)]
struct OdeReport<'a> {
    passed: bool,
    certificate: &'a Certificate,
    termination: Termination,
    steps: usize,
    blowup: Option<BlowupEstimate>,
    region_exit: Option<RegionExit>,
    envelope: EnvelopeReport,
}

fn ode_run(
    cert: &Certificate,
    traj: &Trajectory,
    opts: &IntegratorOptions,
    slack: f64,
    dir: &Path,
    out: &mut dyn Write,
) -> Result<u8> {
    let blowup = detect_blowup(traj, opts, None).ok();
    let region_exit =
        first_region_exit(traj, cert)?.map(|index| RegionExit { index, t: traj.times[index] });
    let envelope = check_envelope(traj, cert, slack, opts)?;
    let passed = envelope.passed && region_exit.is_none();
    let report = OdeReport {
        passed,
        certificate: cert,
        termination: traj.termination,
        steps: traj.len(),
        blowup,
        region_exit,
        envelope,
    };
    let mut csv = Vec::new();
    traj.write_csv(&mut csv)?;
    write_file(dir, "trajectory.csv", &csv)?;
    let json = to_json_string(&report)?;
    write_file(dir, "report.json", json.as_bytes())?;
    out.write_all(json.as_bytes())?;
    Ok(if passed { EXIT_OK } else { EXIT_VERIFICATION })
}

#[derive(Serialize)]
struct WaveReport<'a> {
    passed: bool,
    certificate: &'a Certificate,
    termination: Termination,
    steps: usize,
    resolution_loss: Option<f64>,
    last_trusted_time: f64,
    indicator_time: Option<f64>,
    /// Smallest Jensen residual over all snapshots, relative to its scale.
    min_jensen: f64,
    theorem: TheoremReport,
}

fn simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<u8> {
    let dir_override = args.output_dir.clone();
    let pick = |cfg_dir: &PathBuf| dir_override.clone().unwrap_or_else(|| cfg_dir.clone());
    match args.kind {
        SimulateKind::Odi => {
            let mut cfg: OdiRunConfig = read_config(&args.config)?;
            cfg.output_dir = pick(&cfg.output_dir);
            cfg.integrator.validate()?;
            check_slack(cfg.slack)?;
            prepare_dir(&cfg.output_dir)?;
            write_file(&cfg.output_dir, "config.json", to_json_string(&cfg)?.as_bytes())?;
            let (v0, v1) = (cfg.initial.v0, cfg.initial.v1);
            let cert = certify_scalar(&cfg.params, v0, v1)?;
            let traj = integrate_ivp(&extremal_scalar_field(&cfg.params), &[v0, v1], &cfg.integrator)?;
            ode_run(&cert, &traj, &cfg.integrator, cfg.slack, &cfg.output_dir, out)
        }
        SimulateKind::System => {
            let mut cfg: SystemRunConfig = read_config(&args.config)?;
            cfg.output_dir = pick(&cfg.output_dir);
            cfg.integrator.validate()?;
            check_slack(cfg.slack)?;
            prepare_dir(&cfg.output_dir)?;
            write_file(&cfg.output_dir, "config.json", to_json_string(&cfg)?.as_bytes())?;
            let d = cfg.initial;
            let cert = certify_system(&cfg.params, &d, None)?;
            let field = extremal_system_field(&cfg.params);
            let traj = integrate_ivp(&field, &[d.u0, d.u1, d.v0, d.v1], &cfg.integrator)?;
            ode_run(&cert, &traj, &cfg.integrator, cfg.slack, &cfg.output_dir, out)
        }
        SimulateKind::Wave | SimulateKind::Elliptic | SimulateKind::Parabolic => {
            let mut cfg: WaveRunConfig = read_config(&args.config)?;
            cfg.output_dir = pick(&cfg.output_dir);
            let kind_ok = matches!(
                (args.kind, cfg.spectral.problem),
                (SimulateKind::Wave, ProblemKind::SingleWave | ProblemKind::WaveSystem { .. })
                    | (SimulateKind::Elliptic, ProblemKind::HyperbolicElliptic)
                    | (SimulateKind::Parabolic, ProblemKind::HyperbolicParabolic { .. })
            );
            if !kind_ok {
                return Err(CliError::Invalid(format!(
                    "config problem {:?} does not match `simulate {:?}`",
                    cfg.spectral.problem, args.kind
                )));
            }
            let opts = cfg.integrator.with_horizon(cfg.spectral.horizon);
            opts.validate()?;
            check_slack(cfg.slack)?;
            let problem = build_wave_problem(cfg.spectral, cfg.initial.clone())?;
            prepare_dir(&cfg.output_dir)?;
            write_file(&cfg.output_dir, "config.json", to_json_string(&cfg)?.as_bytes())?;
            let cert = problem.certify()?;
            let wt = simulate_wave(&problem, &opts)?;
            let theorem = verify_theorem(&wt, &cert, cfg.slack)?;
            let min_jensen = wt
                .snapshots
                .iter()
                .map(|s| s.jensen_residual / s.jensen_scale.max(1.0))
                .fold(f64::INFINITY, f64::min);
            let passed = theorem.passed && min_jensen >= -RESIDUAL_TOL;
            let report = WaveReport {
                passed,
                certificate: &cert,
                termination: wt.termination,
                steps: wt.snapshots.len(),
                resolution_loss: wt.resolution_loss,
                last_trusted_time: wt.last_trusted_time,
                indicator_time: wt.indicator_time(),
                min_jensen,
                theorem,
            };
            let mut csv = Vec::new();
            wt.write_csv(&mut csv)?;
            write_file(&cfg.output_dir, "trajectory.csv", &csv)?;
            if cfg.dump_modal {
                let mut modal = Vec::new();
                wt.write_modal_json(&mut modal)?;
                write_file(&cfg.output_dir, "modal.json", &modal)?;
            }
            let json = to_json_string(&report)?;
            write_file(&cfg.output_dir, "report.json", json.as_bytes())?;
            out.write_all(json.as_bytes())?;
            Ok(if passed { EXIT_OK } else { EXIT_VERIFICATION })
        }
    }
}
