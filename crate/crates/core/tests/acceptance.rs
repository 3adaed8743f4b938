//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use blowup::cli::levine_comparison;
use blowup::integrate::{
    boundary_inwardness, check_envelope, detect_blowup, extremal_scalar_field,
    extremal_system_field, first_region_exit, integrate_ivp, Field, IntegratorOptions,
    Termination, Trajectory,
};
use blowup::odi::{
    certify_scalar, certify_system, epsilon_min, epsilon_polynomial, in_region_sub_quadratic,
    levine_region, sub_quadratic_constants, Certificate, ModelParams, OdiParams, RegionKind,
    SystemData, SystemParams,
};
use blowup::spectral::{
    build_wave_problem, simulate_wave, verify_theorem, ProblemKind, SpectralConfig, WaveInitial,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Pinned tolerances.
const CONTINUITY_REL: f64 = 1e-12;
const EPS_ROOT_ABS: f64 = 1e-10;
const INWARD_SLACK: f64 = -1e-10;
const EXPONENT_REL: f64 = 0.10;
const QUADRATIC_T: (f64, f64) = (0.999, 1.001);
const RANDOM_ENVELOPE_SLACK: f64 = 0.02;
const SYSTEM_SLACK: f64 = 0.02;
const DIAGONAL_REL: f64 = 1e-12;
const LINEAR_MODE_ABS: f64 = 1e-6;
const JENSEN_ABS: f64 = -1e-8;
const ELLIPTIC_REL: f64 = 1e-9;
const RANDOM_POINTS: usize = 100;
const LEVINE_SAMPLES: usize = 10_000;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(f64::MIN_POSITIVE)
}

fn run_scalar(p: &OdiParams, v0: f64, v1: f64, horizon: f64) -> (Trajectory, IntegratorOptions) {
    let opts = IntegratorOptions::with_horizon(horizon);
    let traj = integrate_ivp(&extremal_scalar_field(p), &[v0, v1], &opts).expect("integration");
    (traj, opts)
}

/// Refined blow-up time, falling back to the raw termination time.
fn blowup_time(traj: &Trajectory, opts: &IntegratorOptions) -> Option<f64> {
    let raw = match traj.termination {
        Termination::BlownUp { t_est, .. } => t_est,
        Termination::StepCollapse { t_fail } => t_fail,
        Termination::Survived { .. } => return None,
    };
    Some(detect_blowup(traj, opts, None).map_or(raw, |e| e.t_est))
}

fn figure_params() -> [OdiParams; 2] {
    [OdiParams::new(1.0, 2.0, 1.5).unwrap(), OdiParams::new(1.0, 1.0, 2.5).unwrap()]
}

/// Seeded certified points in `[-2, 4] x (0, 4]`.
fn random_certified(p: &OdiParams, seed: u64, n: usize) -> Vec<(f64, f64, Certificate)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let v0 = -2.0 + 6.0 * rng.gen::<f64>();
        let v1 = 4.0 * (1.0 - rng.gen::<f64>());
        if let Ok(c) = certify_scalar(p, v0, v1) {
            out.push((v0, v1, c));
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let [sub, sup] = figure_params();
    let c = sub_quadratic_constants(&sub).unwrap();
    let (a, b, q) = (sub.a(), sub.b(), sub.q());
    let f0_left = (2.0 * c.alpha / b).powf(1.0 / q);
    let fx2_right = (2.0 * a * c.x2 / b).powf(1.0 / q);
    let errs = [rel(f0_left, c.plateau), rel(fx2_right, c.plateau)];
    let eps = epsilon_min(&sup, 0.0, 1.0).unwrap();
    let f_eps = epsilon_polynomial(&sup, 0.0, 1.0, eps);
    let elapsed = start.elapsed();
    let passed = errs.iter().all(|e| *e <= CONTINUITY_REL)
        && f_eps.abs() <= EPS_ROOT_ABS
        && rel(c.plateau, 2.0 / 3.0) <= CONTINUITY_REL
        && elapsed < Duration::from_secs(1);
    outcome(
        passed,
        format!(
            "F(0-) rel err {:.1e}, F(x2+) rel err {:.1e}, plateau {:.15}, eps {:.15}, |f(eps)| {:.1e}, {:?}",
            errs[0], errs[1], c.plateau, eps, f_eps.abs(), elapsed
        ),
    )
}

fn criteria_2_and_3() -> (Outcome, Outcome) {
    let start = Instant::now();
    let mut exits = 0;
    let mut late = 0;
    let mut undetected = 0;
    let mut envelope_fail = 0;
    let mut worst_margin = f64::INFINITY;
    let mut worst_ratio: f64 = 0.0;
    for (seed, p) in figure_params().iter().enumerate() {
        for (v0, v1, cert) in random_certified(p, 100 + seed as u64, RANDOM_POINTS) {
            let (traj, opts) = run_scalar(p, v0, v1, 1.2 * cert.t_star + 1.0);
            if first_region_exit(&traj, &cert).unwrap().is_some() {
                exits += 1;
            }
            match blowup_time(&traj, &opts) {
                None => undetected += 1,
                Some(t) => {
                    worst_ratio = worst_ratio.max(t / cert.t_star);
                    if t > cert.t_star {
                        late += 1;
                    }
                }
            }
            let env = check_envelope(&traj, &cert, RANDOM_ENVELOPE_SLACK, &opts).unwrap();
            worst_margin = worst_margin.min(env.worst_margin);
            if !env.passed {
                envelope_fail += 1;
            }
        }
    }
    let random_time = start.elapsed();

    // reference cases at zero slack
    let mut reference = Vec::new();
    for p in figure_params() {
        let cert = certify_scalar(&p, 0.0, 1.0).unwrap();
        let (traj, opts) = run_scalar(&p, 0.0, 1.0, 1.5 * cert.t_star);
        let env = check_envelope(&traj, &cert, 0.0, &opts).unwrap();
        reference.push((env.passed, env.t_blowup.unwrap_or(f64::NAN), cert.t_star));
    }
    let total = 2 * RANDOM_POINTS;
    let c2 = outcome(
        exits == 0 && late == 0 && undetected == 0 && random_time < Duration::from_secs(30),
        format!(
            "{total} points: region exits {exits}, undetected {undetected}, t_est > t_star {late}, \
             max t_est/t_star {worst_ratio:.4}, {random_time:?}"
        ),
    );
    let c3 = outcome(
        reference.iter().all(|r| r.0) && envelope_fail == 0 && random_time < Duration::from_secs(30),
        format!(
            "reference (t_blowup, t_star): ({:.6}, {:.6}) ({:.6}, {:.6}) at slack 0; random suite \
             failures {envelope_fail}/{total} at slack {RANDOM_ENVELOPE_SLACK}, worst margin {worst_margin:.3e}",
            reference[0].1, reference[0].2, reference[1].1, reference[1].2
        ),
    );
    (c2, c3)
}

fn criterion_4() -> Outcome {
    let [sub, sup] = figure_params();
    let c = sub_quadratic_constants(&sub).unwrap();
    let r_sub = boundary_inwardness(
        &RegionKind::SubQuadratic(c),
        &ModelParams::Scalar(sub),
        1000,
        (c.x1, 10.0 * c.x2),
    )
    .unwrap();
    let cert = certify_scalar(&sup, 0.0, 1.0).unwrap();
    let r_sup = boundary_inwardness(&cert.region, &ModelParams::Scalar(sup), 1000, (0.0, 10.0)).unwrap();
    outcome(
        r_sub.min_inward >= INWARD_SLACK && r_sup.min_inward >= INWARD_SLACK,
        format!(
            "sub-quadratic min {:.3e} at x = {:.4} over [{:.4}, {:.4}]; super-quadratic min {:.3e} at x = {:.4}",
            r_sub.min_inward, r_sub.argmin_x, c.x1, 10.0 * c.x2, r_sup.min_inward, r_sup.argmin_x
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for q in [1.25, 1.5, 2.0, 2.5, 3.0] {
        let p = OdiParams::new(1.0, 1.0, q).unwrap();
        let cert = certify_scalar(&p, 0.0, 12.0).unwrap();
        let (traj, opts) = run_scalar(&p, 0.0, 12.0, 2.0 * cert.t_star);
        let expected = 1.0 / (q - 1.0);
        match detect_blowup(&traj, &opts, None) {
            Ok(e) => {
                let err = rel(e.exponent_est, expected);
                passed &= err <= EXPONENT_REL;
                parts.push(format!("q={q}: k={:.4} (err {:.1e})", e.exponent_est, err));
            }
            Err(e) => {
                passed = false;
                parts.push(format!("q={q}: {e}"));
            }
        }
    }
    let field = Field::new(1, "v' = v^2", |_, y, dy| dy[0] = y[0] * y[0]);
    let opts = IntegratorOptions::with_horizon(2.0);
    let traj = integrate_ivp(&field, &[1.0], &opts).unwrap();
    let t = detect_blowup(&traj, &opts, None).map_or(f64::NAN, |e| e.t_est);
    passed &= (QUADRATIC_T.0..=QUADRATIC_T.1).contains(&t);
    parts.push(format!("v'=v^2: T={t:.12}"));
    outcome(passed, parts.join("; "))
}

fn criterion_6() -> Outcome {
    let sp = SystemParams::new(1.0, 1.5, 2.0).unwrap();
    let d = SystemData { u0: 4.0, v0: 4.0, u1: 4.0, v1: 4.0 };
    let cert = match certify_system(&sp, &d, None) {
        Ok(c) => c,
        Err(e) => return outcome(false, format!("not certified: {e}")),
    };
    let opts = IntegratorOptions::with_horizon(3.0);
    let traj = integrate_ivp(&extremal_system_field(&sp), &[4.0, 4.0, 4.0, 4.0], &opts).unwrap();
    let t = blowup_time(&traj, &opts).unwrap_or(f64::INFINITY);
    let exit = first_region_exit(&traj, &cert).unwrap();
    let env = check_envelope(&traj, &cert, SYSTEM_SLACK, &opts).unwrap();

    let sym = SystemParams::new(1.0, 2.0, 2.0).unwrap();
    let traj_sym = integrate_ivp(&extremal_system_field(&sym), &[3.0, 2.0, 3.0, 2.0], &opts).unwrap();
    let diag = traj_sym
        .states
        .iter()
        .map(|s| rel(s[0], s[2]).max(rel(s[1], s[3])))
        .fold(0.0f64, f64::max);
    outcome(
        t <= 2.5 && exit.is_none() && env.passed && diag <= DIAGONAL_REL,
        format!(
            "t_star {:.6}, t_est {t:.6}, region exit {exit:?}, W' envelope pass {} (worst margin {:.3e}), \
             diagonal deviation {diag:.1e}",
            cert.t_star, env.passed, env.worst_margin
        ),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let opts = IntegratorOptions::with_horizon(1.0);
    let cfg = |growth: f64, problem, horizon| SpectralConfig {
        n_modes: 32,
        n_quad: 128,
        growth,
        q: 1.5,
        problem,
        horizon,
    };

    // linear case
    let lin = build_wave_problem(cfg(0.0, ProblemKind::SingleWave, 2.0 * PI), WaveInitial::mode_one(1.0, 0.0)).unwrap();
    let wt = simulate_wave(&lin, &opts).unwrap();
    let lin_err = wt
        .modal
        .iter()
        .map(|m| (m.u.position[0] - m.time.cos()).abs())
        .fold(0.0f64, f64::max);
    let lin_ok = matches!(wt.termination, Termination::Survived { .. }) && lin_err <= LINEAR_MODE_ABS;

    // nonlinear certified run
    let pr = build_wave_problem(cfg(2.0, ProblemKind::SingleWave, 2.0), WaveInitial::mode_one(0.0, 2.0)).unwrap();
    let cert = pr.certify().unwrap();
    let wt = simulate_wave(&pr, &opts).unwrap();
    let min_jensen = wt.snapshots.iter().map(|s| s.jensen_residual).fold(f64::INFINITY, f64::min);
    let indicator = wt.indicator_time().unwrap_or(f64::INFINITY);
    let report = verify_theorem(&wt, &cert, 0.05).unwrap();

    // elliptic identity
    let el = build_wave_problem(cfg(1.0, ProblemKind::HyperbolicElliptic, 3.0), WaveInitial::mode_one(0.0, 4.0)).unwrap();
    let wt_el = simulate_wave(&el, &opts).unwrap();
    let el_err = wt_el
        .snapshots
        .iter()
        .map(|s| {
            let vp = s.second.expect("coupled").1;
            (vp - s.v_prime).abs() / s.v_prime.abs().max(1.0)
        })
        .fold(0.0f64, f64::max);
    let elapsed = start.elapsed();
    outcome(
        lin_ok
            && min_jensen >= JENSEN_ABS
            && indicator <= cert.t_star
            && report.passed
            && el_err <= ELLIPTIC_REL
            && elapsed < Duration::from_secs(120),
        format!(
            "linear max |c1 - cos t| {lin_err:.1e}; nonlinear min Jensen {min_jensen:.3e}, indicator {indicator:.4} \
             <= t_star {:.4}, theorem pass {}; elliptic max |V' - U'|/|U'| {el_err:.1e}; {elapsed:?}",
            cert.t_star, report.passed
        ),
    )
}

fn criterion_8() -> Outcome {
    let cmp = levine_comparison(1.0, 1.0, 1.5, LEVINE_SAMPLES, 2024, 5).unwrap();
    let p = OdiParams::new(1.0, 1.0, 1.5).unwrap();
    let verified: Vec<_> = cmp
        .witnesses
        .iter()
        .filter(|w| {
            w.v0 < 0.0
                && in_region_sub_quadratic(&p, w.v0, w.v1).unwrap()
                && !levine_region(1.0, 1.0, 1.5, w.v0, w.v1).unwrap()
        })
        .collect();
    let fixed = in_region_sub_quadratic(&p, -1.0, 2.0).unwrap() && !levine_region(1.0, 1.0, 1.5, -1.0, 2.0).unwrap();
    outcome(
        cmp.levine_in_ours.count == LEVINE_SAMPLES && !verified.is_empty() && fixed,
        format!(
            "levine_in_ours {}/{}, ours_not_levine {}/{}, verified witnesses {} (first {:?}), fixed witness (-1, 2) {}",
            cmp.levine_in_ours.count,
            cmp.levine_in_ours.total,
            cmp.ours_not_levine.count,
            cmp.ours_not_levine.total,
            verified.len(),
            verified.first().map(|w| (w.v0, w.v1)),
            fixed
        ),
    )
}

fn blowup_cmd(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blowup")).args(args).current_dir(dir).output().expect("run blowup")
}

fn dir_snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let name = path.strip_prefix(dir).unwrap().display().to_string();
                files.push((name, std::fs::read(&path).unwrap()));
            }
        }
    }
    files.sort();
    files
}

fn criterion_9() -> Outcome {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs");
    let cfg = |name: &str| configs.join(name).display().to_string();
    let short = r#"{"params": {"a": 1, "b": 2, "q": 1.5}, "initial": {"v0": 0, "v1": 1},
                    "integrator": {"horizon": 0.5}, "output_dir": "short"}"#;
    let argv = |args: &[&str]| -> Vec<String> { args.iter().map(|s| s.to_string()).collect() };
    let (odi, system, wave) = (cfg("odi_subq.json"), cfg("system.json"), cfg("wave.json"));
    let cases: Vec<(Vec<String>, u8)> = vec![
        (argv(&["certify", "scalar", "--a", "1", "--b", "2", "--q", "1.5", "--v0", "0", "--v1", "1"]), 0),
        (argv(&["certify", "scalar", "--a", "1", "--b", "1", "--q", "2.5", "--v0", "0", "--v1", "1"]), 0),
        (argv(&["certify", "scalar", "--a", "1", "--b", "2", "--q", "1.5", "--v0", "100", "--v1", "0.1"]), 3),
        (argv(&["certify", "scalar", "--a", "-1", "--b", "2", "--q", "1.5", "--v0", "0", "--v1", "1"]), 2),
        (
            argv(&["certify", "system", "--a", "1", "--p", "1.5", "--q", "2", "--u0", "4", "--v0", "4", "--u1", "4", "--v1", "4"]),
            0,
        ),
        (argv(&["region", "--kind", "subq", "--a", "1", "--b", "2", "--q", "1.5", "--range", "-1", "3", "--samples", "400"]), 0),
        (argv(&["region", "--kind", "superq", "--a", "1", "--b", "1", "--q", "2.5", "--v0", "0", "--v1", "1", "--range", "0", "3"]), 0),
        (argv(&["region", "--kind", "levine", "--lambda", "1", "--C", "1", "--q", "2", "--range", "2", "5"]), 0),
        (argv(&["region", "--kind", "subq", "--a", "1", "--b", "2", "--q", "1.5", "--range", "3", "-1"]), 2),
        (argv(&["compare-levine", "--lambda", "1", "--C", "1", "--q", "1.5", "--samples", "10000", "--seed", "7"]), 0),
        (argv(&["compare-levine", "--lambda", "1", "--C", "1", "--q", "1.5", "--samples", "0"]), 0),
        (argv(&["simulate", "odi", "--config", &odi, "--output-dir", "odi"]), 0),
        (argv(&["simulate", "system", "--config", &system, "--output-dir", "system"]), 0),
        (argv(&["simulate", "wave", "--config", &wave, "--output-dir", "wave"]), 0),
        (argv(&["simulate", "odi", "--config", "short.json"]), 4),
    ];

    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut runs: Vec<Vec<(Option<i32>, Vec<u8>)>> = Vec::new();
    for d in &dirs {
        std::fs::write(d.path().join("short.json"), short).unwrap();
        let mut results = Vec::new();
        for (args, _) in &cases {
            let argv: Vec<&str> = args.iter().map(String::as_str).collect();
            let o = blowup_cmd(&argv, d.path());
            results.push((o.status.code(), o.stdout));
        }
        runs.push(results);
    }
    let mut bad_codes = Vec::new();
    for (i, (args, code)) in cases.iter().enumerate() {
        if runs[0][i].0 != Some(*code as i32) {
            bad_codes.push(format!("{} -> {:?} (want {code})", args[..2].join(" "), runs[0][i].0));
        }
    }
    let stdout_same = runs[0] == runs[1];
    let files_same = dir_snapshot(dirs[0].path()) == dir_snapshot(dirs[1].path());
    let n_files = dir_snapshot(dirs[0].path()).len();
    outcome(
        bad_codes.is_empty() && stdout_same && files_same,
        format!(
            "{} commands x2: stdout identical {stdout_same}, {n_files} output files identical {files_same}, \
             exit-code mismatches {bad_codes:?}",
            cases.len()
        ),
    )
}

fn main() {
    let total = Instant::now();
    let (c2, c3) = criteria_2_and_3();
    let results = [
        ("1 closed-form reproduction", criterion_1()),
        ("2 invariance suite", c2),
        ("3 envelope domination", c3),
        ("4 inwardness sweep", criterion_4()),
        ("5 blow-up exponent", criterion_5()),
        ("6 system suite", criterion_6()),
        ("7 spectral suite", criterion_7()),
        ("8 Levine comparison", criterion_8()),
        ("9 CLI determinism", criterion_9()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {name}: {}", o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {}/{} passed in {:?}", results.len() - failed, results.len(), total.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
