use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde_json::json;

use qtraj_core::export::{self, to_pretty};
use qtraj_core::grid::{AxisSpec, GridSpec};
use qtraj_core::probability::{
    born_density, classical_width, density_field, lemniscate_width, normalize_and_fraction, DensityOptions,
    NodeExclusion, PhysicalScale, ELECTRON_MASS, HBAR, REFERENCE_LEMNISCATE_WIDTH, SEPARATRIX_PROBE_OFFSET,
};
use qtraj_core::quadrature::trapezoid;
use qtraj_core::svg;
use qtraj_core::trajectory::{cassinian_orbit, integrate, IntegrateOptions, Trajectory};
use qtraj_core::wavefunction::{eval_psi, list_nodes, SearchBox};
use qtraj_core::{verify, ComplexPoint, QuantumState};

use crate::config::{output_dir, positive, write_file, CliResult, Failure, Formats, EXIT_VERIFY_FAILED};

fn parse_state(text: Option<String>) -> CliResult<QuantumState> {
    let text = text.ok_or_else(|| Failure::config("--state is required"))?;
    Ok(text.parse::<QuantumState>()?)
}

pub struct TrajectoryArgs {
    pub state: Option<String>,
    pub seeds: Vec<String>,
    pub cassinian_b: Vec<f64>,
    pub t_end: Option<f64>,
    pub rel_tol: f64,
    pub out: Option<PathBuf>,
    pub formats: Formats,
}

fn tag(x: f64) -> String {
    format!("{x}").replace('-', "m")
}

/// File stem, legend label, path and extra metadata for one integrated orbit.
type Run<'a> = (String, String, Trajectory, Vec<(&'a str, serde_json::Value)>);

pub fn trajectory(args: TrajectoryArgs) -> CliResult<()> {
    let state = parse_state(args.state)?;
    if args.seeds.is_empty() && args.cassinian_b.is_empty() {
        return Err(Failure::config("give at least one --seed or --cassinian-b value"));
    }
    if !args.cassinian_b.is_empty() && state != QuantumState::oscillator(1) {
        return Err(Failure::config("--cassinian-b applies to the first excited oscillator state (sho:1)"));
    }
    if let Some(t) = args.t_end {
        if !t.is_finite() {
            return Err(Failure::config("--t-end must be finite"));
        }
    } else if !state.is_stationary() {
        return Err(Failure::config("time-dependent states need --t-end"));
    }
    let seeds = args
        .seeds
        .iter()
        .map(|s| s.parse::<ComplexPoint>().map_err(Failure::from))
        .collect::<CliResult<Vec<_>>>()?;
    let dir = output_dir(args.out)?;
    let opts = match args.t_end {
        Some(t) => IntegrateOptions::until(t, args.rel_tol),
        None => IntegrateOptions::closure(args.rel_tol),
    };

    let mut runs: Vec<Run> = Vec::new();
    for (k, seed) in seeds.iter().enumerate() {
        let traj = integrate(&state, seed.z(), 0.0, &opts)
            .map_err(|e| Failure { message: format!("seed {seed}: {e}"), ..Failure::from(e) })?;
        runs.push((format!("trajectory_{k}"), format!("x0 = {seed}"), traj, vec![]));
    }
    for &b in &args.cassinian_b {
        let traj = cassinian_orbit(b, args.rel_tol).map_err(|e| Failure { message: format!("b = {b}: {e}"), ..Failure::from(e) })?;
        let closest = traj.samples.iter().map(|s| s.x.norm()).fold(f64::MAX, f64::min);
        runs.push((
            format!("cassinian_b{}", tag(b)),
            format!("b = {b}"),
            traj,
            vec![("cassinian_b", json!(b)), ("closest_approach_to_origin", json!(closest))],
        ));
    }

    for (name, label, traj, extra) in &runs {
        if args.formats.csv {
            write_file(&dir.join(format!("{name}.csv")), &export::trajectory_csv(traj))?;
        }
        if args.formats.json {
            write_file(&dir.join(format!("{name}.json")), &to_pretty(&export::trajectory_metadata(traj, extra)))?;
        }
        let period = traj.period.map_or("open".to_string(), |p| format!("period {p:.10}"));
        println!("{name}: {label}, {} samples, {period}", traj.samples.len());
    }
    if args.formats.svg {
        let list: Vec<(String, &Trajectory)> = runs.iter().map(|(_, label, t, _)| (label.clone(), t)).collect();
        write_file(&dir.join("trajectories.svg"), &svg::trajectories_svg(&format!("{state} trajectories"), &list))?;
    }
    Ok(())
}

pub struct DensityArgs {
    pub state: Option<String>,
    pub grid: Option<String>,
    pub rel_tol: f64,
    pub out: Option<PathBuf>,
    pub formats: Formats,
}

/// Separatrix curves of oscillator state `n` for the heat-map overlay.
fn separatrix_overlay(state: &QuantumState, n: u32) -> Vec<Vec<Complex64>> {
    match n {
        0 => vec![],
        1 => svg::lemniscate_curve(400),
        _ => {
            let reach = (2.0 * n as f64 + 1.0).sqrt() + 4.0;
            let nodes = list_nodes(state, &SearchBox::square(reach), 0.0).unwrap_or_default();
            let mut curves = Vec::new();
            for node in nodes {
                let seed = node.z() + Complex64::new(0.0, SEPARATRIX_PROBE_OFFSET);
                if let Ok(traj) = integrate(state, seed, 0.0, &IntegrateOptions::closure(1e-9)) {
                    let upper: Vec<Complex64> = traj.samples.iter().map(|s| s.x).collect();
                    curves.push(upper.iter().map(|z| z.conj()).collect());
                    curves.push(upper);
                }
            }
            curves
        }
    }
}

pub fn density(args: DensityArgs) -> CliResult<()> {
    let state = parse_state(args.state)?;
    let grid: GridSpec = args.grid.ok_or_else(|| Failure::config("--grid is required"))?.parse()?;
    positive("--rel-tol", args.rel_tol)?;
    let mut field = density_field(&state, &grid, &DensityOptions { rel_tol: args.rel_tol })?;
    let (norm, fraction) = normalize_and_fraction(&mut field)?;
    let dir = output_dir(args.out)?;
    if args.formats.csv {
        write_file(&dir.join("density.csv"), &export::density_csv(&field))?;
    }
    if args.formats.json {
        write_file(&dir.join("density.json"), &to_pretty(&export::density_header(&field, &[])))?;
    }
    if args.formats.svg {
        let n = state.oscillator_level().unwrap_or(0);
        let title = format!("{state}: extended probability, fraction inside = {fraction:.5}");
        write_file(&dir.join("density.svg"), &svg::density_svg(&title, &field, &separatrix_overlay(&state, n)))?;
    }
    println!("state {state}, grid {grid}: normalization {norm:.10e}, fraction_inside {fraction:.6}");
    Ok(())
}

pub struct BornArgs {
    pub state: Option<String>,
    pub range: Option<String>,
    pub out: Option<PathBuf>,
    pub formats: Formats,
}

/// `min:max:points`, endpoints included.
fn parse_range(text: &str) -> CliResult<Vec<f64>> {
    let bad = || Failure::config(format!("range '{text}' should be min:max:points"));
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(bad());
    };
    let (a, b): (f64, f64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    let n: usize = n.parse().map_err(|_| bad())?;
    if !(a.is_finite() && b.is_finite() && a < b && n >= 2) {
        return Err(bad());
    }
    // reuse the cell-grid endpoints: n points are the boundaries of n-1 cells
    Ok(AxisSpec::new(a, b, n - 1)?.points())
}

pub fn born(args: BornArgs) -> CliResult<()> {
    let state = parse_state(args.state)?;
    let grid = parse_range(&args.range.ok_or_else(|| Failure::config("--range is required"))?)?;
    let profile = born_density(&state, &grid, NodeExclusion::Drop)?;
    let psi2: Vec<f64> = profile.x.iter().map(|&x| eval_psi(&state, Complex64::new(x, 0.0), 0.0).norm_sqr()).collect();
    let z = trapezoid(&profile.x, &psi2);
    let psi2: Vec<f64> = psi2.iter().map(|p| p / z).collect();
    let deviation = profile.p.iter().zip(&psi2).map(|(p, q)| (p - q).abs() / q).fold(0.0, f64::max);
    let dir = output_dir(args.out)?;
    if args.formats.csv {
        write_file(&dir.join("born.csv"), &export::born_csv(&profile, Some(&psi2)))?;
    }
    if args.formats.json {
        let summary = json!({
            "state": state,
            "state_label": state.to_string(),
            "points": profile.x.len(),
            "dropped_near_nodes": grid.len() - profile.x.len(),
            "nodes": profile.nodes(),
            "normalization": profile.normalization,
            "max_relative_deviation": deviation,
        });
        write_file(&dir.join("born.json"), &to_pretty(&summary))?;
    }
    println!("state {state}: {} points, max relative deviation from |psi|^2 {deviation:.3e}", profile.x.len());
    Ok(())
}

pub struct ClassicalArgs {
    pub mass: Option<f64>,
    pub omega: Option<f64>,
    pub electron: bool,
    pub out: Option<PathBuf>,
}

pub fn classical(args: ClassicalArgs) -> CliResult<()> {
    let omega = positive("--omega", args.omega.ok_or_else(|| Failure::config("--omega is required"))?)?;
    let mass = match (args.electron, args.mass) {
        (true, None) => ELECTRON_MASS,
        (true, Some(_)) => return Err(Failure::config("--mass and --electron are mutually exclusive")),
        (false, Some(m)) => positive("--mass", m)?,
        (false, None) => return Err(Failure::config("give --mass or --electron")),
    };
    let scale = PhysicalScale::new(mass, omega)?;
    let computed = lemniscate_width(1)?;
    let report = json!({
        "mass_kg": mass,
        "omega0_per_s": omega,
        "hbar_js": HBAR,
        "length_scale_m": scale.length(),
        "xi_max_computed": computed,
        "xi_max_reference": REFERENCE_LEMNISCATE_WIDTH,
        "width_m_computed": classical_width(&scale, computed),
        "width_m_reference": classical_width(&scale, REFERENCE_LEMNISCATE_WIDTH),
        "literature_estimate_m": if args.electron { 0.01 / omega.sqrt() } else { 1e-17 },
    });
    let text = to_pretty(&report);
    if let Some(out) = args.out {
        let dir = output_dir(Some(out))?;
        write_file(&dir.join("classical.json"), &text)?;
    }
    print!("{text}");
    Ok(())
}

pub struct VerifyArgs {
    pub suites: Vec<String>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
}

pub fn run_verify(args: VerifyArgs) -> CliResult<()> {
    let names: Vec<&str> = args.suites.iter().flat_map(|s| s.split(',')).map(str::trim).filter(|s| !s.is_empty()).collect();
    let report = verify::run(&names, args.tol)?;
    for s in &report.suites {
        let status = if s.passed { "PASS" } else { "FAIL" };
        println!("{status} {:<16} {:>7.2}s", s.suite, s.seconds);
        for c in &s.checks {
            let mark = match (c.passed, c.informational) {
                (true, _) => "ok  ",
                (false, true) => "info",
                (false, false) => "FAIL",
            };
            println!("    {mark} {:<60} {:.6e}  {:?}", c.name, c.measured, c.bound);
        }
        if let Some(e) = &s.error {
            println!("    error: {e}");
        }
    }
    let json = to_pretty(&serde_json::to_value(&report).expect("report is serializable"));
    if let Some(path) = args.out.as_deref() {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            output_dir(Some(parent.to_path_buf()))?;
        }
        write_file(Path::new(path), &json)?;
    }
    if report.passed {
        println!("all {} suites passed", report.suites.len());
        Ok(())
    } else {
        Err(Failure { code: EXIT_VERIFY_FAILED, message: format!("failing suites: {}", report.failing().join(", ")) })
    }
}
