//! Named verification suites: each runs a family of checks against
//! independent oracles and reports measured values next to their bounds.

use std::f64::consts::{E, PI, TAU};
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::continuity::{characteristics_match, continuity_residual, divergence, divergence_fd, DensityKind, FD_STEP};
use crate::error::Result;
use crate::grid::GridSpec;
use crate::probability::{
    born_density, classical_width, conserved_rate, density_field, expectation, lemniscate_width, normalize_and_fraction,
    rho_alt_direct, rho_alt_trajectory, rho_conserved, Anchor, BornProfile, DensityOptions, NodeExclusion, Observable,
    PhysicalScale, REFERENCE_LEMNISCATE_WIDTH,
};
use crate::quadrature::time_integral;
use crate::trajectory::{cassinian_invariant, cassinian_orbit, integrate, IntegrateOptions, Trajectory};
use crate::wavefunction::{eval_psi, node_proximity, potential, velocity, QuantumState};

pub const SUITES: [&str; 12] = [
    "born",
    "cassinian",
    "period",
    "conserved",
    "alternative",
    "dichotomy",
    "characteristics",
    "fraction",
    "width",
    "classical",
    "expectation",
    "divergence",
];

/// Reference fraction of probability inside the lemniscate quoted in the literature.
pub const REFERENCE_FRACTION: f64 = 0.4325;
/// Grid on which the fraction inside the lemniscate is evaluated.
pub const FRACTION_GRID: &str = "-4:4:800,-1.5:1.5:300";
/// Grid covering the plane far enough out that truncation is negligible.
pub const FRACTION_FULL_GRID: &str = "-8:8:800,-8:8:800";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Bound {
    /// `measured < limit`.
    Below { limit: f64 },
    /// `measured > limit`.
    Above { limit: f64 },
    /// `|measured - target| < tol`.
    Within { target: f64, tol: f64 },
    /// `target / factor ≤ measured ≤ target · factor`.
    Factor { target: f64, factor: f64 },
}

impl Bound {
    fn holds(&self, x: f64) -> bool {
        if !x.is_finite() {
            return false;
        }
        match *self {
            Bound::Below { limit } => x < limit,
            Bound::Above { limit } => x > limit,
            Bound::Within { target, tol } => (x - target).abs() < tol,
            Bound::Factor { target, factor } => x >= target / factor && x <= target * factor,
        }
    }

    fn overridden(self, tol: Option<f64>) -> Self {
        match (self, tol) {
            (Bound::Below { .. }, Some(t)) => Bound::Below { limit: t },
            (Bound::Within { target, .. }, Some(t)) => Bound::Within { target, tol: t },
            (b, _) => b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: Bound,
    pub passed: bool,
    /// Reported for comparison only; does not affect the suite result.
    pub informational: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub error: Option<String>,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub tolerance_override: Option<f64>,
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn failing(&self) -> Vec<&str> {
        self.suites.iter().filter(|s| !s.passed).map(|s| s.suite.as_str()).collect()
    }
}

struct Recorder {
    tol: Option<f64>,
    checks: Vec<Check>,
}

impl Recorder {
    fn check(&mut self, name: impl Into<String>, measured: f64, bound: Bound) {
        let bound = bound.overridden(self.tol);
        self.checks.push(Check { name: name.into(), measured, bound, passed: bound.holds(measured), informational: false });
    }

    fn info(&mut self, name: impl Into<String>, measured: f64, bound: Bound) {
        self.checks.push(Check { name: name.into(), measured, bound, passed: bound.holds(measured), informational: true });
    }
}

fn below(limit: f64) -> Bound {
    Bound::Below { limit }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Base-`b` radical inverse: deterministic, well-spread points in `[0, 1)`.
fn halton(mut i: usize, base: usize) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Runs the named suites (all when `names` is empty). `tol` replaces every
/// upper-bound tolerance.
pub fn run(names: &[&str], tol: Option<f64>) -> Result<VerifyReport> {
    for n in names {
        if !SUITES.contains(n) {
            return Err(crate::Error::InvalidArgument(format!("unknown suite '{n}' (known: {})", SUITES.join(", "))));
        }
    }
    if let Some(t) = tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(crate::Error::InvalidArgument(format!("tolerance {t} must be positive")));
        }
    }
    let selected: Vec<&str> = if names.is_empty() { SUITES.to_vec() } else { SUITES.iter().copied().filter(|s| names.contains(s)).collect() };
    let suites: Vec<SuiteResult> = selected.into_iter().map(|s| run_suite(s, tol)).collect();
    Ok(VerifyReport { passed: suites.iter().all(|s| s.passed), tolerance_override: tol, suites })
}

fn run_suite(name: &str, tol: Option<f64>) -> SuiteResult {
    let start = Instant::now();
    let mut rec = Recorder { tol, checks: Vec::new() };
    let outcome = match name {
        "born" => suite_born(&mut rec),
        "cassinian" => suite_cassinian(&mut rec),
        "period" => suite_period(&mut rec),
        "conserved" => suite_conserved(&mut rec),
        "alternative" => suite_alternative(&mut rec),
        "dichotomy" => suite_dichotomy(&mut rec),
        "characteristics" => suite_characteristics(&mut rec),
        "fraction" => suite_fraction(&mut rec),
        "width" => suite_width(&mut rec),
        "classical" => suite_classical(&mut rec),
        "expectation" => suite_expectation(&mut rec),
        "divergence" => suite_divergence(&mut rec),
        _ => unreachable!("suite names are validated"),
    };
    let error = outcome.err().map(|e| e.to_string());
    let passed = error.is_none() && rec.checks.iter().all(|c| c.passed || c.informational);
    SuiteResult { suite: name.to_string(), passed, checks: rec.checks, error, seconds: start.elapsed().as_secs_f64() }
}

/// Born reconstruction versus normalized `|Ψ|²` on the real line.
pub fn born_max_deviation(n: u32) -> Result<f64> {
    let state = QuantumState::oscillator(n);
    let grid: Vec<f64> = (0..801).map(|k| -4.0 + 0.01 * k as f64).collect();
    let profile = born_density(&state, &grid, NodeExclusion::Drop)?;
    let psi2: Vec<f64> = profile.x.iter().map(|&x| eval_psi(&state, Complex64::new(x, 0.0), 0.0).norm_sqr()).collect();
    // both sides normalized over the same window
    let z = crate::quadrature::trapezoid(&profile.x, &psi2);
    Ok(profile.p.iter().zip(&psi2).map(|(p, q)| rel(*p, q / z)).fold(0.0, f64::max))
}

fn suite_born(rec: &mut Recorder) -> Result<()> {
    for n in 0..=4 {
        rec.check(format!("n={n} max relative deviation from |psi|^2"), born_max_deviation(n)?, below(1e-6));
    }
    let p1 = BornProfile::reference(&QuantumState::oscillator(1))?;
    rec.check("n=1 P(1)/P(2) vs e^3/4", rel(p1.evaluate(1.0)? / p1.evaluate(2.0)?, E.powi(3) / 4.0), below(1e-10));
    let p0 = BornProfile::reference(&QuantumState::oscillator(0))?;
    rec.check("n=0 P(0)/P(1) vs e", rel(p0.evaluate(0.0)? / p0.evaluate(1.0)?, E), below(1e-10));
    Ok(())
}

/// Largest drift of `|1 - X²|` along an orbit.
pub fn invariant_drift(traj: &Trajectory) -> f64 {
    let b0 = cassinian_invariant(traj.start().x);
    traj.samples.iter().map(|s| (cassinian_invariant(s.x) - b0).abs()).fold(0.0, f64::max)
}

fn suite_cassinian(rec: &mut Recorder) -> Result<()> {
    for b in [0.2, 0.5, 1.0, 2.0, 5.0] {
        let traj = cassinian_orbit(b, 1e-9)?;
        if b == 1.0 {
            let closest = traj.samples.iter().map(|s| s.x.norm()).fold(f64::MAX, f64::min);
            rec.check("b=1 closest approach to the node", closest, below(1e-6));
            // the separatrix is unstable: the bound here reflects integrator error
            rec.check("b=1 drift of |1-X^2| along the lobe", invariant_drift(&traj), below(1e-7));
        } else {
            rec.check(format!("b={b} drift of |1-X^2| over one period"), invariant_drift(&traj), below(1e-7));
        }
    }
    Ok(())
}

fn suite_period(rec: &mut Recorder) -> Result<()> {
    for b in [0.2, 0.5] {
        let traj = cassinian_orbit(b, 1e-9)?;
        rec.check(format!("b={b} lobe period"), traj.period.unwrap_or(f64::NAN), Bound::Within { target: PI, tol: 1e-5 });
    }
    for b in [2.0, 5.0] {
        let traj = cassinian_orbit(b, 1e-9)?;
        rec.check(format!("b={b} oval period"), traj.period.unwrap_or(f64::NAN), Bound::Within { target: TAU, tol: 1e-5 });
    }
    let circle = integrate(&QuantumState::oscillator(0), Complex64::new(1.0, 0.0), 0.0, &IntegrateOptions::closure(1e-9))?;
    rec.check("n=0 circle period", circle.period.unwrap_or(f64::NAN), Bound::Within { target: TAU, tol: 1e-6 });
    Ok(())
}

/// Conserved density along an oval versus `C/|v|²`, with `C` fixed by the Born
/// value at the seed crossing. Returns `(max relative error, residual max)`.
pub fn conserved_oracle(b: f64) -> Result<(f64, f64)> {
    let state = QuantumState::oscillator(1);
    let traj = cassinian_orbit(b, 1e-10)?;
    let born = BornProfile::reference(&state)?;
    let anchor = Anchor::crossing_near(&traj, &born, (1.0 + b).sqrt())?;
    let rho = rho_conserved(&traj, anchor)?;
    let x_c = traj.position_at(anchor.t).unwrap_or(traj.start().x);
    let c = anchor.rho * velocity(&state, x_c, 0.0)?.norm_sqr();
    let err = traj
        .samples
        .iter()
        .zip(&rho)
        .map(|(s, r)| Ok(rel(*r, c / s.v.norm_sqr())))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let residual = continuity_residual(&state, &traj, DensityKind::Conserved)?.max;
    Ok((err, residual))
}

fn suite_conserved(rec: &mut Recorder) -> Result<()> {
    for b in [1.5, 2.0, 3.0] {
        let (err, residual) = conserved_oracle(b)?;
        rec.check(format!("b={b} conserved density vs C/|v|^2"), err, below(1e-6));
        rec.check(format!("b={b} continuity residual"), residual, below(1e-6));
    }
    let s0 = QuantumState::oscillator(0);
    let circle = integrate(&s0, Complex64::new(0.4, 1.1), 0.0, &IntegrateOptions::closure(1e-10))?;
    rec.check("n=0 continuity residual on a circle", continuity_residual(&s0, &circle, DensityKind::Conserved)?.max, below(1e-9));
    Ok(())
}

/// Off-axis points strictly inside the lobes of the first excited state.
pub fn lobe_points(count: usize) -> Vec<Complex64> {
    (1..=count)
        .map(|i| {
            let b = 0.05 + 0.9 * halton(i, 2);
            let theta = 0.15 + (PI - 0.3) * halton(i, 3);
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let z = (1.0 - Complex64::from_polar(b, sign * theta)).sqrt();
            if i % 4 < 2 {
                z
            } else {
                -z
            }
        })
        .collect()
}

/// Max relative difference between the trajectory-integral alternative density
/// and the continued `|Ψ|²` over `points`.
pub fn alternative_max_error(points: &[Complex64]) -> Result<f64> {
    let state = QuantumState::oscillator(1);
    let born = BornProfile::reference(&state)?;
    let mut worst = 0.0f64;
    for &z in points {
        let a = rho_alt_trajectory(&state, z, &born, 1e-11)?;
        worst = worst.max(rel(a, rho_alt_direct(&state, z)?));
    }
    Ok(worst)
}

fn suite_alternative(rec: &mut Recorder) -> Result<()> {
    rec.check("100 lobe points: trajectory integral vs |psi|^2", alternative_max_error(&lobe_points(100))?, below(1e-6));
    let traj = cassinian_orbit(0.5, 1e-10)?;
    let rep = continuity_residual(&QuantumState::oscillator(1), &traj, DensityKind::Alt)?;
    rec.check("b=0.5 lobe: alternative density violates continuity", rep.max, Bound::Above { limit: 1e-3 });
    Ok(())
}

/// Conserved density transported from the Born value at `from` to the real
/// crossing nearest `to`, divided by the Born value there.
pub fn transported_over_born(b: f64, from: f64, to: f64) -> Result<f64> {
    let state = QuantumState::oscillator(1);
    let born = BornProfile::reference(&state)?;
    let traj = cassinian_orbit(b, 1e-11)?;
    let a = Anchor::crossing_near(&traj, &born, from)?;
    let target = traj
        .crossings
        .iter()
        .min_by(|p, q| (p.x_r - to).abs().total_cmp(&(q.x_r - to).abs()))
        .ok_or(crate::Error::NoCrossing)?;
    let f = time_integral(&traj, a.t, target.t, |t, x| conserved_rate(&state, t, x))?;
    Ok(a.rho * f.exp() / born.evaluate(target.x_r)?)
}

fn suite_dichotomy(rec: &mut Recorder) -> Result<()> {
    let oval = transported_over_born(2.0, 3f64.sqrt(), -(3f64.sqrt()))?;
    rec.check("b=2 oval: transported density / P at the opposite crossing", (oval - 1.0).abs(), below(1e-6));
    let lobe = transported_over_born(0.5, 1.5f64.sqrt(), 0.5f64.sqrt())?;
    rec.check("b=0.5 lobe: P / transported density at the inner crossing", 1.0 / lobe, Bound::Within { target: E, tol: 1e-4 });
    Ok(())
}

/// Twenty starting points spread over n = 0, 1, 2 away from nodes and separatrices.
pub fn characteristic_seeds() -> Vec<(u32, Complex64, f64)> {
    let mut seeds = Vec::new();
    for i in 1..=7 {
        let r = 0.4 + 1.6 * halton(i, 2);
        let phi = TAU * halton(i, 3);
        seeds.push((0, Complex64::from_polar(r, phi), TAU));
    }
    for i in 1..=7 {
        // n=1 orbits with b away from the separatrix b = 1
        let b = if i % 2 == 0 { 0.1 + 0.7 * halton(i, 2) } else { 1.3 + 2.0 * halton(i, 2) };
        let theta = TAU * halton(i, 3);
        let z = (1.0 - Complex64::from_polar(b, theta)).sqrt();
        seeds.push((1, z, if b < 1.0 { PI } else { TAU }));
    }
    for i in 1..=6 {
        seeds.push((2, Complex64::new(-2.5 + 5.0 * halton(i, 2), 0.8 + 1.5 * halton(i, 3)), PI));
    }
    seeds
}

fn suite_characteristics(rec: &mut Recorder) -> Result<()> {
    let mut worst = 0.0f64;
    for (n, z, duration) in characteristic_seeds() {
        worst = worst.max(characteristics_match(&QuantumState::oscillator(n), z, duration, 1e-9)?);
    }
    rec.check("20 seeds, n=0..2: max distance to the characteristic", worst, below(1e-6));
    Ok(())
}

/// Fraction of probability inside the lemniscate on `grid` and its 2× refinement,
/// with the wall time of both evaluations.
pub fn fraction_run(grid: &GridSpec) -> Result<(f64, f64, f64)> {
    let state = QuantumState::oscillator(1);
    let start = Instant::now();
    let mut coarse = density_field(&state, grid, &DensityOptions::default())?;
    let (_, a) = normalize_and_fraction(&mut coarse)?;
    let mut fine = density_field(&state, &grid.refined(), &DensityOptions::default())?;
    let (_, b) = normalize_and_fraction(&mut fine)?;
    Ok((a, b, start.elapsed().as_secs_f64()))
}

fn suite_fraction(rec: &mut Recorder) -> Result<()> {
    let grid: GridSpec = FRACTION_GRID.parse()?;
    let (coarse, fine, seconds) = fraction_run(&grid)?;
    rec.check("grid-refinement change of the fraction", (coarse - fine).abs(), below(1e-3));
    rec.check("runtime of both grids (s)", seconds, Bound::Below { limit: 30.0 });
    rec.info("fraction inside on the truncated grid vs reference", coarse, Bound::Within { target: REFERENCE_FRACTION, tol: 0.015 });
    let full: GridSpec = FRACTION_FULL_GRID.parse()?;
    let mut field = density_field(&QuantumState::oscillator(1), &full, &DensityOptions::default())?;
    let (_, whole) = normalize_and_fraction(&mut field)?;
    rec.info("fraction inside over the full plane vs reference", whole, Bound::Within { target: REFERENCE_FRACTION, tol: 0.015 });
    Ok(())
}

fn suite_width(rec: &mut Recorder) -> Result<()> {
    let w1 = lemniscate_width(1)?;
    rec.check("n=1 lemniscate width", w1, Bound::Within { target: 0.5, tol: 1e-4 });
    rec.info("n=1 width vs literature value", w1, Bound::Within { target: REFERENCE_LEMNISCATE_WIDTH, tol: 1e-4 });
    let widths = [w1, lemniscate_width(2)?, lemniscate_width(3)?, lemniscate_width(4)?];
    let gap = widths.windows(2).map(|w| w[0] - w[1]).fold(f64::MAX, f64::min);
    rec.check("smallest decrease in width from n to n+1 (n=1..4)", gap, Bound::Above { limit: 0.0 });
    Ok(())
}

fn suite_classical(rec: &mut Recorder) -> Result<()> {
    let width = lemniscate_width(1)?;
    let kg = classical_width(&PhysicalScale::new(1.0, 1.0)?, width);
    rec.check("m=1 kg, omega=1: width (m)", kg, Bound::Factor { target: 1e-17, factor: 3.0 });
    let electron = classical_width(&PhysicalScale::electron(1.0)?, width);
    rec.check("electron, omega=1: width (m)", electron, Bound::Factor { target: 1e-2, factor: 3.0 });
    rec.info(
        "m=1 kg width from the literature separatrix value (m)",
        classical_width(&PhysicalScale::new(1.0, 1.0)?, REFERENCE_LEMNISCATE_WIDTH),
        Bound::Factor { target: 1e-17, factor: 3.0 },
    );
    Ok(())
}

fn suite_expectation(rec: &mut Recorder) -> Result<()> {
    for n in 0..=4 {
        let s = QuantumState::oscillator(n);
        let e = expectation(&s, Observable::Energy, 0.0)?;
        rec.check(format!("n={n} energy error"), (e - (n as f64 + 0.5)).abs(), below(1e-8));
        rec.check(format!("n={n} |<x>|"), expectation(&s, Observable::Position, 0.0)?.abs(), below(1e-10));
    }
    Ok(())
}

/// Worst `|-4 Im(½v² + V) + div v|` (relative to the larger term) and the
/// worst finite-difference mismatch over 200 off-node points for state `n`.
pub fn divergence_errors(n: u32) -> Result<(f64, f64)> {
    let state = QuantumState::oscillator(n);
    let (mut identity, mut fd) = (0.0f64, 0.0f64);
    let mut i = 0;
    let mut taken = 0;
    while taken < 200 {
        i += 1;
        let z = Complex64::new(-3.0 + 6.0 * halton(i, 2), -2.0 + 4.0 * halton(i, 3));
        if node_proximity(&state, z) < 1e-2 {
            continue;
        }
        taken += 1;
        let v = velocity(&state, z, 0.0)?;
        let rate = -4.0 * (0.5 * v * v + potential(&state, z)).im;
        let div = divergence(&state, z)?;
        identity = identity.max((rate + div).abs() / rate.abs().max(div.abs()).max(1.0));
        let div_fd = divergence_fd(&state, z, FD_STEP)?;
        fd = fd.max((div - div_fd).abs() / div.abs().max(1.0));
    }
    Ok((identity, fd))
}

fn suite_divergence(rec: &mut Recorder) -> Result<()> {
    for n in 0..=4 {
        let (identity, fd) = divergence_errors(n)?;
        rec.check(format!("n={n} energy-rate identity"), identity, below(1e-6));
        rec.check(format!("n={n} finite-difference divergence"), fd, below(1e-5));
    }
    Ok(())
}
