//! Acceptance criteria: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::f64::consts::{E, PI, TAU};
use std::process::{Command, ExitCode};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qtraj_core::continuity::{characteristics_match, continuity_residual, DensityKind};
use qtraj_core::grid::GridSpec;
use qtraj_core::probability::{
    born_density, classical_width, conserved_rate, density_field, expectation, lemniscate_width, normalize_and_fraction,
    rho_alt_trajectory, rho_conserved, Anchor, BornProfile, DensityOptions, NodeExclusion, Observable, PhysicalScale,
    REFERENCE_LEMNISCATE_WIDTH,
};
use qtraj_core::quadrature::time_integral;
use qtraj_core::trajectory::{cassinian_orbit, integrate, IntegrateOptions};
use qtraj_core::QuantumState;

/// Outcome of one criterion.
struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Physicists' Hermite polynomial on the real line.
fn hermite_real(n: u32, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Normalized oscillator density `|ψ_n(x)|²` on the real line.
fn psi2_real(n: u32, x: f64) -> f64 {
    let norm2 = 1.0 / (2f64.powi(n as i32) * factorial(n) * PI.sqrt());
    norm2 * hermite_real(n, x).powi(2) * (-x * x).exp()
}

/// `|ψ_1(X)|²` for complex X: `(2/√π)|X|² e^{-Re X²}`.
fn psi1_sq(z: Complex64) -> f64 {
    2.0 / PI.sqrt() * z.norm_sqr() * (-(z * z).re).exp()
}

/// First-excited-state velocity `i(X - 1/X)`.
fn v1(z: Complex64) -> Complex64 {
    Complex64::i() * (z - 1.0 / z)
}

fn c1_born() -> Outcome {
    let start = Instant::now();
    let grid: Vec<f64> = (0..801).map(|k| -4.0 + 8.0 * k as f64 / 800.0).collect();
    let mut worst = 0.0f64;
    for n in 0..=4 {
        let profile = match born_density(&QuantumState::oscillator(n), &grid, NodeExclusion::Drop) {
            Ok(p) => p,
            Err(e) => return outcome(false, format!("n={n}: {e}")),
        };
        let psi2: Vec<f64> = profile.x.iter().map(|&x| psi2_real(n, x)).collect();
        let z: f64 = profile.x.windows(2).zip(psi2.windows(2)).map(|(x, p)| 0.5 * (x[1] - x[0]) * (p[0] + p[1])).sum();
        for (p, q) in profile.p.iter().zip(&psi2) {
            worst = worst.max(rel(*p, q / z));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst < 1e-6 && secs < 1.0, format!("max rel deviation {worst:.3e} (< 1e-6), runtime {secs:.3} s (< 1 s)"))
}

fn c2_cassinian() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut closest = f64::NAN;
    for b in [0.2, 0.5, 1.0, 2.0, 5.0] {
        let traj = match cassinian_orbit(b, 1e-9) {
            Ok(t) => t,
            Err(e) => return outcome(false, format!("b={b}: {e}")),
        };
        let b0 = (1.0 - traj.start().x * traj.start().x).norm();
        for s in &traj.samples {
            worst = worst.max(((1.0 - s.x * s.x).norm() - b0).abs());
        }
        if b == 1.0 {
            closest = traj.samples.iter().map(|s| s.x.norm()).fold(f64::MAX, f64::min);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst < 1e-7 && closest < 1e-6 && secs < 1.0,
        format!("max drift {worst:.3e} (< 1e-7), b=1 closest approach {closest:.3e} (< 1e-6), runtime {secs:.3} s (< 1 s)"),
    )
}

fn c3_period() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for b in [0.2, 0.5, 1.0, 2.0, 5.0] {
        match cassinian_orbit(b, 1e-9) {
            Ok(traj) if traj.closed => {
                let p = traj.period.unwrap_or(f64::NAN);
                let hit = (p - PI).abs() < 1e-5;
                ok &= hit;
                parts.push(format!("b={b}: {p:.7}{}", if hit { "" } else { " ✗" }));
            }
            Ok(_) => parts.push(format!("b={b}: open")),
            Err(e) => {
                ok = false;
                parts.push(format!("b={b}: {e}"));
            }
        }
    }
    let circle = integrate(&QuantumState::oscillator(0), Complex64::new(1.0, 0.0), 0.0, &IntegrateOptions::closure(1e-9));
    let p0 = circle.ok().and_then(|t| t.period).unwrap_or(f64::NAN);
    let circle_ok = (p0 - TAU).abs() < 1e-6;
    ok &= circle_ok;
    outcome(ok, format!("n=1 periods (π ± 1e-5): {}; n=0 circle {p0:.8} (2π ± 1e-6)", parts.join(", ")))
}

fn c4_conserved() -> Outcome {
    let state = QuantumState::oscillator(1);
    let (mut err, mut residual) = (0.0f64, 0.0f64);
    for b in [1.5, 2.0, 3.0] {
        let traj = match cassinian_orbit(b, 1e-10) {
            Ok(t) => t,
            Err(e) => return outcome(false, format!("b={b}: {e}")),
        };
        let x_c = Complex64::new((1.0 + b).sqrt(), 0.0);
        let anchor = Anchor { t: traj.start().t, rho: psi1_sq(x_c) };
        let c = anchor.rho * v1(x_c).norm_sqr();
        let rho = match rho_conserved(&traj, anchor) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("b={b}: {e}")),
        };
        for (s, r) in traj.samples.iter().zip(&rho) {
            err = err.max(rel(*r, c / v1(s.x).norm_sqr()));
        }
        match continuity_residual(&state, &traj, DensityKind::Conserved) {
            Ok(rep) => residual = residual.max(rep.max),
            Err(e) => return outcome(false, format!("b={b} residual: {e}")),
        }
    }
    outcome(err < 1e-6 && residual < 1e-6, format!("max rel error vs C/|v|² {err:.3e} (< 1e-6), continuity residual {residual:.3e} (< 1e-6)"))
}

fn c5_alternative() -> Outcome {
    let state = QuantumState::oscillator(1);
    let born = match BornProfile::reference(&state) {
        Ok(b) => b,
        Err(e) => return outcome(false, e.to_string()),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        // 1 - X² = b e^{iθ} with b < 1 lies inside a lobe; θ away from 0, π keeps it off the axis
        let b = rng.gen_range(0.05..0.95);
        let theta = rng.gen_range(0.15..PI - 0.15) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let mut z = (1.0 - Complex64::from_polar(b, theta)).sqrt();
        if rng.gen_bool(0.5) {
            z = -z;
        }
        match rho_alt_trajectory(&state, z, &born, 1e-11) {
            Ok(r) => worst = worst.max(rel(r, psi1_sq(z))),
            Err(e) => return outcome(false, format!("at {z}: {e}")),
        }
    }
    outcome(worst < 1e-6, format!("100 random lobe points: max rel error vs |Ψ|² {worst:.3e} (< 1e-6)"))
}

/// Born value at `from` transported along orbit `b` to the crossing nearest `to`.
fn transport(b: f64, from: f64, to: f64) -> Result<f64, qtraj_core::Error> {
    let state = QuantumState::oscillator(1);
    let traj = cassinian_orbit(b, 1e-11)?;
    let near = |x: f64| {
        traj.crossings
            .iter()
            .min_by(|p, q| (p.x_r - x).abs().total_cmp(&(q.x_r - x).abs()))
            .copied()
            .ok_or(qtraj_core::Error::NoCrossing)
    };
    let (a, c) = (near(from)?, near(to)?);
    let f = time_integral(&traj, a.t, c.t, |t, x| conserved_rate(&state, t, x))?;
    Ok(psi1_sq(Complex64::new(a.x_r, 0.0)) * f.exp())
}

fn c6_dichotomy() -> Outcome {
    let s3 = 3f64.sqrt();
    let oval = transport(2.0, s3, -s3).map(|r| rel(r, psi1_sq(Complex64::new(-s3, 0.0))));
    let lobe = transport(0.5, 1.5f64.sqrt(), 0.5f64.sqrt()).map(|r| psi1_sq(Complex64::new(0.5f64.sqrt(), 0.0)) / r);
    match (oval, lobe) {
        (Ok(o), Ok(l)) => outcome(
            o < 1e-6 && (l - E).abs() < 1e-4,
            format!("b=2 opposite crossing rel error {o:.3e} (< 1e-6); b=0.5 P/ρ = {l:.8} (e ± 1e-4)"),
        ),
        (o, l) => outcome(false, format!("oval {o:?}, lobe {l:?}")),
    }
}

fn c7_characteristics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut count = 0;
    for n in 0..=2u32 {
        let seeds = if n == 2 { 6 } else { 7 };
        let mut taken = 0;
        while taken < seeds {
            let (z, duration) = match n {
                0 => (Complex64::from_polar(rng.gen_range(0.3..2.0), rng.gen_range(0.0..TAU)), TAU),
                1 => {
                    // keep away from the separatrix b = 1 so the orbit closes
                    let b: f64 = rng.gen_range(0.1..3.0);
                    if (b - 1.0).abs() < 0.15 {
                        continue;
                    }
                    let z = (1.0 - Complex64::from_polar(b, rng.gen_range(0.0..TAU))).sqrt();
                    (z, if b < 1.0 { PI } else { TAU })
                }
                _ => (Complex64::new(rng.gen_range(-2.5..2.5), rng.gen_range(0.5..2.0)), PI),
            };
            match characteristics_match(&QuantumState::oscillator(n), z, duration, 1e-9) {
                Ok(d) => worst = worst.max(d),
                Err(e) => return outcome(false, format!("n={n} seed {z}: {e}")),
            }
            taken += 1;
            count += 1;
        }
    }
    outcome(worst < 1e-6, format!("{count} seeds over n=0..2: max distance {worst:.3e} (< 1e-6)"))
}

fn c8_fraction(earlier_passed: bool) -> Outcome {
    let state = QuantumState::oscillator(1);
    let grid: GridSpec = "-4:4:800,-1.5:1.5:300".parse().expect("valid grid");
    let start = Instant::now();
    let run = |g: &GridSpec| -> Result<f64, qtraj_core::Error> {
        let mut field = density_field(&state, g, &DensityOptions::default())?;
        Ok(normalize_and_fraction(&mut field)?.1)
    };
    let (coarse, fine) = match (run(&grid), run(&grid.refined())) {
        (Ok(a), Ok(b)) => (a, b),
        (a, b) => return outcome(false, format!("{a:?} {b:?}")),
    };
    let secs = start.elapsed().as_secs_f64();
    let full = run(&"-8:8:800,-8:8:800".parse().expect("valid grid")).unwrap_or(f64::NAN);
    let on_target = (coarse - 0.4325).abs() < 0.015;
    let converged = (coarse - fine).abs() < 1e-3 && secs < 30.0;
    let verdict = if on_target {
        "on target"
    } else if earlier_passed {
        "target missed, reported under the fallback clause"
    } else {
        "target missed and criteria 1-7 did not all pass"
    };
    outcome(
        converged && (on_target || earlier_passed),
        format!(
            "fraction {coarse:.5} (0.4325 ± 0.015: {verdict}), refinement change {:.2e} (< 1e-3), runtime {secs:.2} s (< 30 s); \
             untruncated plane [-8,8]²: {full:.5}; recipe: |Ψ|² in b<1 lobes, P(x_c)|v(x_c)|²/|v|² on ovals, global normalization",
            (coarse - fine).abs()
        ),
    )
}

fn c9_width() -> Outcome {
    let widths: Result<Vec<f64>, _> = (1..=4).map(lemniscate_width).collect();
    match widths {
        Ok(w) => {
            let decreasing = w[1] > w[2] && w[2] > w[3];
            outcome(
                (w[0] - 0.5).abs() < 1e-4 && decreasing,
                format!(
                    "n=1 width {:.6} (0.5 ± 1e-4; literature {REFERENCE_LEMNISCATE_WIDTH}); n=2,3,4: {:.4}, {:.4}, {:.4} (strictly decreasing)",
                    w[0], w[1], w[2], w[3]
                ),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn c10_classical() -> Outcome {
    let width = lemniscate_width(1).unwrap_or(f64::NAN);
    let kg = PhysicalScale::new(1.0, 1.0).map(|s| classical_width(&s, width)).unwrap_or(f64::NAN);
    let el = PhysicalScale::electron(1.0).map(|s| classical_width(&s, width)).unwrap_or(f64::NAN);
    let within = |x: f64, target: f64| x >= target / 3.0 && x <= target * 3.0;
    outcome(
        within(kg, 1e-17) && within(el, 1e-2),
        format!("1 kg: {kg:.3e} m (1e-17 within ×3); electron: {el:.3e} m (1e-2 within ×3)"),
    )
}

fn c11_expectation() -> Outcome {
    let (mut e_err, mut x_err) = (0.0f64, 0.0f64);
    for n in 0..=4 {
        let s = QuantumState::oscillator(n);
        match (expectation(&s, Observable::Energy, 0.0), expectation(&s, Observable::Position, 0.0)) {
            (Ok(e), Ok(x)) => {
                e_err = e_err.max((e - (n as f64 + 0.5)).abs());
                x_err = x_err.max(x.abs());
            }
            (e, x) => return outcome(false, format!("n={n}: {e:?} {x:?}")),
        }
    }
    outcome(e_err < 1e-8 && x_err < 1e-10, format!("max |E - (n+½)| {e_err:.3e} (< 1e-8), max |⟨x⟩| {x_err:.3e} (< 1e-10)"))
}

fn c12_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_qtraj");
    let dir = std::env::temp_dir().join(format!("qtraj-acceptance-{}", std::process::id()));
    let run = |name: &str| -> Result<Vec<u8>, String> {
        let out = dir.join(name);
        let status = Command::new(bin)
            .args(["density", "--state", "sho:1", "--grid", "-3:3:300,-1:1:100", "--format", "csv", "--out"])
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(String::from_utf8_lossy(&status.stderr).into_owned());
        }
        std::fs::read(out.join("density.csv")).map_err(|e| e.to_string())
    };
    let result = match (run("a"), run("b")) {
        (Ok(a), Ok(b)) => outcome(!a.is_empty() && a == b, format!("two density runs: {} bytes each, identical = {}", a.len(), a == b)),
        (a, b) => outcome(false, format!("{:?} {:?}", a.err(), b.err())),
    };
    let _ = std::fs::remove_dir_all(&dir);
    result
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("Born reconstruction", c1_born),
        ("Cassinian invariance", c2_cassinian),
        ("Period law", c3_period),
        ("Conserved-density oracle", c4_conserved),
        ("Alternative-density oracle", c5_alternative),
        ("Born-consistency dichotomy", c6_dichotomy),
        ("Characteristics coincidence", c7_characteristics),
    ];
    let mut all = true;
    let mut report = |k: usize, name: &str, o: Outcome| {
        all &= o.passed;
        println!("criterion {k:>2} {} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        o.passed
    };
    let mut first_seven = true;
    for (k, (name, f)) in criteria.iter().enumerate() {
        first_seven &= report(k + 1, name, f());
    }
    report(8, "Fraction inside the lemniscate", c8_fraction(first_seven));
    report(9, "Lemniscate width", c9_width());
    report(10, "Classical widths", c10_classical());
    report(11, "Expectation values", c11_expectation());
    report(12, "Determinism", c12_determinism());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
