//! Conservation structure of the extended flow.
//!
//! The extended continuity equation is `∂ρ/∂t + ∂(ρ v_r)/∂x_r + ∂(ρ v_i)/∂x_i = 0`.
//! Along a path this reads `d(ln ρ)/dt = -div v`, with `div v = 2 Re(v')` for the
//! analytic field. This module checks the trajectory densities against it and
//! compares the complex trajectories with the characteristics of the equation,
//! which are traced by a separate real two-dimensional integrator.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::probability::{rho_alt_along, rho_conserved, Anchor};
use crate::trajectory::{integrate, IntegrateOptions, Trajectory};
use crate::wavefunction::{eval_psi, velocity, velocity_prime, ComplexPoint, QuantumState, StateKind, EPS_POLE};

/// Step of the finite-difference divergence.
pub const FD_STEP: f64 = 1e-5;

/// `div v = 2 Re(dv/dx)` of the analytic velocity field.
pub fn divergence(state: &QuantumState, x: Complex64) -> Result<f64> {
    Ok(2.0 * velocity_prime(state, x, 0.0)?.re)
}

/// `∂v_r/∂x_r + ∂v_i/∂x_i` by central differences of step `h`.
pub fn divergence_fd(state: &QuantumState, x: Complex64, h: f64) -> Result<f64> {
    let dx = Complex64::new(h, 0.0);
    let dy = Complex64::new(0.0, h);
    let v = |z| velocity(state, z, 0.0);
    let d_re = (v(x + dx)?.re - v(x - dx)?.re) / (2.0 * h);
    let d_im = (v(x + dy)?.im - v(x - dy)?.im) / (2.0 * h);
    Ok(d_re + d_im)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityKind {
    /// Transported with `-4 Im(½v² + V)`.
    Conserved,
    /// Transported with `-4 Im(½v²)`, i.e. the continued `|Ψ|²`.
    Alt,
}

impl std::str::FromStr for DensityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eq3" | "conserved" => Ok(Self::Conserved),
            "eq4" | "alt" => Ok(Self::Alt),
            other => Err(Error::InvalidArgument(format!("unknown density '{other}' (expected conserved or alt)"))),
        }
    }
}

/// Continuity residual `r(t) = d(ln ρ)/dt + div v` along one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub state: QuantumState,
    pub seed: ComplexPoint,
    pub density: DensityKind,
    pub t: Vec<f64>,
    pub residuals: Vec<f64>,
    pub max: f64,
    pub rms: f64,
}

/// Derivative of sampled data at every abscissa from the three-point
/// Lagrange formula on the (possibly uneven) sample spacing.
fn sampled_derivative(t: &[f64], f: &[f64]) -> Vec<f64> {
    let n = t.len();
    let three_point = |i0: usize, at: usize| {
        let (a, b, c) = (t[i0], t[i0 + 1], t[i0 + 2]);
        let s = t[at];
        f[i0] * (2.0 * s - b - c) / ((a - b) * (a - c))
            + f[i0 + 1] * (2.0 * s - a - c) / ((b - a) * (b - c))
            + f[i0 + 2] * (2.0 * s - a - b) / ((c - a) * (c - b))
    };
    (0..n)
        .map(|i| match i {
            0 => three_point(0, 0),
            _ if i == n - 1 => three_point(n - 3, n - 1),
            _ => three_point(i - 1, i),
        })
        .collect()
}

/// Transports the chosen density along `traj` and differentiates `ln ρ`
/// numerically at the samples, so the residual measures how well the
/// transported density satisfies the continuity equation rather than restating
/// its construction.
pub fn continuity_residual(state: &QuantumState, traj: &Trajectory, density: DensityKind) -> Result<ResidualReport> {
    if !state.is_stationary() {
        return Err(Error::UnsupportedState(format!("{state} is not stationary")));
    }
    if traj.samples.len() < 3 {
        return Err(Error::InvalidArgument("residuals need at least three trajectory samples".into()));
    }
    let start = traj.start();
    let rho = match density {
        DensityKind::Conserved => rho_conserved(traj, Anchor { t: start.t, rho: 1.0 })?,
        DensityKind::Alt => {
            let psi = eval_psi(&QuantumState { normalized: true, ..*state }, start.x, start.t).norm_sqr();
            rho_alt_along(traj, Anchor { t: start.t, rho: psi })?
        }
    };
    let t: Vec<f64> = traj.samples.iter().map(|s| s.t).collect();
    let ln_rho: Vec<f64> = rho.iter().map(|r| r.ln()).collect();
    let rate = sampled_derivative(&t, &ln_rho);
    let residuals = traj
        .samples
        .iter()
        .zip(&rate)
        .map(|(s, r)| Ok(r + divergence(state, s.x)?))
        .collect::<Result<Vec<f64>>>()?;
    if residuals.iter().any(|r| !r.is_finite()) {
        return Err(Error::NotFinite { cell: residuals.iter().position(|r| !r.is_finite()).unwrap_or(0) });
    }
    let max = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let rms = (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt();
    Ok(ResidualReport { state: *state, seed: start.x.into(), density, t, residuals, max, rms })
}

/// Real-valued velocity field `(v_r, v_i)` evaluated without complex types.
struct PlanarField {
    kind: StateKind,
}

impl PlanarField {
    fn new(state: &QuantumState) -> Result<Self> {
        match state.kind {
            StateKind::Oscillator { .. } | StateKind::FreeParticle { .. } => Ok(Self { kind: state.kind }),
            _ => Err(Error::UnsupportedState(format!("{state}: characteristics need a stationary bound or free state"))),
        }
    }

    fn eval(&self, x: f64, y: f64) -> Result<[f64; 2]> {
        match self.kind {
            StateKind::FreeParticle { k } => Ok([k, 0.0]),
            StateKind::Oscillator { n } => {
                // H_k(x + iy) as (re, im) pairs; H_{k+1} = 2X H_k - 2k H_{k-1}
                let (mut pr, mut pi) = (0.0, 0.0);
                let (mut hr, mut hi) = (1.0, 0.0);
                let mut scale = 1.0f64;
                let r = x.hypot(y).max(1.0);
                for k in 0..n {
                    let nr = 2.0 * (x * hr - y * hi) - 2.0 * k as f64 * pr;
                    let ni = 2.0 * (x * hi + y * hr) - 2.0 * k as f64 * pi;
                    pr = hr;
                    pi = hi;
                    hr = nr;
                    hi = ni;
                    scale *= 2.0 * r + k as f64;
                }
                let mag2 = hr * hr + hi * hi;
                if mag2.sqrt() < EPS_POLE * scale {
                    return Err(Error::PoleEncountered { at: ComplexPoint { re: x, im: y }, t: f64::NAN });
                }
                // L = 2n H_{n-1}/H_n - X; v = -iL gives (v_r, v_i) = (Im L, -Re L)
                let c = 2.0 * n as f64;
                let lr = c * (pr * hr + pi * hi) / mag2 - x;
                let li = c * (pi * hr - pr * hi) / mag2 - y;
                Ok([li, -lr])
            }
            _ => unreachable!("rejected in PlanarField::new"),
        }
    }
}

// Runge–Kutta–Fehlberg 4(5) tableau (the field is autonomous, so stage times are not needed)
const FB: [[f64; 5]; 6] = [
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [0.25, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
    [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
    [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
    [-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
];
const FC5: [f64; 6] = [16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0, 2.0 / 55.0];
const FC4: [f64; 6] = [25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -1.0 / 5.0, 0.0];

/// Fixed-tolerance RKF45 tracer of the planar field.
struct Tracer {
    field: PlanarField,
    tol: f64,
    h: f64,
}

impl Tracer {
    fn step(&self, p: [f64; 2], h: f64) -> Result<([f64; 2], f64)> {
        let mut k = [[0.0; 2]; 6];
        for s in 0..6 {
            let mut q = p;
            for (j, kj) in k.iter().enumerate().take(s) {
                q[0] += h * FB[s][j] * kj[0];
                q[1] += h * FB[s][j] * kj[1];
            }
            k[s] = self.field.eval(q[0], q[1])?;
        }
        let mut hi = p;
        let mut lo = p;
        for s in 0..6 {
            hi[0] += h * FC5[s] * k[s][0];
            hi[1] += h * FC5[s] * k[s][1];
            lo[0] += h * FC4[s] * k[s][0];
            lo[1] += h * FC4[s] * k[s][1];
        }
        let err = (hi[0] - lo[0]).hypot(hi[1] - lo[1]) / (self.tol * (1.0 + hi[0].hypot(hi[1])));
        Ok((hi, err))
    }

    /// Advances `p` from `t` to `t_end` (either direction).
    fn advance(&mut self, mut p: [f64; 2], mut t: f64, t_end: f64) -> Result<[f64; 2]> {
        let dir = if t_end >= t { 1.0 } else { -1.0 };
        let mut guard = 0usize;
        while dir * (t_end - t) > 0.0 {
            guard += 1;
            if guard > 10_000_000 {
                return Err(Error::NonConvergence { at: ComplexPoint { re: p[0], im: p[1] }, t });
            }
            let clipped = self.h >= dir * (t_end - t);
            let h = if clipped { t_end - t } else { dir * self.h };
            let attempt = self.step(p, h);
            let (next, err) = match attempt {
                Ok(r) => r,
                Err(_) => (p, f64::INFINITY),
            };
            if err <= 1.0 {
                p = next;
                t = if clipped { t_end } else { t + h };
                // a step clipped to hit t_end leaves the nominal size alone
                if !clipped {
                    self.h *= if err == 0.0 { 4.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 4.0) };
                }
            } else {
                let shrink = if err.is_finite() { (0.9 * err.powf(-0.25)).clamp(0.1, 0.5) } else { 0.25 };
                self.h = h.abs() * shrink;
                if self.h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::PoleEncountered { at: ComplexPoint { re: p[0], im: p[1] }, t });
                }
            }
        }
        Ok(p)
    }
}

/// Tolerance of the characteristic tracer.
pub const TRACER_TOL: f64 = 1e-12;

/// Maximum distance between the complex trajectory from `x0` (integrated with
/// `rel_tol` for `duration`) and the characteristic curve of the planar field
/// through the same point, compared at every trajectory sample.
pub fn characteristics_match(state: &QuantumState, x0: Complex64, duration: f64, rel_tol: f64) -> Result<f64> {
    if !state.is_stationary() {
        return Err(Error::UnsupportedState(format!("{state} is not stationary")));
    }
    if !(duration.is_finite() && duration >= 0.0) {
        return Err(Error::InvalidArgument(format!("duration {duration} must be finite and non-negative")));
    }
    let traj = integrate(state, x0, 0.0, &IntegrateOptions::until(duration, rel_tol))?;
    let mut tracer = Tracer { field: PlanarField::new(state)?, tol: TRACER_TOL, h: 1e-3 };
    // a fixed point of the field stays put in both pictures
    let p0 = [x0.re, x0.im];
    let f0 = tracer.field.eval(p0[0], p0[1])?;
    if f0[0].hypot(f0[1]) < crate::trajectory::STAGNATION_SPEED {
        return Ok(traj.samples.iter().map(|s| (s.x - x0).norm()).fold(0.0, f64::max));
    }
    let mut p = p0;
    let mut t = 0.0;
    let mut worst = 0.0f64;
    for s in &traj.samples {
        p = tracer.advance(p, t, s.t)?;
        t = s.t;
        worst = worst.max((s.x.re - p[0]).hypot(s.x.im - p[1]));
    }
    if traj.end().t < duration {
        // the complex integrator stopped early
        return Err(Error::PoleEncountered { at: traj.end().x.into(), t: traj.end().t });
    }
    Ok(worst)
}
