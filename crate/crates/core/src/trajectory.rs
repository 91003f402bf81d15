//! Integration of the complex equation of motion `dx/dt = v(x, t)`.
//!
//! The stepper is a Dormand–Prince 5(4) pair with PI step control and the
//! standard fourth-order continuous extension. Every accepted step is kept as a
//! [`DenseSegment`] so that crossings, closure times and trajectory integrals can
//! be evaluated between the stored samples.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::wavefunction::{list_nodes, log_derivative_prime, node_proximity, velocity, ComplexPoint, QuantumState, SearchBox};

/// `until_closure` integrations give up (reporting an open path) after this much time.
pub const CLOSURE_HORIZON: f64 = 50.0;
/// Speeds below this at the seed mean the seed is a fixed point of the flow.
pub const STAGNATION_SPEED: f64 = 1e-12;
pub const DEFAULT_CLOSURE_TOL: f64 = 1e-6;
/// Maximum angle between the initial and return velocities for a closed orbit.
pub const CLOSURE_ANGLE_TOL: f64 = 1e-3;
/// Crossings are refined until `|Im x|` drops below this.
pub const CROSSING_TOL: f64 = 1e-10;
/// Distance from the node at which the separatrix lobe is seeded.
pub const SEPARATRIX_SEED_OFFSET: f64 = 1e-7;

const POLE_STEP_FRACTION: f64 = 0.2;
const MAX_STEPS: usize = 2_000_000;
const MAX_SUBSAMPLES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Horizon {
    /// Integrate to this time (may lie before `t0`).
    Until(f64),
    /// Integrate forward until the path returns to its seed, or until
    /// [`CLOSURE_HORIZON`] has elapsed.
    Closure,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    pub rel_tol: f64,
    pub horizon: Horizon,
    pub closure_tol: f64,
    /// Running into a node ends the trajectory instead of failing.
    pub stop_at_pole: bool,
}

impl IntegrateOptions {
    pub fn until(t_end: f64, rel_tol: f64) -> Self {
        Self { rel_tol, horizon: Horizon::Until(t_end), closure_tol: DEFAULT_CLOSURE_TOL, stop_at_pole: false }
    }

    pub fn closure(rel_tol: f64) -> Self {
        Self { rel_tol, horizon: Horizon::Closure, closure_tol: DEFAULT_CLOSURE_TOL, stop_at_pole: false }
    }

    pub fn stopping_at_pole(self) -> Self {
        Self { stop_at_pole: true, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub x: Complex64,
    pub v: Complex64,
}

/// Continuous extension of one accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseSegment {
    t0: f64,
    h: f64,
    r: [Complex64; 5],
}

impl DenseSegment {
    fn constant(t0: f64, h: f64, x: Complex64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self { t0, h, r: [x, zero, zero, zero, zero] }
    }

    pub fn start(&self) -> f64 {
        self.t0
    }

    pub fn end(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let theta = if self.h == 0.0 { 0.0 } else { (t - self.t0) / self.h };
        let theta1 = 1.0 - theta;
        let [r0, r1, r2, r3, r4] = self.r;
        r0 + theta * (r1 + theta1 * (r2 + theta * (r3 + theta1 * r4)))
    }

    fn contains(&self, t: f64) -> bool {
        let (lo, hi) = if self.h >= 0.0 { (self.t0, self.end()) } else { (self.end(), self.t0) };
        t >= lo && t <= hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub t: f64,
    pub x_r: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub state: QuantumState,
    pub samples: Vec<Sample>,
    segments: Vec<DenseSegment>,
    pub closed: bool,
    pub period: Option<f64>,
    pub crossings: Vec<Crossing>,
    pub winding: Vec<(ComplexPoint, i32)>,
    /// The seed was a stagnation point; the trajectory is constant.
    pub stagnant: bool,
    /// Integration stopped because the path ran into a node.
    pub ends_at_pole: bool,
    pub rel_tol: f64,
}

impl Trajectory {
    pub fn start(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn end(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least one sample")
    }

    pub fn segments(&self) -> &[DenseSegment] {
        &self.segments
    }

    /// Time direction of the integration (+1 or -1).
    pub fn direction(&self) -> f64 {
        if self.end().t >= self.start().t {
            1.0
        } else {
            -1.0
        }
    }

    /// Position at time `t` from the dense output; `None` outside the span.
    pub fn position_at(&self, t: f64) -> Option<Complex64> {
        if self.segments.is_empty() {
            return (t == self.start().t).then_some(self.start().x);
        }
        let dir = self.direction();
        let idx = self.segments.partition_point(|s| dir * s.end() < dir * t);
        let seg = self.segments.get(idx).or_else(|| self.segments.last())?;
        seg.contains(t).then(|| seg.eval(t))
    }
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

struct Step {
    x_new: Complex64,
    k7: Complex64,
    err: f64,
    dense: [Complex64; 5],
}

fn dopri_step(
    f: &impl Fn(f64, Complex64) -> Result<Complex64>,
    t: f64,
    x: Complex64,
    k1: Complex64,
    h: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Step> {
    let k2 = f(t + C2 * h, x + h * A21 * k1)?;
    let k3 = f(t + C3 * h, x + h * (A31 * k1 + A32 * k2))?;
    let k4 = f(t + C4 * h, x + h * (A41 * k1 + A42 * k2 + A43 * k3))?;
    let k5 = f(t + C5 * h, x + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4))?;
    let k6 = f(t + h, x + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5))?;
    let x_new = x + h * (A71 * k1 + A73 * k3 + A74 * k4 + A75 * k5 + A76 * k6);
    let k7 = f(t + h, x_new)?;
    let err_vec = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
    let scale = abs_tol + rel_tol * x.norm().max(x_new.norm());
    let r1 = x_new - x;
    let r2 = h * k1 - r1;
    let r3 = r1 - h * k7 - r2;
    let r4 = h * (D1 * k1 + D3 * k3 + D4 * k4 + D5 * k5 + D6 * k6 + D7 * k7);
    Ok(Step { x_new, k7, err: err_vec.norm() / scale, dense: [x, r1, r2, r3, r4] })
}

/// Watches for the first return of the path through the section orthogonal to
/// the initial velocity, near the seed.
struct ReturnDetector {
    x0: Complex64,
    v0: Complex64,
    dir_v0: Complex64,
    tol: f64,
    left: bool,
}

impl ReturnDetector {
    fn new(x0: Complex64, v0: Complex64, dir: f64, tol: f64) -> Self {
        Self { x0, v0, dir_v0: dir * v0, tol, left: false }
    }

    fn section(&self, x: Complex64) -> f64 {
        ((x - self.x0) * self.dir_v0.conj()).re
    }

    /// Returns the refined return time if `seg` (running from `xa` to `xb`)
    /// contains the closing passage.
    fn check(&mut self, state: &QuantumState, seg: &DenseSegment, xa: Complex64, xb: Complex64) -> Option<f64> {
        let was_away = self.left;
        if (xb - self.x0).norm() > 10.0 * self.tol {
            self.left = true;
        }
        if !was_away {
            return None;
        }
        let (ga, gb) = (self.section(xa), self.section(xb));
        if !(ga < 0.0 && gb >= 0.0) {
            return None;
        }
        // Illinois-modified regula falsi on the dense output.
        let (mut ta, mut tb) = (seg.start(), seg.end());
        let (mut fa, mut fb) = (ga, gb);
        let mut side = 0i8;
        let mut tc = tb;
        for _ in 0..100 {
            tc = (ta * fb - tb * fa) / (fb - fa);
            let fc = self.section(seg.eval(tc));
            if fc == 0.0 || (tb - ta).abs() < 1e-15 * tc.abs().max(1.0) {
                break;
            }
            if fc.signum() == fb.signum() {
                tb = tc;
                fb = fc;
                if side == 1 {
                    fa *= 0.5;
                }
                side = 1;
            } else {
                ta = tc;
                fa = fc;
                if side == -1 {
                    fb *= 0.5;
                }
                side = -1;
            }
        }
        let xc = seg.eval(tc);
        if (xc - self.x0).norm() >= self.tol {
            return None;
        }
        let vc = velocity(state, xc, tc).ok()?;
        let angle = (vc / self.v0).arg().abs();
        (angle < CLOSURE_ANGLE_TOL).then_some(tc)
    }
}

#[allow(clippy::too_many_arguments)]
fn initial_step(
    f: &impl Fn(f64, Complex64) -> Result<Complex64>,
    t0: f64,
    x0: Complex64,
    v0: Complex64,
    dir: f64,
    rel_tol: f64,
    abs_tol: f64,
    span: f64,
) -> f64 {
    let sc = abs_tol + rel_tol * x0.norm();
    let d0 = x0.norm() / sc;
    let d1 = v0.norm() / sc;
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 }.min(span);
    let h1 = match f(t0 + dir * h0, x0 + dir * h0 * v0) {
        Ok(v1) => {
            let d2 = (v1 - v0).norm() / (sc * h0);
            let m = d1.max(d2);
            if m <= 1e-15 {
                (h0 * 1e-3).max(1e-6)
            } else {
                (0.01 / m).powf(0.2)
            }
        }
        Err(_) => h0,
    };
    (100.0 * h0).min(h1).min(span)
}

fn pole_or_stall(state: &QuantumState, x: Complex64, t: f64) -> Error {
    if node_proximity(state, x) < 1e-6 {
        Error::PoleEncountered { at: ComplexPoint::from(x), t }
    } else {
        Error::NonConvergence { at: ComplexPoint::from(x), t }
    }
}

/// Integrates `dx/dt = velocity(state, x, t)` from `(t0, x0)`.
pub fn integrate(state: &QuantumState, x0: Complex64, t0: f64, opts: &IntegrateOptions) -> Result<Trajectory> {
    if !(1e-12..=1e-4).contains(&opts.rel_tol) {
        return Err(Error::InvalidArgument(format!("rel_tol {} outside [1e-12, 1e-4]", opts.rel_tol)));
    }
    if !(x0.re.is_finite() && x0.im.is_finite() && t0.is_finite()) {
        return Err(Error::InvalidArgument("non-finite seed".into()));
    }
    let rel_tol = opts.rel_tol;
    let abs_tol = rel_tol * 1e-8;
    let f = |t: f64, x: Complex64| velocity(state, x, t);
    let v0 = f(t0, x0)?;
    let (t_end, closure) = match opts.horizon {
        Horizon::Until(t) => (t, false),
        Horizon::Closure => (t0 + CLOSURE_HORIZON, true),
    };
    if !t_end.is_finite() {
        return Err(Error::InvalidArgument("non-finite end time".into()));
    }
    let mut traj = Trajectory {
        state: *state,
        samples: vec![Sample { t: t0, x: x0, v: v0 }],
        segments: Vec::new(),
        closed: false,
        period: None,
        crossings: Vec::new(),
        winding: Vec::new(),
        stagnant: false,
        ends_at_pole: false,
        rel_tol,
    };
    if t_end == t0 {
        return Ok(traj);
    }
    let dir = (t_end - t0).signum();
    if v0.norm() < STAGNATION_SPEED && state.is_stationary() {
        traj.stagnant = true;
        traj.samples.push(Sample { t: t_end, x: x0, v: v0 });
        traj.segments.push(DenseSegment::constant(t0, t_end - t0, x0));
        return Ok(traj);
    }

    let mut detector = ReturnDetector::new(x0, v0, dir, opts.closure_tol);
    let (mut t, mut x, mut k1) = (t0, x0, v0);
    let mut h = initial_step(&f, t0, x0, v0, dir, rel_tol, abs_tol, (t_end - t0).abs());
    let mut err_old = 1e-4f64;
    let mut rejected_last = false;

    let mut finished = false;
    for _ in 0..MAX_STEPS {
        let remaining = (t_end - t).abs();
        if remaining <= 4.0 * f64::EPSILON * t.abs().max(t_end.abs()) {
            finished = true;
            break;
        }
        h = h.min(remaining);
        // Near a simple node |L'| ≈ 1/d², so this keeps each step from covering
        // more than a fraction of the remaining time to the node.
        if let Ok(lp) = log_derivative_prime(state, x, t) {
            let cap = POLE_STEP_FRACTION / lp.norm();
            if cap < h {
                h = cap;
            }
        }
        if h <= 4.0 * f64::EPSILON * t.abs() || h < f64::MIN_POSITIVE {
            let e = pole_or_stall(state, x, t);
            if opts.stop_at_pole && matches!(e, Error::PoleEncountered { .. }) {
                traj.ends_at_pole = true;
                finished = true;
                break;
            }
            return Err(e);
        }
        let step = match dopri_step(&f, t, x, k1, dir * h, rel_tol, abs_tol) {
            Ok(step) if step.err.is_finite() => step,
            _ => {
                h *= 0.25;
                rejected_last = true;
                continue;
            }
        };
        if step.err <= 1.0 {
            let t_new = if h == remaining { t_end } else { t + dir * h };
            let seg = DenseSegment { t0: t, h: t_new - t, r: step.dense };
            push_samples(&mut traj.samples, state, &seg, k1, step.k7, x, step.x_new, rel_tol)?;
            traj.segments.push(seg);
            if closure {
                if let Some(tc) = detector.check(state, &seg, x, step.x_new) {
                    while traj.samples.last().is_some_and(|s| dir * s.t >= dir * tc) {
                        traj.samples.pop();
                    }
                    let xc = seg.eval(tc);
                    traj.samples.push(Sample { t: tc, x: xc, v: velocity(state, xc, tc)? });
                    traj.closed = true;
                    traj.period = Some((tc - t0).abs());
                    finished = true;
                    break;
                }
            }
            t = t_new;
            x = step.x_new;
            k1 = step.k7;
            // PI control (Hairer & Wanner DOPRI5 constants).
            let fac11 = step.err.powf(0.17);
            let mut fac = (fac11 / err_old.powf(0.04)) / 0.9;
            fac = fac.clamp(0.1, 5.0);
            let mut h_new = h / fac;
            if rejected_last {
                h_new = h_new.min(h);
            }
            err_old = step.err.max(1e-4);
            rejected_last = false;
            h = h_new;
        } else {
            let fac11 = step.err.powf(0.17);
            h /= (fac11 / 0.9).min(5.0);
            rejected_last = true;
        }
    }
    if !finished {
        return Err(Error::NonConvergence { at: ComplexPoint::from(x), t });
    }

    traj.crossings = real_axis_crossings(&traj);
    if traj.closed && state.is_stationary() {
        if let Ok(nodes) = list_nodes(state, &bounding_box(&traj, 1.0), 0.0) {
            traj.winding = winding_numbers(&traj, &nodes)?;
        }
    }
    Ok(traj)
}

#[allow(clippy::too_many_arguments)]
fn push_samples(
    samples: &mut Vec<Sample>,
    state: &QuantumState,
    seg: &DenseSegment,
    k1: Complex64,
    k7: Complex64,
    xa: Complex64,
    xb: Complex64,
    rel_tol: f64,
) -> Result<()> {
    // Linear interpolation error ≈ Δt²|x''|/8; keep it below 10·rel_tol.
    let h = seg.h.abs();
    let accel = (k7 - k1).norm() / h;
    let budget = 10.0 * rel_tol * xa.norm().max(xb.norm()).max(1.0);
    let dt = (4.0 * budget / accel.max(f64::MIN_POSITIVE)).sqrt();
    let m = ((h / dt).ceil() as usize).clamp(1, MAX_SUBSAMPLES);
    for j in 1..m {
        let t = seg.t0 + seg.h * j as f64 / m as f64;
        let x = seg.eval(t);
        samples.push(Sample { t, x, v: velocity(state, x, t)? });
    }
    let t = seg.end();
    samples.push(Sample { t, x: xb, v: k7 });
    Ok(())
}

fn bounding_box(traj: &Trajectory, margin: f64) -> SearchBox {
    let mut b = SearchBox { re_min: f64::MAX, re_max: f64::MIN, im_min: f64::MAX, im_max: f64::MIN };
    for s in &traj.samples {
        b.re_min = b.re_min.min(s.x.re);
        b.re_max = b.re_max.max(s.x.re);
        b.im_min = b.im_min.min(s.x.im);
        b.im_max = b.im_max.max(s.x.im);
    }
    SearchBox { re_min: b.re_min - margin, re_max: b.re_max + margin, im_min: b.im_min - margin, im_max: b.im_max + margin }
}

/// `|1 - X²|`, the conserved label of first-excited-state oscillator paths.
pub fn cassinian_invariant(x: Complex64) -> f64 {
    (1.0 - x * x).norm()
}

/// Re-scans a trajectory for its first return to the seed.
pub fn detect_closure(traj: &Trajectory, closure_tol: f64) -> (bool, Option<f64>) {
    let first = traj.start();
    if traj.stagnant || traj.segments.is_empty() {
        return (false, None);
    }
    let mut det = ReturnDetector::new(first.x, first.v, traj.direction(), closure_tol);
    for seg in &traj.segments {
        let (xa, xb) = (seg.eval(seg.start()), seg.eval(seg.end()));
        if let Some(tc) = det.check(&traj.state, seg, xa, xb) {
            return (true, Some((tc - first.t).abs()));
        }
    }
    (false, None)
}

fn bisect_crossing(traj: &Trajectory, mut ta: f64, mut tb: f64) -> Crossing {
    let mut ya = traj.position_at(ta).map_or(0.0, |x| x.im);
    let mut mid = 0.5 * (ta + tb);
    let mut xm = traj.position_at(mid).unwrap_or(Complex64::new(f64::NAN, 0.0));
    for _ in 0..200 {
        mid = 0.5 * (ta + tb);
        xm = traj.position_at(mid).unwrap_or(xm);
        if xm.im.abs() < CROSSING_TOL || mid == ta || mid == tb {
            break;
        }
        if xm.im.signum() == ya.signum() {
            ta = mid;
            ya = xm.im;
        } else {
            tb = mid;
        }
    }
    Crossing { t: mid, x_r: xm.re }
}

/// Points where the path crosses (or starts on) the real axis.
pub fn real_axis_crossings(traj: &Trajectory) -> Vec<Crossing> {
    let mut out = Vec::new();
    let samples = &traj.samples;
    if traj.stagnant {
        if samples[0].x.im.abs() < CROSSING_TOL {
            out.push(Crossing { t: samples[0].t, x_r: samples[0].x.re });
        }
        return out;
    }
    for (i, s) in samples.iter().enumerate() {
        if s.x.im.abs() < CROSSING_TOL {
            out.push(Crossing { t: s.t, x_r: s.x.re });
            continue;
        }
        if let Some(next) = samples.get(i + 1) {
            if next.x.im.abs() >= CROSSING_TOL && s.x.im.signum() != next.x.im.signum() {
                out.push(bisect_crossing(traj, s.t, next.t));
            }
        }
    }
    if traj.closed && out.len() > 1 {
        let (first, last) = (out[0], out[out.len() - 1]);
        let start_on_axis = (first.t - samples[0].t).abs() < f64::EPSILON * first.t.abs().max(1.0);
        if start_on_axis && (last.x_r - first.x_r).abs() < 10.0 * DEFAULT_CLOSURE_TOL {
            out.pop();
        }
    }
    out
}

fn accumulate_angle(traj: &Trajectory, node: Complex64, ta: f64, xa: Complex64, tb: f64, xb: Complex64, depth: u32) -> f64 {
    let d = ((xb - node) / (xa - node)).arg();
    if d.abs() < 0.5 || depth == 0 {
        return d;
    }
    let tm = 0.5 * (ta + tb);
    match traj.position_at(tm) {
        Some(xm) => {
            accumulate_angle(traj, node, ta, xa, tm, xm, depth - 1) + accumulate_angle(traj, node, tm, xm, tb, xb, depth - 1)
        }
        None => d,
    }
}

/// Signed number of turns of a closed trajectory around each node.
pub fn winding_numbers(traj: &Trajectory, nodes: &[ComplexPoint]) -> Result<Vec<(ComplexPoint, i32)>> {
    if !traj.closed {
        return Err(Error::NotClosed);
    }
    let mut out = Vec::with_capacity(nodes.len());
    for &node in nodes {
        let a = node.z();
        let mut total = 0.0;
        for w in traj.samples.windows(2) {
            total += accumulate_angle(traj, a, w[0].t, w[0].x, w[1].t, w[1].x, 40);
        }
        // closing chord back to the seed
        total += ((traj.start().x - a) / (traj.end().x - a)).arg();
        let turns = total / TAU;
        let rounded = turns.round();
        if (turns - rounded).abs() > 1e-3 {
            return Err(Error::WindingNotInteger { node, turns });
        }
        out.push((node, rounded as i32));
    }
    Ok(out)
}

/// Seed on the first-excited-state orbit `|1 - X²| = b`.
///
/// For `b ≠ 1` this is the positive real crossing `√(1 + b)`; for the
/// lemniscate it is a point just off the node on the outgoing ray of the right lobe.
pub fn cassinian_seed(b: f64) -> Complex64 {
    if (b - 1.0).abs() < 1e-12 {
        Complex64::from_polar(SEPARATRIX_SEED_OFFSET, -FRAC_PI_4)
    } else {
        Complex64::new((1.0 + b).sqrt(), 0.0)
    }
}

/// One orbit of the first excited oscillator state with invariant `b`.
///
/// The `b = 1` lemniscate lobe starts and ends on the node, so it is traced
/// for the lobe traversal time π from a seed next to the node instead of to
/// closure. Separatrix sensitivity means the far end only returns to within
/// about √(rel_tol) of the node.
pub fn cassinian_orbit(b: f64, rel_tol: f64) -> Result<Trajectory> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::InvalidArgument(format!("Cassinian label b = {b} must be positive")));
    }
    let state = QuantumState::oscillator(1);
    let seed = cassinian_seed(b);
    if (b - 1.0).abs() < 1e-12 {
        integrate(&state, seed, 0.0, &IntegrateOptions::until(PI, rel_tol).stopping_at_pole())
    } else {
        integrate(&state, seed, 0.0, &IntegrateOptions::closure(rel_tol))
    }
}
