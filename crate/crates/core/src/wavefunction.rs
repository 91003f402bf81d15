//! Closed-form wavefunctions continued to complex position, their logarithmic
//! derivatives, and the velocity field `v = -i ψ'/ψ` (units ħ = m = ω = 1).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative pole guard: a point is treated as a node of Ψ when the amplitude is
/// below this fraction of the local envelope scale.
pub const EPS_POLE: f64 = 1e-10;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// A position in the complex plane, in units of 1/α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint {
    pub re: f64,
    pub im: f64,
}

impl ComplexPoint {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if re.is_finite() && im.is_finite() {
            Ok(Self { re, im })
        } else {
            Err(Error::InvalidArgument(format!("non-finite point ({re}, {im})")))
        }
    }

    pub fn z(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

impl From<Complex64> for ComplexPoint {
    fn from(z: Complex64) -> Self {
        debug_assert!(z.re.is_finite() && z.im.is_finite());
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexPoint> for Complex64 {
    fn from(p: ComplexPoint) -> Self {
        p.z()
    }
}

impl fmt::Display for ComplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im < 0.0 {
            write!(f, "{}-{}i", self.re, -self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateKind {
    Oscillator { n: u32 },
    FreeParticle { k: f64 },
    GaussianPacket { x0: f64, k0: f64, sigma0: f64 },
    PotentialStep { energy: f64, v0: f64 },
}

/// A closed-form wavefunction. Immutable once built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumState {
    pub kind: StateKind,
    pub normalized: bool,
}

impl fmt::Display for QuantumState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            StateKind::Oscillator { n } => write!(f, "sho:{n}"),
            StateKind::FreeParticle { k } => write!(f, "free:{k}"),
            StateKind::GaussianPacket { x0, k0, sigma0 } => write!(f, "packet:{x0},{k0},{sigma0}"),
            StateKind::PotentialStep { energy, v0 } => write!(f, "step:{energy},{v0}"),
        }
    }
}

fn parse_numbers(text: &str, count: usize, what: &str) -> Result<Vec<f64>> {
    let values = text
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<f64>, _>>()
        .map_err(|e| Error::InvalidState(format!("{what}: {e}")))?;
    if values.len() != count {
        return Err(Error::InvalidState(format!("{what}: expected {count} comma-separated values")));
    }
    Ok(values)
}

/// Parses `sho:n`, `free:k`, `packet:x0,k0,sigma0` or `step:E,V0`.
impl FromStr for QuantumState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::InvalidState(format!("state '{s}' should look like sho:1, free:k, packet:x0,k0,sigma0 or step:E,V0")))?;
        match kind {
            "sho" => args
                .trim()
                .parse::<u32>()
                .map(Self::oscillator)
                .map_err(|e| Error::InvalidState(format!("oscillator level '{args}': {e}"))),
            "free" => Self::free_particle(parse_numbers(args, 1, "free particle")?[0]),
            "packet" => {
                let v = parse_numbers(args, 3, "packet")?;
                Self::gaussian_packet(v[0], v[1], v[2])
            }
            "step" => {
                let v = parse_numbers(args, 2, "step")?;
                Self::potential_step(v[0], v[1])
            }
            other => Err(Error::InvalidState(format!("unknown state kind '{other}'"))),
        }
    }
}

/// Parses `a+bi`, `a-bi`, `a`, or `bi`.
impl FromStr for ComplexPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse complex number '{s}' (expected a+bi)"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
            return Self::new(t.parse().map_err(|_| bad())?, 0.0);
        };
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        let imag = |text: &str| -> Result<f64> {
            match text {
                "" | "+" => Ok(1.0),
                "-" => Ok(-1.0),
                _ => text.parse().map_err(|_| bad()),
            }
        };
        match split {
            Some(k) => Self::new(body[..k].parse().map_err(|_| bad())?, imag(&body[k..])?),
            None => Self::new(0.0, imag(body)?),
        }
    }
}

impl QuantumState {
    pub fn oscillator(n: u32) -> Self {
        Self { kind: StateKind::Oscillator { n }, normalized: true }
    }

    pub fn free_particle(k: f64) -> Result<Self> {
        Self::new(StateKind::FreeParticle { k }, true)
    }

    pub fn gaussian_packet(x0: f64, k0: f64, sigma0: f64) -> Result<Self> {
        Self::new(StateKind::GaussianPacket { x0, k0, sigma0 }, true)
    }

    pub fn potential_step(energy: f64, v0: f64) -> Result<Self> {
        Self::new(StateKind::PotentialStep { energy, v0 }, true)
    }

    pub fn new(kind: StateKind, normalized: bool) -> Result<Self> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match kind {
            StateKind::Oscillator { .. } => {}
            StateKind::FreeParticle { k } => {
                if !finite(&[k]) {
                    return Err(Error::InvalidState("free particle k must be finite".into()));
                }
            }
            StateKind::GaussianPacket { x0, k0, sigma0 } => {
                if !finite(&[x0, k0, sigma0]) || sigma0 <= 0.0 {
                    return Err(Error::InvalidState("packet needs finite x0, k0 and sigma0 > 0".into()));
                }
            }
            StateKind::PotentialStep { energy, v0 } => {
                if !finite(&[energy, v0]) || energy <= 0.0 {
                    return Err(Error::InvalidState("step needs E > 0 and finite V0".into()));
                }
            }
        }
        Ok(Self { kind, normalized })
    }

    /// Unnormalized variant: monic Hermite prefactor for oscillators, unit
    /// amplitude otherwise.
    pub fn unnormalized(self) -> Self {
        Self { normalized: false, ..self }
    }

    pub fn is_stationary(&self) -> bool {
        !matches!(self.kind, StateKind::GaussianPacket { .. })
    }

    pub fn is_normalizable(&self) -> bool {
        matches!(self.kind, StateKind::Oscillator { .. } | StateKind::GaussianPacket { .. })
    }

    pub fn oscillator_level(&self) -> Option<u32> {
        match self.kind {
            StateKind::Oscillator { n } => Some(n),
            _ => None,
        }
    }

    /// Energy eigenvalue of a stationary state.
    pub fn energy(&self) -> Option<f64> {
        match self.kind {
            StateKind::Oscillator { n } => Some(n as f64 + 0.5),
            StateKind::FreeParticle { k } => Some(0.5 * k * k),
            StateKind::PotentialStep { energy, .. } => Some(energy),
            StateKind::GaussianPacket { .. } => None,
        }
    }
}

/// Physicists' Hermite polynomials `(H_n, H_{n-1}, H_{n-2})` by upward recurrence.
pub fn hermite_triple(n: u32, x: Complex64) -> (Complex64, Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    let mut h_km2 = zero;
    let mut h_km1 = zero;
    let mut h_k = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let next = 2.0 * x * h_k - 2.0 * k as f64 * h_km1;
        h_km2 = h_km1;
        h_km1 = h_k;
        h_k = next;
    }
    (h_k, h_km1, h_km2)
}

pub fn hermite(n: u32, x: Complex64) -> Complex64 {
    hermite_triple(n, x).0
}

/// `Σ |c_k| r^k` for the coefficients of `H_n`: the envelope the pole guard
/// compares `|H_n(x)|` against.
fn hermite_envelope(n: u32, r: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = 2.0 * r * cur + 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Prefactor multiplying `H_n(X) e^{-X²/2}`.
fn oscillator_prefactor(n: u32, normalized: bool) -> f64 {
    if normalized {
        (2f64.powi(n as i32) * factorial(n) * PI.sqrt()).powf(-0.5)
    } else {
        2f64.powi(-(n as i32))
    }
}

struct StepCoefficients {
    k: f64,
    reflect: Complex64,
    transmit: Complex64,
    /// `ψ_R = T e^{right_rate · x}`.
    right_rate: Complex64,
}

fn step_coefficients(energy: f64, v0: f64) -> StepCoefficients {
    let k = (2.0 * energy).sqrt();
    let right_rate = if energy >= v0 {
        I * (2.0 * (energy - v0)).sqrt()
    } else {
        Complex64::new(-(2.0 * (v0 - energy)).sqrt(), 0.0)
    };
    // Matching ψ and ψ' at x = 0: 1 + R = T, ik(1 - R) = right_rate·T.
    let ik = I * k;
    let reflect = (ik - right_rate) / (ik + right_rate);
    let transmit = 1.0 + reflect;
    StepCoefficients { k, reflect, transmit, right_rate }
}

fn packet_width(sigma0: f64, t: f64) -> Complex64 {
    Complex64::new(sigma0 * sigma0, 0.5 * t)
}

/// Ψ(x, t) continued to complex x.
///
/// For the potential step, `Re(x) == 0` evaluates the left branch.
pub fn eval_psi(state: &QuantumState, x: Complex64, t: f64) -> Complex64 {
    match state.kind {
        StateKind::Oscillator { n } => {
            let c = oscillator_prefactor(n, state.normalized);
            let phase = (-I * (n as f64 + 0.5) * t).exp();
            c * hermite(n, x) * (-0.5 * x * x).exp() * phase
        }
        StateKind::FreeParticle { k } => (I * k * x - I * 0.5 * k * k * t).exp(),
        StateKind::GaussianPacket { x0, k0, sigma0 } => {
            let s = packet_width(sigma0, t);
            let c = if state.normalized {
                (2.0 * PI).powf(-0.25) * sigma0.sqrt()
            } else {
                sigma0
            };
            let d = x - x0 - k0 * t;
            c / s.sqrt() * (-(d * d) / (4.0 * s) + I * k0 * (x - x0) - I * 0.5 * k0 * k0 * t).exp()
        }
        StateKind::PotentialStep { energy, v0 } => {
            let sc = step_coefficients(energy, v0);
            let phase = (-I * energy * t).exp();
            if x.re <= 0.0 {
                ((I * sc.k * x).exp() + sc.reflect * (-I * sc.k * x).exp()) * phase
            } else {
                sc.transmit * (sc.right_rate * x).exp() * phase
            }
        }
    }
}

fn pole(x: Complex64, t: f64) -> Error {
    Error::PoleEncountered { at: ComplexPoint::from(x), t }
}

/// `(1/Ψ) ∂Ψ/∂x` from closed-form derivatives.
pub fn log_derivative(state: &QuantumState, x: Complex64, t: f64) -> Result<Complex64> {
    match state.kind {
        StateKind::Oscillator { n } => {
            let (h, hm1, _) = hermite_triple(n, x);
            if h.norm() < EPS_POLE * hermite_envelope(n, x.norm().max(1.0)) {
                return Err(pole(x, t));
            }
            Ok(2.0 * n as f64 * hm1 / h - x)
        }
        StateKind::FreeParticle { k } => Ok(I * k),
        StateKind::GaussianPacket { x0, k0, sigma0 } => {
            let s = packet_width(sigma0, t);
            Ok(-(x - x0 - k0 * t) / (2.0 * s) + I * k0)
        }
        StateKind::PotentialStep { energy, v0 } => {
            let sc = step_coefficients(energy, v0);
            if x.re <= 0.0 {
                let fwd = (I * sc.k * x).exp();
                let back = sc.reflect * (-I * sc.k * x).exp();
                let psi = fwd + back;
                if psi.norm() < EPS_POLE * (fwd.norm() + back.norm()) {
                    return Err(pole(x, t));
                }
                Ok(I * sc.k * (fwd - back) / psi)
            } else {
                Ok(sc.right_rate)
            }
        }
    }
}

/// `d/dx [(1/Ψ) ∂Ψ/∂x]`.
pub fn log_derivative_prime(state: &QuantumState, x: Complex64, t: f64) -> Result<Complex64> {
    match state.kind {
        StateKind::Oscillator { n } => {
            let (h, hm1, hm2) = hermite_triple(n, x);
            if h.norm() < EPS_POLE * hermite_envelope(n, x.norm().max(1.0)) {
                return Err(pole(x, t));
            }
            let nf = n as f64;
            // H'_k = 2k H_{k-1}
            let num = 2.0 * (nf - 1.0) * hm2 * h - 2.0 * nf * hm1 * hm1;
            Ok(2.0 * nf * num / (h * h) - 1.0)
        }
        StateKind::FreeParticle { .. } => Ok(Complex64::new(0.0, 0.0)),
        StateKind::GaussianPacket { sigma0, .. } => Ok(-1.0 / (2.0 * packet_width(sigma0, t))),
        StateKind::PotentialStep { energy, .. } => {
            if x.re <= 0.0 {
                let l = log_derivative(state, x, t)?;
                Ok(-2.0 * energy - l * l)
            } else {
                Ok(Complex64::new(0.0, 0.0))
            }
        }
    }
}

/// Relative size of Ψ against its local envelope (1 for nodeless states). Values
/// near zero mean `x` sits close to a node.
pub fn node_proximity(state: &QuantumState, x: Complex64) -> f64 {
    match state.kind {
        StateKind::Oscillator { n } => hermite(n, x).norm() / hermite_envelope(n, x.norm().max(1.0)),
        StateKind::PotentialStep { energy, v0 } if x.re <= 0.0 => {
            let sc = step_coefficients(energy, v0);
            let fwd = (I * sc.k * x).exp();
            let back = sc.reflect * (-I * sc.k * x).exp();
            (fwd + back).norm() / (fwd.norm() + back.norm())
        }
        _ => 1.0,
    }
}

/// Complex velocity `v = (ħ/im) ∂ ln Ψ/∂x = -i ψ'/ψ`.
pub fn velocity(state: &QuantumState, x: Complex64, t: f64) -> Result<Complex64> {
    Ok(-I * log_derivative(state, x, t)?)
}

/// `dv/dx`.
pub fn velocity_prime(state: &QuantumState, x: Complex64, t: f64) -> Result<Complex64> {
    Ok(-I * log_derivative_prime(state, x, t)?)
}

/// Analytic continuation of V(x).
pub fn potential(state: &QuantumState, x: Complex64) -> Complex64 {
    match state.kind {
        StateKind::Oscillator { .. } => 0.5 * x * x,
        StateKind::FreeParticle { .. } | StateKind::GaussianPacket { .. } => Complex64::new(0.0, 0.0),
        StateKind::PotentialStep { v0, .. } => {
            if x.re <= 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(v0, 0.0)
            }
        }
    }
}

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl SearchBox {
    pub fn square(half: f64) -> Self {
        Self { re_min: -half, re_max: half, im_min: -half, im_max: half }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }
}

/// Real zeros of `f` on `[a, b]` by sign-change scan plus bisection.
fn real_roots(f: impl Fn(f64) -> f64, a: f64, b: f64, cells: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let dx = (b - a) / cells as f64;
    let mut x_prev = a;
    let mut f_prev = f(a);
    if f_prev == 0.0 {
        roots.push(a);
    }
    for i in 1..=cells {
        let x = a + i as f64 * dx;
        let fx = f(x);
        if fx == 0.0 {
            roots.push(x);
        } else if f_prev != 0.0 && f_prev.signum() != fx.signum() {
            let (mut lo, mut hi, mut f_lo) = (x_prev, x, f_prev);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = f(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == f_lo.signum() {
                    lo = mid;
                    f_lo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        x_prev = x;
        f_prev = fx;
    }
    roots
}

/// Newton polish of a zero of the analytic function `f` with derivative `df`.
fn polish(f: impl Fn(Complex64) -> Complex64, df: impl Fn(Complex64) -> Complex64, mut z: Complex64) -> Complex64 {
    for _ in 0..50 {
        let d = df(z);
        if d.norm() == 0.0 {
            break;
        }
        let step = f(z) / d;
        z -= step;
        if step.norm() <= 1e-16 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

/// Zeros of Ψ (the poles of ẋ) inside `search`.
pub fn list_nodes(state: &QuantumState, search: &SearchBox, t: f64) -> Result<Vec<ComplexPoint>> {
    match state.kind {
        StateKind::Oscillator { n } => {
            if search.im_min > 0.0 || search.im_max < 0.0 || n == 0 {
                return Ok(Vec::new());
            }
            let h = |x: Complex64| hermite(n, x);
            let dh = |x: Complex64| 2.0 * n as f64 * hermite_triple(n, x).1;
            let cells = (((search.re_max - search.re_min) / 1e-3).ceil() as usize).max(16);
            let scan = real_roots(|x| hermite(n, Complex64::new(x, 0.0)).re, search.re_min, search.re_max, cells);
            let normalized = QuantumState { normalized: true, ..*state };
            let mut nodes = Vec::with_capacity(scan.len());
            for x in scan {
                let mut z = polish(h, dh, Complex64::new(x, 0.0));
                // Hermite zeros are real; drop rounding noise in the imaginary part.
                z.im = 0.0;
                debug_assert!(eval_psi(&normalized, z, 0.0).norm() < 1e-12);
                if search.contains(z) {
                    nodes.push(ComplexPoint::from(z));
                }
            }
            Ok(nodes)
        }
        StateKind::FreeParticle { .. } => Ok(Vec::new()),
        StateKind::GaussianPacket { .. } if t == 0.0 => Ok(Vec::new()),
        _ => Err(Error::UnsupportedState(format!("{state} (node search needs a stationary eigenstate)"))),
    }
}

/// Zeros of Ψ' for oscillator eigenstates: the stagnation points (foci) of the flow.
pub fn list_stagnation_points(state: &QuantumState) -> Result<Vec<ComplexPoint>> {
    let n = state
        .oscillator_level()
        .ok_or_else(|| Error::UnsupportedState(format!("{state} (stagnation points need an eigenstate)")))?;
    // ψ' ∝ 2n H_{n-1}(X) - X H_n(X)
    let g = move |x: Complex64| {
        let (h, hm1, _) = hermite_triple(n, x);
        2.0 * n as f64 * hm1 - x * h
    };
    // d/dX [2n H_{n-1} - X H_n] = 4n(n-1) H_{n-2} - H_n - 2n X H_{n-1}
    let dg = move |x: Complex64| {
        let (h, hm1, hm2) = hermite_triple(n, x);
        let nf = n as f64;
        4.0 * nf * (nf - 1.0) * hm2 - h - 2.0 * nf * x * hm1
    };
    let reach = (2.0 * n as f64 + 1.0).sqrt() + 3.0;
    let scan = real_roots(|x| g(Complex64::new(x, 0.0)).re, -reach, reach, 20_000);
    Ok(scan
        .into_iter()
        .map(|x| {
            let mut z = polish(g, dg, Complex64::new(x, 0.0));
            z.im = 0.0;
            ComplexPoint::from(z)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn oscillator_values() {
        let s1 = QuantumState::oscillator(1);
        assert_eq!(eval_psi(&s1, c(0.0, 0.0), 0.0).norm(), 0.0);
        let s0 = QuantumState::oscillator(0);
        assert_relative_eq!(eval_psi(&s0, c(0.0, 0.0), 0.0).re, PI.powf(-0.25), epsilon = 1e-15);
        // X e^{-X²/2} at X = i is i e^{1/2}
        let v = eval_psi(&s1.unnormalized(), c(0.0, 1.0), 0.0);
        assert_relative_eq!(v.re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(v.im, 0.5f64.exp(), epsilon = 1e-14);
    }

    #[test]
    fn unnormalized_matches_series() {
        // X e^{-X²/2} by its Taylor series at X = i
        let x = c(0.0, 1.0);
        let mut term = c(1.0, 0.0);
        let mut sum = c(0.0, 0.0);
        let u = -0.5 * x * x;
        for k in 0..40 {
            if k > 0 {
                term = term * u / k as f64;
            }
            sum += term;
        }
        let series = x * sum;
        let closed = eval_psi(&QuantumState::oscillator(1).unnormalized(), x, 0.0);
        assert_relative_eq!((series - closed).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn log_derivative_examples() {
        let l0 = log_derivative(&QuantumState::oscillator(0), c(1.0, 0.0), 0.0).unwrap();
        assert_relative_eq!(l0.re, -1.0, epsilon = 1e-15);
        let l1 = log_derivative(&QuantumState::oscillator(1), c(0.0, 1.0), 0.0).unwrap();
        assert_relative_eq!(l1.im, -2.0, epsilon = 1e-14);
        assert_relative_eq!(l1.re, 0.0, epsilon = 1e-14);
        assert!(matches!(
            log_derivative(&QuantumState::oscillator(1), c(0.0, 0.0), 0.0),
            Err(Error::PoleEncountered { .. })
        ));
    }

    #[test]
    fn velocity_examples() {
        let v = velocity(&QuantumState::oscillator(0), c(1.0, 0.0), 0.0).unwrap();
        assert_relative_eq!(v.im, 1.0, epsilon = 1e-15);
        let v = velocity(&QuantumState::oscillator(1), c(0.0, 1.0), 0.0).unwrap();
        assert_relative_eq!(v.re, -2.0, epsilon = 1e-14);
        let v = velocity(&QuantumState::oscillator(1), c(1.0, 0.0), 0.0).unwrap();
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn potential_examples() {
        let s = QuantumState::oscillator(3);
        assert_eq!(potential(&s, c(0.0, 1.0)), c(-0.5, 0.0));
        assert_eq!(potential(&s, c(1.0, 0.0)), c(0.5, 0.0));
        let f = QuantumState::free_particle(1.3).unwrap();
        assert_eq!(potential(&f, c(2.0, -7.0)), c(0.0, 0.0));
        let st = QuantumState::potential_step(1.0, 0.4).unwrap();
        assert_eq!(potential(&st, c(-1.0, 2.0)), c(0.0, 0.0));
        assert_eq!(potential(&st, c(1.0, 2.0)), c(0.4, 0.0));
    }

    #[test]
    fn node_lists() {
        let b = SearchBox::square(3.0);
        assert!(list_nodes(&QuantumState::oscillator(0), &b, 0.0).unwrap().is_empty());
        let n1 = list_nodes(&QuantumState::oscillator(1), &b, 0.0).unwrap();
        assert_eq!(n1.len(), 1);
        assert!(n1[0].re.abs() < 1e-15);
        let n2 = list_nodes(&QuantumState::oscillator(2), &b, 0.0).unwrap();
        assert_eq!(n2.len(), 2);
        assert_relative_eq!(n2[0].re, -0.5f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(n2[1].re, 0.5f64.sqrt(), epsilon = 1e-14);
        let packet = QuantumState::gaussian_packet(0.0, 1.0, 1.0).unwrap();
        assert!(list_nodes(&packet, &b, 0.0).unwrap().is_empty());
        assert!(matches!(list_nodes(&packet, &b, 0.5), Err(Error::UnsupportedState(_))));
    }

    #[test]
    fn nodes_are_real_symmetric_and_counted() {
        for n in 0..=10u32 {
            let s = QuantumState::oscillator(n);
            let nodes = list_nodes(&s, &SearchBox::square(6.0), 0.0).unwrap();
            assert_eq!(nodes.len(), n as usize, "n = {n}");
            for (a, b) in nodes.iter().zip(nodes.iter().rev()) {
                assert!(a.im == 0.0);
                assert_relative_eq!(a.re, -b.re, epsilon = 1e-12);
            }
            for p in &nodes {
                assert!(eval_psi(&s, p.z(), 0.0).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn stagnation_points_count() {
        for n in 0..=6u32 {
            let pts = list_stagnation_points(&QuantumState::oscillator(n)).unwrap();
            assert_eq!(pts.len(), n as usize + 1, "n = {n}");
            for p in pts {
                assert!(velocity(&QuantumState::oscillator(n), p.z(), 0.0).unwrap().norm() < 1e-10);
            }
        }
        let foci = list_stagnation_points(&QuantumState::oscillator(1)).unwrap();
        assert_relative_eq!(foci[0].re, -1.0, epsilon = 1e-14);
        assert_relative_eq!(foci[1].re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn step_matching_is_continuous() {
        for (e, v0) in [(1.0, 0.5), (0.5, 1.0), (2.0, -1.0)] {
            let s = QuantumState::potential_step(e, v0).unwrap();
            let eps = 1e-9;
            let left = eval_psi(&s, c(-eps, 0.0), 0.0);
            let right = eval_psi(&s, c(eps, 0.0), 0.0);
            assert!((left - right).norm() < 1e-7);
            let dl = log_derivative(&s, c(-eps, 0.0), 0.0).unwrap() * left;
            let dr = log_derivative(&s, c(eps, 0.0), 0.0).unwrap() * right;
            assert!((dl - dr).norm() < 1e-7);
        }
    }

    #[test]
    fn invalid_states_rejected() {
        assert!(QuantumState::gaussian_packet(0.0, 1.0, 0.0).is_err());
        assert!(QuantumState::potential_step(0.0, 1.0).is_err());
        assert!(QuantumState::free_particle(f64::NAN).is_err());
        assert!(ComplexPoint::new(f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn packet_velocity_at_center() {
        let s = QuantumState::gaussian_packet(0.3, 2.0, 0.7).unwrap();
        for t in [0.0, 0.4, 1.3] {
            let v = velocity(&s, c(0.3 + 2.0 * t, 0.0), t).unwrap();
            assert_relative_eq!(v.re, 2.0, epsilon = 1e-15);
            assert_relative_eq!(v.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn parse_states_and_points() {
        assert_eq!("sho:3".parse::<QuantumState>().unwrap(), QuantumState::oscillator(3));
        assert_eq!("packet:0,2,0.8".parse::<QuantumState>().unwrap(), QuantumState::gaussian_packet(0.0, 2.0, 0.8).unwrap());
        assert_eq!("step:1,2".parse::<QuantumState>().unwrap().to_string(), "step:1,2");
        assert!("sho:-1".parse::<QuantumState>().is_err());
        assert!("packet:0,1,0".parse::<QuantumState>().is_err());
        assert!("well:1".parse::<QuantumState>().is_err());
        let p = |s: &str| s.parse::<ComplexPoint>().unwrap();
        assert_eq!(p("1+0i"), ComplexPoint { re: 1.0, im: 0.0 });
        assert_eq!(p("0.5-1.25i"), ComplexPoint { re: 0.5, im: -1.25 });
        assert_eq!(p("-1e-3+2e-1i"), ComplexPoint { re: -1e-3, im: 0.2 });
        assert_eq!(p("1.5"), ComplexPoint { re: 1.5, im: 0.0 });
        assert_eq!(p("-2i"), ComplexPoint { re: 0.0, im: -2.0 });
        assert_eq!(p("i"), ComplexPoint { re: 0.0, im: 1.0 });
        assert_eq!(p(&p("3-4i").to_string()), p("3-4i"));
        assert!("1+xi".parse::<ComplexPoint>().is_err());
        assert!("nan".parse::<ComplexPoint>().is_err());
    }
}
