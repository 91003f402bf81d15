//! Probability constructions built from the velocity field.
//!
//! * Born density on the real axis from `P = 𝒩 exp(-2∫ Im(v) dx_r)`.
//! * The conserved extended density, transported along trajectories with rate
//!   `-4 Im(½v² + V)`.
//! * The non-conserved alternative with rate `-4 Im(½v²)`, which reproduces the
//!   continued `|Ψ(x)|²`.
//!
//! Regions of the complex plane are labelled by whether the trajectory through
//! them winds around a node of Ψ; the combined field uses the conserved density
//! on winding orbits and the alternative inside node-free lobes.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::quadrature::{cumulative_time_integral, gauss_legendre_panels, time_integral};
use crate::trajectory::{cassinian_invariant, integrate, IntegrateOptions, Trajectory};
use crate::wavefunction::{
    eval_psi, list_nodes, list_stagnation_points, log_derivative, potential, velocity, velocity_prime, ComplexPoint,
    QuantumState, SearchBox, StateKind,
};

/// Half-width of the interval around each real node that Born grids must avoid.
pub const NODE_EXCLUSION: f64 = 1e-4;
/// Cells closer than this to a node or stagnation point are labelled `Excluded`.
pub const GUARD_RADIUS: f64 = 1e-6;
/// Cells with `|b - 1|` below this are treated as lying on the lemniscate.
pub const BOUNDARY_EPS: f64 = 1e-9;
/// Minimum number of grid rows across the lemniscate height.
pub const MIN_CELLS_ACROSS_LEMNISCATE: usize = 50;
/// Separatrix width of the first excited state as quoted in the literature.
pub const REFERENCE_LEMNISCATE_WIDTH: f64 = 0.4858;
/// Offset above a node used to seed separatrix-hugging orbits.
pub const SEPARATRIX_PROBE_OFFSET: f64 = 1e-6;
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
pub const HBAR: f64 = 1.054_571_8e-34;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Position,
    Momentum,
    Energy,
}

/// Local value of an observable in the trajectory picture at a real point.
/// Energy is the Hamilton–Jacobi energy `½v² + V - (i/2) v'`.
fn local_observable(state: &QuantumState, obs: Observable, x: f64, t: f64) -> Result<Complex64> {
    let z = Complex64::new(x, 0.0);
    Ok(match obs {
        Observable::Position => z,
        Observable::Momentum => velocity(state, z, t)?,
        Observable::Energy => {
            let v = velocity(state, z, t)?;
            let dv = velocity_prime(state, z, t)?;
            0.5 * v * v + potential(state, z) - Complex64::new(0.0, 0.5) * dv
        }
    })
}

/// Real-axis window `(centre, half_width, step)` that carries all of `|Ψ|²`.
fn real_window(state: &QuantumState, t: f64) -> Result<(f64, f64, f64)> {
    match state.kind {
        StateKind::Oscillator { n } => Ok((0.0, (2.0 * n as f64 + 1.0).sqrt() + 10.0, 0.005)),
        StateKind::GaussianPacket { x0, k0, sigma0 } => {
            let sigma_t = sigma0 * (1.0 + t * t / (4.0 * sigma0.powi(4))).sqrt();
            Ok((x0 + k0 * t, 12.0 * sigma_t + 2.0, sigma_t / 200.0))
        }
        _ => Err(Error::NotNormalizable(state.to_string())),
    }
}

/// `⟨O⟩ = ∫ O |Ψ|² dx` along the real axis, with `O` taken from the trajectory
/// formulation (momentum `m ẋ`, energy from the Hamilton–Jacobi equation).
pub fn expectation(state: &QuantumState, obs: Observable, t: f64) -> Result<f64> {
    let state = QuantumState { normalized: true, ..*state };
    let (centre, half, h) = real_window(&state, t)?;
    let count = (2.0 * half / h).round() as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    // Midpoint rule: spectrally accurate for smooth, rapidly decaying integrands.
    for k in 0..count {
        let x = centre - half + (k as f64 + 0.5) * h;
        let rho = eval_psi(&state, Complex64::new(x, 0.0), t).norm_sqr();
        match local_observable(&state, obs, x, t) {
            Ok(o) => acc += o * rho,
            // O|Ψ|² → 0 at a node for all three observables
            Err(Error::PoleEncountered { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    acc *= h;
    if acc.im.abs() >= 1e-8 {
        return Err(Error::InvalidArgument(format!("expectation has imaginary part {:e}", acc.im)));
    }
    Ok(acc.re)
}

/// What to do with Born grid points that fall inside a node-exclusion interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeExclusion {
    Reject,
    Drop,
}

/// Born density reconstructed from the velocity field on a real grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BornProfile {
    pub state: QuantumState,
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    /// `𝒩` in `P = 𝒩 exp(-2∫ Im v dx_r)`, with the integral anchored at `x[0]`.
    pub normalization: f64,
    #[serde(skip)]
    log_p: Vec<f64>,
    #[serde(skip)]
    log_scale: f64,
    #[serde(skip)]
    nodes: Vec<f64>,
}

/// `Im v + Σ 1/(x - a_j)`: the node singularities of `Im v` removed.
fn smooth_part(state: &QuantumState, nodes: &[f64], x: f64) -> Result<f64> {
    let l = log_derivative(state, Complex64::new(x, 0.0), 0.0).map_err(|_| Error::PoleOnPath { x })?;
    let im_v = -l.re;
    Ok(im_v + nodes.iter().map(|a| 1.0 / (x - a)).sum::<f64>())
}

fn node_log_terms(nodes: &[f64], x: f64) -> f64 {
    nodes.iter().map(|a| (x - a).abs().ln()).sum()
}

fn require_stationary_normalizable(state: &QuantumState) -> Result<u32> {
    match state.kind {
        StateKind::Oscillator { n } => Ok(n),
        StateKind::GaussianPacket { .. } => Err(Error::UnsupportedState(format!("{state} is not stationary"))),
        _ => Err(Error::NotNormalizable(state.to_string())),
    }
}

/// Exponentiated line integral of `Im v` along the real axis, normalized to
/// unit trapezoid integral over the grid.
///
/// The `ln|x - a|` part of the integral at each node `a` is integrated in closed
/// form, so grids may straddle nodes; points within [`NODE_EXCLUSION`] of a node
/// are rejected or dropped according to `exclusion`.
pub fn born_density(state: &QuantumState, grid: &[f64], exclusion: NodeExclusion) -> Result<BornProfile> {
    require_stationary_normalizable(state)?;
    if grid.len() < 2 || grid.windows(2).any(|w| w[1] <= w[0]) || grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("Born grid must be finite, ascending, with at least two points".into()));
    }
    let state = QuantumState { normalized: true, ..*state };
    let lo = grid[0] - 1.0;
    let hi = grid[grid.len() - 1] + 1.0;
    let nodes: Vec<f64> = list_nodes(&state, &SearchBox { re_min: lo, re_max: hi, im_min: 0.0, im_max: 0.0 }, 0.0)?
        .into_iter()
        .map(|p| p.re)
        .collect();
    let mut x = Vec::with_capacity(grid.len());
    for &g in grid {
        if nodes.iter().any(|a| (g - a).abs() < NODE_EXCLUSION) {
            match exclusion {
                NodeExclusion::Reject => return Err(Error::PoleOnPath { x: g }),
                NodeExclusion::Drop => continue,
            }
        }
        x.push(g);
    }
    if x.len() < 2 {
        return Err(Error::InvalidArgument("fewer than two Born grid points left after node exclusion".into()));
    }

    let mut log_p = Vec::with_capacity(x.len());
    let mut smooth_integral = 0.0;
    log_p.push(2.0 * node_log_terms(&nodes, x[0]));
    for w in x.windows(2) {
        smooth_integral += gauss_legendre_panels(w[0], w[1], 0.05, |s| smooth_part(&state, &nodes, s))?;
        log_p.push(-2.0 * smooth_integral + 2.0 * node_log_terms(&nodes, w[1]));
    }
    let anchor_log = log_p[0];
    let log_scale = log_p.iter().cloned().fold(f64::MIN, f64::max);
    let shifted: Vec<f64> = log_p.iter().map(|l| (l - log_scale).exp()).collect();
    let z = crate::quadrature::trapezoid(&x, &shifted);
    let p: Vec<f64> = shifted.iter().map(|s| s / z).collect();
    // P(x) = 𝒩 exp(-2∫_{x0}^{x} Im v) and P(x0) = exp(anchor - scale)/z.
    let normalization = (anchor_log - log_scale).exp() / z;
    let log_scale = log_scale + z.ln();
    Ok(BornProfile { state, x, p, normalization, log_p, log_scale, nodes })
}

impl BornProfile {
    /// Profile on a window wide enough that its unit normalization is the
    /// full-line normalization.
    pub fn reference(state: &QuantumState) -> Result<Self> {
        let n = require_stationary_normalizable(state)?;
        let half = (2.0 * n as f64 + 1.0).sqrt() + 8.0;
        let count = (2.0 * half / 0.005).round() as usize + 1;
        let h = 2.0 * half / (count - 1) as f64;
        // Shift off the symmetric lattice so no point lands on a node.
        let grid: Vec<f64> = (0..count).map(|k| -half + k as f64 * h + 0.37 * h).collect();
        born_density(state, &grid, NodeExclusion::Drop)
    }

    /// Born density at any real `x`, continuing the line integral from the
    /// nearest grid point.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::InvalidArgument("non-finite position".into()));
        }
        let k = match self.x.binary_search_by(|g| g.total_cmp(&x)) {
            Ok(k) => return Ok(self.p[k]),
            Err(k) => {
                if k == 0 {
                    0
                } else if k == self.x.len() || (x - self.x[k - 1]) < (self.x[k] - x) {
                    k - 1
                } else {
                    k
                }
            }
        };
        let xk = self.x[k];
        let smooth = gauss_legendre_panels(xk, x, 0.05, |s| smooth_part(&self.state, &self.nodes, s))?;
        let log_p = self.log_p[k] - 2.0 * smooth + 2.0 * (node_log_terms(&self.nodes, x) - node_log_terms(&self.nodes, xk));
        Ok((log_p - self.log_scale).exp())
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
}

/// Anchor value of an extended density at a time on a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchor {
    pub t: f64,
    pub rho: f64,
}

impl Anchor {
    /// First real-axis crossing of the trajectory, with the Born value there.
    pub fn first_crossing(traj: &Trajectory, born: &BornProfile) -> Result<Self> {
        let c = traj.crossings.first().ok_or(Error::NoCrossing)?;
        Ok(Self { t: c.t, rho: born.evaluate(c.x_r)? })
    }

    /// Crossing closest to `x_r`.
    pub fn crossing_near(traj: &Trajectory, born: &BornProfile, x_r: f64) -> Result<Self> {
        let c = traj
            .crossings
            .iter()
            .min_by(|a, b| (a.x_r - x_r).abs().total_cmp(&(b.x_r - x_r).abs()))
            .ok_or(Error::NoCrossing)?;
        Ok(Self { t: c.t, rho: born.evaluate(c.x_r)? })
    }
}

/// Rate of `ln ρ` for the conserved density: `-4 Im(½v² + V)`.
pub fn conserved_rate(state: &QuantumState, t: f64, x: Complex64) -> Result<f64> {
    let v = velocity(state, x, t)?;
    Ok(-4.0 * (0.5 * v * v + potential(state, x)).im)
}

/// Rate of `ln ρ′` for the alternative density: `-4 Im(½v²)`.
pub fn alt_rate(state: &QuantumState, t: f64, x: Complex64) -> Result<f64> {
    let v = velocity(state, x, t)?;
    Ok(-4.0 * (0.5 * v * v).im)
}

fn transported(traj: &Trajectory, anchor: Anchor, rate: impl Fn(f64, Complex64) -> Result<f64> + Copy) -> Result<Vec<f64>> {
    if !(anchor.rho > 0.0 && anchor.rho.is_finite()) {
        return Err(Error::InvalidArgument(format!("anchor density {} must be positive", anchor.rho)));
    }
    if traj.position_at(anchor.t).is_none() {
        return Err(Error::InvalidArgument("anchor time outside the trajectory".into()));
    }
    let cumulative = cumulative_time_integral(traj, rate)?;
    // ∫ from t_0 to the anchor
    let to_anchor = time_integral(traj, traj.start().t, anchor.t, rate)?;
    let ln_anchor = anchor.rho.ln();
    Ok(cumulative.iter().map(|f| (ln_anchor + f - to_anchor).exp()).collect())
}

/// Conserved extended density at every sample of `traj`.
pub fn rho_conserved(traj: &Trajectory, anchor: Anchor) -> Result<Vec<f64>> {
    let state = traj.state;
    transported(traj, anchor, move |t, x| conserved_rate(&state, t, x))
}

/// Alternative (non-conserved) density at every sample of `traj`.
pub fn rho_alt_along(traj: &Trajectory, anchor: Anchor) -> Result<Vec<f64>> {
    let state = traj.state;
    transported(traj, anchor, move |t, x| alt_rate(&state, t, x))
}

/// `|Ψ(x)|²` of the normalized, continued wavefunction.
pub fn rho_alt_direct(state: &QuantumState, x: Complex64) -> Result<f64> {
    require_stationary_normalizable(state)?;
    let state = QuantumState { normalized: true, ..*state };
    Ok(eval_psi(&state, x, 0.0).norm_sqr())
}

/// Alternative density at `x` by integrating `-4 Im(½v²)` along the trajectory
/// through `x` from its first real-axis crossing (anchored to Born there).
pub fn rho_alt_trajectory(state: &QuantumState, x: Complex64, born: &BornProfile, rel_tol: f64) -> Result<f64> {
    require_stationary_normalizable(state)?;
    let traj = integrate(state, x, 0.0, &IntegrateOptions::closure(rel_tol))?;
    let crossing = *traj.crossings.first().ok_or(Error::NoCrossing)?;
    let p = born.evaluate(crossing.x_r)?;
    let f = time_integral(&traj, traj.start().t, crossing.t, |t, z| alt_rate(state, t, z))?;
    Ok((p.ln() - f).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AltRoute {
    TrajectoryIntegral,
    Direct,
}

pub fn rho_alt(state: &QuantumState, x: Complex64, route: AltRoute, born: &BornProfile, rel_tol: f64) -> Result<f64> {
    match route {
        AltRoute::Direct => rho_alt_direct(state, x),
        AltRoute::TrajectoryIntegral => rho_alt_trajectory(state, x, born, rel_tol),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionLabel {
    /// The orbit winds around a node; the conserved density agrees with Born.
    Conserved,
    /// The orbit encloses no node; the alternative density is used.
    Alt,
    /// Too close to a node or stagnation point.
    Excluded,
}

impl RegionLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionLabel::Conserved => "conserved",
            RegionLabel::Alt => "alt",
            RegionLabel::Excluded => "excluded",
        }
    }
}

/// Nodes and stagnation points of an oscillator eigenstate.
struct SpecialPoints {
    nodes: Vec<ComplexPoint>,
    foci: Vec<ComplexPoint>,
}

impl SpecialPoints {
    fn of(state: &QuantumState) -> Result<Self> {
        let n = require_stationary_normalizable(state)?;
        let reach = (2.0 * n as f64 + 1.0).sqrt() + 4.0;
        Ok(Self { nodes: list_nodes(state, &SearchBox::square(reach), 0.0)?, foci: list_stagnation_points(state)? })
    }

    fn guarded(&self, x: Complex64) -> bool {
        self.nodes.iter().chain(&self.foci).any(|p| (x - p.z()).norm() < GUARD_RADIUS)
    }
}

/// Region label by integrating the closed orbit through `x` and counting its
/// turns around every node.
pub fn classify_region_by_winding(state: &QuantumState, x: Complex64, rel_tol: f64) -> Result<RegionLabel> {
    let special = SpecialPoints::of(state)?;
    classify_with(state, &special, x, rel_tol).map(|(label, _)| label)
}

fn classify_with(
    state: &QuantumState,
    special: &SpecialPoints,
    x: Complex64,
    rel_tol: f64,
) -> Result<(RegionLabel, Option<Trajectory>)> {
    if special.guarded(x) {
        return Ok((RegionLabel::Excluded, None));
    }
    let traj = integrate(state, x, 0.0, &IntegrateOptions::closure(rel_tol))?;
    if !traj.closed {
        return Err(Error::NotClosed);
    }
    let winding = crate::trajectory::winding_numbers(&traj, &special.nodes)?;
    let label = if winding.iter().any(|(_, w)| *w != 0) || special.nodes.is_empty() {
        RegionLabel::Conserved
    } else {
        RegionLabel::Alt
    };
    Ok((label, Some(traj)))
}

/// Region label of `x`. The first excited state uses the closed-form orbit
/// label `b = |1 - X²|` (`b < 1` lobes exclude the node); other eigenstates
/// fall back to [`classify_region_by_winding`].
pub fn classify_region(state: &QuantumState, x: Complex64, rel_tol: f64) -> Result<RegionLabel> {
    match state.kind {
        StateKind::Oscillator { n: 0 } => {
            let special = SpecialPoints::of(state)?;
            Ok(if special.guarded(x) { RegionLabel::Excluded } else { RegionLabel::Conserved })
        }
        StateKind::Oscillator { n: 1 } => {
            let special = SpecialPoints::of(state)?;
            Ok(first_excited_label(&special, x))
        }
        _ => classify_region_by_winding(state, x, rel_tol),
    }
}

fn first_excited_label(special: &SpecialPoints, x: Complex64) -> RegionLabel {
    if special.guarded(x) {
        RegionLabel::Excluded
    } else if cassinian_invariant(x) < 1.0 - BOUNDARY_EPS || (cassinian_invariant(x) - 1.0).abs() < BOUNDARY_EPS {
        RegionLabel::Alt
    } else {
        RegionLabel::Conserved
    }
}

/// Extended probability on a grid of cells over the complex plane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityField {
    pub state: QuantumState,
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub labels: Vec<RegionLabel>,
    /// Total probability before rescaling; 1 until normalized.
    pub normalization: f64,
    pub normalized: bool,
    pub fraction_inside: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityOptions {
    /// Integrator tolerance for per-cell orbits (eigenstates other than n = 1).
    pub rel_tol: f64,
}

impl Default for DensityOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-8 }
    }
}

/// Conserved density transported from the Born value at the real crossing
/// `x_c`: for stationary states it equals `P(x_c)|v(x_c)|² / |v(x)|²`.
fn conserved_from_crossing(state: &QuantumState, born: &BornProfile, x_c: f64, x: Complex64) -> Result<f64> {
    let vc = velocity(state, Complex64::new(x_c, 0.0), 0.0)?;
    let v = velocity(state, x, 0.0)?;
    Ok(born.evaluate(x_c)? * vc.norm_sqr() / v.norm_sqr())
}

fn cell_value(
    state: &QuantumState,
    n: u32,
    special: &SpecialPoints,
    born: &BornProfile,
    opts: &DensityOptions,
    z: Complex64,
) -> (RegionLabel, f64) {
    let computed: Result<(RegionLabel, f64)> = (|| {
        if n == 1 {
            let label = first_excited_label(special, z);
            return match label {
                RegionLabel::Excluded => Ok((label, 0.0)),
                RegionLabel::Alt => Ok((label, rho_alt_direct(state, z)?)),
                RegionLabel::Conserved => {
                    let x_c = (1.0 + cassinian_invariant(z)).sqrt();
                    Ok((label, conserved_from_crossing(state, born, x_c, z)?))
                }
            };
        }
        let (label, traj) = classify_with(state, special, z, opts.rel_tol)?;
        match (label, traj) {
            (RegionLabel::Alt, _) => Ok((label, rho_alt_direct(state, z)?)),
            (RegionLabel::Conserved, Some(traj)) => {
                let c = traj.crossings.first().ok_or(Error::NoCrossing)?;
                Ok((label, conserved_from_crossing(state, born, c.x_r, z)?))
            }
            _ => Ok((RegionLabel::Excluded, 0.0)),
        }
    })();
    computed.unwrap_or((RegionLabel::Excluded, 0.0))
}

/// Per-cell combined density (unnormalized).
///
/// Oscillator eigenstates with `n ≤ 4` only. Cells whose orbit cannot be
/// integrated (pole hits, open paths) are labelled `Excluded`.
pub fn density_field(state: &QuantumState, grid: &GridSpec, opts: &DensityOptions) -> Result<DensityField> {
    let n = require_stationary_normalizable(state)?;
    if n > 4 {
        return Err(Error::UnsupportedState(format!("{state}: density grids support n ≤ 4")));
    }
    let state = QuantumState { normalized: true, ..*state };
    if n >= 1 {
        let w = lemniscate_width(n)?;
        let rows = (0..grid.im.cells).filter(|&j| grid.im.center(j).abs() <= w).count();
        if rows < MIN_CELLS_ACROSS_LEMNISCATE {
            return Err(Error::GridTooCoarse { cells: rows, required: MIN_CELLS_ACROSS_LEMNISCATE });
        }
    }
    let special = SpecialPoints::of(&state)?;
    let born = BornProfile::reference(&state)?;
    let eval = |idx: usize| cell_value(&state, n, &special, &born, opts, grid.center(idx));

    #[cfg(feature = "parallel")]
    let cells: Vec<(RegionLabel, f64)> = {
        use rayon::prelude::*;
        (0..grid.len()).into_par_iter().map(eval).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let cells: Vec<(RegionLabel, f64)> = (0..grid.len()).map(eval).collect();

    let (labels, values) = cells.into_iter().unzip();
    Ok(DensityField {
        state,
        grid: *grid,
        values,
        labels,
        normalization: 1.0,
        normalized: false,
        fraction_inside: None,
    })
}

/// Normalizes the field to unit total (midpoint rule over cells, summed in
/// fixed cell order) and returns `(N, fraction of probability in Alt cells)`.
pub fn normalize_and_fraction(field: &mut DensityField) -> Result<(f64, f64)> {
    let mut total = 0.0;
    let mut inside = 0.0;
    for (cell, (&v, &label)) in field.values.iter().zip(&field.labels).enumerate() {
        if label == RegionLabel::Excluded {
            continue;
        }
        if !v.is_finite() || v < 0.0 {
            return Err(Error::NotFinite { cell });
        }
        total += v;
        if label == RegionLabel::Alt {
            inside += v;
        }
    }
    let norm = total * field.grid.cell_area();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::NotFinite { cell: 0 });
    }
    for v in &mut field.values {
        *v /= norm;
    }
    let fraction = inside / total;
    field.normalization *= norm;
    field.normalized = true;
    field.fraction_inside = Some(fraction);
    Ok((norm, fraction))
}

/// Fraction inside at `grid` and at the 2× refined grid.
pub fn fraction_with_refinement(state: &QuantumState, grid: &GridSpec, opts: &DensityOptions) -> Result<(f64, f64)> {
    let mut coarse = density_field(state, grid, opts)?;
    let mut fine = density_field(state, &grid.refined(), opts)?;
    Ok((normalize_and_fraction(&mut coarse)?.1, normalize_and_fraction(&mut fine)?.1))
}

/// Largest `Im X` reached by the separatrix of oscillator eigenstate `n`.
///
/// For `n = 1` this maximizes `Im X` on `|1 - X²| = 1` directly; for higher
/// states it follows the orbits seeded just above each node.
pub fn lemniscate_width(n: u32) -> Result<f64> {
    match n {
        0 => Err(Error::InvalidArgument("the ground state has no separatrix".into())),
        1 => Ok(lemniscate_width_closed_form()),
        _ => {
            let state = QuantumState::oscillator(n);
            let nodes = list_nodes(&state, &SearchBox::square((2.0 * n as f64 + 1.0).sqrt() + 4.0), 0.0)?;
            let mut best: Option<f64> = None;
            for node in nodes {
                let seed = node.z() + Complex64::new(0.0, SEPARATRIX_PROBE_OFFSET);
                let Ok(traj) = integrate(&state, seed, 0.0, &IntegrateOptions::closure(1e-10)) else {
                    continue;
                };
                let top = traj.samples.iter().map(|s| s.x.im).fold(f64::MIN, f64::max);
                best = Some(best.map_or(top, |b| b.max(top)));
            }
            best.ok_or(Error::NonConvergence { at: ComplexPoint { re: 0.0, im: 0.0 }, t: 0.0 })
        }
    }
}

/// Points of the right lemniscate lobe are `X = √(1 - e^{iφ})`.
fn lemniscate_height(phi: f64) -> f64 {
    (1.0 - Complex64::from_polar(1.0, phi)).sqrt().im
}

fn lemniscate_width_closed_form() -> f64 {
    // coarse scan, then golden-section refinement around the best bracket
    let samples = 2000;
    let (best, _) = (1..samples)
        .map(|k| {
            let phi = TAU * k as f64 / samples as f64;
            (phi, lemniscate_height(phi))
        })
        .fold((0.0, f64::MIN), |acc, p| if p.1 > acc.1 { p } else { acc });
    let step = TAU / samples as f64;
    let (mut a, mut b) = (best - step, best + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..200 {
        if lemniscate_height(c) > lemniscate_height(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
        if (b - a).abs() < 1e-14 {
            break;
        }
    }
    lemniscate_height(0.5 * (a + b))
}

/// Mass, angular frequency and ħ used to express dimensionless widths in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalScale {
    pub mass: f64,
    pub omega0: f64,
    pub hbar: f64,
}

impl PhysicalScale {
    pub fn new(mass: f64, omega0: f64) -> Result<Self> {
        Self::with_hbar(mass, omega0, HBAR)
    }

    pub fn with_hbar(mass: f64, omega0: f64, hbar: f64) -> Result<Self> {
        if !(mass > 0.0 && omega0 > 0.0 && hbar > 0.0) || !(mass.is_finite() && omega0.is_finite() && hbar.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "physical scale needs positive mass, frequency and ħ (got {mass}, {omega0}, {hbar})"
            )));
        }
        Ok(Self { mass, omega0, hbar })
    }

    pub fn electron(omega0: f64) -> Result<Self> {
        Self::new(ELECTRON_MASS, omega0)
    }

    /// Oscillator length `1/α = √(ħ/(mω))` in metres.
    pub fn length(&self) -> f64 {
        (self.hbar / (self.mass * self.omega0)).sqrt()
    }
}

/// Physical size `X_i^max / α` in metres.
pub fn classical_width(scale: &PhysicalScale, xi_max: f64) -> f64 {
    xi_max * scale.length()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{E, PI};

    #[test]
    fn born_ratios() {
        let grid: Vec<f64> = (0..=400).map(|k| -4.0 + 0.02 * k as f64).collect();
        let p1 = born_density(&QuantumState::oscillator(1), &grid, NodeExclusion::Drop).unwrap();
        let at = |p: &BornProfile, x: f64| p.evaluate(x).unwrap();
        assert_relative_eq!(at(&p1, 1.0) / at(&p1, 2.0), E.powi(3) / 4.0, max_relative = 1e-10);
        let p0 = born_density(&QuantumState::oscillator(0), &grid, NodeExclusion::Reject).unwrap();
        assert_relative_eq!(at(&p0, 0.0) / at(&p0, 1.0), E, max_relative = 1e-10);
        let total = crate::quadrature::trapezoid(&p0.x, &p0.p);
        assert_relative_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn born_rejects_grid_on_node() {
        let grid = [-1.0, 0.0, 1.0];
        assert_eq!(
            born_density(&QuantumState::oscillator(1), &grid, NodeExclusion::Reject),
            Err(Error::PoleOnPath { x: 0.0 })
        );
        assert!(matches!(
            born_density(&QuantumState::free_particle(1.0).unwrap(), &grid, NodeExclusion::Drop),
            Err(Error::NotNormalizable(_))
        ));
    }

    #[test]
    fn born_normalization_constant() {
        let grid: Vec<f64> = (0..=1600).map(|k| -8.0 + 0.01 * k as f64).collect();
        let p = born_density(&QuantumState::oscillator(0), &grid, NodeExclusion::Reject).unwrap();
        // P(x) = 𝒩 exp(-2∫_{-8}^{x} x' dx') = 𝒩 e^{64} e^{-x²}
        assert_relative_eq!(p.normalization, (-64f64).exp() / PI.sqrt(), max_relative = 1e-9);
    }

    #[test]
    fn expectation_examples() {
        assert_relative_eq!(expectation(&QuantumState::oscillator(2), Observable::Energy, 0.0).unwrap(), 2.5, epsilon = 1e-8);
        assert!(expectation(&QuantumState::oscillator(1), Observable::Position, 0.0).unwrap().abs() < 1e-10);
        let packet = QuantumState::gaussian_packet(0.0, 2.0, 0.8).unwrap();
        assert_relative_eq!(expectation(&packet, Observable::Momentum, 0.0).unwrap(), 2.0, epsilon = 1e-8);
        assert!(matches!(
            expectation(&QuantumState::free_particle(1.0).unwrap(), Observable::Energy, 0.0),
            Err(Error::NotNormalizable(_))
        ));
    }

    #[test]
    fn packet_energy_and_drift() {
        let (k0, s0) = (1.5, 0.7);
        let packet = QuantumState::gaussian_packet(-1.0, k0, s0).unwrap();
        for t in [0.0, 0.8] {
            let e = expectation(&packet, Observable::Energy, t).unwrap();
            assert_relative_eq!(e, 0.5 * k0 * k0 + 1.0 / (8.0 * s0 * s0), epsilon = 1e-8);
            let x = expectation(&packet, Observable::Position, t).unwrap();
            assert_relative_eq!(x, -1.0 + k0 * t, epsilon = 1e-8);
        }
    }

    #[test]
    fn alt_direct_ratio() {
        let s = QuantumState::oscillator(1);
        let r = rho_alt_direct(&s, Complex64::new(0.0, 1.0)).unwrap() / rho_alt_direct(&s, Complex64::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(r, E * E, max_relative = 1e-13);
    }

    #[test]
    fn alt_routes_agree() {
        let s = QuantumState::oscillator(1);
        let born = BornProfile::reference(&s).unwrap();
        let z = Complex64::new(0.9, 0.2);
        let a = rho_alt(&s, z, AltRoute::TrajectoryIntegral, &born, 1e-10).unwrap();
        let b = rho_alt(&s, z, AltRoute::Direct, &born, 1e-10).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-6);
    }

    #[test]
    fn alt_on_real_axis_is_born() {
        let s = QuantumState::oscillator(1);
        let born = BornProfile::reference(&s).unwrap();
        for x in [0.3, 1.1, -2.0] {
            assert_relative_eq!(rho_alt_direct(&s, Complex64::new(x, 0.0)).unwrap(), born.evaluate(x).unwrap(), max_relative = 1e-9);
        }
    }

    #[test]
    fn conserved_anchor_is_exact() {
        let traj = crate::trajectory::cassinian_orbit(2.0, 1e-10).unwrap();
        let anchor = Anchor { t: traj.start().t, rho: 0.123 };
        let rho = rho_conserved(&traj, anchor).unwrap();
        assert_relative_eq!(rho[0], 0.123, max_relative = 1e-14);
    }

    #[test]
    fn classification_examples() {
        let s1 = QuantumState::oscillator(1);
        assert_eq!(classify_region(&s1, Complex64::new(1.0, 0.1), 1e-9).unwrap(), RegionLabel::Alt);
        assert_eq!(classify_region(&s1, Complex64::new(0.0, 1.0), 1e-9).unwrap(), RegionLabel::Conserved);
        assert_eq!(classify_region(&QuantumState::oscillator(0), Complex64::new(1.0, 0.0), 1e-9).unwrap(), RegionLabel::Conserved);
        assert_eq!(classify_region(&s1, Complex64::new(1e-8, 0.0), 1e-9).unwrap(), RegionLabel::Excluded);
        // the winding route agrees with the closed-form label
        assert_eq!(classify_region_by_winding(&s1, Complex64::new(1.0, 0.1), 1e-9).unwrap(), RegionLabel::Alt);
        assert_eq!(classify_region_by_winding(&s1, Complex64::new(0.0, 1.0), 1e-9).unwrap(), RegionLabel::Conserved);
    }

    #[test]
    fn width_first_excited() {
        let w = lemniscate_width(1).unwrap();
        assert!((w - 0.5).abs() < 1e-4, "{w}");
        // reflection: the lower half reaches -w
        let low = (1..2000).map(|k| -lemniscate_height(TAU * k as f64 / 2000.0)).fold(f64::MAX, f64::min);
        assert!((low + w).abs() < 1e-5);
        assert!(lemniscate_width(0).is_err());
    }

    #[test]
    fn classical_widths() {
        let kg = PhysicalScale::new(1.0, 1.0).unwrap();
        let w = classical_width(&kg, REFERENCE_LEMNISCATE_WIDTH);
        assert!((w - 4.99e-18).abs() < 0.01e-18, "{w:e}");
        let e = PhysicalScale::electron(1.0).unwrap();
        assert!((classical_width(&e, 1.0) - 1.076e-2).abs() < 0.001e-2);
        assert_eq!(classical_width(&kg, 0.0), 0.0);
        assert!(PhysicalScale::new(1.0, 0.0).is_err());
        assert!(PhysicalScale::new(-1.0, 1.0).is_err());
    }

    #[test]
    fn density_rejects_coarse_grid() {
        let g: GridSpec = "-3:3:60,-1:1:20".parse().unwrap();
        assert!(matches!(
            density_field(&QuantumState::oscillator(1), &g, &DensityOptions::default()),
            Err(Error::GridTooCoarse { .. })
        ));
        assert!(matches!(
            density_field(&QuantumState::oscillator(5), &g, &DensityOptions::default()),
            Err(Error::UnsupportedState(_))
        ));
    }

    #[test]
    fn ground_state_field_has_no_inside() {
        let g: GridSpec = "-4:4:40,-4:4:40".parse().unwrap();
        let mut f = density_field(&QuantumState::oscillator(0), &g, &DensityOptions::default()).unwrap();
        let (_, frac) = normalize_and_fraction(&mut f).unwrap();
        assert_eq!(frac, 0.0);
        // ρ ∝ e^{-|X|²} for the ground state
        let mid = f.grid.center(20 * 40 + 20);
        let corner = f.grid.center(25 * 40 + 27);
        let ratio = f.values[25 * 40 + 27] / f.values[20 * 40 + 20];
        assert_relative_eq!(ratio, (mid.norm_sqr() - corner.norm_sqr()).exp(), max_relative = 1e-6);
    }
}
