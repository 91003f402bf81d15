//! Browser bindings: trace a trajectory from a clicked point, render the
//! extended density with its inside fraction, and plot the Born profile.
//!
//! The plain functions carry the logic (and are tested natively); the
//! `#[wasm_bindgen]` wrappers only convert errors for JavaScript.

use num_complex::Complex64;
use wasm_bindgen::prelude::*;

use qtraj_core::grid::{AxisSpec, GridSpec};
use qtraj_core::probability::{born_density, density_field, normalize_and_fraction, DensityOptions, NodeExclusion, RegionLabel};
use qtraj_core::trajectory::{integrate, IntegrateOptions};
use qtraj_core::wavefunction::eval_psi;
use qtraj_core::QuantumState;

/// Highest oscillator level the page offers for trajectories and Born profiles.
pub const MAX_LEVEL: u32 = 8;
/// Density maps need one orbit per cell above n = 1, which is too slow in a page.
pub const MAX_DENSITY_LEVEL: u32 = 1;

fn oscillator(n: u32, max: u32) -> Result<QuantumState, String> {
    if n > max {
        return Err(format!("level {n} is above the demo limit {max}"));
    }
    Ok(QuantumState::oscillator(n))
}

/// Closed orbit (or a `t_max` stretch of an open path) through `re + i·im`, as
/// interleaved `[x_re, x_im, ...]`.
pub fn trace(n: u32, re: f64, im: f64, t_max: f64) -> Result<Vec<f64>, String> {
    let state = oscillator(n, MAX_LEVEL)?;
    let seed = Complex64::new(re, im);
    let traj = integrate(&state, seed, 0.0, &IntegrateOptions::closure(1e-8))
        .or_else(|_| integrate(&state, seed, 0.0, &IntegrateOptions::until(t_max, 1e-8).stopping_at_pole()))
        .map_err(|e| e.to_string())?;
    let step = (traj.samples.len() / 4000).max(1);
    let mut out: Vec<f64> = traj.samples.iter().step_by(step).flat_map(|s| [s.x.re, s.x.im]).collect();
    let end = traj.end().x;
    out.extend([end.re, end.im]);
    Ok(out)
}

/// Normalized density on a `cells_re × cells_im` grid and the fraction of
/// probability in node-free lobes.
pub struct DensityMap {
    pub values: Vec<f64>,
    /// 0 = conserved, 1 = inside a lobe, 2 = excluded.
    pub labels: Vec<u8>,
    pub fraction_inside: f64,
}

pub fn density(n: u32, half_re: f64, half_im: f64, cells_re: usize, cells_im: usize) -> Result<DensityMap, String> {
    let state = oscillator(n, MAX_DENSITY_LEVEL)?;
    let grid = GridSpec::new(
        AxisSpec::new(-half_re, half_re, cells_re).map_err(|e| e.to_string())?,
        AxisSpec::new(-half_im, half_im, cells_im).map_err(|e| e.to_string())?,
    );
    let mut field = density_field(&state, &grid, &DensityOptions::default()).map_err(|e| e.to_string())?;
    let (_, fraction_inside) = normalize_and_fraction(&mut field).map_err(|e| e.to_string())?;
    let labels = field
        .labels
        .iter()
        .map(|l| match l {
            RegionLabel::Conserved => 0,
            RegionLabel::Alt => 1,
            RegionLabel::Excluded => 2,
        })
        .collect();
    Ok(DensityMap { values: field.values, labels, fraction_inside })
}

/// Born profile on `[-half, half]` as interleaved `[x, P, |Ψ|², ...]`.
pub fn born(n: u32, half: f64, points: usize) -> Result<Vec<f64>, String> {
    let state = oscillator(n, MAX_LEVEL)?;
    if points < 2 {
        return Err("need at least two points".into());
    }
    let grid = AxisSpec::new(-half, half, points - 1).map_err(|e| e.to_string())?.points();
    let profile = born_density(&state, &grid, NodeExclusion::Drop).map_err(|e| e.to_string())?;
    let psi2: Vec<f64> = profile.x.iter().map(|&x| eval_psi(&state, Complex64::new(x, 0.0), 0.0).norm_sqr()).collect();
    let z: f64 = profile.x.windows(2).zip(psi2.windows(2)).map(|(x, p)| 0.5 * (x[1] - x[0]) * (p[0] + p[1])).sum();
    Ok(profile.x.iter().zip(&profile.p).zip(&psi2).flat_map(|((x, p), q)| [*x, *p, q / z]).collect())
}

#[wasm_bindgen(js_name = traceTrajectory)]
pub fn trace_trajectory(n: u32, re: f64, im: f64, t_max: f64) -> Result<Vec<f64>, JsError> {
    trace(n, re, im, t_max).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub struct DensityView {
    inner: DensityMap,
}

#[wasm_bindgen]
impl DensityView {
    pub fn values(&self) -> Vec<f64> {
        self.inner.values.clone()
    }

    pub fn labels(&self) -> Vec<u8> {
        self.inner.labels.clone()
    }

    #[wasm_bindgen(getter, js_name = fractionInside)]
    pub fn fraction_inside(&self) -> f64 {
        self.inner.fraction_inside
    }
}

#[wasm_bindgen(js_name = densityMap)]
pub fn density_map(n: u32, half_re: f64, half_im: f64, cells_re: usize, cells_im: usize) -> Result<DensityView, JsError> {
    density(n, half_re, half_im, cells_re, cells_im).map(|inner| DensityView { inner }).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = bornProfile)]
pub fn born_profile(n: u32, half: f64, points: usize) -> Result<Vec<f64>, JsError> {
    born(n, half, points).map_err(|e| JsError::new(&e))
}
