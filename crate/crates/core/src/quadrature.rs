//! Fixed-order Gauss–Legendre rules and trajectory time integrals.

use num_complex::Complex64;

use crate::error::Result;
use crate::trajectory::Trajectory;

/// 8-point Gauss–Legendre abscissae on [-1, 1] (positive half).
const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL8_W: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// `∫_a^b f` with one 8-point Gauss–Legendre panel.
pub fn gauss_legendre<F>(a: f64, b: f64, mut f: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for (x, w) in GL8_X.iter().zip(GL8_W) {
        sum += w * (f(mid - half * x)? + f(mid + half * x)?);
    }
    Ok(sum * half)
}

/// `∫_a^b f` split into panels no wider than `max_panel`.
pub fn gauss_legendre_panels<F>(a: f64, b: f64, max_panel: f64, mut f: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let panels = ((b - a).abs() / max_panel).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for k in 0..panels {
        let lo = a + k as f64 * h;
        sum += gauss_legendre(lo, lo + h, &mut f)?;
    }
    Ok(sum)
}

/// Trapezoid rule on a (possibly non-uniform) ascending grid.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1])).sum()
}

/// `∫ rate(t, x(t)) dt` between two times of the same trajectory, using the
/// dense output between consecutive samples.
pub fn time_integral<F>(traj: &Trajectory, ta: f64, tb: f64, mut rate: F) -> Result<f64>
where
    F: FnMut(f64, Complex64) -> Result<f64>,
{
    if ta == tb {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if (tb - ta) * traj.direction() > 0.0 { (ta, tb, 1.0) } else { (tb, ta, -1.0) };
    // Panel boundaries: the sample times strictly between lo and hi.
    let dir = traj.direction();
    let mut cuts: Vec<f64> = vec![lo];
    cuts.extend(traj.samples.iter().map(|s| s.t).filter(|&t| dir * t > dir * lo && dir * t < dir * hi));
    cuts.push(hi);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += gauss_legendre(w[0], w[1], |t| {
            let x = traj.position_at(t).expect("time inside trajectory span");
            rate(t, x)
        })?;
    }
    Ok(sign * total)
}

/// Cumulative `∫_{t_0}^{t_k} rate dt` at every sample of the trajectory.
pub fn cumulative_time_integral<F>(traj: &Trajectory, mut rate: F) -> Result<Vec<f64>>
where
    F: FnMut(f64, Complex64) -> Result<f64>,
{
    let mut out = Vec::with_capacity(traj.samples.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in traj.samples.windows(2) {
        acc += gauss_legendre(w[0].t, w[1].t, |t| {
            let x = traj.position_at(t).expect("time inside trajectory span");
            rate(t, x)
        })?;
        out.push(acc);
    }
    Ok(out)
}
