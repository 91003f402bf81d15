//! CSV and JSON serialization of trajectories, density fields, Born profiles
//! and continuity reports.
//!
//! Floats in CSV files are written with 17 significant digits in scientific
//! notation, so identical inputs give byte-identical files and values round-trip
//! exactly.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::continuity::ResidualReport;
use crate::grid::GridSpec;
use crate::probability::{BornProfile, DensityField};
use crate::trajectory::{Crossing, Trajectory};
use crate::wavefunction::{ComplexPoint, QuantumState};

pub const TRAJECTORY_HEADER: &str = "t,x_re,x_im,v_re,v_im";
pub const DENSITY_HEADER: &str = "x_re,x_im,rho,label";
pub const BORN_HEADER: &str = "x_r,P";

/// Fixed 17-significant-digit formatting.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(traj.samples.len() * 120);
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for s in &traj.samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(s.t),
            fmt_f64(s.x.re),
            fmt_f64(s.x.im),
            fmt_f64(s.v.re),
            fmt_f64(s.v.im)
        );
    }
    out
}

#[derive(Debug, Serialize)]
struct WindingEntry {
    node: ComplexPoint,
    turns: i32,
}

#[derive(Debug, Serialize)]
struct TrajectoryMeta<'a> {
    state: &'a QuantumState,
    state_label: String,
    seed: ComplexPoint,
    t_start: f64,
    t_end: f64,
    rel_tol: f64,
    samples: usize,
    closed: bool,
    period: Option<f64>,
    stagnant: bool,
    ends_at_pole: bool,
    crossings: &'a [Crossing],
    winding: Vec<WindingEntry>,
}

/// JSON sidecar for a trajectory CSV. `extra` entries are merged in at top level.
pub fn trajectory_metadata(traj: &Trajectory, extra: &[(&str, Value)]) -> Value {
    let meta = TrajectoryMeta {
        state: &traj.state,
        state_label: traj.state.to_string(),
        seed: traj.start().x.into(),
        t_start: traj.start().t,
        t_end: traj.end().t,
        rel_tol: traj.rel_tol,
        samples: traj.samples.len(),
        closed: traj.closed,
        period: traj.period,
        stagnant: traj.stagnant,
        ends_at_pole: traj.ends_at_pole,
        crossings: &traj.crossings,
        winding: traj.winding.iter().map(|&(node, turns)| WindingEntry { node, turns }).collect(),
    };
    let mut value = serde_json::to_value(meta).expect("trajectory metadata is serializable");
    merge(&mut value, extra);
    value
}

pub fn density_csv(field: &DensityField) -> String {
    let mut out = String::with_capacity(field.values.len() * 80);
    out.push_str(DENSITY_HEADER);
    out.push('\n');
    for (idx, (&rho, label)) in field.values.iter().zip(&field.labels).enumerate() {
        let z = field.grid.center(idx);
        let _ = writeln!(out, "{},{},{},{}", fmt_f64(z.re), fmt_f64(z.im), fmt_f64(rho), label.as_str());
    }
    out
}

fn grid_value(grid: &GridSpec) -> Value {
    json!({
        "spec": grid.to_string(),
        "re": { "min": grid.re.min, "max": grid.re.max, "cells": grid.re.cells },
        "im": { "min": grid.im.min, "max": grid.im.max, "cells": grid.im.cells },
        "order": "row-major, imaginary index outermost",
    })
}

/// JSON header for a density CSV.
pub fn density_header(field: &DensityField, extra: &[(&str, Value)]) -> Value {
    let mut value = json!({
        "state": field.state,
        "state_label": field.state.to_string(),
        "grid": grid_value(&field.grid),
        "normalized": field.normalized,
        "normalization": field.normalization,
        "fraction_inside": field.fraction_inside,
        "cells": field.values.len(),
        "label_counts": {
            "conserved": count(field, crate::probability::RegionLabel::Conserved),
            "alt": count(field, crate::probability::RegionLabel::Alt),
            "excluded": count(field, crate::probability::RegionLabel::Excluded),
        },
    });
    merge(&mut value, extra);
    value
}

fn count(field: &DensityField, label: crate::probability::RegionLabel) -> usize {
    field.labels.iter().filter(|&&l| l == label).count()
}

/// Born profile CSV. With `reference`, a third column `psi2` holds `|Ψ(x_r)|²`.
pub fn born_csv(profile: &BornProfile, reference: Option<&[f64]>) -> String {
    let mut out = String::with_capacity(profile.x.len() * 60);
    out.push_str(BORN_HEADER);
    if reference.is_some() {
        out.push_str(",psi2");
    }
    out.push('\n');
    for (k, (&x, &p)) in profile.x.iter().zip(&profile.p).enumerate() {
        let _ = write!(out, "{},{}", fmt_f64(x), fmt_f64(p));
        if let Some(r) = reference {
            let _ = write!(out, ",{}", fmt_f64(r[k]));
        }
        out.push('\n');
    }
    out
}

pub fn residual_json(report: &ResidualReport) -> Value {
    serde_json::to_value(report).expect("residual report is serializable")
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON value is serializable");
    s.push('\n');
    s
}

fn merge(value: &mut Value, extra: &[(&str, Value)]) {
    if let Value::Object(map) = value {
        for (k, v) in extra {
            map.insert((*k).to_string(), v.clone());
        }
    }
}

/// Parses a trajectory CSV back into `(t, x, v)` rows.
pub fn parse_trajectory_csv(text: &str) -> Result<Vec<[f64; 5]>, crate::Error> {
    let mut lines = text.lines();
    if lines.next() != Some(TRAJECTORY_HEADER) {
        return Err(crate::Error::InvalidArgument("missing trajectory CSV header".into()));
    }
    lines
        .map(|line| {
            let cols: Vec<f64> = line
                .split(',')
                .map(|c| c.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| crate::Error::InvalidArgument(format!("bad CSV row '{line}': {e}")))?;
            <[f64; 5]>::try_from(cols)
                .map_err(|_| crate::Error::InvalidArgument(format!("expected 5 columns in '{line}'")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probability::{born_density, density_field, normalize_and_fraction, DensityOptions, NodeExclusion};
    use crate::trajectory::cassinian_orbit;

    #[test]
    fn trajectory_csv_round_trips() {
        let traj = cassinian_orbit(0.5, 1e-9).unwrap();
        let csv = trajectory_csv(&traj);
        let rows = parse_trajectory_csv(&csv).unwrap();
        assert_eq!(rows.len(), traj.samples.len());
        for (row, s) in rows.iter().zip(&traj.samples) {
            assert_eq!(*row, [s.t, s.x.re, s.x.im, s.v.re, s.v.im]);
        }
        let meta = trajectory_metadata(&traj, &[("b", json!(0.5))]);
        assert_eq!(meta["closed"], json!(true));
        assert_eq!(meta["b"], json!(0.5));
        assert_eq!(meta["state"]["kind"]["kind"], json!("oscillator"));
    }

    #[test]
    fn density_csv_layout() {
        let g: GridSpec = "-3:3:12,-3:3:10".parse().unwrap();
        let mut f = density_field(&QuantumState::oscillator(0), &g, &DensityOptions::default()).unwrap();
        normalize_and_fraction(&mut f).unwrap();
        let csv = density_csv(&f);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(DENSITY_HEADER));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first[0].parse::<f64>().unwrap(), -2.75);
        assert_eq!(first[1].parse::<f64>().unwrap(), -2.7);
        assert_eq!(first[3], "conserved");
        assert_eq!(csv.lines().count(), 121);
        let head = density_header(&f, &[]);
        assert_eq!(head["fraction_inside"], json!(0.0));
        assert_eq!(head["grid"]["spec"], json!("-3:3:12,-3:3:10"));
    }

    #[test]
    fn born_csv_columns() {
        let grid = [-1.0, 0.5, 2.0];
        let p = born_density(&QuantumState::oscillator(0), &grid, NodeExclusion::Reject).unwrap();
        let csv = born_csv(&p, Some(&[1.0, 2.0, 3.0]));
        assert!(csv.starts_with("x_r,P,psi2\n"));
        assert_eq!(csv.lines().count(), 4);
        assert!(born_csv(&p, None).starts_with("x_r,P\n-1.0000000000000000e0,"));
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
