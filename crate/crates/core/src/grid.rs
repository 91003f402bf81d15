use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// One axis of a cell-centred grid: `cells` uniform cells over `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub cells: usize,
}

impl AxisSpec {
    pub fn new(min: f64, max: f64, cells: usize) -> Result<Self, Error> {
        if !(min.is_finite() && max.is_finite() && max > min && cells > 0) {
            return Err(Error::InvalidArgument(format!("bad axis {min}:{max}:{cells}")));
        }
        Ok(Self { min, max, cells })
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / self.cells as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.min + (i as f64 + 0.5) * self.step()
    }

    pub fn span(&self) -> f64 {
        self.max - self.min
    }

    /// Grid points including both ends (`cells` is then the point count).
    pub fn points(&self) -> Vec<f64> {
        if self.cells == 1 {
            return vec![self.min];
        }
        let h = self.span() / (self.cells - 1) as f64;
        (0..self.cells).map(|k| if k + 1 == self.cells { self.max } else { self.min + k as f64 * h }).collect()
    }
}

impl FromStr for AxisSpec {
    type Err = Error;

    /// `min:max:cells`
    fn from_str(s: &str) -> Result<Self, Error> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidArgument(format!("axis spec `{s}` is not min:max:cells"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let min = parts[0].trim().parse().map_err(|_| bad())?;
        let max = parts[1].trim().parse().map_err(|_| bad())?;
        let cells = parts[2].trim().parse().map_err(|_| bad())?;
        AxisSpec::new(min, max, cells)
    }
}

impl fmt::Display for AxisSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.cells)
    }
}

/// Rectangle `[re.min, re.max] × [im.min, im.max]` of uniform cells, stored
/// row-major with the imaginary index outermost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub re: AxisSpec,
    pub im: AxisSpec,
}

impl GridSpec {
    pub fn new(re: AxisSpec, im: AxisSpec) -> Self {
        Self { re, im }
    }

    pub fn len(&self) -> usize {
        self.re.cells * self.im.cells
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_area(&self) -> f64 {
        self.re.step() * self.im.step()
    }

    pub fn center(&self, index: usize) -> Complex64 {
        let (j, i) = (index / self.re.cells, index % self.re.cells);
        Complex64::new(self.re.center(i), self.im.center(j))
    }

    /// Same rectangle with twice the cells along each axis.
    pub fn refined(&self) -> Self {
        Self {
            re: AxisSpec { cells: 2 * self.re.cells, ..self.re },
            im: AxisSpec { cells: 2 * self.im.cells, ..self.im },
        }
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    /// `re_min:re_max:cells,im_min:im_max:cells`
    fn from_str(s: &str) -> Result<Self, Error> {
        let (re, im) = s
            .split_once(',')
            .ok_or_else(|| Error::InvalidArgument(format!("grid spec `{s}` needs two comma-separated axes")))?;
        Ok(Self { re: re.parse()?, im: im.parse()? })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.re, self.im)
    }
}
