//! Entropy over a three-axis parameter grid.
//!
//! Rows are produced in row-major order (first axis slowest) whatever the
//! number of worker threads.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::entanglement::{entropy, lambda_pm};
use crate::error::{Error, Result};
use crate::qubit::{channel_phase_pair, ControlledPair};
use crate::scattering::{rt_channel, ChannelSMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceMode {
    /// Axes `(|t_A|^2, |t_B|^2, phi)`; `phi` multiplies Bob's transmission.
    ChannelPhase,
    /// Axes `(k_A l, k_B l, phi)` for two star graphs; `phi` sits on Bob's stub.
    EdgePhase,
}

impl SurfaceMode {
    pub fn name(&self) -> &'static str {
        match self {
            SurfaceMode::ChannelPhase => "channel-phase",
            SurfaceMode::EdgePhase => "edge-phase",
        }
    }

    pub fn axis_names(&self) -> [&'static str; 3] {
        match self {
            SurfaceMode::ChannelPhase => ["t_a2", "t_b2", "phi"],
            SurfaceMode::EdgePhase => ["ka_l", "kb_l", "phi"],
        }
    }

    pub fn axis_index(&self, name: &str) -> Option<usize> {
        self.axis_names().iter().position(|&n| n == name)
    }
}

impl fmt::Display for SurfaceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SurfaceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "channel-phase" => Ok(SurfaceMode::ChannelPhase),
            "edge-phase" => Ok(SurfaceMode::EdgePhase),
            other => Err(Error::InvalidGrid(format!("unknown mode {other:?}"))),
        }
    }
}

/// `steps` evenly spaced values from `min` to `max` inclusive; a single
/// step yields just `min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, steps: usize) -> Self {
        Axis { min, max, steps }
    }

    pub fn fixed(value: f64) -> Self {
        Axis {
            min: value,
            max: value,
            steps: 1,
        }
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.steps <= 1 || i == 0 {
            self.min
        } else if i == self.steps - 1 {
            self.max
        } else {
            self.min + (self.max - self.min) * (i as f64 / (self.steps - 1) as f64)
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.value(i)).collect()
    }

    fn check(&self, name: &str) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidGrid(format!("axis {name} has no steps")));
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::InvalidGrid(format!("axis {name} has non-finite bounds")));
        }
        if self.min > self.max {
            return Err(Error::InvalidGrid(format!(
                "axis {name}: min {} exceeds max {}",
                self.min, self.max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub mode: SurfaceMode,
    pub axes: [Axis; 3],
}

impl GridSpec {
    pub fn new(mode: SurfaceMode, axes: [Axis; 3]) -> Self {
        GridSpec { mode, axes }
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.steps).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        for (axis, name) in self.axes.iter().zip(self.mode.axis_names()) {
            axis.check(name)?;
        }
        if self.mode == SurfaceMode::ChannelPhase {
            for axis in &self.axes[..2] {
                if axis.min < 0.0 || axis.max > 1.0 {
                    return Err(Error::InvalidGrid(
                        "transmission probabilities must lie in [0, 1]".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Axis values of the `i`-th point in row-major order.
    pub fn point(&self, i: usize) -> [f64; 3] {
        let n1 = self.axes[1].steps;
        let n2 = self.axes[2].steps;
        [
            self.axes[0].value(i / (n1 * n2)),
            self.axes[1].value((i / n2) % n1),
            self.axes[2].value(i % n2),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceRow {
    pub params: [f64; 3],
    pub lambda_plus: f64,
    pub entropy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Surface {
    pub grid: GridSpec,
    pub rows: Vec<SurfaceRow>,
}

/// Channel with transmission probability `p`: `r = sqrt(1-p)`, `t = i sqrt(p)`.
pub fn channel_from_probability(p: f64) -> ChannelSMatrix {
    let p = p.clamp(0.0, 1.0);
    ChannelSMatrix {
        r: Complex64::new((1.0 - p).sqrt(), 0.0),
        t: Complex64::new(0.0, p.sqrt()),
        k: None,
    }
}

/// The controlled pair behind one grid point.
pub fn pair_at(mode: SurfaceMode, params: [f64; 3]) -> ControlledPair {
    let [u, v, phi] = params;
    match mode {
        SurfaceMode::ChannelPhase => {
            channel_phase_pair(channel_from_probability(u), channel_from_probability(v), phi)
        }
        SurfaceMode::EdgePhase => {
            ControlledPair::new(rt_channel(u), rt_channel(v), rt_channel(v + phi))
        }
    }
}

pub fn entropy_at(mode: SurfaceMode, params: [f64; 3]) -> Result<SurfaceRow> {
    let lambdas = lambda_pm(&pair_at(mode, params))?;
    Ok(SurfaceRow {
        params,
        lambda_plus: lambdas.0,
        entropy: entropy(lambdas),
    })
}

/// Entropy at every grid point. Runs on the current rayon pool.
pub fn entropy_surface(grid: &GridSpec) -> Result<Surface> {
    grid.validate()?;
    let rows = (0..grid.len())
        .into_par_iter()
        .map(|i| entropy_at(grid.mode, grid.point(i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Surface { grid: *grid, rows })
}
