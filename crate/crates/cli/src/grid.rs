//! Sweep grids: evenly spaced axes with inclusive endpoints.

use shapaudit_core::{Error, Result};

/// One sweep axis, parsed from `name=start:stop:count`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridAxis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn new(name: impl Into<String>, start: f64, stop: f64, count: usize) -> Result<GridAxis> {
        let name = name.into();
        if count < 2 {
            return Err(Error::invalid(format!(
                "axis {name}: need at least 2 grid points, got {count}"
            )));
        }
        if !(start.is_finite() && stop.is_finite()) {
            return Err(Error::invalid(format!(
                "axis {name}: bounds must be finite"
            )));
        }
        Ok(GridAxis {
            name,
            start,
            stop,
            count,
        })
    }

    /// Parse `name=start:stop:count`.
    pub fn parse(spec: &str) -> Result<GridAxis> {
        let (name, rest) = spec.split_once('=').ok_or_else(|| {
            Error::invalid(format!(
                "bad axis spec {spec:?}: expected name=start:stop:count"
            ))
        })?;
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::invalid(format!(
                "bad axis spec {spec:?}: expected name=start:stop:count"
            )));
        }
        let start: f64 = parts[0]
            .parse()
            .map_err(|_| Error::invalid(format!("axis {name}: bad start {:?}", parts[0])))?;
        let stop: f64 = parts[1]
            .parse()
            .map_err(|_| Error::invalid(format!("axis {name}: bad stop {:?}", parts[1])))?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| Error::invalid(format!("axis {name}: bad count {:?}", parts[2])))?;
        GridAxis::new(name, start, stop, count)
    }

    /// The `i`-th grid value, endpoints inclusive.
    pub fn value(&self, i: usize) -> f64 {
        debug_assert!(i < self.count);
        self.start + i as f64 * (self.stop - self.start) / (self.count - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }
}

/// A sweep: one or two axes, a per-cell sample count and a base seed from
/// which each cell derives its own seed.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub axes: Vec<GridAxis>,
    pub n: usize,
    pub base_seed: u64,
}

impl SweepConfig {
    /// Parse a comma-separated list of axis specs.
    pub fn parse_axes(spec: &str) -> Result<Vec<GridAxis>> {
        spec.split(',').map(GridAxis::parse).collect()
    }
}
