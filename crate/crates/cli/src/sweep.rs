//! Angle sweeps over three equiprobable pure qubit states with Bloch vectors
//! `(1, 0, 0)`, `(cos φ₂, sin φ₂, 0)` and `(cos φ₃, sin φ₃, 0)`.

use std::io::Write;

use nestdisc::discrimination::{optimal_probability, SearchOptions};
use nestdisc::io::round12;
use nestdisc::WeightedEnsemble;

use crate::{CliError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub phi2: Vec<f64>,
    pub phi3_start: f64,
    pub phi3_stop: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn new(phi2: Vec<f64>, phi3_start: f64, phi3_stop: f64, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(CliError::Parse(format!(
                "steps must be at least 2, got {steps}"
            )));
        }
        if phi2.is_empty() {
            return Err(CliError::Parse("no phi2 values".into()));
        }
        if !phi2
            .iter()
            .chain([&phi3_start, &phi3_stop])
            .all(|x| x.is_finite())
        {
            return Err(CliError::Parse("angles must be finite".into()));
        }
        Ok(Self {
            phi2,
            phi3_start,
            phi3_stop,
            steps,
        })
    }

    /// Midpoints of `steps` equal cells of the `φ₃` range.
    pub fn phi3_grid(&self) -> Vec<f64> {
        let width = (self.phi3_stop - self.phi3_start) / self.steps as f64;
        (0..self.steps)
            .map(|i| self.phi3_start + width * (i as f64 + 0.5))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub phi2: f64,
    pub phi3: f64,
    pub probability: f64,
    pub method: String,
}

pub fn equatorial_triple(phi2: f64, phi3: f64) -> WeightedEnsemble {
    WeightedEnsemble::equiprobable_bloch(&[
        [1.0, 0.0, 0.0],
        [phi2.cos(), phi2.sin(), 0.0],
        [phi3.cos(), phi3.sin(), 0.0],
    ])
    .expect("unit Bloch vectors are valid states")
}

pub fn sweep_point(phi2: f64, phi3: f64, options: &SearchOptions) -> Result<SweepRow> {
    let result = optimal_probability(&equatorial_triple(phi2, phi3), options)?;
    Ok(SweepRow {
        phi2,
        phi3,
        probability: result.probability,
        method: result.method.to_string(),
    })
}

/// Rows in grid order: `φ₂` outer, `φ₃` inner.
pub fn run_sweep(spec: &SweepSpec, options: &SearchOptions) -> Result<Vec<SweepRow>> {
    let grid = spec.phi3_grid();
    let mut rows = Vec::with_capacity(spec.phi2.len() * grid.len());
    for &phi2 in &spec.phi2 {
        for &phi3 in &grid {
            rows.push(sweep_point(phi2, phi3, options)?);
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "phi2,phi3,probability,method")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            round12(r.phi2),
            round12(r.phi3),
            round12(r.probability),
            r.method
        )?;
    }
    out.flush()
}
