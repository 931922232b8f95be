//! Shared point-process sample type: a finite multiset of labeled complex
//! points, either perturbed-Toeplitz eigenvalue outliers or field zeros.

use crate::C64;
use serde::{Deserialize, Serialize};

/// Where a sample's points came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointProvenance {
    Eigen,
    FieldZero,
}

/// One point with its region label and multiplicity.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LabeledPoint {
    pub re: f64,
    pub im: f64,
    /// Winding index of the region the point sits in; `None` when the
    /// point was within the curve tolerance and could not be classified.
    pub wind_index: Option<i64>,
    pub multiplicity: usize,
}

impl LabeledPoint {
    pub fn z(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}

/// A finite multiset of labeled points from one trial.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointProcessSample {
    pub provenance: PointProvenance,
    /// Seed of the noise realization that produced this sample.
    pub seed: u64,
    pub points: Vec<LabeledPoint>,
}

impl PointProcessSample {
    /// Number of points (with multiplicity) inside the closed disk.
    pub fn count_in_disk(&self, center: C64, radius: f64) -> usize {
        self.points
            .iter()
            .filter(|p| (p.z() - center).norm() <= radius)
            .map(|p| p.multiplicity)
            .sum()
    }

    /// Number of points (with multiplicity) inside the axis-aligned
    /// rectangle `[re0, re1] × [im0, im1]`.
    pub fn count_in_rect(&self, re0: f64, re1: f64, im0: f64, im1: f64) -> usize {
        self.points
            .iter()
            .filter(|p| p.re >= re0 && p.re <= re1 && p.im >= im0 && p.im <= im1)
            .map(|p| p.multiplicity)
            .sum()
    }
}
