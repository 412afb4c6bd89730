//! Dimensionless coordinates.
//!
//! Peaks are scaled by the distance and the top-order peak so that
//! `x̂_0 = x̂_N = 1`:
//!
//! ```text
//! x̂_n = x_n * x_0^(n/N - 1) * x_N^(-n/N)
//! T̂   = T   * x_0^(-1/N)    * x_N^(1/N)
//! ```
//!
//! All powers go through `exp`/`ln`.

use crate::error::{check_positive, Error, Result};
use crate::kinematics::{check_order, PeakVector, Peaks};

/// Scaled peaks with unit distance and unit top order.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionlessPeaks(Vec<f64>);

impl DimensionlessPeaks {
    /// Builds from interior entries `ẑ_1..ẑ_{N-1}`; the ends are set to 1.
    pub fn from_interior(order: usize, interior: &[f64]) -> Result<Self> {
        check_order(order)?;
        if interior.len() != order - 1 {
            return Err(Error::LengthMismatch {
                what: "interior dimensionless peaks",
                expected: order - 1,
                got: interior.len(),
            });
        }
        let mut values = Vec::with_capacity(order + 1);
        values.push(1.0);
        values.extend_from_slice(interior);
        values.push(1.0);
        Self::new(values)
    }

    /// Full vector; the first and last entries must be exactly 1.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let peaks = PeakVector::new(values)?;
        let values = peaks.into_inner();
        if values[0] != 1.0 || values[values.len() - 1] != 1.0 {
            return Err(Error::Invalid(
                "dimensionless peaks must start and end with 1".into(),
            ));
        }
        Ok(Self(values))
    }

    pub(crate) fn from_raw(values: Vec<f64>) -> Self {
        debug_assert!(values[0] == 1.0 && values[values.len() - 1] == 1.0);
        Self(values)
    }

    pub fn get(&self, n: usize) -> f64 {
        self.0[n]
    }

    pub fn interior(&self) -> &[f64] {
        &self.0[1..self.0.len() - 1]
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Peaks for DimensionlessPeaks {
    fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Length and top-order scales of one problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scale {
    order: usize,
    ln_distance: f64,
    ln_top: f64,
}

impl Scale {
    pub fn new(distance: f64, top: f64, order: usize) -> Result<Self> {
        check_order(order)?;
        let distance = check_positive("distance", distance)?;
        let top = check_positive("top-order scale", top)?;
        Ok(Self {
            order,
            ln_distance: distance.ln(),
            ln_top: top.ln(),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn exponent(&self, n: usize) -> f64 {
        let r = n as f64 / self.order as f64;
        (r - 1.0) * self.ln_distance - r * self.ln_top
    }

    /// Physical peak of order `n` to its dimensionless value.
    pub fn peak_to_hat(&self, n: usize, value: f64) -> f64 {
        value * self.exponent(n).exp()
    }

    pub fn peak_from_hat(&self, n: usize, value: f64) -> f64 {
        value * (-self.exponent(n)).exp()
    }

    pub fn time_to_hat(&self, t: f64) -> f64 {
        t * ((self.ln_top - self.ln_distance) / self.order as f64).exp()
    }

    pub fn time_from_hat(&self, t: f64) -> f64 {
        t * ((self.ln_distance - self.ln_top) / self.order as f64).exp()
    }

    /// Full scaled vector; entries 0 and N are set to 1 rather than computed.
    pub(crate) fn values_to_hat(&self, values: &[f64]) -> Vec<f64> {
        let n = self.order;
        let mut out: Vec<f64> = values
            .iter()
            .enumerate()
            .map(|(k, v)| self.peak_to_hat(k, *v))
            .collect();
        out[0] = 1.0;
        out[n] = 1.0;
        out
    }

    pub(crate) fn values_from_hat(&self, values: &[f64]) -> Vec<f64> {
        values
            .iter()
            .enumerate()
            .map(|(k, v)| self.peak_from_hat(k, *v))
            .collect()
    }
}

/// Scales a peak vector by its own distance and top-order entry.
pub fn to_dimensionless(peaks: &PeakVector) -> DimensionlessPeaks {
    let scale = Scale::new(peaks.distance(), peaks.top(), peaks.order())
        .expect("peak vector entries are positive");
    DimensionlessPeaks(scale.values_to_hat(peaks.values()))
}

/// `T̂ = T s^(-1/N) x_N^(1/N)`.
pub fn to_dimensionless_time(t: f64, distance: f64, top: f64, order: usize) -> Result<f64> {
    Ok(Scale::new(distance, top, order)?.time_to_hat(t))
}

pub fn from_dimensionless_time(t_hat: f64, distance: f64, top: f64, order: usize) -> Result<f64> {
    Ok(Scale::new(distance, top, order)?.time_from_hat(t_hat))
}

/// `x_n = ẑ_n s^(1 - n/N) x_N^(n/N)`.
pub fn from_dimensionless(z: &DimensionlessPeaks, distance: f64, top: f64) -> Result<PeakVector> {
    let scale = Scale::new(distance, top, z.order())?;
    let mut values = scale.values_from_hat(z.values());
    let n = z.order();
    values[0] = distance;
    values[n] = top;
    PeakVector::new(values)
}
