//! Linear surrogate of the designer's rating:
//! `rating ≈ a0 + a1·CBO + a2·NAC + a3·ATMR`.
//!
//! Coefficients are refit by least squares whenever a rating arrives, and the
//! magnitudes of `a1..a3` become the search weights.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fitness::{MetricVector, WeightVector};

/// Coefficients before the first successful refit.
pub const INITIAL_COEFFICIENTS: [f64; 4] = [0.0, 0.34, 0.33, 0.33];

/// Singular values below this fraction of the largest count as zero.
const RANK_TOLERANCE: f64 = 1e-10;

pub const MIN_RATING: u8 = 1;
pub const MAX_RATING: u8 = 100;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SurrogateError {
    #[error("rating {0} outside {MIN_RATING}..={MAX_RATING}")]
    Rating(i64),
}

/// Checks a designer rating.
pub fn validate_rating(rating: i64) -> Result<u8, SurrogateError> {
    if (MIN_RATING as i64..=MAX_RATING as i64).contains(&rating) {
        Ok(rating as u8)
    } else {
        Err(SurrogateError::Rating(rating))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub metrics: MetricVector,
    pub rating: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateModel {
    coefficients: [f64; 4],
    observations: Vec<Observation>,
}

impl Default for SurrogateModel {
    fn default() -> Self {
        SurrogateModel { coefficients: INITIAL_COEFFICIENTS, observations: Vec::new() }
    }
}

impl SurrogateModel {
    pub fn new() -> Self {
        Self::default()
    }

    /// `[a0, a1, a2, a3]`.
    pub fn coefficients(&self) -> [f64; 4] {
        self.coefficients
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn predict(&self, m: &MetricVector) -> f64 {
        let [a0, a1, a2, a3] = self.coefficients;
        a0 + a1 * m.cbo + a2 * m.nac + a3 * m.atmr
    }

    /// Appends an observation and refits.
    pub fn record_evaluation(&mut self, metrics: MetricVector, rating: i64) -> Result<(), SurrogateError> {
        let rating = validate_rating(rating)?;
        self.observations.push(Observation { metrics, rating });
        self.coefficients = refit_surrogate(&self.observations, self.coefficients);
        Ok(())
    }

    /// Search weights implied by the current coefficients.
    pub fn weights(&self, previous: WeightVector) -> WeightVector {
        let [_, a1, a2, a3] = self.coefficients;
        weights_from_coefficients(a1, a2, a3, previous)
    }
}

/// Ordinary least-squares fit of the four coefficients. Keeps `previous` when
/// there are fewer than four observations or the design matrix is rank
/// deficient.
pub fn refit_surrogate(observations: &[Observation], previous: [f64; 4]) -> [f64; 4] {
    let n = observations.len();
    if n < 4 {
        return previous;
    }
    let design = DMatrix::from_fn(n, 4, |r, c| {
        let m = &observations[r].metrics;
        match c {
            0 => 1.0,
            1 => m.cbo,
            2 => m.nac,
            _ => m.atmr,
        }
    });
    let ratings = DVector::from_iterator(n, observations.iter().map(|o| o.rating as f64));
    let svd = design.svd(true, true);
    let largest = svd.singular_values.max();
    if largest.is_nan() || largest <= 0.0 || svd.rank(largest * RANK_TOLERANCE) < 4 {
        return previous;
    }
    match svd.solve(&ratings, largest * RANK_TOLERANCE) {
        Ok(x) if x.iter().all(|v| v.is_finite()) => [x[0], x[1], x[2], x[3]],
        _ => previous,
    }
}

/// Weights proportional to coefficient magnitudes; all-zero coefficients keep
/// `previous`.
pub fn weights_from_coefficients(a1: f64, a2: f64, a3: f64, previous: WeightVector) -> WeightVector {
    let (m1, m2, m3) = (a1.abs(), a2.abs(), a3.abs());
    let total = m1 + m2 + m3;
    if !total.is_finite() || total <= 0.0 {
        return previous;
    }
    WeightVector::normalized(m1, m2, m3).unwrap_or(previous)
}
