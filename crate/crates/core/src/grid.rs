use serde::{Deserialize, Serialize};

use crate::error::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    #[serde(alias = "log")]
    Logarithmic,
}

/// Strictly increasing evaluation grid over `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn new(min: f64, max: f64, points: usize, spacing: Spacing) -> Result<Self, ModelError> {
        let g = Self {
            min,
            max,
            points,
            spacing,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn log(min: f64, max: f64, points: usize) -> Result<Self, ModelError> {
        Self::new(min, max, points, Spacing::Logarithmic)
    }

    pub fn linear(min: f64, max: f64, points: usize) -> Result<Self, ModelError> {
        Self::new(min, max, points, Spacing::Linear)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.min > 0.0 && self.min.is_finite()) {
            return Err(ModelError::BadGrid(format!(
                "min = {} must be finite and positive",
                self.min
            )));
        }
        if !(self.max > self.min && self.max.is_finite()) {
            return Err(ModelError::BadGrid(format!(
                "max = {} must be finite and exceed min",
                self.max
            )));
        }
        if self.points < 2 {
            return Err(ModelError::BadGrid(format!(
                "points = {} must be at least 2",
                self.points
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    return self.max;
                }
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * i as f64 / last,
                    Spacing::Logarithmic => {
                        (self.min.ln() + (self.max / self.min).ln() * i as f64 / last).exp()
                    }
                }
            })
            .collect()
    }
}
