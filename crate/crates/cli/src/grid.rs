use std::fmt;
use std::str::FromStr;

/// Largest number of steps in a grid.
pub const MAX_STEPS: f64 = 1e6;

/// Inclusive grid `start:stop:step`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridError(String);

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for GridError {}

impl FromStr for GridSpec {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, GridError> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts.as_slice() else {
            return Err(GridError(format!("expected start:stop:step, got '{s}'")));
        };
        let num = |field: &str, name: &str| {
            field
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| GridError(format!("grid {name} '{field}' is not a finite number")))
        };
        let grid = GridSpec {
            start: num(start, "start")?,
            stop: num(stop, "stop")?,
            step: num(step, "step")?,
        };
        grid.validate()?;
        Ok(grid)
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), GridError> {
        if self.step <= 0.0 {
            return Err(GridError(format!("grid step must be > 0, got {}", self.step)));
        }
        if self.start > self.stop {
            return Err(GridError(format!(
                "grid start {} exceeds stop {}",
                self.start, self.stop
            )));
        }
        if (self.stop - self.start) / self.step > MAX_STEPS {
            return Err(GridError(format!(
                "grid has more than {MAX_STEPS} steps"
            )));
        }
        Ok(())
    }

    /// Points `start + i step` up to `stop` plus half a step. When `start` is
    /// a whole number of steps the points are computed as `k * step`, so a
    /// grid symmetric about zero is exactly symmetric.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 0.5).floor() as i64;
        let offset = self.start / self.step;
        let aligned = (offset - offset.round()).abs() < 1e-9;
        (0..=n)
            .map(|i| {
                if aligned {
                    let k = offset.round() as i64 + i;
                    if k == 0 {
                        0.0
                    } else {
                        k as f64 * self.step
                    }
                } else {
                    self.start + i as f64 * self.step
                }
            })
            .collect()
    }
}
