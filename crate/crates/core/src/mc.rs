//! Monte Carlo simulation of `max {W(t) - c t^2}` on a time grid.
//!
//! Each path draws its increments from its own ChaCha8 stream keyed by the
//! path index, so a sample depends only on the seed, never on the number of
//! worker threads. The right half of a two-sided path uses the same stream as
//! the one-sided path with that index.
//!
//! The grid maximum underestimates the continuum maximum by about
//! `0.58 sqrt(step)`. With `bridge` set, the maximum of the Brownian bridge
//! between neighbouring grid points is sampled exactly for every interval that
//! could still beat the running maximum, which removes that bias.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use statrs::distribution::{Binomial, DiscreteCDF};
use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};
use crate::parabola::{DriftCoefficient, Side};

/// Largest accepted `paths * horizon / step`.
pub const WORK_CAP: f64 = 1e10;

/// Largest accepted time step.
pub const MAX_STEP: f64 = 1e-2;

/// Smallest sample [`empirical_cdf`] accepts.
pub const MIN_PATHS_FOR_CDF: usize = 100;

/// Stream offset separating the bridge uniforms from the increments.
const BRIDGE_STREAM: u64 = 1 << 62;

/// Intervals whose endpoints both lie this many `sqrt(step)` below the running
/// maximum exceed it with probability below `exp(-2 * 13.8) ~ 1e-12`.
const BRIDGE_WINDOW: f64 = 3.715;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McConfig {
    pub c: DriftCoefficient,
    pub paths: usize,
    pub step: f64,
    pub horizon: f64,
    pub seed: u64,
    pub side: Side,
    pub bridge: bool,
}

impl McConfig {
    /// Grid maximum, horizon `max(4, (10/c)^{2/3})`: beyond it `c t^2` exceeds
    /// `10 sqrt(t)` and the maximum is almost never reached there.
    pub fn new(c: DriftCoefficient, paths: usize, step: f64, seed: u64, side: Side) -> Self {
        Self {
            c,
            paths,
            step,
            horizon: Self::default_horizon(c),
            seed,
            side,
            bridge: false,
        }
    }

    pub fn default_horizon(c: DriftCoefficient) -> f64 {
        (10.0 / c.value()).powf(2.0 / 3.0).max(4.0)
    }

    pub fn with_bridge(mut self, bridge: bool) -> Self {
        self.bridge = bridge;
        self
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn steps_per_half(&self) -> usize {
        (self.horizon / self.step).ceil() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths == 0 {
            return Err(Error::InvalidArgument("paths must be >= 1".into()));
        }
        if !(self.step > 0.0 && self.step <= MAX_STEP) {
            return Err(Error::InvalidArgument(format!(
                "step must lie in (0, {MAX_STEP}], got {}",
                self.step
            )));
        }
        let minimum = (10.0 / self.c.value()).powf(2.0 / 3.0);
        if !(self.horizon >= minimum) || !self.horizon.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "horizon must be at least (10/c)^(2/3) = {minimum}, got {}",
                self.horizon
            )));
        }
        let work = self.paths as f64 * self.horizon / self.step;
        if work > WORK_CAP {
            return Err(Error::ResourceCap {
                work,
                cap: WORK_CAP,
            });
        }
        Ok(())
    }
}

/// Simulated maxima and their locations, one per path.
#[derive(Clone, Debug, PartialEq)]
pub struct McSample {
    pub maxima: Vec<f64>,
    pub argmaxes: Vec<f64>,
    pub config: McConfig,
}

struct HalfMax {
    max: f64,
    argmax: f64,
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Maximum over `t in [0, horizon]` of `W(t) - c t^2` for one half path.
fn half_path(config: &McConfig, stream: u64) -> HalfMax {
    let mut rng = rng_for(config.seed, stream);
    let mut bridge_rng = config
        .bridge
        .then(|| rng_for(config.seed, stream | BRIDGE_STREAM));
    let n = config.steps_per_half();
    let dt = config.step;
    let sd = dt.sqrt();
    let c = config.c.value();
    let window = BRIDGE_WINDOW * sd;

    let mut w = 0.0;
    let mut previous: f64 = 0.0;
    let mut best = HalfMax {
        max: 0.0,
        argmax: 0.0,
    };
    for k in 1..=n {
        let z: f64 = rng.sample(StandardNormal);
        w += sd * z;
        let t = k as f64 * dt;
        let x = w - c * t * t;
        if let Some(br) = bridge_rng.as_mut() {
            if previous.max(x) >= best.max - window {
                // Maximum of a Brownian bridge from `previous` to `x` over
                // time dt; the curvature of c t^2 within one step is O(c dt^2).
                let u: f64 = 1.0 - br.random::<f64>();
                let d = previous - x;
                let m = 0.5 * (previous + x + (d * d - 2.0 * dt * u.ln()).sqrt());
                if m > best.max {
                    best.max = m;
                    best.argmax = if x >= previous { t } else { t - dt };
                }
            }
        } else if x > best.max {
            best.max = x;
            best.argmax = t;
        }
        previous = x;
    }
    best
}

/// Draws `config.paths` maxima; bit-identical for a given configuration.
pub fn simulate(config: &McConfig) -> Result<McSample> {
    config.validate()?;
    let pairs: Vec<(f64, f64)> = (0..config.paths as u64)
        .into_par_iter()
        .map(|i| {
            let right = half_path(config, 2 * i);
            match config.side {
                Side::One => (right.max, right.argmax),
                Side::Two => {
                    let left = half_path(config, 2 * i + 1);
                    if left.max > right.max {
                        (left.max, -left.argmax)
                    } else {
                        (right.max, right.argmax)
                    }
                }
            }
        })
        .collect();
    let (maxima, argmaxes) = pairs.into_iter().unzip();
    Ok(McSample {
        maxima,
        argmaxes,
        config: *config,
    })
}

/// Fraction of maxima `<= x`, with its binomial standard error.
pub fn empirical_cdf(sample: &McSample, x: f64) -> Result<(f64, f64)> {
    empirical_cdf_of(&sample.maxima, x)
}

pub fn empirical_cdf_of(values: &[f64], x: f64) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    if values.len() < MIN_PATHS_FOR_CDF {
        return Err(Error::InvalidArgument(format!(
            "an empirical CDF needs at least {MIN_PATHS_FOR_CDF} values, got {}",
            values.len()
        )));
    }
    let n = values.len() as f64;
    let below = values.iter().filter(|&&v| v <= x).count() as f64;
    let p = below / n;
    Ok((p, (p * (1.0 - p) / n).sqrt()))
}

/// Kolmogorov-Smirnov statistic `sup |F_n - F|` and its asymptotic p-value.
pub fn ks_test(values: &[f64], cdf: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &v) in sorted.iter().enumerate() {
        let f = cdf(v);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    let sqrt_n = n.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    Ok((d, kolmogorov_survival(lambda)))
}

/// `P(K > lambda)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = f64::from(k);
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Exact two-sided sign test of "positive and negative values are equally
/// likely"; zeros are dropped. Returns `(positives, negatives, p_value)`.
pub fn sign_test(values: &[f64]) -> Result<(usize, usize, f64)> {
    let positives = values.iter().filter(|&&v| v > 0.0).count();
    let negatives = values.iter().filter(|&&v| v < 0.0).count();
    let n = positives + negatives;
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let binomial = Binomial::new(0.5, n as u64).expect("p = 1/2 is a valid probability");
    let smaller = positives.min(negatives) as u64;
    let p = (2.0 * binomial.cdf(smaller)).min(1.0);
    Ok((positives, negatives, p))
}

/// Writes `max,argmax` rows; values round-trip exactly.
pub fn write_csv<W: Write>(sample: &McSample, mut out: W) -> Result<()> {
    writeln!(out, "max,argmax")?;
    for (m, a) in sample.maxima.iter().zip(&sample.argmaxes) {
        writeln!(out, "{m:?},{a:?}")?;
    }
    Ok(())
}

/// Reads what [`write_csv`] wrote, as `(maxima, argmaxes)`.
pub fn read_csv<R: BufRead>(input: R) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?;
    if header.as_deref().map(str::trim) != Some("max,argmax") {
        return Err(Error::Io("missing header 'max,argmax'".into()));
    }
    let mut maxima = Vec::new();
    let mut argmaxes = Vec::new();
    for (row, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parse = |s: Option<&str>| -> Result<f64> {
            s.and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| Error::Io(format!("malformed row {}: '{line}'", row + 2)))
        };
        let mut fields = line.split(',');
        maxima.push(parse(fields.next())?);
        argmaxes.push(parse(fields.next())?);
    }
    Ok((maxima, argmaxes))
}

/// Writes little-endian `f64` pairs `(max, argmax)`, one per path.
pub fn write_binary<W: Write>(sample: &McSample, mut out: W) -> Result<()> {
    for (m, a) in sample.maxima.iter().zip(&sample.argmaxes) {
        out.write_all(&m.to_le_bytes())?;
        out.write_all(&a.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut input: R) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() % 16 != 0 {
        return Err(Error::Io(format!(
            "binary sample length {} is not a multiple of 16",
            bytes.len()
        )));
    }
    let value = |chunk: &[u8]| f64::from_le_bytes(chunk.try_into().expect("8-byte chunk"));
    Ok(bytes
        .chunks_exact(16)
        .map(|pair| (value(&pair[..8]), value(&pair[8..])))
        .unzip())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(side: Side) -> McConfig {
        McConfig::new(DriftCoefficient::new(1.0).unwrap(), 200, 1e-2, 7, side)
    }

    #[test]
    fn validation() {
        let base = config(Side::One);
        assert!(base.validate().is_ok());
        assert!(McConfig { paths: 0, ..base }.validate().is_err());
        assert!(McConfig { step: 0.02, ..base }.validate().is_err());
        assert!(base.with_horizon(1.0).validate().is_err());
        assert!(matches!(
            McConfig {
                paths: 10_000_000,
                step: 1e-3,
                ..base
            }
            .validate(),
            Err(Error::ResourceCap { .. })
        ));
    }

    #[test]
    fn one_sided_maxima_are_nonnegative() {
        for bridge in [false, true] {
            let s = simulate(&config(Side::One).with_bridge(bridge)).unwrap();
            assert!(s.maxima.iter().all(|&m| m >= 0.0));
            assert!(s.argmaxes.iter().all(|&a| a >= 0.0));
        }
    }

    #[test]
    fn bridge_only_raises_maxima() {
        let plain = simulate(&config(Side::Two)).unwrap();
        let bridged = simulate(&config(Side::Two).with_bridge(true)).unwrap();
        for (a, b) in plain.maxima.iter().zip(&bridged.maxima) {
            assert!(b >= a);
        }
    }

    #[test]
    fn kolmogorov_tail_values() {
        // Standard critical values.
        assert!((kolmogorov_survival(1.3581) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_survival(1.6276) - 0.01).abs() < 1e-3);
    }

    #[test]
    fn sign_test_exact_tail() {
        let (pos, neg, p) = sign_test(&[1.0; 10]).unwrap();
        assert_eq!((pos, neg), (10, 0));
        assert!((p - 2.0 * 0.5f64.powi(10)).abs() < 1e-12);
        let (_, _, balanced) = sign_test(&[1.0, -1.0, 0.0, 2.0, -3.0]).unwrap();
        assert_eq!(balanced, 1.0);
        assert!(sign_test(&[0.0]).is_err());
    }
}
