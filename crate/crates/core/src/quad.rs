//! Globally adaptive Gauss-Kronrod quadrature for complex-valued integrands.
//!
//! Infinite ranges are truncated at a point chosen from a caller-supplied
//! decay envelope `|f(u)| <= K exp(-r u^p)` for `u` beyond a knee, so the
//! discarded tail is bounded rather than guessed. The finite range is covered
//! by panels whose widths grow geometrically away from the origin, optionally
//! capped for oscillatory integrands, and then bisected worst-first until the
//! summed error estimate meets the tolerance.

use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::QuadError;

// 15-point Kronrod abscissae and weights with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Width of the first panel next to the origin.
const FIRST_PANEL: f64 = 0.5;
/// Growth factor between neighbouring initial panels.
const PANEL_GROWTH: f64 = 1.5;

/// Analytic bound `|f(u)| <= scale * exp(-rate * u^exponent)` for `u >= knee`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayEnvelope {
    pub scale: f64,
    pub rate: f64,
    pub exponent: f64,
    pub knee: f64,
}

impl DecayEnvelope {
    pub fn new(scale: f64, rate: f64, exponent: f64, knee: f64) -> Self {
        Self {
            scale,
            rate,
            exponent,
            knee,
        }
    }

    /// Upper bound on `int_u^inf scale exp(-rate t^p) dt`, using
    /// `t^p >= u^p + p u^{p-1} (t - u)` for `t >= u`.
    pub fn tail_bound(&self, u: f64) -> f64 {
        let p = self.exponent;
        self.scale * (-self.rate * u.powf(p)).exp() / (self.rate * p * u.powf(p - 1.0))
    }

    /// Smallest point at or beyond the knee whose tail bound is below `target`.
    pub fn truncation_point(&self, target: f64) -> f64 {
        let mut lo = self.knee.max(1e-3);
        if self.tail_bound(lo) <= target {
            return lo;
        }
        let mut hi = lo.max(1.0);
        while self.tail_bound(hi) > target {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.tail_bound(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-6 * hi {
                break;
            }
        }
        hi
    }

    fn validate(&self) -> Result<(), QuadError> {
        let finite = [self.scale, self.rate, self.exponent, self.knee]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.scale < 0.0 || self.rate <= 0.0 || self.exponent < 1.0 {
            return Err(QuadError::InvalidSpec(format!(
                "envelope needs K >= 0, r > 0, p >= 1; got {self:?}"
            )));
        }
        Ok(())
    }
}

/// How an infinite range is cut down to a finite one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Truncation {
    /// Cut where the envelope tail drops below a tenth of `abs_tol`.
    Envelope(DecayEnvelope),
    /// Cut at a fixed point; `tail_bound` is the caller's bound on what is dropped.
    Fixed { point: f64, tail_bound: f64 },
}

/// Tolerances, budget, and truncation policy for one integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub truncation: Option<Truncation>,
    /// Upper limit on the width of the initial panels.
    pub max_panel: Option<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
            truncation: None,
            max_panel: None,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerances(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = Some(truncation);
        self
    }

    pub fn with_envelope(self, envelope: DecayEnvelope) -> Self {
        self.with_truncation(Truncation::Envelope(envelope))
    }

    pub fn with_max_panel(mut self, width: f64) -> Self {
        self.max_panel = Some(width);
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    /// Both tolerances halved.
    pub fn halved(mut self) -> Self {
        self.abs_tol *= 0.5;
        self.rel_tol *= 0.5;
        self
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(QuadError::InvalidSpec(format!(
                "tolerances must be positive; got abs {} rel {}",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(QuadError::InvalidSpec("zero subdivision budget".into()));
        }
        if let Some(w) = self.max_panel {
            if !(w > 0.0 && w.is_finite()) {
                return Err(QuadError::InvalidSpec(format!("panel cap {w}")));
            }
        }
        match self.truncation {
            Some(Truncation::Envelope(env)) => env.validate(),
            Some(Truncation::Fixed { point, tail_bound }) => {
                if point > 0.0 && point.is_finite() && tail_bound >= 0.0 {
                    Ok(())
                } else {
                    Err(QuadError::InvalidSpec(format!(
                        "fixed truncation at {point} with tail {tail_bound}"
                    )))
                }
            }
            None => Ok(()),
        }
    }

    fn truncate(&self) -> Result<(f64, f64), QuadError> {
        match self.truncation {
            Some(Truncation::Envelope(env)) => {
                let point = env.truncation_point(self.abs_tol / 10.0);
                Ok((point, env.tail_bound(point)))
            }
            Some(Truncation::Fixed { point, tail_bound }) => Ok((point, tail_bound)),
            None => Err(QuadError::MissingTruncation),
        }
    }
}

/// Outcome of one integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    /// Quadrature error estimate plus the truncated tail bound.
    pub error_estimate: f64,
    /// Where an infinite range was cut; the upper limit for finite ranges.
    pub truncation_point: f64,
    pub evaluations: usize,
}

/// One Gauss-Kronrod panel.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Panel {
    pub a: f64,
    pub b: f64,
    pub value: Complex64,
    pub error: f64,
    /// The error estimate is already at the rounding floor of the rule.
    pub at_floor: bool,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// 15-point Kronrod estimate on `[a, b]` with the QUADPACK error heuristic.
pub(crate) fn kronrod_panel<F>(f: &mut F, a: f64, b: f64) -> Result<Panel, QuadError>
where
    F: FnMut(f64) -> Complex64,
{
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut eval = |x: f64| {
        let v = f(x);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(QuadError::NonFinite { at: x })
        }
    };

    let fc = eval(centre)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.norm() * WGK[7];
    let mut samples = [(Complex64::default(), Complex64::default()); 7];
    for (j, sample) in samples.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let f1 = eval(centre - dx)?;
        let f2 = eval(centre + dx)?;
        kronrod += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
        abs_sum += (f1.norm() + f2.norm()) * WGK[j];
        *sample = (f1, f2);
    }
    let mean = kronrod * 0.5;
    let mut asc = WGK[7] * (fc - mean).norm();
    for (j, (f1, f2)) in samples.iter().enumerate() {
        asc += WGK[j] * ((f1 - mean).norm() + (f2 - mean).norm());
    }

    let scale = half.abs();
    let value = kronrod * half;
    let res_abs = abs_sum * scale;
    let res_asc = asc * scale;
    let mut error = ((kronrod - gauss) * half).norm();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    let mut at_floor = false;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && floor >= error {
        error = floor;
        at_floor = true;
    }
    Ok(Panel {
        a,
        b,
        value,
        error,
        at_floor,
    })
}

/// Neumaier-compensated sum of panel values.
fn compensated_sum<'a>(values: impl Iterator<Item = &'a Complex64>) -> Complex64 {
    let mut sum = Complex64::default();
    let mut carry = Complex64::default();
    for v in values {
        let t = sum + v;
        let fix = |s: f64, x: f64, t: f64| {
            if s.abs() >= x.abs() {
                (s - t) + x
            } else {
                (x - t) + s
            }
        };
        carry.re += fix(sum.re, v.re, t.re);
        carry.im += fix(sum.im, v.im, t.im);
        sum = t;
    }
    sum + carry
}

/// Adaptive integration over the union of `panels`.
fn adaptive<F>(
    f: &mut F,
    panels: &[(f64, f64)],
    spec: &QuadratureSpec,
    tail_bound: f64,
    truncation_point: f64,
) -> Result<QuadratureResult, QuadError>
where
    F: FnMut(f64) -> Complex64,
{
    let mut heap = BinaryHeap::with_capacity(panels.len() + 2 * spec.max_subdivisions);
    let mut settled: Vec<Panel> = Vec::new();
    let mut evaluations = 0;
    for &(a, b) in panels {
        heap.push(kronrod_panel(f, a, b)?);
        evaluations += 15;
    }

    let finish = |heap: &BinaryHeap<Panel>, settled: &[Panel], evaluations| {
        let value = compensated_sum(heap.iter().chain(settled).map(|p| &p.value));
        let error: f64 = heap.iter().chain(settled).map(|p| p.error).sum::<f64>() + tail_bound;
        QuadratureResult {
            value,
            error_estimate: error,
            truncation_point,
            evaluations,
        }
    };

    let mut subdivisions = 0;
    loop {
        let result = finish(&heap, &settled, evaluations);
        let tolerance = spec.abs_tol.max(spec.rel_tol * result.value.norm());
        if result.error_estimate <= tolerance {
            return Ok(result);
        }
        let Some(worst) = heap.pop() else {
            return Err(QuadError::RoundoffLimited { best: result });
        };
        let mid = 0.5 * (worst.a + worst.b);
        if worst.at_floor || mid <= worst.a || mid >= worst.b {
            settled.push(worst);
            continue;
        }
        if subdivisions >= spec.max_subdivisions {
            heap.push(worst);
            let best = finish(&heap, &settled, evaluations);
            return Err(QuadError::NotConverged { best });
        }
        subdivisions += 1;
        heap.push(kronrod_panel(f, worst.a, mid)?);
        heap.push(kronrod_panel(f, mid, worst.b)?);
        evaluations += 30;
    }
}

/// Initial partition of `[0, upper]`: geometric growth from the origin,
/// capped at `max_panel`.
fn outward_panels(upper: f64, max_panel: Option<f64>) -> Vec<(f64, f64)> {
    let cap = max_panel.unwrap_or(f64::INFINITY);
    let mut panels = Vec::new();
    let mut left = 0.0;
    let mut width = FIRST_PANEL.min(cap);
    while left < upper {
        let right = (left + width).min(upper);
        // Do not leave a sliver at the end.
        let right = if upper - right < 0.25 * width {
            upper
        } else {
            right
        };
        panels.push((left, right));
        left = right;
        width = (width * PANEL_GROWTH).min(cap);
    }
    panels
}

/// `int_0^inf f(u) du`.
pub fn integrate_semi_infinite<F>(
    mut f: F,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, QuadError>
where
    F: FnMut(f64) -> Complex64,
{
    spec.validate()?;
    let (upper, tail) = spec.truncate()?;
    let panels = outward_panels(upper, spec.max_panel);
    adaptive(&mut f, &panels, spec, tail, upper)
}

/// `int_{-inf}^{inf} f(u) du`, truncated symmetrically; the truncation rule
/// must bound each of the two tails.
pub fn integrate_real_line<F>(mut f: F, spec: &QuadratureSpec) -> Result<QuadratureResult, QuadError>
where
    F: FnMut(f64) -> Complex64,
{
    spec.validate()?;
    let (upper, tail) = spec.truncate()?;
    let right = outward_panels(upper, spec.max_panel);
    let panels: Vec<(f64, f64)> = right
        .iter()
        .map(|&(a, b)| (-b, -a))
        .chain(right.iter().copied())
        .collect();
    adaptive(&mut f, &panels, spec, 2.0 * tail, upper)
}

/// `int_a^b f(u) du` over a finite interval.
pub fn integrate_interval<F>(
    mut f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, QuadError>
where
    F: FnMut(f64) -> Complex64,
{
    spec.validate()?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(QuadError::InvalidSpec(format!("interval [{a}, {b}]")));
    }
    let pieces = match spec.max_panel {
        Some(w) => ((b - a) / w).ceil().max(1.0) as usize,
        None => 4,
    };
    let h = (b - a) / pieces as f64;
    let panels: Vec<(f64, f64)> = (0..pieces)
        .map(|i| {
            let left = a + h * i as f64;
            let right = if i + 1 == pieces { b } else { a + h * (i + 1) as f64 };
            (left, right)
        })
        .collect();
    adaptive(&mut f, &panels, spec, 0.0, b)
}

/// Real-valued convenience wrapper around [`integrate_interval`].
pub fn integrate_interval_real<F>(
    mut f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, f64), QuadError>
where
    F: FnMut(f64) -> f64,
{
    let r = integrate_interval(|u| Complex64::new(f(u), 0.0), a, b, spec)?;
    Ok((r.value.re, r.error_estimate))
}
