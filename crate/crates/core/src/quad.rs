//! Adaptive Gauss–Kronrod quadrature.
//!
//! Integrals on finite intervals are computed with the 21-point Kronrod
//! extension of the 10-point Gauss rule, bisecting the panel with the largest
//! error estimate until the tolerance or the panel budget is reached. Neither
//! rule evaluates at the interval endpoints, so integrable endpoint
//! singularities are handled without special casing.
//!
//! Half-line integrals are truncated at a point where a caller supplied
//! exponential tail bound drops below a tenth of the absolute tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Values that can be integrated: real or complex.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn modulus(self) -> f64;
    fn finite(self) -> bool;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Tolerances and budget for one quadrature call.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Fixed truncation point for half-line integrals. When `None` the point
    /// is solved from the tail bound.
    pub tail_cutoff: Option<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
            tail_cutoff: None,
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

    pub fn validate(&self) -> Result<()> {
        let ok_sign = self.abs_tol >= 0.0 && self.rel_tol >= 0.0;
        if !ok_sign || !(self.abs_tol + self.rel_tol > 0.0) {
            return Err(Error::Contract(format!(
                "tolerances must be non-negative with positive sum, got abs={} rel={}",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Contract("max_subdivisions must be at least 1".into()));
        }
        if let Some(c) = self.tail_cutoff {
            if !(c > 0.0) {
                return Err(Error::Contract(format!("tail_cutoff must be positive, got {c}")));
            }
        }
        Ok(())
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult<T> {
    pub value: T,
    pub error_estimate: f64,
    pub subdivisions_used: usize,
    pub converged: bool,
}

impl<T: Scalar> QuadResult<T> {
    /// Multiplies the value and its error by a positive constant.
    pub fn scaled(self, c: f64) -> Self {
        Self {
            value: self.value * c,
            error_estimate: self.error_estimate * c.abs(),
            ..self
        }
    }
}

/// Certified tail: `|f(u)| <= scale * exp(-rate * (u - from))` for `u >= from`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayBound {
    pub rate: f64,
    pub scale: f64,
    pub from: f64,
}

impl DecayBound {
    pub fn new(rate: f64) -> Self {
        Self {
            rate,
            scale: 1.0,
            from: 0.0,
        }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn starting_at(mut self, from: f64) -> Self {
        self.from = from;
        self
    }

    /// Tail mass beyond `u`.
    pub fn tail(&self, u: f64) -> f64 {
        self.scale * (-self.rate * (u - self.from).max(0.0)).exp() / self.rate
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_352,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_5,
    0.149_445_554_002_916_9,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_36,
    0.295_524_224_714_752_87,
];

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn checked<T: Scalar>(f: &impl Fn(f64) -> T, x: f64) -> Result<T> {
    let v = f(x);
    if v.finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { abscissa: x })
    }
}

fn kronrod21<T: Scalar>(f: &impl Fn(f64) -> T, a: f64, b: f64) -> Result<Panel<T>> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = checked(f, center)?;
    let mut kronrod = fc * WGK[10];
    let mut gauss = T::zero();
    let mut abs_sum = fc.modulus() * WGK[10];
    let mut values = [(T::zero(), T::zero()); 10];
    for (j, slot) in values.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let lo = checked(f, center - dx)?;
        let hi = checked(f, center + dx)?;
        *slot = (lo, hi);
        kronrod = kronrod + (lo + hi) * WGK[j];
        abs_sum += (lo.modulus() + hi.modulus()) * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + (lo + hi) * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut asc = (fc - mean).modulus() * WGK[10];
    for (j, (lo, hi)) in values.iter().enumerate() {
        asc += ((*lo - mean).modulus() + (*hi - mean).modulus()) * WGK[j];
    }
    let half_abs = half.abs();
    let resabs = abs_sum * half_abs;
    let resasc = asc * half_abs;
    let mut error = ((kronrod - gauss) * half).modulus();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Panel {
        a,
        b,
        value: kronrod * half,
        error,
    })
}

/// Adaptive integral of `f` over `[a, b]`.
///
/// Exhausting the panel budget is reported through `converged = false`, not
/// as an error. The returned pair is the one with the smallest error estimate
/// seen during refinement.
pub fn integrate_finite<T: Scalar>(
    f: impl Fn(f64) -> T,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult<T>> {
    spec.validate()?;
    if !(a < b) {
        return Err(Error::Contract(format!("interval [{a}, {b}] is empty or reversed")));
    }
    let first = kronrod21(&f, a, b)?;
    let mut value = first.value;
    let mut error = first.error;
    let mut best = (value, error);
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut panels = 1usize;

    while panels < spec.max_subdivisions {
        if error <= spec.target(value.modulus()) {
            break;
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 1e3 * f64::MIN_POSITIVE {
            heap.push(worst);
            break;
        }
        let left = kronrod21(&f, worst.a, mid)?;
        let right = kronrod21(&f, mid, worst.b)?;
        value = value - worst.value + left.value + right.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        panels += 1;
        if panels.is_multiple_of(64) {
            // Bound drift of the running sums.
            value = heap.iter().fold(T::zero(), |s, p| s + p.value);
            error = heap.iter().map(|p| p.error).sum();
        }
        if error < best.1 {
            best = (value, error);
        }
    }
    Ok(QuadResult {
        value: best.0,
        error_estimate: best.1,
        subdivisions_used: panels,
        converged: best.1 <= spec.target(best.0.modulus()),
    })
}

fn cutoff(bound: &DecayBound, spec: &QuadratureSpec) -> f64 {
    if let Some(c) = spec.tail_cutoff {
        return c.max(bound.from);
    }
    let tol = if spec.abs_tol > 0.0 {
        spec.abs_tol
    } else {
        spec.rel_tol * bound.scale.max(f64::MIN_POSITIVE)
    };
    let target = tol / 10.0;
    let excess = (bound.scale / (bound.rate * target)).ln() / bound.rate;
    bound.from + excess.max(0.0)
}

fn check_bound(bound: &DecayBound) -> Result<()> {
    if !(bound.rate > 0.0) || !bound.rate.is_finite() {
        return Err(Error::Contract(format!(
            "decay rate must be positive, got {}",
            bound.rate
        )));
    }
    if !(bound.scale >= 0.0) || !bound.scale.is_finite() {
        return Err(Error::Contract(format!("tail scale must be finite, got {}", bound.scale)));
    }
    Ok(())
}

/// Integral of `f` over `[a, ∞)` under a certified exponential tail bound.
pub fn integrate_tail<T: Scalar>(
    f: impl Fn(f64) -> T,
    a: f64,
    bound: DecayBound,
    spec: &QuadratureSpec,
) -> Result<QuadResult<T>> {
    check_bound(&bound)?;
    spec.validate()?;
    let upper = cutoff(&bound, spec).max(a + 1.0 / bound.rate);
    let mut res = integrate_finite(f, a, upper, spec)?;
    res.error_estimate += bound.tail(upper);
    Ok(res)
}

/// Integral over `[0, ∞)` for `|f(u)| <= exp(-decay_rate u)` eventually.
pub fn integrate_halfline<T: Scalar>(
    f: impl Fn(f64) -> T,
    decay_rate: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult<T>> {
    integrate_tail(f, 0.0, DecayBound::new(decay_rate), spec)
}

/// Half-line integral with an explicit tail certificate.
pub fn integrate_halfline_with<T: Scalar>(
    f: impl Fn(f64) -> T,
    bound: DecayBound,
    spec: &QuadratureSpec,
) -> Result<QuadResult<T>> {
    integrate_tail(f, 0.0, bound, spec)
}

const TAIL_SLOPE: f64 = 0.25;

/// `∫_ℝ exp(ell(v)) dv` for a concave log-integrand `ell` with derivative `dell`.
///
/// Concavity certifies the tails: beyond a point where the slope is below
/// `-1/4` (or above `1/4` on the left) the integrand is dominated by an
/// exponential with that slope.
pub fn integrate_log_concave(
    ell: impl Fn(f64) -> f64,
    dell: impl Fn(f64) -> f64,
    center: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult<f64>> {
    let mut right = center;
    let mut step = 0.5;
    while dell(right) > -TAIL_SLOPE {
        right += step;
        step *= 1.5;
        if !right.is_finite() || step > 1e6 {
            return Err(Error::Contract("log-integrand has no decaying right tail".into()));
        }
    }
    let mut left = center;
    step = 0.5;
    while dell(left) < TAIL_SLOPE {
        left -= step;
        step *= 1.5;
        if !left.is_finite() || step > 1e6 {
            return Err(Error::Contract("log-integrand has no decaying left tail".into()));
        }
    }
    let peak = ell(center).max(ell(left)).max(ell(right));
    let shifted = |v: f64| (ell(v) - peak).exp();
    let mid = if right > left {
        integrate_finite(shifted, left, right, spec)?
    } else {
        QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            subdivisions_used: 0,
            converged: true,
        }
    };
    let rb = DecayBound::new(-dell(right)).with_scale((ell(right) - peak).exp()).starting_at(right);
    let upper = integrate_tail(shifted, right, rb, spec)?;
    let lb = DecayBound::new(dell(left)).with_scale((ell(left) - peak).exp());
    let lower = integrate_tail(|w| shifted(left - w), 0.0, lb, spec)?;
    let value = mid.value + upper.value + lower.value;
    let error = mid.error_estimate + upper.error_estimate + lower.error_estimate;
    let scale = peak.exp();
    Ok(QuadResult {
        value: value * scale,
        error_estimate: error * scale,
        subdivisions_used: mid.subdivisions_used + upper.subdivisions_used + lower.subdivisions_used,
        converged: mid.converged && upper.converged && lower.converged,
    })
}

/// Γ(k/2) for a positive integer `k`.
pub fn gamma_half(k: u32) -> f64 {
    assert!(k > 0, "gamma_half needs a positive argument");
    let mut g = if k.is_multiple_of(2) { 1.0 } else { std::f64::consts::PI.sqrt() };
    let mut x = if k.is_multiple_of(2) { 1.0 } else { 0.5 };
    let target = f64::from(k) / 2.0;
    while x < target - 0.25 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Surface area of the unit sphere in ℝⁿ.
pub fn sphere_area(n: u32) -> f64 {
    2.0 * std::f64::consts::PI.powf(f64::from(n) / 2.0) / gamma_half(n)
}

/// `∫_{ℝⁿ} g(|y|) dy`; the tail bound refers to `g(r) r^{n-1}`.
pub fn integrate_radial(
    g: impl Fn(f64) -> f64,
    n: u32,
    bound: DecayBound,
    spec: &QuadratureSpec,
) -> Result<QuadResult<f64>> {
    if n == 0 {
        return Err(Error::Contract("dimension must be at least 1".into()));
    }
    let power = (n - 1) as i32;
    let res = integrate_tail(|r| g(r) * r.powi(power), 0.0, bound, spec)?;
    Ok(res.scaled(sphere_area(n)))
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 1 { x } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = mf * (x * pm - pm1) / (x * x - 1.0);
            let dx = pm / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}
