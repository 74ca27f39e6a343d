//! Macdonald functions, Bessel potentials and the free heat kernel.
//!
//! The Bessel potential `G_n` is the kernel of `(1-Δ)^{-1}` on ℝⁿ,
//!
//! ```text
//! G_n(x) = ∫_0^∞ exp(-|x|²/4t - t) (4πt)^{-n/2} dt
//!        = (2π)^{-n/2} |x|^{1-n/2} K_{n/2-1}(|x|),
//! ```
//!
//! with closed forms in dimensions one and three. Other dimensions go
//! through quadrature of the Macdonald function
//! `K_ν(z) = ∫_0^∞ exp(-z cosh u) cosh(νu) du`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, integrate_log_concave, DecayBound, QuadratureSpec};

/// Radii below this are treated as the singular point for `n >= 2`.
pub const ORIGIN_FLOOR: f64 = 1e-12;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// A point of ℝⁿ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        assert!(!coords.is_empty(), "a point needs at least one coordinate");
        Self { coords }
    }

    /// The point `(r, 0, ..., 0)` of ℝⁿ.
    pub fn on_axis(n: usize, r: f64) -> Self {
        let mut coords = vec![0.0; n];
        coords[0] = r;
        Self { coords }
    }

    /// The point at distance `r` along the diagonal direction.
    pub fn diagonal(n: usize, r: f64) -> Self {
        let c = r / (n as f64).sqrt();
        Self {
            coords: vec![c; n],
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            coords: self.coords.iter().map(|c| c * s).collect(),
        }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
}

/// A kernel value together with its numerical error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub value: f64,
    pub error_estimate: f64,
    pub method: Method,
}

impl KernelValue {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            error_estimate: 0.0,
            method: Method::ClosedForm,
        }
    }

    pub(crate) fn quadrature(value: f64, error_estimate: f64) -> Self {
        Self {
            value,
            error_estimate,
            method: Method::Quadrature,
        }
    }
}

fn require_converged(r: &quad::QuadResult<f64>, what: &str) -> Result<()> {
    if r.converged {
        Ok(())
    } else {
        Err(Error::NonConvergent(format!(
            "{what}: error estimate {:e} after {} panels",
            r.error_estimate, r.subdivisions_used
        )))
    }
}

/// `K_{1/2}(z) = K_{-1/2}(z) = sqrt(π/2z) e^{-z}`.
pub fn macdonald_half(z: f64) -> f64 {
    (PI / (2.0 * z)).sqrt() * (-z).exp()
}

/// Macdonald function `K_ν(z)` for real order and `z > 0`.
pub fn macdonald_k(nu: f64, z: f64, spec: &QuadratureSpec) -> Result<KernelValue> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("K_nu needs z > 0, got {z}")));
    }
    if (nu.abs() - 0.5).abs() < f64::EPSILON {
        return Ok(KernelValue::exact(macdonald_half(z)));
    }
    macdonald_k_quadrature(nu, z, spec)
}

/// `K_ν(z)` from the cosh integral for every order, without closed form dispatch.
pub fn macdonald_k_quadrature(nu: f64, z: f64, spec: &QuadratureSpec) -> Result<KernelValue> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("K_nu needs z > 0, got {z}")));
    }
    let a = nu.abs();
    // exp(-z cosh u) = e^{-z} exp(-z (cosh u - 1)); the second factor stays O(1).
    let scaled = move |u: f64| {
        let c = if u < 1e-3 {
            let u2 = u * u;
            u2 / 2.0 * (1.0 + u2 / 12.0)
        } else {
            u.cosh() - 1.0
        };
        (-z * c).exp() * (a * u).cosh()
    };
    // log of the majorant exp(-z (cosh u - 1) + a u) is concave with slope
    // -max(1, z) at u0.
    let rate = z.max(1.0);
    let u0 = ((a + rate) / z).asinh();
    let scale = (-z * (u0.cosh() - 1.0) + a * u0).exp();
    let bound = DecayBound::new(rate).with_scale(scale).starting_at(u0);
    let r = quad::integrate_halfline_with(scaled, bound, spec)?;
    require_converged(&r, "K_nu")?;
    let e = (-z).exp();
    Ok(KernelValue::quadrature(r.value * e, r.error_estimate * e))
}

/// `K_ν(z) = ½ (z/2)^ν ∫_0^∞ t^{-ν-1} exp(-t - z²/4t) dt`, independent of
/// [`macdonald_k`].
pub fn macdonald_k_t_integral(nu: f64, z: f64, spec: &QuadratureSpec) -> Result<KernelValue> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("K_nu needs z > 0, got {z}")));
    }
    let q = z * z / 4.0;
    // t = e^v; integrand t^{-ν} exp(-t - q/t) in v.
    let ell = |v: f64| -v.exp() - q * (-v).exp() - nu * v;
    let dell = |v: f64| -v.exp() + q * (-v).exp() - nu;
    let r = integrate_log_concave(ell, dell, (z / 2.0).ln(), spec)?;
    require_converged(&r, "K_nu t-integral")?;
    let pre = 0.5 * (z / 2.0).powf(nu);
    Ok(KernelValue::quadrature(r.value * pre, r.error_estimate * pre))
}

fn check_radius(n: u32, r: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    if !r.is_finite() || r < 0.0 {
        return Err(Error::Domain(format!("radius must be finite and non-negative, got {r}")));
    }
    if n >= 2 && r < ORIGIN_FLOOR {
        return Err(Error::Singularity(format!(
            "G_{n} is infinite at the origin (|x| = {r:e})"
        )));
    }
    Ok(())
}

/// `G_n` as a function of the radius `r = |x|`.
pub fn bessel_potential_radial(n: u32, r: f64, spec: &QuadratureSpec) -> Result<KernelValue> {
    check_radius(n, r)?;
    match n {
        1 => Ok(KernelValue::exact(0.5 * (-r).exp())),
        3 => Ok(KernelValue::exact((-r).exp() / (4.0 * PI * r))),
        _ => {
            let nf = f64::from(n);
            let k = macdonald_k(nf / 2.0 - 1.0, r, spec)?;
            let pre = (2.0 * PI).powf(-nf / 2.0) * r.powf(1.0 - nf / 2.0);
            Ok(KernelValue::quadrature(k.value * pre, k.error_estimate * pre))
        }
    }
}

/// Bessel potential `G_n(x)`.
pub fn bessel_potential(n: u32, x: &Point, spec: &QuadratureSpec) -> Result<KernelValue> {
    check_dim(n, x)?;
    bessel_potential_radial(n, x.norm(), spec)
}

fn check_dim(n: u32, x: &Point) -> Result<()> {
    if x.dim() != n as usize {
        return Err(Error::Domain(format!(
            "point has {} coordinates, expected {n}",
            x.dim()
        )));
    }
    Ok(())
}

/// `G_n(r)` from the defining time integral, with no closed form shortcut.
pub fn bessel_potential_t_integral(n: u32, r: f64, spec: &QuadratureSpec) -> Result<KernelValue> {
    check_radius(n, r)?;
    let nf = f64::from(n);
    let q = r * r / 4.0;
    let ell = |v: f64| -q * (-v).exp() - v.exp() + (1.0 - nf / 2.0) * v;
    let dell = |v: f64| q * (-v).exp() - v.exp() + (1.0 - nf / 2.0);
    // Stationary point of ell: e^v solves w² - (1 - n/2)w - q = 0.
    let b = 1.0 - nf / 2.0;
    let w = 0.5 * (b + (b * b + 4.0 * q).sqrt());
    let center = if w > 0.0 { w.ln() } else { (r / 2.0).max(1e-300).ln() };
    let res = integrate_log_concave(ell, dell, center, spec)?;
    require_converged(&res, "G_n t-integral")?;
    let pre = (4.0 * PI).powf(-nf / 2.0);
    Ok(KernelValue::quadrature(res.value * pre, res.error_estimate * pre))
}

/// `G_{n,λ}(x) = G_n(√λ x)`.
pub fn bessel_potential_scaled(
    n: u32,
    lambda: f64,
    x: &Point,
    spec: &QuadratureSpec,
) -> Result<KernelValue> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("scaling needs lambda > 0, got {lambda}")));
    }
    check_dim(n, x)?;
    bessel_potential_radial(n, lambda.sqrt() * x.norm(), spec)
}

/// `|∇G_n|` as a function of the radius, by differentiating the time
/// integral under the integral sign:
/// `|∇G_n(x)| = (|x|/2) ∫_0^∞ t^{-1} (4πt)^{-n/2} exp(-|x|²/4t - t) dt`.
pub fn grad_bessel_potential_norm_radial(
    n: u32,
    r: f64,
    spec: &QuadratureSpec,
) -> Result<KernelValue> {
    if n < 2 {
        return Err(Error::Domain(format!("gradient norm needs n >= 2, got {n}")));
    }
    check_radius(n, r)?;
    let nf = f64::from(n);
    let q = r * r / 4.0;
    let ell = |v: f64| -q * (-v).exp() - v.exp() - nf / 2.0 * v;
    let dell = |v: f64| q * (-v).exp() - v.exp() - nf / 2.0;
    let res = integrate_log_concave(ell, dell, (r / 2.0).ln(), spec)?;
    require_converged(&res, "grad G_n")?;
    let pre = 0.5 * r * (4.0 * PI).powf(-nf / 2.0);
    Ok(KernelValue::quadrature(res.value * pre, res.error_estimate * pre))
}

/// `|∇G_n(x)|`.
pub fn grad_bessel_potential_norm(n: u32, x: &Point, spec: &QuadratureSpec) -> Result<KernelValue> {
    check_dim(n, x)?;
    grad_bessel_potential_norm_radial(n, x.norm(), spec)
}

/// Components `D_i G_n(x) = -(x_i/|x|) |∇G_n(x)|`.
pub fn grad_bessel_potential(n: u32, x: &Point, spec: &QuadratureSpec) -> Result<Vec<f64>> {
    let g = grad_bessel_potential_norm(n, x, spec)?;
    let r = x.norm();
    Ok(x.coords().iter().map(|c| -c / r * g.value).collect())
}

/// Leading small-radius form of `G_n(r)`:
/// `(1/2π)(ln(2/r) - γ)` for `n = 2` and `Γ(n/2-1) / (4 π^{n/2} r^{n-2})` for `n >= 3`.
/// Returned as a natural logarithm so that extremely small radii stay finite.
pub fn ln_bessel_potential_leading(n: u32, ln_r: f64) -> Result<f64> {
    match n {
        0 | 1 => Err(Error::Domain(format!("G_{n} has no singular asymptotics"))),
        2 => {
            let v = (2f64.ln() - ln_r - EULER_GAMMA) / (2.0 * PI);
            if v > 0.0 {
                Ok(v.ln())
            } else {
                Err(Error::Domain("radius outside the asymptotic regime".into()))
            }
        }
        _ => {
            let nf = f64::from(n);
            Ok(quad::gamma_half(n - 2).ln() - (4.0f64).ln() - nf / 2.0 * PI.ln() - (nf - 2.0) * ln_r)
        }
    }
}

/// Free heat kernel `P(t,x) = (4πt)^{-n/2} exp(-|x|²/4t)` by radius.
pub fn heat_kernel_free_radial(n: u32, t: f64, r: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("heat kernel needs t > 0, got {t}")));
    }
    Ok(heat_unchecked(n, t, r))
}

pub(crate) fn heat_unchecked(n: u32, t: f64, r: f64) -> f64 {
    (4.0 * PI * t).powf(-f64::from(n) / 2.0) * (-r * r / (4.0 * t)).exp()
}

/// Free heat kernel `P(t,x)`.
pub fn heat_kernel_free(n: u32, t: f64, x: &Point) -> Result<f64> {
    check_dim(n, x)?;
    heat_kernel_free_radial(n, t, x.norm())
}
