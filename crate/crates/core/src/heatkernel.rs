//! Heat kernel of the three-dimensional point interaction.
//!
//! `𝒢_β(t,x,y) = P(t,x-y) + (2t/|x||y|) P(t,|x|+|y|) · M`, where
//! `M = 1 - 4πα ∫_0^∞ e^{-4παu - u(|x|+|y|)/2t - u²/4t} du`. Integrating by
//! parts gives the cancellation-free form
//! `M = (1/2t) ∫_0^∞ (s+u) e^{-c u - u²/4t} du` with `s = |x|+|y|` and
//! `c = 4πα + s/2t`, which is what is evaluated here. `M = 0` at `α = ∞`,
//! `M = 1` at `α = 0`, and `M` decreases in `α`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::{Ext, ExtReal};
use crate::operators::{spherical_mean, PointInteraction, Source};
use crate::quad::{
    gauss_legendre, integrate_finite, integrate_tail, DecayBound, QuadResult, QuadratureSpec,
};
use crate::sobolev::{SingularDecomposition, SpaceContext};
use crate::specfun::{heat_unchecked, KernelValue, Point, ORIGIN_FLOOR};

#[derive(Debug, Clone, PartialEq)]
pub struct HeatKernelQuery {
    pub t: f64,
    pub x: Point,
    pub y: Point,
    pub pi: PointInteraction,
}

impl HeatKernelQuery {
    pub fn new(t: f64, x: Point, y: Point, pi: PointInteraction) -> Result<Self> {
        check_time(t)?;
        check_three(&pi)?;
        for p in [&x, &y] {
            if p.dim() != 3 {
                return Err(Error::Domain(format!("points must lie in R^3, got dimension {}", p.dim())));
            }
            if !(p.norm() > ORIGIN_FLOOR) {
                return Err(Error::Singularity("heat kernel points must avoid the origin".into()));
            }
        }
        Ok(Self { t, x, y, pi })
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time must be positive, got {t}")));
    }
    Ok(())
}

fn check_three(pi: &PointInteraction) -> Result<()> {
    if pi.n != 3 {
        return Err(Error::Unsupported(format!(
            "the explicit heat kernel is three-dimensional, got n = {}",
            pi.n
        )));
    }
    Ok(())
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > ORIGIN_FLOOR) || !r.is_finite() {
        return Err(Error::Singularity(format!("radius {r} is at or below the origin floor")));
    }
    Ok(())
}

/// `M(α; s, t) = (1/2t) ∫_0^∞ (s+u) e^{-(4πα + s/2t)u - u²/4t} du`.
pub fn boundary_factor(alpha: ExtReal, s: f64, t: f64, spec: &QuadratureSpec) -> Result<QuadResult<f64>> {
    check_time(t)?;
    if !(s > 0.0) {
        return Err(Error::Domain(format!("boundary factor needs s > 0, got {s}")));
    }
    let alpha = match alpha {
        Ext::Infinity => {
            return Ok(QuadResult {
                value: 0.0,
                error_estimate: 0.0,
                subdivisions_used: 0,
                converged: true,
            })
        }
        Ext::Finite(a) => a,
    };
    if alpha == 0.0 {
        return Ok(QuadResult {
            value: 1.0,
            error_estimate: 0.0,
            subdivisions_used: 0,
            converged: true,
        });
    }
    let c = 4.0 * PI * alpha + s / (2.0 * t);
    let ell = |u: f64| (s + u).ln() - c * u - u * u / (4.0 * t);
    let slope = |u: f64| 1.0 / (s + u) - c - u / (2.0 * t);
    let f = |u: f64| ell(u).exp() / (2.0 * t);
    // Past the peak the log-integrand is concave with slope below -rate.
    let rate = 1.0 / t.sqrt();
    let step = t.sqrt();
    let mut u1 = (-2.0 * t * c).max(0.0);
    let mut guard = 0;
    while slope(u1) > -rate {
        u1 += step;
        guard += 1;
        if guard > 10_000 {
            return Err(Error::NonConvergent("boundary factor: no decay found".into()));
        }
    }
    let bound = DecayBound::new(-slope(u1))
        .with_scale(f(u1))
        .starting_at(u1);
    let tail = integrate_tail(f, u1, bound, spec)?;
    let head = if u1 > 0.0 {
        integrate_finite(f, 0.0, u1, spec)?
    } else {
        QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            subdivisions_used: 0,
            converged: true,
        }
    };
    let res = QuadResult {
        value: head.value + tail.value,
        error_estimate: head.error_estimate + tail.error_estimate,
        subdivisions_used: head.subdivisions_used + tail.subdivisions_used,
        converged: head.converged && tail.converged,
    };
    if !res.converged {
        return Err(Error::NonConvergent(format!(
            "boundary factor: error estimate {:e}",
            res.error_estimate
        )));
    }
    Ok(res)
}

/// `𝒢_β` from `|x|`, `|y|`, `|x-y|`.
pub fn heat_kernel_beta_radial(
    pi: &PointInteraction,
    t: f64,
    a: f64,
    b: f64,
    distance: f64,
    spec: &QuadratureSpec,
) -> Result<KernelValue> {
    check_three(pi)?;
    check_time(t)?;
    check_radius(a)?;
    check_radius(b)?;
    let free = heat_unchecked(3, t, distance);
    let m = boundary_factor(pi.alpha(), a + b, t, spec)?;
    let pre = 2.0 * t / (a * b) * heat_unchecked(3, t, a + b);
    let value = free + pre * m.value;
    if !value.is_finite() {
        return Err(Error::NonFinite { abscissa: a + b });
    }
    if m.subdivisions_used == 0 {
        Ok(KernelValue::exact(value))
    } else {
        Ok(KernelValue::quadrature(value, pre * m.error_estimate))
    }
}

pub fn heat_kernel_beta(q: &HeatKernelQuery, spec: &QuadratureSpec) -> Result<KernelValue> {
    heat_kernel_beta_radial(&q.pi, q.t, q.x.norm(), q.y.norm(), q.x.distance(&q.y), spec)
}

/// `(8πt/|y|) P(t,y)`, the value of `R_β` at `α = 0` and its upper envelope for `α ≥ 0`.
pub fn r_beta_envelope(t: f64, b: f64) -> f64 {
    8.0 * PI * t / b * heat_unchecked(3, t, b)
}

/// Boundary response `R_β(t,y) = lim_{x→0} 𝒢_β(t,x,y)/G_3(x)` by radius.
pub fn r_beta_radial(pi: &PointInteraction, t: f64, b: f64, spec: &QuadratureSpec) -> Result<KernelValue> {
    check_three(pi)?;
    check_time(t)?;
    check_radius(b)?;
    let env = r_beta_envelope(t, b);
    let m = boundary_factor(pi.alpha(), b, t, spec)?;
    Ok(KernelValue::quadrature(env * m.value, env * m.error_estimate))
}

pub fn r_beta(t: f64, y: &Point, pi: &PointInteraction, spec: &QuadratureSpec) -> Result<KernelValue> {
    if y.dim() != 3 {
        return Err(Error::Domain("R_beta lives in R^3".into()));
    }
    r_beta_radial(pi, t, y.norm(), spec)
}

/// Ratios `𝒢_β(t,x_k,y)/G_3(x_k)` for `|x_k| = 2^{-k}` and their limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitDiagnostic {
    pub radii: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Intercept of a quadratic fit in `|x|`.
    pub extrapolated: f64,
    /// Closed value of `R_β(t,y)`.
    pub closed: f64,
    /// Whether `|ratio_k - closed|` decreases along the sequence.
    pub monotone: bool,
}

impl LimitDiagnostic {
    pub fn relative_gap(&self) -> f64 {
        (self.extrapolated - self.closed).abs() / self.closed.abs().max(f64::MIN_POSITIVE)
    }
}

/// Samples along the first axis at `|x| = 2^{-k}`, `k = 6..=14`.
pub fn r_beta_limit_diagnostic(
    t: f64,
    y: &Point,
    pi: &PointInteraction,
    spec: &QuadratureSpec,
) -> Result<LimitDiagnostic> {
    let closed = r_beta(t, y, pi, spec)?.value;
    let radii: Vec<f64> = (6..=14).map(|k| 2f64.powi(-k)).collect();
    let ratios = radii
        .iter()
        .map(|&a| {
            let mut xc = vec![0.0; 3];
            xc[0] = a;
            let x = Point::new(xc);
            let g = heat_kernel_beta_radial(pi, t, a, y.norm(), x.distance(y), spec)?.value;
            Ok(g * 4.0 * PI * a * a.exp())
        })
        .collect::<Result<Vec<f64>>>()?;
    let design = DMatrix::from_fn(radii.len(), 3, |i, j| radii[i].powi(j as i32) / radii[0].powi(j as i32));
    let rhs = DVector::from_column_slice(&ratios);
    let coef = design
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::NonConvergent(format!("limit fit failed: {e}")))?;
    let gaps: Vec<f64> = ratios.iter().map(|r| (r - closed).abs()).collect();
    let monotone = gaps.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-15 * closed.abs());
    Ok(LimitDiagnostic {
        radii,
        ratios,
        extrapolated: coef[0],
        closed,
        monotone,
    })
}

/// `c(α,T) = 1 - 4πα ∫_0^∞ e^{-4π|α|u - u²/4T} du`.
pub fn c_lower_bound(alpha: f64, horizon: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_time(horizon)?;
    if !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must be finite, got {alpha}")));
    }
    if alpha == 0.0 {
        return Ok(1.0);
    }
    let rate = 4.0 * PI * alpha.abs();
    let f = |u: f64| (-rate * u - u * u / (4.0 * horizon)).exp();
    let res = integrate_tail(f, 0.0, DecayBound::new(rate), spec)?;
    if !res.converged {
        return Err(Error::NonConvergent("c(alpha, T) quadrature".into()));
    }
    Ok(1.0 - 4.0 * PI * alpha * res.value)
}

/// Upper envelope `η(y) = 4πe((4πt)^{-3/2} 1_{|y|≤1} + P(t,|y|-1) + (2t/|y|)P(t,y))`
/// of `𝒢_β(t,x,y)/G_3(x)` over `|x| ≤ 1`, valid for `α ≥ 0`.
pub fn eta_envelope(t: f64, b: f64) -> f64 {
    let near = if b <= 1.0 { (4.0 * PI * t).powf(-1.5) } else { 0.0 };
    4.0 * PI
        * std::f64::consts::E
        * (near + heat_unchecked(3, t, b - 1.0) + 2.0 * t / b * heat_unchecked(3, t, b))
}

/// `γ ↦ γ G_n`, viewed in the `p = 2` frame.
pub fn dirichlet_map(gamma: Complex64, n: u32) -> Result<SingularDecomposition> {
    let ctx = SpaceContext::new(n, 2.0)?;
    Ok(SingularDecomposition::scalar(ctx, gamma, Some(Complex64::new(0.0, 0.0)))
        .with_regular_part(std::sync::Arc::new(|_: &[f64]| Complex64::new(0.0, 0.0))))
}

/// `4πb² × (spherical mean of P(t,x-y) over |y| = b)` for `|x| = a`.
fn free_shell_kernel(t: f64, a: f64, b: f64) -> f64 {
    let norm = (4.0 * PI * t).powf(-0.5);
    if a == 0.0 {
        return 4.0 * PI * b * b * heat_unchecked(3, t, b);
    }
    let d = a - b;
    b / a * norm * (-d * d / (4.0 * t)).exp() * -(-a * b / t).exp_m1()
}

/// Panel breakpoints on `[0, upper]` around a Gaussian bump at `centre`.
fn breakpoints(upper: f64, centre: f64, width: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    for p in [centre - 8.0 * width, centre, centre + 8.0 * width] {
        if p > 0.0 && p < upper {
            pts.push(p);
        }
    }
    pts.push(upper);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    pts
}

fn integrate_pieces(
    f: impl Fn(f64) -> Complex64,
    pts: &[f64],
    spec: &QuadratureSpec,
    what: &str,
) -> Result<(Complex64, f64)> {
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for w in pts.windows(2) {
        let r = integrate_finite(&f, w[0], w[1], spec)?;
        if !r.converged {
            return Err(Error::NonConvergent(format!("{what}: error estimate {:e}", r.error_estimate)));
        }
        total += r.value;
        err += r.error_estimate;
    }
    Ok((total, err))
}

/// `[S_β(t)v](x) = ∫ 𝒢_β(t,x,y) v(y) dy` for a source vanishing outside its support.
pub fn semigroup_apply(
    pi: &PointInteraction,
    t: f64,
    v: &Source,
    x: &Point,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    check_three(pi)?;
    check_time(t)?;
    if x.dim() != 3 {
        return Err(Error::Domain("semigroup acts on R^3".into()));
    }
    let a = x.norm();
    check_radius(a)?;
    let support = v.support();
    let alpha = pi.alpha();
    let width = t.sqrt();
    // Singular part: (8πtb/a) P(t,a+b) M(α; a+b, t) against the mean of v over |y| = b.
    let singular_weight = |b: f64| -> f64 {
        if alpha == Ext::Infinity || b <= 0.0 {
            return 0.0;
        }
        let m = boundary_factor(alpha, a + b, t, spec).map(|m| m.value).unwrap_or(f64::NAN);
        8.0 * PI * t * b / a * heat_unchecked(3, t, a + b) * m
    };
    match v {
        Source::Radial { profile, .. } => {
            let f = |b: f64| profile(b) * (free_shell_kernel(t, a, b) + singular_weight(b));
            let pts = breakpoints(support, a, width);
            Ok(integrate_pieces(f, &pts, spec, "semigroup")?.0)
        }
        Source::General {
            field,
            angular_nodes,
            ..
        } => {
            let rule = gauss_legendre(*angular_nodes);
            let xs = x.coords().to_vec();
            let free = |s: f64| {
                4.0 * PI * s * s * heat_unchecked(3, t, s) * spherical_mean(field, &xs, s, &rule)
            };
            let upper = a + support;
            let reach = (upper).min(12.0 * width);
            let (first, _) = integrate_pieces(free, &[0.0, reach], spec, "semigroup")?;
            if alpha == Ext::Infinity {
                return Ok(first);
            }
            let origin = [0.0; 3];
            let sing = |b: f64| singular_weight(b) * spherical_mean(field, &origin, b, &rule);
            let (second, _) = integrate_pieces(sing, &[0.0, support], spec, "semigroup")?;
            Ok(first + second)
        }
    }
}

/// `∫ R_β(t,y) v(y) dy`.
pub fn boundary_response(
    pi: &PointInteraction,
    t: f64,
    v: &Source,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    check_three(pi)?;
    check_time(t)?;
    let weight = |b: f64| -> f64 {
        if b <= 0.0 {
            return 0.0;
        }
        4.0 * PI * b * b * r_beta_radial(pi, t, b, spec).map(|k| k.value).unwrap_or(f64::NAN)
    };
    let support = v.support();
    match v {
        Source::Radial { profile, .. } => {
            Ok(integrate_pieces(|b| profile(b) * weight(b), &[0.0, support], spec, "boundary response")?.0)
        }
        Source::General {
            field,
            angular_nodes,
            ..
        } => {
            let rule = gauss_legendre(*angular_nodes);
            let origin = [0.0; 3];
            let f = |b: f64| weight(b) * spherical_mean(field, &origin, b, &rule);
            Ok(integrate_pieces(f, &[0.0, support], spec, "boundary response")?.0)
        }
    }
}
