//! Point-interaction Laplacians `A_β` in two and three dimensions.
//!
//! `A_β` acts as `-Δ` off the origin on `D(A_β) = {u : τ_β u = 0}`. The
//! module provides domain membership, the action through finite differences
//! of the regular part, eigenpairs, the `α ↔ β` dictionary, the Krein
//! resolvent for `n = 3`, and the Green bilinear form.
//!
//! Sign convention: eigenfunctions satisfy `Δe = λe` off the origin, so
//! `A_β e = -λ e`. Every check in this crate is phrased through the pointwise
//! equation and `τ_β e = 0`, which do not depend on that choice.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::{Ext, ExtComplex, ExtReal};
use crate::quad::{gauss_legendre, integrate_finite, QuadratureSpec};
use crate::sobolev::{
    classify, tau_beta, Field, RepresentationCase,
    SingularDecomposition, SpaceContext,
};
use crate::specfun::{bessel_potential_radial, Point, ORIGIN_FLOOR};

/// Default tolerance for `|τ_β u|` in membership tests.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointInteraction {
    pub n: u32,
    pub beta: ExtReal,
}

impl PointInteraction {
    pub fn new(n: u32, beta: ExtReal) -> Result<Self> {
        if n != 2 && n != 3 {
            return Err(Error::Unsupported(format!(
                "point interactions are built for n = 2, 3, got {n}"
            )));
        }
        if let Ext::Finite(b) = beta {
            if !b.is_finite() {
                return Err(Error::Domain(format!("beta must be finite or inf, got {b}")));
            }
        }
        Ok(Self { n, beta })
    }

    pub fn alpha(&self) -> ExtReal {
        alpha_from_beta(self.n, self.beta)
    }
}

/// `α` for a given `β`.
///
/// For `n = 3` this is `α = 1/β - 1/(4π)`, the parametrization under which
/// the resolvent pole `√λ = -4πα` and the eigenvalue `(1 - 4π/β)²` agree
/// and `τ_β` vanishes on the explicit heat kernel. For `n = 2`, `α = 8π/β`.
pub fn alpha_from_beta(n: u32, beta: ExtReal) -> ExtReal {
    let shift = if n == 3 { 1.0 / (4.0 * PI) } else { 0.0 };
    let scale = if n == 3 { 1.0 } else { 8.0 * PI };
    match beta {
        Ext::Infinity => Ext::Finite(-shift),
        Ext::Finite(0.0) => Ext::Infinity,
        Ext::Finite(b) => Ext::Finite(scale / b - shift),
    }
}

/// Inverse of [`alpha_from_beta`].
pub fn beta_from_alpha(n: u32, alpha: ExtReal) -> ExtReal {
    let shift = if n == 3 { 1.0 / (4.0 * PI) } else { 0.0 };
    let scale = if n == 3 { 1.0 } else { 8.0 * PI };
    match alpha {
        Ext::Infinity => Ext::Finite(0.0),
        Ext::Finite(a) => {
            let den = a + shift;
            if den == 0.0 {
                Ext::Infinity
            } else {
                Ext::Finite(scale / den)
            }
        }
    }
}

/// The three-dimensional dictionary in the form `α = 8π/β - 1/(4π)`,
/// `β = 32π²/(1 + 4πα)`. It shares the special pairs with
/// [`alpha_from_beta`] but not its generic values.
pub fn alpha_from_beta_printed(beta: ExtReal) -> ExtReal {
    match beta {
        Ext::Infinity => Ext::Finite(-1.0 / (4.0 * PI)),
        Ext::Finite(0.0) => Ext::Infinity,
        Ext::Finite(b) => Ext::Finite(8.0 * PI / b - 1.0 / (4.0 * PI)),
    }
}

pub fn beta_from_alpha_printed(alpha: ExtReal) -> ExtReal {
    match alpha {
        Ext::Infinity => Ext::Finite(0.0),
        Ext::Finite(a) => {
            let den = 1.0 + 4.0 * PI * a;
            if den == 0.0 {
                Ext::Infinity
            } else {
                Ext::Finite(32.0 * PI * PI / den)
            }
        }
    }
}

/// Adjoint boundary parameter: `τ_β` pairs with `τ_{β̄}`.
pub fn adjoint_parameter(beta: ExtComplex) -> ExtComplex {
    match beta {
        Ext::Finite(b) => Ext::Finite(b.conj()),
        Ext::Infinity => Ext::Infinity,
    }
}

/// Eigenvalue and eigenfunction of a point interaction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub n: u32,
    /// `λ > 0` with `Δe = λe` off the origin.
    pub lambda: f64,
}

impl EigenPair {
    /// Decay rate `√λ` of the eigenfunction.
    pub fn rate(&self) -> f64 {
        self.lambda.sqrt()
    }

    /// `e(r)`: `G_2(√λ r)` for `n = 2`, `e^{-√λ r}/(4πr)` for `n = 3`.
    pub fn value_radial(&self, r: f64, spec: &QuadratureSpec) -> Result<f64> {
        match self.n {
            2 => Ok(bessel_potential_radial(2, self.rate() * r, spec)?.value),
            _ => {
                if !(r > ORIGIN_FLOOR) {
                    return Err(Error::Singularity(format!("eigenfunction at radius {r}")));
                }
                Ok((-self.rate() * r).exp() / (4.0 * PI * r))
            }
        }
    }

    pub fn value(&self, x: &Point, spec: &QuadratureSpec) -> Result<f64> {
        self.value_radial(x.norm(), spec)
    }

    /// Regular part `e - G_n` as a function of the radius.
    pub fn regular_part_radial(&self, r: f64, spec: &QuadratureSpec) -> Result<f64> {
        let k = self.rate();
        match self.n {
            2 => {
                if r <= ORIGIN_FLOOR {
                    return Ok(-k.ln() / (2.0 * PI));
                }
                let e = bessel_potential_radial(2, k * r, spec)?.value;
                let g = bessel_potential_radial(2, r, spec)?.value;
                Ok(e - g)
            }
            _ => {
                if r <= ORIGIN_FLOOR {
                    return Ok((1.0 - k) / (4.0 * PI));
                }
                // (e^{-kr} - e^{-r}) / (4πr) without cancellation.
                let diff = (-r).exp() * ((1.0 - k) * r).exp_m1();
                Ok(diff / (4.0 * PI * r))
            }
        }
    }

    /// `e = G_n + f` with `c₀ = 1`.
    pub fn decomposition(&self, p: f64, spec: &QuadratureSpec) -> Result<SingularDecomposition> {
        let ctx = SpaceContext::new(self.n, p)?;
        let f0 = self.regular_part_radial(0.0, spec)?;
        let me = *self;
        let spec = *spec;
        let f: Field = Arc::new(move |x: &[f64]| {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            Complex64::new(me.regular_part_radial(r, &spec).unwrap_or(f64::NAN), 0.0)
        });
        Ok(SingularDecomposition::scalar(ctx, Complex64::new(1.0, 0.0), Some(Complex64::new(f0, 0.0)))
            .with_regular_part(f))
    }
}

/// Eigenpair of `A_β`, if any.
///
/// `n = 2`: `λ = e^{-2/β}` for every `β ≠ 0` (`λ = 1` at `β = ∞`).
/// `n = 3`: `λ = (1 - 4π/β)²` for `β < 0` or `β > 4π` (`λ = 1` at `β = ∞`).
pub fn eigenvalue(pi: &PointInteraction) -> Option<EigenPair> {
    let lambda = match (pi.n, pi.beta) {
        (_, Ext::Infinity) => 1.0,
        (_, Ext::Finite(0.0)) => return None,
        (2, Ext::Finite(b)) => (-2.0 / b).exp(),
        (_, Ext::Finite(b)) => {
            let k = 1.0 - 4.0 * PI / b;
            if k <= 0.0 {
                return None;
            }
            k * k
        }
    };
    Some(EigenPair { n: pi.n, lambda })
}

/// The point spectrum in the `α` parametrization with the opposite sign
/// convention: `-e^{-α}` for `n = 2` and `-(4πα)²` for `n = 3`, `α < 0`.
pub fn alpha_point_spectrum(pi: &PointInteraction) -> Option<f64> {
    match (pi.n, pi.alpha()) {
        (_, Ext::Infinity) => None,
        (2, Ext::Finite(a)) => Some(-(-a).exp()),
        (_, Ext::Finite(a)) if a < 0.0 => Some(-(4.0 * PI * a).powi(2)),
        _ => None,
    }
}

/// Whether `τ_β u = 0` within `tol`.
pub fn domain_membership(d: &SingularDecomposition, pi: &PointInteraction, tol: f64) -> Result<bool> {
    check_frame(d, pi)?;
    d.validate()?;
    if classify(&d.ctx) == RepresentationCase::Regular {
        return Ok(true);
    }
    match pi.beta {
        Ext::Finite(0.0) => Ok(d.c0.norm() <= tol),
        Ext::Infinity => {
            let f0 = d
                .f0
                .ok_or_else(|| Error::Contract("membership in D(A_inf) needs f(0)".into()))?;
            Ok(f0.norm() <= tol)
        }
        beta => Ok(tau_beta(d, beta.into())?.norm() <= tol),
    }
}

fn check_frame(d: &SingularDecomposition, pi: &PointInteraction) -> Result<()> {
    if d.ctx.n != pi.n {
        return Err(Error::Contract(format!(
            "decomposition lives in dimension {}, operator in {}",
            d.ctx.n, pi.n
        )));
    }
    Ok(())
}

/// Finite-difference step `10⁻³·max(1, |x|)`, capped at `|x|/4`.
pub fn default_fd_step(x: &[f64]) -> f64 {
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    (1e-3 * r.max(1.0)).min(0.25 * r.max(ORIGIN_FLOOR))
}

/// Laplacian by central differences with one Richardson step.
pub fn laplacian(f: &dyn Fn(&[f64]) -> Complex64, x: &[f64], h: f64) -> Complex64 {
    let centre = f(x);
    let stencil = |h: f64| {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut y = x.to_vec();
        for i in 0..x.len() {
            y[i] = x[i] + h;
            let up = f(&y);
            y[i] = x[i] - h;
            let down = f(&y);
            y[i] = x[i];
            acc += up + down - 2.0 * centre;
        }
        acc / (h * h)
    };
    (4.0 * stencil(h / 2.0) - stencil(h)) / 3.0
}

/// `A_β u = -c₀ G_n - Δf` off the origin, with `Δf` by finite differences.
pub fn apply_a_beta(
    d: &SingularDecomposition,
    pi: &PointInteraction,
    tol: f64,
    spec: &QuadratureSpec,
) -> Result<Field> {
    if !domain_membership(d, pi, tol)? {
        return Err(Error::Domain("function is not in the domain of A_beta".into()));
    }
    let f = d
        .f_eval
        .clone()
        .ok_or_else(|| Error::Contract("applying A_beta needs an evaluable regular part".into()))?;
    let n = d.ctx.n;
    let c0 = d.c0;
    let spec = *spec;
    Ok(Arc::new(move |x: &[f64]| {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let singular = if c0.norm() == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            c0 * bessel_potential_radial(n, r, &spec).map(|k| k.value).unwrap_or(f64::NAN)
        };
        -singular - laplacian(&*f, x, default_fd_step(x))
    }))
}

/// A source term `h` for the resolvent, vanishing outside `|y| <= support`.
#[derive(Clone)]
pub enum Source {
    /// `h(y) = profile(|y|)`.
    Radial {
        profile: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
        support: f64,
    },
    /// Spherical means use an `m × m` product rule, `m = angular_nodes`.
    General {
        field: Field,
        support: f64,
        angular_nodes: usize,
    },
}

impl std::fmt::Debug for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Source::Radial { support, .. } => write!(f, "Source::Radial {{ support: {support} }}"),
            Source::General { support, .. } => write!(f, "Source::General {{ support: {support} }}"),
        }
    }
}

impl Source {
    pub fn radial(profile: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>, support: f64) -> Self {
        Source::Radial { profile, support }
    }

    /// General source with the default 32-node angular rule.
    pub fn general(field: Field, support: f64) -> Self {
        Source::General {
            field,
            support,
            angular_nodes: 32,
        }
    }

    pub fn with_angular_nodes(mut self, m: usize) -> Self {
        if let Source::General { angular_nodes, .. } = &mut self {
            *angular_nodes = m.max(2);
        }
        self
    }

    pub fn support(&self) -> f64 {
        match self {
            Source::Radial { support, .. } | Source::General { support, .. } => *support,
        }
    }

    pub fn eval(&self, y: &[f64]) -> Complex64 {
        match self {
            Source::Radial { profile, .. } => {
                profile(y.iter().map(|v| v * v).sum::<f64>().sqrt())
            }
            Source::General { field, .. } => field(y),
        }
    }
}

/// Mean of `h` over the sphere of radius `s` around `x` (n = 3).
pub(crate) fn spherical_mean(h: &Field, x: &[f64], s: f64, rule: &(Vec<f64>, Vec<f64>)) -> Complex64 {
    let (mu, w) = rule;
    let nodes = mu.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for (ci, wi) in mu.iter().zip(w) {
        let si = (1.0 - ci * ci).max(0.0).sqrt();
        for j in 0..nodes {
            let phi = 2.0 * PI * (j as f64) / nodes as f64;
            let y = [
                x[0] + s * si * phi.cos(),
                x[1] + s * si * phi.sin(),
                x[2] + s * ci,
            ];
            acc += wi * h(&y);
        }
    }
    acc / (2.0 * nodes as f64)
}

/// Free resolvent `[(λ - Δ)^{-1} h](x)` in three dimensions.
pub fn free_resolvent_apply(
    lambda: f64,
    h: &Source,
    x: &Point,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("resolvent needs lambda > 0, got {lambda}")));
    }
    if x.dim() != 3 {
        return Err(Error::Unsupported("the resolvent is implemented for n = 3".into()));
    }
    let k = lambda.sqrt();
    let a = x.norm();
    let support = h.support();
    if !(support > 0.0) || !support.is_finite() {
        return Err(Error::Domain(format!("source support must be positive, got {support}")));
    }
    match h {
        Source::Radial { profile, .. } => {
            // Spherical average of e^{-k|x-y|}/(4π|x-y|) over |y| = b, times 4πb².
            let kernel = |b: f64| -> f64 {
                if a == 0.0 {
                    return b * (-k * b).exp();
                }
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                let z = k * lo;
                let shc = if z < 1e-8 { 1.0 + z * z / 6.0 } else { z.sinh() / z };
                b * lo / a * (-k * hi).exp() * shc
            };
            let integrand = |b: f64| profile(b) * kernel(b);
            let mut total = Complex64::new(0.0, 0.0);
            let mut breaks = vec![0.0];
            if a > 0.0 && a < support {
                breaks.push(a);
            }
            breaks.push(support);
            for w in breaks.windows(2) {
                let res = integrate_finite(integrand, w[0], w[1], spec)?;
                require(&res.converged, res.error_estimate)?;
                total += res.value;
            }
            Ok(total)
        }
        Source::General {
            field,
            angular_nodes,
            ..
        } => {
            let xs = x.coords().to_vec();
            let rule = gauss_legendre(*angular_nodes);
            let integrand = |s: f64| (-k * s).exp() * s * spherical_mean(field, &xs, s, &rule);
            let res = integrate_finite(integrand, 0.0, a + support, spec)?;
            require(&res.converged, res.error_estimate)?;
            Ok(res.value)
        }
    }
}

fn require(converged: &bool, err: f64) -> Result<()> {
    if *converged {
        Ok(())
    } else {
        Err(Error::NonConvergent(format!("resolvent quadrature: error estimate {err:e}")))
    }
}

/// Rank-one data of `(λ + A_β)^{-1} h = R_λ∗h + γ R_λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KreinCorrection {
    pub lambda: f64,
    /// `[R_λ∗h](0)`.
    pub free_at_origin: Complex64,
    /// `Γ(λ) = 4π/(√λ + 4πα)`.
    pub gamma: f64,
    /// `γ = Γ(λ)·[R_λ∗h](0)`, the coefficient of `R_λ(x) = e^{-√λ|x|}/(4π|x|)`.
    pub coefficient: Complex64,
}

/// `Γ(λ) = 4π/(√λ + 4πα)`; zero at `α = ∞`.
pub fn krein_gamma(pi: &PointInteraction, lambda: f64) -> Result<f64> {
    if pi.n != 3 {
        return Err(Error::Unsupported("the Krein resolvent is implemented for n = 3".into()));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("resolvent needs lambda > 0, got {lambda}")));
    }
    match pi.alpha() {
        Ext::Infinity => Ok(0.0),
        Ext::Finite(alpha) => {
            let den = lambda.sqrt() + 4.0 * PI * alpha;
            if den.abs() <= 1e-12 * lambda.sqrt().max(1.0) {
                Err(Error::Pole(format!("lambda = {lambda} is an eigenvalue of A_beta")))
            } else {
                Ok(4.0 * PI / den)
            }
        }
    }
}

pub fn krein_correction(
    pi: &PointInteraction,
    lambda: f64,
    h: &Source,
    spec: &QuadratureSpec,
) -> Result<KreinCorrection> {
    let gamma = krein_gamma(pi, lambda)?;
    let free_at_origin = if gamma == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        free_resolvent_apply(lambda, h, &Point::new(vec![0.0; 3]), spec)?
    };
    Ok(KreinCorrection {
        lambda,
        free_at_origin,
        gamma,
        coefficient: gamma * free_at_origin,
    })
}

/// `[(λ + A_β)^{-1} h](x)` for `n = 3`.
pub fn resolvent_apply(
    pi: &PointInteraction,
    lambda: f64,
    h: &Source,
    x: &Point,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let corr = krein_correction(pi, lambda, h, spec)?;
    resolvent_apply_with(&corr, h, x, spec)
}

/// As [`resolvent_apply`], reusing a computed correction.
pub fn resolvent_apply_with(
    corr: &KreinCorrection,
    h: &Source,
    x: &Point,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let free = free_resolvent_apply(corr.lambda, h, x, spec)?;
    if corr.coefficient.norm() == 0.0 {
        return Ok(free);
    }
    let r = x.norm();
    if !(r > ORIGIN_FLOOR) {
        return Err(Error::Singularity("resolvent is singular at the origin".into()));
    }
    let k = corr.lambda.sqrt();
    Ok(free + corr.coefficient * (-k * r).exp() / (4.0 * PI * r))
}

/// Green form `ℰ(u, v)` for `u` in the `p` frame and `v` in the conjugate frame.
pub fn green_form(u: &SingularDecomposition, v: &SingularDecomposition) -> Result<Complex64> {
    if u.ctx.n != v.ctx.n {
        return Err(Error::Contract("green form needs a common dimension".into()));
    }
    if (1.0 / u.ctx.p + 1.0 / v.ctx.p - 1.0).abs() > 1e-12 {
        return Err(Error::Contract(format!(
            "green form needs conjugate exponents, got {} and {}",
            u.ctx.p, v.ctx.p
        )));
    }
    u.validate()?;
    v.validate()?;
    let cu = u.case();
    let cv = v.case();
    let zero = Complex64::new(0.0, 0.0);
    let mut total = zero;
    if cu != RepresentationCase::Regular {
        let g0 = v.f0.ok_or_else(|| missing("g(0)", cu))?;
        total += u.c0 * g0.conj();
    }
    if cu == RepresentationCase::FullSingular {
        let dg = v.grad_f0.as_ref().ok_or_else(|| missing("grad g(0)", cu))?;
        total -= dot(&u.c, dg)?;
    }
    if cv != RepresentationCase::Regular {
        let f0 = u.f0.ok_or_else(|| missing("f(0)", cv))?;
        total -= f0 * v.c0.conj();
    }
    if cv == RepresentationCase::FullSingular {
        let df = u.grad_f0.as_ref().ok_or_else(|| missing("grad f(0)", cv))?;
        total += dot(&v.c, df)?.conj();
    }
    Ok(total)
}

fn missing(what: &str, case: RepresentationCase) -> Error {
    Error::Contract(format!("{what} is required when the partner is in the {case} case"))
}

/// `Σ aᵢ conj(bᵢ)`.
fn dot(a: &[Complex64], b: &[Complex64]) -> Result<Complex64> {
    if a.len() != b.len() {
        return Err(Error::Contract("gradient lengths differ".into()));
    }
    Ok(a.iter().zip(b).map(|(x, y)| x * y.conj()).sum())
}

/// Whether a one-dimensional splitting satisfies `c = B·(f(0), f'(0))`.
pub fn domain_membership_1d(
    d: &SingularDecomposition,
    b: &[[Complex64; 2]; 2],
    tol: f64,
) -> Result<bool> {
    if d.ctx.n != 1 {
        return Err(Error::Contract("one-dimensional membership needs n = 1".into()));
    }
    let f0 = d.f0.ok_or_else(|| Error::Contract("missing f(0)".into()))?;
    let f1 = d
        .grad_f0
        .as_ref()
        .map(|g| g[0])
        .ok_or_else(|| Error::Contract("missing f'(0)".into()))?;
    let r0 = d.c0 - (b[0][0] * f0 + b[0][1] * f1);
    let r1 = d.c[0] - (b[1][0] * f0 + b[1][1] * f1);
    Ok(r0.norm() <= tol && r1.norm() <= tol)
}
