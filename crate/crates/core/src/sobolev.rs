//! Singular Sobolev spaces on the punctured space.
//!
//! A function `u` on ℝⁿ∖{0} with `u, Δu ∈ Lᵖ` splits uniquely as
//! `u = c₀ G_n + Σ cᵢ ∂ᵢG_n + f` with `f ∈ W^{2,p}(ℝⁿ)`. Which singular terms
//! survive depends on where `p` sits relative to `n/(n-1)` and `n/(n-2)`.
//! This module classifies `(n, p)`, solves the exact one-dimensional
//! splitting, extracts `c₀` and `f(0)` from point samples, and evaluates the
//! boundary functional `τ_β u = c₀ - β f(0)` together with the
//! density and polarity predicates that depend only on `(n, p)`.
//!
//! In two dimensions the boundary functional is taken in the normalization
//! `τ_β u = c₀ - 2π β f(0)`; see [`boundary_normalization`].

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::ExtComplex;
use crate::quad::QuadratureSpec;
use crate::specfun::{bessel_potential_radial, ORIGIN_FLOOR};

/// Evaluable complex function on ℝⁿ.
pub type Field = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// Dimension and integrability exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceContext {
    pub n: u32,
    pub p: f64,
}

impl SpaceContext {
    pub fn new(n: u32, p: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::Domain(format!("exponent must lie in (1, inf), got {p}")));
        }
        Ok(Self { n, p })
    }

    /// Conjugate exponent `q = p/(p-1)`.
    pub fn q(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    /// The frame with the conjugate exponent.
    pub fn dual(&self) -> Self {
        Self {
            n: self.n,
            p: self.q(),
        }
    }

    /// `n/(n-1)`, infinite for `n = 1`.
    pub fn lower_critical(&self) -> f64 {
        critical(self.n, 1)
    }

    /// `n/(n-2)`, infinite for `n <= 2`.
    pub fn upper_critical(&self) -> f64 {
        critical(self.n, 2)
    }
}

fn critical(n: u32, k: u32) -> f64 {
    if n <= k {
        f64::INFINITY
    } else {
        f64::from(n) / f64::from(n - k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RepresentationCase {
    /// `c₀ G_n + Σ cᵢ ∂ᵢG_n + f`.
    FullSingular,
    /// `c₀ G_n + f`.
    ScalarSingular,
    /// `f` only.
    Regular,
}

impl RepresentationCase {
    /// Number of singular coefficients.
    pub fn singular_dim(self, n: u32) -> u32 {
        match self {
            Self::FullSingular => n + 1,
            Self::ScalarSingular => 1,
            Self::Regular => 0,
        }
    }
}

impl fmt::Display for RepresentationCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

pub fn classify(ctx: &SpaceContext) -> RepresentationCase {
    if ctx.p < ctx.lower_critical() {
        RepresentationCase::FullSingular
    } else if ctx.p < ctx.upper_critical() {
        RepresentationCase::ScalarSingular
    } else {
        RepresentationCase::Regular
    }
}

/// Whether derivatives of order `order` of the Dirac mass lie in `W^{-2,p}(ℝⁿ)`.
pub fn dirac_derivative_in_negative_sobolev(order: u32, ctx: &SpaceContext) -> bool {
    match order {
        0 => ctx.p < ctx.upper_critical(),
        1 => ctx.p < ctx.lower_critical(),
        _ => false,
    }
}

/// Constant `κ_n` in `τ_β u = c₀ - β κ_n f(0)`.
///
/// With `κ_2 = 2π` the two-dimensional shift of the regular part under
/// `G_2 ↦ G_{2,λ}` equals `(log λ)/2` per unit `c₀` and the eigenvalue of
/// `A_β` is `e^{-2/β}`; the raw shift is `(log λ)/(4π)`.
pub fn boundary_normalization(n: u32) -> f64 {
    if n == 2 {
        2.0 * PI
    } else {
        1.0
    }
}

/// Coefficients of the singular/regular splitting of one function.
#[derive(Clone)]
pub struct SingularDecomposition {
    pub ctx: SpaceContext,
    /// Coefficient of `G_n`.
    pub c0: Complex64,
    /// Coefficients of `∂ᵢG_n`.
    pub c: Vec<Complex64>,
    /// `f(0)`, when point values of the regular part exist.
    pub f0: Option<Complex64>,
    /// `∇f(0)`, when the regular part is `C¹`.
    pub grad_f0: Option<Vec<Complex64>>,
    /// Evaluable regular part.
    pub f_eval: Option<Field>,
}

impl fmt::Debug for SingularDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SingularDecomposition")
            .field("ctx", &self.ctx)
            .field("c0", &self.c0)
            .field("c", &self.c)
            .field("f0", &self.f0)
            .field("grad_f0", &self.grad_f0)
            .field("f_eval", &self.f_eval.as_ref().map(|_| "<fn>"))
            .finish()
    }
}

impl SingularDecomposition {
    /// Splitting with no gradient terms.
    pub fn scalar(ctx: SpaceContext, c0: Complex64, f0: Option<Complex64>) -> Self {
        Self {
            ctx,
            c0,
            c: vec![Complex64::new(0.0, 0.0); ctx.n as usize],
            f0,
            grad_f0: None,
            f_eval: None,
        }
    }

    pub fn with_gradient_terms(mut self, c: Vec<Complex64>) -> Self {
        self.c = c;
        self
    }

    pub fn with_grad_f0(mut self, g: Vec<Complex64>) -> Self {
        self.grad_f0 = Some(g);
        self
    }

    pub fn with_regular_part(mut self, f: Field) -> Self {
        self.f_eval = Some(f);
        self
    }

    pub fn case(&self) -> RepresentationCase {
        classify(&self.ctx)
    }

    /// Checks the coefficient pattern against the case of `(n, p)`.
    pub fn validate(&self) -> Result<()> {
        let zero = |z: &Complex64| z.norm() == 0.0;
        if self.c.len() != self.ctx.n as usize {
            return Err(Error::Contract(format!(
                "expected {} gradient coefficients, got {}",
                self.ctx.n,
                self.c.len()
            )));
        }
        match self.case() {
            RepresentationCase::FullSingular => {}
            RepresentationCase::ScalarSingular => {
                if !self.c.iter().all(zero) {
                    return Err(Error::Contract(
                        "gradient coefficients must vanish outside the full singular case".into(),
                    ));
                }
            }
            RepresentationCase::Regular => {
                if !self.c.iter().all(zero) || !zero(&self.c0) {
                    return Err(Error::Contract(
                        "regular case admits no singular coefficients".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// `s·d` for a complex scalar.
    pub fn scale(&self, s: Complex64) -> Self {
        let f_eval = self.f_eval.clone().map(|f| -> Field { Arc::new(move |x| s * f(x)) });
        Self {
            ctx: self.ctx,
            c0: s * self.c0,
            c: self.c.iter().map(|c| s * c).collect(),
            f0: self.f0.map(|v| s * v),
            grad_f0: self.grad_f0.as_ref().map(|g| g.iter().map(|v| s * v).collect()),
            f_eval,
        }
    }

    /// `κ_n f(0)`, the regular value entering the boundary functional.
    pub fn boundary_value(&self) -> Result<Complex64> {
        let f0 = self.f0.ok_or_else(|| {
            Error::Contract(format!(
                "f(0) is undefined for n = {}, p = {} (needs p > n/2)",
                self.ctx.n, self.ctx.p
            ))
        })?;
        Ok(f0 * boundary_normalization(self.ctx.n))
    }
}

/// One-sided values `u(0±)`, `u'(0±)` of a function on ℝ∖{0}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneDBoundaryData {
    pub u_plus: Complex64,
    pub u_minus: Complex64,
    pub du_plus: Complex64,
    pub du_minus: Complex64,
}

fn one_d_context() -> SpaceContext {
    SpaceContext { n: 1, p: 2.0 }
}

/// Exact splitting `u = c₀G₁ + c₁G₁' + f` on the line.
pub fn decompose_1d(b: &OneDBoundaryData) -> SingularDecomposition {
    let c0 = b.du_minus - b.du_plus;
    let c1 = b.u_minus - b.u_plus;
    let f0 = 0.5 * (b.u_plus + b.u_minus + b.du_plus - b.du_minus);
    let f1 = 0.5 * (b.u_plus - b.u_minus + b.du_plus + b.du_minus);
    SingularDecomposition::scalar(one_d_context(), c0, Some(f0))
        .with_gradient_terms(vec![c1])
        .with_grad_f0(vec![f1])
}

/// The same splitting from a numerical solve of the 4×4 system
/// `u(0±) = ½c₀ ∓ ½c₁ + f(0)`, `u'(0±) = ∓½c₀ + ½c₁ + f'(0)`.
pub fn decompose_1d_linear(b: &OneDBoundaryData) -> Result<SingularDecomposition> {
    let m = DMatrix::from_row_slice(
        4,
        4,
        &[
            0.5, -0.5, 1.0, 0.0, //
            0.5, 0.5, 1.0, 0.0, //
            -0.5, 0.5, 0.0, 1.0, //
            0.5, 0.5, 0.0, 1.0,
        ],
    );
    let lu = m.lu();
    let solve = |rhs: [f64; 4]| -> Result<DVector<f64>> {
        lu.solve(&DVector::from_row_slice(&rhs))
            .ok_or_else(|| Error::NonConvergent("singular 4x4 system".into()))
    };
    let re = solve([b.u_plus.re, b.u_minus.re, b.du_plus.re, b.du_minus.re])?;
    let im = solve([b.u_plus.im, b.u_minus.im, b.du_plus.im, b.du_minus.im])?;
    let z = |i: usize| Complex64::new(re[i], im[i]);
    Ok(SingularDecomposition::scalar(one_d_context(), z(0), Some(z(2)))
        .with_gradient_terms(vec![z(1)])
        .with_grad_f0(vec![z(3)]))
}

/// Inverse of [`decompose_1d`].
pub fn recompose_1d(d: &SingularDecomposition) -> Result<OneDBoundaryData> {
    if d.ctx.n != 1 {
        return Err(Error::Contract("recomposition is one-dimensional".into()));
    }
    let c0 = d.c0;
    let c1 = d.c[0];
    let f0 = d.f0.ok_or_else(|| Error::Contract("missing f(0)".into()))?;
    let f1 = d
        .grad_f0
        .as_ref()
        .map(|g| g[0])
        .ok_or_else(|| Error::Contract("missing f'(0)".into()))?;
    Ok(OneDBoundaryData {
        u_plus: 0.5 * c0 - 0.5 * c1 + f0,
        u_minus: 0.5 * c0 + 0.5 * c1 + f0,
        du_plus: -0.5 * c0 + 0.5 * c1 + f1,
        du_minus: 0.5 * c0 + 0.5 * c1 + f1,
    })
}

/// Radii `2^{-k}` for `k = 4..=20`.
pub fn default_radii() -> Vec<f64> {
    (4..=20).map(|k| 2f64.powi(-k)).collect()
}

/// Result of fitting `u` near the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitFit {
    pub c0: Complex64,
    pub f0: Complex64,
    /// Root-mean-square misfit relative to the root-mean-square sample size.
    pub relative_residual: f64,
    /// Change of the coefficients when the two largest radii are dropped.
    pub refinement_change: f64,
    pub samples: usize,
}

const RESIDUAL_LIMIT: f64 = 1e-8;
const REFINEMENT_LIMIT: f64 = 1e-5;

fn check_extraction_context(ctx: &SpaceContext) -> Result<()> {
    if classify(ctx) != RepresentationCase::ScalarSingular || !(ctx.p > f64::from(ctx.n) / 2.0) {
        return Err(Error::Contract(format!(
            "limit extraction needs the scalar singular case with p > n/2, got n = {}, p = {}",
            ctx.n, ctx.p
        )));
    }
    Ok(())
}

fn check_radii(radii: &[f64], needed: usize) -> Result<()> {
    if radii.len() < needed {
        return Err(Error::Contract(format!(
            "need at least {needed} radii, got {}",
            radii.len()
        )));
    }
    if radii.iter().any(|&r| !(r > ORIGIN_FLOOR) || !r.is_finite()) {
        return Err(Error::Contract("radii must be finite and above the origin floor".into()));
    }
    if radii.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Contract("radii must be strictly decreasing".into()));
    }
    Ok(())
}

/// Regular columns of the near-origin model: `1, r, r², r³` and, in two
/// dimensions, the `r² log r` term carried by `K₀`.
fn regular_columns(n: u32, r: f64) -> Vec<f64> {
    let r2 = r * r;
    let mut row = vec![1.0, r, r2, r2 * r, r2 * r2];
    if n == 2 {
        let l = r.ln();
        row.extend([r2 * l, r2 * r2 * l]);
    }
    row
}

/// Average of `u` at `±r·e` along the diagonal direction.
fn symmetric_samples(u: &dyn Fn(&[f64]) -> Complex64, n: u32, radii: &[f64]) -> Result<Vec<Complex64>> {
    let c = 1.0 / f64::from(n).sqrt();
    radii
        .iter()
        .map(|&r| {
            let plus = vec![c * r; n as usize];
            let minus = vec![-c * r; n as usize];
            let v = 0.5 * (u(&plus) + u(&minus));
            if v.re.is_finite() && v.im.is_finite() {
                Ok(v)
            } else {
                Err(Error::Domain(format!("function is not finite at radius {r}")))
            }
        })
        .collect()
}

fn least_squares(
    rows: &[Vec<f64>],
    values: &[Complex64],
    reference: &[Complex64],
) -> Result<(Vec<Complex64>, f64)> {
    let m = rows.len();
    let k = rows[0].len();
    let mut scale = vec![0.0f64; k];
    for row in rows {
        for (s, v) in scale.iter_mut().zip(row) {
            *s = s.max(v.abs());
        }
    }
    let a = DMatrix::from_fn(m, k, |i, j| rows[i][j] / scale[j].max(f64::MIN_POSITIVE));
    let svd = a.clone().svd(true, true);
    let re = DVector::from_iterator(m, values.iter().map(|v| v.re));
    let im = DVector::from_iterator(m, values.iter().map(|v| v.im));
    let eps = 1e-14;
    let xr = svd
        .solve(&re, eps)
        .map_err(|e| Error::NonConvergent(format!("least squares failed: {e}")))?;
    let xi = svd
        .solve(&im, eps)
        .map_err(|e| Error::NonConvergent(format!("least squares failed: {e}")))?;
    let rr = &a * &xr - &re;
    let ri = &a * &xi - &im;
    let resid = ((rr.norm_squared() + ri.norm_squared()) / m as f64).sqrt();
    let size = (reference.iter().map(|v| v.norm_sqr()).sum::<f64>() / m as f64).sqrt();
    let coef = (0..k)
        .map(|j| Complex64::new(xr[j], xi[j]) / scale[j].max(f64::MIN_POSITIVE))
        .collect();
    Ok((coef, resid / size.max(f64::MIN_POSITIVE)))
}

fn fit_joint(
    values: &[Complex64],
    radii: &[f64],
    n: u32,
    spec: &QuadratureSpec,
) -> Result<(Complex64, Complex64, f64)> {
    let rows = radii
        .iter()
        .map(|&r| {
            let g = bessel_potential_radial(n, r, spec)?.value;
            let mut row = vec![g];
            row.extend(regular_columns(n, r));
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let (coef, resid) = least_squares(&rows, values, values)?;
    Ok((coef[0], coef[1], resid))
}

/// Fits `u(x) ≈ c₀ G_n(x) + f(0) + (smooth corrections)` on the sample radii.
pub fn fit_near_origin(
    u: &dyn Fn(&[f64]) -> Complex64,
    ctx: &SpaceContext,
    radii: &[f64],
) -> Result<LimitFit> {
    check_extraction_context(ctx)?;
    let width = 1 + regular_columns(ctx.n, 1.0).len();
    check_radii(radii, width + 4)?;
    let spec = QuadratureSpec::with_tolerances(1e-14, 1e-12);
    let values = symmetric_samples(u, ctx.n, radii)?;
    let (c0, f0, resid) = fit_joint(&values, radii, ctx.n, &spec)?;
    let (c0b, f0b, _) = fit_joint(&values[2..], &radii[2..], ctx.n, &spec)?;
    let change = (c0 - c0b).norm().max((f0 - f0b).norm());
    Ok(LimitFit {
        c0,
        f0,
        relative_residual: resid,
        refinement_change: change,
        samples: radii.len(),
    })
}

fn certify(fit: &LimitFit, what: &str) -> Result<()> {
    let scale = fit.c0.norm().max(fit.f0.norm()).max(1.0);
    if fit.relative_residual > RESIDUAL_LIMIT || fit.refinement_change > REFINEMENT_LIMIT * scale {
        return Err(Error::NonConvergent(format!(
            "{what}: residual {:e}, refinement change {:e}; the input is likely outside the space",
            fit.relative_residual, fit.refinement_change
        )));
    }
    Ok(())
}

/// `c₀ = lim_{x→0} u(x)/G_n(x)` with convergence diagnostics.
pub fn extract_c0_by_limit(
    u: &dyn Fn(&[f64]) -> Complex64,
    ctx: &SpaceContext,
    radii: &[f64],
) -> Result<LimitFit> {
    let fit = fit_near_origin(u, ctx, radii)?;
    certify(&fit, "c0 extraction")?;
    Ok(fit)
}

/// `f(0) = lim_{x→0} [u(x) - c₀ G_n(x)]` for a known `c₀`.
pub fn extract_f0(
    u: &dyn Fn(&[f64]) -> Complex64,
    c0: Complex64,
    ctx: &SpaceContext,
    radii: &[f64],
) -> Result<Complex64> {
    check_extraction_context(ctx)?;
    let width = regular_columns(ctx.n, 1.0).len();
    check_radii(radii, width + 4)?;
    let spec = QuadratureSpec::with_tolerances(1e-14, 1e-12);
    let values = symmetric_samples(u, ctx.n, radii)?;
    let reduced = values
        .iter()
        .zip(radii)
        .map(|(v, &r)| Ok(v - c0 * bessel_potential_radial(ctx.n, r, &spec)?.value))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<f64>> = radii.iter().map(|&r| regular_columns(ctx.n, r)).collect();
    let (coef, resid) = least_squares(&rows, &reduced, &values)?;
    let rows_b: Vec<Vec<f64>> = rows[2..].to_vec();
    let (coef_b, _) = least_squares(&rows_b, &reduced[2..], &values[2..])?;
    let fit = LimitFit {
        c0,
        f0: coef[0],
        relative_residual: resid,
        refinement_change: (coef[0] - coef_b[0]).norm(),
        samples: radii.len(),
    };
    certify(&fit, "f(0) extraction")?;
    Ok(coef[0])
}

/// Effect of rewriting `c₀G_n + f` in the `G_{n,λ}` basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingShift {
    /// `c₀^λ / c₀`.
    pub c0_factor: f64,
    /// Change of the boundary value `κ_n f(0)` per unit `c₀`.
    pub f0_shift_per_unit_c0: f64,
}

impl ScalingShift {
    /// `(c₀, κ_n f(0)) ↦ (c₀^λ, κ_n f^λ(0))`.
    pub fn apply(&self, c0: Complex64, boundary_value: Complex64) -> (Complex64, Complex64) {
        (c0 * self.c0_factor, boundary_value + c0 * self.f0_shift_per_unit_c0)
    }
}

/// Change of the singular coefficient and boundary value under `G_n ↦ G_{n,λ}`.
pub fn scaling_shift(n: u32, lambda: f64) -> Result<ScalingShift> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("scaling needs lambda > 0, got {lambda}")));
    }
    match n {
        2 => Ok(ScalingShift {
            c0_factor: 1.0,
            f0_shift_per_unit_c0: lambda.ln() / 2.0,
        }),
        3 => {
            let s = lambda.sqrt();
            Ok(ScalingShift {
                c0_factor: s,
                f0_shift_per_unit_c0: -(1.0 - s) / (4.0 * PI),
            })
        }
        _ => Err(Error::Unsupported(format!("scaling shifts are defined for n = 2, 3, got {n}"))),
    }
}

/// Boundary functional `τ_β u = c₀ - β κ_n f(0)`, `τ_∞ u = -κ_n f(0)`.
pub fn tau_beta(d: &SingularDecomposition, beta: ExtComplex) -> Result<Complex64> {
    if d.case() != RepresentationCase::ScalarSingular {
        return Err(Error::Contract(format!(
            "boundary functional needs the scalar singular case, got {}",
            d.case()
        )));
    }
    let b = d.boundary_value()?;
    Ok(match beta.finite() {
        Some(beta) => d.c0 - beta * b,
        None => -b,
    })
}

/// `τ_β` read in the `G_{n,λ}` frame.
pub fn tau_beta_in_frame(
    d: &SingularDecomposition,
    beta: ExtComplex,
    lambda: f64,
) -> Result<Complex64> {
    let shift = scaling_shift(d.ctx.n, lambda)?;
    let (c0, b) = shift.apply(d.c0, d.boundary_value()?);
    let kappa = boundary_normalization(d.ctx.n);
    let framed = SingularDecomposition::scalar(d.ctx, c0, Some(b / kappa));
    tau_beta(&framed, beta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConvertDirection {
    /// `β ↦ β_λ`.
    Forward,
    /// `β_λ ↦ β`.
    Inverse,
}

fn pole_check(den: Complex64, size: f64, what: &str) -> Result<Complex64> {
    if den.norm() <= 1e-12 * size.max(1.0) {
        Err(Error::Pole(format!("{what}: denominator vanishes")))
    } else {
        Ok(den)
    }
}

/// Parameter `β_λ` such that `τ^λ_β u = 0` iff `τ_{β_λ} u = 0`.
pub fn tau_beta_lambda_convert(
    n: u32,
    beta: Complex64,
    lambda: f64,
    direction: ConvertDirection,
) -> Result<Complex64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("scaling needs lambda > 0, got {lambda}")));
    }
    match (n, direction) {
        (2, ConvertDirection::Forward) => {
            let l = lambda.ln() / 2.0;
            let den = pole_check(1.0 - beta * l, (beta * l).norm(), "beta = 2/log(lambda)")?;
            Ok(beta / den)
        }
        (2, ConvertDirection::Inverse) => {
            let l = lambda.ln() / 2.0;
            let den = pole_check(1.0 + beta * l, (beta * l).norm(), "beta_lambda = -2/log(lambda)")?;
            Ok(beta / den)
        }
        (3, ConvertDirection::Forward) => {
            let s = lambda.sqrt();
            let term = beta * (1.0 - s) / (4.0 * PI);
            let den = pole_check(s + term, s + term.norm(), "sqrt(lambda) + beta(1-sqrt(lambda))/4pi = 0")?;
            Ok(beta / den)
        }
        (3, ConvertDirection::Inverse) => {
            let s = lambda.sqrt();
            let term = beta * (1.0 - s) / (4.0 * PI);
            let den = pole_check(1.0 - term, term.norm(), "1 - beta_lambda(1-sqrt(lambda))/4pi = 0")?;
            Ok(beta * s / den)
        }
        _ => Err(Error::Unsupported(format!("parameter conversion is stated for n = 2, 3, got {n}"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroTraceCase {
    /// Test functions vanishing near 0 are dense in `W^{2,p}`.
    NoConstraint,
    /// Their closure is `{f : f(0) = 0}`.
    ValueZero,
    /// Their closure is `{f : f(0) = 0, ∇f(0) = 0}`.
    ValueAndGradZero,
}

pub fn zero_trace_case(ctx: &SpaceContext) -> ZeroTraceCase {
    let n = f64::from(ctx.n);
    if ctx.p <= n / 2.0 {
        ZeroTraceCase::NoConstraint
    } else if ctx.p <= n {
        ZeroTraceCase::ValueZero
    } else {
        ZeroTraceCase::ValueAndGradZero
    }
}

/// Whether the Friedrichs extension is the only generator extending the
/// Laplacian on functions vanishing near the origin.
pub fn friedrichs_unique(ctx: &SpaceContext) -> bool {
    ctx.n >= 3 && ctx.p <= f64::from(ctx.n) / 2.0
}

/// Whether `{0}` is an `(m, p)`-polar set, i.e. `m - n/p <= 0`.
pub fn singleton_polar(m: u32, ctx: &SpaceContext) -> bool {
    ctx.p <= f64::from(ctx.n) / f64::from(m)
}
