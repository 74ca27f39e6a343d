//! One function per subcommand; each returns the table it prints.

use std::f64::consts::PI;
use std::sync::Arc;

use punctured::Complex64;
use punctured::heatkernel::{
    c_lower_bound, heat_kernel_beta_radial, r_beta_envelope, r_beta_limit_diagnostic, r_beta_radial,
};
use punctured::operators::{
    alpha_from_beta, alpha_from_beta_printed, alpha_point_spectrum, beta_from_alpha, eigenvalue, green_form,
    krein_gamma, resolvent_apply, Source,
};
use punctured::quad::integrate_radial;
use punctured::sobolev::{
    classify as classify_case, decompose_1d, decompose_1d_linear, default_radii, dirac_derivative_in_negative_sobolev,
    extract_c0_by_limit, friedrichs_unique, recompose_1d, singleton_polar, tau_beta, zero_trace_case,
    OneDBoundaryData,
};
use punctured::spde::{
    invariant_measure_exists, scheme_variance, simulate as run_ensemble, variance_oracle, wellposed_beta0,
    wellposed_beta_nonzero, hl_wellposed_beta_nonzero, SimulationConfig,
};
use punctured::specfun::{
    bessel_potential_radial, bessel_potential_scaled, grad_bessel_potential_norm_radial, heat_kernel_free_radial,
    macdonald_half, macdonald_k, macdonald_k_quadrature,
};
use punctured::{
    DecayBound, Error, Ext, ExtComplex, ExtReal, Point, PointInteraction, QuadratureSpec, Result,
    SingularDecomposition, SpaceContext,
};
use serde_json::json;

use crate::output::{Cell, Report, Table};
use crate::{DecomposeTarget, Format, KernelFn, WellPosedKind};

fn ext_cell(x: ExtReal) -> Cell {
    Cell::Real(x.to_f64())
}

pub fn eval_kernel(function: KernelFn, n: u32, nu: f64, t: f64, radii: &[f64], spec: &QuadratureSpec) -> Result<Report> {
    let (schema, label) = match function {
        KernelFn::G => ("kernel-g", format!("G_{n}")),
        KernelFn::K => ("kernel-k", format!("K_{nu}")),
        KernelFn::P => ("kernel-p", format!("P_{n}(t={t})")),
        KernelFn::GradG => ("kernel-grad-g", format!("|grad G_{n}|")),
    };
    let mut table = Table::new(schema, &["function", "r", "value", "error_estimate", "method"]);
    for &r in radii {
        let kv = match function {
            KernelFn::G => bessel_potential_radial(n, r, spec)?,
            KernelFn::K => macdonald_k(nu, r, spec)?,
            KernelFn::P => punctured::KernelValue::exact(heat_kernel_free_radial(n, t, r)?),
            KernelFn::GradG => grad_bessel_potential_norm_radial(n, r, spec)?,
        };
        let method = serde_json::to_value(kv.method).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        table.push(vec![label.clone().into(), r.into(), kv.value.into(), kv.error_estimate.into(), method.into()]);
    }
    Ok(Report::table(table))
}

pub fn classify(n: u32, p: f64) -> Result<Report> {
    let ctx = SpaceContext::new(n, p)?;
    let case = classify_case(&ctx);
    let mut table = Table::new("classify", &["n", "p", "case", "singular_dim", "lower_critical", "upper_critical"]);
    table.push(vec![
        n.into(),
        p.into(),
        case.to_string().into(),
        case.singular_dim(n).into(),
        ctx.lower_critical().into(),
        ctx.upper_critical().into(),
    ]);
    let doc = json!({
        "n": n,
        "p": p,
        "case": case.to_string(),
        "singular_dim": case.singular_dim(n),
    });
    Ok(Report::table(table).with_document(doc))
}

fn complex_json(z: Complex64) -> serde_json::Value {
    json!({ "re": z.re, "im": z.im })
}

pub fn decompose(
    target: DecomposeTarget,
    one_d: [Option<Complex64>; 4],
    n: u32,
    p: f64,
    lambda: f64,
    beta: Option<f64>,
    spec: &QuadratureSpec,
) -> Result<Report> {
    match target {
        DecomposeTarget::OneD => {
            let [Some(u_plus), Some(u_minus), Some(du_plus), Some(du_minus)] = one_d else {
                return Err(Error::Domain("one-d decomposition needs --u-plus, --u-minus, --du-plus, --du-minus".into()));
            };
            let data = OneDBoundaryData { u_plus, u_minus, du_plus, du_minus };
            let d = decompose_1d(&data);
            let lin = decompose_1d_linear(&data)?;
            let back = recompose_1d(&d)?;
            let round_trip = [
                back.u_plus - u_plus,
                back.u_minus - u_minus,
                back.du_plus - du_plus,
                back.du_minus - du_minus,
            ]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
            let f0 = d.f0.unwrap_or_default();
            let f1 = d.grad_f0.as_ref().map(|g| g[0]).unwrap_or_default();
            let lin_gap = [lin.c0 - d.c0, lin.c[0] - d.c[0], lin.f0.unwrap_or_default() - f0]
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            let mut table = Table::new("decompose-1d", &["coefficient", "re", "im"]);
            for (name, z) in [("c0", d.c0), ("c1", d.c[0]), ("f0", f0), ("f1", f1)] {
                table.push(vec![name.into(), z.re.into(), z.im.into()]);
            }
            let doc = json!({
                "c0": complex_json(d.c0),
                "c1": complex_json(d.c[0]),
                "f0": complex_json(f0),
                "f1": complex_json(f1),
                "round_trip_error": round_trip,
                "linear_solve_gap": lin_gap,
            });
            Ok(Report::table(table).with_document(doc))
        }
        DecomposeTarget::ScaledPotential | DecomposeTarget::Eigenfunction => {
            let ctx = SpaceContext::new(n, p)?;
            let (fit, label) = if target == DecomposeTarget::ScaledPotential {
                let u = |x: &[f64]| {
                    let v = bessel_potential_scaled(n, lambda, &Point::new(x.to_vec()), spec).map(|k| k.value);
                    Complex64::new(v.unwrap_or(f64::NAN), 0.0)
                };
                (extract_c0_by_limit(&u, &ctx, &default_radii())?, format!("G_{n}(sqrt({lambda}) x)"))
            } else {
                let b = beta.ok_or_else(|| Error::Domain("eigenfunction extraction needs --beta".into()))?;
                let pi = PointInteraction::new(n, Ext::from(b))?;
                let pair = eigenvalue(&pi).ok_or_else(|| Error::Domain(format!("A_beta has no eigenvalue at beta = {b}")))?;
                let u = |x: &[f64]| Complex64::new(pair.value(&Point::new(x.to_vec()), spec).unwrap_or(f64::NAN), 0.0);
                (extract_c0_by_limit(&u, &ctx, &default_radii())?, format!("e_{{{n},{b}}}"))
            };
            let d = SingularDecomposition::scalar(ctx, fit.c0, Some(fit.f0));
            let tau = match beta {
                Some(b) => Some(tau_beta(&d, ExtComplex::from(Ext::from(b)))?),
                None => None,
            };
            let mut table = Table::new(
                "decompose-limit",
                &["target", "n", "p", "c0_re", "c0_im", "f0_re", "f0_im", "relative_residual", "refinement_change", "tau_abs"],
            );
            table.push(vec![
                label.clone().into(),
                n.into(),
                p.into(),
                fit.c0.re.into(),
                fit.c0.im.into(),
                fit.f0.re.into(),
                fit.f0.im.into(),
                fit.relative_residual.into(),
                fit.refinement_change.into(),
                tau.map_or(f64::NAN, |z| z.norm()).into(),
            ]);
            let doc = json!({
                "target": label,
                "c0": complex_json(fit.c0),
                "f0": complex_json(fit.f0),
                "relative_residual": fit.relative_residual,
                "refinement_change": fit.refinement_change,
                "samples": fit.samples,
                "tau": tau.map(complex_json),
            });
            Ok(Report::table(table).with_document(doc))
        }
    }
}

pub fn predicates(n: u32, p: f64, m: u32) -> Result<Report> {
    let ctx = SpaceContext::new(n, p)?;
    let ztc = format!("{:?}", zero_trace_case(&ctx));
    let mut table = Table::new(
        "predicates",
        &["n", "p", "m", "zero_trace_case", "friedrichs_unique", "singleton_polar", "dirac_in_dual", "dirac_gradient_in_dual"],
    );
    let row = (
        ztc.clone(),
        friedrichs_unique(&ctx),
        singleton_polar(m, &ctx),
        dirac_derivative_in_negative_sobolev(0, &ctx),
        dirac_derivative_in_negative_sobolev(1, &ctx),
    );
    table.push(vec![n.into(), p.into(), m.into(), ztc.into(), row.1.into(), row.2.into(), row.3.into(), row.4.into()]);
    let doc = json!({
        "n": n, "p": p, "m": m,
        "zero_trace_case": row.0,
        "friedrichs_unique": row.1,
        "singleton_polar": row.2,
        "dirac_in_dual": row.3,
        "dirac_gradient_in_dual": row.4,
    });
    Ok(Report::table(table).with_document(doc))
}

pub fn spectrum(n: u32, beta: f64, radii: &[f64], spec: &QuadratureSpec) -> Result<Report> {
    let pi = PointInteraction::new(n, Ext::from(beta))?;
    let pair = eigenvalue(&pi);
    if radii.is_empty() {
        let mut table = Table::new("spectrum", &["n", "beta", "alpha", "lambda", "alpha_form_value"]);
        table.push(vec![
            n.into(),
            beta.into(),
            ext_cell(pi.alpha()),
            pair.map_or(f64::NAN, |e| e.lambda).into(),
            alpha_point_spectrum(&pi).unwrap_or(f64::NAN).into(),
        ]);
        return Ok(Report::table(table));
    }
    let pair = pair.ok_or_else(|| Error::Domain(format!("A_beta has no eigenvalue at beta = {beta}")))?;
    let mut table = Table::new("spectrum-profile", &["n", "beta", "lambda", "r", "e"]);
    for &r in radii {
        table.push(vec![n.into(), beta.into(), pair.lambda.into(), r.into(), pair.value_radial(r, spec)?.into()]);
    }
    Ok(Report::table(table))
}

pub fn dictionary(n: u32, betas: &[f64]) -> Result<Report> {
    PointInteraction::new(n, Ext::Infinity)?;
    let mut table = Table::new("dictionary", &["n", "beta", "alpha", "beta_round_trip", "alpha_printed"]);
    for &b in betas {
        let beta = Ext::from(b);
        let alpha = alpha_from_beta(n, beta);
        let back = beta_from_alpha(n, alpha);
        let printed = if n == 3 { alpha_from_beta_printed(beta).to_f64() } else { alpha.to_f64() };
        table.push(vec![n.into(), b.into(), ext_cell(alpha), ext_cell(back), printed.into()]);
    }
    Ok(Report::table(table))
}

pub fn resolvent(beta: f64, lambda: f64, radii: &[f64], width: f64, spec: &QuadratureSpec) -> Result<Report> {
    if !(width > 0.0) {
        return Err(Error::Domain(format!("source width must be positive, got {width}")));
    }
    let pi = PointInteraction::new(3, Ext::from(beta))?;
    let gamma = krein_gamma(&pi, lambda)?;
    let source = Source::radial(Arc::new(move |r: f64| Complex64::new((-(r / width).powi(2)).exp(), 0.0)), 12.0 * width);
    let mut table = Table::new("resolvent", &["beta", "lambda", "gamma", "r", "value_re", "value_im"]);
    for &r in radii {
        let v = resolvent_apply(&pi, lambda, &source, &Point::on_axis(3, r), spec)?;
        table.push(vec![beta.into(), lambda.into(), gamma.into(), r.into(), v.re.into(), v.im.into()]);
    }
    Ok(Report::table(table))
}

pub struct GreenInput<'a> {
    pub c0: Complex64,
    pub c: &'a [Complex64],
    pub f0: Option<Complex64>,
    pub grad_f0: &'a [Complex64],
}

fn green_side(ctx: SpaceContext, g: &GreenInput<'_>) -> SingularDecomposition {
    let mut d = SingularDecomposition::scalar(ctx, g.c0, g.f0);
    if !g.c.is_empty() {
        d = d.with_gradient_terms(g.c.to_vec());
    }
    if !g.grad_f0.is_empty() {
        d = d.with_grad_f0(g.grad_f0.to_vec());
    }
    d
}

pub fn green(n: u32, p: f64, u: GreenInput<'_>, v: GreenInput<'_>) -> Result<Report> {
    let ctx = SpaceContext::new(n, p)?;
    let du = green_side(ctx, &u);
    let dv = green_side(ctx.dual(), &v);
    let e_uv = green_form(&du, &dv)?;
    let mut table = Table::new("green", &["n", "p", "q", "form_re", "form_im", "case_u", "case_v"]);
    table.push(vec![
        n.into(),
        p.into(),
        ctx.q().into(),
        e_uv.re.into(),
        e_uv.im.into(),
        du.case().to_string().into(),
        dv.case().to_string().into(),
    ]);
    let doc = json!({
        "n": n, "p": p, "q": ctx.q(),
        "form": complex_json(e_uv),
        "case_u": du.case().to_string(),
        "case_v": dv.case().to_string(),
    });
    Ok(Report::table(table).with_document(doc))
}

pub fn heat_kernel(beta: f64, times: &[f64], radii: &[f64], x_radius: f64, spec: &QuadratureSpec) -> Result<Report> {
    let pi = PointInteraction::new(3, Ext::from(beta))?;
    let horizon = times.iter().copied().fold(0.0, f64::max);
    let c = match pi.alpha() {
        Ext::Finite(a) => c_lower_bound(a, horizon, spec)?,
        Ext::Infinity => 1.0,
    };
    let mut table = Table::new(
        "heat-kernel",
        &[
            "beta", "alpha", "t", "y_radius", "kernel", "free_kernel", "r_beta", "envelope_lower", "envelope_upper",
            "sandwich_holds", "limit_extrapolated", "limit_relative_gap",
        ],
    );
    for &t in times {
        for &b in radii {
            let a = x_radius;
            // x on the first axis, y on the second.
            let distance = (a * a + b * b).sqrt();
            let g = heat_kernel_beta_radial(&pi, t, a, b, distance, spec)?.value;
            let free = heat_kernel_free_radial(3, t, distance)?;
            let r = r_beta_radial(&pi, t, b, spec)?.value;
            let upper = r_beta_envelope(t, b);
            let lower = c * upper;
            let holds = lower <= r * (1.0 + 1e-12) && r <= upper * (1.0 + 1e-12);
            let diag = r_beta_limit_diagnostic(t, &Point::on_axis(3, b), &pi, spec)?;
            table.push(vec![
                beta.into(),
                ext_cell(pi.alpha()),
                t.into(),
                b.into(),
                g.into(),
                free.into(),
                r.into(),
                lower.into(),
                upper.into(),
                holds.into(),
                diag.extrapolated.into(),
                diag.relative_gap().into(),
            ]);
        }
    }
    Ok(Report::table(table))
}

#[allow(clippy::too_many_arguments)]
pub fn simulate(
    n: u32,
    beta: f64,
    horizon: f64,
    dt: f64,
    probe_radii: &[f64],
    paths: usize,
    seed: u64,
    format: Format,
    spec: &QuadratureSpec,
) -> Result<Report> {
    let pi = PointInteraction::new(n, Ext::from(beta))?;
    let probes: Vec<Point> = probe_radii.iter().map(|&r| Point::on_axis(n as usize, r)).collect();
    let mut cfg = SimulationConfig::new(pi, horizon, dt, probes.clone(), paths, seed);
    cfg.spec = *spec;
    let ens = run_ensemble(&cfg)?;
    for w in &ens.warnings {
        eprintln!("warning: {w}");
    }
    let last = ens.times.len() - 1;
    let mut table = Table::new("simulate", &["path", "t", "probe_index", "value"]);
    if format == Format::Csv {
        for p in 0..ens.n_paths {
            for (k, &t) in ens.times.iter().enumerate() {
                for q in 0..probes.len() {
                    table.push(vec![p.into(), t.into(), q.into(), ens.sample(p, k, q).into()]);
                }
            }
        }
        return Ok(Report::table(table));
    }
    let mut summary = Vec::new();
    for (q, y) in probes.iter().enumerate() {
        let oracle = variance_oracle(&pi, horizon, y, spec)?;
        let scheme = scheme_variance(&cfg, q)?;
        let var = ens.variance_at(last, q);
        let mean = ens.mean_at(last, q);
        let var_se = oracle * (2.0 / (paths.max(2) - 1) as f64).sqrt();
        let mean_se = (oracle / paths as f64).sqrt();
        summary.push(json!({
            "probe_index": q,
            "radius": y.norm(),
            "mean": mean,
            "variance": var,
            "oracle_variance": oracle,
            "scheme_variance": scheme,
            "variance_z": (var - oracle) / var_se,
            "mean_z": mean / mean_se,
        }));
    }
    let doc = json!({
        "n": n,
        "beta": beta,
        "horizon": horizon,
        "dt": dt,
        "paths": paths,
        "seed": seed,
        "times": ens.times,
        "means": ens.mean,
        "variances": ens.variance,
        "final": summary,
        "warnings": ens.warnings,
    });
    Ok(Report::table(table).with_document(doc))
}

pub fn wellposedness(kind: WellPosedKind, n: u32, values: &[f64], spec: &QuadratureSpec) -> Result<Report> {
    let mut table = Table::new("wellposedness", &["kind", "n", "value", "finite", "estimate", "note"]);
    let mut docs = Vec::new();
    for &v in values {
        let (finite, estimate, note) = match kind {
            WellPosedKind::Beta0 => {
                let r = wellposed_beta0(&SpaceContext::new(n, v)?, spec)?;
                (r.finite, r.estimate, r.threshold_note)
            }
            WellPosedKind::BetaNonzero => {
                if n != 3 {
                    return Err(Error::Unsupported("beta != 0 well-posedness is stated for n = 3".into()));
                }
                let r = wellposed_beta_nonzero(v, spec)?;
                (r.finite, r.estimate, r.threshold_note)
            }
            WellPosedKind::Hl => (hl_wellposed_beta_nonzero(v), None, "finite iff l > 1".to_owned()),
            WellPosedKind::Invariant => {
                let r = invariant_measure_exists(n, v, spec)?;
                (r.exists, r.integral, "exists iff n = 3; estimate is the radial criterion integral".to_owned())
            }
        };
        let name = format!("{kind:?}");
        table.push(vec![
            name.clone().into(),
            n.into(),
            v.into(),
            finite.into(),
            estimate.unwrap_or(f64::INFINITY).into(),
            note.clone().into(),
        ]);
        docs.push(json!({
            "value": v,
            "finite": finite,
            "estimate": estimate.map_or(json!("diverged"), |e| json!(e)),
            "note": note,
        }));
    }
    let doc = json!({ "kind": format!("{kind:?}"), "n": n, "reports": docs });
    Ok(Report::table(table).with_document(doc))
}

struct Check {
    name: &'static str,
    value: f64,
    reference: f64,
    tolerance: f64,
}

impl Check {
    fn relative(name: &'static str, value: f64, reference: f64, tolerance: f64) -> Self {
        Self { name, value, reference, tolerance }
    }

    fn gap(&self) -> f64 {
        (self.value - self.reference).abs() / self.reference.abs().max(1.0)
    }

    fn passed(&self) -> bool {
        self.gap() <= self.tolerance
    }
}

pub fn selftest(spec: &QuadratureSpec) -> Result<Report> {
    let mut checks = Vec::new();
    let g3 = bessel_potential_radial(3, 1.0, spec)?.value;
    checks.push(Check::relative("g3_at_one", g3, 1.0 / (4.0 * PI * std::f64::consts::E), 1e-9));
    for z in [0.5, 2.0] {
        let k = macdonald_k_quadrature(0.5, z, spec)?.value;
        checks.push(Check::relative("k_half_closed_form", k, macdonald_half(z), 1e-9));
    }
    let norm3 = integrate_radial(
        |r| (-2.0 * r).exp() / (16.0 * PI * PI * r * r),
        3,
        DecayBound::new(2.0).with_scale(1.0 / (16.0 * PI * PI)),
        spec,
    )?
    .value;
    checks.push(Check::relative("l2_norm_g3", norm3, 1.0 / (8.0 * PI), 1e-8));
    let norm2 = integrate_radial(
        |r| bessel_potential_radial(2, r, spec).map(|k| k.value * k.value).unwrap_or(f64::NAN),
        2,
        DecayBound::new(2.0).with_scale(1.0 / (8.0 * PI)),
        spec,
    )?
    .value;
    checks.push(Check::relative("l2_norm_g2", norm2, 1.0 / (4.0 * PI), 1e-8));

    let data = OneDBoundaryData {
        u_plus: Complex64::new(0.3, -1.0),
        u_minus: Complex64::new(2.0, 0.5),
        du_plus: Complex64::new(-0.7, 0.0),
        du_minus: Complex64::new(1.1, 2.0),
    };
    let back = recompose_1d(&decompose_1d(&data))?;
    checks.push(Check::relative("one_d_round_trip", (back.u_plus - data.u_plus).norm() + (back.du_minus - data.du_minus).norm(), 0.0, 1e-12));

    for n in [2, 3] {
        let beta = Ext::Finite(-2.7);
        let back = beta_from_alpha(n, alpha_from_beta(n, beta)).to_f64();
        checks.push(Check::relative("dictionary_round_trip", back, -2.7, 1e-12));
    }

    let pi = PointInteraction::new(3, Ext::Finite(-5.0))?;
    let pair = eigenvalue(&pi).ok_or_else(|| Error::Contract("missing eigenvalue".into()))?;
    let ctx = SpaceContext::new(3, 2.0)?;
    let u = |x: &[f64]| Complex64::new(pair.value(&Point::new(x.to_vec()), spec).unwrap_or(f64::NAN), 0.0);
    let fit = extract_c0_by_limit(&u, &ctx, &default_radii())?;
    let d = SingularDecomposition::scalar(ctx, fit.c0, Some(fit.f0));
    let tau = tau_beta(&d, ExtComplex::from(Ext::Finite(-5.0)))?;
    checks.push(Check::relative("eigen_tau_n3", tau.norm(), 0.0, 1e-8));

    let tiny = PointInteraction::new(3, Ext::Finite(1e-12))?;
    let g = heat_kernel_beta_radial(&tiny, 0.5, 0.4, 0.9, 1.1, spec)?.value;
    checks.push(Check::relative("beta_zero_collapse", g, heat_kernel_free_radial(3, 0.5, 1.1)?, 1e-9));
    let pi = PointInteraction::new(3, Ext::Finite(2.0 * PI))?;
    let diag = r_beta_limit_diagnostic(0.5, &Point::on_axis(3, 1.0), &pi, spec)?;
    checks.push(Check::relative("r_beta_limit", diag.extrapolated, diag.closed, 1e-5));

    let verdicts_ok = (1..=20).all(|k| {
        let p = 1.0 + 0.1 * f64::from(k);
        let beta0 = wellposed_beta0(&SpaceContext { n: 3, p }, spec).map(|r| r.finite == (p < 1.5));
        let nonzero = wellposed_beta_nonzero(p, spec).map(|r| r.finite == (1.5 < p && p < 3.0));
        matches!((beta0, nonzero), (Ok(true), Ok(true)))
    });
    checks.push(Check::relative("wellposedness_verdicts", f64::from(u8::from(verdicts_ok)), 1.0, 0.0));

    let free = PointInteraction::new(3, Ext::Finite(0.0))?;
    let y = Point::on_axis(3, 1.0);
    let oracle = variance_oracle(&free, 1.0, &y, spec)?;
    checks.push(Check::relative("variance_oracle", oracle, (4.0 * PI).powi(-3) * 6.0 * (-0.5f64).exp(), 1e-9));
    let cfg = SimulationConfig::new(free, 1.0, 1e-3, vec![y], 1, 0);
    let scheme = scheme_variance(&cfg, 0)?;
    checks.push(Check::relative("scheme_variance", scheme / oracle, 1.0, 1e-2));

    let mut table = Table::new("selftest", &["check", "value", "reference", "gap", "tolerance", "status"]);
    let mut failures = 0;
    for c in &checks {
        let ok = c.passed();
        failures += usize::from(!ok);
        table.push(vec![
            c.name.into(),
            c.value.into(),
            c.reference.into(),
            c.gap().into(),
            c.tolerance.into(),
            (if ok { "PASS" } else { "FAIL" }).into(),
        ]);
    }
    let mut report = Report::table(table);
    report.status = i32::from(failures > 0);
    Ok(report)
}
