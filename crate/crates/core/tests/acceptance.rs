//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so the lines always reach the test log. The exit
//! status is non-zero when a criterion fails that is not listed in
//! `KNOWN_UNATTAINABLE`.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use punctured::heatkernel::{
    c_lower_bound, heat_kernel_beta, r_beta_envelope, r_beta_limit_diagnostic, r_beta_radial, semigroup_apply,
};
use punctured::operators::{
    alpha_from_beta, beta_from_alpha, default_fd_step, eigenvalue, green_form, laplacian, Source,
};
use punctured::quad::{integrate_finite, integrate_radial};
use punctured::sobolev::{
    boundary_normalization, classify, decompose_1d, decompose_1d_linear, default_radii,
    dirac_derivative_in_negative_sobolev, extract_c0_by_limit, extract_f0, friedrichs_unique, recompose_1d,
    singleton_polar, tau_beta, zero_trace_case, OneDBoundaryData, ZeroTraceCase,
};
use punctured::spde::{
    hl_wellposed_beta_nonzero, invariant_measure_exists, j_integral, sample_moments, simulate, variance_oracle,
    wellposed_beta0, wellposed_beta_nonzero,
};
use punctured::specfun::{
    bessel_potential_radial, bessel_potential_t_integral, heat_kernel_free_radial, macdonald_k_quadrature,
    macdonald_k_t_integral,
};
use punctured::{
    Complex64, DecayBound, Ext, ExtReal, HeatKernelQuery, Point, PointInteraction, QuadratureSpec,
    RepresentationCase, SimulationConfig, SingularDecomposition, SpaceContext,
};

/// Criteria whose stated target disagrees with the closed value; they are
/// evaluated as stated and expected to fail.
const KNOWN_UNATTAINABLE: &[&str] = &["l2-norms"];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn tight() -> QuadratureSpec {
    QuadratureSpec::with_tolerances(1e-15, 1e-12)
}

fn rel(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
}

fn pi_of(n: u32, beta: f64) -> PointInteraction {
    PointInteraction::new(n, Ext::Finite(beta)).unwrap()
}

fn ctx(n: u32, p: f64) -> SpaceContext {
    SpaceContext::new(n, p).unwrap()
}

fn closed_kernels() -> Outcome {
    let spec = tight();
    let mut worst: f64 = 0.0;
    worst = worst.max(rel(bessel_potential_t_integral(1, 0.0, &spec).unwrap().value, 0.5));
    worst = worst.max(rel(bessel_potential_radial(1, 0.0, &spec).unwrap().value, 0.5));
    let g3 = 1.0 / (4.0 * PI * std::f64::consts::E);
    worst = worst.max(rel(bessel_potential_t_integral(3, 1.0, &spec).unwrap().value, g3));
    worst = worst.max(rel(bessel_potential_radial(3, 1.0, &spec).unwrap().value, g3));
    for z in [0.5, 1.0, 2.0, 5.0] {
        let want = (PI / (2.0 * z)).sqrt() * (-z).exp();
        for nu in [-0.5, 0.5] {
            worst = worst.max(rel(macdonald_k_quadrature(nu, z, &spec).unwrap().value, want));
            worst = worst.max(rel(macdonald_k_t_integral(nu, z, &spec).unwrap().value, want));
        }
    }
    outcome(worst <= 1e-9, format!("max relative error {worst:.2e} (<= 1e-9)"))
}

fn l2_norms() -> Outcome {
    let spec = tight();
    let g2 = |r: f64| bessel_potential_radial(2, r, &spec).map(|k| k.value * k.value).unwrap_or(0.0);
    let bound = DecayBound::new(2.0).with_scale(1.0).starting_at(1.0);
    let n2 = integrate_radial(g2, 2, bound, &spec).unwrap().value;
    let g3 = |r: f64| bessel_potential_radial(3, r, &spec).map(|k| k.value * k.value).unwrap_or(0.0);
    let n3 = integrate_radial(g3, 3, bound, &spec).unwrap().value;
    let e2 = rel(n2, 0.5);
    let e3 = rel(n3, 1.0 / (8.0 * PI));
    let e2_closed = rel(n2, 1.0 / (4.0 * PI));
    outcome(
        e2 <= 1e-8 && e3 <= 1e-8,
        format!(
            "|G_2|^2 = {n2:.12} vs 1/2 rel {e2:.2e}, vs 1/(4pi) rel {e2_closed:.2e}; |G_3|^2 rel {e3:.2e} vs 1/(8pi)"
        ),
    )
}

/// Radial bump `φ(r) = exp(-k/(1 - r²/R²))` on `r < R`, written as `ψ(r²)`.
#[derive(Clone, Copy)]
struct Bump {
    k: f64,
    radius: f64,
}

impl Bump {
    fn psi(&self, s: f64) -> (f64, f64, f64) {
        let r2 = self.radius * self.radius;
        let u = 1.0 - s / r2;
        if u <= 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let v = (-self.k / u).exp();
        let d1 = -self.k * v / (r2 * u * u);
        let d2 = self.k * self.k * v / (r2 * r2 * u.powi(4)) - 2.0 * self.k * v / (r2 * r2 * u.powi(3));
        (v, d1, d2)
    }

    /// `(1 - Δ)φ` at radius `r` in `ℝⁿ`, using `Δφ = 4sψ'' + 2nψ'` with `s = r²`.
    fn shifted_laplacian(&self, n: u32, r: f64) -> f64 {
        let s = r * r;
        let (v, d1, d2) = self.psi(s);
        v - (4.0 * s * d2 + 2.0 * f64::from(n) * d1)
    }
}

fn weak_identity() -> Outcome {
    let spec = tight();
    let bumps = [
        Bump { k: 1.0, radius: 1.0 },
        Bump { k: 2.0, radius: 0.7 },
        Bump { k: 0.5, radius: 2.0 },
    ];
    let mut worst: f64 = 0.0;
    for n in [2u32, 3] {
        for b in bumps {
            let f = |r: f64| {
                if r < 1e-12 {
                    return 0.0;
                }
                let g = bessel_potential_radial(n, r, &spec).unwrap().value;
                g * b.shifted_laplacian(n, r) * r.powi(n as i32 - 1)
            };
            let res = integrate_finite(f, 0.0, b.radius, &spec).unwrap();
            let area = if n == 2 { 2.0 * PI } else { 4.0 * PI };
            let phi0 = (-b.k).exp();
            worst = worst.max((area * res.value - phi0).abs() / phi0);
        }
    }
    outcome(worst <= 1e-6, format!("3 bumps, n in {{2,3}}: max relative error {worst:.2e} (<= 1e-6)"))
}

fn one_d_decomposition() -> Outcome {
    let mut exact = true;
    for beta in [0.5, 1.0, 2.0] {
        let d = decompose_1d(&OneDBoundaryData {
            u_plus: c(0.5),
            u_minus: c(0.5),
            du_plus: c(-beta / 2.0),
            du_minus: c(beta / 2.0),
        });
        exact &= d.c0 == c(beta) && d.c[0] == c(0.0) && d.f0 == Some(c((1.0 - beta) / 2.0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut z = || Complex64::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let b = OneDBoundaryData { u_plus: z(), u_minus: z(), du_plus: z(), du_minus: z() };
        for d in [decompose_1d(&b), decompose_1d_linear(&b).unwrap()] {
            let back = recompose_1d(&d).unwrap();
            for (x, y) in [
                (back.u_plus, b.u_plus),
                (back.u_minus, b.u_minus),
                (back.du_plus, b.du_plus),
                (back.du_minus, b.du_minus),
            ] {
                worst = worst.max((x - y).norm() / y.norm().max(1.0));
            }
        }
    }
    outcome(
        exact && worst <= 1e-12,
        format!("worked values exact: {exact}; 100 round trips max error {worst:.2e} (<= 1e-12)"),
    )
}

fn scaling_constants() -> Outcome {
    let radii = default_radii();
    let mut worst: f64 = 0.0;
    let mut shifts = Vec::new();
    for lambda in [0.25f64, 4.0] {
        let k = lambda.sqrt();
        let g2 = move |x: &[f64]| {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            c(bessel_potential_radial(2, k * r, &tight()).unwrap().value)
        };
        let fit = extract_c0_by_limit(&g2, &ctx(2, 2.0), &radii).unwrap();
        worst = worst.max((fit.c0 - c(1.0)).norm());
        let raw = extract_f0(&g2, c(1.0), &ctx(2, 2.0), &radii).unwrap().re;
        shifts.push((lambda, -raw, -raw * boundary_normalization(2)));

        let g3 = move |x: &[f64]| {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            c((-k * r).exp() / (4.0 * PI * k * r))
        };
        let c0 = 1.0 / k;
        let fit = extract_c0_by_limit(&g3, &ctx(3, 2.0), &radii).unwrap();
        worst = worst.max((fit.c0 - c(c0)).norm() / c0);
        let f0 = extract_f0(&g3, c(c0), &ctx(3, 2.0), &radii).unwrap().re;
        worst = worst.max((f0 - (1.0 / k - 1.0) / (4.0 * PI)).abs());
    }
    let report: Vec<String> = shifts
        .iter()
        .map(|(l, raw, scaled)| {
            format!("lambda={l}: raw {raw:.9} (ln/4pi {:.9}), x2pi {scaled:.9} (ln/2 {:.9})", l.ln() / (4.0 * PI), l.ln() / 2.0)
        })
        .collect();
    outcome(
        worst <= 1e-6,
        format!("max error {worst:.2e} (<= 1e-6); n=2 regular-part shift per unit c0: {}", report.join("; ")),
    )
}

fn eigen_suite() -> Outcome {
    let spec = tight();
    let mut residual: f64 = 0.0;
    let mut tau: f64 = 0.0;
    for (n, beta) in [(2u32, -1.0), (2, 1.0), (2, 2.0), (3, -5.0), (3, 20.0 * PI)] {
        let e = eigenvalue(&pi_of(n, beta)).unwrap();
        let f = move |x: &[f64]| c(e.value(&Point::new(x.to_vec()), &spec).unwrap());
        for r in [0.3, 1.0, 3.0] {
            let x = Point::diagonal(n as usize, r);
            let v = f(x.coords());
            let lap = laplacian(&f, x.coords(), default_fd_step(x.coords()));
            residual = residual.max((lap - e.lambda * v).norm() / v.norm());
        }
        let fit = extract_c0_by_limit(&f, &ctx(n, 2.0), &default_radii()).unwrap();
        let d = SingularDecomposition::scalar(ctx(n, 2.0), fit.c0, Some(fit.f0));
        tau = tau.max(tau_beta(&d, Ext::Finite(c(beta))).unwrap().norm());
    }
    outcome(
        residual <= 1e-5 && tau <= 1e-8,
        format!("max PDE residual {residual:.2e} (<= 1e-5), max |tau e| {tau:.2e} (<= 1e-8)"),
    )
}

fn ext_close(a: ExtReal, b: ExtReal, tol: f64) -> bool {
    match (a, b) {
        (Ext::Infinity, Ext::Infinity) => true,
        (Ext::Finite(x), Ext::Finite(y)) => (x - y).abs() <= tol * x.abs().max(1.0),
        _ => false,
    }
}

fn dictionary() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for n in [2u32, 3] {
        for _ in 0..50 {
            let beta: f64 = rng.random_range(-50.0..50.0);
            let alpha = alpha_from_beta(n, Ext::Finite(beta));
            let direct = if n == 3 { 1.0 / beta - 1.0 / (4.0 * PI) } else { 8.0 * PI / beta };
            ok &= ext_close(alpha, Ext::Finite(direct), 1e-12);
            if let Ext::Finite(back) = beta_from_alpha(n, alpha) {
                worst = worst.max((back - beta).abs() / beta.abs().max(1.0));
            } else {
                ok = false;
            }
            let a: f64 = rng.random_range(-5.0..5.0);
            let round = alpha_from_beta(n, beta_from_alpha(n, Ext::Finite(a)));
            ok &= ext_close(round, Ext::Finite(a), 1e-12);
        }
        ok &= alpha_from_beta(n, Ext::Finite(0.0)) == Ext::Infinity;
        ok &= beta_from_alpha(n, Ext::Infinity) == Ext::Finite(0.0);
    }
    let edge = -1.0 / (4.0 * PI);
    ok &= alpha_from_beta(3, Ext::Infinity) == Ext::Finite(edge);
    ok &= beta_from_alpha(3, Ext::Finite(edge)) == Ext::Infinity;
    ok &= alpha_from_beta(2, Ext::Infinity) == Ext::Finite(0.0);
    outcome(
        ok && worst <= 1e-12,
        format!("50 random values per n, special pairs exact: {ok}; max round-trip error {worst:.2e} (<= 1e-12)"),
    )
}

fn heat_kernel() -> Outcome {
    let spec = tight();
    let times = [0.25, 0.5, 1.0, 1.5, 2.0];
    let radii = [0.25, 0.5, 1.0, 2.0, 3.0];
    let horizon = 2.0;
    let mut failures = Vec::new();
    let mut worst_gap: f64 = 0.0;
    for beta in [2.0 * PI, 3.0 * PI] {
        let p = pi_of(3, beta);
        let alpha = p.alpha().finite().unwrap();
        let cc = c_lower_bound(alpha, horizon, &spec).unwrap();
        if !(alpha > 0.0 && cc > 0.0) {
            failures.push(format!("beta={beta:.3}: alpha {alpha}, c {cc}"));
        }
        for t in times {
            for b in radii {
                let x = Point::new(vec![0.42, 0.0, 0.56]);
                let y = Point::new(vec![0.0, b, 0.0]);
                let q = HeatKernelQuery::new(t, x.clone(), y.clone(), p).unwrap();
                let swapped = HeatKernelQuery::new(t, y.clone(), x.clone(), p).unwrap();
                let g = heat_kernel_beta(&q, &spec).unwrap().value;
                let gs = heat_kernel_beta(&swapped, &spec).unwrap().value;
                let free = heat_kernel_free_radial(3, t, x.distance(&y)).unwrap();
                if rel(g, gs) > 1e-12 {
                    failures.push(format!("symmetry t={t} b={b}"));
                }
                if !(g >= free && free >= 0.0) {
                    failures.push(format!("positivity t={t} b={b}"));
                }
                let env = r_beta_envelope(t, b);
                let r = r_beta_radial(&p, t, b, &spec).unwrap().value;
                if !(cc * env <= r * (1.0 + 1e-12) && r <= env) {
                    failures.push(format!("sandwich t={t} b={b}"));
                }
                let collapse = HeatKernelQuery::new(t, x.clone(), y.clone(), pi_of(3, 1e-8)).unwrap();
                let gc = heat_kernel_beta(&collapse, &spec).unwrap().value;
                let zero = HeatKernelQuery::new(t, x.clone(), y.clone(), pi_of(3, 0.0)).unwrap();
                let g0 = heat_kernel_beta(&zero, &spec).unwrap().value;
                if rel(gc, free) > 1e-6 || g0 != free {
                    failures.push(format!("collapse t={t} b={b}"));
                }
                let diag = r_beta_limit_diagnostic(t, &y, &p, &spec).unwrap();
                worst_gap = worst_gap.max(diag.relative_gap());
            }
        }
    }
    if worst_gap > 1e-5 {
        failures.push(format!("limit diagnostic gap {worst_gap:.2e}"));
    }
    outcome(
        failures.is_empty(),
        format!(
            "25-point grid, beta in {{2pi,3pi}}: limit gap {worst_gap:.2e} (<= 1e-5); failures: {}",
            if failures.is_empty() { "none".to_owned() } else { failures.join(", ") }
        ),
    )
}

fn gaussian(width: f64) -> Source {
    Source::radial(Arc::new(move |r: f64| c((-r * r / width).exp())), 12.0 * width.sqrt())
}

fn semigroup() -> Outcome {
    let p = pi_of(3, 2.0 * PI);
    let v = gaussian(1.0);
    let (t, s) = (0.3, 0.2);
    let inner = {
        let v = v.clone();
        let sp = tight();
        Arc::new(move |b: f64| {
            semigroup_apply(&p, s, &v, &Point::on_axis(3, b.max(1e-9)), &sp).unwrap_or(c(f64::NAN))
        })
    };
    let sv = Source::radial(inner, 14.0);
    let mut worst: f64 = 0.0;
    for a in [0.3, 1.0, 2.0] {
        let x = Point::on_axis(3, a);
        let nested = semigroup_apply(&p, t, &sv, &x, &tight()).unwrap();
        let direct = semigroup_apply(&p, t + s, &v, &x, &tight()).unwrap();
        worst = worst.max((nested - direct).norm() / direct.norm());
    }
    outcome(worst <= 1e-4, format!("S(0.3)S(0.2) vs S(0.5) at 3 points: max relative gap {worst:.2e} (<= 1e-4)"))
}

fn spde() -> Outcome {
    let paths = 10_000;
    let pi = pi_of(3, 8.0 * PI);
    let y = Point::on_axis(3, 1.0);
    let cfg = SimulationConfig::new(pi, 1.0, 5e-3, vec![y.clone()], paths, 2024);
    let a = simulate(&cfg).unwrap();
    let b = simulate(&cfg).unwrap();
    let deterministic = a.samples == b.samples;
    let last = a.times.len() - 1;
    let oracle = variance_oracle(&pi, 1.0, &y, &QuadratureSpec::default()).unwrap();
    let var = a.variance_at(last, 0);
    let se = oracle * (2.0 / (paths as f64 - 1.0)).sqrt();
    let z = (var - oracle) / se;
    let (skew, kurt) = sample_moments(&a.column(last, 0));
    let zs = skew / (6.0 / paths as f64).sqrt();
    let zk = kurt / (24.0 / paths as f64).sqrt();
    outcome(
        z.abs() < 3.0 && zs.abs() < 4.0 && zk.abs() < 4.0 && deterministic,
        format!(
            "variance {var:.6e} vs oracle {oracle:.6e} (z = {z:.2}, |z| < 3); skew z {zs:.2}, excess kurtosis z {zk:.2} (|z| < 4); deterministic: {deterministic}"
        ),
    )
}

fn wellposedness() -> Outcome {
    let spec = QuadratureSpec::default();
    let mut mismatches = Vec::new();
    for n in [2u32, 3] {
        let nf = f64::from(n);
        for k in 0..20 {
            let p = 1.05 + 0.1 * f64::from(k);
            let r = wellposed_beta0(&ctx(n, p), &spec).unwrap();
            let want = p < nf / (nf - 1.0);
            if r.finite != want || r.estimate.is_some() != want {
                mismatches.push(format!("beta=0 n={n} p={p:.2}"));
            }
        }
    }
    for k in 0..20 {
        let p = 1.05 + 0.1 * f64::from(k);
        let r = wellposed_beta_nonzero(p, &spec).unwrap();
        if r.finite != (1.5 < p && p < 3.0) || r.estimate.is_some() != (p < 3.0) {
            mismatches.push(format!("beta!=0 p={p:.2}"));
        }
    }
    for k in 0..20 {
        let l = 0.15 * f64::from(k);
        if hl_wellposed_beta_nonzero(l) != (l > 1.0) {
            mismatches.push(format!("H^-l l={l:.2}"));
        }
    }
    for n in [2u32, 3] {
        for k in 1..=10 {
            let l = f64::from(n) / 2.0 + 0.2 * f64::from(k);
            let r = invariant_measure_exists(n, l, &spec).unwrap();
            if r.exists != (n == 3) || r.integral.is_some() != (n == 3) {
                mismatches.push(format!("invariant n={n} l={l:.2}"));
            }
        }
    }
    let near = j_integral(2.99, &spec).unwrap().unwrap();
    let far = j_integral(2.9, &spec).unwrap().unwrap();
    let growth = near / far;
    let diverges = j_integral(3.0, &spec).unwrap().is_none();
    outcome(
        mismatches.is_empty() && growth > 10.0 && diverges,
        format!(
            "verdict mismatches: {}; J(2.99)/J(2.9) = {growth:.1} (> 10)",
            if mismatches.is_empty() { "none".to_owned() } else { mismatches.join(", ") }
        ),
    )
}

fn classification() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut mismatches = 0usize;
    for _ in 0..10_000 {
        let n: u32 = rng.random_range(1..=6);
        let p: f64 = rng.random_range(1.01..10.0);
        let m: u32 = rng.random_range(1..=4);
        let l: u32 = rng.random_range(0..=2);
        let cx = ctx(n, p);
        let nf = f64::from(n);
        // W^{2,q} ⊂ C^k iff 2 - n/q > k, with q the conjugate exponent.
        let smooth = 2.0 - nf * (p - 1.0) / p;
        let want_case = if smooth > 1.0 {
            RepresentationCase::FullSingular
        } else if smooth > 0.0 {
            RepresentationCase::ScalarSingular
        } else {
            RepresentationCase::Regular
        };
        let polar = |order: f64| order * p <= nf;
        let want_trace = if polar(2.0) {
            ZeroTraceCase::NoConstraint
        } else if polar(1.0) {
            ZeroTraceCase::ValueZero
        } else {
            ZeroTraceCase::ValueAndGradZero
        };
        let agree = classify(&cx) == want_case
            && dirac_derivative_in_negative_sobolev(l, &cx) == (smooth > f64::from(l))
            && zero_trace_case(&cx) == want_trace
            && singleton_polar(m, &cx) == polar(f64::from(m))
            && friedrichs_unique(&cx) == polar(2.0);
        if !agree {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("10^4 random (n,p,m,l): {mismatches} mismatches"))
}

fn green_form_identities() -> Outcome {
    let mut worst: f64 = 0.0;
    let zero_ids = {
        let mut ok = true;
        for n in [2u32, 3] {
            let g = SingularDecomposition::scalar(ctx(n, 2.0), c(1.0), Some(c(0.0)));
            ok &= green_form(&g, &g).unwrap() == c(0.0);
            let f = SingularDecomposition::scalar(ctx(n, 2.0), c(0.0), Some(c(0.3)));
            let h = SingularDecomposition::scalar(ctx(n, 2.0), c(0.0), Some(c(-1.2)));
            ok &= green_form(&f, &h).unwrap() == c(0.0);
        }
        for i in 0..2 {
            let mut e = vec![c(0.0); 2];
            e[i] = c(1.0);
            let di = SingularDecomposition::scalar(ctx(2, 1.5), c(0.0), Some(c(0.0)))
                .with_gradient_terms(e)
                .with_grad_f0(vec![c(0.0); 2]);
            let g = SingularDecomposition::scalar(ctx(2, 3.0), c(1.0), Some(c(0.0))).with_grad_f0(vec![c(0.0); 2]);
            ok &= green_form(&di, &g).unwrap() == c(0.0);
        }
        ok
    };
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut z = || Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
    for _ in 0..200 {
        for n in [2u32, 3] {
            let (a0, f0, b0, g0) = (z(), z(), z(), z());
            let u = SingularDecomposition::scalar(ctx(n, 2.0), a0, Some(f0));
            let v = SingularDecomposition::scalar(ctx(n, 2.0), b0, Some(g0));
            let e = green_form(&u, &v).unwrap();
            let want = a0 * g0.conj() - f0 * b0.conj();
            worst = worst.max((e - want).norm() / want.norm().max(1.0));
            let back = green_form(&v, &u).unwrap();
            worst = worst.max((e + back.conj()).norm() / e.norm().max(1.0));

            let beta = z();
            let kappa = boundary_normalization(n);
            let u = SingularDecomposition::scalar(ctx(n, 2.0), beta * kappa * f0, Some(f0));
            let v = SingularDecomposition::scalar(ctx(n, 2.0), beta.conj() * kappa * g0, Some(g0));
            worst = worst.max(tau_beta(&u, Ext::Finite(beta)).unwrap().norm());
            worst = worst.max(tau_beta(&v, Ext::Finite(beta.conj())).unwrap().norm());
            worst = worst.max(green_form(&u, &v).unwrap().norm());
        }
        // Full singular u against a scalar singular partner in two dimensions.
        let (a0, a1, a2, f0, b0, g0, g1, g2) = (z(), z(), z(), z(), z(), z(), z(), z());
        let u = SingularDecomposition::scalar(ctx(2, 1.5), a0, Some(f0)).with_gradient_terms(vec![a1, a2]);
        let v = SingularDecomposition::scalar(ctx(2, 3.0), b0, Some(g0)).with_grad_f0(vec![g1, g2]);
        let e = green_form(&u, &v).unwrap();
        let want = a0 * g0.conj() - a1 * g1.conj() - a2 * g2.conj() - f0 * b0.conj();
        worst = worst.max((e - want).norm() / want.norm().max(1.0));
    }
    outcome(
        zero_ids && worst <= 1e-10,
        format!("zero identities exact: {zero_ids}; formula, antisymmetry and orthogonality max error {worst:.2e} (<= 1e-10)"),
    )
}

type Check = fn() -> Outcome;

fn main() -> ExitCode {
    let checks: [(&str, Check, Duration); 13] = [
        ("closed-form-kernels", closed_kernels, Duration::from_secs(1)),
        ("l2-norms", l2_norms, Duration::from_secs(1)),
        ("weak-identity", weak_identity, Duration::from_secs(5)),
        ("one-d-decomposition", one_d_decomposition, Duration::from_secs(1)),
        ("scaling-constants", scaling_constants, Duration::from_secs(5)),
        ("eigen-suite", eigen_suite, Duration::from_secs(10)),
        ("dictionary", dictionary, Duration::from_secs(1)),
        ("heat-kernel", heat_kernel, Duration::from_secs(60)),
        ("semigroup", semigroup, Duration::from_secs(60)),
        ("spde", spde, Duration::from_secs(120)),
        ("well-posedness", wellposedness, Duration::from_secs(30)),
        ("classification", classification, Duration::from_secs(1)),
        ("green-form", green_form_identities, Duration::from_secs(1)),
    ];
    let mut unexpected = Vec::new();
    let mut passed = 0;
    for (name, check, budget) in checks {
        let start = Instant::now();
        let out = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let pass = out.pass && in_time;
        println!(
            "{} {name}: {} [{:.3} s, budget {} s]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        if pass {
            passed += 1;
        } else if !KNOWN_UNATTAINABLE.contains(&name) {
            unexpected.push(name);
        }
    }
    println!("acceptance: {passed}/{} passed", checks.len());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {}", unexpected.join(", "));
        ExitCode::FAILURE
    }
}
