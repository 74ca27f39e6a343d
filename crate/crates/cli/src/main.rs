//! Command-line front end for the `punctured` numerics.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::env;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use punctured::{Complex64, QuadratureSpec};

use output::Report;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_VAR: &str = "PUNCTURED_OUTPUT_DIR";

const USAGE_EXIT: u8 = 64;

#[derive(Debug, Parser)]
#[command(name = "punctured", version, about = "Laplacians with a point interaction at the origin")]
#[command(args_override_self = true)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Output file; relative paths resolve against $PUNCTURED_OUTPUT_DIR when set.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// key=value file merged under the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Absolute quadrature tolerance [default: 1e-12]
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    /// Relative quadrature tolerance [default: 1e-10]
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    /// Panel budget per quadrature call [default: 2000]
    #[arg(long, global = true)]
    max_subdivisions: Option<usize>,
}

impl Common {
    fn spec(&self) -> QuadratureSpec {
        let mut spec = QuadratureSpec::default();
        if let Some(a) = self.abs_tol {
            spec.abs_tol = a;
        }
        if let Some(r) = self.rel_tol {
            spec.rel_tol = r;
        }
        if let Some(m) = self.max_subdivisions {
            spec.max_subdivisions = m;
        }
        spec
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelFn {
    /// Bessel potential G_n.
    G,
    /// Macdonald function K_ν.
    K,
    /// Free heat kernel P(t,·).
    P,
    /// |∇G_n|.
    GradG,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DecomposeTarget {
    /// One-sided boundary data on the line.
    OneD,
    /// G_n(√λ·) by limit extraction.
    ScaledPotential,
    /// The eigenfunction of A_β by limit extraction.
    Eigenfunction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WellPosedKind {
    /// β = 0 in Lᵖ.
    Beta0,
    /// β ≠ 0 in Lᵖ, n = 3.
    BetaNonzero,
    /// β ≠ 0 in H^{-l}_β.
    Hl,
    /// Invariant measure on H^{-l}.
    Invariant,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Kernel values on a radius grid.
    EvalKernel {
        #[arg(long = "fn", value_enum, ignore_case = true)]
        function: KernelFn,
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        nu: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        radii: Vec<f64>,
    },
    /// Representation case of W^{2,p}(ℝⁿ∖{0}).
    Classify {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        p: f64,
    },
    /// Singular/regular splitting.
    Decompose {
        #[arg(long, value_enum, default_value = "one-d")]
        target: DecomposeTarget,
        #[arg(long, allow_negative_numbers = true)]
        u_plus: Option<Complex64>,
        #[arg(long, allow_negative_numbers = true)]
        u_minus: Option<Complex64>,
        #[arg(long, allow_negative_numbers = true)]
        du_plus: Option<Complex64>,
        #[arg(long, allow_negative_numbers = true)]
        du_minus: Option<Complex64>,
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<f64>,
    },
    /// Polar set, density, uniqueness and zero-trace predicates.
    Predicates {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 2)]
        m: u32,
    },
    /// Eigenvalue of A_β and the eigenfunction profile.
    Spectrum {
        #[arg(long)]
        n: u32,
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long, value_delimiter = ',')]
        radii: Vec<f64>,
    },
    /// α ↔ β tables.
    Dictionary {
        #[arg(long)]
        n: u32,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        betas: Vec<f64>,
    },
    /// (λ + A_β)^{-1} applied to a Gaussian source, n = 3.
    Resolvent {
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        radii: Vec<f64>,
        /// Width of the source e^{-|y|²/w²}.
        #[arg(long, default_value_t = 1.0)]
        width: f64,
    },
    /// Green form ℰ(u,v) of two splittings in conjugate frames.
    Green {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        u: GreenSide,
        #[command(flatten)]
        v: GreenSideV,
    },
    /// 𝒢_β and R_β grids with the envelope checks.
    HeatKernel {
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        times: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        radii: Vec<f64>,
        /// |x| for the full kernel 𝒢_β(t,x,y); x lies on the first axis.
        #[arg(long, default_value_t = 0.5)]
        x_radius: f64,
    },
    /// Monte Carlo ensemble of the boundary-driven heat equation.
    Simulate {
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, default_value_t = 5e-3)]
        dt: f64,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        probe_radii: Vec<f64>,
        #[arg(long, default_value_t = 1000)]
        paths: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Well-posedness and invariant-measure reports.
    Wellposedness {
        #[arg(long, value_enum)]
        kind: WellPosedKind,
        #[arg(long, default_value_t = 3)]
        n: u32,
        /// Exponents p (Lᵖ kinds) or orders l (H^{-l} kinds).
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Runs the quick invariant suite.
    Selftest,
}

#[derive(Debug, Args)]
struct GreenSide {
    #[arg(long, default_value = "0", allow_negative_numbers = true)]
    u_c0: Complex64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    u_c: Vec<Complex64>,
    #[arg(long, allow_negative_numbers = true)]
    u_f0: Option<Complex64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    u_grad_f0: Vec<Complex64>,
}

#[derive(Debug, Args)]
struct GreenSideV {
    #[arg(long, default_value = "0", allow_negative_numbers = true)]
    v_c0: Complex64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    v_c: Vec<Complex64>,
    #[arg(long, allow_negative_numbers = true)]
    v_f0: Option<Complex64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    v_grad_f0: Vec<Complex64>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::EvalKernel { .. } => "eval-kernel",
            Command::Classify { .. } => "classify",
            Command::Decompose { .. } => "decompose",
            Command::Predicates { .. } => "predicates",
            Command::Spectrum { .. } => "spectrum",
            Command::Dictionary { .. } => "dictionary",
            Command::Resolvent { .. } => "resolvent",
            Command::Green { .. } => "green",
            Command::HeatKernel { .. } => "heat-kernel",
            Command::Simulate { .. } => "simulate",
            Command::Wellposedness { .. } => "wellposedness",
            Command::Selftest => "selftest",
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::Classify { .. }
            | Command::Decompose { .. }
            | Command::Predicates { .. }
            | Command::Green { .. }
            | Command::Wellposedness { .. }
            | Command::Selftest => Format::Json,
            _ => Format::Csv,
        }
    }

    fn run(&self, spec: &QuadratureSpec, format: Format) -> punctured::Result<Report> {
        use commands as c;
        match self {
            Command::EvalKernel { function, n, nu, t, radii } => c::eval_kernel(*function, *n, *nu, *t, radii, spec),
            Command::Classify { n, p } => c::classify(*n, *p),
            Command::Decompose { target, u_plus, u_minus, du_plus, du_minus, n, p, lambda, beta } => {
                let one_d = [*u_plus, *u_minus, *du_plus, *du_minus];
                c::decompose(*target, one_d, *n, *p, *lambda, *beta, spec)
            }
            Command::Predicates { n, p, m } => c::predicates(*n, *p, *m),
            Command::Spectrum { n, beta, radii } => c::spectrum(*n, *beta, radii, spec),
            Command::Dictionary { n, betas } => c::dictionary(*n, betas),
            Command::Resolvent { beta, lambda, radii, width } => c::resolvent(*beta, *lambda, radii, *width, spec),
            Command::Green { n, p, u, v } => c::green(
                *n,
                *p,
                c::GreenInput { c0: u.u_c0, c: &u.u_c, f0: u.u_f0, grad_f0: &u.u_grad_f0 },
                c::GreenInput { c0: v.v_c0, c: &v.v_c, f0: v.v_f0, grad_f0: &v.v_grad_f0 },
            ),
            Command::HeatKernel { beta, times, radii, x_radius } => c::heat_kernel(*beta, times, radii, *x_radius, spec),
            Command::Simulate { n, beta, horizon, dt, probe_radii, paths, seed } => {
                c::simulate(*n, *beta, *horizon, *dt, probe_radii, *paths, *seed, format, spec)
            }
            Command::Wellposedness { kind, n, values } => c::wellposedness(*kind, *n, values, spec),
            Command::Selftest => c::selftest(spec),
        }
    }
}

const SUBCOMMANDS: &[&str] = &[
    "eval-kernel",
    "classify",
    "decompose",
    "predicates",
    "spectrum",
    "dictionary",
    "resolvent",
    "green",
    "heat-kernel",
    "simulate",
    "wellposedness",
    "selftest",
];

fn destination(output: Option<&PathBuf>, name: &str, format: Format) -> Option<PathBuf> {
    let dir = env::var_os(OUTPUT_DIR_VAR).map(PathBuf::from);
    match (output, dir) {
        (Some(p), Some(d)) if p.is_relative() => Some(d.join(p)),
        (Some(p), _) => Some(p.clone()),
        (None, Some(d)) => {
            let ext = match format {
                Format::Csv => "csv",
                Format::Json => "json",
            };
            Some(d.join(format!("{name}.{ext}")))
        }
        (None, None) => None,
    }
}

fn write_report(report: &Report, format: Format, w: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Csv => report.table.write_csv(w),
        Format::Json => report.write_json(w),
    }
}

fn run(argv: Vec<String>) -> u8 {
    let argv = match config::merge(argv, SUBCOMMANDS) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return USAGE_EXIT;
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { USAGE_EXIT } else { 0 };
        }
    };
    let format = cli.common.format.unwrap_or_else(|| cli.command.default_format());
    let spec = cli.common.spec();
    if let Err(e) = spec.validate() {
        eprintln!("error: {e}");
        return e.exit_code() as u8;
    }
    let report = match cli.command.run(&spec, format) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code() as u8;
        }
    };
    let written = match destination(cli.common.output.as_ref(), cli.command.name(), format) {
        Some(path) => (|| {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            let mut w = BufWriter::new(File::create(&path)?);
            write_report(&report, format, &mut w)?;
            w.flush()
        })(),
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write_report(&report, format, &mut w).and_then(|_| w.flush())
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return 1;
    }
    report.status as u8
}

fn main() -> ExitCode {
    ExitCode::from(run(env::args().collect()))
}
