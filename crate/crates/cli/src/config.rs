use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use lpfz_core::QuadratureSettings;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "lpfz", version, about = "Zeros, products and positivity checks for Fourier transforms of Laguerre–Pólya kernels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "name", content = "args", rename_all = "snake_case")]
pub enum Command {
    /// Locate the real zeros in [0, R] and certify them with a winding count.
    Zeros(WindowArgs),
    /// `zeros` plus independent cross-checks of every zero.
    Verify(WindowArgs),
    /// Smallest n for which G_n is within epsilon of G on |z| <= M, with the measured gap.
    Converge(ConvergeArgs),
    /// Truncated Hadamard product from the certified zeros, compared against the transform.
    Product(ProductArgs),
    /// Growth of |G(w - i sigma)|^2 in sigma along vertical lines.
    Monotone(MonotoneArgs),
    /// Taylor coefficients of |G(w - i sigma)|^2 in sigma^2 and their signs.
    Coeffs(CoeffsArgs),
    /// Convolution of two kernels and the zeros of the product transform.
    Convolve(ConvolveArgs),
    /// Growth-order estimate from max |G| on circles.
    Order(OrderArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// G of the kernel.
    Basis,
    /// The approximant G_n (needs --n).
    Approx,
    /// H_n = G_n F_4 (needs --n).
    Hn,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Directory receiving report.json and the CSV files.
    #[arg(long = "out", value_name = "DIR", default_value = "lpfz-out")]
    pub output_dir: PathBuf,
    /// Quadrature relative tolerance.
    #[arg(long, value_name = "TOL")]
    #[serde(skip)]
    pub rel_tol: Option<f64>,
    /// Quadrature absolute tolerance.
    #[arg(long, value_name = "TOL")]
    #[serde(skip)]
    pub abs_tol: Option<f64>,
    /// Cap on adaptive quadrature subdivisions.
    #[arg(long, value_name = "COUNT")]
    #[serde(skip)]
    pub max_subdivisions: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct KernelArgs {
    /// Kernel-spec file. Give it twice to work with the convolution of two kernels.
    #[arg(long = "kernel", value_name = "FILE", required = true)]
    pub kernels: Vec<PathBuf>,
    /// Transform family; defaults to approx when --n is given, basis otherwise.
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Approximant index.
    #[arg(long)]
    pub n: Option<u64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct WindowArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    /// Half-width of the window [-R, R]; chosen to hold --count zeros when omitted.
    #[arg(long = "R", value_name = "R")]
    pub r: Option<f64>,
    /// Half-height of the certification rectangle.
    #[arg(long = "Y", value_name = "Y", default_value_t = 1.0)]
    pub y: f64,
    /// Positive zeros to enclose when R is chosen automatically.
    #[arg(long, default_value_t = 3)]
    pub count: usize,
    /// Largest R considered when choosing the window.
    #[arg(long, default_value_t = 60.0)]
    pub r_max: f64,
    /// Real-axis scan step; defaults to a quarter of the expected zero gap.
    #[arg(long)]
    pub step: Option<f64>,
    /// Contour samples per rectangle side.
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    /// Bisection tolerance for each zero.
    #[arg(long, default_value_t = 1e-10)]
    pub refine_tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ConvergeArgs {
    /// Kernel-spec file.
    #[arg(long = "kernel", value_name = "FILE", required = true)]
    pub kernel: PathBuf,
    /// Disc radius.
    #[arg(long = "M", value_name = "M")]
    pub m: f64,
    /// Target uniform error.
    #[arg(long)]
    pub epsilon: f64,
    /// Polar grid size for the measured gap.
    #[arg(long, default_value_t = 5)]
    pub grid: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ProductArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub window: WindowArgs,
    /// Radius of the comparison disc; defaults to R/3.
    #[arg(long)]
    pub test_radius: Option<f64>,
    /// Polar grid size for the comparison.
    #[arg(long, default_value_t = 8)]
    pub grid: usize,
    /// Zero-matching tolerance when dividing H_n by F_4.
    #[arg(long, default_value_t = 1e-8)]
    pub match_tol: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MonotoneArgs {
    /// Kernel-spec file.
    #[arg(long = "kernel", value_name = "FILE", required_unless_present = "control", conflicts_with = "control")]
    pub kernels: Vec<PathBuf>,
    /// Transform family; defaults to approx when --n is given, basis otherwise.
    #[arg(long, value_enum, conflicts_with = "control")]
    pub family: Option<Family>,
    /// Approximant index.
    #[arg(long, conflicts_with = "control")]
    pub n: Option<u64>,
    /// Scan the built-in negative control z^2 + 1 instead of a transform.
    #[arg(long)]
    pub control: bool,
    /// Real parts of the vertical lines.
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,2")]
    pub w: Vec<f64>,
    /// Largest sigma.
    #[arg(long, default_value_t = 1.0)]
    pub sigma_max: f64,
    /// Number of sigma steps above zero.
    #[arg(long, default_value_t = 10)]
    pub sigma_steps: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CoeffsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    /// Real parts at which the coefficients are taken.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub w: Vec<f64>,
    /// Highest coefficient index.
    #[arg(long, default_value_t = 8)]
    pub max_m: usize,
    /// Radius of the Cauchy ring.
    #[arg(long, default_value_t = 0.5)]
    pub ring_radius: f64,
    /// Samples on the Cauchy ring.
    #[arg(long, default_value_t = 64)]
    pub ring_samples: usize,
    /// Values of sigma at which the series is summed and compared with |G|^2.
    #[arg(long, value_delimiter = ',', default_value = "0,0.3")]
    pub sigma: Vec<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ConvolveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub window: WindowArgs,
    /// Right end of the sampled interval [0, t_max] for the convolution.
    #[arg(long, default_value_t = 3.0)]
    pub t_max: f64,
    /// Number of convolution samples.
    #[arg(long, default_value_t = 61)]
    pub points: usize,
    /// Zero-matching tolerance against the union of component zeros.
    #[arg(long, default_value_t = 1e-8)]
    pub match_tol: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OrderArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    /// Increasing circle radii.
    #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
    pub radii: Vec<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

/// A parsed and validated command line, with every default filled in.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub settings: QuadratureSettings,
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Zeros(a) | Command::Verify(a) => &a.common,
            Command::Converge(a) => &a.common,
            Command::Product(a) => &a.window.common,
            Command::Monotone(a) => &a.common,
            Command::Coeffs(a) => &a.common,
            Command::Convolve(a) => &a.window.common,
            Command::Order(a) => &a.common,
        }
    }
}

pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut command = Cli::try_parse_from(argv)?.command;
    let usage = |msg: String| Cli::command().error(ErrorKind::ValueValidation, msg);
    let positive = |name: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(usage(format!("{name} must be a positive number, got {v}")))
        }
    };

    match &mut command {
        Command::Zeros(a) | Command::Verify(a) => resolve_window(a, 1, &positive, &usage)?,
        Command::Converge(a) => {
            positive("--M", a.m)?;
            positive("--epsilon", a.epsilon)?;
        }
        Command::Product(a) => {
            resolve_window(&mut a.window, 1, &positive, &usage)?;
            if let Some(r) = a.test_radius {
                positive("--test-radius", r)?;
            }
            positive("--match-tol", a.match_tol)?;
        }
        Command::Monotone(a) => {
            if !a.control {
                a.family = Some(resolve_family(a.kernels.len(), a.family, a.n, &usage)?);
            }
            positive("--sigma-max", a.sigma_max)?;
            if a.sigma_steps == 0 || a.w.is_empty() {
                return Err(usage("need at least one w and one sigma step".into()));
            }
        }
        Command::Coeffs(a) => {
            a.kernel.family = Some(resolve_family(a.kernel.kernels.len(), a.kernel.family, a.kernel.n, &usage)?);
            positive("--ring-radius", a.ring_radius)?;
            if a.w.is_empty() {
                return Err(usage("need at least one w".into()));
            }
        }
        Command::Convolve(a) => {
            if a.window.kernel.kernels.len() != 2 {
                return Err(usage("convolve needs exactly two --kernel files".into()));
            }
            resolve_window(&mut a.window, 2, &positive, &usage)?;
            positive("--t-max", a.t_max)?;
            positive("--match-tol", a.match_tol)?;
            if a.points < 2 {
                return Err(usage("--points must be at least 2".into()));
            }
        }
        Command::Order(a) => {
            a.kernel.family = Some(resolve_family(a.kernel.kernels.len(), a.kernel.family, a.kernel.n, &usage)?);
        }
    }

    let defaults = QuadratureSettings::default();
    let common = command.common();
    let settings = QuadratureSettings {
        rel_tol: common.rel_tol.unwrap_or(defaults.rel_tol),
        abs_tol: common.abs_tol.unwrap_or(defaults.abs_tol),
        max_subdivisions: common.max_subdivisions.unwrap_or(defaults.max_subdivisions),
    };
    settings.validate().map_err(|e| usage(e.to_string()))?;
    Ok(RunConfig { command, settings })
}

fn resolve_family(
    kernels: usize,
    family: Option<Family>,
    n: Option<u64>,
    usage: &impl Fn(String) -> clap::Error,
) -> Result<Family, clap::Error> {
    let family = family.unwrap_or(if n.is_some() { Family::Approx } else { Family::Basis });
    if kernels > 2 {
        return Err(usage("at most two --kernel files are supported".into()));
    }
    if kernels == 2 && family != Family::Basis {
        return Err(usage("two kernels only combine into the basis family".into()));
    }
    match (family, n) {
        (Family::Basis, Some(_)) => Err(usage("--n does not apply to the basis family".into())),
        (Family::Approx | Family::Hn, None) => Err(usage("this family needs --n".into())),
        (_, Some(0)) => Err(usage("--n must be at least 1".into())),
        _ => Ok(family),
    }
}

fn resolve_window(
    a: &mut WindowArgs,
    min_kernels: usize,
    positive: &impl Fn(&str, f64) -> Result<(), clap::Error>,
    usage: &impl Fn(String) -> clap::Error,
) -> Result<(), clap::Error> {
    if a.kernel.kernels.len() < min_kernels {
        return Err(usage(format!("need at least {min_kernels} --kernel files")));
    }
    a.kernel.family = Some(resolve_family(a.kernel.kernels.len(), a.kernel.family, a.kernel.n, usage)?);
    if let Some(r) = a.r {
        positive("--R", r)?;
    }
    positive("--Y", a.y)?;
    positive("--r-max", a.r_max)?;
    positive("--refine-tol", a.refine_tol)?;
    if let Some(step) = a.step {
        positive("--step", step)?;
    }
    if a.count == 0 || a.samples < 4 {
        return Err(usage("--count must be at least 1 and --samples at least 4".into()));
    }
    Ok(())
}
