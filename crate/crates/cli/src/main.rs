//! Command line driver: characteristic roots, kernel profiles and norms,
//! linear/semilinear torus simulations, rate arithmetic, and verification
//! batches. All tabular output is CSV with a header row and 17 significant
//! digits; reports are JSON. `verify` exits nonzero when any entry fails.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fs;
use std::path::{Path, PathBuf};

use sevolab::evolution::Nonlinearity;
use sevolab::harness::{self, ExperimentConfig, ExperimentKind};
use sevolab::radial;
use sevolab::rates::{self, RateQuery, TheoremCase};
use sevolab::symbols::{self, ModelParams, MultiplierKind};

#[derive(Parser)]
#[command(name = "sevolab", version, about = "Numerical laboratory for double-damped sigma-evolution equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ParamArgs {
    #[arg(long, default_value_t = 2.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0.5)]
    sigma1: f64,
    #[arg(long, default_value_t = 1.5)]
    sigma2: f64,
    #[arg(long, default_value_t = 1.0)]
    mu1: f64,
    #[arg(long, default_value_t = 1.0)]
    mu2: f64,
    #[arg(long, default_value_t = 1)]
    n: u32,
}

impl ParamArgs {
    fn build(&self) -> Result<ModelParams> {
        ModelParams::new(self.sigma, self.sigma1, self.sigma2, self.mu1, self.mu2, self.n)
            .map_err(|e| anyhow::anyhow!("{e}"))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MultiplierArg {
    K0,
    K1,
    DtK0,
    DtK1,
}

impl From<MultiplierArg> for MultiplierKind {
    fn from(m: MultiplierArg) -> Self {
        match m {
            MultiplierArg::K0 => MultiplierKind::K0,
            MultiplierArg::K1 => MultiplierKind::K1,
            MultiplierArg::DtK0 => MultiplierKind::DtK0,
            MultiplierArg::DtK1 => MultiplierKind::DtK1,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    T1,
    T2,
    T3,
    T4,
}

impl From<CaseArg> for TheoremCase {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::T1 => TheoremCase::T1,
            CaseArg::T2 => TheoremCase::T2,
            CaseArg::T3 => TheoremCase::T3,
            CaseArg::T4 => TheoremCase::T4,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print characteristic roots and regime over a log-spaced rho range as CSV.
    Roots {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 1e-6)]
        rho_min: f64,
        #[arg(long, default_value_t = 1e6)]
        rho_max: f64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute one kernel profile (CSV) and its L^r norms (JSON).
    Kernel {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = MultiplierArg::K1)]
        multiplier: MultiplierArg,
        #[arg(long, default_value_t = 10.0)]
        t: f64,
        /// Riesz weight |xi|^s applied to the symbol.
        #[arg(long, default_value_t = 0.0)]
        s: f64,
        /// Norm orders; `inf` accepted.
        #[arg(long, value_delimiter = ',', default_value = "1,inf")]
        r: Vec<String>,
        #[arg(long, default_value_t = 1e-3)]
        x_lo: f64,
        #[arg(long, default_value_t = 1e3)]
        x_hi: f64,
        #[arg(long, default_value_t = 48)]
        per_decade: usize,
        /// Profile CSV file; when given, the norms JSON moves to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a linear simulation from a config file (forces the nonlinear
    /// coefficient to zero) and emit the norm-series CSV.
    Linear {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a semilinear simulation from a config file and emit the
    /// norm-series CSV.
    Semilinear {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print decay exponents and admissibility for a rate query as JSON.
    Rates {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        #[arg(long, default_value_t = 0.0)]
        s: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 0.0)]
        a: f64,
        #[arg(long, value_enum, default_value_t = CaseArg::T1)]
        case: CaseArg,
    },
    /// Run a batch of experiment configs (or the bundled reference suite)
    /// and emit the report JSON; exit code 0 iff all entries pass.
    Verify {
        /// Experiment config files (one experiment per file).
        configs: Vec<PathBuf>,
        /// Run the built-in reference suite instead of config files.
        #[arg(long)]
        bundled: bool,
        /// Directory for per-experiment CSV series.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Report JSON file; stdout when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn write_or_stdout(path: &Option<PathBuf>, content: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{content}"),
    }
    Ok(())
}

fn cmd_roots(
    params: &ModelParams,
    rho_min: f64,
    rho_max: f64,
    count: usize,
    out: &Option<PathBuf>,
) -> Result<()> {
    if !(rho_min > 0.0 && rho_max > rho_min && count >= 2) {
        bail!("need 0 < rho_min < rho_max and count >= 2");
    }
    let mut csv = String::from("rho,lambda1_re,lambda1_im,lambda2_re,lambda2_im,regime\n");
    for rho in harness::log_spaced(rho_min, rho_max, count) {
        let r = symbols::characteristic_roots(params, rho);
        let regime = match r.regime {
            symbols::RootRegime::RealDistinct => "real",
            symbols::RootRegime::ComplexPair => "complex",
            symbols::RootRegime::Degenerate => "degenerate",
        };
        csv.push_str(&format!(
            "{rho:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{regime}\n",
            r.lambda1.re, r.lambda1.im, r.lambda2.re, r.lambda2.im
        ));
    }
    write_or_stdout(out, &csv)
}

#[allow(clippy::too_many_arguments)]
fn cmd_kernel(
    params: &ModelParams,
    kind: MultiplierKind,
    t: f64,
    s: f64,
    r_list: &[String],
    x_lo: f64,
    x_hi: f64,
    per_decade: usize,
    out: &Option<PathBuf>,
) -> Result<()> {
    let p = *params;
    let symbol = move |rho: f64| symbols::multiplier(&p, kind, rho, t);
    let radii = radial::log_radii(x_lo, x_hi, per_decade);
    let cfg = radial::QuadratureConfig::default();
    let profile = radial::inverse_radial_fourier(&symbol, params.n, s, &radii, &cfg)?;

    let mut csv = String::from("x,value_re,value_im\n");
    for (x, v) in profile.radii.iter().zip(&profile.values) {
        csv.push_str(&format!("{x:.16e},{:.16e},{:.16e}\n", v.re, v.im));
    }

    let mut norms = serde_json::Map::new();
    for r_str in r_list {
        let r = if r_str == "inf" {
            f64::INFINITY
        } else {
            r_str.parse::<f64>().with_context(|| format!("bad norm order `{r_str}`"))?
        };
        let norm = radial::radial_lq_norm(&profile, r, 0.05)?;
        norms.insert(format!("L{r_str}"), serde_json::json!(norm));
    }
    let norms_json = serde_json::to_string_pretty(&serde_json::Value::Object(norms))?;

    match out {
        Some(p) => {
            fs::write(p, csv).with_context(|| format!("writing {}", p.display()))?;
            println!("{norms_json}");
        }
        None => {
            print!("{csv}");
            eprintln!("{norms_json}");
        }
    }
    Ok(())
}

fn cmd_simulate(config: &Path, force_linear: bool, out: &Option<PathBuf>) -> Result<()> {
    let text = fs::read_to_string(config)
        .with_context(|| format!("reading config {}", config.display()))?;
    let mut cfg = harness::parse_experiment(&text).map_err(|e| anyhow::anyhow!("{e}"))?;
    match &mut cfg.kind {
        ExperimentKind::Simulation { nl, .. } => {
            if force_linear {
                *nl = Nonlinearity {
                    coefficient: 0.0,
                    ..*nl
                };
            }
        }
        _ => bail!("config `{}` is not a simulation experiment", config.display()),
    }
    let result = harness::run_experiment(&cfg);
    if let Some(err) = &result.error {
        bail!("simulation failed: {err}");
    }
    let csv = result.series_csv.clone().unwrap_or_default();
    write_or_stdout(out, &csv)?;

    let summary = serde_json::json!({
        "name": result.name,
        "blowup_time": result.blowup_time,
        "ring_ratio_max": result.ring_ratio_max,
        "fitted": result.fitted,
        "predicted_exponent": result.predicted_exponent,
        "weighted_sup": result.weighted_sup,
        "pass": result.pass,
    });
    let summary_text = serde_json::to_string_pretty(&summary)?;
    match out {
        Some(p) => {
            let sidecar = p.with_extension("summary.json");
            fs::write(&sidecar, summary_text)
                .with_context(|| format!("writing {}", sidecar.display()))?;
        }
        None => eprintln!("{summary_text}"),
    }
    Ok(())
}

fn cmd_rates(query: &RateQuery) -> Result<()> {
    let json = rates::rates_json(query).map_err(|e| anyhow::anyhow!("{e}"))?;
    println!("{}", serde_json::to_string_pretty(&json)?);
    Ok(())
}

fn cmd_verify(
    config_paths: &[PathBuf],
    bundled: bool,
    out_dir: &Option<PathBuf>,
    report_path: &Option<PathBuf>,
) -> Result<bool> {
    let configs: Vec<ExperimentConfig> = if bundled {
        harness::bundled_suite()
    } else {
        if config_paths.is_empty() {
            bail!("no config files given (or use --bundled)");
        }
        let mut v = Vec::new();
        for path in config_paths {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            v.push(harness::parse_experiment(&text).map_err(|e| anyhow::anyhow!("{e}"))?);
        }
        v
    };

    let report = harness::run_verification(&configs);

    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        for exp in &report.experiments {
            if let Some(csv) = &exp.series_csv {
                fs::write(dir.join(format!("{}.csv", exp.name)), csv)?;
            }
        }
    }
    for exp in &report.experiments {
        eprintln!(
            "[{}] {} ({} ms): {}",
            if exp.pass { "pass" } else { "FAIL" },
            exp.name,
            exp.runtime_ms,
            exp.detail
        );
    }
    write_or_stdout(report_path, &report.to_json())?;
    if report_path.is_none() {
        println!();
    }
    Ok(report.all_pass)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Roots {
            params,
            rho_min,
            rho_max,
            count,
            out,
        } => cmd_roots(&params.build()?, *rho_min, *rho_max, *count, out)?,
        Command::Kernel {
            params,
            multiplier,
            t,
            s,
            r,
            x_lo,
            x_hi,
            per_decade,
            out,
        } => cmd_kernel(
            &params.build()?,
            (*multiplier).into(),
            *t,
            *s,
            r,
            *x_lo,
            *x_hi,
            *per_decade,
            out,
        )?,
        Command::Linear { config, out } => cmd_simulate(config, true, out)?,
        Command::Semilinear { config, out } => cmd_simulate(config, false, out)?,
        Command::Rates {
            params,
            m,
            q,
            s,
            p,
            a,
            case,
        } => {
            let query = RateQuery {
                params: params.build()?,
                m: *m,
                q: *q,
                s: *s,
                p: *p,
                a: *a,
                case: (*case).into(),
            };
            cmd_rates(&query)?;
        }
        Command::Verify {
            configs,
            bundled,
            out_dir,
            report,
        } => {
            let all_pass = cmd_verify(configs, *bundled, out_dir, report)?;
            if !all_pass {
                std::process::exit(1);
            }
        }
    }
    Ok(())
}
