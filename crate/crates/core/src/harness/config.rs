//! Line-oriented `key = value` experiment configs with dotted section
//! prefixes (`params.sigma = 2.0`). Unknown keys are errors; `#` starts a
//! comment.

use crate::evolution::{Nonlinearity, StepControls};
use crate::grid::GridSpec;
use crate::rates::TheoremCase;
use crate::symbols::{ModelParams, MultiplierKind};

use super::{DataProfile, ExperimentConfig, ExperimentKind, FitTarget, HarnessError};

#[derive(Debug, Default, Clone)]
struct RawConfig {
    entries: Vec<(String, String)>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(HarnessError::Config(format!(
                    "line {}: expected `key = value`, got `{raw}`",
                    lineno + 1
                )));
            };
            entries.push((key.trim().to_string(), value.trim().to_string()));
        }
        Ok(Self { entries })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        let idx = self.entries.iter().position(|(k, _)| k == key)?;
        Some(self.entries.remove(idx).1)
    }

    fn take_f64(&mut self, key: &str) -> Result<Option<f64>, HarnessError> {
        match self.take(key) {
            None => Ok(None),
            Some(v) if v == "inf" => Ok(Some(f64::INFINITY)),
            Some(v) => v.parse::<f64>().map(Some).map_err(|_| {
                HarnessError::Config(format!("key `{key}`: `{v}` is not a number"))
            }),
        }
    }

    fn take_usize(&mut self, key: &str) -> Result<Option<usize>, HarnessError> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v.parse::<usize>().map(Some).map_err(|_| {
                HarnessError::Config(format!("key `{key}`: `{v}` is not an integer"))
            }),
        }
    }

    fn take_u64(&mut self, key: &str) -> Result<Option<u64>, HarnessError> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v.parse::<u64>().map(Some).map_err(|_| {
                HarnessError::Config(format!("key `{key}`: `{v}` is not an integer"))
            }),
        }
    }

    fn require_f64(&mut self, key: &str) -> Result<f64, HarnessError> {
        self.take_f64(key)?
            .ok_or_else(|| HarnessError::Config(format!("missing required key `{key}`")))
    }

    fn finish(self) -> Result<(), HarnessError> {
        if let Some((k, _)) = self.entries.first() {
            return Err(HarnessError::Config(format!("unknown key `{k}`")));
        }
        Ok(())
    }
}

fn parse_params(raw: &mut RawConfig) -> Result<ModelParams, HarnessError> {
    let sigma = raw.require_f64("params.sigma")?;
    let sigma1 = raw.require_f64("params.sigma1")?;
    let sigma2 = raw.require_f64("params.sigma2")?;
    let mu1 = raw.take_f64("params.mu1")?.unwrap_or(1.0);
    let mu2 = raw.take_f64("params.mu2")?.unwrap_or(1.0);
    let n = raw.take_u64("params.n")?.unwrap_or(1) as u32;
    ModelParams::new(sigma, sigma1, sigma2, mu1, mu2, n)
        .map_err(|e| HarnessError::Config(e.to_string()))
}

fn parse_multiplier(v: &str) -> Result<MultiplierKind, HarnessError> {
    match v {
        "K0" => Ok(MultiplierKind::K0),
        "K1" => Ok(MultiplierKind::K1),
        "dtK0" => Ok(MultiplierKind::DtK0),
        "dtK1" => Ok(MultiplierKind::DtK1),
        other => Err(HarnessError::Config(format!(
            "kernel.multiplier `{other}` not one of K0, K1, dtK0, dtK1"
        ))),
    }
}

fn parse_case(v: &str) -> Result<TheoremCase, HarnessError> {
    match v {
        "T1" => Ok(TheoremCase::T1),
        "T2" => Ok(TheoremCase::T2),
        "T3" => Ok(TheoremCase::T3),
        "T4" => Ok(TheoremCase::T4),
        other => Err(HarnessError::Config(format!(
            "query.case `{other}` not one of T1..T4"
        ))),
    }
}

/// Parse one experiment config from its text form.
pub fn parse_experiment(text: &str) -> Result<ExperimentConfig, HarnessError> {
    let mut raw = RawConfig::parse(text)?;

    let name = raw
        .take("experiment.name")
        .ok_or_else(|| HarnessError::Config("missing required key `experiment.name`".into()))?;
    let kind_tag = raw
        .take("experiment.kind")
        .ok_or_else(|| HarnessError::Config("missing required key `experiment.kind`".into()))?;
    let params = parse_params(&mut raw)?;
    let slope_tolerance = raw.take_f64("tolerance.slope")?.unwrap_or(0.05);

    let query = {
        let m = raw.take_f64("query.m")?;
        let q = raw.take_f64("query.q")?;
        match (m, q) {
            (Some(m), Some(q)) => Some(crate::rates::RateQuery {
                params,
                m,
                q,
                s: raw.take_f64("query.s")?.unwrap_or(0.0),
                p: raw.take_f64("query.p")?.unwrap_or(2.0),
                a: raw.take_f64("query.a")?.unwrap_or(0.0),
                case: parse_case(&raw.take("query.case").unwrap_or_else(|| "T1".into()))?,
            }),
            (None, None) => None,
            _ => {
                return Err(HarnessError::Config(
                    "query.m and query.q must be given together".into(),
                ))
            }
        }
    };

    let kind = match kind_tag.as_str() {
        "kernel_norm" => {
            let multiplier = parse_multiplier(
                &raw.take("kernel.multiplier")
                    .ok_or_else(|| HarnessError::Config("missing `kernel.multiplier`".into()))?,
            )?;
            ExperimentKind::KernelNorm {
                multiplier,
                r: raw.take_f64("kernel.r")?.unwrap_or(1.0),
                s: raw.take_f64("kernel.s")?.unwrap_or(0.0),
                window: (
                    raw.require_f64("kernel.window_lo")?,
                    raw.require_f64("kernel.window_hi")?,
                ),
                points: raw.take_usize("kernel.points")?.unwrap_or(7),
            }
        }
        "simulation" => {
            let grid = GridSpec::new(
                params.n,
                raw.take_usize("grid.points")?.unwrap_or(512),
                raw.take_f64("grid.half_length")?.unwrap_or(80.0),
            )
            .map_err(|e| HarnessError::Config(e.to_string()))?;
            let data = match raw.take("data.kind").as_deref().unwrap_or("gaussian") {
                "gaussian" => DataProfile::Gaussian {
                    amplitude: raw.take_f64("data.amplitude")?.unwrap_or(1e-2),
                    width: raw.take_f64("data.width")?.unwrap_or(2.0),
                    velocity_amplitude: raw.take_f64("data.velocity_amplitude")?.unwrap_or(0.0),
                },
                "band_limited" => DataProfile::BandLimited {
                    amplitude: raw.take_f64("data.amplitude")?.unwrap_or(1e-2),
                    cutoff: raw.take_f64("data.cutoff")?.unwrap_or(2.0),
                    seed: raw.take_u64("data.seed")?.unwrap_or(1),
                },
                other => {
                    return Err(HarnessError::Config(format!(
                        "data.kind `{other}` not one of gaussian, band_limited"
                    )))
                }
            };
            let nl = Nonlinearity {
                p: raw.take_f64("nl.p")?.unwrap_or(2.0),
                a: raw.take_f64("nl.a")?.unwrap_or(0.0),
                coefficient: raw.take_f64("nl.coefficient")?.unwrap_or(0.0),
            };
            let controls = StepControls {
                h: raw.take_f64("step.h")?.unwrap_or(0.25),
                corrector_iterations: raw.take_u64("step.correctors")?.unwrap_or(2) as u32,
                dealias_fraction: raw.take_f64("step.dealias")?.unwrap_or(2.0 / 3.0),
                blowup_threshold: raw.take_f64("step.blowup_threshold")?.unwrap_or(0.0),
            };
            let horizon = raw.require_f64("run.horizon")?;
            ExperimentKind::Simulation {
                grid,
                data,
                nl,
                controls,
                horizon,
                samples: raw.take_usize("run.samples")?.unwrap_or(32),
                first_sample: raw.take_f64("run.start")?.unwrap_or(horizon / 200.0),
                fit_window: (
                    raw.require_f64("fit.window_lo")?,
                    raw.require_f64("fit.window_hi")?,
                ),
                fit_target: match raw.take("fit.channel").as_deref().unwrap_or("u") {
                    "u" => FitTarget::U,
                    "riesz_u" => FitTarget::RieszU,
                    "ut" => FitTarget::Ut,
                    "riesz_ut" => FitTarget::RieszUt,
                    other => {
                        return Err(HarnessError::Config(format!(
                            "fit.channel `{other}` not one of u, riesz_u, ut, riesz_ut"
                        )))
                    }
                },
            }
        }
        "rates_check" => ExperimentKind::RatesCheck {
            expect_feasible: match raw
                .take("rates.expect_feasible")
                .as_deref()
                .unwrap_or("true")
            {
                "true" => true,
                "false" => false,
                other => {
                    return Err(HarnessError::Config(format!(
                        "rates.expect_feasible `{other}` not true/false"
                    )))
                }
            },
        },
        other => {
            return Err(HarnessError::Config(format!(
                "experiment.kind `{other}` not one of kernel_norm, simulation, rates_check"
            )))
        }
    };

    raw.finish()?;

    Ok(ExperimentConfig {
        name,
        params,
        query,
        kind,
        slope_tolerance,
    })
}
