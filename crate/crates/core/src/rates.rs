//! Closed-form evaluation of the predicted decay exponents and the
//! hypothesis brackets of the solution theory: the oracle the experiment
//! harness compares fitted slopes against.
//!
//! All exponents are powers of `(1+t)`; kernel-norm exponents come in a
//! small-time / large-time pair, the large-time formula being the
//! small-time one with `sigma2` replaced by `sigma1`.

use crate::symbols::{ModelParams, MultiplierKind};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RatesError {
    #[error("invalid rate query: {0}")]
    InvalidQuery(String),
    #[error("Gagliardo-Nirenberg denominator vanishes")]
    DegenerateDenominator,
}

/// Which global-existence theorem the query targets, keyed by the data
/// smoothness s relative to `2 sigma2` (T4 is the `||D|^a u|^p`
/// generalization, pinned to `s = 2 sigma2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum TheoremCase {
    T1,
    T2,
    T3,
    T4,
}

impl TheoremCase {
    pub fn label(&self) -> &'static str {
        match self {
            TheoremCase::T1 => "T1",
            TheoremCase::T2 => "T2",
            TheoremCase::T3 => "T3",
            TheoremCase::T4 => "T4",
        }
    }
}

/// One admissibility / decay-rate query.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RateQuery {
    pub params: ModelParams,
    pub m: f64,
    pub q: f64,
    pub s: f64,
    pub p: f64,
    pub a: f64,
    pub case: TheoremCase,
}

impl RateQuery {
    pub fn validate(&self) -> Result<(), RatesError> {
        let err = |m: String| Err(RatesError::InvalidQuery(m));
        if self.params.validate().is_err() {
            return err("model parameters invalid".into());
        }
        if !(self.m >= 1.0) {
            return err(format!("m = {} must be >= 1", self.m));
        }
        if !(self.q > 1.0 && self.q.is_finite()) {
            return err(format!("q = {} must lie in (1, inf)", self.q));
        }
        if !(self.m < self.q) {
            return err(format!("m = {} must be strictly below q = {}", self.m, self.q));
        }
        if !(self.s >= 0.0) {
            return err("s must be non-negative".into());
        }
        if !(self.p > 1.0) {
            return err(format!("p = {} must be > 1", self.p));
        }
        let two_sigma2 = 2.0 * self.params.sigma2;
        let tol = 1e-12 * two_sigma2;
        match self.case {
            TheoremCase::T1 => {
                if !(self.s < two_sigma2 - tol) {
                    return err(format!("case T1 requires s < 2 sigma2 = {two_sigma2}"));
                }
            }
            TheoremCase::T2 | TheoremCase::T4 => {
                if (self.s - two_sigma2).abs() > tol {
                    return err(format!(
                        "case {} requires s = 2 sigma2 = {two_sigma2}",
                        self.case.label()
                    ));
                }
            }
            TheoremCase::T3 => {
                if !(self.s > two_sigma2 + tol) {
                    return err(format!("case T3 requires s > 2 sigma2 = {two_sigma2}"));
                }
            }
        }
        if self.case == TheoremCase::T4 {
            if !(self.a >= 0.0 && self.a < self.params.sigma - self.params.sigma2) {
                return err(format!(
                    "case T4 requires 0 <= a < sigma - sigma2 = {}",
                    self.params.sigma - self.params.sigma2
                ));
            }
        } else if self.a != 0.0 {
            return err("a != 0 only enters case T4".into());
        }
        Ok(())
    }

    fn kappa(&self) -> f64 {
        let p = &self.params;
        (p.n as f64 / (2.0 * (p.sigma - p.sigma1))) * (1.0 / self.m - 1.0 / self.q)
    }
}

fn positive_part(x: f64) -> f64 {
    x.max(0.0)
}

/// `(1+t)` exponents of the solution channels, as printed in the theorem
/// statements. Keys: `u` (L^q), `riesz_u` (`|D|^s u`), `ut`, `riesz_ut`
/// (`|D|^{s-2 sigma2} u_t`); cases list only the channels their solution
/// space carries.
pub fn solution_decay_exponents(query: &RateQuery) -> Result<BTreeMap<String, f64>, RatesError> {
    query.validate()?;
    let p = &query.params;
    let kappa = query.kappa();
    let denom = 2.0 * (p.sigma - p.sigma1);
    let mut out = BTreeMap::new();
    out.insert("u".to_string(), 1.0 - kappa);
    out.insert("riesz_u".to_string(), 1.0 - kappa - query.s / denom);
    match query.case {
        TheoremCase::T1 => {}
        TheoremCase::T2 | TheoremCase::T4 => {
            out.insert(
                "ut".to_string(),
                1.0 - kappa - p.sigma1 / (p.sigma - p.sigma1),
            );
        }
        TheoremCase::T3 => {
            out.insert(
                "ut".to_string(),
                1.0 - kappa - p.sigma1 / (p.sigma - p.sigma1),
            );
            out.insert(
                "riesz_ut".to_string(),
                1.0 - kappa - query.s / denom + (p.sigma2 - p.sigma1) / (p.sigma - p.sigma1),
            );
        }
    }
    Ok(out)
}

/// Small-t / large-t exponent pair for `||F^{-1}(|xi|^s Khat)||_{L^r}`.
///
/// The large-time formula is the small-time one with `sigma2` replaced by
/// `sigma1` throughout (including the `2 sigma2 -> 2 sigma1` shift in the
/// `dt K1` numerator).
pub fn kernel_norm_exponents(
    params: &ModelParams,
    kind: MultiplierKind,
    r: f64,
    s: f64,
) -> (f64, f64) {
    assert!(r >= 1.0, "r = {r} below 1");
    assert!(s >= 0.0, "s = {s} negative");
    let branch = |sigma_star: f64| -> f64 {
        let denom = 2.0 * (params.sigma - sigma_star);
        let base = -(params.n as f64 / denom) * (1.0 - 1.0 / r);
        match kind {
            MultiplierKind::K0 => base - s / denom,
            MultiplierKind::K1 => base - s / denom + 1.0,
            MultiplierKind::DtK0 => base - (s + 2.0 * params.sigma) / denom + 1.0,
            MultiplierKind::DtK1 => base - (s + 2.0 * sigma_star) / denom + 1.0,
        }
    };
    (branch(params.sigma2), branch(params.sigma1))
}

/// Closed or half-open interval of admissible exponents p.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PInterval {
    pub lo: f64,
    pub lo_strict: bool,
    /// Infinite when the bracket imposes no upper limit (serializes to null).
    pub hi: f64,
    pub hi_strict: bool,
}

impl PInterval {
    pub fn is_empty(&self) -> bool {
        if self.lo < self.hi {
            false
        } else if self.lo == self.hi {
            self.lo_strict || self.hi_strict
        } else {
            true
        }
    }

    pub fn contains(&self, p: f64) -> bool {
        let above = if self.lo_strict { p > self.lo } else { p >= self.lo };
        let below = if self.hi_strict { p < self.hi } else { p <= self.hi };
        above && below
    }
}

/// Admissibility verdict for a query: the intersected p-interval, the named
/// conditions the query's own p (or its dimension) violates, and the window
/// of dimensions for which any p would work.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AdmissibleReport {
    pub feasible: bool,
    pub p_interval: PInterval,
    pub violations: Vec<String>,
    /// `(n_min_exclusive, n_max_inclusive)` window for the dimension.
    pub n_window: (f64, f64),
}

struct CaseArithmetic {
    /// ceiling argument of the smoothness condition `p > 1 + ceil(c0)`
    c0: f64,
    /// numerator shift of the bracket: upper endpoint `(n - q c1)/(n - q c2)`
    c1: f64,
    /// effective smoothness in the bracket denominators
    c2: f64,
    /// critical-exponent numerator `max{...}` and dimension shift
    crit_numerator: f64,
    dim_shift: f64,
}

fn case_arithmetic(query: &RateQuery) -> CaseArithmetic {
    let p = &query.params;
    let m = query.m;
    let (sigma, sigma1, sigma2) = (p.sigma, p.sigma1, p.sigma2);
    match query.case {
        TheoremCase::T1 => CaseArithmetic {
            c0: positive_part(query.s - sigma + sigma2),
            c1: positive_part(query.s - sigma + sigma2),
            c2: query.s,
            crit_numerator: 4.0 * m * (sigma - sigma1),
            dim_shift: 0.0,
        },
        TheoremCase::T2 => CaseArithmetic {
            c0: 3.0 * sigma2 - sigma,
            c1: 3.0 * sigma2 - sigma,
            c2: 2.0 * sigma2,
            crit_numerator: 4.0 * m * (sigma - sigma1),
            dim_shift: 0.0,
        },
        TheoremCase::T3 => CaseArithmetic {
            c0: query.s - sigma + sigma2,
            c1: query.s - sigma + sigma2,
            c2: query.s,
            crit_numerator: (m * query.s).max(4.0 * m * (sigma - sigma1)),
            dim_shift: 0.0,
        },
        TheoremCase::T4 => CaseArithmetic {
            c0: 3.0 * sigma2 - sigma,
            c1: 3.0 * sigma2 - sigma,
            c2: 2.0 * sigma2 - query.a,
            crit_numerator: 4.0 * m * (sigma - sigma1),
            dim_shift: -m * query.a,
        },
    }
}

/// Evaluate every printed hypothesis of the selected theorem for the query.
pub fn admissible_exponents(query: &RateQuery) -> Result<AdmissibleReport, RatesError> {
    query.validate()?;
    let p = &query.params;
    let (m, q, n) = (query.m, query.q, p.n as f64);
    let arith = case_arithmetic(query);

    let mut violations: Vec<String> = Vec::new();

    // dimension lower bound: n > 2m(sigma - sigma1) (+ the T4 shift)
    let n_lower = 2.0 * m * (p.sigma - p.sigma1) + arith.dim_shift;
    if !(n > n_lower) {
        violations.push("dimension lower bound".into());
    }

    // bracket window cap: n <= (q^2 c2 - q m c1)/(q - m)
    let n_cap = (q * q * arith.c2 - q * m * arith.c1) / (q - m);
    if !(n <= n_cap) {
        violations.push("dimension window".into());
    }

    let n_window = (n_lower, n_cap);

    // lower endpoint: max of the strict critical/smoothness bounds and the
    // closed Gagliardo-Nirenberg bound p >= q/m. The critical denominator is
    // n - 2m(sigma-sigma1) for T1-T3 and gains +ma in T4, i.e. n - n_lower.
    let crit = if n > n_lower {
        1.0 + arith.crit_numerator / (n - n_lower)
    } else {
        f64::INFINITY
    };
    let smooth = 1.0 + arith.c0.ceil();
    let mut lo = q / m;
    let mut lo_strict = false;
    for (v, strict) in [(crit, true), (smooth, true)] {
        if v > lo || (v == lo && strict) {
            lo = v;
            lo_strict = strict;
        }
    }

    // upper endpoint from the printed bracket
    let (hi, hi_strict) = if n <= q * arith.c2 {
        (f64::INFINITY, true)
    } else if n <= n_cap {
        ((n - q * arith.c1) / (n - q * arith.c2), false)
    } else {
        (f64::NEG_INFINITY, true) // no admissible p at this dimension
    };

    let p_interval = PInterval {
        lo,
        lo_strict,
        hi,
        hi_strict,
    };

    // named conditions the query's own p violates
    if !(query.p >= q / m) {
        violations.push("gn bracket lower".into());
    }
    if hi.is_finite() && !(query.p <= hi) {
        violations.push("gn bracket upper".into());
    }
    if !(query.p > smooth) {
        violations.push("smoothness ceiling".into());
    }
    if !(n > n_lower) || !(query.p > crit) {
        violations.push("critical exponent".into());
    }
    violations.dedup();

    Ok(AdmissibleReport {
        feasible: violations.is_empty(),
        p_interval,
        violations,
        n_window,
    })
}

/// Interpolation exponent of the fractional Gagliardo-Nirenberg inequality:
/// `theta = (1/p0 - 1/p + s/n) / (1/p0 - 1/p1 + sigma/n)`; admissible iff
/// `s/sigma <= theta <= 1`.
pub fn gn_theta(
    n: u32,
    s: f64,
    sigma_gn: f64,
    p_target: f64,
    p0: f64,
    p1: f64,
) -> Result<(f64, bool), RatesError> {
    for (name, v) in [("p", p_target), ("p0", p0), ("p1", p1)] {
        if !(v > 1.0 && v.is_finite()) {
            return Err(RatesError::InvalidQuery(format!(
                "{name} = {v} must lie in (1, inf)"
            )));
        }
    }
    if !(0.0 <= s && s < sigma_gn) {
        return Err(RatesError::InvalidQuery(format!(
            "s = {s} must lie in [0, sigma = {sigma_gn})"
        )));
    }
    let nf = n as f64;
    let denom = 1.0 / p0 - 1.0 / p1 + sigma_gn / nf;
    if denom == 0.0 {
        return Err(RatesError::DegenerateDenominator);
    }
    let theta = (1.0 / p0 - 1.0 / p_target + s / nf) / denom;
    let admissible = s / sigma_gn <= theta + 1e-15 && theta <= 1.0 + 1e-15;
    Ok((theta, admissible))
}

/// The paper states the data-space velocity regularity as
/// `[s - sigma + sigma2]^+` but one large-time line of its corollary uses
/// `[s - 2 sigma2]^+`. Both variants are exposed; they differ whenever
/// `sigma - sigma2 < ... < 2 sigma2` brackets s, which is flagged by the
/// harness as a source inconsistency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VelocitySmoothness {
    DataSpace,
    CorollaryLargeTime,
}

pub fn velocity_smoothness(params: &ModelParams, s: f64, variant: VelocitySmoothness) -> f64 {
    match variant {
        VelocitySmoothness::DataSpace => positive_part(s - params.sigma + params.sigma2),
        VelocitySmoothness::CorollaryLargeTime => positive_part(s - 2.0 * params.sigma2),
    }
}

/// JSON report for the CLI `rates` subcommand.
#[derive(Debug, serde::Serialize)]
pub struct RatesJson {
    pub feasible: bool,
    pub p_min: f64,
    pub p_min_strict: bool,
    pub p_max: f64,
    pub p_max_strict: bool,
    pub violations: Vec<String>,
    pub exponents: BTreeMap<String, f64>,
}

pub fn rates_json(query: &RateQuery) -> Result<RatesJson, RatesError> {
    let adm = admissible_exponents(query)?;
    let exps = solution_decay_exponents(query)?;
    Ok(RatesJson {
        feasible: adm.feasible,
        p_min: adm.p_interval.lo,
        p_min_strict: adm.p_interval.lo_strict,
        p_max: adm.p_interval.hi,
        p_max_strict: adm.p_interval.hi_strict,
        violations: adm.violations,
        exponents: exps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::reference_params;

    fn query(n: u32, m: f64, q: f64, s: f64, p: f64, case: TheoremCase) -> RateQuery {
        RateQuery {
            params: reference_params(n),
            m,
            q,
            s,
            p,
            a: 0.0,
            case,
        }
    }

    #[test]
    fn m_equal_q_rejected() {
        let bad = query(4, 2.0, 2.0, 0.0, 3.0, TheoremCase::T1);
        assert!(matches!(
            solution_decay_exponents(&bad),
            Err(RatesError::InvalidQuery(_))
        ));
    }

    #[test]
    fn u_channel_exponent_reference() {
        // n=4, sigma=2, sigma1=0.5, m=1, q=2, s=0: 1 - (4/3)(1/2) = 1/3
        let q = query(4, 1.0, 2.0, 0.0, 3.0, TheoremCase::T1);
        let exps = solution_decay_exponents(&q).unwrap();
        assert!((exps["u"] - 1.0 / 3.0).abs() < 1e-14);
        // s = 0 collapses the riesz channel onto u
        assert_eq!(exps["u"], exps["riesz_u"]);
    }

    #[test]
    fn t3_velocity_channels_present() {
        let mut qy = query(4, 1.0, 2.0, 3.5, 6.0, TheoremCase::T3);
        qy.s = 3.5; // > 2 sigma2 = 3
        let exps = solution_decay_exponents(&qy).unwrap();
        assert!(exps.contains_key("ut"));
        assert!(exps.contains_key("riesz_ut"));
        // riesz_ut = riesz_u + (sigma2-sigma1)/(sigma-sigma1)
        let shift = (1.5 - 0.5) / (2.0 - 0.5);
        assert!((exps["riesz_ut"] - exps["riesz_u"] - shift).abs() < 1e-14);
    }

    #[test]
    fn kernel_exponent_reference_values() {
        let p = reference_params(1);
        // K0, r=1, s=0: (0, 0)
        assert_eq!(
            kernel_norm_exponents(&p, MultiplierKind::K0, 1.0, 0.0),
            (0.0, 0.0)
        );
        // K1, r=inf, s=0, n=1: large-t = 1 - 1/3
        let (_, large) = kernel_norm_exponents(&p, MultiplierKind::K1, f64::INFINITY, 0.0);
        assert!((large - (1.0 - 1.0 / 3.0)).abs() < 1e-14);
        // K1, r=1: small-t 1 - s/(2(sigma-sigma2)), large-t 1 - s/(2(sigma-sigma1))
        let (small, large) = kernel_norm_exponents(&p, MultiplierKind::K1, 1.0, 1.0);
        assert!((small - 0.0).abs() < 1e-14);
        assert!((large - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn kernel_exponents_monotone_in_r() {
        let p = reference_params(3);
        let mut prev = f64::INFINITY;
        for &r in &[1.0, 1.5, 2.0, 4.0, 16.0, f64::INFINITY] {
            let (small, _) = kernel_norm_exponents(&p, MultiplierKind::K0, r, 0.5);
            assert!(small <= prev + 1e-15, "not monotone at r={r}");
            prev = small;
        }
    }

    #[test]
    fn large_t_is_sigma1_substitution() {
        let p = reference_params(2);
        for kind in [
            MultiplierKind::K0,
            MultiplierKind::K1,
            MultiplierKind::DtK0,
            MultiplierKind::DtK1,
        ] {
            let (small, large) = kernel_norm_exponents(&p, kind, 2.0, 0.7);
            let swapped = ModelParams {
                sigma1: p.sigma2,
                sigma2: p.sigma1,
                ..p
            };
            // evaluate the small-t branch with sigma2 := sigma1
            let (resub, _) = kernel_norm_exponents(
                &ModelParams {
                    sigma2: p.sigma1,
                    ..swapped
                },
                kind,
                2.0,
                0.7,
            );
            assert!((large - resub).abs() < 1e-14, "{kind:?}");
            assert!(small.is_finite() && large.is_finite());
        }
    }

    #[test]
    fn u_channel_matches_kernel_k1_large_t() {
        // u-channel exponent equals the K1 L^r exponent at 1 - 1/r = 1/m - 1/q
        let qy = query(4, 1.0, 2.0, 0.0, 3.0, TheoremCase::T1);
        let exps = solution_decay_exponents(&qy).unwrap();
        let r = 1.0 / (1.0 - (1.0 / qy.m - 1.0 / qy.q));
        let (_, large) = kernel_norm_exponents(&qy.params, MultiplierKind::K1, r, 0.0);
        assert!((exps["u"] - large).abs() < 1e-14);
    }

    #[test]
    fn dimension_lower_bound_violation() {
        // n <= 2m(sigma - sigma1) = 3: infeasible with the named violation
        let qy = query(3, 1.0, 2.0, 1.6, 5.0, TheoremCase::T1);
        let rep = admissible_exponents(&qy).unwrap();
        assert!(!rep.feasible);
        assert!(rep.violations.iter().any(|v| v == "dimension lower bound"));
    }

    #[test]
    fn bracket_lower_endpoint_always_above_one() {
        // q/m > 1 since m < q
        for (m, q) in [(1.0, 1.5), (2.0, 3.0), (1.0, 5.0)] {
            let qy = query(6, m, q, 1.0, 8.0, TheoremCase::T1);
            let rep = admissible_exponents(&qy).unwrap();
            assert!(rep.p_interval.lo >= q / m);
            assert!(q / m > 1.0);
        }
    }

    #[test]
    fn feasible_reference_case_t2() {
        // the configuration exercised by the simulation verification
        let params = ModelParams::new(1.2, 0.55, 0.65, 1.0, 1.0, 2).unwrap();
        let qy = RateQuery {
            params,
            m: 1.0,
            q: 2.0,
            s: 1.3,
            p: 5.0,
            a: 0.0,
            case: TheoremCase::T2,
        };
        let rep = admissible_exponents(&qy).unwrap();
        assert!(rep.feasible, "violations: {:?}", rep.violations);
        // lower endpoint: 1 + 4m(sigma-sigma1)/(n - 2m(sigma-sigma1)) = 1 + 2.6/0.7
        let expect = 1.0 + 2.6 / 0.7;
        assert!((rep.p_interval.lo - expect).abs() < 1e-12);
        assert!(rep.p_interval.hi.is_infinite());
        assert!(rep.p_interval.contains(5.0));
        assert!(!rep.p_interval.contains(4.0));
    }

    #[test]
    fn gn_theta_endpoints_and_reference() {
        // p = p1, s = sigma: theta = 1
        let (theta, ok) = gn_theta(4, 1.999999999, 2.0, 3.0, 2.0, 3.0).unwrap();
        assert!((theta - 1.0).abs() < 1e-8 && ok);
        // p = p0, s = 0: theta = 0
        let (theta, ok) = gn_theta(4, 0.0, 2.0, 3.0, 3.0, 2.0).unwrap();
        assert!(theta.abs() < 1e-14 && ok);
        // printed example: n=4, s=1, sigma=2, p0=p1=2, p=4 -> theta = 1
        let (theta, ok) = gn_theta(4, 1.0, 2.0, 4.0, 2.0, 2.0).unwrap();
        assert!((theta - 1.0).abs() < 1e-14 && ok);
    }

    #[test]
    fn gn_theta_degenerate_denominator() {
        // 1/p0 - 1/p1 + sigma/n = 0: p0 = 4, p1 = 2, sigma/n = 1/4
        assert_eq!(
            gn_theta(8, 0.5, 2.0, 3.0, 4.0, 2.0),
            Err(RatesError::DegenerateDenominator)
        );
    }

    #[test]
    fn velocity_smoothness_variants_differ() {
        let p = reference_params(1);
        let s = 1.0; // [s-sigma+sigma2]+ = 0.5, [s-2sigma2]+ = 0
        let a = velocity_smoothness(&p, s, VelocitySmoothness::DataSpace);
        let b = velocity_smoothness(&p, s, VelocitySmoothness::CorollaryLargeTime);
        assert_eq!(a, 0.5);
        assert_eq!(b, 0.0);
        assert_ne!(a, b);
    }

    #[test]
    fn admissibility_monotone_in_n() {
        // enlarging n within the window never enlarges the upper endpoint
        let mut prev_hi = f64::INFINITY;
        for n in 2..9u32 {
            let qy = query(n, 1.0, 2.0, 1.8, 4.0, TheoremCase::T1);
            let rep = admissible_exponents(&qy).unwrap();
            let hi = rep.p_interval.hi;
            assert!(
                hi <= prev_hi + 1e-12,
                "upper endpoint grew at n={n}: {hi} > {prev_hi}"
            );
            prev_hi = hi;
        }
    }
}
