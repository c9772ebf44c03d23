//! Configured experiments: single runs, sweeps with a log–log fit, the
//! brute-force oracle comparison, and the randomized self-test suites.
//!
//! Everything here is deterministic for a fixed config. Wall-clock timings
//! are the one exception and are only recorded when asked for, so reports
//! written without them are byte-stable across machines and worker counts.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::construction::{
    construct_with, szt_incidence_construction_with, Alpha, Construction, ConstructionParams,
    FamilyPath,
};
use crate::error::{Error, Result};
use crate::gap;
use crate::geometry::{line_through, on_line, rich_lines_bruteforce, CanonicalLine, Point};
use crate::numberfield::{BasisSpec, Element, NiceBasis};

/// Largest realized `|P|` the oracle accepts.
pub const ORACLE_CAP: usize = 50_000;

/// `"p/q"` or a bare integer.
fn parse_fraction(s: &str) -> std::result::Result<BigRational, String> {
    let s = s.trim();
    let q = match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|e| format!("bad numerator in {s:?}: {e}"))?;
            let q = BigInt::from_str(q.trim()).map_err(|e| format!("bad denominator in {s:?}: {e}"))?;
            if q.is_zero() {
                return Err(format!("zero denominator in {s:?}"));
            }
            BigRational::new(p, q)
        }
        None => BigRational::from_integer(
            BigInt::from_str(s).map_err(|_| format!("expected a fraction \"p/q\", got {s:?}"))?,
        ),
    };
    Ok(q)
}

/// The exponent `α ∈ (0, 1/2]`, written `"p/q"` in JSON.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AlphaSpec(pub Alpha);

impl FromStr for AlphaSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let q = parse_fraction(s)?;
        if !q.is_positive() || q > BigRational::new(1.into(), 2.into()) {
            return Err(format!("alpha = {q} must lie in (0, 1/2]"));
        }
        let p: u32 = q.numer().try_into().map_err(|_| "alpha numerator too large".to_string())?;
        let d: u32 = q.denom().try_into().map_err(|_| "alpha denominator too large".to_string())?;
        Ok(AlphaSpec(Ratio::new(p, d)))
    }
}

impl fmt::Display for AlphaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

/// `C₁`: a fixed fraction in `(0, 1]`, or `"auto"` for halving from 1.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum C1Spec {
    #[default]
    Auto,
    Fixed(BigRational),
}

impl FromStr for C1Spec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.trim() == "auto" {
            return Ok(C1Spec::Auto);
        }
        let q = parse_fraction(s)?;
        if !q.is_positive() || q > BigRational::one() {
            return Err(format!("c1 = {q} must lie in (0, 1] or be \"auto\""));
        }
        Ok(C1Spec::Fixed(q))
    }
}

impl fmt::Display for C1Spec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            C1Spec::Auto => write!(f, "auto"),
            C1Spec::Fixed(q) => write!(f, "{}", fraction(q)),
        }
    }
}

/// Always `p/q`, including integers.
fn fraction(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

macro_rules! string_serde {
    ($ty:ty, $expecting:literal) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                struct V;
                impl de::Visitor<'_> for V {
                    type Value = $ty;
                    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                        f.write_str($expecting)
                    }
                    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<$ty, E> {
                        v.parse().map_err(E::custom)
                    }
                }
                d.deserialize_str(V)
            }
        }
    };
}

string_serde!(AlphaSpec, "a fraction string \"p/q\" in (0, 1/2]");
string_serde!(C1Spec, "a fraction string \"p/q\" in (0, 1] or \"auto\"");

/// Experiment configuration as read from JSON.
///
/// With `m` set, the run is the incidence reduction for `(n, m)`, and `r`
/// and `alpha` are derived rather than given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub basis: BasisSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<AlphaSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_list: Option<Vec<u64>>,
    #[serde(default)]
    pub c1: C1Spec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
}

fn config_error(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

/// Which parameter a sweep varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    R,
    N,
}

impl Config {
    /// Parses and validates, reporting the offending field by path.
    pub fn from_json(text: &str) -> Result<Config> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: Config = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_error(if path.is_empty() { "." } else { &path }, e.into_inner().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Config> {
        Config::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.n, &self.n_list) {
            (Some(_), Some(_)) => return Err(config_error("n_list", "give either n or n_list, not both")),
            (None, None) => return Err(config_error("n", "missing: give n or n_list")),
            _ => {}
        }
        if self.r.is_some() && self.r_list.is_some() {
            return Err(config_error("r_list", "give either r or r_list, not both"));
        }
        if self.n_list.is_some() && self.r_list.is_some() {
            return Err(config_error("r_list", "a sweep varies only one of n and r"));
        }
        for &n in self.n.iter().chain(self.n_list.iter().flatten()) {
            if n < 2 {
                return Err(config_error("n", format!("{n} must be at least 2")));
            }
        }
        for &r in self.r.iter().chain(self.r_list.iter().flatten()) {
            if r < 2 {
                return Err(config_error("r", format!("{r} must be at least 2")));
            }
        }
        if let Some(m) = self.m {
            if m == 0 {
                return Err(config_error("m", "must be positive"));
            }
            if self.alpha.is_some() || self.r.is_some() || self.r_list.is_some() {
                return Err(config_error("m", "alpha and r are derived from n and m; omit them"));
            }
            if self.c1 != C1Spec::Auto {
                return Err(config_error("c1", "the incidence reduction always auto-tunes c1"));
            }
        } else {
            if self.alpha.is_none() {
                return Err(config_error("alpha", "missing"));
            }
            if self.r.is_none() && self.r_list.is_none() {
                return Err(config_error("r", "missing: give r or r_list"));
            }
        }
        Ok(())
    }

    /// The single-point configs this config expands to, in order.
    pub fn points(&self) -> Vec<Config> {
        let single = |n: u64, r: Option<u64>| Config {
            n: Some(n),
            n_list: None,
            r,
            r_list: None,
            ..self.clone()
        };
        match (&self.n_list, &self.r_list) {
            (Some(ns), _) => ns.iter().map(|&n| single(n, self.r)).collect(),
            (None, Some(rs)) => rs.iter().map(|&r| single(self.n.unwrap_or(0), Some(r))).collect(),
            (None, None) => vec![single(self.n.unwrap_or(0), self.r)],
        }
    }

    pub fn sweep_variable(&self) -> Option<SweepVariable> {
        if self.n_list.is_some() {
            Some(SweepVariable::N)
        } else if self.r_list.is_some() {
            Some(SweepVariable::R)
        } else {
            None
        }
    }
}

/// Execution knobs that do not change any count.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the available parallelism, and `Some(1)`
    /// also switches line generation to the reference path.
    pub workers: Option<usize>,
    /// Record wall-clock phase timings in the report.
    pub timings: bool,
}

impl RunOptions {
    fn path(&self) -> FamilyPath {
        if self.workers == Some(1) {
            FamilyPath::Reference
        } else {
            FamilyPath::Shifted
        }
    }

    /// Runs `f` on a dedicated pool of the configured size.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(k) = self.workers {
            if k == 0 {
                return Err(crate::error::invalid("workers", "must be at least 1"));
            }
            builder = builder.num_threads(k);
        }
        let pool = builder
            .build()
            .map_err(|e| crate::error::invalid("workers", e.to_string()))?;
        Ok(pool.install(f))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimes {
    pub construct_ms: u64,
    pub oracle_ms: Option<u64>,
    pub total_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    /// `r`-rich lines of `P` found by pair grouping.
    pub oracle_lines: usize,
    pub family_lines: usize,
    /// Every line of `L` is among the oracle's lines.
    pub subset: bool,
    /// `|L| / |oracle|`; 1 when the oracle finds nothing.
    pub coverage: f64,
    /// The first line of `L` the oracle does not report.
    pub missing: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub m: u64,
    pub ratio_nominal: f64,
    pub ratio_realized: f64,
    /// `α` values tried and rejected before the one used.
    pub rejected: Vec<String>,
}

/// Everything measured on one parameter point. The `echo` config re-runs it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub basis: String,
    pub d: usize,
    pub n_nominal: u64,
    pub p_realized: usize,
    pub alpha: String,
    pub r: u64,
    pub c1: String,
    pub tune_steps: u32,
    pub num_lines: usize,
    pub cell_lines: usize,
    pub min_richness: u64,
    pub frac_r_rich: f64,
    pub incidences: u64,
    pub rate_claim4: f64,
    pub rate_claim3: f64,
    pub rate_claim1: f64,
    pub translates: usize,
    pub disjoint: bool,
    pub translates_contained: bool,
    pub failure: Option<String>,
    pub oracle: Option<OracleReport>,
    pub reduction: Option<ReductionReport>,
    pub runtime_ms: Option<PhaseTimes>,
    pub seed: u64,
    pub echo: Config,
}

/// A finished run: the report and the construction it describes.
pub struct Outcome {
    pub report: ExperimentReport,
    pub construction: Construction,
}

fn basis_of(config: &Config) -> Result<Arc<NiceBasis>> {
    config
        .basis
        .build()
        .map(Arc::new)
        .map_err(|e| config_error("basis", e.to_string()))
}

/// Runs one parameter point. Sweep configs are rejected; use [`sweep`].
pub fn run(config: &Config, opts: &RunOptions) -> Result<Outcome> {
    config.validate()?;
    if config.sweep_variable().is_some() {
        return Err(config_error("n_list/r_list", "a sweep config needs the sweep command"));
    }
    opts.install(|| run_point(config, opts, false))?
}

fn run_point(config: &Config, opts: &RunOptions, with_oracle: bool) -> Result<Outcome> {
    let start = Instant::now();
    let basis = basis_of(config)?;
    let n = config.n.expect("validated single point");
    let (construction, reduction) = match config.m {
        Some(m) => {
            let ic = szt_incidence_construction_with(&basis, n, m, opts.path())?;
            let reduction = ReductionReport {
                m,
                ratio_nominal: ic.ratio_nominal,
                ratio_realized: ic.ratio_realized,
                rejected: ic.rejected.iter().map(|(a, why)| format!("{a}: {why}")).collect(),
            };
            (ic.construction, Some(reduction))
        }
        None => {
            let (c1, auto_tune) = match &config.c1 {
                C1Spec::Auto => (BigRational::one(), true),
                C1Spec::Fixed(q) => (q.clone(), false),
            };
            let params = ConstructionParams {
                basis: basis.clone(),
                n,
                alpha: config.alpha.expect("validated").0,
                r: config.r.expect("validated single point"),
                c1,
                auto_tune,
            };
            (construct_with(&params, opts.path())?, None)
        }
    };
    let construct_ms = elapsed_ms(start);

    let oracle_start = Instant::now();
    let oracle = if with_oracle {
        Some(oracle_compare(&construction)?)
    } else {
        None
    };
    let oracle_ms = with_oracle.then(|| elapsed_ms(oracle_start));

    let report = report_of(config, &construction, oracle, reduction, opts.timings.then(|| PhaseTimes {
        construct_ms,
        oracle_ms,
        total_ms: elapsed_ms(start),
    }));
    Ok(Outcome {
        report,
        construction,
    })
}

fn elapsed_ms(since: Instant) -> u64 {
    since.elapsed().as_millis() as u64
}

fn report_of(
    config: &Config,
    c: &Construction,
    oracle: Option<OracleReport>,
    reduction: Option<ReductionReport>,
    runtime_ms: Option<PhaseTimes>,
) -> ExperimentReport {
    let (rate_claim3, rate_claim4) = c.claim3_claim4();
    ExperimentReport {
        basis: c.params.basis.description().to_string(),
        d: c.params.basis.degree(),
        n_nominal: c.pointset.n_nominal,
        p_realized: c.pointset.len(),
        alpha: AlphaSpec(c.params.alpha).to_string(),
        r: c.params.r,
        c1: fraction(&c.params.c1),
        tune_steps: c.tune_steps,
        num_lines: c.family.len(),
        cell_lines: c.family.cell_lines,
        min_richness: c.claim2.min_richness,
        frac_r_rich: c.claim2.frac_r_rich(),
        incidences: c.incidences(),
        rate_claim4,
        rate_claim3,
        rate_claim1: c.claim1(),
        translates: translate_total(c),
        disjoint: c.disjointness.disjoint,
        translates_contained: c.geometry.translates_contained,
        failure: c
            .claim2
            .failure
            .as_ref()
            .map(|(line, k)| format!("{line} has {k} points")),
        oracle,
        reduction,
        runtime_ms,
        seed: config.seed,
        echo: config.clone(),
    }
}

fn translate_total(c: &Construction) -> usize {
    usize::try_from(c.geometry.translate_count()).unwrap_or(usize::MAX)
}

/// Brute-force `r`-rich lines of `P` against the family.
pub fn oracle_compare(c: &Construction) -> Result<OracleReport> {
    let points = &c.pointset.points;
    if points.len() > ORACLE_CAP {
        return Err(Error::SizeCap(format!(
            "the oracle groups all pairs of P and is capped at |P| <= {ORACLE_CAP}, got {}; \
             lower n to cross-check",
            points.len()
        )));
    }
    let basis = &*c.params.basis;
    let rich = rich_lines_bruteforce(basis, points, c.params.r)?;
    let missing = c.family.lines.iter().find(|l| !rich.contains_key(l));
    Ok(OracleReport {
        oracle_lines: rich.len(),
        family_lines: c.family.len(),
        subset: missing.is_none(),
        coverage: if rich.is_empty() {
            1.0
        } else {
            c.family.len() as f64 / rich.len() as f64
        },
        missing: missing.map(|l| l.to_string()),
    })
}

/// [`run`] plus the oracle comparison.
pub fn oracle(config: &Config, opts: &RunOptions) -> Result<Outcome> {
    config.validate()?;
    if config.sweep_variable().is_some() {
        return Err(config_error("n_list/r_list", "the oracle runs on a single point"));
    }
    opts.install(|| run_point(config, opts, true))?
}

/// Ordinary least squares fit of `ln y` against `ln x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub variable: SweepVariable,
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
    pub points: usize,
    /// `max / min` of `|L|·r³/|P|²` over the sweep.
    pub rate_claim4_band: f64,
}

/// Slope and intercept of the least-squares line through `(ln x, ln y)`,
/// with per-point residuals.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, Vec<f64>)> {
    if xs.len() != ys.len() {
        return Err(Error::FitUndefined(format!("{} x values for {} y values", xs.len(), ys.len())));
    }
    if xs.len() < 3 {
        return Err(Error::FitUndefined(format!("need at least 3 points, got {}", xs.len())));
    }
    if let Some(v) = xs.iter().chain(ys).find(|&&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::FitUndefined(format!("log of non-positive value {v}")));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::FitUndefined("all x values are equal".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = lx.iter().zip(&ly).map(|(x, y)| y - (intercept + slope * x)).collect();
    Ok((slope, intercept, residuals))
}

pub struct SweepOutcome {
    pub reports: Vec<ExperimentReport>,
    pub fit: FitResult,
}

/// Runs every point of an `r_list` or `n_list` config and fits
/// `ln |L|` against `ln r` (or `ln |P|`).
pub fn sweep(config: &Config, opts: &RunOptions) -> Result<SweepOutcome> {
    config.validate()?;
    let variable = config
        .sweep_variable()
        .ok_or_else(|| config_error("r_list", "a sweep needs r_list or n_list"))?;
    let points = config.points();
    if points.len() < 3 {
        return Err(Error::FitUndefined(format!(
            "a sweep needs at least 3 points, got {}",
            points.len()
        )));
    }
    let reports = opts.install(|| {
        points
            .iter()
            .map(|p| run_point(p, opts, false).map(|o| o.report))
            .collect::<Result<Vec<_>>>()
    })??;
    let xs: Vec<f64> = reports
        .iter()
        .map(|r| match variable {
            SweepVariable::R => r.r as f64,
            SweepVariable::N => r.p_realized as f64,
        })
        .collect();
    let ys: Vec<f64> = reports.iter().map(|r| r.num_lines as f64).collect();
    let (slope, intercept, residuals) = fit_loglog(&xs, &ys)?;
    let rates: Vec<f64> = reports.iter().map(|r| r.rate_claim4).collect();
    let hi = rates.iter().cloned().fold(f64::MIN, f64::max);
    let lo = rates.iter().cloned().fold(f64::MAX, f64::min);
    let fit = FitResult {
        variable,
        slope,
        intercept,
        residuals,
        points: reports.len(),
        rate_claim4_band: if lo > 0.0 { hi / lo } else { f64::INFINITY },
    };
    Ok(SweepOutcome { reports, fit })
}

pub const CSV_HEADER: [&str; 15] = [
    "basis",
    "d",
    "n_nominal",
    "p_realized",
    "alpha",
    "r",
    "c1",
    "num_lines",
    "min_richness",
    "frac_r_rich",
    "incidences",
    "rate_claim4",
    "rate_claim3",
    "rate_claim1",
    "runtime_ms",
];

/// One CSV row per report under [`CSV_HEADER`]; `runtime_ms` is empty
/// unless timings were recorded.
pub fn write_csv<W: Write>(w: W, reports: &[ExperimentReport]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for r in reports {
        out.write_record([
            r.basis.clone(),
            r.d.to_string(),
            r.n_nominal.to_string(),
            r.p_realized.to_string(),
            r.alpha.clone(),
            r.r.to_string(),
            r.c1.clone(),
            r.num_lines.to_string(),
            r.min_richness.to_string(),
            r.frac_r_rich.to_string(),
            r.incidences.to_string(),
            r.rate_claim4.to_string(),
            r.rate_claim3.to_string(),
            r.rate_claim1.to_string(),
            r.runtime_ms
                .as_ref()
                .map(|t| t.total_ms.to_string())
                .unwrap_or_default(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// A gnuplot script plotting `sweep.csv` on log–log axes with the fit.
pub fn gnuplot_script(fit: &FitResult) -> String {
    let (column, label) = match fit.variable {
        SweepVariable::R => (6, "r"),
        SweepVariable::N => (4, "|P|"),
    };
    format!(
        "set datafile separator ','\n\
         set logscale xy\n\
         set key top right\n\
         set xlabel '{label}'\n\
         set ylabel 'number of lines'\n\
         f(x) = exp({intercept}) * x**({slope})\n\
         plot 'sweep.csv' using {column}:8 every ::1 with points pt 7 title 'lines', \\\n\
         \x20    f(x) with lines title sprintf('slope %.3f', {slope})\n",
        intercept = fit.intercept,
        slope = fit.slope,
    )
}

/// Writes `sweep.csv`, `reports.json`, `fit.json` and `sweep.gp` into `dir`.
pub fn write_sweep(dir: &Path, outcome: &SweepOutcome) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_csv(std::fs::File::create(dir.join("sweep.csv"))?, &outcome.reports)?;
    write_json(&dir.join("reports.json"), &outcome.reports)?;
    write_json(&dir.join("fit.json"), &outcome.fit)?;
    std::fs::write(dir.join("sweep.gp"), gnuplot_script(&outcome.fit))?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

// Randomized self-tests.

/// Outcome of one property suite on one basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: String,
    pub basis: String,
    pub samples: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// The bases exercised by [`selftest`].
pub fn selftest_bases() -> Vec<BasisSpec> {
    vec![
        BasisSpec::Integers,
        BasisSpec::Quadratic { k: 2 },
        BasisSpec::Quadratic { k: 5 },
        BasisSpec::Quadratic { k: -1 },
        BasisSpec::Power { minpoly: vec![-2, 0, 0] },
        BasisSpec::Power { minpoly: vec![-1, -1, 0, 0] },
    ]
}

pub const SUITES: [&str; 5] = ["ring-axioms", "divide-roundtrip", "embedding", "gap-closure", "line-symmetry"];

fn random_element(rng: &mut ChaCha8Rng, d: usize, bound: i64) -> Element {
    Element::from_i64s(&(0..d).map(|_| rng.gen_range(-bound..=bound)).collect::<Vec<_>>())
}

fn random_nonzero(rng: &mut ChaCha8Rng, d: usize, bound: i64) -> Element {
    loop {
        let e = random_element(rng, d, bound);
        if !e.is_zero() {
            return e;
        }
    }
}

/// A uniform element of `A_m(Λ)`.
fn random_in_gap(rng: &mut ChaCha8Rng, d: usize, radius: &BigInt) -> Element {
    let r: i64 = radius.try_into().unwrap_or(i64::MAX / 4);
    random_element(rng, d, r)
}

type Check = std::result::Result<(), String>;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn lift(e: Error) -> String {
    e.to_string()
}

fn ring_axioms(b: &NiceBasis, rng: &mut ChaCha8Rng) -> Check {
    let d = b.degree();
    let (x, y, z) = (random_element(rng, d, 50), random_element(rng, d, 50), random_element(rng, d, 50));
    let xy = b.mul(&x, &y).map_err(lift)?;
    ensure(xy == b.mul(&y, &x).map_err(lift)?, || format!("xy != yx for x = {x}, y = {y}"))?;
    let left = b.mul(&xy, &z).map_err(lift)?;
    let right = b.mul(&x, &b.mul(&y, &z).map_err(lift)?).map_err(lift)?;
    ensure(left == right, || format!("(xy)z != x(yz) for {x}, {y}, {z}"))?;
    let dist = b.mul(&x, &b.add(&y, &z).map_err(lift)?).map_err(lift)?;
    let split = b.add(&xy, &b.mul(&x, &z).map_err(lift)?).map_err(lift)?;
    ensure(dist == split, || format!("x(y+z) != xy+xz for {x}, {y}, {z}"))?;
    let inv = b.add(&x, &b.neg(&x).map_err(lift)?).map_err(lift)?;
    ensure(inv.is_zero(), || format!("x + (-x) != 0 for {x}"))?;
    let unit = b.mul_rational(&x.to_rational(), b.unity()).map_err(lift)?;
    ensure(unit == x.to_rational(), || format!("1·x != x for {x}"))
}

fn divide_roundtrip(b: &NiceBasis, rng: &mut ChaCha8Rng) -> Check {
    let d = b.degree();
    let a = random_element(rng, d, 50);
    let v = random_nonzero(rng, d, 50);
    let q = b.divide(&a, &v).map_err(lift)?;
    let back = b.mul_rational(&q, &v.to_rational()).map_err(lift)?;
    ensure(back == a.to_rational(), || format!("(a/b)·b != a for a = {a}, b = {v}"))?;
    let prod = b.mul(&a, &v).map_err(lift)?;
    let again = b.divide(&prod, &v).map_err(lift)?;
    ensure(again == a.to_rational(), || format!("(a·b)/b != a for a = {a}, b = {v}"))
}

fn embedding(b: &NiceBasis, rng: &mut ChaCha8Rng) -> Check {
    let d = b.degree();
    let (x, y) = (random_element(rng, d, 20), random_element(rng, d, 20));
    let (ex, ey) = (b.embed(&x), b.embed(&y));
    let sum = b.embed(&b.add(&x, &y).map_err(lift)?);
    let prod = b.embed(&b.mul(&x, &y).map_err(lift)?);
    let scale = 1.0 + ex.norm() * ey.norm() + ex.norm() + ey.norm();
    let tol = 1e-9 * scale;
    ensure((sum - (ex + ey)).norm() <= tol, || format!("embedding not additive on {x}, {y}"))?;
    ensure((prod - ex * ey).norm() <= tol, || format!("embedding not multiplicative on {x}, {y}"))
}

fn gap_closure(b: &NiceBasis, rng: &mut ChaCha8Rng) -> Check {
    let d = b.degree();
    let m = BigRational::from_integer(rng.gen_range(1..=100_000u64).into());
    let m2 = BigRational::from_integer(rng.gen_range(1..=100_000u64).into());
    let one = BigInt::one();
    let a = random_in_gap(rng, d, &gap::gap_radius_rational(&m, d).map_err(lift)?);
    let a2 = random_in_gap(rng, d, &gap::gap_radius_rational(&m2, d).map_err(lift)?);
    let sum = b.add(&a, &a2).map_err(lift)?;
    let sb = gap::sum_bound(&m, &m2, d).map_err(lift)?;
    ensure(gap::contains(b, &sb, &one, &sum).map_err(lift)?, || {
        format!("{a} + {a2} not in A_{sb} (m = {m}, m' = {m2})")
    })?;
    let prod = b.mul(&a, &a2).map_err(lift)?;
    let pb = gap::product_bound(&m, &m2, d, b.c_lambda()).map_err(lift)?;
    ensure(gap::contains(b, &pb, &one, &prod).map_err(lift)?, || {
        format!("{a}·{a2} not in A_{pb} (m = {m}, m' = {m2})")
    })
}

fn line_symmetry(b: &NiceBasis, rng: &mut ChaCha8Rng) -> Check {
    let d = b.degree();
    let p = Point::new(random_element(rng, d, 20), random_element(rng, d, 20));
    let q = loop {
        let q = Point::new(random_element(rng, d, 20), random_element(rng, d, 20));
        if q != p {
            break q;
        }
    };
    let pq: CanonicalLine = line_through(b, &p, &q).map_err(lift)?;
    let qp = line_through(b, &q, &p).map_err(lift)?;
    ensure(pq == qp, || format!("line(p, q) != line(q, p) for p = {p}, q = {q}"))?;
    ensure(on_line(b, &p, &pq).map_err(lift)? && on_line(b, &q, &pq).map_err(lift)?, || {
        format!("{pq} misses its defining points")
    })
}

/// Runs every suite on every basis with `samples` draws each. Each
/// (suite, basis) pair gets its own stream derived from `seed`.
pub fn selftest(seed: u64, samples: usize) -> Result<Vec<SuiteResult>> {
    let checks: [fn(&NiceBasis, &mut ChaCha8Rng) -> Check; 5] =
        [ring_axioms, divide_roundtrip, embedding, gap_closure, line_symmetry];
    let mut results = Vec::new();
    for (bi, spec) in selftest_bases().iter().enumerate() {
        let basis = spec.build()?;
        for (si, (name, check)) in SUITES.iter().zip(checks).enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((bi * SUITES.len() + si) as u64);
            let mut failures = 0;
            let mut first_failure = None;
            for _ in 0..samples {
                if let Err(why) = check(&basis, &mut rng) {
                    failures += 1;
                    first_failure.get_or_insert(why);
                }
            }
            results.push(SuiteResult {
                suite: name.to_string(),
                basis: basis.description().to_string(),
                samples,
                failures,
                first_failure,
            });
        }
    }
    Ok(results)
}

/// Real coordinates of `P` for plotting; `None` when the embedding is not
/// real and a planar picture would be meaningless.
pub fn embedded_points(c: &Construction) -> Option<Vec<(f64, f64)>> {
    let basis = &c.params.basis;
    if !basis.is_real() {
        return None;
    }
    Some(
        c.pointset
            .points
            .iter()
            .map(|p| (basis.embed(&p.x).re, basis.embed(&p.y).re))
            .collect(),
    )
}
