//! Scenario configs: TOML documents parsed into validated [`ScenarioConfig`]s.
//!
//! Big integers are decimal strings, rationals are `"p/q"` strings, windows
//! are `"a..b"` strings. Validation errors carry the offending field path.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::Deserialize;

use crate::approx::{SeriesMode, SeriesSpec};
use crate::criteria::{HypothesisSet, Window};
use crate::error::{Error, Result};
use crate::relations::{SearchConfig, SearchMethod};
use crate::sequences::SequenceSpec;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: String,
    window: String,
    series: RawSeries,
    #[serde(default)]
    hypotheses: Vec<RawHypothesis>,
    convergents: Option<RawConvergents>,
    subspace: Option<RawSubspace>,
    search: Option<RawSearch>,
    probe: Option<RawProbe>,
    #[serde(default)]
    prefix_bounds: Vec<RawPrefixBound>,
    output: Option<RawOutput>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSeries {
    mode: String,
    denominators: String,
    coefficients: Vec<String>,
    delta: Option<String>,
    epsilon: Option<String>,
    #[serde(default)]
    bounded_coefficients: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHypothesis {
    kind: String,
    delta: Option<String>,
    epsilon: Option<String>,
    alpha: Option<String>,
    m: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConvergents {
    orders: Option<String>,
    #[serde(default = "yes")]
    exponents: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSubspace {
    orders: Option<String>,
    precision: Option<u64>,
    #[serde(default)]
    deltas: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSearch {
    bound: u64,
    precision: u64,
    method: Option<String>,
    lll_delta: Option<String>,
    verify_window: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProbe {
    bound: u64,
    window: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPrefixBound {
    label: String,
    base: String,
    deltas: Vec<String>,
    orders: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    format: Option<String>,
    path: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Table,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "table" => Ok(OutputFormat::Table),
            other => Err(Error::Domain(format!("unknown format `{other}` (json or table)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergentSettings {
    pub orders: Window,
    pub exponents: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceSettings {
    pub orders: Window,
    pub precision_bits: u64,
    /// `delta'` values checked with the forms inequality.
    pub deltas: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchSettings {
    pub config: SearchConfig,
    pub verify_window: Window,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeSettings {
    pub bound: u64,
    pub window: Window,
}

/// `(b_1 .. b_N)^{base + delta}` against `b_{N+1}` for each `delta` and `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixBoundSettings {
    pub label: String,
    pub base: BigRational,
    pub deltas: Vec<BigRational>,
    pub orders: Window,
}

#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub name: String,
    pub series: SeriesSpec,
    pub window: Window,
    pub hypotheses: Vec<HypothesisSet>,
    pub convergents: ConvergentSettings,
    pub subspace: Option<SubspaceSettings>,
    pub search: Option<SearchSettings>,
    pub probe: Option<ProbeSettings>,
    pub prefix_bounds: Vec<PrefixBoundSettings>,
    pub format: OutputFormat,
    pub output_path: Option<String>,
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Domain(format!("`{s}` is not a rational of the form p/q"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| bad())?;
    let d = BigInt::from_str(d).map_err(|_| bad())?;
    if !d.is_positive() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

pub fn parse_window(s: &str) -> Result<Window> {
    let s = s.trim();
    let (a, b) = s.split_once("..").ok_or_else(|| Error::Domain(format!("`{s}` is not a window a..b")))?;
    let a = a.trim().parse::<u64>().map_err(|_| Error::Domain(format!("bad window start in `{s}`")))?;
    let b = b.trim().parse::<u64>().map_err(|_| Error::Domain(format!("bad window end in `{s}`")))?;
    Window::new(a, b)
}

fn at<T>(path: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Config { .. } => e,
        Error::Domain(m) | Error::Precondition(m) => Error::config(path, m),
        other => Error::config(path, other.to_string()),
    })
}

fn required<'a>(path: &str, v: &'a Option<String>) -> Result<&'a str> {
    v.as_deref().ok_or_else(|| Error::config(path, "missing field"))
}

fn hypothesis(h: &RawHypothesis, path: &str) -> Result<HypothesisSet> {
    let rat = |field: &str, v: &Option<String>| -> Result<BigRational> {
        let p = format!("{path}.{field}");
        at(&p, parse_rational(required(&p, v)?))
    };
    Ok(match h.kind.as_str() {
        "condition1" => HypothesisSet::Condition1 { delta: rat("delta", &h.delta)? },
        "condition2" => HypothesisSet::Condition2 { delta: rat("delta", &h.delta)?, epsilon: rat("epsilon", &h.epsilon)? },
        "theorem2" => HypothesisSet::Theorem2 { delta: rat("delta", &h.delta)? },
        "theoremA" => HypothesisSet::TheoremA { delta: rat("delta", &h.delta)? },
        "growth-window" => HypothesisSet::GrowthWindow { m: h.m.ok_or_else(|| Error::config(format!("{path}.m"), "missing field"))? },
        "ratio-vanishing" => HypothesisSet::RatioVanishing,
        "hancl7" => HypothesisSet::Hancl7 {
            alpha: match &h.alpha {
                Some(_) => rat("alpha", &h.alpha)?,
                None => BigRational::new(1.into(), 2.into()),
            },
            epsilon: rat("epsilon", &h.epsilon)?,
        },
        "hancl8" => HypothesisSet::Hancl8 { epsilon: rat("epsilon", &h.epsilon)? },
        "erdos-dn" => HypothesisSet::ErdosDn { delta: rat("delta", &h.delta)? },
        other => return Err(Error::config(format!("{path}.kind"), format!("unknown hypothesis kind `{other}`"))),
    })
}

fn is_asymptotic(h: &HypothesisSet) -> bool {
    !matches!(h, HypothesisSet::Theorem2 { .. })
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            let path = e.span().map(|s| format!("byte {}", s.start)).unwrap_or_else(|| "<document>".into());
            Error::config(path, msg)
        })?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawConfig) -> Result<Self> {
        let window = at("window", parse_window(&raw.window))?;
        let mode = at("series.mode", SeriesMode::parse(&raw.series.mode))?;
        let denominators = at("series.denominators", SequenceSpec::from_str(&raw.series.denominators))?;
        if raw.series.coefficients.is_empty() {
            return Err(Error::config("series.coefficients", "at least one coefficient sequence is required"));
        }
        if raw.series.coefficients.len() > 7 {
            return Err(Error::config("series.coefficients", "at most 7 coefficient sequences are supported"));
        }
        let mut coefficients = Vec::new();
        for (k, c) in raw.series.coefficients.iter().enumerate() {
            coefficients.push(at(&format!("series.coefficients[{k}]"), SequenceSpec::from_str(c))?);
        }
        let delta = match &raw.series.delta {
            Some(d) => at("series.delta", parse_rational(d))?,
            None => BigRational::new(1.into(), 2.into()),
        };
        let epsilon = raw.series.epsilon.as_deref().map(parse_rational).transpose();
        let epsilon = at("series.epsilon", epsilon)?;
        let series = at("series", SeriesSpec::new(mode, coefficients, denominators))?
            .with_delta(delta)
            .with_epsilon(epsilon)
            .with_bounded_coefficients(raw.series.bounded_coefficients);

        let mut hypotheses = Vec::new();
        for (k, h) in raw.hypotheses.iter().enumerate() {
            let path = format!("hypotheses[{k}]");
            let h = hypothesis(h, &path)?;
            if is_asymptotic(&h) && !window.supports_asymptotics() {
                return Err(Error::config("window", format!("{} needs a window of length >= 4, got {window}", h.id())));
            }
            hypotheses.push(h);
        }

        let convergents = match &raw.convergents {
            Some(c) => ConvergentSettings {
                orders: match &c.orders {
                    Some(o) => at("convergents.orders", parse_window(o))?,
                    None => window,
                },
                exponents: c.exponents,
            },
            None => ConvergentSettings { orders: window, exponents: true },
        };
        let subspace = match &raw.subspace {
            Some(s) => {
                let mut deltas = Vec::new();
                for (k, d) in s.deltas.iter().enumerate() {
                    deltas.push(at(&format!("subspace.deltas[{k}]"), parse_rational(d))?);
                }
                Some(SubspaceSettings {
                    orders: match &s.orders {
                        Some(o) => at("subspace.orders", parse_window(o))?,
                        None => window,
                    },
                    precision_bits: s.precision.unwrap_or(64),
                    deltas,
                })
            }
            None => None,
        };
        let search = match &raw.search {
            Some(s) => {
                if s.bound == 0 {
                    return Err(Error::config("search.bound", "B must be at least 1"));
                }
                let method = at("search.method", SearchMethod::parse(s.method.as_deref().unwrap_or("exhaustive")))?;
                let mut config = SearchConfig::new(s.bound, s.precision, method);
                if let Some(d) = &s.lll_delta {
                    config.lll_delta = at("search.lll_delta", parse_rational(d))?;
                }
                let verify_window = match &s.verify_window {
                    Some(w) => at("search.verify_window", parse_window(w))?,
                    None => window,
                };
                Some(SearchSettings { config, verify_window })
            }
            None => None,
        };
        let probe = match &raw.probe {
            Some(p) => Some(ProbeSettings {
                bound: p.bound,
                window: match &p.window {
                    Some(w) => at("probe.window", parse_window(w))?,
                    None => window,
                },
            }),
            None => None,
        };
        let mut prefix_bounds = Vec::new();
        for (k, p) in raw.prefix_bounds.iter().enumerate() {
            let path = format!("prefix_bounds[{k}]");
            let mut deltas = Vec::new();
            for (j, d) in p.deltas.iter().enumerate() {
                deltas.push(at(&format!("{path}.deltas[{j}]"), parse_rational(d))?);
            }
            prefix_bounds.push(PrefixBoundSettings {
                label: p.label.clone(),
                base: at(&format!("{path}.base"), parse_rational(&p.base))?,
                deltas,
                orders: at(&format!("{path}.orders"), parse_window(&p.orders))?,
            });
        }
        let (format, output_path) = match &raw.output {
            Some(o) => (at("output.format", OutputFormat::from_str(o.format.as_deref().unwrap_or("json")))?, o.path.clone()),
            None => (OutputFormat::Json, None),
        };
        Ok(ScenarioConfig {
            name: raw.name,
            series,
            window,
            hypotheses,
            convergents,
            subspace,
            search,
            probe,
            prefix_bounds,
            format,
            output_path,
        })
    }
}

const COROLLARY: &str = r#"
name = "corollary"
window = "1..8"

[series]
mode = "sum-direct"
denominators = "prefix-square-recurrence(2)"
coefficients = ["constant(1)", "divisor-count"]
delta = "3/5"

[[hypotheses]]
kind = "condition1"
delta = "3/5"

[[hypotheses]]
kind = "theoremA"
delta = "3/5"

[convergents]
orders = "1..8"

[subspace]
orders = "3..8"
precision = 64
deltas = ["1/2"]

[search]
bound = 20
precision = 332
method = "exhaustive"

[probe]
bound = 10
window = "1..8"
"#;

const THEOREM_A_COMPARISON: &str = r#"
name = "theoremA-comparison"
window = "1..12"

[series]
mode = "sum-direct"
denominators = "prefix-square-recurrence(2)"
coefficients = ["constant(1)", "divisor-count"]
delta = "3/5"

[[hypotheses]]
kind = "condition1"
delta = "3/5"

[[hypotheses]]
kind = "theoremA"
delta = "1/100"

[[hypotheses]]
kind = "theoremA"
delta = "1"

[convergents]
orders = "1..4"

[[prefix_bounds]]
label = "(b_1..b_N)^(1+delta) <= b_(N+1)"
base = "1"
deltas = ["51/100", "3/5", "3/4", "99/100"]
orders = "1..12"

[[prefix_bounds]]
label = "(b_1..b_N)^(2+delta) <= b_(N+1)"
base = "2"
deltas = ["1/100", "1"]
orders = "1..12"
"#;

const BUILTINS: [(&str, &str); 2] = [("corollary", COROLLARY), ("theoremA-comparison", THEOREM_A_COMPARISON)];

/// Names of the built-in scenarios, in a fixed order.
pub fn list_scenarios() -> Vec<&'static str> {
    BUILTINS.iter().map(|(n, _)| *n).collect()
}

/// TOML text of a built-in scenario.
pub fn builtin_toml(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, t)| t.trim_start())
}

pub fn builtin(name: &str) -> Result<ScenarioConfig> {
    let text = builtin_toml(name).ok_or_else(|| {
        Error::config("name", format!("unknown scenario `{name}`; built-ins: {}", list_scenarios().join(", ")))
    })?;
    ScenarioConfig::from_toml(text)
}

/// Positive rational check shared by CLI flags.
pub fn positive_rational(s: &str) -> Result<BigRational> {
    let r = parse_rational(s)?;
    if !r.is_positive() {
        return Err(Error::Domain(format!("`{s}` must be positive")));
    }
    Ok(r)
}
