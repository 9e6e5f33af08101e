use std::cmp::Ordering;
use std::fmt::Write as _;

use num_rational::BigRational;
use serde::Serialize;

use super::config::{PrefixBoundSettings, ScenarioConfig};
use crate::approx::{build_subspace_instance, measured_exponent, verify_forms_inequality, DeltaPrime, MeasuredExponent, SeriesSpec};
use crate::criteria::{
    check_condition1, check_condition2, check_erdos_dn, check_growth_window, check_hancl7, check_hancl8, check_prefix_power_bound,
    check_ratio_vanishing, check_theorem2_hypotheses, check_theorem_a, ConditionVerdict, CriteriaConfig, GrowthReport, HypothesisSet,
    Window,
};
use crate::error::{Error, Result};
use crate::exact::{LogMag, DEFAULT_BIT_BUDGET};
use crate::relations::{corollary_independence_probe, find_series_relations, ProbeReport, SeriesRelationReport};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesSummary {
    pub mode: &'static str,
    pub denominators: String,
    pub coefficients: Vec<String>,
    pub delta: String,
    pub epsilon: Option<String>,
}

impl From<&SeriesSpec> for SeriesSummary {
    fn from(s: &SeriesSpec) -> Self {
        SeriesSummary {
            mode: s.mode().name(),
            denominators: s.denominators().to_string(),
            coefficients: s.coefficients().iter().map(|c| c.to_string()).collect(),
            delta: s.delta().to_string(),
            epsilon: s.epsilon().map(|e| e.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvergentRow {
    pub series: usize,
    pub order: u64,
    pub p: String,
    pub q: String,
    pub delta_n: Option<MeasuredExponent>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormsCheck {
    pub delta_prime: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubspaceRow {
    pub order: u64,
    pub height: String,
    #[serde(serialize_with = "crate::approx::serialize_logmag")]
    pub product: LogMag,
    pub delta_prime_max: DeltaPrime,
    pub forms_inequality: Vec<FormsCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrefixBoundResult {
    pub delta: String,
    pub exponent: String,
    pub holds_for_all: bool,
    pub fails_at: Vec<u64>,
    pub undecided_at: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrefixBoundRow {
    pub label: String,
    pub orders: Window,
    pub results: Vec<PrefixBoundResult>,
}

/// A sub-operation that declined or failed; the rest of the report stands.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Refusal {
    pub stage: String,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Timing {
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub scenario: String,
    pub series: SeriesSummary,
    pub window: Window,
    pub verdicts: Vec<ConditionVerdict>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub growth: Vec<GrowthReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub prefix_bounds: Vec<PrefixBoundRow>,
    pub convergents: Vec<ConvergentRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub subspace: Vec<SubspaceRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relations: Option<SeriesRelationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeReport>,
    pub refusals: Vec<Refusal>,
    /// Wall-clock timing; absent unless requested so reports stay reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

/// Process exit status for a finished report.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;

impl Report {
    /// 3 when any sub-operation refused, else 1 when a hypothesis is violated, else 0.
    pub fn exit_code(&self) -> i32 {
        if !self.refusals.is_empty() {
            EXIT_REFUSED
        } else if self.verdicts.iter().any(|v| v.verdict.is_violated()) {
            EXIT_VIOLATED
        } else {
            EXIT_OK
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario {}  window {}", self.scenario, self.window);
        let _ = writeln!(
            out,
            "series {} c = [{}] b = {}",
            self.series.mode,
            self.series.coefficients.join(", "),
            self.series.denominators
        );
        if !self.verdicts.is_empty() {
            let _ = writeln!(out, "\nhypothesis verdicts");
            for v in &self.verdicts {
                let _ = writeln!(out, "  {:<44} {}", v.hypothesis, v.verdict);
            }
        }
        for g in &self.growth {
            let _ = writeln!(
                out,
                "\ngrowth m={}: liminf ~ {:.6}, limsup ~ {:.6} (+- {:e})",
                g.m, g.liminf_estimate, g.limsup_estimate, g.estimate_tolerance
            );
        }
        for row in &self.prefix_bounds {
            let _ = writeln!(out, "\n{} on N in {}", row.label, row.orders);
            for r in &row.results {
                let status = if r.holds_for_all {
                    "holds for every N".to_string()
                } else {
                    format!("fails at N = {:?}", r.fails_at)
                };
                let _ = writeln!(out, "  delta = {:<8} exponent {:<8} {}", r.delta, r.exponent, status);
            }
        }
        if !self.convergents.is_empty() {
            let _ = writeln!(out, "\nconvergents");
            let _ = writeln!(out, "  {:>2} {:>3}  {:>12}  {:>24}  {:>24}", "i", "N", "delta_N", "p", "q");
            for c in &self.convergents {
                let d = c.delta_n.as_ref().map(|m| crate::approx::exponent::micro_string(&m.delta)).unwrap_or_else(|| "-".into());
                let _ = writeln!(out, "  {:>2} {:>3}  {:>12}  {:>24}  {:>24}", c.series, c.order, d, abbreviate(&c.p), abbreviate(&c.q));
            }
        }
        if !self.subspace.is_empty() {
            let _ = writeln!(out, "\nsubspace instances");
            let _ = writeln!(out, "  {:>3}  {:>24}  {:>16}  {:>14}", "N", "H", "log2 product", "delta'_max");
            for s in &self.subspace {
                let dp = match &s.delta_prime_max {
                    DeltaPrime::Finite(d) => crate::approx::exponent::micro_string(d),
                    DeltaPrime::Infinite => "inf".into(),
                };
                let lp = crate::exact::LogMagRecord::from(&s.product).log2mag.unwrap_or_else(|| "-inf".into());
                let _ = writeln!(out, "  {:>3}  {:>24}  {:>16}  {:>14}", s.order, abbreviate(&s.height), lp, dp);
            }
        }
        if let Some(r) = &self.relations {
            let _ = writeln!(out, "\nrelations ({}, B = {}, precision 2^-{}): {} candidate(s)", r.method.name(), r.bound, r.precision, r.candidates.len());
            for c in &r.candidates {
                let _ = writeln!(out, "  z = {:?}  {}", c.z, c.status);
            }
        }
        if let Some(p) = &self.probe {
            let _ = writeln!(
                out,
                "\nindependence probe B = {}: {} of {} candidates refuted; witness d({}) = {}, d({}) = {}",
                p.bound, p.refuted, p.candidates, p.witness.n1, p.witness.d1, p.witness.n2, p.witness.d2
            );
        }
        if !self.refusals.is_empty() {
            let _ = writeln!(out, "\nrefusals");
            for r in &self.refusals {
                let _ = writeln!(out, "  {}: {}", r.stage, r.error);
            }
        }
        out
    }
}

fn abbreviate(s: &str) -> String {
    if s.len() <= 24 {
        s.to_string()
    } else {
        format!("{}..({} digits)", &s[..8], s.len())
    }
}

fn refusal(stage: impl Into<String>, e: &Error) -> Refusal {
    Refusal { stage: stage.into(), error: e.to_string() }
}

fn run_hypothesis(h: &HypothesisSet, spec: &SeriesSpec, window: Window, cfg: &CriteriaConfig, report: &mut Report) -> Result<()> {
    let c = spec.coefficients();
    let b = spec.denominators();
    let mut verdict = match h {
        HypothesisSet::Condition1 { delta } => check_condition1(c, b, delta, window, cfg)?,
        HypothesisSet::Condition2 { delta, epsilon } => check_condition2(c, b, delta, epsilon, window, cfg)?,
        HypothesisSet::Theorem2 { delta } => check_theorem2_hypotheses(b, delta, window, cfg)?,
        HypothesisSet::TheoremA { delta } => check_theorem_a(c, b, delta, window, cfg)?,
        HypothesisSet::GrowthWindow { m } => {
            let g = check_growth_window(b, *m, window)?;
            let v = g.check.clone();
            report.growth.push(g);
            v
        }
        HypothesisSet::RatioVanishing => check_ratio_vanishing(c, window, cfg)?,
        HypothesisSet::Hancl7 { alpha, epsilon } => check_hancl7(c, b, alpha, epsilon, window, cfg)?,
        HypothesisSet::Hancl8 { epsilon } => check_hancl8(c, b, epsilon, window, cfg)?,
        HypothesisSet::ErdosDn { delta } => {
            for (i, ci) in c.iter().enumerate() {
                let mut v = check_erdos_dn(ci, delta, window, cfg)?;
                v.hypothesis = format!("{}[series {}]", v.hypothesis, i + 1);
                report.verdicts.push(v);
            }
            return Ok(());
        }
    };
    if let Err(e) = h.check_pipeline(spec.m()) {
        verdict.notes.push(format!("pipeline: {e}"));
    }
    report.verdicts.push(verdict);
    Ok(())
}

fn prefix_bound_row(spec: &SeriesSpec, p: &PrefixBoundSettings) -> Result<PrefixBoundRow> {
    let mut results = Vec::new();
    for delta in &p.deltas {
        let exponent: BigRational = &p.base + delta;
        let mut fails_at = Vec::new();
        let mut undecided_at = Vec::new();
        for n in p.orders.indices() {
            let d = check_prefix_power_bound(spec.denominators(), &exponent, n, DEFAULT_BIT_BUDGET)?;
            match d.ordering {
                Some(Ordering::Greater | Ordering::Equal) => {}
                Some(Ordering::Less) => fails_at.push(n),
                None => undecided_at.push(n),
            }
        }
        results.push(PrefixBoundResult {
            delta: delta.to_string(),
            exponent: exponent.to_string(),
            holds_for_all: fails_at.is_empty() && undecided_at.is_empty(),
            fails_at,
            undecided_at,
        });
    }
    Ok(PrefixBoundRow { label: p.label.clone(), orders: p.orders, results })
}

/// Runs every configured stage. Sub-operation errors become [`Refusal`]s.
pub fn run_scenario(config: &ScenarioConfig) -> Result<Report> {
    let spec = &config.series;
    let mut report = Report {
        scenario: config.name.clone(),
        series: SeriesSummary::from(spec),
        window: config.window,
        verdicts: Vec::new(),
        growth: Vec::new(),
        prefix_bounds: Vec::new(),
        convergents: Vec::new(),
        subspace: Vec::new(),
        relations: None,
        probe: None,
        refusals: Vec::new(),
        timing: None,
    };
    let cfg = CriteriaConfig::default();
    for h in &config.hypotheses {
        if let Err(e) = run_hypothesis(h, spec, config.window, &cfg, &mut report) {
            report.refusals.push(refusal(h.id(), &e));
        }
    }
    for p in &config.prefix_bounds {
        match prefix_bound_row(spec, p) {
            Ok(row) => report.prefix_bounds.push(row),
            Err(e) => report.refusals.push(refusal(format!("prefix-bound {}", p.label), &e)),
        }
    }
    for i in 1..=spec.m() {
        for n in config.convergents.orders.indices() {
            let conv = match spec.convergent(i, n) {
                Ok(c) => c,
                Err(e) => {
                    report.refusals.push(refusal(format!("convergent i={i} N={n}"), &e));
                    continue;
                }
            };
            let (delta_n, note) = if config.convergents.exponents {
                match measured_exponent(spec, i, n) {
                    Ok(m) => (Some(m), None),
                    Err(e @ Error::Domain(_)) => (None, Some(e.to_string())),
                    Err(e) => {
                        report.refusals.push(refusal(format!("exponent i={i} N={n}"), &e));
                        (None, None)
                    }
                }
            } else {
                (None, None)
            };
            report.convergents.push(ConvergentRow { series: i, order: n, p: conv.p.to_string(), q: conv.q.to_string(), delta_n, note });
        }
    }
    if let Some(s) = &config.subspace {
        for n in s.orders.indices() {
            match build_subspace_instance(spec, n, s.precision_bits) {
                Ok(inst) => {
                    let mut forms_inequality = Vec::new();
                    for d in &s.deltas {
                        match verify_forms_inequality(&inst, d) {
                            Ok(holds) => forms_inequality.push(FormsCheck { delta_prime: d.to_string(), holds }),
                            Err(e) => report.refusals.push(refusal(format!("forms inequality N={n} delta'={d}"), &e)),
                        }
                    }
                    report.subspace.push(SubspaceRow {
                        order: n,
                        height: inst.height.to_string(),
                        product: inst.product_logmag.clone(),
                        delta_prime_max: inst.delta_prime_max.clone(),
                        forms_inequality,
                    });
                }
                Err(e) => report.refusals.push(refusal(format!("subspace N={n}"), &e)),
            }
        }
    }
    if let Some(s) = &config.search {
        match find_series_relations(spec, &s.config, s.verify_window) {
            Ok(r) => report.relations = Some(r),
            Err(e) => report.refusals.push(refusal("relations", &e)),
        }
    }
    if let Some(p) = &config.probe {
        match corollary_independence_probe(p.bound, p.window) {
            Ok(r) => report.probe = Some(r),
            Err(e) => report.refusals.push(refusal("probe", &e)),
        }
    }
    Ok(report)
}
