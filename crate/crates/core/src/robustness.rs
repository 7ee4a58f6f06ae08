//! Relative robustness (RR per corruption, mRR overall) and report rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corruption::{CorruptionGroup, CorruptionKind, Severity};
use crate::error::{Error, Result};
use crate::eval::MetricSet;

pub const NUM_SEVERITIES: usize = 5;
pub const NUM_CORRUPTIONS: usize = 10;

/// Metrics of one corrupted evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub corruption: CorruptionKind,
    pub severity: Severity,
    pub metrics: MetricSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CleanRecord {
    pub metrics: MetricSet,
}

/// `mean_s(mAP_{c,s}) / mAP_clean`.
pub fn relative_robustness(clean_map: f64, severity_maps: &[f64]) -> Result<f64> {
    if severity_maps.len() != NUM_SEVERITIES {
        return Err(Error::Domain(format!(
            "expected {NUM_SEVERITIES} severity values, got {}",
            severity_maps.len()
        )));
    }
    ratio_of_mean(clean_map, severity_maps)
}

fn ratio_of_mean(clean_map: f64, maps: &[f64]) -> Result<f64> {
    if !clean_map.is_finite() || clean_map <= 0.0 {
        return Err(Error::Domain(format!("clean mAP must be > 0, got {clean_map}")));
    }
    Ok(mean(maps).unwrap_or(f64::NAN) / clean_map)
}

/// Mean over the ten per-corruption RR values.
pub fn mean_rr(rr_values: &[f64]) -> Result<f64> {
    if rr_values.len() != NUM_CORRUPTIONS {
        return Err(Error::Domain(format!(
            "expected {NUM_CORRUPTIONS} RR values, got {}",
            rr_values.len()
        )));
    }
    Ok(rr_values.iter().sum::<f64>() / NUM_CORRUPTIONS as f64)
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

fn mean_opt(values: impl IntoIterator<Item = Option<f64>>) -> Option<f64> {
    mean(&values.into_iter().flatten().collect::<Vec<_>>())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorruptionSummary {
    pub corruption: CorruptionKind,
    /// mAP per severity 1..=5; `None` where the cell is missing.
    pub severity_maps: [Option<f64>; NUM_SEVERITIES],
    pub severity_mars: [Option<f64>; NUM_SEVERITIES],
    pub map: Option<f64>,
    pub mar: Option<f64>,
    pub rr: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GroupSummary {
    pub map: Option<f64>,
    pub mar: Option<f64>,
    pub mrr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub clean_map: Option<f64>,
    pub clean_mar: Option<f64>,
    pub corruptions: Vec<CorruptionSummary>,
    pub overall: GroupSummary,
    pub groups: Vec<(CorruptionGroup, GroupSummary)>,
    /// mRR at each fixed severity, averaged over corruptions.
    pub severity_mrr: Vec<Option<f64>>,
    pub complete: bool,
}

impl RobustnessReport {
    pub fn is_empty(&self) -> bool {
        self.clean_map.is_none() && self.corruptions.is_empty()
    }

    pub fn group(&self, group: CorruptionGroup) -> Option<&GroupSummary> {
        self.groups.iter().find(|(g, _)| *g == group).map(|(_, s)| s)
    }

    pub fn corruption(&self, kind: CorruptionKind) -> Option<&CorruptionSummary> {
        self.corruptions.iter().find(|c| c.corruption == kind)
    }
}

/// Builds the report. Without `allow_partial` the full 10 x 5 grid is required;
/// with it, missing cells are left out of every mean.
pub fn build_report(clean: &CleanRecord, runs: &[RunRecord], allow_partial: bool) -> Result<RobustnessReport> {
    let mut grid: BTreeMap<(usize, u8), &MetricSet> = BTreeMap::new();
    let mut problems = Vec::new();
    for r in runs {
        if grid.insert((r.corruption.index(), r.severity.level()), &r.metrics).is_some() {
            problems.push(format!("duplicate cell {} severity {}", r.corruption, r.severity.level()));
        }
    }
    if !problems.is_empty() {
        return Err(Error::Validation(problems));
    }
    let complete = CorruptionKind::ALL
        .iter()
        .all(|k| Severity::all().all(|s| grid.contains_key(&(k.index(), s.level()))));
    if !complete && !allow_partial {
        let missing: Vec<String> = CorruptionKind::ALL
            .iter()
            .flat_map(|k| Severity::all().map(move |s| (*k, s)))
            .filter(|(k, s)| !grid.contains_key(&(k.index(), s.level())))
            .map(|(k, s)| format!("missing cell {k} severity {}", s.level()))
            .collect();
        return Err(Error::Validation(missing));
    }
    let clean_map = clean
        .metrics
        .map
        .filter(|&m| m > 0.0 && m.is_finite())
        .ok_or_else(|| Error::Domain(format!("clean mAP must be > 0, got {:?}", clean.metrics.map)))?;

    let corruptions: Vec<CorruptionSummary> = CorruptionKind::ALL
        .iter()
        .map(|&kind| {
            let cell = |s: usize| grid.get(&(kind.index(), s as u8 + 1));
            let severity_maps: [Option<f64>; NUM_SEVERITIES] = std::array::from_fn(|s| cell(s).and_then(|m| m.map));
            let severity_mars: [Option<f64>; NUM_SEVERITIES] = std::array::from_fn(|s| cell(s).and_then(|m| m.mar));
            let map = mean_opt(severity_maps);
            CorruptionSummary {
                corruption: kind,
                severity_maps,
                severity_mars,
                map,
                mar: mean_opt(severity_mars),
                rr: map.map(|m| m / clean_map),
            }
        })
        .collect();

    let summarize = |members: &[CorruptionKind]| {
        let of = |k: &CorruptionKind| &corruptions[k.index()];
        GroupSummary {
            map: mean_opt(members.iter().map(|k| of(k).map)),
            mar: mean_opt(members.iter().map(|k| of(k).mar)),
            mrr: mean_opt(members.iter().map(|k| of(k).rr)),
        }
    };
    let mut overall = summarize(&CorruptionKind::ALL);
    if complete {
        let rr: Vec<f64> = corruptions.iter().filter_map(|c| c.rr).collect();
        if rr.len() == NUM_CORRUPTIONS {
            overall.mrr = Some(mean_rr(&rr)?);
        }
    }
    let groups = CorruptionGroup::ALL
        .iter()
        .map(|&g| (g, summarize(&g.members().collect::<Vec<_>>())))
        .collect();
    let severity_mrr = (0..NUM_SEVERITIES)
        .map(|s| mean_opt(corruptions.iter().map(|c| c.severity_maps[s].map(|m| m / clean_map))))
        .collect();

    Ok(RobustnessReport {
        clean_map: Some(clean_map),
        clean_mar: clean.metrics.mar,
        corruptions,
        overall,
        groups,
        severity_mrr,
        complete,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Markdown,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "markdown" | "md" => Ok(Format::Markdown),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Usage(format!("unknown format {other:?} (expected markdown or csv)"))),
        }
    }
}

/// Percentage with two decimals, `NA` when undefined.
pub fn pct(v: Option<f64>) -> String {
    match v {
        Some(v) if v.is_finite() => format!("{:.2}", (v * 10_000.0).round() / 100.0),
        _ => "NA".to_string(),
    }
}

const CSV_HEADER: &str = "scope,name,severity,mAP,mAR,RR";

pub fn render(report: &RobustnessReport, format: Format) -> String {
    match format {
        Format::Markdown => render_markdown(report),
        Format::Csv => render_csv(report),
    }
}

fn render_markdown(report: &RobustnessReport) -> String {
    let mut out = String::new();
    let mut head = vec!["Clean mAP".to_string(), "Clean mAR".into()];
    let mut rule = vec!["---:"; 2];
    for label in std::iter::once("Overall").chain(CorruptionGroup::ALL.iter().map(|g| g.label())) {
        for m in ["mAP", "mAR", "mRR"] {
            head.push(format!("{label} {m}"));
            rule.push("---:");
        }
    }
    let _ = writeln!(out, "| {} |", head.join(" | "));
    let _ = writeln!(out, "|{}|", rule.join("|"));
    if !report.is_empty() {
        let mut row = vec![pct(report.clean_map), pct(report.clean_mar)];
        let mut push = |s: &GroupSummary| row.extend([pct(s.map), pct(s.mar), pct(s.mrr)]);
        push(&report.overall);
        for (_, s) in &report.groups {
            push(s);
        }
        let _ = writeln!(out, "| {} |", row.join(" | "));
    }

    out.push('\n');
    let _ = writeln!(out, "| Corruption | s1 | s2 | s3 | s4 | s5 | mAP | mAR | RR |");
    let _ = writeln!(out, "|---|---:|---:|---:|---:|---:|---:|---:|---:|");
    for c in &report.corruptions {
        let sev: Vec<String> = c.severity_maps.iter().map(|&m| pct(m)).collect();
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} |",
            c.corruption,
            sev.join(" | "),
            pct(c.map),
            pct(c.mar),
            pct(c.rr)
        );
    }
    if !report.severity_mrr.is_empty() {
        let sev: Vec<String> = report.severity_mrr.iter().map(|&m| pct(m)).collect();
        let _ = writeln!(out, "| mRR by severity | {} | | | |", sev.join(" | "));
    }
    out
}

fn render_csv(report: &RobustnessReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{CSV_HEADER}");
    if report.is_empty() {
        return out;
    }
    let mut line = |scope: &str, name: &str, sev: &str, map: Option<f64>, mar: Option<f64>, rr: Option<f64>| {
        let _ = writeln!(out, "{scope},{name},{sev},{},{},{}", pct(map), pct(mar), pct(rr));
    };
    let clean = report.clean_map;
    line("clean", "clean", "", report.clean_map, report.clean_mar, None);
    for c in &report.corruptions {
        for s in 0..NUM_SEVERITIES {
            let rr = c.severity_maps[s].zip(clean).map(|(m, cl)| m / cl);
            line("cell", c.corruption.name(), &(s + 1).to_string(), c.severity_maps[s], c.severity_mars[s], rr);
        }
    }
    for c in &report.corruptions {
        line("corruption", c.corruption.name(), "", c.map, c.mar, c.rr);
    }
    for (g, s) in &report.groups {
        line("group", g.key(), "", s.map, s.mar, s.mrr);
    }
    for (s, v) in report.severity_mrr.iter().enumerate() {
        let maps = mean_opt(report.corruptions.iter().map(|c| c.severity_maps[s]));
        let mars = mean_opt(report.corruptions.iter().map(|c| c.severity_mars[s]));
        line("severity", "all", &(s + 1).to_string(), maps, mars, *v);
    }
    let o = report.overall;
    line("overall", "all", "", o.map, o.mar, o.mrr);
    out
}
