//! Writing analysis results as CSV tables, SVG plots and a JSON index.

use super::{AccuracyCurve, AnalysisError, BinnedTable, CorrelationResult, ErrorCurve, GroupKey, SpatialBiasTable};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub accuracy_curves: Vec<AccuracyCurve>,
    pub error_curves: Vec<ErrorCurve>,
    pub correlations: Vec<CorrelationResult>,
    pub spatial_bias: Vec<SpatialBiasTable>,
    pub binned: Vec<BinnedTable>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub kind: String,
    pub group: Option<GroupKey>,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportIndex {
    pub schema_version: u32,
    pub entries: Vec<IndexEntry>,
}

pub const INDEX_FILE: &str = "index.json";

fn slug(key: &GroupKey) -> String {
    let raw = format!("{}_{}_{}", key.model_id, key.condition, key.mode);
    raw.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '-' })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

fn write_csv(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> Result<(), AnalysisError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

/// Line plot of `(x, mean)` with a shaded `[low, high]` band.
pub fn band_plot_svg(title: &str, y_label: &str, y_max: f64, points: &[(f64, f64, f64, f64)]) -> String {
    let (w, h) = (640.0, 400.0);
    let (left, right, top, bottom) = (60.0, 20.0, 30.0, 50.0);
    let x_max = points.iter().map(|p| p.0).fold(1.0, f64::max);
    let sx = |x: f64| left + (w - left - right) * x / x_max;
    let sy = |y: f64| h - bottom - (h - top - bottom) * (y / y_max).clamp(0.0, 1.0);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="18" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#, w / 2.0, xml_escape(title));
    if !points.is_empty() {
        let upper: Vec<String> = points.iter().map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.3))).collect();
        let lower: Vec<String> = points.iter().rev().map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.2))).collect();
        let _ = writeln!(s, r##"<polygon points="{} {}" fill="#1f77b4" fill-opacity="0.25" stroke="none"/>"##, upper.join(" "), lower.join(" "));
        let line: Vec<String> = points.iter().map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1))).collect();
        let _ = writeln!(s, r##"<polyline points="{}" fill="none" stroke="#1f77b4" stroke-width="2"/>"##, line.join(" "));
    }
    let (x0, y0, x1, y1) = (sx(0.0), sy(0.0), sx(x_max), sy(y_max));
    let _ = writeln!(s, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}" stroke="black"/>"#);
    let _ = writeln!(s, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}" stroke="black"/>"#);
    for k in 0..=5 {
        let xv = x_max * k as f64 / 5.0;
        let yv = y_max * k as f64 / 5.0;
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{:.0}</text>"#, sx(xv), y0 + 16.0, xv);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{:.2}</text>"#, x0 - 6.0, sy(yv) + 4.0, yv);
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">number of distractors</text>"#, (x0 + x1) / 2.0, h - 10.0);
    let _ = writeln!(s, r#"<text x="14" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 14 {:.2})">{}</text>"#, (y0 + y1) / 2.0, (y0 + y1) / 2.0, xml_escape(y_label));
    s.push_str("</svg>\n");
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes one CSV (and SVG for curves) per table plus `index.json`.
///
/// CSV columns:
/// - accuracy curves: `n,trials,successes,mean,ci_low,ci_high`
/// - error curves: `n,trials,mean_error,ci_low,ci_high`
/// - `correlations.csv`: `model,family,condition,mode,n_trials,r,p_raw,p_adjusted,degenerate,r_set_size_means`
/// - `spatial_bias.csv`: `model,family,condition,mode,row,precision,recall,sel_pct`, rows `(1,1)`..`(2,2)` then `invalid`
/// - `binned.csv`: `model,family,condition,mode,bin,trials,successes,mean`
pub fn emit_report(report: &Report, out_dir: &Path) -> Result<ReportIndex, AnalysisError> {
    std::fs::create_dir_all(out_dir)?;
    let mut index = ReportIndex { schema_version: 1, entries: Vec::new() };
    for (i, c) in report.accuracy_curves.iter().enumerate() {
        let stem = format!("accuracy_{i:03}_{}", slug(&c.group));
        let rows = c
            .points
            .iter()
            .map(|p| {
                vec![
                    p.n.to_string(),
                    p.trials.to_string(),
                    p.successes.to_string(),
                    format!("{:.6}", p.mean),
                    format!("{:.6}", p.ci_low),
                    format!("{:.6}", p.ci_high),
                ]
            })
            .collect();
        write_csv(&out_dir.join(format!("{stem}.csv")), &["n", "trials", "successes", "mean", "ci_low", "ci_high"], rows)?;
        let pts: Vec<_> = c.points.iter().map(|p| (f64::from(p.n), p.mean, p.ci_low, p.ci_high)).collect();
        std::fs::write(out_dir.join(format!("{stem}.svg")), band_plot_svg(&c.group.label(), "accuracy", 1.0, &pts))?;
        index.entries.push(IndexEntry {
            kind: "accuracy_curve".into(),
            group: Some(c.group.clone()),
            files: vec![format!("{stem}.csv"), format!("{stem}.svg")],
        });
    }
    for (i, c) in report.error_curves.iter().enumerate() {
        let stem = format!("error_{i:03}_{}", slug(&c.group));
        let rows = c
            .points
            .iter()
            .map(|p| {
                vec![
                    p.n.to_string(),
                    p.trials.to_string(),
                    format!("{:.6}", p.mean_error),
                    format!("{:.6}", p.ci_low),
                    format!("{:.6}", p.ci_high),
                ]
            })
            .collect();
        write_csv(&out_dir.join(format!("{stem}.csv")), &["n", "trials", "mean_error", "ci_low", "ci_high"], rows)?;
        let pts: Vec<_> = c.points.iter().map(|p| (f64::from(p.n), p.mean_error, p.ci_low, p.ci_high)).collect();
        let y_max = crate::scoring::max_error_px().ceil();
        std::fs::write(out_dir.join(format!("{stem}.svg")), band_plot_svg(&c.group.label(), "error (px)", y_max, &pts))?;
        index.entries.push(IndexEntry {
            kind: "error_curve".into(),
            group: Some(c.group.clone()),
            files: vec![format!("{stem}.csv"), format!("{stem}.svg")],
        });
    }
    let key_cols = |g: &GroupKey| vec![g.model_id.clone(), g.family.clone(), g.condition.clone(), g.mode.clone()];
    if !report.correlations.is_empty() {
        let rows = report
            .correlations
            .iter()
            .map(|c| {
                let mut r = key_cols(&c.group);
                r.extend([
                    c.n_trials.to_string(),
                    format!("{:.6}", c.r),
                    format!("{:.6e}", c.p_raw),
                    format!("{:.6e}", c.p_adjusted),
                    c.degenerate.to_string(),
                    opt(c.r_set_size_means),
                ]);
                r
            })
            .collect();
        write_csv(
            &out_dir.join("correlations.csv"),
            &["model", "family", "condition", "mode", "n_trials", "r", "p_raw", "p_adjusted", "degenerate", "r_set_size_means"],
            rows,
        )?;
        index.entries.push(IndexEntry { kind: "correlations".into(), group: None, files: vec!["correlations.csv".into()] });
    }
    if !report.spatial_bias.is_empty() {
        let mut rows = Vec::new();
        for t in &report.spatial_bias {
            for c in &t.cells {
                let mut r = key_cols(&t.group);
                r.extend([
                    format!("({},{})", c.cell.row, c.cell.col),
                    opt(c.precision),
                    opt(c.recall),
                    format!("{:.2}", c.selection_pct),
                ]);
                rows.push(r);
            }
            let mut r = key_cols(&t.group);
            r.extend(["invalid".to_string(), String::new(), String::new(), format!("{:.2}", t.invalid_pct)]);
            rows.push(r);
        }
        write_csv(
            &out_dir.join("spatial_bias.csv"),
            &["model", "family", "condition", "mode", "row", "precision", "recall", "sel_pct"],
            rows,
        )?;
        index.entries.push(IndexEntry { kind: "spatial_bias".into(), group: None, files: vec!["spatial_bias.csv".into()] });
    }
    if !report.binned.is_empty() {
        let mut rows = Vec::new();
        for t in &report.binned {
            for b in &t.rows {
                let mut r = key_cols(&t.group);
                r.extend([b.bin.label(), b.trials.to_string(), b.successes.to_string(), opt(b.mean)]);
                rows.push(r);
            }
        }
        write_csv(
            &out_dir.join("binned.csv"),
            &["model", "family", "condition", "mode", "bin", "trials", "successes", "mean"],
            rows,
        )?;
        index.entries.push(IndexEntry { kind: "binned".into(), group: None, files: vec!["binned.csv".into()] });
    }
    let mut json = serde_json::to_string_pretty(&index)?;
    json.push('\n');
    std::fs::write(out_dir.join(INDEX_FILE), json)?;
    Ok(index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::ProportionPoint;

    fn curve() -> AccuracyCurve {
        AccuracyCurve {
            group: GroupKey {
                model_id: "oracle".into(),
                family: "circle-sizes".into(),
                condition: "circle-sizes/large".into(),
                mode: "cells".into(),
            },
            points: vec![ProportionPoint::new(0, 4, 3), ProportionPoint::new(1, 4, 4)],
            overall: ProportionPoint::new(0, 8, 7),
        }
    }

    #[test]
    fn empty_report_has_empty_index() {
        let dir = tempfile::tempdir().unwrap();
        let idx = emit_report(&Report::default(), dir.path()).unwrap();
        assert!(idx.entries.is_empty());
        let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(files.len(), 1);
    }

    #[test]
    fn one_curve_one_csv_one_svg() {
        let dir = tempfile::tempdir().unwrap();
        let report = Report { accuracy_curves: vec![curve()], ..Default::default() };
        let idx = emit_report(&report, dir.path()).unwrap();
        assert_eq!(idx.entries.len(), 1);
        let files = &idx.entries[0].files;
        assert!(files[0].ends_with(".csv") && files[1].ends_with(".svg"));
        for f in files {
            assert!(dir.path().join(f).exists());
        }
        let csv = std::fs::read_to_string(dir.path().join(&files[0])).unwrap();
        assert!(csv.starts_with("n,trials,successes,mean,ci_low,ci_high\n0,4,3,0.750000,"));
        let svg = std::fs::read_to_string(dir.path().join(&files[1])).unwrap();
        assert!(svg.contains("<polygon") && svg.contains("<polyline"));
    }

    #[test]
    fn re_emission_is_byte_identical() {
        let report = Report { accuracy_curves: vec![curve()], ..Default::default() };
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        emit_report(&report, a.path()).unwrap();
        emit_report(&report, b.path()).unwrap();
        for entry in std::fs::read_dir(a.path()).unwrap() {
            let name = entry.unwrap().file_name();
            assert_eq!(
                std::fs::read(a.path().join(&name)).unwrap(),
                std::fs::read(b.path().join(&name)).unwrap()
            );
        }
    }
}
