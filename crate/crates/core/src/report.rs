//! Output artifacts: CSV tables, JSON documents and static SVG charts.
//!
//! Every artifact carries the run fingerprint, either as a trailing
//! `fingerprint` column, a JSON field, or an SVG `<desc>`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::classifier::{Feature, FeatureMask};
use crate::error::{Error, Result};
use crate::evaluation::{BinRow, Fence, RocCurve, UserVerdict};

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush().map_err(|e| Error::io("<csv>", e))
}

/// `s,mask,threshold,fpr,tpr,fingerprint`, one row per curve point.
pub fn write_roc_csv<W: Write>(curves: &[RocCurve], fingerprint: &str, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["s", "mask", "threshold", "fpr", "tpr", "fingerprint"])?;
    for c in curves {
        let mask = c.mask.to_string();
        for p in &c.points {
            w.write_record([
                c.s.to_string(),
                mask.clone(),
                p.threshold.to_string(),
                p.fpr.to_string(),
                p.tpr.to_string(),
                fingerprint.to_string(),
            ])?;
        }
    }
    finish(w)
}

pub fn write_auc_by_bin_csv<W: Write>(
    rows: &[BinRow],
    mask: &FeatureMask,
    fingerprint: &str,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "s",
        "mask",
        "eligible",
        "auc",
        "mean_fold_auc",
        "auc_std_err",
        "mean_tpr",
        "tpr_std_err",
        "mean_fpr",
        "fpr_std_err",
        "n_opt",
        "n_opt_std",
        "fingerprint",
    ])?;
    for r in rows {
        w.write_record([
            r.s.to_string(),
            mask.to_string(),
            r.eligible.to_string(),
            r.auc.to_string(),
            r.mean_fold_auc.to_string(),
            r.auc_std_err.to_string(),
            r.mean_tpr.to_string(),
            r.tpr_std_err.to_string(),
            r.mean_fpr.to_string(),
            r.fpr_std_err.to_string(),
            r.n_opt.to_string(),
            r.n_opt_std.to_string(),
            fingerprint.to_string(),
        ])?;
    }
    finish(w)
}

pub fn write_fences_csv<W: Write>(fences: &[Fence], fingerprint: &str, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["feature", "mean", "std", "window", "lower", "upper", "fingerprint"])?;
    for f in fences {
        w.write_record([
            f.feature.to_string(),
            f.mean.to_string(),
            f.std.to_string(),
            f.window.to_string(),
            f.lower.to_string(),
            f.upper.to_string(),
            fingerprint.to_string(),
        ])?;
    }
    finish(w)
}

/// Per-user verdicts with feature coordinates and z-scores. Features outside
/// `mask` get empty z cells.
pub fn write_verdicts_csv<W: Write>(users: &[UserVerdict], fingerprint: &str, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "user_id",
        "label",
        "verdict",
        "mu_lcs",
        "gamma",
        "mu_url",
        "z_dissimilarity",
        "z_gamma",
        "z_url",
        "violated",
        "fingerprint",
    ])?;
    for u in users {
        let z = |f: Feature| u.z.get(&f).map(|z| z.to_string()).unwrap_or_default();
        let violated: Vec<&str> = u.violated.iter().map(|f| f.as_str()).collect();
        w.write_record([
            u.user_id.clone(),
            u.label.map(|l| l.to_string()).unwrap_or_default(),
            u.verdict.to_string(),
            u.features.mu_lcs.to_string(),
            u.features.gamma.to_string(),
            u.features.mu_url.to_string(),
            z(Feature::Dissimilarity),
            z(Feature::Gamma),
            z(Feature::Url),
            violated.join(";"),
            fingerprint.to_string(),
        ])?;
    }
    finish(w)
}

const W: f64 = 480.0;
const H: f64 = 360.0;
const PAD: f64 = 50.0;
const COLORS: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Plot {
    svg: String,
    x: (f64, f64),
    y: (f64, f64),
}

impl Plot {
    fn new(title: &str, xlabel: &str, ylabel: &str, x: (f64, f64), y: (f64, f64), fingerprint: &str) -> Plot {
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(svg, "<desc>{}</desc>", escape(fingerprint));
        let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="20" text-anchor="middle" font-size="13">{}</text>"#,
            W / 2.0,
            escape(title)
        );
        let _ = writeln!(
            svg,
            r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            W - 2.0 * PAD,
            H - 2.0 * PAD
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            W / 2.0,
            H - 12.0,
            escape(xlabel)
        );
        let _ = writeln!(
            svg,
            r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
            H / 2.0,
            H / 2.0,
            escape(ylabel)
        );
        let mut p = Plot { svg, x, y };
        p.ticks();
        p
    }

    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x.0) / (self.x.1 - self.x.0) * (W - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        H - PAD - (y - self.y.0) / (self.y.1 - self.y.0) * (H - 2.0 * PAD)
    }

    fn ticks(&mut self) {
        for i in 0..=4 {
            let t = i as f64 / 4.0;
            let xv = self.x.0 + t * (self.x.1 - self.x.0);
            let yv = self.y.0 + t * (self.y.1 - self.y.0);
            let (x, y) = (self.px(xv), self.py(yv));
            let _ = writeln!(
                self.svg,
                r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                H - PAD + 14.0,
                tick_label(xv)
            );
            let _ = writeln!(
                self.svg,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
                PAD - 4.0,
                y + 4.0,
                tick_label(yv)
            );
        }
    }

    fn line(&mut self, pts: &[(f64, f64)], color: &str, dashed: bool) {
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y)))
            .collect();
        let dash = if dashed { r#" stroke-dasharray="4 3""# } else { "" };
        let _ = writeln!(
            self.svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
            coords.join(" ")
        );
    }

    fn marker(&mut self, x: f64, y: f64, color: &str) {
        let _ = writeln!(
            self.svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
            self.px(x),
            self.py(y)
        );
    }

    fn legend(&mut self, i: usize, text: &str, color: &str) {
        let y = PAD + 14.0 + 14.0 * i as f64;
        let x = W - PAD - 150.0;
        let _ = writeln!(
            self.svg,
            r#"<line x1="{x}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="2"/>"#,
            y - 4.0,
            x + 16.0,
            y - 4.0
        );
        let _ = writeln!(self.svg, r#"<text x="{}" y="{y}">{}</text>"#, x + 20.0, escape(text));
    }

    fn finish(mut self) -> String {
        self.svg.push_str("</svg>\n");
        self.svg
    }
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// ROC curves with the chance diagonal and each curve's Youden point.
pub fn roc_svg(curves: &[RocCurve], fingerprint: &str) -> String {
    let mut p = Plot::new("ROC", "false positive rate", "true positive rate", (0.0, 1.0), (0.0, 1.0), fingerprint);
    p.line(&[(0.0, 0.0), (1.0, 1.0)], "#999999", true);
    for (i, c) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut pts: Vec<(f64, f64)> = c.points.iter().map(|q| (q.fpr, q.tpr)).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        p.line(&pts, color, false);
        p.marker(c.best.fpr, c.best.tpr, color);
        p.legend(i, &format!("s={} [{}] AUC={:.3}", c.s, c.mask, c.auc), color);
    }
    p.finish()
}

/// AUC against tweet bin with standard-error whiskers.
pub fn auc_by_bin_svg(rows: &[BinRow], fingerprint: &str) -> String {
    let xmax = rows.iter().map(|r| r.s).max().unwrap_or(1) as f64;
    let ymin = rows
        .iter()
        .map(|r| r.auc - r.auc_std_err)
        .fold(1.0_f64, f64::min)
        .min(0.5)
        .max(0.0);
    let mut p = Plot::new("AUC by tweet bin", "tweets per user", "AUC", (0.0, xmax.max(1.0)), (ymin, 1.0), fingerprint);
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.s as f64, r.auc)).collect();
    p.line(&pts, COLORS[0], false);
    for r in rows {
        let x = r.s as f64;
        let lo = (r.auc - r.auc_std_err).max(ymin);
        let hi = (r.auc + r.auc_std_err).min(1.0);
        let _ = writeln!(
            p.svg,
            r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="{3}"/>"#,
            p.px(x),
            p.py(lo),
            p.py(hi),
            COLORS[0]
        );
        p.marker(x, r.auc, COLORS[0]);
    }
    p.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::WindowChoice;
    use crate::evaluation::RocPoint;

    fn curve() -> RocCurve {
        RocCurve {
            points: vec![
                RocPoint { threshold: 0.0, fpr: 1.0, tpr: 1.0 },
                RocPoint { threshold: 1.0, fpr: 0.25, tpr: 0.9 },
                RocPoint { threshold: f64::INFINITY, fpr: 0.0, tpr: 0.0 },
            ],
            auc: 0.8,
            best: WindowChoice { n_opt: 1.0, youden_j: 0.65, tpr: 0.9, fpr: 0.25 },
            s: 50,
            mask: FeatureMask::single(Feature::Url),
        }
    }

    #[test]
    fn roc_csv_rows() {
        let mut out = Vec::new();
        write_roc_csv(&[curve()], "fp", &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "s,mask,threshold,fpr,tpr,fingerprint");
        assert_eq!(lines[2], "50,url,1,0.25,0.9,fp");
        assert_eq!(lines[3], "50,url,inf,0,0,fp");
    }

    #[test]
    fn svg_is_well_formed_enough() {
        let svg = roc_svg(&[curve()], "a<b");
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("<desc>a&lt;b</desc>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
    }
}
