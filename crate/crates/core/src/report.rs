//! CSV and SVG emission for study results.
//!
//! The SVG histograms are written directly (bars, axes, and a dashed
//! truncation line at density 2) so no plotting dependency is needed.

use std::io::Write;

use crate::error::Result;
use crate::sim::{MethodSummary, StudyResult, StudySummary, ALPHAS, HIST_BINS};

/// Raw p-value matrix: one row per replication per method.
pub fn write_pvalues_csv<W: Write>(result: &StudyResult, mut out: W) -> Result<()> {
    writeln!(out, "replication,method,p_value")?;
    for (rep, row) in result.p_values.iter().enumerate() {
        for (label, p) in result.method_labels.iter().zip(row) {
            writeln!(out, "{rep},{label},{p}")?;
        }
    }
    Ok(())
}

/// Reads a p-value matrix written by [`write_pvalues_csv`] back into a
/// [`StudyResult`] (for the standalone summarize workflow).
pub fn read_pvalues_csv<R: std::io::Read>(reader: R) -> Result<StudyResult> {
    let mut csv = csv::Reader::from_reader(reader);
    let mut labels: Vec<String> = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in csv.records() {
        let record = record?;
        let rep: usize = record
            .get(0)
            .unwrap_or("")
            .parse()
            .map_err(|_| crate::error::Error::InvalidSample("bad replication index".into()))?;
        let label = record.get(1).unwrap_or("").to_string();
        let p: f64 = record
            .get(2)
            .unwrap_or("")
            .parse()
            .map_err(|_| crate::error::Error::InvalidSample("bad p-value".into()))?;
        if rows.len() <= rep {
            rows.resize(rep + 1, Vec::new());
        }
        if !labels.contains(&label) {
            labels.push(label);
        }
        rows[rep].push(p);
    }
    rows.retain(|r| r.len() == labels.len());
    let replications = rows.len();
    Ok(StudyResult {
        method_labels: labels,
        p_values: rows,
        n_failed: 0,
        replications,
    })
}

/// Summary table: one row per method with rejection rates, their binomial
/// standard errors, and the KS distance to Uniform(0,1).
pub fn write_summary_csv<W: Write>(summary: &StudySummary, mut out: W) -> Result<()> {
    write!(out, "method,ks")?;
    for alpha in ALPHAS {
        write!(out, ",reject_{alpha},se_{alpha}")?;
    }
    writeln!(out)?;
    for m in &summary.methods {
        write!(out, "{},{}", m.label, m.ks)?;
        for k in 0..ALPHAS.len() {
            write!(out, ",{},{}", m.rejection_rates[k], m.rejection_ses[k])?;
        }
        writeln!(out)?;
    }
    Ok(())
}

const SVG_W: f64 = 480.0;
const SVG_H: f64 = 320.0;
const MARGIN: f64 = 45.0;
/// Display ceiling for the density axis.
const DENSITY_CAP: f64 = 2.0;

/// A 20-bin p-value density histogram with the display truncated at
/// density 2 (dashed line marks the truncation height).
pub fn histogram_svg(summary: &MethodSummary) -> String {
    let plot_w = SVG_W - 2.0 * MARGIN;
    let plot_h = SVG_H - 2.0 * MARGIN;
    let x0 = MARGIN;
    let y0 = SVG_H - MARGIN;
    let bar_w = plot_w / HIST_BINS as f64;
    let scale = plot_h / DENSITY_CAP;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" \
         viewBox=\"0 0 {SVG_W} {SVG_H}\">\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        SVG_W / 2.0,
        summary.label
    ));
    for (i, &density) in summary.histogram.iter().enumerate() {
        let h = density.min(DENSITY_CAP) * scale;
        svg.push_str(&format!(
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
             fill=\"#4477aa\" stroke=\"#223355\" stroke-width=\"0.5\"/>\n",
            x0 + i as f64 * bar_w,
            y0 - h,
            bar_w,
            h
        ));
    }
    // axes
    svg.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{:.2}\" y2=\"{y0}\" stroke=\"black\"/>\n",
        x0 + plot_w
    ));
    svg.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        y0 - plot_h
    ));
    for tick in 0..=4 {
        let x = x0 + plot_w * tick as f64 / 4.0;
        svg.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"10\">{}</text>\n",
            y0 + 15.0,
            tick as f64 / 4.0
        ));
    }
    for tick in 0..=4 {
        let d = DENSITY_CAP * tick as f64 / 4.0;
        let y = y0 - d * scale;
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{y:.2}\" text-anchor=\"end\" font-size=\"10\">{d}</text>\n",
            x0 - 6.0
        ));
    }
    // truncation line
    svg.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#cc3333\" \
         stroke-dasharray=\"5,4\"/>\n",
        y0 - DENSITY_CAP * scale,
        x0 + plot_w,
        y0 - DENSITY_CAP * scale
    ));
    svg.push_str("</svg>\n");
    svg
}
