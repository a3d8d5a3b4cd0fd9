//! Static report output: stacked-bar SVG charts and markdown delta tables.

use std::fmt::Write;

use silsamp_core::{Codebook, ConditionId, Question};

use crate::config::temperature_tag;
use crate::pipeline::{DistributionLine, EstimateRow};

const PALETTE: [&str; 9] = [
    "#2b6cb0", "#63b3ed", "#a0aec0", "#f6ad55", "#dd6b20", "#9f7aea", "#48bb78", "#f56565", "#4a5568",
];

const LABEL_WIDTH: f64 = 130.0;
const BAR_WIDTH: f64 = 460.0;
const ROW_HEIGHT: f64 = 26.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Horizontal 100% stacked bars: the human row, then one row per silicon condition.
pub fn stacked_bar_svg(question: &Question, wave: &str, human: Option<&DistributionLine>, silicon: &[&DistributionLine]) -> String {
    let mut rows: Vec<(String, &[f64], u64)> = Vec::new();
    if let Some(h) = human {
        rows.push(("human".into(), &h.probabilities, h.sample_count));
    }
    for s in silicon {
        let name = s.condition.map_or("silicon", |c| c.name());
        rows.push((name.into(), &s.probabilities, s.sample_count));
    }
    let legend_rows = question.options.len();
    let top = 40.0;
    let height = top + rows.len() as f64 * ROW_HEIGHT + 20.0 + legend_rows as f64 * 18.0 + 10.0;
    let width = LABEL_WIDTH + BAR_WIDTH + 80.0;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="10" y="22" font-size="14" font-weight="bold">{} ({}, wave {})</text>"#,
        escape(&question.topic),
        escape(&question.id),
        escape(wave)
    );
    for (i, (name, probs, n)) in rows.iter().enumerate() {
        let y = top + i as f64 * ROW_HEIGHT;
        let _ = writeln!(svg, r#"<text x="10" y="{:.1}">{}</text>"#, y + 16.0, escape(name));
        let mut x = LABEL_WIDTH;
        for (k, p) in probs.iter().enumerate() {
            let w = p * BAR_WIDTH;
            if w > 0.0 {
                let _ = writeln!(
                    svg,
                    r#"<rect x="{x:.2}" y="{y:.1}" width="{w:.2}" height="{:.1}" fill="{}"><title>{}: {:.1}%</title></rect>"#,
                    ROW_HEIGHT - 6.0,
                    PALETTE[k % PALETTE.len()],
                    escape(&question.options[k]),
                    p * 100.0
                );
            }
            x += w;
        }
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}">n={n}</text>"#, LABEL_WIDTH + BAR_WIDTH + 8.0, y + 16.0);
    }
    let legend_top = top + rows.len() as f64 * ROW_HEIGHT + 20.0;
    for (k, label) in question.options.iter().enumerate() {
        let y = legend_top + k as f64 * 18.0;
        let _ = writeln!(
            svg,
            r#"<rect x="10" y="{:.1}" width="12" height="12" fill="{}"/><text x="28" y="{:.1}">{}. {}</text>"#,
            y - 10.0,
            PALETTE[k % PALETTE.len()],
            y,
            k + 1,
            escape(label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Delta cell text with a `*` marker when the change is significant.
pub fn format_delta(delta: f64, significant: bool) -> String {
    let mut text = format!("{delta:.3}");
    if text == "-0.000" {
        text.remove(0);
    }
    if significant {
        text.push('*');
    }
    text
}

/// One markdown table per temperature: replicate JSD, then a delta column per other condition.
pub fn delta_table(
    codebook: &Codebook,
    questions: &[String],
    conditions: &[ConditionId],
    temperatures: &[f64],
    estimates: &[EstimateRow],
) -> String {
    let others: Vec<ConditionId> = conditions.iter().copied().filter(|c| *c != ConditionId::Replicate).collect();
    let mut out = String::new();
    for &t in temperatures {
        let _ = writeln!(out, "## Temperature {t} ({})\n", temperature_tag(t));
        let mut header = String::from("| Question | Topic | Replicate JSD [95% CI] |");
        let mut rule = String::from("|---|---|---|");
        for c in &others {
            let _ = write!(header, " {} |", c.name());
            rule.push_str("---|");
        }
        let _ = writeln!(out, "{header}\n{rule}");
        for qid in questions {
            let topic = codebook.question(qid).map_or("", |q| q.topic.as_str());
            let find = |c: ConditionId| {
                estimates
                    .iter()
                    .find(|e| &e.question_id == qid && e.condition == c.index() && e.temperature == t)
            };
            let base = match find(ConditionId::Replicate).and_then(|e| Some((e.point?, e.ci_low?, e.ci_high?))) {
                Some((p, lo, hi)) => format!("{p:.4} [{lo:.4}, {hi:.4}]"),
                None => "n/a".into(),
            };
            let mut line = format!("| {qid} | {} | {base} |", escape(topic));
            for &c in &others {
                let cell = match find(c) {
                    Some(EstimateRow { delta: Some(d), significant: Some(s), .. }) => format_delta(*d, *s),
                    Some(e) if e.status != "ok" => e.status.clone(),
                    _ => "n/a".into(),
                };
                let _ = write!(line, " {cell} |");
            }
            let _ = writeln!(out, "{line}");
        }
        out.push('\n');
    }
    out.push_str("Deltas are condition JSD minus replicate JSD; * marks non-overlapping 95% intervals.\n");
    out
}
