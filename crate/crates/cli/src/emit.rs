//! Rendering of a [`DiagnosticsReport`] as text tables or JSON.

use std::fmt::Write as _;
use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::config::OutputFormat;
use crate::report::{DiagnosticsReport, RowReport};

pub fn emit(report: &DiagnosticsReport, format: OutputFormat, top_k: usize) -> Vec<u8> {
    match format {
        OutputFormat::Json => emit_json(report),
        OutputFormat::Text => emit_text(report, top_k).into_bytes(),
    }
}

/// One pretty-printed JSON document, floats written with 17 significant
/// digits so parsing them back is bit-exact.
pub fn emit_json(report: &DiagnosticsReport) -> Vec<u8> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Digits17(PrettyFormatter::new()));
    report.serialize(&mut ser).expect("serializing to memory cannot fail");
    out.push(b'\n');
    out
}

struct Digits17<'a>(PrettyFormatter<'a>);

impl Formatter for Digits17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(w, "{value:.16e}")
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Six significant digits, switching to exponent form outside
/// `[1e-4, 1e6)`.
fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 {
        "0".to_owned()
    } else if (1e-4..1e6).contains(&a) {
        let decimals = (5 - a.log10().floor() as i32).clamp(0, 9) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.5e}")
    }
}

pub fn emit_text(report: &DiagnosticsReport, top_k: usize) -> String {
    let m = &report.meta;
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "leverage diagnostics: {} rows, {} regressors", m.n, m.p);
    if let Some(resp) = &m.response {
        let _ = writeln!(w, "response column: {resp} (not a regressor)");
    }
    let source = if m.threshold_source == "default" { " (default 2(p+1)/n)" } else { "" };
    let _ = writeln!(w, "leverage threshold: {}{source}", num(m.threshold));
    let _ = write!(w, "correlation condition number: {}", num(m.condition_number));
    if m.condition_warning {
        let _ = write!(w, "  WARNING: near-singular design");
    }
    let _ = writeln!(w);
    let _ = writeln!(w, "rows are numbered from 1 (first line after the header)");

    let _ = writeln!(w, "\nregressors");
    let mut t = Table::new(&["name", "mean", "std", "r_sq", "inflation"]);
    for r in &report.regressors {
        t.push(vec![r.name.clone(), num(r.mean), num(r.std), num(r.r_sq), num(r.inflation)]);
    }
    t.render(w);

    let _ = writeln!(w);
    if m.flagged_count == 0 {
        let _ = writeln!(w, "no rows exceed threshold");
    } else {
        let _ = writeln!(w, "{} of {} rows exceed threshold", m.flagged_count, m.n);
    }

    if let Some(checks) = &m.verification {
        let _ = writeln!(w, "\nverification");
        let mut t = Table::new(&["check", "max_deviation", "tolerance", "status"]);
        for c in checks {
            let status = if c.passed { "ok" } else { "FAILED" };
            t.push(vec![c.name.clone(), format!("{:.3e}", c.max_deviation), format!("{:.1e}", c.tolerance), status.into()]);
        }
        t.render(w);
    }

    let ranked = report.ranked_rows();
    let shown = ranked.len().min(top_k);
    let _ = writeln!(w, "\ntop {shown} rows by leverage");
    for row in ranked.into_iter().take(top_k) {
        row_block(w, row);
    }
    out
}

fn row_block(w: &mut String, row: &RowReport) {
    let _ = write!(w, "\nrow {}  leverage {}  D² {}", row.row, num(row.leverage), num(row.mahalanobis_sq));
    if let Some(y) = row.response {
        let _ = write!(w, "  response {}", num(y));
    }
    if row.flagged {
        let _ = write!(w, "  FLAGGED");
    }
    let _ = writeln!(w);
    if let Some(terms) = &row.decomposition_one {
        let _ = writeln!(w, "  decomposition I (D² = sum of terms)");
        let mut t = Table::new(&["regressor", "inflation", "aux_residual", "marginal_z", "term", "share"]);
        for x in terms {
            t.push(vec![
                x.regressor.clone(),
                num(x.inflation),
                num(x.aux_residual),
                num(x.marginal_z),
                num(x.term),
                format!("{:.1}%", 100.0 * x.share),
            ]);
        }
        t.indent(2).render(w);
    }
    if let Some(splits) = &row.decomposition_two {
        let _ = writeln!(w, "  decomposition II (effect of removing one regressor)");
        let mut t = Table::new(&["removed", "D²_without", "residual²", "leverage_drop"]);
        for s in splits {
            t.push(vec![s.removed.clone(), num(s.subset_dist_sq), num(s.residual_sq), num(s.leverage_drop)]);
        }
        t.indent(2).render(w);
    }
}

/// Left-aligned first column, right-aligned numbers.
struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    indent: usize,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
            indent: 0,
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn indent(mut self, by: usize) -> Self {
        self.indent = by;
        self
    }

    fn render(&self, w: &mut String) {
        let widths: Vec<usize> = (0..self.header.len())
            .map(|k| {
                std::iter::once(&self.header)
                    .chain(&self.rows)
                    .map(|r| r[k].chars().count())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        for row in std::iter::once(&self.header).chain(&self.rows) {
            let mut line = " ".repeat(self.indent);
            for (k, cell) in row.iter().enumerate() {
                let pad = widths[k] - cell.chars().count();
                if k == 0 {
                    line.push_str(cell);
                    line.push_str(&" ".repeat(pad));
                } else {
                    line.push_str("  ");
                    line.push_str(&" ".repeat(pad));
                    line.push_str(cell);
                }
            }
            let _ = writeln!(w, "{}", line.trim_end());
        }
    }
}
