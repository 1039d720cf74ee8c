//! Diagnostics time series as CSV with `#` provenance lines.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use bkmhd_core::diagnostics::DiagnosticRecord;
use bkmhd_core::littlewood_paley::PROFILE_ID;

use crate::error::Result;

pub const HEADER: &str = "t,energy,dissipation,sup_B,sup_u,grad_J_sup,omega_sup,grad_u_minus_J_sup,curl_J_sup,omega_besov,cdl_integrand,u_bmo,gradB_bmo,h4_u,h4_B,U_max,I_emhd,I_hall,I_cdl,I_bmo,I_lps_u,I_lps_gradB,I_selfsim";

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance written as `# key=value` lines ahead of the header.
#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub config_hash: String,
    pub extra: Vec<(String, String)>,
}

impl Metadata {
    pub fn new(config_hash: String) -> Self {
        Self { config_hash, extra: Vec::new() }
    }

    pub fn lines(&self) -> String {
        let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let mut out = String::new();
        writeln!(out, "# config_hash={}", self.config_hash).unwrap();
        writeln!(out, "# multiplier_profile={PROFILE_ID}").unwrap();
        writeln!(out, "# code_version={CODE_VERSION}").unwrap();
        writeln!(out, "# timestamp={stamp}").unwrap();
        for (k, v) in &self.extra {
            writeln!(out, "# {k}={v}").unwrap();
        }
        out
    }
}

/// Shortest round-trip decimal, so rows are exact and deterministic.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, num)
}

pub fn format_row(r: &DiagnosticRecord) -> String {
    let i = &r.integrals;
    let has_u = r.sup_u.is_some();
    let cols = [
        num(r.t),
        num(r.energy),
        num(r.dissipation),
        num(r.sup_b),
        opt(r.sup_u),
        num(r.grad_j_sup),
        opt(r.omega_sup),
        opt(r.grad_u_minus_j_sup),
        num(r.curl_j_sup),
        opt(r.omega_besov),
        num(r.cdl_integrand),
        opt(r.u_bmo),
        num(r.grad_b_bmo),
        opt(r.h4_u),
        num(r.h4_b),
        num(r.u_max),
        num(i.emhd),
        opt(has_u.then_some(i.hall)),
        num(i.cdl),
        num(i.bmo),
        opt(has_u.then_some(i.lps_u)),
        num(i.lps_grad_b),
        num(i.selfsim),
    ];
    cols.join(",")
}

pub fn render(records: &[DiagnosticRecord], meta: &Metadata) -> String {
    let mut out = meta.lines();
    out.push_str(HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format_row(r));
        out.push('\n');
    }
    out
}

pub fn write_timeseries(records: &[DiagnosticRecord], meta: &Metadata, path: &Path) -> Result<()> {
    fs::write(path, render(records, meta))?;
    Ok(())
}

/// A parsed CSV row: `None` for empty cells.
pub type Row = Vec<Option<f64>>;

/// Read a time series back, skipping `#` lines and the header.
pub fn read_timeseries(text: &str) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    let mut seen_header = false;
    for line in text.lines() {
        if line.starts_with('#') || line.is_empty() {
            continue;
        }
        if !seen_header {
            if line != HEADER {
                return Err(crate::error::format_err("unexpected time series header"));
            }
            seen_header = true;
            continue;
        }
        let row = line
            .split(',')
            .map(|c| {
                if c.is_empty() {
                    Ok(None)
                } else {
                    c.parse::<f64>().map(Some).map_err(|_| crate::error::format_err(format!("bad number {c:?}")))
                }
            })
            .collect::<Result<Row>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Column index by header name.
pub fn column(name: &str) -> Option<usize> {
    HEADER.split(',').position(|c| c == name)
}

/// Everything except the `#` lines, for determinism comparisons.
pub fn strip_metadata(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect()
}
