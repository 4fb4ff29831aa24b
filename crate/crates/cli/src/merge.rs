//! Merging of reports and the CSV/text summaries.

use std::path::Path;

use crate::config::ConfigError;
use crate::report::{Report, ScanRecord, SCHEMA};

pub const CSV_COLUMNS: [&str; 9] =
    ["family", "r", "d", "mu", "predicted", "observed", "margin", "witness_mineig", "seed"];

pub fn load_report(path: &Path) -> anyhow::Result<Report> {
    let text =
        std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| ConfigError(format!("{} is not JSON: {e}", path.display())))?;
    match value.get("schema").and_then(|s| s.as_str()) {
        Some(SCHEMA) => {}
        Some(other) => {
            return Err(ConfigError(format!("{}: schema '{other}' is not '{SCHEMA}'", path.display())).into());
        }
        None => return Err(ConfigError(format!("{}: missing schema field", path.display())).into()),
    }
    Ok(serde_json::from_value(value).map_err(|e| ConfigError(format!("{}: invalid report: {e}", path.display())))?)
}

fn row_key(r: &ScanRecord) -> (String, usize, usize, u64, u64) {
    (r.family.clone(), r.r, r.d, r.mu.to_bits(), r.seed)
}

fn push_unique<T: PartialEq>(into: &mut Vec<T>, items: Vec<T>) {
    for x in items {
        if !into.contains(&x) {
            into.push(x);
        }
    }
}

/// Union of the inputs. Scan rows are deduplicated by (family, r, d, μ, seed)
/// and stably sorted by (family, r, μ); the first occurrence wins.
/// Returns the merged report and one warning per dropped duplicate.
pub fn merge(reports: Vec<Report>) -> anyhow::Result<(Report, Vec<String>)> {
    let mut it = reports.into_iter();
    let first = it.next().ok_or_else(|| ConfigError("no reports to merge".into()))?;
    let mut out = Report::new("report", first.config.clone());
    out.summary.pass = true;
    let mut warnings = Vec::new();
    for rep in std::iter::once(first).chain(it) {
        for row in rep.scan {
            let key = row_key(&row);
            if out.scan.iter().any(|r| row_key(r) == key) {
                warnings.push(format!("duplicate row {} mu={} seed={} dropped", row.algebra, row.mu, row.seed));
            } else {
                out.scan.push(row);
            }
        }
        push_unique(&mut out.identities, rep.identities);
        push_unique(&mut out.mc, rep.mc);
        push_unique(&mut out.witnesses, rep.witnesses);
        out.summary.pass &= rep.summary.pass;
        push_unique(&mut out.summary.failures, rep.summary.failures);
        push_unique(&mut out.summary.mismatches, rep.summary.mismatches);
        push_unique(&mut out.summary.notes, rep.summary.notes);
    }
    out.scan.sort_by(|a, b| a.family.cmp(&b.family).then(a.r.cmp(&b.r)).then(a.mu.total_cmp(&b.mu)));
    out.summary.checks = out.identities.len() + out.scan.len() + out.mc.len() + out.witnesses.len();
    Ok((out, warnings))
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn verdict_str(v: cone_lab_core::tube::Verdict) -> String {
    serde_json::to_value(v).ok().and_then(|s| s.as_str().map(str::to_string)).unwrap_or_default()
}

pub fn csv_rows(rows: &[ScanRecord]) -> Vec<[String; 9]> {
    rows.iter()
        .map(|r| {
            [
                r.family.clone(),
                r.r.to_string(),
                r.d.to_string(),
                num(r.mu),
                r.predicted.to_string(),
                verdict_str(r.observed),
                num(r.margin.min_scaled),
                num(r.certificate.min_eigenvalue),
                r.seed.to_string(),
            ]
        })
        .collect()
}

pub fn write_csv<W: std::io::Write>(w: W, rows: &[ScanRecord]) -> anyhow::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(CSV_COLUMNS)?;
    for row in csv_rows(rows) {
        wr.write_record(&row)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn text_table(rows: &[ScanRecord]) -> String {
    let mut s = format!(
        "{:<7} {:>2} {:>2} {:>10} {:>9} {:>12} {:>12} {:>12} {:>8}\n",
        "family", "r", "d", "mu", "predicted", "observed", "margin", "min_eig", "seed"
    );
    for r in rows {
        let flag = if r.mismatch { " *" } else { "" };
        s.push_str(&format!(
            "{:<7} {:>2} {:>2} {:>10.4} {:>9} {:>12} {:>12.3e} {:>12.3e} {:>8}{flag}\n",
            r.family,
            r.r,
            r.d,
            r.mu,
            if r.predicted { "yes" } else { "no" },
            verdict_str(r.observed),
            r.margin.min_scaled,
            r.certificate.min_eigenvalue,
            r.seed
        ));
    }
    s
}
