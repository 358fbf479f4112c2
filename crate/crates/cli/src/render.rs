//! Text renderings of reports and resource tables.

use std::fmt::Write;

use qpt_core::stats::{resource_table, ResourceRow};

use crate::error::CliError;
use crate::{ComparisonReport, ModeKind};

pub fn report_csv(report: &ComparisonReport) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &report.rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn report_markdown(report: &ComparisonReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {} on {} qubit(s)\n", report.channel, report.n);
    let _ = writeln!(
        s,
        "mode: {}, shots per configuration: {}, trials: {}, master seed: {}\n",
        match report.mode {
            ModeKind::Exact => "exact",
            ModeKind::Sampled => "sampled",
        }, report.shots_per_config, report.trials, report.master_seed
    );
    let _ = writeln!(s, "| Scheme | N_exp | Total shots | Mean Frobenius | Std Frobenius | Mean QCB |");
    let _ = writeln!(s, "|---|---:|---:|---:|---:|---:|");
    for r in &report.summaries {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {:.6e} | {:.6e} | {:.9} |",
            r.scheme, r.config_count, r.total_shots, r.mean_frobenius, r.std_frobenius, r.mean_qcb
        );
    }
    let noted: Vec<_> = report.summaries.iter().filter(|r| !r.diagnostics.is_empty()).collect();
    if !noted.is_empty() {
        let _ = writeln!(s, "\nDiagnostics from trial 0:\n");
        for r in noted {
            let items: Vec<String> = r.diagnostics.iter().map(|(k, v)| format!("{k} = {v:.6e}")).collect();
            let _ = writeln!(s, "- {}: {}", r.scheme, items.join(", "));
        }
    }
    s
}

const RESOURCE_HEADER: [&str; 10] = [
    "scheme",
    "hilbert_dim",
    "n_inputs",
    "n_meas_per_input",
    "n_exp",
    "gates_per_meas",
    "gates_per_meas_units",
    "overall",
    "overall_units",
    "nu",
];

fn resource_fields(r: &ResourceRow) -> [String; 10] {
    [
        r.scheme.to_string(),
        r.hilbert_dim.to_string(),
        r.n_inputs.to_string(),
        r.n_meas_per_input.to_string(),
        r.n_exp.to_string(),
        r.gates_per_meas.clone(),
        r.gates_per_meas_units.to_string(),
        r.overall.clone(),
        r.overall_units.to_string(),
        r.nu_label(),
    ]
}

pub fn resources_csv(n: u32) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RESOURCE_HEADER)?;
    for r in resource_table(n)? {
        w.write_record(resource_fields(&r))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn resources_markdown(n: u32) -> Result<String, CliError> {
    let mut s = String::new();
    let _ = writeln!(s, "| {} |", RESOURCE_HEADER.join(" | "));
    let _ = writeln!(s, "|{}", "---|".repeat(RESOURCE_HEADER.len()));
    for r in resource_table(n)? {
        let _ = writeln!(s, "| {} |", resource_fields(&r).join(" | "));
    }
    let _ = writeln!(s, "\nUnits evaluate each asymptotic class at n = {n} with unit constant; they are not gate counts.");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resource_csv_rows() {
        let text = resources_csv(1).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 6);
        assert!(lines[1].starts_with("SQPT,2,4,4,16,"));
        assert!(lines[5].starts_with("DCQD,4,4,1,4,"));
    }
}
