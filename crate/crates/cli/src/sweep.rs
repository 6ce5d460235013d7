//! Parameter sweeps over `(γ, σ, k, k̄)` for the polynomial decay regime.

use std::path::Path;

use levyfp::rates::predicted_q;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::output::{fmt_f64, ArtifactDir, Table};
use crate::runner::run;
use crate::CliError;

/// One line of `sweep.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub sigma: f64,
    pub k: f64,
    pub kbar: f64,
    pub predicted_q: f64,
    pub fitted_exponent: Option<f64>,
    pub r2: Option<f64>,
    /// `ok`, or the failure kind of the cell.
    pub status: String,
    pub dir: String,
}

/// Run every cell as a forward-decay experiment in `out/cell_NNN` and
/// aggregate fitted against predicted exponents. Cell failures are recorded
/// per row; every cell is validated before any of them starts.
pub fn sweep(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<SweepRow>, CliError> {
    let mut dir = ArtifactDir::create(out)?;
    dir.write_text("config.resolved.json", &cfg.echo_json())?;
    cfg.validate_sweep()?;
    let cells = cfg.sweep_cells();
    let rows: Vec<SweepRow> = cells
        .par_iter()
        .enumerate()
        .map(|(i, cell)| {
            let name = format!("cell_{i:03}");
            let predicted = predicted_q(cell.k, cell.kbar, cell.gamma).unwrap_or(f64::NAN);
            let mut row = SweepRow {
                gamma: cell.gamma,
                sigma: cell.sigma,
                k: cell.k,
                kbar: cell.kbar,
                predicted_q: predicted,
                fitted_exponent: None,
                r2: None,
                status: "ok".into(),
                dir: name.clone(),
            };
            let outcome = cfg.cell_config(cell).map_err(CliError::from).and_then(|c| run(&c, &out.join(&name)));
            match outcome {
                Ok(o) => {
                    let fit = &o.summary["fit"]["fit"];
                    row.fitted_exponent = fit["params"]["exponent"].as_f64();
                    row.r2 = fit["r2"].as_f64();
                }
                Err(CliError::Levy(e)) => row.status = e.kind().into(),
                Err(e) => row.status = format!("error: {e}"),
            }
            row
        })
        .collect();

    let mut table = Table::new(["gamma", "sigma", "k", "kbar", "predicted_q", "fitted_exponent", "r2", "status"]);
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    for r in &rows {
        table.push_cells(vec![
            fmt_f64(r.gamma),
            fmt_f64(r.sigma),
            fmt_f64(r.k),
            fmt_f64(r.kbar),
            fmt_f64(r.predicted_q),
            opt(r.fitted_exponent),
            opt(r.r2),
            r.status.clone(),
        ]);
    }
    dir.write_csv("sweep.csv", &table)?;
    Ok(rows)
}
