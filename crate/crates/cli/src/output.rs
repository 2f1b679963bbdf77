//! CSV and JSON writers. Every output starts with the resolved config.

use std::io::Write;

use qratchet_core::experiments::SweepResult;
use qratchet_core::floquet::BandSpectrum;
use qratchet_core::TrajectoryRecord;
use serde_json::{json, Value};

use crate::config::{RunConfig, HEADER_TAG};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_header(w: &mut dyn Write, config: &RunConfig) -> std::io::Result<()> {
    writeln!(w, "# {HEADER_TAG} {VERSION}")?;
    for line in config.to_toml().lines() {
        if line.is_empty() {
            writeln!(w, "#")?;
        } else {
            writeln!(w, "# {line}")?;
        }
    }
    Ok(())
}

fn json_document(config: &RunConfig, data: Value) -> Value {
    json!({
        HEADER_TAG: VERSION,
        "config": config,
        "data": data,
    })
}

pub fn write_json(w: &mut dyn Write, config: &RunConfig, data: Value) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, &json_document(config, data))?;
    writeln!(w)
}

pub fn trajectory_csv(w: &mut dyn Write, records: &[TrajectoryRecord]) -> std::io::Result<()> {
    writeln!(w, "period,mean_k,mean_k2,norm_error,period_force,kmin,kmax")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.t,
            num(r.mean_k),
            num(r.mean_k2),
            num(r.norm_error),
            num(r.period_force),
            r.k_support.0,
            r.k_support.1
        )?;
    }
    Ok(())
}

/// Unwrapped band curves, one column per band label.
pub fn bands_columns(spectrum: &BandSpectrum) -> Vec<Vec<f64>> {
    (1..=spectrum.band_count()).map(|l| spectrum.unwrapped(l)).collect()
}

pub fn bands_csv(w: &mut dyn Write, spectrum: &BandSpectrum) -> std::io::Result<()> {
    let cols = bands_columns(spectrum);
    let names: Vec<String> = (1..=cols.len()).map(|l| format!("omega{l}")).collect();
    writeln!(w, "x0,{}", names.join(","))?;
    for (i, x0) in spectrum.x0_grid.iter().enumerate() {
        let row: Vec<String> = cols.iter().map(|c| num(c[i])).collect();
        writeln!(w, "{},{}", num(*x0), row.join(","))?;
    }
    Ok(())
}

/// `values` are the parameter values as configured (`kappa / pi` for kappa).
pub fn sweep_csv(w: &mut dyn Write, values: &[f64], result: &SweepResult) -> std::io::Result<()> {
    writeln!(w, "param,mean_k_final")?;
    for (v, k) in values.iter().zip(&result.final_mean_k) {
        writeln!(w, "{},{}", num(*v), num(*k))?;
    }
    Ok(())
}
