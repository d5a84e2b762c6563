//! CSV and report writers. Floats carry 17 significant digits so a value
//! read back is bit-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use spinbath::{DecoherenceSeries, Provenance};

use crate::config::{CliError, Mode, RunConfig};

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn header(cfg: &RunConfig, backend: Provenance) -> String {
    let spec = &cfg.spec;
    let mut h = String::new();
    let command = match cfg.mode {
        Mode::Static => "static",
        Mode::TimeDep => "timedep",
        Mode::Validate => "validate",
        Mode::Figures => "figures",
    };
    let n = if backend == Provenance::IntegralLimit {
        "inf".to_string()
    } else {
        spec.n_bath.to_string()
    };
    let _ = writeln!(h, "#command={command}");
    let _ = writeln!(h, "#model={}", spec.model);
    let _ = writeln!(h, "#n={n}");
    let _ = writeln!(h, "#j={}", spec.j_coupling);
    let _ = writeln!(h, "#v={}", spec.v_coupling);
    let _ = writeln!(h, "#boundary={}", spec.boundary);
    match &cfg.schedule {
        None => {
            let _ = writeln!(h, "#schedule=constant");
        }
        Some(s) => {
            let _ = writeln!(h, "#schedule={}", s.kind);
            let _ = writeln!(h, "#j0={}", s.j0);
            let _ = writeln!(h, "#rate={}", s.rate);
            let _ = writeln!(h, "#t_off={}", s.t_off);
            let _ = writeln!(h, "#t_on={}", s.t_on);
        }
    }
    let _ = writeln!(h, "#backend={backend}");
    let _ = writeln!(h, "#version={}", env!("CARGO_PKG_VERSION"));
    h
}

pub fn series_csv(cfg: &RunConfig, series: &DecoherenceSeries) -> String {
    let mut s = header(cfg, series.provenance);
    s.push_str("t,kappa_re,kappa_im\n");
    for (t, k) in series.iter() {
        let _ = writeln!(s, "{},{},{}", float(t), float(k.re), float(k.im));
    }
    s
}

pub fn write(dir: &Path, name: &str, body: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), body)?;
    Ok(())
}

pub fn series_file_name(p: Provenance) -> String {
    format!("kappa_{}.csv", p.name())
}

/// One checked invariant of a validation run.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

pub fn report(checks: &[Check]) -> String {
    let mut s = String::new();
    for c in checks {
        let status = if c.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(
            s,
            "INVARIANT {} {} {} {status}",
            c.name,
            float(c.deviation),
            float(c.tolerance)
        );
    }
    s
}
