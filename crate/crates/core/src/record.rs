//! Run records and the CSV format shared by every command.
//!
//! A CSV file starts with `#`-prefixed `key=value` comment lines describing
//! the run, then one header row, then data rows. Reals are printed in the
//! shortest form that round-trips, so reruns are byte-identical.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;

use crate::diagnostics::InvariantViolation;
use crate::error::Result;

/// One CSV table with its metadata comments.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvTable {
    comments: Vec<(String, String)>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            comments: Vec::new(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, key: impl Into<String>, value: impl fmt::Display) -> &mut Self {
        self.comments.push((key.into(), value.to_string()));
        self
    }

    /// Appends comment pairs, skipping any identical pair already present.
    pub fn comments_from(&mut self, pairs: &[(String, String)]) -> &mut Self {
        for p in pairs {
            if !self.comments.contains(p) {
                self.comments.push(p.clone());
            }
        }
        self
    }

    /// Appends a row; panics if the cell count differs from the header, since
    /// that is a programming error in the emitting command.
    pub fn push_row(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match header {:?}", self.columns);
        self.rows.push(row);
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn render(&self) -> Result<String> {
        let mut head = String::new();
        for (k, v) in &self.comments {
            let _ = writeln!(head, "# {k}={v}");
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(head.into_bytes());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("table cells are strings"))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, self.render()?)?;
        Ok(())
    }
}

/// Formats a real for CSV output; non-finite values print as `nan`/`inf`.
pub fn real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:?}")
    }
}

/// Per-step diagnostics. Reals that were not computed are NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRow {
    pub step: usize,
    pub time: f64,
    /// Sum of the states: integer count for quantised runs.
    pub mass: f64,
    pub int_mass: Option<i64>,
    pub tv: f64,
    pub entropy: f64,
    pub n_eff: f64,
    pub rho_defect: f64,
    pub l1_vs_ref: f64,
    pub l2rel_vs_ref: f64,
}

pub const DIAGNOSTICS_COLUMNS: [&str; 9] =
    ["step", "time", "mass", "tv", "S", "N_eff", "rho_defect", "l1_vs_ref", "l2rel_vs_ref"];

/// Reconstructed field at one recorded step.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub time: f64,
    pub values: Vec<f64>,
    pub states: Option<Vec<i64>>,
}

/// Everything produced by one scalar run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub scheme: String,
    /// Run metadata as `key=value` pairs, in emission order.
    pub metadata: Vec<(String, String)>,
    pub x: Vec<f64>,
    pub dt: f64,
    pub steps: usize,
    pub initial: Vec<f64>,
    pub final_values: Vec<f64>,
    pub final_states: Option<Vec<i64>>,
    pub reference: Option<Vec<f64>>,
    pub diagnostics: Vec<DiagnosticsRow>,
    pub snapshots: Vec<Snapshot>,
    pub violations: Vec<InvariantViolation>,
    pub warnings: Vec<String>,
}

impl RunRecord {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Integer mass after every step, when the run was quantised.
    pub fn integer_mass_trace(&self) -> Option<Vec<i64>> {
        self.diagnostics.iter().map(|d| d.int_mass).collect()
    }

    pub fn diagnostics_table(&self) -> CsvTable {
        let mut t = CsvTable::new(DIAGNOSTICS_COLUMNS);
        t.comments_from(&self.metadata);
        for d in &self.diagnostics {
            let mass = d.int_mass.map_or_else(|| real(d.mass), |m| m.to_string());
            t.push_row(vec![
                d.step.to_string(),
                real(d.time),
                mass,
                real(d.tv),
                real(d.entropy),
                real(d.n_eff),
                real(d.rho_defect),
                real(d.l1_vs_ref),
                real(d.l2rel_vs_ref),
            ]);
        }
        t
    }

    /// Final profile: `x, u0, u, [q,] [u_ref]`.
    pub fn profile_table(&self) -> CsvTable {
        let mut cols = vec!["x", "u0", "u"];
        if self.final_states.is_some() {
            cols.push("q");
        }
        if self.reference.is_some() {
            cols.push("u_ref");
        }
        let mut t = CsvTable::new(cols);
        t.comments_from(&self.metadata);
        for i in 0..self.x.len() {
            let mut row = vec![real(self.x[i]), real(self.initial[i]), real(self.final_values[i])];
            if let Some(q) = &self.final_states {
                row.push(q[i].to_string());
            }
            if let Some(r) = &self.reference {
                row.push(real(r[i]));
            }
            t.push_row(row);
        }
        t
    }

    /// Long-format snapshots: `step, time, x, u`.
    pub fn snapshots_table(&self) -> CsvTable {
        let mut t = CsvTable::new(["step", "time", "x", "u"]);
        t.comments_from(&self.metadata);
        for s in &self.snapshots {
            for (x, u) in self.x.iter().zip(&s.values) {
                t.push_row(vec![s.step.to_string(), real(s.time), real(*x), real(*u)]);
            }
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_comments_header_and_rows() {
        let mut t = CsvTable::new(["a", "b"]);
        t.comment("cells", 4).comment("scheme", "fqnm");
        t.push_row(vec!["1".into(), real(0.1)]);
        assert_eq!(t.render().unwrap(), "# cells=4\n# scheme=fqnm\na,b\n1,0.1\n");
    }

    #[test]
    fn reals_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 1e22] {
            assert_eq!(real(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(real(f64::NAN), "nan");
    }

    #[test]
    #[should_panic]
    fn ragged_rows_are_rejected() {
        CsvTable::new(["a", "b"]).push_row(vec!["1".into()]);
    }

    #[test]
    fn writes_to_nested_directory() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub/out.csv");
        let mut t = CsvTable::new(["x"]);
        t.push_row(vec!["1".into()]);
        t.write(&path).unwrap();
        assert_eq!(fs::read_to_string(path).unwrap(), "x\n1\n");
    }
}
