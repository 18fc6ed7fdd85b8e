//! Flat rows and their CSV, JSON and table renderings.
//!
//! Column names are frozen; see `docs/OUTPUT_SCHEMA.md`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::report::{Channel, CoherenceReport};

pub const BASE_COLUMNS: [&str; 10] = [
    "f0_ghz",
    "t1_dis",
    "t2_dis",
    "t1_mod",
    "t2_mod",
    "t1_vac",
    "t2_vac",
    "gamma_dis",
    "gamma_mod",
    "gamma_vac",
];
pub const CAVITY_COLUMNS: [&str; 3] = ["t1_purcell", "t2_purcell", "gamma_purcell"];
pub const TOTAL_COLUMNS: [&str; 2] = ["gamma_total", "t2_total"];

/// One operating point. A missing value means the channel was not evaluated
/// or failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub f0_ghz: f64,
    pub t1_dis: Option<f64>,
    pub t2_dis: Option<f64>,
    pub t1_mod: Option<f64>,
    pub t2_mod: Option<f64>,
    pub t1_vac: Option<f64>,
    pub t2_vac: Option<f64>,
    pub gamma_dis: Option<f64>,
    pub gamma_mod: Option<f64>,
    pub gamma_vac: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1_purcell: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t2_purcell: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_purcell: Option<f64>,
    pub gamma_total: f64,
    pub t2_total: Option<f64>,
}

impl Row {
    pub fn from_report(r: &CoherenceReport) -> Self {
        let get = |c: Channel| r.channel(c);
        let t1 = |c| get(c).map(|x| x.t1);
        let t2 = |c| get(c).map(|x| x.t2);
        let g = |c| get(c).map(|x| x.gamma);
        use Channel::*;
        Row {
            f0_ghz: r.operating_point.f0_ghz,
            t1_dis: t1(Displacement),
            t2_dis: t2(Displacement),
            t1_mod: t1(Modulation),
            t2_mod: t2(Modulation),
            t1_vac: t1(Vacuum),
            t2_vac: t2(Vacuum),
            gamma_dis: g(Displacement),
            gamma_mod: g(Modulation),
            gamma_vac: g(Vacuum),
            t1_purcell: t1(Purcell),
            t2_purcell: t2(Purcell),
            gamma_purcell: g(Purcell),
            gamma_total: r.gamma_total,
            t2_total: r.t2_total,
        }
    }

    fn values(&self, cavity: bool) -> Vec<Option<f64>> {
        let mut v = vec![
            Some(self.f0_ghz),
            self.t1_dis,
            self.t2_dis,
            self.t1_mod,
            self.t2_mod,
            self.t1_vac,
            self.t2_vac,
            self.gamma_dis,
            self.gamma_mod,
            self.gamma_vac,
        ];
        if cavity {
            v.extend([self.t1_purcell, self.t2_purcell, self.gamma_purcell]);
        }
        v.extend([Some(self.gamma_total), self.t2_total]);
        v
    }
}

pub fn columns(cavity: bool) -> Vec<&'static str> {
    let mut c = BASE_COLUMNS.to_vec();
    if cavity {
        c.extend(CAVITY_COLUMNS);
    }
    c.extend(TOTAL_COLUMNS);
    c
}

/// Shortest string that parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Nine significant digits, for human-readable tables.
pub fn format_sig9(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.8e}")
    } else {
        format!("{x}")
    }
}

pub fn write_csv<W: Write>(out: W, rows: &[Row], cavity: bool) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns(cavity))?;
    for row in rows {
        w.write_record(
            row.values(cavity)
                .into_iter()
                .map(|v| v.map(format_float).unwrap_or_default()),
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Inverse of [`write_csv`].
pub fn read_csv(text: &str) -> Result<Vec<Row>, String> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().map_err(|e| e.to_string())?.clone();
    let cavity = headers.iter().any(|h| h == "gamma_purcell");
    let expected = columns(cavity);
    if headers.iter().ne(expected.iter().copied()) {
        return Err(format!("unexpected header {headers:?}"));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let mut vals = rec.iter().map(|s| {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse::<f64>().map(Some).map_err(|e| format!("`{s}`: {e}"))
            }
        });
        let mut next = || vals.next().unwrap_or(Ok(None));
        let required = |v: Option<f64>, name: &str| v.ok_or_else(|| format!("missing {name}"));
        let f0_ghz = required(next()?, "f0_ghz")?;
        let (t1_dis, t2_dis, t1_mod, t2_mod) = (next()?, next()?, next()?, next()?);
        let (t1_vac, t2_vac, gamma_dis, gamma_mod, gamma_vac) = (next()?, next()?, next()?, next()?, next()?);
        let (t1_purcell, t2_purcell, gamma_purcell) = if cavity {
            (next()?, next()?, next()?)
        } else {
            (None, None, None)
        };
        let gamma_total = required(next()?, "gamma_total")?;
        let t2_total = next()?;
        rows.push(Row {
            f0_ghz,
            t1_dis,
            t2_dis,
            t1_mod,
            t2_mod,
            t1_vac,
            t2_vac,
            gamma_dis,
            gamma_mod,
            gamma_vac,
            t1_purcell,
            t2_purcell,
            gamma_purcell,
            gamma_total,
            t2_total,
        });
    }
    Ok(rows)
}

/// Right-aligned columns.
pub fn render_table(header: &[String], body: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in body {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    let mut s = line(header);
    s.push('\n');
    for row in body {
        s.push_str(&line(row));
        s.push('\n');
    }
    s
}

pub fn rows_table(rows: &[Row], cavity: bool) -> String {
    let header: Vec<String> = columns(cavity).into_iter().map(String::from).collect();
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            r.values(cavity)
                .into_iter()
                .map(|v| v.map(format_sig9).unwrap_or_else(|| "-".into()))
                .collect()
        })
        .collect();
    render_table(&header, &body)
}

/// Per-channel breakdown of one report, with notes.
pub fn report_table(r: &CoherenceReport) -> String {
    let header: Vec<String> = ["channel", "gamma_1/s", "gamma_phi_1/s", "t1_s", "t2_s"]
        .into_iter()
        .map(String::from)
        .collect();
    let mut body: Vec<Vec<String>> = r
        .channels
        .iter()
        .map(|c| {
            vec![
                c.channel.to_string(),
                format_sig9(c.gamma),
                format_sig9(c.gamma_phi),
                format_sig9(c.t1),
                format_sig9(c.t2),
            ]
        })
        .collect();
    body.push(vec![
        "total".into(),
        format_sig9(r.gamma_total),
        "-".into(),
        "-".into(),
        r.t2_total.map(format_sig9).unwrap_or_else(|| "-".into()),
    ]);
    let mut s = format!(
        "f0 = {} GHz, T = {} K, material = {}\n",
        r.operating_point.f0_ghz, r.operating_point.temperature, r.operating_point.material.name
    );
    s.push_str(&render_table(&header, &body));
    for c in &r.channels {
        for key in ["warning", "discrepancy", "dephasing"] {
            if let Some(note) = c.metadata.get(key) {
                s.push_str(&format!("{}: {key}: {note}\n", c.channel));
            }
        }
    }
    for f in &r.failures {
        s.push_str(&format!("{}: FAILED: {}\n", f.channel, f.error));
    }
    for (k, v) in &r.metadata {
        s.push_str(&format!("{k}: {v}\n"));
    }
    s
}
