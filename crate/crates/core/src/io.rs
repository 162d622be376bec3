//! File output. Numbers are written with 17 significant digits in CSV; JSON
//! uses the shortest representation that reads back to the same `f64`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::bvp::Branch;
use crate::flowfield::{FieldSample, Polyline};
use crate::model::{BranchLabel, ProblemSpec, Profile};
use crate::shooter::ScanRecord;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("malformed input: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<BranchLabel> for Cell {
    fn from(v: BranchLabel) -> Self {
        Cell::Text(v.to_string())
    }
}

pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:.16e}")
    }
}

/// Rows under a fixed header, writable as CSV or as a JSON array of
/// objects.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: vec![],
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(v) => fmt_num(*v),
                    Cell::Int(v) => v.to_string(),
                    Cell::Text(s) => s.clone(),
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (k, c) in self.header.iter().zip(row) {
                    let v = match c {
                        // NaN has no JSON spelling
                        Cell::Num(v) => {
                            serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number)
                        }
                        Cell::Int(v) => Value::from(*v),
                        Cell::Text(s) => Value::from(s.clone()),
                    };
                    m.insert((*k).to_string(), v);
                }
                Value::Object(m)
            })
            .collect();
        Value::Array(rows)
    }

    pub fn write(&self, path: &Path, format: Format) -> Result<(), IoError> {
        match format {
            Format::Csv => fs::write(path, self.to_csv())?,
            Format::Json => write_json(path, &self.to_json())?,
        }
        Ok(())
    }
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

/// Metadata written next to a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileMeta {
    #[serde(rename = "R")]
    pub reynolds: f64,
    pub a: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub label: BranchLabel,
    pub mesh_size: usize,
}

impl ProfileMeta {
    pub fn of(p: &Profile) -> Self {
        Self {
            reynolds: p.reynolds(),
            a: p.a(),
            k: p.k(),
            label: p.label(),
            mesh_size: p.len(),
        }
    }
}

pub fn profile_table(p: &Profile) -> Table {
    let mut t = Table::new(&["y", "f", "fp", "fpp", "fppp"]);
    for i in 0..p.len() {
        t.push(vec![
            p.mesh()[i].into(),
            p.f()[i].into(),
            p.fp()[i].into(),
            p.fpp()[i].into(),
            p.fppp()[i].into(),
        ]);
    }
    t
}

/// Writes `<stem>.csv` with the nodal values and `<stem>.json` with the
/// metadata. In JSON format the values and metadata share one file.
pub fn write_profile(p: &Profile, dir: &Path, stem: &str, format: Format) -> Result<(), IoError> {
    let meta = ProfileMeta::of(p);
    match format {
        Format::Csv => {
            profile_table(p).write(&dir.join(format!("{stem}.csv")), Format::Csv)?;
            write_json(&dir.join(format!("{stem}.json")), &meta)?;
        }
        Format::Json => {
            let mut v = serde_json::to_value(&meta)?;
            v["nodes"] = profile_table(p).to_json();
            write_json(&dir.join(format!("{stem}.json")), &v)?;
        }
    }
    Ok(())
}

/// Reads back a profile written in CSV format.
pub fn read_profile(csv: &Path, meta: &Path) -> Result<Profile, IoError> {
    let meta: ProfileMeta = serde_json::from_str(&fs::read_to_string(meta)?)?;
    let text = fs::read_to_string(csv)?;
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("y,f,fp,fpp,fppp") {
        return Err(IoError::Parse("expected header y,f,fp,fpp,fppp".into()));
    }
    let mut cols = [vec![], vec![], vec![], vec![], vec![]];
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let vals: Vec<&str> = line.split(',').collect();
        if vals.len() != 5 {
            return Err(IoError::Parse(format!(
                "row {} has {} fields",
                n + 2,
                vals.len()
            )));
        }
        for (c, v) in cols.iter_mut().zip(vals) {
            c.push(
                v.trim()
                    .parse::<f64>()
                    .map_err(|e| IoError::Parse(format!("row {}: {e}", n + 2)))?,
            );
        }
    }
    let [y, f, fp, fpp, fppp] = cols;
    let spec =
        ProblemSpec::new(meta.reynolds, meta.a).map_err(|e| IoError::Parse(e.to_string()))?;
    Profile::new(spec, y, f, fp, fpp, fppp, meta.k, meta.label)
        .map_err(|e| IoError::Parse(e.to_string()))
}

pub fn branch_table(branches: &[Branch]) -> Table {
    let mut t = Table::new(&["R", "skin_friction", "K", "label", "fold_flag"]);
    for b in branches {
        for (i, p) in b.points.iter().enumerate() {
            t.push(vec![
                p.r.into(),
                p.skin_friction.into(),
                p.k.into(),
                p.label.into(),
                Cell::Int(i64::from(b.is_fold(i))),
            ]);
        }
    }
    t
}

pub fn scan_table(records: &[ScanRecord]) -> Table {
    let mut t = Table::new(&["A", "B", "k", "xi_star", "g_at_root", "R", "a", "label"]);
    for r in records {
        t.push(vec![
            r.a_init.into(),
            r.b_init.into(),
            r.k.into(),
            r.xi_star.into(),
            r.g_at_root.into(),
            r.reynolds.into(),
            r.a.into(),
            r.label.into(),
        ]);
    }
    t
}

pub fn field_table(samples: &[FieldSample]) -> Table {
    let mut t = Table::new(&["x", "y", "u", "v", "psi"]);
    for s in samples {
        t.push(vec![
            s.x.into(),
            s.y.into(),
            s.u.into(),
            s.v.into(),
            s.psi.into(),
        ]);
    }
    t
}

/// One asymptotic/numeric comparison point; `f_asym` is `NaN` where the
/// expansion is not defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticRow {
    pub y: f64,
    pub f_asym: f64,
    pub f_numeric: f64,
}

pub fn asymptotic_table(rows: &[AsymptoticRow]) -> Table {
    let mut t = Table::new(&["y", "f_asym", "f_numeric", "abs_err"]);
    for r in rows {
        t.push(vec![
            r.y.into(),
            r.f_asym.into(),
            r.f_numeric.into(),
            (r.f_asym - r.f_numeric).abs().into(),
        ]);
    }
    t
}

/// Streamlines as a JSON array of `{psi, points}` records.
pub fn write_streamlines(lines: &[Polyline], path: &Path) -> Result<(), IoError> {
    write_json(path, lines)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_keeps_seventeen_digits() {
        let mut t = Table::new(&["x", "label"]);
        t.push(vec![0.1.into(), BranchLabel::TypeII.into()]);
        t.push(vec![f64::NAN.into(), Cell::Int(3)]);
        let s = t.to_csv();
        assert_eq!(s, "x,label\n1.0000000000000001e-1,TypeII\nNaN,3\n");
        let back: f64 = s
            .lines()
            .nth(1)
            .unwrap()
            .split(',')
            .next()
            .unwrap()
            .parse()
            .unwrap();
        assert_eq!(back, 0.1);
        let j = t.to_json();
        assert!(j[1]["x"].is_null());
        assert_eq!(j[0]["label"], "TypeII");
    }

    #[test]
    fn format_parsing() {
        assert_eq!("CSV".parse::<Format>().unwrap(), Format::Csv);
        assert_eq!("json".parse::<Format>().unwrap(), Format::Json);
        assert!("xml".parse::<Format>().is_err());
    }
}
