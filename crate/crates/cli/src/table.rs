//! Named numeric columns on a shared key grid, and their CSV/SVG forms.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::CliError;

/// Equal-length finite columns; the first one is the key (time, ratio, ...).
#[derive(Clone, Debug, PartialEq)]
pub struct CurveTable {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl CurveTable {
    pub fn new(key: impl Into<String>, values: Vec<f64>) -> Result<Self, CliError> {
        let mut table = Self {
            names: Vec::new(),
            columns: Vec::new(),
        };
        table.push(key, values)?;
        Ok(table)
    }

    pub fn push(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<(), CliError> {
        let name = name.into();
        if let Some(first) = self.columns.first() {
            if first.len() != values.len() {
                return Err(CliError::validation(format!(
                    "column `{name}` has {} rows, table has {}",
                    values.len(),
                    first.len()
                )));
            }
        }
        if let Some(row) = values.iter().position(|v| !v.is_finite()) {
            return Err(CliError::Numerics(ptgain::Error::NonFinite { step: row }));
        }
        if self.names.contains(&name) {
            return Err(CliError::validation(format!("duplicate column `{name}`")));
        }
        self.names.push(name);
        self.columns.push(values);
        Ok(())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        let i = self.names.iter().position(|n| n == name)?;
        Some(&self.columns[i])
    }

    /// Keeps every `stride`-th row, always including the last.
    pub fn thinned(&self, stride: usize) -> Self {
        let n = self.rows();
        if stride <= 1 || n == 0 {
            return self.clone();
        }
        let mut keep: Vec<usize> = (0..n).step_by(stride).collect();
        if keep.last() != Some(&(n - 1)) {
            keep.push(n - 1);
        }
        Self {
            names: self.names.clone(),
            columns: self.columns.iter().map(|c| keep.iter().map(|&i| c[i]).collect()).collect(),
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.names)?;
        let mut row = Vec::with_capacity(self.names.len());
        for r in 0..self.rows() {
            row.clear();
            row.extend(self.columns.iter().map(|c| fmt_value(c[r])));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self, CliError> {
        let bad = |e: csv::Error| CliError::validation(format!("malformed table: {e}"));
        let mut r = csv::ReaderBuilder::new().from_reader(input);
        let names: Vec<String> = r.headers().map_err(bad)?.iter().map(str::to_owned).collect();
        let mut columns = vec![Vec::new(); names.len()];
        for record in r.records() {
            let record = record.map_err(bad)?;
            for (col, field) in columns.iter_mut().zip(record.iter()) {
                let v: f64 = field
                    .parse()
                    .map_err(|_| CliError::validation(format!("malformed table: `{field}` is not a number")))?;
                col.push(v);
            }
        }
        let mut cols = names.into_iter().zip(columns);
        let Some((key, values)) = cols.next() else {
            return Err(CliError::validation("malformed table: no columns"));
        };
        let mut table = Self::new(key, values)?;
        for (name, values) in cols {
            table.push(name, values)?;
        }
        Ok(table)
    }

    /// Line plot of every non-key column against the key.
    pub fn to_svg(&self, title: &str) -> String {
        const W: f64 = 640.0;
        const H: f64 = 400.0;
        const PAD: f64 = 48.0;
        const COLORS: [&str; 8] = [
            "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
        ];
        let key = self.columns.first().map(Vec::as_slice).unwrap_or(&[]);
        let range = |vals: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            if lo > hi {
                (0.0, 1.0)
            } else if hi - lo < 1e-12 {
                (lo - 0.5, hi + 0.5)
            } else {
                (lo, hi)
            }
        };
        let (x0, x1) = range(&mut key.iter().copied());
        let (y0, y1) = range(&mut self.columns.iter().skip(1).flatten().copied());
        let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
        let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

        let mut svg = String::new();
        let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="11">"#);
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(svg, r#"<text x="{}" y="20" text-anchor="middle" font-size="13">{}</text>"#, W / 2.0, escape(title));
        let _ = writeln!(
            svg,
            r#"<path d="M{PAD},{PAD} V{} H{}" fill="none" stroke="black"/>"#,
            H - PAD,
            W - PAD
        );
        for (v, anchor, x, y) in [
            (x0, "start", PAD, H - PAD + 16.0),
            (x1, "end", W - PAD, H - PAD + 16.0),
        ] {
            let _ = writeln!(svg, r#"<text x="{x}" y="{y}" text-anchor="{anchor}">{v:.3}</text>"#);
        }
        for (v, y) in [(y0, H - PAD), (y1, PAD)] {
            let _ = writeln!(svg, r#"<text x="{}" y="{y}" text-anchor="end">{v:.3}</text>"#, PAD - 4.0);
        }
        if let Some(name) = self.names.first() {
            let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 8.0, escape(name));
        }
        for (i, (name, col)) in self.names.iter().zip(&self.columns).skip(1).enumerate() {
            let color = COLORS[i % COLORS.len()];
            let points: Vec<String> = key.iter().zip(col).map(|(&x, &y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                points.join(" ")
            );
            let ly = PAD + 14.0 * i as f64;
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{ly}" fill="{color}" text-anchor="end">{}</text>"#,
                W - PAD - 4.0,
                escape(name)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

/// Scientific notation with 17 significant digits; `-0` is written as `0`.
pub fn fmt_value(v: f64) -> String {
    format!("{:.16e}", v + 0.0)
}

/// `serialize_with` adapter applying [`fmt_value`].
pub fn sci<S: serde::Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_value(*v))
}

/// As [`sci`], with `None` as an empty field.
pub fn sci_opt<S: serde::Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&fmt_value(*v)),
        None => s.serialize_none(),
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn emit_csv(table: &CurveTable, path: &Path) -> Result<(), CliError> {
    table.write_csv(create(path)?).map_err(|source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

pub fn emit_svg(table: &CurveTable, path: &Path) -> Result<(), CliError> {
    let title = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut out = create(path)?;
    out.write_all(table.to_svg(&title).as_bytes())
        .and_then(|()| out.flush())
        .map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
}

/// Writes serializable records (summaries with mixed text and numbers).
pub fn emit_records<S: Serialize>(rows: &[S], path: &Path) -> Result<(), CliError> {
    let wrap = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(create(path)?);
    for row in rows {
        w.serialize(row).map_err(wrap)?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
