//! Machine-readable output: one flat table per command, rendered as CSV
//! (params as `#` comment lines) or JSON (params as an object, rows mirrored
//! under "rows"). Formatting is locale-independent; reals carry 17
//! significant digits so a round-trip through text is lossless.

use std::fmt::Write as _;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Str(String),
    /// Decimal integer of any size (exact convolution values overflow u128).
    Int(String),
    Real(f64),
    Null,
}

impl Cell {
    pub fn int(v: impl ToString) -> Self {
        Cell::Int(v.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct OutputRecord {
    pub schema_version: &'static str,
    pub command: String,
    /// Insertion-ordered so repeated runs render byte-identically.
    pub params: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl OutputRecord {
    pub fn new(command: &str, columns: Vec<&'static str>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_owned(),
            params: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.push((key.to_owned(), value.to_string()));
        self
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# schema_version={}", self.schema_version);
        let _ = writeln!(out, "# command={}", self.command);
        for (k, v) in &self.params {
            let _ = writeln!(out, "# {k}={v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(csv_field).collect();
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut out = String::new();
        out.push_str("{\"schema_version\":");
        push_json_str(&mut out, self.schema_version);
        out.push_str(",\"command\":");
        push_json_str(&mut out, &self.command);
        out.push_str(",\"params\":{");
        for (i, (k, v)) in self.params.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            push_json_str(&mut out, k);
            out.push(':');
            push_json_str(&mut out, v);
        }
        out.push_str("},\"columns\":[");
        for (i, c) in self.columns.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            push_json_str(&mut out, c);
        }
        out.push_str("],\"rows\":[");
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push('[');
            for (j, cell) in row.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                match cell {
                    Cell::Str(s) => push_json_str(&mut out, s),
                    Cell::Int(d) => out.push_str(d),
                    Cell::Real(x) => out.push_str(&fmt_real(*x)),
                    Cell::Null => out.push_str("null"),
                }
            }
            out.push(']');
        }
        out.push_str("]}\n");
        out
    }
}

/// 17 significant digits, sign and exponent in ASCII — valid both as a CSV
/// field and a JSON number.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_field(cell: &Cell) -> String {
    match cell {
        Cell::Str(s) => {
            if s.contains([',', '"', '\n']) {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.clone()
            }
        }
        Cell::Int(d) => d.clone(),
        Cell::Real(x) => fmt_real(*x),
        Cell::Null => String::new(),
    }
}

fn push_json_str(out: &mut String, s: &str) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}
