use serde_json::{Map, Value};

use crate::args::Format;

pub const UNITS: &str = "natural units hbar = c = 1; energies and momenta in 1/length";

/// Significant digits in serialized numbers.
pub const DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

/// A result table with metadata.
#[derive(Debug, Clone)]
pub struct Table {
    pub command: &'static str,
    pub meta: Vec<(String, Value)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &'static str, columns: &[&'static str]) -> Self {
        Self { command, meta: Vec::new(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn meta(&mut self, key: &str, value: Value) {
        self.meta.push((key.to_string(), value));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# command: {}\n", self.command));
        out.push_str(&format!("# units: {UNITS}\n"));
        for (k, v) in &self.meta {
            let text = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("# {k}: {text}\n"));
        }
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            writer.write_record(row.iter().map(csv_cell)).expect("in-memory write");
        }
        let bytes = writer.into_inner().expect("in-memory flush");
        out.push_str(&String::from_utf8(bytes).expect("utf-8 output"));
        out
    }

    pub fn to_value(&self) -> Value {
        let mut meta = Map::new();
        meta.insert("command".into(), Value::String(self.command.into()));
        meta.insert("units".into(), Value::String(UNITS.into()));
        meta.insert("columns".into(), Value::Array(self.columns.iter().map(|c| Value::String((*c).into())).collect()));
        for (k, v) in &self.meta {
            meta.insert(k.clone(), v.clone());
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (c, cell) in self.columns.iter().zip(row) {
                    obj.insert((*c).into(), json_cell(cell));
                }
                Value::Object(obj)
            })
            .collect();
        let mut top = Map::new();
        top.insert("meta".into(), Value::Object(meta));
        top.insert("rows".into(), Value::Array(rows));
        Value::Object(top)
    }

    fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("serializable");
        s.push('\n');
        s
    }
}

fn csv_cell(cell: &Cell) -> String {
    match cell {
        Cell::Num(x) => format_number(*x),
        Cell::Int(i) => i.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Bool(b) => b.to_string(),
    }
}

fn json_cell(cell: &Cell) -> Value {
    match cell {
        Cell::Num(x) => number(*x),
        Cell::Int(i) => Value::from(*i),
        Cell::Text(s) => Value::String(s.clone()),
        Cell::Bool(b) => Value::Bool(*b),
    }
}

/// `x` rounded to [`DIGITS`] significant digits.
pub fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", DIGITS - 1, x).parse().expect("formatted float parses")
}

/// JSON number rounded to 12 significant digits; non-finite values become null.
pub fn number(x: f64) -> Value {
    if x.is_finite() {
        Value::from(round_significant(x))
    } else {
        Value::Null
    }
}

/// Shortest `%g`-style rendering with 12 significant digits.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", DIGITS - 1, x);
    let (mantissa, exponent) = sci.split_once('e').expect("scientific format");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if (-5..DIGITS as i32).contains(&exponent) {
        let decimals = (DIGITS as i32 - 1 - exponent).max(0) as usize;
        let rounded: f64 = sci.parse().expect("formatted float parses");
        trim_zeros(format!("{rounded:.decimals$}"))
    } else {
        format!("{}e{exponent}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
