//! Tabular output: CSV and JSON with numbers at 12 significant digits, and a
//! CSV reader for round trips.

use std::fmt;
use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::{Error, Result};

pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    /// Empty in CSV, `null` in JSON.
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_owned())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Num(x) => Some(x),
            Cell::Int(i) => Some(i as f64),
            _ => None,
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => format_number(*x)
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map_or(Value::Null, Value::Number),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
            Cell::Missing => Value::Null,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Num(x) => f.write_str(&format_number(*x)),
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Bool(b) => write!(f, "{b}"),
            Cell::Missing => Ok(()),
        }
    }
}

/// `%.12g`-style formatting: fixed notation for exponents in `[-5, 12)`,
/// scientific otherwise, trailing zeros removed.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_owned()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(Error::Dimension(format!(
                "row of {} cells for {} columns",
                row.len(),
                self.header.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_string))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv of UTF-8 cells"))
    }

    /// A JSON array with one flat object per row, keys in header order.
    pub fn to_json(&self) -> String {
        let objects: Vec<String> = self
            .rows
            .iter()
            .map(|row| {
                let map: Map<String, Value> = self
                    .header
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Cell::json))
                    .collect();
                Value::Object(map).to_string()
            })
            .collect();
        if objects.is_empty() {
            "[]\n".into()
        } else {
            format!("[\n{}\n]\n", objects.join(",\n"))
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(self.to_json()),
        }
    }

    /// Writes to `path`, or to `out` when no path is given.
    pub fn emit(&self, format: Format, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
        let text = self.render(format)?;
        match path {
            Some(p) => std::fs::write(p, text)?,
            None => out.write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

/// Parses CSV produced by [`Table::to_csv`]. Cells that parse as numbers
/// become [`Cell::Num`], `true`/`false` become [`Cell::Bool`], empty cells
/// [`Cell::Missing`] and everything else [`Cell::Text`].
pub fn read_csv(text: &str) -> Result<Table> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let mut table = Table::new(r.headers()?.iter());
    for record in r.records() {
        let record = record?;
        table.push(record.iter().map(parse_cell).collect())?;
    }
    Ok(table)
}

fn parse_cell(s: &str) -> Cell {
    if s.is_empty() {
        return Cell::Missing;
    }
    match s {
        "true" => return Cell::Bool(true),
        "false" => return Cell::Bool(false),
        _ => {}
    }
    match s.parse::<f64>() {
        Ok(x) => Cell::Num(x),
        Err(_) => Cell::Text(s.to_owned()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_number(0.501_955_000_123_456_7), "0.501955000123");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(-0.25), "-0.25");
        assert_eq!(format_number(1e-7), "1e-7");
        assert_eq!(format_number(1.234_567_890_123_4e-7), "1.23456789012e-7");
        assert_eq!(format_number(123_456.789), "123456.789");
        assert_eq!(format_number(2e15), "2e15");
        assert_eq!(format_number(0.0001), "0.0001");
        assert_eq!(format_number(f64::NAN), "nan");
        assert_eq!(format_number(0.999_999_999_999_9), "1");
    }

    #[test]
    fn csv_round_trip() {
        let mut t = Table::new(["eta", "kind", "alpha", "ok", "n"]);
        t.push(vec![
            0.25.into(),
            "max".into(),
            None.into(),
            true.into(),
            3usize.into(),
        ])
        .unwrap();
        t.push(vec![
            (1.0 / 3.0).into(),
            "a,b".into(),
            Some(0.5).into(),
            false.into(),
            0usize.into(),
        ])
        .unwrap();
        let csv = t.to_csv().unwrap();
        assert!(csv.starts_with("eta,kind,alpha,ok,n\n"));
        assert!(!csv.contains('\r'));
        assert!(csv.ends_with('\n'));
        let back = read_csv(&csv).unwrap();
        assert_eq!(back.header(), t.header());
        assert_eq!(back.rows()[0][2], Cell::Missing);
        assert_eq!(back.rows()[1][1], Cell::Text("a,b".into()));
        let x = back.rows()[1][0].as_f64().unwrap();
        assert!((x - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(read_csv(&back.to_csv().unwrap()).unwrap(), back);
        assert!(t.push(vec![1.0.into()]).is_err());
    }

    #[test]
    fn json_objects_in_header_order() {
        let mut t = Table::new(["z", "a"]);
        t.push(vec![0.1.into(), Cell::Missing]).unwrap();
        t.push(vec![f64::NAN.into(), "x".into()]).unwrap();
        let json = t.to_json();
        assert_eq!(
            json,
            "[\n{\"z\":0.1,\"a\":null},\n{\"z\":null,\"a\":\"x\"}\n]\n"
        );
        let parsed: Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed.as_array().unwrap().len(), 2);
        assert_eq!(Table::new(["a"]).to_json(), "[]\n");
    }
}
