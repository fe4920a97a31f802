//! JSON with scientific notation, CSV at full precision, and display tables.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

/// Pretty JSON whose floats are printed as shortest round-trip
/// scientific notation; non-finite values become `null`.
struct Scientific<'a>(PrettyFormatter<'a>);

impl Formatter for Scientific<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        if v.is_finite() {
            write!(w, "{v:e}")
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(v))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn write_json<T: Serialize, W: Write>(value: &T, mut out: W) -> io::Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Scientific(PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(io::Error::other)?;
    out.write_all(b"\n")
}

/// 17 significant digits.
pub fn full(v: f64) -> String {
    format!("{v:.16e}")
}

/// Header plus rows, comma separated, LF endings.
pub fn write_csv<W: Write>(mut out: W, header: &[&str], rows: &[Vec<f64>]) -> io::Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| full(v)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Display quantity in a unit: `scale` converts from SI.
#[derive(Debug, Clone, Copy)]
pub enum Unit {
    None,
    Joule,
    Picowatt,
    Millisecond,
    MicronPerSecond,
    Micron,
    MicronSquaredPerSecond,
    Percent,
}

impl Unit {
    fn scale(self) -> f64 {
        match self {
            Unit::None | Unit::Joule => 1.0,
            Unit::Picowatt => 1e12,
            Unit::Millisecond => 1e3,
            Unit::MicronPerSecond | Unit::Micron => 1e6,
            Unit::MicronSquaredPerSecond => 1e12,
            Unit::Percent => 1e2,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Unit::None => "",
            Unit::Joule => "J",
            Unit::Picowatt => "pW",
            Unit::Millisecond => "ms",
            Unit::MicronPerSecond => "µm/s",
            Unit::Micron => "µm",
            Unit::MicronSquaredPerSecond => "µm²/s",
            Unit::Percent => "%",
        }
    }
}

/// Name, SI value and display unit per row.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub title: String,
    rows: Vec<(String, f64, Unit)>,
}

impl Table {
    pub fn new(title: impl Into<String>) -> Self {
        Table {
            title: title.into(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, name: impl Into<String>, si: f64, unit: Unit) -> &mut Self {
        self.rows.push((name.into(), si, unit));
        self
    }

    pub fn render<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.title)?;
        let width = self.rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0);
        for (name, si, unit) in &self.rows {
            let v = si * unit.scale();
            let shown = if matches!(unit, Unit::Percent) || (v.abs() >= 0.01 && v.abs() < 1e4) {
                format!("{v:.4}")
            } else {
                format!("{v:.3e}")
            };
            let pad = width - name.chars().count();
            let line = format!("  {name}{:pad$}  {shown} {}", "", unit.symbol());
            writeln!(out, "{}", line.trim_end())?;
        }
        Ok(())
    }

    /// `quantity,value` at full SI precision.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "quantity,value")?;
        for (name, si, _) in &self.rows {
            writeln!(out, "{},{}", name.replace(',', ";"), full(*si))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Sample {
        a: f64,
        b: Vec<f64>,
        c: f64,
    }

    #[test]
    fn json_floats_are_scientific_and_round_trip() {
        let s = Sample {
            a: 2.5e-3,
            b: vec![1.0, 1.483_201_234_567_89e-16],
            c: f64::NAN,
        };
        let mut buf = Vec::new();
        write_json(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("\"a\": 2.5e-3"), "{text}");
        assert!(text.contains("1e0") && text.contains("null"));
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["b"][1].as_f64().unwrap(), 1.483_201_234_567_89e-16);
    }

    #[test]
    fn csv_keeps_seventeen_digits() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &["x", "y"], &[vec![0.1, 1.0 / 3.0]]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let line = text.lines().nth(1).unwrap();
        let back: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(back, vec![0.1, 1.0 / 3.0]);
        assert!(!text.contains('\r'));
    }

    #[test]
    fn table_uses_display_units() {
        let mut t = Table::new("demo");
        t.row("power", 4e-15, Unit::Picowatt).row("time", 9.87e-3, Unit::Millisecond);
        let mut buf = Vec::new();
        t.render(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("4.000e-3 pW") && text.contains("9.8700 ms"), "{text}");
    }
}
