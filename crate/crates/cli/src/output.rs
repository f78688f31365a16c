//! Deterministic CSV and JSON rendering. Every float is written with 17
//! significant digits.

use serde_json::{Map, Number, Value};

/// `x` with 17 significant digits, `nan`/`inf`/`-inf` otherwise.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn json_num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(num(x).parse::<Number>().expect("formatted float is valid JSON"))
    } else {
        Value::Null
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell<'a> {
    Num(f64),
    Int(usize),
    Text(&'a str),
    Empty,
}

impl Cell<'_> {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(t) if t.contains([',', '"', '\n']) => format!("\"{}\"", t.replace('"', "\"\"")),
            Cell::Text(t) => (*t).to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json_num(*x),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(t) => Value::from(*t),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell<'_> {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell<'_> {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

/// Column-oriented table rendered as CSV or as a JSON array of objects.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    rows: Vec<Vec<(String, Value)>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, cells: &[Cell<'_>]) {
        assert_eq!(cells.len(), self.header.len(), "row width");
        self.rows.push(cells.iter().map(|c| (c.csv(), c.json())).collect());
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<&str> = row.iter().map(|(c, _)| c.as_str()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let map: Map<String, Value> = self
                        .header
                        .iter()
                        .zip(row)
                        .map(|(h, (_, v))| ((*h).to_string(), v.clone()))
                        .collect();
                    Value::Object(map)
                })
                .collect(),
        )
    }
}

pub fn to_json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializing a JSON value");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(num(3.0), "3.0000000000000000e0");
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-0.25), "-2.5000000000000000e-1");
        assert_eq!(num(f64::NAN), "nan");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn json_numbers_keep_their_text() {
        let v = json_num(0.1);
        assert_eq!(serde_json::to_string(&v).unwrap(), "1.0000000000000001e-1");
        assert_eq!(json_num(f64::INFINITY), Value::Null);
    }

    #[test]
    fn csv_and_json_agree() {
        let mut t = Table::new(&["name", "x", "n"]);
        t.push(&[Cell::Text("a,b"), Cell::Num(1.5), Cell::Int(3)]);
        t.push(&[Cell::Text("c"), Cell::Empty, Cell::Int(4)]);
        assert_eq!(
            t.to_csv(),
            "name,x,n\n\"a,b\",1.5000000000000000e0,3\nc,,4\n"
        );
        let j = serde_json::to_string(&t.to_json()).unwrap();
        assert_eq!(j, r#"[{"n":3,"name":"a,b","x":1.5000000000000000e+0},{"n":4,"name":"c","x":null}]"#);
    }
}
