//! Long-format result tables.

use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq)]
pub struct Column {
    pub name: String,
    /// Printed without a fractional part.
    pub integer: bool,
}

/// One value for one (key tuple, method, quantity).
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub keys: Vec<f64>,
    pub method: String,
    pub quantity: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            columns: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn real(mut self, name: &str) -> Self {
        self.columns.push(Column {
            name: name.to_string(),
            integer: false,
        });
        self
    }

    pub fn int(mut self, name: &str) -> Self {
        self.columns.push(Column {
            name: name.to_string(),
            integer: true,
        });
        self
    }

    pub fn reals(mut self, names: &[String]) -> Self {
        for n in names {
            self = self.real(n);
        }
        self
    }

    pub fn push(&mut self, keys: &[f64], method: &str, quantity: &str, value: f64) {
        debug_assert_eq!(keys.len(), self.columns.len());
        self.rows.push(Row {
            keys: keys.to_vec(),
            method: method.to_string(),
            quantity: quantity.to_string(),
            value,
        });
    }

    /// Values of all rows matching `method` and `quantity`, in row order.
    pub fn select(&self, method: &str, quantity: &str) -> Vec<(&[f64], f64)> {
        self.rows
            .iter()
            .filter(|r| r.method == method && r.quantity == quantity)
            .map(|r| (r.keys.as_slice(), r.value))
            .collect()
    }

    pub fn values(&self, method: &str, quantity: &str) -> Vec<f64> {
        self.select(method, quantity).into_iter().map(|r| r.1).collect()
    }

    /// The single value for `method`/`quantity`, if there is exactly one.
    pub fn scalar(&self, method: &str, quantity: &str) -> Option<f64> {
        match self.values(method, quantity).as_slice() {
            [v] => Some(*v),
            _ => None,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for c in &self.columns {
            s.push_str(&c.name);
            s.push(',');
        }
        s.push_str("method,quantity,value\n");
        for r in &self.rows {
            for (c, k) in self.columns.iter().zip(&r.keys) {
                if c.integer {
                    let _ = write!(s, "{},", *k as i64);
                } else {
                    let _ = write!(s, "{},", fmt_real(*k));
                }
            }
            let _ = writeln!(s, "{},{},{}", r.method, r.quantity, fmt_real(r.value));
        }
        s
    }
}

/// 17 significant digits, round-trip exact.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}
