//! Deterministic JSON/CSV emitters.
//!
//! Floating point is always written with 17 significant digits so identical
//! runs produce byte-identical artifacts; non-finite values become JSON
//! nulls. Every JSON document carries `"schema": "race-dist-lab/1"`.

use std::fmt::Write as _;

pub const SCHEMA: &str = "race-dist-lab/1";

/// 17-significant-digit rendering for JSON numbers (null if non-finite).
pub fn jnum(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

/// CSV rendering: same digits, literal inf/-inf/nan markers.
pub fn cnum(x: f64) -> String {
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

/// Minimal ordered JSON object builder.
pub struct JsonObj {
    buf: String,
    first: bool,
}

impl JsonObj {
    pub fn new() -> JsonObj {
        JsonObj {
            buf: String::from("{"),
            first: true,
        }
    }

    /// Object with the schema header already in place.
    pub fn with_schema() -> JsonObj {
        let mut o = JsonObj::new();
        o.raw("schema", &format!("\"{SCHEMA}\""));
        o
    }

    fn key(&mut self, k: &str) {
        if !self.first {
            self.buf.push(',');
        }
        self.first = false;
        let _ = write!(self.buf, "\"{k}\":");
    }

    pub fn raw(&mut self, k: &str, v: &str) -> &mut Self {
        self.key(k);
        self.buf.push_str(v);
        self
    }

    pub fn num(&mut self, k: &str, v: f64) -> &mut Self {
        self.raw(k, &jnum(v))
    }

    pub fn uint(&mut self, k: &str, v: u64) -> &mut Self {
        self.key(k);
        let _ = write!(self.buf, "{v}");
        self
    }

    pub fn str(&mut self, k: &str, v: &str) -> &mut Self {
        self.key(k);
        let _ = write!(self.buf, "\"{}\"", v.replace('\\', "\\\\").replace('"', "\\\""));
        self
    }

    pub fn num_array(&mut self, k: &str, vs: &[f64]) -> &mut Self {
        self.key(k);
        self.buf.push('[');
        for (i, &v) in vs.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            self.buf.push_str(&jnum(v));
        }
        self.buf.push(']');
        self
    }

    pub fn int_array(&mut self, k: &str, vs: &[i64]) -> &mut Self {
        self.key(k);
        self.buf.push('[');
        for (i, &v) in vs.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            let _ = write!(self.buf, "{v}");
        }
        self.buf.push(']');
        self
    }

    pub fn uint_array(&mut self, k: &str, vs: &[u64]) -> &mut Self {
        self.key(k);
        self.buf.push('[');
        for (i, &v) in vs.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            let _ = write!(self.buf, "{v}");
        }
        self.buf.push(']');
        self
    }

    pub fn finish(mut self) -> String {
        self.buf.push_str("}\n");
        self.buf
    }
}

/// CSV table with a fixed header.
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Csv {
        Csv {
            buf: format!("{}\n", header.join(",")),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_have_17_digits_and_are_stable() {
        assert_eq!(jnum(1.0), "1.0000000000000000e0");
        assert_eq!(jnum(f64::NAN), "null");
        assert_eq!(cnum(f64::INFINITY), "inf");
        let a = jnum(0.1 + 0.2);
        let b = jnum(0.1 + 0.2);
        assert_eq!(a, b);
    }

    #[test]
    fn object_layout() {
        let mut o = JsonObj::with_schema();
        o.uint("q", 4).num("v", 0.5).str("kind", "x");
        let s = o.finish();
        assert_eq!(
            s,
            "{\"schema\":\"race-dist-lab/1\",\"q\":4,\"v\":5.0000000000000000e-1,\"kind\":\"x\"}\n"
        );
    }
}
