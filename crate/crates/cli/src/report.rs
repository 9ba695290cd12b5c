//! Output documents and their two renderings.

use nfib_core::ratio::ClaimEvidence;
use nfib_core::ApproxComplex;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: &str = "1.0";

/// Short form of a claim verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Finding {
    pub claim: String,
    pub status: String,
    pub note: Option<String>,
    /// Batch record the finding belongs to, for batch commands.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record: Option<usize>,
}

impl Finding {
    pub fn from_evidence(ev: &ClaimEvidence, record: Option<usize>) -> Self {
        Finding {
            claim: format!("{:?}", ev.claim),
            status: format!("{:?}", ev.status),
            note: ev.note.clone(),
            record,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportDocument {
    pub schema_version: &'static str,
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub findings: Vec<Finding>,
}

impl ReportDocument {
    pub fn new(command: &str, inputs: Value, results: Value, findings: Vec<Finding>) -> Self {
        ReportDocument { schema_version: SCHEMA_VERSION, command: command.into(), inputs, results, findings }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report documents always serialize");
        s.push('\n');
        s
    }
}

/// Rounds to 12 significant digits, dropping trailing zeros.
pub fn sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn sig_complex(z: ApproxComplex) -> String {
    if z.im == 0.0 {
        return sig(z.re);
    }
    let im = if z.im.abs() == 1.0 { String::new() } else { sig(z.im.abs()) };
    if z.re == 0.0 {
        let sign = if z.im < 0.0 { "-" } else { "" };
        return format!("{sign}{im}i");
    }
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{}{sign}{im}i", sig(z.re))
}

pub fn opt_complex(z: Option<ApproxComplex>) -> String {
    z.map(sig_complex).unwrap_or_else(|| "-".into())
}

/// Plain-text output: `key: value` lines followed by aligned tables.
#[derive(Default)]
pub struct Table {
    out: String,
}

impl Table {
    pub fn new() -> Self {
        Table::default()
    }

    pub fn field(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.out.push_str(&format!("{key}: {value}\n"));
        self
    }

    pub fn rows(&mut self, headers: &[&str], rows: &[Vec<String>]) -> &mut Self {
        let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
        for row in rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        if !self.out.is_empty() {
            self.out.push('\n');
        }
        let line = |cells: Vec<&str>| {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, &w)| format!("{c:>w$}")).collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        self.out.push_str(&line(headers.to_vec()));
        self.out.push_str(&line(widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>().iter().map(|s| s.as_str()).collect()));
        for row in rows {
            self.out.push_str(&line(row.iter().map(|s| s.as_str()).collect()));
        }
        self
    }

    pub fn finish(&self) -> String {
        self.out.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig(1.618033988749895), "1.61803398875");
        assert_eq!(sig(2.0), "2");
        assert_eq!(sig(-0.5), "-0.5");
        assert_eq!(sig(1234567.0), "1234567");
        assert_eq!(sig(1e-9), "1e-9");
        assert_eq!(sig(6.02214076e23), "6.02214076e23");
        assert_eq!(sig(f64::INFINITY), "inf");
        assert_eq!(sig_complex(ApproxComplex::new(1.0, -0.5)), "1-0.5i");
        assert_eq!(sig_complex(ApproxComplex::new(0.0, 1.0)), "i");
    }

    #[test]
    fn table_layout() {
        let mut t = Table::new();
        t.field("mode", "exact").rows(&["k", "F_k"], &[vec!["0".into(), "1".into()], vec!["10".into(), "89".into()]]);
        assert_eq!(t.finish(), "mode: exact\n\n k  F_k\n--  ---\n 0    1\n10   89\n");
    }
}
