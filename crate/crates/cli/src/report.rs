//! CSV and JSON report rows.

use serde::{Deserialize, Serialize};

pub const CSV_HEADER: [&str; 9] = [
    "state_id",
    "n",
    "grouping",
    "C",
    "Ca",
    "tau",
    "residual",
    "classification",
    "seed",
];

const SIGNIFICANT: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub state_id: String,
    pub n: usize,
    pub grouping: String,
    #[serde(rename = "C")]
    pub concurrence: f64,
    #[serde(rename = "Ca")]
    pub coa: f64,
    pub tau: f64,
    pub residual: f64,
    pub classification: String,
    pub seed: Option<u64>,
}

impl ReportRow {
    fn rounded(&self) -> ReportRow {
        ReportRow {
            concurrence: round_sig(self.concurrence),
            coa: round_sig(self.coa),
            tau: round_sig(self.tau),
            residual: round_sig(self.residual),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `%g`-style rendering with 12 significant digits.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= SIGNIFICANT as i32 {
        format!("{}e{exp}", trim_fraction(mantissa))
    } else {
        let decimals = (SIGNIFICANT as i32 - 1 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

pub fn round_sig(x: f64) -> f64 {
    format_float(x).parse().unwrap_or(x)
}

pub fn to_csv(rows: &[ReportRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.state_id.clone(),
            r.n.to_string(),
            r.grouping.clone(),
            format_float(r.concurrence),
            format_float(r.coa),
            format_float(r.tau),
            format_float(r.residual),
            r.classification.clone(),
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn to_json(rows: &[ReportRow]) -> String {
    let rounded: Vec<ReportRow> = rows.iter().map(ReportRow::rounded).collect();
    let mut out = serde_json::to_string_pretty(&rounded).expect("plain data");
    out.push('\n');
    out
}

pub fn emit_report(rows: &[ReportRow], format: Format) -> String {
    match format {
        Format::Csv => to_csv(rows),
        Format::Json => to_json(rows),
    }
}

pub fn parse_csv(text: &str) -> Result<Vec<ReportRow>, csv::Error> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect()
}

pub fn parse_json(text: &str) -> Result<Vec<ReportRow>, serde_json::Error> {
    serde_json::from_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ghz_row() -> ReportRow {
        ReportRow {
            state_id: "ghz".into(),
            n: 2,
            grouping: "(0;1)".into(),
            concurrence: 0.0,
            coa: 1.0,
            tau: 1.0,
            residual: 0.0,
            classification: "degenerate".into(),
            seed: None,
        }
    }

    #[test]
    fn empty_report_is_header_only() {
        assert_eq!(
            to_csv(&[]),
            "state_id,n,grouping,C,Ca,tau,residual,classification,seed\n"
        );
    }

    #[test]
    fn ghz_row_prints_exact_values() {
        let csv = to_csv(&[ghz_row()]);
        assert!(csv
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("ghz,2,(0;1),0,1,1,"));
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_float(2.0 / 3.0), "0.666666666667");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(-0.0), "0");
        assert_eq!(format_float(123456.0), "123456");
        assert_eq!(format_float(3.5e-14), "3.5e-14");
        assert_eq!(format_float(1e-5), "0.00001");
        assert_eq!(format_float(9.9999999999999), "10");
        assert_eq!(format_float(2.5e13), "2.5e13");
        assert_eq!(format_float(std::f64::consts::PI), "3.14159265359");
    }

    #[test]
    fn csv_and_json_decode_to_equal_rows() {
        let rows = vec![
            ghz_row(),
            ReportRow {
                state_id: "w, with comma".into(),
                n: 3,
                grouping: "(1;2)".into(),
                concurrence: 2.0 / 3.0,
                coa: 2.0 / 3.0,
                tau: 1.234e-9,
                residual: 4.4e-16,
                classification: "right".into(),
                seed: Some(7),
            },
        ];
        let from_csv = parse_csv(&to_csv(&rows)).unwrap();
        let from_json = parse_json(&to_json(&rows)).unwrap();
        assert_eq!(from_csv, from_json);
        assert_eq!(from_csv[1].state_id, "w, with comma");
        assert_eq!(from_csv[1].seed, Some(7));
    }
}
