//! Run reports: per-N measure rows and certificates, as CSV or JSON.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::measures::{CorrelationReport, WellDistReport};
use crate::witness::{CollisionWitness, CorrelationCertificate};

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: &str = "N,order,value,ratio_value_over_N,M_star,D_star,mode";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureRow {
    #[serde(rename = "N")]
    pub n: usize,
    /// Correlation order, or `W` for well-distribution rows.
    pub order: String,
    pub value: u64,
    pub ratio_value_over_n: f64,
    #[serde(rename = "M_star")]
    pub m_star: usize,
    /// `d_1;…;d_k`, or `a;b` for well-distribution rows.
    #[serde(rename = "D_star")]
    pub d_star: String,
    pub mode: String,
}

impl From<&CorrelationReport> for MeasureRow {
    fn from(r: &CorrelationReport) -> Self {
        MeasureRow {
            n: r.n,
            order: r.order.to_string(),
            value: r.value,
            ratio_value_over_n: r.value as f64 / r.n as f64,
            m_star: r.m_star,
            d_star: r.d_star.joined(),
            mode: r.mode.as_str().into(),
        }
    }
}

impl From<&WellDistReport> for MeasureRow {
    fn from(r: &WellDistReport) -> Self {
        MeasureRow {
            n: r.n,
            order: "W".into(),
            value: r.value,
            ratio_value_over_n: r.value as f64 / r.n as f64,
            m_star: r.m_star,
            d_star: format!("{};{}", r.a_star, r.b_star),
            mode: "exact".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateEntry {
    /// Colliding words as found, before zero padding.
    pub words: Vec<String>,
    pub state: String,
    pub zeros: usize,
    pub scanned: usize,
    pub bound: usize,
    #[serde(flatten)]
    pub certificate: CorrelationCertificate,
    pub implied_n: String,
}

impl CertificateEntry {
    pub fn new(w: &CollisionWitness, state: String, c: CorrelationCertificate) -> Self {
        CertificateEntry {
            words: w
                .words
                .iter()
                .map(|u| u.iter().map(|d| d.to_string()).collect())
                .collect(),
            state,
            zeros: w.zeros,
            scanned: w.scanned,
            bound: w.bound,
            implied_n: c.implied_n().to_string(),
            certificate: c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputInfo {
    pub kind: String,
    pub name: String,
    pub sha256: String,
}

impl InputInfo {
    pub fn new(kind: &str, name: &str, bytes: &[u8]) -> Self {
        InputInfo {
            kind: kind.into(),
            name: name.into(),
            sha256: format!("{:x}", Sha256::digest(bytes)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub input: InputInfo,
    pub parameters: serde_json::Value,
    pub rows: Vec<MeasureRow>,
    pub certificates: Vec<CertificateEntry>,
    pub timing: Timing,
}

impl RunReport {
    pub fn new(command: &str, input: InputInfo, parameters: serde_json::Value) -> Self {
        RunReport {
            schema_version: SCHEMA_VERSION,
            tool: "seqlab",
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            input,
            parameters,
            rows: Vec::new(),
            certificates: Vec::new(),
            timing: Timing { elapsed_ms: 0.0 },
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:.6},{},{},{}\n",
                r.n, r.order, r.value, r.ratio_value_over_n, r.m_star, r.d_star, r.mode
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{correlation_profile, CorrelationOptions};
    use crate::source::sequence_preset;

    #[test]
    fn csv_rows() {
        let s = sequence_preset("constant").unwrap().generate(10).unwrap();
        let mut report = RunReport::new(
            "measure",
            InputInfo::new("preset", "constant", b"preset:constant"),
            serde_json::json!({}),
        );
        report.rows = correlation_profile(&s, 10, 2, &CorrelationOptions::default())
            .unwrap()
            .iter()
            .map(MeasureRow::from)
            .collect();
        let csv = report.to_csv();
        assert!(csv.starts_with(CSV_HEADER));
        assert!(csv.ends_with("10,2,9,0.900000,9,0;1,exact\n"));
        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(json["schema_version"], 1);
        assert_eq!(json["rows"][8]["D_star"], "0;1");
        assert_eq!(json["input"]["sha256"].as_str().unwrap().len(), 64);
    }
}
