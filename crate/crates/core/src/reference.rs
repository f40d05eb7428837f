//! Literature comparison tables shipped as static data.
//!
//! Cells are reproduced character for character, including the en dashes
//! and tildes of the source.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Table {
    pub number: u32,
    pub caption: &'static str,
    /// Device columns, as headed in the source.
    pub columns: &'static [&'static str],
    /// `(parameter, cells)` with one cell per column.
    pub rows: &'static [(&'static str, &'static [&'static str])],
}

pub static TABLE_1: Table = Table {
    number: 1,
    caption: "Table 1. Comparison of amplifier parameters at cryogenic temperatures. CMOS and HEMT amplifiers at 4.2 K, along with JPAs at 10 mK, are evaluated in terms of gain, bandwidth, P_{1dB} , noise figure, power consumption, size, and scalability.",
    columns: &["CMOS (4.2 K) [37-49]", "HEMT (4.2 K) [20-36]", "JPA (10 mK) [3-10]"],
    rows: &[
        ("Gain", &["10-20 dB", "20-30 dB", "20-25 dB"]),
        ("Bandwidth", &["~1-4 GHz", "~4 GHz", "10-40 MHz"]),
        ("P_{1dB}", &["-20 to -10 dBm", "0 to 10 dBm", "-125 to -108 dBm"]),
        ("Noise Figure", &["0.6~0.9 dB", "~0.02 dB", "~0.0065 dB"]),
        ("Power Consumption", &["Milliwatts", "Tens of milliwatts", "Microwatts"]),
        ("Size", &["Very compact", "Moderate", "Larger, bulkier"]),
        ("Scalability", &["Highly scalable", "Moderately scalable", "Limited scalability"]),
    ],
};

pub static TABLE_2: Table = Table {
    number: 2,
    caption: "Table 2: Comparison of key performance parameters for four JPA architectures. Data are based on theoretical modeling, simulation, and experimental literature. The modified BJPA demonstrates a frequency-selective gain profile suitable for multiplexed quantum readout, while the BJPA shows superior linearity and gain efficiency compared to traditional designs.",
    columns: &["Single JJ JPA [71-79]", "Arrayed JJ JPA [80-87]", "BJPA [13]", "Modified BJPA [88]"],
    rows: &[
        ("Gain", &["20–25 dB typical", "11–31 dB depending on design", "~25 dB simulated", "~25 dB with frequency-selective peaks across C-band (comb-like structure)"]),
        ("Bandwidth", &["Narrow (typically 10–50 MHz)", "Very broad for JTWPAs", "Tunable across C-band (~4–8 GHz)", "Tunable; structured comb profile across C-band (~4–8 GHz); not flat but engineered for selective frequency gain"]),
        ("P_{1dB}", &["–115 to –133 dBm", "~–125 to –95 dBm (distributed 1000-JJ JPA)", "~–92 dBm (N = 70, M = 8); improved by Quarton architecture", "Variable; better than ~–115 dBm"]),
        ("Noise Figure", &["Near quantum limit (~1–2× SQL)", "Near quantum limit", "Near quantum limit due to high coherence of Blochonium", "Low noise; harmonic purity maintained with low 3rd-order output modes"]),
        ("Advantages", &["Simple fabrication, well understood, low noise", "Higher gain-bandwidth product, more robust power handling, tunability via array design", "High gain with fewer junctions, improved linearity and power handling, compact design, tunable nonlinearity", "Selective gain structure ideal for frequency-multiplexed qubit readout; suppresses qubit leakage into readout chain"]),
        ("Disadvantages", &["Narrow bandwidth, limited power handling, pump leakage challenges", "Fabrication complexity, phase matching sensitivity, higher power demand in large arrays", "Requires precise control over junction parameters, new fabrication challenges with Blochonium", "Complex impedance matching; sharp gain dips between peaks require careful frequency planning"]),
    ],
};
pub fn table(number: u32) -> Result<&'static Table> {
    match number {
        1 => Ok(&TABLE_1),
        2 => Ok(&TABLE_2),
        n => Err(Error::invalid("table", format!("no table {n}; available: 1, 2"))),
    }
}

/// Column heading without the trailing citation, e.g. `JPA (10 mK)`.
fn short(column: &str) -> &str {
    column.split(" [").next().unwrap_or(column).trim()
}

/// A device column matches when the query is a leading word sequence of its
/// heading, so `JPA` selects `JPA (10 mK)` and `BJPA` does not select
/// `Modified BJPA`.
fn column_matches(column: &str, query: &str) -> bool {
    let (c, q) = (column.to_lowercase(), query.trim().to_lowercase());
    !q.is_empty() && (c == q || short(&c) == q || c.strip_prefix(&q).is_some_and(|rest| rest.starts_with([' ', '('])))
}

fn parameter_matches(parameter: &str, query: &str) -> bool {
    let norm = |s: &str| s.to_lowercase().replace(['_', '{', '}', ' '], "");
    norm(parameter) == norm(query)
}

impl Table {
    pub fn column_index(&self, query: &str) -> Option<usize> {
        self.columns.iter().position(|c| column_matches(c, query))
    }

    pub fn parameter_index(&self, query: &str) -> Option<usize> {
        self.rows.iter().position(|r| parameter_matches(r.0, query))
    }

    /// Cell lookup by device and parameter; the two may be given in either
    /// order.
    pub fn cell(&self, a: &str, b: &str) -> Result<&'static str> {
        let hit = |device: &str, parameter: &str| Some(self.rows[self.parameter_index(parameter)?].1[self.column_index(device)?]);
        hit(a, b).or_else(|| hit(b, a)).ok_or_else(|| {
            Error::invalid(
                "reference",
                format!(
                    "no cell for `{a}` / `{b}` in table {}; devices: {}; parameters: {}",
                    self.number,
                    self.columns.iter().map(|c| short(c)).collect::<Vec<_>>().join(", "),
                    self.rows.iter().map(|r| r.0).collect::<Vec<_>>().join(", ")
                ),
            )
        })
    }

    pub fn device_row(&self, device: &str) -> Result<Vec<(&'static str, &'static str)>> {
        let k = self
            .column_index(device)
            .ok_or_else(|| Error::invalid("row", format!("no device `{device}` in table {}", self.number)))?;
        Ok(self.rows.iter().map(|r| (r.0, r.1[k])).collect())
    }

    pub fn parameter_row(&self, parameter: &str) -> Result<Vec<(&'static str, &'static str)>> {
        let k = self
            .parameter_index(parameter)
            .ok_or_else(|| Error::invalid("column", format!("no parameter `{parameter}` in table {}", self.number)))?;
        Ok(self.columns.iter().copied().zip(self.rows[k].1.iter().copied()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_checks() {
        assert_eq!(TABLE_1.cell("JPA", "Gain").unwrap(), "20-25 dB");
        assert_eq!(TABLE_1.cell("Noise Figure", "JPA").unwrap(), "~0.0065 dB");
        assert_eq!(TABLE_2.cell("Single JJ", "P_{1dB}").unwrap(), "\u{2013}115 to \u{2013}133 dBm");
        assert_eq!(TABLE_2.cell("Single JJ JPA", "P1dB").unwrap(), "\u{2013}115 to \u{2013}133 dBm");
        assert_eq!(TABLE_2.cell("BJPA", "Gain").unwrap(), "~25 dB simulated");
    }

    #[test]
    fn tables_are_rectangular() {
        for t in [&TABLE_1, &TABLE_2] {
            for r in t.rows {
                assert_eq!(r.1.len(), t.columns.len(), "{}", r.0);
            }
        }
    }

    #[test]
    fn unknown_keys_list_alternatives() {
        let err = TABLE_1.cell("JPA", "Latency").unwrap_err().to_string();
        assert!(err.contains("Noise Figure") && err.contains("HEMT"), "{err}");
        assert!(table(3).is_err());
    }
}
