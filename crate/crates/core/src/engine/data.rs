use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sequence fidelities recorded at one length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthData {
    pub length: usize,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub fidelities: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation over `sqrt(#sequences)`; 0 for a single sequence.
    pub stderr: f64,
    /// Unbiased sample variance of the sequence fidelities.
    pub variance: f64,
}

impl LengthData {
    pub fn new(length: usize, fidelities: Vec<f64>) -> Self {
        let k = fidelities.len();
        let mean = neumaier_sum(fidelities.iter().copied()) / k as f64;
        let variance = if k > 1 {
            neumaier_sum(fidelities.iter().map(|f| (f - mean) * (f - mean))) / (k - 1) as f64
        } else {
            0.0
        };
        Self {
            length,
            mean,
            stderr: (variance / k as f64).sqrt(),
            variance,
            fidelities,
        }
    }

    /// Summary-only row, for data whose individual fidelities are unknown.
    pub fn from_summary(length: usize, mean: f64, stderr: f64) -> Self {
        Self {
            length,
            fidelities: Vec::new(),
            mean,
            stderr,
            variance: f64::NAN,
        }
    }
}

/// Per-length sequence fidelities of an RB sweep, ordered by length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayData {
    lengths: Vec<LengthData>,
}

impl DecayData {
    pub fn from_fidelities<I>(rows: I) -> Self
    where
        I: IntoIterator<Item = (usize, Vec<f64>)>,
    {
        Self::from_rows(rows.into_iter().map(|(l, f)| LengthData::new(l, f)).collect())
    }

    /// Sorts by length. Rows with repeated lengths are kept separately.
    pub fn from_rows(mut rows: Vec<LengthData>) -> Self {
        rows.sort_by_key(|r| r.length);
        Self { lengths: rows }
    }

    pub fn lengths(&self) -> &[LengthData] {
        &self.lengths
    }

    pub fn distinct_lengths(&self) -> usize {
        let mut v: Vec<usize> = self.lengths.iter().map(|r| r.length).collect();
        v.dedup();
        v.len()
    }

    /// `length,sequence_index,fidelity` with full round-trip precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("length,sequence_index,fidelity\n");
        for row in &self.lengths {
            for (i, f) in row.fidelities.iter().enumerate() {
                writeln!(out, "{},{},{:?}", row.length, i, f).unwrap();
            }
        }
        out
    }

    /// Parses the format written by [`to_csv`](Self::to_csv). Extra trailing
    /// columns are ignored; the header must start with the three fixed names.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::InvalidConfig("empty CSV".into()))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols.len() < 3 || cols[..3] != ["length", "sequence_index", "fidelity"] {
            return Err(Error::InvalidConfig(format!(
                "CSV header must start with length,sequence_index,fidelity, got {header:?}"
            )));
        }
        let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let bad = |what: &str| Error::InvalidConfig(format!("CSV line {}: {what}", lineno + 2));
            let mut parts = line.split(',').map(str::trim);
            let length: usize = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad("bad length"))?;
            parts.next().ok_or_else(|| bad("missing sequence_index"))?;
            let f: f64 = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad("bad fidelity"))?;
            if !(0.0..=1.0).contains(&f) {
                return Err(bad("fidelity outside [0, 1]"));
            }
            match rows.iter_mut().find(|(l, _)| *l == length) {
                Some((_, v)) => v.push(f),
                None => rows.push((length, vec![f])),
            }
        }
        if rows.is_empty() {
            return Err(Error::InvalidConfig("CSV has no data rows".into()));
        }
        Ok(Self::from_fidelities(rows))
    }

    /// Per-length mean, stderr and variance, without the raw fidelities.
    pub fn summary(&self) -> Vec<LengthData> {
        self.lengths
            .iter()
            .map(|r| LengthData {
                fidelities: Vec::new(),
                ..r.clone()
            })
            .collect()
    }
}

/// Compensated sum, independent of how the terms were produced.
pub(crate) fn neumaier_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}
