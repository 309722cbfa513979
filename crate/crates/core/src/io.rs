//! JSON file formats. Every index written to disk is 1-based.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kacmoody::SchubertBlueprint;
use crate::ore::{CGLPresentation, OreError, PBWElement};
use crate::primes::{CglStructure, ChainReport, UReport};
use crate::qtorus::{FrameSpec, SkewExponentMatrix, TorusError};
use crate::seed::{ExchangeMatrix, QuantumSeed, SeedError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Ore(#[from] OreError),
    #[error(transparent)]
    Seed(#[from] SeedError),
    #[error(transparent)]
    Torus(#[from] TorusError),
}

fn invalid(msg: impl Into<String>) -> IoError {
    IoError::Invalid(msg.into())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffSpec {
    #[serde(rename = "char")]
    pub characteristic: u64,
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn check_char(p: u64) -> Result<(), IoError> {
    if p != 0 && !is_prime(p) {
        return Err(invalid(format!("characteristic {p} is not prime")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationFile {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default)]
    pub coeff: CoeffSpec,
    pub lambda_exp2: Vec<Vec<i64>>,
    pub lambda_k_exp2: Vec<i64>,
    /// Keyed `"k,j"` with `j < k`.
    #[serde(default)]
    pub delta: BTreeMap<String, PBWElement>,
    pub degrees: Vec<Vec<i64>>,
    #[serde(default)]
    pub labels: Vec<String>,
}

fn parse_pair(key: &str) -> Option<(usize, usize)> {
    let (a, b) = key.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

impl PresentationFile {
    pub fn from_presentation(p: &CGLPresentation) -> Self {
        PresentationFile {
            n: p.n(),
            coeff: CoeffSpec { characteristic: p.characteristic() },
            lambda_exp2: p.lambda().rows().to_vec(),
            lambda_k_exp2: p.lambda_k_all().to_vec(),
            delta: p.deltas().iter().map(|((k, j), d)| (format!("{},{}", k + 1, j + 1), d.clone())).collect(),
            degrees: p.degrees().to_vec(),
            labels: p.labels().to_vec(),
        }
    }

    pub fn to_presentation(&self) -> Result<CGLPresentation, IoError> {
        check_char(self.coeff.characteristic)?;
        if self.lambda_exp2.len() != self.n {
            return Err(invalid(format!("lambda_exp2 has {} rows, N = {}", self.lambda_exp2.len(), self.n)));
        }
        let lambda = SkewExponentMatrix::new(self.lambda_exp2.clone())?;
        let mut delta = BTreeMap::new();
        for (key, d) in &self.delta {
            let (k, j) = parse_pair(key).ok_or_else(|| invalid(format!("bad delta key {key:?}")))?;
            if j == 0 || k == 0 {
                return Err(invalid(format!("delta key {key:?} is not 1-based")));
            }
            delta.insert((k - 1, j - 1), d.clone());
        }
        let mut p = CGLPresentation::new(lambda, self.lambda_k_exp2.clone(), delta, self.degrees.clone())?;
        if self.coeff.characteristic != 0 {
            p = p.with_characteristic(self.coeff.characteristic);
        }
        if !self.labels.is_empty() {
            if self.labels.len() != self.n {
                return Err(invalid("labels need one entry per generator"));
            }
            p = p.with_labels(self.labels.clone());
        }
        Ok(p)
    }
}

/// A seed on disk. The blueprint fields are present only for blueprint output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedFile {
    pub n: usize,
    #[serde(default)]
    pub coeff: CoeffSpec,
    pub exp2: Vec<Vec<i64>>,
    pub degrees: Vec<Vec<i64>>,
    #[serde(default)]
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variables: Option<Vec<Option<PBWElement>>>,
    pub ex: Vec<usize>,
    #[serde(default)]
    pub inv: Vec<usize>,
    /// Rows of B̃, one entry per exchangeable column.
    pub entries: Vec<Vec<i64>>,
    #[serde(default)]
    pub symmetrizers: BTreeMap<String, i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exw: Option<Vec<usize>>,
    /// Doubled, like every other exponent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_scalars: Option<Vec<Vec<i64>>>,
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

fn zero_based(v: &[usize], n: usize, what: &str) -> Result<Vec<usize>, IoError> {
    v.iter()
        .map(|&i| {
            if (1..=n).contains(&i) {
                Ok(i - 1)
            } else {
                Err(invalid(format!("{what} index {i} out of range 1..{n}")))
            }
        })
        .collect()
}

impl SeedFile {
    pub fn from_seed(seed: &QuantumSeed) -> Self {
        let f = &seed.frame;
        let characteristic =
            f.variables.iter().flatten().flat_map(|v| v.terms().map(|(_, c)| c.characteristic())).max().unwrap_or(0);
        SeedFile {
            n: f.n(),
            coeff: CoeffSpec { characteristic },
            exp2: f.matrix.rows().to_vec(),
            degrees: f.degrees.clone(),
            labels: f.labels.clone(),
            variables: f.variables.iter().any(Option::is_some).then(|| f.variables.clone()),
            ex: one_based(seed.btilde.ex()),
            inv: one_based(&seed.inv),
            entries: seed.btilde.entries().to_vec(),
            symmetrizers: seed.symmetrizers.iter().map(|(k, d)| ((k + 1).to_string(), *d)).collect(),
            eta: None,
            exw: None,
            a_scalars: None,
        }
    }

    pub fn from_blueprint(bp: &SchubertBlueprint) -> Self {
        let n = bp.n();
        let seed = QuantumSeed {
            frame: FrameSpec::unrealized(bp.r_w.clone(), bp.degrees.clone()),
            btilde: bp.btilde.clone(),
            inv: vec![],
            symmetrizers: bp.symmetrizers.clone(),
        };
        let mut out = SeedFile::from_seed(&seed);
        out.labels = (1..=n).map(|i| format!("D{i}")).collect();
        out.eta = Some(bp.eta.iter().map(|e| e + 1).collect());
        out.exw = Some(one_based(&bp.exw));
        out.a_scalars = Some(bp.a_scalars.iter().map(|r| r.iter().map(|h| h.twice()).collect()).collect());
        out
    }

    pub fn to_seed(&self) -> Result<QuantumSeed, IoError> {
        let n = self.n;
        check_char(self.coeff.characteristic)?;
        if self.exp2.len() != n || self.degrees.len() != n {
            return Err(invalid(format!("exp2 and degrees need {n} rows")));
        }
        let matrix = SkewExponentMatrix::new(self.exp2.clone())?;
        let mut frame = FrameSpec::unrealized(matrix, self.degrees.clone());
        if !self.labels.is_empty() {
            if self.labels.len() != n {
                return Err(invalid("labels need one entry per variable"));
            }
            frame.labels = self.labels.clone();
        }
        if let Some(vars) = &self.variables {
            if vars.len() != n {
                return Err(invalid("variables need one entry per frame index"));
            }
            let p = self.coeff.characteristic;
            for (slot, v) in frame.variables.iter_mut().zip(vars) {
                *slot = match v {
                    Some(v) if v.n() != n && !v.is_zero() => return Err(invalid("variable has wrong monomial length")),
                    Some(v) if p != 0 => Some(v.with_characteristic(p)),
                    other => other.clone(),
                };
            }
        }
        let btilde = ExchangeMatrix::new(n, zero_based(&self.ex, n, "ex")?, self.entries.clone())?;
        let mut inv = zero_based(&self.inv, n, "inv")?;
        inv.sort_unstable();
        let mut symmetrizers = BTreeMap::new();
        for (k, d) in &self.symmetrizers {
            let k: usize = k.parse().map_err(|_| invalid(format!("bad symmetrizer key {k:?}")))?;
            symmetrizers.insert(zero_based(&[k], n, "symmetrizer")?[0], *d);
        }
        Ok(QuantumSeed { frame, btilde, inv, symmetrizers })
    }
}

/// Pretty JSON with a trailing newline; the byte-stable form used for every artifact.
pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("artifact types always serialize");
    s.push('\n');
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct CondRow {
    pub i: usize,
    pub m: usize,
    pub u: String,
    pub pi: String,
    pub required_exp2: i64,
    pub literal: bool,
    pub negated: bool,
}

impl CondRow {
    pub fn new(p: &CGLPresentation, r: &UReport) -> Self {
        CondRow {
            i: r.i + 1,
            m: r.m,
            u: p.show(&r.u),
            pi: r.pi.to_string(),
            required_exp2: r.required_exp2,
            literal: r.literal_pass,
            negated: r.negated_pass,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainRow {
    pub sigma: Vec<usize>,
    pub sigma2: Vec<usize>,
    pub k: usize,
    pub mutation: bool,
    pub passed: bool,
    pub message: Option<String>,
}

impl From<&ChainReport> for ChainRow {
    fn from(r: &ChainReport) -> Self {
        ChainRow {
            sigma: one_based(&r.sigma),
            sigma2: one_based(&r.sigma2),
            k: r.k + 1,
            mutation: r.mutation,
            passed: r.passed,
            message: r.mismatch.clone(),
        }
    }
}

/// The analysis report: level data, primes, and whatever checks were run.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub n: usize,
    pub eta: Vec<usize>,
    pub p: Vec<Option<usize>>,
    pub s: Vec<Option<usize>>,
    pub y: Vec<String>,
    pub ybar: Vec<String>,
    pub y_dump: Vec<PBWElement>,
    pub ybar_dump: Vec<PBWElement>,
    pub checks: BTreeMap<String, CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cond: Option<Vec<CondRow>>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub seeds: BTreeMap<String, SeedFile>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub chains: Vec<ChainRow>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub passed: bool,
    pub messages: Vec<String>,
}

impl CheckResult {
    pub fn new(messages: Vec<String>) -> Self {
        CheckResult { passed: messages.is_empty(), messages }
    }
}

impl Report {
    pub fn new(s: &CglStructure) -> Self {
        let p = &s.presentation;
        let e = &s.eta;
        let opt = |v: &Option<usize>| v.map(|i| i + 1);
        Report {
            n: s.n(),
            eta: e.eta.iter().map(|l| l + 1).collect(),
            p: e.pred.iter().map(opt).collect(),
            s: e.succ.iter().map(opt).collect(),
            y: e.y.iter().map(|y| p.show(y)).collect(),
            ybar: s.ybar.iter().map(|y| p.show(y)).collect(),
            y_dump: e.y.clone(),
            ybar_dump: s.ybar.clone(),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.values().all(|c| c.passed)
    }
}

/// The key used for a σ-seed in reports: the 1-based permutation.
pub fn sigma_key(sigma: &[usize]) -> String {
    one_based(sigma).iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kacmoody::preset;

    #[test]
    fn presentation_round_trip_is_byte_exact() {
        for name in ["b2-w1212", "lastex", "qweyl:2"] {
            let p = preset(name).unwrap().presentation;
            let text = to_json(&PresentationFile::from_presentation(&p));
            let file: PresentationFile = serde_json::from_str(&text).unwrap();
            let back = file.to_presentation().unwrap();
            assert_eq!(back, p);
            assert_eq!(to_json(&PresentationFile::from_presentation(&back)), text);
        }
    }

    #[test]
    fn characteristic_survives_round_trip() {
        let p = preset("lastex").unwrap().presentation.with_characteristic(3);
        let text = to_json(&PresentationFile::from_presentation(&p));
        assert!(text.contains("\"char\": 3"));
        let back: PresentationFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_presentation().unwrap().characteristic(), 3);
    }

    #[test]
    fn rejects_bad_input() {
        let bad = r#"{"N": 2, "lambda_exp2": [[0,1],[1,0]], "lambda_k_exp2": [0,0], "degrees": [[1],[1]]}"#;
        let f: PresentationFile = serde_json::from_str(bad).unwrap();
        assert!(f.to_presentation().is_err());
        let unknown = r#"{"N": 1, "lambda_exp2": [[0]], "lambda_k_exp2": [0], "degrees": [[1]], "extra": 1}"#;
        assert!(serde_json::from_str::<PresentationFile>(unknown).is_err());
        let composite =
            r#"{"N": 1, "coeff": {"char": 4}, "lambda_exp2": [[0]], "lambda_k_exp2": [0], "degrees": [[1]]}"#;
        let f: PresentationFile = serde_json::from_str(composite).unwrap();
        assert!(f.to_presentation().is_err());
    }
}
