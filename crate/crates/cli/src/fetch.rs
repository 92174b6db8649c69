//! Elliptic-curve local data from a public database, cached on disk.
//!
//! The remote body is untrusted. It must look like
//! `{"data": [{"prime": 11, "red": 1}, ...]}`, one entry per bad prime, with
//! `red` = 1, -1, 0 for split multiplicative, nonsplit multiplicative and
//! additive reduction.

use std::fs;
use std::path::{Path, PathBuf};

use iwasawa_core::padic::is_prime;
use iwasawa_core::rank::{EllipticLocalData, LocalRecord, Reduction};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const ENDPOINT_VAR: &str = "IWASAWA_CURVE_ENDPOINT";
pub const DEFAULT_ENDPOINT: &str = "https://www.lmfdb.org/api/ec_localdata/?lmfdb_label={label}&_format=json";

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FetchError {
    #[error("network access is disabled and {0} is not cached")]
    Disabled(String),
    #[error("curve {0} not found")]
    NotFound(String),
    #[error("unexpected payload: {0}")]
    SchemaDrift(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("cache error: {0}")]
    Cache(String),
    #[error("invalid label {0:?}")]
    BadLabel(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadPrime {
    pub prime: u64,
    pub reduction: Reduction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveLocalData {
    pub label: String,
    pub bad_primes: Vec<BadPrime>,
}

impl CurveLocalData {
    pub fn reduction_at(&self, prime: u64) -> Reduction {
        self.bad_primes.iter().find(|b| b.prime == prime).map_or(Reduction::Good, |b| b.reduction)
    }

    /// Local records over the given ramified primes of `L/K`.
    pub fn local_data(&self, p: u64, ramified: &[u64], torsion: &[u64], corank: u64) -> EllipticLocalData {
        let mut primes: Vec<u64> = ramified.to_vec();
        primes.extend(self.bad_primes.iter().map(|b| b.prime));
        primes.sort_unstable();
        primes.dedup();
        let records = primes
            .into_iter()
            .map(|q| LocalRecord {
                prime: q.to_string(),
                ramified_in_l: ramified.contains(&q),
                above_p: q == p,
                reduction: self.reduction_at(q),
                torsion_nontrivial: torsion.contains(&q),
            })
            .collect();
        EllipticLocalData { label: self.label.clone(), records, selmer_corank_k: corank }
    }
}

fn check_label(label: &str) -> Result<(), FetchError> {
    let ok = !label.is_empty()
        && label.len() <= 64
        && label.chars().all(|c| c.is_ascii_alphanumeric() || c == '.' || c == '-');
    if ok {
        Ok(())
    } else {
        Err(FetchError::BadLabel(label.into()))
    }
}

pub fn parse_payload(label: &str, body: &str) -> Result<CurveLocalData, FetchError> {
    let drift = |why: &str| FetchError::SchemaDrift(why.into());
    let v: Value = serde_json::from_str(body).map_err(|e| FetchError::SchemaDrift(e.to_string()))?;
    let rows = v.get("data").and_then(Value::as_array).ok_or_else(|| drift("missing data array"))?;
    if rows.is_empty() {
        return Err(FetchError::NotFound(label.into()));
    }
    let mut bad_primes = Vec::with_capacity(rows.len());
    for row in rows {
        let prime = row.get("prime").and_then(Value::as_u64).ok_or_else(|| drift("entry without integer prime"))?;
        if !is_prime(prime) {
            return Err(FetchError::SchemaDrift(format!("{prime} is not prime")));
        }
        let reduction = match row.get("red").and_then(Value::as_i64) {
            Some(1) => Reduction::SplitMultiplicative,
            Some(-1) => Reduction::NonsplitMultiplicative,
            Some(0) => Reduction::Additive,
            _ => return Err(FetchError::SchemaDrift(format!("reduction type at {prime}"))),
        };
        bad_primes.push(BadPrime { prime, reduction });
    }
    bad_primes.sort_by_key(|b| b.prime);
    bad_primes.dedup_by_key(|b| b.prime);
    Ok(CurveLocalData { label: label.into(), bad_primes })
}

#[derive(Debug, Clone)]
pub struct Fetcher {
    pub network: bool,
    pub cache_dir: Option<PathBuf>,
    pub endpoint: String,
}

impl Fetcher {
    /// Endpoint from the environment, falling back to the public default.
    pub fn new(network: bool, cache_dir: Option<PathBuf>) -> Self {
        let endpoint = std::env::var(ENDPOINT_VAR).unwrap_or_else(|_| DEFAULT_ENDPOINT.into());
        Self { network, cache_dir, endpoint }
    }

    fn cache_path(&self, label: &str) -> Option<PathBuf> {
        self.cache_dir.as_ref().map(|d| d.join(format!("{label}.json")))
    }

    fn read_cache(path: &Path) -> Result<Option<CurveLocalData>, FetchError> {
        match fs::read_to_string(path) {
            Ok(s) => serde_json::from_str(&s).map(Some).map_err(|e| FetchError::Cache(format!("{}: {e}", path.display()))),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(FetchError::Cache(e.to_string())),
        }
    }

    pub fn store(&self, data: &CurveLocalData) -> Result<(), FetchError> {
        check_label(&data.label)?;
        let Some(path) = self.cache_path(&data.label) else { return Ok(()) };
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| FetchError::Cache(e.to_string()))?;
        }
        let body = serde_json::to_string_pretty(data).map_err(|e| FetchError::Cache(e.to_string()))?;
        fs::write(&path, body).map_err(|e| FetchError::Cache(e.to_string()))
    }

    /// Cache first; the network is touched only when it is enabled and the
    /// label is not cached.
    pub fn fetch(&self, label: &str) -> Result<CurveLocalData, FetchError> {
        check_label(label)?;
        if let Some(path) = self.cache_path(label) {
            if let Some(hit) = Self::read_cache(&path)? {
                return Ok(hit);
            }
        }
        if !self.network {
            return Err(FetchError::Disabled(label.into()));
        }
        let url = self.endpoint.replace("{label}", label);
        let body = match ureq::get(&url).call() {
            Ok(resp) => resp.into_body().read_to_string().map_err(|e| FetchError::Transport(e.to_string()))?,
            Err(ureq::Error::StatusCode(404)) => return Err(FetchError::NotFound(label.into())),
            Err(e) => return Err(FetchError::Transport(e.to_string())),
        };
        let data = parse_payload(label, &body)?;
        self.store(&data)?;
        Ok(data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn payload_parsing() {
        let d = parse_payload("11.a2", r#"{"data": [{"prime": 11, "red": 1, "kod": "I5"}]}"#).unwrap();
        assert_eq!(d.bad_primes, vec![BadPrime { prime: 11, reduction: Reduction::SplitMultiplicative }]);
        assert_eq!(d.reduction_at(7), Reduction::Good);
        assert_eq!(parse_payload("x", r#"{"data": []}"#), Err(FetchError::NotFound("x".into())));
        assert!(matches!(parse_payload("x", r#"{"rows": []}"#), Err(FetchError::SchemaDrift(_))));
        assert!(matches!(parse_payload("x", r#"{"data": [{"prime": 12, "red": 1}]}"#), Err(FetchError::SchemaDrift(_))));
        assert!(matches!(parse_payload("x", r#"{"data": [{"prime": 5, "red": 7}]}"#), Err(FetchError::SchemaDrift(_))));
        assert!(matches!(parse_payload("x", "<html>"), Err(FetchError::SchemaDrift(_))));
    }

    #[test]
    fn labels_are_sanitized() {
        let f = Fetcher { network: false, cache_dir: None, endpoint: DEFAULT_ENDPOINT.into() };
        assert!(matches!(f.fetch("../etc/passwd"), Err(FetchError::BadLabel(_))));
        assert_eq!(f.fetch("11.a2"), Err(FetchError::Disabled("11.a2".into())));
    }

    #[test]
    fn local_records() {
        let d = parse_payload("c", r#"{"data": [{"prime": 7, "red": 1}, {"prime": 13, "red": 0}]}"#).unwrap();
        let e = d.local_data(3, &[7, 19], &[19], 1);
        let kinds: Vec<_> = e.records.iter().map(|r| (r.prime.as_str(), r.ramified_in_l, r.reduction, r.torsion_nontrivial)).collect();
        assert_eq!(
            kinds,
            vec![
                ("7", true, Reduction::SplitMultiplicative, false),
                ("13", false, Reduction::Additive, false),
                ("19", true, Reduction::Good, true),
            ]
        );
    }
}
