//! OEIS b-file client: download, cache, parse, and compare against locally
//! computed sequences.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

/// Environment variable overriding the cache directory.
pub const CACHE_ENV: &str = "INCMAT_OEIS_CACHE";

#[derive(Debug, Error, PartialEq)]
pub enum OeisError {
    #[error("`{0}` is not an A-number (expected A followed by six digits)")]
    InvalidId(String),
    #[error("b-file parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("could not retrieve {id}: {message}")]
    Retrieval { id: String, message: String },
    #[error("cache error: {0}")]
    Cache(String),
    #[error("no offset in {{-1, 0, +1}} aligns the local sequence with {0}")]
    Alignment(String),
    #[error("nothing to compare: {0}")]
    Empty(String),
}

pub type Result<T> = std::result::Result<T, OeisError>;

/// Checks the `A` + six digits pattern.
pub fn validate_id(id: &str) -> Result<()> {
    let ok = id.len() == 7 && id.starts_with('A') && id[1..].bytes().all(|b| b.is_ascii_digit());
    if ok {
        Ok(())
    } else {
        Err(OeisError::InvalidId(id.to_string()))
    }
}

/// Terms of an OEIS sequence as listed in its b-file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BFileSequence {
    id: String,
    entries: Vec<(i64, BigUint)>,
}

impl BFileSequence {
    /// Parses b-file text: one `index value` pair per line; blank lines and
    /// lines starting with `#` are skipped. Indices must be contiguous and
    /// increasing.
    pub fn parse(id: &str, text: &str) -> Result<Self> {
        validate_id(id)?;
        let mut entries: Vec<(i64, BigUint)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| OeisError::Parse {
                line: line_no,
                message,
            };
            let mut fields = line.split_whitespace();
            let (Some(index), Some(value), None) = (fields.next(), fields.next(), fields.next())
            else {
                return Err(err(format!("expected two columns, got `{line}`")));
            };
            let index: i64 = index
                .parse()
                .map_err(|_| err(format!("bad index `{index}`")))?;
            let value: BigUint = value.parse().map_err(|_| {
                err(format!(
                    "bad value `{value}` (expected a nonnegative integer)"
                ))
            })?;
            if let Some(&(prev, _)) = entries.last() {
                if index != prev + 1 {
                    return Err(err(format!("index {index} does not follow {prev}")));
                }
            }
            entries.push((index, value));
        }
        Ok(BFileSequence {
            id: id.to_string(),
            entries,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn entries(&self) -> &[(i64, BigUint)] {
        &self.entries
    }

    pub fn get(&self, index: i64) -> Option<&BigUint> {
        let first = self.entries.first()?.0;
        let pos = usize::try_from(index.checked_sub(first)?).ok()?;
        self.entries.get(pos).map(|(_, v)| v)
    }

    /// b-file text for this sequence.
    pub fn to_bfile(&self) -> String {
        let mut out = String::new();
        for (i, v) in &self.entries {
            out.push_str(&format!("{i} {v}\n"));
        }
        out
    }
}

/// Canonical b-file URL, e.g. `https://oeis.org/A101370/b101370.txt`.
pub fn bfile_url(id: &str) -> String {
    format!("https://oeis.org/{id}/b{}.txt", &id[1..])
}

/// Cache file name, e.g. `b101370.txt`.
pub fn cache_file_name(id: &str) -> String {
    format!("b{}.txt", &id[1..])
}

/// `$INCMAT_OEIS_CACHE`, else `$XDG_CACHE_HOME/incmat/oeis`, else
/// `$HOME/.cache/incmat/oeis`, else `.incmat-cache/oeis`.
pub fn default_cache_dir() -> PathBuf {
    let env = |k: &str| std::env::var_os(k).filter(|v| !v.is_empty());
    if let Some(dir) = env(CACHE_ENV) {
        return dir.into();
    }
    if let Some(xdg) = env("XDG_CACHE_HOME") {
        return PathBuf::from(xdg).join("incmat").join("oeis");
    }
    if let Some(home) = env("HOME") {
        return PathBuf::from(home)
            .join(".cache")
            .join("incmat")
            .join("oeis");
    }
    PathBuf::from(".incmat-cache").join("oeis")
}

/// Fetches text over some transport.
pub trait Transport {
    fn get(&self, url: &str) -> std::result::Result<String, String>;
}

/// HTTPS transport.
pub struct HttpTransport {
    timeout: Duration,
}

impl Default for HttpTransport {
    fn default() -> Self {
        HttpTransport {
            timeout: Duration::from_secs(30),
        }
    }
}

impl Transport for HttpTransport {
    fn get(&self, url: &str) -> std::result::Result<String, String> {
        let client = reqwest::blocking::Client::builder()
            .timeout(self.timeout)
            .user_agent(concat!("incmat/", env!("CARGO_PKG_VERSION")))
            .build()
            .map_err(|e| e.to_string())?;
        let resp = client.get(url).send().map_err(|e| e.to_string())?;
        let status = resp.status();
        if !status.is_success() {
            return Err(format!("HTTP {status}"));
        }
        resp.text().map_err(|e| e.to_string())
    }
}

/// Returns the b-file for `id`, from `cache_dir` when present, otherwise
/// over `transport` (then written to the cache). With `offline` set only
/// the cache is consulted.
pub fn fetch_bfile(
    id: &str,
    cache_dir: &Path,
    offline: bool,
    transport: &dyn Transport,
) -> Result<BFileSequence> {
    validate_id(id)?;
    let path = cache_dir.join(cache_file_name(id));
    if path.is_file() {
        let text = fs::read_to_string(&path)
            .map_err(|e| OeisError::Cache(format!("{}: {e}", path.display())))?;
        return BFileSequence::parse(id, &text);
    }
    if offline {
        return Err(OeisError::Retrieval {
            id: id.to_string(),
            message: format!("offline and no cached copy at {}", path.display()),
        });
    }
    let text = transport
        .get(&bfile_url(id))
        .map_err(|message| OeisError::Retrieval {
            id: id.to_string(),
            message,
        })?;
    let seq = BFileSequence::parse(id, &text)?;
    fs::create_dir_all(cache_dir)
        .and_then(|_| fs::write(&path, &text))
        .map_err(|e| OeisError::Cache(format!("{}: {e}", path.display())))?;
    Ok(seq)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub n: u32,
    pub local: String,
    pub remote: String,
}

/// Result of comparing a local sequence with a b-file. `offset` is the
/// shift such that local term `n` is compared with b-file index `n + offset`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComparisonReport {
    pub class: String,
    pub id: String,
    pub offset: i64,
    pub range: (u32, u32),
    pub compared: usize,
    pub mismatches: Vec<Mismatch>,
    pub success: bool,
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} {} vs {}: n = {}..{}, offset {:+}, {} terms compared, {} mismatches",
            if self.success { "PASS" } else { "FAIL" },
            self.class,
            self.id,
            self.range.0,
            self.range.1,
            self.offset,
            self.compared,
            self.mismatches.len()
        )?;
        for m in &self.mismatches {
            writeln!(f, "  n={}: local {} remote {}", m.n, m.local, m.remote)?;
        }
        Ok(())
    }
}

/// Aligns `local` (pairs `(n, value)`, increasing `n`) with `remote` by the
/// first offset among 0, -1, +1 whose first three overlapping values agree,
/// then compares the whole overlap.
pub fn compare_sequence(
    class: &str,
    local: &[(u32, BigUint)],
    remote: &BFileSequence,
) -> Result<ComparisonReport> {
    if local.is_empty() {
        return Err(OeisError::Empty("local sequence".into()));
    }
    if remote.entries().is_empty() {
        return Err(OeisError::Empty(format!("b-file {}", remote.id())));
    }
    let overlap = |offset: i64| -> Vec<(u32, &BigUint, &BigUint)> {
        local
            .iter()
            .filter_map(|(n, v)| remote.get(*n as i64 + offset).map(|r| (*n, v, r)))
            .collect()
    };
    let offset = [0i64, -1, 1]
        .into_iter()
        .find(|&off| {
            let pairs = overlap(off);
            !pairs.is_empty() && pairs.iter().take(3).all(|(_, a, b)| a == b)
        })
        .ok_or_else(|| OeisError::Alignment(remote.id().to_string()))?;
    let pairs = overlap(offset);
    let mismatches: Vec<Mismatch> = pairs
        .iter()
        .filter(|(_, a, b)| a != b)
        .map(|(n, a, b)| Mismatch {
            n: *n,
            local: a.to_string(),
            remote: b.to_string(),
        })
        .collect();
    Ok(ComparisonReport {
        class: class.to_string(),
        id: remote.id().to_string(),
        offset,
        range: (pairs[0].0, pairs[pairs.len() - 1].0),
        compared: pairs.len(),
        success: mismatches.is_empty(),
        mismatches,
    })
}
