use std::collections::{BTreeSet, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use prooftutor::document::{FormulaRef, KnowledgeBase};
use prooftutor::formula::{canonical_key, Formula};
use prooftutor::search::ProofResult;

/// Identifies a proof problem: the goal up to bound-variable names plus the
/// selected formulas.
pub fn proof_key(goal: &Formula, selection: &BTreeSet<FormulaRef>) -> String {
    let mut h = Sha256::new();
    h.update(canonical_key(goal).as_bytes());
    for r in selection {
        h.update(b"\n");
        h.update(r.to_string().as_bytes());
    }
    hex::encode(h.finalize())
}

fn is_key(s: &str) -> bool {
    s.len() == 64 && s.bytes().all(|b| b.is_ascii_hexdigit() && !b.is_ascii_uppercase())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProofRecord {
    pub key: String,
    pub version: u32,
    pub goal_ref: FormulaRef,
    pub goal: Formula,
    pub selection: Vec<FormulaRef>,
    pub kb: KnowledgeBase,
    /// The prover settings the proof was made with.
    pub config: serde_json::Value,
    pub result: ProofResult,
    /// Milliseconds since the Unix epoch.
    pub created_at: u64,
}

impl ProofRecord {
    pub fn link(&self) -> String {
        format!("/proofs/{}/{}", self.key, self.version)
    }
}

/// Append-only proof history, one JSON-lines file per key.
#[derive(Debug)]
pub struct ProofStore {
    dir: PathBuf,
    locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

impl ProofStore {
    pub fn open(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir, locks: Mutex::new(HashMap::new()) })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.jsonl"))
    }

    fn lock(&self, key: &str) -> Arc<Mutex<()>> {
        self.locks.lock().unwrap().entry(key.to_string()).or_default().clone()
    }

    /// Stores `record` under the next version of its key and returns it with
    /// that version filled in.
    pub fn append(&self, mut record: ProofRecord) -> io::Result<ProofRecord> {
        if !is_key(&record.key) {
            return Err(io::Error::new(io::ErrorKind::InvalidInput, "malformed proof key"));
        }
        let lock = self.lock(&record.key);
        let _guard = lock.lock().unwrap();
        record.version = self.read_all(&record.key)?.len() as u32 + 1;
        record.result.version = record.version;
        let mut line = serde_json::to_string(&record).map_err(io::Error::other)?;
        line.push('\n');
        OpenOptions::new().create(true).append(true).open(self.path(&record.key))?.write_all(line.as_bytes())?;
        Ok(record)
    }

    pub fn get(&self, key: &str, version: u32) -> io::Result<Option<ProofRecord>> {
        if !is_key(key) || version == 0 {
            return Ok(None);
        }
        Ok(self.read_all(key)?.into_iter().find(|r| r.version == version))
    }

    /// Number of stored versions for `key`.
    pub fn latest_version(&self, key: &str) -> io::Result<u32> {
        if !is_key(key) {
            return Ok(0);
        }
        Ok(self.read_all(key)?.len() as u32)
    }

    fn read_all(&self, key: &str) -> io::Result<Vec<ProofRecord>> {
        let file = match File::open(self.path(key)) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e),
        };
        BufReader::new(file)
            .lines()
            .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
            .map(|l| serde_json::from_str(&l?).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e)))
            .collect()
    }
}
