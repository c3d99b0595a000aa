//! Irregular indices and the search for pairs `k + k' = p + 1` with
//! `B_k ≡ B_{k'} ≡ 0 mod p`, parallel over primes and resumable.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::mpsc;
use std::thread;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::{primes_in_range, Prime};
use crate::bernoulli::bernoulli_table_mod;
use crate::{Error, Result};

/// Result for one prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub p: u64,
    /// Even `k` in `[4, p - 3]` with `p | B_k`.
    pub irregular_indices: Vec<u64>,
    /// Ordered pairs `(k, k')`, both orders listed.
    pub pair_hits: Vec<(u64, u64)>,
    /// `B_{(p+1)/2} ≢ 0`, only for `p ≡ 3 mod 4`.
    pub half_index_ok: Option<bool>,
}

/// Even `k` in `[4, p - 3]` with `B_k ≡ 0 mod p`.
pub fn irregular_indices(p: Prime) -> Result<Vec<u64>> {
    let pv = p.get();
    if pv < 7 {
        return Ok(Vec::new());
    }
    let table = bernoulli_table_mod(p, pv as usize - 3)?;
    Ok((4..=pv - 3)
        .step_by(2)
        .filter(|&k| table[k as usize] == 0)
        .collect())
}

pub fn pair_scan(p: Prime) -> Result<ScanRecord> {
    let pv = p.get();
    let irregular = irregular_indices(p)?;
    let mut pair_hits = Vec::new();
    for &k in &irregular {
        let kp = pv + 1 - k;
        if irregular.binary_search(&kp).is_ok() {
            pair_hits.push((k, kp));
        }
    }
    let half_index_ok = (pv % 4 == 3 && pv >= 7).then(|| {
        let h = pv.div_ceil(2);
        irregular.binary_search(&h).is_err()
    });
    Ok(ScanRecord {
        p: pv,
        irregular_indices: irregular,
        pair_hits,
        half_index_ok,
    })
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

impl ScanRecord {
    fn fields(&self) -> [String; 4] {
        [
            self.p.to_string(),
            join(&self.irregular_indices),
            join(self.pair_hits.iter().map(|(a, b)| format!("{a}:{b}"))),
            self.half_index_ok.map_or(String::new(), |b| b.to_string()),
        ]
    }

    fn checkpoint_line(&self) -> String {
        let body = self.fields().join(",");
        format!("{body},{}", content_hash(&body))
    }

    fn parse_checkpoint(line: &str, lineno: usize) -> Result<ScanRecord> {
        let corrupt = |reason: &str| Error::CorruptCheckpoint {
            line: lineno,
            reason: reason.to_string(),
        };
        let (body, hash) = line.rsplit_once(',').ok_or_else(|| corrupt("missing hash"))?;
        if content_hash(body) != hash {
            return Err(corrupt("hash mismatch"));
        }
        let parts: Vec<&str> = body.split(',').collect();
        if parts.len() != 4 {
            return Err(corrupt("wrong field count"));
        }
        let nums = |s: &str| -> Result<Vec<u64>> {
            if s.is_empty() {
                return Ok(Vec::new());
            }
            s.split(';')
                .map(|x| x.parse().map_err(|_| corrupt("bad integer")))
                .collect()
        };
        let pair_hits = if parts[2].is_empty() {
            Vec::new()
        } else {
            parts[2]
                .split(';')
                .map(|pair| {
                    let (a, b) = pair.split_once(':').ok_or_else(|| corrupt("bad pair"))?;
                    Ok((
                        a.parse().map_err(|_| corrupt("bad pair"))?,
                        b.parse().map_err(|_| corrupt("bad pair"))?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?
        };
        let half_index_ok = match parts[3] {
            "" => None,
            "true" => Some(true),
            "false" => Some(false),
            _ => return Err(corrupt("bad flag")),
        };
        Ok(ScanRecord {
            p: parts[0].parse().map_err(|_| corrupt("bad prime"))?,
            irregular_indices: nums(parts[1])?,
            pair_hits,
            half_index_ok,
        })
    }
}

fn content_hash(body: &str) -> String {
    hex::encode(&Sha256::digest(body.as_bytes())[..8])
}

/// Merged scan output, sorted by `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub p_min: u64,
    pub p_max: u64,
    pub primes_processed: usize,
    pub total_pair_hits: usize,
    pub records: Vec<ScanRecord>,
}

impl ScanReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["p", "irregular_indices", "pair_hits", "half_index_ok"])
            .map_err(io)?;
        for r in &self.records {
            w.write_record(r.fields()).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("ascii output"))
    }

    pub fn half_index_all_ok(&self) -> bool {
        self.records.iter().all(|r| r.half_index_ok != Some(false))
    }
}

fn load_checkpoint(path: &Path) -> Result<BTreeMap<u64, ScanRecord>> {
    let mut done = BTreeMap::new();
    if !path.exists() {
        return Ok(done);
    }
    let reader = BufReader::new(File::open(path)?);
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = ScanRecord::parse_checkpoint(&line, i + 1)?;
        done.insert(rec.p, rec);
    }
    Ok(done)
}

/// Scans every prime `5 <= p` in `[p_min, p_max]` over `shards` worker
/// threads. With a checkpoint path, finished primes are read back (and
/// verified) first and new ones are appended as they complete.
pub fn scan_range(p_min: u64, p_max: u64, shards: usize, checkpoint: Option<&Path>) -> Result<ScanReport> {
    let shards = shards.max(1);
    let mut done = match checkpoint {
        Some(path) => load_checkpoint(path)?,
        None => BTreeMap::new(),
    };
    done.retain(|p, _| (p_min..=p_max).contains(p));
    let todo: Vec<u64> = primes_in_range(p_min.max(5), p_max)
        .into_iter()
        .filter(|p| !done.contains_key(p))
        .collect();

    let mut sink = match checkpoint {
        Some(path) => Some(OpenOptions::new().create(true).append(true).open(path)?),
        None => None,
    };
    let (tx, rx) = mpsc::channel::<Result<ScanRecord>>();
    thread::scope(|scope| -> Result<()> {
        for shard in 0..shards {
            let tx = tx.clone();
            let todo = &todo;
            scope.spawn(move || {
                for &p in todo.iter().skip(shard).step_by(shards) {
                    let rec = Prime::new(p).and_then(pair_scan);
                    if tx.send(rec).is_err() {
                        return;
                    }
                }
            });
        }
        drop(tx);
        for rec in rx {
            let rec = rec?;
            if let Some(f) = sink.as_mut() {
                writeln!(f, "{}", rec.checkpoint_line())?;
            }
            done.insert(rec.p, rec);
        }
        Ok(())
    })?;
    if let Some(f) = sink.as_mut() {
        f.flush()?;
    }

    let records: Vec<ScanRecord> = done.into_values().collect();
    Ok(ScanReport {
        p_min,
        p_max,
        primes_processed: records.len(),
        total_pair_hits: records.iter().map(|r| r.pair_hits.len()).sum(),
        records,
    })
}
