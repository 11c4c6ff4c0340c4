//! Binary index container.
//!
//! All integers are little-endian. Strings are a `u32` byte length followed
//! by UTF-8 bytes.
//!
//! ```text
//! magic        8 bytes   "RATIDX1\0"
//! k1, b        f64, f64
//! doc_count    u64
//! total_terms  u64       sum of document lengths
//! avgdl        f64       total_terms / doc_count
//! term_count   u64
//! term_count × { term: str, df: u32, df × { doc: u32, tf: u32 } }
//!              terms in ascending byte order, docs strictly ascending
//! doc_count ×  { pair_id: str, domain: str, source: str, target: str, length: u32 }
//! ```
//!
//! Decoding checks every structural invariant and rejects trailing bytes, so
//! `encode(decode(bytes)) == bytes` for any accepted input.

use std::collections::{HashMap, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use super::{Bm25Params, DocMeta, Posting, TmIndex};
use crate::{Error, Result};

pub const INDEX_MAGIC: &[u8; 8] = b"RATIDX1\0";

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::IndexFormat(msg.into())
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| bad(format!("truncated while reading {what} at byte {}", self.pos)))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn str(&mut self, what: &str) -> Result<String> {
        let len = self.u32(what)? as usize;
        let bytes = self.take(len, what)?;
        String::from_utf8(bytes.to_vec()).map_err(|_| bad(format!("{what} is not UTF-8")))
    }

    /// Bound a declared element count by the bytes that remain.
    fn count(&mut self, what: &str, min_elem_size: usize) -> Result<usize> {
        let n = self.u64(what)?;
        let n = usize::try_from(n).map_err(|_| bad(format!("{what} overflows")))?;
        if n.saturating_mul(min_elem_size) > self.remaining() {
            return Err(bad(format!("{what} {n} exceeds file size")));
        }
        Ok(n)
    }
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(&(s.len() as u32).to_le_bytes());
    out.extend_from_slice(s.as_bytes());
}

impl TmIndex {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(INDEX_MAGIC);
        out.extend_from_slice(&self.params.k1.to_le_bytes());
        out.extend_from_slice(&self.params.b.to_le_bytes());
        let total: u64 = self.doc_lengths.iter().map(|&l| u64::from(l)).sum();
        out.extend_from_slice(&(self.docs.len() as u64).to_le_bytes());
        out.extend_from_slice(&total.to_le_bytes());
        out.extend_from_slice(&self.avg_doc_length.to_le_bytes());

        let mut terms: Vec<&String> = self.postings.keys().collect();
        terms.sort_unstable();
        out.extend_from_slice(&(terms.len() as u64).to_le_bytes());
        for term in terms {
            let list = &self.postings[term];
            put_str(&mut out, term);
            out.extend_from_slice(&(list.len() as u32).to_le_bytes());
            for p in list {
                out.extend_from_slice(&p.doc.to_le_bytes());
                out.extend_from_slice(&p.tf.to_le_bytes());
            }
        }
        for (meta, len) in self.docs.iter().zip(&self.doc_lengths) {
            put_str(&mut out, &meta.pair_id);
            put_str(&mut out, &meta.domain);
            put_str(&mut out, &meta.source);
            put_str(&mut out, &meta.target);
            out.extend_from_slice(&len.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut c = Cursor { buf: bytes, pos: 0 };
        if c.take(8, "magic")? != INDEX_MAGIC {
            return Err(bad("bad magic, not a RATIDX1 index"));
        }
        let params = Bm25Params {
            k1: c.f64("k1")?,
            b: c.f64("b")?,
        };
        params.validate().map_err(|e| bad(e.to_string()))?;

        // each document needs at least 4 string headers + a length
        let doc_count = c.count("doc_count", 20)?;
        if doc_count == 0 || doc_count > u32::MAX as usize {
            return Err(bad(format!("invalid doc_count {doc_count}")));
        }
        let total = c.u64("total_terms")?;
        let avg = c.f64("avg_doc_length")?;

        let term_count = c.count("term_count", 12)?;
        let mut postings: HashMap<String, Vec<Posting>> = HashMap::with_capacity(term_count);
        let mut tf_sums = vec![0u64; doc_count];
        let mut prev: Option<String> = None;
        for _ in 0..term_count {
            let term = c.str("term")?;
            if term.is_empty() {
                return Err(bad("empty term"));
            }
            if prev.as_ref().is_some_and(|p| *p >= term) {
                return Err(bad(format!("term {term:?} out of order")));
            }
            let df = c.u32("df")? as usize;
            if df == 0 || df.saturating_mul(8) > c.remaining() {
                return Err(bad(format!("invalid document frequency for {term:?}")));
            }
            let mut list = Vec::with_capacity(df);
            for _ in 0..df {
                let doc = c.u32("posting doc")?;
                let tf = c.u32("posting tf")?;
                if doc as usize >= doc_count {
                    return Err(bad(format!("posting for {term:?} names doc {doc}")));
                }
                if tf == 0 {
                    return Err(bad(format!("zero term frequency for {term:?}")));
                }
                if list.last().is_some_and(|p: &Posting| p.doc >= doc) {
                    return Err(bad(format!("postings for {term:?} not ascending")));
                }
                tf_sums[doc as usize] += u64::from(tf);
                list.push(Posting { doc, tf });
            }
            postings.insert(term.clone(), list);
            prev = Some(term);
        }

        let mut docs = Vec::with_capacity(doc_count);
        let mut doc_lengths = Vec::with_capacity(doc_count);
        let mut ids = HashSet::with_capacity(doc_count);
        for (i, tf_sum) in tf_sums.iter().enumerate() {
            let meta = DocMeta {
                pair_id: c.str("pair id")?,
                domain: c.str("domain")?,
                source: c.str("source")?,
                target: c.str("target")?,
            };
            let len = c.u32("doc length")?;
            if len == 0 || u64::from(len) != *tf_sum {
                return Err(bad(format!("doc {i} length {len} disagrees with postings")));
            }
            if meta.pair_id.is_empty() || !ids.insert(meta.pair_id.clone()) {
                return Err(bad(format!("doc {i} has an empty or duplicate pair id")));
            }
            docs.push(meta);
            doc_lengths.push(len);
        }
        if c.remaining() != 0 {
            return Err(bad(format!("{} trailing bytes", c.remaining())));
        }
        let sum: u64 = doc_lengths.iter().map(|&l| u64::from(l)).sum();
        let expect_avg = sum as f64 / doc_count as f64;
        if sum != total || avg.to_bits() != expect_avg.to_bits() {
            return Err(bad("stored statistics disagree with documents"));
        }
        Ok(TmIndex {
            params,
            postings,
            doc_lengths,
            docs,
            avg_doc_length: avg,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)
            .map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
        f.write_all(&self.to_bytes())
            .map_err(|e| Error::io(format!("writing {}", path.display()), e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        Self::from_bytes(&bytes)
    }
}
