//! Random code sampling from a multi-edge ensemble, syndrome computation,
//! rate adaptation and the on-disk code cache.

use crate::error::{Error, Result};
use crate::ldpc::ensemble::MultiEdgeEnsemble;
use crate::rng::{fnv1a64, substream};
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

/// A sampled sparse parity-check matrix in CSR-by-check layout, with the
/// rate-adaptation metadata needed to decode it.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseParityCheck {
    pub n: usize,
    pub m: usize,
    /// Design rate of the base ensemble.
    pub rate: f64,
    pub seed: u64,
    /// Content hash of the ensemble the graph was drawn from.
    pub ensemble_hash: u64,
    /// `row_ptr[c]..row_ptr[c+1]` indexes the variables of check `c`,
    /// sorted ascending within each row.
    pub row_ptr: Vec<usize>,
    pub cols: Vec<u32>,
    /// Edge type of each entry in `cols`.
    pub edge_types: Vec<u8>,
    /// Sorted variable indices treated as transmitted-then-deleted (LLR 0).
    pub punctured: Vec<u32>,
    /// Sorted variable indices fixed to known bits (LLR +inf).
    pub shortened: Vec<u32>,
    /// Repetition factor applied on top of the code (1 = none).
    pub repetition: u32,
}

impl SparseParityCheck {
    /// Information bits of the base code.
    pub fn k(&self) -> usize {
        self.n - self.m
    }

    /// Rate after puncturing/shortening: (k - s) / (n - p - s).
    pub fn effective_rate(&self) -> f64 {
        let p = self.punctured.len() as f64;
        let s = self.shortened.len() as f64;
        (self.k() as f64 - s) / (self.n as f64 - p - s)
    }

    pub fn check_degree(&self, c: usize) -> usize {
        self.row_ptr[c + 1] - self.row_ptr[c]
    }

    pub fn check_vars(&self, c: usize) -> &[u32] {
        &self.cols[self.row_ptr[c]..self.row_ptr[c + 1]]
    }

    /// Per-variable degree histogram keyed by multidegree over edge types.
    pub fn variable_multidegrees(&self, edge_type_count: usize) -> Vec<Vec<u32>> {
        let mut degs = vec![vec![0u32; edge_type_count]; self.n];
        for (idx, &v) in self.cols.iter().enumerate() {
            degs[v as usize][self.edge_types[idx] as usize] += 1;
        }
        degs
    }
}

/// Largest-remainder apportionment of `total` items to weights `w`.
fn apportion(w: &[f64], total: usize) -> Vec<usize> {
    let wsum: f64 = w.iter().sum();
    let exact: Vec<f64> = w.iter().map(|wi| wi / wsum * total as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for i in 0..(total - assigned) {
        counts[order[i % w.len()]] += 1;
    }
    counts
}

/// Draw a random graph realizing `e` at block length `n`.
///
/// Class counts come from largest-remainder apportionment; leftover socket
/// imbalance from rounding is repaired by granting extra sockets to nodes of
/// the largest class active on the deficient side. Sockets of each edge type
/// are then matched through an independent seeded shuffle, and double edges
/// between the same (check, variable) pair are re-matched locally.
pub fn sample_code(e: &MultiEdgeEnsemble, n: usize, seed: u64) -> Result<SparseParityCheck> {
    let report = e.validate();
    if !report.is_ok() {
        return Err(Error::Validation(report.failures.join("; ")));
    }
    if n == 0 {
        return Err(Error::domain("block length must be >= 1"));
    }
    let m = ((1.0 - e.rate) * n as f64).round() as usize;
    if m == 0 || m >= n {
        return Err(Error::domain(format!("degenerate check count m = {m} for n = {n}")));
    }

    let var_w: Vec<f64> = e.var_classes.iter().map(|c| c.probability).collect();
    let chk_w: Vec<f64> = e.chk_classes.iter().map(|c| c.probability).collect();
    let var_counts = apportion(&var_w, n);
    let chk_counts = apportion(&chk_w, m);

    // Expand node multidegrees; mutable so balance repair can bump them.
    let mut var_deg: Vec<Vec<u32>> = Vec::with_capacity(n);
    for (ci, &cnt) in var_counts.iter().enumerate() {
        for _ in 0..cnt {
            var_deg.push(e.var_classes[ci].multidegree.clone());
        }
    }
    let mut chk_deg: Vec<Vec<u32>> = Vec::with_capacity(m);
    for (ci, &cnt) in chk_counts.iter().enumerate() {
        for _ in 0..cnt {
            chk_deg.push(e.chk_classes[ci].multidegree.clone());
        }
    }

    // Repair per-type socket imbalance caused by count rounding. Extra
    // sockets go to nodes of the largest class that already uses the type,
    // spread over distinct nodes so degrees move by at most 1.
    for t in 0..e.edge_types {
        let vs: u64 = var_deg.iter().map(|d| d[t] as u64).sum();
        let cs: u64 = chk_deg.iter().map(|d| d[t] as u64).sum();
        let (short, excess) = if vs < cs {
            (&mut var_deg, (cs - vs) as usize)
        } else {
            (&mut chk_deg, (vs - cs) as usize)
        };
        if excess == 0 {
            continue;
        }
        let mut fixed = 0;
        for d in short.iter_mut() {
            if fixed == excess {
                break;
            }
            if d[t] > 0 {
                d[t] += 1;
                fixed += 1;
            }
        }
        if fixed < excess {
            return Err(Error::Sampling(format!(
                "cannot repair {excess} surplus sockets of edge type {t} at n = {n}"
            )));
        }
    }

    // Per-type socket matching through an independent seeded shuffle.
    let mut edges: Vec<(u32, u32, u8)> = Vec::new();
    for t in 0..e.edge_types {
        let mut vsock: Vec<u32> = Vec::new();
        for (v, d) in var_deg.iter().enumerate() {
            for _ in 0..d[t] {
                vsock.push(v as u32);
            }
        }
        let mut csock: Vec<u32> = Vec::new();
        for (c, d) in chk_deg.iter().enumerate() {
            for _ in 0..d[t] {
                csock.push(c as u32);
            }
        }
        debug_assert_eq!(vsock.len(), csock.len());
        let mut rng = substream(seed, t as u64);
        vsock.shuffle(&mut rng);
        for (v, c) in vsock.into_iter().zip(csock) {
            edges.push((c, v, t as u8));
        }
    }

    // Re-match double edges locally: swap the variable endpoint of a
    // duplicate with a random other edge of the same type.
    let mut seen: HashSet<(u32, u32)> = HashSet::with_capacity(edges.len());
    let mut dup_indices: Vec<usize> = Vec::new();
    for (i, &(c, v, _)) in edges.iter().enumerate() {
        if !seen.insert((c, v)) {
            dup_indices.push(i);
        }
    }
    let initial_dups = dup_indices.len();
    let mut rng = substream(seed, 0xDEDE);
    let mut attempts = 0usize;
    let budget = 200 * (initial_dups + 1);
    while let Some(&i) = dup_indices.last() {
        attempts += 1;
        if attempts > budget {
            return Err(Error::Sampling(format!(
                "double-edge repair budget exhausted: {} of {} duplicates remain after {attempts} swaps",
                dup_indices.len(),
                initial_dups
            )));
        }
        let j = rng.gen_range(0..edges.len());
        let (ci, vi, ti) = edges[i];
        let (cj, vj, tj) = edges[j];
        if i == j || ti != tj {
            continue;
        }
        // After the swap, edge i carries vj and edge j carries vi.
        if (ci, vj) == (cj, vi) {
            continue;
        }
        if seen.contains(&(ci, vj)) || seen.contains(&(cj, vi)) {
            continue;
        }
        // Edge j is known unique (duplicates are only the tail entries
        // tracked in dup_indices); remove it before re-inserting.
        if dup_indices.contains(&j) {
            continue;
        }
        seen.remove(&(cj, vj));
        edges[i] = (ci, vj, ti);
        edges[j] = (cj, vi, tj);
        seen.insert((ci, vj));
        seen.insert((cj, vi));
        dup_indices.pop();
    }

    // CSR assembly, rows sorted by variable index.
    let mut per_check: Vec<Vec<(u32, u8)>> = vec![Vec::new(); m];
    for (c, v, t) in edges {
        per_check[c as usize].push((v, t));
    }
    let mut row_ptr = Vec::with_capacity(m + 1);
    let mut cols = Vec::new();
    let mut edge_types = Vec::new();
    row_ptr.push(0);
    for row in per_check.iter_mut() {
        row.sort_unstable();
        for &(v, t) in row.iter() {
            cols.push(v);
            edge_types.push(t);
        }
        row_ptr.push(cols.len());
    }

    Ok(SparseParityCheck {
        n,
        m,
        rate: e.rate,
        seed,
        ensemble_hash: e.content_hash(),
        row_ptr,
        cols,
        edge_types,
        punctured: Vec::new(),
        shortened: Vec::new(),
        repetition: 1,
    })
}

/// GF(2) product H·word, one bit per check.
pub fn syndrome(h: &SparseParityCheck, word: &[u8]) -> Result<Vec<u8>> {
    if word.len() != h.n {
        return Err(Error::domain(format!(
            "word length {} does not match n = {}",
            word.len(),
            h.n
        )));
    }
    let mut out = vec![0u8; h.m];
    for c in 0..h.m {
        let mut acc = 0u8;
        for &v in h.check_vars(c) {
            acc ^= word[v as usize] & 1;
        }
        out[c] = acc;
    }
    Ok(out)
}

/// Mark seeded-random disjoint punctured and shortened sets on a copy of
/// `h`. Punctured symbols are deleted from transmission (decoded with LLR
/// 0), shortened symbols are pinned to known values.
pub fn adapt_rate(h: &SparseParityCheck, p: usize, s: usize, seed: u64) -> Result<SparseParityCheck> {
    if p + s >= h.k() {
        return Err(Error::domain(format!(
            "puncturing {p} and shortening {s} oversubscribe k = {}",
            h.k()
        )));
    }
    let mut out = h.clone();
    if p + s == 0 {
        out.punctured.clear();
        out.shortened.clear();
        return Ok(out);
    }
    let mut idx: Vec<u32> = (0..h.n as u32).collect();
    let mut rng = substream(seed, 0xADA7);
    idx.shuffle(&mut rng);
    out.punctured = idx[..p].to_vec();
    out.shortened = idx[p..p + s].to_vec();
    out.punctured.sort_unstable();
    out.shortened.sort_unstable();
    Ok(out)
}

/// Sum the `k` channel LLRs of each code bit after removing the public
/// randomization mask (bit 1 flips the sign). Layout is `k` consecutive
/// channel symbols per code bit.
pub fn repetition_combine(llr: &[f64], sign_mask: &[u8], k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::domain("repetition factor must be >= 1"));
    }
    if llr.len() % k != 0 || llr.len() != sign_mask.len() {
        return Err(Error::domain(format!(
            "LLR length {} not compatible with mask length {} and factor {k}",
            llr.len(),
            sign_mask.len()
        )));
    }
    let n = llr.len() / k;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..k {
            let idx = i * k + j;
            let sign = if sign_mask[idx] & 1 == 1 { -1.0 } else { 1.0 };
            acc += sign * llr[idx];
        }
        out.push(acc);
    }
    Ok(out)
}

const CACHE_MAGIC: &[u8; 8] = b"METLDPC1";

fn push_varint(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            break;
        }
        out.push(byte | 0x80);
    }
}

fn read_varint(buf: &[u8], pos: &mut usize) -> Result<u64> {
    let mut v = 0u64;
    let mut shift = 0u32;
    loop {
        let byte = *buf
            .get(*pos)
            .ok_or_else(|| Error::Format("truncated varint in code cache".into()))?;
        *pos += 1;
        v |= u64::from(byte & 0x7f) << shift;
        if byte & 0x80 == 0 {
            return Ok(v);
        }
        shift += 7;
        if shift >= 64 {
            return Err(Error::Format("overlong varint in code cache".into()));
        }
    }
}

impl SparseParityCheck {
    /// Binary cache image: fixed header, delta-varint adjacency, metadata,
    /// trailing content hash.
    pub fn to_cache_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(CACHE_MAGIC);
        out.extend_from_slice(&(self.n as u64).to_le_bytes());
        out.extend_from_slice(&(self.m as u64).to_le_bytes());
        out.extend_from_slice(&self.rate.to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&self.ensemble_hash.to_le_bytes());
        for c in 0..self.m {
            let row = &self.cols[self.row_ptr[c]..self.row_ptr[c + 1]];
            let types = &self.edge_types[self.row_ptr[c]..self.row_ptr[c + 1]];
            push_varint(&mut out, row.len() as u64);
            let mut prev = 0u64;
            for (i, &v) in row.iter().enumerate() {
                // Rows are sorted, so deltas are non-negative; the first
                // entry is stored absolute.
                let delta = if i == 0 { v as u64 } else { v as u64 - prev };
                push_varint(&mut out, delta);
                prev = v as u64;
            }
            for &t in types {
                out.push(t);
            }
        }
        push_varint(&mut out, self.punctured.len() as u64);
        for &v in &self.punctured {
            push_varint(&mut out, v as u64);
        }
        push_varint(&mut out, self.shortened.len() as u64);
        for &v in &self.shortened {
            push_varint(&mut out, v as u64);
        }
        push_varint(&mut out, self.repetition as u64);
        let hash = fnv1a64(&out);
        out.extend_from_slice(&hash.to_le_bytes());
        out
    }

    pub fn from_cache_bytes(buf: &[u8]) -> Result<Self> {
        if buf.len() < CACHE_MAGIC.len() + 8 {
            return Err(Error::Format("code cache too short".into()));
        }
        let (body, tail) = buf.split_at(buf.len() - 8);
        let stored = u64::from_le_bytes(tail.try_into().unwrap());
        if fnv1a64(body) != stored {
            return Err(Error::Format("code cache content hash mismatch".into()));
        }
        if &body[..8] != CACHE_MAGIC {
            return Err(Error::Format("bad code cache magic".into()));
        }
        let mut pos = 8usize;
        let read_u64 = |pos: &mut usize| -> Result<u64> {
            let bytes = body
                .get(*pos..*pos + 8)
                .ok_or_else(|| Error::Format("truncated code cache header".into()))?;
            *pos += 8;
            Ok(u64::from_le_bytes(bytes.try_into().unwrap()))
        };
        let n = read_u64(&mut pos)? as usize;
        let m = read_u64(&mut pos)? as usize;
        let rate = f64::from_le_bytes(
            body.get(pos..pos + 8)
                .ok_or_else(|| Error::Format("truncated code cache header".into()))?
                .try_into()
                .unwrap(),
        );
        pos += 8;
        let seed = read_u64(&mut pos)?;
        let ensemble_hash = read_u64(&mut pos)?;

        let mut row_ptr = Vec::with_capacity(m + 1);
        let mut cols = Vec::new();
        let mut edge_types = Vec::new();
        row_ptr.push(0);
        for _ in 0..m {
            let deg = read_varint(body, &mut pos)? as usize;
            let mut prev = 0u64;
            for i in 0..deg {
                let delta = read_varint(body, &mut pos)?;
                let v = if i == 0 { delta } else { prev + delta };
                if v >= n as u64 {
                    return Err(Error::Format("variable index out of range in cache".into()));
                }
                cols.push(v as u32);
                prev = v;
            }
            for _ in 0..deg {
                let t = *body
                    .get(pos)
                    .ok_or_else(|| Error::Format("truncated edge types in cache".into()))?;
                edge_types.push(t);
                pos += 1;
            }
            row_ptr.push(cols.len());
        }
        let read_set = |pos: &mut usize| -> Result<Vec<u32>> {
            let len = read_varint(body, pos)? as usize;
            let mut out = Vec::with_capacity(len);
            for _ in 0..len {
                out.push(read_varint(body, pos)? as u32);
            }
            Ok(out)
        };
        let punctured = read_set(&mut pos)?;
        let shortened = read_set(&mut pos)?;
        let repetition = read_varint(body, &mut pos)? as u32;
        if pos != body.len() {
            return Err(Error::Format("trailing bytes in code cache".into()));
        }
        Ok(SparseParityCheck {
            n,
            m,
            rate,
            seed,
            ensemble_hash,
            row_ptr,
            cols,
            edge_types,
            punctured,
            shortened,
            repetition,
        })
    }

    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(&self.to_cache_bytes())?;
        Ok(())
    }

    pub fn load_cache(path: &Path) -> Result<Self> {
        let mut buf = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut buf)?;
        Self::from_cache_bytes(&buf)
    }
}
