//! Syndrome-target sum-product decoding with a flooding schedule.

use crate::ldpc::code::SparseParityCheck;

/// Message magnitude clamp. Keeps tanh/atanh away from saturation while
/// leaving hard decisions untouched.
pub const LLR_CLAMP: f64 = 30.0;

/// Outcome of one decode call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    /// Hard decision at exit (valid coset word iff `syndrome_matched`).
    pub word: Vec<u8>,
    pub converged: bool,
    /// Message-passing iterations actually run.
    pub iterations: usize,
    pub syndrome_matched: bool,
}

/// Reusable decoder workspace for one code. Construction builds the
/// variable-side adjacency; decode calls then allocate nothing.
pub struct BpDecoder {
    n: usize,
    m: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    /// Edge indices grouped by variable.
    var_ptr: Vec<usize>,
    var_edges: Vec<u32>,
    v2c: Vec<f64>,
    c2v: Vec<f64>,
    total: Vec<f64>,
    tanh_buf: Vec<f64>,
    word: Vec<u8>,
}

fn clamp(x: f64) -> f64 {
    x.clamp(-LLR_CLAMP, LLR_CLAMP)
}

impl BpDecoder {
    pub fn new(h: &SparseParityCheck) -> Self {
        let edges = h.cols.len();
        let mut var_ptr = vec![0usize; h.n + 1];
        for &v in &h.cols {
            var_ptr[v as usize + 1] += 1;
        }
        for v in 0..h.n {
            var_ptr[v + 1] += var_ptr[v];
        }
        let mut fill = var_ptr.clone();
        let mut var_edges = vec![0u32; edges];
        for (e, &v) in h.cols.iter().enumerate() {
            var_edges[fill[v as usize]] = e as u32;
            fill[v as usize] += 1;
        }
        BpDecoder {
            n: h.n,
            m: h.m,
            row_ptr: h.row_ptr.clone(),
            cols: h.cols.clone(),
            var_ptr,
            var_edges,
            v2c: vec![0.0; edges],
            c2v: vec![0.0; edges],
            total: vec![0.0; h.n],
            tanh_buf: vec![0.0; edges],
            word: vec![0u8; h.n],
        }
    }

    fn hard_decision(&mut self) {
        for v in 0..self.n {
            self.word[v] = (self.total[v] < 0.0) as u8;
        }
    }

    fn syndrome_matches(&self, target: &[u8]) -> bool {
        for c in 0..self.m {
            let mut acc = 0u8;
            for &v in &self.cols[self.row_ptr[c]..self.row_ptr[c + 1]] {
                acc ^= self.word[v as usize];
            }
            if acc != target[c] & 1 {
                return false;
            }
        }
        true
    }

    /// Decode toward the coset `H·word = target_syndrome`.
    pub fn decode(&mut self, llr: &[f64], target_syndrome: &[u8], max_iter: usize) -> DecodeResult {
        assert_eq!(llr.len(), self.n, "LLR length mismatch");
        assert_eq!(target_syndrome.len(), self.m, "syndrome length mismatch");

        // Iteration 0: the channel hard decision may already match.
        for v in 0..self.n {
            self.total[v] = clamp(llr[v]);
        }
        self.hard_decision();
        if self.syndrome_matches(target_syndrome) {
            return DecodeResult {
                word: self.word.clone(),
                converged: true,
                iterations: 0,
                syndrome_matched: true,
            };
        }

        for e in 0..self.v2c.len() {
            self.v2c[e] = clamp(llr[self.cols[e] as usize]);
        }

        for iter in 1..=max_iter {
            // Check update: forward/backward partial products of tanh(m/2),
            // with the product sign flipped on checks whose target syndrome
            // bit is 1.
            for e in 0..self.v2c.len() {
                self.tanh_buf[e] = (0.5 * self.v2c[e]).tanh();
            }
            for c in 0..self.m {
                let lo = self.row_ptr[c];
                let hi = self.row_ptr[c + 1];
                let sign = if target_syndrome[c] & 1 == 1 { -1.0 } else { 1.0 };
                // Forward pass stores prefix products in c2v, then the
                // backward pass multiplies in the suffixes.
                let mut acc = sign;
                for e in lo..hi {
                    self.c2v[e] = acc;
                    acc *= self.tanh_buf[e];
                }
                let mut acc = 1.0;
                for e in (lo..hi).rev() {
                    self.c2v[e] *= acc;
                    acc *= self.tanh_buf[e];
                }
                for e in lo..hi {
                    let t = self.c2v[e].clamp(-0.999_999_999_999, 0.999_999_999_999);
                    self.c2v[e] = clamp(2.0 * t.atanh());
                }
            }

            // Variable update via totals minus the incoming edge message.
            for v in 0..self.n {
                let mut acc = llr[v];
                for &e in &self.var_edges[self.var_ptr[v]..self.var_ptr[v + 1]] {
                    acc += self.c2v[e as usize];
                }
                self.total[v] = acc;
            }
            for e in 0..self.v2c.len() {
                self.v2c[e] = clamp(self.total[self.cols[e] as usize] - self.c2v[e]);
            }

            self.hard_decision();
            if self.syndrome_matches(target_syndrome) {
                return DecodeResult {
                    word: self.word.clone(),
                    converged: true,
                    iterations: iter,
                    syndrome_matched: true,
                };
            }
        }

        DecodeResult {
            word: self.word.clone(),
            converged: false,
            iterations: max_iter,
            syndrome_matched: false,
        }
    }
}

/// One-shot convenience wrapper around [`BpDecoder`].
pub fn bp_decode(
    h: &SparseParityCheck,
    llr: &[f64],
    target_syndrome: &[u8],
    max_iter: usize,
) -> DecodeResult {
    BpDecoder::new(h).decode(llr, target_syndrome, max_iter)
}
