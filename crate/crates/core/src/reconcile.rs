//! End-to-end reconciliation frames and Monte Carlo frame-error-rate scans.
//!
//! A frame simulates both roles in one process: the side holding the
//! reference data draws a uniform bit string u, discloses the rotation that
//! maps its Gaussian block onto u together with the syndrome of u and a
//! verification hash; the other side builds LLRs for the virtual channel and
//! decodes into the disclosed coset.

use crate::channel::{sample_frame, Direction};
use crate::error::{Error, Result};
use crate::ldpc::{repetition_combine, syndrome, BpDecoder, SparseParityCheck};
use crate::multidim::{
    apply_chain, apply_rotation, bits_to_point, draw_constrained_orthogonal, encode_rotation,
    symbol_llrs, VirtualSymbols,
};
use crate::numerics::{awgnc_capacity, biawgnc_capacity, Snr};
use crate::rng::{fnv1a64, substream};
use rand::Rng;
use rayon::prelude::*;
use std::fmt::Write as _;

/// How the rotation mapping the Gaussian block onto the hypercube word is
/// realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Division-algebra ratio r = u·x⁻¹; only d ∈ {1, 2, 4, 8}.
    DivisionAlgebra,
    /// Constrained Householder chain; any d ≥ 1.
    Householder,
}

/// Everything one frame needs. `master_seed`/`frame_index` pin all
/// randomness, so a frame is a pure function of this struct.
#[derive(Debug, Clone, Copy)]
pub struct FrameConfig<'a> {
    pub code: &'a SparseParityCheck,
    pub d: usize,
    pub scheme: Scheme,
    pub s: Snr,
    pub direction: Direction,
    pub max_iter: usize,
    pub master_seed: u64,
    pub frame_index: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameResult {
    /// Decoder converged and the verification hash matched.
    pub success: bool,
    pub iterations: usize,
    /// Bit disagreements with the reference word when the decoder converged.
    pub residual_bit_errors: usize,
    /// Syndrome bits + shortened bits + 64 hash bits.
    pub disclosed_bits: usize,
}

const PROTOCOL_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

fn frame_hash(hash_seed: u64, word: &[u8]) -> u64 {
    let mut buf = Vec::with_capacity(word.len() + 8);
    buf.extend_from_slice(&hash_seed.to_le_bytes());
    buf.extend_from_slice(word);
    fnv1a64(&buf)
}

fn validate(cfg: &FrameConfig) -> Result<usize> {
    if cfg.d == 0 {
        return Err(Error::domain("dimension must be >= 1"));
    }
    if cfg.scheme == Scheme::DivisionAlgebra && !crate::algebra::DIVISION_DIMENSIONS.contains(&cfg.d)
    {
        return Err(Error::domain(format!(
            "division-algebra scheme needs d in {{1, 2, 4, 8}}, got {}",
            cfg.d
        )));
    }
    let k_rep = cfg.code.repetition.max(1) as usize;
    let channel_len = cfg.code.n * k_rep;
    if channel_len % cfg.d != 0 {
        return Err(Error::domain(format!(
            "channel length {channel_len} not divisible by d = {}",
            cfg.d
        )));
    }
    if cfg.max_iter == 0 {
        return Err(Error::domain("max_iter must be >= 1"));
    }
    Ok(channel_len)
}

/// Run one reconciliation frame.
pub fn run_frame(cfg: &FrameConfig) -> Result<FrameResult> {
    let mut decoder = BpDecoder::new(cfg.code);
    run_frame_with(cfg, &mut decoder)
}

/// Like [`run_frame`] but reusing a decoder workspace across frames of the
/// same code.
pub fn run_frame_with(cfg: &FrameConfig, decoder: &mut BpDecoder) -> Result<FrameResult> {
    let channel_len = validate(cfg)?;
    let n = cfg.code.n;
    let k_rep = cfg.code.repetition.max(1) as usize;
    let sigma2 = 1.0 / cfg.s.value();

    let mut proto = substream(cfg.master_seed ^ PROTOCOL_SALT, cfg.frame_index);
    let u: Vec<u8> = (0..n).map(|_| proto.gen_range(0..2u8)).collect();
    let mask: Vec<u8> = if k_rep > 1 {
        (0..channel_len).map(|_| proto.gen_range(0..2u8)).collect()
    } else {
        vec![0u8; channel_len]
    };
    let hash_seed: u64 = proto.gen();

    // Channel symbols carry u repeated k_rep times under the public mask.
    let mut expanded = vec![0u8; channel_len];
    for i in 0..n {
        for j in 0..k_rep {
            expanded[i * k_rep + j] = u[i] ^ mask[i * k_rep + j];
        }
    }

    let frame = sample_frame(channel_len, cfg.s, cfg.direction, cfg.master_seed, cfg.frame_index)?;

    // In the reverse direction the rotation maps y onto u, and the decoding
    // side observes (1+σ²)·x = y + n' with n' independent of y and of
    // variance (1+σ²)σ². Direct is the plain y = x + z picture.
    let (reference, observed, sigma2_eff, obs_scale): (&[f64], &[f64], f64, f64) =
        match cfg.direction {
            Direction::Direct => (&frame.x, &frame.y, sigma2, 1.0),
            Direction::Reverse => (&frame.y, &frame.x, (1.0 + sigma2) * sigma2, 1.0 + sigma2),
        };

    let mut channel_llr = Vec::with_capacity(channel_len);
    for (b, bits) in expanded.chunks(cfg.d).enumerate() {
        let lo = b * cfg.d;
        let hi = lo + cfg.d;
        let point = bits_to_point(bits)?;
        let rblk = &reference[lo..hi];
        let oblk: Vec<f64> = observed[lo..hi].iter().map(|v| v * obs_scale).collect();
        let vs: VirtualSymbols = match cfg.scheme {
            Scheme::DivisionAlgebra => {
                let r = encode_rotation(&point, rblk)?;
                apply_rotation(&r, &oblk, sigma2_eff)?
            }
            Scheme::Householder => {
                let nr = crate::algebra::norm(rblk);
                if nr < crate::multidim::DEGENERATE_NORM {
                    return Err(Error::domain("degenerate reference block; resample frame"));
                }
                let hat: Vec<f64> = rblk.iter().map(|v| v / nr).collect();
                let chain = draw_constrained_orthogonal(&hat, &point.coords(), &mut proto)?;
                let rotated = apply_chain(&chain, &oblk)?;
                VirtualSymbols {
                    v: rotated.iter().map(|v| v / nr).collect(),
                    fading: nr,
                    sigma2: sigma2_eff,
                }
            }
        };
        channel_llr.extend(symbol_llrs(&vs)?);
    }

    let mut llr = repetition_combine(&channel_llr, &mask, k_rep)?;
    for &v in &cfg.code.punctured {
        llr[v as usize] = 0.0;
    }
    for &v in &cfg.code.shortened {
        llr[v as usize] = if u[v as usize] == 0 { 1e3 } else { -1e3 };
    }

    let target = syndrome(cfg.code, &u)?;
    let hash = frame_hash(hash_seed, &u);
    let r = decoder.decode(&llr, &target, cfg.max_iter);

    let residual_bit_errors = if r.converged {
        r.word.iter().zip(&u).filter(|(a, b)| a != b).count()
    } else {
        0
    };
    let success = r.converged && frame_hash(hash_seed, &r.word) == hash;
    Ok(FrameResult {
        success,
        iterations: r.iterations,
        residual_bit_errors,
        disclosed_bits: cfg.code.m + cfg.code.shortened.len() + 64,
    })
}

/// Grid description for [`fer_scan`].
#[derive(Debug, Clone)]
pub struct ScanConfig<'a> {
    pub code: &'a SparseParityCheck,
    pub d: usize,
    pub scheme: Scheme,
    pub direction: Direction,
    pub snr_grid: Vec<f64>,
    pub frames_per_point: usize,
    pub max_iter: usize,
    pub master_seed: u64,
}

/// One grid point of a scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub snr: f64,
    pub frames: usize,
    pub failures: usize,
    pub fer: f64,
    pub fer_lo: f64,
    pub fer_hi: f64,
    /// Rate derived from actually disclosed bits, repetition included.
    pub rate_effective: f64,
    pub beta_biawgn: f64,
    pub beta_awgn: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanTable {
    pub points: Vec<ScanPoint>,
}

/// 95% Wilson score interval for `f` failures out of `n`.
fn wilson(f: usize, n: usize) -> (f64, f64) {
    let z = 1.959_963_984_540_054f64;
    let nf = n as f64;
    let p = f as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Monte Carlo FER over an SNR grid; frames are independent jobs and the
/// result is a pure function of the config, whatever the worker count.
pub fn fer_scan(cfg: &ScanConfig) -> Result<ScanTable> {
    if cfg.frames_per_point == 0 {
        return Err(Error::domain("need at least one frame per grid point"));
    }
    let k_rep = cfg.code.repetition.max(1) as usize;
    let n_channel = cfg.code.n * k_rep;
    let p = cfg.code.punctured.len();
    let sh = cfg.code.shortened.len();
    // Key bits recovered = k - s; channel symbols spent = (n - p - s)·k_rep.
    let rate_effective =
        (cfg.code.k() as f64 - sh as f64) / ((cfg.code.n - p - sh) as f64 * k_rep as f64);
    let _ = n_channel;

    let mut points = Vec::with_capacity(cfg.snr_grid.len());
    for (pi, &sv) in cfg.snr_grid.iter().enumerate() {
        let s = Snr::new(sv)?;
        let failures: usize = (0..cfg.frames_per_point)
            .into_par_iter()
            .map(|fi| {
                let fc = FrameConfig {
                    code: cfg.code,
                    d: cfg.d,
                    scheme: cfg.scheme,
                    s,
                    direction: cfg.direction,
                    max_iter: cfg.max_iter,
                    master_seed: cfg.master_seed,
                    frame_index: ((pi as u64) << 32) | fi as u64,
                };
                match run_frame(&fc) {
                    Ok(r) => {
                        debug_assert!(!r.success || r.residual_bit_errors == 0);
                        usize::from(!r.success)
                    }
                    Err(_) => 1,
                }
            })
            .sum();
        let fer = failures as f64 / cfg.frames_per_point as f64;
        let (fer_lo, fer_hi) = wilson(failures, cfg.frames_per_point);
        let cb = biawgnc_capacity(s)?;
        let ca = awgnc_capacity(s);
        points.push(ScanPoint {
            snr: sv,
            frames: cfg.frames_per_point,
            failures,
            fer,
            fer_lo,
            fer_hi,
            rate_effective,
            beta_biawgn: if cb > 0.0 { rate_effective / cb } else { f64::INFINITY },
            beta_awgn: if ca > 0.0 { rate_effective / ca } else { f64::INFINITY },
        });
    }
    Ok(ScanTable { points })
}

impl ScanTable {
    /// Smallest grid SNR whose measured FER is ≤ 1/2.
    pub fn threshold(&self) -> Option<f64> {
        let mut sorted: Vec<&ScanPoint> = self.points.iter().collect();
        sorted.sort_by(|a, b| a.snr.partial_cmp(&b.snr).unwrap());
        sorted.iter().find(|p| p.fer <= 0.5).map(|p| p.snr)
    }

    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("snr,frames,failures,fer,fer_lo,fer_hi,rate_effective,beta_biawgn,beta_awgn\n");
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                p.snr,
                p.frames,
                p.failures,
                p.fer,
                p.fer_lo,
                p.fer_hi,
                p.rate_effective,
                p.beta_biawgn,
                p.beta_awgn
            )
            .unwrap();
        }
        out
    }
}
