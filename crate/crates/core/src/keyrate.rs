//! Asymptotic collective-attack secret key rates for the Gaussian protocol
//! with homodyne detection, reverse reconciliation and a trusted detector.
//!
//! K = β·I(x;y) − χ(y;E), with the Holevo term computed from the two-mode
//! Gaussian covariance matrix through its symplectic eigenvalues. Excess
//! noise ξ is referred to the channel input; detector loss and electronic
//! noise are trusted, i.e. not attributed to the eavesdropper.

use crate::channel::{snr_from_physical, va_for_snr, ChannelParams};
use crate::error::{Error, Result};
use crate::numerics::{Efficiency, ReferenceChannel, Snr};
use std::fmt::Write as _;

/// Channel, detector and reconciliation quality; direction is fixed to
/// reverse reconciliation.
#[derive(Debug, Clone, Copy)]
pub struct SecurityModel {
    /// Reconciliation efficiency against the AWGNC (Gaussian) capacity.
    pub beta: Efficiency,
    pub params: ChannelParams,
}

/// One point of a key-rate curve. `key_rate` may be ≤ 0, meaning no secure
/// key at these parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRatePoint {
    pub distance_km: f64,
    pub s: Snr,
    pub v_a: f64,
    /// Secret bits per pulse.
    pub key_rate: f64,
    /// Rate of the code realizing the point, when one is pinned.
    pub code_rate: Option<f64>,
    pub beta: f64,
}

impl KeyRatePoint {
    pub fn secure(&self) -> bool {
        self.key_rate > 0.0
    }
}

fn noise_terms(p: &ChannelParams) -> (f64, f64, f64, f64) {
    let t = p.transmittance();
    let chi_line = 1.0 / t - 1.0 + p.xi;
    let chi_hom = (1.0 + p.v_elec) / p.eta - 1.0;
    let chi_tot = chi_line + chi_hom / t;
    (t, chi_line, chi_hom, chi_tot)
}

/// Mutual information of the quadrature data in bits per pulse,
/// ½·log₂((V + χ_tot)/(1 + χ_tot)); identical to ½·log₂(1 + s) for the SNR
/// of [`snr_from_physical`].
pub fn mutual_information(p: &ChannelParams) -> Result<f64> {
    p.validate()?;
    let (_, _, _, chi_tot) = noise_terms(p);
    let v = p.v_a + 1.0;
    Ok(0.5 * ((v + chi_tot) / (1.0 + chi_tot)).log2())
}

/// G(x) = (x+1)log₂(x+1) − x·log₂x, the bosonic entropy kernel.
fn g(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (x + 1.0) * (x + 1.0).log2() - x * x.log2()
}

/// Square root of λ² = ½[sum ± √(sum² − 4·prod)], both branches, with the
/// uncertainty-principle floor enforced.
fn symplectic_pair(sum: f64, prod: f64, what: &str) -> Result<(f64, f64)> {
    let disc = sum * sum - 4.0 * prod;
    if disc < -1e-9 * sum.abs().max(1.0) {
        return Err(Error::ModelViolation(format!(
            "negative discriminant {disc} for {what} symplectic pair"
        )));
    }
    let sq = disc.max(0.0).sqrt();
    let hi2 = 0.5 * (sum + sq);
    let lo2 = 0.5 * (sum - sq);
    if lo2 < -1e-9 {
        return Err(Error::ModelViolation(format!("negative {what} eigenvalue squared {lo2}")));
    }
    let hi = hi2.max(0.0).sqrt();
    let lo = lo2.max(0.0).sqrt();
    for l in [hi, lo] {
        if l < 1.0 - 1e-9 {
            return Err(Error::ModelViolation(format!(
                "{what} symplectic eigenvalue {l} below the vacuum floor"
            )));
        }
    }
    Ok((hi, lo))
}

/// Holevo bound χ(y;E) on the eavesdropper's information about the
/// receiver's measurement, in bits per pulse.
pub fn holevo_bound(p: &ChannelParams) -> Result<f64> {
    p.validate()?;
    let (t, chi_line, chi_hom, chi_tot) = noise_terms(p);
    let v = p.v_a + 1.0;

    let a = v * v * (1.0 - 2.0 * t) + 2.0 * t + t * t * (v + chi_line) * (v + chi_line);
    let b = t * t * (v * chi_line + 1.0) * (v * chi_line + 1.0);
    let (l1, l2) = symplectic_pair(a, b, "channel")?;

    let sqrt_b = b.max(0.0).sqrt();
    let denom = t * (v + chi_tot);
    let c = (v * sqrt_b + t * (v + chi_line) + a * chi_hom) / denom;
    let d = sqrt_b * (v + sqrt_b * chi_hom) / denom;
    let (l3, l4) = symplectic_pair(c, d, "conditional")?;

    let chi = g((l1 - 1.0) / 2.0) + g((l2 - 1.0) / 2.0)
        - g((l3 - 1.0) / 2.0)
        - g((l4 - 1.0) / 2.0);
    Ok(chi)
}

/// K = β·I − χ at the model's parameters; reported even when negative.
pub fn secret_key_rate(m: &SecurityModel) -> Result<KeyRatePoint> {
    if m.beta.reference_channel != ReferenceChannel::Awgnc {
        return Err(Error::domain(
            "key-rate efficiency must be referenced to the AWGNC capacity",
        ));
    }
    m.params.validate_modulation_range()?;
    let i = mutual_information(&m.params)?;
    let chi = holevo_bound(&m.params)?;
    Ok(KeyRatePoint {
        distance_km: m.params.distance_km,
        s: snr_from_physical(&m.params)?,
        v_a: m.params.v_a,
        key_rate: m.beta.beta * i - chi,
        code_rate: None,
        beta: m.beta.beta,
    })
}

const VA_MIN: f64 = 1.0;
const VA_MAX: f64 = 100.0;

fn key_rate_at_va(beta: Efficiency, base: &ChannelParams, v_a: f64) -> f64 {
    let m = SecurityModel { beta, params: ChannelParams { v_a, ..*base } };
    secret_key_rate(&m).map(|p| p.key_rate).unwrap_or(f64::NEG_INFINITY)
}

/// Modulation variance in [1, 100] maximizing K, by a coarse grid pre-scan
/// and golden-section refinement to ΔV_A ≤ 10⁻³. `base.v_a` is ignored.
pub fn optimize_va(beta: Efficiency, base: &ChannelParams) -> Result<KeyRatePoint> {
    let probe = ChannelParams { v_a: 1.0, ..*base };
    probe.validate()?;

    // Coarse scan guards against secondary maxima before refining.
    let grid_n = 200;
    let mut best_i = 0;
    let mut best_k = f64::NEG_INFINITY;
    for i in 0..=grid_n {
        let va = VA_MIN + (VA_MAX - VA_MIN) * i as f64 / grid_n as f64;
        let k = key_rate_at_va(beta, base, va);
        if k > best_k {
            best_k = k;
            best_i = i;
        }
    }
    let step = (VA_MAX - VA_MIN) / grid_n as f64;
    let mut lo = (VA_MIN + step * (best_i as f64 - 1.0)).max(VA_MIN);
    let mut hi = (VA_MIN + step * (best_i as f64 + 1.0)).min(VA_MAX);

    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = key_rate_at_va(beta, base, x1);
    let mut f2 = key_rate_at_va(beta, base, x2);
    while hi - lo > 1e-3 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = key_rate_at_va(beta, base, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = key_rate_at_va(beta, base, x2);
        }
    }
    let va = (0.5 * (lo + hi)).clamp(VA_MIN, VA_MAX);
    let m = SecurityModel { beta, params: ChannelParams { v_a: va, ..*base } };
    secret_key_rate(&m)
}

/// A code pinned to its operating SNR: design rate, AWGNC efficiency there,
/// and the SNR the efficiency was measured at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeOperatingPoint {
    pub rate: f64,
    pub beta: f64,
    pub s: f64,
}

/// The built-in list of low-rate operating points used for the long-distance
/// key-rate envelope, highest SNR first.
pub fn builtin_operating_points() -> Vec<CodeOperatingPoint> {
    vec![
        CodeOperatingPoint { rate: 0.5, beta: 0.936, s: 1.097 },
        CodeOperatingPoint { rate: 0.1, beta: 0.931, s: 0.161 },
        CodeOperatingPoint { rate: 0.05, beta: 0.958, s: 0.075 },
        CodeOperatingPoint { rate: 0.02, beta: 0.969, s: 0.029 },
        CodeOperatingPoint { rate: 0.01, beta: 0.966, s: 0.0145 },
        CodeOperatingPoint { rate: 0.005, beta: 0.959, s: 0.00725 },
    ]
}

/// Envelope curve over a set of fixed-SNR codes: at each distance, each code
/// demands the V_A that puts the receiver at its pinned SNR; the point
/// reports the best K among codes whose V_A fits in [1, 100]. Distances with
/// no feasible code or no positive K come back with `key_rate` ≤ 0 (V_A and
/// code of the least-bad option, or NaN code fields when nothing fits).
pub fn keyrate_curve(
    codes: &[CodeOperatingPoint],
    base: &ChannelParams,
    distances_km: &[f64],
) -> Result<Vec<KeyRatePoint>> {
    if codes.is_empty() {
        return Err(Error::domain("need at least one code operating point"));
    }
    let mut out = Vec::with_capacity(distances_km.len());
    for &l in distances_km {
        let at_l = ChannelParams { distance_km: l, ..*base };
        let mut best: Option<KeyRatePoint> = None;
        for c in codes {
            let s = Snr::new(c.s)?;
            let va = va_for_snr(&at_l, s)?;
            if !(VA_MIN..=VA_MAX).contains(&va) {
                continue;
            }
            let beta = Efficiency::new(c.beta, ReferenceChannel::Awgnc)?;
            let m = SecurityModel { beta, params: ChannelParams { v_a: va, ..at_l } };
            let mut point = secret_key_rate(&m)?;
            point.code_rate = Some(c.rate);
            if best.as_ref().map_or(true, |b| point.key_rate > b.key_rate) {
                best = Some(point);
            }
        }
        out.push(best.unwrap_or(KeyRatePoint {
            distance_km: l,
            s: Snr::new(0.0)?,
            v_a: f64::NAN,
            key_rate: f64::NEG_INFINITY,
            code_rate: None,
            beta: f64::NAN,
        }));
    }
    Ok(out)
}

/// CSV for curve outputs: distance_km, snr, va_opt, key_rate, code_rate, beta.
pub fn curve_to_csv(points: &[KeyRatePoint]) -> String {
    let mut out = String::from("distance_km,snr,va_opt,key_rate,code_rate,beta\n");
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            p.distance_km,
            p.s.value(),
            p.v_a,
            p.key_rate,
            p.code_rate.map_or(String::from(""), |r| r.to_string()),
            p.beta
        )
        .unwrap();
    }
    out
}
