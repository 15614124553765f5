//! Scalar channel math used everywhere else: AWGN / binary-input AWGN /
//! multidimensional fading-channel capacities, reconciliation efficiency and
//! the repetition-scheme efficiency formula.
//!
//! All SNRs are linear (never dB) across every interface.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::rng::substream;
use rand_distr::{Distribution, StandardNormal};

/// Linear signal-to-noise ratio.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Snr(f64);

impl Snr {
    pub fn new(s: f64) -> Result<Self> {
        if !s.is_finite() || s < 0.0 {
            return Err(Error::domain(format!("SNR must be finite and >= 0, got {s}")));
        }
        Ok(Snr(s))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Which channel capacity an efficiency is quoted against. Low-rate tables
/// use the binary-input channel; key-rate computations use the Gaussian one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceChannel {
    Awgnc,
    Biawgnc,
}

/// Reconciliation efficiency β = R / C(s), together with the reference
/// channel its capacity was taken from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Efficiency {
    pub beta: f64,
    pub reference_channel: ReferenceChannel,
}

impl Efficiency {
    pub fn new(beta: f64, reference_channel: ReferenceChannel) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::domain(format!("efficiency must be in (0, 1], got {beta}")));
        }
        Ok(Efficiency { beta, reference_channel })
    }
}

/// Shannon capacity of the real AWGN channel, ½·log₂(1+s) bits per symbol.
pub fn awgnc_capacity(s: Snr) -> f64 {
    0.5 * (1.0 + s.value()).log2()
}

/// log2(1 + e^x) without overflow.
fn log2_1p_exp(x: f64) -> f64 {
    if x > 0.0 {
        x / std::f64::consts::LN_2 + (-x).exp().ln_1p() / std::f64::consts::LN_2
    } else {
        x.exp().ln_1p() / std::f64::consts::LN_2
    }
}

/// Gauss–Hermite nodes and weights for ∫ e^{−t²} f(t) dt, by Newton iteration
/// on the physicists' Hermite recurrence.
fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    let mut nodes = vec![(0.0f64, 0.0f64); n];
    let m = (n + 1) / 2;
    let mut z = 0.0f64;
    for i in 0..m {
        // Initial guesses (Numerical Recipes style).
        z = match i {
            0 => (2.0 * n as f64 + 1.0).sqrt() - 1.85575 * (2.0 * n as f64 + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * (n as f64).powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0].0,
            3 => 1.91 * z - 0.91 * nodes[1].0,
            _ => 2.0 * z - nodes[i - 2].0,
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            // Evaluate orthonormal Hermite polynomial and derivative at z.
            let mut p1 = PI.powf(-0.25);
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * n as f64).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / (pp * pp);
        nodes[i] = (z, w);
        nodes[n - 1 - i] = (-z, w);
    }
    nodes
}

fn gh_table(order: usize) -> &'static [(f64, f64)] {
    static GH63: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    static GH127: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    match order {
        63 => GH63.get_or_init(|| gauss_hermite(63)),
        127 => GH127.get_or_init(|| gauss_hermite(127)),
        _ => unreachable!("unsupported cached Gauss-Hermite order"),
    }
}

/// E[f(Z)] for Z ~ N(0,1) via Gauss–Hermite of the given cached order.
fn gaussian_expectation(order: usize, f: impl Fn(f64) -> f64) -> f64 {
    let sqrt2 = std::f64::consts::SQRT_2;
    gh_table(order)
        .iter()
        .map(|&(t, w)| w * f(sqrt2 * t))
        .sum::<f64>()
        / PI.sqrt()
}

fn biawgnc_integrand(sigma: f64) -> impl Fn(f64) -> f64 {
    let inv_var = 1.0 / (sigma * sigma);
    move |z: f64| log2_1p_exp(-2.0 * (1.0 + sigma * z) * inv_var)
}

/// Capacity of the binary-input AWGN channel (inputs ±1, noise variance 1/s).
///
/// C = 1 − E[log₂(1 + e^{−L})] with L the channel LLR under input +1.
/// Quadrature at orders 63 and 127 must agree to 10⁻⁷, with an adaptive
/// Simpson fallback otherwise; absolute error is kept below 10⁻⁶.
pub fn biawgnc_capacity(s: Snr) -> Result<f64> {
    let sv = s.value();
    if sv == 0.0 {
        return Ok(0.0);
    }
    let sigma = (1.0 / sv).sqrt();
    let f = biawgnc_integrand(sigma);
    let lo = gaussian_expectation(63, &f);
    let hi = gaussian_expectation(127, &f);
    let expect = if (lo - hi).abs() <= 1e-7 {
        hi
    } else {
        adaptive_gaussian_expectation(&f, 1e-9)?
    };
    Ok((1.0 - expect).clamp(0.0, 1.0))
}

/// Adaptive Simpson for E[f(Z)] over z ∈ [−12, 12]; the truncated normal
/// tail is below 10⁻³⁰.
fn adaptive_gaussian_expectation(f: &impl Fn(f64) -> f64, tol: f64) -> Result<f64> {
    let g = |z: f64| (-0.5 * z * z).exp() / (2.0 * PI).sqrt() * f(z);
    fn simpson(g: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (g(a) + 4.0 * g(0.5 * (a + b)) + g(b))
    }
    fn recurse(
        g: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        if depth == 0 {
            return Err(Error::Numeric("adaptive quadrature did not converge".into()));
        }
        let m = 0.5 * (a + b);
        let left = simpson(g, a, m);
        let right = simpson(g, m, b);
        if (left + right - whole).abs() <= 15.0 * tol {
            Ok(left + right + (left + right - whole) / 15.0)
        } else {
            Ok(recurse(g, a, m, left, tol * 0.5, depth - 1)?
                + recurse(g, m, b, right, tol * 0.5, depth - 1)?)
        }
    }
    let (a, b) = (-12.0, 12.0);
    recurse(&g, a, b, simpson(&g, a, b), tol, 50)
}

fn ln_gamma_half_int(two_a: u32) -> f64 {
    // ln Γ(two_a / 2) for two_a ≥ 1.
    let mut acc;
    let mut k;
    if two_a % 2 == 0 {
        acc = 0.0; // Γ(1) = 1
        k = 2;
    } else {
        acc = 0.5 * PI.ln(); // Γ(1/2) = √π
        k = 1;
    }
    while k + 2 <= two_a {
        acc += (k as f64 / 2.0).ln();
        k += 2;
    }
    acc
}

/// Density of the χ(d) distribution (the norm of a d-variate standard normal).
pub fn chi_pdf(d: u32, q: f64) -> f64 {
    if q <= 0.0 {
        return if d == 1 { (2.0 / PI).sqrt() } else { 0.0 };
    }
    let ln = (1.0 - d as f64 / 2.0) * std::f64::consts::LN_2
        + (d as f64 - 1.0) * q.ln()
        - 0.5 * q * q
        - ln_gamma_half_int(d);
    ln.exp()
}

/// Capacity of the d-dimensional virtual channel: a BIAWGN channel whose
/// per-block SNR is scaled by ‖x‖²/d with ‖x‖ ~ χ(d), the fading coefficient
/// being publicly known.
///
/// Quadrature over the χ(d) density for d ≤ 8; seeded Monte Carlo with
/// standard error ≤ 10⁻⁴ for larger d.
pub fn multidim_capacity(s: Snr, d: u32) -> Result<f64> {
    if d == 0 {
        return Err(Error::domain("dimension must be >= 1"));
    }
    if s.value() == 0.0 {
        return Ok(0.0);
    }
    if d <= 8 {
        // Composite Simpson over q; integrand is smooth and the χ tail dies
        // as e^{−q²/2}.
        let q_max = (d as f64).sqrt() + 10.0;
        let n = 2000usize; // panels (even)
        let h = q_max / n as f64;
        let eval = |q: f64| -> Result<f64> {
            let scaled = Snr::new(q * q / d as f64 * s.value())?;
            Ok(chi_pdf(d, q) * biawgnc_capacity(scaled)?)
        };
        let mut acc = eval(0.0)? + eval(q_max)?;
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * eval(i as f64 * h)?;
        }
        Ok(acc * h / 3.0)
    } else {
        let (value, stderr) = multidim_capacity_mc(s, d, 2_000_000, 0x6d63_6170)?;
        if stderr > 1e-4 {
            return Err(Error::Numeric(format!(
                "Monte Carlo capacity standard error {stderr:.2e} above 1e-4"
            )));
        }
        Ok(value)
    }
}

/// Monte Carlo estimate of [`multidim_capacity`] over explicit fading draws.
/// Returns (estimate, standard error). Also serves as the independent oracle
/// for the quadrature path in tests.
pub fn multidim_capacity_mc(s: Snr, d: u32, samples: usize, seed: u64) -> Result<(f64, f64)> {
    if d == 0 || samples == 0 {
        return Err(Error::domain("dimension and sample count must be >= 1"));
    }
    let mut rng = substream(seed, d as u64);
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for _ in 0..samples {
        // ‖x‖² as a sum of d squared normals.
        let mut q2 = 0.0;
        for _ in 0..d {
            let g: f64 = StandardNormal.sample(&mut rng);
            q2 += g * g;
        }
        let c = biawgnc_capacity(Snr::new(q2 / d as f64 * s.value())?)?;
        sum += c;
        sum2 += c * c;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum2 / n - mean * mean).max(0.0) / (n - 1.0);
    Ok((mean, var.sqrt()))
}

fn capacity_for(reference: ReferenceChannel, s: Snr) -> Result<f64> {
    match reference {
        ReferenceChannel::Awgnc => Ok(awgnc_capacity(s)),
        ReferenceChannel::Biawgnc => biawgnc_capacity(s),
    }
}

/// β(s) = R / C(s) against the given reference channel.
pub fn reconciliation_efficiency(rate: f64, s: Snr, reference: ReferenceChannel) -> Result<Efficiency> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::domain(format!("code rate must be in (0, 1), got {rate}")));
    }
    let c = capacity_for(reference, s)?;
    if c <= 0.0 {
        return Err(Error::domain("capacity is zero at this SNR"));
    }
    Efficiency::new(rate / c, reference)
}

/// Efficiency of a k-fold repetition of a code with efficiency β at SNR s,
/// operating at SNR s/k:  β′(s/k) = β(s)·log₂(1+s) / (k·log₂(1+s/k)).
pub fn repetition_efficiency(beta_base: Efficiency, s: Snr, k: u32) -> Result<Efficiency> {
    if k == 0 {
        return Err(Error::domain("repetition factor must be >= 1"));
    }
    if s.value() <= 0.0 {
        return Err(Error::domain("repetition efficiency needs s > 0"));
    }
    let sv = s.value();
    let kf = k as f64;
    let beta = beta_base.beta * (1.0 + sv).log2() / (kf * (1.0 + sv / kf).log2());
    Efficiency::new(beta, beta_base.reference_channel)
}
