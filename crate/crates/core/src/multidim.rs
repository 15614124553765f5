//! The multidimensional virtual-channel construction.
//!
//! For d ∈ {1, 2, 4, 8} the sender discloses the division-algebra ratio
//! r = u·x⁻¹; the receiver computes v = r·y and sees u through a BIAWGN
//! channel whose noise scale 1/‖x‖ is public (a fading channel with known
//! side information, ‖x‖ ~ χ(d)).
//!
//! For arbitrary d the same virtual channel is realized by a constrained
//! random orthogonal map Q with Q(x̂) = u, drawn as a chain of d Householder
//! reflections in O(d²) and disclosed as the d reflection eigenvectors
//! (dimensions d, d−1, …, 1). ‖x‖ is disclosed alongside, mirroring the
//! d ≤ 8 case where ‖r‖ carries it.

use crate::algebra;
use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Norm below which a Gaussian block is treated as degenerate and must be
/// redrawn by the caller.
pub const DEGENERATE_NORM: f64 = 1e-12;

/// Residual tolerance on the Householder constraint Q(x) = u.
pub const CHAIN_RESIDUAL_TOL: f64 = 1e-9;

/// A vertex of the scaled hypercube {−1/√d, +1/√d}^d; bit b maps to
/// (−1)^b/√d, so the point always has unit norm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypercubePoint {
    bits: Vec<u8>,
}

impl HypercubePoint {
    pub fn dim(&self) -> usize {
        self.bits.len()
    }

    pub fn coords(&self) -> Vec<f64> {
        let scale = 1.0 / (self.bits.len() as f64).sqrt();
        self.bits.iter().map(|&b| if b == 0 { scale } else { -scale }).collect()
    }
}

/// bit b → (−1)^b/√d.
pub fn bits_to_point(bits: &[u8]) -> Result<HypercubePoint> {
    if bits.is_empty() {
        return Err(Error::domain("hypercube point needs at least one bit"));
    }
    if bits.iter().any(|&b| b > 1) {
        return Err(Error::domain("bits must be 0 or 1"));
    }
    Ok(HypercubePoint { bits: bits.to_vec() })
}

pub fn point_to_bits(p: &HypercubePoint) -> Vec<u8> {
    p.bits.clone()
}

/// Receiver-side data of one d-block of the virtual channel.
#[derive(Debug, Clone)]
pub struct VirtualSymbols {
    /// Virtual-channel output, v = r·y.
    pub v: Vec<f64>,
    /// Publicly known fading coefficient ‖x‖.
    pub fading: f64,
    /// Physical noise variance σ².
    pub sigma2: f64,
}

/// Sender side of the division-algebra scheme: r = u·x⁻¹.
pub fn encode_rotation(u: &HypercubePoint, x: &[f64]) -> Result<Vec<f64>> {
    if u.dim() != x.len() {
        return Err(Error::domain("dimension mismatch between u and x"));
    }
    if algebra::norm(x) < DEGENERATE_NORM {
        return Err(Error::domain("degenerate signal block; resample"));
    }
    algebra::algebra_mul(&u.coords(), &algebra::algebra_inv(x)?)
}

/// Receiver side: v = r·y, with the fading coefficient ‖x‖ recovered from
/// ‖r‖ = 1/‖x‖ (the hypercube input has unit norm).
pub fn apply_rotation(r: &[f64], y: &[f64], sigma2: f64) -> Result<VirtualSymbols> {
    let v = algebra::algebra_mul(r, y)?;
    let nr = algebra::norm(r);
    if nr < DEGENERATE_NORM {
        return Err(Error::domain("degenerate rotation"));
    }
    Ok(VirtualSymbols { v, fading: 1.0 / nr, sigma2 })
}

/// Exact per-symbol LLRs for a ±1/√d input under Gaussian noise of variance
/// σ²/fading²: LLR_i = 2·(1/√d)·v_i·fading²/σ².
pub fn symbol_llrs(vs: &VirtualSymbols) -> Result<Vec<f64>> {
    if vs.fading <= 0.0 || vs.sigma2 <= 0.0 {
        return Err(Error::domain("fading and sigma2 must be positive"));
    }
    let d = vs.v.len() as f64;
    let scale = 2.0 * vs.fading * vs.fading / (vs.sigma2 * d.sqrt());
    Ok(vs.v.iter().map(|&vi| scale * vi).collect())
}

/// A random orthogonal map of ℝᵈ encoded as d Householder reflections.
///
/// `reflectors[k]` has dimension d−k and is the −1-eigenvector of the level-k
/// reflection, acting on the trailing d−k coordinates; an all-zero vector
/// stands for the identity at that level. The decomposition is unique, so the
/// serialized chain is a function of the map alone.
#[derive(Debug, Clone, PartialEq)]
pub struct HouseholderChain {
    reflectors: Vec<Vec<f64>>,
}

impl HouseholderChain {
    pub fn dim(&self) -> usize {
        self.reflectors.len()
    }

    pub fn reflectors(&self) -> &[Vec<f64>] {
        &self.reflectors
    }

    /// Wire format: u64 LE reflector count, then per reflector a u64 LE
    /// length and that many f64 LE coefficients, dimension descending d…1.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&(self.reflectors.len() as u64).to_le_bytes());
        for r in &self.reflectors {
            out.extend_from_slice(&(r.len() as u64).to_le_bytes());
            for &c in r {
                out.extend_from_slice(&c.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut pos = 0usize;
        let take_u64 = |pos: &mut usize| -> Result<u64> {
            let end = *pos + 8;
            let chunk = bytes
                .get(*pos..end)
                .ok_or_else(|| Error::Format("truncated Householder chain".into()))?;
            *pos = end;
            Ok(u64::from_le_bytes(chunk.try_into().unwrap()))
        };
        let d = take_u64(&mut pos)? as usize;
        let mut reflectors = Vec::with_capacity(d);
        for k in 0..d {
            let len = take_u64(&mut pos)? as usize;
            if len != d - k {
                return Err(Error::Format(format!(
                    "reflector {k} has length {len}, expected {}",
                    d - k
                )));
            }
            let mut r = Vec::with_capacity(len);
            for _ in 0..len {
                let end = pos + 8;
                let chunk = bytes
                    .get(pos..end)
                    .ok_or_else(|| Error::Format("truncated Householder chain".into()))?;
                pos = end;
                r.push(f64::from_le_bytes(chunk.try_into().unwrap()));
            }
            reflectors.push(r);
        }
        if pos != bytes.len() {
            return Err(Error::Format("trailing bytes after Householder chain".into()));
        }
        Ok(HouseholderChain { reflectors })
    }
}

fn reflect(w: &[f64], z: &mut [f64]) {
    // z <- z - 2 (w.z) w ; all-zero w is the identity.
    let dot: f64 = w.iter().zip(z.iter()).map(|(a, b)| a * b).sum();
    if dot == 0.0 {
        return;
    }
    for (zi, wi) in z.iter_mut().zip(w) {
        *zi -= 2.0 * dot * wi;
    }
}

/// Apply the chain: innermost (dimension-1) reflection first. Θ(d²).
pub fn apply_chain(chain: &HouseholderChain, z: &[f64]) -> Result<Vec<f64>> {
    let d = chain.dim();
    if z.len() != d {
        return Err(Error::domain(format!("vector has dim {}, chain {}", z.len(), d)));
    }
    let mut out = z.to_vec();
    for k in (0..d).rev() {
        reflect(&chain.reflectors[k], &mut out[k..]);
    }
    Ok(out)
}

/// Apply the transpose (= inverse): reflections in the opposite order.
pub fn apply_chain_transpose(chain: &HouseholderChain, z: &[f64]) -> Result<Vec<f64>> {
    let d = chain.dim();
    if z.len() != d {
        return Err(Error::domain(format!("vector has dim {}, chain {}", z.len(), d)));
    }
    let mut out = z.to_vec();
    for k in 0..d {
        reflect(&chain.reflectors[k], &mut out[k..]);
    }
    Ok(out)
}

/// One recursion level: choose g uniformly among unit vectors with
/// u·g = x·e₁, as g = (h + αu)/‖h + αu‖ for Gaussian h and a root α of the
/// induced quadratic. Returns the reflector sending e₁ to g.
fn constrained_reflector(x0: f64, u: &[f64], rng: &mut impl Rng) -> Option<Vec<f64>> {
    let m = u.len();
    let uu = algebra::norm_sq(u);
    let c = x0;
    for _ in 0..64 {
        let h: Vec<f64> = (0..m).map(|_| StandardNormal.sample(rng)).collect();
        let hh = algebra::norm_sq(&h);
        let hu: f64 = h.iter().zip(u).map(|(a, b)| a * b).sum();

        // (hu + α·uu)² = c²(hh + 2α·hu + α²·uu), i.e.
        // uu(uu − c²)·α² + 2hu(uu − c²)·α + (hu² − c²·hh) = 0
        let gap = uu - c * c;
        let a = uu * gap;
        let b = 2.0 * hu * gap;
        let q = hu * hu - c * c * hh;

        let mut roots: Vec<f64> = Vec::with_capacity(2);
        if a.abs() > 1e-300 * uu.max(1.0) && gap.abs() > 1e-14 * uu {
            let disc = b * b - 4.0 * a * q;
            if disc < 0.0 {
                continue; // h, u nearly collinear; measure zero, redraw
            }
            let sq = disc.sqrt();
            roots.push((-b + sq) / (2.0 * a));
            roots.push((-b - sq) / (2.0 * a));
        } else if b.abs() > 1e-300 {
            roots.push(-q / b);
        } else {
            continue;
        }

        // Squaring may introduce a spurious root with the wrong sign of
        // (h + αu)·u; keep only genuine solutions.
        let mut valid: Vec<Vec<f64>> = Vec::with_capacity(2);
        for &alpha in &roots {
            if !alpha.is_finite() {
                continue;
            }
            let g_raw: Vec<f64> = h.iter().zip(u).map(|(hi, ui)| hi + alpha * ui).collect();
            let gn = algebra::norm(&g_raw);
            if gn < 1e-12 {
                continue;
            }
            let gu: f64 = g_raw.iter().zip(u).map(|(a, b)| a * b).sum();
            if (gu / gn - c).abs() <= 1e-9 * (1.0 + c.abs()) {
                valid.push(g_raw.iter().map(|v| v / gn).collect());
            }
        }
        if valid.is_empty() {
            continue;
        }
        let g = if valid.len() == 1 {
            valid.pop().unwrap()
        } else {
            // α is chosen uniformly among the real solutions.
            valid.swap_remove(rng.gen_range(0..valid.len()))
        };

        // Reflector sending e₁ to g: w ∝ e₁ − g (zero if g = e₁ already).
        let mut w: Vec<f64> = g.iter().map(|v| -v).collect();
        w[0] += 1.0;
        let wn = algebra::norm(&w);
        if wn < 1e-12 {
            return Some(vec![0.0; m]);
        }
        w.iter_mut().for_each(|v| *v /= wn);
        return Some(w);
    }
    None
}

/// Draw a Haar-like random orthogonal map Q with the constraint Q(x) = u,
/// as a Householder chain, in O(d²). Requires ‖x‖ = ‖u‖ > 0.
pub fn draw_constrained_orthogonal(
    x: &[f64],
    u: &[f64],
    rng: &mut impl Rng,
) -> Result<HouseholderChain> {
    let d = x.len();
    if d == 0 || u.len() != d {
        return Err(Error::domain("x and u must have the same nonzero dimension"));
    }
    let (nx, nu) = (algebra::norm(x), algebra::norm(u));
    if nx < DEGENERATE_NORM || (nx - nu).abs() > 1e-8 * nx.max(nu) {
        return Err(Error::domain(format!("need ||x|| = ||u|| > 0, got {nx} vs {nu}")));
    }

    for _ in 0..16 {
        let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(d);
        let mut xc = x.to_vec();
        let mut uc = u.to_vec();
        let mut ok = true;
        while xc.len() > 1 {
            match constrained_reflector(xc[0], &uc, rng) {
                Some(w) => {
                    // S(u); its tail is the constraint target of the
                    // (m−1)-dimensional recursion, its head matches x·e₁.
                    reflect(&w, &mut uc);
                    reflectors.push(w);
                    xc.remove(0);
                    uc.remove(0);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        // Base case: sign choice.
        reflectors.push(if (xc[0] - uc[0]).abs() <= (xc[0] + uc[0]).abs() {
            vec![0.0]
        } else {
            vec![1.0]
        });

        let chain = HouseholderChain { reflectors };
        let mapped = apply_chain(&chain, x)?;
        let residual: f64 = mapped
            .iter()
            .zip(u)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if residual <= CHAIN_RESIDUAL_TOL * nu.max(1e-300) {
            return Ok(chain);
        }
        // Accumulated floating-point error beyond tolerance: reject, redraw.
    }
    Err(Error::Numeric("constrained orthogonal draw kept violating tolerance".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::norm;
    use crate::channel::{sample_frame, Direction};
    use crate::numerics::Snr;
    use crate::rng::substream;

    #[test]
    fn hypercube_round_trip_exhaustive_d8() {
        for pattern in 0u32..256 {
            let bits: Vec<u8> = (0..8).map(|i| ((pattern >> i) & 1) as u8).collect();
            let p = bits_to_point(&bits).unwrap();
            assert_eq!(point_to_bits(&p), bits);
            assert!((norm(&p.coords()) - 1.0).abs() < 1e-12);
        }
        let zeros = bits_to_point(&[0; 4]).unwrap();
        assert!(zeros.coords().iter().all(|&c| (c - 0.5).abs() < 1e-15));
    }

    #[test]
    fn rotation_defining_equation() {
        let mut rng = substream(10, 0);
        for &d in &[1usize, 2, 4, 8] {
            for _ in 0..200 {
                let bits: Vec<u8> = (0..d).map(|_| rng.gen_range(0..2u8)).collect();
                let u = bits_to_point(&bits).unwrap();
                let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
                if norm(&x) < 0.1 {
                    continue;
                }
                let r = encode_rotation(&u, &x).unwrap();
                // r·x = u
                let back = crate::algebra::algebra_mul(&r, &x).unwrap();
                for (a, b) in back.iter().zip(u.coords()) {
                    assert!((a - b).abs() < 1e-10);
                }
                // ||r||·||x|| = 1
                assert!((norm(&r) * norm(&x) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_noise_recovers_u_exactly() {
        let mut rng = substream(11, 0);
        for &d in &[1usize, 2, 4, 8] {
            let bits: Vec<u8> = (0..d).map(|_| rng.gen_range(0..2u8)).collect();
            let u = bits_to_point(&bits).unwrap();
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let r = encode_rotation(&u, &x).unwrap();
            let vs = apply_rotation(&r, &x, 1.0).unwrap();
            let llrs = symbol_llrs(&vs).unwrap();
            let decoded: Vec<u8> = llrs.iter().map(|&l| if l >= 0.0 { 0 } else { 1 }).collect();
            assert_eq!(decoded, bits);
            for (vi, ui) in vs.v.iter().zip(u.coords()) {
                assert!((vi - ui).abs() < 1e-10);
            }
            assert!((vs.fading - norm(&x)).abs() < 1e-10);
        }
    }

    #[test]
    fn llr_formula_points() {
        let vs = VirtualSymbols { v: vec![0.0], fading: 1.0, sigma2: 1.0 };
        assert_eq!(symbol_llrs(&vs).unwrap()[0], 0.0);
        let vs = VirtualSymbols { v: vec![1.0], fading: 1.0, sigma2: 1.0 };
        assert!((symbol_llrs(&vs).unwrap()[0] - 2.0).abs() < 1e-15);
    }

    /// Residual noise of the virtual channel: conditional per-component
    /// variance of (v − u) given ‖x‖ is σ²/‖x‖².
    #[test]
    fn virtual_noise_law_d8() {
        let d = 8;
        let blocks = 200_000;
        let s = Snr::new(0.1).unwrap();
        let frame = sample_frame(d * blocks, s, Direction::Direct, 21, 0).unwrap();
        let mut rng = substream(21, 1);
        let mut ratio_sum = 0.0;
        let mut count = 0usize;
        for b in 0..blocks {
            let x = &frame.x[b * d..(b + 1) * d];
            let y = &frame.y[b * d..(b + 1) * d];
            let bits: Vec<u8> = (0..d).map(|_| rng.gen_range(0..2u8)).collect();
            let u = bits_to_point(&bits).unwrap();
            let r = encode_rotation(&u, x).unwrap();
            let vs = apply_rotation(&r, y, frame.sigma2).unwrap();
            let n2 = vs.fading * vs.fading;
            for (vi, ui) in vs.v.iter().zip(u.coords()) {
                let w = vi - ui;
                ratio_sum += w * w * n2 / frame.sigma2;
                count += 1;
            }
        }
        let mean = ratio_sum / count as f64;
        assert!((mean - 1.0).abs() < 0.01, "normalized residual variance {mean}");
    }

    /// ‖x‖ over blocks follows χ(d); K-S test at significance 1e-3 for d = 8
    /// (even d gives a closed-form CDF).
    #[test]
    fn fading_is_chi_distributed() {
        let d = 8;
        let blocks = 100_000;
        let frame = sample_frame(d * blocks, Snr::new(1.0).unwrap(), Direction::Direct, 22, 0).unwrap();
        let mut norms: Vec<f64> = (0..blocks)
            .map(|b| norm(&frame.x[b * d..(b + 1) * d]))
            .collect();
        norms.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // chi(8) CDF = 1 - e^{-t}(1 + t + t²/2 + t³/6), t = q²/2
        let cdf = |q: f64| {
            let t = q * q / 2.0;
            1.0 - (-t).exp() * (1.0 + t + t * t / 2.0 + t * t * t / 6.0)
        };
        let n = norms.len() as f64;
        let mut d_stat: f64 = 0.0;
        for (i, &q) in norms.iter().enumerate() {
            let c = cdf(q);
            d_stat = d_stat.max((c - i as f64 / n).abs()).max(((i + 1) as f64 / n - c).abs());
        }
        let crit = ((-(0.5e-3f64).ln()) / 2.0).sqrt() / n.sqrt();
        assert!(d_stat < crit, "D = {d_stat}, crit = {crit}");
    }

    /// P(bit = 0 | LLR ≈ ℓ) must match the logistic 1/(1+e^{−ℓ}).
    #[test]
    fn llr_calibration() {
        let d = 8;
        let blocks = 125_000;
        let s = Snr::new(0.15).unwrap();
        let frame = sample_frame(d * blocks, s, Direction::Direct, 23, 0).unwrap();
        let mut rng = substream(23, 1);
        let mut bins = vec![(0u64, 0u64); 40]; // (count, zeros) over llr in [-4, 4)
        for b in 0..blocks {
            let x = &frame.x[b * d..(b + 1) * d];
            let y = &frame.y[b * d..(b + 1) * d];
            let bits: Vec<u8> = (0..d).map(|_| rng.gen_range(0..2u8)).collect();
            let u = bits_to_point(&bits).unwrap();
            let r = encode_rotation(&u, x).unwrap();
            let vs = apply_rotation(&r, y, frame.sigma2).unwrap();
            for (l, &bit) in symbol_llrs(&vs).unwrap().iter().zip(&bits) {
                if *l >= -4.0 && *l < 4.0 {
                    let idx = ((l + 4.0) / 0.2) as usize;
                    bins[idx].0 += 1;
                    bins[idx].1 += (bit == 0) as u64;
                }
            }
        }
        for (i, &(n, zeros)) in bins.iter().enumerate() {
            if n < 2000 {
                continue;
            }
            let ell = -4.0 + 0.2 * (i as f64 + 0.5);
            let p = 1.0 / (1.0 + (-ell).exp());
            let phat = zeros as f64 / n as f64;
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            // 4σ plus slack for the finite bin width
            assert!(
                (phat - p).abs() < 4.0 * sigma + 0.015,
                "bin {i}: phat={phat} p={p} n={n}"
            );
        }
    }

    #[test]
    fn base_case_sign_flip() {
        let mut rng = substream(30, 0);
        let chain = draw_constrained_orthogonal(&[3.0], &[-3.0], &mut rng).unwrap();
        assert_eq!(apply_chain(&chain, &[3.0]).unwrap(), vec![-3.0]);
        let chain = draw_constrained_orthogonal(&[3.0], &[3.0], &mut rng).unwrap();
        assert_eq!(apply_chain(&chain, &[3.0]).unwrap(), vec![3.0]);
    }

    #[test]
    fn constraint_and_isometry() {
        let mut rng = substream(31, 0);
        for &d in &[2usize, 3, 5, 8, 16, 64] {
            for _ in 0..20 {
                let x: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
                let mut u: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
                let scale = norm(&x) / norm(&u);
                u.iter_mut().for_each(|v| *v *= scale);
                let chain = draw_constrained_orthogonal(&x, &u, &mut rng).unwrap();
                let qx = apply_chain(&chain, &x).unwrap();
                let res: f64 = qx.iter().zip(&u).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                assert!(res <= 1e-9 * norm(&u), "d={d} res={res}");

                let w: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
                let qw = apply_chain(&chain, &w).unwrap();
                assert!((norm(&qw) - norm(&w)).abs() <= 1e-10 * norm(&w).max(1.0), "d={d}");
                // transpose inverts
                let back = apply_chain_transpose(&chain, &qw).unwrap();
                let err: f64 = back.iter().zip(&w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(err < 1e-10, "d={d} err={err}");
            }
        }
    }

    #[test]
    fn x_equals_u_is_not_forced_to_identity() {
        let mut rng = substream(32, 0);
        let x = vec![0.5f64; 4];
        let chain = draw_constrained_orthogonal(&x, &x, &mut rng).unwrap();
        let qx = apply_chain(&chain, &x).unwrap();
        for (a, b) in qx.iter().zip(&x) {
            assert!((a - b).abs() < 1e-9);
        }
        // still orthogonal on some other vector
        let w = vec![1.0, -2.0, 0.25, 3.0];
        let qw = apply_chain(&chain, &w).unwrap();
        assert!((norm(&qw) - norm(&w)).abs() < 1e-10);
        // and generically not the identity map
        let moved: f64 = qw.iter().zip(&w).map(|(a, b)| (a - b).abs()).sum();
        assert!(moved > 1e-6);
    }

    #[test]
    fn norm_mismatch_is_rejected() {
        let mut rng = substream(33, 0);
        assert!(draw_constrained_orthogonal(&[1.0, 0.0], &[2.0, 0.0], &mut rng).is_err());
        assert!(draw_constrained_orthogonal(&[0.0, 0.0], &[0.0, 0.0], &mut rng).is_err());
    }

    #[test]
    fn serialization_round_trip() {
        let mut rng = substream(34, 0);
        let x: Vec<f64> = (0..16).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mut u: Vec<f64> = (0..16).map(|_| StandardNormal.sample(&mut rng)).collect();
        let scale = norm(&x) / norm(&u);
        u.iter_mut().for_each(|v| *v *= scale);
        let chain = draw_constrained_orthogonal(&x, &u, &mut rng).unwrap();
        let bytes = chain.to_bytes();
        let back = HouseholderChain::from_bytes(&bytes).unwrap();
        assert_eq!(chain, back);
        assert_eq!(bytes, back.to_bytes());
        assert!(HouseholderChain::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    }

    /// For fixed x̂, u → chain → hard decisions on Q(x̂) recovers u, and the
    /// serialized chains are pairwise distinct: the disclosure determines Q
    /// and nothing else.
    #[test]
    fn chain_is_injective_in_u_d16() {
        use std::collections::HashSet;
        let d = 16;
        let mut rng = substream(35, 0);
        let x: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        let nx = norm(&x);
        let xhat: Vec<f64> = x.iter().map(|v| v / nx).collect();
        let mut seen = HashSet::new();
        for pattern in 0u32..(1 << 16) {
            let bits: Vec<u8> = (0..d).map(|i| ((pattern >> i) & 1) as u8).collect();
            let u = bits_to_point(&bits).unwrap();
            let chain = draw_constrained_orthogonal(&xhat, &u.coords(), &mut rng).unwrap();
            let qx = apply_chain(&chain, &xhat).unwrap();
            let rec: Vec<u8> = qx.iter().map(|&v| if v >= 0.0 { 0 } else { 1 }).collect();
            assert_eq!(rec, bits, "pattern {pattern}");
            assert!(seen.insert(chain.to_bytes()), "duplicate chain for {pattern}");
        }
    }
}
