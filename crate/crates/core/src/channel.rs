//! Correlated Gaussian data of the CVQKD protocol and the mapping from
//! physical system parameters to an operating SNR.
//!
//! The physical model is the realistic trusted-detector one: fiber loss
//! `T = 10^(−α·L/10)`, excess noise ξ referred to the channel input, detector
//! efficiency η and electronic noise `V_elec` trusted (not attributed to the
//! eavesdropper), giving
//!
//! ```text
//! s = η·T·V_A / (1 + V_elec + η·T·ξ)
//! ```

use crate::error::{Error, Result};
use crate::numerics::Snr;
use crate::rng::substream;
use rand_distr::{Distribution, StandardNormal};

/// Physical CVQKD parameters, in shot-noise units where applicable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// Modulation variance V_A (shot-noise units).
    pub v_a: f64,
    /// Fiber length in km.
    pub distance_km: f64,
    /// Homodyne detection efficiency η.
    pub eta: f64,
    /// Electronic noise of the detection (shot-noise units).
    pub v_elec: f64,
    /// Excess noise referred to the channel input (shot-noise units).
    pub xi: f64,
    /// Fiber loss in dB/km.
    pub alpha_db_per_km: f64,
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::domain(format!("eta must be in (0, 1], got {}", self.eta)));
        }
        if self.v_a <= 0.0 || self.distance_km < 0.0 || self.v_elec < 0.0 || self.xi < 0.0
            || self.alpha_db_per_km < 0.0
        {
            return Err(Error::domain("negative noise, variance or length"));
        }
        Ok(())
    }

    /// Enforce the experimental constraint V_A ∈ [1, 100].
    pub fn validate_modulation_range(&self) -> Result<()> {
        self.validate()?;
        if !(1.0..=100.0).contains(&self.v_a) {
            return Err(Error::domain(format!(
                "modulation variance {} outside [1, 100]",
                self.v_a
            )));
        }
        Ok(())
    }

    /// Channel transmittance T = 10^(−α·L/10).
    pub fn transmittance(&self) -> f64 {
        10f64.powf(-self.alpha_db_per_km * self.distance_km / 10.0)
    }
}

/// Receiver-side SNR under the trusted-detector model.
pub fn snr_from_physical(p: &ChannelParams) -> Result<Snr> {
    p.validate()?;
    let t = p.transmittance();
    Snr::new(p.eta * t * p.v_a / (1.0 + p.v_elec + p.eta * t * p.xi))
}

/// Invert [`snr_from_physical`] for V_A at fixed channel: the modulation
/// variance that puts the receiver at SNR `s`.
pub fn va_for_snr(p: &ChannelParams, s: Snr) -> Result<f64> {
    p.validate()?;
    let t = p.transmittance();
    Ok(s.value() * (1.0 + p.v_elec + p.eta * t * p.xi) / (p.eta * t))
}

/// Which party's data the reconciled string is corrected toward.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Direct,
    Reverse,
}

/// One frame of correlated Gaussian data: y = x + z with x ~ N(0,1)ⁿ and
/// z ~ N(0, σ²)ⁿ, σ² = 1/s.
#[derive(Debug, Clone)]
pub struct CorrelatedFrame {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Virtual-channel noise variance σ² = 1/s.
    pub sigma2: f64,
    pub direction: Direction,
}

/// Sample a frame; deterministic given `(master_seed, frame_index)`.
/// Gaussians come from `rand_distr::StandardNormal` (ziggurat).
pub fn sample_frame(
    n: usize,
    s: Snr,
    direction: Direction,
    master_seed: u64,
    frame_index: u64,
) -> Result<CorrelatedFrame> {
    if n == 0 {
        return Err(Error::domain("frame length must be >= 1"));
    }
    if s.value() <= 0.0 {
        return Err(Error::domain("frame sampling needs s > 0"));
    }
    let sigma2 = 1.0 / s.value();
    let sigma = sigma2.sqrt();
    let mut rng = substream(master_seed, frame_index);
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let xi: f64 = StandardNormal.sample(&mut rng);
        let zi: f64 = StandardNormal.sample(&mut rng);
        x.push(xi);
        y.push(xi + sigma * zi);
    }
    Ok(CorrelatedFrame { x, y, sigma2, direction })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snr_formula_points() {
        // Noiseless lossless line.
        let p = ChannelParams {
            v_a: 3.0,
            distance_km: 0.0,
            eta: 1.0,
            v_elec: 0.0,
            xi: 0.0,
            alpha_db_per_km: 0.2,
        };
        assert!((snr_from_physical(&p).unwrap().value() - 3.0).abs() < 1e-15);

        let p = ChannelParams {
            v_a: 100.0,
            distance_km: 0.0,
            eta: 0.6,
            v_elec: 0.01,
            xi: 0.01,
            alpha_db_per_km: 0.2,
        };
        let s = snr_from_physical(&p).unwrap().value();
        assert!((s - 60.0 / (1.01 + 0.6 * 0.01)).abs() < 1e-12);
        assert!((s - 59.06).abs() < 5e-3);
    }

    #[test]
    fn fifty_km_costs_ten_db() {
        let mk = |l: f64| ChannelParams {
            v_a: 10.0,
            distance_km: l,
            eta: 0.6,
            v_elec: 0.01,
            xi: 0.0,
            alpha_db_per_km: 0.2,
        };
        let s0 = snr_from_physical(&mk(40.0)).unwrap().value();
        let s1 = snr_from_physical(&mk(90.0)).unwrap().value();
        assert!((s0 / s1 - 10.0).abs() < 1e-9);
    }

    #[test]
    fn snr_monotone_in_va_and_distance() {
        let base = ChannelParams {
            v_a: 10.0,
            distance_km: 25.0,
            eta: 0.6,
            v_elec: 0.01,
            xi: 0.01,
            alpha_db_per_km: 0.2,
        };
        let s = snr_from_physical(&base).unwrap().value();
        let more_va = ChannelParams { v_a: 11.0, ..base };
        let further = ChannelParams { distance_km: 30.0, ..base };
        assert!(snr_from_physical(&more_va).unwrap().value() > s);
        assert!(snr_from_physical(&further).unwrap().value() < s);
    }

    #[test]
    fn va_inversion_round_trips() {
        let p = ChannelParams {
            v_a: 10.0,
            distance_km: 80.0,
            eta: 0.6,
            v_elec: 0.01,
            xi: 0.01,
            alpha_db_per_km: 0.2,
        };
        let s = snr_from_physical(&p).unwrap();
        let va = va_for_snr(&p, s).unwrap();
        assert!((va - p.v_a).abs() < 1e-12);
    }

    #[test]
    fn frames_are_reproducible() {
        let s = Snr::new(1.0).unwrap();
        let a = sample_frame(1000, s, Direction::Direct, 11, 7).unwrap();
        let b = sample_frame(1000, s, Direction::Direct, 11, 7).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.y, b.y);
        let c = sample_frame(1000, s, Direction::Direct, 11, 8).unwrap();
        assert_ne!(a.x, c.x);
    }

    #[test]
    fn frame_statistics() {
        let n = 1_000_000;
        let s = Snr::new(1.0).unwrap();
        let f = sample_frame(n, s, Direction::Direct, 99, 0).unwrap();
        let var_y = f.y.iter().map(|v| v * v).sum::<f64>() / n as f64;
        assert!((var_y - 2.0).abs() < 0.01, "var(y) = {var_y}");
        let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
        for i in 0..n {
            sxy += f.x[i] * f.y[i];
            sxx += f.x[i] * f.x[i];
            syy += f.y[i] * f.y[i];
        }
        let rho = sxy / (sxx * syy).sqrt();
        assert!((rho - std::f64::consts::FRAC_1_SQRT_2).abs() < 0.005, "rho = {rho}");
    }

    /// Kolmogorov-Smirnov test of x against N(0,1) at significance 1e-3.
    #[test]
    fn x_is_standard_normal() {
        let n = 100_000;
        let f = sample_frame(n, Snr::new(0.5).unwrap(), Direction::Direct, 5, 3).unwrap();
        let mut xs = f.x.clone();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let phi = |x: f64| 0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2));
        let mut d_stat: f64 = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            let cdf = phi(x);
            let lo = i as f64 / n as f64;
            let hi = (i + 1) as f64 / n as f64;
            d_stat = d_stat.max((cdf - lo).abs()).max((hi - cdf).abs());
        }
        // K-S critical value at alpha = 1e-3: c = sqrt(-ln(alpha/2)/2) / sqrt(n)
        let crit = ((-(0.5e-3f64).ln()) / 2.0).sqrt() / (n as f64).sqrt();
        assert!(d_stat < crit, "D = {d_stat}, crit = {crit}");
    }

    // Abramowitz-Stegun 7.1.26, |error| < 1.5e-7; plenty for a K-S test.
    fn erf(x: f64) -> f64 {
        let sign = x.signum();
        let x = x.abs();
        let t = 1.0 / (1.0 + 0.3275911 * x);
        let y = 1.0
            - (((((1.061405429 * t - 1.453152027) * t) + 1.421413741) * t - 0.284496736) * t
                + 0.254829592)
                * t
                * (-x * x).exp();
        sign * y
    }
}
