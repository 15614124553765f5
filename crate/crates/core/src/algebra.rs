//! Multiplication, conjugation, inversion and norms in the division algebras
//! ℝ, ℂ, ℍ, 𝕆 (dimensions 1, 2, 4, 8), built by Cayley–Dickson doubling.
//!
//! Sign convention for the doubling step, with conjugation written `*`:
//!
//! ```text
//! (a, b) · (c, d) = (a·c − d*·b,  d·a + b·c*)
//! (a, b)*         = (a*, −b)
//! ```
//!
//! Several inequivalent octonion tables exist in the literature; the two
//! protocol parties only need to share one, and this one is frozen by a
//! unit test.

use crate::error::{Error, Result};

/// Dimensions in which the division structure exists.
pub const DIVISION_DIMENSIONS: [usize; 4] = [1, 2, 4, 8];

pub fn is_division_dimension(d: usize) -> bool {
    DIVISION_DIMENSIONS.contains(&d)
}

fn check_dim(d: usize) -> Result<()> {
    if is_division_dimension(d) {
        Ok(())
    } else {
        Err(Error::domain(format!("no division algebra in dimension {d}")))
    }
}

/// Squared Euclidean norm.
pub fn norm_sq(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

fn conj_in_place(a: &mut [f64]) {
    for x in &mut a[1..] {
        *x = -*x;
    }
}

/// Conjugate: negates every coordinate except the real part.
pub fn algebra_conj(a: &[f64]) -> Result<Vec<f64>> {
    check_dim(a.len())?;
    let mut out = a.to_vec();
    conj_in_place(&mut out);
    Ok(out)
}

// Recursive Cayley-Dickson product on equal-length halves. `scratch` unused;
// dimensions are tiny so stack buffers suffice.
fn cd_mul(a: &[f64], b: &[f64], out: &mut [f64]) {
    let d = a.len();
    if d == 1 {
        out[0] = a[0] * b[0];
        return;
    }
    let h = d / 2;
    let (a1, a2) = a.split_at(h);
    let (c1, c2) = b.split_at(h);

    let mut t1 = [0.0f64; 4];
    let mut t2 = [0.0f64; 4];
    let mut buf = [0.0f64; 4];

    // first half: a1*c1 - conj(c2)*a2
    cd_mul(a1, c1, &mut t1[..h]);
    buf[..h].copy_from_slice(c2);
    conj_in_place(&mut buf[..h]);
    cd_mul(&buf[..h], a2, &mut t2[..h]);
    for i in 0..h {
        out[i] = t1[i] - t2[i];
    }

    // second half: c2*a1 + a2*conj(c1)
    cd_mul(c2, a1, &mut t1[..h]);
    buf[..h].copy_from_slice(c1);
    conj_in_place(&mut buf[..h]);
    cd_mul(a2, &buf[..h], &mut t2[..h]);
    for i in 0..h {
        out[h + i] = t1[i] + t2[i];
    }
}

/// Cayley–Dickson product of two elements of the same division algebra.
pub fn algebra_mul(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(Error::domain(format!(
            "dimension mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    check_dim(a.len())?;
    let mut out = vec![0.0; a.len()];
    cd_mul(a, b, &mut out);
    Ok(out)
}

/// Multiplicative inverse a⁻¹ = a* / ‖a‖².
pub fn algebra_inv(a: &[f64]) -> Result<Vec<f64>> {
    check_dim(a.len())?;
    let n2 = norm_sq(a);
    if n2 == 0.0 {
        return Err(Error::domain("cannot invert the zero element"));
    }
    let mut out = a.to_vec();
    conj_in_place(&mut out);
    for x in &mut out {
        *x /= n2;
    }
    Ok(out)
}

/// The unit element (1, 0, …, 0).
pub fn identity(d: usize) -> Result<Vec<f64>> {
    check_dim(d)?;
    let mut e = vec![0.0; d];
    e[0] = 1.0;
    Ok(e)
}
