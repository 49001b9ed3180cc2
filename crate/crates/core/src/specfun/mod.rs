//! Complex special-function kernel.
//!
//! Every power in the crate goes through [`complex_pow`], which uses the principal
//! branch `arg z ∈ (−π, π]`.

mod bessel;
mod gamma;
mod zeta;

pub use bessel::{bessel_k, whittaker_w0, BesselK, BESSEL_CROSSOVER};
pub use gamma::{complex_gamma, ln_gamma, rgamma};
pub use zeta::{completed_zeta, hurwitz_zeta, riemann_zeta, EulerMaclaurin};

use crate::{Complex64, Error, Result};

/// Principal-branch power `z^a = exp(a·(log|z| + i·arg z))`, `arg z ∈ (−π, π]`.
pub fn complex_pow(z: Complex64, a: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        if a.re > 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        return Err(Error::domain(format!("0^{a} is undefined")));
    }
    Ok(pow_nonzero(z, a))
}

/// `z^a` for `z ≠ 0`; callers guarantee the precondition.
#[inline]
pub(crate) fn pow_nonzero(z: Complex64, a: Complex64) -> Complex64 {
    // num-complex's `ln` returns arg in (−π, π]; -0.0 imaginary parts map to −π,
    // so normalise the sign of zero first.
    let z = if z.im == 0.0 { Complex64::new(z.re, 0.0) } else { z };
    (a * z.ln()).exp()
}

/// `x^a` for real `x > 0`.
#[inline]
pub(crate) fn real_pow(x: f64, a: Complex64) -> Complex64 {
    (a * x.ln()).exp()
}

/// Generalised binomial coefficient `∏_{j<k}(a−j) / k!`, evaluated as a running product.
pub fn binomial_complex(a: Complex64, k: usize) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for j in 0..k {
        acc *= (a - j as f64) / (j + 1) as f64;
    }
    acc
}

/// Divisor sum `σ_w(m) = Σ_{d | m} d^w`.
pub fn divisor_sum(w: Complex64, m: u64) -> Complex64 {
    assert!(m >= 1, "divisor_sum needs m >= 1");
    let mut total = Complex64::new(0.0, 0.0);
    let mut d = 1u64;
    while d * d <= m {
        if m % d == 0 {
            total += real_pow(d as f64, w);
            let e = m / d;
            if e != d {
                total += real_pow(e as f64, w);
            }
        }
        d += 1;
    }
    total
}

/// True when `z` is (numerically) an integer.
pub(crate) fn near_integer(z: Complex64, tol: f64) -> Option<i64> {
    let r = z.re.round();
    if (z.re - r).abs() <= tol && z.im.abs() <= tol {
        Some(r as i64)
    } else {
        None
    }
}
