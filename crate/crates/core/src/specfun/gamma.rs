// Lanczos approximation with Godfrey's coefficients (g = 607/128, 15 terms) and the
// reflection formula for Re z < 1/2.

use std::f64::consts::PI;

use super::near_integer;
use crate::{Complex64, Error, Result};

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_COEFFS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_746,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_8e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `ln Γ(z)` for `Re z >= 1/2` (principal log of the Lanczos sum; not the
/// analytically continued log-gamma branch).
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut sum = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (k, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_2PI + (z + 0.5) * t.ln() - t + sum.ln()
}

fn check_pole(z: Complex64) -> Result<()> {
    if z.re <= 0.5 {
        if let Some(n) = near_integer(z, 1e-14) {
            if n <= 0 {
                return Err(Error::pole("gamma", z));
            }
        }
    }
    Ok(())
}

/// Complex Gamma function.
pub fn complex_gamma(z: Complex64) -> Result<Complex64> {
    check_pole(z)?;
    if z.re < 0.5 {
        // Γ(z) = π / (sin(πz) Γ(1−z))
        let s = (PI * z).sin();
        Ok(PI / (s * ln_gamma_right(1.0 - z).exp()))
    } else {
        Ok(ln_gamma_right(z).exp())
    }
}

/// A logarithm of Γ(z) (some branch; its exponential is Γ(z)).
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    check_pole(z)?;
    if z.re < 0.5 {
        Ok(Complex64::new(PI, 0.0).ln() - (PI * z).sin().ln() - ln_gamma_right(1.0 - z))
    } else {
        Ok(ln_gamma_right(z))
    }
}

/// Reciprocal Gamma `1/Γ(z)`, entire; exactly zero at the poles of Γ.
pub fn rgamma(z: Complex64) -> Complex64 {
    match complex_gamma(z) {
        Ok(g) => 1.0 / g,
        Err(_) => Complex64::new(0.0, 0.0),
    }
}
