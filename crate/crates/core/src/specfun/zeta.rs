use std::f64::consts::PI;
use std::sync::OnceLock;

use super::{complex_gamma, near_integer, pow_nonzero};
use crate::{Complex64, Error, Result};

const MAX_ORDER: usize = 60;

/// `B_{2j} / (2j)!` for `j = 1..=MAX_ORDER`, via `(−1)^{j+1} 2 ζ(2j) / (2π)^{2j}`.
fn bernoulli_ratios() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (1..=MAX_ORDER)
            .map(|j| {
                let two_j = 2 * j as i32;
                let zeta = match j {
                    1 => PI * PI / 6.0,
                    2 => PI.powi(4) / 90.0,
                    3 => PI.powi(6) / 945.0,
                    _ => (1..2000).rev().map(|k| (k as f64).powi(-two_j)).sum(),
                };
                let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                // (2π)^{2j} grows past f64 range only far beyond MAX_ORDER
                sign * 2.0 * zeta / (2.0 * PI).powi(two_j)
            })
            .collect()
    })
}

/// Euler–Maclaurin evaluator for `ζ` and the Hurwitz zeta function.
///
/// `cutoff` is the number of terms summed directly (raised automatically when the
/// exponent is large); `order` is the number of Bernoulli corrections.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerMaclaurin {
    pub cutoff: usize,
    pub order: usize,
}

impl Default for EulerMaclaurin {
    fn default() -> Self {
        EulerMaclaurin { cutoff: 40, order: 20 }
    }
}

impl EulerMaclaurin {
    pub fn new(cutoff: usize, order: usize) -> Self {
        assert!(order <= MAX_ORDER, "order at most {MAX_ORDER}");
        EulerMaclaurin { cutoff, order }
    }

    /// Riemann zeta `ζ(u)`, `u ≠ 1`. For `Re u < 0` the reflection formula avoids
    /// the growth of the direct partial sums.
    pub fn riemann(&self, u: Complex64) -> Result<Complex64> {
        if (u - 1.0).norm() < 1e-15 {
            return Err(Error::pole("zeta", u));
        }
        if u.re < 0.0 {
            if let Some(n) = near_integer(u, 0.0) {
                if n % 2 == 0 {
                    return Ok(Complex64::new(0.0, 0.0));
                }
            }
            // ζ(u) = 2^u π^{u−1} sin(πu/2) Γ(1−u) ζ(1−u)
            let w = 1.0 - u;
            let pre = (u * 2f64.ln() + (u - 1.0) * PI.ln()).exp() * (0.5 * PI * u).sin();
            return Ok(pre * complex_gamma(w)? * self.sum(w, Complex64::new(1.0, 0.0)));
        }
        Ok(self.sum(u, Complex64::new(1.0, 0.0)))
    }

    /// Hurwitz zeta `Σ_{k≥0} (x+k)^{−a}` for `Re x > 0`.
    pub fn hurwitz(&self, a: Complex64, x: Complex64) -> Result<Complex64> {
        if x.re <= 0.0 {
            return Err(Error::domain(format!("hurwitz_zeta needs Re x > 0, got x = {x}")));
        }
        self.hurwitz_off_cut(a, x)
    }

    /// Hurwitz zeta for any `x` such that `x + t` avoids `(−∞, 0]` for all `t ≥ 0`,
    /// i.e. `Im x ≠ 0` or `Re x > 0`. Powers use the principal branch.
    pub fn hurwitz_off_cut(&self, a: Complex64, x: Complex64) -> Result<Complex64> {
        if (a - 1.0).norm() < 1e-15 {
            return Err(Error::pole("hurwitz_zeta", a));
        }
        if x.im == 0.0 && x.re <= 0.0 {
            return Err(Error::domain(format!("hurwitz_zeta argument {x} lies on the branch cut")));
        }
        Ok(self.sum(a, x))
    }

    fn sum(&self, a: Complex64, x: Complex64) -> Complex64 {
        // The asymptotic remainder behaves like |(a)_{2M}| / (2π|x+N|)^{2M}; keep the
        // ratio |a+2M| / (2π|x+N|) below ~1/2.
        let need = (a.norm() + 2.0 * self.order as f64) / PI + 2.0;
        let mut n = self.cutoff;
        while (x + n as f64).norm() < need {
            n += 8;
        }
        let mut total = Complex64::new(0.0, 0.0);
        for k in (0..n).rev() {
            total += pow_nonzero(x + k as f64, -a);
        }
        let xn = x + n as f64;
        let xn_pow = pow_nonzero(xn, -a);
        total += xn * xn_pow / (a - 1.0) + 0.5 * xn_pow;

        let b = bernoulli_ratios();
        let inv_sq = 1.0 / (xn * xn);
        // running factor (a)_{2j-1} x^{-a-2j+1}
        let mut factor = a * xn_pow / xn;
        for j in 1..=self.order {
            let term = b[j - 1] * factor;
            total += term;
            if term.norm() <= 1e-18 * total.norm() {
                break;
            }
            let k = 2.0 * j as f64;
            factor *= (a + (k - 1.0)) * (a + k) * inv_sq;
        }
        total
    }
}

/// Riemann zeta with the default Euler–Maclaurin settings.
pub fn riemann_zeta(u: Complex64) -> Result<Complex64> {
    EulerMaclaurin::default().riemann(u)
}

/// Hurwitz zeta `ζ_H(a, x)` with the default Euler–Maclaurin settings; `Re x > 0`.
pub fn hurwitz_zeta(a: Complex64, x: Complex64) -> Result<Complex64> {
    EulerMaclaurin::default().hurwitz(a, x)
}

/// Completed zeta `Λ(u) = π^{−u/2} Γ(u/2) ζ(u)`.
///
/// Rejects `u ∈ {0, 1}`. For `Re u < 0` the value comes from `Λ(1−u)`, which also covers
/// the removable points `u ∈ −2ℕ`.
pub fn completed_zeta(u: Complex64) -> Result<Complex64> {
    if let Some(n) = near_integer(u, 1e-14) {
        if n == 0 || n == 1 {
            return Err(Error::pole("completed_zeta", u));
        }
    }
    if u.re < 0.0 {
        // Λ(u) = Λ(1−u) removes the cancelling Γ poles and trivial zeros
        return completed_zeta(1.0 - u);
    }
    let g = complex_gamma(u / 2.0)?;
    let z = riemann_zeta(u)?;
    Ok((-u / 2.0 * PI.ln()).exp() * g * z)
}
