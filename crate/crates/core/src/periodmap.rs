//! The periodic function `f`, period functions `ψ`, and the functional-equation
//! residuals that tie them together.

use std::f64::consts::PI;

use crate::autoforms::{iota_map, CoefficientSet, SpectralParam};
use crate::exec::Execution;
use crate::specfun::{
    complex_gamma, near_integer, pow_nonzero, real_pow, rgamma, riemann_zeta, EulerMaclaurin,
};
use crate::verify::ResidualTable;
use crate::{c64, Complex64, Error, Result};

/// Smallest `|Im τ|` at which the one-sided exponential series are summed.
pub const F_IM_FLOOR: f64 = 0.05;

/// Arguments closer than this to an excluded set are rejected.
pub const EXCLUSION_MARGIN: f64 = 1e-8;

/// `f(τ) = ½A_0 + Σ A_n e^{2πinτ}` on ℍ and `−½A_0 − Σ A_{−n} e^{−2πinτ}` on ℍ⁻.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicF {
    pub param: SpectralParam,
    pub a0: Complex64,
    pub plus: Vec<Complex64>,
    pub minus: Vec<Complex64>,
}

/// Copies `A_0` and the two coefficient lists; `B_0`, `C_0` belong to the
/// zeroth Fourier term and do not enter `f`.
pub fn f_from_coefficients(c: &CoefficientSet) -> PeriodicF {
    PeriodicF { param: c.param(), a0: c.a0(), plus: c.plus().to_vec(), minus: c.minus().to_vec() }
}

/// Evaluates `f(τ)`; the tail estimate assumes the coefficients continue at the size
/// of the last two stored ones.
pub fn eval_f(f: &PeriodicF, tau: Complex64) -> Result<crate::autoforms::Evaluation> {
    if tau.im.abs() < F_IM_FLOOR {
        return Err(Error::domain(format!("|Im τ| = {} is below the series floor {F_IM_FLOOR}", tau.im.abs())));
    }
    let (sign, coeffs, q) = if tau.im > 0.0 {
        (1.0, &f.plus, (2.0 * PI * Complex64::i() * tau).exp())
    } else {
        (-1.0, &f.minus, (-2.0 * PI * Complex64::i() * tau).exp())
    };
    let mut acc = Complex64::new(0.0, 0.0);
    let mut qn = Complex64::new(1.0, 0.0);
    for a in coeffs.iter() {
        qn *= q;
        acc += a * qn;
    }
    let r = q.norm();
    let n = coeffs.len();
    let last = coeffs.iter().rev().take(2).map(|a| a.norm()).fold(0.0, f64::max);
    let tail = last * r.powi(n as i32 + 1) / (1.0 - r);
    Ok(crate::autoforms::Evaluation { value: sign * (0.5 * f.a0 + acc), tail })
}

/// A period function that can be evaluated pointwise.
pub trait PsiFunction: Sync {
    fn eval(&self, z: Complex64) -> Result<Complex64>;
    fn param(&self) -> SpectralParam;
    /// Radius of a disk about `z = 1` on which `ψ` is analytic and cheap to sample,
    /// used for Taylor data; `None` when unavailable.
    fn taylor_radius_at_one(&self) -> Option<f64>;
}

#[derive(Clone, Debug, PartialEq)]
pub enum PsiKind {
    /// `ψ(τ) = f(τ) − τ^{−1−ν} f(−1/τ)` on ℂ∖ℝ.
    FromF(PeriodicF),
    /// Closed-form Eisenstein period function for `Re s > 1`.
    EisensteinDirect { p_max: usize },
    /// The same closed form continued to `Re s > 0` by Euler–Maclaurin subtraction.
    EisensteinContinued { order: usize, tol: f64 },
    /// `ψ(z) = Σ c_m (z − center)^m` on `|z − center| < radius`.
    Taylor { center: Complex64, coeffs: Vec<Complex64>, radius: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PsiEvaluator {
    pub kind: PsiKind,
    pub param: SpectralParam,
}

impl PsiEvaluator {
    pub fn from_f(f: PeriodicF) -> Self {
        PsiEvaluator { param: f.param, kind: PsiKind::FromF(f) }
    }

    /// Eisenstein period function at spectral parameter `s` (three-term exponent `2s`).
    pub fn eisenstein_direct(s: SpectralParam, p_max: usize) -> Self {
        PsiEvaluator { param: s, kind: PsiKind::EisensteinDirect { p_max } }
    }

    pub fn eisenstein_continued(s: SpectralParam, order: usize) -> Self {
        PsiEvaluator { param: s, kind: PsiKind::EisensteinContinued { order, tol: 1e-13 } }
    }

    pub fn taylor(param: SpectralParam, center: Complex64, coeffs: Vec<Complex64>, radius: f64) -> Self {
        PsiEvaluator { param, kind: PsiKind::Taylor { center, coeffs, radius } }
    }
}

impl PsiFunction for PsiEvaluator {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        match &self.kind {
            PsiKind::FromF(f) => psi_from_f(f, z),
            PsiKind::EisensteinDirect { p_max } => eisenstein_psi_direct(self.param, z, *p_max),
            PsiKind::EisensteinContinued { order, tol } => eisenstein_psi_continued(self.param, z, *order, *tol),
            PsiKind::Taylor { center, coeffs, radius } => {
                let d = z - center;
                if d.norm() >= *radius {
                    return Err(Error::domain(format!("{z} lies outside the Taylor disk |z − {center}| < {radius}")));
                }
                Ok(coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * d + c))
            }
        }
    }

    fn param(&self) -> SpectralParam {
        self.param
    }

    fn taylor_radius_at_one(&self) -> Option<f64> {
        match &self.kind {
            PsiKind::FromF(_) => None,
            PsiKind::EisensteinDirect { .. } | PsiKind::EisensteinContinued { .. } => Some(0.5),
            PsiKind::Taylor { center, radius, .. } => {
                let room = radius - (c64(1.0, 0.0) - center).norm();
                (room > 0.05).then_some(0.25f64.min(0.8 * room))
            }
        }
    }
}

/// A period function given by a plain function pointer, e.g. `ψ(z) = 1/z` at `s = 1`.
#[derive(Clone, Copy, Debug)]
pub struct ClosedFormPsi {
    pub param: SpectralParam,
    pub f: fn(Complex64) -> Complex64,
    pub radius_at_one: f64,
}

impl PsiFunction for ClosedFormPsi {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        check_off_cut(z)?;
        Ok((self.f)(z))
    }

    fn param(&self) -> SpectralParam {
        self.param
    }

    fn taylor_radius_at_one(&self) -> Option<f64> {
        Some(self.radius_at_one)
    }
}

fn check_off_cut(z: Complex64) -> Result<()> {
    let dist = if z.re <= 0.0 { z.im.abs() } else { z.norm() };
    if dist < EXCLUSION_MARGIN {
        return Err(Error::domain(format!("{z} is on or within {EXCLUSION_MARGIN} of the cut (−∞, 0]")));
    }
    Ok(())
}

/// `ψ(τ) = f(τ) − τ^{−1−ν} f(−1/τ)`.
pub fn psi_from_f(f: &PeriodicF, tau: Complex64) -> Result<Complex64> {
    if tau.im.abs() < EXCLUSION_MARGIN {
        return Err(Error::domain(format!("ψ from f is defined off the real line, got {tau}")));
    }
    let nu = f.param.nu();
    let a = eval_f(f, tau)?.value;
    let b = eval_f(f, -1.0 / tau)?.value;
    Ok(a - pow_nonzero(tau, -1.0 - nu) * b)
}

/// `f(τ) = (ψ(τ) + τ^{−1−ν} ψ(−1/τ)) / (1 + e^{∓πiν})` for `τ ∈ ℍ^±`.
pub fn f_from_psi(psi: &dyn PsiFunction, tau: Complex64) -> Result<Complex64> {
    if tau.im.abs() < EXCLUSION_MARGIN {
        return Err(Error::domain(format!("f is defined off the real line, got {tau}")));
    }
    let nu = psi.param().nu();
    let sign = if tau.im > 0.0 { -1.0 } else { 1.0 };
    let denom = 1.0 + (sign * PI * Complex64::i() * nu).exp();
    if denom.norm() < 1e-14 {
        return Err(Error::pole("f_from_psi", nu));
    }
    let sum = psi.eval(tau)? + pow_nonzero(tau, -1.0 - nu) * psi.eval(-1.0 / tau)?;
    Ok(sum / denom)
}

/// Coefficients `c_i` and exponents `β_i` of `ζ_H(a, 1+x) ~ Σ c_i x^{β_i}`:
/// `x^{1−a}/(a−1) − ½x^{−a} + Σ_j B_{2j}/(2j)! (a)_{2j−1} x^{1−a−2j}`.
fn hurwitz_asymptotic_terms(a: Complex64, count: usize) -> Vec<(Complex64, Complex64)> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push((1.0 / (a - 1.0), 1.0 - a));
    if count == 1 {
        return out;
    }
    out.push((c64(-0.5, 0.0), -a));
    let mut poch = a; // (a)_{2j−1}
    for j in 1..count - 1 {
        let b = bernoulli_ratio(j);
        out.push((b * poch, 1.0 - a - 2.0 * j as f64));
        let k = 2.0 * j as f64;
        poch *= (a + (k - 1.0)) * (a + k);
    }
    out
}

/// `B_{2j}/(2j)! = (−1)^{j+1} 2 ζ(2j) / (2π)^{2j}`.
fn bernoulli_ratio(j: usize) -> f64 {
    let z = riemann_zeta(c64(2.0 * j as f64, 0.0)).map(|v| v.re).unwrap_or(1.0);
    let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
    sign * 2.0 * z / (2.0 * PI).powi(2 * j as i32)
}

fn eisenstein_prefactor(s: Complex64) -> Complex64 {
    real_pow(PI, -s) * (s - 1.0)
}

/// `π^{−s}(s−1)[½ζ(2s)(1+z^{−2s}) + Σ_{q≥1} ζ_H(2s, 1+qz)]` for `Re s > 1`.
///
/// The `q`-sum runs to `P = max(p_max, ⌈30/|z|⌉)`; beyond that `ζ_H(2s, 1+qz)` is
/// replaced by its asymptotic expansion and resummed as `Σ c_i z^{β_i} ζ_H(−β_i, P+1)`.
pub fn eisenstein_psi_direct(s: SpectralParam, z: Complex64, p_max: usize) -> Result<Complex64> {
    let sv = s.s();
    if sv.re <= 1.0 {
        return Err(Error::domain(format!("direct Eisenstein ψ needs Re s > 1, got s = {sv}")));
    }
    check_off_cut(z)?;
    let a = 2.0 * sv;
    let em = EulerMaclaurin::default();
    let p = p_max.max((30.0 / z.norm()).ceil() as usize);
    let mut lattice = Complex64::new(0.0, 0.0);
    for q in 1..=p {
        lattice += em.hurwitz_off_cut(a, 1.0 + q as f64 * z)?;
    }
    for (c, beta) in hurwitz_asymptotic_terms(a, 14) {
        lattice += c * pow_nonzero(z, beta) * em.hurwitz(-beta, c64(p as f64 + 1.0, 0.0))?;
    }
    let constant = 0.5 * riemann_zeta(a)? * (1.0 + pow_nonzero(z, -a));
    Ok(eisenstein_prefactor(sv) * (constant + lattice))
}

/// The Eisenstein period function continued to `Re s > 0` (`s ∉ {½, 1}`).
///
/// For `q < q₀` (`|q₀ z| ≥ 2`) `ζ_H(2s, 1+qz)` is summed as is; for `q ≥ q₀` the
/// first `order` asymptotic terms `A(qz)` are subtracted and resummed as
/// `Σ_i c_i z^{β_i} ζ_H(−β_i, q₀)`, using the continuation of the Hurwitz zeta in its
/// first argument. The remaining sum `Σ_{q≥q₀} [ζ_H − A](qz)` converges absolutely and
/// is summed until its estimated remainder is below `tol` times the running value.
pub fn eisenstein_psi_continued(s: SpectralParam, z: Complex64, order: usize, tol: f64) -> Result<Complex64> {
    let sv = s.s();
    if sv.re <= 0.0 {
        return Err(Error::domain(format!("continued Eisenstein ψ needs Re s > 0, got s = {sv}")));
    }
    for bad in [0.5, 1.0] {
        if (sv - bad).norm() < 1e-12 {
            return Err(Error::pole("eisenstein_psi_continued", sv));
        }
    }
    check_off_cut(z)?;
    let a = 2.0 * sv;
    let em = EulerMaclaurin::default();
    let terms = hurwitz_asymptotic_terms(a, order.max(2));
    let q0 = ((2.0 / z.norm()).ceil() as usize).max(1);
    let mut total = Complex64::new(0.0, 0.0);
    for q in 1..q0 {
        total += em.hurwitz_off_cut(a, 1.0 + q as f64 * z)?;
    }
    for &(c, beta) in &terms {
        if (-beta - 1.0).norm() < 1e-12 {
            return Err(Error::pole("eisenstein_psi_continued", sv));
        }
        total += c * pow_nonzero(z, beta) * em.hurwitz(-beta, c64(q0 as f64, 0.0))?;
    }
    // first neglected asymptotic term sets the decay of the subtracted summand
    let (c_next, beta_next) = *hurwitz_asymptotic_terms(a, terms.len() + 1).last().unwrap();
    let decay = beta_next.re;
    if decay >= -1.0 {
        return Err(Error::Continuation { estimate: f64::INFINITY, tol });
    }
    let mut remainder_sum = Complex64::new(0.0, 0.0);
    let mut q = q0;
    let q_cap = q0 + 200_000;
    let mut estimate;
    loop {
        let x = q as f64 * z;
        let mut sub = em.hurwitz_off_cut(a, 1.0 + x)?;
        for &(c, beta) in &terms {
            sub -= c * pow_nonzero(x, beta);
        }
        remainder_sum += sub;
        q += 1;
        // Σ_{q' ≥ q} |c (q'z)^β| ≤ |c| |z^β| q^{Re β + 1}/|Re β + 1|
        estimate = c_next.norm() * pow_nonzero(z, beta_next).norm() * (q as f64).powf(decay + 1.0)
            / (decay + 1.0).abs();
        let scale = (total + remainder_sum).norm().max(1e-300);
        if q > q0 + 8 && estimate <= tol * scale {
            break;
        }
        if q >= q_cap {
            return Err(Error::Continuation { estimate: estimate / scale, tol });
        }
    }
    total += remainder_sum;
    let constant = 0.5 * riemann_zeta(a)? * (1.0 + pow_nonzero(z, -a));
    Ok(eisenstein_prefactor(sv) * (constant + total))
}

/// The constant `c(s)` with `eisenstein_psi_direct(s) = c(s) · ψ_{ε_{1−s}}`, where
/// `ψ_{ε_{1−s}}` is obtained from the family-normalized coefficients at `1 − s` via
/// [`psi_from_f`]: `c(s) = −(i/√π) Γ(s)Γ(−s) / (Γ(s+½) Γ(s−1))`. Poles at integer `s`.
pub fn eisenstein_psi_normalization(s: SpectralParam) -> Result<Complex64> {
    let s = s.s();
    let num = complex_gamma(s)? * complex_gamma(-s)?;
    let den = complex_gamma(s + 0.5)? * complex_gamma(s - 1.0)?;
    Ok(-Complex64::i() / PI.sqrt() * num / den)
}

/// `ψ(z) − ψ(z+1) − (z+1)^{−ν−1} ψ(z/(z+1))`.
pub fn three_term_residual(psi: &dyn PsiFunction, z: Complex64) -> Result<Complex64> {
    let nu = psi.param().nu();
    let w = z + 1.0;
    Ok(psi.eval(z)? - psi.eval(w)? - pow_nonzero(w, -nu - 1.0) * psi.eval(z / w)?)
}

/// `ψ(z) − sign · z^{−2s} ψ(1/z)`.
pub fn parity_residual(psi: &dyn PsiFunction, z: Complex64, sign: f64) -> Result<Complex64> {
    let two_s = 2.0 * psi.param().s();
    Ok(psi.eval(z)? - sign * pow_nonzero(z, -two_s) * psi.eval(1.0 / z)?)
}

/// Both one-sided limits of `ψ(τ) + τ^{−1−ν} ψ(−1/τ)` as `Im τ → ±∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitResidual {
    /// `L₊ + L₋` exactly as written in the limit condition.
    pub raw: Complex64,
    /// `L₊/(1+e^{−πiν}) + L₋/(1+e^{πiν})`, i.e. `f(i∞) + f(−i∞)`.
    pub normalized: Complex64,
    /// Largest change of either quantity between the last two heights.
    pub drift: f64,
    pub heights: Vec<f64>,
}

/// Default sampling heights; `ψ(−1/τ)` for `τ = ±iT` needs `f` at `Im = 1/T`, so the
/// largest height is bounded by the series floor.
pub const LIMIT_HEIGHTS: [f64; 3] = [4.0, 8.0, 16.0];

pub fn limit_condition_residual(psi: &dyn PsiFunction, heights: &[f64], tol: f64) -> Result<LimitResidual> {
    assert!(!heights.is_empty());
    let nu = psi.param().nu();
    let side = |t: f64| -> Result<Complex64> {
        let tau = c64(0.0, t);
        Ok(psi.eval(tau)? + pow_nonzero(tau, -1.0 - nu) * psi.eval(-1.0 / tau)?)
    };
    let d_plus = 1.0 + (-PI * Complex64::i() * nu).exp();
    let d_minus = 1.0 + (PI * Complex64::i() * nu).exp();
    let mut raws = Vec::new();
    let mut norms = Vec::new();
    for &t in heights {
        let lp = side(t)?;
        let lm = side(-t)?;
        raws.push(lp + lm);
        norms.push(lp / d_plus + lm / d_minus);
    }
    let k = raws.len();
    let drift = if k >= 2 {
        (raws[k - 1] - raws[k - 2]).norm().max((norms[k - 1] - norms[k - 2]).norm())
    } else {
        0.0
    };
    if drift > tol {
        return Err(Error::NoConvergence(format!("limit sequence drifts by {drift:e} > {tol:e}")));
    }
    Ok(LimitResidual { raw: raws[k - 1], normalized: norms[k - 1], drift, heights: heights.to_vec() })
}

/// `F_α(z)` from Fourier data:
/// `±(2i e^{±πiν/2} / ((2π)^ν Γ(1−ν))) Σ m^{−ν} A_{±m} e^{±2πimz} ± i e^{±πiν/2} sin(πν/2) B_0`,
/// plus `± iA_0` when `ν = 0`.
pub fn cap_f_from_coefficients(c: &CoefficientSet, z: Complex64) -> Result<crate::autoforms::Evaluation> {
    if z.im.abs() < F_IM_FLOOR {
        return Err(Error::domain(format!("|Im z| = {} is below the series floor {F_IM_FLOOR}", z.im.abs())));
    }
    let nu = c.param().nu();
    let sign = if z.im > 0.0 { 1.0 } else { -1.0 };
    let i = Complex64::i();
    let rot = (sign * PI * i * nu / 2.0).exp();
    let lead = 2.0 * i * rot * real_pow(2.0 * PI, -nu) * rgamma(1.0 - nu);
    let coeffs = if sign > 0.0 { c.plus() } else { c.minus() };
    let q = (sign * 2.0 * PI * i * z).exp();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut qm = Complex64::new(1.0, 0.0);
    for (k, a) in coeffs.iter().enumerate() {
        qm *= q;
        acc += real_pow((k + 1) as f64, -nu) * a * qm;
    }
    let mut value = lead * acc + i * rot * (PI * nu / 2.0).sin() * c.b0();
    if near_integer(nu, 0.0) == Some(0) {
        value += i * c.a0();
    }
    let n = coeffs.len();
    let last = coeffs.iter().rev().take(2).map(|a| a.norm()).fold(0.0, f64::max);
    let r = q.norm();
    let tail = lead.norm() * last * (n as f64 + 1.0).powf(-nu.re).max(1.0) * r.powi(n as i32 + 1) / (1.0 - r);
    Ok(crate::autoforms::Evaluation { value: sign * value, tail })
}

/// Relative residual of `F_α = 2i√π e^{±πiν/2} Γ((1+ν)/2)^{−1} Γ(1−ν/2)^{−1} f_{ι(ν)α}`
/// at each sample; `ν ∉ 1+2ℤ`, `ν ∉ 2ℕ`.
pub fn psiiotaalpha_identity_residual(c: &CoefficientSet, samples: &[Complex64], exec: Execution) -> Result<ResidualTable> {
    let nu = c.param().nu();
    if let Some(k) = near_integer(nu, 1e-12) {
        if k.rem_euclid(2) == 1 || (k > 0 && k % 2 == 0) {
            return Err(Error::domain(format!("identity excludes ν = {nu}")));
        }
    }
    let image = f_from_coefficients(&iota_map(c)?);
    let base = 2.0 * Complex64::i() * PI.sqrt() * rgamma((1.0 + nu) / 2.0) * rgamma(1.0 - nu / 2.0);
    let rows = exec.map(samples, |&z| -> Result<f64> {
        let sign = if z.im > 0.0 { 1.0 } else { -1.0 };
        let lhs = cap_f_from_coefficients(c, z)?.value;
        let rhs = base * (sign * PI * Complex64::i() * nu / 2.0).exp() * eval_f(&image, z)?.value;
        let scale = lhs.norm().max(rhs.norm());
        Ok(if scale == 0.0 { 0.0 } else { (lhs - rhs).norm() / scale })
    });
    Ok(ResidualTable::new(samples.to_vec(), rows.into_iter().collect::<Result<Vec<_>>>()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autoforms::{eisenstein_coefficients, Normalization, Parity};
    use crate::specfun::divisor_sum;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    fn sample_f() -> PeriodicF {
        let c = CoefficientSet::new(
            SpectralParam::from_nu(c64(0.3, 0.7)),
            vec![c64(1.0, 0.2), c64(-0.4, 0.1), c64(0.05, -0.3)],
            vec![c64(0.7, 0.0), c64(0.2, 0.2), c64(-0.1, 0.0)],
            c64(0.6, -0.2),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
            Parity::None,
        )
        .unwrap();
        f_from_coefficients(&c)
    }

    #[test]
    fn periodic_function_basics() {
        let f = sample_f();
        let t = c64(0.23, 0.4);
        let a = eval_f(&f, t).unwrap().value;
        let b = eval_f(&f, t + 1.0).unwrap().value;
        assert!((a - b).norm() < 1e-14);
        let top = eval_f(&f, c64(0.1, 30.0)).unwrap().value;
        assert!((top - 0.5 * f.a0).norm() < 1e-15);
        let bottom = eval_f(&f, c64(0.1, -30.0)).unwrap().value;
        assert!((top + bottom).norm() < 1e-15);
        assert!(eval_f(&f, c64(0.0, 0.01)).is_err());
    }

    #[test]
    fn conjugate_symmetry_for_real_even_data() {
        let c = CoefficientSet::new(
            SpectralParam::from_nu(c64(0.4, 0.0)),
            vec![c64(1.0, 0.0), c64(0.5, 0.0)],
            vec![c64(1.0, 0.0), c64(0.5, 0.0)],
            c64(0.3, 0.0),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
            Parity::Even,
        )
        .unwrap();
        let f = f_from_coefficients(&c);
        let t = c64(0.37, 0.21);
        let a = eval_f(&f, t).unwrap().value;
        let b = eval_f(&f, t.conj()).unwrap().value;
        assert!((b + a.conj()).norm() < 1e-15);
    }

    #[test]
    fn psi_of_a_constant_f() {
        let c = CoefficientSet::new(SpectralParam::from_nu(c64(0.25, 0.5)), vec![], vec![], c64(2.0, 1.0), c64(0.0, 0.0), c64(0.0, 0.0), Parity::None).unwrap();
        let f = f_from_coefficients(&c);
        let nu = f.param.nu();
        let tau = c64(0.4, 0.9);
        let want = 0.5 * f.a0 * (1.0 - pow_nonzero(tau, -1.0 - nu));
        assert!(rel(psi_from_f(&f, tau).unwrap(), want) < 1e-15);
    }

    #[test]
    fn round_trip_and_nu_zero_prefactor() {
        let f = sample_f();
        let psi = PsiEvaluator::from_f(f.clone());
        for &(x, y) in &[(0.1, 0.5), (-0.4, 0.9), (0.3, -0.7), (1.2, 1.5), (-0.8, -0.35)] {
            let t = c64(x, y);
            let back = f_from_psi(&psi, t).unwrap();
            let direct = eval_f(&f, t).unwrap().value;
            assert!((back - direct).norm() < 1e-12 * direct.norm().max(1.0));
        }
        let zero = PsiEvaluator::from_f(PeriodicF { param: SpectralParam::from_nu(c64(0.0, 0.0)), a0: c64(0.0, 0.0), plus: vec![], minus: vec![] });
        assert_eq!(f_from_psi(&zero, c64(0.2, 0.8)).unwrap(), c64(0.0, 0.0));
        // ν = 0: f = (ψ(τ) + τ^{-1}ψ(−1/τ))/2 on ℍ
        let c1 = ClosedFormPsi { param: SpectralParam::from_nu(c64(0.0, 0.0)), f: |_| c64(1.0, 0.0), radius_at_one: 0.5 };
        let t = c64(0.3, 0.6);
        assert!((f_from_psi(&c1, t).unwrap() - 0.5 * (1.0 + 1.0 / t)).norm() < 1e-15);
    }

    #[test]
    fn eisenstein_family_f_coefficients() {
        let c = eisenstein_coefficients(SpectralParam::from_s(c64(2.0, 0.0)), 5, Normalization::Family).unwrap();
        let f = f_from_coefficients(&c);
        for n in 1..=5u64 {
            let want = PI.powi(-1) * 1.0 * divisor_sum(c64(-3.0, 0.0), n);
            assert!(rel(f.plus[n as usize - 1], want) < 1e-14);
            assert_eq!(f.minus[n as usize - 1], f.plus[n as usize - 1]);
        }
    }

    #[test]
    fn direct_psi_at_one_against_double_sum() {
        // oracle: Σ_{p,q≥1}(p+q)^{−4} = Σ_{n≥2}(n−1) n^{−4} = ζ(3) − ζ(4)
        let s = SpectralParam::from_s(c64(2.0, 0.0));
        let z3 = riemann_zeta(c64(3.0, 0.0)).unwrap().re;
        let z4 = PI.powi(4) / 90.0;
        let want = PI.powi(-2) * (z4 + (z3 - z4));
        let v = eisenstein_psi_direct(s, c64(1.0, 0.0), 40).unwrap();
        assert!(rel(v, c64(want, 0.0)) < 1e-13, "{v} vs {want}");
    }

    #[test]
    fn direct_psi_against_brute_force_double_sum() {
        // oracle: direct double sum over p, q ≤ 2000 with an integral tail for the
        // q-direction handled by a coarse Euler–Maclaurin bound
        let s = c64(2.0, 0.0);
        let z = c64(1.3, 0.4);
        let mut brute = Complex64::new(0.0, 0.0);
        let n = 2000;
        for q in 1..=n {
            let mut row = Complex64::new(0.0, 0.0);
            for p in (1..=n).rev() {
                row += pow_nonzero(q as f64 * z + p as f64, -2.0 * s);
            }
            // p-tail: ∫_{n+½}^∞ (qz+p)^{−4} dp
            row += pow_nonzero(q as f64 * z + n as f64 + 0.5, c64(-3.0, 0.0)) / 3.0;
            brute += row;
        }
        let constant = 0.5 * riemann_zeta(2.0 * s).unwrap() * (1.0 + pow_nonzero(z, -2.0 * s));
        let brute = eisenstein_prefactor(s) * (constant + brute);
        let v = eisenstein_psi_direct(SpectralParam::from_s(s), z, 40).unwrap();
        // neglected q > 2000 contributes ~ |z|^{-3} Σ q^{-3}/3 ≈ 1e−8 relative
        assert!(rel(v, brute) < 1e-7, "{v} vs {brute}");
    }

    #[test]
    fn direct_psi_three_term_and_parity() {
        for &(sr, si) in &[(2.0, 0.0), (1.5, 0.0), (2.0, 1.0)] {
            let psi = PsiEvaluator::eisenstein_direct(SpectralParam::from_s(c64(sr, si)), 40);
            for &(x, y) in &[(1.5, 0.0), (1.0, 0.5), (0.6, -0.8), (2.5, 1.0), (-0.3, 0.7)] {
                let r = three_term_residual(&psi, c64(x, y)).unwrap();
                assert!(r.norm() < 1e-10 * psi.eval(c64(x, y)).unwrap().norm().max(1.0), "s={sr}+{si}i z={x}+{y}i: {r}");
            }
            let p = parity_residual(&psi, c64(1.4, 0.0), 1.0).unwrap();
            assert!(p.norm() < 1e-9);
            let at_one = parity_residual(&psi, c64(1.0, 0.0), -1.0).unwrap();
            assert!((at_one - 2.0 * psi.eval(c64(1.0, 0.0)).unwrap()).norm() < 1e-13);
        }
        assert!(eisenstein_psi_direct(SpectralParam::from_s(c64(0.9, 0.0)), c64(1.0, 0.0), 40).is_err());
        assert!(eisenstein_psi_direct(SpectralParam::from_s(c64(2.0, 0.0)), c64(-1.0, 0.0), 40).is_err());
    }

    #[test]
    fn direct_psi_lattice_part_decays_along_the_axis() {
        let s = SpectralParam::from_s(c64(2.0, 0.0));
        let limit = eisenstein_prefactor(s.s()) * 0.5 * riemann_zeta(c64(4.0, 0.0)).unwrap();
        let far = eisenstein_psi_direct(s, c64(1e4, 0.0), 40).unwrap();
        assert!((far - limit).norm() < 1e-6 * limit.norm());
    }

    #[test]
    fn continuation_matches_direct_and_is_stable() {
        for &(sr, si, x, y) in &[(1.5, 0.0, 1.3, 0.0), (1.3, 2.0, 0.7, 0.4), (1.8, -1.0, 2.0, -0.5)] {
            let s = SpectralParam::from_s(c64(sr, si));
            let z = c64(x, y);
            let d = eisenstein_psi_direct(s, z, 40).unwrap();
            let c = eisenstein_psi_continued(s, z, 6, 1e-14).unwrap();
            assert!(rel(c, d) < 1e-10, "s={sr}+{si}i: {c} vs {d}");
        }
        let s = SpectralParam::from_s(c64(0.75, 0.0));
        let a = eisenstein_psi_continued(s, c64(2.0, 0.0), 6, 1e-14).unwrap();
        let b = eisenstein_psi_continued(s, c64(2.0, 0.0), 8, 1e-14).unwrap();
        assert!(rel(a, b) < 1e-12);
        let psi = PsiEvaluator::eisenstein_continued(s, 6);
        let r = three_term_residual(&psi, c64(1.3, 0.0)).unwrap();
        assert!(r.norm() < 1e-11, "{r}");
    }

    #[test]
    fn eisenstein_psi_normalization_links_both_constructions() {
        for &(sr, si) in &[(2.3, 0.0), (1.6, 0.7), (2.4, -1.1)] {
            let s = SpectralParam::from_s(c64(sr, si));
            let fam = eisenstein_coefficients(s.reflected(), 60, Normalization::Family).unwrap();
            let f = f_from_coefficients(&fam);
            let c = eisenstein_psi_normalization(s).unwrap();
            for &(x, y) in &[(1.0, 0.7), (0.4, 1.1), (-0.3, 0.9), (0.8, -0.6)] {
                let tau = c64(x, y);
                let from_f = psi_from_f(&f, tau).unwrap();
                let direct = eisenstein_psi_direct(s, tau, 40).unwrap();
                assert!(rel(direct, c * from_f) < 1e-10, "s={sr}+{si}i τ={tau}");
            }
        }
    }

    #[test]
    fn three_term_for_inverse_z() {
        let p = ClosedFormPsi { param: SpectralParam::from_s(c64(1.0, 0.0)), f: |z| 1.0 / z, radius_at_one: 0.5 };
        for z in [c64(0.3, 0.0), c64(1.7, 0.9), c64(-0.4, 0.2)] {
            assert!(three_term_residual(&p, z).unwrap().norm() < 1e-15);
        }
    }

    #[test]
    fn limit_condition_values() {
        let f = sample_f();
        let psi = PsiEvaluator::from_f(f.clone());
        let r = limit_condition_residual(&psi, &LIMIT_HEIGHTS, 1e-10).unwrap();
        assert!(r.normalized.norm() < 1e-13);
        // the literal sum telescopes to (1+e^{−πiν})½A_0 − (1+e^{πiν})½A_0 = −i sin(πν) A_0
        let nu = f.param.nu();
        let want = -Complex64::i() * (PI * nu).sin() * f.a0;
        assert!((r.raw - want).norm() < 1e-12 * want.norm());
        let zero = PsiEvaluator::from_f(PeriodicF { param: f.param, a0: c64(0.0, 0.0), plus: vec![], minus: vec![] });
        let z = limit_condition_residual(&zero, &LIMIT_HEIGHTS, 1e-10).unwrap();
        assert_eq!((z.raw, z.normalized), (c64(0.0, 0.0), c64(0.0, 0.0)));
    }

    #[test]
    fn cap_f_special_cases() {
        let p = SpectralParam::from_nu(c64(0.4, 0.1));
        let only_b0 = CoefficientSet::new(p, vec![], vec![], c64(0.0, 0.0), c64(1.5, 0.0), c64(0.0, 0.0), Parity::None).unwrap();
        let nu = p.nu();
        let i = Complex64::i();
        for z in [c64(0.2, 0.7), c64(0.2, -0.7)] {
            let sign = z.im.signum();
            let want = sign * i * (sign * PI * i * nu / 2.0).exp() * (PI * nu / 2.0).sin() * 1.5;
            assert!(rel(cap_f_from_coefficients(&only_b0, z).unwrap().value, want) < 1e-14);
        }
        let p0 = SpectralParam::from_nu(c64(0.0, 0.0));
        let only_a0 = CoefficientSet::new(p0, vec![], vec![], c64(0.8, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), Parity::None).unwrap();
        assert!(rel(cap_f_from_coefficients(&only_a0, c64(0.0, 1.0)).unwrap().value, 0.8 * i) < 1e-15);
        assert!(rel(cap_f_from_coefficients(&only_a0, c64(0.0, -1.0)).unwrap().value, -0.8 * i) < 1e-15);
    }

    #[test]
    fn psiiotaalpha_identity_holds() {
        let p = SpectralParam::from_nu(c64(0.4, 0.0));
        let c = CoefficientSet::new(p, vec![c64(1.0, 0.0)], vec![c64(0.0, 0.0)], c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), Parity::None).unwrap();
        let pts = [c64(0.1, 0.6), c64(-0.3, 0.9), c64(0.2, -0.5)];
        let t = psiiotaalpha_identity_residual(&c, &pts, Execution::Sequential).unwrap();
        assert!(t.max() < 1e-13, "{}", t.max());
        // ν = 0: the constant is 2i√π/(Γ(½)Γ(1)) = 2i and ι is the identity
        let p0 = SpectralParam::from_nu(c64(0.0, 0.0));
        let c0 = CoefficientSet::new(p0, vec![c64(0.5, 0.1)], vec![c64(-0.2, 0.0)], c64(0.3, 0.0), c64(0.7, 0.0), c64(0.0, 0.0), Parity::None).unwrap();
        let t0 = psiiotaalpha_identity_residual(&c0, &pts, Execution::Sequential).unwrap();
        assert!(t0.max() < 1e-14);
        let zero = CoefficientSet::zero(p, 3);
        assert_eq!(psiiotaalpha_identity_residual(&zero, &pts, Execution::Sequential).unwrap().max(), 0.0);
        let odd = CoefficientSet::zero(SpectralParam::from_nu(c64(1.0, 0.0)), 1);
        assert!(psiiotaalpha_identity_residual(&odd, &pts, Execution::Sequential).is_err());
    }
}
