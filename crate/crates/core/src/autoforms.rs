//! Fourier data of automorphic hyperfunctions and evaluators for Maass forms and
//! Eisenstein series.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::exec::Execution;
use crate::quad::composite_gauss_legendre;
use crate::specfun::{
    complex_gamma, completed_zeta, divisor_sum, near_integer, real_pow, rgamma, whittaker_w0,
};
use crate::verify::ResidualTable;
use crate::{c64, Complex64, Error, Result};

/// Spectral parameter `s` together with `ν = 2s − 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralParam {
    s: Complex64,
    nu: Complex64,
}

impl SpectralParam {
    pub fn from_s(s: Complex64) -> Self {
        SpectralParam { s, nu: 2.0 * s - 1.0 }
    }

    pub fn from_nu(nu: Complex64) -> Self {
        SpectralParam { s: (nu + 1.0) / 2.0, nu }
    }

    pub fn s(&self) -> Complex64 {
        self.s
    }

    pub fn nu(&self) -> Complex64 {
        self.nu
    }

    /// The parameter with `ν ↦ −ν` (equivalently `s ↦ 1 − s`).
    pub fn reflected(&self) -> Self {
        SpectralParam::from_nu(-self.nu)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    None,
}

impl Parity {
    fn sign(self) -> Option<f64> {
        match self {
            Parity::Even => Some(1.0),
            Parity::Odd => Some(-1.0),
            Parity::None => None,
        }
    }
}

/// Fourier data `{A_n (1 ≤ |n| ≤ N_max), A_0, B_0, C_0}` at parameter `ν`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSet {
    param: SpectralParam,
    plus: Vec<Complex64>,
    minus: Vec<Complex64>,
    a0: Complex64,
    b0: Complex64,
    c0: Complex64,
    parity: Parity,
}

const PARITY_TOL: f64 = 1e-12;

impl CoefficientSet {
    /// `plus[n−1] = A_n` and `minus[n−1] = A_{−n}`. With a declared parity the
    /// symmetry `A_{−n} = ±A_n` is checked (relative 1e−12) and then imposed exactly.
    pub fn new(
        param: SpectralParam,
        plus: Vec<Complex64>,
        mut minus: Vec<Complex64>,
        a0: Complex64,
        b0: Complex64,
        c0: Complex64,
        parity: Parity,
    ) -> Result<Self> {
        if plus.len() != minus.len() {
            return Err(Error::InvalidCoefficients(format!(
                "window mismatch: {} positive vs {} negative indices",
                plus.len(),
                minus.len()
            )));
        }
        let all = plus.iter().chain(&minus).chain([&a0, &b0, &c0]);
        if all.into_iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidCoefficients("non-finite coefficient".into()));
        }
        if let Some(sign) = parity.sign() {
            for (n, (p, m)) in plus.iter().zip(&minus).enumerate() {
                let want = sign * p;
                if (m - want).norm() > PARITY_TOL * p.norm().max(m.norm()) {
                    return Err(Error::InvalidCoefficients(format!(
                        "parity {parity:?} violated at n = {}: A_n = {p}, A_-n = {m}",
                        n + 1
                    )));
                }
            }
            minus = plus.iter().map(|p| sign * p).collect();
        }
        if c0 != Complex64::new(0.0, 0.0) && !matches!(near_integer(param.nu, 0.0), Some(n) if n >= 1) {
            return Err(Error::InvalidCoefficients(format!("C_0 must vanish at ν = {}", param.nu)));
        }
        Ok(CoefficientSet { param, plus, minus, a0, b0, c0, parity })
    }

    pub fn zero(param: SpectralParam, n_max: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); n_max];
        CoefficientSet {
            param,
            plus: z.clone(),
            minus: z,
            a0: Complex64::new(0.0, 0.0),
            b0: Complex64::new(0.0, 0.0),
            c0: Complex64::new(0.0, 0.0),
            parity: Parity::Even,
        }
    }

    pub fn param(&self) -> SpectralParam {
        self.param
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn n_max(&self) -> usize {
        self.plus.len()
    }

    /// `A_n` for `n ≠ 0`; zero outside the stored window.
    pub fn a(&self, n: i64) -> Complex64 {
        let k = n.unsigned_abs() as usize;
        let side = if n > 0 { &self.plus } else { &self.minus };
        match k {
            0 => panic!("A_n is defined for n != 0; use a0()"),
            k if k <= side.len() => side[k - 1],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    pub fn plus(&self) -> &[Complex64] {
        &self.plus
    }

    pub fn minus(&self) -> &[Complex64] {
        &self.minus
    }

    pub fn a0(&self) -> Complex64 {
        self.a0
    }

    pub fn b0(&self) -> Complex64 {
        self.b0
    }

    pub fn c0(&self) -> Complex64 {
        self.c0
    }

    /// Largest componentwise difference `|x − y|` over all stored data.
    pub fn max_abs_diff(&self, other: &CoefficientSet) -> f64 {
        let n = self.n_max().max(other.n_max()) as i64;
        let mut worst = (self.a0 - other.a0)
            .norm()
            .max((self.b0 - other.b0).norm())
            .max((self.c0 - other.c0).norm());
        for k in 1..=n {
            worst = worst.max((self.a(k) - other.a(k)).norm()).max((self.a(-k) - other.a(-k)).norm());
        }
        worst
    }

    fn scaled(&self, c: Complex64) -> CoefficientSet {
        CoefficientSet {
            param: self.param,
            plus: self.plus.iter().map(|v| c * v).collect(),
            minus: self.minus.iter().map(|v| c * v).collect(),
            a0: c * self.a0,
            b0: c * self.b0,
            c0: c * self.c0,
            parity: self.parity,
        }
    }
}

/// A point of the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalPoint {
    z: Complex64,
}

impl EvalPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if z.im > 0.0 && z.re.is_finite() && z.im.is_finite() {
            Ok(EvalPoint { z })
        } else {
            Err(Error::domain(format!("evaluation point {z} is not in the upper half-plane")))
        }
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn x(&self) -> f64 {
        self.z.re
    }

    pub fn y(&self) -> f64 {
        self.z.im
    }
}

/// A truncated evaluation together with a bound on the neglected tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    pub tail: f64,
}

impl Evaluation {
    /// Turn a tail estimate above `tol` into [`Error::Truncation`].
    pub fn within(self, tol: f64) -> Result<Complex64> {
        if self.tail <= tol {
            Ok(self.value)
        } else {
            Err(Error::Truncation { value: self.value, tail: self.tail, tol })
        }
    }
}

/// Lowest imaginary part accepted by the Fourier-series evaluators.
pub const MIN_FOURIER_Y: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// `ε*_s`, read off from the Fourier expansion of `G(s; z)`.
    Star,
    /// `ε_s = ½ Γ(s−1)^{−1} ε*_s`.
    Family,
}

/// Fourier data of the Eisenstein hyperfunction. The returned set lives at
/// parameter `ν = 1 − 2s`.
pub fn eisenstein_coefficients(s: SpectralParam, n_max: usize, normalization: Normalization) -> Result<CoefficientSet> {
    let s = s.s();
    let sigma_w = 1.0 - 2.0 * s;
    let (scale_n, a0, b0) = match normalization {
        Normalization::Star => {
            if let Some(k) = near_integer(2.0 * s, 1e-14) {
                if k <= 2 {
                    return Err(Error::pole("eisenstein_coefficients(star)", s));
                }
            }
            let g = complex_gamma(s)?;
            let scale = 2.0 * real_pow(PI, 1.0 - s) * g;
            let a0 = 2.0 * PI.sqrt() * g * rgamma(s - 0.5) * completed_zeta(2.0 * s - 1.0)?;
            let b0 = 2.0 * completed_zeta(2.0 * s)?;
            (scale, a0, b0)
        }
        Normalization::Family => {
            for bad in [0.0, 0.5, 1.0] {
                if (s - bad).norm() < 1e-14 {
                    return Err(Error::pole("eisenstein_coefficients(family)", s));
                }
            }
            let scale = real_pow(PI, 1.0 - s) * (s - 1.0);
            let a0 = PI.sqrt() * (s - 1.0) * completed_zeta(2.0 * s - 1.0)? * rgamma(s - 0.5);
            let b0 = completed_zeta(2.0 * s)? * rgamma(s - 1.0);
            (scale, a0, b0)
        }
    };
    let plus: Vec<Complex64> = (1..=n_max as u64).map(|n| scale_n * divisor_sum(sigma_w, n)).collect();
    CoefficientSet::new(
        SpectralParam::from_s(1.0 - s),
        plus.clone(),
        plus,
        a0,
        b0,
        Complex64::new(0.0, 0.0),
        Parity::Even,
    )
}

/// Classical Fourier coefficients `a_n` (`n ≠ 0`) of a Maass cusp form.
#[derive(Clone, Debug, PartialEq)]
pub struct MaassForm {
    param: SpectralParam,
    plus: Vec<Complex64>,
    minus: Vec<Complex64>,
    parity: Parity,
}

impl MaassForm {
    /// Builds the symmetric window `1 ≤ |n| ≤ max |n|` from a sparse map, storing
    /// missing indices as zeros. If only positive indices are given and a parity is
    /// declared, the negative side is mirrored.
    pub fn new(param: SpectralParam, a: &BTreeMap<i64, Complex64>, parity: Parity) -> Result<Self> {
        if a.contains_key(&0) {
            return Err(Error::InvalidCoefficients("a_0 must be absent for a cusp form".into()));
        }
        let n_max = a.keys().map(|n| n.unsigned_abs() as usize).max().unwrap_or(0);
        let mut plus = vec![Complex64::new(0.0, 0.0); n_max];
        let mut minus = plus.clone();
        for (&n, &v) in a {
            let k = n.unsigned_abs() as usize - 1;
            if n > 0 {
                plus[k] = v;
            } else {
                minus[k] = v;
            }
        }
        let one_sided = a.keys().all(|&n| n > 0);
        if let Some(sign) = parity.sign() {
            if one_sided {
                minus = plus.iter().map(|v| sign * v).collect();
            }
            for (k, (p, m)) in plus.iter().zip(&minus).enumerate() {
                if (m - sign * p).norm() > PARITY_TOL * p.norm().max(m.norm()) {
                    return Err(Error::InvalidCoefficients(format!(
                        "parity {parity:?} violated at n = {}: a_n = {p}, a_-n = {m}",
                        k + 1
                    )));
                }
            }
        }
        Ok(MaassForm { param, plus, minus, parity })
    }

    pub fn param(&self) -> SpectralParam {
        self.param
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn n_max(&self) -> usize {
        self.plus.len()
    }

    pub fn a(&self, n: i64) -> Complex64 {
        let k = n.unsigned_abs() as usize;
        let side = if n > 0 { &self.plus } else { &self.minus };
        if k == 0 || k > side.len() { Complex64::new(0.0, 0.0) } else { side[k - 1] }
    }

    /// Hyperfunction coefficients `A_n = (π|n|)^s Γ(1−s) a_n`, `A_0 = B_0 = C_0 = 0`.
    pub fn coefficients(&self) -> Result<CoefficientSet> {
        maass_coefficients(self, self.param, self.parity)
    }
}

/// `A_n = (π|n|)^s Γ(1−s) a_n`; the constant data vanish.
pub fn maass_coefficients(form: &MaassForm, s: SpectralParam, parity: Parity) -> Result<CoefficientSet> {
    let sv = s.s();
    let g = complex_gamma(1.0 - sv)?;
    let conv = |n: usize, v: &Complex64| real_pow(PI * n as f64, sv) * g * v;
    let plus = form.plus.iter().enumerate().map(|(k, v)| conv(k + 1, v)).collect();
    let minus = form.minus.iter().enumerate().map(|(k, v)| conv(k + 1, v)).collect();
    let zero = Complex64::new(0.0, 0.0);
    CoefficientSet::new(s, plus, minus, zero, zero, zero, parity)
}

/// Hyperfunction data of a holomorphic cusp form of weight `2k` with coefficients
/// `c_n`, `n ≥ 1`: `A_n = (−1)^k 4^{−k} c_n`, `A_{−n} = 0`, at `ν = 2k − 1`.
pub fn holomorphic_coefficients(c: &BTreeMap<i64, Complex64>, k: u32) -> Result<CoefficientSet> {
    if k == 0 {
        return Err(Error::InvalidCoefficients("weight 2k needs k >= 1".into()));
    }
    if let Some(n) = c.keys().find(|&&n| n < 1) {
        return Err(Error::InvalidCoefficients(format!("holomorphic cusp form coefficient at n = {n} < 1")));
    }
    let n_max = c.keys().copied().max().unwrap_or(0) as usize;
    let factor = if k % 2 == 0 { 1.0 } else { -1.0 } * 4f64.powi(-(k as i32));
    let mut plus = vec![Complex64::new(0.0, 0.0); n_max];
    for (&n, &v) in c {
        plus[n as usize - 1] = factor * v;
    }
    let zero = Complex64::new(0.0, 0.0);
    CoefficientSet::new(
        SpectralParam::from_nu(c64(2.0 * k as f64 - 1.0, 0.0)),
        plus,
        vec![zero; n_max],
        zero,
        zero,
        zero,
        Parity::None,
    )
}

/// Upper bound on `e^{x} |K_μ(x)|` style decay, used for tails: `|W_{0,μ}(y')| ≤
/// √(y'/y) e^{−(y'−y)/2} W_{0,Re μ}(y)` for `y' ≥ y`, from `|K_μ| ≤ K_{Re μ}` and the
/// monotonicity of `e^x K_ν(x)`.
fn whittaker_tail(mu_re: f64, y_first: f64, terms: impl Fn(usize) -> f64, step: f64) -> Result<f64> {
    let base = match whittaker_w0(c64(mu_re, 0.0), y_first) {
        Ok(w) => w.re.abs(),
        Err(Error::Underflow(_)) => return Ok(0.0),
        Err(e) => return Err(e),
    };
    let mut total = 0.0;
    for j in 0..100_000usize {
        let y = y_first + j as f64 * step;
        let t = terms(j) * (y / y_first).sqrt() * (-(y - y_first) / 2.0).exp() * base;
        total += t;
        if j > 10 && t <= 1e-20 * total.max(1e-300) {
            break;
        }
    }
    Ok(total)
}

fn check_fourier_height(z: EvalPoint) -> Result<()> {
    if z.y() < MIN_FOURIER_Y {
        return Err(Error::domain(format!(
            "Im z = {} is below {MIN_FOURIER_Y}; Fourier evaluation refused without modular reduction",
            z.y()
        )));
    }
    Ok(())
}

/// `u(z) = Σ_{1≤|n|≤N} a_n W_{0,s−½}(4π|n|y) e^{2πinx}`, `N = min(n_max, stored window)`.
///
/// The tail bound assumes `|a_n| ≤ C √n` beyond the window with `C = max |a_n|/√n`
/// over the stored coefficients.
pub fn eval_maass(form: &MaassForm, z: EvalPoint, n_max: usize) -> Result<Evaluation> {
    check_fourier_height(z)?;
    let mu = form.param.s() - 0.5;
    let n = n_max.min(form.n_max());
    let (x, y) = (z.x(), z.y());
    let mut value = Complex64::new(0.0, 0.0);
    for k in 1..=n {
        let w = match whittaker_w0(mu, 4.0 * PI * k as f64 * y) {
            Ok(w) => w,
            Err(Error::Underflow(_)) => break,
            Err(e) => return Err(e),
        };
        let phase = Complex64::from_polar(1.0, 2.0 * PI * k as f64 * x);
        value += w * (form.a(k as i64) * phase + form.a(-(k as i64)) / phase);
    }
    let c = (1..=form.n_max() as i64)
        .map(|k| form.a(k).norm().max(form.a(-k).norm()) / (k as f64).sqrt())
        .fold(0.0, f64::max);
    let tail = if c == 0.0 {
        0.0
    } else {
        let first = (n + 1) as f64;
        whittaker_tail(mu.re, 4.0 * PI * first * y, |j| 2.0 * c * (first + j as f64).sqrt(), 4.0 * PI * y)?
    };
    Ok(Evaluation { value, tail })
}

/// `G(s; z)` from its Fourier expansion, truncated at `|n| ≤ n_max`.
pub fn eval_eisenstein_fourier(s: SpectralParam, z: EvalPoint, n_max: usize) -> Result<Evaluation> {
    check_fourier_height(z)?;
    let s = s.s();
    if s.norm() < 1e-14 || (s - 1.0).norm() < 1e-14 {
        return Err(Error::pole("eisenstein G(s; z)", s));
    }
    let (x, y) = (z.x(), z.y());
    let mut value = 2.0 * completed_zeta(2.0 * s)? * real_pow(y, s) + 2.0 * completed_zeta(2.0 * s - 1.0)? * real_pow(y, 1.0 - s);
    let mu = s - 0.5;
    let w_exp = 2.0 * s - 1.0;
    for k in 1..=n_max {
        let w = match whittaker_w0(mu, 4.0 * PI * k as f64 * y) {
            Ok(w) => w,
            Err(Error::Underflow(_)) => break,
            Err(e) => return Err(e),
        };
        let coeff = 2.0 * divisor_sum(w_exp, k as u64) * real_pow(k as f64, -s);
        // e^{2πikx} + e^{−2πikx}
        value += coeff * w * 2.0 * (2.0 * PI * k as f64 * x).cos();
    }
    // |σ_{2s−1}(n) n^{−s}| ≤ d(n) n^{|Re s − ½| − ½} ≤ 2 n^{|Re s − ½|}
    let a = (s.re - 0.5).abs();
    let first = (n_max + 1) as f64;
    let tail = whittaker_tail(mu.re, 4.0 * PI * first * y, |j| 2.0 * 2.0 * 2.0 * (first + j as f64).powf(a), 4.0 * PI * y)?;
    Ok(Evaluation { value, tail })
}

/// `G(s; z) = Γ(s) π^{−s} Σ' y^s |qz+p|^{−2s}` for `Re s > 1`.
///
/// The lattice sum carries a smooth radial cutoff `w(r) = ½ erfc((r − r₀)/δ)`, with
/// `r = |qz+p|`; the complementary part `Σ'(1−w) r^{−2s}` is replaced by its integral
/// `(2π/y) ∫ (1−w) r^{1−2s} dr`, which is exact up to Poisson-summation terms of size
/// `exp(−(πδλ)²)`, `λ` the shortest dual-lattice vector. `δ` is chosen so that these
/// are below 1e−15; `r₀ = max(q_max, 8δ)`. The returned tail is that Poisson bound.
pub fn eval_eisenstein_lattice(s: SpectralParam, z: EvalPoint, q_max: f64) -> Result<Evaluation> {
    let s = s.s();
    if s.re <= 1.0 {
        return Err(Error::domain(format!("lattice sum diverges for Re s = {} <= 1", s.re)));
    }
    let (x, y) = (z.x(), z.y());
    let lambda = shortest_dual_vector(x, y);
    let delta = 1.9 / lambda;
    let r0 = q_max.max(8.0 * delta);
    let r_lo = r0 - 7.0 * delta;
    let r_hi = r0 + 7.0 * delta;

    let weight = |r: f64| 0.5 * libm::erfc((r - r0) / delta);
    let q_lim = (r_hi / y).floor() as i64;
    let mut sum = Complex64::new(0.0, 0.0);
    for q in -q_lim..=q_lim {
        let qy2 = (q as f64 * y).powi(2);
        let span = (r_hi * r_hi - qy2).max(0.0).sqrt();
        let centre = -(q as f64) * x;
        let p_lo = (centre - span).ceil() as i64;
        let p_hi = (centre + span).floor() as i64;
        let mut row = Complex64::new(0.0, 0.0);
        for p in p_lo..=p_hi {
            if p == 0 && q == 0 {
                continue;
            }
            let r2 = (p as f64 + q as f64 * x).powi(2) + qy2;
            let r = r2.sqrt();
            let w = if r < r_lo { 1.0 } else { weight(r) };
            row += w * (-s * r2.ln()).exp();
        }
        sum += row;
    }

    // ∫_0^∞ (1 − w(r)) r^{1−2s} dr; the integrand is below 1e−22 for r < r_lo
    let mut radial = Complex64::new(0.0, 0.0);
    for (r, wt) in composite_gauss_legendre(r_lo, r_hi, 14, 20) {
        radial += wt * (1.0 - weight(r)) * real_pow(r, 1.0 - 2.0 * s);
    }
    radial += real_pow(r_hi, 2.0 - 2.0 * s) / (2.0 * s - 2.0);
    let integral = 2.0 * PI / y * radial;

    let prefactor = complex_gamma(s)? * real_pow(PI, -s) * real_pow(y, s);
    let value = prefactor * (sum + integral);
    let poisson = (-(PI * delta * lambda).powi(2)).exp();
    Ok(Evaluation { value, tail: poisson * value.norm() })
}

/// Length of the shortest nonzero vector of the dual of the lattice `ℤ + ℤz`,
/// i.e. `min √(ξᵀ Q⁻¹ ξ)` for `Q = [[1, x], [x, x²+y²]]`.
fn shortest_dual_vector(x: f64, y: f64) -> f64 {
    let mut best = f64::INFINITY;
    let reach = (2.0 + (x * x + y * y) / y.min(1.0)).ceil() as i64 + 2;
    for a in -reach..=reach {
        for b in -reach..=reach {
            if a == 0 && b == 0 {
                continue;
            }
            let (a, b) = (a as f64, b as f64);
            let v = ((x * x + y * y) * a * a - 2.0 * x * a * b + b * b) / (y * y);
            best = best.min(v);
        }
    }
    best.sqrt()
}

/// The map `ι(ν)` on Fourier data, `ν = c.param().nu()`; the image lives at `−ν`.
pub fn iota_map(c: &CoefficientSet) -> Result<CoefficientSet> {
    let nu = c.param.nu();
    let zero = Complex64::new(0.0, 0.0);
    let int = near_integer(nu, 1e-13);
    if let Some(k) = int {
        if k.rem_euclid(2) == 1 {
            return Err(Error::domain(format!("ι(ν) is undefined for odd integer ν = {nu}")));
        }
        if k == 0 {
            let mut out = c.clone();
            out.param = c.param.reflected();
            return Ok(out);
        }
    }
    let ratio = complex_gamma((1.0 + nu) / 2.0)? * rgamma((1.0 - nu) / 2.0);
    let scale = |n: usize, v: &Complex64| real_pow(PI * n as f64, -nu) * ratio * v;
    let plus = c.plus.iter().enumerate().map(|(k, v)| scale(k + 1, v)).collect();
    let minus = c.minus.iter().enumerate().map(|(k, v)| scale(k + 1, v)).collect();

    let nonneg_int = matches!(int, Some(k) if k >= 0);
    let nonpos_int = matches!(int, Some(k) if k <= 0);
    let b0 = if !nonneg_int {
        complex_gamma(-nu / 2.0)? * rgamma((1.0 - nu) / 2.0) * c.a0 / PI.sqrt()
    } else {
        // ν ∈ 2ℕ
        rgamma((1.0 + nu) / 2.0) * c.c0
    };
    let a0 = if !nonpos_int { PI.sqrt() * complex_gamma((1.0 + nu) / 2.0)? * rgamma(nu / 2.0) * c.b0 } else { zero };
    let c0 = if matches!(int, Some(k) if k < 0) { complex_gamma((1.0 + nu) / 2.0)? * c.b0 } else { zero };
    CoefficientSet::new(c.param.reflected(), plus, minus, a0, b0, c0, c.parity)
}

/// Per-sample `|u(−1/z) − u(z)|` (relative to `|u(z)|` when `relative`), in input order.
pub fn modular_invariance_residual<F>(eval: F, samples: &[Complex64], relative: bool, exec: Execution) -> Result<ResidualTable>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync + Send,
{
    let rows = exec.map(samples, |&z| -> Result<f64> {
        let u = eval(z)?;
        let v = eval(-1.0 / z)?;
        let diff = (v - u).norm();
        Ok(if relative && u.norm() > 0.0 { diff / u.norm() } else { diff })
    });
    let residuals = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ResidualTable::new(samples.to_vec(), residuals))
}

/// Which Γ prefactor to place in front of `ι(2s−1) ε_s` in the family functional equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FePrefactor {
    /// `Γ(−s) ε_{1−s} = Γ(1−s) ι ε_s`, as written in the source.
    AsStated,
    /// `Γ(−s) ε_{1−s} = Γ(s−1) ι ε_s`, the version that holds for the coefficient
    /// formulas of `ε_s`.
    SelfConsistent,
}

/// Componentwise residual between `Γ(−s)·ε_{1−s}` and `prefactor·ι ε_s`, with `ι`
/// acting at the parameter of `ε_s`. Returns the largest absolute difference divided
/// by the largest component of the left side.
pub fn eisenstein_family_fe_residual(s: SpectralParam, n_max: usize, prefactor: FePrefactor) -> Result<f64> {
    let sv = s.s();
    if near_integer(sv, 1e-12).is_some() {
        return Err(Error::domain(format!("family functional equation excludes integer s = {sv}")));
    }
    let left = eisenstein_coefficients(s.reflected(), n_max, Normalization::Family)?.scaled(complex_gamma(-sv)?);
    let factor = match prefactor {
        FePrefactor::AsStated => complex_gamma(1.0 - sv)?,
        FePrefactor::SelfConsistent => complex_gamma(sv - 1.0)?,
    };
    let right = iota_map(&eisenstein_coefficients(s, n_max, Normalization::Family)?)?.scaled(factor);
    let zero = CoefficientSet::zero(left.param, 0);
    let scale = left.max_abs_diff(&zero);
    Ok(left.max_abs_diff(&right) / scale)
}
