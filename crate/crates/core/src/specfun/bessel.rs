use std::f64::consts::PI;

use super::{complex_gamma, pow_nonzero};
use crate::{Complex64, Error, Result};

/// Default switch point between the power series and the contour integral.
pub const BESSEL_CROSSOVER: f64 = 2.0;

const UNDERFLOW_X: f64 = 700.0;

/// Modified Bessel function `K_μ(x)` of complex order and real positive argument.
///
/// For `x < crossover` the value comes from the power series of `I_{±μ}`, written as
/// `K_μ = ½[Γ(μ)(x/2)^{−μ} S_{−μ} + Γ(−μ)(x/2)^{μ} S_μ]`. Near integer orders
/// (`|sin πμ| < sin_guard`) and for `x ≥ crossover` the integral
/// `½∫ exp(−x cosh t + μt) dt` is evaluated by the trapezoidal rule along a line
/// `Im t = σ` chosen to tame the oscillation of large imaginary orders.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselK {
    pub crossover: f64,
    pub sin_guard: f64,
    pub rel_tol: f64,
}

impl Default for BesselK {
    fn default() -> Self {
        BesselK { crossover: BESSEL_CROSSOVER, sin_guard: 0.1, rel_tol: 1e-15 }
    }
}

impl BesselK {
    pub fn eval(&self, mu: Complex64, x: f64) -> Result<Complex64> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::domain(format!("bessel_k needs x > 0, got {x}")));
        }
        if x > UNDERFLOW_X {
            return Err(Error::Underflow(x));
        }
        if x < self.crossover && (PI * mu).sin().norm() >= self.sin_guard {
            Ok(self.series(mu, x))
        } else {
            self.integral(mu, x)
        }
    }

    /// Series branch only; valid for non-integer `μ`.
    pub fn series(&self, mu: Complex64, x: f64) -> Complex64 {
        let half = Complex64::new(x / 2.0, 0.0);
        let plus = complex_gamma(-mu).map(|g| g * pow_nonzero(half, mu) * reduced_series(mu, x));
        let minus = complex_gamma(mu).map(|g| g * pow_nonzero(half, -mu) * reduced_series(-mu, x));
        match (plus, minus) {
            (Ok(p), Ok(m)) => 0.5 * (p + m),
            _ => Complex64::new(f64::NAN, f64::NAN),
        }
    }

    /// Integral branch only.
    pub fn integral(&self, mu: Complex64, x: f64) -> Result<Complex64> {
        if x > UNDERFLOW_X {
            return Err(Error::Underflow(x));
        }
        let r = mu.im.abs();
        // pass through the saddle sinh t = μ/x when it is reachable, otherwise stay a
        // margin δ below the edge of the strip of decay
        let delta = (3.0 / r.max(1.0)).clamp(0.1, 0.3);
        let sigma = mu.im.signum() * (r / x).min(1.0).asin().min(0.5 * PI - delta);
        let shift = Complex64::new(0.0, sigma);
        // e^{−x} is factored out so that large x does not push samples into subnormals
        let integrand = |u: f64| {
            let t = Complex64::new(u, 0.0) + shift;
            (-x * (t.cosh() - 1.0) + mu * t).exp()
        };
        let log_mag = |u: f64| -x * u.cosh() * sigma.cos() + mu.re * u - mu.im * sigma;

        // truncate where the integrand has fallen 45 e-folds below its peak
        let mut peak = log_mag(0.0);
        let mut limits = [0.0f64; 2];
        for (side, dir) in [1.0f64, -1.0].iter().enumerate() {
            let mut u = 0.0;
            loop {
                u += 0.25 * dir;
                let e = log_mag(u);
                peak = peak.max(e);
                if e < peak - 45.0 && (x * u.sinh() * sigma.cos()) * dir > mu.re * dir {
                    break;
                }
                if u.abs() > 60.0 {
                    return Err(Error::NoConvergence(format!("K_{mu}({x}) integrand does not decay")));
                }
            }
            limits[side] = u.abs();
        }
        let (hi, lo) = (limits[0], -limits[1]);

        let mut h = 0.25;
        let n = ((hi - lo) / h).ceil() as usize;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        for k in 0..=n {
            let v = integrand(lo + k as f64 * h);
            sum += v;
            abs_sum += v.norm();
        }
        let mut estimate = sum * h;
        let mut points = n;
        for _ in 0..14 {
            let mut odd = Complex64::new(0.0, 0.0);
            for k in 0..points {
                let v = integrand(lo + (k as f64 + 0.5) * h);
                odd += v;
                abs_sum += v.norm();
            }
            sum += odd;
            h *= 0.5;
            points *= 2;
            let next = sum * h;
            let change = (next - estimate).norm();
            estimate = next;
            // below the rounding floor of an oscillatory sum no further halving helps
            let floor = 64.0 * f64::EPSILON * abs_sum * h;
            if change <= (self.rel_tol * estimate.norm()).max(floor) {
                return Ok(0.5 * (-x).exp() * estimate);
            }
        }
        Err(Error::NoConvergence(format!("K_{mu}({x}) quadrature did not settle")))
    }
}

/// `S_ν = Σ_k (x²/4)^k / (k! (1+ν)_k)`.
fn reduced_series(nu: Complex64, x: f64) -> Complex64 {
    let q = x * x / 4.0;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..500 {
        let kf = k as f64;
        term *= q / (kf * (nu + kf));
        sum += term;
        if kf > q.sqrt() && term.norm() <= 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

/// `K_μ(x)` with default settings.
pub fn bessel_k(mu: Complex64, x: f64) -> Result<Complex64> {
    BesselK::default().eval(mu, x)
}

/// Whittaker function `W_{0,μ}(y) = √(y/π) K_μ(y/2)` for `y > 0`.
pub fn whittaker_w0(mu: Complex64, y: f64) -> Result<Complex64> {
    let k = bessel_k(mu, y / 2.0)?;
    Ok((y / PI).sqrt() * k)
}
