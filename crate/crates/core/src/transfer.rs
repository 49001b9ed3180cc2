//! The Gauss-map transfer operator
//! `(L_s ψ)(z) = Σ_{n≥0} (z+n)^{−2s} ψ(1 + 1/(z+n))`.
//!
//! Under `φ(w) = ψ(1+w)` this is the classical `Σ_{m≥1} (w+m)^{−2s} φ(1/(w+m))`, which
//! is truncated to the Taylor monomials `(w−1)^m`, `m < N`.

use nalgebra::{DMatrix, DVector};

use crate::autoforms::SpectralParam;
use crate::exec::Execution;
use crate::periodmap::{parity_residual, three_term_residual, ClosedFormPsi, PsiEvaluator, PsiFunction};
use crate::specfun::{pow_nonzero, real_pow, EulerMaclaurin};
use crate::{c64, Complex64, Error, Result};

/// A ζ argument closer than this to 1 aborts assembly.
pub const POLE_GUARD: f64 = 1e-6;

/// Imaginary offset applied to `s` on scan grids that hit the pole guard.
pub const POLE_PERTURBATION: f64 = 1e-6;

/// Terms summed directly before the tail is resummed with Hurwitz zeta values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AssemblyConfig {
    /// The terms `m = 1..=split` of the Gauss-map sum are expanded one by one; the rest
    /// go through `ζ_H(·, split+2)`. With `split = 0` the entries reduce to the plain
    /// `ζ(·) − 1` formula, whose alternating binomial sums lose about `log10(3^N)` digits.
    pub split: usize,
    pub zeta: EulerMaclaurin,
}

impl Default for AssemblyConfig {
    fn default() -> Self {
        AssemblyConfig { split: 64, zeta: EulerMaclaurin::default() }
    }
}

/// Truncation of `L_s` in the basis `(w−1)^m` of functions `φ(w) = ψ(1+w)`.
///
/// `entries[(k, m)]` is the coefficient of `(w−1)^k` in `L_s (w−1)^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferMatrix {
    pub param: SpectralParam,
    pub entries: DMatrix<Complex64>,
    pub config: AssemblyConfig,
}

impl TransferMatrix {
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }
}

pub fn build_transfer_matrix(s: SpectralParam, n: usize) -> Result<TransferMatrix> {
    build_transfer_matrix_with(s, n, AssemblyConfig::default(), Execution::default())
}

pub fn build_transfer_matrix_with(s: SpectralParam, n: usize, config: AssemblyConfig, exec: Execution) -> Result<TransferMatrix> {
    if n == 0 {
        return Err(Error::domain("transfer matrix needs N >= 1"));
    }
    let two_s = 2.0 * s.s();
    for i in 0..2 * n {
        let a = two_s + i as f64;
        if (a - 1.0).norm() < POLE_GUARD {
            return Err(Error::PoleGuard(a));
        }
    }
    if !two_s.re.is_finite() || !two_s.im.is_finite() {
        return Err(Error::domain(format!("non-finite s = {}", s.s())));
    }

    let mut entries = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));

    // direct part: (−1)^m (r−1+ε)^m (r+ε)^{−2s−m} for r = 2..=split+1, expanded in ε = w−1
    let direct = exec.map_range(config.split, |i| direct_term(two_s, (i + 2) as f64, n));
    for block in &direct {
        entries += block;
    }

    // tail: (−1)^m Σ_j C(m,j)(−1)^j Σ_k C(−(2s+j), k) ζ_H(2s+j+k, split+2) ε^k
    let x = c64((config.split + 2) as f64, 0.0);
    let hz: Vec<Complex64> = exec
        .map_range(2 * n, |i| config.zeta.hurwitz(two_s + i as f64, x))
        .into_iter()
        .collect::<Result<_>>()?;
    let binom_neg: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            let a = -(two_s + j as f64);
            let mut row = Vec::with_capacity(n);
            let mut b = Complex64::new(1.0, 0.0);
            for k in 0..n {
                row.push(b);
                b *= (a - k as f64) / (k + 1) as f64;
            }
            row
        })
        .collect();
    let columns = exec.map_range(n, |m| {
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        let mut binom_mj = 1.0f64;
        for j in 0..=m {
            let sign = if (m + j) % 2 == 0 { 1.0 } else { -1.0 };
            for (k, c) in col.iter_mut().enumerate() {
                *c += sign * binom_mj * binom_neg[j][k] * hz[j + k];
            }
            binom_mj *= (m - j) as f64 / (j + 1) as f64;
        }
        col
    });
    for (m, col) in columns.into_iter().enumerate() {
        for (k, c) in col.into_iter().enumerate() {
            entries[(k, m)] += c;
        }
    }

    if entries.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NoConvergence(format!("non-finite transfer matrix entry at s = {}", s.s())));
    }
    Ok(TransferMatrix { param: s, entries, config })
}

/// Taylor coefficients (in `ε`, degree `< n`) of `(−1)^m (r−1+ε)^m (r+ε)^{−2s−m}` for
/// every `m < n`, as the columns of an `n × n` matrix.
fn direct_term(two_s: Complex64, r: f64, n: usize) -> DMatrix<Complex64> {
    // work in η = −ε so that all factors have a clean sign pattern:
    // (r−η)^{−2s} = r^{−2s} Σ C(2s+l−1, l) r^{−l} η^l,
    // (r−1−η)/(r−η) = 1 − 1/(r−η) = (1 − 1/r) − Σ_{l≥1} r^{−l−1} η^l
    let mut p = vec![Complex64::new(0.0, 0.0); n];
    let mut b = real_pow(r, -two_s);
    for (l, slot) in p.iter_mut().enumerate() {
        *slot = b;
        b *= (two_s + l as f64) / ((l + 1) as f64 * r);
    }
    let mut h = vec![0.0f64; n];
    h[0] = 1.0 - 1.0 / r;
    let mut rp = 1.0 / (r * r);
    for slot in h.iter_mut().skip(1) {
        *slot = -rp;
        rp /= r;
    }
    let mut out = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    let mut g = p;
    for m in 0..n {
        for k in 0..n {
            // η^k = (−1)^k ε^k, and the overall (−1)^m
            let sign = if (m + k) % 2 == 0 { 1.0 } else { -1.0 };
            out[(k, m)] = sign * g[k];
        }
        if m + 1 < n {
            let mut next = vec![Complex64::new(0.0, 0.0); n];
            for (i, gi) in g.iter().enumerate() {
                for (l, hl) in h.iter().enumerate().take(n - i) {
                    next[i + l] += gi * hl;
                }
            }
            g = next;
        }
    }
    out
}

/// Eigenvalue with its right eigenvector, scaled so the largest-modulus entry is `1`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub value: Complex64,
    pub vector: DVector<Complex64>,
}

/// Full spectrum by complex Schur decomposition and back-substitution, sorted by
/// descending modulus.
pub fn eigen_spectrum(m: &TransferMatrix) -> Result<Vec<EigenPair>> {
    eigen_spectrum_of(&m.entries)
}

pub(crate) fn eigen_spectrum_of(a: &DMatrix<Complex64>) -> Result<Vec<EigenPair>> {
    let n = a.nrows();
    let schur = nalgebra::Schur::try_new(a.clone(), f64::EPSILON, 10_000 * n.max(1))
        .ok_or_else(|| Error::NoConvergence("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let scale = t.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * scale;
    let mut pairs = Vec::with_capacity(n);
    for i in 0..n {
        let lambda = t[(i, i)];
        let mut y = DVector::from_element(n, Complex64::new(0.0, 0.0));
        y[i] = Complex64::new(1.0, 0.0);
        for j in (0..i).rev() {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in j + 1..=i {
                acc += t[(j, l)] * y[l];
            }
            let mut d = t[(j, j)] - lambda;
            if d.norm() < small {
                d = Complex64::new(small, 0.0);
            }
            y[j] = -acc / d;
        }
        let mut v = &q * y;
        normalize_max_entry(&mut v);
        pairs.push(EigenPair { value: lambda, vector: v });
    }
    pairs.sort_by(|a, b| b.value.norm().total_cmp(&a.value.norm()));
    Ok(pairs)
}

fn normalize_max_entry(v: &mut DVector<Complex64>) {
    let (idx, _) = v.iter().enumerate().fold((0, -1.0), |(bi, bm), (i, x)| if x.norm() > bm { (i, x.norm()) } else { (bi, bm) });
    let pivot = v[idx];
    if pivot.norm() > 0.0 {
        v.iter_mut().for_each(|x| *x /= pivot);
        v[idx] = Complex64::new(1.0, 0.0);
    }
}

/// `(det(I − M), det(I + M))` by LU factorization.
pub fn fredholm_dets(s: SpectralParam, n: usize) -> Result<(Complex64, Complex64)> {
    Ok(fredholm_dets_of(&build_transfer_matrix(s, n)?))
}

pub fn fredholm_dets_of(m: &TransferMatrix) -> (Complex64, Complex64) {
    let id = DMatrix::<Complex64>::identity(m.size(), m.size());
    ((&id - &m.entries).lu().determinant(), (&id + &m.entries).lu().determinant())
}

/// Eigenvalue of `M_N(s)` nearest to `target`, with its eigenvector.
pub fn nearest_eigenpair(m: &TransferMatrix, target: Complex64) -> Result<EigenPair> {
    let spectrum = eigen_spectrum(m)?;
    spectrum
        .into_iter()
        .min_by(|a, b| (a.value - target).norm().total_cmp(&(b.value - target).norm()))
        .ok_or_else(|| Error::NoConvergence("empty spectrum".into()))
}

/// Direct summation cutoff and tail order for [`apply_transfer`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApplyConfig {
    pub n_terms: usize,
    pub tail_order: usize,
    /// Sample count on the circle used for the Taylor coefficients of `ψ` at 1.
    pub cauchy_points: usize,
}

impl Default for ApplyConfig {
    fn default() -> Self {
        ApplyConfig { n_terms: 10_000, tail_order: 4, cauchy_points: 64 }
    }
}

/// `Σ_{n<N} (z+n)^{−2s} ψ(1+1/(z+n))` plus the tail `Σ_j c_j ζ_H(2s+j, z+N)`, where
/// `c_j` are the Taylor coefficients of `ψ` at 1 (from a Cauchy integral).
///
/// The exponent comes from `s`, independently of the parameter stored in `psi`.
pub fn apply_transfer(psi: &dyn PsiFunction, s: SpectralParam, z: Complex64, config: ApplyConfig) -> Result<Complex64> {
    if !(z.re > 0.0) {
        return Err(Error::domain(format!("apply_transfer needs Re z > 0, got {z}")));
    }
    let two_s = 2.0 * s.s();
    if config.tail_order > 0 && two_s.re + config.tail_order as f64 <= 1.0 {
        return Err(Error::TailDivergence(two_s.re + config.tail_order as f64));
    }
    if config.tail_order == 0 && two_s.re <= 1.0 {
        return Err(Error::TailDivergence(two_s.re));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for n in (0..config.n_terms).rev() {
        let w = z + n as f64;
        sum += pow_nonzero(w, -two_s) * psi.eval(1.0 + 1.0 / w)?;
    }
    if config.tail_order > 0 {
        let coeffs = taylor_at_one(psi, config.tail_order, config.cauchy_points)?;
        let em = EulerMaclaurin::default();
        let x = z + config.n_terms as f64;
        for (j, c) in coeffs.iter().enumerate() {
            if *c != Complex64::new(0.0, 0.0) {
                sum += c * em.hurwitz_off_cut(two_s + j as f64, x)?;
            }
        }
    }
    Ok(sum)
}

fn taylor_at_one(psi: &dyn PsiFunction, order: usize, points: usize) -> Result<Vec<Complex64>> {
    let rho = psi
        .taylor_radius_at_one()
        .ok_or_else(|| Error::domain("ψ has no Taylor disk at 1; use tail_order 0"))?;
    let points = points.max(2 * order);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); order];
    for p in 0..points {
        let theta = 2.0 * std::f64::consts::PI * p as f64 / points as f64;
        let e = Complex64::from_polar(1.0, theta);
        let v = psi.eval(1.0 + rho * e)?;
        for (j, c) in coeffs.iter_mut().enumerate() {
            *c += v * e.powi(-(j as i32));
        }
    }
    for (j, c) in coeffs.iter_mut().enumerate() {
        *c /= points as f64 * rho.powi(j as i32);
    }
    Ok(coeffs)
}

/// Sample points for [`fixed_point_check`].
pub fn fixed_point_samples() -> Vec<Complex64> {
    (0..10).map(|i| c64(1.2 + 1.6 * i as f64 / 9.0, 0.0)).collect()
}

/// `max |L_1(1/z) − 1/z|` over ten points of `[1.2, 2.8]`.
pub fn fixed_point_check(config: ApplyConfig) -> Result<f64> {
    let psi = ClosedFormPsi { param: SpectralParam::from_s(c64(1.0, 0.0)), f: |z| 1.0 / z, radius_at_one: 0.5 };
    let mut worst: f64 = 0.0;
    for z in fixed_point_samples() {
        let v = apply_transfer(&psi, psi.param, z, config)?;
        worst = worst.max((v - 1.0 / z).norm());
    }
    Ok(worst)
}

/// One grid point of a critical-line scan.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub t: f64,
    pub nearest: Complex64,
    pub distance: f64,
    pub det_minus: Complex64,
    pub det_plus: Complex64,
    /// `s` was shifted by [`POLE_PERTURBATION`] to clear the pole guard.
    pub perturbed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bracket {
    pub t_lo: f64,
    pub t_hi: f64,
    pub sign: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scan {
    pub rows: Vec<ScanRow>,
    pub brackets: Vec<Bracket>,
}

/// Distance to `±1` below which a local minimum is bracketed even without a sign change.
pub const CROSSING_THRESHOLD: f64 = 0.15;

fn critical(t: f64) -> SpectralParam {
    SpectralParam::from_s(c64(0.5, t))
}

fn matrix_on_line(t: f64, n: usize, exec: Execution) -> Result<(TransferMatrix, bool)> {
    match build_transfer_matrix_with(critical(t), n, AssemblyConfig::default(), exec) {
        Err(Error::PoleGuard(_)) => {
            let s = SpectralParam::from_s(c64(0.5, t + POLE_PERTURBATION));
            Ok((build_transfer_matrix_with(s, n, AssemblyConfig::default(), exec)?, true))
        }
        other => other.map(|m| (m, false)),
    }
}

/// Samples the eigenvalue nearest to `sign` on `s = ½ + it` and brackets its local
/// approaches below [`CROSSING_THRESHOLD`].
pub fn scan_critical_line(t_lo: f64, t_hi: f64, step: f64, n: usize, sign: f64, exec: Execution) -> Result<Scan> {
    if !(step > 0.0) {
        return Err(Error::domain("scan step must be positive"));
    }
    if !(t_lo < t_hi) {
        return Ok(Scan { rows: Vec::new(), brackets: Vec::new() });
    }
    let count = ((t_hi - t_lo) / step + 1e-9).floor() as usize + 1;
    let grid: Vec<f64> = (0..count).map(|i| t_lo + i as f64 * step).collect();
    let target = c64(sign, 0.0);
    let rows = exec.map(&grid, |&t| -> Result<ScanRow> {
        // each grid point is an independent task; assembly inside it stays sequential
        let (m, perturbed) = matrix_on_line(t, n, Execution::Sequential)?;
        let nearest = nearest_eigenpair(&m, target)?.value;
        let (det_minus, det_plus) = fredholm_dets_of(&m);
        Ok(ScanRow { t, nearest, distance: (nearest - target).norm(), det_minus, det_plus, perturbed })
    });
    let rows: Vec<ScanRow> = rows.into_iter().collect::<Result<_>>()?;
    let mut brackets = Vec::new();
    for i in 0..rows.len() {
        let d = rows[i].distance;
        let left = if i > 0 { rows[i - 1].distance } else { f64::INFINITY };
        let right = rows.get(i + 1).map_or(f64::INFINITY, |r| r.distance);
        if d < CROSSING_THRESHOLD && d <= left && d < right {
            let lo = rows[i.saturating_sub(1)].t;
            let hi = rows[(i + 1).min(rows.len() - 1)].t;
            brackets.push(Bracket { t_lo: lo, t_hi: hi, sign });
        }
    }
    Ok(Scan { rows, brackets })
}

/// Stopping rules for [`refine_crossing`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefineConfig {
    /// Width in `t` at which the iteration stops.
    pub t_tol: f64,
    pub max_iter: usize,
    /// Largest `|λ(t*) − sign|` accepted as a crossing.
    pub accept: f64,
}

impl Default for RefineConfig {
    fn default() -> Self {
        RefineConfig { t_tol: 1e-9, max_iter: 200, accept: 1e-4 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossingResiduals {
    /// `‖Mv − sign·v‖∞ / ‖v‖∞`.
    pub eigen_residual: f64,
    pub three_term: f64,
    /// `|ψ(1)| / ‖v‖∞`.
    pub psi_at_one: f64,
    pub parity: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Crossing {
    pub t_star: f64,
    pub s: SpectralParam,
    pub eigen_sign: f64,
    pub eigenvalue_at_t_star: Complex64,
    pub eigvec: DVector<Complex64>,
    pub residuals: CrossingResiduals,
}

/// Points where `z`, `z+1` and `z/(z+1)` all lie well inside the Taylor disk.
pub fn three_term_samples() -> Vec<Complex64> {
    vec![c64(2.0, 0.0), c64(2.05, 0.0), c64(2.1, 0.0), c64(2.15, 0.05), c64(2.05, -0.05)]
}

/// Points where `z` and `1/z` both lie well inside the Taylor disk.
pub fn parity_samples() -> Vec<Complex64> {
    vec![c64(1.0, 0.0), c64(0.9, 0.0), c64(1.1, 0.0), c64(1.0, 0.1), c64(0.95, -0.05)]
}

/// Minimizes `|λ(t) − sign|` over the bracket, where `λ(t)` is the eigenvalue of
/// `M_N(½+it)` nearest to `sign`. The minimum is the root of
/// `h(t) = Re((λ − sign)·conj λ′(t))`, found by regula falsi with the Illinois
/// modification; `λ′` is a central difference.
pub fn refine_crossing(bracket: Bracket, n: usize, config: RefineConfig) -> Result<Crossing> {
    let target = c64(bracket.sign, 0.0);
    let lambda = |t: f64| -> Result<Complex64> {
        let (m, _) = matrix_on_line(t, n, Execution::Sequential)?;
        Ok(nearest_eigenpair(&m, target)?.value)
    };
    let dt = 1e-6;
    let h = |t: f64| -> Result<f64> {
        let l = lambda(t)?;
        let d = (lambda(t + dt)? - lambda(t - dt)?) / (2.0 * dt);
        Ok(((l - target) * d.conj()).re)
    };
    let (mut a, mut b) = (bracket.t_lo, bracket.t_hi);
    let (mut fa, mut fb) = (h(a)?, h(b)?);
    if fa.signum() == fb.signum() {
        return Err(Error::NoConvergence(format!("no sign change of the approach indicator on [{a}, {b}]")));
    }
    let mut side = 0i32;
    let mut iter = 0;
    while (b - a).abs() > config.t_tol {
        iter += 1;
        if iter > config.max_iter {
            return Err(Error::NoConvergence(format!("refinement stalled on [{a}, {b}]")));
        }
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c > a.min(b) && c < a.max(b)) {
            c = 0.5 * (a + b);
        }
        let fc = h(c)?;
        if fc == 0.0 {
            a = c;
            b = c;
            break;
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    let t_star = 0.5 * (a + b);
    let (m, _) = matrix_on_line(t_star, n, Execution::Sequential)?;
    let pair = nearest_eigenpair(&m, target)?;
    let miss = (pair.value - target).norm();
    if miss > config.accept {
        return Err(Error::NoConvergence(format!(
            "closest approach |λ − {}| = {miss:e} at t = {t_star} exceeds {:e}",
            bracket.sign, config.accept
        )));
    }
    let residuals = crossing_residuals(&m, &pair.vector, bracket.sign)?;
    Ok(Crossing {
        t_star,
        s: m.param,
        eigen_sign: bracket.sign,
        eigenvalue_at_t_star: pair.value,
        eigvec: pair.vector,
        residuals,
    })
}

fn crossing_residuals(m: &TransferMatrix, v: &DVector<Complex64>, sign: f64) -> Result<CrossingResiduals> {
    let vmax = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mv = &m.entries * v;
    let eigen_residual = mv.iter().zip(v.iter()).map(|(a, b)| (a - sign * b).norm()).fold(0.0, f64::max) / vmax;
    let psi = taylor_psi(m.param, v);
    let mut three_term: f64 = 0.0;
    for z in three_term_samples() {
        three_term = three_term.max(three_term_residual(&psi, z)?.norm() / vmax);
    }
    let mut parity: f64 = 0.0;
    for z in parity_samples() {
        parity = parity.max(parity_residual(&psi, z, sign)?.norm() / vmax);
    }
    let psi_at_one = psi.eval(c64(1.0, 0.0))?.norm() / vmax;
    Ok(CrossingResiduals { eigen_residual, three_term, psi_at_one, parity })
}

/// Radius of the disk about `z = 2` on which eigenfunction polynomials are evaluated.
pub const EIGENFUNCTION_RADIUS: f64 = 1.5 * 0.9;

fn taylor_psi(param: SpectralParam, v: &DVector<Complex64>) -> PsiEvaluator {
    PsiEvaluator::taylor(param, c64(2.0, 0.0), v.iter().copied().collect(), EIGENFUNCTION_RADIUS)
}

/// `ψ(z) = Σ v_m (z−2)^m` on `|z − 2| < 1.35`.
pub fn eigenfunction_to_psi(c: &Crossing) -> PsiEvaluator {
    taylor_psi(c.s, &c.eigvec)
}

/// Residuals of `L ψ − ψ` for a period function `ψ` under the two exponent
/// conventions `2s` and `2 − 2s` (the latter is `L_{1−ν}` with `ν = 2s − 1`).
#[derive(Clone, Debug, PartialEq)]
pub struct ConventionProbe {
    pub exponent_2s: f64,
    pub exponent_2_minus_2s: f64,
}

/// Applies both operator conventions to `ψ` at the sample points and reports the
/// largest `|Lψ − ψ| / |ψ|`.
pub fn convention_probe(psi: &dyn PsiFunction, samples: &[Complex64], config: ApplyConfig) -> Result<ConventionProbe> {
    let s = psi.param();
    let reflected = s.reflected();
    let mut worst = [0.0f64; 2];
    for &z in samples {
        let v = psi.eval(z)?;
        for (slot, p) in worst.iter_mut().zip([s, reflected]) {
            let l = apply_transfer(psi, p, z, config)?;
            *slot = slot.max((l - v).norm() / v.norm());
        }
    }
    Ok(ConventionProbe { exponent_2s: worst[0], exponent_2_minus_2s: worst[1] })
}
