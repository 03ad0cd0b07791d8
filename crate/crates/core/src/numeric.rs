//! Scalar root finding, unimodal search and quadrature.

use crate::error::{Error, Result};

/// Stopping rules for the bracketed solvers.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Absolute step tolerance.
    pub abs_tol: f64,
    /// Relative step tolerance; the effective tolerance is the smaller of the two.
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            abs_tol: 1e-12,
            rel_tol: 4.0 * f64::EPSILON,
            max_iter: 200,
        }
    }
}

impl SolverOptions {
    fn tol_at(&self, x: f64) -> f64 {
        self.abs_tol.min(self.rel_tol * x.abs()).max(f64::MIN_POSITIVE)
    }
}

/// Bisection safeguarded Newton iteration.
///
/// `f` returns the function value and its derivative. `[lo, hi]` must bracket
/// a sign change. Newton steps that leave the current bracket, or that do not
/// shrink it at least as fast as bisection would, are replaced by bisection.
pub fn newton_bisect<F>(f: F, lo: f64, hi: f64, opts: SolverOptions) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let (f_lo, _) = f(lo);
    let (f_hi, _) = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::NoBracket { lo, hi, f_lo, f_hi });
    }
    // keep f(neg) < 0 < f(pos)
    let (mut neg, mut pos) = if f_lo < 0.0 { (lo, hi) } else { (hi, lo) };
    let mut x = 0.5 * (lo + hi);
    let mut dx_old = (hi - lo).abs();
    let mut dx = dx_old;
    let (mut fx, mut dfx) = f(x);
    for _ in 0..opts.max_iter {
        if fx == 0.0 {
            return Ok(x);
        }
        let newton_ok = dfx.is_finite()
            && dfx != 0.0
            && (((x - pos) * dfx - fx) * ((x - neg) * dfx - fx)) < 0.0
            && (2.0 * fx).abs() <= (dx_old * dfx).abs();
        dx_old = dx;
        if newton_ok {
            dx = fx / dfx;
            x -= dx;
        } else {
            dx = 0.5 * (pos - neg);
            x = neg + dx;
        }
        if dx.abs() <= opts.tol_at(x) {
            return Ok(x);
        }
        let (v, d) = f(x);
        fx = v;
        dfx = d;
        if fx < 0.0 {
            neg = x;
        } else {
            pos = x;
        }
        if (pos - neg).abs() <= opts.tol_at(x) {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence {
        what: "newton-bisection",
        iterations: opts.max_iter,
        residual: fx,
    })
}

/// Plain bisection on a bracketed sign change.
pub fn bisect<F>(f: F, lo: f64, hi: f64, opts: SolverOptions) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::NoBracket { lo, hi, f_lo, f_hi });
    }
    let (mut a, mut b, mut fa) = (lo, hi, f_lo);
    for _ in 0..opts.max_iter {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= 2.0 * opts.tol_at(m) {
            return Ok(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Err(Error::NoConvergence {
        what: "bisection",
        iterations: opts.max_iter,
        residual: (b - a).abs(),
    })
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the maximum of a unimodal function on `[lo, hi]`.
///
/// Returns `(argmax, max)` of the interior iterate; see [`maximize_unimodal`]
/// for the variant that also compares the endpoints.
pub fn golden_section_max<F>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    // 200 iterations shrink any finite interval far below f64 resolution
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Maximum of a unimodal function on a closed interval.
///
/// The golden-section iterate is compared against both endpoints so a
/// boundary maximum is reported exactly. Ties go to the smallest argument.
pub fn maximize_unimodal<F>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let f_lo = f(lo);
    if hi <= lo {
        return (lo, f_lo);
    }
    let f_hi = f(hi);
    let (x, fx) = golden_section_max(&f, lo, hi, tol);
    let mut best = (lo, f_lo);
    if fx > best.1 {
        best = (x, fx);
    }
    if f_hi > best.1 {
        best = (hi, f_hi);
    }
    best
}

/// Adaptive Simpson quadrature with Richardson correction.
///
/// `tol` is an absolute tolerance. Requests below the rounding level of the
/// integral are raised to it, which keeps the recursion finite.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    SimpsonCtx { f: &f }.step(a, b, fa, fm, fb, whole, tol, 50)
}

struct SimpsonCtx<'a, F> {
    f: &'a F,
}

impl<F: Fn(f64) -> f64> SimpsonCtx<'_, F> {
    #[allow(clippy::too_many_arguments)]
    fn step(&self, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let f = self.f;
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        // rounding noise of the panel itself
        let eff = tol.max(64.0 * f64::EPSILON * (left.abs() + right.abs()));
        if depth == 0 || delta.abs() <= 15.0 * eff {
            return left + right + delta / 15.0;
        }
        self.step(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + self.step(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Natural log of the gamma function.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Gaussian tail probability `Q(x) = P(N(0,1) > x)`.
pub fn gaussian_q(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}
