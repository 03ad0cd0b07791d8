//! Scalar functions of the Gaussian-channel exponent problem and the root
//! solvers that invert them.
//!
//! Rates are in nats per dimension. The parametric rate `R(t)` and the
//! correlation `τ(t)` map a nonnegative parameter `t` onto rates and
//! correlations; most bounds are written in terms of them.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::numeric::{bisect, newton_bisect, SolverOptions};

/// Per-dimension signal power `A` of the channel (noise has unit variance).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelParams {
    a: f64,
}

impl ChannelParams {
    pub fn new(a: f64) -> Result<Self> {
        if a.is_finite() && a > 0.0 {
            Ok(ChannelParams { a })
        } else {
            Err(domain("A", a, "(0, inf)"))
        }
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }
}

/// `R(t) = (1+t) ln(1+t) − t ln t`, with `R(0) = 0`.
pub fn rate_of_t(t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(domain("t", t, "[0, inf)"));
    }
    Ok(rate_of_t_unchecked(t))
}

#[inline]
pub(crate) fn rate_of_t_unchecked(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        (1.0 + t) * t.ln_1p() - t * t.ln()
    }
}

/// Inverse of [`rate_of_t`]: the unique `t ≥ 0` with `R(t) = r`.
pub fn t_of_rate(r: f64) -> Result<f64> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(domain("R", r, "[0, inf)"));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    // R(t) >= ln(1+t), so t = e^R always overshoots; grow anyway in case of
    // rounding at the top end.
    let mut hi = r.exp();
    while rate_of_t_unchecked(hi) < r {
        hi *= 2.0;
    }
    let f = |t: f64| {
        if t <= 0.0 {
            (-r, f64::INFINITY)
        } else {
            (rate_of_t_unchecked(t) - r, (1.0 / t).ln_1p())
        }
    };
    newton_bisect(f, 0.0, hi, SolverOptions::default())
}

/// `τ(t) = 2√(t(1+t)) / (1+2t)`.
pub fn tau_of_t(t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(domain("t", t, "[0, inf)"));
    }
    Ok(tau_unchecked(t))
}

#[inline]
pub(crate) fn tau_unchecked(t: f64) -> f64 {
    2.0 * (t * (1.0 + t)).sqrt() / (1.0 + 2.0 * t)
}

/// Channel capacity `C(A) = ½ ln(1+A)`.
pub fn capacity(p: ChannelParams) -> f64 {
    0.5 * p.a.ln_1p()
}

/// Critical rate `R_crit(A) = ½ ln((2 + A + √(A²+4)) / 4)`.
pub fn r_crit(p: ChannelParams) -> f64 {
    let a = p.a;
    0.5 * ((2.0 + a + (a * a + 4.0).sqrt()) / 4.0).ln()
}

/// `g(R,A) = ½(√(A(1−e^{−2R})) + √(A(1−e^{−2R}) + 4))`.
pub fn g_sp(r: f64, p: ChannelParams) -> f64 {
    let u = p.a * -(-2.0 * r).exp_m1();
    0.5 * (u.sqrt() + (u + 4.0).sqrt())
}

/// Sphere-packing exponent `E_sp(R, A)` for `0 < R ≤ C(A)`.
pub fn e_sp(r: f64, p: ChannelParams) -> Result<f64> {
    let c = capacity(p);
    if !(r > 0.0 && r <= c) {
        return Err(domain("R", r, "(0, C(A)]"));
    }
    Ok(e_sp_unchecked(r, p))
}

pub(crate) fn e_sp_unchecked(r: f64, p: ChannelParams) -> f64 {
    let a = p.a;
    let u = a * -(-2.0 * r).exp_m1();
    let g = 0.5 * (u.sqrt() + (u + 4.0).sqrt());
    (0.5 * a - 0.5 * u.sqrt() * g - g.ln() + r).max(0.0)
}

/// `D(t) = ln((1+t)/t) − 1/(2√(t(1+t))) − 1/(1+2t)`, `t > 0`.
pub fn d_of_t(t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain("t", t, "(0, inf)"));
    }
    Ok((1.0 / t).ln_1p() - 0.5 / (t * (1.0 + t)).sqrt() - 1.0 / (1.0 + 2.0 * t))
}

/// Slack allowed when checking `ρ ≥ τ(t)`; τ is itself a rounded value.
const TAU_SLACK: f64 = 1e-12;

fn spectrum_discriminant(t: f64, rho: f64) -> f64 {
    let w = 1.0 + 2.0 * t;
    (w * w * rho * rho - 4.0 * t * (1.0 + t)).max(0.0)
}

fn check_spectrum_args(t: f64, rho: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(domain("t", t, "[0, inf)"));
    }
    if !(rho <= 1.0 + TAU_SLACK) || rho < tau_unchecked(t) - TAU_SLACK {
        return Err(domain("rho", rho, "[tau(t), 1]"));
    }
    Ok(())
}

/// `q(t, ρ) = ρ + √((1+2t)²ρ² − 4t(1+t))`.
fn q_of(t: f64, rho: f64) -> f64 {
    rho + spectrum_discriminant(t, rho).sqrt()
}

/// Spectrum exponent function
/// `J(t,ρ) = (1+2t) ln(2tρ + q) − ln q − t ln(4t(1+t))`, defined for `ρ ≥ τ(t)`.
pub fn j_spectrum(t: f64, rho: f64) -> Result<f64> {
    check_spectrum_args(t, rho)?;
    Ok(j_unchecked(t, rho))
}

pub(crate) fn j_unchecked(t: f64, rho: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let q = q_of(t, rho);
    (1.0 + 2.0 * t) * (2.0 * t * rho + q).ln() - q.ln() - t * (4.0 * t * (1.0 + t)).ln()
}

/// `∂J/∂ρ = 4t(1+t) / q(t,ρ)`.
pub fn j_spectrum_d_rho(t: f64, rho: f64) -> Result<f64> {
    check_spectrum_args(t, rho)?;
    Ok(4.0 * t * (1.0 + t) / q_of(t, rho))
}

/// `∂J/∂t = 2 ln(2tρ + q) − ln(4t(1+t))`, `t > 0`.
pub fn j_spectrum_d_t(t: f64, rho: f64) -> Result<f64> {
    check_spectrum_args(t, rho)?;
    if t == 0.0 {
        return Err(domain("t", t, "(0, inf)"));
    }
    Ok(2.0 * (2.0 * t * rho + q_of(t, rho)).ln() - (4.0 * t * (1.0 + t)).ln())
}

/// `∂²J/∂ρ²`, strictly negative for `ρ > τ(t)`.
pub fn j_spectrum_d_rho2(t: f64, rho: f64) -> Result<f64> {
    check_spectrum_args(t, rho)?;
    let w = 1.0 + 2.0 * t;
    let disc = spectrum_discriminant(t, rho);
    if disc == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let q = rho + disc.sqrt();
    Ok(-4.0 * t * (1.0 + t) / (q * q) * (1.0 + w * w * rho / disc.sqrt()))
}

/// Derived constants of the bound families.
///
/// The `t_bar2`, `r_bar2`, `tau_bar2`, `a_const` and `a0` members do not
/// depend on `A`; they are recomputed with every set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdSet {
    pub a: f64,
    pub capacity: f64,
    pub r_crit: f64,
    pub r_bar1: f64,
    pub r_bar3: f64,
    pub r_low: f64,
    pub tau_bar1: f64,
    pub t_bar1: f64,
    pub t_bar2: f64,
    pub r_bar2: f64,
    pub tau_bar2: f64,
    pub a_const: f64,
    pub a0: f64,
}

/// `t̄₁(A) = (√(2 + √(4+A²)) − 2) / 4`.
pub fn t_bar1(p: ChannelParams) -> f64 {
    ((2.0 + (4.0 + p.a * p.a).sqrt()).sqrt() - 2.0) / 4.0
}

/// `τ̄₁(A) = A / (2 + √(4+A²))`.
pub fn tau_bar1(p: ChannelParams) -> f64 {
    p.a / (2.0 + (4.0 + p.a * p.a).sqrt())
}

/// `R̄₁(A) = R(t̄₁(A))`.
pub fn r_bar1(p: ChannelParams) -> f64 {
    rate_of_t_unchecked(t_bar1(p))
}

/// `R_low(A) = ½ ln((2 + √(A²+4)) / 4)`, end of the low-rate branch of the
/// classical lower bound.
pub fn r_low(p: ChannelParams) -> f64 {
    0.5 * ((2.0 + (p.a * p.a + 4.0).sqrt()) / 4.0).ln()
}

/// The `A`-independent constants shared by every [`ThresholdSet`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GlobalConstants {
    pub t_bar2: f64,
    pub r_bar2: f64,
    pub tau_bar2: f64,
    pub a_const: f64,
    pub a0: f64,
    /// Extra sign changes of `D` seen on the scan grid beyond the first one.
    pub extra_sign_changes: usize,
}

/// Root of `D(t) = 0` on `[1e-4, 1]`, plus a count of any additional sign
/// changes found on a logarithmic scan of the same interval.
pub fn t_bar2_root() -> Result<(f64, usize)> {
    let d = |t: f64| d_of_t(t).expect("t > 0 on bracket");
    let root = bisect(d, 1e-4, 1.0, SolverOptions::default())?;
    let grid = 400;
    let mut changes = 0usize;
    let mut prev = d(1e-4);
    for k in 1..=grid {
        let t = 1e-4 * (1e4f64).powf(k as f64 / grid as f64);
        let v = d(t);
        if v.signum() != prev.signum() {
            changes += 1;
        }
        prev = v;
    }
    Ok((root, changes.saturating_sub(1)))
}

/// Computes the global constants `t̄₂, R̄₂, τ̄₂, a, A₀`.
pub fn global_constants() -> Result<GlobalConstants> {
    let (t2, extra) = t_bar2_root()?;
    let r2 = rate_of_t_unchecked(t2);
    let tau2 = tau_unchecked(t2);
    let a_const = (1.0 - tau2) * (2.0 * r2).exp();
    // R̄₁ is increasing in A
    let a0 = bisect(
        |a| r_bar1(ChannelParams { a }) - r2,
        0.1,
        10.0,
        SolverOptions::default(),
    )?;
    Ok(GlobalConstants {
        t_bar2: t2,
        r_bar2: r2,
        tau_bar2: tau2,
        a_const,
        a0,
        extra_sign_changes: extra,
    })
}

/// All derived thresholds for a given `A`.
pub fn thresholds(p: ChannelParams) -> Result<ThresholdSet> {
    let g = cached_globals()?;
    Ok(thresholds_with(p, &g))
}

pub(crate) fn thresholds_with(p: ChannelParams, g: &GlobalConstants) -> ThresholdSet {
    let rc = r_crit(p);
    ThresholdSet {
        a: p.a,
        capacity: capacity(p),
        r_crit: rc,
        r_bar1: r_bar1(p),
        r_bar3: rc + g.r_bar2 + 0.5 * (-g.tau_bar2).ln_1p(),
        r_low: r_low(p),
        tau_bar1: tau_bar1(p),
        t_bar1: t_bar1(p),
        t_bar2: g.t_bar2,
        r_bar2: g.r_bar2,
        tau_bar2: g.tau_bar2,
        a_const: g.a_const,
        a0: g.a0,
    }
}

/// Thresholds computed once per process; the global constants involve two
/// root solves.
pub(crate) fn cached_globals() -> Result<GlobalConstants> {
    use std::sync::OnceLock;
    static GLOBALS: OnceLock<std::result::Result<GlobalConstants, Error>> = OnceLock::new();
    GLOBALS.get_or_init(global_constants).clone()
}
