//! Sphere, cap and ring measures in high dimension, the coordinate geometry
//! of a codeword pair and a received point, and cardinality bounds for
//! spherical codes.
//!
//! Areas are returned as natural logarithms; beyond `n ≈ 300` the raw values
//! leave the range of `f64`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::functions::ChannelParams;
use crate::numeric::{adaptive_simpson, ln_gamma};

/// A spherical cap of half-angle `theta` on `S^{n−1}` together with the
/// thickness `delta` of the ring `{θ−δ ≤ angle ≤ θ}` at its boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapSpec {
    pub n: usize,
    pub theta: f64,
    pub delta: f64,
}

impl CapSpec {
    /// Cap with the default ring thickness `1/n²`.
    pub fn new(n: usize, theta: f64) -> Result<Self> {
        let delta = 1.0 / (n as f64 * n as f64);
        Self::with_delta(n, theta, delta)
    }

    pub fn with_delta(n: usize, theta: f64, delta: f64) -> Result<Self> {
        if n < 2 {
            return Err(domain("n", n as f64, "[2, inf)"));
        }
        if !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(domain("theta", theta, "[0, pi/2]"));
        }
        if !(delta > 0.0) {
            return Err(domain("delta", delta, "(0, inf)"));
        }
        Ok(CapSpec { n, theta, delta })
    }

    fn check_regime(&self) -> Result<()> {
        let min = 1.0 / self.n as f64;
        if self.theta < min {
            return Err(Error::AccuracyRegime {
                theta: self.theta,
                min,
            });
        }
        Ok(())
    }
}

/// `ln ∫_a^b sin^m u du` for `0 ≤ a < b ≤ π/2`, integrated after factoring
/// out the maximum `sin^m b`.
pub fn ln_sin_power_integral(m: usize, a: f64, b: f64) -> f64 {
    if !(b > a) {
        return f64::NEG_INFINITY;
    }
    if m == 0 {
        return (b - a).ln();
    }
    let mf = m as f64;
    let ls_b = b.sin().ln();
    let g = |u: f64| {
        let s = u.sin();
        if s <= 0.0 {
            0.0
        } else {
            (mf * (s.ln() - ls_b)).exp()
        }
    };
    // peak width scale, so the tolerance is relative
    let width = (b - a).min(1.0 / (mf * b.cos() / b.sin() + mf.sqrt()));
    let integral = adaptive_simpson(g, a, b, 1e-13 * width);
    mf * ls_b + integral.ln()
}

/// `ln |S^{n−1}(a)| = ln(n π^{n/2} a^{n−1} / Γ(n/2+1))`.
pub fn sphere_area_log(n: usize, radius: f64) -> Result<f64> {
    if n < 1 {
        return Err(domain("n", n as f64, "[1, inf)"));
    }
    if !(radius > 0.0) {
        return Err(domain("radius", radius, "(0, inf)"));
    }
    let nf = n as f64;
    Ok(nf.ln() + 0.5 * nf * PI.ln() + (nf - 1.0) * radius.ln() - ln_gamma(nf / 2.0 + 1.0))
}

/// `ln((n−1)π^{(n−1)/2}/Γ((n+1)/2))`, the area of `S^{n−2}`.
fn ln_equator(n: usize) -> f64 {
    let nf = n as f64;
    (nf - 1.0).ln() + 0.5 * (nf - 1.0) * PI.ln() - ln_gamma((nf + 1.0) / 2.0)
}

/// Exact cap area `|S^{n−2}| ∫_0^θ sin^{n−2}u du` on the unit sphere.
pub fn cap_area_log(spec: CapSpec) -> Result<f64> {
    spec.check_regime()?;
    Ok(ln_equator(spec.n) + ln_sin_power_integral(spec.n - 2, 0.0, spec.theta))
}

/// Leading-order cap area `π^{(n−1)/2} sin^{n−1}θ / (Γ((n+1)/2) cos θ)`;
/// requires `θ < π/2`.
pub fn cap_area_asymptotic_log(spec: CapSpec) -> Result<f64> {
    spec.check_regime()?;
    if spec.theta >= FRAC_PI_2 {
        return Err(domain("theta", spec.theta, "[1/n, pi/2)"));
    }
    let nf = spec.n as f64;
    Ok(0.5 * (nf - 1.0) * PI.ln() + (nf - 1.0) * spec.theta.sin().ln()
        - ln_gamma((nf + 1.0) / 2.0)
        - spec.theta.cos().ln())
}

/// Ring area `|S^{n−2}| ∫_{θ−δ}^θ sin^{n−2}u du`.
pub fn ring_area_log(spec: CapSpec) -> Result<f64> {
    spec.check_regime()?;
    let lo = (spec.theta - spec.delta).max(0.0);
    Ok(ln_equator(spec.n) + ln_sin_power_integral(spec.n - 2, lo, spec.theta))
}

/// Ring area divided by its thin-ring approximation
/// `δ (n−1)π^{(n−1)/2} sin^{n−2}θ / Γ((n+1)/2)`.
pub fn ring_ratio(spec: CapSpec) -> Result<f64> {
    let ring = ring_area_log(spec)?;
    let thin = ln_equator(spec.n) + (spec.n as f64 - 2.0) * spec.theta.sin().ln() + spec.delta.ln();
    Ok((ring - thin).exp())
}

/// Lower end `1 − 1/(2n sin θ)` of the ring sandwich at `δ = 1/n²`.
pub fn ring_sandwich_lower(spec: CapSpec) -> f64 {
    1.0 - 1.0 / (2.0 * spec.n as f64 * spec.theta.sin())
}

/// `z(s, r, ρ) = r − (A+r−s)²/(2A(1+ρ))`.
pub fn z_of(s: f64, r: f64, rho: f64, p: ChannelParams) -> Result<f64> {
    if !(rho > -1.0 && rho <= 1.0) {
        return Err(domain("rho", rho, "(-1, 1]"));
    }
    let a = p.a();
    Ok(r - (a + r - s).powi(2) / (2.0 * a * (1.0 + rho)))
}

/// Minimizer `(s, r) = (A(1−ρ)/2 + 1, A(1+ρ)/2 + 1)` of
/// `(s−1)/2 − ½ ln z(s, r, ρ)`.
pub fn opt_sr(rho: f64, p: ChannelParams) -> (f64, f64) {
    let a = p.a();
    (a * (1.0 - rho) / 2.0 + 1.0, a * (1.0 + rho) / 2.0 + 1.0)
}

/// Per-dimension coordinates of two codewords `(∓x1, x2, 0)` at correlation
/// `ρ` and a point `(0, y2, √r1)` at squared distance `s` from both and
/// squared norm `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TripleGeometry {
    pub a: f64,
    pub rho: f64,
    pub s: f64,
    pub r: f64,
    pub x1: f64,
    pub x2: f64,
    pub y2: f64,
    pub r1: f64,
}

impl TripleGeometry {
    /// Squared distance between the two codewords.
    pub fn codeword_distance_sq(&self) -> f64 {
        4.0 * self.x1 * self.x1
    }

    /// Squared distance from the point to either codeword.
    pub fn point_distance_sq(&self) -> f64 {
        self.x1 * self.x1 + (self.y2 - self.x2).powi(2) + self.r1
    }
}

pub fn triple_coordinates(p: ChannelParams, rho: f64, s: f64, r: f64) -> Result<TripleGeometry> {
    if !(rho > -1.0 && rho < 1.0) {
        return Err(domain("rho", rho, "(-1, 1)"));
    }
    if !(s >= 0.0 && r >= 0.0) {
        return Err(domain("r", r.min(s), "[0, inf)"));
    }
    let a = p.a();
    let x1 = (a * (1.0 - rho) / 2.0).sqrt();
    let x2 = (a * (1.0 + rho) / 2.0).sqrt();
    let y2 = (a + r - s) / (2.0 * a * (1.0 + rho)).sqrt();
    let r1 = r - y2 * y2;
    if r1 < 0.0 {
        return Err(domain("residual r - y2^2", r1, "[0, inf)"));
    }
    Ok(TripleGeometry {
        a,
        rho,
        s,
        r,
        x1,
        x2,
        y2,
        r1,
    })
}

/// `A + r − s ≥ 2√(A r ρ)`: when it holds, at most `2n` codewords can share
/// the configuration.
pub fn lemma1_check(p: ChannelParams, rho: f64, s: f64, r: f64) -> bool {
    let a = p.a();
    a + r - s >= 2.0 * (a * r * rho).sqrt()
}

/// `ln(2 n^{3/2} (1−μ)^{−n/2})`.
pub fn lemma4_bound_log(n: usize, mu: f64) -> Result<f64> {
    if n < 1 {
        return Err(domain("n", n as f64, "[1, inf)"));
    }
    if !(0.0..1.0).contains(&mu) {
        return Err(domain("mu", mu, "[0, 1)"));
    }
    let nf = n as f64;
    Ok(2f64.ln() + 1.5 * nf.ln() - 0.5 * nf * (-mu).ln_1p())
}

/// `⌊2 n^{3/2} (1−μ)^{−n/2}⌋`: the number of unit vectors in `R^n` with
/// pairwise inner products at most `μ`.
pub fn lemma4_bound(n: usize, mu: f64) -> Result<u128> {
    let log_value = lemma4_bound_log(n, mu)?;
    if log_value >= (u128::MAX as f64).ln() {
        return Err(Error::Overflow { log_value });
    }
    let nf = n as f64;
    let v = 2.0 * nf * nf.sqrt() * (1.0 - mu).powf(-nf / 2.0);
    Ok(v.floor() as u128)
}

/// `m + lemma4_bound(n, μ)` with `μ = 2(slack + 1/m)/(1−ρ)`.
pub fn lemma2_cardinality_bound(n: usize, rho: f64, slack: f64, m: usize) -> Result<u128> {
    if !(rho < 1.0) {
        return Err(domain("rho", rho, "(-inf, 1)"));
    }
    if m < 2 {
        return Err(domain("m", m as f64, "[2, inf)"));
    }
    if !(slack >= 0.0) {
        return Err(domain("slack", slack, "[0, inf)"));
    }
    let mu = 2.0 * (slack + 1.0 / m as f64) / (1.0 - rho);
    if mu >= 1.0 {
        return Err(Error::Vacuous { mu });
    }
    Ok(m as u128 + lemma4_bound(n, mu.max(0.0))?)
}

/// Smallest non-vacuous [`lemma2_cardinality_bound`] over the candidate `m`s,
/// with the minimizing `m`.
pub fn lemma2_best(
    n: usize,
    rho: f64,
    slack: f64,
    ms: impl IntoIterator<Item = usize>,
) -> Result<(usize, u128)> {
    let mut best: Option<(usize, u128)> = None;
    let mut last_err = Error::Vacuous { mu: f64::INFINITY };
    for m in ms {
        match lemma2_cardinality_bound(n, rho, slack, m) {
            Ok(b) if best.is_none_or(|(_, v)| b < v) => best = Some((m, b)),
            Ok(_) => {}
            Err(e) => last_err = e,
        }
    }
    best.ok_or(last_err)
}

fn rankin_beta(n: usize, phi: f64) -> Result<f64> {
    if n < 2 {
        return Err(domain("n", n as f64, "[2, inf)"));
    }
    if !(phi > 0.0 && phi < FRAC_PI_4) {
        return Err(domain("phi", phi, "(0, pi/4)"));
    }
    let beta = (2f64.sqrt() * phi.sin()).asin();
    if !(beta.tan().powi(2) < n as f64 + 1.0) {
        return Err(domain("phi", phi, "tan^2(beta) < n + 1"));
    }
    Ok(beta)
}

/// `ln f(β, n−2) = ln((n−1) ∫_0^β sin^{n−2}z dz)`.
pub fn rankin_f_log(n: usize, beta: f64) -> Result<f64> {
    if n < 2 {
        return Err(domain("n", n as f64, "[2, inf)"));
    }
    if !(beta > 0.0 && beta < FRAC_PI_2) {
        return Err(domain("beta", beta, "(0, pi/2)"));
    }
    Ok((n as f64 - 1.0).ln() + ln_sin_power_integral(n - 2, 0.0, beta))
}

/// Rankin's bound on the number of unit vectors in `R^n` with pairwise
/// inner products at most `cos 2φ`, for `cos 2φ > 1/(n+2)`.
///
/// The denominator `sin^{n−1}β − f(β, n−2) cos β` is evaluated as
/// `cos β ∫_0^β sin^n z / cos² z dz`, which avoids the cancellation at
/// small `β`.
pub fn rankin_bound(n: usize, phi: f64) -> Result<f64> {
    let beta = rankin_beta(n, phi)?;
    let nf = n as f64;
    // integrand sin^n z / cos^2 z is increasing on (0, beta)
    let log_integrand = |z: f64| nf * z.sin().ln() - 2.0 * z.cos().ln();
    let top = log_integrand(beta);
    let g = |z: f64| if z <= 0.0 { 0.0 } else { (log_integrand(z) - top).exp() };
    let width = beta.min(1.0 / (nf / beta.tan() + nf.sqrt()));
    let integral = adaptive_simpson(g, 0.0, beta, 1e-13 * width);
    let ln_den = beta.cos().ln() + top + integral.ln();
    let ln_num = (nf - 1.0).ln() + 0.5 * PI.ln() + ln_gamma((nf - 1.0) / 2.0) + beta.sin().ln() + beta.tan().ln()
        - 2f64.ln()
        - ln_gamma(nf / 2.0);
    Ok((ln_num - ln_den).exp())
}

/// The closed-form simplifications of Rankin's bound:
/// `√π Γ((n−1)/2)(n²−1) cos β / (2Γ(n/2) sin^{n−1}β)` and
/// `n √(πn(1−2sin²φ)) / (√2 (√2 sin φ)^{n−1})`.
///
/// The first is a lower estimate of [`rankin_bound`] (the exact denominator
/// never exceeds `sin^{n−1}β tan²β/(n+1)`), so neither is a proven
/// cardinality bound; they are kept for comparison against constructed codes.
pub fn rankin_relaxations(n: usize, phi: f64) -> Result<(f64, f64)> {
    let beta = rankin_beta(n, phi)?;
    let nf = n as f64;
    let mid = 0.5 * PI.ln() + ln_gamma((nf - 1.0) / 2.0) + (nf * nf - 1.0).ln() + beta.cos().ln()
        - 2f64.ln()
        - ln_gamma(nf / 2.0)
        - (nf - 1.0) * beta.sin().ln();
    let s2 = 2f64.sqrt() * phi.sin();
    let outer = nf.ln() + 0.5 * (PI * nf * (1.0 - 2.0 * phi.sin().powi(2))).ln()
        - 0.5 * 2f64.ln()
        - (nf - 1.0) * s2.ln();
    Ok((mid.exp(), outer.exp()))
}

/// `ln` of both sides of `Γ((z−1)/2)(z²−1)/Γ(z/2) < √2 z^{3/2} e^{1/z}`;
/// `z = 1` uses the limit `4/√π` of the left side.
pub fn gamma_ratio_inequality(z: f64) -> Result<(f64, f64)> {
    if !(z >= 1.0) {
        return Err(domain("z", z, "[1, inf)"));
    }
    let lhs = if z == 1.0 {
        (4.0 / PI.sqrt()).ln()
    } else {
        ln_gamma((z - 1.0) / 2.0) + (z * z - 1.0).ln() - ln_gamma(z / 2.0)
    };
    let rhs = 0.5 * 2f64.ln() + 1.5 * z.ln() + 1.0 / z;
    Ok((lhs, rhs))
}
