//! Lower-bound envelopes on the spectrum exponent `b(ρ)` of a code at rate
//! `R`, and the additive exponent `max_ρ [A(1−ρ)/4 − b(ρ)]` they induce.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::functions::{j_unchecked, t_of_rate, tau_unchecked, ChannelParams};
use crate::numeric::maximize_unimodal;

/// Direct envelope `R − J(t_R, ρ)` on `[τ_R, 1]`, or its cap-projected
/// variant obtained from a subcode of rate `inner_rate`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum EnvelopeSource {
    Direct,
    CapProjection { inner_rate: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumEnvelope {
    pub rate: f64,
    pub source: EnvelopeSource,
    /// Closed `ρ` interval on which the bound is claimed.
    pub support: (f64, f64),
    t: f64,
}

impl SpectrumEnvelope {
    /// Envelope `ρ ↦ R − J(t_R, ρ)` on `[τ_R, 1]`.
    pub fn direct(r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(domain("R", r, "(0, inf)"));
        }
        let t = t_of_rate(r)?;
        Ok(SpectrumEnvelope {
            rate: r,
            source: EnvelopeSource::Direct,
            support: (tau_unchecked(t), 1.0),
            t,
        })
    }

    /// Envelope seen at the outer rate `r` through a subcode of rate
    /// `inner_r`, expressed in the outer correlation `ρ`.
    pub fn cap_projection(r: f64, inner_r: f64) -> Result<Self> {
        if !(inner_r > 0.0 && inner_r <= r) {
            return Err(domain("inner rate", inner_r, "(0, R]"));
        }
        let t = t_of_rate(inner_r)?;
        let lo = rho_from_cap(tau_unchecked(t), inner_r, r)?;
        Ok(SpectrumEnvelope {
            rate: r,
            source: EnvelopeSource::CapProjection { inner_rate: inner_r },
            support: (lo, 1.0),
            t,
        })
    }

    /// Restricts the support; `lo == hi` gives a single-point envelope.
    pub fn restrict(mut self, lo: f64, hi: f64) -> Self {
        self.support = (self.support.0.max(lo), self.support.1.min(hi));
        self
    }

    pub fn is_empty(&self) -> bool {
        !(self.support.0 <= self.support.1)
    }

    /// Lower bound on `b(ρ)`; `None` outside the support.
    pub fn eval(&self, rho: f64) -> Option<f64> {
        if rho < self.support.0 || rho > self.support.1 {
            return None;
        }
        Some(self.eval_unchecked(rho))
    }

    fn eval_unchecked(&self, rho: f64) -> f64 {
        match self.source {
            EnvelopeSource::Direct => self.rate - j_unchecked(self.t, rho),
            EnvelopeSource::CapProjection { inner_rate } => {
                let rho_p = 1.0 - (1.0 - rho) * (2.0 * (self.rate - inner_rate)).exp();
                inner_rate - j_unchecked(self.t, rho_p) + 0.5 * ((1.0 + rho) / (1.0 + rho_p)).ln()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdditiveExponent {
    pub rho0: f64,
    pub value: f64,
}

/// `R − J(t_R, ρ)` for `ρ ≥ τ_R`.
pub fn b_lower_t3(r: f64, rho: f64) -> Result<f64> {
    let env = SpectrumEnvelope::direct(r)?;
    if !(rho <= 1.0) {
        return Err(domain("rho", rho, "[tau_R, 1]"));
    }
    env.eval(rho)
        .ok_or_else(|| domain("rho", rho, "[tau_R, 1]"))
}

/// Correlation after projecting a cap subcode back to the full sphere:
/// `1 − (1−ρ′) e^{2(r−R)}`.
pub fn rho_from_cap(rho_prime: f64, inner_r: f64, outer_r: f64) -> Result<f64> {
    if !(inner_r <= outer_r) {
        return Err(domain("inner rate", inner_r, "(-inf, outer rate]"));
    }
    if !(-1.0..=1.0).contains(&rho_prime) {
        return Err(domain("rho'", rho_prime, "[-1, 1]"));
    }
    if inner_r == outer_r {
        return Ok(rho_prime);
    }
    Ok(1.0 - (1.0 - rho_prime) * (2.0 * (inner_r - outer_r)).exp())
}

/// Spectrum bound transported from a subcode: returns `(ρ, bound)` with
/// `ρ = rho_from_cap(ρ′, r, R)` and
/// `bound = r − J(t_r, ρ′) + ½ ln((1+ρ)/(1+ρ′))`.
pub fn b_lower_t4(outer_r: f64, inner_r: f64, rho_prime: f64) -> Result<(f64, f64)> {
    if !(inner_r > 0.0 && inner_r <= outer_r) {
        return Err(domain("inner rate", inner_r, "(0, outer rate]"));
    }
    let t = t_of_rate(inner_r)?;
    let tau = tau_unchecked(t);
    if !(rho_prime >= tau && rho_prime <= 1.0) {
        return Err(domain("rho'", rho_prime, "[tau_r, 1]"));
    }
    let rho = rho_from_cap(rho_prime, inner_r, outer_r)?;
    let bound = inner_r - j_unchecked(t, rho_prime) + 0.5 * ((1.0 + rho) / (1.0 + rho_prime)).ln();
    Ok((rho, bound))
}

/// Maximizes `A(1−ρ)/4 − env(ρ)` over the envelope support. The objective
/// is concave, so a golden-section search with endpoint comparison finds the
/// smallest maximizer.
pub fn rho0_argmax(p: ChannelParams, env: &SpectrumEnvelope) -> Result<AdditiveExponent> {
    if env.is_empty() {
        return Err(Error::EmptySupport);
    }
    let a = p.a();
    let (lo, hi) = env.support;
    let g = |rho: f64| a * (1.0 - rho) / 4.0 - env.eval_unchecked(rho);
    let (rho0, value) = if lo == hi {
        (lo, g(lo))
    } else {
        maximize_unimodal(g, lo, hi, 1e-12)
    };
    Ok(AdditiveExponent { rho0, value })
}

/// Whether `z = (1−τ_u) e^{2(u−R)}/2` lies in `[2/(A+2+√(A²+4)), (A+2+√(A²+4))/(2A)]`,
/// the range on which the inner maximum sits at `ρ′ = τ_u`.
pub fn projection_condition(u: f64, r: f64, p: ChannelParams) -> Result<bool> {
    if !(u > 0.0 && u <= r) {
        return Err(domain("inner rate", u, "(0, R]"));
    }
    let a = p.a();
    let t = t_of_rate(u)?;
    let z = (1.0 - tau_unchecked(t)) * (2.0 * (u - r)).exp() / 2.0;
    let k = a + 2.0 + (a * a + 4.0).sqrt();
    Ok(2.0 / k <= z && z <= k / (2.0 * a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{f2, Bounds};
    use crate::functions::{j_spectrum_d_rho, thresholds};

    fn p(a: f64) -> ChannelParams {
        ChannelParams::new(a).unwrap()
    }

    #[test]
    fn t3_endpoints() {
        for &r in &[0.05, 0.3, 0.9] {
            let t = t_of_rate(r).unwrap();
            let tau = tau_unchecked(t);
            assert!((b_lower_t3(r, tau).unwrap() - (r - (2.0 * t).ln_1p())).abs() < 1e-12);
            assert!(b_lower_t3(r, 1.0).unwrap().abs() < 1e-10);
            assert!(b_lower_t3(r, tau - 1e-3).is_err());
        }
    }

    #[test]
    fn t3_against_direct_formula() {
        // J written out without the shared helper
        let (r, rho) = (0.3f64, 0.7f64);
        let t = 0.085_767_687_317_960_375f64;
        let q = rho + ((1.0 + 2.0 * t).powi(2) * rho * rho - 4.0 * t * (1.0 + t)).sqrt();
        let j = (1.0 + 2.0 * t) * (2.0 * t * rho + q).ln() - q.ln() - t * (4.0 * t * (1.0 + t)).ln();
        assert!((b_lower_t3(r, rho).unwrap() - (r - j)).abs() < 1e-10);
    }

    #[test]
    fn cap_map() {
        assert_eq!(rho_from_cap(0.3, 0.2, 0.2).unwrap(), 0.3);
        assert_eq!(rho_from_cap(1.0, 0.1, 0.5).unwrap(), 1.0);
        let v = rho_from_cap(0.4540, 0.2339, 0.3).unwrap();
        assert!((v - 0.521_613_503_554_319_1).abs() < 1e-12);
        assert!((v - 0.5216).abs() < 1e-4);
        assert!(rho_from_cap(0.3, 0.4, 0.3).is_err());
        assert!(rho_from_cap(1.2, 0.1, 0.3).is_err());
    }

    #[test]
    fn t4_reduces_to_t3() {
        for &r in &[0.1, 0.3, 0.6] {
            let tau = tau_unchecked(t_of_rate(r).unwrap());
            for k in 0..=10 {
                let rp = tau + (1.0 - tau) * k as f64 / 10.0;
                let (rho, b) = b_lower_t4(r, r, rp).unwrap();
                assert_eq!(rho, rp);
                assert_eq!(b, b_lower_t3(r, rp).unwrap());
            }
        }
    }

    #[test]
    fn t4_composed_example() {
        let g = crate::functions::global_constants().unwrap();
        let (rho, b) = b_lower_t4(0.3, g.r_bar2, g.tau_bar2).unwrap();
        let want_rho = rho_from_cap(g.tau_bar2, g.r_bar2, 0.3).unwrap();
        let want = g.r_bar2 - (2.0 * g.t_bar2).ln_1p() + 0.5 * ((1.0 + want_rho) / (1.0 + g.tau_bar2)).ln();
        assert_eq!(rho, want_rho);
        assert!((b - want).abs() < 1e-10);
    }

    #[test]
    fn t4_bound_below_rate_on_grid() {
        for i in 1..=12 {
            let outer = 0.1 * i as f64;
            for j in 1..=8 {
                let inner = outer * j as f64 / 8.0;
                let tau = tau_unchecked(t_of_rate(inner).unwrap());
                for k in 0..=8 {
                    let rp = tau + (1.0 - tau) * k as f64 / 8.0;
                    let (_, b) = b_lower_t4(outer, inner, rp).unwrap();
                    assert!(b <= outer + 1e-12, "{outer} {inner} {rp}");
                }
            }
        }
    }

    #[test]
    fn envelope_views_agree() {
        let env = SpectrumEnvelope::cap_projection(0.3, 0.2).unwrap();
        let tau = tau_unchecked(t_of_rate(0.2).unwrap());
        let (rho, b) = b_lower_t4(0.3, 0.2, tau + 0.1).unwrap();
        assert!((env.eval(rho).unwrap() - b).abs() < 1e-12);
        assert!(env.eval(env.support.0 - 1e-6).is_none());
        assert!((env.support.0 - rho_from_cap(tau, 0.2, 0.3).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn argmax_at_tau_for_small_rate() {
        let pp = p(4.0);
        let env = SpectrumEnvelope::direct(0.2).unwrap();
        let ex = rho0_argmax(pp, &env).unwrap();
        let t = t_of_rate(0.2).unwrap();
        let tau = tau_unchecked(t);
        assert!(tau < 0.618);
        assert_eq!(ex.rho0, tau);
        let want = 4.0 * (1.0 - tau) / 4.0 + (2.0 * t).ln_1p() - 0.2;
        assert!((ex.value - want).abs() < 1e-12);
    }

    #[test]
    fn argmax_single_point() {
        let env = SpectrumEnvelope::direct(0.3).unwrap().restrict(0.8, 0.8);
        assert_eq!(rho0_argmax(p(1.0), &env).unwrap().rho0, 0.8);
        let empty = SpectrumEnvelope::direct(0.3).unwrap().restrict(0.9, 0.8);
        assert!(matches!(rho0_argmax(p(1.0), &empty), Err(Error::EmptySupport)));
    }

    #[test]
    fn argmax_interior_is_stationary() {
        let (a, r) = (0.5, 0.1);
        let pp = p(a);
        let th = thresholds(pp).unwrap();
        let env = SpectrumEnvelope::direct(r).unwrap();
        assert!(env.support.0 > th.tau_bar1);
        let ex = rho0_argmax(pp, &env).unwrap();
        assert!(ex.rho0 > env.support.0 + 1e-4 && ex.rho0 < 1.0 - 1e-4);
        let t = t_of_rate(r).unwrap();
        let grad = j_spectrum_d_rho(t, ex.rho0).unwrap() - a / 4.0;
        assert!(grad.abs() < 1e-6, "{grad}");
    }

    #[test]
    fn additive_objective_is_concave() {
        let (a, r) = (4.0, 0.4);
        let t = t_of_rate(r).unwrap();
        let tau = tau_unchecked(t);
        let g = |x: f64| a * (1.0 - x) / 4.0 - r + j_unchecked(t, x);
        let h = 1e-3;
        for k in 1..99 {
            let x = tau + (1.0 - tau) * k as f64 / 100.0;
            if x - h < tau || x + h > 1.0 {
                continue;
            }
            assert!(g(x + h) - 2.0 * g(x) + g(x - h) <= 1e-8);
        }
    }

    #[test]
    fn best_projection_improves_on_direct() {
        for &a in &[3.0, 4.0, 10.0] {
            let pp = p(a);
            let b = Bounds::new(pp).unwrap();
            let th = *b.thresholds();
            for k in 1..5 {
                let r = th.r_bar2 + (th.r_bar3 - th.r_bar2) * k as f64 / 5.0;
                let direct = rho0_argmax(pp, &SpectrumEnvelope::direct(r).unwrap()).unwrap().value;
                let best = (1..=64)
                    .map(|j| {
                        let u = r * j as f64 / 64.0;
                        let env = SpectrumEnvelope::cap_projection(r, u).unwrap();
                        rho0_argmax(pp, &env).unwrap().value
                    })
                    .fold(f64::INFINITY, f64::min);
                assert!(best <= direct + 1e-9);
                // the projected envelope reproduces the min–max objective
                let mm = b.theorem2_numeric(r).unwrap();
                let env = SpectrumEnvelope::cap_projection(r, mm.inner_rate).unwrap();
                let v = rho0_argmax(pp, &env).unwrap().value;
                assert!((v - mm.value).abs() < 1e-8, "A={a} R={r}: {v} vs {}", mm.value);
            }
        }
    }

    #[test]
    fn projection_condition_matches_f2() {
        for &a in &[1.0, 4.0, 10.0] {
            let pp = p(a);
            let rc = thresholds(pp).unwrap().r_crit;
            for i in 1..=20 {
                let r = rc * i as f64 / 20.0;
                for j in 1..=20 {
                    let u = r * j as f64 / 20.0;
                    let via_f2 = f2(u).unwrap() >= 2.0 * r - 2.0 * rc;
                    assert_eq!(projection_condition(u, r, pp).unwrap(), via_f2, "A={a} R={r} u={u}");
                }
            }
        }
    }
}
