//! Upper and lower bounds on the reliability function `E(R, A)`.
//!
//! Three families are evaluated in closed form:
//! - the low-rate spectrum bound joined to the sphere-packing curve by a
//!   slope −1 segment ([`Bounds::upper_t1`]);
//! - its cap-projection refinement, which differs only for `A > A₀`
//!   ([`Bounds::upper_t2`]);
//! - the classical lower bound ([`Bounds::lower`]).
//!
//! [`Bounds::theorem2_numeric`] evaluates the min–max problem behind the
//! refined bound directly, and [`sphere_packing_numeric`] recovers
//! `E_sp` from its constrained-maximization form. Both serve as independent
//! routes for the closed forms.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::functions::{
    cached_globals, capacity, e_sp_unchecked, g_sp, j_unchecked, t_of_rate, tau_unchecked,
    thresholds_with, ChannelParams, ThresholdSet,
};
use crate::numeric::{golden_section_max, maximize_unimodal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BoundKind {
    SpherePackingClosed,
    SpherePackingNumeric,
    UpperT1,
    UpperT2,
    LowerClassical,
    StraightLine,
    Exact,
}

/// Sampled `(rate, exponent)` pairs of one bound family for a fixed `A`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCurve {
    pub a: f64,
    pub kind: BoundKind,
    pub samples: Vec<(f64, f64)>,
}

impl BoundCurve {
    /// Checks that rates strictly increase and exponents are finite and
    /// nonnegative.
    pub fn check(&self) -> Result<()> {
        for w in self.samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(domain("rate", w[1].0, "strictly increasing sequence"));
            }
        }
        for &(_, e) in &self.samples {
            // rounding at R = C can leave a few ulps below zero
            if !e.is_finite() || e < -1e-12 {
                return Err(domain("exponent", e, "[0, inf)"));
            }
        }
        Ok(())
    }
}

/// `count` evenly spaced rates from `rmin` to `rmax` inclusive; the last
/// point is exactly `rmax`. A single point needs `rmin == rmax`.
pub fn rate_grid(rmin: f64, rmax: f64, count: usize) -> Result<Vec<f64>> {
    if count == 1 && rmin == rmax && rmin >= 0.0 {
        return Ok(vec![rmin]);
    }
    if count < 2 {
        return Err(domain("grid count", count as f64, "[2, inf)"));
    }
    if !(rmin >= 0.0 && rmax > rmin) {
        return Err(domain("rmax", rmax, "(rmin, inf)"));
    }
    let step = (rmax - rmin) / (count - 1) as f64;
    let mut g: Vec<f64> = (0..count).map(|k| rmin + step * k as f64).collect();
    g[count - 1] = rmax;
    Ok(g)
}

/// Result of the inner/outer search behind [`Bounds::theorem2_numeric`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinMaxSolution {
    pub value: f64,
    /// Minimizing inner (subcode) rate.
    pub inner_rate: f64,
    /// Maximizing subcode correlation at that inner rate.
    pub rho: f64,
    /// `τ` at the minimizing inner rate, for comparison with `rho`.
    pub tau_inner: f64,
}

/// Bound evaluator for one channel; holds the derived thresholds.
#[derive(Debug, Clone, Copy)]
pub struct Bounds {
    p: ChannelParams,
    th: ThresholdSet,
}

const OUTER_GRID: usize = 512;
const RHO_EPS: f64 = 1e-9;
const SEARCH_TOL: f64 = 1e-11;

impl Bounds {
    pub fn new(p: ChannelParams) -> Result<Self> {
        let g = cached_globals()?;
        Ok(Bounds {
            p,
            th: thresholds_with(p, &g),
        })
    }

    pub fn params(&self) -> ChannelParams {
        self.p
    }

    pub fn thresholds(&self) -> &ThresholdSet {
        &self.th
    }

    fn check_rate(&self, r: f64) -> Result<()> {
        if r >= 0.0 && r <= self.th.capacity {
            Ok(())
        } else {
            Err(domain("R", r, "[0, C(A)]"))
        }
    }

    /// `E_sp(R, A)` on `(0, C]`.
    pub fn e_sp(&self, r: f64) -> Result<f64> {
        if !(r > 0.0 && r <= self.th.capacity) {
            return Err(domain("R", r, "(0, C(A)]"));
        }
        Ok(e_sp_unchecked(r, self.p))
    }

    /// `E_sp(R_crit) + R_crit`, the intercept of the slope −1 segment.
    pub fn affine_intercept(&self) -> f64 {
        e_sp_unchecked(self.th.r_crit, self.p) + self.th.r_crit
    }

    /// Low-rate spectrum bound `A(1−τ_R)/4 + ln(1+2t_R) − R`.
    pub fn low_rate_spectrum_bound(&self, r: f64) -> Result<f64> {
        self.check_rate(r)?;
        if r == 0.0 {
            return Ok(self.p.a() / 4.0);
        }
        let t = t_of_rate(r)?;
        Ok(self.p.a() * (1.0 - tau_unchecked(t)) / 4.0 + (2.0 * t).ln_1p() - r)
    }

    /// Cap-projection branch `A a e^{−2R}/4 − ½ ln(2 − a e^{−2R}) − ½ ln a`.
    pub fn cap_projection_branch(&self, r: f64) -> f64 {
        let a = self.th.a_const;
        let x = a * (-2.0 * r).exp();
        self.p.a() * x / 4.0 - 0.5 * (2.0 - x).ln() - 0.5 * a.ln()
    }

    /// Upper bound built from the low-rate spectrum bound, the slope −1
    /// segment on `[R̄₁, R_crit]` and `E_sp` above `R_crit`.
    ///
    /// `R = 0` returns the right limit `A/4`.
    pub fn upper_t1(&self, r: f64) -> Result<f64> {
        self.check_rate(r)?;
        let th = &self.th;
        if r <= th.r_bar1 {
            self.low_rate_spectrum_bound(r)
        } else if r <= th.r_crit {
            Ok(self.affine_intercept() - r)
        } else {
            Ok(e_sp_unchecked(r, self.p))
        }
    }

    /// Refined upper bound; equals [`Bounds::upper_t1`] for `A ≤ A₀`.
    pub fn upper_t2(&self, r: f64) -> Result<f64> {
        self.check_rate(r)?;
        let th = &self.th;
        if self.p.a() <= th.a0 {
            return self.upper_t1(r);
        }
        if r <= th.r_bar2 {
            self.low_rate_spectrum_bound(r)
        } else if r <= th.r_bar3 {
            Ok(self.cap_projection_branch(r))
        } else if r <= th.r_crit {
            Ok(self.affine_intercept() - r)
        } else {
            Ok(e_sp_unchecked(r, self.p))
        }
    }

    /// Classical lower bound: expurgated-type branch up to `R_low`, slope −1
    /// segment up to `R_crit`, then `E_sp`.
    pub fn lower(&self, r: f64) -> Result<f64> {
        self.check_rate(r)?;
        let th = &self.th;
        if r <= th.r_low {
            let root = (-(-2.0 * r).exp_m1()).sqrt();
            Ok(self.p.a() * (1.0 - root) / 4.0)
        } else if r <= th.r_crit {
            Ok(self.affine_intercept() - r)
        } else {
            Ok(e_sp_unchecked(r, self.p))
        }
    }

    /// Whether the upper and lower bounds are known to coincide at `r`:
    /// `R = 0` and the interval from `R̄₃` (or `R̄₁` when `A ≤ A₀`) to `C`.
    pub fn is_exact_region(&self, r: f64) -> bool {
        let th = &self.th;
        let start = if self.p.a() > th.a0 { th.r_bar3 } else { th.r_bar1 };
        r == 0.0 || (r >= start && r <= th.capacity)
    }

    /// The objective of the min–max problem:
    /// `f(u,ρ) = A(1−ρ)e^{2(u−R)}/4 + R − 2u + J(t_u,ρ) + ½ ln((1+ρ)/(2e^{2(R−u)} + ρ − 1))`
    /// with `t_u` the parameter of the inner rate `u`.
    pub fn minmax_objective(&self, r: f64, u: f64, t_u: f64, rho: f64) -> f64 {
        let a = self.p.a();
        let shrink = (2.0 * (u - r)).exp();
        a * (1.0 - rho) * shrink / 4.0 + r - 2.0 * u
            + j_unchecked(t_u, rho)
            + 0.5 * ((1.0 + rho) / (2.0 / shrink + rho - 1.0)).ln()
    }

    /// Inner maximum over `ρ ∈ [τ_u, 1)` for a fixed inner rate `u`.
    pub fn minmax_inner(&self, r: f64, u: f64) -> Result<(f64, f64, f64)> {
        let t_u = t_of_rate(u)?;
        let tau = tau_unchecked(t_u);
        let lo = tau + RHO_EPS;
        let hi = 1.0 - RHO_EPS;
        if lo > hi {
            return Err(domain("tau_u", tau, "[0, 1 - 2e-9]"));
        }
        // the objective is concave in rho
        let (rho, val) = maximize_unimodal(|x| self.minmax_objective(r, u, t_u, x), lo, hi, SEARCH_TOL);
        Ok((rho, val, tau))
    }

    /// Evaluates `min_{0<u≤R} max_{ρ≥τ_u} f(u,ρ)` numerically: a grid of 512
    /// inner rates, then golden-section refinement around the best one.
    pub fn theorem2_numeric(&self, r: f64) -> Result<MinMaxSolution> {
        if !(r > 0.0 && r <= self.th.capacity) {
            return Err(domain("R", r, "(0, C(A)]"));
        }
        let step = r / OUTER_GRID as f64;
        let values: Vec<Result<(f64, f64)>> = (1..=OUTER_GRID)
            .into_par_iter()
            .map(|k| {
                let u = if k == OUTER_GRID { r } else { step * k as f64 };
                self.minmax_inner(r, u).map(|(_, v, _)| (u, v))
            })
            .collect();
        let mut best_k = 0usize;
        let mut best = f64::INFINITY;
        for (k, v) in values.iter().enumerate() {
            let (_, val) = v.clone()?;
            if val < best {
                best = val;
                best_k = k;
            }
        }
        let lo = if best_k == 0 { step * 1e-6 } else { step * best_k as f64 };
        let hi = if best_k + 1 >= OUTER_GRID { r } else { step * (best_k + 2) as f64 };
        let h = |u: f64| match self.minmax_inner(r, u) {
            Ok((_, v, _)) => -v,
            Err(_) => f64::NEG_INFINITY,
        };
        let (u_ref, neg) = golden_section_max(h, lo, hi, SEARCH_TOL);
        let mut u_best = values[best_k].clone()?.0;
        if -neg < best {
            u_best = u_ref;
        }
        let (rho, value, tau_inner) = self.minmax_inner(r, u_best)?;
        Ok(MinMaxSolution {
            value,
            inner_rate: u_best,
            rho,
            tau_inner,
        })
    }

    /// Samples one bound family on a rate grid. `Exact` is emitted only on
    /// the rates where upper and lower bounds coincide.
    pub fn curve(&self, kind: BoundKind, rates: &[f64]) -> Result<BoundCurve> {
        let eval = |r: f64| -> Result<Option<f64>> {
            Ok(Some(match kind {
                BoundKind::SpherePackingClosed => {
                    if r == 0.0 {
                        return Ok(None);
                    }
                    self.e_sp(r)?
                }
                BoundKind::SpherePackingNumeric => {
                    if r == 0.0 || r >= self.th.capacity {
                        return Ok(None);
                    }
                    sphere_packing_numeric(r, self.p)?.exponent
                }
                BoundKind::UpperT1 => self.upper_t1(r)?,
                BoundKind::UpperT2 => self.upper_t2(r)?,
                BoundKind::LowerClassical => self.lower(r)?,
                BoundKind::StraightLine => {
                    if r > self.th.r_crit {
                        return Ok(None);
                    }
                    straight_line(self.th.r_crit, e_sp_unchecked(self.th.r_crit, self.p), r)?
                }
                BoundKind::Exact => {
                    if !self.is_exact_region(r) {
                        return Ok(None);
                    }
                    self.upper_t2(r)?
                }
            }))
        };
        let values: Vec<Result<Option<f64>>> = rates.par_iter().map(|&r| eval(r)).collect();
        let mut samples = Vec::with_capacity(rates.len());
        for (&r, v) in rates.iter().zip(values) {
            if let Some(e) = v? {
                samples.push((r, e));
            }
        }
        let curve = BoundCurve {
            a: self.p.a(),
            kind,
            samples,
        };
        curve.check()?;
        Ok(curve)
    }
}

pub fn upper_bound_t1(r: f64, p: ChannelParams) -> Result<f64> {
    Bounds::new(p)?.upper_t1(r)
}

pub fn upper_bound_t2(r: f64, p: ChannelParams) -> Result<f64> {
    Bounds::new(p)?.upper_t2(r)
}

pub fn lower_bound(r: f64, p: ChannelParams) -> Result<f64> {
    Bounds::new(p)?.lower(r)
}

pub fn theorem2_numeric(r: f64, p: ChannelParams) -> Result<MinMaxSolution> {
    Bounds::new(p)?.theorem2_numeric(r)
}

/// Slope −1 extension of the point `(anchor_r, anchor_e)` to lower rates.
pub fn straight_line(anchor_r: f64, anchor_e: f64, r: f64) -> Result<f64> {
    if !(r <= anchor_r) {
        return Err(domain("R", r, "(-inf, anchor rate]"));
    }
    Ok(anchor_e + (anchor_r - r))
}

/// Stationary point of the sphere-packing problem: Lagrange multiplier,
/// output energy `r`, distance `s` and the per-codeword cell energy `r₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpherePackingPoint {
    pub lambda: f64,
    pub r_var: f64,
    pub s_var: f64,
    pub r1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpherePackingSolution {
    /// Point found by the numeric search.
    pub numeric: SpherePackingPoint,
    /// Closed-form stationary point.
    pub closed: SpherePackingPoint,
    /// `(s−1)/2 + R − ½ ln r` at the numeric point.
    pub exponent: f64,
    /// Constraint residual `s − (r−A−s)²/(4A) − r e^{−2R}` at the numeric point.
    pub constraint_residual: f64,
}

/// Recovers the sphere-packing exponent by maximizing `ln r − s` subject to
/// `s − (r−A−s)²/(4A) = r e^{−2R}`.
///
/// For each `r` the constraint is solved for the smaller root `s(r)`; the
/// one-dimensional objective is concave and is maximized by golden-section
/// search. The closed-form stationary point is returned alongside and the
/// call fails if the two disagree by more than `1e-6` (relative).
pub fn sphere_packing_numeric(r: f64, p: ChannelParams) -> Result<SpherePackingSolution> {
    let c = capacity(p);
    if !(r > 0.0 && r < c) {
        return Err(domain("R", r, "(0, C(A))"));
    }
    let a = p.a();
    let w = (-2.0 * r).exp();
    let one_minus_w = -(-2.0 * r).exp_m1();
    let s_of = |rv: f64| rv + a - 2.0 * (a * rv * one_minus_w).sqrt();
    let objective = |rv: f64| rv.ln() - s_of(rv);
    let hi = 4.0 * (1.0 + a) + 4.0;
    let (r_var, _) = golden_section_max(objective, 1e-9, hi, 1e-13);
    let s_var = s_of(r_var);
    let r1 = s_var - (r_var - a - s_var).powi(2) / (4.0 * a);
    let constraint_residual = r1 - r_var * w;
    let lambda = 2.0 * a / (a + r_var - s_var);
    let numeric = SpherePackingPoint {
        lambda,
        r_var,
        s_var,
        r1,
    };

    let g = g_sp(r, p);
    let l_c = a.sqrt() / (g * one_minus_w.sqrt());
    let r_c = 1.0 / (1.0 - l_c * one_minus_w);
    let s_c = r_c + a - 2.0 * a / l_c;
    let closed = SpherePackingPoint {
        lambda: l_c,
        r_var: r_c,
        s_var: s_c,
        r1: r_c * w,
    };

    let exponent = (s_var - 1.0) / 2.0 + r - 0.5 * r_var.ln();
    let mismatch = ((r_var - r_c) / r_c).abs().max(((s_var - s_c) / s_c.abs().max(1.0)).abs());
    if mismatch > 1e-6 || !exponent.is_finite() {
        return Err(Error::NoConvergence {
            what: "sphere-packing optimizer",
            iterations: 200,
            residual: mismatch,
        });
    }
    Ok(SpherePackingSolution {
        numeric,
        closed,
        exponent,
        constraint_residual,
    })
}

/// `C(v) = Av/4 − ½ ln(v(2−v))` for `0 < v ≤ 1`.
pub fn c_of_v(v: f64, p: ChannelParams) -> Result<f64> {
    if !(v > 0.0 && v <= 1.0) {
        return Err(domain("v", v, "(0, 1]"));
    }
    Ok(p.a() * v / 4.0 - 0.5 * (v * (2.0 - v)).ln())
}

/// `v(u) = (1−τ_u) e^{2(u−R)}` for an inner rate `u ≤ R`.
pub fn v_of_r(u: f64, r: f64) -> Result<f64> {
    if !(u >= 0.0 && u <= r) {
        return Err(domain("u", u, "[0, R]"));
    }
    let t = t_of_rate(u)?;
    Ok((1.0 - tau_unchecked(t)) * (2.0 * (u - r)).exp())
}

/// Minimizer of `C(v)`: `v₁ = 4 / (A + 2 + √(A²+4))`.
pub fn v1(p: ChannelParams) -> f64 {
    let a = p.a();
    4.0 / (a + 2.0 + (a * a + 4.0).sqrt())
}

/// `f₂(u) = 2u + ln(1 − τ_u)`.
pub fn f2(u: f64) -> Result<f64> {
    let t = t_of_rate(u)?;
    Ok(2.0 * u + (-tau_unchecked(t)).ln_1p())
}
