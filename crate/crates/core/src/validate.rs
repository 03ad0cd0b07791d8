//! Identity and property suite run by `gauss-reliability validate`.
//!
//! Every check reports the largest residual it saw and the tolerance it was
//! held to. `perturb` shifts `t̄₁` before the junction and `t̄₁` relation
//! checks, which must then fail.

use serde::Serialize;

use crate::bounds::{c_of_v, sphere_packing_numeric, v1, Bounds};
use crate::codes::{gen_code, CodeKind};
use crate::error::Result;
use crate::functions::{
    capacity, e_sp_unchecked, global_constants, j_spectrum_d_rho, j_spectrum_d_t, j_unchecked, r_bar1, r_crit,
    rate_of_t_unchecked, t_bar1, t_of_rate, tau_unchecked, thresholds_with, ChannelParams,
};
use crate::geometry::{gamma_ratio_inequality, lemma4_bound, opt_sr, z_of};
use crate::numeric::golden_section_max;
use crate::spectrum::{b_lower_t3, b_lower_t4, projection_condition};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub points: usize,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Maximum of `R_crit(A) − R̄₁(A)` over `A` and its location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapMaximum {
    pub a: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub gap_maximum: GapMaximum,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{}  {:<width$}  residual {:.3e}  tol {:.1e}  ({} points)\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.tolerance,
                c.points,
            ));
        }
        out.push_str(&format!(
            "max_A (R_crit - R_bar1) = {:.6} at A = {:.5}\n",
            self.gap_maximum.gap, self.gap_maximum.a
        ));
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        out.push_str(&format!("{} checks, {} failed\n", self.checks.len(), failed));
        out
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ValidateOptions {
    pub perturb: f64,
}

struct Acc {
    name: &'static str,
    points: usize,
    worst: f64,
    tol: f64,
}

impl Acc {
    fn new(name: &'static str, tol: f64) -> Self {
        Acc {
            name,
            points: 0,
            worst: 0.0,
            tol,
        }
    }

    /// Records a residual that must stay within the tolerance.
    fn residual(&mut self, r: f64) {
        self.points += 1;
        if r.is_nan() {
            self.worst = f64::INFINITY;
        } else {
            self.worst = self.worst.max(r.abs());
        }
    }

    /// Records an inequality `lhs ≤ rhs`; the residual is the violation.
    fn le(&mut self, lhs: f64, rhs: f64) {
        self.residual((lhs - rhs).max(0.0) + if lhs.is_nan() || rhs.is_nan() { f64::INFINITY } else { 0.0 });
    }

    fn holds(&mut self, ok: bool) {
        self.residual(if ok { 0.0 } else { 1.0 });
    }

    fn finish(self) -> Check {
        Check {
            name: self.name,
            points: self.points,
            residual: self.worst,
            tolerance: self.tol,
            passed: self.worst <= self.tol,
        }
    }
}

fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| (lo.ln() + (hi / lo).ln() * k as f64 / (count - 1) as f64).exp())
        .collect()
}

fn params(a: f64) -> ChannelParams {
    ChannelParams::new(a).expect("grid values are positive")
}

/// Maximizes `R_crit(A) − R̄₁(A)` over `A ∈ [0.5, 10]`.
pub fn gap_maximum() -> GapMaximum {
    let (a, gap) = golden_section_max(|a| r_crit(params(a)) - r_bar1(params(a)), 0.5, 10.0, 1e-10);
    GapMaximum { a, gap }
}

pub fn run(opts: ValidateOptions) -> Result<ValidationReport> {
    let g = global_constants()?;
    let a_grid = log_grid(0.05, 50.0, 60);
    let mut checks = Vec::new();

    let mut junction = Acc::new("junction: A(1-tau1)/4 + ln(1+2 t1) = E_sp(R_crit) + R_crit", 1e-9);
    let mut rel_t = Acc::new("1 + 2 t1 = sqrt(A / (4 tau1))", 1e-9);
    let mut rel_r = Acc::new("R_crit = -1/2 ln(1 - tau1)", 1e-9);
    let mut tau_crit = Acc::new("ln(1 - tau1) = -2 R_crit", 1e-9);
    let mut v1_crit = Acc::new("v1 = exp(-2 R_crit)", 1e-9);
    let mut c_v1 = Acc::new("C(v1) = E_sp(R_crit) + R_crit", 1e-9);
    let mut rc_form = Acc::new("exp(-2 R_crit) = 4 / (A + 2 + sqrt(A^2 + 4))", 1e-10);
    let mut order = Acc::new("0 < R_low < R_crit < C", 0.0);
    for &a in &a_grid {
        let p = params(a);
        let th = thresholds_with(p, &g);
        let t1 = t_bar1(p) + opts.perturb;
        let tau1 = tau_unchecked(t1);
        let rc = th.r_crit;
        let anchor = e_sp_unchecked(rc, p) + rc;
        junction.residual(a * (1.0 - tau1) / 4.0 + (2.0 * t1).ln_1p() - anchor);
        rel_t.residual(1.0 + 2.0 * t1 - (a / (4.0 * tau1)).sqrt());
        rel_r.residual(rc + 0.5 * (-tau1).ln_1p());
        tau_crit.residual((-th.tau_bar1).ln_1p() + 2.0 * rc);
        v1_crit.residual(v1(p) - (-2.0 * rc).exp());
        c_v1.residual(c_of_v(v1(p), p)? - anchor);
        rc_form.residual((-2.0 * rc).exp() - 4.0 / (a + 2.0 + (a * a + 4.0).sqrt()));
        order.holds(0.0 < th.r_low && th.r_low < rc && rc < th.capacity);
    }
    checks.extend([junction, rel_t, rel_r, tau_crit, v1_crit, c_v1, rc_form, order].map(Acc::finish));

    let mut chain = Acc::new("R_bar2 < R_bar3 < R_bar1 < R_crit for A > A0", 0.0);
    for &a in &log_grid(g.a0 * 1.0001, 100.0, 50) {
        let th = thresholds_with(params(a), &g);
        chain.holds(th.r_bar2 < th.r_bar3 && th.r_bar3 < th.r_bar1 && th.r_bar1 < th.r_crit);
    }
    let mut low_chain = Acc::new("R_low < R_bar2 for A0 < A < 3.9", 0.0);
    for &a in &log_grid(g.a0 * 1.0001, 3.9, 20) {
        let th = thresholds_with(params(a), &g);
        low_chain.holds(th.r_low < th.r_bar2);
    }
    checks.extend([chain, low_chain].map(Acc::finish));

    let mut consts = Acc::new("global constants t2, R2, tau2, a, A0 at printed precision", 0.0);
    consts.holds((g.t_bar2 - 0.061176).abs() < 1e-5);
    consts.holds((g.r_bar2 - 0.2339).abs() < 5e-4);
    consts.holds((g.tau_bar2 - 0.4540).abs() < 5e-4);
    consts.holds((g.a_const - 0.8717).abs() < 5e-4);
    consts.holds((g.a0 - 2.288).abs() < 2e-3);
    consts.holds(g.extra_sign_changes == 0);
    checks.push(consts.finish());

    let mut inverse = Acc::new("R(t(R)) = R on [0, 5]", 1e-10);
    let mut j_tau = Acc::new("J(t_R, tau_R) = ln(1 + 2 t_R)", 1e-9);
    let mut j_one = Acc::new("J(t_R, 1) = R", 1e-9);
    let mut t3 = Acc::new("spectrum bound with cap projection at r = R equals direct bound", 0.0);
    for k in 0..=60 {
        let r = 5.0 * k as f64 / 60.0;
        let t = t_of_rate(r)?;
        inverse.residual(rate_of_t_unchecked(t) - r);
        if r > 0.0 {
            let tau = tau_unchecked(t);
            j_tau.residual(j_unchecked(t, tau) - (2.0 * t).ln_1p());
            j_one.residual(j_unchecked(t, 1.0) - r);
            for q in 0..=4 {
                let rp = tau + (1.0 - tau) * q as f64 / 4.0;
                t3.residual(b_lower_t4(r, r, rp)?.1 - b_lower_t3(r, rp)?);
            }
        }
    }
    checks.extend([inverse, j_tau, j_one, t3].map(Acc::finish));

    let mut d_rho = Acc::new("dJ/drho matches central difference", 1e-6);
    let mut d_t = Acc::new("dJ/dt matches central difference", 1e-6);
    let mut incr = Acc::new("R(t) - J(t, rho) increasing in t", 0.0);
    for i in 1..=10 {
        let t = 0.02 * i as f64 * i as f64;
        let tau = tau_unchecked(t);
        for j in 0..=10 {
            let rho = (tau + 0.01 + (0.99 - tau - 0.01) * j as f64 / 10.0).min(0.99);
            let h = 1e-5;
            let fd = (j_unchecked(t, rho + h) - j_unchecked(t, rho - h)) / (2.0 * h);
            d_rho.residual(j_spectrum_d_rho(t, rho)? - fd);
            // keep t − h feasible for this rho
            if tau_unchecked(t + h) < rho {
                let fd_t = (j_unchecked(t + h, rho) - j_unchecked(t - h, rho)) / (2.0 * h);
                d_t.residual(j_spectrum_d_t(t, rho)? - fd_t);
                let step = 1e-3;
                if tau_unchecked(t + step) < rho {
                    let before = rate_of_t_unchecked(t) - j_unchecked(t, rho);
                    let after = rate_of_t_unchecked(t + step) - j_unchecked(t + step, rho);
                    incr.holds(after > before);
                }
            }
        }
    }
    checks.extend([d_rho, d_t, incr].map(Acc::finish));

    let mut z_id = Acc::new("z(s(rho), r(rho), rho) = 1", 1e-12);
    let mut z_lin = Acc::new("z(s0, r0, rho) = 1 + A(1+rho0)(rho-rho0)/(2(1+rho))", 1e-12);
    for &a in &[0.5, 1.0, 4.0, 10.0] {
        let p = params(a);
        for i in 0..=20 {
            let rho0 = -0.9 + 1.9 * i as f64 / 20.0;
            let (s0, r0) = opt_sr(rho0, p);
            z_id.residual(z_of(s0, r0, rho0, p)? - 1.0);
            for j in 0..=5 {
                let rho = -0.8 + 1.8 * j as f64 / 5.0;
                let want = 1.0 + a * (1.0 + rho0) * (rho - rho0) / (2.0 * (1.0 + rho));
                z_lin.residual(z_of(s0, r0, rho, p)? - want);
            }
        }
    }
    checks.extend([z_id, z_lin].map(Acc::finish));

    let mut cont = Acc::new("bound branches agree at R_bar1, R_bar2, R_bar3, R_low, R_crit", 1e-9);
    let mut sandwich = Acc::new("lower <= min(upper_t1, upper_t2)", 1e-9);
    let mut exact = Acc::new("upper = lower on the exactness region", 1e-9);
    let mut mono = Acc::new("bounds nonincreasing in R", 1e-12);
    let mut ends = Acc::new("bounds equal A/4 at R = 0 and 0 at R = C", 1e-9);
    let mut convex = Acc::new("E_sp convex on [R_crit, C]", 1e-8);
    for &a in &[0.5, 1.0, 2.288, 3.0, 4.0, 10.0, 50.0] {
        let p = params(a);
        let b = Bounds::new(p)?;
        let th = *b.thresholds();
        let intercept = b.affine_intercept();
        cont.residual(b.low_rate_spectrum_bound(th.r_bar1)? - (intercept - th.r_bar1));
        cont.residual(intercept - th.r_crit - e_sp_unchecked(th.r_crit, p));
        let root = (-(-2.0 * th.r_low).exp_m1()).sqrt();
        cont.residual(a * (1.0 - root) / 4.0 - (intercept - th.r_low));
        if a > g.a0 {
            cont.residual(b.low_rate_spectrum_bound(th.r_bar2)? - b.cap_projection_branch(th.r_bar2));
            cont.residual(b.cap_projection_branch(th.r_bar3) - (intercept - th.r_bar3));
        }
        let count = 400;
        let mut prev: Option<[f64; 3]> = None;
        for k in 0..=count {
            let r = th.capacity * k as f64 / count as f64;
            let r = if k == count { th.capacity } else { r };
            let u1 = b.upper_t1(r)?;
            let u2 = b.upper_t2(r)?;
            let lo = b.lower(r)?;
            sandwich.le(lo, u1.min(u2));
            if b.is_exact_region(r) {
                exact.residual(u2 - lo);
                if r >= th.r_bar1 {
                    exact.residual(u1 - lo);
                }
            }
            let cur = [u1, u2, lo];
            if let Some(pv) = prev {
                for (x, y) in cur.iter().zip(pv) {
                    mono.le(*x, y);
                }
            }
            prev = Some(cur);
        }
        for v in [b.upper_t1(0.0)?, b.upper_t2(0.0)?, b.lower(0.0)?] {
            ends.residual(v - a / 4.0);
        }
        for v in [b.upper_t1(th.capacity)?, b.upper_t2(th.capacity)?, b.lower(th.capacity)?] {
            ends.residual(v);
        }
        let h = (th.capacity - th.r_crit) / 100.0;
        for k in 1..100 {
            let r = th.r_crit + h * k as f64;
            let d2 = e_sp_unchecked(r + h, p) - 2.0 * e_sp_unchecked(r, p) + e_sp_unchecked(r - h, p);
            convex.le(-d2, 0.0);
        }
    }
    checks.extend([cont, sandwich, exact, mono, ends, convex].map(Acc::finish));

    let mut sp = Acc::new("numeric sphere-packing optimum = E_sp", 1e-6);
    let mut sp_r1 = Acc::new("exp(2R) r1 = r at the sphere-packing optimum", 1e-8);
    for &a in &[0.5, 1.0, 4.0, 20.0] {
        let p = params(a);
        let c = capacity(p);
        for k in 1..=8 {
            let r = c * k as f64 / 9.0;
            let sol = sphere_packing_numeric(r, p)?;
            sp.residual(sol.exponent - e_sp_unchecked(r, p));
            sp_r1.residual((2.0 * r).exp() * sol.numeric.r1 - sol.numeric.r_var);
        }
    }
    checks.extend([sp, sp_r1].map(Acc::finish));

    let mut mm = Acc::new("min-max evaluation = refined upper bound on (0, R_crit]", 1e-5);
    let mut cond = Acc::new("projection condition <=> f2(u) >= 2R - 2R_crit", 0.0);
    for &a in &[3.0, 4.0, 10.0] {
        let p = params(a);
        let b = Bounds::new(p)?;
        let th = *b.thresholds();
        for k in 1..=8 {
            let r = th.r_crit * k as f64 / 8.0;
            mm.residual(b.theorem2_numeric(r)?.value - b.upper_t2(r)?);
            for j in 1..=10 {
                let u = if j == 10 { r } else { r * j as f64 / 10.0 };
                let f2u = 2.0 * u + (-tau_unchecked(t_of_rate(u)?)).ln_1p();
                cond.holds(projection_condition(u, r, p)? == (f2u >= 2.0 * r - 2.0 * th.r_crit));
            }
        }
    }
    checks.extend([mm, cond].map(Acc::finish));

    let mut card = Acc::new("cardinality bound >= size of generated codes", 0.0);
    for &n in &[4usize, 8, 16, 32] {
        let p = params(1.0);
        let codes = [
            gen_code(CodeKind::Simplex, n, n + 1, p, 0)?,
            gen_code(CodeKind::Biorthogonal, n, 2 * n, p, 0)?,
            gen_code(CodeKind::RandomUniform, n, 64, p, n as u64)?,
        ];
        for code in &codes {
            let mu = code.max_correlation().unwrap_or(0.0).max(0.0);
            if mu < 1.0 {
                card.holds(lemma4_bound(n, mu)? >= code.m() as u128);
            }
        }
    }
    let mut gamma = Acc::new("Gamma ratio inequality on [1, 1e4]", 0.0);
    for z in log_grid(1.0, 1e4, 200) {
        let (l, r) = gamma_ratio_inequality(z)?;
        gamma.le(l, r);
    }
    checks.extend([card, gamma].map(Acc::finish));

    let gap = gap_maximum();
    let mut gap_check = Acc::new("max_A (R_crit - R_bar1) = 0.06866 at A = 2.288", 0.0);
    gap_check.holds((gap.gap - 0.06866).abs() < 1e-4 && (gap.a - 2.288).abs() < 2e-3);
    checks.push(gap_check.finish());

    Ok(ValidationReport {
        checks,
        gap_maximum: gap,
    })
}

/// Convenience wrapper used by the CLI and tests.
pub fn run_default() -> Result<ValidationReport> {
    run(ValidateOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let rep = run_default().unwrap();
        assert!(rep.passed(), "{}", rep.render());
        assert!((rep.gap_maximum.gap - 0.068_660_225_517_427_49).abs() < 1e-9);
        assert!((rep.gap_maximum.a - 2.287_722_246_183_729).abs() < 1e-4);
    }

    #[test]
    fn perturbation_breaks_junction() {
        let rep = run(ValidateOptions { perturb: 1e-3 }).unwrap();
        assert!(!rep.passed());
        let failed: Vec<&str> = rep.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        assert!(failed.iter().any(|n| n.starts_with("junction")), "{failed:?}");
    }
}
