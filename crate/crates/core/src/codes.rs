//! Small spherical codes: generators, exact distance spectra and Monte Carlo
//! maximum-likelihood decoding over the unit-variance AWGN channel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::functions::ChannelParams;
use crate::numeric::gaussian_q;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CodeKind {
    RandomUniform,
    Simplex,
    Biorthogonal,
    Pair { rho: f64 },
}

/// `M` codewords in `R^n`, each of squared norm `A·n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphericalCode {
    n: usize,
    a: f64,
    codewords: Vec<Vec<f64>>,
}

const NORM_TOL: f64 = 1e-9;

impl SphericalCode {
    pub fn from_codewords(n: usize, p: ChannelParams, codewords: Vec<Vec<f64>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidCode("dimension must be positive".into()));
        }
        if codewords.is_empty() {
            return Err(Error::InvalidCode("a code needs at least one codeword".into()));
        }
        let target = p.a() * n as f64;
        for (i, x) in codewords.iter().enumerate() {
            if x.len() != n {
                return Err(Error::InvalidCode(format!("codeword {i} has length {}, expected {n}", x.len())));
            }
            let norm: f64 = x.iter().map(|v| v * v).sum();
            if ((norm - target) / target).abs() > NORM_TOL {
                return Err(Error::InvalidCode(format!(
                    "codeword {i} has squared norm {norm}, expected {target}"
                )));
            }
        }
        Ok(SphericalCode {
            n,
            a: p.a(),
            codewords,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.codewords.len()
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn codewords(&self) -> &[Vec<f64>] {
        &self.codewords
    }

    /// `ln M / n`.
    pub fn rate(&self) -> f64 {
        (self.m() as f64).ln() / self.n as f64
    }

    /// Normalized inner product `(x_i, x_j)/(A n)`.
    pub fn rho(&self, i: usize, j: usize) -> f64 {
        dot(&self.codewords[i], &self.codewords[j]) / (self.a * self.n as f64)
    }

    /// Largest `ρ_ij` over `i ≠ j`; `None` for a single codeword.
    pub fn max_correlation(&self) -> Option<f64> {
        let m = self.m();
        (0..m)
            .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
            .map(|(i, j)| self.rho(i, j))
            .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))))
    }

    /// The same code with every coordinate multiplied by `c > 0`; the power
    /// becomes `c² A`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(domain("scale", c, "(0, inf)"));
        }
        let codewords = self
            .codewords
            .iter()
            .map(|x| x.iter().map(|v| v * c).collect())
            .collect();
        SphericalCode::from_codewords(self.n, ChannelParams::new(self.a * c * c)?, codewords)
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn scale_to(mut v: Vec<f64>, radius: f64) -> Vec<f64> {
    let norm = dot(&v, &v).sqrt();
    for x in &mut v {
        *x *= radius / norm;
    }
    v
}

/// Builds a code of the given kind. `m` must be at most `n+1` for a simplex,
/// equal `2n` for a biorthogonal code and equal 2 for a pair.
pub fn gen_code(kind: CodeKind, n: usize, m: usize, p: ChannelParams, seed: u64) -> Result<SphericalCode> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidCode(format!("n = {n}, M = {m}: both must be positive")));
    }
    let radius = (p.a() * n as f64).sqrt();
    let codewords = match kind {
        CodeKind::RandomUniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..m)
                .map(|_| {
                    let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                    scale_to(v, radius)
                })
                .collect()
        }
        CodeKind::Simplex => {
            if m > n + 1 {
                return Err(Error::InvalidCode(format!("simplex needs M <= n + 1, got n = {n}, M = {m}")));
            }
            simplex(n, m, radius)
        }
        CodeKind::Biorthogonal => {
            if m != 2 * n {
                return Err(Error::InvalidCode(format!("biorthogonal needs M = 2n, got n = {n}, M = {m}")));
            }
            (0..m)
                .map(|i| {
                    let mut v = vec![0.0; n];
                    v[i / 2] = if i % 2 == 0 { radius } else { -radius };
                    v
                })
                .collect()
        }
        CodeKind::Pair { rho } => {
            if m != 2 || n < 2 {
                return Err(Error::InvalidCode(format!("pair needs M = 2 and n >= 2, got n = {n}, M = {m}")));
            }
            if !(-1.0..=1.0).contains(&rho) {
                return Err(domain("rho", rho, "[-1, 1]"));
            }
            let mut x = vec![0.0; n];
            x[0] = radius;
            let mut y = vec![0.0; n];
            y[0] = radius * rho;
            y[1] = radius * (1.0 - rho * rho).sqrt();
            vec![x, y]
        }
    };
    SphericalCode::from_codewords(n, p, codewords)
}

/// Regular simplex of `m` points: the centred unit vectors of `R^m`
/// expressed in the Helmert basis of the sum-zero hyperplane.
fn simplex(n: usize, m: usize, radius: f64) -> Vec<Vec<f64>> {
    if m == 1 {
        let mut v = vec![0.0; n];
        v[0] = radius;
        return vec![v];
    }
    let scale = radius / (1.0 - 1.0 / m as f64).sqrt();
    (0..m)
        .map(|i| {
            let mut v = vec![0.0; n];
            for k in 1..m {
                let norm = ((k * (k + 1)) as f64).sqrt();
                let h = if i < k {
                    1.0
                } else if i == k {
                    -(k as f64)
                } else {
                    0.0
                };
                v[k - 1] = scale * h / norm;
            }
            v
        })
        .collect()
}

/// Ordered-pair counts of `ρ_ij` in bins `[−1 + kw, −1 + (k+1)w)`, the last
/// bin closed at 1, with masses normalized by `1/M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumHistogram {
    pub bin_width: f64,
    pub n: usize,
    pub m: usize,
    /// `counts.len() + 1` edges.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl SpectrumHistogram {
    fn empty(code: &SphericalCode, bin_width: f64) -> Self {
        let bins = ((2.0 / bin_width).ceil() as usize).max(1);
        let edges = (0..=bins).map(|k| (-1.0 + bin_width * k as f64).min(1.0)).collect();
        SpectrumHistogram {
            bin_width,
            n: code.n(),
            m: code.m(),
            edges,
            counts: vec![0; bins],
        }
    }

    fn bin_of(&self, rho: f64) -> usize {
        let k = ((rho + 1.0) / self.bin_width).floor();
        if k < 0.0 {
            0
        } else {
            (k as usize).min(self.counts.len() - 1)
        }
    }

    pub fn mass(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.m as f64).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.counts.iter().sum::<u64>() as f64 / self.m as f64
    }

    /// `(1/n) ln B` per bin; `None` for empty bins.
    pub fn exponents(&self) -> Vec<Option<f64>> {
        self.mass()
            .into_iter()
            .map(|b| (b > 0.0).then(|| b.ln() / self.n as f64))
            .collect()
    }
}

/// Default bin width `1/√(A n)`.
pub fn default_bin_width(code: &SphericalCode) -> f64 {
    1.0 / (code.a() * code.n() as f64).sqrt()
}

/// Spectrum histogram, computed over unordered pairs in parallel.
pub fn spectrum_histogram(code: &SphericalCode, bin_width: f64) -> Result<SpectrumHistogram> {
    if !(bin_width > 0.0) {
        return Err(domain("bin width", bin_width, "(0, inf)"));
    }
    let mut h = SpectrumHistogram::empty(code, bin_width);
    let m = code.m();
    let partial: Vec<Vec<u64>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut c = vec![0u64; h.counts.len()];
            for j in i + 1..m {
                c[h.bin_of(code.rho(i, j))] += 2;
            }
            c
        })
        .collect();
    for c in partial {
        for (acc, v) in h.counts.iter_mut().zip(c) {
            *acc += v;
        }
    }
    Ok(h)
}

/// Spectrum histogram by the definitional double loop over ordered pairs.
pub fn spectrum_histogram_naive(code: &SphericalCode, bin_width: f64) -> Result<SpectrumHistogram> {
    if !(bin_width > 0.0) {
        return Err(domain("bin width", bin_width, "(0, inf)"));
    }
    let mut h = SpectrumHistogram::empty(code, bin_width);
    for i in 0..code.m() {
        for j in 0..code.m() {
            if i != j {
                let k = h.bin_of(code.rho(i, j));
                h.counts[k] += 1;
            }
        }
    }
    Ok(h)
}

/// `B(s, t) = (1/M) #{(i, j): i ≠ j, s ≤ ρ_ij < t}`.
pub fn spectrum_mass(code: &SphericalCode, s: f64, t: f64) -> f64 {
    let m = code.m();
    let mut count = 0u64;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                let r = code.rho(i, j);
                if r >= s && r < t {
                    count += 1;
                }
            }
        }
    }
    count as f64 / m as f64
}

/// `(1/n) ln B(s, t)`, absent when the interval holds no pairs.
pub fn spectrum_exponent(code: &SphericalCode, s: f64, t: f64) -> Option<f64> {
    let b = spectrum_mass(code, s, t);
    (b > 0.0).then(|| b.ln() / code.n() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecodingEstimate {
    pub p_e_hat: f64,
    pub errors: u64,
    pub trials: u64,
    /// 95% normal-approximation half-width `1.96 √(p(1−p)/N)`.
    pub half_width: f64,
    pub seed: u64,
}

/// Minimum-distance decision for the received vector `y`. Returns the first
/// minimizer and whether it is unique.
pub fn decode(code: &SphericalCode, y: &[f64]) -> (usize, bool) {
    let mut best = f64::INFINITY;
    let mut arg = 0;
    let mut unique = true;
    for (j, x) in code.codewords.iter().enumerate() {
        let d: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        if d < best {
            best = d;
            arg = j;
            unique = true;
        } else if d == best {
            unique = false;
        }
    }
    (arg, unique)
}

/// Transmitted index and noise vector of trial `trial`.
pub fn trial_noise(seed: u64, trial: u64, m: usize, n: usize) -> (usize, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let idx = rng.random_range(0..m);
    let noise = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    (idx, noise)
}

/// Estimates the ML decoding error probability with `trials` independent
/// transmissions of uniformly chosen codewords. Ties count as errors.
pub fn ml_decode_error_mc(code: &SphericalCode, trials: u64, seed: u64) -> Result<DecodingEstimate> {
    if trials == 0 {
        return Err(domain("trials", 0.0, "[1, inf)"));
    }
    let errors = if code.m() == 1 {
        0
    } else {
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let (idx, mut y) = trial_noise(seed, t, code.m(), code.n());
                for (v, x) in y.iter_mut().zip(&code.codewords[idx]) {
                    *v += x;
                }
                let (got, unique) = decode(code, &y);
                u64::from(got != idx || !unique)
            })
            .sum()
    };
    let p = errors as f64 / trials as f64;
    Ok(DecodingEstimate {
        p_e_hat: p,
        errors,
        trials,
        half_width: 1.96 * (p * (1.0 - p) / trials as f64).sqrt(),
        seed,
    })
}

/// Pairwise error probability `Q(√d / 2)` at total squared distance `d`.
pub fn pairwise_error(distance_sq: f64) -> f64 {
    gaussian_q(distance_sq.sqrt() / 2.0)
}

/// Union bound `(1/M) Σ_i Σ_{j≠i} Q(‖x_i − x_j‖/2)`.
pub fn union_bound(code: &SphericalCode) -> f64 {
    let m = code.m();
    let mut total = 0.0;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                let d: f64 = code.codewords[i]
                    .iter()
                    .zip(&code.codewords[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                total += pairwise_error(d);
            }
        }
    }
    total / m as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentPoint {
    pub n: usize,
    pub m: usize,
    /// `ln M / n` of the code actually simulated.
    pub rate: f64,
    pub estimate: DecodingEstimate,
    /// `−ln p̂ / n`; with no observed errors, `−ln(3/N)/n` (a one-sided
    /// 95% lower bound). Absent when `M = 1`.
    pub exponent: Option<f64>,
    pub lower_bound_only: bool,
    /// Exponent interval from `p̂ ± half_width`; the upper end is infinite
    /// when the interval reaches zero.
    pub interval: Option<(f64, f64)>,
}

/// Codebook size used for `kind` at dimension `n`.
pub fn code_size(kind: CodeKind, n: usize, rate_target: f64) -> usize {
    match kind {
        CodeKind::RandomUniform => ((n as f64 * rate_target).exp().round() as usize).max(2),
        CodeKind::Simplex => n + 1,
        CodeKind::Biorthogonal => 2 * n,
        CodeKind::Pair { .. } => 2,
    }
}

/// Per-dimension empirical error exponents for codes of the given kind.
/// Each `n` uses its own seed offset so the points are independent.
pub fn empirical_exponent(
    kind: CodeKind,
    p: ChannelParams,
    rate_target: f64,
    n_list: &[usize],
    trials: u64,
    seed: u64,
) -> Result<Vec<ExponentPoint>> {
    n_list
        .iter()
        .map(|&n| {
            let m = code_size(kind, n, rate_target);
            let code = gen_code(kind, n, m, p, seed.wrapping_add(n as u64))?;
            let est = ml_decode_error_mc(&code, trials, seed.wrapping_mul(31).wrapping_add(n as u64))?;
            let nf = n as f64;
            let (exponent, lower_bound_only, interval) = if code.m() == 1 {
                (None, false, None)
            } else if est.errors == 0 {
                let e = -(3.0 / trials as f64).min(1.0).ln() / nf;
                (Some(e), true, Some((e, f64::INFINITY)))
            } else {
                let e = -est.p_e_hat.ln() / nf;
                let hi_p = (est.p_e_hat + est.half_width).min(1.0);
                let lo_p = est.p_e_hat - est.half_width;
                let upper = if lo_p > 0.0 { -lo_p.ln() / nf } else { f64::INFINITY };
                (Some(e), false, Some((-hi_p.ln() / nf, upper)))
            };
            Ok(ExponentPoint {
                n,
                m: code.m(),
                rate: code.rate(),
                estimate: est,
                exponent,
                lower_bound_only,
                interval,
            })
        })
        .collect()
}
