//! The random model of the race distribution: its explicit characteristic
//! function, one-dimensional densities by Fourier inversion, and Monte Carlo
//! (plain and exponentially tilted) for the vector X and the scalar Y.
//!
//! Conventions. The coordinates are
//! `X(q,a_j) = -C_q(a_j) + sum_chi sum_{gamma>0} 2 Re(chi(a_j) U(gamma)) / w`,
//! `w = sqrt(1/4 + gamma^2)`, with one uniform phase U(gamma) per stored
//! ordinate shared across all coordinates. The characteristic function is
//! carried in the conjugate convention
//! `mu_hat(t) = E exp(-i <t, X>) = exp(i sum C_j t_j) prod J0(2|sum_j chi(a_j) t_j|/w)`.

use crate::modchar::CharacterGroup;
use crate::rng::{self, bulk_u01, cos_two_pi, SampleKey};
use crate::specfun::{bessel_j0, i1_over_i0, log_i0_unchecked};
use crate::zerodata::{s2_completion, variance_vq, CovarianceData, ZeroSet};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};

/// Which norm a tail estimate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    Euclidean,
    Max,
}

/// A Monte Carlo probability estimate with its uncertainty.
#[derive(Debug, Clone)]
pub struct TailEstimate {
    pub probability: f64,
    /// Natural log of the estimate when it is positive (kept separately so
    /// deep-tail importance-sampling results survive underflow).
    pub log_probability: Option<f64>,
    pub std_error: f64,
    /// 95% score interval (Wilson for plain MC, normal-theory in weight
    /// space for tilted estimates).
    pub ci95: (f64, f64),
    pub n_samples: usize,
    pub norm: Norm,
    /// Companion estimate under the other norm (plain MC only).
    pub other_norm_probability: Option<f64>,
    /// Tilt diagnostics for importance-sampled estimates.
    pub tilt: Option<TiltInfo>,
    /// Variance removed by truncating the zero sum at the horizon
    /// (the S2 completion), recorded for error accounting.
    pub variance_deficit: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct TiltInfo {
    pub s: f64,
    pub log_laplace: f64,
    pub rejection_efficiency: f64,
}

/// Deterministic batch of model samples (row-major n x r).
#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub seed: u64,
    pub n: usize,
    pub r: usize,
    pub values: Vec<f64>,
}

impl SampleBatch {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.r..(i + 1) * self.r]
    }
}

/// Evaluated characteristic function with its truncation error bound.
#[derive(Debug, Clone, Copy)]
pub struct MuHat {
    pub value: Complex64,
    /// Bound on |log correction| from the zeros beyond the horizon, via
    /// |log J0(x)| <= x^2/2 and the analytic tail sum. The absolute error of
    /// `value` is at most |value| (exp(bound) - 1).
    pub log_error_bound: f64,
}

/// A 1-D density on a grid, from Fourier inversion.
#[derive(Debug, Clone)]
pub struct DensityGrid {
    pub points: Vec<f64>,
    pub density: Vec<f64>,
    pub t_max: f64,
    pub mass: f64,
}

impl DensityGrid {
    /// Cumulative distribution by trapezoid, normalized to end at 1.
    pub fn cdf(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.points.len()];
        for i in 1..self.points.len() {
            let dx = self.points[i] - self.points[i - 1];
            out[i] = out[i - 1] + 0.5 * dx * (self.density[i] + self.density[i - 1]);
        }
        let total = *out.last().unwrap();
        if total > 0.0 {
            for v in &mut out {
                *v /= total;
            }
        }
        out
    }

    /// Trapezoid first moment of the (normalized) density.
    pub fn mean(&self) -> f64 {
        let mut m = 0.0;
        let mut mass = 0.0;
        for i in 1..self.points.len() {
            let dx = self.points[i] - self.points[i - 1];
            m += 0.5
                * dx
                * (self.density[i] * self.points[i] + self.density[i - 1] * self.points[i - 1]);
            mass += 0.5 * dx * (self.density[i] + self.density[i - 1]);
        }
        m / mass
    }

    /// Mass of the normalized density beyond x (one-sided upper tail).
    pub fn upper_tail(&self, x: f64) -> f64 {
        let cdf = self.cdf();
        match self.points.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
            Ok(i) => 1.0 - cdf[i],
            Err(i) if i == 0 => 1.0,
            Err(i) if i >= cdf.len() => 0.0,
            Err(i) => {
                let f = (x - self.points[i - 1]) / (self.points[i] - self.points[i - 1]);
                1.0 - (cdf[i - 1] + f * (cdf[i] - cdf[i - 1]))
            }
        }
    }
}

/// Requested layout of a density grid.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    /// Number of grid points (odd counts keep a point at the center).
    pub n_points: usize,
    /// Optional explicit range; derived from the support bound when absent.
    pub range: Option<(f64, f64)>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n_points: 401,
            range: None,
        }
    }
}

/// The race model for a residue tuple mod q.
#[derive(Debug)]
pub struct RaceModel<'a> {
    group: &'a CharacterGroup,
    zeros: &'a ZeroSet,
    residues: Vec<u64>,
    cov: CovarianceData,
    /// Flat w = sqrt(1/4+gamma^2) per stored zero, deterministic order.
    weights: Vec<f64>,
    /// chi(a_k) per stored zero (row-major zero-major), as (re, im).
    chi_values: Vec<Complex64>,
    /// 2/w as f32 for the bulk sampler.
    amp32: Vec<f32>,
    /// Per-coordinate (alpha, beta) with contribution alpha cos + beta sin.
    alpha32: Vec<Vec<f32>>,
    beta32: Vec<Vec<f32>>,
}

impl<'a> RaceModel<'a> {
    pub fn new(group: &'a CharacterGroup, zeros: &'a ZeroSet, residues: &[u64]) -> Result<Self> {
        let m = group.modulus();
        if zeros.modulus() != m {
            return Err(Error::RandModel(format!(
                "zero set is mod {} but group is mod {}",
                zeros.modulus().q(),
                m.q()
            )));
        }
        if residues.is_empty() {
            return Err(Error::RandModel("need at least one residue".into()));
        }
        for (i, &a) in residues.iter().enumerate() {
            if !m.is_unit(a) {
                return Err(Error::NotCoprime { a, q: m.q() });
            }
            if residues[..i].iter().any(|&x| x % m.q() == a % m.q()) {
                return Err(Error::RandModel(format!("repeated residue {a}")));
            }
        }
        let r = residues.len();
        let cov = if r >= 2 {
            crate::zerodata::covariance_data(zeros, group, residues)?
        } else {
            CovarianceData {
                residues: residues.to_vec(),
                c_vector: vec![crate::modchar::c_coefficient(m, residues[0])?],
                variance: variance_vq(zeros, false).value,
                b_matrix: vec![variance_vq(zeros, false).value],
            }
        };
        // flatten zero data with per-character chi(a_k) values
        let flat = zeros.flat_weights_with_char();
        let nz = flat.len();
        let mut weights = Vec::with_capacity(nz);
        let mut chi_values = Vec::with_capacity(nz * r);
        let mut amp32 = Vec::with_capacity(nz);
        let mut alpha32 = vec![Vec::with_capacity(nz); r];
        let mut beta32 = vec![Vec::with_capacity(nz); r];
        let mut cache: std::collections::BTreeMap<u64, Vec<Complex64>> = Default::default();
        for &(conrey, w) in &flat {
            let vals = cache.entry(conrey).or_insert_with(|| {
                let chi = group.by_conrey(conrey).expect("character exists");
                residues.iter().map(|&a| chi.eval_c64(a)).collect()
            });
            weights.push(w);
            amp32.push((2.0 / w) as f32);
            for (k, v) in vals.iter().enumerate() {
                chi_values.push(*v);
                alpha32[k].push((2.0 / w * v.re) as f32);
                beta32[k].push((-2.0 / w * v.im) as f32);
            }
        }
        Ok(RaceModel {
            group,
            zeros,
            residues: residues.to_vec(),
            cov,
            weights,
            chi_values,
            amp32,
            alpha32,
            beta32,
        })
    }

    pub fn covariance(&self) -> &CovarianceData {
        &self.cov
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn group(&self) -> &CharacterGroup {
        self.group
    }

    pub fn zeros(&self) -> &ZeroSet {
        self.zeros
    }

    pub fn r(&self) -> usize {
        self.residues.len()
    }

    /// Largest possible |Y| of the truncated model: sum of 2/w.
    pub fn support_bound(&self) -> f64 {
        self.weights.iter().map(|w| 2.0 / w).sum()
    }

    /// mu_hat(t) = E exp(-i<t,X>) over the stored zeros, with a bound on the
    /// log-scale truncation error from the tail beyond the horizon.
    pub fn mu_hat(&self, t: &[f64]) -> MuHat {
        assert_eq!(t.len(), self.r(), "t must have r coordinates");
        let r = self.r();
        // drift phase exp(i sum C_j t_j)
        let drift: f64 = self
            .cov
            .c_vector
            .iter()
            .zip(t)
            .map(|(&c, &tj)| c as f64 * tj)
            .sum();
        let mut log_mod = 0.0f64;
        let mut sign = 1.0f64;
        let mut zero_hit = false;
        let mut idx = 0usize;
        let mut max_m = 0.0f64;
        let mut last_conrey = u64::MAX;
        let mut m_chi = 0.0f64;
        for (conrey, cz) in self.zeros.chars() {
            if cz.ordinates.is_empty() {
                continue;
            }
            if conrey != last_conrey {
                // modulus of 2 sum_j chi(a_j) t_j for this character
                let mut z = Complex64::new(0.0, 0.0);
                for k in 0..r {
                    z += self.chi_values[idx * r + k] * t[k];
                }
                m_chi = 2.0 * z.norm();
                max_m = max_m.max(m_chi);
                last_conrey = conrey;
            }
            for &g in &cz.ordinates {
                let w = (0.25 + g * g).sqrt();
                let j = bessel_j0(m_chi / w);
                if j == 0.0 {
                    zero_hit = true;
                } else {
                    log_mod += j.abs().ln();
                    if j < 0.0 {
                        sign = -sign;
                    }
                }
                idx += 1;
            }
        }
        let value = if zero_hit {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(log_mod.exp() * sign, drift)
        };
        // tail bound: sum over gamma > H of (m/w)^2/2 <= max_m^2/2 * S2(H)
        let h = self.zeros.horizon_min();
        let log_error_bound = if h > 0.0 && max_m <= h {
            0.5 * max_m * max_m * s2_completion(self.group.modulus(), h)
        } else if max_m == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        MuHat {
            value,
            log_error_bound,
        }
    }

    /// |mu_hat| along a ray, for empirical decay probes.
    pub fn charfun_decay_probe(&self, direction: &[f64], radii: &[f64]) -> Result<Vec<f64>> {
        assert_eq!(direction.len(), self.r());
        let norm: f64 = direction.iter().map(|d| d * d).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::RandModel("direction must be nonzero".into()));
        }
        let mut prev = 0.0;
        for &r in radii {
            if r < 0.0 || r < prev {
                return Err(Error::RandModel("radii must be ascending and >= 0".into()));
            }
            prev = r;
        }
        Ok(radii
            .iter()
            .map(|&rad| {
                let t: Vec<f64> = direction.iter().map(|d| d / norm * rad).collect();
                self.mu_hat(&t).value.norm()
            })
            .collect())
    }

    /// Marginal density of X(q,a) by Fourier inversion:
    /// p(x) = (1/pi) int_0^tmax P(t) cos(t (x + C_q(a))) dt with
    /// P(t) = prod_gamma J0(2t/w).
    pub fn density_1d(&self, a: u64, grid: &GridSpec) -> Result<DensityGrid> {
        let m = self.group.modulus();
        if !m.is_unit(a) {
            return Err(Error::NotCoprime { a, q: m.q() });
        }
        let c = crate::modchar::c_coefficient(m, a)? as f64;
        if self.zeros.is_empty() {
            return Err(Error::RandModel(
                "density_1d needs a nonempty zero set".into(),
            ));
        }
        // t_max from the envelope |J0(x)| <= min(1, sqrt(2/(pi x)))
        let t_max = self.find_t_max()?;
        // horizon check: reported mu_hat truncation at t_max must be tiny
        let h = self.zeros.horizon_min();
        let bound = 2.0 * t_max * t_max * s2_completion(m, h);
        // |mu_hat(t_max)| <= 1e-16, so absolute error <= 1e-16 (e^bound - 1)
        if 1e-16 * (bound.exp() - 1.0) > 1e-12 {
            let needed = 2.0 * t_max * t_max * m.totient() as f64 * (m.q() as f64).ln()
                / (TAU * (1e4f64).ln());
            return Err(Error::RandModel(format!(
                "zero horizon {h:.1} too small for inversion at t_max={t_max:.1}; \
                 need horizon >= {needed:.0}"
            )));
        }
        let support = self.support_bound();
        let (x_lo, x_hi) = grid
            .range
            .unwrap_or((-c - 1.05 * support - 0.5, -c + 1.05 * support + 0.5));
        let n_x = grid.n_points.max(9);
        let points: Vec<f64> = (0..n_x)
            .map(|i| x_lo + (x_hi - x_lo) * i as f64 / (n_x - 1) as f64)
            .collect();
        let x_scale = (x_lo + c).abs().max((x_hi + c).abs());

        // refine the shared t-grid until the result stabilizes
        let mut density: Vec<f64>;
        let mut mass: f64;
        let mut n_t = (64.0 * (1.0 + x_scale.max(support) * t_max / TAU)) as usize;
        n_t = n_t.next_power_of_two().clamp(1 << 10, 1 << 21);
        let mut prev_mass = f64::NAN;
        loop {
            let cf = self.charfun_grid(t_max, n_t);
            density = points
                .par_iter()
                .map(|&x| {
                    // Simpson over the cached P(t) values
                    let dt = t_max / n_t as f64;
                    let mut acc = 0.0;
                    for (i, &p) in cf.iter().enumerate() {
                        let t = i as f64 * dt;
                        let w = if i == 0 || i == n_t {
                            1.0
                        } else if i % 2 == 1 {
                            4.0
                        } else {
                            2.0
                        };
                        acc += w * p * (t * (x + c)).cos();
                    }
                    (acc * dt / 3.0 / PI).max(0.0)
                })
                .collect();
            mass = trapezoid(&points, &density);
            if (mass - prev_mass).abs() < 5e-4 || n_t >= 1 << 21 {
                break;
            }
            prev_mass = mass;
            n_t *= 2;
        }
        if !(0.99..=1.01).contains(&mass) {
            return Err(Error::Convergence {
                context: format!("density_1d mass {mass:.6} outside [0.99, 1.01]"),
            });
        }
        Ok(DensityGrid {
            points,
            density,
            t_max,
            mass,
        })
    }

    /// First t where the product envelope drops below 1e-16.
    fn find_t_max(&self) -> Result<f64> {
        let target = (1e-16f64).ln();
        let mut t = 1.0f64;
        for _ in 0..60 {
            let env: f64 = self
                .weights
                .iter()
                .map(|&w| {
                    let x = 2.0 * t / w;
                    if x <= TAU / PI {
                        0.0
                    } else {
                        0.5 * (2.0 / (PI * x)).ln()
                    }
                })
                .sum();
            if env < target {
                return Ok(t);
            }
            t *= 1.25;
        }
        Err(Error::Convergence {
            context: "find_t_max: characteristic function decays too slowly".into(),
        })
    }

    /// P(t) = prod J0(2t/w) on a uniform grid of n+1 points over [0, t_max].
    fn charfun_grid(&self, t_max: f64, n: usize) -> Vec<f64> {
        (0..=n)
            .into_par_iter()
            .map(|i| {
                let t = t_max * i as f64 / n as f64;
                let mut log_mod = 0.0f64;
                let mut sign = 1.0f64;
                for &w in &self.weights {
                    let j = bessel_j0(2.0 * t / w);
                    if j == 0.0 {
                        return 0.0;
                    }
                    log_mod += j.abs().ln();
                    if j < 0.0 {
                        sign = -sign;
                    }
                }
                sign * log_mod.exp()
            })
            .collect()
    }

    /// Draws of the scalar Y = sum 2 cos(2 pi theta)/w (one shared phase per
    /// stored ordinate). Deterministic in the seed, thread-count independent.
    ///
    /// The inner loop runs in fixed-width lanes so the hash, the cosine
    /// polynomial and the weighted accumulation all vectorize; f32 lane sums
    /// drain into an f64 accumulator every 4096 terms.
    pub fn sample_y(&self, n: usize, seed: u64) -> Vec<f64> {
        let amp = &self.amp32;
        (0..n)
            .into_par_iter()
            .map(|i| sample_y_one(amp, SampleKey::new(seed, i as u64)))
            .collect()
    }

    /// Draws of the vector X; phases are shared across coordinates, so the
    /// same U(gamma) enters every X(q, a_j).
    pub fn sample_x(&self, n: usize, seed: u64) -> SampleBatch {
        let r = self.r();
        let nz = self.amp32.len();
        let values: Vec<f64> = (0..n)
            .into_par_iter()
            .flat_map_iter(|i| {
                let key = SampleKey::new(seed, i as u64);
                let mut acc = vec![0.0f64; r];
                let mut chunk = vec![0.0f32; r];
                for j in 0..nz {
                    let u = bulk_u01(key, j as u32);
                    let cv = cos_two_pi(u);
                    let us = u + 0.75;
                    let sv = cos_two_pi(if us >= 1.0 { us - 1.0 } else { us });
                    for k in 0..r {
                        chunk[k] += self.alpha32[k][j] * cv + self.beta32[k][j] * sv;
                    }
                    if j % 4096 == 4095 {
                        for k in 0..r {
                            acc[k] += chunk[k] as f64;
                            chunk[k] = 0.0;
                        }
                    }
                }
                let row: Vec<f64> = (0..r)
                    .map(|k| acc[k] + chunk[k] as f64 - self.cov.c_vector[k] as f64)
                    .collect();
                row
            })
            .collect();
        SampleBatch {
            seed,
            n,
            r,
            values,
        }
    }

    /// Plain Monte Carlo estimate of mu(||x|| > V) in the requested norm.
    pub fn mc_tail(&self, v: f64, n: usize, seed: u64, norm: Norm) -> Result<TailEstimate> {
        if n < 1000 {
            return Err(Error::RandModel("mc_tail needs n >= 1000".into()));
        }
        let batch = self.sample_x(n, seed);
        let mut hits_eu = 0usize;
        let mut hits_max = 0usize;
        for i in 0..n {
            let row = batch.row(i);
            let eu: f64 = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            let mx = row.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
            if eu > v {
                hits_eu += 1;
            }
            if mx > v {
                hits_max += 1;
            }
        }
        let (hits, other) = match norm {
            Norm::Euclidean => (hits_eu, hits_max),
            Norm::Max => (hits_max, hits_eu),
        };
        let p = hits as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        Ok(TailEstimate {
            probability: p,
            log_probability: (p > 0.0).then(|| p.ln()),
            std_error: se,
            ci95: wilson(hits, n),
            n_samples: n,
            norm,
            other_norm_probability: Some(other as f64 / n as f64),
            tilt: None,
            variance_deficit: 2.0
                * s2_completion(self.group.modulus(), self.zeros.horizon_min().max(1.0)),
        })
    }

    /// The tilt parameter matching a target deviation on the stored zeros:
    /// solves sum (2/w) I1/I0(2s/w) = V.
    pub fn empirical_tilt(&self, v: f64) -> Result<f64> {
        let support = self.support_bound();
        if v <= 0.0 {
            return Err(Error::RandModel("tilt target must be positive".into()));
        }
        if v >= support {
            return Err(Error::RandModel(format!(
                "deviation {v} is at or beyond the truncated support bound {support:.6}"
            )));
        }
        let mean_at = |s: f64| -> f64 {
            self.weights
                .iter()
                .map(|&w| 2.0 / w * i1_over_i0(2.0 * s / w))
                .sum()
        };
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        while mean_at(hi) < v {
            hi *= 2.0;
            if hi > 1e12 {
                return Err(Error::Convergence {
                    context: "empirical_tilt: no finite tilt reaches the target".into(),
                });
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mean_at(mid) < v {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-12 * hi {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Exponentially tilted estimate of rho_q(V) = P(Y > V). The tilt is the
    /// saddle of the stored-zero Laplace transform unless overridden.
    pub fn tilted_tail(&self, v: f64, n: usize, seed: u64) -> Result<TailEstimate> {
        let s = self.empirical_tilt(v)?;
        self.tilted_tail_with_s(v, s, n, seed)
    }

    pub fn tilted_tail_with_s(&self, v: f64, s: f64, n: usize, seed: u64) -> Result<TailEstimate> {
        if s < 0.0 {
            return Err(Error::RandModel("tilt must be >= 0".into()));
        }
        let kappas: Vec<f64> = self.weights.iter().map(|&w| 2.0 * s / w).collect();
        let log_l: f64 = kappas.iter().map(|&k| log_i0_unchecked(k)).sum();
        let nz = kappas.len();
        let amps: Vec<f64> = self.weights.iter().map(|&w| 2.0 / w).collect();

        let results: Vec<(f64, RejectStats)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut stats = RejectStats::default();
                let mut y = 0.0f64;
                for j in 0..nz {
                    let cos_phi =
                        sample_tilted_cos(kappas[j], seed, j as u64, i as u64, &mut stats);
                    y += amps[j] * cos_phi;
                }
                (y, stats)
            })
            .collect();
        let attempts: u64 = results.iter().map(|(_, a)| a.attempts).sum();
        let accepts: u64 = results.iter().map(|(_, a)| a.accepts).sum();
        let efficiency = if attempts > 0 {
            accepts as f64 / attempts as f64
        } else {
            1.0
        };
        if efficiency < 1e-3 {
            return Err(Error::RandModel(format!(
                "tilted rejection efficiency {efficiency:.2e} below 1e-3"
            )));
        }
        // estimator: mean of 1{Y > V} exp(-s Y) * L(s), in log space
        let logs: Vec<f64> = results
            .iter()
            .filter(|(y, _)| *y > v)
            .map(|(y, _)| -s * y + log_l)
            .collect();
        if logs.is_empty() {
            return Ok(TailEstimate {
                probability: 0.0,
                log_probability: None,
                std_error: 0.0,
                ci95: (0.0, 3.0 / n as f64),
                n_samples: n,
                norm: Norm::Max,
                other_norm_probability: None,
                tilt: Some(TiltInfo {
                    s,
                    log_laplace: log_l,
                    rejection_efficiency: efficiency,
                }),
                variance_deficit: 2.0
                    * s2_completion(self.group.modulus(), self.zeros.horizon_min().max(1.0)),
            });
        }
        let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let scaled_sum: f64 = logs.iter().map(|&l| (l - m).exp()).sum();
        let scaled_sq: f64 = logs.iter().map(|&l| (2.0 * (l - m)).exp()).sum();
        let nf = n as f64;
        let mean_scaled = scaled_sum / nf;
        let log_p = m + mean_scaled.ln();
        let var_scaled = (scaled_sq / nf - mean_scaled * mean_scaled).max(0.0);
        let rel_se = (var_scaled / nf).sqrt() / mean_scaled;
        let p = log_p.exp();
        Ok(TailEstimate {
            probability: p,
            log_probability: Some(log_p),
            std_error: rel_se * p,
            ci95: (
                (log_p - 1.96 * rel_se).exp(),
                (log_p + 1.96 * rel_se).exp(),
            ),
            n_samples: n,
            norm: Norm::Max,
            other_norm_probability: None,
            tilt: Some(TiltInfo {
                s,
                log_laplace: log_l,
                rejection_efficiency: efficiency,
            }),
            variance_deficit: 2.0
                * s2_completion(self.group.modulus(), self.zeros.horizon_min().max(1.0)),
        })
    }

    /// Monte Carlo estimate of mu(x_{s(1)} > x_{s(2)} > ... > x_{s(r)}) for a
    /// permutation s given by indices into the residue tuple.
    pub fn race_density(&self, ordering: &[usize], n: usize, seed: u64) -> Result<TailEstimate> {
        let r = self.r();
        if r < 2 {
            return Err(Error::RandModel("race_density needs r >= 2".into()));
        }
        let mut seen = vec![false; r];
        for &i in ordering {
            if i >= r || seen[i] {
                return Err(Error::RandModel(format!(
                    "ordering must be a permutation of 0..{r}"
                )));
            }
            seen[i] = true;
        }
        if ordering.len() != r {
            return Err(Error::RandModel("ordering length must equal r".into()));
        }
        let batch = self.sample_x(n, seed);
        let mut hits = 0usize;
        for i in 0..n {
            let row = batch.row(i);
            if ordering.windows(2).all(|w| row[w[0]] > row[w[1]]) {
                hits += 1;
            }
        }
        let p = hits as f64 / n as f64;
        Ok(TailEstimate {
            probability: p,
            log_probability: (p > 0.0).then(|| p.ln()),
            std_error: (p * (1.0 - p) / n as f64).sqrt(),
            ci95: wilson(hits, n),
            n_samples: n,
            norm: Norm::Max,
            other_norm_probability: None,
            tilt: None,
            variance_deficit: 2.0
                * s2_completion(self.group.modulus(), self.zeros.horizon_min().max(1.0)),
        })
    }

    /// Empirical characteristic function mean exp(-i<t, X_i>) with standard
    /// errors of the real and imaginary parts.
    pub fn empirical_cf(&self, t: &[f64], n: usize, seed: u64) -> (Complex64, f64) {
        let batch = self.sample_x(n, seed);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut sum_sq = 0.0f64;
        for i in 0..n {
            let dot: f64 = batch.row(i).iter().zip(t).map(|(x, tj)| x * tj).sum();
            let z = Complex64::from_polar(1.0, -dot);
            sum += z;
            sum_sq += z.re * z.re + z.im * z.im; // = 1, kept for clarity
        }
        let mean = sum / n as f64;
        // componentwise variance bound: Var <= (1 - |mean|^2)/n per component
        let var = ((sum_sq / n as f64) - mean.norm_sqr()).max(0.0) / n as f64;
        (mean, var.sqrt())
    }
}

/// Wilson 95% score interval.
fn wilson(hits: usize, n: usize) -> (f64, f64) {
    let z = 1.959963984540054f64;
    let nf = n as f64;
    let p = hits as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 1..x.len() {
        acc += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    }
    acc
}

const LANES: usize = 16;
const DRAIN_BLOCKS: usize = 256; // drain f32 lanes every LANES*DRAIN_BLOCKS terms

fn sample_y_one(amp: &[f32], key: SampleKey) -> f64 {
    let nz = amp.len();
    let mut acc = 0.0f64;
    let mut lanes = [0.0f32; LANES];
    let mut j = 0usize;
    let mut blocks = 0usize;
    while j + LANES <= nz {
        let block = &amp[j..j + LANES];
        for l in 0..LANES {
            let u = bulk_u01(key, (j + l) as u32);
            lanes[l] += block[l] * cos_two_pi(u);
        }
        j += LANES;
        blocks += 1;
        if blocks == DRAIN_BLOCKS {
            for v in &mut lanes {
                acc += *v as f64;
                *v = 0.0;
            }
            blocks = 0;
        }
    }
    for v in &mut lanes {
        acc += *v as f64;
    }
    let mut tail = 0.0f32;
    while j < nz {
        tail += amp[j] * cos_two_pi(bulk_u01(key, j as u32));
        j += 1;
    }
    acc + tail as f64
}

#[derive(Debug, Default, Clone, Copy)]
struct RejectStats {
    attempts: u64,
    accepts: u64,
}

/// Draw cos(phi) with phi from the von Mises density ~ exp(kappa cos phi).
///
/// kappa <= 1: rejection against a uniform proposal (accept with
/// exp(kappa(cos phi - 1))). kappa > 1: rejection against the Gaussian
/// envelope exp(kappa) exp(-(2 kappa/pi^2) phi^2) on [-pi, pi], valid since
/// cos phi <= 1 - (2/pi^2) phi^2 there. Counter-based and reproducible:
/// each (zero, sample) pair owns a block of 512 hash counters.
fn sample_tilted_cos(
    kappa: f64,
    seed: u64,
    stream: u64,
    sample: u64,
    stats: &mut RejectStats,
) -> f64 {
    let base = sample.wrapping_mul(512);
    if kappa <= 1e-12 {
        stats.attempts += 1;
        stats.accepts += 1;
        let u = rng::u01(seed, stream, base);
        return (TAU * u).cos();
    }
    if kappa <= 1.0 {
        for attempt in 0..128u64 {
            let u = rng::u01(seed, stream, base + 2 * attempt);
            let acc_u = rng::u01(seed, stream, base + 2 * attempt + 1);
            let c = rng::cos_two_pi_f64(u);
            stats.attempts += 1;
            // accept with probability e^x, x = kappa(c-1) <= 0; the squeeze
            // 1 + x <= e^x <= 1 + x + x^2/2 skips the exp except in the gap
            let x = kappa * (c - 1.0);
            let accept = if acc_u <= 1.0 + x {
                true
            } else if acc_u > 1.0 + x + 0.5 * x * x {
                false
            } else {
                acc_u <= x.exp()
            };
            if accept {
                stats.accepts += 1;
                return c;
            }
        }
    } else {
        let sigma = PI / (2.0 * kappa.sqrt());
        for attempt in 0..128u64 {
            let u1 = rng::u01(seed, stream, base + 3 * attempt).max(1e-15);
            let u2 = rng::u01(seed, stream, base + 3 * attempt + 1);
            let acc_u = rng::u01(seed, stream, base + 3 * attempt + 2);
            let z = (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos();
            let phi = sigma * z;
            stats.attempts += 1;
            if phi.abs() <= PI {
                let c = phi.cos();
                let log_ratio = kappa * (c - 1.0 + (2.0 / (PI * PI)) * phi * phi);
                if acc_u <= log_ratio.exp() {
                    stats.accepts += 1;
                    return c;
                }
            }
        }
    }
    // acceptance never dropped below ~0.4 for either branch; reaching this
    // would mean 128 consecutive rejections
    1.0
}
