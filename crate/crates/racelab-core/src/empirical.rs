//! Ground-truth harness: a segmented prime sieve with per-residue counts at
//! logarithmic checkpoints, the normalized race vector
//! `E(x;q,a) = (log x/sqrt x)(phi(q) pi(x;q,a) - pi(x))`, and the
//! logarithmic-measure sampler.

use crate::modchar::Modulus;
use crate::{Error, Result};
use std::io::{Read, Write};
use std::path::Path;

const CACHE_MAGIC: &[u8; 8] = b"RACESV1\0";
const MAX_X: u64 = 100_000_000;

/// Prime counts per residue class at sorted checkpoints.
#[derive(Debug, Clone)]
pub struct SieveTable {
    q: u64,
    x_max: u64,
    /// Sorted, deduplicated checkpoint positions.
    checkpoints: Vec<u64>,
    /// Unit residues mod q, ascending; column order of `counts`.
    units: Vec<u64>,
    /// Row-major (checkpoint, unit) counts pi(x; q, a).
    counts: Vec<u32>,
    /// pi(x) at each checkpoint (all primes, including those dividing q).
    totals: Vec<u32>,
    /// #{p | q : p <= x} at each checkpoint.
    dividing: Vec<u32>,
}

impl SieveTable {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn x_max(&self) -> u64 {
        self.x_max
    }

    pub fn checkpoints(&self) -> &[u64] {
        &self.checkpoints
    }

    pub fn units(&self) -> &[u64] {
        &self.units
    }

    fn checkpoint_index(&self, x: u64) -> Result<usize> {
        self.checkpoints
            .binary_search(&x)
            .map_err(|_| Error::Empirical(format!("x = {x} is not a stored checkpoint")))
    }

    /// pi(x; q, a) at a stored checkpoint.
    pub fn count_at(&self, x: u64, a: u64) -> Result<u64> {
        let i = self.checkpoint_index(x)?;
        let j = self
            .units
            .binary_search(&(a % self.q))
            .map_err(|_| Error::NotCoprime { a, q: self.q })?;
        Ok(self.counts[i * self.units.len() + j] as u64)
    }

    /// pi(x) at a stored checkpoint.
    pub fn total_at(&self, x: u64) -> Result<u64> {
        Ok(self.totals[self.checkpoint_index(x)?] as u64)
    }

    /// The partition invariant sum_a pi(x;q,a) = pi(x) - #{p|q, p <= x}.
    pub fn partition_residual(&self, x: u64) -> Result<i64> {
        let i = self.checkpoint_index(x)?;
        let total: u64 = self.counts[i * self.units.len()..(i + 1) * self.units.len()]
            .iter()
            .map(|&c| c as u64)
            .sum();
        Ok(total as i64 - (self.totals[i] as i64 - self.dividing[i] as i64))
    }
}

/// Geometric checkpoints: n points from 2 to x_max, log-uniform, deduped.
pub fn default_checkpoints(x_max: u64, n: usize) -> Vec<u64> {
    let mut out: Vec<u64> = (0..n)
        .map(|i| {
            let f = i as f64 / (n - 1) as f64;
            let x = 2.0 * (x_max as f64 / 2.0).powf(f);
            (x.round() as u64).clamp(2, x_max)
        })
        .collect();
    out.dedup();
    out
}

/// Segmented sieve with exact per-residue counts at the checkpoints.
pub fn sieve(x_max: u64, m: &Modulus, checkpoints: &[u64]) -> Result<SieveTable> {
    if x_max < 100 {
        return Err(Error::Empirical(format!("x_max must be >= 100, got {x_max}")));
    }
    if x_max > MAX_X {
        return Err(Error::Empirical(format!(
            "x_max = {x_max} above the supported cap {MAX_X}"
        )));
    }
    let mut cps: Vec<u64> = checkpoints
        .iter()
        .copied()
        .filter(|&x| (2..=x_max).contains(&x))
        .collect();
    cps.sort_unstable();
    cps.dedup();
    if cps.is_empty() {
        return Err(Error::Empirical("no checkpoints within [2, x_max]".into()));
    }
    let q = m.q();
    let units: Vec<u64> = m.units().collect();
    let unit_index: Vec<Option<usize>> = (0..q)
        .map(|r| units.binary_search(&r).ok().or_else(|| {
            if r == 0 { units.binary_search(&q).ok() } else { None }
        }))
        .collect();

    // base primes up to sqrt(x_max)
    let root = (x_max as f64).sqrt() as u64 + 2;
    let mut base_is_comp = vec![false; (root + 1) as usize];
    let mut base_primes = Vec::new();
    for p in 2..=root {
        if !base_is_comp[p as usize] {
            base_primes.push(p);
            let mut m = p * p;
            while m <= root {
                base_is_comp[m as usize] = true;
                m += p;
            }
        }
    }

    let n_units = units.len();
    let mut counts_now = vec![0u32; n_units];
    let mut total_now = 0u32;
    let mut dividing_now = 0u32;
    let mut counts = Vec::with_capacity(cps.len() * n_units);
    let mut totals = Vec::with_capacity(cps.len());
    let mut dividing = Vec::with_capacity(cps.len());
    let mut next_cp = 0usize;

    let record_until = |p: u64,
                            counts_now: &[u32],
                            total_now: u32,
                            dividing_now: u32,
                            next_cp: &mut usize,
                            counts: &mut Vec<u32>,
                            totals: &mut Vec<u32>,
                            dividing: &mut Vec<u32>| {
        while *next_cp < cps.len() && cps[*next_cp] < p {
            counts.extend_from_slice(counts_now);
            totals.push(total_now);
            dividing.push(dividing_now);
            *next_cp += 1;
        }
    };

    let handle_prime = |p: u64,
                            counts_now: &mut [u32],
                            total_now: &mut u32,
                            dividing_now: &mut u32| {
        *total_now += 1;
        if q % p == 0 {
            *dividing_now += 1;
        } else if let Some(j) = unit_index[(p % q) as usize] {
            counts_now[j] += 1;
        }
    };

    // segmented sweep
    const SEG: u64 = 1 << 20;
    let mut lo = 2u64;
    let mut seg = vec![false; SEG as usize];
    while lo <= x_max {
        let hi = (lo + SEG - 1).min(x_max);
        let len = (hi - lo + 1) as usize;
        seg[..len].fill(false);
        for &p in &base_primes {
            if p * p > hi {
                break;
            }
            let mut start = p * p;
            if start < lo {
                start = lo.div_ceil(p) * p;
            }
            let mut k = start;
            while k <= hi {
                seg[(k - lo) as usize] = true;
                k += p;
            }
        }
        for off in 0..len {
            let n = lo + off as u64;
            if n < 2 || seg[off] {
                continue;
            }
            record_until(
                n,
                &counts_now,
                total_now,
                dividing_now,
                &mut next_cp,
                &mut counts,
                &mut totals,
                &mut dividing,
            );
            handle_prime(n, &mut counts_now, &mut total_now, &mut dividing_now);
        }
        lo = hi + 1;
    }
    // flush the remaining checkpoints
    record_until(
        x_max + 1,
        &counts_now,
        total_now,
        dividing_now,
        &mut next_cp,
        &mut counts,
        &mut totals,
        &mut dividing,
    );

    let table = SieveTable {
        q,
        x_max,
        checkpoints: cps,
        units,
        counts,
        totals,
        dividing,
    };
    // partition invariant at every checkpoint
    for &x in &table.checkpoints {
        let r = table.partition_residual(x)?;
        if r != 0 {
            return Err(Error::Empirical(format!(
                "partition invariant violated at x = {x}: residual {r}"
            )));
        }
    }
    Ok(table)
}

/// E(x;q,a) = (log x / sqrt x)(phi(q) pi(x;q,a) - pi(x)) for each residue.
pub fn e_vector(s: &SieveTable, x: u64, residues: &[u64]) -> Result<Vec<f64>> {
    let i = s.checkpoint_index(x)?;
    let phi = s.units.len() as f64;
    let total = s.totals[i] as f64;
    let norm = (x as f64).ln() / (x as f64).sqrt();
    residues
        .iter()
        .map(|&a| {
            let j = s
                .units
                .binary_search(&(a % s.q))
                .map_err(|_| Error::NotCoprime { a, q: s.q })?;
            let cnt = s.counts[i * s.units.len() + j] as f64;
            Ok(norm * (phi * cnt - total))
        })
        .collect()
}

/// Approximate the logarithmic average lim (1/log X) int_2^X f(E(x)) dx/x by
/// the mean of f over n_points log-uniform checkpoints.
pub fn log_measure_sample<F>(
    s: &SieveTable,
    residues: &[u64],
    f: F,
    n_points: usize,
) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    if n_points < 2 {
        return Err(Error::Empirical("need at least 2 sample points".into()));
    }
    let total = s.checkpoints.len();
    let n = n_points.min(total);
    let mut acc = 0.0;
    for k in 0..n {
        let idx = k * (total - 1) / (n - 1);
        let x = s.checkpoints[idx];
        let e = e_vector(s, x, residues)?;
        acc += f(&e);
    }
    Ok(acc / n as f64)
}

/// Tie policy for finite-x race indicators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RaceTies {
    /// Count only strict descents.
    Strict,
    /// Weight configurations that are descending up to ties by 1/2: the
    /// symmetric finite-x estimator of the (tie-free) limiting density.
    Half,
}

/// Indicator that the E-vector is in strictly descending order, with the
/// chosen tie policy.
pub fn race_indicator(e: &[f64], ties: RaceTies) -> f64 {
    let strict = e.windows(2).all(|w| w[0] > w[1]);
    if strict {
        return 1.0;
    }
    match ties {
        RaceTies::Strict => 0.0,
        RaceTies::Half => {
            let weak = e.windows(2).all(|w| w[0] >= w[1]);
            if weak {
                0.5
            } else {
                0.0
            }
        }
    }
}

/// Kolmogorov-Smirnov distance between a sample and a reference CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// Persist the table to a binary cache keyed by (x_max, q, format version).
pub fn write_cache<P: AsRef<Path>>(s: &SieveTable, path: P) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    w.write_all(CACHE_MAGIC)?;
    for v in [s.q, s.x_max, s.checkpoints.len() as u64, s.units.len() as u64] {
        w.write_all(&v.to_le_bytes())?;
    }
    for &c in &s.checkpoints {
        w.write_all(&c.to_le_bytes())?;
    }
    for &u in &s.units {
        w.write_all(&u.to_le_bytes())?;
    }
    for &c in &s.counts {
        w.write_all(&c.to_le_bytes())?;
    }
    for &t in &s.totals {
        w.write_all(&t.to_le_bytes())?;
    }
    for &d in &s.dividing {
        w.write_all(&d.to_le_bytes())?;
    }
    Ok(())
}

/// Load a cached table; verifies the key (x_max, q).
pub fn read_cache<P: AsRef<Path>>(path: P, q: u64, x_max: u64) -> Result<SieveTable> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != CACHE_MAGIC {
        return Err(Error::Empirical("bad sieve cache magic".into()));
    }
    let mut u64buf = [0u8; 8];
    let mut read_u64 = |r: &mut dyn Read| -> Result<u64> {
        r.read_exact(&mut u64buf)?;
        Ok(u64::from_le_bytes(u64buf))
    };
    let fq = read_u64(&mut r)?;
    let fx = read_u64(&mut r)?;
    if fq != q || fx != x_max {
        return Err(Error::Empirical(format!(
            "cache key mismatch: file has (q={fq}, x={fx}), wanted (q={q}, x={x_max})"
        )));
    }
    let ncp = read_u64(&mut r)? as usize;
    let nu = read_u64(&mut r)? as usize;
    let mut checkpoints = vec![0u64; ncp];
    for c in &mut checkpoints {
        *c = read_u64(&mut r)?;
    }
    let mut units = vec![0u64; nu];
    for u in &mut units {
        *u = read_u64(&mut r)?;
    }
    let mut u32buf = [0u8; 4];
    let mut read_u32 = |r: &mut dyn Read| -> Result<u32> {
        r.read_exact(&mut u32buf)?;
        Ok(u32::from_le_bytes(u32buf))
    };
    let mut counts = vec![0u32; ncp * nu];
    for c in &mut counts {
        *c = read_u32(&mut r)?;
    }
    let mut totals = vec![0u32; ncp];
    for t in &mut totals {
        *t = read_u32(&mut r)?;
    }
    let mut dividing = vec![0u32; ncp];
    for d in &mut dividing {
        *d = read_u32(&mut r)?;
    }
    Ok(SieveTable {
        q,
        x_max,
        checkpoints,
        units,
        counts,
        totals,
        dividing,
    })
}
