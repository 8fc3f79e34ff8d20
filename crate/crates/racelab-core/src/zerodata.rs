//! Zero-ordinate data: ingestion, synthetic generation, counting models,
//! and the covariance structure (V_q, B_q(a,b)) built from zero sums.
//!
//! A [`ZeroSet`] stores, per non-principal character, the sorted positive
//! ordinates of critical-line zeros up to a per-character horizon. Conjugate
//! characters carry independent lists: the positive ordinates of chi and of
//! chi-bar are genuinely distinct data. The principal character never
//! carries zeros.
//!
//! Canonical file format (text): a header line `# prime-race-zeros v1 q=<q>`
//! followed by data lines `<conrey_index> <gamma>`, ordinates ascending
//! within a character and characters in ascending Conrey order; ordinates
//! are written with 15 significant digits.

use crate::modchar::{c_coefficient, mod_inv, CharacterGroup, Modulus};
use crate::rng;
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

/// Where a zero set came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Ingested,
    Synthetic { seed: u64 },
    Computed,
}

/// Ordinates of one character.
#[derive(Debug, Clone, Default)]
pub struct CharZeros {
    pub ordinates: Vec<f64>,
    /// Largest t up to which the list is complete.
    pub horizon: f64,
}

/// Per-character sorted positive zero ordinates with provenance.
#[derive(Debug, Clone)]
pub struct ZeroSet {
    modulus: Modulus,
    entries: BTreeMap<u64, CharZeros>,
    provenance: Provenance,
}

impl ZeroSet {
    /// Empty set with an entry (horizon 0) for every non-principal character.
    pub fn empty(group: &CharacterGroup, provenance: Provenance) -> ZeroSet {
        let entries = group
            .non_principal()
            .map(|c| (c.conrey_index(), CharZeros::default()))
            .collect();
        ZeroSet {
            modulus: group.modulus().clone(),
            entries,
            provenance,
        }
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn ordinates(&self, conrey: u64) -> Option<&[f64]> {
        self.entries.get(&conrey).map(|c| c.ordinates.as_slice())
    }

    pub fn chars(&self) -> impl Iterator<Item = (u64, &CharZeros)> {
        self.entries.iter().map(|(&k, v)| (k, v))
    }

    pub fn total_count(&self) -> usize {
        self.entries.values().map(|c| c.ordinates.len()).sum()
    }

    /// Smallest per-character horizon.
    pub fn horizon_min(&self) -> f64 {
        self.entries
            .values()
            .map(|c| c.horizon)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_empty(&self) -> bool {
        self.total_count() == 0
    }

    /// Insert a complete, validated list for one character (ascending).
    pub fn set_char(&mut self, conrey: u64, ordinates: Vec<f64>, horizon: f64) -> Result<()> {
        validate_ascending_positive(&ordinates, conrey)?;
        if !self.entries.contains_key(&conrey) {
            return Err(Error::ZeroData(format!(
                "character {conrey} is not a non-principal character mod {}",
                self.modulus.q()
            )));
        }
        self.entries
            .insert(conrey, CharZeros { ordinates, horizon });
        Ok(())
    }

    /// Copy restricted to ordinates <= t_max (horizons clipped accordingly).
    pub fn truncated(&self, t_max: f64) -> ZeroSet {
        let entries = self
            .entries
            .iter()
            .map(|(&conrey, cz)| {
                let ordinates: Vec<f64> = cz
                    .ordinates
                    .iter()
                    .copied()
                    .filter(|&g| g <= t_max)
                    .collect();
                (
                    conrey,
                    CharZeros {
                        ordinates,
                        horizon: cz.horizon.min(t_max),
                    },
                )
            })
            .collect();
        ZeroSet {
            modulus: self.modulus.clone(),
            entries,
            provenance: self.provenance.clone(),
        }
    }

    /// Flattened weights w = sqrt(1/4 + gamma^2) over all stored ordinates,
    /// in deterministic order (ascending Conrey, ascending ordinate).
    pub fn flat_weights(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.total_count());
        for cz in self.entries.values() {
            out.extend(cz.ordinates.iter().map(|&g| (0.25 + g * g).sqrt()));
        }
        out
    }

    /// Like `flat_weights` but paired with the owning Conrey index.
    pub fn flat_weights_with_char(&self) -> Vec<(u64, f64)> {
        let mut out = Vec::with_capacity(self.total_count());
        for (&conrey, cz) in &self.entries {
            out.extend(
                cz.ordinates
                    .iter()
                    .map(move |&g| (conrey, (0.25 + g * g).sqrt())),
            );
        }
        out
    }
}

fn validate_ascending_positive(ordinates: &[f64], conrey: u64) -> Result<()> {
    let mut prev = 0.0f64;
    for &g in ordinates {
        if g <= 0.0 || !g.is_finite() {
            return Err(Error::ZeroData(format!(
                "character {conrey}: ordinate {g} is not positive"
            )));
        }
        if g == prev {
            return Err(Error::ZeroData(format!(
                "character {conrey}: duplicate ordinate {g} (zeros are simple)"
            )));
        }
        if g < prev {
            return Err(Error::ZeroData(format!(
                "character {conrey}: ordinates not increasing at {g}"
            )));
        }
        prev = g;
    }
    Ok(())
}

/// Read a zero set from the canonical text format.
pub fn ingest_zeros<P: AsRef<Path>>(path: P, group: &CharacterGroup) -> Result<ZeroSet> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    ingest_zeros_reader(reader, group)
}

pub fn ingest_zeros_reader<R: BufRead>(reader: R, group: &CharacterGroup) -> Result<ZeroSet> {
    let q = group.modulus().q();
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::ZeroFileParse {
            line: 1,
            msg: "empty file: missing header".into(),
        })?
        .map_err(Error::Io)?;
    let expect = format!("# prime-race-zeros v1 q={q}");
    if header.trim() != expect {
        return Err(Error::ZeroFileParse {
            line: 1,
            msg: format!("bad header {header:?}, expected {expect:?}"),
        });
    }
    let mut zs = ZeroSet::empty(group, Provenance::Ingested);
    let mut current: Option<(u64, Vec<f64>)> = None;
    let mut last_conrey = 0u64;
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line.map_err(Error::Io)?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut it = trimmed.split_whitespace();
        let conrey: u64 = it
            .next()
            .unwrap()
            .parse()
            .map_err(|e| Error::ZeroFileParse {
                line: lineno,
                msg: format!("bad character index: {e}"),
            })?;
        let gamma: f64 = it
            .next()
            .ok_or_else(|| Error::ZeroFileParse {
                line: lineno,
                msg: "missing ordinate".into(),
            })?
            .parse()
            .map_err(|e| Error::ZeroFileParse {
                line: lineno,
                msg: format!("bad ordinate: {e}"),
            })?;
        if it.next().is_some() {
            return Err(Error::ZeroFileParse {
                line: lineno,
                msg: "trailing fields".into(),
            });
        }
        match group.by_conrey(conrey) {
            None => {
                return Err(Error::ZeroData(format!(
                    "line {lineno}: character {conrey} does not exist mod {q}"
                )))
            }
            Some(c) if c.is_principal() => {
                return Err(Error::ZeroData(format!(
                    "line {lineno}: principal character carries no zeros"
                )))
            }
            Some(_) => {}
        }
        match &mut current {
            Some((cur, list)) if *cur == conrey => list.push(gamma),
            _ => {
                if let Some((cur, list)) = current.take() {
                    let horizon = list.last().copied().unwrap_or(0.0);
                    zs.set_char(cur, list, horizon)?;
                }
                if conrey <= last_conrey {
                    return Err(Error::ZeroFileParse {
                        line: lineno,
                        msg: format!("characters out of ascending Conrey order at {conrey}"),
                    });
                }
                last_conrey = conrey;
                current = Some((conrey, vec![gamma]));
            }
        }
    }
    if let Some((cur, list)) = current.take() {
        let horizon = list.last().copied().unwrap_or(0.0);
        zs.set_char(cur, list, horizon)?;
    }
    Ok(zs)
}

/// Write the canonical text format (15 significant digits).
pub fn write_zeros<P: AsRef<Path>>(zs: &ZeroSet, path: P) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    write_zeros_writer(zs, &mut w)
}

pub fn write_zeros_writer<W: Write>(zs: &ZeroSet, w: &mut W) -> Result<()> {
    writeln!(w, "# prime-race-zeros v1 q={}", zs.modulus.q())?;
    for (conrey, cz) in zs.chars() {
        for &g in &cz.ordinates {
            writeln!(w, "{conrey} {g:.14e}")?;
        }
    }
    Ok(())
}

/// Smooth per-character counting model N_chi(t) = (t/2pi) log(q* t / 2 pi e).
pub fn smooth_count(conductor: u64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    t / TAU * (conductor as f64 * t / (TAU * std::f64::consts::E)).ln()
}

/// Generate an LI-consistent synthetic zero set up to horizon T.
///
/// The k-th zero of chi solves N_chi(t) = k - U_k with U_k independent
/// uniforms on (0,1): counting statistics match the smooth model while
/// placements stay independent across characters (and across a conjugate
/// pair, whose positive ordinates are independent data).
pub fn synth_zeros(group: &CharacterGroup, t_max: f64, seed: u64) -> Result<ZeroSet> {
    if t_max < 2.0 {
        return Err(Error::ZeroData(format!(
            "synth_zeros needs T >= 2, got {t_max}"
        )));
    }
    let mut zs = ZeroSet::empty(group, Provenance::Synthetic { seed });
    let chars: Vec<(u64, u64)> = group
        .non_principal()
        .map(|c| (c.conrey_index(), c.conductor()))
        .collect();
    let generated: Vec<(u64, Vec<f64>)> = chars
        .par_iter()
        .map(|&(conrey, conductor)| {
            let mut list = Vec::new();
            let mut k = 1u64;
            let mut t_prev = 0.0f64;
            loop {
                let u = rng::u01(seed, conrey, k);
                let target = k as f64 - u;
                let t = invert_smooth_count(conductor, target, t_prev);
                if t > t_max {
                    break;
                }
                list.push(t);
                t_prev = t;
                k += 1;
            }
            (conrey, list)
        })
        .collect();
    for (conrey, list) in generated {
        zs.set_char(conrey, list, t_max)?;
    }
    Ok(zs)
}

/// Solve N_chi(t) = y (y > 0) on the increasing branch.
fn invert_smooth_count(conductor: u64, y: f64, hint: f64) -> f64 {
    let c = conductor as f64 / (TAU * std::f64::consts::E);
    // N vanishes at t0 = 1/c and increases beyond it
    let t_floor = 1.0 / c;
    let mut t = hint.max(t_floor * 1.5).max(1.0);
    for _ in 0..80 {
        let n = t / TAU * (c * t).ln();
        let d = ((c * t * std::f64::consts::E).ln() / TAU).max(1e-12);
        let mut step = (n - y) / d;
        if step.abs() > 0.5 * t {
            step = 0.5 * t * step.signum();
        }
        let next = (t - step).max(t_floor * (1.0 + 1e-12));
        if (next - t).abs() <= 1e-13 * t.abs() {
            return next;
        }
        t = next;
    }
    t
}

/// Exact count of stored ordinates below T over all non-principal characters.
pub fn count_zeros(zs: &ZeroSet, t: f64) -> Result<u64> {
    let h = zs.horizon_min();
    if t > h {
        return Err(Error::HorizonExceeded {
            requested: t,
            horizon: h,
        });
    }
    Ok(zs
        .entries
        .values()
        .map(|cz| cz.ordinates.partition_point(|&g| g < t) as u64)
        .sum())
}

/// Aggregated counting model and its linear coefficient R(q).
#[derive(Debug, Clone, Copy)]
pub struct NqModel {
    /// (phi(q)-1)/2pi T log T + R(q)/2pi T
    pub main: f64,
    pub r_q: f64,
}

/// N_q(T) model with R(q) = phi(q)(log q - sum_p log p/(p-1))
/// - (phi(q)-1)(log 2pi + 1).
pub fn nq_model(m: &Modulus, t: f64) -> NqModel {
    let phi = m.totient() as f64;
    let r_q = phi * ((m.q() as f64).ln() - m.prime_log_sum()) - (phi - 1.0) * (TAU.ln() + 1.0);
    let main = (phi - 1.0) / TAU * t * t.ln() + r_q / TAU * t;
    NqModel { main, r_q }
}

/// The zero-sum functionals: count, S1 (reciprocal square roots up to T),
/// S2 (reciprocal squares beyond T, optionally completed analytically).
#[derive(Debug, Clone, Copy)]
pub struct SpectralSums {
    pub n_qt: u64,
    pub r_q: f64,
    /// sum over 0 < gamma <= T of (1/4 + gamma^2)^{-1/2}
    pub s1: f64,
    /// sum over gamma > T of (1/4 + gamma^2)^{-1}
    pub s2: f64,
    pub tail_completed: bool,
}

/// Analytic completion of the S2 tail beyond height h: phi(q) log q/(2 pi h).
pub fn s2_completion(m: &Modulus, h: f64) -> f64 {
    m.totient() as f64 * (m.q() as f64).ln() / (TAU * h)
}

pub fn spectral_sums(zs: &ZeroSet, t: f64, complete_tail: bool) -> Result<SpectralSums> {
    let h = zs.horizon_min();
    if !complete_tail && t > h {
        return Err(Error::HorizonExceeded {
            requested: t,
            horizon: h,
        });
    }
    let mut n_qt = 0u64;
    let mut s1 = 0.0f64;
    let mut s2 = 0.0f64;
    for cz in zs.entries.values() {
        for &g in &cz.ordinates {
            let w2 = 0.25 + g * g;
            if g <= t {
                n_qt += 1;
                s1 += 1.0 / w2.sqrt();
            } else {
                s2 += 1.0 / w2;
            }
        }
    }
    if complete_tail {
        s2 += s2_completion(&zs.modulus, t.max(h).max(1.0));
    }
    Ok(SpectralSums {
        n_qt,
        r_q: nq_model(&zs.modulus, t.max(2.0)).r_q,
        s1,
        s2,
        tail_completed: complete_tail,
    })
}

/// Variance of the race model and comparison data.
#[derive(Debug, Clone, Copy)]
pub struct VarianceReport {
    /// 2 sum over stored positive ordinates of (1/4+gamma^2)^{-1}, plus the
    /// analytic completion when requested.
    pub value: f64,
    pub stored: f64,
    pub completion: f64,
    /// phi(q)(log q - sum_{p|q} log p/(p-1)) for comparison.
    pub asymptotic_proxy: f64,
}

/// V_q = 2 sum_{chi != chi0} sum_{gamma > 0} (1/4 + gamma^2)^{-1}.
pub fn variance_vq(zs: &ZeroSet, complete_tail: bool) -> VarianceReport {
    let stored: f64 = zs
        .entries
        .values()
        .map(|cz| {
            cz.ordinates
                .iter()
                .map(|&g| 1.0 / (0.25 + g * g))
                .sum::<f64>()
        })
        .sum::<f64>()
        * 2.0;
    let h = zs.horizon_min();
    let completion = if complete_tail && h.is_finite() && h > 0.0 {
        2.0 * s2_completion(&zs.modulus, h)
    } else {
        0.0
    };
    let m = &zs.modulus;
    VarianceReport {
        value: stored + completion,
        stored,
        completion,
        asymptotic_proxy: m.totient() as f64 * ((m.q() as f64).ln() - m.prime_log_sum()),
    }
}

/// B_q(a,b) = sum_{chi != chi0} sum_{gamma > 0} (chi(b/a) + chi(a/b)) / (1/4 + gamma^2).
///
/// The summand is self-conjugate under the chi <-> chi-bar pairing, so the
/// accumulated imaginary part must vanish; it is checked before discarding.
pub fn b_coefficient(zs: &ZeroSet, group: &CharacterGroup, a: u64, b: u64) -> Result<f64> {
    let q = group.modulus().q();
    let (a, b) = (a % q, b % q);
    if !group.modulus().is_unit(a) {
        return Err(Error::NotCoprime { a, q });
    }
    if !group.modulus().is_unit(b) {
        return Err(Error::NotCoprime { a: b, q });
    }
    if a == b {
        return Err(Error::ZeroData(
            "b_coefficient needs a != b (a = b is the variance, not a covariance)".into(),
        ));
    }
    let ratio = (b as u128 * mod_inv(a, q) as u128 % q as u128) as u64;
    let ratio_inv = mod_inv(ratio, q);
    let mut acc = Complex64::new(0.0, 0.0);
    for (conrey, cz) in zs.chars() {
        if cz.ordinates.is_empty() {
            continue;
        }
        let chi = group
            .by_conrey(conrey)
            .ok_or_else(|| Error::ZeroData(format!("unknown character {conrey}")))?;
        let weight: f64 = cz.ordinates.iter().map(|&g| 1.0 / (0.25 + g * g)).sum();
        acc += (chi.eval_c64(ratio) + chi.eval_c64(ratio_inv)) * weight;
    }
    debug_assert!(
        acc.im.abs() < 1e-10 * acc.re.abs().max(1.0),
        "imaginary residue {} in B_q({a},{b})",
        acc.im
    );
    Ok(acc.re)
}

/// The covariance structure of the race vector for an ordered residue tuple.
#[derive(Debug, Clone)]
pub struct CovarianceData {
    pub residues: Vec<u64>,
    pub c_vector: Vec<i64>,
    /// V_q over the stored ordinates (no tail completion, so diagonal and
    /// off-diagonal entries sum over the same zero population).
    pub variance: f64,
    /// Row-major symmetric r x r matrix, V_q on the diagonal.
    pub b_matrix: Vec<f64>,
}

impl CovarianceData {
    pub fn r(&self) -> usize {
        self.residues.len()
    }

    pub fn b(&self, j: usize, k: usize) -> f64 {
        self.b_matrix[j * self.residues.len() + k]
    }
}

/// Assemble C_q(a_j), V_q and the B matrix for distinct units a_1..a_r.
pub fn covariance_data(
    zs: &ZeroSet,
    group: &CharacterGroup,
    residues: &[u64],
) -> Result<CovarianceData> {
    let m = group.modulus();
    let r = residues.len();
    if r < 2 || r as u64 > m.totient() {
        return Err(Error::ZeroData(format!(
            "need 2 <= r <= phi(q) residues, got {r}"
        )));
    }
    for (i, &a) in residues.iter().enumerate() {
        if !m.is_unit(a) {
            return Err(Error::NotCoprime { a, q: m.q() });
        }
        if residues[..i].iter().any(|&x| x % m.q() == a % m.q()) {
            return Err(Error::ZeroData(format!("repeated residue {a}")));
        }
    }
    let c_vector = residues
        .iter()
        .map(|&a| c_coefficient(m, a))
        .collect::<Result<Vec<_>>>()?;
    let variance = variance_vq(zs, false).value;
    let mut b_matrix = vec![0.0; r * r];
    for j in 0..r {
        b_matrix[j * r + j] = variance;
        for k in (j + 1)..r {
            let v = b_coefficient(zs, group, residues[j], residues[k])?;
            b_matrix[j * r + k] = v;
            b_matrix[k * r + j] = v;
        }
    }
    Ok(CovarianceData {
        residues: residues.to_vec(),
        c_vector,
        variance,
        b_matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modchar::{build_modulus, character_group};

    fn group(q: u64) -> CharacterGroup {
        character_group(&build_modulus(q).unwrap()).unwrap()
    }

    #[test]
    fn ingest_well_formed() {
        let g = group(4);
        let data = "# prime-race-zeros v1 q=4\n3 6.0209489\n3 10.2437703\n3 12.9880957\n";
        let zs = ingest_zeros_reader(std::io::Cursor::new(data), &g).unwrap();
        assert_eq!(zs.total_count(), 3);
        assert_eq!(zs.ordinates(3).unwrap().len(), 3);
        assert_eq!(zs.horizon_min(), 12.9880957);
    }

    #[test]
    fn ingest_rejects_duplicates_and_disorder() {
        let g = group(4);
        let dup = "# prime-race-zeros v1 q=4\n3 6.0209489\n3 6.0209489\n";
        assert!(matches!(
            ingest_zeros_reader(std::io::Cursor::new(dup), &g),
            Err(Error::ZeroData(_))
        ));
        let dec = "# prime-race-zeros v1 q=4\n3 6.1\n3 6.0\n";
        assert!(ingest_zeros_reader(std::io::Cursor::new(dec), &g).is_err());
        let bad = "# prime-race-zeros v1 q=4\n3 abc\n";
        assert!(matches!(
            ingest_zeros_reader(std::io::Cursor::new(bad), &g),
            Err(Error::ZeroFileParse { line: 2, .. })
        ));
        let unknown = "# prime-race-zeros v1 q=4\n2 6.0\n";
        assert!(ingest_zeros_reader(std::io::Cursor::new(unknown), &g).is_err());
    }

    #[test]
    fn ingest_empty_file() {
        let g = group(4);
        let zs =
            ingest_zeros_reader(std::io::Cursor::new("# prime-race-zeros v1 q=4\n"), &g).unwrap();
        assert!(zs.is_empty());
        assert_eq!(zs.horizon_min(), 0.0);
    }

    #[test]
    fn roundtrip_is_byte_stable() {
        let g = group(12);
        let zs = synth_zeros(&g, 50.0, 99).unwrap();
        let mut buf1 = Vec::new();
        write_zeros_writer(&zs, &mut buf1).unwrap();
        let re = ingest_zeros_reader(std::io::Cursor::new(&buf1), &g).unwrap();
        let mut buf2 = Vec::new();
        write_zeros_writer(&re, &mut buf2).unwrap();
        assert_eq!(buf1, buf2);
    }

    #[test]
    fn synth_counts_match_model() {
        let g = group(101);
        let t = 1000.0;
        let zs = synth_zeros(&g, t, 7).unwrap();
        for (conrey, cz) in zs.chars() {
            let cond = g.by_conrey(conrey).unwrap().conductor();
            let model = smooth_count(cond, t);
            let n = cz.ordinates.len() as f64;
            assert!(
                (n - model).abs() <= 0.05 * model + 3.0,
                "conrey={conrey} n={n} model={model}"
            );
        }
        // determinism
        let zs2 = synth_zeros(&g, t, 7).unwrap();
        assert_eq!(zs.ordinates(2).unwrap(), zs2.ordinates(2).unwrap());
        let zs3 = synth_zeros(&g, t, 8).unwrap();
        assert_ne!(zs.ordinates(2).unwrap(), zs3.ordinates(2).unwrap());
    }

    #[test]
    fn synth_small_horizon_near_empty() {
        let g = group(3);
        let zs = synth_zeros(&g, 2.0, 1).unwrap();
        // N_chi(2) < 1 for conductor 3
        assert!(zs.total_count() <= 1);
        assert!(synth_zeros(&g, 1.0, 1).is_err());
    }

    #[test]
    fn count_zeros_against_scan() {
        let g = group(101);
        let zs = synth_zeros(&g, 600.0, 3).unwrap();
        let t = 500.0;
        let expected: u64 = zs
            .chars()
            .map(|(_, cz)| cz.ordinates.iter().filter(|&&x| x < t).count() as u64)
            .sum();
        assert_eq!(count_zeros(&zs, t).unwrap(), expected);
        assert_eq!(count_zeros(&zs, 600.0).unwrap(), zs.total_count() as u64);
        assert!(count_zeros(&zs, 601.0).is_err());
        // T below the first ordinate
        assert_eq!(count_zeros(&zs, 1e-3).unwrap(), 0);
    }

    #[test]
    fn nq_model_examples() {
        let m = build_modulus(5).unwrap();
        let nm = nq_model(&m, 100.0);
        assert!((nm.r_q - (-3.68532)).abs() < 1e-4, "r_q={}", nm.r_q);
        let expect = 3.0 / TAU * 100.0 * 100.0f64.ln() + nm.r_q / TAU * 100.0;
        assert!((nm.main - expect).abs() < 1e-9);
        assert!((nm.main - 161.23).abs() < 0.01);
        // coefficient read-off for phi(q) = 2
        let m4 = build_modulus(4).unwrap();
        let a = nq_model(&m4, 100.0).main - nq_model(&m4, 100.0).r_q / TAU * 100.0;
        assert!((a - 100.0 * 100.0f64.ln() / TAU).abs() < 1e-9);
    }

    #[test]
    fn synthetic_count_tracks_nq_model() {
        for q in [101u64, 1009] {
            let g = group(q);
            let zs = synth_zeros(&g, 300.0, 5).unwrap();
            for t in [100.0f64, 200.0, 300.0] {
                let n = count_zeros(&zs, t).unwrap() as f64;
                let model = nq_model(zs.modulus(), t).main;
                assert!(
                    (n - model).abs() / model <= 0.05,
                    "q={q} t={t} n={n} model={model}"
                );
            }
        }
    }

    #[test]
    fn spectral_sums_basics() {
        let g = group(4);
        let empty = ZeroSet::empty(&g, Provenance::Ingested);
        let s = spectral_sums(&empty, 0.0, false).unwrap();
        assert_eq!(s.s1, 0.0);
        assert_eq!(s.s2, 0.0);
        assert_eq!(s.n_qt, 0);

        let zs = synth_zeros(&g, 100.0, 2).unwrap();
        let s = spectral_sums(&zs, 50.0, false).unwrap();
        assert!(s.s1 > 0.0 && s.s2 > 0.0);
        // monotonicity in T
        let s2 = spectral_sums(&zs, 80.0, false).unwrap();
        assert!(s2.s1 >= s.s1 && s2.s2 <= s.s2);
    }

    #[test]
    fn s2_tail_matches_completion_scale() {
        // The analytic completion phi(q) log q/(2 pi T) is the T log T << log q
        // regime of the tail; test it there (large q, small T). The stored
        // tail only reaches the horizon, so compare completion differences.
        let g = group(10_007);
        let zs = synth_zeros(&g, 100.0, 11).unwrap();
        let t = 10.0;
        let stored_tail = spectral_sums(&zs, t, false).unwrap().s2;
        let expected = s2_completion(zs.modulus(), t) - s2_completion(zs.modulus(), 100.0);
        assert!(
            (stored_tail - expected).abs() <= 0.30 * expected,
            "stored={stored_tail} expected={expected}"
        );
    }

    #[test]
    fn variance_single_zero_example() {
        let g = group(4);
        let mut zs = ZeroSet::empty(&g, Provenance::Ingested);
        zs.set_char(3, vec![6.0209489], 6.0209489).unwrap();
        let v = variance_vq(&zs, false);
        let expect = 2.0 / (0.25 + 6.0209489f64 * 6.0209489);
        assert!((v.value - expect).abs() < 1e-15);
        assert!((v.value - 0.0547917).abs() < 1e-6);
        // empty set, no completion -> 0
        let empty = ZeroSet::empty(&g, Provenance::Ingested);
        assert_eq!(variance_vq(&empty, false).value, 0.0);
    }

    #[test]
    fn variance_matches_model_expectation() {
        // Under the synthetic placement N_chi(t) = k - U_k the expected
        // weighted sum is exactly the integral of the weight against dN_chi:
        // E sum_{gamma <= T} w(gamma) = int_{t0}^{T} w(t) N'_chi(t) dt.
        let g = group(101);
        let t_max = 10_000.0;
        let zs = synth_zeros(&g, t_max, 13).unwrap();
        let v = variance_vq(&zs, true);
        let spec = crate::specfun::QuadratureSpec {
            abs_tol: 1e-10,
            ..Default::default()
        };
        let mut expected = 0.0;
        for chi in g.non_principal() {
            let c = chi.conductor() as f64 / TAU;
            let t0 = std::f64::consts::E / c;
            expected += 2.0
                * crate::specfun::integrate(
                    &|t: f64| (c * t).ln() / (TAU * (0.25 + t * t)),
                    t0,
                    t_max,
                    &spec,
                )
                .unwrap();
        }
        // the per-character first zero dominates the variance of the stored
        // sum: SD is ~8% of the total for 99 characters, so allow ~2 SD
        assert!(
            (v.stored - expected).abs() <= 0.15 * expected,
            "stored={} model={expected}",
            v.stored
        );
        assert!(v.completion > 0.0 && v.completion < 0.01 * v.value);
        // Known bias of the smooth-count model: it omits roughly
        // phi(q) log(4 pi) of low-ordinate weight relative to phi(q) log q.
        let gap = v.asymptotic_proxy - v.value;
        let predicted_gap = zs.modulus().totient() as f64 * (4.0 * std::f64::consts::PI).ln();
        assert!(
            (gap - predicted_gap).abs() <= 0.2 * predicted_gap,
            "gap={gap} predicted={predicted_gap}"
        );
    }

    #[test]
    fn b_coefficient_sign_and_value() {
        let g = group(4);
        let mut zs = ZeroSet::empty(&g, Provenance::Ingested);
        zs.set_char(3, vec![6.0209489], 6.0209489).unwrap();
        // chi(3) = -1 for the only non-principal character mod 4
        let b = b_coefficient(&zs, &g, 1, 3).unwrap();
        let expect = -2.0 / (0.25 + 6.0209489f64 * 6.0209489);
        assert!((b - expect).abs() < 1e-15, "b={b}");
        assert!(b_coefficient(&zs, &g, 3, 3).is_err());
        assert!(b_coefficient(&zs, &g, 2, 3).is_err());
    }

    #[test]
    fn b_symmetric_and_bounded() {
        let g = group(101);
        let zs = synth_zeros(&g, 200.0, 17).unwrap();
        let v = variance_vq(&zs, false).value;
        let mut rng = crate::rng::CounterRng::new(23, 0);
        for _ in 0..50 {
            let a = 1 + rng.next_u64() % 100;
            let b = 1 + rng.next_u64() % 100;
            if a == b {
                continue;
            }
            let ab = b_coefficient(&zs, &g, a, b).unwrap();
            let ba = b_coefficient(&zs, &g, b, a).unwrap();
            assert!((ab - ba).abs() < 1e-12);
            assert!(ab.abs() <= v * (1.0 + 1e-12), "|B|={} V={v}", ab.abs());
        }
    }

    #[test]
    fn covariance_assembly() {
        let g = group(4);
        let zs = synth_zeros(&g, 100.0, 3).unwrap();
        let cov = covariance_data(&zs, &g, &[1, 3]).unwrap();
        assert_eq!(cov.r(), 2);
        assert_eq!(cov.c_vector, vec![1, -1]);
        assert_eq!(cov.b(0, 0), cov.variance);
        assert_eq!(cov.b(0, 1), cov.b(1, 0));
        assert!(cov.b(0, 1).abs() <= cov.variance);
        assert!(covariance_data(&zs, &g, &[1, 1]).is_err());
        assert!(covariance_data(&zs, &g, &[1]).is_err());
    }

    #[test]
    fn s1_bracketing_large_q() {
        // loose desk-scale check of the S1 envelope at q = 10^4 + 7, T = 10^3
        let g = group(10_007);
        let zs = synth_zeros(&g, 1000.0, 41).unwrap();
        let s = spectral_sums(&zs, 1000.0, false).unwrap();
        let m = zs.modulus();
        let scale = m.totient() as f64 * (m.q() as f64).ln() * 1000.0f64.ln();
        assert!(
            s.s1 >= scale / 20.0 && s.s1 <= 3.0 * scale,
            "s1={} scale={scale}",
            s.s1
        );
    }
}
