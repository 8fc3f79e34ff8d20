//! Direct computation of critical-line zero ordinates of Dirichlet
//! L-functions for small conductors (q <= 50, t <= 2000).
//!
//! Evaluation: L(s, chi) = q^{-s} sum_a chi(a) zeta(s, a/q) with each
//! Hurwitz zeta computed by Euler-Maclaurin (error estimated from the first
//! omitted correction term). Zero location: for every primitive chi the
//! rotated completed function
//! `Z(t) = Re[ e^{i theta(t)} L(1/2 + it, chi) ]`,
//! `theta(t) = (t/2) log(q/pi) + Im log Gamma((1/2 + a + it)/2) - arg(eps)/2`,
//! is real-valued on the line (functional equation plus Schwarz reflection),
//! for complex characters just as for real ones, so sign-change bisection
//! applies uniformly. Zeros of Z at negative t are the positive ordinates of
//! the conjugate character. The count against the smooth model N_chi(T) +- 2
//! guards against missed zeros.

use crate::modchar::{character_group, mod_inv, CharacterGroup, DirichletCharacter, Modulus};
use crate::specfun::ln_gamma_complex;
use crate::zerodata::{smooth_count, Provenance, ZeroSet};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};

const MAX_T: f64 = 2000.0;
const MAX_Q: u64 = 50;

/// B_{2k}/(2k)! for k = 1..=16.
fn bern_over_fact() -> &'static [f64; 16] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<[f64; 16]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let b: [(f64, f64); 16] = [
            (1.0, 6.0),
            (-1.0, 30.0),
            (1.0, 42.0),
            (-1.0, 30.0),
            (5.0, 66.0),
            (-691.0, 2730.0),
            (7.0, 6.0),
            (-3617.0, 510.0),
            (43867.0, 798.0),
            (-174611.0, 330.0),
            (854513.0, 138.0),
            (-236364091.0, 2730.0),
            (8553103.0, 6.0),
            (-23749461029.0, 870.0),
            (8615841276005.0, 14322.0),
            (-7709321041217.0, 510.0),
        ];
        let mut out = [0.0; 16];
        let mut fact = 1.0f64;
        for (k, item) in out.iter_mut().enumerate() {
            let two_k = 2 * (k + 1);
            fact *= (two_k - 1) as f64 * two_k as f64;
            *item = b[k].0 / b[k].1 / fact;
        }
        out
    })
}

/// Hurwitz zeta(s, x) for s = 1/2 + it by Euler-Maclaurin with N main terms
/// and 16 correction terms. Returns (value, error estimate).
fn hurwitz_zeta_em(t: f64, x: f64, n_terms: usize) -> (Complex64, f64) {
    let s = Complex64::new(0.5, t);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..n_terms {
        let base = n as f64 + x;
        let l = base.ln();
        sum += Complex64::from_polar(1.0 / base.sqrt(), -t * l);
    }
    let nx = n_terms as f64 + x;
    let lnx = nx.ln();
    // (N+x)^{1-s}/(s-1)
    let pow_1ms = Complex64::from_polar(nx.sqrt(), -t * lnx);
    sum += pow_1ms / (s - 1.0);
    // (N+x)^{-s}/2
    let pow_ms = Complex64::from_polar(1.0 / nx.sqrt(), -t * lnx);
    sum += 0.5 * pow_ms;
    // correction terms: B_{2k}/(2k)! (s)_{2k-1} (N+x)^{-s-2k+1}
    let table = bern_over_fact();
    let mut poch = s; // (s)_1
    let mut power = pow_ms * nx; // (N+x)^{-s+1}
    let inv_nx2 = 1.0 / (nx * nx);
    let mut last_mag = 0.0f64;
    for (k, &c) in table.iter().enumerate() {
        power *= inv_nx2; // (N+x)^{-s-2k+1}
        let term = c * poch * power;
        sum += term;
        last_mag = term.norm();
        // extend the Pochhammer product to (s)_{2k+1}
        let base = 2.0 * (k as f64 + 1.0);
        poch *= (s + (base - 1.0)) * (s + base);
    }
    // remainder estimate: next-term magnitude times a safety factor
    let next = (bern_over_fact()[15].abs() * poch.norm() * power.norm() * inv_nx2)
        .max(last_mag * (s.norm() / nx) * (s.norm() / nx));
    (sum, next * 2.0)
}

/// A point evaluation of L(1/2 + it, chi) with an error estimate.
#[derive(Debug, Clone, Copy)]
pub struct CriticalLineEvaluation {
    pub t: f64,
    pub value: Complex64,
    pub est_abs_error: f64,
}

fn check_l_preconditions(chi: &DirichletCharacter, t: f64, tol: f64) -> Result<()> {
    if chi.is_principal() {
        return Err(Error::LFunction(
            "principal character rejected (no L-zeros modeled)".into(),
        ));
    }
    if !chi.is_primitive() {
        return Err(Error::LFunction(format!(
            "character {} mod {} is not primitive (conductor {}); induce from the \
             primitive first",
            chi.conrey_index(),
            chi.modulus().q(),
            chi.conductor()
        )));
    }
    if chi.modulus().q() > MAX_Q {
        return Err(Error::LFunction(format!(
            "conductor {} above the supported bound {MAX_Q}",
            chi.modulus().q()
        )));
    }
    if t.abs() > MAX_T {
        return Err(Error::LFunction(format!(
            "|t| = {} above the supported bound {MAX_T}",
            t.abs()
        )));
    }
    if tol < 1e-10 {
        return Err(Error::LFunction(format!(
            "tolerance {tol} below the supported floor 1e-10"
        )));
    }
    Ok(())
}

fn n_terms_for(t: f64) -> usize {
    (t.abs() / 2.5).ceil() as usize + 24
}

/// Evaluate L(1/2 + it, chi) for a non-principal primitive character by the
/// Euler-Maclaurin accelerated Hurwitz decomposition.
pub fn l_value(chi: &DirichletCharacter, t: f64, tol: f64) -> Result<CriticalLineEvaluation> {
    check_l_preconditions(chi, t, tol)?;
    let q = chi.modulus().q();
    let mut n_terms = n_terms_for(t);
    for _ in 0..4 {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut err = 0.0f64;
        for a in 1..=q {
            let cv = chi.eval_c64(a);
            if cv == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (z, e) = hurwitz_zeta_em(t, a as f64 / q as f64, n_terms);
            sum += cv * z;
            err += e;
        }
        // q^{-s} factor
        let lq = (q as f64).ln();
        let qs = Complex64::from_polar(1.0 / (q as f64).sqrt(), -t * lq);
        let value = qs * sum;
        let est_abs_error = err / (q as f64).sqrt();
        if est_abs_error <= tol {
            return Ok(CriticalLineEvaluation {
                t,
                value,
                est_abs_error,
            });
        }
        n_terms = (n_terms as f64 * 1.6) as usize + 8;
        if n_terms > 6000 {
            break;
        }
    }
    Err(Error::Convergence {
        context: format!(
            "l_value(chi_{} mod {q}, t={t}) did not reach tol {tol}",
            chi.conrey_index()
        ),
    })
}

/// Rotation data making the completed L real on the critical line.
#[derive(Debug, Clone)]
struct Rotation {
    /// 0 for even characters, 1 for odd.
    parity: u32,
    /// arg(eps)/2 with eps = tau(chi)/(i^a sqrt(q)).
    eps_half_arg: f64,
    ln_q_over_pi: f64,
}

impl Rotation {
    fn new(chi: &DirichletCharacter) -> Result<Rotation> {
        let q = chi.modulus().q();
        let parity = if chi.is_even() { 0 } else { 1 };
        // Gauss sum from the exact character table
        let mut tau = Complex64::new(0.0, 0.0);
        for n in 1..=q {
            if let Some(r) = chi.eval(n) {
                tau += r.to_complex() * Complex64::from_polar(1.0, TAU * n as f64 / q as f64);
            }
        }
        let sqrt_q = (q as f64).sqrt();
        if (tau.norm() - sqrt_q).abs() > 1e-6 * sqrt_q {
            return Err(Error::LFunction(format!(
                "|tau| = {} != sqrt(q) = {sqrt_q}: character not primitive?",
                tau.norm()
            )));
        }
        let i_a = if parity == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 1.0)
        };
        let eps = tau / (i_a * sqrt_q);
        Ok(Rotation {
            parity,
            eps_half_arg: eps.arg() / 2.0,
            ln_q_over_pi: (q as f64 / PI).ln(),
        })
    }

    /// theta(t): rotation angle at height t.
    fn phase(&self, t: f64) -> f64 {
        let z = Complex64::new((0.5 + self.parity as f64) / 2.0, t / 2.0);
        0.5 * t * self.ln_q_over_pi + ln_gamma_complex(z).im - self.eps_half_arg
    }
}

/// Hardy-type rotated value: (Z, residual imaginary part, eval error).
fn z_value(
    chi: &DirichletCharacter,
    rot: &Rotation,
    t: f64,
    tol: f64,
) -> Result<(f64, f64, f64)> {
    let l = l_value(chi, t, tol)?;
    let rotated = Complex64::from_polar(1.0, rot.phase(t)) * l.value;
    Ok((rotated.re, rotated.im, l.est_abs_error))
}

/// Sweep state: incremental phasors for the Euler-Maclaurin main sum.
struct Sweep {
    rot: Rotation,
    /// coefficient chi(a) (n + a/q)^{-1/2} per flattened (a, n) term
    coef: Vec<Complex64>,
    /// ln(n + a/q) per term
    lambda: Vec<f64>,
    /// unit residues with their chi values and offsets a/q
    units: Vec<(Complex64, f64)>,
    n_terms: usize,
    lnq: f64,
    sqrt_q_inv: f64,
}

impl Sweep {
    fn new(chi: &DirichletCharacter, t_end: f64) -> Result<Sweep> {
        let rot = Rotation::new(chi)?;
        let q = chi.modulus().q();
        let n_terms = n_terms_for(t_end);
        let mut coef = Vec::new();
        let mut lambda = Vec::new();
        let mut units = Vec::new();
        for a in 1..=q {
            let cv = chi.eval_c64(a);
            if cv == Complex64::new(0.0, 0.0) {
                continue;
            }
            let x = a as f64 / q as f64;
            units.push((cv, x));
            for n in 0..n_terms {
                let base = n as f64 + x;
                coef.push(cv / base.sqrt());
                lambda.push(base.ln());
            }
        }
        Ok(Sweep {
            rot,
            coef,
            lambda,
            units,
            n_terms,
            lnq: (q as f64).ln(),
            sqrt_q_inv: 1.0 / (q as f64).sqrt(),
        })
    }

    /// Z values on the uniform grid t0 + k dt, k = 0..=steps.
    fn run(&self, t0: f64, dt: f64, steps: usize) -> Vec<f64> {
        let mut states: Vec<Complex64> = self
            .lambda
            .iter()
            .map(|&l| Complex64::from_polar(1.0, -t0 * l))
            .collect();
        let rots: Vec<Complex64> = self
            .lambda
            .iter()
            .map(|&l| Complex64::from_polar(1.0, -dt * l))
            .collect();
        let mut out = Vec::with_capacity(steps + 1);
        for k in 0..=steps {
            let t = t0 + k as f64 * dt;
            if k > 0 {
                for (st, r) in states.iter_mut().zip(&rots) {
                    *st *= *r;
                }
                if k % 2048 == 0 {
                    // resynchronize phases against drift
                    for (st, &l) in states.iter_mut().zip(&self.lambda) {
                        *st = Complex64::from_polar(1.0, -t * l);
                    }
                }
            }
            let mut main = Complex64::new(0.0, 0.0);
            for (c, st) in self.coef.iter().zip(&states) {
                main += c * st;
            }
            main += self.em_corrections(t);
            let l = Complex64::from_polar(self.sqrt_q_inv, -t * self.lnq) * main;
            let z = Complex64::from_polar(1.0, self.rot.phase(t)) * l;
            out.push(z.re);
        }
        out
    }

    /// Euler-Maclaurin boundary and correction terms at height t.
    fn em_corrections(&self, t: f64) -> Complex64 {
        let s = Complex64::new(0.5, t);
        let table = bern_over_fact();
        let mut acc = Complex64::new(0.0, 0.0);
        for &(cv, x) in &self.units {
            let nx = self.n_terms as f64 + x;
            let lnx = nx.ln();
            let pow_1ms = Complex64::from_polar(nx.sqrt(), -t * lnx);
            let pow_ms = Complex64::from_polar(1.0 / nx.sqrt(), -t * lnx);
            let mut local = pow_1ms / (s - 1.0) + 0.5 * pow_ms;
            let mut poch = s;
            let mut power = pow_ms * nx;
            let inv_nx2 = 1.0 / (nx * nx);
            for (k, &c) in table.iter().enumerate() {
                power *= inv_nx2;
                local += c * poch * power;
                let base = 2.0 * (k as f64 + 1.0);
                poch *= (s + (base - 1.0)) * (s + base);
            }
            acc += cv * local;
        }
        acc
    }
}

/// Scan the rotated completed function for zeros of L(1/2+it, chi) with
/// 0 < t <= t_max. Primitive non-principal characters only.
pub fn zero_scan(chi: &DirichletCharacter, t_max: f64, tol: f64) -> Result<Vec<f64>> {
    check_l_preconditions(chi, t_max.min(MAX_T), tol)?;
    if !(t_max > 0.0 && t_max <= MAX_T) {
        return Err(Error::LFunction(format!(
            "t_max must lie in (0, {MAX_T}], got {t_max}"
        )));
    }
    let (pos, _neg) = scan_both_sides(chi, t_max, tol, false)?;
    Ok(pos)
}

/// Scan over [0, T] and optionally [-T, 0): returns (positive ordinates of
/// chi, positive ordinates of the conjugate character).
fn scan_both_sides(
    chi: &DirichletCharacter,
    t_max: f64,
    tol: f64,
    both: bool,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let sweep = Sweep::new(chi, t_max)?;
    let mut step = 0.05f64;
    for refinement in 0..2 {
        let t0 = if both { -t_max } else { 0.0 };
        let steps = ((t_max - t0) / step).round() as usize;
        let dt = (t_max - t0) / steps as f64;
        let zs = sweep.run(t0, dt, steps);
        let mut brackets = Vec::new();
        for k in 1..=steps {
            if zs[k - 1] == 0.0 {
                continue;
            }
            if zs[k - 1] * zs[k] < 0.0 {
                brackets.push((t0 + (k - 1) as f64 * dt, t0 + k as f64 * dt));
            }
        }
        let rot = &sweep.rot;
        let refined: Result<Vec<f64>> = brackets
            .par_iter()
            .map(|&(lo, hi)| bisect_zero(chi, rot, lo, hi, tol))
            .collect();
        let mut located = refined?;
        located.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // simplicity at resolution
        for w in located.windows(2) {
            if (w[1] - w[0]).abs() <= 1e-6 {
                return Err(Error::LFunction(format!(
                    "ordinates {} and {} closer than 1e-6: unresolved pair",
                    w[0], w[1]
                )));
            }
        }
        let pos: Vec<f64> = located.iter().filter(|&&t| t > 0.0).copied().collect();
        let neg: Vec<f64> = located
            .iter()
            .filter(|&&t| t < 0.0)
            .map(|&t| -t)
            .rev()
            .collect();
        // certification: counts against the smooth model, +-2
        let model = smooth_count(chi.conductor(), t_max);
        let ok_pos = (pos.len() as f64 - model).abs() <= 2.0;
        let ok_neg = !both || (neg.len() as f64 - model).abs() <= 2.0;
        if ok_pos && ok_neg {
            return Ok((pos, neg));
        }
        if refinement == 1 {
            return Err(Error::LFunction(format!(
                "zero count {} (model {model:.1}) still off after refinement: \
                 missed-zero condition for chi_{} mod {}",
                pos.len(),
                chi.conrey_index(),
                chi.modulus().q()
            )));
        }
        step /= 10.0;
    }
    unreachable!()
}

fn bisect_zero(
    chi: &DirichletCharacter,
    rot: &Rotation,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64> {
    let (mut zlo, _, _) = z_value(chi, rot, lo, tol)?;
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-9 {
            return Ok(mid);
        }
        let (zmid, _, _) = z_value(chi, rot, mid, tol)?;
        if zlo * zmid <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            zlo = zmid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The primitive character inducing chi, together with its own group.
pub fn primitive_inducing(chi: &DirichletCharacter) -> Result<(CharacterGroup, u64)> {
    let q = chi.modulus().q();
    let qstar = chi.conductor();
    if qstar < 3 {
        return Err(Error::LFunction(
            "no nontrivial primitive character below conductor 3".into(),
        ));
    }
    let m = Modulus::new(qstar)?;
    let g = character_group(&m)?;
    // chi* agrees with chi on units of q lifted to units of q*
    let mut found = None;
    'cand: for cand in g.characters() {
        if cand.conductor() != qstar {
            continue;
        }
        for n in chi.modulus().units() {
            let expect = chi.eval(n).unwrap();
            let got = cand.eval(n % qstar).unwrap();
            if expect != got {
                continue 'cand;
            }
        }
        found = Some(cand.conrey_index());
        break;
    }
    match found {
        Some(idx) => Ok((g, idx)),
        None => Err(Error::LFunction(format!(
            "no primitive character mod {qstar} induces chi_{} mod {q}",
            chi.conrey_index()
        ))),
    }
}

/// Compute all zeros up to T for every non-principal character mod q.
///
/// Zeros of an imprimitive character coincide with those of its primitive
/// inducing character (the removed Euler factors vanish only off the line),
/// and a conjugate pair is covered by one scan over [-T, T].
pub fn bulk_zeros(group: &CharacterGroup, t_max: f64, tol: f64) -> Result<ZeroSet> {
    let q = group.modulus().q();
    if q > MAX_Q {
        return Err(Error::LFunction(format!(
            "bulk_zeros supports q <= {MAX_Q}, got {q}"
        )));
    }
    if !(t_max > 0.0 && t_max <= MAX_T) {
        return Err(Error::LFunction(format!(
            "bulk_zeros supports 0 < T <= {MAX_T}, got {t_max}"
        )));
    }
    let mut zs = ZeroSet::empty(group, Provenance::Computed);
    // collect scan tasks: one per real character, one per conjugate pair
    let chars: Vec<&DirichletCharacter> = group.non_principal().collect();
    let mut tasks: Vec<(u64, u64)> = Vec::new(); // (conrey, conjugate conrey)
    for c in &chars {
        let conj = mod_inv(c.conrey_index(), q);
        if c.conrey_index() <= conj {
            tasks.push((c.conrey_index(), conj));
        }
    }
    let results: Result<Vec<(u64, u64, Vec<f64>, Vec<f64>)>> = tasks
        .par_iter()
        .map(|&(conrey, conj)| {
            let chi = group.by_conrey(conrey).expect("character exists");
            let (pg, pidx) = primitive_inducing(chi)?;
            let prim = pg.by_conrey(pidx).expect("primitive exists");
            let both = conj != conrey;
            let (pos, neg) = scan_both_sides(prim, t_max, tol, both)?;
            Ok((conrey, conj, pos, neg))
        })
        .collect();
    for (conrey, conj, pos, neg) in results? {
        zs.set_char(conrey, pos, t_max)?;
        if conj != conrey {
            zs.set_char(conj, neg, t_max)?;
        }
    }
    Ok(zs)
}
