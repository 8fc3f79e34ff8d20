//! Special functions for the race-distribution formulas.
//!
//! `J0` is the characteristic function of a single zero's contribution,
//! `I0` its Laplace-transform counterpart, and `f_clipped` the integrand of
//! the deep-tail constant `a0_constant`. Both Bessel functions switch from
//! the power series to the Hankel-type asymptotic expansion at |t| = 12; the
//! two branches agree to better than 1e-12 across the crossover window.

use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

const BRANCH: f64 = 12.0;

/// Bessel function of the first kind, order zero.
///
/// Power series for |t| <= 12, modulus/phase asymptotic expansion beyond.
/// Absolute error stays below ~1e-13 for |t| <= 1e4.
pub fn bessel_j0(t: f64) -> f64 {
    let x = t.abs();
    if x <= BRANCH {
        // sum from the smallest terms up, compensated
        let q = 0.25 * x * x;
        let mut terms = [0.0f64; 64];
        let mut term = 1.0f64;
        let mut m = 0usize;
        while m < 63 {
            terms[m] = term;
            m += 1;
            term *= -q / ((m * m) as f64);
            if term.abs() < 1e-22 {
                terms[m] = term;
                m += 1;
                break;
            }
        }
        let mut sum = 0.0f64;
        let mut c = 0.0f64;
        for k in (0..m).rev() {
            let y = terms[k] - c;
            let s = sum + y;
            c = (s - sum) - y;
            sum = s;
        }
        sum
    } else {
        let (p, q) = hankel_pq(x);
        let chi = x - 0.25 * PI;
        (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
    }
}

/// Hankel asymptotic sums P0(x), Q0(x) for order zero.
///
/// c_m = ((2m)!)^2 / (m!^3 32^m); P0 = sum (-1)^k c_{2k} x^{-2k},
/// Q0 = -sum (-1)^k c_{2k+1} x^{-2k-1}. Truncated where terms stop
/// decreasing; at x >= 12 the smallest term is ~1e-21.
fn hankel_pq(x: f64) -> (f64, f64) {
    let mut p = 0.0f64;
    let mut q = 0.0f64;
    let mut c = 1.0f64; // c_m
    let mut xm = 1.0f64; // x^-m
    let inv = 1.0 / x;
    let mut last = f64::INFINITY;
    for m in 0..40 {
        let term = c * xm;
        if term.abs() > last {
            break;
        }
        last = term.abs();
        let k = m / 2;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        if m % 2 == 0 {
            p += sign * term;
        } else {
            q -= sign * term;
        }
        let mf = (2 * m + 1) as f64;
        c *= mf * mf / (8.0 * (m + 1) as f64);
        xm *= inv;
        if term.abs() < 1e-20 {
            break;
        }
    }
    (p, q)
}

/// Modified Bessel function of the first kind, order zero.
pub fn bessel_i0(t: f64) -> f64 {
    let x = t.abs();
    if x <= BRANCH {
        let q = 0.25 * x * x;
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        for m in 1..200 {
            term *= q / ((m * m) as f64);
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
        }
        sum
    } else {
        log_i0_unchecked(x).exp()
    }
}

/// log I0(t), stable for t up to 1e6 and beyond.
///
/// For t > 12 uses t - log(2 pi t)/2 + log(asymptotic series), so it never
/// overflows; satisfies log_i0(t) <= t everywhere.
pub fn log_i0(t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::GaussModel(format!(
            "log_i0 requires t >= 0, got {t}"
        )));
    }
    Ok(log_i0_unchecked(t))
}

pub(crate) fn log_i0_unchecked(t: f64) -> f64 {
    let x = t.abs();
    if x <= BRANCH {
        bessel_i0(x).ln()
    } else {
        x - 0.5 * (2.0 * PI * x).ln() + i_asympt_series(0.0, x).ln()
    }
}

/// Asymptotic series sum for I_nu: 1 - (mu-1)/(8x) + (mu-1)(mu-9)/(2!(8x)^2) - ...
/// with mu = 4 nu^2. Truncated at the smallest term.
fn i_asympt_series(mu: f64, x: f64) -> f64 {
    let mut sum = 1.0f64;
    let mut term = 1.0f64;
    let mut last = f64::INFINITY;
    for m in 1..40 {
        let j = (2 * m - 1) as f64;
        term *= -(mu - j * j) / (8.0 * m as f64 * x);
        if term.abs() > last || term.abs() < 1e-20 {
            if term.abs() <= last {
                sum += term;
            }
            break;
        }
        last = term.abs();
        sum += term;
    }
    sum
}

/// I1(t)/I0(t) = d/dt log I0(t). Monotone from 0 to 1, bounded by 1.
pub fn i1_over_i0(t: f64) -> f64 {
    let x = t.abs();
    let r = if x <= BRANCH {
        let q = 0.25 * x * x;
        // I0 series and I1 series (I1 = (x/2) sum q^n / (n!(n+1)!))
        let mut t0 = 1.0f64;
        let mut s0 = 1.0f64;
        let mut t1 = 1.0f64;
        let mut s1 = 1.0f64;
        for m in 1..200 {
            t0 *= q / ((m * m) as f64);
            s0 += t0;
            t1 *= q / ((m * (m + 1)) as f64);
            s1 += t1;
            if t0 < 1e-18 * s0 {
                break;
            }
        }
        0.5 * x * s1 / s0
    } else {
        i_asympt_series(4.0, x) / i_asympt_series(0.0, x)
    };
    if t < 0.0 {
        -r
    } else {
        r
    }
}

/// The clipped function: log I0(t) on [0,1), log I0(t) - t on [1, inf).
///
/// Deliberately keeps the unit jump at t = 1 of the definition; the improper
/// integrals built from it are insensitive to the single point.
pub fn f_clipped(t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::GaussModel(format!(
            "f_clipped requires t >= 0, got {t}"
        )));
    }
    let l = log_i0_unchecked(t);
    Ok(if t < 1.0 { l } else { l - t })
}

/// Adaptive quadrature request.
#[derive(Debug, Clone)]
pub struct QuadratureSpec {
    /// Panel rule identifier (informational).
    pub scheme: &'static str,
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            scheme: "adaptive-simpson",
            abs_tol: 1e-9,
            max_depth: 48,
        }
    }
}

/// Adaptive Simpson integration with Richardson extrapolation.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    assert!(spec.abs_tol > 0.0, "abs_tol must be positive");
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let mut ok = true;
    let v = simpson_rec(
        f,
        a,
        b,
        fa,
        fm,
        fb,
        spec.abs_tol,
        spec.max_depth,
        &mut ok,
    );
    if ok {
        Ok(v)
    } else {
        Err(Error::QuadratureConvergence {
            tol: spec.abs_tol,
            max_depth: spec.max_depth,
            context: format!("integrate on [{a}, {b}]"),
        })
    }
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    tol: f64,
    depth: u32,
    ok: &mut bool,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let s2 = left + right;
    if (s2 - whole).abs() <= 15.0 * tol {
        return s2 + (s2 - whole) / 15.0;
    }
    if depth == 0 {
        *ok = false;
        return s2;
    }
    simpson_rec(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1, ok)
        + simpson_rec(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1, ok)
}

/// The deep-tail constant
/// `A0 = int_0^1 log I0(t)/t^2 dt + int_1^inf (log I0(t) - t)/t^2 dt + 1`.
///
/// The integrand of the first piece tends to 1/4 at 0 (log I0(t) = t^2/4 -
/// t^4/64 + ...); a Taylor panel covers [0, 1e-3]. The second piece maps to
/// [0, 1] by u = 1/t, with an analytic panel near u = 0 where the integrand
/// behaves like (log u - log 2 pi)/2.
///
/// Note: this evaluates the defining integrals; see `a0_constant` tests and
/// the acceptance suite for the relation to the historically quoted value.
pub fn a0_constant(spec: &QuadratureSpec) -> Result<f64> {
    if spec.abs_tol > 1e-8 {
        return Err(Error::GaussModel(format!(
            "a0_constant needs abs_tol <= 1e-8, got {}",
            spec.abs_tol
        )));
    }
    let inner = QuadratureSpec {
        abs_tol: spec.abs_tol / 4.0,
        ..spec.clone()
    };
    // [0, delta]: integrand = 1/4 - t^2/64 + O(t^4)
    let d = 1e-3;
    let head = d / 4.0 - d * d * d / 192.0;
    let mid = integrate(&|t: f64| log_i0_unchecked(t) / (t * t), d, 1.0, &inner)?;
    // u = 1/t on [1, inf): integrand g(u) = log I0(1/u) - 1/u
    // near u = 0: g = -(log 2пi)/2 ... analytic: -u/2 log(2 pi) + (u log u - u)/2 + u^2/16
    let du = 1e-4;
    let tail_head = -0.5 * du * (2.0 * PI).ln() + 0.5 * (du * du.ln() - du) + du * du / 16.0;
    let tail = integrate(&|u: f64| log_i0_unchecked(1.0 / u) - 1.0 / u, du, 1.0, &inner)?;
    Ok(head + mid + tail_head + tail + 1.0)
}

/// Natural log of the gamma function for x > 0 (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    ln_gamma_complex(Complex64::new(x, 0.0)).re
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_C: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Principal branch of log Gamma(z) for Re(z) > 0 (Lanczos, g = 7).
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    assert!(z.re > 0.0, "ln_gamma_complex needs Re(z) > 0");
    let z = z - 1.0;
    let mut a = Complex64::new(LANCZOS_C[0], 0.0);
    for (i, &c) in LANCZOS_C.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x)/Gamma(a).
///
/// Series for x < a + 1, Lentz continued fraction otherwise.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 1.0;
    }
    let log_pre = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        // P(a,x) by series
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut n = a;
        for _ in 0..500 {
            n += 1.0;
            term *= x / n;
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        1.0 - (log_pre.exp() * sum).min(1.0)
    } else {
        // Q(a,x) by continued fraction (modified Lentz)
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (log_pre.exp() * h).clamp(0.0, 1.0)
    }
}
