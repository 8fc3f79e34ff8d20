//! Multivariate Gaussian comparison model: ball-complement tails, the
//! fourth-moment correction integrals F_{j,k}, and the corrected tail
//! approximation built from a covariance structure.

use crate::specfun::{gamma_q, integrate, ln_gamma, QuadratureSpec};
use crate::zerodata::CovarianceData;
use crate::{Error, Result};
use std::f64::consts::PI;

/// P(||Z|| > lambda) for a standard r-dimensional Gaussian:
/// the chi-square tail Q(r/2, lambda^2/2).
pub fn ball_tail(r: u32, lambda: f64) -> f64 {
    assert!(r >= 1, "dimension must be >= 1");
    assert!(lambda >= 0.0, "lambda must be >= 0");
    if lambda == 0.0 {
        return 1.0;
    }
    gamma_q(r as f64 / 2.0, lambda * lambda / 2.0)
}

/// Density of the chi distribution (norm of a standard r-Gaussian).
fn chi_density(r: u32, rho: f64) -> f64 {
    let rf = r as f64;
    let log_d =
        (1.0 - rf / 2.0) * 2f64.ln() + (rf - 1.0) * rho.ln() - rho * rho / 2.0 - ln_gamma(rf / 2.0);
    log_d.exp()
}

/// F_{j,k}(lambda) = (2 pi)^{-r/2} int_{||x|| > lambda} (x_j^2-1)(x_k^2-1)
/// exp(-||x||^2/2) dx, independent of the pair (j != k).
///
/// Reduced to one dimension by sphere moments: conditionally on ||x|| = rho,
/// E (x_j^2-1)(x_k^2-1) = rho^4/(r(r+2)) - 2 rho^2/r + 1, integrated against
/// the chi_r density on (lambda, inf).
pub fn f_correction(r: u32, j: usize, k: usize, lambda: f64) -> Result<f64> {
    if r < 2 {
        return Err(Error::GaussModel("f_correction needs r >= 2".into()));
    }
    if j == k {
        return Err(Error::GaussModel(
            "f_correction needs distinct coordinates j != k".into(),
        ));
    }
    if j >= r as usize || k >= r as usize {
        return Err(Error::GaussModel(format!(
            "coordinate out of range: ({j},{k}) for r={r}"
        )));
    }
    if lambda < 0.0 {
        return Err(Error::GaussModel("lambda must be >= 0".into()));
    }
    let rf = r as f64;
    let spec = QuadratureSpec {
        abs_tol: 1e-12,
        ..Default::default()
    };
    let hi = (lambda * lambda + 320.0).sqrt();
    let f = |rho: f64| {
        let r2 = rho * rho;
        (r2 * r2 / (rf * (rf + 2.0)) - 2.0 * r2 / rf + 1.0) * chi_density(r, rho)
    };
    integrate(&f, lambda.max(1e-300), hi, &spec)
}

/// Closed form of F for r = 2: (a^2 - 2a) e^{-a} / 2 with a = lambda^2/2.
pub fn f_correction_r2_closed(lambda: f64) -> f64 {
    let a = lambda * lambda / 2.0;
    (a * a - 2.0 * a) * (-a).exp() / 2.0
}

/// Gaussian tail and its covariance-corrected refinement.
#[derive(Debug, Clone, Copy)]
pub struct CorrectedTail {
    pub gaussian: f64,
    pub corrected: f64,
}

/// Tail of the race distribution at radius lambda sqrt(V_q): the Gaussian
/// ball tail plus the second-order correction
/// (1/2 V_q^2) sum_{j<k} B(a_j,a_k)^2 F_{j,k}(lambda).
pub fn corrected_tail(cov: &CovarianceData, lambda: f64) -> Result<CorrectedTail> {
    let r = cov.r() as u32;
    let gaussian = ball_tail(r, lambda);
    let f = f_correction(r, 0, 1, lambda)?;
    let mut sum_b2 = 0.0;
    for j in 0..cov.r() {
        for k in (j + 1)..cov.r() {
            let b = cov.b(j, k);
            sum_b2 += b * b;
        }
    }
    let v = cov.variance;
    let corrected = gaussian + sum_b2 * f / (2.0 * v * v);
    Ok(CorrectedTail { gaussian, corrected })
}

/// Coordinate factor used by the odd-symmetry probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// f(x) = x
    Odd,
    /// f(x) = 1 + x^2
    Even,
    /// f(x) = 1
    One,
}

impl Parity {
    fn apply(self, x: f64) -> f64 {
        match self {
            Parity::Odd => x,
            Parity::Even => 1.0 + x * x,
            Parity::One => 1.0,
        }
    }
}

/// Integral of prod f_i(x_i) against the standard Gaussian weight over the
/// shell lambda1 < ||x|| < lambda2, by spherical product quadrature
/// (supported for 2 <= r <= 4).
///
/// With at least one odd factor the reflection x_i -> -x_i forces the value
/// to vanish; this operation is the numeric probe of that identity.
pub fn odd_symmetry_check(r: u32, lambda1: f64, lambda2: f64, parity: &[Parity]) -> Result<f64> {
    if !(2..=4).contains(&r) {
        return Err(Error::GaussModel(format!(
            "odd_symmetry_check supports 2 <= r <= 4, got {r}"
        )));
    }
    if parity.len() != r as usize {
        return Err(Error::GaussModel(format!(
            "need {r} parity entries, got {}",
            parity.len()
        )));
    }
    if !(lambda2 > lambda1 && lambda1 >= 0.0) {
        return Err(Error::GaussModel("need lambda2 > lambda1 >= 0".into()));
    }
    let (nodes, weights) = gauss_legendre_64();
    let (a, b) = (lambda1, lambda2.min((lambda1 * lambda1 + 320.0).sqrt()));
    let mut total = 0.0;
    for (&x, &w) in nodes.iter().zip(weights.iter()) {
        let rho = 0.5 * (b - a) * x + 0.5 * (a + b);
        let shell = sphere_product(parity, rho, nodes, weights);
        total += w * 0.5 * (b - a) * rho.powi(r as i32 - 1) * (-rho * rho / 2.0).exp() * shell;
    }
    Ok(total / (2.0 * PI).powf(r as f64 / 2.0))
}

/// Surface integral over S^{r-1} of prod f_i(rho u_i), recursive in r via
/// u = (v sin phi, cos phi), dsigma = sin^{r-2} phi dphi dsigma(v).
fn sphere_product(parity: &[Parity], rho: f64, nodes: &[f64], weights: &[f64]) -> f64 {
    match parity.len() {
        1 => parity[0].apply(rho) + parity[0].apply(-rho),
        n => {
            let mut acc = 0.0;
            for (&x, &w) in nodes.iter().zip(weights.iter()) {
                let phi = 0.5 * PI * x + 0.5 * PI;
                let s = phi.sin();
                let inner = sphere_product(&parity[..n - 1], rho * s, nodes, weights);
                acc += w
                    * 0.5
                    * PI
                    * s.powi(n as i32 - 2)
                    * parity[n - 1].apply(rho * phi.cos())
                    * inner;
            }
            acc
        }
    }
}

/// 64-point Gauss-Legendre rule on [-1, 1], built once by Newton iteration
/// on the Legendre polynomial.
fn gauss_legendre_64() -> (&'static [f64], &'static [f64]) {
    use std::sync::OnceLock;
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    let (n, w) = RULE.get_or_init(|| {
        let n = 64usize;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    });
    (n, w)
}

/// Legendre P_n(x) and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0f64;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}
