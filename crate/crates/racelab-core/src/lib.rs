//! Numerical laboratory for the limiting distributions of prime number races.
//!
//! The library materializes the random model behind the law of the normalized
//! race vector `E(x;q,a) = (log x/sqrt x)(phi(q) pi(x;q,a) - pi(x))`: exact
//! Dirichlet character arithmetic, critical-line zero data (ingested,
//! synthesized, or computed), the covariance structure built from zero sums,
//! density and tail evaluation by Fourier inversion and Monte Carlo, and the
//! saddle-point machinery for deep tails.
//!
//! Modules map one-to-one onto the subsystems:
//!
//! * [`modchar`] — moduli, unit groups, Dirichlet characters (Conrey labels).
//! * [`zerodata`] — zero-ordinate sets, counting models, covariance sums.
//! * [`specfun`] — `J0`, `I0`, `log I0`, incomplete gamma, quadrature.
//! * [`gaussmodel`] — Gaussian ball tails and the fourth-moment correction.
//! * [`randmodel`] — characteristic function, densities, Monte Carlo.
//! * [`tailbounds`] — Montgomery–Odlyzko bounds, Laplace transform, saddle.
//! * [`lfzeros`] — direct computation of critical-line zeros for small q.
//! * [`empirical`] — prime sieve and the logarithmic-measure harness.

pub mod empirical;
pub mod gaussmodel;
pub mod lfzeros;
pub mod modchar;
pub mod randmodel;
pub mod rng;
pub mod specfun;
pub mod tailbounds;
pub mod zerodata;

mod error;

pub use error::{Error, ErrorClass, Result};
