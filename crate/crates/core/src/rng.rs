//! Seeded random numbers with a published stream-splitting rule.
//!
//! Everything random in this crate draws from a ChaCha12 generator
//! ([`rand_chacha::ChaCha12Rng`]) keyed by a single user seed. Independent
//! consumers never share a generator; each gets its own ChaCha *stream*:
//!
//! ```text
//! stream id (64 bit) = domain tag (high 8 bits) | consumer index (low 56 bits)
//! ```
//!
//! One coincidence record, one bootstrap resample, and one likelihood
//! multi-start each own one sub-stream, so records can be sampled in any
//! order (or concurrently) without changing a single draw. Uniform doubles
//! are built from the top 53 bits of `next_u64`, which keeps results
//! identical across `rand` ecosystem versions.

pub use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

#[allow(unused_imports)]
use num_traits::Float;

/// Consumer classes with disjoint stream ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamDomain {
    /// Poisson sampling of one coincidence record.
    Record = 1,
    /// One parametric-bootstrap resample.
    Bootstrap = 2,
    /// One likelihood-optimizer start perturbation.
    MleStart = 3,
}

const INDEX_MASK: u64 = (1 << 56) - 1;

/// The dedicated generator for `(seed, domain, index)`.
pub fn substream(seed: u64, domain: StreamDomain, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(((domain as u64) << 56) | (index & INDEX_MASK));
    rng
}

/// Uniform draw in `[0, 1)` from the top 53 bits of one `u64`.
pub fn uniform(rng: &mut ChaCha12Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw strictly inside `(0, 1)`, for use under logarithms.
fn uniform_open(rng: &mut ChaCha12Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// One draw from Poisson(`lambda`).
///
/// Sequential inversion below λ = 30; above that, Atkinson's logistic-envelope
/// rejection, which needs no normal approximation. Both branches consume
/// draws only from `rng`, so a fixed sub-stream reproduces the count exactly.
pub fn poisson(lambda: f64, rng: &mut ChaCha12Rng) -> u64 {
    debug_assert!(
        lambda.is_finite() && lambda >= 0.0,
        "Poisson mean must be ≥ 0"
    );
    if lambda <= 0.0 {
        return 0;
    }
    if lambda < 30.0 {
        poisson_inversion(lambda, rng)
    } else {
        poisson_atkinson(lambda, rng)
    }
}

fn poisson_inversion(lambda: f64, rng: &mut ChaCha12Rng) -> u64 {
    let u = uniform(rng);
    let mut k = 0u64;
    let mut term = (-lambda).exp();
    let mut cdf = term;
    // The tail guard only matters when u rounds past the representable CDF.
    while u > cdf && k < 1024 {
        k += 1;
        term *= lambda / k as f64;
        cdf += term;
    }
    k
}

fn poisson_atkinson(lambda: f64, rng: &mut ChaCha12Rng) -> u64 {
    let beta = core::f64::consts::PI / (3.0 * lambda).sqrt();
    let alpha = beta * lambda;
    let k = (0.767 - 3.36 / lambda).ln() - lambda - beta.ln();
    let log_lambda = lambda.ln();
    loop {
        let u = uniform_open(rng);
        let x = (alpha - ((1.0 - u) / u).ln()) / beta;
        let n = (x + 0.5).floor();
        if n < 0.0 {
            continue;
        }
        let v = uniform_open(rng);
        let y = alpha - beta * x;
        let envelope = 1.0 + y.exp();
        let lhs = y + (v / (envelope * envelope)).ln();
        let rhs = k + n * log_lambda - ln_factorial(n as u64);
        if lhs <= rhs {
            return n as u64;
        }
    }
}

/// ln(n!) — exact summation for small n, Stirling's series beyond.
fn ln_factorial(n: u64) -> f64 {
    if n < 32 {
        let mut acc = 0.0;
        for k in 2..=n {
            acc += (k as f64).ln();
        }
        return acc;
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x + 0.5) * x.ln() - x
        + 0.5 * (2.0 * core::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}
