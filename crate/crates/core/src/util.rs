use rand::{Rng, RngCore};
use rand_distr::{Distribution, StandardNormal};

/// Lowest-index argmin. `values` must be nonempty.
pub(crate) fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    best
}

/// Ceiling that treats values within a relative 1e-9 of an integer as that
/// integer, so formula round-trips such as `(sqrt(x))^2` land where intended.
pub(crate) fn ceil_tol(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

/// Standard exponential by inversion: `-ln(1 - U)`, `U` uniform on `[0, 1)`.
pub(crate) fn standard_exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    -(1.0 - u).ln()
}

pub(crate) fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Fills `out` with independent uniform draws from `{-1/2, +1/2}`, one bit each.
pub(crate) fn fill_random_signs<R: RngCore + ?Sized>(rng: &mut R, out: &mut [f64]) {
    for chunk in out.chunks_mut(64) {
        let mut bits = rng.next_u64();
        for slot in chunk {
            *slot = if bits & 1 == 1 { 0.5 } else { -0.5 };
            bits >>= 1;
        }
    }
}

/// Fills `out` with independent Bernoulli(1/2) draws in `{0, 1}`.
pub(crate) fn fill_fair_bits<R: RngCore + ?Sized>(rng: &mut R, out: &mut [f64]) {
    for chunk in out.chunks_mut(64) {
        let mut bits = rng.next_u64();
        for slot in chunk {
            *slot = (bits & 1) as f64;
            bits >>= 1;
        }
    }
}

/// Index drawn from an (unnormalised) nonnegative weight vector by inversion.
pub(crate) fn sample_weighted<R: Rng + ?Sized>(rng: &mut R, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return i;
        }
        u -= w;
    }
    // Rounding can leave `u` marginally above the last cumulative weight.
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(weights.len() - 1)
}
