//! Deterministic random number generation.
//!
//! All randomness in the crate flows through this fixed 64-bit generator so
//! that a seed identifies a sample bit-for-bit on every platform. The
//! generator is the standard splitmix construction: a Weyl sequence on the
//! golden-ratio increment pushed through an avalanche mix. Gaussian variates
//! come from the Box–Muller transform, consuming exactly two raw draws per
//! complex sample.

use num_complex::Complex64;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent stream seed from a base seed and a stream index.
///
/// Used everywhere a sampler needs per-trial sub-seeds: the derivation is a
/// pure function, so trial `k` of a run is reproducible in isolation.
#[inline]
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    mix(seed.wrapping_add(GOLDEN.wrapping_mul(stream.wrapping_add(1))))
}

/// Splitmix generator with a 64-bit state.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    /// Next raw 64-bit draw.
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `(0, 1]`; safe as a logarithm argument.
    #[inline]
    fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard complex Gaussian: independent `N(0,1)` real and imaginary parts.
    pub fn next_complex_gaussian(&mut self) -> Complex64 {
        let u = self.next_open01();
        let v = self.next_f64();
        let r = (-2.0 * u.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * v;
        Complex64::new(r * theta.cos(), r * theta.sin())
    }

    /// Child generator for stream `index`, independent of this one's future output.
    pub fn substream(&self, index: u64) -> Rng {
        Rng::new(derive_seed(self.state, index))
    }
}
