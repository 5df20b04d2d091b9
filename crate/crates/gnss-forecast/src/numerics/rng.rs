//! Seedable, splittable random number generation.
//!
//! The generator is counter-based: every output is a pure function of
//! `(seed, stream_id, counter)`, so a stream can be reconstructed from its
//! fields alone and two streams with different ids never share state. This
//! is what makes per-station / per-method substreams independent of the
//! order in which the harness happens to run its tasks.

use std::f64::consts::TAU;

/// Weyl increment used to decorrelate successive counter values.
const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer: a bijective avalanche mix on 64 bits.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A deterministic random stream identified by `(seed, stream_id)`.
///
/// Identical `(seed, stream_id)` pairs produce identical draw sequences on
/// every platform: the core is integer-only, and the normal transform uses
/// only `sqrt`/`ln`/`cos` on f64, which are stable for a given libm.
/// Cloning a stream clones its position; [`RngStream::substream`] forks a
/// fresh stream whose sequence is unrelated to the parent's.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    key: u64,
    counter: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let key = mix64(mix64(seed).wrapping_add(stream_id));
        RngStream {
            seed,
            stream_id,
            key,
            counter: 0,
        }
    }

    /// Stream keyed by a textual label, e.g. a station id.
    pub fn labeled(seed: u64, label: &str) -> Self {
        RngStream::new(seed, fnv1a64(label.as_bytes()))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Forks a child stream. Children with distinct indices are mutually
    /// independent and independent of the parent's own sequence.
    pub fn substream(&self, child: u64) -> Self {
        let child_id = mix64(
            self.stream_id
                .wrapping_add(child.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)),
        );
        RngStream::new(self.seed, child_id)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key ^ self.counter.wrapping_mul(GOLDEN_GAMMA))
    }

    /// Uniform draw in the half-open interval (0, 1].
    ///
    /// The open lower end keeps `ln(u)` finite in the normal transform.
    pub fn next_uniform(&mut self) -> f64 {
        (((self.next_u64() >> 11) + 1) as f64) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal draw via the Box-Muller transform.
    ///
    /// Each draw consumes exactly two `u64`s; no spare is cached, so the
    /// mapping from counter position to output stays stateless.
    pub fn next_normal(&mut self) -> f64 {
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
    }

    pub fn normal_vec(&mut self, count: usize) -> Vec<f64> {
        (0..count).map(|_| self.next_normal()).collect()
    }
}

/// Draws `count` standard normal values from `stream`.
pub fn rng_normal(stream: &mut RngStream, count: usize) -> Vec<f64> {
    stream.normal_vec(count)
}

/// FNV-1a over bytes; used to turn labels into stream ids.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xCBF2_9CE4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01B3);
    }
    hash
}
