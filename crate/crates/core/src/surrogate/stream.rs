//! Keyed, counter-based generation of standard-normal variates.
//!
//! Every random draw in the experiment flows from a [`StreamKey`]: the master
//! seed plus the grid coordinates of the draw. The key is hashed down to a
//! 64-bit stream seed, and variate `i` of the stream is a pure function of
//! `(seed, i)`. There is no shared RNG state anywhere, so replications can be
//! scheduled on any number of workers in any order and still produce
//! bit-identical output, and generating a prefix of a stream never depends on
//! how much of it will eventually be consumed.
//!
//! The construction, frozen for reproducibility:
//!
//! 1. key -> seed: starting from `mix64(master_seed)`, each of `cell_index`,
//!    `replication_index`, `purpose_tag` is multiplied by a fixed odd
//!    constant, XORed in, and passed through `mix64` again (`mix64` is the
//!    SplitMix64 finalizer, a bijective avalanche mixer).
//! 2. seed -> uniforms: `u(i)` takes the top 53 bits of
//!    `mix64(seed + (i+1) * GOLDEN_GAMMA)` and maps them to `(0, 1]`.
//! 3. uniforms -> normals: `z(i)` is the cosine branch of the Box-Muller
//!    transform applied to `u(2i)` and `u(2i+1)`; the sine branch is unused so
//!    that every normal is addressable by index alone.

/// Identifies one independent substream of the experiment's randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub master_seed: u64,
    pub cell_index: u64,
    pub replication_index: u64,
    pub purpose_tag: u64,
}

/// Purpose tags, one per kind of draw a replication makes.
pub mod purpose {
    /// Target series (trend + AR(1) noise).
    pub const TARGET: u64 = 0;
    /// White noise added to the target to form pseudo-proxies.
    pub const PROXY_NOISE: u64 = 1;
    /// Independent AR(1) predictor ensemble.
    pub const AR1_ENSEMBLE: u64 = 2;
}

impl StreamKey {
    pub fn new(master_seed: u64, cell_index: u64, replication_index: u64, purpose_tag: u64) -> Self {
        Self {
            master_seed,
            cell_index,
            replication_index,
            purpose_tag,
        }
    }
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
const CELL_SALT: u64 = 0xbf58_476d_1ce4_e5b9;
const REP_SALT: u64 = 0x94d0_49bb_1331_11eb;
const PURPOSE_SALT: u64 = 0xd6e8_feb8_6659_fd93;

/// SplitMix64 finalizer. Bijective on u64 with full avalanche.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn stream_seed(key: StreamKey) -> u64 {
    let mut h = mix64(key.master_seed);
    h = mix64(h ^ key.cell_index.wrapping_mul(CELL_SALT));
    h = mix64(h ^ key.replication_index.wrapping_mul(REP_SALT));
    h = mix64(h ^ key.purpose_tag.wrapping_mul(PURPOSE_SALT));
    h
}

/// Derive the standard-normal stream addressed by `key`.
pub fn derive_stream(key: StreamKey) -> NormalStream {
    NormalStream {
        seed: stream_seed(key),
        counter: 0,
    }
}

/// A deterministic stream of iid standard-normal variates.
///
/// Supports both sequential consumption ([`next_normal`](Self::next_normal),
/// single consumer) and random access by index ([`normal_at`](Self::normal_at)),
/// which the ensemble generators use to give each column its own disjoint
/// segment of the stream.
#[derive(Debug, Clone)]
pub struct NormalStream {
    seed: u64,
    counter: u64,
}

impl NormalStream {
    /// Uniform variate `i` of this stream, in `(0, 1]`.
    #[inline]
    fn uniform_at(&self, i: u64) -> f64 {
        let bits = mix64(self.seed.wrapping_add(i.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)));
        // Top 53 bits, shifted into (0, 1] so ln() below is always finite.
        ((bits >> 11) + 1) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Standard-normal variate `i` of this stream, independent of the cursor.
    #[inline]
    pub fn normal_at(&self, i: u64) -> f64 {
        let u1 = self.uniform_at(2 * i);
        let u2 = self.uniform_at(2 * i + 1);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Next variate in sequence; advances the cursor.
    #[inline]
    pub fn next_normal(&mut self) -> f64 {
        let z = self.normal_at(self.counter);
        self.counter += 1;
        z
    }

    /// Draw `n` sequential variates.
    pub fn take_normals(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.next_normal()).collect()
    }
}
