//! Deterministic counter-based random streams.
//!
//! Every random decision in the simulator derives from a single 64-bit seed
//! through named substreams. A [`StreamKey`] identifies a point in the key
//! tree; deriving a child is a pure hash, so any worker can reconstruct the
//! stream for (frame, ring, azimuth) without coordination and parallel runs
//! are bit-identical to serial ones.
//!
//! The generator is splitmix64. Not cryptographic; never use for secrets.

/// Weyl increment / finalizer constant from splitmix64.
const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A derived key in the substream tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StreamKey(u64);

impl StreamKey {
    /// Root key for a run.
    pub fn root(seed: u64) -> Self {
        StreamKey(mix64(seed ^ GOLDEN))
    }

    /// Derive a labeled child key.
    pub fn child(self, label: u64) -> Self {
        StreamKey(mix64(
            self.0 ^ label.wrapping_mul(GOLDEN).wrapping_add(0x6A09_E667_F3BC_C909),
        ))
    }

    /// Stateful generator seeded at this key.
    pub fn rng(self) -> DetRng {
        DetRng { state: self.0 }
    }
}

/// Splitmix64 sequence starting from a [`StreamKey`].
#[derive(Clone, Debug)]
pub struct DetRng {
    state: u64,
}

impl DetRng {
    pub fn new(seed: u64) -> Self {
        StreamKey::root(seed).rng()
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform draw in [0, 1).
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in (0, 1]; safe as a log argument.
    #[inline]
    pub fn next_f64_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller. Consumes exactly two draws; the spare
    /// is discarded so draw counts stay position-independent.
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = self.next_f64_open();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Gaussian with the given mean and standard deviation.
    pub fn gaussian(&mut self, mean: f64, std_dev: f64) -> f64 {
        mean + std_dev * self.next_gaussian()
    }

    /// Uniform draw in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Index in [0, n).
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        (self.next_u64() % n as u64) as usize
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, slice: &mut [T]) {
        for i in (1..slice.len()).rev() {
            let j = (self.next_u64() % (i as u64 + 1)) as usize;
            slice.swap(i, j);
        }
    }
}

/// Substream labels for the simulator's independent random domains.
pub mod domain {
    /// Static surface-reflectivity realization per (target, part, beam).
    pub const SURFACE: u64 = 1;
    /// Per (frame, ring, azimuth) detection noise.
    pub const BEAM: u64 = 2;
    /// Visibility-trace noise.
    pub const TRACE: u64 = 3;
    /// Per-channel receiver sensitivity, static per (ring, azimuth).
    pub const CHANNEL: u64 = 6;
    /// GP training: subset selection and optimizer starts.
    pub const GPR: u64 = 4;
    /// Dataset splitting for evaluation.
    pub const SPLIT: u64 = 5;
}
