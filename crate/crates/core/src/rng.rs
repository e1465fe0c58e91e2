use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A reproducible random stream: the same `(seed, stream)` always yields the
/// same sequence for a given library version.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngStream { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// A child stream, distinct for distinct `(self, index)` with overwhelming
    /// probability.
    pub fn substream(&self, index: u64) -> RngStream {
        RngStream { seed: self.seed, stream: splitmix(self.stream ^ splitmix(index.wrapping_add(1))) }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
