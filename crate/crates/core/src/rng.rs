//! Seeded, named random streams. One run seed fans out into independent
//! streams so that, e.g., the training set for seed 3 is identical no matter
//! which model is trained on it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    Train,
    Test,
    Init,
    Shuffle,
    Verify,
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::Train => 1,
            Stream::Test => 2,
            Stream::Init => 3,
            Stream::Shuffle => 4,
            Stream::Verify => 5,
        }
    }
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream.id());
    rng
}
