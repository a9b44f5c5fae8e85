#![allow(dead_code)]

pub mod disks;
pub mod naive;
pub mod realize;
pub mod abduction;
pub mod lambda;
pub mod rects;
pub mod world;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seeded RNG for oracle sampling; `GEONARRATE_SEED` overrides the default.
pub fn rng(salt: u64) -> ChaCha8Rng {
    let seed = std::env::var("GEONARRATE_SEED")
        .ok()
        .and_then(|s| s.parse::<u64>().ok())
        .unwrap_or(0x5eed_2013);
    ChaCha8Rng::seed_from_u64(seed ^ salt)
}

pub fn fixture_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}
