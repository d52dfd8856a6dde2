//! Universal hashing, leftover-hash extraction and key digests.

pub mod crhash;
pub mod extractor;
pub mod gf2n;
pub mod universal;

pub use crhash::{CrHash, KeyDigest, UniversalDigest};
pub use extractor::{extract, extractor_distance, ExtractorSpec};
pub use gf2n::{Gf2n, REDUCTION_LOW};
pub use universal::{uh_collision_probability, HashSeed, UniversalHashFamily};
