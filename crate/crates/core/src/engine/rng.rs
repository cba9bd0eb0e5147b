//! Stateless per-site uniforms.
//!
//! The mark of a site in a given sample is a pure function of
//! `(seed, sample_idx, i, j)`, so any worker can evaluate any site of any
//! sample in any order and two lattices that share site indices share
//! configurations. The mixer is the SplitMix64 finaliser applied three
//! times: once to the seed, once to fold in the sample index and once to
//! fold in the site key.
//!
//! Changing anything here changes every golden output; bump
//! [`SITE_STREAM_VERSION`] when that happens.

use crate::lattice::Site;

pub const SITE_STREAM_VERSION: u32 = 1;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
const SAMPLE_MUL: u64 = 0xd1b5_4a32_d192_ed03;
const SITE_MUL: u64 = 0xaef1_7502_108e_f2d9;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Key shared by every site of one sample.
#[inline]
pub fn sample_key(seed: u64, sample_idx: u64) -> u64 {
    let s = mix64(seed.wrapping_add(GOLDEN_GAMMA));
    mix64(s ^ sample_idx.wrapping_mul(SAMPLE_MUL).wrapping_add(GOLDEN_GAMMA))
}

/// Key of a site, independent of seed and sample.
#[inline]
pub fn site_key(s: Site) -> u64 {
    let packed = ((s.i as u32 as u64) << 32) | (s.j as u32 as u64);
    packed.wrapping_mul(SITE_MUL)
}

/// Uniform in [0, 1) with 53 random bits.
#[inline]
pub fn uniform_from_keys(sample_key: u64, site_key: u64) -> f64 {
    let z = mix64(sample_key ^ site_key);
    (z >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// The mark of `site` in sample `sample_idx`; the site is open iff the
/// value is `< p`.
pub fn site_uniform(seed: u64, sample_idx: u64, site: Site) -> f64 {
    uniform_from_keys(sample_key(seed, sample_idx), site_key(site))
}
