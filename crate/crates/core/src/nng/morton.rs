//! Z-order keys for quantized points and a linear-time sort over them.

use crate::error::{Error, Result};

/// Bit-interleave of a quantized `(x, y)` cell, `y` in the odd positions.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MortonKey(pub u64);

impl MortonKey {
    pub fn deinterleave(self) -> (u32, u32) {
        (compact_1by1(self.0), compact_1by1(self.0 >> 1))
    }

    /// Level of the smallest quadtree cell holding both keys: 0 when equal,
    /// otherwise `l` such that the cells of side `2^l` coincide but those of
    /// side `2^(l-1)` differ.
    pub fn common_level(self, other: MortonKey) -> u32 {
        let diff = self.0 ^ other.0;
        if diff == 0 {
            0
        } else {
            (63 - diff.leading_zeros()) / 2 + 1
        }
    }

    /// The key with its lowest `2 * level` bits cleared (the anchor of the
    /// enclosing cell at `level`).
    pub fn cell_anchor(self, level: u32) -> MortonKey {
        if level >= 32 {
            MortonKey(0)
        } else {
            MortonKey(self.0 & !((1u64 << (2 * level)) - 1))
        }
    }
}

fn spread_1by1(v: u32) -> u64 {
    let mut x = v as u64;
    x = (x | (x << 16)) & 0x0000_ffff_0000_ffff;
    x = (x | (x << 8)) & 0x00ff_00ff_00ff_00ff;
    x = (x | (x << 4)) & 0x0f0f_0f0f_0f0f_0f0f;
    x = (x | (x << 2)) & 0x3333_3333_3333_3333;
    x = (x | (x << 1)) & 0x5555_5555_5555_5555;
    x
}

fn compact_1by1(v: u64) -> u32 {
    let mut x = v & 0x5555_5555_5555_5555;
    x = (x | (x >> 1)) & 0x3333_3333_3333_3333;
    x = (x | (x >> 2)) & 0x0f0f_0f0f_0f0f_0f0f;
    x = (x | (x >> 4)) & 0x00ff_00ff_00ff_00ff;
    x = (x | (x >> 8)) & 0x0000_ffff_0000_ffff;
    x = (x | (x >> 16)) & 0x0000_0000_ffff_ffff;
    x as u32
}

pub fn morton_key(qx: u32, qy: u32, bits: u32) -> Result<MortonKey> {
    if bits == 0 || bits > 32 {
        return Err(Error::InvalidParameter(format!("morton bits must be in 1..=32, got {bits}")));
    }
    let limit = 1u64 << bits;
    if qx as u64 >= limit || qy as u64 >= limit {
        return Err(Error::InvalidParameter(format!(
            "cell ({qx}, {qy}) out of range for {bits} bits"
        )));
    }
    Ok(MortonKey(spread_1by1(qx) | (spread_1by1(qy) << 1)))
}

const DIGIT_BITS: u32 = 8;
const BUCKETS: usize = 1 << DIGIT_BITS;

/// Stable LSD radix sort; returns the permutation `perm` with
/// `keys[perm[0]] <= keys[perm[1]] <= ...`.
///
/// Only the digits below the highest set bit of the largest key are
/// processed, so keys of `2b` bits cost `ceil(2b / 8)` passes.
pub fn radix_sort(keys: &[MortonKey]) -> Vec<u32> {
    let mut perm: Vec<u32> = (0..keys.len() as u32).collect();
    let max = keys.iter().map(|k| k.0).max().unwrap_or(0);
    let used_bits = 64 - max.leading_zeros();
    let passes = used_bits.div_ceil(DIGIT_BITS);
    let mut scratch = vec![0u32; keys.len()];
    for pass in 0..passes {
        let shift = pass * DIGIT_BITS;
        let digit = |i: u32| ((keys[i as usize].0 >> shift) as usize) & (BUCKETS - 1);
        let mut counts = [0usize; BUCKETS];
        for &i in &perm {
            counts[digit(i)] += 1;
        }
        let mut total = 0;
        for c in counts.iter_mut() {
            let n = *c;
            *c = total;
            total += n;
        }
        for &i in &perm {
            let d = digit(i);
            scratch[counts[d]] = i;
            counts[d] += 1;
        }
        std::mem::swap(&mut perm, &mut scratch);
    }
    perm
}
