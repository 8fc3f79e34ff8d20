//! Counter-based random numbers.
//!
//! Sampling draws one uniform phase per (ordinate, sample) pair. To make
//! batches reproducible independently of thread count, the generator is
//! stateless: every variate is a hash of `(seed, stream, counter)`. Streams
//! are assigned to ordinate indices so that parallel reductions over samples
//! (or over ordinates) produce identical draws in any schedule.

/// SplitMix64 finalizer. Full-period bijective mixer on `u64`.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash of a `(seed, stream, counter)` triple.
#[inline]
pub fn hash3(seed: u64, stream: u64, counter: u64) -> u64 {
    let a = mix64(seed ^ 0x243F_6A88_85A3_08D3);
    let b = mix64(a ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    mix64(b ^ counter.wrapping_mul(0xC2B2_AE3D_27D4_EB4F))
}

/// Uniform variate in `[0, 1)` from a `(seed, stream, counter)` triple.
#[inline]
pub fn u01(seed: u64, stream: u64, counter: u64) -> f64 {
    // 53 high bits -> [0,1)
    (hash3(seed, stream, counter) >> 11) as f64 * (1.0 / 9007199254740992.0)
}

/// Sequential convenience stream over a fixed `(seed, stream)` pair.
#[derive(Debug, Clone)]
pub struct CounterRng {
    seed: u64,
    stream: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        CounterRng {
            seed,
            stream,
            counter: 0,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let v = hash3(self.seed, self.stream, self.counter);
        self.counter += 1;
        v
    }

    #[inline]
    pub fn next_u01(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Uniform on `[lo, hi)`.
    #[inline]
    pub fn next_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_u01()
    }
}

/// Per-sample key for the bulk phase generator.
///
/// The bulk path hashes 32-bit lane counters with two multiply-xor rounds so
/// the inner sampling loop vectorizes; the key itself mixes the full 64-bit
/// `(seed, sample)` pair, so distinct samples get unrelated lane sequences.
#[derive(Debug, Clone, Copy)]
pub struct SampleKey(pub u32);

impl SampleKey {
    #[inline]
    pub fn new(seed: u64, sample: u64) -> Self {
        let k = hash3(seed, 0x5EED_5EED, sample);
        SampleKey((k ^ (k >> 32)) as u32)
    }
}

/// Murmur3-style 32-bit finalizer.
#[inline(always)]
fn fmix32(mut h: u32) -> u32 {
    h ^= h >> 16;
    h = h.wrapping_mul(0x85EB_CA6B);
    h ^= h >> 13;
    h = h.wrapping_mul(0xC2B2_AE35);
    h ^ (h >> 16)
}

/// Uniform `[0,1)` phase for ordinate `j` under a sample key. Vectorizable.
#[inline(always)]
pub fn bulk_u01(key: SampleKey, j: u32) -> f32 {
    let h = fmix32(fmix32(j.wrapping_mul(0x9E37_79B9) ^ key.0).wrapping_add(0x1656_67B1));
    // 24 high bits -> [0,1)
    (h >> 8) as f32 * (1.0 / 16777216.0)
}

/// cos(2*pi*u) for u in [0,1), accurate to ~5e-7 absolute. Vectorizable.
///
/// Quadrant folding to |x| <= 1/4 followed by the even Taylor polynomial of
/// cos in w = (2*pi*x)^2 through w^6 (next omitted term < 7e-9 on the range).
#[inline(always)]
pub fn cos_two_pi(u: f32) -> f32 {
    // fold to x in [-0.5, 0.5]; cos(2pi u) = -cos(2pi x)
    let x = (u - 0.5).abs();
    let outer = (x > 0.25) as i32 as f32; // 1 on the outer band
    let xf = outer * (0.5 - x) + (1.0 - outer) * x;
    let sign = 1.0 - 2.0 * outer; // reflection flips the cosine sign
    let tau = 2.0 * std::f32::consts::PI;
    let w = (xf * tau) * (xf * tau);
    let c = 1.0
        + w * (-0.5
            + w * (4.166_666_8e-2
                + w * (-1.388_888_9e-3
                    + w * (2.480_158_7e-5 + w * (-2.755_731_9e-7 + w * 2.087_675_7e-9)))));
    -(sign * c)
}

/// cos(2*pi*u) in f64 for u in [0,1), absolute error below ~2e-14.
///
/// Same quadrant folding as the f32 path with the Taylor polynomial carried
/// through w^10 (next omitted term < 4e-15 on the folded range).
#[inline(always)]
pub fn cos_two_pi_f64(u: f64) -> f64 {
    let x = (u - 0.5).abs();
    let outer = (x > 0.25) as i32 as f64;
    let xf = outer * (0.5 - x) + (1.0 - outer) * x;
    let sign = 1.0 - 2.0 * outer;
    let tau = std::f64::consts::TAU;
    let w = (xf * tau) * (xf * tau);
    let c = 1.0
        + w * (-0.5
            + w * (4.166_666_666_666_666e-2
                + w * (-1.388_888_888_888_889e-3
                    + w * (2.480_158_730_158_73e-5
                        + w * (-2.755_731_922_398_589e-7
                            + w * (2.087_675_698_786_81e-9
                                + w * (-1.147_074_559_772_972e-11
                                    + w * (4.779_477_332_387_385e-14
                                        + w * (-1.561_920_696_858_623e-16
                                            + w * 4.110_317_623_312_165e-19)))))))));
    -(sign * c)
}
