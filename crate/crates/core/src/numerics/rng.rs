//! Seeded random numbers: xoshiro256++ 1.0 (public-domain reference algorithm)
//! seeded through SplitMix64, Gaussians via Box-Muller.
//!
//! Hand-rolled so that streams are bit-identical across platforms and the
//! sweep harness can derive independent child streams from (seed, grid,
//! replicate) coordinates alone.

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN_GAMMA);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub struct Rng {
    s: [u64; 4],
    spare_normal: Option<f64>,
}

impl Rng {
    pub fn seed_from_u64(seed: u64) -> Self {
        let mut sm = seed;
        let s = [
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
        ];
        Rng { s, spare_normal: None }
    }

    /// Deterministic child seed for job (a, b) under a root seed; used by the
    /// sweep harness so replicates are reproducible independently of
    /// scheduling order.
    pub fn derive_seed(root: u64, a: u64, b: u64) -> u64 {
        let mut sm = root;
        let x = splitmix64(&mut sm);
        let mut sm2 = x ^ a.wrapping_mul(GOLDEN_GAMMA);
        let y = splitmix64(&mut sm2);
        let mut sm3 = y ^ b.wrapping_mul(0xd1b5_4a32_d192_ed03);
        splitmix64(&mut sm3)
    }

    pub fn child(&self, a: u64, b: u64) -> Rng {
        Rng::seed_from_u64(Self::derive_seed(self.s[0], a, b))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[0]
            .wrapping_add(s[3])
            .rotate_left(23)
            .wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform on [0, 1) with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, n). n must be positive.
    pub fn uniform_below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        // Multiply-shift; bias is < 2^-53 per draw, irrelevant at desk scale.
        let u = self.uniform();
        let k = (u * n as f64) as usize;
        k.min(n - 1)
    }

    /// Standard normal via Box-Muller; the paired draw is cached.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // u1 in (0, 1] so the log is finite.
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn fill_normal(&mut self, out: &mut [f64]) {
        for v in out {
            *v = self.normal();
        }
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.uniform_below(i + 1);
            xs.swap(i, j);
        }
    }

    /// Sample m distinct indices from [0, n), in random order.
    pub fn sample_distinct(&mut self, n: usize, m: usize) -> Vec<usize> {
        assert!(m <= n);
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..m {
            let j = i + self.uniform_below(n - i);
            idx.swap(i, j);
        }
        idx.truncate(m);
        idx
    }
}
