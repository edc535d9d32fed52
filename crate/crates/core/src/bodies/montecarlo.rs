use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ConvexBody;

const CHUNK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub volume: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Hit-or-miss volume estimate in the axis-aligned bounding box.
///
/// Each chunk of 2^16 samples draws from its own ChaCha8 stream, so the
/// result depends only on `seed` and not on the thread count.
pub fn monte_carlo_volume(body: &ConvexBody, samples: usize, seed: u64) -> MonteCarloEstimate {
    let n = body.n;
    let axial = body.support_meridian(0.0) * (1.0 + 1e-9);
    let lateral = body.support_meridian(FRAC_PI_2) * (1.0 + 1e-9);
    let chunks: Vec<usize> = (0..samples.div_ceil(CHUNK)).collect();
    let hits = crate::par::map(&chunks, |&c| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let count = CHUNK.min(samples - c * CHUNK);
        let mut hit = 0usize;
        for _ in 0..count {
            let mut perp2 = 0.0;
            for _ in 0..n - 1 {
                let x: f64 = rng.gen_range(-lateral..lateral);
                perp2 += x * x;
            }
            let z: f64 = rng.gen_range(-axial..axial);
            if body.contains_meridian(perp2.sqrt(), z) {
                hit += 1;
            }
        }
        hit
    });
    let total: usize = hits.iter().sum();
    let box_vol = (2.0 * lateral).powi(n as i32 - 1) * 2.0 * axial;
    let frac = total as f64 / samples as f64;
    MonteCarloEstimate {
        volume: box_vol * frac,
        std_error: box_vol * (frac * (1.0 - frac) / samples as f64).sqrt(),
        samples,
    }
}
