#![allow(dead_code)]

use chromadapt::{builtin_cmf, normalize_illuminant, Illuminant, Spectrum, N_BANDS};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A strictly positive illuminant whose log is a random walk over the bands.
pub fn random_illuminant(rng: &mut ChaCha8Rng) -> Illuminant {
    let mut g = 0.0f64;
    let raw: [f64; N_BANDS] = std::array::from_fn(|_| {
        g += rng.random_range(-0.52..0.52);
        g.exp()
    });
    normalize_illuminant(&Spectrum::new(raw).unwrap(), &builtin_cmf()).unwrap()
}

/// A smooth reflectance in [0.02, 0.98]: one to three Gaussian bumps.
pub fn random_reflectance(rng: &mut ChaCha8Rng) -> Spectrum {
    let bumps: Vec<(f64, f64, f64)> = (0..rng.random_range(1..=3))
        .map(|_| (rng.random_range(0.0..1.0), rng.random_range(0.0..35.0), rng.random_range(1.0..10.0)))
        .collect();
    let raw: [f64; N_BANDS] = std::array::from_fn(|i| {
        bumps.iter().map(|(a, c, s)| a * (-0.5 * ((i as f64 - c) / s).powi(2)).exp()).sum::<f64>()
    });
    let peak = raw.iter().cloned().fold(0.0, f64::max);
    let level = rng.random_range(0.05..1.0);
    Spectrum::new(raw.map(|v| 0.02 + 0.96 * level * v / peak)).unwrap()
}
