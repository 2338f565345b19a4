//! Order-4 LPC on a noise-driven AR(4) process: the recovered predictor,
//! the reflection coefficients, and how much flatter the residual spectrum is.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crysift::dsp::{self, hamming};

pub fn main() {
    let truth = [1.3, -1.1, 0.6, -0.25];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut x = vec![0.0f64; 8192];
    for n in 4..x.len() {
        let e: f64 = StandardNormal.sample(&mut rng);
        x[n] = e + (0..4).map(|k| truth[k] * x[n - 1 - k]).sum::<f64>();
    }
    let w = hamming(x.len());
    let windowed: Vec<f64> = x.iter().zip(&w).map(|(a, b)| a * b).collect();

    let r = dsp::normalized_autocorrelation(&windowed, 4).unwrap();
    let model = dsp::levinson_durbin(&r, 4).unwrap();
    println!("true predictor      {truth:?}");
    println!(
        "estimated predictor {:?}",
        model
            .coefficients
            .iter()
            .map(|a| (a * 1e3).round() / 1e3)
            .collect::<Vec<_>>()
    );
    println!(
        "reflections         {:?}",
        model
            .reflection_coefficients
            .iter()
            .map(|k| (k * 1e3).round() / 1e3)
            .collect::<Vec<_>>()
    );
    println!("prediction error    {:.4}", model.prediction_error);

    let residual = dsp::inverse_filter(&windowed, &model).unwrap();
    println!(
        "spectral flatness   input {:.4}, residual {:.4}",
        dsp::spectral_flatness(&windowed),
        dsp::spectral_flatness(&residual)
    );
}
