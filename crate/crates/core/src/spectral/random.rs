use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

use super::field::SpectralField;
use super::grid::TorusGrid;

/// Random real field with `|f̂_k| = amplitude·(1+|k|²)^{-decay/2}` and uniform
/// random phases, deterministic in `seed`.
///
/// Samples lie in `H^s` for every `s < decay_exponent - dim/2`; for audits of
/// a ladder pick `decay_exponent > dim/2 + s_D`.
pub fn random_field(
    grid: TorusGrid,
    components: usize,
    decay_exponent: f64,
    amplitude: f64,
    seed: u64,
) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(grid, components);
    for c in 0..components {
        let coeffs = f.comp_mut(c);
        for i in 0..grid.len() {
            let j = grid.neg_index(i);
            let phase: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            if j < i {
                continue;
            }
            let mag = amplitude * (1.0 + grid.ksq(i)).powf(-0.5 * decay_exponent);
            if i == j {
                let sign = if phase < std::f64::consts::PI { 1.0 } else { -1.0 };
                coeffs[i] = Complex64::new(sign * mag, 0.0);
            } else {
                let v = Complex64::from_polar(mag, phase);
                coeffs[i] = v;
                coeffs[j] = v.conj();
            }
        }
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_real() {
        let g = TorusGrid::new(2, 16).unwrap();
        let a = random_field(g, 2, 3.0, 1.0, 7);
        let b = random_field(g, 2, 3.0, 1.0, 7);
        assert_eq!(a, b);
        assert_ne!(a, random_field(g, 2, 3.0, 1.0, 8));
        assert_eq!(a.hermitian_defect(), 0.0);
        assert!(random_field(g, 1, 3.0, 0.0, 1).is_zero());
    }

    #[test]
    fn spectrum_slope() {
        let g = TorusGrid::new(2, 64).unwrap();
        let decay = 4.5;
        let f = random_field(g, 1, decay, 2.0, 11);
        // least squares of log|f̂| against log(1+|k|²)
        let (mut sx, mut sy, mut sxx, mut sxy, mut n) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 1..g.len() {
            let x = (1.0 + g.ksq(i)).ln();
            let y = f.comp(0)[i].norm().ln();
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            n += 1.0;
        }
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        assert!((-2.0 * slope - decay).abs() < 0.05 * decay);
    }
}
