use std::cell::RefCell;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::grid::TorusGrid;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
    static SCRATCH: RefCell<(Vec<Complex64>, Vec<Complex64>)> = const { RefCell::new((Vec::new(), Vec::new())) };
}

fn fft_nd(data: &mut [Complex64], grid: TorusGrid, inverse: bool) {
    let n = grid.n();
    let fft = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    });
    SCRATCH.with(|s| {
        let (line, scratch) = &mut *s.borrow_mut();
        scratch.resize(fft.get_inplace_scratch_len(), Complex64::default());
        line.resize(n, Complex64::default());
        let total = grid.len();
        for axis in 0..grid.dim() {
            let stride = n.pow((grid.dim() - 1 - axis) as u32);
            if stride == 1 {
                for chunk in data.chunks_exact_mut(n) {
                    fft.process_with_scratch(chunk, scratch);
                }
                continue;
            }
            let block = stride * n;
            for base in (0..total).step_by(block) {
                for off in 0..stride {
                    let start = base + off;
                    for (j, v) in line.iter_mut().enumerate() {
                        *v = data[start + j * stride];
                    }
                    fft.process_with_scratch(line, scratch);
                    for (j, v) in line.iter().enumerate() {
                        data[start + j * stride] = *v;
                    }
                }
            }
        }
    });
}

/// Physical samples to Fourier coefficients (forward FFT divided by `n^dim`).
pub fn fft_forward(values: &[f64], grid: TorusGrid) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_nd(&mut buf, grid, false);
    let scale = 1.0 / grid.len() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
    buf
}

/// Fourier coefficients to physical samples (real part of the unnormalised
/// inverse FFT).
pub fn fft_inverse(coeffs: &[Complex64], grid: TorusGrid) -> Vec<f64> {
    let mut buf = coeffs.to_vec();
    fft_nd(&mut buf, grid, true);
    buf.into_iter().map(|c| c.re).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_2d() {
        let g = TorusGrid::new(2, 8).unwrap();
        // f = cos(x + 2y)
        let vals: Vec<f64> = (0..g.len())
            .map(|i| {
                let p = g.point(i);
                (p[0] + 2.0 * p[1]).cos()
            })
            .collect();
        let c = fft_forward(&vals, g);
        let ip = g.index_of_wavevector(&[1, 2]).unwrap();
        let im = g.index_of_wavevector(&[-1, -2]).unwrap();
        for (i, v) in c.iter().enumerate() {
            let want = if i == ip || i == im { 0.5 } else { 0.0 };
            assert!((v.re - want).abs() < 1e-14 && v.im.abs() < 1e-14);
        }
        let back = fft_inverse(&c, g);
        for (a, b) in back.iter().zip(&vals) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn axis_order_3d() {
        let g = TorusGrid::new(3, 4).unwrap();
        let vals: Vec<f64> = (0..g.len()).map(|i| g.point(i)[2].sin()).collect();
        let c = fft_forward(&vals, g);
        let ip = g.index_of_wavevector(&[0, 0, 1]).unwrap();
        assert!((c[ip].im + 0.5).abs() < 1e-14);
    }
}
