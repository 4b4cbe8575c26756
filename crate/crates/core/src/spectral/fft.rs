//! Separable 3-D FFT over the grid's row-major layout.

use num_complex::Complex64;

use super::grid::Grid;
use crate::par;

/// Lines handed to rustfft per task along the contiguous axis.
const LINES_PER_TASK: usize = 64;

/// In-place unnormalized 3-D transform. `inverse` selects the `+i` sign.
pub(crate) fn fft3(grid: &Grid, data: &mut [Complex64], inverse: bool) {
    assert_eq!(data.len(), grid.len());
    let [n1, n2, n3] = grid.n();

    // axis 3 is contiguous
    let fft = grid.fft(2, inverse).clone();
    par::for_each_chunk_mut(data, n3 * LINES_PER_TASK, |_, chunk| fft.process(chunk));

    strided_axis(grid, data, 1, n1, n2, n3, inverse);
    strided_axis(grid, data, 0, 1, n1, n2 * n3, inverse);
}

/// Transforms along an axis viewed as `[outer][len][inner]` by gathering the
/// lines into a contiguous buffer, transforming, and scattering back.
fn strided_axis(
    grid: &Grid,
    data: &mut [Complex64],
    axis: usize,
    outer: usize,
    len: usize,
    inner: usize,
    inverse: bool,
) {
    let fft = grid.fft(axis, inverse).clone();
    let mut lines = vec![Complex64::new(0.0, 0.0); outer * len * inner];
    {
        let src: &[Complex64] = data;
        par::for_each_chunk_mut(&mut lines, len, |line, out| {
            let o = line / inner;
            let c = line % inner;
            let base = o * len * inner + c;
            for (i, v) in out.iter_mut().enumerate() {
                *v = src[base + i * inner];
            }
        });
    }
    par::for_each_chunk_mut(&mut lines, len * LINES_PER_TASK, |_, chunk| fft.process(chunk));
    let lines = &lines;
    par::for_each_chunk_mut(data, inner, |row, out| {
        let o = row / len;
        let i = row % len;
        for (c, v) in out.iter_mut().enumerate() {
            *v = lines[(o * inner + c) * len + i];
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn matches_direct_dft_on_small_grid() {
        let grid = Grid::new([8, 10, 12]).unwrap();
        let [n1, n2, n3] = grid.n();
        let data: Vec<Complex64> = (0..grid.len())
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut fast = data.clone();
        fft3(&grid, &mut fast, false);
        for &probe in &[0usize, 17, 333, grid.len() - 1] {
            let [k1, k2, k3] = grid.unravel(probe);
            let mut acc = Complex64::new(0.0, 0.0);
            for (idx, v) in data.iter().enumerate() {
                let [x1, x2, x3] = grid.unravel(idx);
                let ang = -2.0
                    * PI
                    * ((k1 * x1) as f64 / n1 as f64
                        + (k2 * x2) as f64 / n2 as f64
                        + (k3 * x3) as f64 / n3 as f64);
                acc += v * Complex64::new(ang.cos(), ang.sin());
            }
            assert!((acc - fast[probe]).norm() < 1e-9);
        }
    }

    #[test]
    fn inverse_undoes_forward() {
        let grid = Grid::cubic(8).unwrap();
        let data: Vec<Complex64> = (0..grid.len())
            .map(|i| Complex64::new(i as f64, -(i as f64) * 0.5))
            .collect();
        let mut work = data.clone();
        fft3(&grid, &mut work, false);
        fft3(&grid, &mut work, true);
        let scale = grid.len() as f64;
        for (a, b) in work.iter().zip(&data) {
            assert!((a / scale - b).norm() < 1e-10);
        }
    }
}
