//! Radix-2 complex FFT for square power-of-two grids.
//!
//! Kept in-crate so the transforms build without `std`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

/// Precomputed twiddles and bit-reversal permutation for one length.
#[derive(Clone, Debug)]
pub struct FftPlan {
    n: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl FftPlan {
    /// # Panics
    /// If `n` is not a power of two.
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two(), "FFT length must be a power of two");
        let bits = n.trailing_zeros();
        let bitrev = (0..n)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        let twiddles = (0..n / 2)
            .map(|k| {
                let theta = -2.0 * PI * k as f64 / n as f64;
                Complex64::new(libm::cos(theta), libm::sin(theta))
            })
            .collect();
        Self {
            n,
            twiddles,
            bitrev,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Unnormalized forward transform, `X[k] = sum x[j] e^{-2 pi i jk/n}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, false);
    }

    /// Unnormalized inverse transform (positive exponent, no `1/n`).
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, true);
    }

    fn run(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        assert_eq!(data.len(), n);
        for i in 0..n {
            let j = self.bitrev[i];
            if j > i {
                data.swap(i, j);
            }
        }
        let mut half = 1;
        while half < n {
            let stride = n / (2 * half);
            for start in (0..n).step_by(2 * half) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            half *= 2;
        }
    }
}

/// Two-dimensional FFT on an `n x n` row-major grid.
#[derive(Clone, Debug)]
pub struct Fft2 {
    plan: FftPlan,
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        Self {
            plan: FftPlan::new(n),
        }
    }

    pub fn size(&self) -> usize {
        self.plan.len()
    }

    pub fn forward(&self, grid: &mut [Complex64]) {
        self.apply(grid, false);
    }

    /// Inverse transform including the `1/n^2` normalization.
    pub fn inverse(&self, grid: &mut [Complex64]) {
        self.apply(grid, true);
        let scale = 1.0 / (grid.len() as f64);
        for v in grid.iter_mut() {
            *v *= scale;
        }
    }

    /// Forward transform of a real grid.
    pub fn forward_real(&self, values: &[f64]) -> Vec<Complex64> {
        let mut grid: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&mut grid);
        grid
    }

    fn apply(&self, grid: &mut [Complex64], inverse: bool) {
        let n = self.plan.len();
        assert_eq!(grid.len(), n * n, "grid is not {n}x{n}");
        for row in grid.chunks_exact_mut(n) {
            self.plan.run(row, inverse);
        }
        let mut column = vec![Complex64::new(0.0, 0.0); n];
        for x in 0..n {
            for y in 0..n {
                column[y] = grid[y * n + x];
            }
            self.plan.run(&mut column, inverse);
            for y in 0..n {
                grid[y * n + x] = column[y];
            }
        }
    }
}

/// Index of the frequency `-k` on a length-`n` periodic grid.
#[inline]
pub fn mirror_index(k: usize, n: usize) -> usize {
    (n - k) % n
}

/// Signed frequency represented by grid index `k` (`-n/2 ..= n/2 - 1`).
#[inline]
pub fn signed_frequency(k: usize, n: usize) -> f64 {
    if k < n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}
