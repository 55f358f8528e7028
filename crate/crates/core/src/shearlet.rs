//! Band-limited cone-adapted shearlet frame on a periodic `n x n` grid.
//!
//! Every filter is a real, non-negative window in the frequency domain:
//!
//! * one low-pass scaling window covering the coarsest square of frequencies;
//! * for each scale `j` a radial band (Meyer-type, dyadic in the sup-norm of
//!   the frequency) multiplied by an angular window on the horizontal cone
//!   (`|xi_2| <= |xi_1|`, indexed by the slope `xi_2 / xi_1`) or the vertical
//!   cone (slope `xi_1 / xi_2`). Shear `k` centres the angular window at slope
//!   `k / n_j` with `n_j = ceil(2^(j/2))` and `|k| <= n_j`, which is the
//!   parabolic shear range of the continuous system.
//!
//! Angular windows of neighbouring shears overlap smoothly; the two seam
//! windows `k = +-n_j` of each cone extend across the diagonal. After the raw
//! windows are built each filter is divided by `sqrt(sum of squares)` at every
//! grid frequency, so `sum_f |filter_f(xi)|^2 = 1` holds to rounding and
//! analysis followed by synthesis is the identity.
//!
//! All filters satisfy `h(xi) = h(-xi)` on the grid, so the undecimated
//! coefficients of a real image are real.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{mirror_index, signed_frequency, Fft2};
use crate::image::GrayImage;

/// Frequency cone a directional filter lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cone {
    /// `|xi_2| <= |xi_1|`: responds to structure varying along x.
    Horizontal,
    /// `|xi_1| <= |xi_2|`.
    Vertical,
}

impl Cone {
    pub fn index(self) -> usize {
        match self {
            Cone::Horizontal => 0,
            Cone::Vertical => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FilterKind {
    Scaling,
    Directional { scale: usize, cone: Cone, shear: i32 },
}

impl FilterKind {
    pub fn scale(&self) -> Option<usize> {
        match self {
            FilterKind::Scaling => None,
            FilterKind::Directional { scale, .. } => Some(*scale),
        }
    }

    /// File stem used when dumping coefficient planes.
    pub fn label(&self) -> alloc::string::String {
        match self {
            FilterKind::Scaling => "shear_lowpass".into(),
            FilterKind::Directional { scale, cone, shear } => {
                alloc::format!("shear_j{scale}_c{}_k{shear}", cone.index())
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ShearletFilter {
    pub kind: FilterKind,
    /// Frequency response on the unshifted FFT grid, row-major.
    pub response: Vec<f64>,
}

/// Meyer auxiliary function: 0 below 0, 1 above 1, and
/// `nu(x) + nu(1 - x) = 1`.
pub fn meyer_aux(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        x * x * x * x * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x * x * x)
    }
}

/// Smooth low-pass: 1 up to `a`, 0 from `2a`, cosine taper in between.
fn meyer_lowpass(r: f64, a: f64) -> f64 {
    if r <= a {
        1.0
    } else if r >= 2.0 * a {
        0.0
    } else {
        libm::cos(FRAC_PI_2 * meyer_aux(r / a - 1.0))
    }
}

/// Angular bump on `(-1, 1)` with `V(u)^2 + V(u - 1)^2 = 1` on `[0, 1]`.
fn angular_bump(u: f64) -> f64 {
    let u = u.abs();
    if u >= 1.0 {
        0.0
    } else {
        libm::cos(FRAC_PI_2 * meyer_aux(u))
    }
}

/// Number of shears on each side of zero at scale `j`: `ceil(2^(j/2))`.
pub fn shear_range(scale: usize) -> i32 {
    libm::ceil(libm::pow(2.0, scale as f64 / 2.0)) as i32
}

/// Precomputed shearlet filter bank. Immutable once built.
#[derive(Clone, Debug)]
pub struct ShearletSystem {
    size: usize,
    scales: usize,
    filters: Vec<ShearletFilter>,
    fft: Fft2,
    parallel: bool,
}

/// Undecimated coefficients, one plane per filter of the generating system.
#[derive(Clone, Debug, PartialEq)]
pub struct ShearletCoefficients {
    pub kinds: Vec<FilterKind>,
    pub planes: Vec<GrayImage>,
}

impl ShearletCoefficients {
    pub fn iter(&self) -> impl Iterator<Item = (&FilterKind, &GrayImage)> {
        self.kinds.iter().zip(&self.planes)
    }

    pub fn map_directional(&mut self, f: impl Fn(f64) -> f64) {
        for (kind, plane) in self.kinds.iter().zip(self.planes.iter_mut()) {
            if kind.scale().is_some() {
                for v in plane.values_mut() {
                    *v = f(*v);
                }
            }
        }
    }

    pub fn max_abs_directional(&self) -> f64 {
        self.iter()
            .filter(|(k, _)| k.scale().is_some())
            .flat_map(|(_, p)| p.values().iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl ShearletSystem {
    /// Builds the filter bank for an `size x size` grid with `scales`
    /// directional scales.
    pub fn new(size: usize, scales: usize) -> Result<Self> {
        if size < 2 || !size.is_power_of_two() {
            return Err(Error::NotPowerOfTwoSquare {
                width: size,
                height: size,
            });
        }
        if scales == 0 || scales > 16 {
            return Err(Error::InvalidConfig("shearlet scales must be in 1..=16"));
        }
        let n = size;
        let half = (n / 2) as f64;
        // Radial cut-offs: the scaling window is flat up to a[0], band j
        // spans (a[j], 2 a[j+1]) and the finest band reaches the Nyquist edge.
        let cut: Vec<f64> = (0..scales)
            .map(|j| half * libm::pow(2.0, j as f64 - scales as f64 - 1.0))
            .collect();

        let mut filters = Vec::new();
        let mut scaling = vec![0.0; n * n];
        for (idx, v) in scaling.iter_mut().enumerate() {
            let (fx, fy) = grid_frequency(idx, n);
            *v = meyer_lowpass(fx.abs().max(fy.abs()), cut[0]);
        }
        filters.push(ShearletFilter {
            kind: FilterKind::Scaling,
            response: scaling,
        });

        for scale in 0..scales {
            let band: Vec<f64> = (0..n * n)
                .map(|idx| {
                    let (fx, fy) = grid_frequency(idx, n);
                    let r = fx.abs().max(fy.abs());
                    let inner = meyer_lowpass(r, cut[scale]);
                    let outer = if scale + 1 < scales {
                        meyer_lowpass(r, cut[scale + 1])
                    } else {
                        1.0
                    };
                    libm::sqrt((outer * outer - inner * inner).max(0.0))
                })
                .collect();
            let shears = shear_range(scale);
            for cone in [Cone::Horizontal, Cone::Vertical] {
                for shear in -shears..=shears {
                    let response = band
                        .iter()
                        .enumerate()
                        .map(|(idx, &radial)| {
                            if radial == 0.0 {
                                return 0.0;
                            }
                            let (fx, fy) = grid_frequency(idx, n);
                            let (along, across) = match cone {
                                Cone::Horizontal => (fx, fy),
                                Cone::Vertical => (fy, fx),
                            };
                            if along == 0.0 {
                                return 0.0;
                            }
                            let slope = across / along;
                            radial * angular_bump(shears as f64 * slope - shear as f64)
                        })
                        .collect();
                    filters.push(ShearletFilter {
                        kind: FilterKind::Directional { scale, cone, shear },
                        response,
                    });
                }
            }
        }

        normalize(&mut filters, n);
        Ok(Self {
            size,
            scales,
            filters,
            fft: Fft2::new(n),
            parallel: false,
        })
    }

    /// Enables per-filter parallel analysis/synthesis. Output is bit-identical
    /// either way; the flag only has an effect with the `rayon` feature.
    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn scales(&self) -> usize {
        self.scales
    }

    pub fn filters(&self) -> &[ShearletFilter] {
        &self.filters
    }

    pub fn kinds(&self) -> Vec<FilterKind> {
        self.filters.iter().map(|f| f.kind).collect()
    }

    pub fn fft(&self) -> &Fft2 {
        &self.fft
    }

    /// `sum_f |filter_f(xi)|^2` at every grid frequency.
    pub fn frame_sum(&self) -> Vec<f64> {
        let mut sum = vec![0.0; self.size * self.size];
        for f in &self.filters {
            for (s, h) in sum.iter_mut().zip(&f.response) {
                *s += h * h;
            }
        }
        sum
    }

    fn check_image(&self, img: &GrayImage) -> Result<()> {
        if img.dims() != (self.size, self.size) {
            return Err(Error::DimensionMismatch {
                expected: (self.size, self.size),
                actual: img.dims(),
            });
        }
        Ok(())
    }

    /// Filter index pairs processed together through one complex FFT.
    fn pairs(&self) -> Vec<(usize, Option<usize>)> {
        (0..self.filters.len())
            .step_by(2)
            .map(|i| (i, (i + 1 < self.filters.len()).then_some(i + 1)))
            .collect()
    }

    /// Circular convolution of `img` with every filter.
    pub fn analyze(&self, img: &GrayImage) -> Result<ShearletCoefficients> {
        self.check_image(img)?;
        let spectrum = self.fft.forward_real(img.values());
        let planes_per_pair = self.map_pairs(|pair| self.analyze_pair(&spectrum, pair));
        let mut planes = Vec::with_capacity(self.filters.len());
        for (first, second) in planes_per_pair {
            planes.push(first);
            planes.extend(second);
        }
        Ok(ShearletCoefficients {
            kinds: self.kinds(),
            planes,
        })
    }

    fn analyze_pair(
        &self,
        spectrum: &[Complex64],
        (p, q): (usize, Option<usize>),
    ) -> (GrayImage, Option<GrayImage>) {
        let n = self.size;
        let hp = &self.filters[p].response;
        let mut grid: Vec<Complex64> = match q {
            Some(q) => {
                let hq = &self.filters[q].response;
                spectrum
                    .iter()
                    .zip(hp.iter().zip(hq))
                    .map(|(s, (&a, &b))| s * Complex64::new(a, b))
                    .collect()
            }
            None => spectrum.iter().zip(hp).map(|(s, &a)| s * a).collect(),
        };
        self.fft.inverse(&mut grid);
        let first = plane(n, grid.iter().map(|c| c.re).collect());
        let second = q.map(|_| plane(n, grid.iter().map(|c| c.im).collect()));
        (first, second)
    }

    /// Adjoint of [`analyze`](Self::analyze); inverts it exactly because the
    /// filters form a tight frame.
    pub fn synthesize(&self, coeffs: &ShearletCoefficients) -> Result<GrayImage> {
        if coeffs.planes.len() != self.filters.len()
            || coeffs
                .kinds
                .iter()
                .zip(&self.filters)
                .any(|(k, f)| *k != f.kind)
        {
            return Err(Error::ShapeMismatch);
        }
        for p in &coeffs.planes {
            self.check_image(p).map_err(|_| Error::ShapeMismatch)?;
        }
        let contributions = self.map_pairs(|pair| self.synthesize_pair(coeffs, pair));
        let mut acc = vec![Complex64::new(0.0, 0.0); self.size * self.size];
        for contribution in contributions {
            for (a, c) in acc.iter_mut().zip(contribution) {
                *a += c;
            }
        }
        self.fft.inverse(&mut acc);
        Ok(plane(self.size, acc.iter().map(|c| c.re).collect()))
    }

    fn synthesize_pair(
        &self,
        coeffs: &ShearletCoefficients,
        (p, q): (usize, Option<usize>),
    ) -> Vec<Complex64> {
        let n = self.size;
        let hp = &self.filters[p].response;
        let mut grid: Vec<Complex64> = match q {
            Some(q) => coeffs.planes[p]
                .values()
                .iter()
                .zip(coeffs.planes[q].values())
                .map(|(&a, &b)| Complex64::new(a, b))
                .collect(),
            None => coeffs.planes[p]
                .values()
                .iter()
                .map(|&a| Complex64::new(a, 0.0))
                .collect(),
        };
        self.fft.forward(&mut grid);
        let Some(q) = q else {
            return grid.iter().zip(hp).map(|(z, &h)| z * h).collect();
        };
        let hq = &self.filters[q].response;
        // Split Z = P + iQ into the spectra of the two real planes using
        // P(xi) = (Z(xi) + conj Z(-xi)) / 2 and Q(xi) = (Z(xi) - conj Z(-xi)) / 2i.
        (0..n * n)
            .map(|idx| {
                let (x, y) = (idx % n, idx / n);
                let z = grid[idx];
                let zm = grid[mirror_index(y, n) * n + mirror_index(x, n)].conj();
                let sp = (z + zm) * 0.5;
                let sq = (z - zm) * Complex64::new(0.0, -0.5);
                sp * hp[idx] + sq * hq[idx]
            })
            .collect()
    }

    #[cfg(feature = "rayon")]
    fn map_pairs<T: Send>(&self, f: impl Fn((usize, Option<usize>)) -> T + Sync + Send) -> Vec<T> {
        use rayon::prelude::*;
        let pairs = self.pairs();
        if self.parallel {
            pairs.into_par_iter().map(f).collect()
        } else {
            pairs.into_iter().map(f).collect()
        }
    }

    #[cfg(not(feature = "rayon"))]
    fn map_pairs<T>(&self, f: impl Fn((usize, Option<usize>)) -> T) -> Vec<T> {
        self.pairs().into_iter().map(f).collect()
    }
}

fn plane(n: usize, values: Vec<f64>) -> GrayImage {
    GrayImage::new(n, n, values).expect("FFT output is finite")
}

/// Signed `(xi_1, xi_2)` for a row-major grid index (`xi_1` along x).
fn grid_frequency(idx: usize, n: usize) -> (f64, f64) {
    (signed_frequency(idx % n, n), signed_frequency(idx / n, n))
}

/// Symmetrizes every filter under `xi -> -xi` and rescales the bank so the
/// squared responses sum to one at every grid frequency.
fn normalize(filters: &mut [ShearletFilter], n: usize) {
    // The Nyquist row/column maps to itself under negation on the grid while
    // the windows see it as +n/2 on one side only; averaging the squared
    // responses with the mirror makes every filter exactly even.
    for f in filters.iter_mut() {
        let sq: Vec<f64> = f.response.iter().map(|h| h * h).collect();
        for (idx, h) in f.response.iter_mut().enumerate() {
            let (x, y) = (idx % n, idx / n);
            let mirror = mirror_index(y, n) * n + mirror_index(x, n);
            *h = libm::sqrt(0.5 * (sq[idx] + sq[mirror]));
        }
    }
    let mut total = vec![0.0; n * n];
    for f in filters.iter() {
        for (t, h) in total.iter_mut().zip(&f.response) {
            *t += h * h;
        }
    }
    let scale: Vec<f64> = total.iter().map(|t| 1.0 / libm::sqrt(*t)).collect();
    for f in filters.iter_mut() {
        for (h, s) in f.response.iter_mut().zip(&scale) {
            *h *= s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn meyer_aux_is_antisymmetric_about_half() {
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            assert!((meyer_aux(x) + meyer_aux(1.0 - x) - 1.0).abs() < 1e-12);
        }
        assert_eq!(meyer_aux(-0.3), 0.0);
        assert_eq!(meyer_aux(1.7), 1.0);
    }

    #[test]
    fn angular_windows_partition_unity() {
        for i in 0..=40 {
            let u = i as f64 / 40.0;
            let s = angular_bump(u).powi(2) + angular_bump(u - 1.0).powi(2);
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn shear_ranges() {
        let ranges: Vec<i32> = (0..6).map(shear_range).collect();
        assert_eq!(ranges, [1, 2, 2, 3, 4, 6]);
    }

    #[test]
    fn labels() {
        let k = FilterKind::Directional {
            scale: 2,
            cone: Cone::Vertical,
            shear: -1,
        };
        assert_eq!(k.label(), "shear_j2_c1_k-1");
        assert_eq!(FilterKind::Scaling.label(), "shear_lowpass");
    }

    #[test]
    fn filters_are_even() {
        let sys = ShearletSystem::new(32, 3).unwrap();
        let n = 32;
        for f in sys.filters() {
            for idx in 0..n * n {
                let (x, y) = (idx % n, idx / n);
                let m = mirror_index(y, n) * n + mirror_index(x, n);
                assert_eq!(f.response[idx], f.response[m]);
            }
        }
    }

    #[test]
    fn rejects_invalid_sizes() {
        assert!(ShearletSystem::new(48, 2).is_err());
        assert!(ShearletSystem::new(1, 2).is_err());
        assert!(ShearletSystem::new(64, 0).is_err());
        let sys = ShearletSystem::new(16, 2).unwrap();
        assert!(matches!(
            sys.analyze(&GrayImage::zeros(8, 8)),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
