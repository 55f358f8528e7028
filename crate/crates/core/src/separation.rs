//! Iterative wavelet/shearlet separation into point-like and curve-like parts.
//!
//! Each iteration analyzes the current residual with the Haar wavelet and the
//! shearlet frame, soft-thresholds the detail coefficients at a threshold that
//! decreases linearly over the iterations, weights them per scale, synthesizes
//! both parts and removes them from the residual. Low-pass bands never enter
//! the accumulated parts, so `point + curve + residual == input` by
//! construction.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::haar::{dwt2_haar, idwt2_haar, WaveletPyramid};
use crate::image::GrayImage;
use crate::shearlet::{ShearletCoefficients, ShearletSystem};

pub const WORKING_SIZE: usize = 256;
pub const SUBBANDS: usize = 4;
pub const DEFAULT_WEIGHTS: [f64; SUBBANDS] = [0.1, 0.1, 1.5, 1.5];
/// Fraction of the largest initial detail coefficient used as the first
/// threshold when `lambda_max` is not given.
pub const AUTO_LAMBDA_FRACTION: f64 = 0.9;

/// How the two dictionaries share one iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BlockUpdate {
    /// Both dictionaries analyze the same residual and their sum is removed.
    Joint,
    /// The wavelet part is removed first and the shearlet analyzes what is left.
    Alternating,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SeparationConfig {
    pub iterations: usize,
    /// Sub-band weights ordered from low to high frequency.
    pub subband_weights: [f64; SUBBANDS],
    /// First-iteration threshold; derived from the image when `None`.
    pub lambda_max: Option<f64>,
    pub lambda_min: f64,
    pub update: BlockUpdate,
}

impl Default for SeparationConfig {
    fn default() -> Self {
        Self {
            iterations: 5,
            subband_weights: DEFAULT_WEIGHTS,
            lambda_max: None,
            lambda_min: 0.0,
            update: BlockUpdate::Alternating,
        }
    }
}

impl SeparationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("iterations must be at least 1"));
        }
        if self
            .subband_weights
            .iter()
            .any(|w| !w.is_finite() || *w < 0.0)
        {
            return Err(Error::InvalidConfig("sub-band weights must be non-negative"));
        }
        if !(self.lambda_min.is_finite() && self.lambda_min >= 0.0) {
            return Err(Error::InvalidConfig("lambda_min must be non-negative"));
        }
        if let Some(max) = self.lambda_max {
            if !(max.is_finite() && max >= self.lambda_min) {
                return Err(Error::InvalidConfig("lambda_max must be at least lambda_min"));
            }
        }
        Ok(())
    }

    /// Threshold for iteration `k` (0-based), linear from `lambda_max` to
    /// `lambda_min`.
    pub fn lambda_at(&self, lambda_max: f64, k: usize) -> f64 {
        if self.iterations == 1 {
            return lambda_max;
        }
        let t = k as f64 / (self.iterations - 1) as f64;
        lambda_max + (self.lambda_min - lambda_max) * t
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparationResult {
    /// Accumulated wavelet reconstruction.
    pub point_part: GrayImage,
    /// Accumulated shearlet reconstruction.
    pub curve_part: GrayImage,
    /// `point_part + curve_part`.
    pub combined: GrayImage,
    pub residual: GrayImage,
    /// `||r_k||_2` for `k = 0..=iterations`, starting with the input norm.
    pub residual_norms: Vec<f64>,
    /// Threshold actually used in each iteration.
    pub lambdas: Vec<f64>,
}

impl SeparationResult {
    /// Share of the separated energy carried by the wavelet part.
    pub fn point_energy_fraction(&self) -> f64 {
        let p = self.point_part.energy();
        let c = self.curve_part.energy();
        if p + c == 0.0 {
            0.0
        } else {
            p / (p + c)
        }
    }
}

/// `sign(x) * max(|x| - lambda, 0)`.
#[inline]
pub fn soft_threshold(x: f64, lambda: f64) -> f64 {
    if x > lambda {
        x - lambda
    } else if x < -lambda {
        x + lambda
    } else {
        0.0
    }
}

pub fn soft_threshold_slice(values: &mut [f64], lambda: f64) {
    for v in values {
        *v = soft_threshold(*v, lambda);
    }
}

/// Per-scale weighting of a multiscale coefficient set.
///
/// Weights are ordered from the lowest-frequency detail scale to the highest;
/// the low-pass band is always zeroed.
pub trait SubbandWeighting {
    fn weight_subbands(&mut self, weights: &[f64]) -> Result<()>;
}

impl SubbandWeighting for WaveletPyramid {
    fn weight_subbands(&mut self, weights: &[f64]) -> Result<()> {
        let levels = self.levels();
        if weights.len() != levels {
            return Err(Error::WeightCount {
                expected: levels,
                actual: weights.len(),
            });
        }
        self.approx.values_mut().fill(0.0);
        // details[0] is the finest level, i.e. the last weight.
        for (j, level) in self.details.iter_mut().enumerate() {
            let w = weights[levels - 1 - j];
            for band in level.bands_mut() {
                band.values_mut().iter_mut().for_each(|v| *v *= w);
            }
        }
        Ok(())
    }
}

impl SubbandWeighting for ShearletCoefficients {
    fn weight_subbands(&mut self, weights: &[f64]) -> Result<()> {
        let scales = self.kinds.iter().filter_map(|k| k.scale()).max().map_or(0, |s| s + 1);
        if weights.len() != scales {
            return Err(Error::WeightCount {
                expected: scales,
                actual: weights.len(),
            });
        }
        for (kind, plane) in self.kinds.iter().zip(self.planes.iter_mut()) {
            let w = kind.scale().map_or(0.0, |s| weights[s]);
            plane.values_mut().iter_mut().for_each(|v| *v *= w);
        }
        Ok(())
    }
}

/// Reusable separation engine holding the shearlet filter bank.
#[derive(Clone, Debug)]
pub struct Separator {
    system: ShearletSystem,
    config: SeparationConfig,
}

impl Separator {
    pub fn new(config: SeparationConfig) -> Result<Self> {
        Self::with_size(WORKING_SIZE, config)
    }

    /// Separator for a grid other than the 256x256 working size.
    pub fn with_size(size: usize, config: SeparationConfig) -> Result<Self> {
        config.validate()?;
        if size < 1 << SUBBANDS {
            return Err(Error::TooManyLevels {
                levels: SUBBANDS,
                size,
            });
        }
        Ok(Self {
            system: ShearletSystem::new(size, SUBBANDS)?,
            config,
        })
    }

    pub fn parallel(mut self, parallel: bool) -> Self {
        self.system = self.system.with_parallel(parallel);
        self
    }

    pub fn config(&self) -> &SeparationConfig {
        &self.config
    }

    pub fn system(&self) -> &ShearletSystem {
        &self.system
    }

    /// Default starting threshold for `img`.
    pub fn auto_lambda_max(&self, img: &GrayImage) -> Result<f64> {
        let pyr = dwt2_haar(img, SUBBANDS)?;
        let sh = self.system.analyze(img)?;
        Ok(AUTO_LAMBDA_FRACTION * pyr.max_abs_detail().max(sh.max_abs_directional()))
    }

    pub fn separate(&self, img: &GrayImage) -> Result<SeparationResult> {
        let size = self.system.size();
        if img.dims() != (size, size) {
            return Err(Error::DimensionMismatch {
                expected: (size, size),
                actual: img.dims(),
            });
        }
        let cfg = &self.config;
        let lambda_max = match cfg.lambda_max {
            Some(l) => l,
            None => self.auto_lambda_max(img)?.max(cfg.lambda_min),
        };

        let mut point = GrayImage::zeros(size, size);
        let mut curve = GrayImage::zeros(size, size);
        let mut combined = GrayImage::zeros(size, size);
        let mut residual = img.clone();
        let mut residual_norms = Vec::with_capacity(cfg.iterations + 1);
        let mut lambdas = Vec::with_capacity(cfg.iterations);
        residual_norms.push(libm::sqrt(residual.energy()));

        for k in 0..cfg.iterations {
            let lambda = cfg.lambda_at(lambda_max, k);
            lambdas.push(lambda);
            let w_k = self.wavelet_step(&residual, lambda)?;
            let s_k = match cfg.update {
                BlockUpdate::Joint => self.shearlet_step(&residual, lambda)?,
                BlockUpdate::Alternating => {
                    let partial = residual.zip_map(&w_k, |r, w| r - w);
                    self.shearlet_step(&partial, lambda)?
                }
            };
            let i_k = w_k.zip_map(&s_k, |a, b| a + b);
            point.add_assign(&w_k);
            curve.add_assign(&s_k);
            combined.add_assign(&i_k);
            residual.sub_assign(&i_k);
            residual_norms.push(libm::sqrt(residual.energy()));
        }

        Ok(SeparationResult {
            point_part: point,
            curve_part: curve,
            combined,
            residual,
            residual_norms,
            lambdas,
        })
    }

    fn wavelet_step(&self, img: &GrayImage, lambda: f64) -> Result<GrayImage> {
        let mut pyr = dwt2_haar(img, SUBBANDS)?;
        pyr.map_details(|v| soft_threshold(v, lambda));
        pyr.weight_subbands(&self.config.subband_weights)?;
        idwt2_haar(&pyr)
    }

    fn shearlet_step(&self, img: &GrayImage, lambda: f64) -> Result<GrayImage> {
        let mut coeffs = self.system.analyze(img)?;
        coeffs.map_directional(|v| soft_threshold(v, lambda));
        coeffs.weight_subbands(&self.config.subband_weights)?;
        self.system.synthesize(&coeffs)
    }
}

/// One-shot separation of a 256x256 image.
pub fn separate(img: &GrayImage, cfg: &SeparationConfig) -> Result<SeparationResult> {
    Separator::new(cfg.clone())?.separate(img)
}

/// `|point_part + curve_part|` per pixel.
pub fn combined_map(res: &SeparationResult) -> GrayImage {
    res.combined.map(f64::abs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn soft_threshold_definition() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
        assert_eq!(soft_threshold(-0.5, 1.0), 0.0);
        for x in [-4.5, -1e-9, 0.0, 2.25] {
            assert_eq!(soft_threshold(x, 0.0), x);
        }
    }

    #[test]
    fn lambda_schedule_is_linear() {
        let cfg = SeparationConfig {
            lambda_min: 1.0,
            ..SeparationConfig::default()
        };
        let lambdas: Vec<f64> = (0..5).map(|k| cfg.lambda_at(9.0, k)).collect();
        assert_eq!(lambdas, vec![9.0, 7.0, 5.0, 3.0, 1.0]);
        let single = SeparationConfig {
            iterations: 1,
            ..cfg
        };
        assert_eq!(single.lambda_at(9.0, 0), 9.0);
    }

    #[test]
    fn config_validation() {
        let bad = [
            SeparationConfig {
                iterations: 0,
                ..Default::default()
            },
            SeparationConfig {
                subband_weights: [0.1, -1.0, 1.0, 1.0],
                ..Default::default()
            },
            SeparationConfig {
                lambda_max: Some(0.5),
                lambda_min: 1.0,
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
        }
        assert!(SeparationConfig::default().validate().is_ok());
    }

    #[test]
    fn wavelet_weighting_maps_low_to_coarse() {
        let img = GrayImage::zeros(32, 32);
        let mut pyr = dwt2_haar(&img, 4).unwrap();
        pyr.details[0].horizontal.set(0, 0, 1.0); // finest
        pyr.details[3].vertical.set(0, 0, 1.0); // coarsest
        pyr.approx.set(0, 0, 5.0);
        pyr.weight_subbands(&DEFAULT_WEIGHTS).unwrap();
        assert_eq!(pyr.details[0].horizontal.get(0, 0), 1.5);
        assert_eq!(pyr.details[3].vertical.get(0, 0), 0.1);
        assert_eq!(pyr.approx.get(0, 0), 0.0);
        assert!(matches!(
            pyr.weight_subbands(&[1.0; 3]),
            Err(Error::WeightCount { expected: 4, actual: 3 })
        ));
    }

    #[test]
    fn unit_and_zero_weights() {
        let img = GrayImage::from_fn(16, 16, |x, y| (x * 3 + y * y) as f64).unwrap();
        let orig = dwt2_haar(&img, 4).unwrap();
        let mut ones = orig.clone();
        ones.weight_subbands(&[1.0; 4]).unwrap();
        assert_eq!(ones.details, orig.details);
        let mut zeros = orig.clone();
        zeros.weight_subbands(&[0.0; 4]).unwrap();
        assert_eq!(zeros.energy(), 0.0);
    }

    #[test]
    fn rejects_wrong_size() {
        let sep = Separator::with_size(32, SeparationConfig::default()).unwrap();
        assert!(matches!(
            sep.separate(&GrayImage::zeros(64, 64)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(Separator::with_size(8, SeparationConfig::default()).is_err());
    }

    #[test]
    fn zero_image_separates_to_zero() {
        let sep = Separator::with_size(32, SeparationConfig::default()).unwrap();
        let res = sep.separate(&GrayImage::zeros(32, 32)).unwrap();
        for part in [&res.point_part, &res.curve_part, &res.combined, &res.residual] {
            assert!(part.values().iter().all(|&v| v == 0.0));
        }
        assert_eq!(combined_map(&res), GrayImage::zeros(32, 32));
    }

    #[test]
    fn combined_map_is_absolute_value() {
        let sep = Separator::with_size(32, SeparationConfig::default()).unwrap();
        let mut res = sep.separate(&GrayImage::zeros(32, 32)).unwrap();
        res.combined.set(3, 4, -2.5);
        assert_eq!(combined_map(&res).get(3, 4), 2.5);
    }
}
