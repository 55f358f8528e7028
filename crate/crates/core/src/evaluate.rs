//! Rectangle-matching scores for detections against ground truth.
//!
//! The match between two rectangles is the area of their intersection divided
//! by the area of the smallest box enclosing both. Recall averages the best
//! match of every target over the estimates, precision the best match of
//! every estimate over the targets.
//!
//! Block counts follow the usual caption-detection bookkeeping: every target
//! is an actual text block (ATB); an estimate overlapping some target is a
//! true detected block (TDB), otherwise a false one (FDB); a TDB covering less
//! than `tau_full` of its best target's area is a block with missing data
//! (MDB). Character-level truth is not available, so MDB is a coverage proxy.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::image::Rect;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalConfig {
    /// Precision weight of the f-measure.
    pub alpha: f64,
    /// An estimate is a true detection when its best match exceeds this.
    pub tau_detect: f64,
    /// A true detection covering less than this fraction of its target's
    /// area misses data.
    pub tau_full: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            tau_detect: 0.0,
            tau_full: 0.9,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidConfig("alpha must lie in [0, 1]"));
        }
        if !(0.0 <= self.tau_detect && self.tau_detect <= self.tau_full && self.tau_full <= 1.0) {
            return Err(Error::InvalidConfig("need 0 <= tau_detect <= tau_full <= 1"));
        }
        Ok(())
    }
}

/// Ground truth and detections of one frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalPair {
    pub frame: String,
    pub targets: Vec<Rect>,
    pub estimates: Vec<Rect>,
}

pub fn match_score(a: &Rect, b: &Rect) -> f64 {
    let inter = a.intersection_area(b);
    if inter == 0 {
        return 0.0;
    }
    inter as f64 / a.union(b).area() as f64
}

/// Best match of `r` within `set`; 0 for an empty set.
pub fn best_match(r: &Rect, set: &[Rect]) -> f64 {
    set.iter().map(|s| match_score(r, s)).fold(0.0, f64::max)
}

fn match_sum(from: &[Rect], to: &[Rect]) -> f64 {
    from.iter().map(|r| best_match(r, to)).sum()
}

pub fn recall(pair: &EvalPair) -> Result<f64> {
    if pair.targets.is_empty() {
        return Err(Error::EmptyTargets);
    }
    Ok(match_sum(&pair.targets, &pair.estimates) / pair.targets.len() as f64)
}

/// Precision of a frame; 0 when there are no estimates.
pub fn precision(pair: &EvalPair) -> Result<f64> {
    if pair.targets.is_empty() {
        return Err(Error::EmptyTargets);
    }
    if pair.estimates.is_empty() {
        return Ok(0.0);
    }
    Ok(match_sum(&pair.estimates, &pair.targets) / pair.estimates.len() as f64)
}

/// `1 / (alpha / p + (1 - alpha) / r)`, and 0 when either rate is 0.
pub fn fmeasure(p: f64, r: f64, alpha: f64) -> f64 {
    if p <= 0.0 || r <= 0.0 {
        return 0.0;
    }
    1.0 / (alpha / p + (1.0 - alpha) / r)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlockCounts {
    pub atb: usize,
    pub tdb: usize,
    pub fdb: usize,
    pub mdb: usize,
}

impl core::ops::AddAssign for BlockCounts {
    fn add_assign(&mut self, o: Self) {
        self.atb += o.atb;
        self.tdb += o.tdb;
        self.fdb += o.fdb;
        self.mdb += o.mdb;
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlockRates {
    pub counts: BlockCounts,
    /// TDB / ATB
    pub dr: f64,
    /// FDB / (TDB + FDB)
    pub fpr: f64,
    /// MDB / TDB
    pub mdr: f64,
    /// Set when any rate had a zero denominator and was reported as 0.
    pub undefined: bool,
}

impl BlockCounts {
    pub fn rates(self) -> BlockRates {
        let mut undefined = false;
        let mut ratio = |num: usize, den: usize| {
            if den == 0 {
                undefined = true;
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        let dr = ratio(self.tdb, self.atb);
        let fpr = ratio(self.fdb, self.tdb + self.fdb);
        let mdr = ratio(self.mdb, self.tdb);
        BlockRates {
            counts: self,
            dr,
            fpr,
            mdr,
            undefined,
        }
    }
}

pub fn block_counts(pair: &EvalPair, tau_detect: f64, tau_full: f64) -> BlockCounts {
    let mut counts = BlockCounts {
        atb: pair.targets.len(),
        ..BlockCounts::default()
    };
    for e in &pair.estimates {
        // first target with the highest score
        let best = pair
            .targets
            .iter()
            .map(|t| (match_score(e, t), t))
            .fold(None::<(f64, &Rect)>, |acc, cur| match acc {
                Some(a) if a.0 >= cur.0 => Some(a),
                _ => Some(cur),
            });
        match best {
            Some((score, target)) if score > tau_detect => {
                counts.tdb += 1;
                let covered = e.intersection_area(target) as f64 / target.area() as f64;
                if covered < tau_full {
                    counts.mdb += 1;
                }
            }
            _ => counts.fdb += 1,
        }
    }
    counts
}

pub fn block_rates(pair: &EvalPair, tau_detect: f64, tau_full: f64) -> BlockRates {
    block_counts(pair, tau_detect, tau_full).rates()
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrameScore {
    pub frame: String,
    pub recall: f64,
    pub precision: f64,
    pub fmeasure: f64,
    pub counts: BlockCounts,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalReport {
    /// Micro-averaged over all targets of all scored frames.
    pub recall: f64,
    /// Micro-averaged over all estimates of all scored frames.
    pub precision: f64,
    pub fmeasure: f64,
    pub blocks: BlockRates,
    pub frames: Vec<FrameScore>,
    /// Frames left out because they have no ground truth.
    pub skipped: Vec<String>,
}

pub fn evaluate(pairs: &[EvalPair], cfg: &EvalConfig) -> EvalReport {
    let mut frames = Vec::new();
    let mut skipped = Vec::new();
    let (mut target_sum, mut estimate_sum) = (0.0, 0.0);
    let (mut n_targets, mut n_estimates) = (0usize, 0usize);
    let mut counts = BlockCounts::default();
    for pair in pairs {
        let (Ok(r), Ok(p)) = (recall(pair), precision(pair)) else {
            skipped.push(pair.frame.clone());
            continue;
        };
        target_sum += match_sum(&pair.targets, &pair.estimates);
        estimate_sum += match_sum(&pair.estimates, &pair.targets);
        n_targets += pair.targets.len();
        n_estimates += pair.estimates.len();
        let c = block_counts(pair, cfg.tau_detect, cfg.tau_full);
        counts += c;
        frames.push(FrameScore {
            frame: pair.frame.clone(),
            recall: r,
            precision: p,
            fmeasure: fmeasure(p, r, cfg.alpha),
            counts: c,
        });
    }
    let recall = if n_targets == 0 { 0.0 } else { target_sum / n_targets as f64 };
    let precision = if n_estimates == 0 { 0.0 } else { estimate_sum / n_estimates as f64 };
    EvalReport {
        recall,
        precision,
        fmeasure: fmeasure(precision, recall, cfg.alpha),
        blocks: counts.rates(),
        frames,
        skipped,
    }
}
