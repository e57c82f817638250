//! Runs-test randomness score for image pixels.
//!
//! A trial picks `n` distinct start pixels, walks each one `h` times by
//! `stride` pixels in a fixed direction, and records the mean of the 3x3
//! Moore neighborhood at every stop. The `h·n` means are read walker by
//! walker (each walker's `h` means are contiguous), dichotomized against their
//! median, and the number of runs is tested against its normal
//! approximation. The score `C` is the percentage of accepted trials over
//! `T` evaluations of `N` trials each.

use std::collections::HashSet;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::imagecodec::PixelImage;
use crate::keystream::{derive_seed, SplitMix64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Direction {
    #[default]
    Horizontal,
    Vertical,
    Diagonal,
}

impl Direction {
    pub const ALL: [Direction; 3] = [
        Direction::Horizontal,
        Direction::Vertical,
        Direction::Diagonal,
    ];

    /// Unit step `(drow, dcol)`; diagonal moves down and to the right.
    pub fn step(self) -> (usize, usize) {
        match self {
            Direction::Horizontal => (0, 1),
            Direction::Vertical => (1, 0),
            Direction::Diagonal => (1, 1),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Direction::Horizontal => "horizontal",
            Direction::Vertical => "vertical",
            Direction::Diagonal => "diagonal",
        })
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "horizontal" | "h" => Ok(Direction::Horizontal),
            "vertical" | "v" => Ok(Direction::Vertical),
            "diagonal" | "d" => Ok(Direction::Diagonal),
            _ => Err(Error::InvalidConfig(format!("unknown direction {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandTestConfig {
    /// Trials per evaluation (`N`).
    pub tests: usize,
    /// Evaluations (`T`).
    pub evaluations: usize,
    /// Start pixels per trial (`n`).
    pub pixels: usize,
    /// Stops per walker (`h`).
    pub moves: usize,
    pub stride: usize,
    pub direction: Direction,
    pub alpha: f64,
    pub z_crit: f64,
    pub seed: u64,
}

impl Default for RandTestConfig {
    fn default() -> Self {
        Self {
            tests: 25,
            evaluations: 10,
            pixels: 8,
            moves: 5,
            stride: 2,
            direction: Direction::Horizontal,
            alpha: 0.01,
            z_crit: 2.575,
            seed: 0,
        }
    }
}

impl RandTestConfig {
    /// Sets `alpha` and the matching two-sided normal critical value.
    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha {alpha} outside (0, 1)"
            )));
        }
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        self.alpha = alpha;
        self.z_crit = normal.inverse_cdf(1.0 - alpha / 2.0);
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn sequence_len(&self) -> usize {
        self.pixels * self.moves
    }

    /// The normal approximation is only trusted for `h·n >= 20`.
    pub fn normal_approximation_ok(&self) -> bool {
        self.sequence_len() >= 20
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tests", self.tests),
            ("evaluations", self.evaluations),
            ("pixels", self.pixels),
            ("moves", self.moves),
            ("stride", self.stride),
        ] {
            if v == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be at least 1")));
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha {} outside (0, 1)",
                self.alpha
            )));
        }
        if !(self.z_crit.is_finite() && self.z_crit > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "critical value {} must be positive",
                self.z_crit
            )));
        }
        Ok(())
    }
}

/// Start positions whose 3x3 neighborhoods stay in bounds for all `h` stops:
/// rows `r0..=r1`, columns `c0..=c1`.
fn admissible_region(
    plane: &PixelImage,
    cfg: &RandTestConfig,
) -> Option<(usize, usize, usize, usize)> {
    let (dr, dc) = cfg.direction.step();
    let reach = cfg.stride * (cfg.moves - 1);
    let (h, w) = (plane.height(), plane.width());
    let r1 = h.checked_sub(2 + reach * dr)?;
    let c1 = w.checked_sub(2 + reach * dc)?;
    (r1 >= 1 && c1 >= 1).then_some((1, r1, 1, c1))
}

fn neighborhood_mean(plane: &PixelImage, r: usize, c: usize) -> f64 {
    let mut sum = 0u32;
    for y in r - 1..=r + 1 {
        for x in c - 1..=c + 1 {
            sum += plane.get(x, y, 0) as u32;
        }
    }
    sum as f64 / 9.0
}

/// `count` distinct values from `0..total`.
fn distinct_indices(rng: &mut SplitMix64, total: usize, count: usize) -> Vec<usize> {
    if count * 4 >= total {
        let mut all: Vec<usize> = (0..total).collect();
        for i in 0..count {
            let j = i + rng.below((total - i) as u64) as usize;
            all.swap(i, j);
        }
        all.truncate(count);
        return all;
    }
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let i = rng.below(total as u64) as usize;
        if seen.insert(i) {
            out.push(i);
        }
    }
    out
}

/// The `h·n` neighborhood means of one trial, walker-major.
pub fn sample_mean_sequence(
    plane: &PixelImage,
    cfg: &RandTestConfig,
    trial_seed: u64,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    if plane.channels() != 1 {
        return Err(Error::InvalidConfig(format!(
            "expected a single-channel plane, got {} channels",
            plane.channels()
        )));
    }
    let too_small = || {
        Error::ImageTooSmall(format!(
            "{}x{} image cannot host {} walkers of {} moves (stride {}, {})",
            plane.width(),
            plane.height(),
            cfg.pixels,
            cfg.moves,
            cfg.stride,
            cfg.direction
        ))
    };
    let (r0, r1, c0, c1) = admissible_region(plane, cfg).ok_or_else(too_small)?;
    let ncols = c1 - c0 + 1;
    let total = (r1 - r0 + 1) * ncols;
    if total < cfg.pixels {
        return Err(too_small());
    }
    let mut rng = SplitMix64::new(trial_seed);
    let (dr, dc) = cfg.direction.step();
    let mut means = Vec::with_capacity(cfg.sequence_len());
    for idx in distinct_indices(&mut rng, total, cfg.pixels) {
        let (r, c) = (r0 + idx / ncols, c0 + idx % ncols);
        for t in 0..cfg.moves {
            let s = t * cfg.stride;
            means.push(neighborhood_mean(plane, r + s * dr, c + s * dc));
        }
    }
    Ok(means)
}

/// Median of a non-empty slice (mean of the two middle values for even length).
pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// 1 where a mean is strictly above the median, else 0.
pub fn dichotomize(means: &[f64]) -> Vec<u8> {
    if means.is_empty() {
        return Vec::new();
    }
    let d = median(means);
    means.iter().map(|&m| (m > d) as u8).collect()
}

/// `(n1, n2, u)`: ones, zeros, and maximal runs.
pub fn count_runs(symbols: &[u8]) -> (usize, usize, usize) {
    let n1 = symbols.iter().filter(|&&s| s != 0).count();
    let n2 = symbols.len() - n1;
    let u = match symbols {
        [] => 0,
        _ => 1 + symbols.windows(2).filter(|w| w[0] != w[1]).count(),
    };
    (n1, n2, u)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunsStatistics {
    pub n1: usize,
    pub n2: usize,
    pub u: usize,
    pub mu: f64,
    pub sigma: f64,
    pub z: f64,
    pub accepted: bool,
}

/// Normal approximation of the runs count; accepted when `-z_crit < z < z_crit`.
pub fn runs_test(n1: usize, n2: usize, u: usize, z_crit: f64) -> Result<RunsStatistics> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::DegenerateSample { n1, n2 });
    }
    let (a, b) = (n1 as f64, n2 as f64);
    let n = a + b;
    let mu = 2.0 * a * b / n + 1.0;
    let var = 2.0 * a * b * (2.0 * a * b - n) / (n * n * (n - 1.0));
    if var <= 0.0 {
        return Err(Error::DegenerateSample { n1, n2 });
    }
    let sigma = var.sqrt();
    let z = (u as f64 - mu) / sigma;
    Ok(RunsStatistics {
        n1,
        n2,
        u,
        mu,
        sigma,
        z,
        accepted: -z_crit < z && z < z_crit,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trial {
    pub evaluation: usize,
    pub test: usize,
    pub n1: usize,
    pub n2: usize,
    pub u: usize,
    /// `None` for a degenerate sample, which counts as rejected.
    pub stats: Option<RunsStatistics>,
}

impl Trial {
    pub fn accepted(&self) -> bool {
        self.stats.is_some_and(|s| s.accepted)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomnessReport {
    pub config: RandTestConfig,
    /// Accepted trials per evaluation.
    pub c2: Vec<usize>,
    /// Percentage of accepted trials, 0..=100.
    pub score: f64,
    pub trials: Vec<Trial>,
}

impl RandomnessReport {
    pub fn write_csv(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "evaluation,test,n1,n2,u,mu,sigma,z,accepted")?;
        for t in &self.trials {
            let (mu, sigma, z) = match t.stats {
                Some(s) => (s.mu.to_string(), s.sigma.to_string(), s.z.to_string()),
                None => Default::default(),
            };
            writeln!(
                out,
                "{},{},{},{},{},{mu},{sigma},{z},{}",
                t.evaluation,
                t.test,
                t.n1,
                t.n2,
                t.u,
                t.accepted()
            )?;
        }
        writeln!(out, "score,{}", self.score)
    }
}

impl fmt::Display for RandomnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.config;
        writeln!(
            f,
            "tests={} evaluations={} pixels={} moves={} stride={} direction={} seed={}",
            c.tests, c.evaluations, c.pixels, c.moves, c.stride, c.direction, c.seed
        )?;
        let counts: Vec<String> = self.c2.iter().map(ToString::to_string).collect();
        writeln!(f, "accepted per evaluation: {}", counts.join(" "))?;
        write!(f, "score {:.2}", self.score)
    }
}

fn run_trial(
    plane: &PixelImage,
    cfg: &RandTestConfig,
    evaluation: usize,
    test: usize,
) -> Result<Trial> {
    let seed = derive_seed(cfg.seed, &[evaluation as u64, test as u64]);
    let symbols = dichotomize(&sample_mean_sequence(plane, cfg, seed)?);
    let (n1, n2, u) = count_runs(&symbols);
    Ok(Trial {
        evaluation,
        test,
        n1,
        n2,
        u,
        stats: runs_test(n1, n2, u, cfg.z_crit).ok(),
    })
}

/// Scores a single-channel plane. Deterministic in `cfg.seed` regardless of
/// thread count.
pub fn score_image(plane: &PixelImage, cfg: &RandTestConfig) -> Result<RandomnessReport> {
    cfg.validate()?;
    let n = cfg.tests;
    let trials = (0..cfg.evaluations * n)
        .into_par_iter()
        .map(|k| run_trial(plane, cfg, k / n, k % n))
        .collect::<Result<Vec<_>>>()?;
    let mut c2 = vec![0; cfg.evaluations];
    for t in trials.iter().filter(|t| t.accepted()) {
        c2[t.evaluation] += 1;
    }
    let score = c2.iter().sum::<usize>() as f64 / (cfg.evaluations * n) as f64 * 100.0;
    Ok(RandomnessReport {
        config: *cfg,
        c2,
        score,
        trials,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColorReport {
    pub channels: Vec<RandomnessReport>,
    /// Lowest channel score.
    pub summary: f64,
}

/// Scores each channel separately; the summary is the minimum.
pub fn score_color_image(img: &PixelImage, cfg: &RandTestConfig) -> Result<ColorReport> {
    let channels = img
        .planes()
        .iter()
        .map(|p| score_image(p, cfg))
        .collect::<Result<Vec<_>>>()?;
    let summary = channels
        .iter()
        .map(|r| r.score)
        .fold(f64::INFINITY, f64::min);
    Ok(ColorReport { channels, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<u8> {
        s.bytes().map(|b| b - b'0').collect()
    }

    fn noise(w: usize, h: usize, seed: u64) -> PixelImage {
        let mut g = SplitMix64::new(seed);
        PixelImage::from_fn(w, h, |_, _| g.next_u64() as u8)
    }

    #[test]
    fn worked_run_counts() {
        assert_eq!(count_runs(&bits("0000011111")), (5, 5, 2));
        assert_eq!(count_runs(&bits("0011001101")), (5, 5, 6));
        assert_eq!(count_runs(&bits("1111")), (4, 0, 1));
        assert_eq!(count_runs(&[]), (0, 0, 0));
    }

    #[test]
    fn runs_oracle_exhaustive() {
        for len in 1..=12 {
            for word in 0u32..1 << len {
                let s: Vec<u8> = (0..len).map(|i| (word >> i & 1) as u8).collect();
                // Count run starts directly.
                let starts = (0..len).filter(|&i| i == 0 || s[i] != s[i - 1]).count();
                let (n1, n2, u) = count_runs(&s);
                assert_eq!(u, starts);
                assert_eq!(n1, word.count_ones() as usize);
                assert_eq!(n1 + n2, len);
            }
        }
    }

    #[test]
    fn hand_evaluated_statistic() {
        let s = runs_test(5, 5, 2, 2.575).unwrap();
        assert!((s.mu - 6.0).abs() < 1e-12);
        assert!((s.sigma - (20.0f64 / 9.0).sqrt()).abs() < 1e-9);
        assert!((s.z - (-4.0 / (20.0f64 / 9.0).sqrt())).abs() < 1e-9);
        assert!((s.z + 2.6833).abs() < 1e-4);
        assert!(!s.accepted);
        let centered = runs_test(5, 5, 6, 2.575).unwrap();
        assert_eq!(centered.z, 0.0);
        assert!(centered.accepted);
    }

    #[test]
    fn degenerate_samples() {
        assert!(matches!(
            runs_test(0, 4, 1, 2.575),
            Err(Error::DegenerateSample { .. })
        ));
        assert!(matches!(
            runs_test(1, 1, 2, 2.575),
            Err(Error::DegenerateSample { .. })
        ));
    }

    #[test]
    fn z_increases_with_u() {
        for (n1, n2) in [(3, 7), (5, 5), (20, 20), (13, 2)] {
            let zs: Vec<f64> = (1..=n1 + n2)
                .map(|u| runs_test(n1, n2, u, 2.575).unwrap().z)
                .collect();
            assert!(zs.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn median_and_ties() {
        assert_eq!(dichotomize(&[1.0, 2.0, 3.0, 4.0]), vec![0, 0, 1, 1]);
        assert_eq!(dichotomize(&[7.0; 6]), vec![0; 6]);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        let mut g = SplitMix64::new(3);
        let v: Vec<f64> = (0..40).map(|_| g.next_u64() as f64).collect();
        let s = dichotomize(&v);
        assert_eq!(s.iter().filter(|&&b| b == 1).count(), 20);
    }

    #[test]
    fn means_match_naive_oracle() {
        let img = noise(30, 20, 4);
        let cfg = RandTestConfig::default();
        for dir in Direction::ALL {
            let cfg = RandTestConfig {
                direction: dir,
                ..cfg
            };
            let means = sample_mean_sequence(&img, &cfg, 99).unwrap();
            assert_eq!(means.len(), cfg.sequence_len());
            // Every mean must equal some in-bounds 3x3 mean, and walker stops
            // must step by `stride` in the walk direction.
            let naive = |r: usize, c: usize| {
                let mut s = 0.0;
                for y in r - 1..=r + 1 {
                    for x in c - 1..=c + 1 {
                        s += img.get(x, y, 0) as f64;
                    }
                }
                s / 9.0
            };
            let mut rng = SplitMix64::new(99);
            let (r0, r1, c0, c1) = admissible_region(&img, &cfg).unwrap();
            let ncols = c1 - c0 + 1;
            let starts = distinct_indices(&mut rng, (r1 - r0 + 1) * ncols, cfg.pixels);
            let (dr, dc) = dir.step();
            for (w, idx) in starts.iter().enumerate() {
                for t in 0..cfg.moves {
                    let (r, c) = (r0 + idx / ncols + 2 * t * dr, c0 + idx % ncols + 2 * t * dc);
                    assert_eq!(means[w * cfg.moves + t], naive(r, c));
                }
            }
        }
    }

    #[test]
    fn single_neighborhood() {
        let img = PixelImage::gray(3, 3, (1..=9).collect()).unwrap();
        let cfg = RandTestConfig {
            pixels: 1,
            moves: 1,
            ..Default::default()
        };
        assert_eq!(sample_mean_sequence(&img, &cfg, 0).unwrap(), vec![5.0]);
    }

    #[test]
    fn too_small() {
        let img = noise(10, 10, 5);
        let cfg = RandTestConfig::default();
        assert!(matches!(
            score_image(&img, &cfg),
            Err(Error::ImageTooSmall(_))
        ));
        let cfg = RandTestConfig {
            pixels: 65,
            moves: 1,
            ..cfg
        };
        assert!(matches!(
            score_image(&img, &cfg),
            Err(Error::ImageTooSmall(_))
        ));
        let cfg = RandTestConfig { pixels: 64, ..cfg };
        assert!(score_image(&img, &cfg).is_ok());
    }

    #[test]
    fn constant_scores_zero_noise_scores_high() {
        let cfg = RandTestConfig::default();
        let flat = PixelImage::filled(64, 64, 1, 90).unwrap();
        assert_eq!(score_image(&flat, &cfg).unwrap().score, 0.0);
        let r = score_image(&noise(256, 256, 6), &cfg).unwrap();
        assert!(r.score >= 90.0, "{}", r.score);
        assert_eq!(r.c2.len(), 10);
        assert_eq!(r.trials.len(), 250);
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let img = noise(64, 64, 7);
        let cfg = RandTestConfig::default().with_seed(11);
        assert_eq!(
            score_image(&img, &cfg).unwrap(),
            score_image(&img, &cfg).unwrap()
        );
        let other = score_image(&img, &cfg.with_seed(12)).unwrap();
        assert_ne!(other.trials, score_image(&img, &cfg).unwrap().trials);
    }

    #[test]
    fn color_summary_is_minimum() {
        let mut g = SplitMix64::new(8);
        let samples: Vec<u8> = (0..64 * 64)
            .flat_map(|_| [g.next_u64() as u8, 40, g.next_u64() as u8])
            .collect();
        let img = PixelImage::new(64, 64, 3, samples).unwrap();
        let cfg = RandTestConfig::default();
        let rep = score_color_image(&img, &cfg).unwrap();
        assert_eq!(rep.summary, 0.0);
        assert_eq!(
            rep.channels[0],
            score_image(&img.channel(0).unwrap(), &cfg).unwrap()
        );
    }

    #[test]
    fn alpha_and_validation() {
        let cfg = RandTestConfig::default().with_alpha(0.01).unwrap();
        assert!((cfg.z_crit - 2.5758).abs() < 1e-4);
        assert!(RandTestConfig::default().with_alpha(1.5).is_err());
        assert!(RandTestConfig {
            tests: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(RandTestConfig::default().normal_approximation_ok());
        assert!(!RandTestConfig {
            pixels: 3,
            ..Default::default()
        }
        .normal_approximation_ok());
        assert_eq!(
            "Vertical".parse::<Direction>().unwrap(),
            Direction::Vertical
        );
    }

    #[test]
    fn csv_shape() {
        let cfg = RandTestConfig {
            tests: 2,
            evaluations: 1,
            ..Default::default()
        };
        let mut out = Vec::new();
        score_image(&PixelImage::filled(32, 32, 1, 0).unwrap(), &cfg)
            .unwrap()
            .write_csv(&mut out)
            .unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "evaluation,test,n1,n2,u,mu,sigma,z,accepted");
        assert_eq!(lines[1], "0,0,0,40,1,,,,false");
        assert_eq!(lines[3], "score,0");
    }
}
