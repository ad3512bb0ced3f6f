//! Synthetic habitat landscapes.
//!
//! A landscape is an `n x n` grid of habitat values in `[0, 1]`, where a
//! higher value is worse habitat. Landscapes are generated from iid uniform
//! noise followed by a number of neighbour-averaging passes and a rescale back
//! to `[0, 1]`; more passes give larger clusters of similar habitat and hence
//! lower fragmentation.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::CountsGrid;

/// Upper bound (inclusive) on smoothing passes when a random fragmentation
/// level is requested.
pub const MAX_RANDOM_SMOOTHING: u32 = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLandscape", into = "RawLandscape")]
pub struct Landscape {
    n: usize,
    values: Vec<f64>,
    seed: Option<u64>,
    smoothing_rounds: Option<u32>,
}

#[derive(Serialize, Deserialize)]
struct RawLandscape {
    n: usize,
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    smoothing_rounds: Option<u32>,
}

impl Landscape {
    /// Wraps explicit row-major habitat values.
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension("grid side length must be at least 1".into()));
        }
        if values.len() != n * n {
            return Err(Error::ShapeMismatch(format!(
                "{} habitat values for a {n}x{n} grid",
                values.len()
            )));
        }
        if let Some(p) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::ShapeMismatch(format!(
                "habitat value {} at parcel {p} is outside [0, 1]",
                values[p]
            )));
        }
        Ok(Landscape {
            n,
            values,
            seed: None,
            smoothing_rounds: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parcels(&self) -> usize {
        self.n * self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn smoothing_rounds(&self) -> Option<u32> {
        self.smoothing_rounds
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.n + col]
    }

    pub fn transpose(&self) -> Landscape {
        let n = self.n;
        let values = (0..n * n).map(|p| self.values[(p % n) * n + p / n]).collect();
        Landscape { values, ..self.clone() }
    }

    /// Replaces every value `h` with `1 - h`.
    pub fn inverted(&self) -> Landscape {
        Landscape {
            values: self.values.iter().map(|h| 1.0 - h).collect(),
            ..self.clone()
        }
    }

    pub fn fragmentation(&self) -> FragmentationScore {
        fragmentation(self)
    }
}

impl TryFrom<RawLandscape> for Landscape {
    type Error = Error;

    fn try_from(raw: RawLandscape) -> Result<Self> {
        let mut l = Landscape::from_values(raw.n, raw.values)?;
        l.seed = raw.seed;
        l.smoothing_rounds = raw.smoothing_rounds;
        Ok(l)
    }
}

impl From<Landscape> for RawLandscape {
    fn from(l: Landscape) -> Self {
        RawLandscape {
            n: l.n,
            values: l.values,
            seed: l.seed,
            smoothing_rounds: l.smoothing_rounds,
        }
    }
}

/// Mean absolute difference between orthogonally adjacent parcels, in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FragmentationScore(pub f64);

impl FragmentationScore {
    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn generate_landscape(n: usize, smoothing_rounds: u32, seed: u64) -> Result<Landscape> {
    if n == 0 {
        return Err(Error::InvalidDimension("grid side length must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values: Vec<f64> = (0..n * n).map(|_| rng.gen::<f64>()).collect();

    let mut next = vec![0.0; n * n];
    for _ in 0..smoothing_rounds {
        for row in 0..n {
            for col in 0..n {
                let mut sum = values[row * n + col];
                let mut count = 1.0;
                for (r, c) in neighbours(n, row, col) {
                    sum += values[r * n + c];
                    count += 1.0;
                }
                next[row * n + col] = sum / count;
            }
        }
        std::mem::swap(&mut values, &mut next);
    }

    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if hi > lo {
        let span = hi - lo;
        for v in &mut values {
            *v = ((*v - lo) / span).clamp(0.0, 1.0);
        }
    }

    Ok(Landscape {
        n,
        values,
        seed: Some(seed),
        smoothing_rounds: Some(smoothing_rounds),
    })
}

fn neighbours(n: usize, row: usize, col: usize) -> impl Iterator<Item = (usize, usize)> {
    let up = (row > 0).then(|| (row - 1, col));
    let down = (row + 1 < n).then(|| (row + 1, col));
    let left = (col > 0).then(|| (row, col - 1));
    let right = (col + 1 < n).then(|| (row, col + 1));
    [up, down, left, right].into_iter().flatten()
}

pub fn fragmentation(landscape: &Landscape) -> FragmentationScore {
    let n = landscape.n;
    if n < 2 {
        return FragmentationScore(0.0);
    }
    let h = &landscape.values;
    let mut total = 0.0;
    for row in 0..n {
        for col in 0..n {
            let here = h[row * n + col];
            if col + 1 < n {
                total += (here - h[row * n + col + 1]).abs();
            }
            if row + 1 < n {
                total += (here - h[(row + 1) * n + col]).abs();
            }
        }
    }
    let pairs = 2 * n * (n - 1);
    FragmentationScore(total / pairs as f64)
}

/// Indices of the `k` most and `k` least fragmented landscapes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extremes {
    /// Most fragmented first.
    pub most: Vec<usize>,
    /// Least fragmented first.
    pub least: Vec<usize>,
}

/// Ranks by fragmentation (descending, ties by input position) and returns
/// the disjoint head and tail of that order.
pub fn select_extremes(landscapes: &[Landscape], k: usize) -> Result<Extremes> {
    let scores: Vec<f64> = landscapes.iter().map(|l| fragmentation(l).0).collect();
    select_extremes_by_score(&scores, k)
}

pub fn select_extremes_by_score(scores: &[f64], k: usize) -> Result<Extremes> {
    if scores.len() < 2 * k {
        return Err(Error::InsufficientCandidates {
            needed: 2 * k,
            got: scores.len(),
        });
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    // stable sort keeps input order among equal scores
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let most = order[..k].to_vec();
    let least = order[order.len() - k..].iter().rev().copied().collect();
    Ok(Extremes { most, least })
}

/// Generates `pool_size` landscapes with random smoothing levels.
///
/// Landscape `i` uses seed `base_seed + i`; the smoothing levels come from a
/// separate stream keyed by `base_seed`, so the pool is reproducible and can
/// be built in parallel.
pub fn generate_pool(base_seed: u64, pool_size: usize, n: usize) -> Result<Vec<Landscape>> {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(1);
    let rounds: Vec<u32> = (0..pool_size)
        .map(|_| rng.gen_range(0..=MAX_RANDOM_SMOOTHING))
        .collect();
    rounds
        .into_par_iter()
        .enumerate()
        .map(|(i, r)| generate_landscape(n, r, base_seed.wrapping_add(i as u64)))
        .collect()
}

/// Places `total` individuals independently on parcels with probability
/// proportional to habitat quality `1 - h(p)`.
pub fn distribute_population(landscape: &Landscape, total: u64, seed: u64) -> Result<CountsGrid> {
    let mut counts = vec![0u64; landscape.parcels()];
    if total > 0 {
        let quality: Vec<f64> = landscape.values.iter().map(|h| 1.0 - h).collect();
        let index = WeightedIndex::new(&quality).map_err(|_| Error::DegenerateIntensity { total })?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..total {
            counts[index.sample(&mut rng)] += 1;
        }
    }
    CountsGrid::new(landscape.n, vec![counts])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_parcel() {
        for seed in [0, 1, 99] {
            let l = generate_landscape(1, 5, seed).unwrap();
            assert_eq!(l.parcels(), 1);
            assert!((0.0..=1.0).contains(&l.values()[0]));
            assert_eq!(fragmentation(&l).0, 0.0);
        }
    }

    #[test]
    fn zero_side_is_rejected() {
        assert!(matches!(generate_landscape(0, 0, 1), Err(Error::InvalidDimension(_))));
        assert!(Landscape::from_values(0, vec![]).is_err());
    }

    #[test]
    fn rescaled_to_unit_span() {
        for seed in 0..20 {
            let l = generate_landscape(2, 0, seed).unwrap();
            let lo = l.values().iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = l.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(lo, 0.0);
            assert_eq!(hi, 1.0);
        }
    }

    #[test]
    fn deterministic_in_inputs() {
        let a = generate_landscape(10, 3, 42).unwrap();
        let b = generate_landscape(10, 3, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate_landscape(10, 3, 43).unwrap());
        assert_ne!(a, generate_landscape(10, 4, 42).unwrap());
    }

    #[test]
    fn smoothing_lowers_fragmentation() {
        for seed in 0..50 {
            let rough = fragmentation(&generate_landscape(10, 0, seed).unwrap()).0;
            let smooth = fragmentation(&generate_landscape(10, 8, seed).unwrap()).0;
            assert!(rough > smooth, "seed {seed}: {rough} <= {smooth}");
        }
    }

    #[test]
    fn fragmentation_examples() {
        let constant = Landscape::from_values(3, vec![0.7; 9]).unwrap();
        assert_eq!(fragmentation(&constant).0, 0.0);
        let checker = Landscape::from_values(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(fragmentation(&checker).0, 1.0);
        let ramp = Landscape::from_values(2, vec![0.0, 0.5, 0.5, 1.0]).unwrap();
        assert_eq!(fragmentation(&ramp).0, 0.5);
    }

    #[test]
    fn extremes_by_score() {
        let e = select_extremes_by_score(&[0.9, 0.1, 0.5, 0.7], 2).unwrap();
        assert_eq!(e.most, vec![0, 3]);
        assert_eq!(e.least, vec![1, 2]);

        let tie = select_extremes_by_score(&[0.3, 0.3], 1).unwrap();
        assert_eq!(tie.most, vec![0]);
        assert_eq!(tie.least, vec![1]);

        assert!(matches!(
            select_extremes_by_score(&[0.1, 0.2, 0.3], 2),
            Err(Error::InsufficientCandidates { needed: 4, got: 3 })
        ));
    }

    #[test]
    fn extremes_from_landscapes() {
        let ls = vec![
            Landscape::from_values(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap(),
            Landscape::from_values(2, vec![0.5; 4]).unwrap(),
            Landscape::from_values(2, vec![0.0, 0.5, 0.5, 1.0]).unwrap(),
            Landscape::from_values(2, vec![0.0, 0.1, 0.0, 0.1]).unwrap(),
        ];
        let e = select_extremes(&ls, 2).unwrap();
        assert_eq!(e.most, vec![0, 2]);
        assert_eq!(e.least, vec![1, 3]);
    }

    #[test]
    fn population_edge_cases() {
        let l = generate_landscape(4, 1, 3).unwrap();
        let empty = distribute_population(&l, 0, 1).unwrap();
        assert!(empty.counts()[0].iter().all(|&c| c == 0));

        let mut h = vec![1.0; 9];
        h[4] = 0.4;
        let one = Landscape::from_values(3, h).unwrap();
        let placed = distribute_population(&one, 100, 7).unwrap();
        assert_eq!(placed.counts()[0][4], 100);
        assert_eq!(placed.total(0), 100);

        let dead = Landscape::from_values(2, vec![1.0; 4]).unwrap();
        assert!(matches!(
            distribute_population(&dead, 5, 0),
            Err(Error::DegenerateIntensity { total: 5 })
        ));
        assert!(distribute_population(&dead, 0, 0).is_ok());
    }

    #[test]
    fn pool_is_reproducible() {
        let a = generate_pool(11, 30, 5).unwrap();
        let b = generate_pool(11, 30, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[3].seed(), Some(14));
        assert!(a.iter().all(|l| l.smoothing_rounds().unwrap() <= MAX_RANDOM_SMOOTHING));
    }

    #[test]
    fn json_layout() {
        let l = Landscape::from_values(1, vec![0.25]).unwrap();
        assert_eq!(serde_json::to_string(&l).unwrap(), r#"{"n":1,"values":[0.25]}"#);
        let g = generate_landscape(3, 2, 5).unwrap();
        let back: Landscape = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<Landscape>(r#"{"n":1,"values":[1.5]}"#).is_err());
    }
}
