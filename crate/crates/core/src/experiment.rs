//! Species suite, comparison scenarios and budget sweeps.
//!
//! Eight species are built from the two most and two least fragmented
//! landscapes of a random pool, each at two population sizes. Scenarios group
//! species into reserves; a sweep solves the reserve problem at each budget
//! once on observed counts and once on simulated counts, and records how many
//! parcels receive the same decision.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{round_counts, simulate, LVParams};
use crate::error::{Error, Result};
use crate::grid::CountsGrid;
use crate::landscape::{distribute_population, generate_pool, select_extremes, Landscape};
use crate::rational::Rational;
use crate::solver::{solve, ReserveProblem, ReserveSolution};

pub const DEFAULT_POOL_SIZE: usize = 10_000;
pub const DEFAULT_GRID: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FragmentationRank {
    Highest,
    SecondHighest,
    Lowest,
    SecondLowest,
}

/// Rows of the species table: (rank, population) for S_0 .. S_7.
pub const SUITE_LAYOUT: [(FragmentationRank, u64); 8] = [
    (FragmentationRank::Highest, 100),
    (FragmentationRank::SecondHighest, 100),
    (FragmentationRank::Highest, 250),
    (FragmentationRank::SecondHighest, 250),
    (FragmentationRank::Lowest, 100),
    (FragmentationRank::SecondLowest, 100),
    (FragmentationRank::Lowest, 250),
    (FragmentationRank::SecondLowest, 250),
];

/// Species groupings for cases 1 to 6.
pub const CASES: [&[usize]; 6] = [
    &[0, 1],
    &[2, 3],
    &[4, 5],
    &[6, 7],
    &[0, 1, 2, 3, 4],
    &[5, 6, 7, 0, 1],
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciesSpec {
    pub id: String,
    pub fragmentation_rank: FragmentationRank,
    pub total: u64,
    pub landscape: Landscape,
    /// Observed single-species counts, row-major.
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciesSuite {
    pub seed: u64,
    pub pool_size: usize,
    pub n: usize,
    pub species: Vec<SpeciesSpec>,
}

impl SpeciesSuite {
    /// Observed counts of the listed species stacked into one grid.
    pub fn observed(&self, species: &[usize]) -> Result<CountsGrid> {
        observed_grid(self.n, species.iter().map(|&i| &self.species[i]))
    }
}

fn observed_grid<'a>(n: usize, species: impl Iterator<Item = &'a SpeciesSpec>) -> Result<CountsGrid> {
    CountsGrid::new(n, species.map(|s| s.counts.clone()).collect())
}

pub fn build_species_suite(seed: u64, pool_size: usize, n: usize) -> Result<SpeciesSuite> {
    if pool_size < 4 {
        return Err(Error::InsufficientCandidates {
            needed: 4,
            got: pool_size,
        });
    }
    let pool = generate_pool(seed, pool_size, n)?;
    let extremes = select_extremes(&pool, 2)?;
    let pick = |rank: FragmentationRank| -> &Landscape {
        let idx = match rank {
            FragmentationRank::Highest => extremes.most[0],
            FragmentationRank::SecondHighest => extremes.most[1],
            FragmentationRank::Lowest => extremes.least[0],
            FragmentationRank::SecondLowest => extremes.least[1],
        };
        &pool[idx]
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2);
    let species = SUITE_LAYOUT
        .iter()
        .enumerate()
        .map(|(i, &(rank, total))| {
            let landscape = pick(rank).clone();
            let grid = distribute_population(&landscape, total, rng.gen())?;
            Ok(SpeciesSpec {
                id: format!("S_{i}"),
                fragmentation_rank: rank,
                total,
                landscape,
                counts: grid.counts()[0].clone(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(SpeciesSuite {
        seed,
        pool_size,
        n,
        species,
    })
}

pub fn default_budgets() -> Vec<u64> {
    (0..=100).step_by(5).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub n: usize,
    pub species: Vec<SpeciesSpec>,
    pub weights: Vec<Rational>,
    pub budgets: Vec<u64>,
    pub costs: Vec<u64>,
    pub lv_params: LVParams,
    pub seed: u64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if self.species.is_empty() {
            return bad("no species".into());
        }
        if self.weights.len() != self.species.len() {
            return bad(format!(
                "{} weights for {} species",
                self.weights.len(),
                self.species.len()
            ));
        }
        if self.costs.len() != self.n * self.n {
            return bad(format!("{} costs for {} parcels", self.costs.len(), self.n * self.n));
        }
        if let Some(s) = self.species.iter().find(|s| s.counts.len() != self.n * self.n) {
            return bad(format!("species {} has {} parcel counts", s.id, s.counts.len()));
        }
        if self.budgets.windows(2).any(|w| w[0] >= w[1]) {
            return bad("budgets must be strictly increasing".into());
        }
        if self.lv_params.species() != self.species.len() {
            return bad(format!(
                "dynamics parameters cover {} species, scenario has {}",
                self.lv_params.species(),
                self.species.len()
            ));
        }
        self.lv_params.validate()
    }

    pub fn observed(&self) -> Result<CountsGrid> {
        observed_grid(self.n, self.species.iter())
    }

    /// Rounded simulated counts; independent of the budget.
    pub fn simulated(&self) -> Result<CountsGrid> {
        let sim = simulate(&self.observed()?, &self.lv_params)?;
        Ok(round_counts(&sim.grid))
    }

    pub fn with_weights(&self, weights: Vec<Rational>) -> Scenario {
        Scenario {
            weights,
            ..self.clone()
        }
    }
}

/// Cases 1 to 6 with equal weights, unit costs and budgets 0, 5, ..., 100.
pub fn default_scenarios(suite: &SpeciesSuite) -> Result<Vec<Scenario>> {
    if suite.species.len() != SUITE_LAYOUT.len() {
        return Err(Error::InvalidScenario(format!(
            "suite has {} species, expected {}",
            suite.species.len(),
            SUITE_LAYOUT.len()
        )));
    }
    Ok(CASES
        .iter()
        .enumerate()
        .map(|(k, members)| Scenario {
            name: format!("case{}", k + 1),
            n: suite.n,
            species: members.iter().map(|&i| suite.species[i].clone()).collect(),
            weights: vec![Rational::ONE; members.len()],
            budgets: default_budgets(),
            costs: vec![1; suite.n * suite.n],
            lv_params: LVParams::default_for(members.len()),
            seed: suite.seed,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub budget: u64,
    pub similarity: usize,
    pub objective_1: Rational,
    pub objective_2: Rational,
    pub x_1: Vec<bool>,
    pub x_2: Vec<bool>,
}

/// Number of parcels with the same protection status in both solutions.
pub fn similarity(a: &ReserveSolution, b: &ReserveSolution) -> Result<usize> {
    similarity_of(&a.x, &b.x)
}

pub fn similarity_of(a: &[bool], b: &[bool]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!(
            "solutions cover {} and {} parcels",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter().zip(b).filter(|(x, y)| x == y).count())
}

/// Solves both value grids at every budget; rows come back in budget order.
pub fn sweep_grids(
    observed: &CountsGrid,
    simulated: &CountsGrid,
    weights: &[Rational],
    costs: &[u64],
    budgets: &[u64],
) -> Result<Vec<SweepRow>> {
    let base_1 = ReserveProblem::from_counts(observed, weights.to_vec(), costs.to_vec(), 0)?;
    let base_2 = ReserveProblem::from_counts(simulated, weights.to_vec(), costs.to_vec(), 0)?;
    budgets
        .par_iter()
        .map(|&budget| {
            let s1 = solve(&base_1.with_budget(budget))?;
            let s2 = solve(&base_2.with_budget(budget))?;
            Ok(SweepRow {
                budget,
                similarity: similarity(&s1, &s2)?,
                objective_1: s1.objective,
                objective_2: s2.objective,
                x_1: s1.x,
                x_2: s2.x,
            })
        })
        .collect()
}

pub fn budget_sweep(scenario: &Scenario) -> Result<Vec<SweepRow>> {
    scenario.validate()?;
    let observed = scenario.observed()?;
    let simulated = scenario.simulated()?;
    sweep_grids(&observed, &simulated, &scenario.weights, &scenario.costs, &scenario.budgets)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityStats {
    pub min: usize,
    pub mean: f64,
    pub median: f64,
}

/// Statistics over interior budgets: the lowest and highest budget rows are dropped.
pub fn summarize(rows: &[SweepRow]) -> Result<SimilarityStats> {
    let mut sorted: Vec<&SweepRow> = rows.iter().collect();
    sorted.sort_by_key(|r| r.budget);
    if sorted.len() < 3 {
        return Err(Error::NoInteriorBudgets { rows: rows.len() });
    }
    let interior: Vec<usize> = sorted[1..sorted.len() - 1].iter().map(|r| r.similarity).collect();
    Ok(stats_of(&interior))
}

pub fn stats_of(values: &[usize]) -> SimilarityStats {
    assert!(!values.is_empty());
    let mut v = values.to_vec();
    v.sort_unstable();
    let mid = v.len() / 2;
    let median = if v.len().is_multiple_of(2) {
        (v[mid - 1] + v[mid]) as f64 / 2.0
    } else {
        v[mid] as f64
    };
    SimilarityStats {
        min: v[0],
        mean: v.iter().sum::<usize>() as f64 / v.len() as f64,
        median,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSeries {
    pub weights: Vec<Rational>,
    pub rows: Vec<SweepRow>,
}

/// One sweep per weight set on otherwise identical inputs.
pub fn weighted_comparison(scenario: &Scenario, weight_sets: &[Vec<Rational>]) -> Result<Vec<WeightedSeries>> {
    scenario.validate()?;
    let observed = scenario.observed()?;
    let simulated = scenario.simulated()?;
    weight_sets
        .iter()
        .map(|weights| {
            if weights.len() != scenario.species.len() {
                return Err(Error::InvalidScenario(format!(
                    "weight set has {} entries for {} species",
                    weights.len(),
                    scenario.species.len()
                )));
            }
            let rows = sweep_grids(&observed, &simulated, weights, &scenario.costs, &scenario.budgets)?;
            Ok(WeightedSeries {
                weights: weights.clone(),
                rows,
            })
        })
        .collect()
}
