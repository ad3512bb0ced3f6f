//! Budget-constrained parcel selection.
//!
//! Maximise `sum_i w_i sum_p v_i(p) x_p` subject to `sum_p c_p x_p <= B`,
//! `x_p in {0, 1}`. This is a 0/1 knapsack whose item values are per-parcel
//! scores. Weights are rationals; scores are evaluated exactly as integers
//! after clearing denominators, so ties are decided without rounding.
//!
//! All solvers share one tie-break: among optimal selections, the one that is
//! lexicographically largest when `x` is read from parcel 0 upward with
//! "protected" ranking above "unprotected".

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::CountsGrid;
use crate::rational::{common_denominator, Rational};

/// Largest instance [`solve_bruteforce`] will enumerate.
pub const BRUTEFORCE_LIMIT: usize = 20;

/// Largest DP table [`solve_dp`] will allocate.
pub const DP_CELL_LIMIT: usize = 1 << 28;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawProblem", into = "RawProblem")]
pub struct ReserveProblem {
    values: Vec<Vec<u64>>,
    weights: Vec<Rational>,
    costs: Vec<u64>,
    budget: u64,
}

#[derive(Serialize, Deserialize)]
struct RawProblem {
    values: Vec<Vec<serde_json::Number>>,
    weights: Vec<Rational>,
    costs: Vec<serde_json::Number>,
    budget: u64,
}

impl ReserveProblem {
    /// `values[i][p]` is the value of species `i` at parcel `p`.
    pub fn new(values: Vec<Vec<u64>>, weights: Vec<Rational>, costs: Vec<u64>, budget: u64) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} species value rows but {} weights",
                values.len(),
                weights.len()
            )));
        }
        if let Some((i, row)) = values.iter().enumerate().find(|(_, row)| row.len() != costs.len()) {
            return Err(Error::ShapeMismatch(format!(
                "species {i} has {} parcel values but there are {} parcel costs",
                row.len(),
                costs.len()
            )));
        }
        Ok(ReserveProblem {
            values,
            weights,
            costs,
            budget,
        })
    }

    /// Builds a problem from counts with the given weights and costs.
    pub fn from_counts(counts: &CountsGrid, weights: Vec<Rational>, costs: Vec<u64>, budget: u64) -> Result<Self> {
        ReserveProblem::new(counts.counts().to_vec(), weights, costs, budget)
    }

    /// Accepts real-valued costs, rejecting any that are not nonnegative integers.
    pub fn with_real_costs(values: Vec<Vec<u64>>, weights: Vec<Rational>, costs: &[f64], budget: u64) -> Result<Self> {
        let costs = costs
            .iter()
            .enumerate()
            .map(|(index, &value)| integral(value).ok_or(Error::NonIntegerCost { index, value }))
            .collect::<Result<_>>()?;
        ReserveProblem::new(values, weights, costs, budget)
    }

    pub fn parcels(&self) -> usize {
        self.costs.len()
    }

    pub fn species(&self) -> usize {
        self.weights.len()
    }

    pub fn values(&self) -> &[Vec<u64>] {
        &self.values
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn costs(&self) -> &[u64] {
        &self.costs
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn with_budget(&self, budget: u64) -> Self {
        ReserveProblem { budget, ..self.clone() }
    }

    pub fn with_weights(&self, weights: Vec<Rational>) -> Result<Self> {
        ReserveProblem::new(self.values.clone(), weights, self.costs.clone(), self.budget)
    }

    pub fn has_unit_costs(&self) -> bool {
        self.costs.iter().all(|&c| c == 1)
    }

    /// Integer parcel scores scaled by the common weight denominator, and that denominator.
    fn scaled_scores(&self) -> Result<(Vec<u128>, u128)> {
        let scale = common_denominator(&self.weights)?;
        let int_weights: Vec<u128> = self
            .weights
            .iter()
            .map(|w| {
                w.num()
                    .checked_mul(scale / w.den())
                    .ok_or(Error::Overflow("scaling weights"))
            })
            .collect::<Result<_>>()?;
        let scores = (0..self.parcels())
            .map(|p| {
                int_weights
                    .iter()
                    .zip(&self.values)
                    .try_fold(0u128, |acc, (w, row)| {
                        w.checked_mul(row[p] as u128).and_then(|v| acc.checked_add(v))
                    })
                    .ok_or(Error::Overflow("computing parcel scores"))
            })
            .collect::<Result<_>>()?;
        Ok((scores, scale))
    }

    /// Objective of an arbitrary selection.
    pub fn objective_of(&self, x: &[bool]) -> Result<Rational> {
        self.check_len(x.len())?;
        let (scores, scale) = self.scaled_scores()?;
        let total = sum_selected(&scores, x)?;
        Rational::new(total, scale)
    }

    pub fn spent_of(&self, x: &[bool]) -> Result<u64> {
        self.check_len(x.len())?;
        self.costs
            .iter()
            .zip(x)
            .filter(|(_, &on)| on)
            .try_fold(0u64, |acc, (&c, _)| acc.checked_add(c))
            .ok_or(Error::Overflow("summing costs"))
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.parcels() {
            return Err(Error::ShapeMismatch(format!(
                "selection covers {len} parcels, problem has {}",
                self.parcels()
            )));
        }
        Ok(())
    }

    fn solution(&self, x: Vec<bool>, scores: &[u128], scale: u128) -> Result<ReserveSolution> {
        let objective = Rational::new(sum_selected(scores, &x)?, scale)?;
        let spent = self.spent_of(&x)?;
        Ok(ReserveSolution { x, objective, spent })
    }
}

fn integral(v: f64) -> Option<u64> {
    (v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64).then_some(v as u64)
}

fn sum_selected(scores: &[u128], x: &[bool]) -> Result<u128> {
    scores
        .iter()
        .zip(x)
        .filter(|(_, &on)| on)
        .try_fold(0u128, |acc, (&s, _)| acc.checked_add(s))
        .ok_or(Error::Overflow("summing the objective"))
}

impl TryFrom<RawProblem> for ReserveProblem {
    type Error = Error;

    fn try_from(raw: RawProblem) -> Result<Self> {
        let values = raw
            .values
            .iter()
            .enumerate()
            .map(|(species, row)| {
                row.iter()
                    .enumerate()
                    .map(|(parcel, v)| {
                        v.as_u64()
                            .or_else(|| v.as_f64().and_then(integral))
                            .ok_or_else(|| Error::NonIntegerValue {
                                species,
                                parcel,
                                value: v.as_f64().unwrap_or(f64::NAN),
                            })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let costs = raw
            .costs
            .iter()
            .enumerate()
            .map(|(index, c)| {
                c.as_u64()
                    .or_else(|| c.as_f64().and_then(integral))
                    .ok_or_else(|| Error::NonIntegerCost {
                        index,
                        value: c.as_f64().unwrap_or(f64::NAN),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        ReserveProblem::new(values, raw.weights, costs, raw.budget)
    }
}

impl From<ReserveProblem> for RawProblem {
    fn from(p: ReserveProblem) -> Self {
        RawProblem {
            values: p
                .values
                .into_iter()
                .map(|row| row.into_iter().map(Into::into).collect())
                .collect(),
            weights: p.weights,
            costs: p.costs.into_iter().map(Into::into).collect(),
            budget: p.budget,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReserveSolution {
    #[serde(with = "bits")]
    pub x: Vec<bool>,
    pub objective: Rational,
    pub spent: u64,
}

impl ReserveSolution {
    pub fn protected(&self) -> Vec<usize> {
        self.x.iter().enumerate().filter(|(_, &on)| on).map(|(p, _)| p).collect()
    }

    pub fn parcels(&self) -> usize {
        self.x.len()
    }
}

mod bits {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &[bool], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(x.iter().map(|&b| b as u8))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        Vec::<u8>::deserialize(d)?
            .into_iter()
            .map(|v| match v {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(D::Error::custom(format!("protection flag must be 0 or 1, got {other}"))),
            })
            .collect()
    }
}

/// Exact weighted value of one parcel, `sum_i w_i v_i(p)`.
pub fn parcel_score(problem: &ReserveProblem, p: usize) -> Result<Rational> {
    if p >= problem.parcels() {
        return Err(Error::IndexOutOfRange {
            index: p,
            len: problem.parcels(),
        });
    }
    let (scores, scale) = problem.scaled_scores()?;
    Rational::new(scores[p], scale)
}

/// Unit-cost fast path: protect the `B` best parcels.
pub fn solve_topk(problem: &ReserveProblem) -> Result<ReserveSolution> {
    if let Some(p) = problem.costs.iter().position(|&c| c != 1) {
        return Err(Error::WrongSolver(format!(
            "top-k selection needs unit costs, parcel {p} costs {}; use the DP solver",
            problem.costs[p]
        )));
    }
    let (scores, scale) = problem.scaled_scores()?;
    let mut order: Vec<usize> = (0..problem.parcels()).collect();
    order.sort_by(|&a, &b| scores[b].cmp(&scores[a]).then(a.cmp(&b)));
    let take = usize::try_from(problem.budget).unwrap_or(usize::MAX).min(order.len());
    let mut x = vec![false; problem.parcels()];
    for &p in &order[..take] {
        x[p] = true;
    }
    problem.solution(x, &scores, scale)
}

/// Exact 0/1 knapsack by dynamic programming over integer budgets.
pub fn solve_dp(problem: &ReserveProblem) -> Result<ReserveSolution> {
    let (scores, scale) = problem.scaled_scores()?;
    let parcels = problem.parcels();
    let total_cost = problem.costs.iter().fold(0u64, |a, &c| a.saturating_add(c));
    let cap = problem.budget.min(total_cost);
    let width = usize::try_from(cap)
        .ok()
        .and_then(|c| c.checked_add(1))
        .ok_or(Error::TableTooLarge {
            cells: usize::MAX,
            limit: DP_CELL_LIMIT,
        })?;
    let cells = width.saturating_mul(parcels + 1);
    if cells > DP_CELL_LIMIT {
        return Err(Error::TableTooLarge {
            cells,
            limit: DP_CELL_LIMIT,
        });
    }

    // best[p * width + b]: optimum over parcels p.. with budget b.
    let mut best = vec![0u128; cells];
    for p in (0..parcels).rev() {
        let cost = problem.costs[p];
        let (row, below) = best[p * width..].split_at_mut(width);
        let below = &below[..width];
        for b in 0..width {
            let skip = below[b];
            row[b] = if cost <= b as u64 {
                let take = scores[p] + below[b - cost as usize];
                take.max(skip)
            } else {
                skip
            };
        }
    }

    // Prefer protecting lower-indexed parcels whenever an optimum allows it.
    let mut x = vec![false; parcels];
    let mut b = width - 1;
    for p in 0..parcels {
        let cost = problem.costs[p];
        if cost <= b as u64 {
            let rest = b - cost as usize;
            if scores[p] + best[(p + 1) * width + rest] == best[p * width + b] {
                x[p] = true;
                b = rest;
            }
        }
    }
    problem.solution(x, &scores, scale)
}

/// Exhaustive search over all `2^|P|` selections; a test oracle.
pub fn solve_bruteforce(problem: &ReserveProblem) -> Result<ReserveSolution> {
    let parcels = problem.parcels();
    if parcels > BRUTEFORCE_LIMIT {
        return Err(Error::TooManyParcels {
            parcels,
            limit: BRUTEFORCE_LIMIT,
        });
    }
    let (scores, scale) = problem.scaled_scores()?;
    // Parcel p lives at bit (parcels - 1 - p), so among equal objectives the
    // numerically larger mask is the preferred one.
    let bit = |p: usize| 1u32 << (parcels - 1 - p);
    let mut best: Option<(u128, u32)> = None;
    for mask in 0u32..(1u32 << parcels) {
        let mut value = 0u128;
        let mut spent = 0u64;
        for (p, (score, cost)) in scores.iter().zip(&problem.costs).enumerate() {
            if mask & bit(p) != 0 {
                value += score;
                spent += cost;
            }
        }
        if spent <= problem.budget && best.is_none_or(|b| (value, mask) > b) {
            best = Some((value, mask));
        }
    }
    let (_, mask) = best.expect("the empty selection is always feasible");
    let x = (0..parcels).map(|p| mask & bit(p) != 0).collect();
    problem.solution(x, &scores, scale)
}

/// Uses the top-k path for unit costs and the DP otherwise.
pub fn solve(problem: &ReserveProblem) -> Result<ReserveSolution> {
    if problem.has_unit_costs() {
        solve_topk(problem)
    } else {
        solve_dp(problem)
    }
}
