#![allow(dead_code)]

use proptest::collection::vec;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use reserve_core::{CountsGrid, Rational, ReserveProblem};

/// Independent exhaustive optimum: scores are scaled by the product of all
/// weight denominators, subsets are enumerated in plain binary order, and
/// ties go to the selection that protects a lower-indexed parcel first.
pub fn enumerate_optimum(problem: &ReserveProblem) -> (Vec<bool>, Rational) {
    let parcels = problem.parcels();
    let scale: u128 = problem.weights().iter().map(|w| w.den()).product();
    let scores: Vec<u128> = (0..parcels)
        .map(|p| {
            problem
                .weights()
                .iter()
                .zip(problem.values())
                .map(|(w, row)| w.num() * (scale / w.den()) * row[p] as u128)
                .sum()
        })
        .collect();
    let mut best: Option<(u128, u64)> = None;
    for mask in 0u64..(1u64 << parcels) {
        let (mut cost, mut value) = (0u64, 0u128);
        for p in (0..parcels).filter(|p| mask >> p & 1 == 1) {
            cost += problem.costs()[p];
            value += scores[p];
        }
        if cost > problem.budget() {
            continue;
        }
        let better = match best {
            None => true,
            Some((v, m)) => value > v || (value == v && prefers(mask, m)),
        };
        if better {
            best = Some((value, mask));
        }
    }
    let (value, mask) = best.unwrap();
    let x = (0..parcels).map(|p| mask >> p & 1 == 1).collect();
    (x, Rational::new(value, scale).unwrap())
}

/// Bit `p` is parcel `p`: `a` beats `b` if at the lowest differing parcel `a` protects.
fn prefers(a: u64, b: u64) -> bool {
    let diff = a ^ b;
    diff != 0 && a & (diff & diff.wrapping_neg()) != 0
}

pub fn random_problem(rng: &mut ChaCha8Rng, max_parcels: usize) -> ReserveProblem {
    let parcels = rng.gen_range(1..=max_parcels);
    let species = rng.gen_range(1..=3);
    let values = (0..species)
        .map(|_| (0..parcels).map(|_| rng.gen_range(0..=50)).collect())
        .collect();
    let weights = (0..species)
        .map(|_| Rational::new(rng.gen_range(0..=20), rng.gen_range(1..=20)).unwrap())
        .collect();
    let costs: Vec<u64> = (0..parcels).map(|_| rng.gen_range(0..=10)).collect();
    let budget = rng.gen_range(0..=costs.iter().sum::<u64>() + 2);
    ReserveProblem::new(values, weights, costs, budget).unwrap()
}

pub fn random_unit_problem(rng: &mut ChaCha8Rng, parcels: usize) -> ReserveProblem {
    let species = rng.gen_range(1..=5);
    // narrow value range so equal scores (and the tie-break) are common
    let values = (0..species)
        .map(|_| (0..parcels).map(|_| rng.gen_range(0..=6)).collect())
        .collect();
    let weights = (0..species)
        .map(|_| Rational::new(rng.gen_range(0..=10), rng.gen_range(1..=10)).unwrap())
        .collect();
    let budget = rng.gen_range(0..=parcels as u64 + 5);
    ReserveProblem::new(values, weights, vec![1; parcels], budget).unwrap()
}

pub fn arb_weight() -> impl Strategy<Value = Rational> {
    (0u128..=20, 1u128..=20).prop_map(|(n, d)| Rational::new(n, d).unwrap())
}

pub fn arb_problem(max_parcels: usize) -> impl Strategy<Value = ReserveProblem> {
    (1..=max_parcels, 1usize..=3).prop_flat_map(|(parcels, species)| {
        (
            vec(vec(0u64..=50, parcels), species),
            vec(arb_weight(), species),
            vec(0u64..=10, parcels),
            0u64..=60,
        )
            .prop_map(|(values, weights, costs, budget)| ReserveProblem::new(values, weights, costs, budget).unwrap())
    })
}

pub fn arb_counts(max_n: usize, max_species: usize) -> impl Strategy<Value = CountsGrid> {
    (1..=max_n, 1..=max_species).prop_flat_map(|(n, s)| {
        vec(vec(0u64..=300, n * n), s).prop_map(move |counts| CountsGrid::new(n, counts).unwrap())
    })
}
