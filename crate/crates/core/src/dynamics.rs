//! Per-parcel Lotka-Volterra competition with crowding.
//!
//! Each parcel evolves on its own. One explicit Euler step updates every
//! species simultaneously from the pre-step state:
//!
//! ```text
//! dN_i = dt * ( r_i N_i  -  N_i * sum_{j != i} alpha_ij N_j  -  beta_i N_i^2 )
//! N_i <- max(0, N_i + dN_i)
//! ```

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{CountsGrid, RealGrid};

pub const DEFAULT_BIRTH_RATE: f64 = 0.1;
pub const DEFAULT_COMPETITION: f64 = 0.0005;
pub const DEFAULT_CROWDING: f64 = 0.001;
pub const DEFAULT_DT: f64 = 0.01;
pub const DEFAULT_STEPS: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct LVParams {
    /// Birth rate per species.
    pub r: Vec<f64>,
    /// Interspecific competition; `alpha[i][j]` is the effect of `j` on `i`.
    pub alpha: Vec<Vec<f64>>,
    /// Crowding (self-limitation) per species.
    pub beta: Vec<f64>,
    pub dt: f64,
    pub steps: usize,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    r: Vec<f64>,
    alpha: Vec<Vec<f64>>,
    beta: Vec<f64>,
    dt: f64,
    #[serde(rename = "T")]
    steps: usize,
}

impl LVParams {
    pub fn new(r: Vec<f64>, alpha: Vec<Vec<f64>>, beta: Vec<f64>, dt: f64, steps: usize) -> Result<Self> {
        let p = LVParams {
            r,
            alpha,
            beta,
            dt,
            steps,
        };
        p.validate()?;
        Ok(p)
    }

    /// Experiment defaults: equal rates for every species, steady states of order 100.
    pub fn default_for(species: usize) -> Self {
        LVParams {
            r: vec![DEFAULT_BIRTH_RATE; species],
            alpha: (0..species)
                .map(|i| {
                    (0..species)
                        .map(|j| if i == j { 0.0 } else { DEFAULT_COMPETITION })
                        .collect()
                })
                .collect(),
            beta: vec![DEFAULT_CROWDING; species],
            dt: DEFAULT_DT,
            steps: DEFAULT_STEPS,
        }
    }

    /// All rates zero: simulation is the identity.
    pub fn zero_dynamics(species: usize) -> Self {
        LVParams {
            r: vec![0.0; species],
            alpha: vec![vec![0.0; species]; species],
            beta: vec![0.0; species],
            dt: DEFAULT_DT,
            steps: DEFAULT_STEPS,
        }
    }

    pub fn species(&self) -> usize {
        self.r.len()
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.r.len();
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.beta.len() != s {
            return bad(format!("{} birth rates but {} crowding coefficients", s, self.beta.len()));
        }
        if self.alpha.len() != s || self.alpha.iter().any(|row| row.len() != s) {
            return bad(format!("competition matrix must be {s}x{s}"));
        }
        let nonneg = |v: f64| v.is_finite() && v >= 0.0;
        if let Some(i) = self.r.iter().position(|&v| !nonneg(v)) {
            return bad(format!("r[{i}] = {} must be finite and nonnegative", self.r[i]));
        }
        if let Some(i) = self.beta.iter().position(|&v| !nonneg(v)) {
            return bad(format!("beta[{i}] = {} must be finite and nonnegative", self.beta[i]));
        }
        for (i, row) in self.alpha.iter().enumerate() {
            for (j, &a) in row.iter().enumerate() {
                if !nonneg(a) {
                    return bad(format!("alpha[{i}][{j}] = {a} must be finite and nonnegative"));
                }
                if i == j && a != 0.0 {
                    return bad(format!(
                        "alpha[{i}][{i}] = {a}; self-limitation belongs in beta, the diagonal must be 0"
                    ));
                }
            }
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt = {} must be positive", self.dt));
        }
        Ok(())
    }

    fn check_species(&self, species: usize) -> Result<()> {
        if self.species() != species {
            return Err(Error::ShapeMismatch(format!(
                "parameters describe {} species, counts have {species}",
                self.species()
            )));
        }
        Ok(())
    }
}

impl TryFrom<RawParams> for LVParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        LVParams::new(raw.r, raw.alpha, raw.beta, raw.dt, raw.steps)
    }
}

impl From<LVParams> for RawParams {
    fn from(p: LVParams) -> Self {
        RawParams {
            r: p.r,
            alpha: p.alpha,
            beta: p.beta,
            dt: p.dt,
            steps: p.steps,
        }
    }
}

/// One Euler step at a single parcel.
pub fn lv_step(state: &[f64], params: &LVParams) -> Vec<f64> {
    let mut next = vec![0.0; state.len()];
    lv_step_into(state, params, &mut next);
    next
}

fn lv_step_into(state: &[f64], params: &LVParams, next: &mut [f64]) {
    debug_assert_eq!(state.len(), params.species());
    for (i, out) in next.iter_mut().enumerate() {
        let n_i = state[i];
        let competition: f64 = params.alpha[i]
            .iter()
            .zip(state)
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, (a, n_j))| a * n_j)
            .sum();
        let delta = params.dt * (params.r[i] * n_i - n_i * competition - params.beta[i] * n_i * n_i);
        *out = (n_i + delta).max(0.0);
    }
}

/// Runs `params.steps` steps from `initial`.
pub fn simulate_parcel(initial: &[f64], params: &LVParams) -> Vec<f64> {
    let mut state = initial.to_vec();
    let mut next = vec![0.0; state.len()];
    for _ in 0..params.steps {
        lv_step_into(&state, params, &mut next);
        std::mem::swap(&mut state, &mut next);
    }
    state
}

/// Simulated future counts together with the parameters that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedGrid {
    pub grid: RealGrid,
    pub params: LVParams,
}

impl SimulatedGrid {
    pub fn counts(&self) -> &[Vec<f64>] {
        self.grid.counts()
    }
}

pub fn simulate(observed: &CountsGrid, params: &LVParams) -> Result<SimulatedGrid> {
    simulate_real(&observed.to_real(), params)
}

/// Same as [`simulate`] but starting from real-valued counts.
pub fn simulate_real(initial: &RealGrid, params: &LVParams) -> Result<SimulatedGrid> {
    params.validate()?;
    params.check_species(initial.species())?;
    let species = initial.species();
    let parcels = initial.parcels();
    let by_parcel: Vec<Vec<f64>> = (0..parcels)
        .into_par_iter()
        .map(|p| {
            let start: Vec<f64> = initial.counts().iter().map(|row| row[p]).collect();
            simulate_parcel(&start, params)
        })
        .collect();
    let counts = (0..species)
        .map(|i| by_parcel.iter().map(|state| state[i]).collect())
        .collect();
    Ok(SimulatedGrid {
        grid: RealGrid::from_parts_unchecked(initial.n(), counts),
        params: params.clone(),
    })
}

/// Round half up.
pub fn round_count(value: f64) -> u64 {
    (value + 0.5).floor() as u64
}

pub fn round_counts(simulated: &RealGrid) -> CountsGrid {
    let counts = simulated
        .counts()
        .iter()
        .map(|row| row.iter().map(|&v| round_count(v)).collect())
        .collect();
    CountsGrid::new(simulated.n(), counts).expect("shape preserved from a valid grid")
}
