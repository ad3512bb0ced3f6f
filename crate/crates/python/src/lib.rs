//! Python bindings for `reserve-core`.
//!
//! Weights and objectives cross the boundary as `(numerator, denominator)`
//! tuples so that exact tie-breaking survives the round trip.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use reserve_core::dynamics;
use reserve_core::experiment::{self, Scenario, SweepRow};
use reserve_core::io::{parse_json, to_json_string};
use reserve_core::landscape::{self, Landscape};
use reserve_core::render::{self, AnnotationLayout, RenderSpec};
use reserve_core::solver::{self, ReserveProblem, ReserveSolution};
use reserve_core::{CountsGrid, LVParams, Rational, RealGrid};

fn err(e: reserve_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn from_json<T: serde::de::DeserializeOwned>(text: &str) -> PyResult<T> {
    parse_json(std::path::Path::new("<string>"), text).map_err(err)
}

fn rationals(pairs: Vec<(u128, u128)>) -> PyResult<Vec<Rational>> {
    pairs
        .into_iter()
        .map(|(n, d)| Rational::new(n, d).map_err(err))
        .collect()
}

fn pair(r: Rational) -> (u128, u128) {
    (r.num(), r.den())
}

fn bits(x: &[bool]) -> Vec<u32> {
    x.iter().map(|&b| b as u32).collect()
}

#[pyclass(name = "Landscape", module = "reserve_select", frozen)]
struct PyLandscape {
    inner: Landscape,
}

#[pymethods]
impl PyLandscape {
    #[new]
    fn new(n: usize, values: Vec<f64>) -> PyResult<Self> {
        Ok(PyLandscape {
            inner: Landscape::from_values(n, values).map_err(err)?,
        })
    }

    #[staticmethod]
    fn generate(n: usize, smoothing_rounds: u32, seed: u64) -> PyResult<Self> {
        Ok(PyLandscape {
            inner: landscape::generate_landscape(n, smoothing_rounds, seed).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyLandscape { inner: from_json(text)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn fragmentation(&self) -> f64 {
        self.inner.fragmentation().value()
    }

    fn to_json(&self) -> String {
        to_json_string(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Landscape(n={}, fragmentation={:.4})",
            self.inner.n(),
            self.inner.fragmentation().value()
        )
    }
}

/// Counts for one species placed on `landscape`, row-major.
#[pyfunction]
fn distribute_population(landscape: &PyLandscape, total: u64, seed: u64) -> PyResult<Vec<u64>> {
    let grid = landscape::distribute_population(&landscape.inner, total, seed).map_err(err)?;
    Ok(grid.counts()[0].clone())
}

/// Indices of the `k` most and `k` least fragmented landscapes.
#[pyfunction]
fn select_extremes(landscapes: Vec<PyRef<'_, PyLandscape>>, k: usize) -> PyResult<(Vec<usize>, Vec<usize>)> {
    let ls: Vec<Landscape> = landscapes.iter().map(|l| l.inner.clone()).collect();
    let e = landscape::select_extremes(&ls, k).map_err(err)?;
    Ok((e.most, e.least))
}

#[pyclass(name = "LVParams", module = "reserve_select", frozen)]
struct PyLVParams {
    inner: LVParams,
}

#[pymethods]
impl PyLVParams {
    #[new]
    #[pyo3(signature = (r, alpha, beta, dt = dynamics::DEFAULT_DT, steps = dynamics::DEFAULT_STEPS))]
    fn new(r: Vec<f64>, alpha: Vec<Vec<f64>>, beta: Vec<f64>, dt: f64, steps: usize) -> PyResult<Self> {
        Ok(PyLVParams {
            inner: LVParams::new(r, alpha, beta, dt, steps).map_err(err)?,
        })
    }

    #[staticmethod]
    fn default(species: usize) -> Self {
        PyLVParams {
            inner: LVParams::default_for(species),
        }
    }

    #[staticmethod]
    fn zero(species: usize) -> Self {
        PyLVParams {
            inner: LVParams::zero_dynamics(species),
        }
    }

    #[getter]
    fn dt(&self) -> f64 {
        self.inner.dt
    }

    #[getter]
    fn steps(&self) -> usize {
        self.inner.steps
    }

    fn to_json(&self) -> String {
        to_json_string(&self.inner)
    }
}

/// One simultaneous Euler step at a single parcel.
#[pyfunction]
fn lv_step(state: Vec<f64>, params: &PyLVParams) -> PyResult<Vec<f64>> {
    if state.len() != params.inner.species() {
        return Err(PyValueError::new_err(format!(
            "state has {} species, parameters have {}",
            state.len(),
            params.inner.species()
        )));
    }
    if state.iter().any(|&v| v.is_nan() || v < 0.0) {
        return Err(PyValueError::new_err("state entries must be nonnegative"));
    }
    Ok(dynamics::lv_step(&state, &params.inner))
}

/// Simulated counts per species (row-major) for an `n x n` grid of observed counts.
#[pyfunction]
fn simulate(n: usize, counts: Vec<Vec<u64>>, params: &PyLVParams) -> PyResult<Vec<Vec<f64>>> {
    let grid = CountsGrid::new(n, counts).map_err(err)?;
    let sim = dynamics::simulate(&grid, &params.inner).map_err(err)?;
    Ok(sim.counts().to_vec())
}

#[pyfunction]
fn round_counts(n: usize, counts: Vec<Vec<f64>>) -> PyResult<Vec<Vec<u64>>> {
    let grid = RealGrid::new(n, counts).map_err(err)?;
    Ok(dynamics::round_counts(&grid).counts().to_vec())
}

#[pyclass(name = "ReserveSolution", module = "reserve_select", frozen)]
struct PyReserveSolution {
    inner: ReserveSolution,
}

#[pymethods]
impl PyReserveSolution {
    #[getter]
    fn x(&self) -> Vec<u32> {
        bits(&self.inner.x)
    }

    #[getter]
    fn objective(&self) -> (u128, u128) {
        pair(self.inner.objective)
    }

    #[getter]
    fn objective_float(&self) -> f64 {
        self.inner.objective.to_f64()
    }

    #[getter]
    fn spent(&self) -> u64 {
        self.inner.spent
    }

    fn protected(&self) -> Vec<usize> {
        self.inner.protected()
    }

    fn to_json(&self) -> String {
        to_json_string(&self.inner)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyReserveSolution { inner: from_json(text)? })
    }

    fn __repr__(&self) -> String {
        format!(
            "ReserveSolution(protected={}, objective={}, spent={})",
            self.inner.protected().len(),
            self.inner.objective,
            self.inner.spent
        )
    }
}

#[pyclass(name = "ReserveProblem", module = "reserve_select", frozen)]
struct PyReserveProblem {
    inner: ReserveProblem,
}

impl PyReserveProblem {
    fn wrap(result: reserve_core::Result<ReserveSolution>) -> PyResult<PyReserveSolution> {
        Ok(PyReserveSolution {
            inner: result.map_err(err)?,
        })
    }
}

#[pymethods]
impl PyReserveProblem {
    /// `values[i][p]`: value of species `i` at parcel `p`; weights as `(num, den)`.
    #[new]
    fn new(values: Vec<Vec<u64>>, weights: Vec<(u128, u128)>, costs: Vec<f64>, budget: u64) -> PyResult<Self> {
        let inner = ReserveProblem::with_real_costs(values, rationals(weights)?, &costs, budget).map_err(err)?;
        Ok(PyReserveProblem { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyReserveProblem { inner: from_json(text)? })
    }

    fn to_json(&self) -> String {
        to_json_string(&self.inner)
    }

    #[getter]
    fn parcels(&self) -> usize {
        self.inner.parcels()
    }

    #[getter]
    fn budget(&self) -> u64 {
        self.inner.budget()
    }

    fn with_budget(&self, budget: u64) -> Self {
        PyReserveProblem {
            inner: self.inner.with_budget(budget),
        }
    }

    fn parcel_score(&self, p: usize) -> PyResult<(u128, u128)> {
        Ok(pair(solver::parcel_score(&self.inner, p).map_err(err)?))
    }

    fn solve(&self) -> PyResult<PyReserveSolution> {
        Self::wrap(solver::solve(&self.inner))
    }

    fn solve_dp(&self) -> PyResult<PyReserveSolution> {
        Self::wrap(solver::solve_dp(&self.inner))
    }

    fn solve_topk(&self) -> PyResult<PyReserveSolution> {
        Self::wrap(solver::solve_topk(&self.inner))
    }

    fn solve_bruteforce(&self) -> PyResult<PyReserveSolution> {
        Self::wrap(solver::solve_bruteforce(&self.inner))
    }
}

#[pyfunction]
fn similarity(a: &PyReserveSolution, b: &PyReserveSolution) -> PyResult<usize> {
    experiment::similarity(&a.inner, &b.inner).map_err(err)
}

#[pyclass(name = "SweepRow", module = "reserve_select", frozen)]
struct PySweepRow {
    inner: SweepRow,
}

#[pymethods]
impl PySweepRow {
    #[getter]
    fn budget(&self) -> u64 {
        self.inner.budget
    }

    #[getter]
    fn similarity(&self) -> usize {
        self.inner.similarity
    }

    #[getter]
    fn objective_1(&self) -> (u128, u128) {
        pair(self.inner.objective_1)
    }

    #[getter]
    fn objective_2(&self) -> (u128, u128) {
        pair(self.inner.objective_2)
    }

    #[getter]
    fn x_1(&self) -> Vec<u32> {
        bits(&self.inner.x_1)
    }

    #[getter]
    fn x_2(&self) -> Vec<u32> {
        bits(&self.inner.x_2)
    }

    fn __repr__(&self) -> String {
        format!(
            "SweepRow(budget={}, similarity={})",
            self.inner.budget, self.inner.similarity
        )
    }
}

#[pyclass(name = "Scenario", module = "reserve_select", frozen)]
struct PyScenario {
    inner: Scenario,
}

#[pymethods]
impl PyScenario {
    /// The six default cases built from a freshly generated species suite.
    #[staticmethod]
    #[pyo3(signature = (seed, pool_size = experiment::DEFAULT_POOL_SIZE, n = experiment::DEFAULT_GRID))]
    fn defaults(py: Python<'_>, seed: u64, pool_size: usize, n: usize) -> PyResult<Vec<Self>> {
        let scenarios = py
            .detach(|| {
                experiment::build_species_suite(seed, pool_size, n).and_then(|s| experiment::default_scenarios(&s))
            })
            .map_err(err)?;
        Ok(scenarios.into_iter().map(|inner| PyScenario { inner }).collect())
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyScenario { inner: from_json(text)? })
    }

    fn to_json(&self) -> String {
        to_json_string(&self.inner)
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn species_ids(&self) -> Vec<String> {
        self.inner.species.iter().map(|s| s.id.clone()).collect()
    }

    #[getter]
    fn budgets(&self) -> Vec<u64> {
        self.inner.budgets.clone()
    }

    #[getter]
    fn observed(&self) -> PyResult<Vec<Vec<u64>>> {
        Ok(self.inner.observed().map_err(err)?.counts().to_vec())
    }

    fn simulated(&self) -> PyResult<Vec<Vec<u64>>> {
        Ok(self.inner.simulated().map_err(err)?.counts().to_vec())
    }

    fn with_weights(&self, weights: Vec<(u128, u128)>) -> PyResult<Self> {
        Ok(PyScenario {
            inner: self.inner.with_weights(rationals(weights)?),
        })
    }

    fn with_params(&self, params: &PyLVParams) -> Self {
        let mut inner = self.inner.clone();
        inner.lv_params = params.inner.clone();
        PyScenario { inner }
    }

    fn sweep(&self, py: Python<'_>) -> PyResult<Vec<PySweepRow>> {
        let rows = py.detach(|| experiment::budget_sweep(&self.inner)).map_err(err)?;
        Ok(rows.into_iter().map(|inner| PySweepRow { inner }).collect())
    }
}

/// `(min, mean, median)` similarity over interior budgets.
#[pyfunction]
fn summarize(rows: Vec<PyRef<'_, PySweepRow>>) -> PyResult<(usize, f64, f64)> {
    let rows: Vec<SweepRow> = rows.iter().map(|r| r.inner.clone()).collect();
    let s = experiment::summarize(&rows).map_err(err)?;
    Ok((s.min, s.mean, s.median))
}

/// SVG of one solution, or two side by side when `second` is given.
#[pyfunction]
#[pyo3(signature = (n, solution, counts, second = None))]
fn render_svg(
    n: usize,
    solution: &PyReserveSolution,
    counts: Vec<Vec<u64>>,
    second: Option<(PyRef<'_, PyReserveSolution>, Vec<Vec<u64>>)>,
) -> PyResult<String> {
    let grid = CountsGrid::new(n, counts).map_err(err)?;
    let layout = AnnotationLayout::for_species(grid.species()).unwrap_or(AnnotationLayout::Inline);
    let spec = match second {
        Some((sol2, counts2)) => {
            let grid2 = CountsGrid::new(n, counts2).map_err(err)?;
            RenderSpec::pair_with_layout(
                ("observed counts", &solution.inner, &grid),
                ("simulated counts", &sol2.inner, &grid2),
                layout,
            )
        }
        None => RenderSpec::single_with_layout("solution", &solution.inner, &grid, layout),
    }
    .map_err(err)?;
    render::render_grid(&spec).map_err(err)
}

#[pymodule]
fn reserve_select(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLandscape>()?;
    m.add_class::<PyLVParams>()?;
    m.add_class::<PyReserveProblem>()?;
    m.add_class::<PyReserveSolution>()?;
    m.add_class::<PyScenario>()?;
    m.add_class::<PySweepRow>()?;
    m.add_function(wrap_pyfunction!(distribute_population, m)?)?;
    m.add_function(wrap_pyfunction!(select_extremes, m)?)?;
    m.add_function(wrap_pyfunction!(lv_step, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(round_counts, m)?)?;
    m.add_function(wrap_pyfunction!(similarity, m)?)?;
    m.add_function(wrap_pyfunction!(summarize, m)?)?;
    m.add_function(wrap_pyfunction!(render_svg, m)?)?;
    Ok(())
}
