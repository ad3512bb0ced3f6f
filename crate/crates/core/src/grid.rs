//! Per-parcel, per-species count grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Observed (integer) individual counts on an `n x n` grid.
///
/// `counts[i][p]` is the number of individuals of species `i` at parcel `p`,
/// with parcels in row-major order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid<u64>", into = "RawGrid<u64>")]
pub struct CountsGrid {
    n: usize,
    counts: Vec<Vec<u64>>,
}

/// Real-valued counts with the same layout as [`CountsGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid<f64>", into = "RawGrid<f64>")]
pub struct RealGrid {
    n: usize,
    counts: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct RawGrid<T> {
    n: usize,
    species: usize,
    counts: Vec<Vec<T>>,
}

fn check_shape<T>(n: usize, counts: &[Vec<T>]) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidDimension("grid side length must be at least 1".into()));
    }
    let parcels = n * n;
    for (i, row) in counts.iter().enumerate() {
        if row.len() != parcels {
            return Err(Error::ShapeMismatch(format!(
                "species {i} has {} parcel entries, expected {parcels}",
                row.len()
            )));
        }
    }
    Ok(())
}

impl CountsGrid {
    pub fn new(n: usize, counts: Vec<Vec<u64>>) -> Result<Self> {
        check_shape(n, &counts)?;
        Ok(CountsGrid { n, counts })
    }

    pub fn zeros(n: usize, species: usize) -> Result<Self> {
        CountsGrid::new(n, vec![vec![0; n * n]; species])
    }

    /// Stacks single-species grids of the same side length.
    pub fn stack<'a>(grids: impl IntoIterator<Item = &'a CountsGrid>) -> Result<Self> {
        let mut n = None;
        let mut counts = Vec::new();
        for g in grids {
            match n {
                None => n = Some(g.n),
                Some(m) if m != g.n => {
                    return Err(Error::ShapeMismatch(format!(
                        "cannot stack a {m}x{m} grid with a {0}x{0} grid",
                        g.n
                    )))
                }
                _ => {}
            }
            counts.extend(g.counts.iter().cloned());
        }
        let n = n.ok_or_else(|| Error::ShapeMismatch("no grids to stack".into()))?;
        CountsGrid::new(n, counts)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parcels(&self) -> usize {
        self.n * self.n
    }

    pub fn species(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn species_counts(&self, i: usize) -> &[u64] {
        &self.counts[i]
    }

    /// Counts of every species at one parcel.
    pub fn at(&self, parcel: usize) -> Vec<u64> {
        self.counts.iter().map(|row| row[parcel]).collect()
    }

    pub fn total(&self, i: usize) -> u64 {
        self.counts[i].iter().sum()
    }

    /// Keeps the listed species, in the listed order.
    pub fn select(&self, species: &[usize]) -> Result<Self> {
        let counts = species
            .iter()
            .map(|&i| {
                self.counts.get(i).cloned().ok_or_else(|| {
                    Error::ShapeMismatch(format!(
                        "species index {i} out of range for {} species",
                        self.species()
                    ))
                })
            })
            .collect::<Result<_>>()?;
        CountsGrid::new(self.n, counts)
    }

    pub fn to_real(&self) -> RealGrid {
        RealGrid {
            n: self.n,
            counts: self
                .counts
                .iter()
                .map(|row| row.iter().map(|&c| c as f64).collect())
                .collect(),
        }
    }
}

impl RealGrid {
    pub fn new(n: usize, counts: Vec<Vec<f64>>) -> Result<Self> {
        check_shape(n, &counts)?;
        for (i, row) in counts.iter().enumerate() {
            if let Some(p) = row.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::ShapeMismatch(format!(
                    "species {i} parcel {p} holds {}, expected a finite nonnegative count",
                    row[p]
                )));
            }
        }
        Ok(RealGrid { n, counts })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parcels(&self) -> usize {
        self.n * self.n
    }

    pub fn species(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[Vec<f64>] {
        &self.counts
    }

    /// Converts to integer counts when every entry is already integral.
    pub fn to_integer(&self) -> Option<CountsGrid> {
        let counts = self
            .counts
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&v| (v.fract() == 0.0 && v <= u64::MAX as f64).then_some(v as u64))
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>()?;
        Some(CountsGrid { n: self.n, counts })
    }

    pub(crate) fn from_parts_unchecked(n: usize, counts: Vec<Vec<f64>>) -> Self {
        RealGrid { n, counts }
    }
}

impl TryFrom<RawGrid<u64>> for CountsGrid {
    type Error = Error;

    fn try_from(raw: RawGrid<u64>) -> Result<Self> {
        if raw.species != raw.counts.len() {
            return Err(Error::ShapeMismatch(format!(
                "`species` is {} but `counts` has {} rows",
                raw.species,
                raw.counts.len()
            )));
        }
        CountsGrid::new(raw.n, raw.counts)
    }
}

impl From<CountsGrid> for RawGrid<u64> {
    fn from(g: CountsGrid) -> Self {
        RawGrid {
            n: g.n,
            species: g.counts.len(),
            counts: g.counts,
        }
    }
}

impl TryFrom<RawGrid<f64>> for RealGrid {
    type Error = Error;

    fn try_from(raw: RawGrid<f64>) -> Result<Self> {
        if raw.species != raw.counts.len() {
            return Err(Error::ShapeMismatch(format!(
                "`species` is {} but `counts` has {} rows",
                raw.species,
                raw.counts.len()
            )));
        }
        RealGrid::new(raw.n, raw.counts)
    }
}

impl From<RealGrid> for RawGrid<f64> {
    fn from(g: RealGrid) -> Self {
        RawGrid {
            n: g.n,
            species: g.counts.len(),
            counts: g.counts,
        }
    }
}
