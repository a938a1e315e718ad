//! Modulus-of-continuity audit over grid-aligned shifts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Grid, GridShift, RealField};
use crate::symbols::RadialFn;

/// Largest grid for the all-shifts enumeration.
pub const ALL_SHIFTS_MAX_N: usize = 64;

/// Nonempty set of nonzero shifts on one grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftSet {
    n: usize,
    shifts: Vec<GridShift>,
}

impl ShiftSet {
    pub fn new(grid: Grid, shifts: Vec<GridShift>) -> Result<Self> {
        if shifts.is_empty() {
            return Err(Error::Config("shift set is empty".into()));
        }
        let n = grid.n() as i64;
        if shifts
            .iter()
            .any(|s| s.i1.rem_euclid(n) == 0 && s.i2.rem_euclid(n) == 0)
        {
            return Err(Error::Config("shift set contains the zero shift".into()));
        }
        Ok(Self { n: grid.n(), shifts })
    }

    /// Axes and diagonals at lengths `2^j` cells, `j = 0..=max_level`, with
    /// `2^j ≤ n/2`. `None` takes every admissible level.
    pub fn dyadic(grid: Grid, max_level: Option<u32>) -> Self {
        let mut shifts = Vec::new();
        let mut j = 0u32;
        while (1usize << j) <= grid.n() / 2 && max_level.is_none_or(|m| j <= m) {
            let l = 1i64 << j;
            shifts.extend([
                GridShift::new(l, 0),
                GridShift::new(0, l),
                GridShift::new(l, l),
                GridShift::new(l, -l),
            ]);
            j += 1;
        }
        Self { n: grid.n(), shifts }
    }

    /// Every nonzero shift with components in `(−n/2, n/2]`.
    pub fn all(grid: Grid) -> Result<Self> {
        let n = grid.n();
        if n > ALL_SHIFTS_MAX_N {
            return Err(Error::Config(format!(
                "all-shifts enumeration is limited to n ≤ {ALL_SHIFTS_MAX_N}, got {n}"
            )));
        }
        let half = n as i64 / 2;
        let mut shifts = Vec::new();
        for i2 in (1 - half)..=half {
            for i1 in (1 - half)..=half {
                if i1 != 0 || i2 != 0 {
                    shifts.push(GridShift::new(i1, i2));
                }
            }
        }
        Ok(Self { n, shifts })
    }

    pub fn shifts(&self) -> &[GridShift] {
        &self.shifts
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    fn check(&self, grid: Grid) {
        assert_eq!(self.n, grid.n(), "shift set built for a different grid");
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftRatio {
    pub shift: GridShift,
    pub length: f64,
    /// `max_x |δ_hθ(x)| / ω(|h|)`.
    pub ratio: f64,
    /// Grid point `(i, j)` attaining the ratio.
    pub at: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MocReport {
    pub m_est: f64,
    pub argmax_point: (usize, usize),
    pub argmax_shift: GridShift,
    pub table: Vec<ShiftRatio>,
}

/// `max_x |θ(x + h) − θ(x)|` and its first attaining point.
fn max_difference(theta: &RealField, shift: GridShift) -> (f64, (usize, usize)) {
    let grid = theta.grid();
    let n = grid.n();
    let v = theta.values();
    let mut best = (0.0, (0, 0));
    for j in 0..n {
        for i in 0..n {
            let d = (v[grid.index(i as i64 + shift.i1, j as i64 + shift.i2)] - v[j * n + i]).abs();
            if d > best.0 {
                best = (d, (i, j));
            }
        }
    }
    best
}

fn per_shift<W: RadialFn + Sync + ?Sized>(theta: &RealField, omega: &W, shifts: &ShiftSet) -> Vec<(ShiftRatio, f64)> {
    let grid = theta.grid();
    shifts
        .shifts
        .par_iter()
        .map(|&shift| {
            let length = shift.length(grid);
            let (diff, at) = max_difference(theta, shift);
            (
                ShiftRatio {
                    shift,
                    length,
                    ratio: diff / omega.eval(length),
                    at,
                },
                diff,
            )
        })
        .collect()
}

/// `M_est = max_{h, x} |θ(x+h) − θ(x)| / ω(|h|)` over the shift set.
pub fn moc_ratio<W: RadialFn + Sync + ?Sized>(theta: &RealField, omega: &W, shifts: &ShiftSet) -> MocReport {
    shifts.check(theta.grid());
    let table: Vec<ShiftRatio> = per_shift(theta, omega, shifts).into_iter().map(|(r, _)| r).collect();
    // First maximum in shift-set order, for reproducibility.
    let mut best = &table[0];
    for r in &table[1..] {
        if r.ratio > best.ratio {
            best = r;
        }
    }
    MocReport {
        m_est: best.ratio,
        argmax_point: best.at,
        argmax_shift: best.shift,
        table: table.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Breakthrough {
    pub point: (usize, usize),
    pub shift: GridShift,
    /// `max |δ_hθ(x)| − M ω(|h|)`; positive means the modulus `Mω` is violated.
    pub margin: f64,
}

pub fn breakthrough_search<W: RadialFn + Sync + ?Sized>(
    theta: &RealField,
    omega: &W,
    m: f64,
    shifts: &ShiftSet,
) -> Result<Breakthrough> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::Domain(format!("modulus amplitude must be positive, got {m}")));
    }
    shifts.check(theta.grid());
    let rows = per_shift(theta, omega, shifts);
    let mut best: Option<Breakthrough> = None;
    for (r, diff) in rows {
        let margin = diff - m * omega.eval(r.length);
        if best.is_none_or(|b| margin > b.margin) {
            best = Some(Breakthrough {
                point: r.at,
                shift: r.shift,
                margin,
            });
        }
    }
    Ok(best.expect("shift set is nonempty"))
}
