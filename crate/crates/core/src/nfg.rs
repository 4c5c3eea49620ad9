//! Matrix games, the VI operators built from them and the entropic Bregman
//! geometry on the product of simplices.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// Smallest probability any projected simplex entry may take.
pub const INTERIOR_FLOOR: f64 = 1e-12;

/// Tolerance on `sum == 1` for simplex points.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Zero-sum matrix game. `payoff(i, j)` is the row player's payoff; the
/// column player receives its negation.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalFormGame {
    rows: usize,
    cols: usize,
    // row-major
    entries: Vec<f64>,
}

impl NormalFormGame {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "matrix game needs at least one row and column, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries", rows * cols),
                got: format!("{} entries", entries.len()),
            });
        }
        if let Some(pos) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite payoff at row {}, column {}",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("ragged payoff matrix".into()));
        }
        Self::new(m, n, rows.concat())
    }

    pub fn matching_pennies() -> Self {
        Self::new(2, 2, vec![1.0, -1.0, -1.0, 1.0]).unwrap()
    }

    pub fn rock_paper_scissors() -> Self {
        Self::new(3, 3, vec![0.0, -1.0, 1.0, 1.0, 0.0, -1.0, -1.0, 1.0, 0.0]).unwrap()
    }

    /// Parses the plain-text format: a header line `m n` followed by `m` lines
    /// of `n` whitespace-separated reals. Trailing blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty input".into(),
        })?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        if dims.len() != 2 {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header `m n`, found {header:?}"),
            });
        }
        let parse_dim = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line: 1,
                msg: format!("invalid dimension {s:?}"),
            })
        };
        let (m, n) = (parse_dim(dims[0])?, parse_dim(dims[1])?);
        if m == 0 || n == 0 {
            return Err(Error::Parse {
                line: 1,
                msg: "dimensions must be positive".into(),
            });
        }

        let mut entries = Vec::with_capacity(m * n);
        for row in 0..m {
            let Some((idx, line)) = lines.next() else {
                return Err(Error::Parse {
                    line: row + 2,
                    msg: format!("expected {m} rows, found {row}"),
                });
            };
            let lineno = idx + 1;
            let vals = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| Error::Parse {
                            line: lineno,
                            msg: format!("invalid number {tok:?}"),
                        })
                })
                .collect::<Result<Vec<f64>>>()?;
            if vals.len() != n {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected {n} values, found {}", vals.len()),
                });
            }
            entries.extend(vals);
        }
        if let Some((idx, _)) = lines.find(|(_, l)| !l.trim().is_empty()) {
            return Err(Error::Parse {
                line: idx + 1,
                msg: "unexpected content after the last row".into(),
            });
        }
        Self::new(m, n, entries)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// `A y`
    pub fn mul_col(&self, y: &[f64]) -> Vec<f64> {
        self.entries
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(y).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `Aᵀ x`
    pub fn mul_row(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (row, &xi) in self.entries.chunks_exact(self.cols).zip(x) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += xi * a;
            }
        }
        out
    }

    fn check_dims(&self, z: &MixedProfile) -> Result<()> {
        if z.x.len() != self.rows || z.y.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: format!("profile of shape ({}, {})", self.rows, self.cols),
                got: format!("({}, {})", z.x.len(), z.y.len()),
            });
        }
        Ok(())
    }

    /// Lipschitz constant of `F` from `‖·‖₁` to `‖·‖∞`, the norms in which
    /// negative entropy is 1-strongly convex: `max |a_ij|`.
    pub fn lipschitz(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl fmt::Display for NormalFormGame {
    /// Writes the plain-text matrix format accepted by [`NormalFormGame::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for row in self.entries.chunks_exact(self.cols) {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Clamps every entry to [`INTERIOR_FLOOR`] and renormalizes to sum one.
pub fn project_interior(p: &mut [f64]) {
    for v in p.iter_mut() {
        if !(*v >= INTERIOR_FLOOR) {
            *v = INTERIOR_FLOOR;
        }
    }
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= s);
}

/// Normalizes `exp(logits)` onto the simplex and clamps to the interior floor.
pub fn softmax_interior(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut p: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= s);
    project_interior(&mut p);
    p
}

fn check_simplex(p: &[f64], name: &str) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidArgument(format!("{name} is empty")));
    }
    if p.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidArgument(format!(
            "{name} has a negative or non-finite entry"
        )));
    }
    let s: f64 = p.iter().sum();
    // Scale-aware slack: summing n doubles loses about n ulps.
    if (s - 1.0).abs() > SIMPLEX_TOL.max(4.0 * p.len() as f64 * f64::EPSILON) {
        return Err(Error::InvalidArgument(format!("{name} sums to {s}, not 1")));
    }
    Ok(())
}

/// `true` when every entry is at (or within rounding of) the interior floor.
pub fn is_interior(p: &[f64]) -> bool {
    p.iter().all(|&v| v >= INTERIOR_FLOOR * (1.0 - 1e-6))
}

/// A pair of mixed strategies `z = (x, y)`.
///
/// Construction checks simplex membership. Operations that need the strict
/// interior (divergence references, operator `G`, MMD) check it themselves
/// and report a domain error, so boundary points such as pure equilibria can
/// still be represented as divergence targets.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedProfile {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl MixedProfile {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        check_simplex(&x, "x")?;
        check_simplex(&y, "y")?;
        Ok(Self { x, y })
    }

    /// Projects arbitrary nonnegative weights onto the interior of the simplex.
    pub fn interior(mut x: Vec<f64>, mut y: Vec<f64>) -> Result<Self> {
        if x.is_empty() || y.is_empty() {
            return Err(Error::InvalidArgument("empty strategy".into()));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument(
                "weights must be finite and nonnegative".into(),
            ));
        }
        if x.iter().sum::<f64>() <= 0.0 || y.iter().sum::<f64>() <= 0.0 {
            return Err(Error::InvalidArgument("weights sum to zero".into()));
        }
        let sx: f64 = x.iter().sum();
        let sy: f64 = y.iter().sum();
        x.iter_mut().for_each(|v| *v /= sx);
        y.iter_mut().for_each(|v| *v /= sy);
        project_interior(&mut x);
        project_interior(&mut y);
        Ok(Self { x, y })
    }

    pub fn uniform(m: usize, n: usize) -> Self {
        Self {
            x: vec![1.0 / m as f64; m],
            y: vec![1.0 / n as f64; n],
        }
    }

    pub fn is_interior(&self) -> bool {
        is_interior(&self.x) && is_interior(&self.y)
    }

    /// Concatenation `[x; y]`.
    pub fn stacked(&self) -> Vec<f64> {
        let mut v = self.x.clone();
        v.extend_from_slice(&self.y);
        v
    }

    /// `‖self − other‖₁` over both players.
    pub fn l1_distance(&self, other: &MixedProfile) -> f64 {
        self.x
            .iter()
            .zip(&other.x)
            .chain(self.y.iter().zip(&other.y))
            .map(|(a, b)| (a - b).abs())
            .sum()
    }

    fn require_interior(&self, what: &str) -> Result<()> {
        if self.is_interior() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{what} must lie in the simplex interior"
            )))
        }
    }
}

/// Mirror-map geometry on the product simplex.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BregmanGeometry {
    /// `ψ(p) = Σ p log p`; its Bregman divergence is the KL divergence.
    #[default]
    NegativeEntropy,
}

impl BregmanGeometry {
    /// Strong-convexity modulus with respect to the 1-norm.
    pub fn strong_convexity_mu(self) -> f64 {
        match self {
            BregmanGeometry::NegativeEntropy => 1.0,
        }
    }

    /// `ψ(p)` for a single simplex block.
    pub fn potential(self, p: &[f64]) -> f64 {
        match self {
            BregmanGeometry::NegativeEntropy => {
                p.iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum()
            }
        }
    }

    /// `∇ψ(p)` for a single simplex block.
    pub fn mirror_map(self, p: &[f64]) -> Vec<f64> {
        match self {
            BregmanGeometry::NegativeEntropy => p.iter().map(|&v| 1.0 + v.ln()).collect(),
        }
    }

    /// Divergence of one simplex block, `B(a; b)`. `b` must be positive.
    pub fn block_divergence(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            BregmanGeometry::NegativeEntropy => a
                .iter()
                .zip(b)
                .filter(|(&p, _)| p > 0.0)
                .map(|(&p, &q)| p * (p.ln() - q.ln()))
                .sum::<f64>()
                .max(0.0),
        }
    }

    /// `B(a; b) = B(a.x; b.x) + B(a.y; b.y)`.
    pub fn divergence(self, a: &MixedProfile, b: &MixedProfile) -> Result<f64> {
        if a.x.len() != b.x.len() || a.y.len() != b.y.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("({}, {})", b.x.len(), b.y.len()),
                got: format!("({}, {})", a.x.len(), a.y.len()),
            });
        }
        b.require_interior("divergence reference")?;
        Ok(self.block_divergence(&a.x, &b.x) + self.block_divergence(&a.y, &b.y))
    }
}

/// Free-function form of [`BregmanGeometry::divergence`].
pub fn bregman_divergence(
    geom: BregmanGeometry,
    a: &MixedProfile,
    b: &MixedProfile,
) -> Result<f64> {
    geom.divergence(a, b)
}

/// `f(x, y) = xᵀ A y`.
pub fn payoff(game: &NormalFormGame, z: &MixedProfile) -> Result<f64> {
    game.check_dims(z)?;
    Ok(z.x.iter().zip(game.mul_col(&z.y)).map(|(a, b)| a * b).sum())
}

/// `F(z) = [−A y; Aᵀ x]`.
pub fn operator_f(game: &NormalFormGame, z: &MixedProfile) -> Result<Vec<f64>> {
    game.check_dims(z)?;
    let mut out: Vec<f64> = game.mul_col(&z.y).into_iter().map(|v| -v).collect();
    out.extend(game.mul_row(&z.x));
    Ok(out)
}

/// `G_ρ(z) = F(z) + α (∇ψ(z) − ∇ψ(ρ))`.
pub fn operator_g(
    game: &NormalFormGame,
    geom: BregmanGeometry,
    z: &MixedProfile,
    rho: &MixedProfile,
    alpha: f64,
) -> Result<Vec<f64>> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "alpha must be >= 0, got {alpha}"
        )));
    }
    game.check_dims(rho)?;
    z.require_interior("z")?;
    rho.require_interior("rho")?;
    let mut out = operator_f(game, z)?;
    if alpha == 0.0 {
        return Ok(out);
    }
    let grad_z = [geom.mirror_map(&z.x), geom.mirror_map(&z.y)].concat();
    let grad_rho = [geom.mirror_map(&rho.x), geom.mirror_map(&rho.y)].concat();
    for ((o, gz), gr) in out.iter_mut().zip(grad_z).zip(grad_rho) {
        *o += alpha * (gz - gr);
    }
    Ok(out)
}

/// Sufficient step-size condition `α ≥ μ η L²` for MMD convergence.
pub fn check_mmd_condition(alpha: f64, eta: f64, mu: f64, lipschitz: f64) -> bool {
    alpha >= mu * eta * lipschitz * lipschitz
}

/// Exploitability of `z`: the mean of both players' best-response gains,
/// `(max_i (Ay)_i − min_j (Aᵀx)_j) / 2`.
pub fn exploitability(game: &NormalFormGame, z: &MixedProfile) -> Result<f64> {
    game.check_dims(z)?;
    let best_row = game
        .mul_col(&z.y)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let best_col = game.mul_row(&z.x).into_iter().fold(f64::INFINITY, f64::min);
    Ok(((best_row - best_col) / 2.0).max(0.0))
}

/// Inner product helper.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}
