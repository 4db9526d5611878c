//! Operator-spec files: the interchange format for input operators.
//!
//! A spec stores each homogeneous term as Fourier coefficient data — angular
//! coefficients for multipliers, an x-Fourier × angular tensor for
//! x-dependent terms — with every complex number written as an explicit
//! `[re, im]` pair. Reconstruction synthesizes the sample fields on the grid
//! declared in the spec; validation rejects anything that would reach the
//! numeric kernels in an undefined state (non-PD leading term, out-of-band
//! coefficients, non-finite entries).

use serde::{Deserialize, Serialize};

use crate::cohomology::SolverConfig;
use crate::error::{Result, TorzetaError};
use crate::fiber::{C64, FiberMatrix, PdMatrix};
use crate::grid::{CosphereGrid, SampleField};
use crate::symbol::ClassicalSymbol;

/// Complex scalar as an explicit `[re, im]` pair.
pub type ComplexPair = [f64; 2];

/// Dense n×n matrix of `[re, im]` pairs, row-major.
pub type MatrixData = Vec<Vec<ComplexPair>>;

/// One Fourier coefficient of a term: x-modes `kx` (length = dim; omitted
/// entries mean a pure multiplier) and angular index `l`. For m = 1 the
/// "angular" variable is the sheet pair: `l = 0` is the even part, `l = 1`
/// the odd (sign-flipping) part. For m = 2, `l` indexes `e^{ilθ}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CoefficientEntry {
    #[serde(default)]
    pub kx: Vec<i64>,
    pub l: i64,
    pub matrix: MatrixData,
}

/// Coefficient data of one homogeneous term.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum TermData {
    /// Angular coefficients only; the term is x-independent.
    Multiplier(Vec<CoefficientEntry>),
    /// Full x-Fourier × angular coefficient tensor.
    Full(Vec<CoefficientEntry>),
}

/// Homogeneous term of degree `order − j`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TermSpec {
    pub j: usize,
    pub data: TermData,
}

/// A first-order elliptic operator on `T^m` in interchange form.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OperatorSpec {
    pub dim: usize,
    pub fiber_dim: usize,
    pub truncation: usize,
    pub x_modes: usize,
    pub angular_nodes: usize,
    pub spectral_floor: f64,
    pub k0_override: MatrixData,
    pub terms: Vec<TermSpec>,
}

fn parse_matrix(data: &MatrixData, n: usize, what: &str) -> Result<FiberMatrix> {
    if data.len() != n || data.iter().any(|row| row.len() != n) {
        return Err(TorzetaError::SpecValidation(format!(
            "{what}: expected {n}x{n} matrix, got {}x{}",
            data.len(),
            data.first().map_or(0, |r| r.len())
        )));
    }
    let mut m = FiberMatrix::zeros(n, n);
    for (i, row) in data.iter().enumerate() {
        for (j, &[re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(TorzetaError::SpecValidation(format!(
                    "{what}: non-finite entry at ({i},{j})"
                )));
            }
            m[(i, j)] = C64::new(re, im);
        }
    }
    Ok(m)
}

pub fn matrix_data(m: &FiberMatrix) -> MatrixData {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

impl OperatorSpec {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let spec: OperatorSpec = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn grid(&self) -> Result<CosphereGrid> {
        CosphereGrid::new(self.dim, self.x_modes, self.angular_nodes, self.fiber_dim)
    }

    pub fn k0_matrix(&self) -> Result<FiberMatrix> {
        let m = parse_matrix(&self.k0_override, self.fiber_dim, "k0_override")?;
        PdMatrix::new(m.clone(), 1e-12).map_err(|e| {
            TorzetaError::SpecValidation(format!("k0_override must be Hermitian PD: {e}"))
        })?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.grid()?;
        if !self.spectral_floor.is_finite() || self.spectral_floor <= 0.0 {
            return Err(TorzetaError::SpecValidation(format!(
                "spectral_floor must be positive, got {}",
                self.spectral_floor
            )));
        }
        self.k0_matrix()?;
        if !self.terms.iter().any(|t| t.j == 0) {
            return Err(TorzetaError::SpecValidation(
                "leading term (j = 0) is required".into(),
            ));
        }
        let ang_cap = if self.dim == 1 {
            1
        } else {
            self.angular_nodes as i64 / 2 - 1
        };
        for term in &self.terms {
            if term.j > self.truncation {
                return Err(TorzetaError::SpecValidation(format!(
                    "term offset {} exceeds truncation {}",
                    term.j, self.truncation
                )));
            }
            let entries = match &term.data {
                TermData::Multiplier(e) | TermData::Full(e) => e,
            };
            for entry in entries {
                if matches!(term.data, TermData::Multiplier(_)) && !entry.kx.is_empty() {
                    return Err(TorzetaError::SpecValidation(format!(
                        "multiplier term {} carries x-modes {:?}",
                        term.j, entry.kx
                    )));
                }
                if !entry.kx.is_empty() && entry.kx.len() != self.dim {
                    return Err(TorzetaError::SpecValidation(format!(
                        "term {}: kx length {} != dim {}",
                        term.j,
                        entry.kx.len(),
                        self.dim
                    )));
                }
                if entry.kx.iter().any(|k| k.unsigned_abs() as usize > self.x_modes) {
                    return Err(TorzetaError::SpecValidation(format!(
                        "term {}: x-mode {:?} exceeds grid band {}",
                        term.j, entry.kx, self.x_modes
                    )));
                }
                if entry.l.abs() > ang_cap as i64 {
                    return Err(TorzetaError::SpecValidation(format!(
                        "term {}: angular index {} exceeds band {}",
                        term.j, entry.l, ang_cap
                    )));
                }
                parse_matrix(&entry.matrix, self.fiber_dim, &format!("term {}", term.j))?;
            }
        }
        // Leading term must be Hermitian positive definite pointwise.
        let lead = self.term_field(grid, 0)?;
        for ix in 0..grid.x_points() {
            for ia in 0..grid.angular_nodes {
                PdMatrix::new(lead.mat_at(ix, ia), self.spectral_floor).map_err(|e| {
                    TorzetaError::SpecValidation(format!(
                        "leading term at grid point (x={ix}, angle={ia}): {e}"
                    ))
                })?;
            }
        }
        Ok(())
    }

    fn term_field(&self, grid: CosphereGrid, j: usize) -> Result<SampleField> {
        let n = self.fiber_dim;
        let mut field = SampleField::zeros(grid);
        for term in self.terms.iter().filter(|t| t.j == j) {
            let entries = match &term.data {
                TermData::Multiplier(e) | TermData::Full(e) => e,
            };
            for entry in entries {
                let m = parse_matrix(&entry.matrix, n, "term")?;
                for ix in 0..grid.x_points() {
                    let x = grid.x_coord(ix);
                    let xphase = entry
                        .kx
                        .iter()
                        .enumerate()
                        .map(|(d, &k)| k as f64 * x[d])
                        .sum::<f64>();
                    for ia in 0..grid.angular_nodes {
                        let ph = if self.dim == 1 {
                            // Sheet pair: l = 0 even, l = 1 odd.
                            let sign = if entry.l % 2 == 0 || ia == 0 { 1.0 } else { -1.0 };
                            C64::from_polar(sign, xphase)
                        } else {
                            C64::from_polar(1.0, xphase + entry.l as f64 * grid.theta(ia))
                        };
                        let mut cur = field.mat_at(ix, ia);
                        for i in 0..n {
                            for jj in 0..n {
                                cur[(i, jj)] += m[(i, jj)] * ph;
                            }
                        }
                        field.set_mat(ix, ia, &cur);
                    }
                }
            }
        }
        Ok(field)
    }

    /// Reconstructs the classical symbol (order 1, truncation from the spec).
    pub fn symbol(&self) -> Result<ClassicalSymbol> {
        let grid = self.grid()?;
        let mut terms = Vec::with_capacity(self.truncation + 1);
        for j in 0..=self.truncation {
            terms.push(self.term_field(grid, j)?);
        }
        Ok(ClassicalSymbol::new(C64::new(1.0, 0.0), terms))
    }
}

/// Per-run numeric parameters; all artifact plumbing, no operator content.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    /// Exact lattice summation cutoff N.
    pub lattice_cutoff: usize,
    /// Euler–Maclaurin correction order of the m = 1 tail.
    pub tail_order: usize,
    /// Galerkin basis cutoff B.
    pub galerkin_cutoff: usize,
    /// Radius of the Cauchy circles in the coboundary solver.
    pub cauchy_radius: f64,
    /// Pass/fail tolerance for verification suites.
    pub tolerance: f64,
    /// Seed for every sampled (s, t) set.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            lattice_cutoff: 200,
            tail_order: 8,
            galerkin_cutoff: 64,
            cauchy_radius: 0.01,
            tolerance: 1e-7,
            seed: 20240801,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lattice_cutoff < 8
            || self.galerkin_cutoff == 0
            || !(self.cauchy_radius > 0.0)
            || !(self.tolerance > 0.0)
        {
            return Err(TorzetaError::SpecValidation(
                "run config entries must be positive (lattice cutoff >= 8)".into(),
            ));
        }
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            cauchy_radius: self.cauchy_radius,
            ..SolverConfig::default()
        }
    }
}
