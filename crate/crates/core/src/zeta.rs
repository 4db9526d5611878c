//! Trace functions of complex-power families, their meromorphic
//! continuation, and the noncommutative residue.
//!
//! Under toroidal quantization the operator trace is an exact lattice sum of
//! diagonal matrix elements: `Tr A_(s) = Σ_k mean_x tr a_s(x, k)` (plus the
//! `k = 0` override, where homogeneous symbols are undefined). The sum over
//! `|k| ≤ N` is computed exactly; each homogeneous term of degree `s − j`
//! contributes an explicit meromorphic tail beyond `N` — a Hurwitz-zeta
//! continuation by Euler–Maclaurin for m = 1, a radial integral times the
//! angular average plus an exact sum-minus-integral annulus correction for
//! m = 2. The only meromorphic ingredients are those tails, so the poles sit
//! at `s = j − m` and the residues are closed-form expressions in the term
//! data.


use crate::error::{Result, TorzetaError};
use crate::fiber::{C64, FiberMatrix, PdMatrix};
use crate::grid::{CosphereMeasure, TAU, trig_interp};
use crate::powers::HolomorphicSymbolFamily;
use crate::symbol::{ClassicalSymbol, HomogeneousTerm};

/// How the excluded lattice point and the tail are handled.
#[derive(Debug, Clone)]
pub struct LatticeSumConfig {
    /// Exact summation over `|k| ≤ cutoff`.
    pub cutoff: usize,
    /// Euler–Maclaurin correction terms in the m = 1 tail.
    pub tail_order: usize,
    /// Symbol value used at `k = 0` (must be Hermitian positive definite).
    pub k0_override: FiberMatrix,
    /// m = 1 only: lattice points `1 ≤ k ≤ exact_cutoff` are evaluated from
    /// the spectral power of the quantized operator on a padded Galerkin
    /// window instead of the truncated symbol series. The series is
    /// asymptotic — at `|k| = 1` its re-expansion can diverge for
    /// x-dependent operators — while the interior diagonal of the windowed
    /// spectral power is exact to roundoff. Entire in `s`, so poles and
    /// residues are untouched. For pure multipliers the two agree exactly.
    pub exact_cutoff: usize,
}

impl LatticeSumConfig {
    pub fn new(cutoff: usize, tail_order: usize, k0_override: FiberMatrix) -> Result<Self> {
        if cutoff < 8 {
            return Err(TorzetaError::SpecValidation(format!(
                "lattice cutoff must be >= 8, got {cutoff}"
            )));
        }
        if tail_order > 10 {
            return Err(TorzetaError::SpecValidation(format!(
                "tail order must be <= 10, got {tail_order}"
            )));
        }
        Ok(LatticeSumConfig {
            cutoff,
            tail_order,
            k0_override,
            exact_cutoff: 8,
        })
    }

    fn k0_power(&self, s: C64) -> Result<C64> {
        let p = PdMatrix::new(self.k0_override.clone(), 1e-9)?;
        Ok(p.power(s).trace())
    }
}

/// The noncommutative residue of a homogeneous term: the integral of the
/// degree `−m` part over the cosphere bundle.
#[derive(Debug, Clone)]
pub struct ResidueValue {
    pub matrix_part: FiberMatrix,
    pub scalar_part: C64,
}

pub fn nc_residue(t: &HomogeneousTerm) -> ResidueValue {
    let grid = t.field.grid;
    let n = grid.fiber_dim;
    let m = grid.dim as f64;
    if (t.degree + m).norm() > 1e-9 {
        return ResidueValue {
            matrix_part: FiberMatrix::zeros(n, n),
            scalar_part: C64::new(0.0, 0.0),
        };
    }
    let measure = CosphereMeasure::for_grid(&grid);
    let matrix_part = t.field.integrate(&measure);
    let scalar_part = matrix_part.trace();
    ResidueValue {
        matrix_part,
        scalar_part,
    }
}

const BERNOULLI_2R: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Euler–Maclaurin continuation of `ζ(w, q) = Σ_{n ≥ 0} (n + q)^{-w}` for
/// large real `q`, with `order` correction terms. Meromorphic in `w` with
/// the single simple pole at `w = 1`.
pub fn hurwitz_zeta(w: C64, q: f64, order: usize) -> C64 {
    let lnq = q.ln();
    let qp = |e: C64| (e * lnq).exp();
    let mut acc = qp(C64::new(1.0, 0.0) - w) / (w - 1.0) + 0.5 * qp(-w);
    let mut poch = w; // (w)_{2r-1} built incrementally
    let mut fact = 1.0f64; // (2r)!
    for (r, b) in BERNOULLI_2R.iter().enumerate().take(order) {
        let two_r = 2 * (r + 1);
        fact *= (two_r - 1) as f64 * two_r as f64;
        if r > 0 {
            poch *= (w + (two_r - 3) as f64) * (w + (two_r - 2) as f64);
        }
        acc += b / fact * poch * qp(-w - (two_r - 1) as f64);
    }
    acc
}

fn cpow(base: f64, e: C64) -> C64 {
    (e * base.ln()).exp()
}

/// Per-term angular weights `w_j(θ) = mean_x tr T_j(x, θ)`.
fn term_weights(ev: &ClassicalSymbol) -> Vec<Vec<C64>> {
    ev.terms.iter().map(|t| t.x_mean_trace()).collect()
}

/// Angular integral `W_j = ∮ w_j(θ) dθ` (trapezoid, exact for band-limited
/// data); for m = 1 the plain two-sheet sum.
fn angular_totals(weights: &[Vec<C64>], measure: &CosphereMeasure) -> Vec<C64> {
    weights
        .iter()
        .map(|w| w.iter().sum::<C64>() * measure.angular_weight)
        .collect()
}

fn implemented_poles(dim: usize, k: usize) -> Vec<f64> {
    (0..=k).map(|j| j as f64 - dim as f64).collect()
}

fn near_pole(s: C64, dim: usize, k: usize) -> Option<f64> {
    implemented_poles(dim, k)
        .into_iter()
        .find(|p| (s - p).norm() < 1e-8)
}

/// Exact lattice sum `Σ_{lo < |k| ≤ hi} Σ_j |k|^{s-j} w_j(θ_k)` (m = 2).
fn lattice_sum_m2(weights: &[Vec<C64>], s: C64, lo: usize, hi: usize) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    let (lo2, hi2) = ((lo * lo) as i64, (hi * hi) as i64);
    let hi_i = hi as i64;
    for k1 in -hi_i..=hi_i {
        for k2 in -hi_i..=hi_i {
            let r2 = k1 * k1 + k2 * k2;
            if r2 <= lo2 || r2 > hi2 {
                continue;
            }
            let r = (r2 as f64).sqrt();
            let theta = (k2 as f64).atan2(k1 as f64).rem_euclid(TAU);
            for (j, w) in weights.iter().enumerate() {
                acc += cpow(r, s - j as f64) * trig_interp(w, theta);
            }
        }
    }
    acc
}

/// `Σ_j W_j ∫_a^b r^{s-j+1} dr`; `b = None` means the improper integral.
fn radial_integrals(totals: &[C64], s: C64, a: f64, b: Option<f64>) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (j, wj) in totals.iter().enumerate() {
        let p = s - j as f64 + 2.0;
        let upper = match b {
            Some(b) => cpow(b, p),
            None => C64::new(0.0, 0.0), // Re p < 0 in continuation use
        };
        acc += wj * (upper - cpow(a, p)) / p;
    }
    acc
}

/// Exact diagonal values `tr (A^s)_{kk} + tr (A^s)_{−k,−k}` for `k = 1..=e`,
/// from the spectral power of the quantized operator on a padded Galerkin
/// window (m = 1). The quantization is Hermitian-symmetrized, so these are
/// already the values of the symmetrized power; for real `s` they are real.
fn exact_small_k(
    fam: &HolomorphicSymbolFamily,
    s: C64,
    e: usize,
    cfg: &LatticeSumConfig,
) -> Result<Vec<C64>> {
    if e == 0 {
        return Ok(Vec::new());
    }
    let v = crate::quantize::spectral_diagonal_traces(fam.operator(), s, e, &cfg.k0_override)?;
    if s.im == 0.0 {
        Ok(v.into_iter().map(|t| C64::new(t.re, 0.0)).collect())
    } else {
        Ok(v)
    }
}

/// Trace of the family at `s` by exact lattice summation plus per-term
/// meromorphic tails (continuation mode: any `s` away from the poles).
pub fn trace_function(
    fam: &HolomorphicSymbolFamily,
    s: C64,
    cfg: &LatticeSumConfig,
) -> Result<C64> {
    let grid = fam.grid();
    if let Some(p) = near_pole(s, grid.dim, fam.truncation()) {
        return Err(TorzetaError::EvaluationAtPole(C64::new(p, 0.0)));
    }
    let ev = fam.evaluate_symmetric(s)?;
    let weights = term_weights(&ev);
    let n = cfg.cutoff;
    let mut acc = cfg.k0_power(s)?;
    if grid.dim == 1 {
        let e = cfg.exact_cutoff.min(n);
        for t in exact_small_k(fam, s, e, cfg)? {
            acc += t;
        }
        for k in (e + 1)..=n {
            for (j, w) in weights.iter().enumerate() {
                acc += cpow(k as f64, s - j as f64) * (w[0] + w[1]);
            }
        }
        for (j, w) in weights.iter().enumerate() {
            let tail = hurwitz_zeta(j as f64 - s, (n + 1) as f64, cfg.tail_order);
            acc += (w[0] + w[1]) * tail;
        }
    } else {
        let measure = CosphereMeasure::for_grid(&grid);
        let totals = angular_totals(&weights, &measure);
        acc += lattice_sum_m2(&weights, s, 0, n);
        // Sum-minus-integral correction over the annulus N < |k| ≤ 2N
        // (entire in s), then the pure radial tail from 2N.
        acc += lattice_sum_m2(&weights, s, n, 2 * n);
        acc -= radial_integrals(&totals, s, n as f64, Some(2.0 * n as f64));
        acc += radial_integrals(&totals, s, n as f64, None);
    }
    Ok(acc)
}

/// Plain partial sum over `|k| ≤ N` (direct mode); requires `Re s < −m`.
pub fn trace_partial_sum(
    fam: &HolomorphicSymbolFamily,
    s: C64,
    cfg: &LatticeSumConfig,
) -> Result<C64> {
    let grid = fam.grid();
    if s.re >= -(grid.dim as f64) {
        return Err(TorzetaError::NotInConvergenceRegion {
            re_s: s.re,
            m: grid.dim,
        });
    }
    let ev = fam.evaluate_symmetric(s)?;
    let weights = term_weights(&ev);
    let mut acc = cfg.k0_power(s)?;
    if grid.dim == 1 {
        let e = cfg.exact_cutoff.min(cfg.cutoff);
        for t in exact_small_k(fam, s, e, cfg)? {
            acc += t;
        }
        for k in (e + 1)..=cfg.cutoff {
            for (j, w) in weights.iter().enumerate() {
                acc += cpow(k as f64, s - j as f64) * (w[0] + w[1]);
            }
        }
    } else {
        acc += lattice_sum_m2(&weights, s, 0, cfg.cutoff);
    }
    Ok(acc)
}

/// Residue of the trace function at the pole `s = j − m`, read off from the
/// tail coefficient: `−Σ_ia w_j(θ_ia) · angular weight` at `s = p`.
pub fn residue_at_pole(fam: &HolomorphicSymbolFamily, pole: f64) -> Result<C64> {
    let grid = fam.grid();
    let j = pole + grid.dim as f64;
    if j.fract().abs() > 1e-9 || j < 0.0 || j as usize > fam.truncation() {
        return Err(TorzetaError::WindowOutOfRange(format!(
            "pole {pole} is not s = j - m with 0 <= j <= {}",
            fam.truncation()
        )));
    }
    let j = j as usize;
    let ev = fam.evaluate_symmetric(C64::new(pole, 0.0))?;
    let measure = CosphereMeasure::for_grid(&grid);
    let w = ev.terms[j].x_mean_trace();
    Ok(-w.iter().sum::<C64>() * measure.angular_weight)
}

/// Residue at the first pole `s = −m`.
pub fn residue_at_first_pole(fam: &HolomorphicSymbolFamily) -> Result<C64> {
    residue_at_pole(fam, -(fam.grid().dim as f64))
}

#[derive(Debug, Clone)]
pub struct MeromorphicData {
    /// `(location, residue)` per requested pole.
    pub poles: Vec<(f64, C64)>,
    /// `(s, value)` at the requested regular points.
    pub regular_evaluations: Vec<(C64, C64)>,
    /// Implemented pole window for this family.
    pub window: Vec<f64>,
}

/// Meromorphic continuation data over a pole window plus sample points.
/// Implemented windows: m = 1 poles −1, 0, 1; m = 2 pole −2 only (the
/// annulus correction is holomorphic for `Re s < −m + 1` but not beyond).
pub fn meromorphic_extend(
    fam: &HolomorphicSymbolFamily,
    cfg: &LatticeSumConfig,
    poles: &[f64],
    samples: &[C64],
) -> Result<MeromorphicData> {
    let dim = fam.grid().dim;
    let window: Vec<f64> = if dim == 1 {
        [-1.0, 0.0, 1.0]
            .iter()
            .copied()
            .filter(|p| (p + dim as f64) as usize <= fam.truncation())
            .collect()
    } else {
        vec![-2.0]
    };
    let mut out = MeromorphicData {
        poles: Vec::new(),
        regular_evaluations: Vec::new(),
        window: window.clone(),
    };
    for &p in poles {
        if !window.iter().any(|w| (w - p).abs() < 1e-9) {
            return Err(TorzetaError::WindowOutOfRange(format!(
                "pole {p} outside implemented window {window:?} for m = {dim}"
            )));
        }
        out.poles.push((p, residue_at_pole(fam, p)?));
    }
    for &s in samples {
        out.regular_evaluations.push((s, trace_function(fam, s, cfg)?));
    }
    Ok(out)
}

/// The dimension constant of the residue trace formula, calibrated from
/// independent operators: `γ₀ = res_{s=-m} Trace A_(s) / Res σ^{-m}`.
/// Requires at least two specs and pairwise agreement within `1e-6`.
pub fn gamma0(families: &[&HolomorphicSymbolFamily]) -> Result<f64> {
    if families.len() < 2 {
        return Err(TorzetaError::SpecValidation(
            "gamma0 calibration needs at least two operators".into(),
        ));
    }
    let dim = families[0].grid().dim;
    let mut values = Vec::with_capacity(families.len());
    for fam in families {
        if fam.grid().dim != dim {
            return Err(TorzetaError::SpecValidation(
                "gamma0 calibration operators must share the base dimension".into(),
            ));
        }
        let res = residue_at_first_pole(fam)?;
        let m = dim as f64;
        let ev = fam.evaluate_symmetric(C64::new(-m, 0.0))?;
        let principal = HomogeneousTerm::new(C64::new(-m, 0.0), ev.terms[0].clone());
        let nc = nc_residue(&principal).scalar_part;
        values.push((res / nc).re);
    }
    let tol = 1e-6;
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            if (values[i] - values[j]).abs() > tol {
                return Err(TorzetaError::CalibrationDisagreement(values, tol));
            }
        }
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}
