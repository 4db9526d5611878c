//! Galerkin quantization on `T^1`: the brute-force spectral oracle.
//!
//! Toroidal quantization `(Af)(x) = Σ_k e^{ikx} a(x,k) f̂(k)` has exact matrix
//! elements `A_{k'k} = â(k'−k, k)` in the Fourier basis, where `â(q, k)` is
//! the q-th x-Fourier coefficient of `a(·, k)`. For a classical symbol the
//! lattice values come from the homogeneous expansion,
//! `a(x, k) = Σ_j |k|^{s−j} c_j(x, sign k)`, so each term contributes a band
//! of width `x_modes` scaled by a power of `|k|`. The mode `k = 0` — where
//! homogeneous symbols are undefined — is decoupled and carries the same
//! spec-level override block used by the lattice trace, keeping the oracle
//! and the continuation comparable term by term.

use crate::error::{Result, TorzetaError};
use crate::fiber::{C64, FiberMatrix};
use crate::grid::{dft, mode_of};
use crate::symbol::ClassicalSymbol;

fn cpow(base: f64, e: C64) -> C64 {
    (e * base.ln()).exp()
}

/// x-Fourier coefficient table of a classical symbol on `T^1`: everything
/// needed to produce exact matrix elements at any nonzero lattice point.
pub struct QuantizedSymbol {
    pub order: C64,
    x_modes: usize,
    fiber_dim: usize,
    /// `coeffs[j][sheet][q + x_modes]` = coefficient `ĉ_j(q)` on that sheet.
    coeffs: Vec<Vec<Vec<FiberMatrix>>>,
}

impl QuantizedSymbol {
    pub fn new(sym: &ClassicalSymbol) -> Result<Self> {
        let grid = sym.grid();
        if grid.dim != 1 {
            return Err(TorzetaError::SpecValidation(
                "Galerkin quantization is implemented for m = 1 only".into(),
            ));
        }
        let side = grid.x_side();
        let n = grid.fiber_dim;
        let mut coeffs = Vec::with_capacity(sym.terms.len());
        let mut line = vec![C64::new(0.0, 0.0); side];
        for field in &sym.terms {
            let mut per_sheet = Vec::with_capacity(2);
            for ia in 0..2 {
                let mut mats = vec![FiberMatrix::zeros(n, n); side];
                for i in 0..n {
                    for j in 0..n {
                        for (ix, l) in line.iter_mut().enumerate() {
                            *l = field.entry(ix, ia, i, j);
                        }
                        for (r, cr) in dft(&line).iter().enumerate() {
                            let q = mode_of(r, side);
                            mats[(q + grid.x_modes as i64) as usize][(i, j)] = *cr;
                        }
                    }
                }
                per_sheet.push(mats);
            }
            coeffs.push(per_sheet);
        }
        Ok(QuantizedSymbol {
            order: sym.order,
            x_modes: grid.x_modes,
            fiber_dim: n,
            coeffs,
        })
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    /// Band half-width: blocks vanish for `|k' − k| > x_band()`.
    pub fn x_band(&self) -> usize {
        self.x_modes
    }

    fn sheet(k: i64) -> usize {
        if k > 0 { 0 } else { 1 }
    }

    /// Exact matrix element block `A_{k'k} = â(k' − k, k)`, `k ≠ 0`.
    pub fn block(&self, kp: i64, k: i64) -> FiberMatrix {
        let n = self.fiber_dim;
        let q = kp - k;
        if k == 0 || q.unsigned_abs() as usize > self.x_modes {
            return FiberMatrix::zeros(n, n);
        }
        let idx = (q + self.x_modes as i64) as usize;
        let sheet = Self::sheet(k);
        let mut acc = FiberMatrix::zeros(n, n);
        for (j, term) in self.coeffs.iter().enumerate() {
            let w = cpow(k.abs() as f64, self.order - j as f64);
            acc += &term[sheet][idx] * w;
        }
        acc
    }

    /// Dense matrix on the Fourier basis `|k| ≤ B`, blocks ordered by
    /// `k = −B..B`; mode 0 is the decoupled override block.
    pub fn assemble(&self, b: usize, k0_override: &FiberMatrix) -> FiberMatrix {
        let n = self.fiber_dim;
        let modes = 2 * b as i64 + 1;
        let dim = modes as usize * n;
        let mut m = FiberMatrix::zeros(dim, dim);
        let base = |k: i64| ((k + b as i64) as usize) * n;
        for k in -(b as i64)..=(b as i64) {
            if k == 0 {
                let c = base(0);
                for i in 0..n {
                    for j in 0..n {
                        m[(c + i, c + j)] = k0_override[(i, j)];
                    }
                }
                continue;
            }
            let lo = (k - self.x_modes as i64).max(-(b as i64));
            let hi = (k + self.x_modes as i64).min(b as i64);
            for kp in lo..=hi {
                if kp == 0 {
                    continue;
                }
                let blk = self.block(kp, k);
                let (r, c) = (base(kp), base(k));
                for i in 0..n {
                    for j in 0..n {
                        m[(r + i, c + j)] = blk[(i, j)];
                    }
                }
            }
        }
        m
    }
}

/// Hermitian-symmetrized, eigendecomposed Galerkin truncation of a quantized
/// first-order symbol: the spectral oracle for zeta values and matrix powers.
pub struct GalerkinOperator {
    basis_cutoff: usize,
    fiber_dim: usize,
    spectral_floor: f64,
    eigvals: Vec<f64>,
    /// Columns are the orthonormal eigenvectors.
    u: FiberMatrix,
}

impl GalerkinOperator {
    pub fn new(
        sym: &ClassicalSymbol,
        b: usize,
        k0_override: &FiberMatrix,
        spectral_floor: f64,
    ) -> Result<Self> {
        let q = QuantizedSymbol::new(sym)?;
        let m = q.assemble(b, k0_override);
        let herm = (&m + m.adjoint()).scale(0.5);
        let se = herm.symmetric_eigen();
        let eigvals: Vec<f64> = se.eigenvalues.iter().cloned().collect();
        let min_eig = eigvals.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig <= 0.0 {
            return Err(TorzetaError::NotPositiveDefinite {
                min_eig,
                floor: spectral_floor,
            });
        }
        Ok(GalerkinOperator {
            basis_cutoff: b,
            fiber_dim: q.fiber_dim,
            spectral_floor,
            eigvals,
            u: se.eigenvectors,
        })
    }

    pub fn basis_cutoff(&self) -> usize {
        self.basis_cutoff
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigvals
    }

    /// Row/column offset of the Fourier-mode block `k`.
    pub fn index(&self, k: i64) -> usize {
        ((k + self.basis_cutoff as i64) as usize) * self.fiber_dim
    }

    /// `Σ λ_i^s` over eigenvalues above the spectral floor.
    pub fn zeta(&self, s: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for &l in &self.eigvals {
            if l > self.spectral_floor {
                acc += (s * l.ln()).exp();
            }
        }
        acc
    }

    /// Matrix power `M^s = U diag(λ^s) U*` (floor-shift: eigenvalues at or
    /// below the floor are clamped to it so the power stays finite).
    pub fn power(&self, s: C64) -> FiberMatrix {
        let n = self.u.nrows();
        let mut ud = self.u.clone();
        for j in 0..n {
            let l = self.eigvals[j].max(self.spectral_floor);
            let f = (s * l.ln()).exp();
            for i in 0..n {
                ud[(i, j)] *= f;
            }
        }
        &ud * self.u.adjoint()
    }
}

/// Brute-force zeta value `Σ λ_i^s` on the Galerkin truncation at cutoff `B`;
/// requires `Re s < −1` so the eigenvalue sum is a convergent-side partial sum.
pub fn galerkin_zeta(
    sym: &ClassicalSymbol,
    b: usize,
    s: C64,
    k0_override: &FiberMatrix,
    spectral_floor: f64,
) -> Result<C64> {
    if s.re >= -1.0 {
        return Err(TorzetaError::NotInConvergenceRegion { re_s: s.re, m: 1 });
    }
    Ok(GalerkinOperator::new(sym, b, k0_override, spectral_floor)?.zeta(s))
}

/// True diagonal fiber traces `tr (A^s)_{kk} + tr (A^s)_{−k,−k}` for
/// `1 ≤ k ≤ cutoff`, by holomorphic functional calculus on a padded Galerkin
/// window. The quantized operator is banded, so the interior diagonal of its
/// power converges in the window size faster than any power; the padding
/// leaves the requested blocks at machine precision. These are spectral
/// values of the operator itself — no symbol expansion is involved, so they
/// stay valid at small `|k|` where the asymptotic series has not converged.
pub fn spectral_diagonal_traces(
    sym: &ClassicalSymbol,
    s: C64,
    cutoff: usize,
    k0_override: &FiberMatrix,
) -> Result<Vec<C64>> {
    let grid = sym.grid();
    let b0 = cutoff + grid.x_modes + 32;
    let op = GalerkinOperator::new(sym, b0, k0_override, 1e-12)?;
    let p = op.power(s);
    let n = grid.fiber_dim;
    let block_trace = |k: i64| -> C64 {
        let base = ((k + b0 as i64) as usize) * n;
        let mut t = C64::new(0.0, 0.0);
        for i in 0..n {
            t += p[(base + i, base + i)];
        }
        t
    };
    Ok((1..=cutoff as i64)
        .map(|k| block_trace(k) + block_trace(-k))
        .collect())
}

/// `|Trace_{|k| ≤ B}(GH − HG)|` with exact (untruncated) matrix elements: the
/// intermediate mode `q` runs over the full band, so the value measures only
/// the trace truncation, which decays as `B` grows when `ord G + ord H < −1`.
/// Mode 0 is excluded on both sides, matching the override convention.
pub fn commutator_trace_check(
    g: &ClassicalSymbol,
    h: &ClassicalSymbol,
    b: usize,
) -> Result<f64> {
    let qg = QuantizedSymbol::new(g)?;
    let qh = QuantizedSymbol::new(h)?;
    if qg.fiber_dim != qh.fiber_dim {
        return Err(TorzetaError::DimensionMismatch(format!(
            "fiber dimensions {} vs {}",
            qg.fiber_dim, qh.fiber_dim
        )));
    }
    let band = qg.x_band().max(qh.x_band()) as i64;
    let mut acc = C64::new(0.0, 0.0);
    for k in -(b as i64)..=(b as i64) {
        if k == 0 {
            continue;
        }
        for q in (k - band)..=(k + band) {
            if q == 0 {
                continue;
            }
            let gh = qg.block(k, q) * qh.block(q, k);
            let hg = qh.block(k, q) * qg.block(q, k);
            acc += gh.trace() - hg.trace();
        }
    }
    Ok(acc.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{CosphereGrid, SampleField, TAU};
    use crate::symbol::compose;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// a(x, ξ) = ξ as a first-order classical symbol (field ±1 per sheet).
    fn xi_symbol(grid: CosphereGrid, k: usize) -> ClassicalSymbol {
        let field = SampleField::from_fn(grid, |_, ia| {
            FiberMatrix::from_element(1, 1, c(if ia == 0 { 1.0 } else { -1.0 }, 0.0))
        });
        ClassicalSymbol::single_term(c(1.0, 0.0), field, k)
    }

    /// Order-0 multiplier in x with the given Fourier profile.
    fn x_multiplier(grid: CosphereGrid, f: impl Fn(f64) -> C64, k: usize) -> ClassicalSymbol {
        let field = SampleField::from_fn(grid, |ix, _| {
            FiberMatrix::from_element(1, 1, f(grid.x_coord(ix)[0]))
        });
        ClassicalSymbol::single_term(c(0.0, 0.0), field, k)
    }

    #[test]
    fn multiplier_assembly_is_block_diagonal() {
        let grid = CosphereGrid::new(1, 3, 2, 2).unwrap();
        let field = SampleField::from_fn(grid, |_, ia| {
            let d = if ia == 0 { 1.0 } else { 1.5 };
            FiberMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                c(d, 0.0),
                c(2.0 * d, 0.0),
            ]))
        });
        let sym = ClassicalSymbol::single_term(c(1.0, 0.0), field, 2);
        let q = QuantizedSymbol::new(&sym).unwrap();
        let b = 12;
        let m = q.assemble(b, &crate::fiber::identity(2));
        for k in -(b as i64)..=(b as i64) {
            for kp in -(b as i64)..=(b as i64) {
                let (r, cidx) = (((kp + b as i64) as usize) * 2, ((k + b as i64) as usize) * 2);
                for i in 0..2 {
                    for j in 0..2 {
                        let v = m[(r + i, cidx + j)];
                        if k != kp || i != j {
                            assert!(v.norm() < 1e-14);
                        }
                    }
                }
            }
        }
        // Diagonal blocks carry |k| on the right sheet.
        let r = ((5 + b as i64) as usize) * 2;
        assert!((m[(r, r)] - c(5.0, 0.0)).norm() < 1e-12);
        let r = ((-4 + b as i64) as usize) * 2;
        assert!((m[(r + 1, r + 1)] - c(12.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn leibniz_matrix_elements_match_compose() {
        // A = ξ, B = b(x): the composite symbol is ξ b(x) − i b'(x); away from
        // the truncation boundary the operator product matches its quantization.
        let grid = CosphereGrid::new(1, 3, 2, 1).unwrap();
        let a = xi_symbol(grid, 2);
        let bsym = x_multiplier(grid, |x| c(1.0 + 0.5 * x.cos(), 0.2 * (2.0 * x).sin()), 2);
        let ab = compose(&a.clone(), &bsym, 2).unwrap();

        let bb = 64usize;
        let qa = QuantizedSymbol::new(&a).unwrap();
        let qb = QuantizedSymbol::new(&bsym).unwrap();
        let k0 = crate::fiber::identity(1);
        let ma = qa.assemble(bb, &k0);
        let mb = qb.assemble(bb, &k0);
        let prod = &ma * &mb;
        let mab = QuantizedSymbol::new(&ab).unwrap().assemble(bb, &k0);

        let band = 3i64;
        let idx = |k: i64| (k + bb as i64) as usize;
        let mut checked = 0;
        for k in -(bb as i64)..=(bb as i64) {
            for kp in (k - band)..=(k + band) {
                // Interior elements only: no intermediate mode touches 0 or ±B.
                if k.abs() <= band || kp.abs() <= band || k.abs() >= bb as i64 - band {
                    continue;
                }
                if kp.abs() > bb as i64 - 1 {
                    continue;
                }
                let d = (prod[(idx(kp), idx(k))] - mab[(idx(kp), idx(k))]).norm();
                assert!(d < 1e-8, "element ({kp},{k}) off by {d:.3e}");
                checked += 1;
            }
        }
        assert!(checked > 500);
    }

    #[test]
    fn zeta_matches_direct_eigenvalue_sum_for_multiplier() {
        // a(k) = |k|: eigenvalues are |k| (with the k = 0 override eigenvalue 1),
        // so the Galerkin zeta is an exact truncated Dirichlet series.
        let grid = CosphereGrid::new(1, 2, 2, 1).unwrap();
        let field = SampleField::constant_identity(grid, c(1.0, 0.0));
        let sym = ClassicalSymbol::single_term(c(1.0, 0.0), field, 1);
        let b = 30;
        let s = c(-2.0, 0.0);
        let z = galerkin_zeta(&sym, b, s, &crate::fiber::identity(1), 1e-6).unwrap();
        let mut expect = c(1.0, 0.0);
        for k in 1..=b {
            expect += 2.0 * cpow(k as f64, s);
        }
        assert!((z - expect).norm() < 1e-11);
    }

    #[test]
    fn zeta_cutoff_difference_is_the_explicit_tail() {
        let grid = CosphereGrid::new(1, 2, 2, 1).unwrap();
        let field = SampleField::constant_identity(grid, c(1.0, 0.0));
        let sym = ClassicalSymbol::single_term(c(1.0, 0.0), field, 1);
        let s = c(-2.5, 0.3);
        let k0 = crate::fiber::identity(1);
        let z1 = galerkin_zeta(&sym, 16, s, &k0, 1e-6).unwrap();
        let z2 = galerkin_zeta(&sym, 32, s, &k0, 1e-6).unwrap();
        let mut tail = c(0.0, 0.0);
        for k in 17..=32 {
            tail += 2.0 * cpow(k as f64, s);
        }
        assert!((z2 - z1 - tail).norm() < 1e-12);
    }

    #[test]
    fn power_at_one_recovers_the_symmetrized_matrix() {
        let grid = CosphereGrid::new(1, 3, 2, 1).unwrap();
        let lead = SampleField::constant_identity(grid, c(1.0, 0.0));
        let pert = SampleField::from_fn(grid, |ix, _| {
            FiberMatrix::from_element(1, 1, c(0.3 * grid.x_coord(ix)[0].cos(), 0.0))
        });
        let sym = ClassicalSymbol::new(c(1.0, 0.0), vec![lead, pert]);
        let b = 20;
        let k0 = crate::fiber::identity(1);
        let q = QuantizedSymbol::new(&sym).unwrap();
        let m = q.assemble(b, &k0);
        let herm = (&m + m.adjoint()).scale(0.5);
        let op = GalerkinOperator::new(&sym, b, &k0, 1e-9).unwrap();
        let p1 = op.power(c(1.0, 0.0));
        assert!(crate::fiber::max_abs(&(&p1 - &herm)) < 1e-10);
        // And s = −1 inverts it.
        let inv = op.power(c(-1.0, 0.0));
        let n = herm.nrows();
        assert!(crate::fiber::max_abs(&(&herm * &inv - crate::fiber::identity(n))) < 1e-9);
    }

    #[test]
    fn commutator_trace_decays_and_vanishes_for_multipliers() {
        let grid = CosphereGrid::new(1, 4, 2, 1).unwrap();
        // Commuting multipliers: exact zero.
        let field = SampleField::constant_identity(grid, c(1.0, 0.0));
        let g0 = ClassicalSymbol::single_term(c(1.0, 0.0), field.clone(), 0);
        let h0 = ClassicalSymbol::single_term(c(-3.0, 0.0), field, 0);
        assert!(commutator_trace_check(&g0, &h0, 32).unwrap() < 1e-14);

        // x-dependent order −3 against |ξ|: decay over B.
        let g = {
            let f = SampleField::constant_identity(grid, c(1.0, 0.0));
            ClassicalSymbol::single_term(c(1.0, 0.0), f, 0)
        };
        let h = {
            let f = SampleField::from_fn(grid, |ix, _| {
                let x = grid.x_coord(ix)[0];
                FiberMatrix::from_element(1, 1, c(1.0 + 0.4 * x.cos() + 0.2 * (2.0 * x).sin(), 0.0))
            });
            ClassicalSymbol::single_term(c(-3.0, 0.0), f, 0)
        };
        let v: Vec<f64> = [64, 128, 256]
            .iter()
            .map(|&b| commutator_trace_check(&g, &h, b).unwrap())
            .collect();
        assert!(v[0] > v[1] && v[1] > v[2], "no decay: {v:?}");
        assert!(v[2] < v[0] * 0.5);
    }

    #[test]
    fn quantization_applies_symbol_to_fourier_modes() {
        // (A e^{ikx})(x) = e^{ikx} a(x,k); check matrix columns against the
        // pointwise product expanded in Fourier modes.
        let grid = CosphereGrid::new(1, 2, 2, 1).unwrap();
        let sym = {
            let lead = SampleField::from_fn(grid, |_, ia| {
                FiberMatrix::from_element(1, 1, c(if ia == 0 { 2.0 } else { 1.0 }, 0.0))
            });
            let pert = SampleField::from_fn(grid, |ix, _| {
                FiberMatrix::from_element(1, 1, c(0.5 * grid.x_coord(ix)[0].sin(), 0.0))
            });
            ClassicalSymbol::new(c(1.0, 0.0), vec![lead, pert])
        };
        let q = QuantizedSymbol::new(&sym).unwrap();
        for &k in &[3i64, -5, 1] {
            // a(x,k) sampled on a fine grid, expanded to coefficients.
            let l = 64usize;
            let sheet = if k > 0 { 0.0 } else { std::f64::consts::PI };
            let vals: Vec<C64> = (0..l)
                .map(|qx| {
                    let x = TAU * qx as f64 / l as f64;
                    let lead = if k > 0 { 2.0 } else { 1.0 };
                    let _ = sheet;
                    c(lead * k.abs() as f64 + 0.5 * x.sin(), 0.0)
                })
                .collect();
            let coeff = dft(&vals);
            for dq in -2i64..=2 {
                let r = ((dq + l as i64) % l as i64) as usize;
                let got = q.block(k + dq, k)[(0, 0)];
                assert!((got - coeff[r]).norm() < 1e-12, "k={k} dq={dq}");
            }
        }
    }
}
