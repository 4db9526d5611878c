//! Sampling grids on the cosphere bundle `S*(T^m)` and the induced measure.
//!
//! Matrix-valued sections are stored flat (x-point × angular node × fiber
//! entry) so pointwise algebra and spectral differentiation run without
//! per-point allocation. All grids are uniform, so trapezoid sums are
//! spectrally accurate and DFT interpolation is exact on band-limited data.


use crate::error::{Result, TorzetaError};
use crate::fiber::{C64, FiberMatrix};

pub const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Discretization of `S*(T^m)`: an x-grid of size `(2X+1)^m` and the angular
/// nodes of the unit sphere `S^{m-1}` (two points for m = 1, a uniform
/// θ-grid for m = 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CosphereGrid {
    pub dim: usize,
    pub x_modes: usize,
    pub angular_nodes: usize,
    pub fiber_dim: usize,
}

impl CosphereGrid {
    pub fn new(dim: usize, x_modes: usize, angular_nodes: usize, fiber_dim: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(TorzetaError::SpecValidation(format!(
                "base dimension must be 1 or 2, got {dim}"
            )));
        }
        if x_modes < 1 {
            return Err(TorzetaError::SpecValidation("x_modes must be >= 1".into()));
        }
        let angular_nodes = if dim == 1 { 2 } else { angular_nodes };
        if dim == 2 && (angular_nodes < 8 || angular_nodes % 2 != 0) {
            return Err(TorzetaError::SpecValidation(format!(
                "angular grid must be even and >= 8 for m = 2, got {angular_nodes}"
            )));
        }
        if fiber_dim == 0 || fiber_dim > crate::fiber::MAX_FIBER_DIM {
            return Err(TorzetaError::SpecValidation(format!(
                "fiber dimension must be in 1..=16, got {fiber_dim}"
            )));
        }
        Ok(CosphereGrid {
            dim,
            x_modes,
            angular_nodes,
            fiber_dim,
        })
    }

    /// Points per x-coordinate.
    pub fn x_side(&self) -> usize {
        2 * self.x_modes + 1
    }

    pub fn x_points(&self) -> usize {
        self.x_side().pow(self.dim as u32)
    }

    pub fn points(&self) -> usize {
        self.x_points() * self.angular_nodes
    }

    /// Coordinates of x-grid point `ix` (row-major for m = 2).
    pub fn x_coord(&self, ix: usize) -> [f64; 2] {
        let side = self.x_side();
        let h = TAU / side as f64;
        if self.dim == 1 {
            [ix as f64 * h, 0.0]
        } else {
            [(ix / side) as f64 * h, (ix % side) as f64 * h]
        }
    }

    /// Unit covector at angular node `ia`.
    pub fn angle(&self, ia: usize) -> [f64; 2] {
        if self.dim == 1 {
            [if ia == 0 { 1.0 } else { -1.0 }, 0.0]
        } else {
            let th = TAU * ia as f64 / self.angular_nodes as f64;
            [th.cos(), th.sin()]
        }
    }

    pub fn theta(&self, ia: usize) -> f64 {
        if self.dim == 1 {
            if ia == 0 {
                0.0
            } else {
                std::f64::consts::PI
            }
        } else {
            TAU * ia as f64 / self.angular_nodes as f64
        }
    }
}

/// The density `|μ|` induced by `μ = α ∧ ω^{m-1}` on `S*(T^m)`: the uniform
/// measure `dx` (m = 1, per sheet) or `dθ dx` (m = 2).
#[derive(Debug, Clone, Copy)]
pub struct CosphereMeasure {
    pub dim: usize,
    /// Quadrature weight per angular node.
    pub angular_weight: f64,
    /// Volume of the x-torus, `(2π)^m`.
    pub x_volume: f64,
}

impl CosphereMeasure {
    pub fn for_grid(grid: &CosphereGrid) -> Self {
        let angular_weight = if grid.dim == 1 {
            1.0
        } else {
            TAU / grid.angular_nodes as f64
        };
        CosphereMeasure {
            dim: grid.dim,
            angular_weight,
            x_volume: TAU.powi(grid.dim as i32),
        }
    }

    pub fn total_mass(&self, grid: &CosphereGrid) -> f64 {
        self.x_volume * self.angular_weight * grid.angular_nodes as f64
    }
}

/// A matrix-valued function sampled on a [`CosphereGrid`], stored flat with
/// layout `((ix * n_ang + ia) * n + i) * n + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleField {
    pub grid: CosphereGrid,
    pub data: Vec<C64>,
}

impl SampleField {
    pub fn zeros(grid: CosphereGrid) -> Self {
        let n = grid.fiber_dim;
        SampleField {
            grid,
            data: vec![C64::new(0.0, 0.0); grid.points() * n * n],
        }
    }

    pub fn constant_identity(grid: CosphereGrid, c: C64) -> Self {
        let mut f = Self::zeros(grid);
        let n = grid.fiber_dim;
        for p in 0..grid.points() {
            for i in 0..n {
                f.data[(p * n + i) * n + i] = c;
            }
        }
        f
    }

    /// Builds a field from a per-point matrix generator.
    pub fn from_fn<F: FnMut(usize, usize) -> FiberMatrix>(grid: CosphereGrid, mut g: F) -> Self {
        let mut f = Self::zeros(grid);
        for ix in 0..grid.x_points() {
            for ia in 0..grid.angular_nodes {
                f.set_mat(ix, ia, &g(ix, ia));
            }
        }
        f
    }

    #[inline]
    fn base(&self, ix: usize, ia: usize) -> usize {
        let n = self.grid.fiber_dim;
        (ix * self.grid.angular_nodes + ia) * n * n
    }

    pub fn mat_at(&self, ix: usize, ia: usize) -> FiberMatrix {
        let n = self.grid.fiber_dim;
        let b = self.base(ix, ia);
        FiberMatrix::from_row_slice(n, n, &self.data[b..b + n * n])
    }

    pub fn set_mat(&mut self, ix: usize, ia: usize, m: &FiberMatrix) {
        let n = self.grid.fiber_dim;
        let b = self.base(ix, ia);
        for i in 0..n {
            for j in 0..n {
                self.data[b + i * n + j] = m[(i, j)];
            }
        }
    }

    pub fn entry(&self, ix: usize, ia: usize, i: usize, j: usize) -> C64 {
        let n = self.grid.fiber_dim;
        self.data[self.base(ix, ia) + i * n + j]
    }

    pub fn check_grid(&self, other: &SampleField) -> Result<()> {
        if self.grid != other.grid {
            return Err(TorzetaError::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn add(&self, other: &SampleField) -> SampleField {
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &SampleField) -> SampleField {
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a -= b;
        }
        out
    }

    pub fn add_assign(&mut self, other: &SampleField) {
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += b;
        }
    }

    pub fn scale(&self, c: C64) -> SampleField {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    /// Pointwise matrix product.
    pub fn matmul(&self, other: &SampleField) -> SampleField {
        let n = self.grid.fiber_dim;
        let mut out = SampleField::zeros(self.grid);
        let nn = n * n;
        for p in 0..self.grid.points() {
            let b = p * nn;
            for i in 0..n {
                for k in 0..n {
                    let aik = self.data[b + i * n + k];
                    if aik.re == 0.0 && aik.im == 0.0 {
                        continue;
                    }
                    for j in 0..n {
                        out.data[b + i * n + j] += aik * other.data[b + k * n + j];
                    }
                }
            }
        }
        out
    }

    /// Pointwise conjugate transpose.
    pub fn adjoint_pointwise(&self) -> SampleField {
        let n = self.grid.fiber_dim;
        let mut out = SampleField::zeros(self.grid);
        for p in 0..self.grid.points() {
            let b = p * n * n;
            for i in 0..n {
                for j in 0..n {
                    out.data[b + i * n + j] = self.data[b + j * n + i].conj();
                }
            }
        }
        out
    }

    /// Pointwise fiber trace as an n = 1 field on the same grid geometry.
    pub fn trace_field(&self) -> SampleField {
        let n = self.grid.fiber_dim;
        let mut g = self.grid;
        g.fiber_dim = 1;
        let mut out = SampleField::zeros(g);
        for p in 0..self.grid.points() {
            let b = p * n * n;
            let mut t = C64::new(0.0, 0.0);
            for i in 0..n {
                t += self.data[b + i * n + i];
            }
            out.data[p] = t;
        }
        out
    }

    /// Spectral derivative in the x-coordinate `axis` (0 or 1). Exact zero
    /// fast path for data constant along that axis, so multipliers compose
    /// without derivative corrections.
    pub fn x_derivative(&self, axis: usize) -> SampleField {
        let side = self.grid.x_side();
        let na = self.grid.angular_nodes;
        let n = self.grid.fiber_dim;
        let nn = n * n;
        let mut out = SampleField::zeros(self.grid);
        let mut line = vec![C64::new(0.0, 0.0); side];
        // m = 2 only: map (line index, position) to the row-major x index.
        let x_index = |outer: usize, q: usize| -> usize {
            if axis == 0 {
                q * side + outer
            } else {
                outer * side + q
            }
        };
        for outer in 0..(if self.grid.dim == 1 { 1 } else { side }) {
            for ia in 0..na {
                for e in 0..nn {
                    let mut constant = true;
                    for q in 0..side {
                        let ix = if self.grid.dim == 1 {
                            q
                        } else {
                            x_index(outer, q)
                        };
                        line[q] = self.data[(ix * na + ia) * nn + e];
                        if q > 0 && line[q] != line[0] {
                            constant = false;
                        }
                    }
                    if constant {
                        continue;
                    }
                    let d = deriv_periodic(&line);
                    for q in 0..side {
                        let ix = if self.grid.dim == 1 {
                            q
                        } else {
                            x_index(outer, q)
                        };
                        out.data[(ix * na + ia) * nn + e] = d[q];
                    }
                }
            }
        }
        out
    }

    /// Spectral derivative in the angle θ (m = 2 only; zero for m = 1, where
    /// the two sheets carry no angular direction).
    pub fn theta_derivative(&self) -> SampleField {
        let mut out = SampleField::zeros(self.grid);
        if self.grid.dim == 1 {
            return out;
        }
        let na = self.grid.angular_nodes;
        let n = self.grid.fiber_dim;
        let nn = n * n;
        let mut line = vec![C64::new(0.0, 0.0); na];
        for ix in 0..self.grid.x_points() {
            for e in 0..nn {
                let mut constant = true;
                for ia in 0..na {
                    line[ia] = self.data[(ix * na + ia) * nn + e];
                    if ia > 0 && line[ia] != line[0] {
                        constant = false;
                    }
                }
                if constant {
                    continue;
                }
                let d = deriv_periodic(&line);
                for ia in 0..na {
                    out.data[(ix * na + ia) * nn + e] = d[ia];
                }
            }
        }
        out
    }

    /// Mean over the x-grid of the fiber trace, per angular node.
    pub fn x_mean_trace(&self) -> Vec<C64> {
        let na = self.grid.angular_nodes;
        let n = self.grid.fiber_dim;
        let nn = n * n;
        let nx = self.grid.x_points();
        let mut out = vec![C64::new(0.0, 0.0); na];
        for ix in 0..nx {
            for ia in 0..na {
                let b = (ix * na + ia) * nn;
                for i in 0..n {
                    out[ia] += self.data[b + i * n + i];
                }
            }
        }
        for v in out.iter_mut() {
            *v /= nx as f64;
        }
        out
    }

    /// Integral against the cosphere measure: `∫ f |μ|` as a fiber matrix.
    pub fn integrate(&self, measure: &CosphereMeasure) -> FiberMatrix {
        let n = self.grid.fiber_dim;
        let na = self.grid.angular_nodes;
        let nn = n * n;
        let mut acc = FiberMatrix::zeros(n, n);
        for ix in 0..self.grid.x_points() {
            for ia in 0..na {
                let b = (ix * na + ia) * nn;
                for i in 0..n {
                    for j in 0..n {
                        acc[(i, j)] += self.data[b + i * n + j];
                    }
                }
            }
        }
        let w = measure.x_volume / self.grid.x_points() as f64 * measure.angular_weight;
        acc.scale(w)
    }
}

/// Signed Fourier mode of DFT bin `r` for length `len`.
pub fn mode_of(r: usize, len: usize) -> i64 {
    if r <= (len - 1) / 2 {
        r as i64
    } else {
        r as i64 - len as i64
    }
}

/// Forward DFT, coefficients normalized so `f_q = Σ_r c_r e^{i k_r x_q}`.
pub fn dft(f: &[C64]) -> Vec<C64> {
    let l = f.len();
    let mut c = vec![C64::new(0.0, 0.0); l];
    for (r, cr) in c.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for (q, fq) in f.iter().enumerate() {
            let ph = -TAU * (r * q % l) as f64 / l as f64;
            acc += fq * C64::from_polar(1.0, ph);
        }
        *cr = acc / l as f64;
    }
    c
}

pub fn idft(c: &[C64]) -> Vec<C64> {
    let l = c.len();
    let mut f = vec![C64::new(0.0, 0.0); l];
    for (q, fq) in f.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for (r, cr) in c.iter().enumerate() {
            let ph = TAU * (r * q % l) as f64 / l as f64;
            acc += cr * C64::from_polar(1.0, ph);
        }
        *fq = acc;
    }
    f
}

/// Spectral derivative of a periodic line; the Nyquist mode of even-length
/// grids is dropped.
pub fn deriv_periodic(f: &[C64]) -> Vec<C64> {
    let l = f.len();
    let mut c = dft(f);
    for (r, cr) in c.iter_mut().enumerate() {
        let k = mode_of(r, l);
        if l % 2 == 0 && r == l / 2 {
            *cr = C64::new(0.0, 0.0);
        } else {
            *cr *= C64::new(0.0, k as f64);
        }
    }
    idft(&c)
}

/// Trigonometric interpolation of periodic samples at point `x ∈ [0, 2π)`.
/// The Nyquist mode of even-length grids is interpolated as a cosine.
pub fn trig_interp(f: &[C64], x: f64) -> C64 {
    let l = f.len();
    let c = dft(f);
    let mut acc = C64::new(0.0, 0.0);
    for (r, cr) in c.iter().enumerate() {
        let k = mode_of(r, l);
        if l % 2 == 0 && r == l / 2 {
            acc += cr * (k as f64 * x).cos();
        } else {
            acc += cr * C64::from_polar(1.0, k as f64 * x);
        }
    }
    acc
}

/// Random band-limited smooth field; used by verification suites and tests.
pub fn random_smooth_field<R: rand::Rng>(
    grid: CosphereGrid,
    x_band: usize,
    ang_band: usize,
    hermitian: bool,
    rng: &mut R,
) -> SampleField {
    let n = grid.fiber_dim;
    let x_band = x_band.min(grid.x_modes);
    let ang_band = if grid.dim == 1 {
        1
    } else {
        ang_band.min(grid.angular_nodes / 2 - 1)
    };
    // Synthesize from a small set of Fourier modes so products stay resolved.
    let mut modes: Vec<([i64; 2], i64, FiberMatrix)> = Vec::new();
    let kx_range = x_band as i64;
    for k1 in -kx_range..=kx_range {
        let k2_range = if grid.dim == 1 { 0 } else { kx_range };
        for k2 in -k2_range..=k2_range {
            for l in -(ang_band as i64)..=(ang_band as i64) {
                let mut m = FiberMatrix::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    }
                }
                let decay = 0.5f64.powi((k1.abs() + k2.abs() + l.abs()) as i32);
                modes.push(([k1, k2], l, m.scale(decay)));
            }
        }
    }
    let mut field = SampleField::from_fn(grid, |ix, ia| {
        let x = grid.x_coord(ix);
        let th = grid.theta(ia);
        let mut acc = FiberMatrix::zeros(n, n);
        for (k, l, m) in &modes {
            let ph = C64::from_polar(
                1.0,
                k[0] as f64 * x[0] + k[1] as f64 * x[1] + *l as f64 * th,
            );
            acc += m.clone().map(|z| z * ph);
        }
        acc
    });
    if hermitian {
        let adj = field.adjoint_pointwise();
        field = field.add(&adj).scale(C64::new(0.5, 0.0));
    }
    field
}
