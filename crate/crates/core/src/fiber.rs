//! Functional calculus on positive-definite fiber endomorphisms.
//!
//! Everything here works through one Hermitian eigendecomposition per
//! operand: complex powers `σ^s`, the conjugation representation
//! `Φ(t): A ↦ σ^{-t} A σ^t`, the averaging operator `T(a)A = ∫_0^a Φ(t)A dt`
//! together with its inverse, and an independent contour-integral power
//! oracle built on resolvent solves.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Result, TorzetaError};

pub type C64 = Complex<f64>;
/// Dense complex endomorphism of the fiber.
pub type FiberMatrix = DMatrix<C64>;

/// Hermiticity tolerance used before eigendecomposition.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Fiber dimensions above this are rejected; dense O(n^3) kernels only.
pub const MAX_FIBER_DIM: usize = 16;

pub fn identity(n: usize) -> FiberMatrix {
    FiberMatrix::identity(n, n)
}

/// Max absolute entry of `m`.
pub fn max_abs(m: &FiberMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A positive-definite Hermitian fiber matrix with its spectral data.
#[derive(Debug, Clone)]
pub struct PdMatrix {
    base: FiberMatrix,
    eigvals: Vec<f64>,
    /// Unitary matrix of eigenvectors (columns).
    u: FiberMatrix,
    floor: f64,
}

impl PdMatrix {
    /// Validates Hermiticity and positivity, symmetrizes, and decomposes.
    pub fn new(mat: FiberMatrix, spectral_floor: f64) -> Result<Self> {
        let n = mat.nrows();
        if n == 0 || mat.ncols() != n {
            return Err(TorzetaError::DimensionMismatch(format!(
                "expected square matrix, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if n > MAX_FIBER_DIM {
            return Err(TorzetaError::FiberDimTooLarge(n));
        }
        let scale = max_abs(&mat).max(1.0);
        let asym = max_abs(&(&mat - mat.adjoint()));
        if asym > HERMITICITY_TOL * scale {
            return Err(TorzetaError::NotHermitian {
                max_asym: asym,
                tol: HERMITICITY_TOL * scale,
            });
        }
        // Symbol arithmetic introduces roundoff asymmetry; symmetrize first.
        let herm = (&mat + mat.adjoint()).scale(0.5);
        let se = herm.clone().symmetric_eigen();
        let eigvals: Vec<f64> = se.eigenvalues.iter().cloned().collect();
        let min_eig = eigvals.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig < spectral_floor || min_eig <= 0.0 {
            return Err(TorzetaError::NotPositiveDefinite {
                min_eig,
                floor: spectral_floor,
            });
        }
        Ok(PdMatrix {
            base: herm,
            eigvals,
            u: se.eigenvectors,
            floor: spectral_floor,
        })
    }

    pub fn dim(&self) -> usize {
        self.base.nrows()
    }

    pub fn base(&self) -> &FiberMatrix {
        &self.base
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigvals
    }

    pub fn spectral_floor(&self) -> f64 {
        self.floor
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigvals.iter().cloned().fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigvals.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// `σ^s = U diag(λ_i^s) U*`.
    pub fn power(&self, s: C64) -> FiberMatrix {
        let n = self.dim();
        if s == C64::new(0.0, 0.0) {
            return identity(n);
        }
        if s == C64::new(1.0, 0.0) {
            return self.base.clone();
        }
        let d: Vec<C64> = self
            .eigvals
            .iter()
            .map(|&l| (s * l.ln()).exp())
            .collect();
        self.from_eigen_diag(&d)
    }

    fn from_eigen_diag(&self, d: &[C64]) -> FiberMatrix {
        let n = self.dim();
        let mut ud = self.u.clone();
        for j in 0..n {
            let f = d[j];
            for i in 0..n {
                ud[(i, j)] *= f;
            }
        }
        &ud * self.u.adjoint()
    }

    fn check_dim(&self, a: &FiberMatrix) -> Result<()> {
        if a.nrows() != self.dim() || a.ncols() != self.dim() {
            return Err(TorzetaError::DimensionMismatch(format!(
                "operand is {}x{}, fiber dimension is {}",
                a.nrows(),
                a.ncols(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Applies an entrywise filter in the eigenbasis:
    /// `A ↦ U (φ(μ_ij) ⊙ U*AU) U*` with `μ_ij = ln λ_j − ln λ_i`.
    fn eigen_filter<F: Fn(f64) -> C64>(&self, a: &FiberMatrix, phi: F) -> FiberMatrix {
        let n = self.dim();
        let mut b = self.u.adjoint() * a * &self.u;
        for i in 0..n {
            let li = self.eigvals[i].ln();
            for j in 0..n {
                let mu = self.eigvals[j].ln() - li;
                b[(i, j)] *= phi(mu);
            }
        }
        &self.u * b * self.u.adjoint()
    }

    /// `Φ(t)A = σ^{-t} A σ^t`.
    pub fn conjugate(&self, t: C64, a: &FiberMatrix) -> Result<FiberMatrix> {
        self.check_dim(a)?;
        Ok(self.eigen_filter(a, |mu| (t * mu).exp()))
    }

    /// `T(a)A = ∫_0^a Φ(t)A dt`, entrywise `(e^{aμ}−1)/μ` in the eigenbasis.
    /// The formula is entire in `a`.
    pub fn t_operator(&self, a: C64, m: &FiberMatrix) -> Result<FiberMatrix> {
        self.check_dim(m)?;
        Ok(self.eigen_filter(m, |mu| expm1_over(a, mu)))
    }

    /// Unique `A` with `T(1)A = B`. The eigenbasis factor `(e^μ−1)/μ` is
    /// strictly positive for the real μ arising from a PD spectrum.
    pub fn t_solve(&self, b: &FiberMatrix) -> Result<FiberMatrix> {
        self.check_dim(b)?;
        Ok(self.eigen_filter(b, |mu| {
            C64::new(1.0, 0.0) / expm1_over(C64::new(1.0, 0.0), mu)
        }))
    }
}

/// `(e^{aμ} − 1)/μ` with the limit value `a` at μ = 0, series-stabilized.
fn expm1_over(a: C64, mu: f64) -> C64 {
    let z = a * mu;
    if z.norm() < 1e-4 {
        // a (1 + z/2 + z^2/6 + z^3/24); remainder below 1e-18 relative.
        a * (C64::new(1.0, 0.0)
            + z * (C64::new(0.5, 0.0) + z * (C64::new(1.0 / 6.0, 0.0) + z * (1.0 / 24.0))))
    } else {
        (z.exp() - 1.0) / mu
    }
}

/// Keyhole contour around the negative real axis for the resolvent integral.
#[derive(Debug, Clone, Copy)]
pub struct ContourSpec {
    /// Radius of the circle around the origin; must stay below the spectrum.
    pub inner_radius: f64,
    /// Distance of the two horizontal rays from the negative real axis.
    pub line_offset: f64,
    /// Total quadrature node budget.
    pub node_count: usize,
}

impl ContourSpec {
    pub fn validate(&self, operand: &PdMatrix) -> Result<()> {
        if !(self.inner_radius > 0.0) || !(self.line_offset > 0.0) {
            return Err(TorzetaError::ContourTouchesSpectrum(
                "inner_radius and line_offset must be positive".into(),
            ));
        }
        if self.node_count < 64 {
            return Err(TorzetaError::ContourTouchesSpectrum(format!(
                "node_count {} below minimum 64",
                self.node_count
            )));
        }
        if self.line_offset >= self.inner_radius {
            return Err(TorzetaError::ContourTouchesSpectrum(
                "line_offset must be smaller than inner_radius so the rays meet the circle"
                    .into(),
            ));
        }
        if self.inner_radius >= operand.min_eigenvalue() {
            return Err(TorzetaError::ContourTouchesSpectrum(format!(
                "inner_radius {:.3e} reaches the spectrum (min eigenvalue {:.3e})",
                self.inner_radius,
                operand.min_eigenvalue()
            )));
        }
        if self.inner_radius >= operand.spectral_floor() {
            return Err(TorzetaError::ContourTouchesSpectrum(format!(
                "inner_radius {:.3e} not below the spectral floor {:.3e}",
                self.inner_radius,
                operand.spectral_floor()
            )));
        }
        Ok(())
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-based initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0_f64, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre over [a, b] with `total` nodes in 16-node panels.
pub fn composite_gl(a: f64, b: f64, total: usize) -> Vec<(f64, f64)> {
    let panel = 16.min(total.max(4));
    let npanels = (total / panel).max(1);
    let (xs, ws) = gauss_legendre(panel);
    let h = (b - a) / npanels as f64;
    let mut out = Vec::with_capacity(panel * npanels);
    for p in 0..npanels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        for (x, w) in xs.iter().zip(ws.iter()) {
            out.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
    out
}

/// Contour-integral power oracle: `A^s = (1/2πi) ∫_γ λ^s (λ−A)^{-1} dλ`
/// for `Re(s) < 0`, with the ray tails beyond `50·λ_max` summed analytically
/// through a Neumann expansion of the resolvent.
pub fn contour_power(p: &PdMatrix, s: C64, spec: &ContourSpec) -> Result<FiberMatrix> {
    if s.re >= 0.0 {
        return Err(TorzetaError::ContourPositiveOrder(s.re));
    }
    spec.validate(p)?;
    let n = p.dim();
    let a = p.base();
    let r0 = spec.inner_radius;
    let d = spec.line_offset;
    let x_tail = 50.0 * p.max_eigenvalue();
    let theta0 = std::f64::consts::PI - (d / r0).asin();
    let x_j = -(r0 * r0 - d * d).sqrt();
    let u_max = (x_tail / (-x_j)).ln();

    let id = identity(n);
    let resolvent = |lambda: C64| -> FiberMatrix {
        let mut m = -a.clone();
        for i in 0..n {
            m[(i, i)] += lambda;
        }
        m.lu().solve(&id).expect("resolvent solve off the spectrum")
    };

    let mut acc = FiberMatrix::zeros(n, n);
    // Arc traversed from +θ0 to −θ0 (clockwise through the positive axis gap).
    for (theta, w) in composite_gl(-theta0, theta0, spec.node_count / 2) {
        let lam = C64::from_polar(r0, theta);
        let dldt = C64::new(0.0, 1.0) * lam; // dλ/dθ
        acc -= resolvent(lam).scale_mut_complex(lam.powc(s) * dldt * w);
    }
    // Rays parameterized by x = x_j e^u; upper traversed inward (u: U→0),
    // lower outward (u: 0→U).
    for (u, w) in composite_gl(0.0, u_max, spec.node_count / 4) {
        let x = x_j * u.exp();
        let jac = C64::new(x, 0.0) * w; // dλ = x_j e^u du = x du
        let up = C64::new(x, d);
        let lo = C64::new(x, -d);
        acc -= resolvent(up).scale_mut_complex(up.powc(s) * jac);
        acc += resolvent(lo).scale_mut_complex(lo.powc(s) * jac);
    }
    // Analytic tails: (λ−A)^{-1} = Σ A^k λ^{-k-1} + O((λmax/|λ|)^{K+1}).
    let lam_u = C64::new(-x_tail, d);
    let lam_l = C64::new(-x_tail, -d);
    let mut apow = identity(n);
    for k in 0..=8 {
        let e = s - k as f64;
        let coef = lam_u.powc(e) / e - lam_l.powc(e) / e;
        acc += apow.clone().scale_mut_complex(coef);
        apow = &apow * a;
    }
    let norm = C64::new(0.0, 1.0) * 2.0 * std::f64::consts::PI;
    Ok(acc.map(|z| z / norm))
}

/// Contour oracle extended to arbitrary `s` by the reduction
/// `A^s = A^{s-k} A^k` with integer `k` chosen so `Re(s-k) < 0`.
pub fn contour_power_reduced(p: &PdMatrix, s: C64, spec: &ContourSpec) -> Result<FiberMatrix> {
    if s.re < 0.0 {
        return contour_power(p, s, spec);
    }
    let k = s.re.floor() as i64 + 1;
    let frac = contour_power(p, s - k as f64, spec)?;
    let mut apow = identity(p.dim());
    for _ in 0..k {
        apow = &apow * p.base();
    }
    Ok(frac * apow)
}

trait ScaleComplex {
    fn scale_mut_complex(self, c: C64) -> Self;
}

impl ScaleComplex for FiberMatrix {
    fn scale_mut_complex(mut self, c: C64) -> Self {
        for z in self.iter_mut() {
            *z *= c;
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub(crate) fn random_pd(rng: &mut ChaCha8Rng, n: usize) -> PdMatrix {
        // Random Hermitian with spectrum pushed into [0.5, ~10].
        let mut m = FiberMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let h = (&m * m.adjoint()).scale(9.0 / n as f64)
            + FiberMatrix::identity(n, n).scale(0.5);
        PdMatrix::new(h, 0.4).unwrap()
    }

    fn random_mat(rng: &mut ChaCha8Rng, n: usize) -> FiberMatrix {
        let mut m = FiberMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        m
    }

    #[test]
    fn power_identity_fixed() {
        let p = PdMatrix::new(identity(2), 0.5).unwrap();
        let r = p.power(c(0.7, 0.0));
        assert!(max_abs(&(r - identity(2))) < 1e-14);
    }

    #[test]
    fn power_diagonal_sqrt() {
        let m = FiberMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(4.0, 0.0),
            c(9.0, 0.0),
        ]));
        let p = PdMatrix::new(m, 1.0).unwrap();
        let r = p.power(c(0.5, 0.0));
        assert!((r[(0, 0)] - c(2.0, 0.0)).norm() < 1e-13);
        assert!((r[(1, 1)] - c(3.0, 0.0)).norm() < 1e-13);
        assert!(r[(0, 1)].norm() < 1e-13);
    }

    #[test]
    fn power_group_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let p = random_pd(&mut rng, 3);
            let s = c(rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0));
            let t = c(rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0));
            let lhs = p.power(s) * p.power(t);
            let rhs = p.power(s + t);
            let scale = max_abs(&rhs);
            assert!(max_abs(&(lhs - &rhs)) <= 1e-10 * scale);
        }
    }

    #[test]
    fn conjugate_trivial_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_pd(&mut rng, 3);
        let a = random_mat(&mut rng, 3);
        let r0 = p.conjugate(c(0.0, 0.0), &a).unwrap();
        assert!(max_abs(&(r0 - &a)) < 1e-12);
        // σ commutes with its own powers.
        let rp = p.conjugate(c(2.5, 0.0), p.base()).unwrap();
        assert!(max_abs(&(rp - p.base())) < 1e-10);
    }

    #[test]
    fn conjugate_is_representation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let p = random_pd(&mut rng, 3);
            let a = random_mat(&mut rng, 3);
            let s = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let t = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let lhs = p.conjugate(s, &p.conjugate(t, &a).unwrap()).unwrap();
            let rhs = p.conjugate(s + t, &a).unwrap();
            assert!(max_abs(&(lhs - rhs)) <= 1e-10 * max_abs(&a).max(1.0) * 10.0);
        }
    }

    #[test]
    fn t_operator_fixes_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = random_pd(&mut rng, 3);
        let r = p.t_operator(c(1.0, 0.0), p.base()).unwrap();
        assert!(max_abs(&(r - p.base())) < 1e-11);
    }

    #[test]
    fn t_operator_dyadic_half_step() {
        // T(1)A = (Id + Φ(1/2)) T(1/2) A
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = random_pd(&mut rng, 3);
        let a = random_mat(&mut rng, 3);
        let lhs = p.t_operator(c(1.0, 0.0), &a).unwrap();
        let th = p.t_operator(c(0.5, 0.0), &a).unwrap();
        let rhs = &th + p.conjugate(c(0.5, 0.0), &th).unwrap();
        assert!(max_abs(&(lhs - rhs)) < 1e-10);
    }

    #[test]
    fn t_operator_matches_quadrature() {
        // T(1)A = ∫_0^1 Φ(t)A dt, evaluated by composite Gauss-Legendre.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let p = random_pd(&mut rng, 3);
        let a = random_mat(&mut rng, 3);
        let mut acc = FiberMatrix::zeros(3, 3);
        for (t, w) in composite_gl(0.0, 1.0, 64) {
            acc += p.conjugate(c(t, 0.0), &a).unwrap().scale(w);
        }
        let exact = p.t_operator(c(1.0, 0.0), &a).unwrap();
        assert!(max_abs(&(exact - acc)) < 1e-12);
    }

    #[test]
    fn t_solve_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let p = random_pd(&mut rng, 4);
            let a = random_mat(&mut rng, 4);
            let b = p.t_operator(c(1.0, 0.0), &a).unwrap();
            let back = p.t_solve(&b).unwrap();
            assert!(max_abs(&(back - &a)) < 1e-10);
            let fwd = p.t_operator(c(1.0, 0.0), &p.t_solve(&a).unwrap()).unwrap();
            assert!(max_abs(&(fwd - &a)) < 1e-10);
        }
    }

    #[test]
    fn t_solve_trivial_representation() {
        // σ = λI makes Φ trivial, so T(1) = Id.
        let p = PdMatrix::new(identity(3).scale(2.0), 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let b = random_mat(&mut rng, 3);
        assert!(max_abs(&(p.t_solve(&b).unwrap() - &b)) < 1e-12);
        assert!(max_abs(&(p.t_solve(p.base()).unwrap() - p.base())) < 1e-12);
    }

    #[test]
    fn dyadic_factorization_of_t1() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let p = random_pd(&mut rng, 3);
        let a = random_mat(&mut rng, 3);
        let t1 = p.t_operator(c(1.0, 0.0), &a).unwrap();
        for levels in 1..=6usize {
            let mut acc = p
                .t_operator(c(0.5f64.powi(levels as i32), 0.0), &a)
                .unwrap();
            for i in (1..=levels).rev() {
                let phi = p.conjugate(c(0.5f64.powi(i as i32), 0.0), &acc).unwrap();
                acc += phi;
            }
            assert!(
                max_abs(&(&t1 - &acc)) < 1e-8,
                "dyadic factorization failed at {} levels",
                levels
            );
        }
    }

    #[test]
    fn contour_power_identity_and_diagonal() {
        let spec = ContourSpec {
            inner_radius: 0.3,
            line_offset: 0.05,
            node_count: 512,
        };
        let p = PdMatrix::new(identity(2), 0.5).unwrap();
        let r = contour_power(&p, c(-1.0, 0.0), &spec).unwrap();
        assert!(max_abs(&(r - identity(2))) < 1e-9);

        let m = FiberMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(2.0, 0.0),
            c(5.0, 0.0),
        ]));
        let p = PdMatrix::new(m, 1.0).unwrap();
        let r = contour_power(&p, c(-1.0, 0.0), &spec).unwrap();
        assert!((r[(0, 0)] - c(0.5, 0.0)).norm() < 1e-8);
        assert!((r[(1, 1)] - c(0.2, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn contour_power_matches_pd_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let spec = ContourSpec {
            inner_radius: 0.3,
            line_offset: 0.05,
            node_count: 512,
        };
        for _ in 0..5 {
            let p = random_pd(&mut rng, 3);
            let s = c(rng.gen_range(-3.0..-0.1), rng.gen_range(-0.3..0.3));
            let oracle = contour_power(&p, s, &spec).unwrap();
            let direct = p.power(s);
            assert!(
                max_abs(&(oracle - &direct)) < 1e-8,
                "contour oracle disagrees at s = {}",
                s
            );
        }
        // Positive real part goes through the A^s = A^{s-k} A^k reduction.
        let p = random_pd(&mut rng, 3);
        let s = c(0.3, 0.2);
        let oracle = contour_power_reduced(&p, s, &spec).unwrap();
        assert!(max_abs(&(oracle - p.power(s))) < 1e-9);
    }

    #[test]
    fn contour_rejects_bad_input() {
        let p = PdMatrix::new(identity(2).scale(0.4), 0.2).unwrap();
        let spec = ContourSpec {
            inner_radius: 0.5,
            line_offset: 0.05,
            node_count: 512,
        };
        assert!(matches!(
            contour_power(&p, c(-1.0, 0.0), &spec),
            Err(TorzetaError::ContourTouchesSpectrum(_))
        ));
        let ok = ContourSpec {
            inner_radius: 0.1,
            line_offset: 0.02,
            node_count: 512,
        };
        assert!(matches!(
            contour_power(&p, c(0.5, 0.0), &ok),
            Err(TorzetaError::ContourPositiveOrder(_))
        ));
    }

    #[test]
    fn rejects_non_pd_and_non_hermitian() {
        let mut m = identity(2);
        m[(0, 1)] = c(0.5, 0.0); // asymmetric
        assert!(matches!(
            PdMatrix::new(m, 0.1),
            Err(TorzetaError::NotHermitian { .. })
        ));
        let neg = FiberMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0, 0.0),
            c(-2.0, 0.0),
        ]));
        assert!(matches!(
            PdMatrix::new(neg, 0.1),
            Err(TorzetaError::NotPositiveDefinite { .. })
        ));
    }
}
