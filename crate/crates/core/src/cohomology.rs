//! Group cohomology of `(C, +)` acting on matrix fields by conjugation with
//! complex powers of a fixed positive definite field σ, and the coboundary
//! solver used at each level of the complex-powers induction.
//!
//! For an entire 2-cocycle `f` with `f(a, 0) = f(0, b) = 0`, the unique
//! 1-cochain `h` with `δ¹h = f` and prescribed `h(1)` satisfies the ODE
//! `h'(a) = Φ(a) h'(0) − g(a)` with `g(t) = ∂f/∂b (t, 0)`, so
//! `h(a) = T(a) h'(0) − G(a)`. The solver recovers `g` by Cauchy-circle
//! differentiation, fits it with a Taylor polynomial from samples on a large
//! circle, and integrates that polynomial exactly; `h'(0)` then comes from
//! inverting `T(1)` in the eigenbasis of σ.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use rand::Rng;

use crate::error::{Result, TorzetaError};
use crate::fiber::{C64, PdMatrix};
use crate::grid::{CosphereGrid, SampleField, TAU};

/// The conjugation action `a · X = σ^{-a} X σ^a`, stored as one spectral
/// factorization per cosphere grid point.
pub struct ConjugationAction {
    grid: CosphereGrid,
    mats: Vec<PdMatrix>,
}

impl ConjugationAction {
    pub fn from_field(leading: &SampleField, spectral_floor: f64) -> Result<Self> {
        let grid = leading.grid;
        let mut mats = Vec::with_capacity(grid.points());
        for ix in 0..grid.x_points() {
            for ia in 0..grid.angular_nodes {
                mats.push(PdMatrix::new(leading.mat_at(ix, ia), spectral_floor)?);
            }
        }
        Ok(ConjugationAction { grid, mats })
    }

    pub fn grid(&self) -> CosphereGrid {
        self.grid
    }

    fn map_pointwise<F>(&self, field: &SampleField, mut op: F) -> Result<SampleField>
    where
        F: FnMut(&PdMatrix, crate::fiber::FiberMatrix) -> Result<crate::fiber::FiberMatrix>,
    {
        let mut out = SampleField::zeros(self.grid);
        let na = self.grid.angular_nodes;
        for ix in 0..self.grid.x_points() {
            for ia in 0..na {
                let m = op(&self.mats[ix * na + ia], field.mat_at(ix, ia))?;
                out.set_mat(ix, ia, &m);
            }
        }
        Ok(out)
    }

    /// `Φ(t) X = σ^{-t} X σ^t`, pointwise.
    pub fn conjugate(&self, t: C64, field: &SampleField) -> Result<SampleField> {
        if field.grid != self.grid {
            return Err(TorzetaError::GridMismatch(format!(
                "{:?} vs {:?}",
                field.grid, self.grid
            )));
        }
        self.map_pointwise(field, |p, m| p.conjugate(t, &m))
    }

    /// `T(a) X = ∫_0^a Φ(t) X dt`, pointwise.
    pub fn t_apply(&self, a: C64, field: &SampleField) -> Result<SampleField> {
        self.map_pointwise(field, |p, m| p.t_operator(a, &m))
    }

    /// Solve `T(1) Y = X` for `Y`, pointwise.
    pub fn t_solve(&self, field: &SampleField) -> Result<SampleField> {
        self.map_pointwise(field, |p, m| p.t_solve(&m))
    }

    /// `σ^s` pointwise, via the stored eigendecompositions.
    pub fn power_field(&self, s: C64) -> SampleField {
        let na = self.grid.angular_nodes;
        let mut out = SampleField::zeros(self.grid);
        for ix in 0..self.grid.x_points() {
            for ia in 0..na {
                out.set_mat(ix, ia, &self.mats[ix * na + ia].power(s));
            }
        }
        out
    }
}

fn key1(a: C64) -> [u64; 2] {
    [a.re.to_bits(), a.im.to_bits()]
}

fn key2(a: C64, b: C64) -> [u64; 4] {
    [a.re.to_bits(), a.im.to_bits(), b.re.to_bits(), b.im.to_bits()]
}

/// A memoized map `C → matrix fields`, assumed entire in its argument.
pub struct OneCochain<'a> {
    f: Box<dyn Fn(C64) -> Result<SampleField> + 'a>,
    cache: RefCell<HashMap<[u64; 2], SampleField>>,
}

impl<'a> OneCochain<'a> {
    pub fn new<F: Fn(C64) -> Result<SampleField> + 'a>(f: F) -> Self {
        OneCochain {
            f: Box::new(f),
            cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn eval(&self, a: C64) -> Result<SampleField> {
        if let Some(v) = self.cache.borrow().get(&key1(a)) {
            return Ok(v.clone());
        }
        let v = (self.f)(a)?;
        self.cache.borrow_mut().insert(key1(a), v.clone());
        Ok(v)
    }
}

/// A memoized map `C × C → matrix fields`, entire in both arguments.
pub struct TwoCochain<'a> {
    f: Box<dyn Fn(C64, C64) -> Result<SampleField> + 'a>,
    cache: RefCell<HashMap<[u64; 4], SampleField>>,
}

impl<'a> TwoCochain<'a> {
    pub fn new<F: Fn(C64, C64) -> Result<SampleField> + 'a>(f: F) -> Self {
        TwoCochain {
            f: Box::new(f),
            cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn eval(&self, a: C64, b: C64) -> Result<SampleField> {
        if let Some(v) = self.cache.borrow().get(&key2(a, b)) {
            return Ok(v.clone());
        }
        let v = (self.f)(a, b)?;
        self.cache.borrow_mut().insert(key2(a, b), v.clone());
        Ok(v)
    }
}

/// `δ¹h (a, b) = a·h(b) − h(a + b) + h(a)`.
pub fn delta1<'a>(action: &'a ConjugationAction, h: &'a OneCochain<'a>) -> TwoCochain<'a> {
    TwoCochain::new(move |a, b| {
        let t1 = action.conjugate(a, &h.eval(b)?)?;
        let t2 = h.eval(a + b)?;
        let t3 = h.eval(a)?;
        Ok(t1.sub(&t2).add(&t3))
    })
}

/// `δ²f (a, b, c) = a·f(b, c) − f(a + b, c) + f(a, b + c) − f(a, b)`.
pub fn delta2(
    action: &ConjugationAction,
    f: &TwoCochain<'_>,
    a: C64,
    b: C64,
    c: C64,
) -> Result<SampleField> {
    let t1 = action.conjugate(a, &f.eval(b, c)?)?;
    let t2 = f.eval(a + b, c)?;
    let t3 = f.eval(a, b + c)?;
    let t4 = f.eval(a, b)?;
    Ok(t1.sub(&t2).add(&t3).sub(&t4))
}

/// Checks `δ²f = 0` at seeded random triples in the unit bidisk; errors with
/// the worst offender past `tol`.
pub fn verify_cocycle<R: Rng>(
    action: &ConjugationAction,
    f: &TwoCochain<'_>,
    samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<f64> {
    let mut max_violation = 0.0f64;
    let mut worst = (C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    for _ in 0..samples {
        let mut draw = || {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                / std::f64::consts::SQRT_2
        };
        let (a, b, c) = (draw(), draw(), draw());
        let v = delta2(action, f, a, b, c)?.norm_max();
        if v > max_violation {
            max_violation = v;
            worst = (a, b, c);
        }
    }
    if max_violation > tol {
        return Err(TorzetaError::CocycleViolation {
            max_violation,
            a: worst.0,
            b: worst.1,
            c: worst.2,
        });
    }
    Ok(max_violation)
}

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    /// Radius of the sampling circle for the Taylor fit of `g`.
    pub circle_radius: f64,
    /// Number of equispaced samples (and retained Taylor coefficients).
    pub poly_samples: usize,
    /// Radius of the Cauchy circle for `∂f/∂b` at `b = 0`.
    pub cauchy_radius: f64,
    /// Nodes on the Cauchy circle.
    pub cauchy_nodes: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            circle_radius: 6.0,
            poly_samples: 128,
            cauchy_radius: 0.01,
            cauchy_nodes: 16,
        }
    }
}

/// `Σ_k coeffs[k] a^k` with field coefficients.
pub struct FieldPolynomial {
    pub coeffs: Vec<SampleField>,
}

impl FieldPolynomial {
    pub fn eval(&self, a: C64) -> SampleField {
        let grid = self.coeffs[0].grid;
        let mut acc = SampleField::zeros(grid);
        // Horner, high degree first.
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(a).add(c);
        }
        acc
    }

    /// Antiderivative vanishing at 0.
    pub fn integral(&self) -> FieldPolynomial {
        let grid = self.coeffs[0].grid;
        let mut coeffs = vec![SampleField::zeros(grid)];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.scale(C64::new(1.0 / (k as f64 + 1.0), 0.0)));
        }
        FieldPolynomial { coeffs }
    }
}

/// First b-derivative of `f(t, ·)` at `b = 0` by a Cauchy circle.
pub fn cauchy_b_derivative(
    f: &TwoCochain<'_>,
    t: C64,
    radius: f64,
    nodes: usize,
) -> Result<SampleField> {
    let mut acc: Option<SampleField> = None;
    for q in 0..nodes {
        let th = TAU * q as f64 / nodes as f64;
        let w = C64::from_polar(1.0, th);
        let v = f.eval(t, radius * w)?.scale(w.conj() / (radius * nodes as f64));
        acc = Some(match acc {
            None => v,
            Some(mut a) => {
                a.add_assign(&v);
                a
            }
        });
    }
    Ok(acc.expect("nodes > 0"))
}

/// Taylor polynomial of an entire field-valued function from equispaced
/// samples on the circle `|t| = radius`.
fn taylor_fit<F: FnMut(C64) -> Result<SampleField>>(
    grid: CosphereGrid,
    radius: f64,
    samples: usize,
    mut g: F,
) -> Result<FieldPolynomial> {
    let vals: Vec<SampleField> = (0..samples)
        .map(|p| g(C64::from_polar(radius, TAU * p as f64 / samples as f64)))
        .collect::<Result<_>>()?;
    let mut coeffs = Vec::with_capacity(samples);
    for k in 0..samples {
        let mut acc = SampleField::zeros(grid);
        for (p, v) in vals.iter().enumerate() {
            let ph = C64::from_polar(1.0, -TAU * (k * p) as f64 / samples as f64);
            acc.add_assign(&v.scale(ph));
        }
        let scale = C64::new(1.0 / (samples as f64 * radius.powi(k as i32)), 0.0);
        coeffs.push(acc.scale(scale));
    }
    Ok(FieldPolynomial { coeffs })
}

/// The solved primitive: `h(a) = −G(a) + T(a) h'(0)`.
pub struct SolvedCochain {
    action: Rc<ConjugationAction>,
    g_integral: FieldPolynomial,
    hp0: SampleField,
}

impl SolvedCochain {
    pub fn eval(&self, a: C64) -> Result<SampleField> {
        let t = self.action.t_apply(a, &self.hp0)?;
        Ok(t.sub(&self.g_integral.eval(a)))
    }
}

/// Solves `δ¹h = f` with `h(0) = 0` and prescribed `h(1) = h1`. Assumes `f`
/// is an entire cocycle with `f(·, 0) = 0`; callers should gate on
/// [`verify_cocycle`] first.
pub fn solve(
    action: Rc<ConjugationAction>,
    f: &TwoCochain<'_>,
    h1: &SampleField,
    cfg: &SolverConfig,
) -> Result<SolvedCochain> {
    let grid = action.grid();
    let g = taylor_fit(grid, cfg.circle_radius, cfg.poly_samples, |t| {
        cauchy_b_derivative(f, t, cfg.cauchy_radius, cfg.cauchy_nodes)
    })?;
    let g_integral = g.integral();
    let one = C64::new(1.0, 0.0);
    let rhs = h1.add(&g_integral.eval(one));
    let hp0 = action.t_solve(&rhs)?;
    Ok(SolvedCochain {
        action,
        g_integral,
        hp0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn test_action(n: usize, seed: u64) -> (Rc<ConjugationAction>, CosphereGrid) {
        let grid = CosphereGrid::new(1, 2, 2, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Hermitian field shifted well into positive definiteness.
        let mut sigma = crate::grid::random_smooth_field(grid, 1, 0, true, &mut rng);
        let shift = SampleField::constant_identity(grid, c(4.0, 0.0));
        sigma = sigma.add(&shift);
        (
            Rc::new(ConjugationAction::from_field(&sigma, 0.5).unwrap()),
            grid,
        )
    }

    /// h(a) = a F1 + a³ F2: entire, h(0) = 0.
    fn test_cochain(grid: CosphereGrid, seed: u64) -> Rc<OneCochain<'static>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f1 = crate::grid::random_smooth_field(grid, 1, 0, false, &mut rng);
        let f2 = crate::grid::random_smooth_field(grid, 1, 0, false, &mut rng);
        Rc::new(OneCochain::new(move |a| {
            Ok(f1.scale(a).add(&f2.scale(a * a * a)))
        }))
    }

    #[test]
    fn coboundary_is_cocycle() {
        let (action, grid) = test_action(3, 1);
        let h = test_cochain(grid, 2);
        let f = delta1(&action, &h);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let worst = verify_cocycle(&action, &f, 25, 1e-10, &mut rng).unwrap();
        assert!(worst < 1e-10);
    }

    #[test]
    fn cocycle_vanishes_on_degenerate_arguments() {
        let (action, grid) = test_action(2, 5);
        let h = test_cochain(grid, 6);
        let f = delta1(&action, &h);
        let zero = c(0.0, 0.0);
        let b = c(0.3, -0.7);
        assert!(f.eval(zero, b).unwrap().norm_max() < 1e-13);
        assert!(f.eval(b, zero).unwrap().norm_max() < 1e-13);
    }

    #[test]
    fn non_cocycle_is_rejected() {
        let (action, grid) = test_action(1, 7);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let w = crate::grid::random_smooth_field(grid, 1, 0, false, &mut rng);
        // f(a, b) = a b² w is not a cocycle: δ²f(a,b,c) = 2abc·w for the
        // trivial scalar action.
        let f = TwoCochain::new(move |a, b| Ok(w.scale(a * b * b)));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        match verify_cocycle(&action, &f, 25, 1e-10, &mut rng) {
            Err(TorzetaError::CocycleViolation { max_violation, .. }) => {
                assert!(max_violation > 1e-3);
            }
            other => panic!("expected CocycleViolation, got {other:?}"),
        }
    }

    #[test]
    fn solve_recovers_coboundary() {
        let (action, grid) = test_action(3, 11);
        let h = test_cochain(grid, 12);
        let f = delta1(&action, &h);
        let h1 = h.eval(c(1.0, 0.0)).unwrap();
        let solved = solve(action.clone(), &f, &h1, &SolverConfig::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let a = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let got = solved.eval(a).unwrap();
            let want = h.eval(a).unwrap();
            let err = got.sub(&want).norm_max();
            assert!(err < 1e-8, "recovery error {err} at a = {a}");
        }
        // Endpoint and base point are matched exactly.
        assert!(solved.eval(c(0.0, 0.0)).unwrap().norm_max() < 1e-10);
        assert!(solved.eval(c(1.0, 0.0)).unwrap().sub(&h1).norm_max() < 1e-9);
    }

    #[test]
    fn solved_cochain_satisfies_coboundary_equation() {
        let (action, grid) = test_action(2, 15);
        let h = test_cochain(grid, 16);
        let f = delta1(&action, &h);
        let h1 = h.eval(c(1.0, 0.0)).unwrap();
        let solved = Rc::new(solve(action.clone(), &f, &h1, &SolverConfig::default()).unwrap());
        let solved_cochain = {
            let s = solved.clone();
            Rc::new(OneCochain::new(move |a| s.eval(a)))
        };
        let df = delta1(&action, &solved_cochain);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let a = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let b = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let err = df.eval(a, b).unwrap().sub(&f.eval(a, b).unwrap()).norm_max();
            assert!(err < 1e-8, "coboundary equation defect {err}");
        }
    }

    #[test]
    fn scalar_solver_matches_quadrature_oracle() {
        // n = 1: conjugation is trivial, so h(a) = a h'(0) − ∫_0^a g, and the
        // polynomial integral can be checked against dense Gauss-Legendre
        // quadrature of the Cauchy-differentiated g along [0, a].
        let grid = CosphereGrid::new(1, 2, 2, 1).unwrap();
        let sigma = SampleField::constant_identity(grid, c(2.0, 0.0));
        let action = Rc::new(ConjugationAction::from_field(&sigma, 0.5).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let w1 = crate::grid::random_smooth_field(grid, 1, 0, false, &mut rng);
        let w2 = crate::grid::random_smooth_field(grid, 1, 0, false, &mut rng);
        // Scalar coboundary of h(a) = a w1 + a² w2.
        let h = {
            let (w1, w2) = (w1.clone(), w2.clone());
            Rc::new(OneCochain::new(move |a| {
                Ok(w1.scale(a).add(&w2.scale(a * a)))
            }))
        };
        let f = Rc::new(delta1(&action, &h));
        let h1 = h.eval(c(1.0, 0.0)).unwrap();
        let solved = solve(action.clone(), &f, &h1, &SolverConfig::default()).unwrap();

        let a = c(0.8, 0.0);
        // Oracle: G(a) by 2048-node quadrature of g(t) = ∂f/∂b(t, 0).
        let mut acc = SampleField::zeros(grid);
        for (t, wq) in crate::fiber::composite_gl(0.0, a.re, 2048) {
            let g = cauchy_b_derivative(&f, c(t, 0.0), 0.01, 16).unwrap();
            acc.add_assign(&g.scale(c(wq, 0.0)));
        }
        let got = solved.eval(a).unwrap();
        let direct = action
            .t_apply(a, &action.t_solve(&h1.add(&{
                // G(1) by the same quadrature.
                let mut g1 = SampleField::zeros(grid);
                for (t, wq) in crate::fiber::composite_gl(0.0, 1.0, 2048) {
                    let g = cauchy_b_derivative(&f, c(t, 0.0), 0.01, 16).unwrap();
                    g1.add_assign(&g.scale(c(wq, 0.0)));
                }
                g1
            })).unwrap())
            .unwrap()
            .sub(&acc);
        assert!(got.sub(&direct).norm_max() < 1e-9);
    }

    #[test]
    fn cauchy_two_radii_agree() {
        let (action, grid) = test_action(2, 21);
        let h = test_cochain(grid, 22);
        let f = delta1(&action, &h);
        let t = c(0.4, -0.9);
        let d1 = cauchy_b_derivative(&f, t, 0.01, 16).unwrap();
        let d2 = cauchy_b_derivative(&f, t, 0.02, 16).unwrap();
        assert!(d1.sub(&d2).norm_max() < 1e-10);
    }

    #[test]
    fn solver_is_deterministic() {
        let (action, grid) = test_action(2, 23);
        let h = test_cochain(grid, 24);
        let h1 = h.eval(c(1.0, 0.0)).unwrap();
        let mk = || {
            let f = delta1(&action, &h);
            solve(action.clone(), &f, &h1, &SolverConfig::default()).unwrap()
        };
        let s1 = mk();
        let s2 = mk();
        let a = c(0.37, 0.58);
        let v1 = s1.eval(a).unwrap();
        let v2 = s2.eval(a).unwrap();
        assert_eq!(v1.data, v2.data);
    }
}
