//! The holomorphic family `A_(s)` of complex-power symbols, built by
//! induction over symbol levels.
//!
//! Level 1 is the bare power of the principal symbol: the single-term symbol
//! `σ^s |ξ|^s`. At level k the group-law defect
//! `F_(s,t) = A_(s) A_(t) A_(s+t)^{-1} − Id` has order `−k`; its conjugated
//! principal symbol `f(a, b) = σ^{-(a+b)} σ_pr(F_(b,a)) σ^{a+b}` is a
//! 2-cocycle for the conjugation action, and the coboundary solution `h`
//! with `h(1) = σ_pr(A^{-1} A_(1) − Id)` yields the corrected family
//! `Ã_(s) = A_(s) ∘ (Id − H_(s))`, where `H_(s)` has the single homogeneous
//! term `h(s)` of degree `−k`. Each refinement pushes the defect one degree
//! lower, so after `K` steps the group law and `A_(1) = A` hold in every
//! retained degree.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use rand::Rng;

use crate::cohomology::{
    self, ConjugationAction, SolvedCochain, SolverConfig, TwoCochain, verify_cocycle,
};
use crate::error::{Result, TorzetaError};
use crate::fiber::C64;
use crate::grid::CosphereGrid;
use crate::symbol::{ClassicalSymbol, adjoint, compose, parametrix};

fn skey(s: C64) -> [u64; 2] {
    [s.re.to_bits(), s.im.to_bits()]
}

pub struct HolomorphicSymbolFamily {
    a: ClassicalSymbol,
    k: usize,
    level: usize,
    action: Rc<ConjugationAction>,
    corrections: Vec<Rc<SolvedCochain>>,
    cache: RefCell<HashMap<[u64; 2], Rc<ClassicalSymbol>>>,
    solver: SolverConfig,
    /// Random (s, t, r) triples checked before each coboundary solve.
    pub verify_samples: usize,
    pub verify_tol: f64,
}

impl HolomorphicSymbolFamily {
    /// Level-1 family for a first-order symbol with Hermitian positive
    /// definite leading term.
    pub fn initial(
        a: ClassicalSymbol,
        k: usize,
        spectral_floor: f64,
        solver: SolverConfig,
    ) -> Result<Self> {
        if (a.order - C64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(TorzetaError::SpecValidation(format!(
                "complex-power family requires a first-order symbol, got order {}",
                a.order
            )));
        }
        if k > a.truncation() {
            return Err(TorzetaError::TruncationExceeded {
                requested: k,
                available: a.truncation(),
            });
        }
        let action = Rc::new(ConjugationAction::from_field(a.leading(), spectral_floor)?);
        Ok(HolomorphicSymbolFamily {
            a,
            k,
            level: 1,
            action,
            corrections: Vec::new(),
            cache: RefCell::new(HashMap::new()),
            solver,
            verify_samples: 25,
            verify_tol: 1e-6,
        })
    }

    pub fn grid(&self) -> CosphereGrid {
        self.a.grid()
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn truncation(&self) -> usize {
        self.k
    }

    pub fn operator(&self) -> &ClassicalSymbol {
        &self.a
    }

    pub fn action(&self) -> Rc<ConjugationAction> {
        self.action.clone()
    }

    /// `A_(s)` at the current level.
    pub fn evaluate(&self, s: C64) -> Result<Rc<ClassicalSymbol>> {
        if let Some(v) = self.cache.borrow().get(&skey(s)) {
            return Ok(v.clone());
        }
        let mut cur = ClassicalSymbol::single_term(s, self.action.power_field(s), self.k);
        for (j, h) in self.corrections.iter().enumerate() {
            let kj = j + 1;
            let mut factor = ClassicalSymbol::identity(self.grid(), self.k);
            factor.terms[kj] = h.eval(s)?.scale(C64::new(-1.0, 0.0));
            cur = compose(&cur, &factor, self.k)?;
        }
        let rc = Rc::new(cur);
        self.cache.borrow_mut().insert(skey(s), rc.clone());
        Ok(rc)
    }

    /// `½ (A_(s) + A_(s̄)*)`: symmetrized evaluation, exactly self-adjoint
    /// under `s ↦ s̄` for formally self-adjoint operators.
    pub fn evaluate_symmetric(&self, s: C64) -> Result<ClassicalSymbol> {
        let direct = self.evaluate(s)?;
        let conj_ev = self.evaluate(s.conj())?;
        let star = adjoint(&conj_ev, self.k)?;
        Ok(direct.add(&star)?.scale(C64::new(0.5, 0.0)))
    }

    /// Group-law defect `F_(s,t) = A_(s) A_(t) A_(s+t)^{-1} − Id`.
    pub fn defect(&self, s: C64, t: C64) -> Result<ClassicalSymbol> {
        let (es, et, est) = (
            self.evaluate(s)?,
            self.evaluate(t)?,
            self.evaluate(s + t)?,
        );
        let prod = compose(&es, &et, self.k)?;
        let inv = parametrix(&est, self.k)?;
        let full = compose(&prod, &inv, self.k)?;
        full.sub(&ClassicalSymbol::identity(self.grid(), self.k))
    }

    /// `A^{-1} A_(1) − Id`.
    pub fn identity_defect(&self) -> Result<ClassicalSymbol> {
        let inv = parametrix(&self.a, self.k)?;
        let e1 = self.evaluate(C64::new(1.0, 0.0))?;
        let full = compose(&inv, &e1, self.k)?;
        full.sub(&ClassicalSymbol::identity(self.grid(), self.k))
    }

    /// One induction step: verifies the cocycle identity at seeded random
    /// triples, solves the coboundary equation, and appends the degree
    /// `−level` correction. Returns the observed cocycle violation.
    pub fn refine<R: Rng>(&mut self, rng: &mut R) -> Result<f64> {
        let k = self.level;
        if k > self.k {
            return Err(TorzetaError::TruncationExceeded {
                requested: k,
                available: self.k,
            });
        }
        let (violation, solved) = {
            let f = TwoCochain::new(|a: C64, b: C64| {
                let d = self.defect(b, a)?;
                self.action.conjugate(a + b, &d.terms[k])
            });
            let violation =
                verify_cocycle(&self.action, &f, self.verify_samples, self.verify_tol, rng)?;
            let h1 = self.identity_defect()?.terms[k].clone();
            let solved = cohomology::solve(self.action.clone(), &f, &h1, &self.solver)?;
            (violation, solved)
        };
        self.corrections.push(Rc::new(solved));
        self.level += 1;
        self.cache.borrow_mut().clear();
        Ok(violation)
    }

    /// Per-degree max norms of the group-law defect at sampled arguments,
    /// plus the identity defect; degrees below the current level should be
    /// at roundoff.
    pub fn defect_report<R: Rng>(&self, samples: usize, rng: &mut R) -> Result<DefectReport> {
        let mut report = DefectReport {
            level: self.level,
            group_law: Vec::with_capacity(samples),
            identity_norms: self.identity_defect()?.term_norms(),
            max_resolved: 0.0,
        };
        for _ in 0..samples {
            let s = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let t = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let norms = self.defect(s, t)?.term_norms();
            for &v in norms.iter().take(self.level.min(self.k + 1)) {
                report.max_resolved = report.max_resolved.max(v);
            }
            report.group_law.push((s, t, norms));
        }
        for &v in report.identity_norms.iter().take(self.level.min(self.k + 1)) {
            report.max_resolved = report.max_resolved.max(v);
        }
        Ok(report)
    }
}

#[derive(Debug)]
pub struct DefectReport {
    pub level: usize,
    /// `(s, t, per-degree max norms of F_(s,t))`.
    pub group_law: Vec<(C64, C64, Vec<f64>)>,
    pub identity_norms: Vec<f64>,
    /// Largest defect among degrees the induction has already resolved.
    pub max_resolved: f64,
}

/// Runs the full induction: `k` refinement steps, so the group law and
/// `A_(1) = A` hold in every retained degree.
pub fn build_family<R: Rng>(
    a: ClassicalSymbol,
    k: usize,
    spectral_floor: f64,
    solver: SolverConfig,
    rng: &mut R,
) -> Result<HolomorphicSymbolFamily> {
    let mut fam = HolomorphicSymbolFamily::initial(a, k, spectral_floor, solver)?;
    for _ in 0..k {
        fam.refine(rng)?;
    }
    Ok(fam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiber::FiberMatrix;
    use crate::grid::SampleField;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// a(x, ξ) = (|ξ| + 0.3 cos x) · Id_n on T^1.
    fn cos_perturbed(n: usize, x_modes: usize, k: usize) -> ClassicalSymbol {
        let grid = CosphereGrid::new(1, x_modes, 2, n).unwrap();
        let lead = SampleField::constant_identity(grid, c(1.0, 0.0));
        let mut terms = vec![lead];
        terms.push(SampleField::from_fn(grid, |ix, _| {
            let x = grid.x_coord(ix);
            FiberMatrix::identity(n, n) * c(0.3 * x[0].cos(), 0.0)
        }));
        for _ in 1..k {
            terms.push(SampleField::zeros(grid));
        }
        ClassicalSymbol::new(c(1.0, 0.0), terms)
    }

    fn multiplier_family(k: usize) -> HolomorphicSymbolFamily {
        let grid = CosphereGrid::new(1, 2, 2, 3).unwrap();
        let diag = SampleField::from_fn(grid, |_, _| {
            FiberMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                c(1.0, 0.0),
                c(2.0, 0.0),
                c(3.0, 0.0),
            ]))
        });
        let a = ClassicalSymbol::single_term(c(1.0, 0.0), diag, k);
        HolomorphicSymbolFamily::initial(a, k, 0.5, SolverConfig::default()).unwrap()
    }

    #[test]
    fn rejects_wrong_order() {
        let grid = CosphereGrid::new(1, 2, 2, 1).unwrap();
        let a = ClassicalSymbol::single_term(
            c(2.0, 0.0),
            SampleField::constant_identity(grid, c(1.0, 0.0)),
            2,
        );
        assert!(HolomorphicSymbolFamily::initial(a, 2, 0.5, SolverConfig::default()).is_err());
    }

    #[test]
    fn multiplier_family_is_exact_after_refinement() {
        let mut fam = multiplier_family(4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..4 {
            let violation = fam.refine(&mut rng).unwrap();
            assert!(violation < 1e-12);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let s = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let ev = fam.evaluate(s).unwrap();
            // Leading term is the entrywise power of the diagonal multiplier.
            for (i, lam) in [1.0f64, 2.0, 3.0].iter().enumerate() {
                let want = (s * lam.ln()).exp();
                let got = ev.terms[0].entry(0, 0, i, i);
                assert!((got - want).norm() < 1e-12);
            }
            for j in 1..=4 {
                assert!(
                    ev.terms[j].norm_max() < 1e-12,
                    "multiplier family leaked a lower-degree term at index {j}"
                );
            }
        }
    }

    #[test]
    fn identity_at_zero_and_operator_at_one() {
        let a = cos_perturbed(1, 4, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let fam = build_family(a.clone(), 3, 0.5, SolverConfig::default(), &mut rng).unwrap();
        let at0 = fam.evaluate(c(0.0, 0.0)).unwrap();
        let id = ClassicalSymbol::identity(a.grid(), 3);
        for j in 0..=3 {
            assert!(at0.terms[j].sub(&id.terms[j]).norm_max() < 1e-13);
        }
        let at1 = fam.evaluate(c(1.0, 0.0)).unwrap();
        for j in 0..=3 {
            let err = at1.terms[j].sub(&a.terms[j]).norm_max();
            assert!(err < 1e-9, "A_(1) defect {err} at degree index {j}");
        }
    }

    #[test]
    fn group_law_defect_shrinks_by_level() {
        let a = cos_perturbed(1, 4, 3);
        let mut fam =
            HolomorphicSymbolFamily::initial(a, 3, 0.5, SolverConfig::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for target_level in 2..=4usize {
            fam.refine(&mut rng).unwrap();
            assert_eq!(fam.level(), target_level);
            let report = fam.defect_report(5, &mut rng).unwrap();
            assert!(
                report.max_resolved < 1e-8,
                "defect {} not resolved at level {target_level}",
                report.max_resolved
            );
        }
    }

    #[test]
    fn family_at_minus_one_matches_parametrix() {
        let a = cos_perturbed(1, 4, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let fam = build_family(a.clone(), 3, 0.5, SolverConfig::default(), &mut rng).unwrap();
        let inv = parametrix(&a, 3).unwrap();
        let got = fam.evaluate(c(-1.0, 0.0)).unwrap();
        // Agreement holds through the second-to-last retained degree.
        for j in 0..3 {
            let err = got.terms[j].sub(&inv.terms[j]).norm_max();
            assert!(err < 1e-8, "A_(-1) vs parametrix defect {err} at index {j}");
        }
    }

    #[test]
    fn family_at_two_matches_square() {
        let a = cos_perturbed(1, 4, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let fam = build_family(a.clone(), 3, 0.5, SolverConfig::default(), &mut rng).unwrap();
        let sq = compose(&a, &a, 3).unwrap();
        let got = fam.evaluate(c(2.0, 0.0)).unwrap();
        for j in 0..=3 {
            let err = got.terms[j].sub(&sq.terms[j]).norm_max();
            assert!(err < 1e-8, "A_(2) vs A∘A defect {err} at index {j}");
        }
    }

    #[test]
    fn family_is_holomorphic() {
        // Cauchy derivative estimates at two radii agree entrywise.
        let a = cos_perturbed(1, 3, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let fam = build_family(a, 2, 0.5, SolverConfig::default(), &mut rng).unwrap();
        let s0 = c(0.4, -0.3);
        let deriv = |radius: f64| -> Vec<SampleField> {
            let nodes = 16;
            let mut acc: Vec<SampleField> = (0..=2)
                .map(|_| SampleField::zeros(fam.grid()))
                .collect();
            for q in 0..nodes {
                let th = crate::grid::TAU * q as f64 / nodes as f64;
                let w = C64::from_polar(1.0, th);
                let ev = fam.evaluate(s0 + radius * w).unwrap();
                for (j, a) in acc.iter_mut().enumerate() {
                    a.add_assign(&ev.terms[j].scale(w.conj() / (radius * nodes as f64)));
                }
            }
            acc
        };
        let d1 = deriv(0.05);
        let d2 = deriv(0.1);
        for j in 0..=2 {
            let err = d1[j].sub(&d2[j]).norm_max();
            assert!(err < 1e-8, "holomorphy defect {err} at index {j}");
        }
    }

    #[test]
    fn symmetrized_evaluation_is_self_adjoint() {
        let a = cos_perturbed(2, 3, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let fam = build_family(a, 2, 0.5, SolverConfig::default(), &mut rng).unwrap();
        let s = c(-0.7, 0.0);
        let sym = fam.evaluate_symmetric(s).unwrap();
        let star = adjoint(&sym, 2).unwrap();
        for j in 0..=2 {
            let err = star.terms[j].sub(&sym.terms[j]).norm_max();
            assert!(err < 1e-12, "symmetrized family not self-adjoint: {err}");
        }
        // Symmetrization is a correction below the leading term.
        let plain = fam.evaluate(s).unwrap();
        assert!(sym.terms[0].sub(&plain.terms[0]).norm_max() < 1e-10);
    }

    #[test]
    fn build_is_deterministic() {
        let a = cos_perturbed(1, 3, 2);
        let mk = || {
            let mut rng = ChaCha8Rng::seed_from_u64(17);
            let fam = build_family(a.clone(), 2, 0.5, SolverConfig::default(), &mut rng).unwrap();
            fam.evaluate(c(0.3, 0.7)).unwrap()
        };
        let e1 = mk();
        let e2 = mk();
        for j in 0..=2 {
            assert_eq!(e1.terms[j].data, e2.terms[j].data);
        }
    }
}
