//! Classical matrix-valued symbols on `T^m × (R^m ∖ {0})` and their
//! calculus: homogeneous extension, Leibniz composition under toroidal
//! quantization, parametrix, formal adjoint, Poisson bracket, and
//! restriction to the cosphere bundle.
//!
//! A symbol of order `s` is stored through the cosphere restrictions of its
//! homogeneous terms of degrees `s, s-1, …, s-K`. ξ-derivatives are taken in
//! polar form: the radial part is exact from the Euler identity, the angular
//! part is spectral on the θ-grid (m = 2) or carries the sign rule on the
//! two sheets (m = 1).


use crate::error::{Result, TorzetaError};
use crate::fiber::{C64, FiberMatrix};
use crate::grid::{CosphereGrid, CosphereMeasure, SampleField, trig_interp};

/// One ξ-homogeneous matrix-valued term, stored by cosphere samples.
#[derive(Debug, Clone)]
pub struct HomogeneousTerm {
    pub degree: C64,
    pub field: SampleField,
}

impl HomogeneousTerm {
    pub fn new(degree: C64, field: SampleField) -> Self {
        HomogeneousTerm { degree, field }
    }

    /// `|ξ|^d` times the trigonometrically interpolated sample at
    /// `(x, ξ/|ξ|)`.
    pub fn evaluate(&self, x: &[f64], xi: &[f64]) -> Result<FiberMatrix> {
        let grid = &self.field.grid;
        let n = grid.fiber_dim;
        let r2: f64 = xi.iter().map(|v| v * v).sum();
        if r2 == 0.0 {
            return Err(TorzetaError::ZeroCovector);
        }
        let r = r2.sqrt();
        let radial = (self.degree * r.ln()).exp();
        let mut out = FiberMatrix::zeros(n, n);
        let side = grid.x_side();
        if grid.dim == 1 {
            let sheet = if xi[0] > 0.0 { 0 } else { 1 };
            for i in 0..n {
                for j in 0..n {
                    let line: Vec<C64> =
                        (0..side).map(|q| self.field.entry(q, sheet, i, j)).collect();
                    out[(i, j)] = radial * trig_interp(&line, x[0].rem_euclid(crate::grid::TAU));
                }
            }
        } else {
            let theta = xi[1].atan2(xi[0]).rem_euclid(crate::grid::TAU);
            let na = grid.angular_nodes;
            for i in 0..n {
                for j in 0..n {
                    // θ first, then the two x-coordinates.
                    let mut at_x = vec![C64::new(0.0, 0.0); side * side];
                    let mut line = vec![C64::new(0.0, 0.0); na];
                    for (ix, v) in at_x.iter_mut().enumerate() {
                        for (ia, l) in line.iter_mut().enumerate() {
                            *l = self.field.entry(ix, ia, i, j);
                        }
                        *v = trig_interp(&line, theta);
                    }
                    let mut rows = vec![C64::new(0.0, 0.0); side];
                    let x2 = x[1].rem_euclid(crate::grid::TAU);
                    for (i1, row) in rows.iter_mut().enumerate() {
                        let seg: Vec<C64> =
                            (0..side).map(|q| at_x[i1 * side + q]).collect();
                        *row = trig_interp(&seg, x2);
                    }
                    out[(i, j)] = radial * trig_interp(&rows, x[0].rem_euclid(crate::grid::TAU));
                }
            }
        }
        Ok(out)
    }
}

/// ξ-derivative of a degree-`d` cosphere field along coordinate `axis`;
/// the result samples the degree `d-1` term.
pub fn xi_derivative(field: &SampleField, degree: C64, axis: usize) -> SampleField {
    let grid = field.grid;
    if grid.dim == 1 {
        // ∂_ξ f = d · sign(ξ) · f / |ξ| on each sheet.
        let mut out = field.scale(degree);
        let n = grid.fiber_dim;
        let nn = n * n;
        for ix in 0..grid.x_points() {
            let b = (ix * grid.angular_nodes + 1) * nn;
            for e in 0..nn {
                out.data[b + e] = -out.data[b + e];
            }
        }
        out
    } else {
        let ftheta = field.theta_derivative();
        let n = grid.fiber_dim;
        let nn = n * n;
        let mut out = SampleField::zeros(grid);
        for ix in 0..grid.x_points() {
            for ia in 0..grid.angular_nodes {
                let th = grid.theta(ia);
                let (c, s) = (th.cos(), th.sin());
                let (rad, ang) = if axis == 0 { (c, -s) } else { (s, c) };
                let b = (ix * grid.angular_nodes + ia) * nn;
                for e in 0..nn {
                    out.data[b + e] = degree * rad * field.data[b + e] + ang * ftheta.data[b + e];
                }
            }
        }
        out
    }
}

/// A classical symbol: order `s` plus the cosphere data of its homogeneous
/// terms of degrees `s - j`, `j = 0..=K`.
#[derive(Debug, Clone)]
pub struct ClassicalSymbol {
    pub order: C64,
    /// `terms[j]` samples the degree `order - j` term.
    pub terms: Vec<SampleField>,
}

impl ClassicalSymbol {
    pub fn new(order: C64, terms: Vec<SampleField>) -> Self {
        assert!(!terms.is_empty());
        ClassicalSymbol { order, terms }
    }

    pub fn grid(&self) -> CosphereGrid {
        self.terms[0].grid
    }

    pub fn truncation(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn term_degree(&self, j: usize) -> C64 {
        self.order - j as f64
    }

    /// Symbol with a single homogeneous term of degree `order`, zero-padded
    /// to truncation `k`.
    pub fn single_term(order: C64, field: SampleField, k: usize) -> Self {
        let grid = field.grid;
        let mut terms = vec![field];
        for _ in 0..k {
            terms.push(SampleField::zeros(grid));
        }
        ClassicalSymbol { order, terms }
    }

    pub fn identity(grid: CosphereGrid, k: usize) -> Self {
        Self::single_term(
            C64::new(0.0, 0.0),
            SampleField::constant_identity(grid, C64::new(1.0, 0.0)),
            k,
        )
    }

    pub fn leading(&self) -> &SampleField {
        &self.terms[0]
    }

    pub fn add(&self, other: &ClassicalSymbol) -> Result<ClassicalSymbol> {
        // Orders must agree for degree bookkeeping to line up.
        if (self.order - other.order).norm() > 1e-12 {
            return Err(TorzetaError::GridMismatch(format!(
                "cannot add symbols of orders {} and {}",
                self.order, other.order
            )));
        }
        let k = self.truncation().min(other.truncation());
        let terms = (0..=k)
            .map(|j| self.terms[j].add(&other.terms[j]))
            .collect();
        Ok(ClassicalSymbol::new(self.order, terms))
    }

    pub fn sub(&self, other: &ClassicalSymbol) -> Result<ClassicalSymbol> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: C64) -> ClassicalSymbol {
        ClassicalSymbol {
            order: self.order,
            terms: self.terms.iter().map(|t| t.scale(c)).collect(),
        }
    }

    /// Max norm per retained degree.
    pub fn term_norms(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.norm_max()).collect()
    }

    /// True when no term depends on x (checked by exact sample equality).
    pub fn is_multiplier(&self) -> bool {
        let grid = self.grid();
        let n = grid.fiber_dim;
        let nn = n * n;
        let na = grid.angular_nodes;
        self.terms.iter().all(|t| {
            (0..na).all(|ia| {
                (0..nn).all(|e| {
                    let first = t.data[ia * nn + e];
                    (1..grid.x_points()).all(|ix| t.data[(ix * na + ia) * nn + e] == first)
                })
            })
        })
    }
}

/// Multi-indices α over m coordinates with |α| = r.
fn multi_indices(dim: usize, r: usize) -> Vec<[usize; 2]> {
    if dim == 1 {
        vec![[r, 0]]
    } else {
        (0..=r).map(|a1| [a1, r - a1]).collect()
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product::<f64>().max(1.0)
}

/// Table of ξ-derivatives `∂_ξ^α t` for all |α| ≤ depth, keyed by α.
struct XiDerivTable {
    /// entries[r] lists (α, field) with |α| = r.
    entries: Vec<Vec<([usize; 2], SampleField)>>,
}

impl XiDerivTable {
    fn build(field: &SampleField, degree: C64, depth: usize) -> Self {
        let dim = field.grid.dim;
        let mut entries: Vec<Vec<([usize; 2], SampleField)>> =
            vec![vec![([0, 0], field.clone())]];
        for r in 1..=depth {
            let mut level = Vec::new();
            for alpha in multi_indices(dim, r) {
                // Derive from the predecessor along the first nonzero slot.
                let (axis, prev) = if alpha[0] > 0 {
                    (0, [alpha[0] - 1, alpha[1]])
                } else {
                    (1, [alpha[0], alpha[1] - 1])
                };
                let parent = entries[r - 1]
                    .iter()
                    .find(|(a, _)| *a == prev)
                    .expect("predecessor present");
                let d = degree - (r as f64 - 1.0);
                level.push((alpha, xi_derivative(&parent.1, d, axis)));
            }
            entries.push(level);
        }
        XiDerivTable { entries }
    }
}

/// Table of x-derivatives `D_x^α t = (-i)^{|α|} ∂_x^α t` for |α| ≤ depth.
struct XDerivTable {
    entries: Vec<Vec<([usize; 2], SampleField)>>,
}

impl XDerivTable {
    fn build(field: &SampleField, depth: usize) -> Self {
        let dim = field.grid.dim;
        let mut entries: Vec<Vec<([usize; 2], SampleField)>> =
            vec![vec![([0, 0], field.clone())]];
        let mi = C64::new(0.0, -1.0);
        for r in 1..=depth {
            let mut level = Vec::new();
            for alpha in multi_indices(dim, r) {
                let (axis, prev) = if alpha[0] > 0 {
                    (0, [alpha[0] - 1, alpha[1]])
                } else {
                    (1, [alpha[0], alpha[1] - 1])
                };
                let parent = entries[r - 1]
                    .iter()
                    .find(|(a, _)| *a == prev)
                    .expect("predecessor present");
                let d = parent.1.x_derivative(axis);
                level.push((alpha, if d.is_zero() { d } else { d.scale(mi) }));
            }
            entries.push(level);
        }
        XDerivTable { entries }
    }

    fn get(&self, alpha: [usize; 2]) -> &SampleField {
        let r = alpha[0] + alpha[1];
        &self.entries[r]
            .iter()
            .find(|(a, _)| *a == alpha)
            .expect("derivative present")
            .1
    }
}

/// Leibniz composition `Σ_{|α| ≤ K} (1/α!) ∂_ξ^α a · D_x^α b`, collected by
/// homogeneous degree. x-independent factors contribute no derivative
/// corrections (exactly, through the constant-line fast path).
pub fn compose(a: &ClassicalSymbol, b: &ClassicalSymbol, k: usize) -> Result<ClassicalSymbol> {
    a.terms[0].check_grid(&b.terms[0])?;
    let avail = a.truncation().min(b.truncation());
    if k > avail {
        return Err(TorzetaError::TruncationExceeded {
            requested: k,
            available: avail,
        });
    }
    let grid = a.grid();
    let order = a.order + b.order;
    let mut out: Vec<SampleField> = (0..=k).map(|_| SampleField::zeros(grid)).collect();

    let a_tables: Vec<XiDerivTable> = (0..=k)
        .map(|j| XiDerivTable::build(&a.terms[j], a.term_degree(j), k - j))
        .collect();
    let b_tables: Vec<XDerivTable> = (0..=k)
        .map(|l| XDerivTable::build(&b.terms[l], k - l))
        .collect();

    for j in 0..=k {
        for l in 0..=(k - j) {
            for r in 0..=(k - j - l) {
                let q = j + l + r;
                for (alpha, da) in &a_tables[j].entries[r] {
                    if da.is_zero() {
                        continue;
                    }
                    let db = b_tables[l].get(*alpha);
                    if db.is_zero() {
                        continue;
                    }
                    let coef = 1.0 / (factorial(alpha[0]) * factorial(alpha[1]));
                    let prod = da.matmul(db);
                    out[q].add_assign(&prod.scale(C64::new(coef, 0.0)));
                }
            }
        }
    }
    Ok(ClassicalSymbol::new(order, out))
}

/// Pointwise inverse of a matrix field; fails with the worst grid point when
/// the smallest singular value drops below `min_sv`.
fn pointwise_inverse(field: &SampleField, min_sv: f64) -> Result<SampleField> {
    let grid = field.grid;
    let n = grid.fiber_dim;
    let mut out = SampleField::zeros(grid);
    let mut worst = (f64::INFINITY, 0usize, 0usize);
    for ix in 0..grid.x_points() {
        for ia in 0..grid.angular_nodes {
            let m = field.mat_at(ix, ia);
            let sv = m.clone().singular_values();
            let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
            if smin < worst.0 {
                worst = (smin, ix, ia);
            }
            if smin < min_sv {
                continue;
            }
            let inv = m
                .lu()
                .solve(&FiberMatrix::identity(n, n))
                .expect("invertible by singular value check");
            out.set_mat(ix, ia, &inv);
        }
    }
    if worst.0 < min_sv {
        return Err(TorzetaError::NonInvertibleLeadingTerm {
            min_sv: worst.0,
            x: worst.1,
            ang: worst.2,
        });
    }
    Ok(out)
}

/// Symbol-level approximate inverse: `compose(a, parametrix(a), K) = Id`
/// exactly in every retained degree (up to roundoff).
pub fn parametrix(a: &ClassicalSymbol, k: usize) -> Result<ClassicalSymbol> {
    if k > a.truncation() {
        return Err(TorzetaError::TruncationExceeded {
            requested: k,
            available: a.truncation(),
        });
    }
    let inv0 = pointwise_inverse(&a.terms[0], 1e-8)?;
    let mut b = ClassicalSymbol::single_term(-a.order, inv0.clone(), k);
    for q in 1..=k {
        let defect = compose(a, &b, k)?;
        // compose(a, b) should be Id; fix the degree -q term.
        let corr = inv0
            .matmul(&defect.terms[q])
            .scale(C64::new(-1.0, 0.0));
        b.terms[q] = corr;
    }
    Ok(b)
}

/// Formal adjoint with respect to the L² pairing under toroidal
/// quantization: `Σ_α (1/α!) ∂_ξ^α D_x^α (a*)`, order `conj(s)`.
pub fn adjoint(a: &ClassicalSymbol, k: usize) -> Result<ClassicalSymbol> {
    if k > a.truncation() {
        return Err(TorzetaError::TruncationExceeded {
            requested: k,
            available: a.truncation(),
        });
    }
    let grid = a.grid();
    let order = a.order.conj();
    let mut out: Vec<SampleField> = (0..=k).map(|_| SampleField::zeros(grid)).collect();
    for j in 0..=k {
        let star = a.terms[j].adjoint_pointwise();
        if star.is_zero() {
            continue;
        }
        let degree = order - j as f64;
        let xtab = XDerivTable::build(&star, k - j);
        for r in 0..=(k - j) {
            for alpha in multi_indices(grid.dim, r) {
                let dx = xtab.get(alpha);
                if dx.is_zero() {
                    continue;
                }
                // Apply ∂_ξ^α after D_x^α (the operators commute).
                let mut cur = dx.clone();
                let mut d = degree;
                for _ in 0..alpha[0] {
                    cur = xi_derivative(&cur, d, 0);
                    d -= 1.0;
                }
                for _ in 0..alpha[1] {
                    cur = xi_derivative(&cur, d, 1);
                    d -= 1.0;
                }
                let coef = 1.0 / (factorial(alpha[0]) * factorial(alpha[1]));
                out[j + r].add_assign(&cur.scale(C64::new(coef, 0.0)));
            }
        }
    }
    Ok(ClassicalSymbol::new(order, out))
}

/// Pointwise product of a scalar (n = 1) field with a matrix field.
fn scalar_mul(scalar: &SampleField, mat: &SampleField) -> SampleField {
    let grid = mat.grid;
    let n = grid.fiber_dim;
    let nn = n * n;
    let mut out = mat.clone();
    for p in 0..grid.points() {
        let s = scalar.data[p];
        for e in 0..nn {
            out.data[p * nn + e] *= s;
        }
    }
    out
}

/// Canonical Poisson bracket `{g, h} = Σ_j ∂_{ξ_j} g ∂_{x_j} h − ∂_{x_j} g ∂_{ξ_j} h`
/// of a scalar term with a matrix term; degrees add and drop by one.
pub fn poisson_bracket(g: &HomogeneousTerm, h: &HomogeneousTerm) -> Result<HomogeneousTerm> {
    let gg = g.field.grid;
    let hg = h.field.grid;
    if gg.fiber_dim != 1 {
        return Err(TorzetaError::NotScalar(gg.fiber_dim));
    }
    if gg.dim != hg.dim || gg.x_modes != hg.x_modes || gg.angular_nodes != hg.angular_nodes {
        return Err(TorzetaError::GridMismatch(format!("{gg:?} vs {hg:?}")));
    }
    let mut out = SampleField::zeros(hg);
    for axis in 0..gg.dim {
        let dxi_g = xi_derivative(&g.field, g.degree, axis);
        let dx_h = h.field.x_derivative(axis);
        out.add_assign(&scalar_mul(&dxi_g, &dx_h));
        let dx_g = g.field.x_derivative(axis);
        let dxi_h = xi_derivative(&h.field, h.degree, axis);
        out.add_assign(&scalar_mul(&dx_g, &dxi_h).scale(C64::new(-1.0, 0.0)));
    }
    Ok(HomogeneousTerm::new(g.degree + h.degree - 1.0, out))
}

/// Restriction to the cosphere bundle (the stored samples).
pub fn restrict_to_cosphere(t: &HomogeneousTerm) -> SampleField {
    t.field.clone()
}

/// Homogeneous extension of a cosphere section to degree `d`.
pub fn extend_homogeneous(section: SampleField, d: C64) -> HomogeneousTerm {
    HomogeneousTerm::new(d, section)
}

/// Integral of a cosphere section against the induced measure.
pub fn cosphere_integral(section: &SampleField) -> FiberMatrix {
    let measure = CosphereMeasure::for_grid(&section.grid);
    section.integrate(&measure)
}
