//! Command dispatch, result persistence, and runnable verification suites.
//!
//! One command = one computation. All randomness is seeded, all reductions
//! are fixed-order, and result files are written atomically (write to a
//! sibling temp file, then rename), so identical inputs produce byte-identical
//! outputs.

use std::path::{Path, PathBuf};
use std::rc::Rc;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cohomology::{self, ConjugationAction, OneCochain, SolverConfig, delta1};
use crate::error::{Result, TorzetaError};
use crate::fiber::C64;
use crate::grid::{CosphereGrid, SampleField, random_smooth_field};
use crate::opspec::{MatrixData, OperatorSpec, RunConfig, matrix_data};
use crate::powers::{HolomorphicSymbolFamily, build_family};
use crate::quantize::{QuantizedSymbol, commutator_trace_check, galerkin_zeta};
use crate::symbol::{HomogeneousTerm, compose, poisson_bracket};
use crate::zeta::{LatticeSumConfig, meromorphic_extend, nc_residue, residue_at_first_pole};

#[derive(Parser, Debug)]
#[command(name = "torzeta", version, about = "Complex powers, zeta functions and residues of elliptic operators on flat tori")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the complex-power family of a spec and dump symbols at exponents.
    Power {
        #[arg(long)]
        spec: PathBuf,
        /// Exponent "re" or "re,im"; repeatable.
        #[arg(long = "s", required = true, allow_hyphen_values = true)]
        exponents: Vec<String>,
        /// Induction depth (default: the spec truncation).
        #[arg(long = "K")]
        depth: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate the zeta (trace) function and pole residues of a spec.
    Zeta {
        #[arg(long)]
        spec: PathBuf,
        /// Regular point "re" or "re,im"; repeatable.
        #[arg(long = "s", allow_hyphen_values = true)]
        exponents: Vec<String>,
        /// Pole location; repeatable.
        #[arg(long, allow_hyphen_values = true)]
        pole: Vec<f64>,
        /// Lattice cutoff override.
        #[arg(long = "N")]
        cutoff: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// CSV table output path.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Noncommutative residue of the first-pole symbol and the zeta residue.
    Residue {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Calibrate the dimension constant γ₀ from two or more specs.
    Calibrate {
        #[arg(long = "spec", required = true, num_args = 1..)]
        specs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a named verification suite and report pass/fail per invariant.
    Verify {
        suite: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Galerkin-oracle zeta value (brute-force eigenvalue sum).
    Galerkin {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long = "s", required = true, allow_hyphen_values = true)]
        exponents: Vec<String>,
        /// Basis cutoff override.
        #[arg(long = "B")]
        basis: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

pub fn parse_complex(s: &str) -> Result<C64> {
    let parse1 = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|e| TorzetaError::SpecValidation(format!("bad exponent '{s}': {e}")))
    };
    match s.split_once(',') {
        Some((re, im)) => Ok(C64::new(parse1(re)?, parse1(im)?)),
        None => Ok(C64::new(parse1(s)?, 0.0)),
    }
}

/// Write-then-rename so readers never observe a partial file.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let name = path
        .file_name()
        .ok_or_else(|| TorzetaError::SpecValidation(format!("bad output path {path:?}")))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn emit(out: Option<&Path>, json: &str) -> Result<()> {
    match out {
        Some(p) => atomic_write(p, json.as_bytes()),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn effective_config(path: Option<&Path>, seed: Option<u64>) -> Result<RunConfig> {
    let mut cfg = load_config(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn build_from_spec(
    spec: &OperatorSpec,
    depth: Option<usize>,
    cfg: &RunConfig,
) -> Result<HolomorphicSymbolFamily> {
    let sym = spec.symbol()?;
    let k = depth.unwrap_or(spec.truncation).min(spec.truncation);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    build_family(sym, k, spec.spectral_floor, cfg.solver_config(), &mut rng)
}

fn lattice_config(spec: &OperatorSpec, cfg: &RunConfig, n: Option<usize>) -> Result<LatticeSumConfig> {
    LatticeSumConfig::new(
        n.unwrap_or(cfg.lattice_cutoff),
        cfg.tail_order,
        spec.k0_matrix()?,
    )
}

fn field_data(f: &SampleField) -> Vec<Vec<MatrixData>> {
    let grid = f.grid;
    (0..grid.x_points())
        .map(|ix| {
            (0..grid.angular_nodes)
                .map(|ia| matrix_data(&f.mat_at(ix, ia)))
                .collect()
        })
        .collect()
}

#[derive(Serialize)]
struct SymbolDump {
    s: [f64; 2],
    order: [f64; 2],
    term_norms: Vec<f64>,
    terms: Vec<Vec<Vec<MatrixData>>>,
}

#[derive(Serialize)]
struct PowerRecord {
    level: usize,
    truncation: usize,
    identity_defect_norms: Vec<f64>,
    group_law_defects: Vec<([f64; 2], [f64; 2], Vec<f64>)>,
    max_resolved_defect: f64,
    symbols: Vec<SymbolDump>,
}

fn cmd_power(
    spec_path: &Path,
    exponents: &[String],
    depth: Option<usize>,
    out: Option<&Path>,
    cfg: &RunConfig,
) -> Result<()> {
    let spec = OperatorSpec::load(spec_path)?;
    let fam = build_from_spec(&spec, depth, cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_0001);
    let report = fam.defect_report(10, &mut rng)?;
    let mut symbols = Vec::new();
    for e in exponents {
        let s = parse_complex(e)?;
        let ev = fam.evaluate(s)?;
        symbols.push(SymbolDump {
            s: [s.re, s.im],
            order: [ev.order.re, ev.order.im],
            term_norms: ev.term_norms(),
            terms: ev.terms.iter().map(field_data).collect(),
        });
    }
    let record = PowerRecord {
        level: report.level,
        truncation: fam.truncation(),
        identity_defect_norms: report.identity_norms,
        group_law_defects: report
            .group_law
            .iter()
            .map(|(a, b, v)| ([a.re, a.im], [b.re, b.im], v.clone()))
            .collect(),
        max_resolved_defect: report.max_resolved,
        symbols,
    };
    emit(out, &serde_json::to_string_pretty(&record)?)
}

#[derive(Serialize)]
struct ZetaRecord {
    window: Vec<f64>,
    poles: Vec<(f64, [f64; 2])>,
    values: Vec<([f64; 2], [f64; 2])>,
}

fn zeta_csv(rec: &ZetaRecord) -> String {
    let mut s = String::from("s_re,s_im,value_re,value_im\n");
    for (sv, v) in &rec.values {
        s.push_str(&format!("{},{},{},{}\n", sv[0], sv[1], v[0], v[1]));
    }
    if !rec.poles.is_empty() {
        s.push_str("pole,residue_re,residue_im\n");
        for (p, r) in &rec.poles {
            s.push_str(&format!("{},{},{}\n", p, r[0], r[1]));
        }
    }
    s
}

fn cmd_zeta(
    spec_path: &Path,
    exponents: &[String],
    poles: &[f64],
    cutoff: Option<usize>,
    out: Option<&Path>,
    csv: Option<&Path>,
    cfg: &RunConfig,
) -> Result<()> {
    let spec = OperatorSpec::load(spec_path)?;
    let fam = build_from_spec(&spec, None, cfg)?;
    let lattice = lattice_config(&spec, cfg, cutoff)?;
    let samples: Vec<C64> = exponents
        .iter()
        .map(|e| parse_complex(e))
        .collect::<Result<_>>()?;
    let data = meromorphic_extend(&fam, &lattice, poles, &samples)?;
    let record = ZetaRecord {
        window: data.window.clone(),
        poles: data
            .poles
            .iter()
            .map(|(p, r)| (*p, [r.re, r.im]))
            .collect(),
        values: data
            .regular_evaluations
            .iter()
            .map(|(s, v)| ([s.re, s.im], [v.re, v.im]))
            .collect(),
    };
    if let Some(p) = csv {
        atomic_write(p, zeta_csv(&record).as_bytes())?;
    }
    emit(out, &serde_json::to_string_pretty(&record)?)
}

#[derive(Serialize)]
struct ResidueRecord {
    pole: f64,
    nc_residue_matrix: MatrixData,
    nc_residue_scalar: [f64; 2],
    zeta_residue: [f64; 2],
}

fn cmd_residue(spec_path: &Path, out: Option<&Path>, cfg: &RunConfig) -> Result<()> {
    let spec = OperatorSpec::load(spec_path)?;
    let fam = build_from_spec(&spec, None, cfg)?;
    let m = spec.dim as f64;
    let ev = fam.evaluate_symmetric(C64::new(-m, 0.0))?;
    let principal = HomogeneousTerm::new(C64::new(-m, 0.0), ev.terms[0].clone());
    let nc = nc_residue(&principal);
    let zr = residue_at_first_pole(&fam)?;
    let record = ResidueRecord {
        pole: -m,
        nc_residue_matrix: matrix_data(&nc.matrix_part),
        nc_residue_scalar: [nc.scalar_part.re, nc.scalar_part.im],
        zeta_residue: [zr.re, zr.im],
    };
    emit(out, &serde_json::to_string_pretty(&record)?)
}

#[derive(Serialize)]
struct CalibrateRecord {
    dim: usize,
    gamma0: f64,
}

fn cmd_calibrate(spec_paths: &[PathBuf], out: Option<&Path>, cfg: &RunConfig) -> Result<()> {
    if spec_paths.len() < 2 {
        return Err(TorzetaError::SpecValidation(
            "calibration needs at least two specs".into(),
        ));
    }
    let mut fams = Vec::new();
    for p in spec_paths {
        let spec = OperatorSpec::load(p)?;
        fams.push((spec.dim, build_from_spec(&spec, None, cfg)?));
    }
    let dim = fams[0].0;
    let refs: Vec<&HolomorphicSymbolFamily> = fams.iter().map(|(_, f)| f).collect();
    let g0 = crate::zeta::gamma0(&refs)?;
    let record = CalibrateRecord { dim, gamma0: g0 };
    emit(out, &serde_json::to_string_pretty(&record)?)
}

#[derive(Serialize)]
struct GalerkinRecord {
    basis_cutoff: usize,
    values: Vec<([f64; 2], [f64; 2])>,
}

fn cmd_galerkin(
    spec_path: &Path,
    exponents: &[String],
    basis: Option<usize>,
    out: Option<&Path>,
    cfg: &RunConfig,
) -> Result<()> {
    let spec = OperatorSpec::load(spec_path)?;
    let sym = spec.symbol()?;
    let k0 = spec.k0_matrix()?;
    let b = basis.unwrap_or(cfg.galerkin_cutoff);
    let mut values = Vec::new();
    for e in exponents {
        let s = parse_complex(e)?;
        let v = galerkin_zeta(&sym, b, s, &k0, spec.spectral_floor)?;
        values.push(([s.re, s.im], [v.re, v.im]));
    }
    let record = GalerkinRecord {
        basis_cutoff: b,
        values,
    };
    emit(out, &serde_json::to_string_pretty(&record)?)
}

#[derive(Serialize, Debug)]
pub struct CheckResult {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Serialize, Debug)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    fn check(&mut self, name: &str, measured: f64, tolerance: f64) {
        self.checks.push(CheckResult {
            name: name.into(),
            measured,
            tolerance,
            pass: measured <= tolerance,
        });
    }

    fn finish(self) -> Result<SuiteReport> {
        let failures: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| format!("{} ({:.3e} > {:.3e})", c.name, c.measured, c.tolerance))
            .collect();
        if failures.is_empty() {
            Ok(self)
        } else {
            Err(TorzetaError::SuiteFailed {
                suite: self.suite,
                detail: failures.join("; "),
            })
        }
    }
}

fn suite_cocycle(cfg: &RunConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport {
        suite: "cocycle".into(),
        checks: Vec::new(),
    };
    let grid = CosphereGrid::new(1, 2, 2, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sigma = random_smooth_field(grid, 1, 0, true, &mut rng)
        .add(&SampleField::constant_identity(grid, C64::new(4.0, 0.0)));
    let action = Rc::new(ConjugationAction::from_field(&sigma, 0.5)?);
    let f1 = random_smooth_field(grid, 1, 0, false, &mut rng);
    let f2 = random_smooth_field(grid, 1, 0, false, &mut rng).scale(C64::new(0.05, 0.0));
    let (f1c, f2c) = (f1.clone(), f2.clone());
    let g = OneCochain::new(move |a| Ok(f1c.scale(a).add(&f2c.scale(a * a * a))));
    let f = delta1(&action, &g);
    let violation = cohomology::verify_cocycle(&action, &f, 15, 1e-8, &mut rng)?;
    report.check("two-cocycle identity", violation, 1e-8);

    let h1 = g.eval(C64::new(1.0, 0.0))?;
    let solved = cohomology::solve(action.clone(), &f, &h1, &SolverConfig::default())?;
    let mut max_primitive = 0.0f64;
    let mut max_delta = 0.0f64;
    for i in 0..10 {
        let a = C64::new(0.3 * (i as f64 + 1.0) - 1.5, 0.2 * (i % 3) as f64 - 0.2);
        let ha = solved.eval(a)?;
        max_primitive = max_primitive.max(ha.sub(&g.eval(a)?).norm_max());
        let b = C64::new(0.1 * i as f64 - 0.4, 0.15);
        let lhs = action
            .conjugate(a, &solved.eval(b)?)?
            .sub(&solved.eval(a + b)?)
            .add(&solved.eval(a)?);
        max_delta = max_delta.max(lhs.sub(&f.eval(a, b)?).norm_max());
    }
    report.check("primitive matches generator", max_primitive, 1e-8);
    report.check("delta of solution reproduces cocycle", max_delta, 1e-8);
    report.finish()
}

fn suite_residue(cfg: &RunConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport {
        suite: "residue".into(),
        checks: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sgrid = CosphereGrid::new(1, 8, 2, 1)?;
    let mgrid = CosphereGrid::new(1, 8, 2, 3)?;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let g = HomogeneousTerm::new(
            C64::new(1.0, 0.0),
            random_smooth_field(sgrid, 2, 0, false, &mut rng),
        );
        let h = HomogeneousTerm::new(
            C64::new(-1.0, 0.0),
            random_smooth_field(mgrid, 2, 0, false, &mut rng),
        );
        let br = poisson_bracket(&g, &h)?;
        worst = worst.max(nc_residue(&br).scalar_part.norm());
    }
    report.check("residue vanishes on brackets", worst, 1e-8);

    // Fiber-trace compatibility: trace of the matrix residue equals the
    // residue of the pointwise trace.
    let t = HomogeneousTerm::new(
        C64::new(-1.0, 0.0),
        random_smooth_field(mgrid, 2, 0, false, &mut rng),
    );
    let mat = nc_residue(&t);
    let tr = HomogeneousTerm::new(C64::new(-1.0, 0.0), t.field.trace_field());
    let scalar = nc_residue(&tr);
    report.check(
        "fiber-trace compatibility",
        (mat.matrix_part.trace() - scalar.scalar_part).norm(),
        1e-10,
    );
    report.finish()
}

fn suite_quantize(cfg: &RunConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport {
        suite: "quantize".into(),
        checks: Vec::new(),
    };
    let grid = CosphereGrid::new(1, 3, 2, 1)?;
    let _ = cfg;
    // Multiplier assembly is block diagonal.
    let field = SampleField::constant_identity(grid, C64::new(1.0, 0.0));
    let sym = crate::symbol::ClassicalSymbol::single_term(C64::new(1.0, 0.0), field.clone(), 1);
    let q = QuantizedSymbol::new(&sym)?;
    let mut off = 0.0f64;
    for k in -10i64..=10 {
        if k == 0 {
            continue;
        }
        for dq in -3i64..=3 {
            if dq != 0 {
                off = off.max(crate::fiber::max_abs(&q.block(k + dq, k)));
            }
        }
    }
    report.check("multiplier block-diagonality", off, 1e-14);

    // B vs 2B difference equals the explicit tail.
    let k0 = crate::fiber::identity(1);
    let s = C64::new(-2.5, 0.0);
    let z1 = galerkin_zeta(&sym, 16, s, &k0, 1e-9)?;
    let z2 = galerkin_zeta(&sym, 32, s, &k0, 1e-9)?;
    let tail: C64 = (17..=32u32)
        .map(|k| 2.0 * (s * (k as f64).ln()).exp())
        .sum();
    report.check("cutoff tail bookkeeping", (z2 - z1 - tail).norm(), 1e-12);

    // Commutator partial trace decays in B.
    let h = {
        let f = SampleField::from_fn(grid, |ix, _| {
            let x = grid.x_coord(ix)[0];
            crate::fiber::FiberMatrix::from_element(1, 1, C64::new(1.0 + 0.4 * x.cos(), 0.0))
        });
        crate::symbol::ClassicalSymbol::single_term(C64::new(-3.0, 0.0), f, 0)
    };
    let v32 = commutator_trace_check(&sym, &h, 32)?;
    let v64 = commutator_trace_check(&sym, &h, 64)?;
    report.check("commutator trace decay ratio", v64 / v32, 1.0);
    report.finish()
}

fn suite_symbols(cfg: &RunConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport {
        suite: "symbols".into(),
        checks: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let grid = CosphereGrid::new(1, 6, 2, 2)?;
    let k = 2;
    let mk = |rng: &mut ChaCha8Rng| {
        let terms: Vec<SampleField> = (0..=k)
            .map(|_| random_smooth_field(grid, 1, 0, false, rng))
            .collect();
        crate::symbol::ClassicalSymbol::new(C64::new(1.0, 0.0), terms)
    };
    let (a, b, cc) = (mk(&mut rng), mk(&mut rng), mk(&mut rng));
    let lhs = compose(&compose(&a, &b, k)?, &cc, k)?;
    let rhs = compose(&a, &compose(&b, &cc, k)?, k)?;
    let d: f64 = lhs
        .sub(&rhs)?
        .term_norms()
        .into_iter()
        .fold(0.0, f64::max);
    report.check("composition associativity", d, 1e-9);

    // Parametrix defect in retained degrees.
    let lead = SampleField::constant_identity(grid, C64::new(2.0, 0.0));
    let mut terms = vec![lead];
    terms.push(random_smooth_field(grid, 1, 0, true, &mut rng).scale(C64::new(0.2, 0.0)));
    terms.push(SampleField::zeros(grid));
    let sym = crate::symbol::ClassicalSymbol::new(C64::new(1.0, 0.0), terms);
    let p = crate::symbol::parametrix(&sym, k)?;
    let prod = compose(&sym, &p, k)?;
    let idd = crate::symbol::ClassicalSymbol::identity(grid, k);
    let d: f64 = prod
        .sub(&idd)?
        .term_norms()
        .into_iter()
        .fold(0.0, f64::max);
    report.check("parametrix defect", d, 1e-9);

    // Adjoint involution.
    let adj2 = crate::symbol::adjoint(&crate::symbol::adjoint(&sym, k)?, k)?;
    let d: f64 = adj2
        .sub(&sym)?
        .term_norms()
        .into_iter()
        .fold(0.0, f64::max);
    report.check("adjoint involution", d, 1e-9);
    report.finish()
}

fn suite_powers(cfg: &RunConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport {
        suite: "powers".into(),
        checks: Vec::new(),
    };
    // Multiplier family: every correction term vanishes identically.
    let grid = CosphereGrid::new(1, 2, 2, 2)?;
    let field = SampleField::from_fn(grid, |_, _| {
        crate::fiber::FiberMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(2.0, 0.0),
        ]))
    });
    let sym = crate::symbol::ClassicalSymbol::single_term(C64::new(1.0, 0.0), field, 2);
    let solver = SolverConfig {
        poly_samples: 32,
        cauchy_nodes: 8,
        ..SolverConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let fam = build_family(sym, 2, 1e-6, solver, &mut rng)?;
    let ev = fam.evaluate(C64::new(-1.3, 0.7))?;
    let tail: f64 = ev.term_norms()[1..].iter().cloned().fold(0.0, f64::max);
    report.check("multiplier corrections vanish", tail, 1e-10);

    let rep = fam.defect_report(5, &mut rng)?;
    report.check("multiplier group law", rep.max_resolved, 1e-10);
    report.finish()
}

pub fn run_suite(name: &str, cfg: &RunConfig) -> Result<SuiteReport> {
    match name {
        "cocycle" => suite_cocycle(cfg),
        "residue" => suite_residue(cfg),
        "quantize" => suite_quantize(cfg),
        "symbols" => suite_symbols(cfg),
        "powers" => suite_powers(cfg),
        _ => Err(TorzetaError::UnknownSuite(name.into())),
    }
}

pub const SUITES: [&str; 5] = ["cocycle", "residue", "quantize", "symbols", "powers"];

fn cmd_verify(suite: &str, out: Option<&Path>, cfg: &RunConfig) -> Result<()> {
    let report = run_suite(suite, cfg)?;
    for c in &report.checks {
        println!(
            "{} {}: measured {:.3e} (tolerance {:.1e})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.measured,
            c.tolerance
        );
    }
    if out.is_some() {
        emit(out, &serde_json::to_string_pretty(&report)?)?;
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Power {
            spec,
            exponents,
            depth,
            out,
            config,
            seed,
        } => {
            let cfg = effective_config(config.as_deref(), *seed)?;
            cmd_power(spec, exponents, *depth, out.as_deref(), &cfg)
        }
        Command::Zeta {
            spec,
            exponents,
            pole,
            cutoff,
            out,
            csv,
            config,
            seed,
        } => {
            let cfg = effective_config(config.as_deref(), *seed)?;
            cmd_zeta(
                spec,
                exponents,
                pole,
                *cutoff,
                out.as_deref(),
                csv.as_deref(),
                &cfg,
            )
        }
        Command::Residue {
            spec,
            out,
            config,
            seed,
        } => {
            let cfg = effective_config(config.as_deref(), *seed)?;
            cmd_residue(spec, out.as_deref(), &cfg)
        }
        Command::Calibrate {
            specs,
            out,
            config,
            seed,
        } => {
            let cfg = effective_config(config.as_deref(), *seed)?;
            cmd_calibrate(specs, out.as_deref(), &cfg)
        }
        Command::Verify {
            suite,
            out,
            config,
            seed,
        } => {
            let cfg = effective_config(config.as_deref(), *seed)?;
            cmd_verify(suite, out.as_deref(), &cfg)
        }
        Command::Galerkin {
            spec,
            exponents,
            basis,
            out,
            config,
            seed,
        } => {
            let cfg = effective_config(config.as_deref(), *seed)?;
            cmd_galerkin(spec, exponents, *basis, out.as_deref(), &cfg)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("-2.5").unwrap(), C64::new(-2.5, 0.0));
        assert_eq!(parse_complex("1,0.5").unwrap(), C64::new(1.0, 0.5));
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn unknown_suite_is_rejected() {
        let cfg = RunConfig::default();
        assert!(matches!(
            run_suite("nope", &cfg),
            Err(TorzetaError::UnknownSuite(_))
        ));
    }

    #[test]
    fn all_suites_pass_on_a_fresh_seed() {
        let cfg = RunConfig::default();
        for name in SUITES {
            let report = run_suite(name, &cfg).unwrap();
            assert!(report.checks.iter().all(|c| c.pass), "{name}: {report:?}");
        }
    }
}
