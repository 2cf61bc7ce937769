//! The acceptance suite behind `radgas verify`.
//!
//! Twelve numbered criteria, each made of one or more checks of a measured
//! value against a fixed threshold. The reference preset is
//! [`Config::default`] run to `t = 50` with records every 0.01; a config
//! handed to [`run_suite`] replaces its parameters, grid, scenario, boundary
//! mode, integrator and CFL number, while the time horizons stay those of
//! the criteria.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cli;
use crate::config::Config;
use crate::diagnostics::{
    decay_between, proof_exponents, temperature_floor_check, DiagnosticsRecord, DiagnosticsTracker,
    RepresentationTracker,
};
use crate::error::{Error, Result};
use crate::grid::MIN_NODES;
use crate::io;
use crate::model::{self, Parameters};
use crate::scenarios::{self, ScenarioSpec};
use crate::solver::{compute_rhs, run_from, stable_dt, step, Event, State};

/// End of the long reference run.
pub const LONG_HORIZON: f64 = 50.0;
/// End of the window on which balances and the representation are checked.
pub const BALANCE_HORIZON: f64 = 2.0;
/// Record spacing of the reference run.
pub const RECORD_SPACING: f64 = 0.01;
/// Number of refinement levels of the convergence sweep.
pub const SWEEP_LEVELS: usize = 3;
/// Whole-suite wall-clock budget in seconds.
pub const SUITE_BUDGET: f64 = 300.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    Below,
    AtLeast,
    Above,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::Below => "<",
            Relation::AtLeast => ">=",
            Relation::Above => ">",
        }
    }

    fn holds(self, measured: f64, threshold: f64) -> bool {
        match self {
            Relation::AtMost => measured <= threshold,
            Relation::Below => measured < threshold,
            Relation::AtLeast => measured >= threshold,
            Relation::Above => measured > threshold,
        }
    }
}

/// One measured value against its threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub relation: Relation,
    pub threshold: f64,
    /// Wall-clock measurements are left out of [`SuiteReport::table`] so
    /// that two runs of the suite print the same table.
    pub timing: bool,
}

impl Check {
    fn new(name: impl Into<String>, measured: f64, relation: Relation, threshold: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            relation,
            threshold,
            timing: false,
        }
    }

    fn timed(name: impl Into<String>, seconds: f64, budget: f64) -> Self {
        Self {
            timing: true,
            ..Self::new(name, seconds, Relation::AtMost, budget)
        }
    }

    pub fn pass(&self) -> bool {
        !self.measured.is_nan() && self.relation.holds(self.measured, self.threshold)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Criterion {
    pub id: usize,
    pub title: &'static str,
    pub checks: Vec<Check>,
    /// Set when a run the criterion depends on failed.
    pub error: Option<String>,
}

impl Criterion {
    fn new(id: usize, title: &'static str) -> Self {
        Self {
            id,
            title,
            checks: Vec::new(),
            error: None,
        }
    }

    fn failed(id: usize, title: &'static str, error: &str) -> Self {
        Self {
            error: Some(error.to_string()),
            ..Self::new(id, title)
        }
    }

    fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn pass(&self) -> bool {
        self.error.is_none() && !self.checks.is_empty() && self.checks.iter().all(Check::pass)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub criteria: Vec<Criterion>,
    pub seconds: f64,
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.criteria.iter().all(Criterion::pass)
    }

    /// Every check with its measured value, threshold and verdict.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<4} {:<58} {:>12} {:>2} {:>10}  result", "#", "check", "measured", "", "threshold");
        for c in &self.criteria {
            let _ = writeln!(out, "{:<4} {} [{}]", c.id, c.title, verdict(c.pass()));
            if let Some(e) = &c.error {
                let _ = writeln!(out, "{:<4} {:<58} {:>12} {:>2} {:>10}  FAIL", "", "error", "-", "", "-");
                let _ = writeln!(out, "{:<4}   {e}", "");
            }
            for k in &c.checks {
                let measured = if k.timing { "timed".to_string() } else { format!("{:.4e}", k.measured) };
                let _ = writeln!(
                    out,
                    "{:<4} {:<58} {:>12} {:>2} {:>10}  {}",
                    "",
                    k.name,
                    measured,
                    k.relation.symbol(),
                    format!("{:.4e}", k.threshold),
                    verdict(k.pass())
                );
            }
        }
        let _ = writeln!(out, "overall: {}", verdict(self.all_pass()));
        out
    }

    /// One line per criterion.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.criteria {
            let failing: Vec<&str> = c.checks.iter().filter(|k| !k.pass()).map(|k| k.name.as_str()).collect();
            let _ = write!(out, "criterion {:>2} {:<40} {}", c.id, c.title, verdict(c.pass()));
            if let Some(e) = &c.error {
                let _ = write!(out, "  error: {e}");
            }
            if !failing.is_empty() {
                let _ = write!(out, "  failing: {}", failing.join("; "));
            }
            out.push('\n');
        }
        out
    }

    /// The wall-clock checks with their measured seconds.
    pub fn timings(&self) -> String {
        let mut out = String::new();
        for c in &self.criteria {
            for k in c.checks.iter().filter(|k| k.timing) {
                let _ = writeln!(out, "{:<4} {:<58} {:>8.2} s <= {:.0} s", c.id, k.name, k.measured, k.threshold);
            }
        }
        out
    }
}

/// The reference preset run to the long horizon.
pub fn reference_config() -> Config {
    let mut cfg = Config::default();
    cfg.stepping.t_end = LONG_HORIZON;
    cfg.output.diag_interval = RECORD_SPACING;
    cfg.output.snap_interval = LONG_HORIZON;
    cfg
}

fn suite_config(user: Option<&Config>) -> Config {
    let mut cfg = reference_config();
    if let Some(u) = user {
        cfg.params = u.params.clone();
        cfg.grid = u.grid;
        cfg.scenario = u.scenario.clone();
        cfg.bc = u.bc;
        cfg.stepping.integrator = u.stepping.integrator;
        cfg.stepping.cfl = u.stepping.cfl;
        cfg.stepping.unchecked_cfl = u.stepping.unchecked_cfl;
    }
    cfg
}

/// Runs every criterion. Fails outright only for an invalid config; a
/// failing run marks the criteria that depend on it as failed.
pub fn run_suite(user: Option<&Config>) -> Result<SuiteReport> {
    let start = Instant::now();
    let cfg = suite_config(user);
    cfg.validate()?;

    let thermo = thermodynamics(&cfg.params);
    // Dynamics built on an inconsistent equation of state say nothing, and
    // may not even finish: skip them.
    let consistent = thermo.checks.iter().filter(|k| !k.timing).all(Check::pass) && thermo.error.is_none();
    let mut criteria = vec![thermo, equilibrium(&cfg)];
    const SKIPPED: &str = "not run: the thermodynamic layer is inconsistent";
    let reference = if consistent {
        reference_run(&cfg, start).map_err(|e| e.to_string())
    } else {
        Err(SKIPPED.to_string())
    };
    let sweep = if consistent {
        sweep_config(&cfg)
            .and_then(|c| cli::sweep(&c, SWEEP_LEVELS))
            .map_err(|e| e.to_string())
    } else {
        Err(SKIPPED.to_string())
    };

    criteria.push(balances(&reference, &sweep));
    criteria.push(on_reference(&reference, 4, "reactant bounds", reactant_bounds));
    criteria.push(on_reference(&reference, 5, "no collapse or explosion", global_bounds));
    criteria.push(on_reference(&reference, 6, "decay to equilibrium", decay));
    criteria.push(representation(&cfg, &reference, &sweep));
    criteria.push(on_reference(&reference, 8, "temperature floor", floor));
    criteria.push(exponents());
    criteria.push(on_reference(&reference, 10, "functional saturation", saturation));
    criteria.push(if consistent {
        persistence(&cfg)
    } else {
        Criterion::failed(11, "determinism and persistence", SKIPPED)
    });

    let seconds = start.elapsed().as_secs_f64();
    let mut total = Criterion::new(12, "runtime budget");
    total.push(Check::timed("whole suite wall-clock seconds", seconds, SUITE_BUDGET));
    criteria.push(total);
    Ok(SuiteReport { criteria, seconds })
}

/// Records and representation residuals of the reference run.
struct ReferenceRun {
    records: Vec<DiagnosticsRecord>,
    /// Sup of the representation residual up to the balance horizon, when
    /// the domain holds the cut-off.
    representation: Option<f64>,
    params: Parameters,
}

/// The reference run; gives up once the whole-suite budget, counted from
/// `start`, is spent.
fn reference_run(cfg: &Config, start: Instant) -> Result<ReferenceRun> {
    let grid = cfg.grid.build()?;
    let s0 = scenarios::build(&cfg.scenario, &grid)?;
    let mut rep = if grid.half_length() >= 3.0 {
        Some(RepresentationTracker::new(&s0, &cfg.params, 1)?)
    } else {
        None
    };
    let mut sup = 0.0_f64;
    let horizon = BALANCE_HORIZON + 1e-9;
    let out = run_from(cfg, s0, DiagnosticsTracker::new(&cfg.params), &mut |e| {
        if let Event::Record(r, s) = e {
            if start.elapsed().as_secs_f64() > SUITE_BUDGET {
                return Err(Error::Numerical(format!(
                    "reference run stopped at t = {}: the {SUITE_BUDGET} s budget is spent",
                    r.t
                )));
            }
            if let (true, Some(tr)) = (r.t <= horizon, rep.as_mut()) {
                sup = tr.push(s)?.into_iter().fold(sup, f64::max);
            }
        }
        Ok(())
    })?;
    Ok(ReferenceRun {
        records: out.records,
        representation: rep.map(|_| sup),
        params: cfg.params.clone(),
    })
}

/// Coarsest sweep level: its last level matches the reference grid, and it
/// keeps the reference record spacing, which then halves with `dx`.
fn sweep_config(cfg: &Config) -> Result<Config> {
    let mut c = cfg.clone();
    let stride = 1usize << (SWEEP_LEVELS - 1);
    c.grid.nodes = ((cfg.grid.nodes - 1) / stride).max(MIN_NODES) + 1;
    c.stepping.t_end = BALANCE_HORIZON;
    c.output.diag_interval = RECORD_SPACING;
    c.validate()?;
    Ok(c)
}

fn on_reference(
    reference: &std::result::Result<ReferenceRun, String>,
    id: usize,
    title: &'static str,
    f: fn(&mut Criterion, &[DiagnosticsRecord]),
) -> Criterion {
    match reference {
        Ok(r) => {
            let mut c = Criterion::new(id, title);
            f(&mut c, &r.records);
            c
        }
        Err(e) => Criterion::failed(id, title, e),
    }
}

/// Relative error of a finite-difference derivative against its analytic
/// counterpart.
fn rel(fd: f64, exact: f64) -> f64 {
    (fd - exact).abs() / exact.abs().max(1.0)
}

fn central(f: impl Fn(f64) -> Result<f64>, x: f64) -> Result<f64> {
    let h = 1e-5 * x.abs().max(1.0);
    Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
}

fn thermodynamics(par: &Parameters) -> Criterion {
    let mut c = Criterion::new(1, "thermodynamic consistency");
    let start = Instant::now();
    let result = (|| -> Result<[f64; 4]> {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut worst = [0.0_f64; 4];
        for _ in 0..1000 {
            let v: f64 = rng.gen_range(0.2..=5.0);
            let th: f64 = rng.gen_range(0.2..=5.0);
            let p = model::pressure(v, th, par)?;
            let p_th = central(|t| model::pressure(v, t, par), th)?;
            let e_v = central(|w| model::internal_energy(w, th, par), v)?;
            let e_th = central(|t| model::internal_energy(v, t, par), th)?;
            let s_v = central(|w| model::entropy(w, th, par), v)?;
            let s_th = central(|t| model::entropy(v, t, par), th)?;
            worst[0] = worst[0].max(rel(e_v, th * p_th - p));
            worst[1] = worst[1].max(rel(s_v, p_th));
            worst[2] = worst[2].max(rel(s_th, e_th / th));
            let a = model::normalized_entropy(v, th, par)?;
            let b = model::normalized_entropy_energy_form(v, th, par)?;
            worst[3] = worst[3].max((a - b).abs() / a.abs().max(1.0));
        }
        Ok(worst)
    })();
    match result {
        Ok(w) => {
            c.push(Check::new("dE/dv = theta dp/dtheta - p, max rel error", w[0], Relation::AtMost, 1e-6));
            c.push(Check::new("dS/dv = dp/dtheta, max rel error", w[1], Relation::AtMost, 1e-6));
            c.push(Check::new("dS/dtheta = (dE/dtheta)/theta, max rel error", w[2], Relation::AtMost, 1e-6));
            c.push(Check::new("normalized entropy, two forms, max rel gap", w[3], Relation::AtMost, 1e-10));
        }
        Err(e) => c.error = Some(e.to_string()),
    }
    c.push(Check::timed("1000-point check seconds", start.elapsed().as_secs_f64(), 1.0));
    c
}

fn max_abs(f: &[f64]) -> f64 {
    f.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn equilibrium(cfg: &Config) -> Criterion {
    let mut c = Criterion::new(2, "equilibrium fixed point");
    let result = (|| -> Result<(f64, f64)> {
        let grid = cfg.grid.build()?;
        let mut s = scenarios::build(&ScenarioSpec::equilibrium(), &grid)?;
        let r = compute_rhs(&s, &cfg.params, cfg.bc)?;
        let rhs = [&r.dv, &r.du, &r.dtheta, &r.dz].into_iter().map(|f| max_abs(f)).fold(0.0, f64::max);
        let dt = cfg.stepping.cfl * stable_dt(&s, &cfg.params, 1.0)?;
        for _ in 0..1000 {
            s = step(&s, &cfg.params, cfg.bc, dt)?;
        }
        Ok((rhs, s.distance_from_equilibrium()))
    })();
    match result {
        Ok((rhs, drift)) => {
            c.push(Check::new("max |rhs| at (1, 0, 1, 0)", rhs, Relation::AtMost, 0.0));
            c.push(Check::new("Linf drift after 1000 Heun steps", drift, Relation::AtMost, 1e-12));
        }
        Err(e) => c.error = Some(e.to_string()),
    }
    c
}

type Outcome<T> = std::result::Result<T, String>;

fn balances(reference: &Outcome<ReferenceRun>, sweep: &Outcome<Vec<cli::SweepLevel>>) -> Criterion {
    let mut c = Criterion::new(3, "balance laws");
    let mut errors = Vec::new();
    match reference.as_ref().map_err(String::clone).and_then(|r| early_residuals(r).map_err(|e| e.to_string())) {
        Ok([m, l2, s]) => {
            c.push(Check::new("reactant mass residual, t <= 2", m, Relation::AtMost, 1e-4));
            c.push(Check::new("reactant L2 residual, t <= 2", l2, Relation::AtMost, 1e-3));
            c.push(Check::new("entropy-energy residual, t <= 2", s, Relation::AtMost, 1e-3));
        }
        Err(e) => errors.push(e),
    }
    match sweep {
        Ok(levels) => {
            type Pick = fn(&cli::SweepLevel) -> f64;
            let laws: [(&str, Pick); 3] = [("mass", |l| l.mass), ("L2", |l| l.l2), ("entropy", |l| l.entropy)];
            for w in levels.windows(2) {
                for (name, f) in laws {
                    // Residuals that vanish at both levels are exact.
                    let order = cli::empirical_order(f(&w[0]), f(&w[1])).unwrap_or(f64::INFINITY);
                    c.push(Check::new(
                        format!("{name} residual order, N {} -> {}", w[0].nodes, w[1].nodes),
                        order,
                        Relation::AtLeast,
                        1.8,
                    ));
                }
            }
            for l in levels {
                c.push(Check::timed(format!("sweep level {} (N = {}) seconds", l.level, l.nodes), l.seconds, 60.0));
            }
        }
        Err(e) => errors.push(format!("sweep: {e}")),
    }
    if !errors.is_empty() {
        c.error = Some(errors.join("; "));
    }
    c
}

fn early_residuals(r: &ReferenceRun) -> Result<[f64; 3]> {
    let early: Vec<DiagnosticsRecord> =
        r.records.iter().filter(|x| x.t <= BALANCE_HORIZON + 1e-9).cloned().collect();
    let res = crate::diagnostics::balance_residuals(&early, &r.params)?;
    let worst = |f: fn(&crate::diagnostics::BalanceResiduals) -> f64| res.iter().map(f).fold(0.0, f64::max);
    Ok([worst(|x| x.mass), worst(|x| x.l2), worst(|x| x.entropy)])
}

fn reactant_bounds(c: &mut Criterion, records: &[DiagnosticsRecord]) {
    let zmin = records.iter().map(|r| r.zmin).fold(f64::INFINITY, f64::min);
    let zmax = records.iter().map(|r| r.zmax).fold(f64::NEG_INFINITY, f64::max);
    c.push(Check::new("min z over the run", zmin, Relation::AtLeast, -1e-10));
    c.push(Check::new("max z over the run", zmax, Relation::AtMost, 1.0 + 1e-10));
}

fn global_bounds(c: &mut Criterion, records: &[DiagnosticsRecord]) {
    let split = LONG_HORIZON / 2.0;
    let early = || records.iter().filter(|r| r.t <= split);
    let late = || records.iter().filter(|r| r.t >= split);
    let lo = |it: &mut dyn Iterator<Item = f64>| it.fold(f64::INFINITY, f64::min);
    let hi = |it: &mut dyn Iterator<Item = f64>| it.fold(f64::NEG_INFINITY, f64::max);
    c.push(Check::new("min v over the run", lo(&mut records.iter().map(|r| r.vmin)), Relation::Above, 0.0));
    c.push(Check::new("min theta over the run", lo(&mut records.iter().map(|r| r.thetamin)), Relation::Above, 0.0));
    c.push(Check::new(
        "min v on [25, 50] / min v on [0, 25]",
        lo(&mut late().map(|r| r.vmin)) / lo(&mut early().map(|r| r.vmin)),
        Relation::AtLeast,
        0.9,
    ));
    c.push(Check::new(
        "min theta on [25, 50] / min theta on [0, 25]",
        lo(&mut late().map(|r| r.thetamin)) / lo(&mut early().map(|r| r.thetamin)),
        Relation::AtLeast,
        0.9,
    ));
    c.push(Check::new(
        "max v on [25, 50] / max v on [0, 25]",
        hi(&mut late().map(|r| r.vmax)) / hi(&mut early().map(|r| r.vmax)),
        Relation::AtMost,
        1.1,
    ));
    c.push(Check::new(
        "max theta on [25, 50] / max theta on [0, 25]",
        hi(&mut late().map(|r| r.thetamax)) / hi(&mut early().map(|r| r.thetamax)),
        Relation::AtMost,
        1.1,
    ));
}

fn decay(c: &mut Criterion, records: &[DiagnosticsRecord]) {
    match decay_between(records, 1.0) {
        Ok(d) => {
            for comp in &d.components {
                let base = if comp.name == "v" || comp.name == "theta" { " - 1" } else { "" };
                c.push(Check::new(
                    format!("Linf({}{base}) at t = {} / at t = {}", comp.name, d.t_end, d.t_ref),
                    comp.linf_ratio,
                    Relation::AtMost,
                    0.2,
                ));
            }
            c.push(Check::new("gradient energy on [25, 50] / on [0, 25]", d.tail_ratio(), Relation::AtMost, 0.5));
        }
        Err(e) => c.error = Some(e.to_string()),
    }
}

fn representation(cfg: &Config, reference: &Outcome<ReferenceRun>, sweep: &Outcome<Vec<cli::SweepLevel>>) -> Criterion {
    let mut c = Criterion::new(7, "representation formula");
    let mut errors = Vec::new();
    let equilibrium = (|| -> Result<f64> {
        let grid = cfg.grid.build()?;
        let s0 = State::equilibrium(grid);
        let mut tr = RepresentationTracker::new(&s0, &cfg.params, 1)?;
        let mut sup = 0.0_f64;
        for k in 0..=((BALANCE_HORIZON / RECORD_SPACING).round() as usize) {
            let mut s = s0.clone();
            s.t = k as f64 * RECORD_SPACING;
            sup = tr.push(&s)?.into_iter().fold(sup, f64::max);
        }
        Ok(sup)
    })();
    match equilibrium {
        Ok(sup) => c.push(Check::new("equilibrium residual", sup, Relation::AtMost, 1e-10)),
        Err(e) => errors.push(e.to_string()),
    }
    match reference {
        Ok(ReferenceRun { representation: Some(sup), .. }) => {
            c.push(Check::new("reference residual, t <= 2, spacing 0.01", *sup, Relation::AtMost, 5e-2))
        }
        Ok(_) => errors.push("domain too short for the cut-off".into()),
        Err(e) => errors.push(e.clone()),
    }
    match sweep {
        Ok(levels) => {
            for w in levels.windows(2) {
                match (w[0].representation, w[1].representation) {
                    (Some(a), Some(b)) => c.push(Check::new(
                        format!("residual ratio, N {} -> {} (fine / coarse)", w[0].nodes, w[1].nodes),
                        b / a.max(crate::diagnostics::EPS),
                        Relation::Below,
                        1.0,
                    )),
                    _ => errors.push("domain too short for the cut-off".into()),
                }
            }
        }
        Err(e) => errors.push(format!("sweep: {e}")),
    }
    if !errors.is_empty() {
        errors.dedup();
        c.error = Some(errors.join("; "));
    }
    c
}

fn floor(c: &mut Criterion, records: &[DiagnosticsRecord]) {
    match temperature_floor_check(records) {
        Ok(v) => c.push(Check::new(
            "max(1/theta) / affine envelope, second half",
            v.worst_ratio,
            Relation::AtMost,
            1.0 + crate::diagnostics::FLOOR_MARGIN,
        )),
        Err(e) => c.error = Some(e.to_string()),
    }
    // Negative control: max 1/θ = exp(t) must be flagged.
    let synthetic: Vec<DiagnosticsRecord> = (0..=100)
        .map(|k| {
            let t = 0.5 * k as f64;
            DiagnosticsRecord {
                t,
                thetamin: (-t).exp(),
                ..DiagnosticsRecord::default()
            }
        })
        .collect();
    match temperature_floor_check(&synthetic) {
        Ok(v) => c.push(Check::new(
            "exp(t) control: ratio to envelope (must fail the check)",
            v.worst_ratio,
            Relation::Above,
            1.0 + crate::diagnostics::FLOOR_MARGIN,
        )),
        Err(e) => c.error = Some(e.to_string()),
    }
}

fn exponents() -> Criterion {
    let mut c = Criterion::new(9, "proof exponents");
    let result = (|| -> Result<()> {
        let (l1, l2) = proof_exponents(4.0)?;
        c.push(Check::new("|first exponent(4) - 7/9|", (l1 - 7.0 / 9.0).abs(), Relation::AtMost, 1e-15));
        c.push(Check::new("|second exponent(4) - 21/22|", (l2 - 21.0 / 22.0).abs(), Relation::AtMost, 1e-15));
        let (_, edge) = proof_exponents(11.0 / 3.0)?;
        c.push(Check::new("|second exponent(11/3) - 1|", (edge - 1.0).abs(), Relation::AtMost, 1e-12));
        for b in [3.7, 4.0, 6.0, 10.0] {
            let (_, l2) = proof_exponents(b)?;
            c.push(Check::new(format!("second exponent({b})"), l2, Relation::Below, 1.0));
        }
        Ok(())
    })();
    if let Err(e) = result {
        c.error = Some(e.to_string());
    }
    c
}

fn saturation(c: &mut Criterion, records: &[DiagnosticsRecord]) {
    let last = records.last().expect("a run has records");
    let quarter = last.t - 0.25 * (last.t - records[0].t);
    let before = records.iter().rev().find(|r| r.t <= quarter).unwrap_or(&records[0]);
    let share = |total: f64, earlier: f64| if total > 0.0 { (total - earlier) / total } else { 0.0 };
    c.push(Check::new(
        "share of X gained in the final quarter",
        share(last.theta_t_accum, before.theta_t_accum),
        Relation::AtMost,
        0.1,
    ));
    c.push(Check::new(
        "share of W gained in the final quarter",
        share(last.u_xt_accum, before.u_xt_accum),
        Relation::AtMost,
        0.1,
    ));
    let first_max = |f: fn(&DiagnosticsRecord) -> f64| {
        let top = f(last);
        records.iter().find(|r| f(r) >= top).map_or(f64::INFINITY, |r| r.t)
    };
    let split = LONG_HORIZON / 2.0;
    c.push(Check::new("time Y reaches its maximum", first_max(|r| r.theta_x_peak), Relation::Below, split));
    c.push(Check::new("time Z reaches its maximum", first_max(|r| r.u_xx_peak), Relation::Below, split));
}

/// Horizon and grid of the persistence round trips.
const PERSISTENCE_T_END: f64 = 1.0;
const PERSISTENCE_NODES: usize = 401;

fn scratch_dir() -> PathBuf {
    let nanos = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_nanos());
    std::env::temp_dir().join(format!("radgas-verify-{}-{nanos}", std::process::id()))
}

/// Number of lines that differ between two text files, plus the length
/// difference.
fn differing_lines(a: &Path, b: &Path) -> Result<f64> {
    let (x, y) = (fs::read_to_string(a)?, fs::read_to_string(b)?);
    let (lx, ly): (Vec<&str>, Vec<&str>) = (x.lines().collect(), y.lines().collect());
    let differ = lx.iter().zip(&ly).filter(|(p, q)| p != q).count() + lx.len().abs_diff(ly.len());
    Ok(differ as f64)
}

fn differing_values(a: &State, b: &State) -> f64 {
    let fields = |s: &State| {
        let mut all = vec![s.t, s.grid.half_length()];
        for f in [&s.v, &s.u, &s.theta, &s.z] {
            all.extend_from_slice(f);
        }
        all
    };
    let (x, y) = (fields(a), fields(b));
    if x.len() != y.len() {
        return x.len().max(y.len()) as f64;
    }
    x.iter().zip(&y).filter(|(p, q)| p.to_bits() != q.to_bits()).count() as f64
}

fn persistence(cfg: &Config) -> Criterion {
    let mut c = Criterion::new(11, "determinism and persistence");
    let root = scratch_dir();
    let result = (|| -> Result<[f64; 4]> {
        let mut base = cfg.clone();
        base.grid.nodes = PERSISTENCE_NODES.min(cfg.grid.nodes);
        base.stepping.t_end = PERSISTENCE_T_END;
        base.output.diag_interval = RECORD_SPACING;
        base.output.snap_interval = PERSISTENCE_T_END / 4.0;
        let with_dir = |name: &str, t_end: f64| {
            let mut c = base.clone();
            c.output.dir = root.join(name);
            c.stepping.t_end = t_end;
            c
        };
        let (a, b, r) = (
            with_dir("first", PERSISTENCE_T_END),
            with_dir("second", PERSISTENCE_T_END),
            with_dir("resumed", PERSISTENCE_T_END / 2.0),
        );
        let diag = |c: &Config| c.output.dir.join(cli::DIAGNOSTICS_FILE);
        let ckpt = |c: &Config| c.output.dir.join(cli::CHECKPOINT_FILE);

        let out = cli::run_to_dir(&a)?;
        cli::run_to_dir(&b)?;
        let determinism = differing_lines(&diag(&a), &diag(&b))?;
        let round_trip = differing_values(&io::checkpoint_read(&ckpt(&a))?, &out.state);

        cli::run_to_dir(&r)?;
        let resumed = cli::resume_to_dir(&ckpt(&r), PERSISTENCE_T_END, None)?;
        let rows = differing_lines(&diag(&a), &diag(&r))?;
        let state = differing_values(&resumed.state, &out.state);
        Ok([determinism, round_trip, rows, state])
    })();
    let _ = fs::remove_dir_all(&root);
    match result {
        Ok([det, rt, rows, state]) => {
            c.push(Check::new("differing diagnostics rows, identical configs", det, Relation::AtMost, 0.0));
            c.push(Check::new("checkpoint round trip, differing values", rt, Relation::AtMost, 0.0));
            c.push(Check::new("resumed run, differing diagnostics rows", rows, Relation::AtMost, 0.0));
            c.push(Check::new("resumed run, differing final values", state, Relation::AtMost, 0.0));
        }
        Err(e) => c.error = Some(e.to_string()),
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations() {
        assert!(Check::new("x", 1.0, Relation::AtMost, 1.0).pass());
        assert!(!Check::new("x", 1.0, Relation::Below, 1.0).pass());
        assert!(Check::new("x", f64::INFINITY, Relation::AtLeast, 1.8).pass());
        assert!(!Check::new("x", f64::NAN, Relation::AtMost, 1.0).pass());
    }

    #[test]
    fn criterion_with_error_or_no_checks_fails() {
        assert!(!Criterion::new(1, "empty").pass());
        let mut c = Criterion::failed(1, "broken", "run failed");
        c.push(Check::new("x", 0.0, Relation::AtMost, 1.0));
        assert!(!c.pass());
    }

    #[test]
    fn table_hides_timings() {
        let mut c = Criterion::new(12, "budget");
        c.push(Check::timed("seconds", 12.345, 300.0));
        let r = SuiteReport { criteria: vec![c], seconds: 12.345 };
        assert!(!r.table().contains("12.3"));
        assert!(r.timings().contains("12.3"));
    }

    #[test]
    fn cheap_criteria_pass_on_the_preset() {
        let cfg = reference_config();
        assert!(thermodynamics(&cfg.params).checks.iter().filter(|k| !k.timing).all(Check::pass));
        assert!(exponents().pass());
    }

    #[test]
    fn mutation_fails_thermodynamics() {
        let par = Parameters {
            mutation: model::Mutation::FlipRadiationPressure,
            ..Parameters::default()
        };
        assert!(!thermodynamics(&par).pass());
    }

    #[test]
    fn user_config_keeps_the_horizons() {
        let mut user = Config::default();
        user.grid.nodes = 64;
        user.stepping.t_end = 3.0;
        let cfg = suite_config(Some(&user));
        assert_eq!(cfg.grid.nodes, 64);
        assert_eq!(cfg.stepping.t_end, LONG_HORIZON);
    }

    #[test]
    fn sweep_levels_end_at_the_reference_grid() {
        let c = sweep_config(&reference_config()).unwrap();
        assert_eq!(c.grid.nodes, 400);
        assert_eq!(cli::level_nodes(c.grid.nodes, SWEEP_LEVELS - 1), 1597);
        assert_eq!(c.output.diag_interval, RECORD_SPACING);
    }
}
