//! Command implementations behind the `radgas` binary.
//!
//! Every `cmd_*` function returns the process exit code:
//! 0 success, 2 configuration or usage error, 3 solver blow-up,
//! 4 failed verification.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::acceptance;
use crate::config::{parse_config, Config};
use crate::diagnostics::{balance_residuals, DiagnosticsRecord, DiagnosticsTracker, RepresentationTracker};
use crate::error::{Error, Result};
use crate::io;
use crate::scenarios;
use crate::solver::{run_from, run_with, Event, RunOutput};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BLOW_UP: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

/// Overrides `[output] dir` when set.
pub const OUTPUT_DIR_ENV: &str = "RADGAS_OUTPUT_DIR";

pub const CONFIG_FILE: &str = "config.txt";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const CHECKPOINT_FILE: &str = "checkpoint.txt";
pub const SWEEP_FILE: &str = "sweep.csv";

pub fn exit_code(e: &Error) -> i32 {
    if e.is_blow_up() || matches!(e, Error::Numerical(_)) {
        EXIT_BLOW_UP
    } else {
        EXIT_CONFIG
    }
}

fn report(e: &Error) -> i32 {
    eprintln!("radgas: error: {e}");
    exit_code(e)
}

fn env_output_dir() -> Option<PathBuf> {
    std::env::var_os(OUTPUT_DIR_ENV).filter(|d| !d.is_empty()).map(PathBuf::from)
}

fn apply_env(cfg: &mut Config) {
    if let Some(dir) = env_output_dir() {
        cfg.output.dir = dir;
    }
}

/// Reads and validates a config file, then applies the environment override.
pub fn load_config(path: &Path) -> Result<Config> {
    let text = fs::read_to_string(path)?;
    let mut cfg = parse_config(&text)?;
    apply_env(&mut cfg);
    Ok(cfg)
}

/// Streams diagnostics rows and snapshots into `dir` as the run produces them.
struct DirWriter {
    dir: PathBuf,
    diag: BufWriter<fs::File>,
}

impl DirWriter {
    fn observe(&mut self, e: Event<'_>) -> Result<()> {
        match e {
            Event::Record(r, _) => writeln!(self.diag, "{}", io::format_record(r))?,
            Event::Snapshot(i, s) => io::write_snapshot(&io::snapshot_path(&self.dir, i), s)?,
        }
        Ok(())
    }
}

fn finish(dir: &Path, out: &RunOutput) -> Result<()> {
    let ckpt = dir.join(CHECKPOINT_FILE);
    io::checkpoint_write(&out.state, &ckpt)?;
    if let Some(last) = out.records.last() {
        io::sidecar_write(&ckpt, last)?;
    }
    Ok(())
}

/// Runs `cfg` and writes `config.txt`, `diagnostics.csv`, the snapshots and
/// a final checkpoint into `cfg.output.dir`. Rows written before a failure
/// stay on disk.
pub fn run_to_dir(cfg: &Config) -> Result<RunOutput> {
    cfg.validate()?;
    let dir = cfg.output.dir.clone();
    fs::create_dir_all(&dir)?;
    fs::write(dir.join(CONFIG_FILE), cfg.to_text())?;
    let mut diag = BufWriter::new(fs::File::create(dir.join(DIAGNOSTICS_FILE))?);
    writeln!(diag, "{}", io::diagnostics_header())?;
    let mut w = DirWriter { dir: dir.clone(), diag };
    let result = run_with(cfg, &mut |e| w.observe(e));
    w.diag.flush()?;
    let out = result?;
    finish(&dir, &out)?;
    Ok(out)
}

pub fn cmd_run(cfg: &Config) -> i32 {
    let start = Instant::now();
    match run_to_dir(cfg) {
        Ok(out) => {
            eprintln!(
                "radgas: reached t = {} in {} steps ({:.1} s); output in {}",
                out.state.t,
                out.steps,
                start.elapsed().as_secs_f64(),
                cfg.output.dir.display()
            );
            EXIT_OK
        }
        Err(e) => report(&e),
    }
}

/// Continues the run whose checkpoint is `checkpoint` up to `t_end`.
///
/// The configuration comes from `config.txt` next to the checkpoint and the
/// accumulators from the checkpoint's sidecar, so the continued rows equal
/// those of an uninterrupted run bit for bit. Output goes to `out_dir`,
/// defaulting to the checkpoint's directory; rows of an existing
/// `diagnostics.csv` beyond the checkpoint time are replaced.
pub fn resume_to_dir(checkpoint: &Path, t_end: f64, out_dir: Option<&Path>) -> Result<RunOutput> {
    let state = io::checkpoint_read(checkpoint)?;
    let record = io::sidecar_read(checkpoint)?;
    let home = checkpoint.parent().unwrap_or(Path::new(".")).to_path_buf();
    let mut cfg = parse_config(&fs::read_to_string(home.join(CONFIG_FILE))?)?;
    cfg.output.dir = out_dir.map_or(home, Path::to_path_buf);
    if !(t_end > state.t) {
        return Err(Error::Range {
            key: "t-end".into(),
            msg: format!("must exceed the checkpoint time {}, got {t_end}", state.t),
        });
    }
    cfg.stepping.t_end = t_end;
    cfg.validate()?;
    if cfg.grid.nodes != state.len() || cfg.grid.half_length != state.grid.half_length() {
        return Err(Error::Contract(format!(
            "checkpoint grid (N = {}, L = {}) does not match the stored config (N = {}, L = {})",
            state.len(),
            state.grid.half_length(),
            cfg.grid.nodes,
            cfg.grid.half_length
        )));
    }

    let dir = cfg.output.dir.clone();
    fs::create_dir_all(&dir)?;
    let diag_path = dir.join(DIAGNOSTICS_FILE);
    let mut kept = vec![io::diagnostics_header()];
    if diag_path.exists() {
        let text = fs::read_to_string(&diag_path)?;
        io::parse_csv(&diag_path, &text, &io::diagnostics_header())?;
        kept.extend(
            text.lines()
                .skip(1)
                .filter(|l| l.split(',').next().and_then(|t| t.parse::<f64>().ok()) <= Some(state.t))
                .map(str::to_string),
        );
    }
    fs::write(dir.join(CONFIG_FILE), cfg.to_text())?;
    let mut diag = BufWriter::new(fs::File::create(&diag_path)?);
    for l in &kept {
        writeln!(diag, "{l}")?;
    }
    let tracker = DiagnosticsTracker::resume(&cfg.params, &record, &state)?;
    let mut w = DirWriter { dir: dir.clone(), diag };
    let result = run_from(&cfg, state, tracker, &mut |e| w.observe(e));
    w.diag.flush()?;
    let out = result?;
    finish(&dir, &out)?;
    Ok(out)
}

/// [`resume_to_dir`] with the environment override as output directory.
pub fn cmd_resume(checkpoint: &Path, t_end: f64) -> i32 {
    match resume_to_dir(checkpoint, t_end, env_output_dir().as_deref()) {
        Ok(out) => {
            eprintln!("radgas: resumed to t = {} in {} steps", out.state.t, out.steps);
            EXIT_OK
        }
        Err(e) => report(&e),
    }
}

/// One refinement level of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepLevel {
    pub level: usize,
    pub nodes: usize,
    pub dx: f64,
    pub diag_interval: f64,
    /// Largest balance residuals over the record times of level 0.
    pub mass: f64,
    pub l2: f64,
    pub entropy: f64,
    /// Sup of the representation residual on `[−2, 2]`, when the domain
    /// holds the cut-off.
    pub representation: Option<f64>,
    pub seconds: f64,
}

/// Node count of level `i`: `dx` halves from one level to the next.
pub fn level_nodes(n0: usize, level: usize) -> usize {
    (n0 - 1) * (1 << level) + 1
}

fn sweep_level(cfg: &Config, level: usize) -> Result<SweepLevel> {
    let start = Instant::now();
    let mut c = cfg.clone();
    let stride = 1usize << level;
    c.grid.nodes = level_nodes(cfg.grid.nodes, level);
    c.output.diag_interval = cfg.output.diag_interval / stride as f64;
    let grid = c.grid.build()?;
    let s0 = scenarios::build(&c.scenario, &grid)?;
    let mut rep = if grid.half_length() >= 3.0 {
        Some(RepresentationTracker::new(&s0, &c.params, 1)?)
    } else {
        None
    };
    let mut rep_sup = 0.0_f64;
    let out = run_from(&c, s0, DiagnosticsTracker::new(&c.params), &mut |e| {
        if let (Event::Record(_, s), Some(r)) = (e, rep.as_mut()) {
            rep_sup = r.push(s)?.into_iter().fold(rep_sup, f64::max);
        }
        Ok(())
    })?;
    let records: Vec<DiagnosticsRecord> = out
        .records
        .iter()
        .enumerate()
        .filter(|(i, r)| i % stride == 0 || r.t == c.stepping.t_end)
        .map(|(_, r)| r.clone())
        .collect();
    let res = balance_residuals(&records, &c.params)?;
    let worst = |f: fn(&crate::diagnostics::BalanceResiduals) -> f64| res.iter().map(f).fold(0.0, f64::max);
    Ok(SweepLevel {
        level,
        nodes: c.grid.nodes,
        dx: grid.dx(),
        diag_interval: c.output.diag_interval,
        mass: worst(|r| r.mass),
        l2: worst(|r| r.l2),
        entropy: worst(|r| r.entropy),
        representation: rep.map(|_| rep_sup),
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Reruns `cfg` on `levels` grids, halving `dx` and the record spacing at
/// each level; the time step follows the stability bound. Levels run on
/// separate threads.
pub fn sweep(cfg: &Config, levels: usize) -> Result<Vec<SweepLevel>> {
    if levels < 2 {
        return Err(Error::Range {
            key: "levels".into(),
            msg: format!("a sweep needs at least 2 levels, got {levels}"),
        });
    }
    cfg.validate()?;
    let results: Vec<Result<SweepLevel>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..levels)
            .map(|l| scope.spawn(move || sweep_level(cfg, l)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::Numerical("sweep worker panicked".into()))))
            .collect()
    });
    results.into_iter().collect()
}

/// `log₂(coarse/fine)`; `None` when both residuals vanish.
pub fn empirical_order(coarse: f64, fine: f64) -> Option<f64> {
    if coarse == 0.0 && fine == 0.0 {
        None
    } else {
        Some((coarse / fine.max(crate::diagnostics::EPS)).log2())
    }
}

fn order_cell(prev: Option<&SweepLevel>, cur: &SweepLevel, f: fn(&SweepLevel) -> f64) -> String {
    match prev {
        None => "-".into(),
        Some(p) => match empirical_order(f(p), f(cur)) {
            None => "exact".into(),
            Some(o) => format!("{o:.6}"),
        },
    }
}

pub const SWEEP_HEADER: &str =
    "level,N,dx,diag_interval,mass_res,l2_res,entropy_res,representation_res,mass_order,l2_order,entropy_order,seconds";

/// Renders `sweep.csv`; orders compare each level with the previous one.
pub fn sweep_table(levels: &[SweepLevel]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for (i, l) in levels.iter().enumerate() {
        let prev = i.checked_sub(1).map(|j| &levels[j]);
        out.push_str(&format!(
            "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{},{:.3}\n",
            l.level,
            l.nodes,
            l.dx,
            l.diag_interval,
            l.mass,
            l.l2,
            l.entropy,
            l.representation.unwrap_or(0.0),
            order_cell(prev, l, |x| x.mass),
            order_cell(prev, l, |x| x.l2),
            order_cell(prev, l, |x| x.entropy),
            l.seconds
        ));
    }
    out
}

pub fn cmd_sweep(cfg: &Config, levels: usize) -> i32 {
    let result = sweep(cfg, levels).and_then(|ls| {
        fs::create_dir_all(&cfg.output.dir)?;
        let table = sweep_table(&ls);
        fs::write(cfg.output.dir.join(SWEEP_FILE), &table)?;
        Ok(table)
    });
    match result {
        Ok(table) => {
            print!("{table}");
            EXIT_OK
        }
        Err(e) => report(&e),
    }
}

/// Runs the acceptance suite and prints its table.
pub fn cmd_verify(cfg: Option<&Config>) -> i32 {
    match acceptance::run_suite(cfg) {
        Ok(report) => {
            print!("{}", report.table());
            eprint!("{}", report.timings());
            if report.all_pass() {
                EXIT_OK
            } else {
                EXIT_VERIFY
            }
        }
        Err(e) => report(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_nodes_halve_dx() {
        assert_eq!(level_nodes(400, 0), 400);
        assert_eq!(level_nodes(400, 1), 799);
        assert_eq!(level_nodes(400, 2), 1597);
    }

    #[test]
    fn orders() {
        assert_eq!(empirical_order(0.0, 0.0), None);
        assert_eq!(empirical_order(4.0, 1.0), Some(2.0));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Range { key: "cfl".into(), msg: String::new() }), 2);
        assert_eq!(
            exit_code(&Error::BlowUp { t: 1.0, node: 3, reason: String::new() }),
            3
        );
        assert_eq!(exit_code(&Error::Numerical("pivot".into())), 3);
    }
}
