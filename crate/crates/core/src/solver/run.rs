//! Time loop: adaptive steps that land exactly on diagnostic and snapshot times.

use crate::config::{Config, Integrator};
use crate::diagnostics::{DiagnosticsRecord, DiagnosticsTracker};
use crate::error::{Error, Result};
use crate::scenarios;

use super::{stable_dt, stable_dt_imex, step, step_imex, State};

/// Something the time loop hands to its observer.
#[derive(Debug)]
pub enum Event<'a> {
    /// A diagnostic record and the state it was taken from.
    Record(&'a DiagnosticsRecord, &'a State),
    /// Snapshot number `index`, taken at `index · snap_interval`.
    Snapshot(usize, &'a State),
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub state: State,
    pub records: Vec<DiagnosticsRecord>,
    pub steps: usize,
}

/// Integrates the configured scenario from `t = 0` to `t_end`.
pub fn run(cfg: &Config) -> Result<RunOutput> {
    run_with(cfg, &mut |_| Ok(()))
}

/// As [`run`], reporting every record and snapshot to `observer` as soon as
/// it exists, so partial output survives a blow-up.
pub fn run_with(cfg: &Config, observer: &mut dyn FnMut(Event<'_>) -> Result<()>) -> Result<RunOutput> {
    cfg.validate()?;
    let grid = cfg.grid.build()?;
    let s0 = scenarios::build(&cfg.scenario, &grid)?;
    let tracker = DiagnosticsTracker::new(&cfg.params);
    run_from(cfg, s0, tracker, observer)
}

fn event_tolerance(cfg: &Config) -> f64 {
    1e-9 * cfg.output.diag_interval.min(cfg.output.snap_interval)
}

/// First event index strictly after `t`.
fn next_index(t: f64, interval: f64, tol: f64) -> usize {
    let mut k = (t / interval).floor().max(0.0) as usize;
    while k as f64 * interval <= t + tol {
        k += 1;
    }
    k
}

/// Continues from `state`.
///
/// A fresh tracker emits the record and snapshot of `state` itself first;
/// a resumed tracker (one whose last record sits at `state.t`) does not, so
/// a resumed trajectory reproduces the remaining records of the original
/// one bit for bit.
pub fn run_from(
    cfg: &Config,
    state: State,
    mut tracker: DiagnosticsTracker,
    observer: &mut dyn FnMut(Event<'_>) -> Result<()>,
) -> Result<RunOutput> {
    cfg.validate()?;
    state.validate()?;
    let par = &cfg.params;
    let bc = cfg.bc;
    let t_end = cfg.stepping.t_end;
    let diag = cfg.output.diag_interval;
    let snap = cfg.output.snap_interval;
    let tol = event_tolerance(cfg);
    if state.t > t_end + tol {
        return Err(Error::Contract(format!(
            "start time {} lies beyond t_end = {t_end}",
            state.t
        )));
    }

    let mut records = Vec::new();
    let resumed = tracker.last().is_some();
    if !resumed {
        let rec = tracker.push(&state)?;
        observer(Event::Record(&rec, &state))?;
        records.push(rec);
        if state.t.abs() <= tol {
            observer(Event::Snapshot(0, &state))?;
        }
    }

    let mut kd = next_index(state.t, diag, tol);
    let mut ks = next_index(state.t, snap, tol);
    let mut s = state;
    let mut steps = 0;
    let cfl = cfg.stepping.cfl;

    while s.t < t_end - tol {
        let target = (kd as f64 * diag).min(ks as f64 * snap).min(t_end);
        let dt_max = match cfg.stepping.integrator {
            Integrator::Heun => cfl * stable_dt(&s, par, 1.0)?,
            Integrator::Imex => cfl * stable_dt_imex(&s, par, 1.0)?,
        };
        let landing = s.t + dt_max >= target - tol;
        let dt = if landing { target - s.t } else { dt_max };
        let mut next = match cfg.stepping.integrator {
            Integrator::Heun => step(&s, par, bc, dt)?,
            Integrator::Imex => step_imex(&s, par, bc, dt)?,
        };
        steps += 1;
        if landing {
            next.t = target;
        }
        s = next;
        if !landing {
            continue;
        }

        let at_diag = (s.t - kd as f64 * diag).abs() <= tol;
        let at_end = s.t >= t_end - tol;
        if at_diag || at_end {
            let rec = tracker.push(&s)?;
            observer(Event::Record(&rec, &s))?;
            records.push(rec);
        }
        if at_diag {
            kd += 1;
        }
        if (s.t - ks as f64 * snap).abs() <= tol {
            observer(Event::Snapshot(ks, &s))?;
            ks += 1;
        }
    }
    Ok(RunOutput {
        state: s,
        records,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::GridSpec;
    use crate::scenarios::ScenarioSpec;

    fn small(kind_equilibrium: bool) -> Config {
        let mut cfg = Config::default();
        cfg.grid = GridSpec {
            half_length: 10.0,
            nodes: 201,
        };
        cfg.stepping.t_end = 0.5;
        cfg.output.diag_interval = 0.05;
        cfg.output.snap_interval = 0.25;
        if kind_equilibrium {
            cfg.scenario = ScenarioSpec::equilibrium();
        }
        cfg
    }

    #[test]
    fn equilibrium_stays_put() {
        let mut cfg = small(true);
        cfg.stepping.t_end = 1.0;
        let out = run(&cfg).unwrap();
        assert!(out.state.distance_from_equilibrium() <= 1e-12);
        assert_eq!(out.records.len(), 21);
        assert_eq!(out.state.t, 1.0);
    }

    #[test]
    fn records_and_snapshots_land_on_their_times() {
        let cfg = small(false);
        let mut snaps = Vec::new();
        let out = run_with(&cfg, &mut |e| {
            if let Event::Snapshot(i, s) = e {
                snaps.push((i, s.t));
            }
            Ok(())
        })
        .unwrap();
        assert_eq!(snaps, vec![(0, 0.0), (1, 0.25), (2, 0.5)]);
        for (k, r) in out.records.iter().enumerate() {
            assert_eq!(r.t, k as f64 * 0.05);
        }
    }

    #[test]
    fn t_end_off_the_record_grid_gets_a_final_record() {
        let mut cfg = small(false);
        cfg.stepping.t_end = 0.12;
        let out = run(&cfg).unwrap();
        let times: Vec<f64> = out.records.iter().map(|r| r.t).collect();
        assert_eq!(times, vec![0.0, 0.05, 0.1, 0.12]);
    }

    #[test]
    fn identical_configs_are_bit_identical() {
        let cfg = small(false);
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.state, b.state);
    }

    #[test]
    fn resume_reproduces_the_tail() {
        let cfg = small(false);
        let full = run(&cfg).unwrap();
        let mut half = cfg.clone();
        half.stepping.t_end = 0.25;
        let first = run(&half).unwrap();
        let last = first.records.last().unwrap();
        let tracker = DiagnosticsTracker::resume(&cfg.params, last, &first.state).unwrap();
        let rest = run_from(&cfg, first.state.clone(), tracker, &mut |_| Ok(())).unwrap();
        assert_eq!(rest.state, full.state);
        assert_eq!(&full.records[first.records.len()..], &rest.records[..]);
    }

    #[test]
    fn unstable_step_blows_up() {
        let mut cfg = small(false);
        cfg.stepping.cfl = 50.0;
        cfg.stepping.unchecked_cfl = true;
        let err = run(&cfg).unwrap_err();
        assert!(err.is_blow_up(), "{err}");
    }

    #[test]
    fn imex_runs() {
        let mut cfg = small(false);
        cfg.stepping.integrator = Integrator::Imex;
        let out = run(&cfg).unwrap();
        out.state.validate().unwrap();
    }
}
