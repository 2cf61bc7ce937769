//! Text files: diagnostics CSV, snapshots and checkpoints.
//!
//! Every float is written as `{:.16e}` (17 significant digits), which
//! reads back to the identical double.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::diagnostics::{ComponentNorms, DiagnosticsRecord, COMPONENTS};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::solver::State;

/// Column order of `diagnostics.csv`. The accumulator and rate columns at
/// the end make the balance identities checkable from the file alone.
pub fn diagnostics_columns() -> Vec<String> {
    let mut cols: Vec<String> = [
        "t",
        "reactant_mass",
        "reactant_l2",
        "lyapunov",
        "V",
        "X",
        "Y",
        "Z",
        "W",
        "vmin",
        "vmax",
        "thetamin",
        "thetamax",
        "zmin",
        "zmax",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for c in COMPONENTS {
        for n in ["l2", "linf", "h1"] {
            cols.push(format!("{c}_{n}"));
        }
    }
    cols.extend(
        [
            "reactant_burn_accum",
            "l2_burn_accum",
            "dissipation_accum",
            "source_accum",
            "burn_rate",
            "l2_burn_rate",
            "dissipation_rate",
            "source_rate",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    cols
}

pub fn diagnostics_header() -> String {
    diagnostics_columns().join(",")
}

fn record_values(r: &DiagnosticsRecord) -> Vec<f64> {
    let mut v = vec![
        r.t,
        r.reactant_mass,
        r.reactant_l2,
        r.lyapunov,
        r.dissipation_v,
        r.theta_t_accum,
        r.theta_x_peak,
        r.u_xx_peak,
        r.u_xt_accum,
        r.vmin,
        r.vmax,
        r.thetamin,
        r.thetamax,
        r.zmin,
        r.zmax,
    ];
    for n in &r.norms {
        v.extend([n.l2, n.linf, n.h1]);
    }
    v.extend([
        r.reactant_burn_accum,
        r.l2_burn_accum,
        r.dissipation_accum,
        r.source_accum,
        r.burn_rate,
        r.l2_burn_rate,
        r.dissipation_rate,
        r.source_rate,
    ]);
    v
}

fn record_from_values(v: &[f64]) -> DiagnosticsRecord {
    let mut norms = [ComponentNorms::default(); 4];
    for (c, slot) in norms.iter_mut().enumerate() {
        *slot = ComponentNorms {
            l2: v[15 + 3 * c],
            linf: v[16 + 3 * c],
            h1: v[17 + 3 * c],
        };
    }
    DiagnosticsRecord {
        t: v[0],
        reactant_mass: v[1],
        reactant_l2: v[2],
        lyapunov: v[3],
        dissipation_v: v[4],
        theta_t_accum: v[5],
        theta_x_peak: v[6],
        u_xx_peak: v[7],
        u_xt_accum: v[8],
        vmin: v[9],
        vmax: v[10],
        thetamin: v[11],
        thetamax: v[12],
        zmin: v[13],
        zmax: v[14],
        norms,
        reactant_burn_accum: v[27],
        l2_burn_accum: v[28],
        dissipation_accum: v[29],
        source_accum: v[30],
        burn_rate: v[31],
        l2_burn_rate: v[32],
        dissipation_rate: v[33],
        source_rate: v[34],
    }
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|x| format!("{x:.16e}"))
        .collect::<Vec<_>>()
        .join(",")
}

/// One CSV row, without the trailing newline.
pub fn format_record(r: &DiagnosticsRecord) -> String {
    join(&record_values(r))
}

fn format_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Strict CSV reader: exact header, constant column count, finite or
/// `inf`/`NaN`-free decimal floats only.
pub fn parse_csv(path: &Path, text: &str, header: &str) -> Result<Vec<Vec<f64>>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == header => {}
        Some(h) => return Err(format_err(path, 1, format!("unexpected header `{h}`"))),
        None => return Err(format_err(path, 1, "missing header")),
    }
    let cols = header.split(',').count();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols {
            return Err(format_err(
                path,
                lineno,
                format!("expected {cols} columns, found {}", fields.len()),
            ));
        }
        let row = fields
            .iter()
            .map(|f| parse_float(f).ok_or_else(|| format_err(path, lineno, format!("bad number `{f}`"))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

fn parse_float(f: &str) -> Option<f64> {
    let ok = !f.is_empty()
        && f.chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'));
    let x: f64 = f.parse().ok()?;
    (ok && x.is_finite()).then_some(x)
}

pub fn read_diagnostics(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let text = fs::read_to_string(path)?;
    Ok(parse_csv(path, &text, &diagnostics_header())?
        .iter()
        .map(|r| record_from_values(r))
        .collect())
}

pub fn write_diagnostics(path: &Path, records: &[DiagnosticsRecord]) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "{}", diagnostics_header())?;
    for r in records {
        writeln!(w, "{}", format_record(r))?;
    }
    w.flush()?;
    Ok(())
}

pub const SNAPSHOT_HEADER: &str = "x,v,u,theta,z";

pub fn snapshot_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("snap_{index}.csv"))
}

pub fn write_snapshot(path: &Path, s: &State) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "{SNAPSHOT_HEADER}")?;
    for i in 0..s.len() {
        writeln!(
            w,
            "{}",
            join(&[s.grid.x(i), s.v[i], s.u[i], s.theta[i], s.z[i]])
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `(x, v, u, theta, z)` of a snapshot file.
pub fn read_snapshot(path: &Path) -> Result<[Vec<f64>; 5]> {
    let text = fs::read_to_string(path)?;
    let rows = parse_csv(path, &text, SNAPSHOT_HEADER)?;
    let mut cols: [Vec<f64>; 5] = Default::default();
    for r in rows {
        for (c, x) in cols.iter_mut().zip(r) {
            c.push(x);
        }
    }
    Ok(cols)
}

const CHECKPOINT_MAGIC: &str = "# radgas-checkpoint v1";

pub fn checkpoint_write(s: &State, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "{CHECKPOINT_MAGIC}")?;
    writeln!(
        w,
        "t={:.16e} N={} L={:.16e}",
        s.t,
        s.len(),
        s.grid.half_length()
    )?;
    for i in 0..s.len() {
        writeln!(
            w,
            "{:.16e} {:.16e} {:.16e} {:.16e} {:.16e}",
            s.grid.x(i),
            s.v[i],
            s.u[i],
            s.theta[i],
            s.z[i]
        )?;
    }
    w.flush()?;
    Ok(())
}

fn header_field<'a>(path: &Path, tok: Option<&'a str>, key: &str) -> Result<&'a str> {
    tok.and_then(|t| t.strip_prefix(key))
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| format_err(path, 2, format!("expected `{key}=<value>`")))
}

pub fn checkpoint_read(path: &Path) -> Result<State> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    if lines.next() != Some(CHECKPOINT_MAGIC) {
        return Err(format_err(path, 1, format!("expected `{CHECKPOINT_MAGIC}`")));
    }
    let head = lines.next().ok_or_else(|| format_err(path, 2, "missing header line"))?;
    let mut toks = head.split_whitespace();
    let t = header_field(path, toks.next(), "t")?;
    let n = header_field(path, toks.next(), "N")?;
    let l = header_field(path, toks.next(), "L")?;
    if toks.next().is_some() {
        return Err(format_err(path, 2, "trailing tokens in header"));
    }
    let t = parse_float(t).ok_or_else(|| format_err(path, 2, format!("bad time `{t}`")))?;
    let n: usize = n
        .parse()
        .map_err(|_| format_err(path, 2, format!("bad node count `{n}`")))?;
    let l = parse_float(l).ok_or_else(|| format_err(path, 2, format!("bad half length `{l}`")))?;
    let grid = Grid::new(l, n).map_err(|e| format_err(path, 2, e.to_string()))?;
    let mut s = State::equilibrium(grid);
    s.t = t;
    for i in 0..n {
        let lineno = i + 3;
        let line = lines
            .next()
            .ok_or_else(|| format_err(path, lineno, format!("truncated: expected {n} rows, found {i}")))?;
        let vals = line
            .split_whitespace()
            .map(|f| parse_float(f).ok_or_else(|| format_err(path, lineno, format!("bad number `{f}`"))))
            .collect::<Result<Vec<f64>>>()?;
        if vals.len() != 5 {
            return Err(format_err(path, lineno, format!("expected 5 columns, found {}", vals.len())));
        }
        if (vals[0] - s.grid.x(i)).abs() > 1e-9 * l {
            return Err(format_err(
                path,
                lineno,
                format!("node {i} sits at {} but the grid puts it at {}", vals[0], s.grid.x(i)),
            ));
        }
        s.v[i] = vals[1];
        s.u[i] = vals[2];
        s.theta[i] = vals[3];
        s.z[i] = vals[4];
    }
    if let Some(extra) = lines.find(|l| !l.trim().is_empty()) {
        return Err(format_err(path, n + 3, format!("unexpected trailing row `{extra}`")));
    }
    Ok(s)
}

/// Companion of a checkpoint holding the last diagnostic record, so a
/// resumed run continues every time accumulator exactly.
pub fn sidecar_path(checkpoint: &Path) -> PathBuf {
    let mut p = checkpoint.as_os_str().to_owned();
    p.push(".acc");
    PathBuf::from(p)
}

pub fn sidecar_write(checkpoint: &Path, record: &DiagnosticsRecord) -> Result<()> {
    write_diagnostics(&sidecar_path(checkpoint), std::slice::from_ref(record))
}

pub fn sidecar_read(checkpoint: &Path) -> Result<DiagnosticsRecord> {
    let path = sidecar_path(checkpoint);
    let mut recs = read_diagnostics(&path)?;
    if recs.len() != 1 {
        return Err(format_err(&path, 2, format!("expected one record, found {}", recs.len())));
    }
    Ok(recs.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::{self, ScenarioKind, ScenarioSpec};
    use proptest::prelude::*;

    #[test]
    fn header_has_fixed_prefix_and_width() {
        let cols = diagnostics_columns();
        assert_eq!(cols.len(), 35);
        assert_eq!(&cols[..5], &["t", "reactant_mass", "reactant_l2", "lyapunov", "V"]);
        assert_eq!(cols[15], "v_l2");
        assert_eq!(cols[26], "z_h1");
    }

    #[test]
    fn record_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid::new(10.0, 101).unwrap();
        let s = scenarios::build(&ScenarioSpec::default(), &g).unwrap();
        let mut r = crate::diagnostics::record_of(&s, &Default::default()).unwrap();
        r.source_accum = 1.0 / 3.0;
        r.norms[2].h1 = -0.0;
        let path = dir.path().join("d.csv");
        write_diagnostics(&path, &[r.clone(), r.clone()]).unwrap();
        let back = read_diagnostics(&path).unwrap();
        assert_eq!(back, vec![r.clone(), r]);
    }

    #[test]
    fn strict_reader_rejects_ragged_rows() {
        let p = Path::new("x.csv");
        assert!(parse_csv(p, "a,b\n1,2\n3\n", "a,b").is_err());
        assert!(parse_csv(p, "a,c\n1,2\n", "a,b").is_err());
        assert!(parse_csv(p, "a,b\n1,nan\n", "a,b").is_err());
        assert_eq!(parse_csv(p, "a,b\n1,2\n", "a,b").unwrap(), vec![vec![1.0, 2.0]]);
    }

    #[test]
    fn equilibrium_checkpoint_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.txt");
        let s = State::equilibrium(Grid::new(20.0, 64).unwrap());
        checkpoint_write(&s, &path).unwrap();
        assert_eq!(checkpoint_read(&path).unwrap(), s);
    }

    #[test]
    fn truncated_checkpoint_is_a_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.txt");
        let s = State::equilibrium(Grid::new(20.0, 64).unwrap());
        checkpoint_write(&s, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let cut: String = text.lines().take(30).map(|l| format!("{l}\n")).collect();
        fs::write(&path, cut).unwrap();
        match checkpoint_read(&path) {
            Err(Error::Format { line, .. }) => assert_eq!(line, 31),
            other => panic!("unexpected {other:?}"),
        }
        fs::write(&path, "# radgas-checkpoint v1\nt=0 N=8\n").unwrap();
        assert!(matches!(checkpoint_read(&path), Err(Error::Format { line: 2, .. })));
        fs::write(&path, "garbage\n").unwrap();
        assert!(matches!(checkpoint_read(&path), Err(Error::Format { line: 1, .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn seeded_checkpoint_round_trip(seed in any::<u64>(), t in 0.0f64..100.0, n in 40usize..300) {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("c.txt");
            let g = Grid::new(20.0, n).unwrap();
            let spec = ScenarioSpec { kind: ScenarioKind::SeededRandom, seed, ..ScenarioSpec::default() };
            let mut s = scenarios::build(&spec, &g).unwrap();
            s.t = t;
            checkpoint_write(&s, &path).unwrap();
            let back = checkpoint_read(&path).unwrap();
            prop_assert_eq!(back.t.to_bits(), s.t.to_bits());
            for i in 0..n {
                prop_assert_eq!(back.v[i].to_bits(), s.v[i].to_bits());
                prop_assert_eq!(back.u[i].to_bits(), s.u[i].to_bits());
                prop_assert_eq!(back.theta[i].to_bits(), s.theta[i].to_bits());
                prop_assert_eq!(back.z[i].to_bits(), s.z[i].to_bits());
            }
        }
    }
}
