//! Experiment drivers behind the command-line verbs. Each one takes a
//! validated config, computes rows, and writes CSV.

pub mod bench;
pub mod driven_qubit;
pub mod jch_mott;
pub mod spin_chain;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

/// Fewest timing repeats accepted.
pub const MIN_REPEATS: usize = 5;

/// Parses a TOML config; a missing path yields the defaults.
pub fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            parse_config(&text)
        }
    }
}

pub fn parse_config<T: DeserializeOwned>(text: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// `|x - x_ref| / max(|x_ref|, 1e-300)`.
pub fn relative_error(x: f64, x_ref: f64) -> f64 {
    (x - x_ref).abs() / x_ref.abs().max(1e-300)
}

/// Wall-clock statistics over repeated runs, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimingStats {
    pub repeats: usize,
    pub median_s: f64,
    pub min_s: f64,
    pub max_s: f64,
}

/// Times `f` after one discarded warm-up call. `setup` runs before every
/// call, outside the timed region, and its output is handed to `f`.
pub fn time_repeated<S, T>(
    repeats: usize,
    mut setup: impl FnMut() -> S,
    mut f: impl FnMut(S) -> Result<T>,
) -> Result<TimingStats> {
    if repeats < MIN_REPEATS {
        return Err(Error::InvalidParameter(format!("repeats must be >= {MIN_REPEATS}, got {repeats}")));
    }
    std::hint::black_box(f(setup())?);
    let mut times = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let input = setup();
        let start = Instant::now();
        let out = f(input)?;
        let elapsed = start.elapsed().as_secs_f64();
        std::hint::black_box(out);
        // A zero reading means the clock could not resolve the call.
        times.push(elapsed.max(1e-9));
    }
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if repeats % 2 == 1 {
        times[repeats / 2]
    } else {
        0.5 * (times[repeats / 2 - 1] + times[repeats / 2])
    };
    Ok(TimingStats {
        repeats,
        median_s: median,
        min_s: times[0],
        max_s: times[repeats - 1],
    })
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Writes serializable rows as CSV with a header row and LF line endings.
pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_rows_to(BufWriter::new(file), rows)
}

pub fn write_rows_to<W: Write, T: Serialize>(w: W, rows: &[T]) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    for r in rows {
        wr.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    wr.flush()?;
    Ok(())
}

/// `dir/stem_suffix.csv` next to `out`.
pub fn sibling_path(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    out.with_file_name(format!("{stem}_{suffix}.csv"))
}

/// Common check for the config's optional `experiment` key.
pub(crate) fn check_experiment_name(found: &Option<String>, expected: &str) -> Result<()> {
    match found {
        Some(name) if name != expected => Err(Error::InvalidParameter(format!(
            "config is for experiment '{name}', not '{expected}'"
        ))),
        _ => Ok(()),
    }
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}
