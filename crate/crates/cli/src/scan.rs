//! Exhaustive `f_max(N)` sweep over modular lattices.
//!
//! For each `N` the sweep walks all pairs `1 <= a, b < N` with
//! `gcd(N,a,b) = 1`. Two pairs generate the same point set exactly when one
//! is a unit multiple of the other mod `N`, so each newly seen pair marks its
//! whole unit orbit as visited and only one shortest-vector computation runs
//! per distinct lattice. Records are produced in `N` order regardless of the
//! worker count, which keeps the CSV byte-identical across runs.

use lattice_tsp_core::error::{Error, Result};
use lattice_tsp_core::exactint::{basis_from_generators, gauss_reduce, GeneratorSet};
use num_integer::Integer;
use rayon::prelude::*;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

pub const SCAN_HEADER: &str = "# lattice-tsp scan v1";
pub const SCAN_COLUMNS: &str = "N,best_a,best_b,lambda_sq,f_max";

/// Per-modulus result row: the largest normalized constant and the
/// lexicographically smallest pair attaining it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRecord {
    pub n: i64,
    pub best_a: i64,
    pub best_b: i64,
    pub lambda_sq: i128,
    pub f_max: f64,
}

impl ScanRecord {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.6}",
            self.n, self.best_a, self.best_b, self.lambda_sq, self.f_max
        )
    }

    pub fn from_csv_row(row: &str) -> Result<ScanRecord> {
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::InvalidParameter(format!("bad scan row: {row:?}")));
        }
        let parse_err = |f: &str| Error::InvalidParameter(format!("bad scan field: {f:?}"));
        Ok(ScanRecord {
            n: fields[0].parse().map_err(|_| parse_err(fields[0]))?,
            best_a: fields[1].parse().map_err(|_| parse_err(fields[1]))?,
            best_b: fields[2].parse().map_err(|_| parse_err(fields[2]))?,
            lambda_sq: fields[3].parse().map_err(|_| parse_err(fields[3]))?,
            f_max: fields[4].parse().map_err(|_| parse_err(fields[4]))?,
        })
    }
}

/// Sweep mode: the full `(a, b)` grid, or the `a = 1` row only (an
/// approximation that misses maximizers with `a != 1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanMode {
    Full,
    FastRowOne,
}

/// Row for one modulus plus sweep accounting.
#[derive(Clone, Copy, Debug)]
pub struct NScan {
    pub record: ScanRecord,
    /// Valid `(a, b)` pairs (unit multiples included).
    pub pairs: u64,
    /// Distinct lattices, i.e. shortest-vector computations performed.
    pub classes: u64,
}

/// Aggregate counters of a sweep.
#[derive(Clone, Copy, Debug, Default)]
pub struct ScanStats {
    pub pairs: u64,
    pub classes: u64,
}

fn lambda_sq_of(n: i64, a: i64, b: i64) -> Result<i128> {
    let (b1, b2) = basis_from_generators(&GeneratorSet::modular(n, a, b))?;
    Ok(gauss_reduce(b1, b2)?.lambda_sq())
}

/// `sqrt(2) <= lambda <= 1.5 sqrt(N)`, exact in integers.
fn check_lambda_range(n: i64, a: i64, b: i64, lambda_sq: i128) -> Result<()> {
    if lambda_sq < 2 || 4 * lambda_sq > 9 * n as i128 {
        return Err(Error::InvalidParameter(format!(
            "invariant violation: lambda_sq = {lambda_sq} outside [2, 2.25*N] for ({n},{a},{b})"
        )));
    }
    Ok(())
}

/// Scan one modulus.
pub fn scan_one(n: i64, mode: ScanMode) -> Result<NScan> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("scan needs N >= 2, got {n}")));
    }
    match mode {
        ScanMode::Full => scan_one_full(n),
        ScanMode::FastRowOne => scan_one_fast(n),
    }
}

fn scan_one_full(n: i64) -> Result<NScan> {
    let nu = n as usize;
    let units: Vec<i64> = (1..n).filter(|k| k.gcd(&n) == 1).collect();
    let mut visited = vec![false; nu * nu];
    let mut best: Option<(i128, i64, i64)> = None;
    let mut pairs = 0u64;
    let mut classes = 0u64;

    for a in 1..n {
        for b in 1..n {
            if visited[(a * n + b) as usize] {
                pairs += 1;
                continue;
            }
            if n.gcd(&a).gcd(&b) != 1 {
                continue;
            }
            pairs += 1;
            classes += 1;
            let lambda_sq = lambda_sq_of(n, a, b)?;
            check_lambda_range(n, a, b, lambda_sq)?;
            if best.is_none_or(|(l, _, _)| lambda_sq > l) {
                best = Some((lambda_sq, a, b));
            }
            for &k in &units {
                visited[((k * a % n) * n + k * b % n) as usize] = true;
            }
        }
    }
    let (lambda_sq, best_a, best_b) = best.expect("(1,1) is always valid for N >= 2");
    Ok(NScan {
        record: ScanRecord {
            n,
            best_a,
            best_b,
            lambda_sq,
            f_max: (lambda_sq as f64 / n as f64).sqrt(),
        },
        pairs,
        classes,
    })
}

fn scan_one_fast(n: i64) -> Result<NScan> {
    let mut best: Option<(i128, i64)> = None;
    for b in 1..n {
        let lambda_sq = lambda_sq_of(n, 1, b)?;
        check_lambda_range(n, 1, b, lambda_sq)?;
        if best.is_none_or(|(l, _)| lambda_sq > l) {
            best = Some((lambda_sq, b));
        }
    }
    let (lambda_sq, best_b) = best.expect("b = 1 is always valid for N >= 2");
    Ok(NScan {
        record: ScanRecord {
            n,
            best_a: 1,
            best_b,
            lambda_sq,
            f_max: (lambda_sq as f64 / n as f64).sqrt(),
        },
        pairs: (n - 1) as u64,
        classes: (n - 1) as u64,
    })
}

/// Scan `min_n..=max_n` in parallel; records come back ordered by `N`.
pub fn scan_range(min_n: i64, max_n: i64, mode: ScanMode) -> Result<(Vec<ScanRecord>, ScanStats)> {
    let scans: Vec<NScan> = (min_n.max(2)..=max_n)
        .into_par_iter()
        .map(|n| scan_one(n, mode))
        .collect::<Result<_>>()?;
    let mut stats = ScanStats::default();
    let records = scans
        .iter()
        .map(|s| {
            stats.pairs += s.pairs;
            stats.classes += s.classes;
            s.record
        })
        .collect();
    Ok((records, stats))
}

/// Outcome of a file-backed scan.
#[derive(Clone, Copy, Debug)]
pub struct ScanSummary {
    pub max_n: i64,
    pub rows: usize,
    pub stats: ScanStats,
    /// First modulus actually computed in this run (resume skipped earlier ones).
    pub resumed_from: Option<i64>,
}

/// Moduli per write batch; an interrupted run loses at most one batch.
const BATCH: i64 = 128;

/// Run (or resume) a scan into `path`. The file holds the version comment,
/// the column header, then one row per modulus in increasing order, so
/// interrupt-and-resume produces the same bytes as a single run.
pub fn run_scan(path: &Path, max_n: i64, resume: bool, mode: ScanMode) -> Result<ScanSummary> {
    if max_n < 2 {
        return Err(Error::InvalidParameter(format!(
            "scan needs --max-n >= 2, got {max_n}"
        )));
    }
    let mut existing: Vec<ScanRecord> = Vec::new();
    if resume && path.exists() {
        existing = read_scan_records(path)?;
        existing.retain(|r| r.n <= max_n);
        for (i, r) in existing.iter().enumerate() {
            if r.n != 2 + i as i64 {
                return Err(Error::InvalidParameter(format!(
                    "resume file is not a contiguous scan from N=2 (row {} has N={})",
                    i, r.n
                )));
            }
        }
    }
    let start = existing.last().map_or(2, |r| r.n + 1);

    // Rewrite the prefix so a partially written last line cannot corrupt the
    // output, then append batch by batch.
    let file = fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{SCAN_HEADER}")?;
    writeln!(w, "{SCAN_COLUMNS}")?;
    for r in &existing {
        writeln!(w, "{}", r.to_csv_row())?;
    }
    w.flush()?;

    let mut stats = ScanStats::default();
    let mut rows = existing.len();
    let mut lo = start;
    while lo <= max_n {
        let hi = (lo + BATCH - 1).min(max_n);
        let batch: Vec<NScan> = (lo..=hi)
            .into_par_iter()
            .map(|n| scan_one(n, mode))
            .collect::<Result<_>>()?;
        for s in &batch {
            writeln!(w, "{}", s.record.to_csv_row())?;
            stats.pairs += s.pairs;
            stats.classes += s.classes;
            rows += 1;
        }
        w.flush()?;
        lo = hi + 1;
    }
    Ok(ScanSummary {
        max_n,
        rows,
        stats,
        resumed_from: (start > 2).then_some(start),
    })
}

/// Parse a scan file, ignoring comment lines and an incomplete trailing line.
pub fn read_scan_records(path: &Path) -> Result<Vec<ScanRecord>> {
    let text = fs::read_to_string(path)?;
    let mut records = Vec::new();
    for line in text.split_inclusive('\n') {
        let complete = line.ends_with('\n');
        let line = line.trim_end_matches('\n').trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') || line == SCAN_COLUMNS {
            continue;
        }
        if !complete {
            break;
        }
        records.push(ScanRecord::from_csv_row(line)?);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_modulus_two() {
        let s = scan_one(2, ScanMode::Full).unwrap();
        assert_eq!(s.record.n, 2);
        assert_eq!((s.record.best_a, s.record.best_b), (1, 1));
        assert_eq!(s.record.lambda_sq, 2);
        assert!((s.record.f_max - 1.0).abs() < 1e-12);
        assert_eq!(s.pairs, 1);
        assert_eq!(s.classes, 1);
    }

    #[test]
    fn dedupe_counts_unit_orbits_once() {
        // N = 7: 36 valid pairs in unit orbits of size phi(7) = 6.
        let s = scan_one(7, ScanMode::Full).unwrap();
        assert_eq!(s.pairs, 36);
        assert_eq!(s.classes, 6);
    }

    #[test]
    fn fast_mode_is_row_one_restriction() {
        let full = scan_one(209, ScanMode::Full).unwrap();
        let fast = scan_one(209, ScanMode::FastRowOne).unwrap();
        assert!(fast.record.f_max <= full.record.f_max + 1e-12);
        assert_eq!(fast.record.best_a, 1);
    }

    #[test]
    fn rows_round_trip() {
        let r = ScanRecord {
            n: 209,
            best_a: 1,
            best_b: 56,
            lambda_sq: 241,
            f_max: 1.073829,
        };
        assert_eq!(ScanRecord::from_csv_row(&r.to_csv_row()).unwrap(), r);
        assert!(ScanRecord::from_csv_row("1,2,3").is_err());
    }
}
