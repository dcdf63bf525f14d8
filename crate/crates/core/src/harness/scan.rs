//! QFI scans over occupation numbers, with the closed form, the perturbative state and the
//! oracle side by side.

use std::io::Write;

use log::warn;
use rayon::prelude::*;

use super::pool::worker_pool;
use crate::bogoliubov::BogoliubovFirstOrder;
use crate::error::{Error, Result};
use crate::fock::{ModeLayout, ModeSubset, StateVector};
use crate::oracle::{coherent_state, GeneratorSpec, Oracle, PURE_STEP};
use crate::C64;
use crate::perturb::{build_generator, transform_with, validity_check};
use crate::qfi::{qfi_fock_closed, qfi_pure, qfi_two_mode_closed, tracing_loss_of_pair, QfiReport, DEFAULT_THETA};

/// Column order of [`write_csv`].
pub const CSV_HEADER: [&str; 9] =
    ["n", "m", "qfi_closed", "qfi_perturb", "qfi_oracle", "tracing_loss", "validity_ratio", "cutoff", "oracle_err"];

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub n: u32,
    pub m: Option<u32>,
    pub qfi_closed: f64,
    pub qfi_perturb: f64,
    pub qfi_oracle: Option<f64>,
    pub tracing_loss: Option<f64>,
    pub validity_ratio: f64,
    pub cutoff: u32,
    pub oracle_err: Option<f64>,
    /// Mean total excitation number of the probe state.
    pub avg_n: f64,
    /// `I(|0⟩)` of the model, for vacuum-subtracted fits.
    pub vacuum_term: f64,
}

/// Relative roundoff floor under the oracle's own error estimate.
pub const ORACLE_RELATIVE_FLOOR: f64 = 1e-6;

/// Accepted `|perturbative − oracle|`: ten times the oracle error, but never below
/// `floor · max(1, |value|)`.
pub fn oracle_tolerance(value: f64, error: f64, floor: f64) -> f64 {
    (10.0 * error).max(floor * value.abs().max(1.0))
}

/// Fails with [`Error::OracleDisagreement`] on the first row outside [`oracle_tolerance`].
pub fn check_rows(rows: &[ScanRow]) -> Result<()> {
    for r in rows {
        if let (Some(oracle), Some(err)) = (r.qfi_oracle, r.oracle_err) {
            let tolerance = oracle_tolerance(r.qfi_perturb, err, ORACLE_RELATIVE_FLOOR);
            if (oracle - r.qfi_perturb).abs() > tolerance {
                return Err(Error::OracleDisagreement { perturbative: r.qfi_perturb, oracle, tolerance });
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub oracle: bool,
    pub keep: Option<ModeSubset>,
    /// Cutoff is the largest occupation in the probe plus this.
    pub headroom: u32,
    pub theta: f64,
    pub dtheta: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { oracle: true, keep: None, headroom: 6, theta: DEFAULT_THETA, dtheta: PURE_STEP }
    }
}

/// One row per `n` for the input `|n_k⟩`.
pub fn scan_fock(spec: &BogoliubovFirstOrder, k: usize, ns: &[u32], opts: &ScanOptions) -> Result<Vec<ScanRow>> {
    if k >= spec.modes() {
        return Err(Error::InvalidMode { mode: k, modes: spec.modes() });
    }
    let points: Vec<(u32, Option<u32>)> = ns.iter().map(|&n| (n, None)).collect();
    run(spec, &points, opts, |n, _| {
        let mut counts = vec![0; spec.modes()];
        counts[k] = n;
        Ok((counts, qfi_fock_closed(spec, n, k)?))
    })
}

/// One row per `(n, m)` for the input `|n_k⟩|m_k'⟩`.
pub fn scan_two_mode(
    spec: &BogoliubovFirstOrder,
    k: usize,
    kprime: usize,
    points: &[(u32, u32)],
    opts: &ScanOptions,
) -> Result<Vec<ScanRow>> {
    let points: Vec<(u32, Option<u32>)> = points.iter().map(|&(n, m)| (n, Some(m))).collect();
    run(spec, &points, opts, |n, m| {
        let m = m.expect("two-mode point");
        let mut counts = vec![0; spec.modes()];
        counts[k] = n;
        counts[kprime] = m;
        Ok((counts, qfi_two_mode_closed(spec, n, k, m, kprime)?))
    })
}

/// `|n_k⟩|n_k'⟩` for each `n`.
pub fn scan_diagonal(
    spec: &BogoliubovFirstOrder,
    k: usize,
    kprime: usize,
    ns: &[u32],
    opts: &ScanOptions,
) -> Result<Vec<ScanRow>> {
    let points: Vec<(u32, u32)> = ns.iter().map(|&n| (n, n)).collect();
    scan_two_mode(spec, k, kprime, &points, opts)
}

fn run<F>(spec: &BogoliubovFirstOrder, points: &[(u32, Option<u32>)], opts: &ScanOptions, probe: F) -> Result<Vec<ScanRow>>
where
    F: Fn(u32, Option<u32>) -> Result<(Vec<u32>, QfiReport)> + Sync,
{
    let k_gen = build_generator(spec)?;
    let gen = if opts.oracle { Some(GeneratorSpec::from_first_order(spec)?) } else { None };
    let pool = worker_pool()?;
    let mut rows = pool.install(|| {
        points
            .par_iter()
            .map(|&(n, m)| {
                let (counts, closed) = probe(n, m)?;
                let cutoff = counts.iter().copied().max().unwrap_or(0) + opts.headroom;
                let layout = ModeLayout::new(spec.modes(), cutoff)?;
                let input = StateVector::fock(layout, &counts)?;
                let pair = transform_with(&k_gen, spec, &input)?;
                let perturb = qfi_pure(&pair);
                if (perturb - closed.qfi).abs() > 1e-10 * perturb.max(1.0) {
                    warn!("closed form {} and perturbative {} differ at n={n}", closed.qfi, perturb);
                }
                let tracing_loss = match &opts.keep {
                    Some(keep) => Some(tracing_loss_of_pair(&pair, keep)?),
                    None => None,
                };
                let (qfi_oracle, oracle_err) = match &gen {
                    Some(gen) => {
                        let est = Oracle::new(gen, layout)?.qfi_pure(&input, opts.dtheta)?;
                        (Some(est.value), Some(est.error))
                    }
                    None => (None, None),
                };
                Ok(ScanRow {
                    n,
                    m,
                    qfi_closed: closed.qfi,
                    qfi_perturb: perturb,
                    qfi_oracle,
                    tracing_loss,
                    validity_ratio: validity_check(opts.theta, perturb).0,
                    cutoff,
                    oracle_err,
                    avg_n: counts.iter().fold(0.0, |acc, &c| acc + c as f64),
                    vacuum_term: spec.vacuum_qfi(),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    rows.sort_by_key(|r| (r.n, r.m));
    Ok(rows)
}

/// Oracle QFI of a coherent probe `|α⟩` on one mode, for the classical contrast.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentRow {
    pub alpha_sqr: f64,
    pub avg_n: f64,
    pub qfi_oracle: f64,
    pub oracle_err: f64,
    pub cutoff: u32,
    pub vacuum_term: f64,
}

/// Cutoff for a coherent probe of mean occupation `mean`: ten standard deviations of tail
/// plus the squeezing headroom.
pub fn coherent_cutoff(mean: f64, headroom: u32) -> u32 {
    (mean + 10.0 * mean.sqrt()).ceil() as u32 + 6 + headroom
}

/// Oracle-only scan of real coherent amplitudes `α = √(|α|²)` on mode `k`.
pub fn scan_coherent(spec: &BogoliubovFirstOrder, k: usize, alpha_sqrs: &[f64], opts: &ScanOptions) -> Result<Vec<CoherentRow>> {
    if k >= spec.modes() {
        return Err(Error::InvalidMode { mode: k, modes: spec.modes() });
    }
    if let Some(bad) = alpha_sqrs.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
        return Err(Error::InvalidArgument(format!("|alpha|^2 must be nonnegative, got {bad}")));
    }
    let gen = GeneratorSpec::from_first_order(spec)?;
    let pool = worker_pool()?;
    pool.install(|| {
        alpha_sqrs
            .par_iter()
            .map(|&alpha_sqr| {
                let cutoff = coherent_cutoff(alpha_sqr, opts.headroom);
                let layout = ModeLayout::new(spec.modes(), cutoff)?;
                let input = coherent_state(layout, k, C64::new(alpha_sqr.sqrt(), 0.0))?;
                let est = Oracle::new(&gen, layout)?.qfi_pure(&input, opts.dtheta)?;
                Ok(CoherentRow {
                    alpha_sqr,
                    avg_n: input.average_particle_number()?,
                    qfi_oracle: est.value,
                    oracle_err: est.error,
                    cutoff,
                    vacuum_term: spec.vacuum_qfi(),
                })
            })
            .collect()
    })
}

/// C-style `%.12e`, e.g. `2.000000000000e+00`.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let x = if x == 0.0 { 0.0 } else { x };
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// Writes rows with [`CSV_HEADER`]; absent values are empty fields.
pub fn write_csv<W: Write>(rows: &[ScanRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    let opt = |x: Option<f64>| x.map(format_float).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.m.map(|m| m.to_string()).unwrap_or_default(),
            format_float(r.qfi_closed),
            format_float(r.qfi_perturb),
            opt(r.qfi_oracle),
            opt(r.tracing_loss),
            format_float(r.validity_ratio),
            r.cutoff.to_string(),
            opt(r.oracle_err),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(format_float(2.0), "2.000000000000e+00");
        assert_eq!(format_float(1.5e-6), "1.500000000000e-06");
        assert_eq!(format_float(0.0), "0.000000000000e+00");
        assert_eq!(format_float(-0.0), "0.000000000000e+00");
        assert_eq!(format_float(-123.25), "-1.232500000000e+02");
        assert_eq!(format_float(1e100), "1.000000000000e+100");
    }

    #[test]
    fn squeezer_scan_without_oracle() {
        let spec = BogoliubovFirstOrder::single_mode_squeezer(0, 1).unwrap();
        let opts = ScanOptions { oracle: false, ..Default::default() };
        let rows = scan_fock(&spec, 0, &[0, 1, 2, 3, 4, 5, 6], &opts).unwrap();
        let got: Vec<f64> = rows.iter().map(|r| r.qfi_perturb).collect();
        let want = [2.0, 6.0, 14.0, 26.0, 42.0, 62.0, 86.0];
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-10);
        }
    }

    #[test]
    fn null_model_scan_is_zero() {
        let spec = BogoliubovFirstOrder::null(1);
        let rows = scan_fock(&spec, 0, &[0, 1, 2], &ScanOptions::default()).unwrap();
        for r in rows {
            assert_eq!(r.qfi_closed, 0.0);
            assert_eq!(r.qfi_perturb, 0.0);
            assert_eq!(r.qfi_oracle, Some(0.0));
        }
    }

    #[test]
    fn csv_layout() {
        let spec = BogoliubovFirstOrder::single_mode_squeezer(0, 1).unwrap();
        let opts = ScanOptions { oracle: false, ..Default::default() };
        let rows = scan_fock(&spec, 0, &[0], &opts).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(lines.next().unwrap(), "0,,2.000000000000e+00,2.000000000000e+00,,,5.000000000000e-07,6,");
    }
}
