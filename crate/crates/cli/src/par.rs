//! Data-parallel drivers over the mergeable accumulators of the core crate.

use pwpn_core::design::{PairCounter, PairStats};
use pwpn_core::diffspec::{Kernel, FULL_SPECTRUM_LIMIT, Mode, SpectrumPart, SpectrumReport};
use pwpn_core::quasigroup::{check_qds_params, difference_counts, qds_report, QElem, QGroup, QdsReport};
use pwpn_core::VFunc;
use rayon::prelude::*;

use crate::CliError;

fn chunks(len: usize) -> Vec<std::ops::Range<usize>> {
    let parts = (rayon::current_num_threads() * 4).clamp(1, len.max(1));
    let step = len.div_ceil(parts).max(1);
    (0..len).step_by(step).map(|s| s..(s + step).min(len)).collect()
}

/// Full spectrum with the a-loop split across workers.
pub fn spectrum(f: &VFunc, mode: Mode<'_>) -> Result<SpectrumReport, CliError> {
    if f.dom().order() > FULL_SPECTRUM_LIMIT {
        return Err(pwpn_core::Error::SizeLimit {
            what: "full spectrum",
            size: f.dom().order() as u128,
            limit: FULL_SPECTRUM_LIMIT as u128,
        }
        .into());
    }
    let kernel = Kernel::new(f, mode)?;
    let range = kernel.a_range();
    let parts: Vec<SpectrumPart> = chunks((range.end - range.start) as usize)
        .into_par_iter()
        .map(|r| SpectrumPart::compute(&kernel, range.start + r.start as u32..range.start + r.end as u32))
        .collect();
    Ok(SpectrumPart::merge(&kernel, parts))
}

/// Difference counts of D split over the first element of each pair.
pub fn qds(q: &QGroup, d: &[QElem], lambda: u64) -> Result<QdsReport, CliError> {
    check_qds_params(q, d, lambda)?;
    let counts = chunks(d.len())
        .into_par_iter()
        .map(|r| difference_counts(q, d, r))
        .reduce(
            || vec![0u32; q.order() as usize],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(qds_report(q, d, lambda, &counts))
}

/// Pair statistics split over the first row of each pair.
pub fn pair_stats(counter: &PairCounter) -> PairStats {
    let parts: Vec<PairStats> = chunks(counter.rows()).into_par_iter().map(|r| counter.stats(r)).collect();
    PairStats::merge(parts)
}
