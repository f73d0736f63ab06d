//! Parallel catalog verification with deterministic merging.

use std::time::Instant;

use pwpn_core::catalog::{
    enumerate_instances, row_status, verify_entry, CatalogEntry, EnumOptions, InstanceOutcome, ReadingSummary,
    RowStatus,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::CliError;

#[derive(Clone, Debug)]
pub struct RowResult {
    pub id: String,
    pub status: RowStatus,
    pub readings: Vec<ReadingSummary>,
    pub outcomes: Vec<InstanceOutcome>,
    /// Milliseconds per outcome, same order.
    pub elapsed_ms: Vec<u128>,
}

/// Enumerates every row, verifies all instances in parallel and groups the
/// outcomes back by row in manifest order.
pub fn run(entries: &[CatalogEntry], opts: &EnumOptions) -> Result<Vec<RowResult>, CliError> {
    let per_row: Vec<_> = entries
        .par_iter()
        .map(|e| enumerate_instances(e, opts))
        .collect::<Result<_, _>>()?;
    let jobs: Vec<(usize, _)> =
        per_row.into_iter().enumerate().flat_map(|(i, insts)| insts.into_iter().map(move |x| (i, x))).collect();
    let done: Vec<(usize, usize, InstanceOutcome, u128)> = jobs
        .par_iter()
        .map(|(i, inst)| {
            let t = Instant::now();
            let o = verify_entry(inst)?;
            Ok((*i, inst.reading, o, t.elapsed().as_millis()))
        })
        .collect::<Result<_, CliError>>()?;
    let mut rows: Vec<RowResult> = entries
        .iter()
        .map(|e| RowResult {
            id: e.id.clone(),
            status: RowStatus::SkippedSize,
            readings: e.readings.iter().map(|r| ReadingSummary::new(&r.label)).collect(),
            outcomes: Vec::new(),
            elapsed_ms: Vec::new(),
        })
        .collect();
    for (i, ri, o, ms) in done {
        rows[i].readings[ri].add(&o);
        rows[i].outcomes.push(o);
        rows[i].elapsed_ms.push(ms);
    }
    for (row, e) in rows.iter_mut().zip(entries) {
        row.status = row_status(e, &row.readings);
    }
    Ok(rows)
}

fn outcome_json(o: &InstanceOutcome) -> Value {
    json!({
        "entry": o.entry,
        "reading": o.reading,
        "instance": o.instance,
        "claimed": o.claim,
        "claimed_value": o.claimed.to_string(),
        "computed": o.computed.iter().map(|(u, k)| json!({"uniformity": u, "c_count": k})).collect::<Vec<_>>(),
        "first_failure": o.first_failure.map(|(c, u)| json!({"c": c.0, "uniformity": u})),
        "qds_agrees": o.qds_agrees,
        "verdict": if o.pass { "pass" } else { "fail" },
    })
}

fn reading_json(r: &ReadingSummary) -> Value {
    json!({
        "label": r.label,
        "instances": r.instances,
        "passed": r.passed,
        "first_failure": r.first_failure.as_ref().map(outcome_json),
    })
}

/// Deterministic part of the report.
pub fn rows_json(entries: &[CatalogEntry], rows: &[RowResult]) -> Value {
    Value::Array(
        rows.iter()
            .zip(entries)
            .map(|(r, e)| {
                json!({
                    "id": r.id,
                    "reference": e.reference,
                    "note": e.note,
                    "status": r.status.label(),
                    "readings": r.readings.iter().map(reading_json).collect::<Vec<_>>(),
                    "instances": r.outcomes.iter().map(outcome_json).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

/// Per-instance elapsed times, kept apart from the hashed report body.
pub fn timing_json(rows: &[RowResult]) -> Value {
    Value::Array(
        rows.iter()
            .flat_map(|r| {
                r.outcomes
                    .iter()
                    .zip(&r.elapsed_ms)
                    .map(|(o, ms)| json!({"entry": o.entry, "instance": o.instance, "elapsed_ms": *ms as u64}))
            })
            .collect(),
    )
}

/// One CSV line per row.
pub fn summary_csv(rows: &[RowResult]) -> String {
    let mut out = String::from("id,status,readings,instances,passed\n");
    for r in rows {
        let inst: usize = r.readings.iter().map(|x| x.instances).sum();
        let pass: usize = r.readings.iter().map(|x| x.passed).sum();
        let status = r.status.label().replace('"', "'");
        out.push_str(&format!("{},\"{}\",{},{},{}\n", r.id, status, r.readings.len(), inst, pass));
    }
    out
}
