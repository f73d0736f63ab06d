//! Exhaustive searches for perfect nonlinear functions over a fixed family,
//! in a deterministic index order with resumable checkpoints.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use pwpn_core::diffspec::{perfect_scan, Mode};
use pwpn_core::{Elt, FieldCtx, Ortho, VFunc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// x^d for 1 <= d <= q - 1
    Monomials,
    /// x^d + a·x^{p^i} for 1 <= d <= q - 1, a != 0, 0 <= i < n
    LinearPlusMonomial,
}

pub enum Target {
    Classical,
    C(Elt),
    Wp(Ortho),
}

impl Target {
    fn mode(&self) -> Mode<'_> {
        match self {
            Target::Classical => Mode::Classical,
            Target::C(c) => Mode::C(*c),
            Target::Wp(w) => Mode::Wp(w),
        }
    }
}

pub struct Space {
    pub ctx: Arc<FieldCtx>,
    pub family: FamilyKind,
}

impl Space {
    pub fn len(&self) -> u64 {
        let q1 = self.ctx.order() as u64 - 1;
        match self.family {
            FamilyKind::Monomials => q1,
            FamilyKind::LinearPlusMonomial => q1 * self.ctx.n() as u64 * q1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The candidate at `idx` with its parameters.
    pub fn candidate(&self, idx: u64) -> Result<(Value, VFunc), CliError> {
        let k = &self.ctx;
        let q1 = k.order() as u64 - 1;
        match self.family {
            FamilyKind::Monomials => {
                let d = idx + 1;
                Ok((json!({"d": d}), VFunc::from_monomial(k, d as i128)?))
            }
            FamilyKind::LinearPlusMonomial => {
                let n = k.n() as u64;
                let d = idx / (n * q1) + 1;
                let i = (idx / q1 % n) as u32;
                let a = Elt((idx % q1) as u32 + 1);
                let pi = (k.p() as u128).pow(i);
                let f = VFunc::from_poly(k, &[(Elt::ONE, d as u128), (a, pi)]);
                Ok((json!({"d": d, "a": a.0, "i": i}), f))
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub search_hash: String,
    pub next_index: u64,
    pub hits: Vec<Value>,
}

impl Checkpoint {
    pub fn load(path: &Path) -> Result<Checkpoint, CliError> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    /// Write-then-rename so an interrupted run never leaves a torn file.
    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, serde_json::to_string(self)?)?;
        std::fs::rename(tmp, path)?;
        Ok(())
    }
}

pub struct Outcome {
    pub hits: Vec<Value>,
    pub next_index: u64,
    pub exhausted: bool,
}

pub struct Run<'a> {
    pub space: &'a Space,
    pub target: &'a Target,
    pub chunk: u64,
    /// stop after this many chunks (simulated interruption)
    pub stop_after: Option<u64>,
    pub checkpoint: Option<&'a Path>,
    pub hits_file: Option<&'a Path>,
    pub search_hash: String,
}

impl Run<'_> {
    /// Scans from `state.next_index`, appending each hit to the hits file in
    /// index order and saving the checkpoint after every chunk.
    pub fn execute(&self, mut state: Checkpoint) -> Result<Outcome, CliError> {
        let total = self.space.len();
        state.search_hash = self.search_hash.clone();
        let mut sink = match self.hits_file {
            Some(p) => Some(OpenOptions::new().create(true).append(true).open(p)?),
            None => None,
        };
        let mut chunks = 0;
        while state.next_index < total {
            if self.stop_after.is_some_and(|s| chunks >= s) {
                break;
            }
            let end = (state.next_index + self.chunk.max(1)).min(total);
            let found: Vec<Option<Value>> = (state.next_index..end)
                .into_par_iter()
                .map(|idx| {
                    let (params, f) = self.space.candidate(idx)?;
                    let scan = perfect_scan(&f, self.target.mode())?;
                    Ok(scan.perfect.then(|| json!({"index": idx, "params": params})))
                })
                .collect::<Result<_, CliError>>()?;
            for hit in found.into_iter().flatten() {
                if let Some(f) = sink.as_mut() {
                    writeln!(f, "{hit}")?;
                }
                state.hits.push(hit);
            }
            state.next_index = end;
            chunks += 1;
            if let Some(p) = self.checkpoint {
                state.save(p)?;
            }
        }
        Ok(Outcome { exhausted: state.next_index >= total, next_index: state.next_index, hits: state.hits })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pwpn_core::ortho::make_c_mult;

    #[test]
    fn monomials_over_f27_with_negation() {
        let ctx = Arc::new(FieldCtx::new(3, 3, None).unwrap());
        let space = Space { ctx: ctx.clone(), family: FamilyKind::Monomials };
        let target = Target::Wp(make_c_mult(&ctx, ctx.neg(Elt::ONE)).unwrap());
        let run = Run { space: &space, target: &target, chunk: 5, stop_after: None, checkpoint: None, hits_file: None, search_hash: String::new() };
        let out = run.execute(Checkpoint::default()).unwrap();
        assert!(out.exhausted);
        assert!(out.hits.iter().any(|h| h["params"]["d"] == 5));
    }

    #[test]
    fn linear_plus_monomial_indexing() {
        let ctx = Arc::new(FieldCtx::new(2, 3, None).unwrap());
        let space = Space { ctx: ctx.clone(), family: FamilyKind::LinearPlusMonomial };
        assert_eq!(space.len(), 7 * 3 * 7);
        let (p, f) = space.candidate(7 * 3 + 7 + 2).unwrap();
        assert_eq!(p, json!({"d": 2, "a": 3, "i": 1}));
        let want = VFunc::from_poly(&ctx, &[(Elt::ONE, 2), (Elt(3), 2)]);
        assert_eq!(f, want);
    }
}
