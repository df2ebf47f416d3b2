//! Counterexamples carry every input of the failed check, so a report can
//! be replayed without the original files.

use addcomb::density::{find_schnirelmann_subinterval, schnirelmann_union_check, DensityError, IntWindow};
use addcomb::direct::{check_pair, PairInstance};
use addcomb::inverse::{verify_certificate, verify_popular_cover, StructureCertificate};
use addcomb::ZqSet;
use anyhow::{anyhow, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Counterexample {
    /// A direct-theorem pair; with `unconditional` the conclusion is checked
    /// whether or not the hypothesis holds.
    Direct { instance: PairInstance, unconditional: bool },
    /// A certificate rejected by its verifier.
    Certificate {
        #[serde(rename = "A")]
        a: ZqSet,
        #[serde(rename = "B")]
        b: ZqSet,
        certificate: StructureCertificate,
    },
    /// A candidate `(A', B')` rejected as a popular cover.
    PopularCover {
        #[serde(rename = "A")]
        a: ZqSet,
        #[serde(rename = "B")]
        b: ZqSet,
        #[serde(rename = "A2")]
        a2: ZqSet,
        #[serde(rename = "B2")]
        b2: ZqSet,
        delta: f64,
        eps: f64,
    },
    /// A pair violating `|A ∪ (A+B)| / N >= α + β(1-α)` on `[N]`.
    SchnirelmannUnion {
        #[serde(rename = "A")]
        a: Vec<u64>,
        #[serde(rename = "B")]
        b: Vec<u64>,
        #[serde(rename = "N")]
        n: u64,
    },
    /// A subinterval search whose postconditions failed.
    Subinterval {
        #[serde(rename = "A")]
        a: Vec<u64>,
        #[serde(rename = "N")]
        n: u64,
        delta: f64,
        eps: f64,
    },
}

/// Whether the check still fails, with the fresh check output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replayed {
    pub index: usize,
    pub still_fails: bool,
    pub detail: Value,
}

pub(crate) fn window_of(members: &[u64], n: u64) -> Result<IntWindow> {
    IntWindow::from_members(1, n.max(1) + 1, members.iter().copied().filter(|&m| m <= n)).map_err(|e| anyhow!("{e}"))
}

pub fn replay_one(index: usize, c: &Counterexample) -> Result<Replayed> {
    let (still_fails, detail) = match c {
        Counterexample::Direct { instance, unconditional } => {
            let (a, b) = instance.sets()?;
            let r = check_pair(instance.theorem, instance.modulus, &a, &b, instance.eps)?;
            let fails = if *unconditional { !r.satisfied } else { !r.passes() };
            (fails, serde_json::to_value(r)?)
        }
        Counterexample::Certificate { a, b, certificate } => {
            let ok = verify_certificate(a, b, certificate)?;
            (!ok, json!({ "verified": ok }))
        }
        Counterexample::PopularCover { a, b, a2, b2, delta, eps } => {
            let ok = verify_popular_cover(a, b, a2, b2, *delta, *eps)?;
            (!ok, json!({ "verified": ok }))
        }
        Counterexample::SchnirelmannUnion { a, b, n } => {
            let r = schnirelmann_union_check(&window_of(a, *n)?, &window_of(b, *n)?, *n)?;
            (!r.holds, serde_json::to_value(r)?)
        }
        Counterexample::Subinterval { a, n, delta, eps } => {
            match find_schnirelmann_subinterval(&window_of(a, *n)?, *n, *delta, *eps) {
                Ok(s) => (false, serde_json::to_value(s)?),
                Err(DensityError::Postcondition(msg)) => (true, json!({ "postcondition": msg })),
                Err(e) => return Err(e.into()),
            }
        }
    };
    Ok(Replayed { index, still_fails, detail })
}
