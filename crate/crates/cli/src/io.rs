//! Input parsing for set, signal and parameter files and for inline lists.

use std::fs;
use std::path::Path;

use addcomb::density::IntWindow;
use addcomb::equidist::{TorusInterval, TorusPoint};
use addcomb::uniformity::{signal_values, Complex64, SignalWindow};
use addcomb::ZqSet;
use anyhow::{anyhow, bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_zq_set(path: &Path) -> Result<ZqSet> {
    ZqSet::parse_any(&read_text(path)?).with_context(|| format!("parsing set file {}", path.display()))
}

#[derive(Deserialize)]
struct PairFile {
    #[serde(rename = "A")]
    a: ZqSet,
    #[serde(rename = "B")]
    b: ZqSet,
}

/// `{"A": set, "B": set}` on a common modulus.
pub fn read_pair(path: &Path) -> Result<(ZqSet, ZqSet)> {
    let p: PairFile = read_json(path)?;
    if p.a.modulus() != p.b.modulus() {
        bail!("A and B have moduli {} and {}", p.a.modulus(), p.b.modulus());
    }
    Ok((p.a, p.b))
}

#[derive(Deserialize)]
struct SignalObject {
    #[serde(default)]
    offset: u64,
    #[serde(with = "signal_values")]
    values: Vec<Complex64>,
}

/// A bare array of samples or `{"offset", "values"}`.
pub fn read_signal(path: &Path) -> Result<SignalWindow> {
    let v: Value = read_json(path)?;
    let (offset, values) = if v.is_array() {
        (0, signal_values::deserialize(v).map_err(|e| anyhow!("signal samples: {e}"))?)
    } else {
        let o: SignalObject = serde_json::from_value(v).context("signal object")?;
        (o.offset, o.values)
    };
    if values.is_empty() {
        bail!("signal {} is empty", path.display());
    }
    Ok(SignalWindow::new(offset, values))
}

/// Positive integers from a JSON array, `{"elements": [..]}`, a construct
/// report (picking `which` from its results), or whitespace-separated text.
pub fn read_nat_set(path: &Path, which: &str) -> Result<IntWindow> {
    let text = read_text(path)?;
    let members: Vec<u64> = if text.trim_start().starts_with(['[', '{']) {
        let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let list = match &v {
            Value::Array(_) => &v,
            Value::Object(o) if o.contains_key("elements") => &o["elements"],
            Value::Object(o) => o
                .get("results")
                .and_then(|r| r.get(which))
                .or_else(|| o.get(which))
                .ok_or_else(|| anyhow!("no set named {which:?} in {}", path.display()))?,
            _ => bail!("{} holds no integer list", path.display()),
        };
        serde_json::from_value(list.clone()).with_context(|| format!("integer list in {}", path.display()))?
    } else {
        text.split_whitespace()
            .map(|t| t.parse::<u64>().with_context(|| format!("bad integer {t:?}")))
            .collect::<Result<_>>()?
    };
    if members.contains(&0) {
        bail!("sets of naturals start at 1; found 0");
    }
    let hi = members.iter().max().map_or(2, |m| m + 1);
    IntWindow::from_members(1, hi, members).map_err(|e| anyhow!("{e}"))
}

/// `p/q` exactly, otherwise a decimal reduced mod 1.
pub fn parse_point(s: &str) -> Result<TorusPoint> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let (p, q): (u64, u64) = (p.trim().parse()?, q.trim().parse()?);
        return TorusPoint::rational(p, q).map_err(|e| anyhow!("{e}"));
    }
    let x: f64 = s.parse().with_context(|| format!("bad number {s:?}"))?;
    TorusPoint::float(x).map_err(|e| anyhow!("{e}"))
}

pub fn parse_points(s: &str) -> Result<Vec<TorusPoint>> {
    s.split(',').map(parse_point).collect()
}

/// `LEFT,LENGTH` as decimals, or `a/q,b/q` for the rational arc `[a/q, b/q)`.
pub fn parse_interval(s: &str, closed: bool) -> Result<TorusInterval> {
    let (l, r) = s.split_once(',').ok_or_else(|| anyhow!("interval {s:?} needs two comma-separated parts"))?;
    if l.contains('/') || r.contains('/') {
        let frac = |t: &str| -> Result<(u64, u64)> {
            let (p, q) = t.trim().split_once('/').ok_or_else(|| anyhow!("{t:?} is not p/q"))?;
            Ok((p.trim().parse()?, q.trim().parse()?))
        };
        let ((a, q1), (b, q2)) = (frac(l)?, frac(r)?);
        if q1 != q2 {
            bail!("rational interval endpoints need a common denominator");
        }
        if closed {
            bail!("--closed applies to decimal intervals only");
        }
        return TorusInterval::rational(a, b, q1).map_err(|e| anyhow!("{e}"));
    }
    let (left, len): (f64, f64) = (l.trim().parse()?, r.trim().parse()?);
    let iv = if closed { TorusInterval::closed(left, len) } else { TorusInterval::half_open(left, len) };
    iv.map_err(|e| anyhow!("{e}"))
}

pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    s.split(',')
        .map(|t| t.trim().parse::<T>().with_context(|| format!("bad list entry {t:?}")))
        .collect()
}

pub fn parse_range(s: &str) -> Result<(u64, u64)> {
    let v: Vec<u64> = parse_list(s)?;
    match v[..] {
        [lo, hi] if lo < hi => Ok((lo, hi)),
        _ => bail!("range {s:?} must be LO,HI with LO < HI"),
    }
}
