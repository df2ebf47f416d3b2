//! Subcommand execution. Errors are configuration or input problems (exit
//! 2); failed checks come back as counterexamples (exit 1).

use addcomb::constructions::{
    build_ctmn_pair, build_two_scale_pair, coinflip_set, lifted_bohr_pair, CtmnParams, TwoScaleParams,
};
use addcomb::density::{
    density_profile, find_schnirelmann_subinterval, schnirelmann, schnirelmann_union_check, CountingSet,
    DensityError, IntWindow,
};
use addcomb::direct::{check_pair, exhaustive_sweep, random_sweep, PairInstance, Theorem, EXHAUSTIVE_MAX_Q};
use addcomb::equidist::{
    almost_period_search, bohr_members, erdos_turan_bound, kronecker_discrepancy, kronecker_points, window_profile,
};
use addcomb::inverse::{
    detect_structure, error_masses, find_popular_cover_small, verify_certificate, verify_popular_cover, DetectParams,
    StructureCertificate,
};
use addcomb::uniformity::{
    gowers_cyclic, gowers_interval, local_ergodicity_stat, regularity_decompose, u1_scale_estimate, u2_big_u2_chain,
    u2_interval, u2_scale_estimate, Complex64, ScaleSchedule,
};
use addcomb::zq::{pair_counts, popular_sumset};
use addcomb::ZqSet;
use anyhow::{anyhow, bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::*;
use crate::io;
use crate::replay::{replay_one, Counterexample};
use crate::report::{Outcome, Report};

/// Counterexamples kept in a report; the total is always counted.
pub const MAX_COUNTEREXAMPLES: usize = 1000;

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let seed = cli.seed;
    match &cli.command {
        Command::Sumset(a) => sumset(a),
        Command::Popular(a) => popular(a),
        Command::DirectSweep(a) => direct_sweep(a, seed),
        Command::InverseDetect(a) => inverse_detect(a),
        Command::PopularCover(a) => popular_cover(a),
        Command::Discrepancy(a) => discrepancy(a),
        Command::Bohr(a) => bohr(a),
        Command::AlmostPeriod(a) => almost_period(a),
        Command::Gowers(a) => gowers(a),
        Command::ScaleNorm(a) => scale_norm(a),
        Command::Regularity(a) => regularity(a),
        Command::Density(a) => density(a),
        Command::Schnirelmann(a) => schnirelmann_cmd(a),
        Command::Construct(a) => construct(a, seed),
        Command::Replay(a) => replay(a),
    }
}

fn read_pair_files(p: &PairArgs) -> Result<(ZqSet, ZqSet)> {
    let (a, b) = (io::read_zq_set(&p.a)?, io::read_zq_set(&p.b)?);
    if a.modulus() != b.modulus() {
        bail!("A and B have moduli {} and {}", a.modulus(), b.modulus());
    }
    Ok((a, b))
}

fn sumset(p: &PairArgs) -> Result<Outcome> {
    let (a, b) = read_pair_files(p)?;
    let s = a.sumset(&b)?;
    Ok(Outcome::new(json!({
        "Q": a.modulus(),
        "size_a": a.len(),
        "size_b": b.len(),
        "size": s.len(),
        "sumset": s,
    })))
}

fn popular(p: &PopularArgs) -> Result<Outcome> {
    let (a, b) = read_pair_files(&p.sets)?;
    let pop = popular_sumset(&a, &b, p.delta)?;
    let counts = pair_counts(&a, &b)?;
    Ok(Outcome::new(json!({
        "Q": a.modulus(),
        "delta": p.delta,
        "size": pop.len(),
        "popular": pop,
        "counts": counts.counts,
    })))
}

/// Nonempty random subset with a membership probability drawn from [0.05, 0.95].
fn random_nonempty(q: usize, rng: &mut ChaCha8Rng) -> ZqSet {
    loop {
        let p: f64 = rng.gen_range(0.05..0.95);
        let s = ZqSet::from_predicate(q, |_| rng.gen_bool(p));
        if !s.is_empty() {
            return s;
        }
    }
}

#[derive(Serialize)]
struct SweepResults {
    theorem: Theorem,
    modulus: Option<usize>,
    mode: &'static str,
    unconditional: bool,
    tested: u64,
    passed: u64,
    hypothesis_held: u64,
    failures: u64,
}

fn direct_sweep(p: &DirectSweepArgs, seed: u64) -> Result<Outcome> {
    let theorem: Theorem = p.theorem.into();
    let mode = match (p.exhaustive, p.random, &p.pairs) {
        (true, None, None) => "exhaustive",
        (false, Some(_), None) => "random",
        (false, None, Some(_)) => "pairs",
        _ => bail!("choose exactly one of --exhaustive, --random COUNT, --pairs FILE"),
    };
    if mode != "pairs" && p.p.is_none() {
        bail!("--p is required with --{mode}");
    }
    let q = p.p.unwrap_or(0);
    let wrap = |instances: Vec<PairInstance>, unconditional: bool| {
        instances.into_iter().map(|instance| Counterexample::Direct { instance, unconditional }).collect::<Vec<_>>()
    };

    // Library sweeps cover the hypothesis-respecting exhaustive and random modes.
    if !p.unconditional && mode != "pairs" {
        let s = if mode == "exhaustive" {
            exhaustive_sweep(theorem, q, p.eps)?
        } else {
            random_sweep(theorem, q, p.eps, p.random.unwrap_or(0), seed)?
        };
        let failures = s.counterexamples.len() as u64;
        let mut cx = s.counterexamples;
        cx.truncate(MAX_COUNTEREXAMPLES);
        let results = SweepResults {
            theorem,
            modulus: Some(q),
            mode,
            unconditional: false,
            tested: s.tested,
            passed: s.passed,
            hypothesis_held: s.hypothesis_held,
            failures,
        };
        return Ok(Outcome::with_counterexamples(serde_json::to_value(results)?, wrap(cx, false)));
    }

    let instances: Vec<PairInstance> = match mode {
        "pairs" => {
            let path = p.pairs.as_ref().expect("mode pairs");
            let list: Vec<PairInstance> = io::read_json(path)?;
            if let Some(bad) = list.iter().find(|i| i.theorem != theorem) {
                bail!("instance for {} in a {} sweep", bad.theorem.name(), theorem.name());
            }
            list
        }
        "exhaustive" => {
            if q > EXHAUSTIVE_MAX_Q {
                bail!("exhaustive sweeps are limited to Q <= {EXHAUSTIVE_MAX_Q}");
            }
            let masks = 1u64..(1u64 << q);
            masks
                .clone()
                .flat_map(|ma| masks.clone().map(move |mb| (ma, mb)))
                .map(|(ma, mb)| PairInstance {
                    theorem,
                    modulus: q,
                    a: ZqSet::from_mask(q, ma).to_vec(),
                    b: ZqSet::from_mask(q, mb).to_vec(),
                    eps: p.eps,
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..p.random.unwrap_or(0))
                .map(|_| PairInstance {
                    theorem,
                    modulus: q,
                    a: random_nonempty(q, &mut rng).to_vec(),
                    b: random_nonempty(q, &mut rng).to_vec(),
                    eps: p.eps.or(Some(1.0 / q.max(1) as f64)).filter(|_| theorem == Theorem::Kneser),
                })
                .collect()
        }
    };
    let checked: Vec<(bool, bool)> = instances
        .par_iter()
        .map(|inst| {
            let (a, b) = inst.sets()?;
            let r = check_pair(inst.theorem, inst.modulus, &a, &b, inst.eps)?;
            let ok = if p.unconditional { r.satisfied } else { r.passes() };
            Ok((ok, r.hypothesis_holds))
        })
        .collect::<Result<_>>()?;
    let failing: Vec<PairInstance> =
        instances.iter().zip(&checked).filter(|(_, (ok, _))| !ok).map(|(i, _)| i.clone()).collect();
    let failures = failing.len() as u64;
    let results = SweepResults {
        theorem,
        modulus: p.p,
        mode,
        unconditional: p.unconditional,
        tested: instances.len() as u64,
        passed: instances.len() as u64 - failures,
        hypothesis_held: checked.iter().filter(|(_, h)| *h).count() as u64,
        failures,
    };
    let kept = failing.into_iter().take(MAX_COUNTEREXAMPLES).collect();
    Ok(Outcome::with_counterexamples(serde_json::to_value(results)?, wrap(kept, p.unconditional)))
}

fn inverse_detect(p: &InverseArgs) -> Result<Outcome> {
    let (a, b) = io::read_pair(&p.input)?;
    if let Some(path) = &p.certificate {
        let cert: StructureCertificate = io::read_json(path)?;
        let ok = verify_certificate(&a, &b, &cert)?;
        let results = json!({ "verified": ok, "case": cert.case, "masses": error_masses(&cert) });
        let cx = if ok { Vec::new() } else { vec![Counterexample::Certificate { a, b, certificate: cert }] };
        return Ok(Outcome::with_counterexamples(results, cx));
    }
    let params = DetectParams { eps: p.eps, eta: p.eta, k: p.k, max_index: p.max_index, delta: p.delta };
    let report = detect_structure(&a, &b, &params)?;
    let mut cx = Vec::new();
    if let Some(cert) = &report.certificate {
        if !verify_certificate(&a, &b, cert)? {
            cx.push(Counterexample::Certificate { a, b, certificate: cert.clone() });
        }
    }
    Ok(Outcome::with_counterexamples(serde_json::to_value(report)?, cx))
}

fn popular_cover(p: &CoverArgs) -> Result<Outcome> {
    let (a, b) = read_pair_files(&p.sets)?;
    if let (Some(pa), Some(pb)) = (&p.a2, &p.b2) {
        let (a2, b2) = (io::read_zq_set(pa)?, io::read_zq_set(pb)?);
        let ok = verify_popular_cover(&a, &b, &a2, &b2, p.delta, p.eps)?;
        let results = json!({ "verified": ok });
        let cx = if ok {
            Vec::new()
        } else {
            vec![Counterexample::PopularCover { a, b, a2, b2, delta: p.delta, eps: p.eps }]
        };
        return Ok(Outcome::with_counterexamples(results, cx));
    }
    let found = find_popular_cover_small(&a, &b, p.delta, p.eps, p.budget)?;
    Ok(Outcome::new(json!({ "found": found.is_some(), "cover": found })))
}

fn discrepancy(p: &DiscrepancyArgs) -> Result<Outcome> {
    let theta = io::parse_point(&p.theta)?;
    let d = kronecker_discrepancy(&theta, p.n)?;
    let points = kronecker_points(&theta, p.n);
    let et = erdos_turan_bound(&points, p.et_cutoff, p.c0)?;
    Ok(Outcome::new(json!({
        "theta": theta,
        "N": p.n,
        "discrepancy": d,
        "erdos_turan": { "cutoff": p.et_cutoff, "C0": p.c0, "bound": et },
    })))
}

fn bohr(p: &BohrArgs) -> Result<Outcome> {
    let theta = io::parse_point(&p.theta)?;
    let interval = io::parse_interval(&p.interval, p.closed)?;
    let (lo, hi) = io::parse_range(&p.range)?;
    let m = bohr_members(&theta, &interval, lo, hi)?;
    let count = m.window.len();
    let mut out = Outcome::new(Value::Null);
    let mut results = json!({
        "theta": theta,
        "interval": interval,
        "range": [lo, hi],
        "count": count,
        "density": count as f64 / (hi - lo) as f64,
        "ambiguous": m.ambiguous,
    });
    if let Some(w) = p.window {
        let profile = window_profile(&theta, &interval, lo, hi, w)?;
        let mut csv = String::from("x,window_density\n");
        for (x, v) in &profile {
            csv.push_str(&format!("{x},{v}\n"));
        }
        out.csv = Some(csv);
        results["window"] = json!(w);
        results["profile"] = json!(profile);
    }
    out.results = results;
    Ok(out)
}

fn almost_period(p: &AlmostPeriodArgs) -> Result<Outcome> {
    let alphas = io::parse_points(&p.alphas)?;
    let m = almost_period_search(&alphas, p.h, p.x, p.eps)?;
    Ok(Outcome::new(json!({
        "alphas": alphas,
        "H": p.h,
        "x": p.x,
        "eps": p.eps,
        "window": [(p.x - p.eps) * p.h as f64, (p.x + p.eps) * p.h as f64],
        "m": m,
    })))
}

fn gowers(p: &GowersArgs) -> Result<Outcome> {
    let signal = io::read_signal(&p.signal)?;
    if p.interval {
        let norm = gowers_interval(&signal, p.k)?;
        let mut results = json!({ "k": p.k, "interval": [signal.offset + 1, signal.offset + signal.len() as u64], "norm": norm });
        if p.k == 2 {
            results["u2"] = serde_json::to_value(u2_interval(&signal)?)?;
        }
        return Ok(Outcome::new(results));
    }
    let q = p.q.unwrap_or(signal.len());
    if q < signal.len() {
        bail!("Q = {q} is shorter than the signal ({} samples)", signal.len());
    }
    let mut f = signal.values.clone();
    f.resize(q, Complex64::new(0.0, 0.0));
    let norm = gowers_cyclic(&f, p.k)?;
    let mut results = json!({ "k": p.k, "Q": q, "norm": norm });
    if p.k == 2 && signal.bound <= 1.0 {
        results["chain"] = serde_json::to_value(u2_big_u2_chain(&f)?)?;
    }
    let failed = results["chain"]["holds"] == json!(false);
    let mut out = Outcome::new(results);
    out.failed = failed;
    Ok(out)
}

fn scale_norm(p: &ScaleNormArgs) -> Result<Outcome> {
    let signal = io::read_signal(&p.signal)?;
    let schedule = ScaleSchedule::new(io::parse_list(&p.n)?, io::parse_list(&p.h)?)?;
    let f = &signal.values;
    let mut rows = Vec::new();
    let mut csv = String::from("N,H,value,ergodicity\n");
    for (&n, &h) in schedule.n.iter().zip(&schedule.h) {
        let (n, h) = (n as usize, h as usize);
        let value = if p.k == 1 { u1_scale_estimate(f, n, h)? } else { u2_scale_estimate(f, n, h, p.k)? };
        let ergodicity = local_ergodicity_stat(f, n, h)?;
        csv.push_str(&format!("{n},{h},{value},{ergodicity}\n"));
        rows.push(json!({ "N": n, "H": h, "value": value, "ergodicity": ergodicity }));
    }
    let mut out = Outcome::new(json!({ "k": p.k, "scales": rows }));
    out.csv = Some(csv);
    Ok(out)
}

fn regularity(p: &RegularityArgs) -> Result<Outcome> {
    let signal = io::read_signal(&p.signal)?;
    if signal.values.iter().any(|v| v.im != 0.0) {
        bail!("regularity needs a real signal");
    }
    let f: Vec<f64> = signal.values.iter().map(|v| v.re).collect();
    let r = regularity_decompose(&f, p.eps)?;
    Ok(Outcome::new(serde_json::to_value(r)?))
}

fn density(p: &DensityArgs) -> Result<Outcome> {
    let set = io::read_nat_set(&p.set, &p.which)?;
    let cps: Vec<u64> = io::parse_list(&p.checkpoints)?;
    let profile = density_profile(&set, &cps)?;
    let mut out = Outcome::new(serde_json::to_value(&profile)?);
    out.csv = Some(profile.to_csv());
    Ok(out)
}

fn schnirelmann_cmd(p: &SchnirelmannArgs) -> Result<Outcome> {
    if p.n == 0 {
        bail!("N must be positive");
    }
    let set = io::read_nat_set(&p.set, &p.which)?;
    let a = set.rewindow(1, p.n + 1);
    let sigma = schnirelmann(&a, p.n)?;
    let mut results = json!({ "N": p.n, "sigma": [*sigma.numer(), *sigma.denom()] });
    let mut cx = Vec::new();
    let members = |w: &IntWindow| w.iter().collect::<Vec<u64>>();
    if let Some(path) = &p.union_with {
        let b = io::read_nat_set(path, &p.which)?.rewindow(1, p.n + 1);
        let r = schnirelmann_union_check(&a, &b, p.n)?;
        if !r.holds {
            cx.push(Counterexample::SchnirelmannUnion { a: members(&a), b: members(&b), n: p.n });
        }
        results["union"] = serde_json::to_value(r)?;
    }
    if let (Some(delta), Some(eps)) = (p.delta, p.eps) {
        match find_schnirelmann_subinterval(&a, p.n, delta, eps) {
            Ok(s) => results["subinterval"] = serde_json::to_value(s)?,
            Err(DensityError::Postcondition(msg)) => {
                results["subinterval"] = json!({ "postcondition": msg });
                cx.push(Counterexample::Subinterval { a: members(&a), n: p.n, delta, eps });
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Outcome::with_counterexamples(results, cx))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoinflipParams {
    #[serde(default = "two")]
    modulus: u64,
    #[serde(default = "half")]
    p: f64,
}

fn two() -> u64 {
    2
}

fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CtmnPreset {
    alpha: f64,
    r: u64,
    stages: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TwoScalePreset {
    h: u64,
    alpha: f64,
    stages: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BohrLiftParams {
    h: u64,
    theta: String,
    #[serde(rename = "I")]
    i: String,
    #[serde(rename = "J")]
    j: String,
    #[serde(default)]
    a0: u64,
    #[serde(default)]
    b0: u64,
    #[serde(default)]
    closed: bool,
}

/// Either the preset knobs or the full parameter set.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Either<P, F> {
    Preset(P),
    Full(F),
}

fn read_params<T: serde::de::DeserializeOwned>(args: &ConstructArgs, default: Value) -> Result<T> {
    let v: Value = match &args.params {
        Some(path) => io::read_json(path)?,
        None => default,
    };
    serde_json::from_value(v).context("construction parameters")
}

fn sumset_density(a: &IntWindow, b: &IntWindow, bound: u64) -> f64 {
    a.sumset(b).rewindow(1, bound + 1).density_at(bound)
}

fn construct(p: &ConstructArgs, seed: u64) -> Result<Outcome> {
    if p.bound == 0 {
        bail!("--bound must be positive");
    }
    let bound = p.bound;
    let (params, a, b): (Value, IntWindow, Option<IntWindow>) = match p.kind {
        ConstructKind::Coinflip => {
            let c: CoinflipParams = read_params(p, json!({}))?;
            let a = coinflip_set(seed, bound, c.modulus, c.p)?;
            (serde_json::to_value(c)?, a, None)
        }
        ConstructKind::Ctmn => {
            let e: Either<CtmnPreset, CtmnParams> = read_params(p, json!({ "alpha": 0.3, "r": 4, "stages": 3 }))?;
            let full = match e {
                Either::Preset(c) => CtmnParams::preset(c.alpha, c.r, c.stages),
                Either::Full(f) => f,
            };
            let (a, b) = build_ctmn_pair(&full, bound)?;
            (serde_json::to_value(full)?, a, Some(b))
        }
        ConstructKind::TwoScale => {
            let e: Either<TwoScalePreset, TwoScaleParams> =
                read_params(p, json!({ "h": 2, "alpha": 0.3, "stages": 1 }))?;
            let full = match e {
                Either::Preset(c) => TwoScaleParams::preset(c.h, c.alpha, c.stages, seed),
                Either::Full(f) => f,
            };
            let (a, b) = build_two_scale_pair(&full, bound)?;
            (serde_json::to_value(full)?, a, Some(b))
        }
        ConstructKind::BohrLift => {
            let c: BohrLiftParams = read_params(
                p,
                json!({ "h": 1, "theta": "0.6180339887498949", "I": "0,0.2", "J": "0,0.3" }),
            )?;
            let theta = io::parse_point(&c.theta)?;
            let i = io::parse_interval(&c.i, c.closed)?;
            let j = io::parse_interval(&c.j, c.closed)?;
            let (a, b) = lifted_bohr_pair(c.h, &theta, &i, &j, c.a0, c.b0, bound)?;
            (serde_json::to_value(c)?, a, Some(b))
        }
    };
    let members = |w: &IntWindow| w.iter().collect::<Vec<u64>>();
    let mut results = json!({
        "kind": p.kind,
        "bound": bound,
        "params": params,
        "A": members(&a),
        "densities": { "A": a.density_at(bound) },
    });
    match &b {
        Some(b) => {
            results["B"] = json!(members(b));
            results["densities"]["B"] = json!(b.density_at(bound));
            results["densities"]["A+B"] = json!(sumset_density(&a, b, bound));
        }
        None => results["densities"]["A+A"] = json!(sumset_density(&a, &a, bound)),
    }
    Ok(Outcome::new(results))
}

fn replay(p: &ReplayArgs) -> Result<Outcome> {
    let report: Report = io::read_json(&p.input)?;
    let replayed = report
        .counterexamples
        .iter()
        .enumerate()
        .map(|(i, c)| replay_one(i, c))
        .collect::<Result<Vec<_>>>()?;
    let still: Vec<Counterexample> = report
        .counterexamples
        .iter()
        .zip(&replayed)
        .filter(|(_, r)| r.still_fails)
        .map(|(c, _)| c.clone())
        .collect();
    let results = json!({
        "source_version": report.tool_version,
        "replayed": replayed,
        "reproduced": still.len(),
    });
    Ok(Outcome::with_counterexamples(results, still))
}

/// Builds the worker pool; `None` leaves rayon's default (logical cores).
pub fn configure_jobs(jobs: Option<usize>) -> Result<()> {
    if let Some(j) = jobs {
        if j == 0 {
            bail!("--jobs must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global().map_err(|e| anyhow!("{e}"))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::replay::window_of;

    #[test]
    fn random_nonempty_is_seeded() {
        let mut r1 = ChaCha8Rng::seed_from_u64(1);
        let mut r2 = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let s = random_nonempty(9, &mut r1);
            assert!(!s.is_empty());
            assert_eq!(s, random_nonempty(9, &mut r2));
        }
    }

    #[test]
    fn window_of_drops_members_past_n() {
        let w = window_of(&[1, 3, 9], 5).unwrap();
        assert_eq!(w.to_vec(), vec![1, 3]);
    }
}
