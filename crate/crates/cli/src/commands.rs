use std::fmt::Write as _;
use std::path::Path;

use clap::Parser;
use progset::analysis::csv::{density_csv, series_csv, window_csv};
use progset::analysis::series::lemma42_conditions;
use progset::analysis::{cor44_check, density_profile, prop31_series, window_profile_set};
use progset::constructions::elim::ElimSchedule;
use progset::constructions::theorem13::Theorem13;
use progset::constructions::{
    bradford_set, countable_elim_set, density_monster, equidistribute_set, theorem11_set, CantorSpec,
    ConstructionManifest, DeltaSource, GlueCertificate, GlueOptions, SequenceSpec,
};
use progset::constructions::cantor::cantor_construction;
use progset::transforms::EnclosedSet;
use progset::witness::{find_ap, find_gp, replay_ap, replay_gp, ApWitness, GpWitness};
use progset::{Error, Interval, LazyIntervalStream, Rational, TailBound};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::args::*;
use crate::failure::Failure;
use crate::output::{read_input, sha256_hex, FileHash, RunManifest};

type Res<T> = Result<T, Failure>;

/// Output bytes of a command, plus the input files it read.
pub struct Produced {
    pub bytes: Vec<u8>,
    pub inputs: Vec<FileHash>,
}

fn to_json<T: Serialize>(v: &T) -> Res<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s.into_bytes())
}

pub fn produce(cli: &Cli) -> Res<Produced> {
    let mut inputs = Vec::new();
    let bits = cli.precision_bits;
    if bits < 16 {
        return Err(Failure::input("--precision-bits must be at least 16"));
    }
    let bytes = match &cli.command {
        Command::Construct(a) => construct(a, bits)?,
        Command::Profile(a) => profile(a, cli.seed, &mut inputs)?,
        Command::Series(a) => series(a, bits, &mut inputs)?,
        Command::Find(a) => find(a, bits, &mut inputs)?,
        Command::Replay(_) => return Err(Failure::input("replay produces no artifact")),
    };
    Ok(Produced { bytes, inputs })
}

fn need<T: Clone>(v: &Option<T>, flag: &str) -> Res<T> {
    v.clone().ok_or_else(|| Failure::input(format!("missing {flag}")))
}

fn delta_source(a: &ConstructArgs) -> DeltaSource {
    if !a.deltas.is_empty() {
        DeltaSource::List(a.deltas.clone())
    } else if let Some(n) = a.count {
        DeltaSource::List(progset::constructions::enumerate::RationalOrder::from(a.order).prefix(n))
    } else {
        DeltaSource::Enumeration(a.order.into())
    }
}

fn cantor_spec(a: &Option<Rational>, t: &[Rational], tail: &Option<Rational>, weighted: &Option<Rational>) -> Res<CantorSpec> {
    match (a, t.is_empty()) {
        (Some(a), true) => Ok(CantorSpec::middle_a(a.clone())?),
        (None, false) => Ok(CantorSpec::generic(t.to_vec(), tail.clone(), weighted.clone())?),
        _ => Err(Failure::input("give exactly one of --a or --t")),
    }
}

fn construct(a: &ConstructArgs, bits: u32) -> Res<Vec<u8>> {
    let depth = a.depth.or(a.horizon);
    let default_depth = match a.kind {
        Kind::Equidistribute => 10,
        Kind::Elim | Kind::Bradford => 20,
        Kind::Theorem13 | Kind::Theorem11 => 1,
        Kind::Monster => 4,
        Kind::Cantor => 8,
    };
    let depth = depth.unwrap_or(default_depth);
    if depth == 0 {
        return Err(Failure::input("--depth must be positive"));
    }
    let eps = || need(&a.epsilon, "--epsilon");
    let glued = || -> Res<Theorem13> {
        Ok(Theorem13::build(depth as usize, &SequenceSpec::identity(), &GlueOptions::default())?)
    };
    let certs = |t: &Theorem13| -> Res<Vec<serde_json::Value>> {
        t.certificates.iter().map(|c| serde_json::to_value(c).map_err(Failure::from)).collect()
    };
    let manifest = match a.kind {
        Kind::Equidistribute => ConstructionManifest::build(&equidistribute_set(&eps()?)?, depth, vec![])?,
        Kind::Elim => {
            let (c, _) = countable_elim_set(ElimSchedule::new(delta_source(a), eps()?)?)?;
            ConstructionManifest::build(&c, depth, vec![])?
        }
        Kind::Bradford => {
            let (c, _) = bradford_set(&eps()?, delta_source(a))?;
            ConstructionManifest::build(&c, depth, vec![])?
        }
        Kind::Theorem13 => {
            let t = glued()?;
            ConstructionManifest::build(&t.construction(), depth, certs(&t)?)?
        }
        Kind::Theorem11 => {
            let t = glued()?;
            let (kept, c, _) = theorem11_set(&t, &a.cutoff, bits)?;
            ConstructionManifest::build(&c, depth, certs(&t)?)?.with_kept(kept)
        }
        Kind::Monster => {
            let (c, _) = density_monster(&eps()?, a.target.into(), depth as u32, a.cap, bits)?;
            ConstructionManifest::build(&c, depth, vec![])?
        }
        Kind::Cantor => {
            if let Some(x) = &a.a {
                if x >= &Rational::frac(1, 3) {
                    return Err(Error::param("a", format!("middle-a sets need 0 < a < 1/3, got {x}")).into());
                }
            }
            let spec = cantor_spec(&a.a, &a.t, &None, &None)?;
            spec.validate(depth as usize)?;
            ConstructionManifest::build(&cantor_construction(&spec), depth, vec![])?
        }
    };
    to_json(&manifest)
}

fn load_manifest(path: &Path, inputs: &mut Vec<crate::output::FileHash>) -> Res<ConstructionManifest> {
    let bytes = read_input(path, inputs)?;
    Ok(serde_json::from_slice(&bytes)?)
}

fn grid(g: &GridArgs, seed: u64) -> Res<Vec<Rational>> {
    let mut pts = g.t.clone();
    let mut range = None;
    if let Some(spec) = &g.grid {
        let parts: Vec<&str> = spec.split(':').collect();
        let [lo, step, hi] = parts[..] else {
            return Err(Failure::input(format!("grid `{spec}` is not lo:step:hi")));
        };
        let (lo, step, hi) = (parse_q(lo).map_err(Failure::input)?, parse_q(step).map_err(Failure::input)?, parse_q(hi).map_err(Failure::input)?);
        if !step.is_positive() || hi < lo {
            return Err(Failure::input("grid needs step > 0 and lo <= hi"));
        }
        let count = (&hi - &lo).checked_div(&step)?.floor();
        if count > 1_000_000u32.into() {
            return Err(Failure::input("grid has more than a million points"));
        }
        let mut x = lo.clone();
        while x <= hi {
            pts.push(x.clone());
            x = &x + &step;
        }
        range = Some((lo, hi));
    }
    if g.sample > 0 {
        let (lo, hi) = range
            .or_else(|| Some((pts.iter().min()?.clone(), pts.iter().max()?.clone())))
            .ok_or_else(|| Failure::input("--sample needs --grid or --t for its range"))?;
        let scale = Rational::int(1 << 16);
        let a = (&lo * &scale).ceil();
        let b = (&hi * &scale).floor();
        let (a, b): (i64, i64) = (
            a.try_into().map_err(|_| Failure::input("grid range too large to sample"))?,
            b.try_into().map_err(|_| Failure::input("grid range too large to sample"))?,
        );
        if a <= b {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..g.sample {
                pts.push(Rational::frac(rng.gen_range(a..=b), 1 << 16));
            }
        }
    }
    if pts.is_empty() {
        return Err(Failure::input("empty grid: give --grid, --t or --sample"));
    }
    pts.sort();
    pts.dedup();
    Ok(pts)
}

fn profile(a: &ProfileArgs, seed: u64, inputs: &mut Vec<FileHash>) -> Res<Vec<u8>> {
    let m = load_manifest(&a.set, inputs)?;
    let ts = grid(&a.grid, seed)?;
    let (lo, hi) = (ts.first().expect("non-empty").clone(), ts.last().expect("non-empty").clone());
    match a.mode {
        ProfileMode::Window => {
            let kept = m.kept_on(&Interval::closed(lo, hi + Rational::one())?)?;
            Ok(window_csv(&window_profile_set(&kept, &ts)).into_bytes())
        }
        ProfileMode::Density => {
            if !lo.is_positive() {
                return Err(Error::param("t", format!("window half-width must be positive, got {lo}")).into());
            }
            let kept = match &m.kept {
                Some(k) => k.clone(),
                None => {
                    let from = if a.one_sided { a.center.clone() } else { &a.center - &hi };
                    EnclosedSet::exact(m.kept_on(&Interval::closed(from, &a.center + &hi)?)?)
                }
            };
            Ok(density_csv(&density_profile(&kept, &ts, &a.center, a.one_sided)?).into_bytes())
        }
    }
}

fn series(a: &SeriesArgs, bits: u32, inputs: &mut Vec<FileHash>) -> Res<Vec<u8>> {
    match a.criterion {
        Criterion::Prop31 => {
            let m = load_manifest(&need(&a.set, "--set")?, inputs)?;
            let region = Interval::closed(Rational::zero(), a.r0.clone())?;
            if !m.complete_on.as_ref().is_some_and(|c| c.contains_interval(&region)) {
                eprintln!("note: removed set is not known to be complete on {region}; terms use the written batches only");
            }
            Ok(series_csv(&prop31_series(&m.removed_union(), &a.r0, a.n, bits)?).into_bytes())
        }
        Criterion::Lemma42 => {
            let m = load_manifest(&need(&a.set, "--set")?, inputs)?;
            let all = m.removed_union();
            let positive: Vec<Interval> =
                all.parts().iter().filter(|p| p.bounds().is_some_and(|(u, _)| u.is_positive())).cloned().collect();
            if positive.len() < all.len() {
                eprintln!("note: skipped {} removed parts not inside (0, inf)", all.len() - positive.len());
            }
            let r = lemma42_conditions(&progset::IntervalSet::normalize(positive), bits)?;
            let mut out = String::from("n,u,v,ratio,log_lo,log_hi,cum_ratio,cum_log_lo,cum_log_hi\n");
            let mut cr = Rational::zero();
            let mut cl = progset::Bracket::exact(Rational::zero());
            for (i, row) in r.rows.iter().enumerate() {
                cr = cr + &row.ratio;
                cl = cl.add(&row.log);
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    i + 1,
                    row.u,
                    row.v,
                    row.ratio,
                    row.log.lo,
                    row.log.hi,
                    cr,
                    cl.lo,
                    cl.hi
                );
            }
            eprintln!(
                "stepping stone: {}; tail bound: {}; label: {}",
                r.stepping_stone, m.tail_bound, r.label
            );
            Ok(out.into_bytes())
        }
        Criterion::Cor44 => {
            let spec = cantor_spec(&a.a, &a.t, &a.tail, &a.weighted_tail)?;
            let r = cor44_check(&spec)?;
            let name = match &spec {
                CantorSpec::MiddleA { a } => format!("middle_a {a}"),
                CantorSpec::Generic { t, .. } => format!("generic {} lengths", t.len()),
            };
            let show = |v: &Option<Rational>| v.as_ref().map_or("unknown".to_string(), Rational::to_string);
            Ok(format!(
                "spec,mass,weighted,mass_below_one,weighted_finite,verdict,label\n{},{},{},{},{},{},{}\n",
                name,
                show(&r.mass),
                show(&r.weighted),
                r.mass_below_one,
                r.weighted_finite,
                r.verdict,
                r.label
            )
            .into_bytes())
        }
    }
}

fn manifest_stream(m: &ConstructionManifest) -> Res<LazyIntervalStream> {
    let batches = m.removed.clone();
    let tail = m.tail()?;
    let last = batches.len() as u64;
    Ok(LazyIntervalStream::new(
        move |d| {
            batches
                .get(d as usize)
                .cloned()
                .ok_or_else(|| Error::InsufficientDepth(format!("manifest holds {last} batches")))
        },
        move |d| if d + 1 >= last { Ok(tail.clone()) } else { Ok(TailBound::Unbounded) },
    ))
}

fn find(a: &FindArgs, bits: u32, inputs: &mut Vec<FileHash>) -> Res<Vec<u8>> {
    match a.target {
        FindTarget::Ap => {
            let m = load_manifest(&need(&a.set, "--set")?, inputs)?;
            let delta = need(&a.delta, "--delta")?;
            let w = find_ap(&manifest_stream(&m)?, &delta, m.depth as i64 - 1, a.terms)?;
            to_json(&w)
        }
        FindTarget::Gp => {
            let spec = cantor_spec(&a.a, &a.t, &a.tail, &a.weighted_tail)?;
            let q = need(&a.q, "--q")?;
            let w = find_gp(&spec, &q, a.cantor_depth, a.ap_depth, bits.min(64), bits)?;
            to_json(&w)
        }
    }
}

/// Checks a witness, a glued construction, or a run manifest. Returns a one-line summary.
pub fn replay(path: &Path) -> Res<String> {
    let bytes = std::fs::read(path).map_err(|e| Failure::io(path, e))?;
    let v: serde_json::Value = serde_json::from_slice(&bytes)?;
    let malformed = |e: serde_json::Error| Failure::Core(Error::Certificate(format!("malformed: {e}")));
    match v.get("kind").and_then(|k| k.as_str()) {
        Some("ap") => {
            let w: ApWitness = serde_json::from_value(v).map_err(malformed)?;
            replay_ap(&w)?;
            Ok(format!("ap witness verified: {} terms, margin {}", w.certified_depth + 1, w.existence_margin))
        }
        Some("gp") => {
            let w: GpWitness = serde_json::from_value(v).map_err(malformed)?;
            replay_gp(&w)?;
            Ok(format!("gp witness verified: {} terms, margin {}", w.certified_depth + 1, w.existence_margin))
        }
        Some("run") => {
            let m: RunManifest = serde_json::from_value(v).map_err(malformed)?;
            rerun(&m)?;
            Ok(format!("run reproduced: {} {}", m.command, m.output.sha256))
        }
        Some("theorem13") | Some("theorem11") => replay_glued(v),
        Some(k) => Err(Failure::input(format!("nothing to replay for kind `{k}`"))),
        None => Err(Failure::input("JSON has no `kind`")),
    }
}

fn replay_glued(v: serde_json::Value) -> Res<String> {
    let malformed = |e: serde_json::Error| Failure::Core(Error::Certificate(format!("malformed: {e}")));
    let m: ConstructionManifest = serde_json::from_value(v).map_err(malformed)?;
    let certs = m
        .certificates
        .iter()
        .map(|c| serde_json::from_value::<GlueCertificate>(c.clone()).map_err(malformed))
        .collect::<Res<Vec<_>>>()?;
    let t = Theorem13::from_certificates(certs)?;
    let rebuilt = if m.kind == "theorem11" {
        let cutoff: Rational = serde_json::from_value(m.params["cutoff"].clone()).map_err(malformed)?;
        let bits = m.params["precision_bits"].as_u64().ok_or_else(|| Error::Certificate("missing precision".into()))? as u32;
        let (kept, c, _) = theorem11_set(&t, &cutoff, bits)?;
        ConstructionManifest::build(&c, m.depth, m.certificates.clone())?.with_kept(kept)
    } else {
        ConstructionManifest::build(&t.construction(), m.depth, m.certificates.clone())?
    };
    if rebuilt != m {
        return Err(Error::Certificate("construction differs from the one its certificates produce".into()).into());
    }
    Ok(format!("{} certificates verified for {} windows", m.certificates.len(), t.depth()))
}

fn rerun(m: &RunManifest) -> Res<()> {
    for i in &m.inputs {
        let bytes = std::fs::read(&i.path).map_err(|e| Failure::io(Path::new(&i.path), e))?;
        if sha256_hex(&bytes) != i.sha256 {
            return Err(Error::Certificate(format!("input {} changed since the run", i.path)).into());
        }
    }
    let mut argv = vec![
        "progset".to_string(),
        "--precision-bits".into(),
        m.precision_bits.to_string(),
        "--seed".into(),
        m.seed.to_string(),
    ];
    argv.extend(m.args.iter().cloned());
    let cli = Cli::try_parse_from(&argv).map_err(|e| Failure::input(format!("stored arguments: {e}")))?;
    let p = produce(&cli)?;
    let got = sha256_hex(&p.bytes);
    if got != m.output.sha256 {
        return Err(Error::Certificate(format!("output hash {got} differs from recorded {}", m.output.sha256)).into());
    }
    Ok(())
}
