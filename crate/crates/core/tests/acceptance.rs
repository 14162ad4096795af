//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use vbrsched::admission::{feasible, Algorithm};
use vbrsched::bench::{count_conflicts, run_bench, BenchConfig, Regime};
use vbrsched::envelope::{Bandwidth, StreamEnvelope, Tick};
use vbrsched::gen::{random_envelope, rng, EnvelopeParams};
use vbrsched::multistream::{exact_small, Objective};
use vbrsched::reductions::{
    colors_from_span, graph_to_stringpack, min_group_respecting_span, scp_brute, scp_to_2ss,
    self_aligning, stringpack_brute, stringpack_to_mss, verify_self_aligning, vertex_color_brute,
    BitString, Graph, ScpInstance, StringPackInstance,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let took = start.elapsed();
    check(took < limit, || format!("took {took:.1?}, limit {limit:?}"))?;
    Ok(took)
}

fn random_pair(
    r: &mut ChaCha8Rng,
    max_peaks: usize,
    max_len: Tick,
    lo: u64,
    hi: u64,
) -> (StreamEnvelope, StreamEnvelope) {
    let one = |r: &mut ChaCha8Rng| {
        let n = r.gen_range(1..=max_peaks);
        let len = r.gen_range(1..=max_len);
        random_envelope(r, &EnvelopeParams::new(n, lo, hi, len).unwrap())
    };
    (one(r), one(r))
}

/// Three solvers agree on random two-stream instances.
fn c1_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut admitted = 0;
    let mut rejected = 0;
    for i in 0..1200 {
        let b = r.gen_range(1..=20);
        // Most instances keep single peaks within B so that pair sums reach
        // 2B; the rest allow single peaks up to 2B and must be refused alike.
        let hi = if i < 1000 { b } else { 2 * b };
        let (s1, s2) = random_pair(&mut r, 25, 10, 0, hi);
        let res = Algorithm::ALL.map(|a| a.run(&s1, &s2, Bandwidth(b)).map(|x| x.displacement));
        check(res[0] == res[1] && res[1] == res[2], || {
            format!("instance {i}: B={b} s1={s1} s2={s2} got {res:?}")
        })?;
        match res[0] {
            Ok(_) => admitted += 1,
            Err(_) => rejected += 1,
        }
    }
    check(admitted >= 1000, || {
        format!("only {admitted} admissible instances")
    })?;
    let took = within(Duration::from_secs(30), start)?;
    Ok(format!(
        "{admitted} admissible + {rejected} refused instances agree ({took:.1?})"
    ))
}

/// No displacement below the reported one is feasible.
fn c2_minimality() -> Outcome {
    let mut r = rng(2);
    let mut nonzero = 0;
    for i in 0..300 {
        let b = r.gen_range(1..=20);
        let (s1, s2) = random_pair(&mut r, 20, 10, 0, b);
        check(s1.len() <= 200 && s2.len() <= 200, || {
            "horizon above 200".into()
        })?;
        let t = Algorithm::Morph
            .run(&s1, &s2, Bandwidth(b))
            .unwrap()
            .displacement;
        check(feasible(&s1, &s2, t, Bandwidth(b)).unwrap(), || {
            format!("instance {i}: T={t} infeasible")
        })?;
        if let Some(t2) = (0..t).find(|&t2| feasible(&s1, &s2, t2, Bandwidth(b)).unwrap()) {
            return Err(format!("instance {i}: T={t} but {t2} is feasible"));
        }
        nonzero += (t > 0) as usize;
    }
    Ok(format!(
        "300 instances, {nonzero} with T > 0, none beaten by exhaustive scan"
    ))
}

/// Reported pair counts match an independent count on every bench row.
fn c3_pair_count() -> Outcome {
    let mut rows = 0;
    for regime in Regime::ALL {
        let cfg = BenchConfig {
            sizes: vec![10, 100, 400],
            trials: 3,
            seed: 3,
            regime,
            ..BenchConfig::default()
        };
        let report = run_bench(&cfg).map_err(|e| e.to_string())?;
        for row in &report.rows {
            let morph = row.timing(Algorithm::Morph).unwrap().pair_count;
            check(morph == row.conflicts, || {
                format!(
                    "{regime} n={}: morph P={morph}, counted {}",
                    row.n, row.conflicts
                )
            })?;
            if regime == Regime::Adversarial {
                check(morph == row.n * row.m, || {
                    format!("adversarial n={}: P={morph}", row.n)
                })?;
            }
            // A third count straight from the definition.
            let (s1, s2) = vbrsched::bench::bench_instance(&cfg, row.n, row.trial).unwrap();
            let direct = s1
                .peaks()
                .iter()
                .flat_map(|p| s2.peaks().iter().map(move |q| p.height + q.height))
                .filter(|&h| h > cfg.bandwidth)
                .count();
            check(
                direct == morph && count_conflicts(&s1, &s2, Bandwidth(cfg.bandwidth)) == direct,
                || format!("{regime} n={}: direct count {direct}", row.n),
            )?;
            rows += 1;
        }
    }
    Ok(format!(
        "{rows} bench rows over low/adversarial/mixed regimes"
    ))
}

fn random_scp(r: &mut ChaCha8Rng) -> ScpInstance {
    let k = r.gen_range(1..=8);
    let mut cuts: Vec<i64> = (0..=30).collect();
    cuts.shuffle(r);
    let mut cuts: Vec<i64> = cuts[..2 * k].to_vec();
    cuts.sort_unstable();
    let intervals: Vec<(i64, i64)> = cuts.chunks(2).map(|c| (c[0], c[1])).collect();
    let n = r.gen_range(1..=8);
    let points: Vec<i64> = if r.gen_bool(0.5) {
        // Points drawn from the intervals, then shifted, so a solution exists.
        let shift = r.gen_range(-10..=10);
        let inside: Vec<i64> = intervals.iter().flat_map(|&(a, b)| a..b).collect();
        (0..n)
            .map(|_| (*inside.choose(r).unwrap() - shift).clamp(0, 30))
            .collect()
    } else {
        (0..n).map(|_| r.gen_range(0..=30)).collect()
    };
    ScpInstance::new(points, intervals).unwrap()
}

/// SCP has a translation iff the two-stream displacement is below L1 - L2.
fn c4_scp_round_trip() -> Outcome {
    let mut r = rng(4);
    let mut solvable = 0;
    for i in 0..600 {
        let scp = random_scp(&mut r);
        let brute = scp_brute(&scp);
        let red = scp_to_2ss(&scp);
        let (t, u) = red.solve();
        check(brute.is_some() == (t < red.threshold), || {
            format!(
                "instance {i}: {scp:?} brute={brute:?} T={t} threshold={}",
                red.threshold
            )
        })?;
        if let Some(u) = u {
            check(scp.is_translation(u), || {
                format!("instance {i}: u={u} is not a translation")
            })?;
            check(Some(u) == brute, || {
                format!("instance {i}: u={u}, smallest is {brute:?}")
            })?;
            solvable += 1;
        }
    }
    check((100..=500).contains(&solvable), || {
        format!("unbalanced sample: {solvable} solvable")
    })?;
    Ok(format!(
        "600 instances, {solvable} solvable, zero mismatches"
    ))
}

fn strings_from_bits(bits: u64, m: usize, n: usize) -> StringPackInstance {
    let strings = (0..m)
        .map(|i| {
            let mut s = BitString::zeros(n);
            for c in 0..n {
                s.set(c, bits >> (i * n + c) & 1 == 1);
            }
            s
        })
        .collect();
    StringPackInstance::new(strings).unwrap()
}

fn pack_through_schedule(sp: &StringPackInstance) -> Result<Tick, String> {
    let out = exact_small(
        &stringpack_to_mss(sp),
        Objective::LastDisplacement,
        10_000_000,
    )
    .map_err(|e| e.to_string())?;
    Ok(sp.width() as Tick + out.result.last_displacement)
}

fn compare_pack(sp: &StringPackInstance) -> Result<(), String> {
    let brute = stringpack_brute(sp, None, u128::MAX)
        .map_err(|e| e.to_string())?
        .unwrap()
        .length as Tick;
    let sched = pack_through_schedule(sp)?;
    check(brute == sched, || {
        format!(
            "{:?}: brute {brute}, schedule {sched}",
            serde_json::to_string(sp).unwrap()
        )
    })
}

/// String Pack optimum equals n plus the scheduled last displacement.
fn c5_stringpack_round_trip() -> Outcome {
    let start = Instant::now();
    let mut r = rng(5);
    let mut count = 0;
    for n in 1..=4 {
        for m in 1..=3 {
            let total = 1u64 << (n * m);
            let mut all: Vec<u64> = (0..total).collect();
            if all.len() > 1000 {
                all.shuffle(&mut r);
                all.truncate(1000);
            }
            for bits in all {
                compare_pack(&strings_from_bits(bits, m, n))?;
                count += 1;
            }
        }
    }
    check(count <= 2000, || format!("{count} small instances"))?;
    for _ in 0..120 {
        compare_pack(&strings_from_bits(r.gen_range(0..1u64 << 24), 4, 6))?;
    }
    let took = within(Duration::from_secs(120), start)?;
    Ok(format!(
        "{count} small + 120 random 4x6 instances agree ({took:.1?})"
    ))
}

/// A frozen 4x6 instance whose shortest packing has length 8.
fn c6_length_eight() -> Outcome {
    let sp = StringPackInstance::from_strs(&["100001", "100100", "010010", "001001"]).unwrap();
    let brute = stringpack_brute(&sp, None, u128::MAX).unwrap().unwrap();
    let sched = pack_through_schedule(&sp)?;
    check(brute.length == 8 && sched == 8, || {
        format!("brute {}, schedule {sched}", brute.length)
    })?;
    Ok(format!(
        "{:?} packs in 8 (offsets {:?})",
        ["100001", "100100", "010010", "001001"],
        brute.offsets
    ))
}

/// Self-aligning sets verify and have the expected length.
fn c7_self_aligning() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    for (n, l) in [(2, 16), (3, 81)] {
        let sa = self_aligning(n, l).map_err(|e| e.to_string())?;
        let want = n * n + l * n + n.pow(4);
        check(sa.length() == want, || {
            format!("n={n} l={l}: L={} != {want}", sa.length())
        })?;
        verify_self_aligning(&sa).map_err(|v| format!("n={n} l={l}: {v}"))?;
        notes.push(format!("(n={n}, l={l}, L={want})"));
    }
    let took = within(Duration::from_secs(300), start)?;
    Ok(format!("{} verified ({took:.1?})", notes.join(" ")))
}

fn colors_via_packing(g: &Graph) -> Result<usize, String> {
    let red = graph_to_stringpack(g, None).map_err(|e| e.to_string())?;
    let packing = min_group_respecting_span(&red, g);
    check(
        red.instance.packing_length(&packing.offsets) == Some(packing.span),
        || format!("{g:?}: group packing is not a valid packing"),
    )?;
    colors_from_span(packing.span, red.string_length, red.slack).map_err(|e| e.to_string())
}

/// Colors recovered through String Pack equal the chromatic number.
fn c8_coloring_recovery() -> Outcome {
    let mut graphs = 0;
    for n in 1..=4usize {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        for mask in 0..1u32 << pairs.len() {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let g = Graph::new(n, edges).unwrap();
            let chi = vertex_color_brute(&g, 10).unwrap();
            let got = colors_via_packing(&g)?;
            check(got == chi, || {
                format!("{g:?}: recovered {got}, chromatic {chi}")
            })?;
            graphs += 1;
        }
    }
    let star = Graph::new(4, vec![(0, 3), (1, 3), (2, 3)]).unwrap();
    let star_colors = colors_via_packing(&star)?;
    check(star_colors == 2, || {
        format!("star graph gave {star_colors}")
    })?;
    Ok(format!(
        "{graphs} graphs (64 on 4 vertices) match; star graph gives 2"
    ))
}

/// Morph/naive median time ratio falls as n grows on conflict-free input.
fn c9_performance() -> Outcome {
    let sizes = vec![1_000, 10_000, 100_000];
    let cfg = BenchConfig {
        sizes: sizes.clone(),
        trials: 3,
        seed: 9,
        regime: Regime::Low,
        ..BenchConfig::default()
    };
    let report = run_bench(&cfg).map_err(|e| e.to_string())?;
    check(report.rows.iter().all(|r| r.conflicts == 0), || {
        "low regime produced conflicts".into()
    })?;
    let ratios: Vec<f64> = sizes
        .iter()
        .map(|&n| {
            let morph = report.median(n, Algorithm::Morph).unwrap();
            let naive = report.median(n, Algorithm::Naive).unwrap();
            morph.max(1.0) / naive.max(1.0)
        })
        .collect();
    let shown = sizes
        .iter()
        .zip(&ratios)
        .map(|(n, r)| format!("n={n}: {r:.2e}"))
        .collect::<Vec<_>>()
        .join(", ");
    check(ratios.windows(2).all(|w| w[1] < w[0]), || {
        format!("ratios not decreasing: {shown}")
    })?;
    Ok(format!("morph/naive {shown}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("oracle equivalence", c1_oracle_equivalence),
        ("minimality", c2_minimality),
        ("pair-count instrumentation", c3_pair_count),
        ("SCP round trip", c4_scp_round_trip),
        ("String Pack round trip", c5_stringpack_round_trip),
        ("4x6 packing of length 8", c6_length_eight),
        ("self-aligning verification", c7_self_aligning),
        ("coloring recovery", c8_coloring_recovery),
        ("performance sanity", c9_performance),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
