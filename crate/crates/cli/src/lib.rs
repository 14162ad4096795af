//! Subcommand implementations behind the `vbrsched` binary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use vbrsched::admission::{AdmissionError, Algorithm};
use vbrsched::bench::{run_bench, BenchConfig, Regime};
use vbrsched::envelope::{sum_all, Bandwidth, Rate, StreamEnvelope, Tick};
use vbrsched::gen::{generate_set, EnvelopeParams};
use vbrsched::io::{AdmissionReport, EnvelopeSet, ScheduleReport};
use vbrsched::multistream::{
    default_order, exact_small, greedy_sequential, verify_schedule, MultiInstance,
    MultiScheduleResult, Objective, ScheduleError, DEFAULT_BUDGET,
};
use vbrsched::reductions::{
    colors_from_span, graph_to_stringpack, min_group_respecting_span, scp_brute, scp_to_2ss,
    self_aligning, stringpack_brute, stringpack_to_mss, verify_self_aligning, Graph, ScpInstance,
    StringPackInstance,
};

/// How a successful run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// The instance has no solution (exit code 2).
    NoSolution,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::NoSolution => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "vbrsched",
    version,
    about = "Admission control and scheduling for pre-smoothed VBR streams"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Smallest delay at which a requested stream fits on top of committed ones.
    Admit(AdmitArgs),
    /// Displacements for every stream in a file.
    Schedule(ScheduleArgs),
    /// Write a random envelope file.
    Gen(GenArgs),
    /// Time the admission solvers on random instances.
    Bench(BenchArgs),
    /// Solve a Segments Containing Points instance through two-stream admission.
    ReduceScp(ReduceScpArgs),
    /// Solve a String Pack instance through multi-stream scheduling.
    ReduceStringpack(ReduceStringpackArgs),
    /// Count colors of a graph through String Pack.
    ReduceColoring(ReduceColoringArgs),
    /// Build and check a self-aligning string set.
    VerifySa(VerifySaArgs),
    /// Validate an envelope file and optionally a schedule for it.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct Scale {
    /// Multiply times by this before requiring integers.
    #[arg(long, default_value_t = 1.0)]
    pub time_scale: f64,
    /// Multiply rates by this before requiring integers.
    #[arg(long, default_value_t = 1.0)]
    pub rate_scale: f64,
}

#[derive(Debug, Args)]
pub struct AdmitArgs {
    pub file: PathBuf,
    /// Committed stream ids; their sum is the committed load. Defaults to
    /// every stream but the requested one.
    #[arg(long, num_args = 1..)]
    pub committed: Vec<String>,
    /// Requested stream id. Defaults to the last stream in the file.
    #[arg(long)]
    pub requested: Option<String>,
    #[arg(long, default_value_t = Algorithm::Morph)]
    pub algorithm: Algorithm,
    /// Override the file's bandwidth.
    #[arg(long)]
    pub bandwidth: Option<Rate>,
    #[command(flatten)]
    pub scale: Scale,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    pub file: PathBuf,
    #[arg(long, default_value_t = Objective::Makespan)]
    pub objective: Objective,
    /// Node budget for the exact search.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Skip the exact search and place streams greedily.
    #[arg(long)]
    pub greedy: bool,
    /// Greedy placement order (stream indices); defaults to decreasing area.
    #[arg(long, value_delimiter = ',')]
    pub order: Option<Vec<usize>>,
    #[arg(long)]
    pub bandwidth: Option<Rate>,
    #[command(flatten)]
    pub scale: Scale,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub peaks: usize,
    #[arg(long)]
    pub max_height: Rate,
    #[arg(long, default_value_t = 0)]
    pub min_height: Rate,
    /// Longest peak, in ticks.
    #[arg(long)]
    pub max_len: Tick,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub streams: usize,
    /// Channel bandwidth written to the file; defaults to the maximum height.
    #[arg(long)]
    pub bandwidth: Option<Rate>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [100, 1000])]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = Regime::Low)]
    pub regime: Regime,
    #[arg(long, default_value_t = 100)]
    pub bandwidth: Rate,
    #[arg(long, default_value_t = 10)]
    pub max_len: Tick,
    /// Skip the oracle when n·m exceeds this.
    #[arg(long, default_value_t = 1_000_000)]
    pub oracle_max_pairs: u128,
    /// Write the CSV here instead of standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReduceScpArgs {
    pub file: PathBuf,
    /// Also write the two-stream instance as an envelope file.
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReduceStringpackArgs {
    pub file: PathBuf,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Cross-check with exhaustive packing when the offset space is at most this.
    #[arg(long, default_value_t = 10_000_000)]
    pub brute_budget: u128,
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReduceColoringArgs {
    pub file: PathBuf,
    /// Identity-block repetitions in the flanks; defaults to n⁴.
    #[arg(long)]
    pub l: Option<usize>,
    /// Write the String Pack instance here.
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifySaArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub l: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub file: PathBuf,
    /// Schedule JSON as written by `schedule`.
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    #[command(flatten)]
    pub scale: Scale,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_envelopes(path: &Path, scale: &Scale) -> Result<EnvelopeSet> {
    let text = read(path)?;
    let set = if scale.time_scale == 1.0 && scale.rate_scale == 1.0 {
        EnvelopeSet::from_json(&text)
    } else {
        EnvelopeSet::from_json_scaled(&text, scale.time_scale, scale.rate_scale)
    };
    set.with_context(|| format!("in {}", path.display()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read(path)?;
    serde_json::from_str(&text).with_context(|| format!("in {}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn print_json(out: &mut dyn Write, value: &impl serde::Serialize) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<Status> {
    match cli.command {
        Command::Admit(a) => admit(a, out, err),
        Command::Schedule(a) => schedule(a, out, err),
        Command::Gen(a) => gen(a, out),
        Command::Bench(a) => bench(a, out, err),
        Command::ReduceScp(a) => reduce_scp(a, out, err),
        Command::ReduceStringpack(a) => reduce_stringpack(a, out, err),
        Command::ReduceColoring(a) => reduce_coloring(a, out),
        Command::VerifySa(a) => verify_sa(a, out, err),
        Command::Verify(a) => verify(a, out, err),
    }
}

fn admit(a: AdmitArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Status> {
    let set = read_envelopes(&a.file, &a.scale)?;
    let bandwidth = a.bandwidth.map_or(set.bandwidth, Bandwidth);
    let requested_id = match a.requested {
        Some(id) => id,
        None => match set.streams.last() {
            Some(s) => s.id.clone(),
            None => bail!("{} has no streams", a.file.display()),
        },
    };
    let requested = set.get(&requested_id)?;
    let committed_ids: Vec<String> = if a.committed.is_empty() {
        set.streams
            .iter()
            .map(|s| s.id.clone())
            .filter(|id| *id != requested_id)
            .collect()
    } else {
        a.committed
    };
    let committed = committed_ids
        .iter()
        .map(|id| set.get(id))
        .collect::<Result<Vec<&StreamEnvelope>, _>>()?;
    let committed = sum_all(committed);

    match a.algorithm.run(&committed, requested, bandwidth) {
        Ok(r) => {
            print_json(out, &AdmissionReport::from(r))?;
            Ok(Status::Ok)
        }
        Err(e @ AdmissionError::PeakExceedsBandwidth { .. }) => {
            writeln!(err, "infeasible: {e}")?;
            print_json(out, &AdmissionReport::infeasible())?;
            Ok(Status::NoSolution)
        }
        Err(e) => Err(e.into()),
    }
}

fn schedule(a: ScheduleArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Status> {
    let set = read_envelopes(&a.file, &a.scale)?;
    let bandwidth = a.bandwidth.map_or(set.bandwidth, Bandwidth);
    let inst = MultiInstance::new(set.envelopes(), bandwidth)?;
    if a.budget == 0 {
        bail!("--budget must be positive");
    }
    let outcome = if a.greedy {
        let order = a.order.unwrap_or_else(|| default_order(&inst));
        greedy_sequential(&inst, &order).map(|r| (r, false))
    } else {
        match exact_small(&inst, a.objective, a.budget) {
            Ok(o) => Ok((o.result, true)),
            Err(ScheduleError::BudgetExceeded { budget, incumbent }) => {
                writeln!(
                    err,
                    "budget of {budget} nodes exhausted; reporting best schedule found"
                )?;
                Ok((incumbent, false))
            }
            Err(e) => Err(e),
        }
    };
    match outcome {
        Ok((r, optimal)) => {
            print_json(out, &ScheduleReport::new(r, optimal))?;
            Ok(Status::Ok)
        }
        Err(e @ ScheduleError::StreamTooTall { .. }) => {
            writeln!(err, "infeasible: {e}")?;
            Ok(Status::NoSolution)
        }
        Err(e) => Err(e.into()),
    }
}

fn gen(a: GenArgs, out: &mut dyn Write) -> Result<Status> {
    let params = EnvelopeParams::new(a.peaks, a.min_height, a.max_height, a.max_len)?;
    let bandwidth = a.bandwidth.unwrap_or(a.max_height.max(1));
    let text = generate_set(a.seed, a.streams, &params, Bandwidth(bandwidth)).to_json();
    match a.output {
        Some(p) => write_file(&p, &text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(Status::Ok)
}

fn bench(a: BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Status> {
    let cfg = BenchConfig {
        sizes: a.sizes,
        trials: a.trials,
        seed: a.seed,
        regime: a.regime,
        bandwidth: a.bandwidth,
        max_len: a.max_len,
        oracle_max_pairs: a.oracle_max_pairs,
    };
    let report = run_bench(&cfg)?;
    let csv = report.to_csv();
    match a.output {
        Some(p) => write_file(&p, &csv)?,
        None => out.write_all(csv.as_bytes())?,
    }
    err.write_all(report.summary().as_bytes())?;
    Ok(Status::Ok)
}

fn reduce_scp(a: ReduceScpArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Status> {
    let scp: ScpInstance = read_json(&a.file)?;
    let red = scp_to_2ss(&scp);
    if let Some(p) = &a.emit {
        let set = EnvelopeSet::new(
            red.bandwidth,
            vec![
                named("committed", red.committed.clone()),
                named("requested", red.requested.clone()),
            ],
        )?;
        write_file(p, &set.to_json())?;
    }
    let (displacement, translation) = red.solve();
    let brute = scp_brute(&scp);
    if let Some(u) = translation {
        if !scp.is_translation(u) {
            bail!("recovered translation {u} does not place every point in an interval");
        }
    }
    print_json(
        out,
        &json!({
            "displacement": displacement,
            "threshold": red.threshold,
            "translation": translation,
            "brute_force": brute,
        }),
    )?;
    if translation.is_some() != brute.is_some() {
        bail!("reduction and brute force disagree");
    }
    if translation.is_none() {
        writeln!(
            err,
            "no translation: displacement {displacement} >= threshold {}",
            red.threshold
        )?;
        return Ok(Status::NoSolution);
    }
    Ok(Status::Ok)
}

fn named(id: &str, envelope: StreamEnvelope) -> vbrsched::io::NamedStream {
    vbrsched::io::NamedStream {
        id: id.to_owned(),
        envelope,
    }
}

fn reduce_stringpack(
    a: ReduceStringpackArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<Status> {
    let sp: StringPackInstance = read_json(&a.file)?;
    let inst = stringpack_to_mss(&sp);
    if let Some(p) = &a.emit {
        let streams = inst
            .streams()
            .iter()
            .enumerate()
            .map(|(i, s)| named(&format!("s{i}"), s.clone()))
            .collect();
        write_file(p, &EnvelopeSet::new(inst.bandwidth(), streams)?.to_json())?;
    }
    let (result, optimal) = match exact_small(&inst, Objective::LastDisplacement, a.budget) {
        Ok(o) => (o.result, true),
        Err(ScheduleError::BudgetExceeded { incumbent, .. }) => {
            writeln!(err, "budget exhausted; packing length is an upper bound")?;
            (incumbent, false)
        }
        Err(e) => return Err(e.into()),
    };
    let length = sp.width() as Tick + result.last_displacement;
    let brute = match stringpack_brute(&sp, None, a.brute_budget) {
        Ok(p) => p.map(|p| p.length),
        Err(e) => {
            writeln!(err, "skipping exhaustive check: {e}")?;
            None
        }
    };
    print_json(
        out,
        &json!({
            "packing_length": length,
            "offsets": result.displacements,
            "optimal": optimal,
            "brute_force": brute,
        }),
    )?;
    if optimal && brute.is_some_and(|b| b as Tick != length) {
        bail!("scheduling and exhaustive packing disagree");
    }
    Ok(Status::Ok)
}

fn reduce_coloring(a: ReduceColoringArgs, out: &mut dyn Write) -> Result<Status> {
    let g: Graph = read_json(&a.file)?;
    let red = graph_to_stringpack(&g, a.l)?;
    if let Some(p) = &a.emit {
        write_file(p, &serde_json::to_string_pretty(&red.instance)?)?;
    }
    let packing = min_group_respecting_span(&red, &g);
    let colors = colors_from_span(packing.span, red.string_length, red.slack)?;
    let chromatic = vbrsched::reductions::vertex_color_brute(&g, 10).ok();
    print_json(
        out,
        &json!({
            "colors": colors,
            "span": packing.span,
            "string_length": red.string_length,
            "slack": red.slack,
            "groups": packing.groups,
            "chromatic_number": chromatic,
        }),
    )?;
    Ok(Status::Ok)
}

fn verify_sa(a: VerifySaArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Status> {
    let sa = self_aligning(a.n, a.l)?;
    match verify_self_aligning(&sa) {
        Ok(()) => {
            writeln!(
                out,
                "ok n={} l={} L={} k={}",
                a.n,
                a.l,
                sa.length(),
                sa.slack()
            )?;
            Ok(Status::Ok)
        }
        Err(v) => {
            writeln!(err, "violation: {v}")?;
            Ok(Status::NoSolution)
        }
    }
}

fn verify(a: VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Status> {
    let set = read_envelopes(&a.file, &a.scale)?;
    let Some(path) = a.schedule else {
        writeln!(
            out,
            "ok: {} streams, bandwidth {}",
            set.streams.len(),
            set.bandwidth
        )?;
        return Ok(Status::Ok);
    };
    let report: ScheduleReport = read_json(&path)?;
    let inst = MultiInstance::new(set.envelopes(), set.bandwidth)?;
    let result = MultiScheduleResult {
        displacements: report.displacements,
        makespan: report.makespan,
        last_displacement: report.last_displacement,
    };
    match verify_schedule(&inst, &result) {
        Ok(()) => {
            writeln!(out, "ok: schedule fits bandwidth {}", set.bandwidth)?;
            Ok(Status::Ok)
        }
        Err(v) => {
            writeln!(err, "violation: {v}")?;
            Ok(Status::NoSolution)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (Result<Status>, String, String) {
        let cli =
            Cli::try_parse_from(std::iter::once("vbrsched").chain(args.iter().copied())).unwrap();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let status = run(cli, &mut out, &mut err);
        (
            status,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Status::Ok.code(), 0);
        assert_eq!(Status::NoSolution.code(), 2);
    }

    #[test]
    fn verify_sa_reports_parameters() {
        let (status, out, _) = run_args(&["verify-sa", "--n", "2", "--l", "16"]);
        assert_eq!(status.unwrap(), Status::Ok);
        assert_eq!(out.trim(), "ok n=2 l=16 L=52 k=20");
    }

    #[test]
    fn gen_writes_to_stdout() {
        let (status, out, _) =
            run_args(&["gen", "--peaks", "2", "--max-height", "3", "--max-len", "2"]);
        assert_eq!(status.unwrap(), Status::Ok);
        assert_eq!(EnvelopeSet::from_json(&out).unwrap().streams.len(), 2);
    }

    #[test]
    fn bad_flags_are_parse_errors() {
        assert!(
            Cli::try_parse_from(["vbrsched", "admit", "f.json", "--algorithm", "fast"]).is_err()
        );
        assert!(
            Cli::try_parse_from(["vbrsched", "schedule", "f.json", "--objective", "speed"])
                .is_err()
        );
    }
}
