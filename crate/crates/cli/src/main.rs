use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use origami_core::catalog;
use origami_core::congruence::{find_witness, is_congruence_with_cap, replay_mod60_proof, Verdict};
use origami_core::freegroup::origami_to_subgroup;
use origami_core::sequences::{
    baseline_index, build, build_from_power_kernel, group_inclusion, parabolic_test, veech_of,
    Base, SequenceSpec,
};
use origami_core::sl2::DEFAULT_CLOSURE_CAP;
use origami_core::veech::{compute_veech_with_cap, DEFAULT_ORBIT_CAP};
use origami_core::{Error, Origami};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "origami", version, about = "Veech groups of origamis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Degree, genus and vertex structure.
    Info(Input),
    /// Veech group: index, generators, cosets, cusps and curve invariants.
    Veech {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        caps: Caps,
        /// Write the coset graph in DOT format to this file.
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
    },
    /// Decide whether the Veech group is a congruence subgroup.
    Congruence {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        caps: Caps,
        /// Search for an explicit witness of non-congruence.
        #[arg(long)]
        witness: bool,
    },
    /// Schreier basis of the subgroup of F2 and its coset automaton.
    Subgroup {
        #[command(flatten)]
        input: Input,
        /// Write the automaton in DOT format to this file.
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
    },
    /// The two sequences of origamis.
    Sequence {
        #[command(subcommand)]
        action: SequenceAction,
    },
    /// Recompute the mod-60 argument for the origami D step by step.
    ReplayProof {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum SequenceAction {
    /// Permutations of the members 1..=n.
    Build(SequenceArgs),
    /// Invariants and Veech group checks for the members 1..=n.
    Verify {
        #[command(flatten)]
        seq: SequenceArgs,
        #[command(flatten)]
        caps: Caps,
        /// Worker threads for independent members.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Also run the congruence test on each member.
        #[arg(long)]
        congruence: bool,
    },
}

#[derive(Args)]
struct SequenceArgs {
    /// L23 or D.
    #[arg(long, default_value = "L23")]
    base: String,
    /// Largest member.
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct Input {
    /// Origami as "d; sigma_a; sigma_b", e.g. "4; (2 3 4); (1 2)".
    origami: Option<String>,
    /// Named origami: trivial, L23, D, L(m,n), O(n), D(n).
    #[arg(long, conflicts_with = "origami")]
    name: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct Caps {
    #[arg(long, default_value_t = DEFAULT_ORBIT_CAP)]
    max_orbit: usize,
    #[arg(long, default_value_t = DEFAULT_CLOSURE_CAP)]
    max_closure: usize,
}

/// Failure kinds mapped to exit codes.
enum Failure {
    Input(anyhow::Error),
    Compute(anyhow::Error),
    /// A report was produced but some of its checks failed.
    Checks(String, anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::BadPermutation(_)
            | Error::NotTransitive(_)
            | Error::Determinant(_)
            | Error::Precondition(_) => Failure::Input(e.into()),
            _ => Failure::Compute(e.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Compute(e)
    }
}

type Outcome = Result<String, Failure>;

/// `writeln!` into a `String`, which cannot fail.
macro_rules! outln {
    ($out:expr, $($arg:tt)*) => {{
        let _ = writeln!($out, $($arg)*);
    }};
}

impl Input {
    fn origami(&self) -> Result<Origami, Failure> {
        match (&self.origami, &self.name) {
            (Some(text), _) => Ok(text.parse()?),
            (None, Some(name)) => Ok(catalog::by_name(name)?),
            (None, None) => Err(Failure::Input(anyhow!(
                "give an origami description or --name"
            ))),
        }
    }
}

/// Pretty JSON with keys in sorted order.
fn push_json<T: Serialize>(out: &mut String, value: &T) -> anyhow::Result<()> {
    let value: Value = serde_json::to_value(value)?;
    out.push_str(&serde_json::to_string_pretty(&value)?);
    out.push('\n');
    Ok(())
}

fn write_file(path: &PathBuf, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn info(input: &Input) -> Outcome {
    let mut out = String::new();
    let o = input.origami()?;
    let report = json!({
        "origami": o.to_text(),
        "canonical": o.canonical().to_text(),
        "degree": o.degree(),
        "genus": o.surface_genus(),
        "vertex_structure": o.vertex_structure(),
        "vertices": o.puncture_count(),
        "ramification_points": o.ramification_points(),
    });
    if input.json {
        push_json(&mut out, &report)?;
    } else {
        outln!(out, "origami:             {}", o.to_text());
        outln!(out, "degree:              {}", o.degree());
        outln!(out, "genus:               {}", o.surface_genus());
        outln!(out, "vertex structure:    {:?}", o.vertex_structure());
        outln!(out, "vertices:            {}", o.puncture_count());
        outln!(out, "ramification points: {}", o.ramification_points());
    }
    Ok(out)
}

fn veech(input: &Input, caps: &Caps, dot: Option<&PathBuf>) -> Outcome {
    let mut out = String::new();
    let o = input.origami()?;
    let g = compute_veech_with_cap(&o, caps.max_orbit)?;
    if let Some(path) = dot {
        write_file(path, &g.to_dot())?;
    }
    let report = g.report()?;
    if input.json {
        let mut value = serde_json::to_value(&report).map_err(anyhow::Error::from)?;
        value["max_orbit"] = json!(caps.max_orbit);
        push_json(&mut out, &value)?;
    } else {
        outln!(out, "degree:        {}", report.degree);
        outln!(out, "index:         {}", report.index);
        outln!(out, "generators:    {}", report.generators.len());
        for gen in &report.generators {
            outln!(out, "  {}  = {}", gen.matrix, gen.word);
        }
        let widths: Vec<usize> = report.cusps.iter().map(|c| c.width).collect();
        outln!(out, "cusp widths:   {widths:?}");
        outln!(out, "general level: {}", report.general_level);
        outln!(
            out,
            "curve:         genus {}, {} cusps, e2 = {}, e3 = {}",
            report.curve.genus,
            report.curve.cusps,
            report.curve.e2,
            report.curve.e3
        );
    }
    Ok(out)
}

fn congruence(input: &Input, caps: &Caps, witness: bool) -> Outcome {
    let mut out = String::new();
    let o = input.origami()?;
    let g = compute_veech_with_cap(&o, caps.max_orbit)?;
    let mut report = is_congruence_with_cap(&g, caps.max_closure)?;
    let mut bound_note = None;
    if witness && report.verdict == Verdict::NonCongruence {
        report.witness = find_witness(&g, report.general_level)?;
        if report.witness.is_none() {
            bound_note = Some("no witness within the search bound");
        }
    }
    if input.json {
        let mut value = serde_json::to_value(&report).map_err(anyhow::Error::from)?;
        value["max_orbit"] = json!(caps.max_orbit);
        push_json(&mut out, &value)?;
    } else {
        let verdict = match report.verdict {
            Verdict::Congruence { level } => format!("congruence, level {level}"),
            Verdict::NonCongruence => "non-congruence".to_string(),
        };
        outln!(out, "verdict:                {verdict}");
        outln!(out, "general level N:        {}", report.general_level);
        outln!(out, "index in SL2(Z):        {}", report.index_in_sl2z);
        outln!(out, "index of image mod N:   {}", report.index_mod_level);
        outln!(out, "|image mod N|:          {}", report.image_order);
        outln!(out, "|SL2(Z/N)|:             {}", report.sl2_mod_order);
        if let Some(w) = &report.witness {
            outln!(out, "witness:                {w}");
        }
        if let Some(note) = bound_note {
            outln!(out, "witness:                {note}");
        }
    }
    Ok(out)
}

fn subgroup(input: &Input, dot: Option<&PathBuf>) -> Outcome {
    let mut out = String::new();
    let o = input.origami()?;
    let u = origami_to_subgroup(&o);
    let graph = u.automaton.to_dot();
    if let Some(path) = dot {
        write_file(path, &graph)?;
    }
    let gens: Vec<String> = u.basis.gens.iter().map(ToString::to_string).collect();
    if input.json {
        let mut value = json!({
            "index": u.index(),
            "rank": u.basis.rank(),
            "basis": gens,
        });
        if dot.is_none() {
            value["dot"] = json!(graph);
        }
        push_json(&mut out, &value)?;
    } else {
        outln!(out, "index: {}", u.index());
        outln!(out, "rank:  {}", u.basis.rank());
        for (i, g) in gens.iter().enumerate() {
            outln!(out, "  g{} = {g}", i + 1);
        }
        if dot.is_none() {
            out.push_str(&graph);
        }
    }
    Ok(out)
}

fn sequence_specs(args: &SequenceArgs) -> Result<Vec<SequenceSpec>, Failure> {
    let base: Base = args.base.parse()?;
    if args.n == 0 {
        return Err(Failure::Input(anyhow!("--n must be at least 1")));
    }
    (1..=args.n)
        .map(|n| SequenceSpec::new(base, n).map_err(Failure::from))
        .collect()
}

#[derive(Serialize)]
struct BuildRow {
    n: usize,
    origami: String,
    degree: usize,
    genus: usize,
    punctures: usize,
}

fn sequence_build(args: &SequenceArgs) -> Outcome {
    let mut out = String::new();
    let rows: Vec<BuildRow> = sequence_specs(args)?
        .into_iter()
        .map(|s| {
            let o = build(s);
            BuildRow {
                n: s.n,
                origami: o.to_text(),
                degree: o.degree(),
                genus: o.surface_genus(),
                punctures: o.puncture_count(),
            }
        })
        .collect();
    if args.json {
        push_json(&mut out, &json!({ "base": args.base, "members": rows }))?;
    } else {
        outln!(
            out,
            "{:>3}  {:>6}  {:>5}  {:>9}  origami",
            "n",
            "degree",
            "genus",
            "punctures"
        );
        for r in &rows {
            outln!(
                out,
                "{:>3}  {:>6}  {:>5}  {:>9}  {}",
                r.n,
                r.degree,
                r.genus,
                r.punctures,
                r.origami
            );
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct MemberRow {
    n: usize,
    degree: usize,
    genus: usize,
    punctures: usize,
    matches_power_kernel: bool,
    index: usize,
    baseline_index: Option<usize>,
    /// Least `s > 0` with `T^s` in the group.
    parabolic_width: usize,
    parabolic_law: bool,
    contained_in_first: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    congruence: Option<bool>,
}

fn verify_member(
    s: SequenceSpec,
    first: &origami_core::VeechGroup,
    caps: &Caps,
    congruence: bool,
) -> Result<MemberRow, Error> {
    let o = build(s);
    let g = veech_of(s, caps.max_orbit)?;
    let width = (1..=g.index())
        .find(|&k| parabolic_test(&g, k as i64))
        .unwrap_or(0);
    let congruence = if congruence {
        Some(is_congruence_with_cap(&g, caps.max_closure)?.is_congruence())
    } else {
        None
    };
    Ok(MemberRow {
        n: s.n,
        degree: o.degree(),
        genus: o.surface_genus(),
        punctures: o.puncture_count(),
        matches_power_kernel: o.is_equivalent(&build_from_power_kernel(s)),
        index: g.index(),
        baseline_index: baseline_index(s.base, s.n),
        parabolic_width: width,
        parabolic_law: width == 3 * s.n,
        contained_in_first: group_inclusion(&g, first),
        congruence,
    })
}

fn sequence_verify(args: &SequenceArgs, caps: &Caps, jobs: usize, congruence: bool) -> Outcome {
    let mut out = String::new();
    let specs = sequence_specs(args)?;
    let first = veech_of(specs[0], caps.max_orbit)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(anyhow::Error::from)?;
    let rows: Vec<MemberRow> = pool.install(|| {
        specs
            .par_iter()
            .map(|&s| verify_member(s, &first, caps, congruence))
            .collect::<Result<_, _>>()
    })?;
    if args.json {
        push_json(&mut out, &json!({ "base": args.base, "members": rows }))?;
    } else {
        outln!(
            out,
            "{:>3}  {:>6}  {:>5}  {:>9}  {:>6}  {:>5}  {:>8}  {:>10}",
            "n",
            "degree",
            "genus",
            "punctures",
            "index",
            "T^s",
            "in first",
            "congruence"
        );
        for r in &rows {
            let cong = match r.congruence {
                Some(true) => "yes",
                Some(false) => "no",
                None => "-",
            };
            outln!(
                out,
                "{:>3}  {:>6}  {:>5}  {:>9}  {:>6}  {:>5}  {:>8}  {:>10}",
                r.n,
                r.degree,
                r.genus,
                r.punctures,
                r.index,
                r.parabolic_width,
                r.contained_in_first,
                cong
            );
        }
    }
    let bad = rows
        .iter()
        .filter(|r| {
            !(r.matches_power_kernel
                && r.parabolic_law
                && r.contained_in_first
                && r.baseline_index.is_none_or(|b| b == r.index))
        })
        .count();
    if bad > 0 {
        return Err(Failure::Checks(
            out,
            anyhow!("{bad} member(s) failed a check"),
        ));
    }
    Ok(out)
}

fn replay(json: bool) -> Outcome {
    let mut out = String::new();
    let trace = replay_mod60_proof()?;
    if json {
        push_json(&mut out, &trace)?;
    } else {
        outln!(out, "{trace}");
    }
    Ok(out)
}

fn run(cli: Cli) -> Outcome {
    match &cli.command {
        Command::Info(input) => info(input),
        Command::Veech { input, caps, dot } => veech(input, caps, dot.as_ref()),
        Command::Congruence {
            input,
            caps,
            witness,
        } => congruence(input, caps, *witness),
        Command::Subgroup { input, dot } => subgroup(input, dot.as_ref()),
        Command::Sequence { action } => match action {
            SequenceAction::Build(args) => sequence_build(args),
            SequenceAction::Verify {
                seq,
                caps,
                jobs,
                congruence,
            } => sequence_verify(seq, caps, *jobs, *congruence),
        },
        Command::ReplayProof { json } => replay(*json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            let mut stdout = io::stdout().lock();
            match stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
            {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
                _ => ExitCode::SUCCESS,
            }
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Checks(text, e)) => {
            print!("{text}");
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
