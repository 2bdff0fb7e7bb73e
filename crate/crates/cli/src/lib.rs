//! Command implementations behind the `overlap` binary.

pub mod args;
pub mod validate;

use std::fmt::{self, Write as _};
use std::fs;
use std::io::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use num_complex::Complex64;
use overlap_core::protocols::{build_protocol, BuildOptions};
use overlap_core::synthesis::transpile;
use overlap_core::text::to_text;
use overlap_core::{
    crossover_scan, estimate_overlap, inner_product, prepare_state, round_significant, Error,
    EstimateOptions, EvalMode, OverlapEstimate, Part, ReferenceMode, StateVector, SynthesizedPrep,
};
use serde_json::{json, Value};

use args::{
    Cli, Command, Format, OverlapArgs, PartArg, Reference, ResourcesArgs, StateArgs, SynthArgs,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DEGENERATE: u8 = 3;
pub const EXIT_VALIDATION: u8 = 4;

/// Bad flag combination caught after parsing.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Exit code for an error that escaped a command.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return EXIT_USAGE;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::DegenerateReference { .. }) => EXIT_DEGENERATE,
        Some(
            Error::InvalidArgument(_)
            | Error::MalformedBitstring(_)
            | Error::WidthAboveCap { .. }
            | Error::WidthMismatch { .. }
            | Error::QubitOutOfRange { .. },
        ) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Overlap(a) => cmd_overlap(&a),
        Command::Resources(a) => cmd_resources(&a),
        Command::Synth(a) => cmd_synth(&a),
        Command::Validate(a) => Ok(validate::run(&a)),
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn round(x: f64) -> f64 {
    round_significant(x, 12)
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// The target states named by the flags.
pub fn target_states(args: &StateArgs) -> Result<(StateVector, StateVector)> {
    if args.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    if let Some(t) = &args.projection {
        if t.len() != args.n {
            return Err(usage(format!(
                "--projection {t} has {} bits but --n is {}",
                t.len(),
                args.n
            )));
        }
    }
    let a = StateVector::random(args.n, args.seed)?;
    let mut b = StateVector::random(args.n, args.seed_b())?;
    if args.null_b0 {
        let mut amps = b.into_amplitudes();
        amps[0] = Complex64::new(0.0, 0.0);
        let norm = amps.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|x| *x /= norm);
        b = StateVector::from_amplitudes(amps)?;
    }
    Ok((a, b))
}

fn preps(a: &StateVector, b: &StateVector) -> Result<(SynthesizedPrep, SynthesizedPrep)> {
    Ok((prepare_state(a)?, prepare_state(b)?))
}

/// `<B|A>` in the phase convention of the estimate: with measured
/// references each state is rephased so its reference amplitude is real
/// and positive.
fn oracle_for(est: &OverlapEstimate, a: &StateVector, b: &StateVector) -> Result<Complex64> {
    if est.reference_mode == ReferenceMode::Classical {
        return Ok(inner_product(a, b)?);
    }
    let fix = |s: &StateVector, name: &str| -> Result<StateVector> {
        match est.references.iter().find(|r| r.name.starts_with(name)) {
            Some(r) => {
                let amp = s.basis_coefficient(&r.bitstring)?;
                Ok(s.clone().with_phase(-amp.arg()))
            }
            None => Ok(s.clone()),
        }
    };
    Ok(inner_product(&fix(a, "a")?, &fix(b, "b")?)?)
}

fn cmd_overlap(args: &OverlapArgs) -> Result<u8> {
    let s = &args.states;
    let (sa, sb) = target_states(s)?;
    let (a, b) = preps(&sa, &sb)?;
    let mode = if args.shots == 0 {
        EvalMode::Exact
    } else {
        EvalMode::Shots {
            shots: args.shots,
            seed: s.seed,
        }
    };
    let options = EstimateOptions {
        projection: s.projection,
        reference: match args.reference {
            Reference::Classical => ReferenceMode::Classical,
            Reference::Measured => ReferenceMode::Measured,
        },
        ..Default::default()
    };
    let est = estimate_overlap(s.protocol, &a, &b, mode, &options)?;
    let oracle = oracle_for(&est, &sa, &sb)?;
    let abs_error = match est.value {
        Some(v) => (v - oracle).norm(),
        None => (est.magnitude_squared - oracle.norm_sqr()).abs(),
    };

    let mut obj = serde_json::to_value(est.record())?;
    let map = obj.as_object_mut().expect("record is an object");
    map.insert("n".into(), json!(s.n));
    map.insert("seed".into(), json!(s.seed));
    map.insert("seed_b".into(), json!(s.seed_b()));
    map.insert("oracle_real".into(), json!(round(oracle.re)));
    map.insert("oracle_imag".into(), json!(round(oracle.im)));
    map.insert(
        "oracle_magnitude_squared".into(),
        json!(round(oracle.norm_sqr())),
    );
    map.insert("abs_error".into(), json!(round(abs_error)));

    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&obj)? + "\n",
        Format::Csv => overlap_csv(&obj),
        Format::Table => overlap_table(&obj),
    };
    emit(&text, args.output.as_deref())?;
    Ok(EXIT_OK)
}

const OVERLAP_CSV_COLUMNS: [&str; 14] = [
    "protocol",
    "n",
    "seed",
    "seed_b",
    "shots",
    "real",
    "imag",
    "magnitude_squared",
    "standard_error",
    "oracle_real",
    "oracle_imag",
    "oracle_magnitude_squared",
    "abs_error",
    "references",
];

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn references_field(v: &Value) -> String {
    v.as_array()
        .map(|refs| {
            refs.iter()
                .map(|r| {
                    format!(
                        "{}[{}]={}{:+}i",
                        scalar(&r["name"]),
                        scalar(&r["bitstring"]),
                        scalar(&r["real"]),
                        r["imag"].as_f64().unwrap_or(0.0)
                    )
                })
                .collect::<Vec<_>>()
                .join(";")
        })
        .unwrap_or_default()
}

fn overlap_csv(obj: &Value) -> String {
    let row: Vec<String> = OVERLAP_CSV_COLUMNS
        .iter()
        .map(|&k| {
            if k == "references" {
                references_field(&obj[k])
            } else {
                scalar(&obj[k])
            }
        })
        .collect();
    format!("{}\n{}\n", OVERLAP_CSV_COLUMNS.join(","), row.join(","))
}

fn overlap_table(obj: &Value) -> String {
    let mut out = String::new();
    let mut line = |k: &str, v: String| {
        let _ = writeln!(out, "{k:<26}{v}");
    };
    line("protocol", scalar(&obj["protocol"]));
    line("n", scalar(&obj["n"]));
    line(
        "seeds (A, B)",
        format!("{}, {}", scalar(&obj["seed"]), scalar(&obj["seed_b"])),
    );
    let shots = obj["shots"].as_u64().unwrap_or(0);
    line(
        "shots",
        if shots == 0 {
            "exact".into()
        } else {
            shots.to_string()
        },
    );
    if !obj["real"].is_null() {
        line(
            "<B|A>",
            format!(
                "{} {:+}i",
                scalar(&obj["real"]),
                obj["imag"].as_f64().unwrap_or(0.0)
            ),
        );
    }
    line("|<B|A>|^2", scalar(&obj["magnitude_squared"]));
    if obj["clamped"].as_bool() == Some(true) {
        line("raw |<B|A>|^2", scalar(&obj["raw_magnitude_squared"]));
    }
    line(
        "oracle <B|A>",
        format!(
            "{} {:+}i",
            scalar(&obj["oracle_real"]),
            obj["oracle_imag"].as_f64().unwrap_or(0.0)
        ),
    );
    line("oracle |<B|A>|^2", scalar(&obj["oracle_magnitude_squared"]));
    line("abs error", scalar(&obj["abs_error"]));
    line("standard error", scalar(&obj["standard_error"]));
    let refs = references_field(&obj["references"]);
    if !refs.is_empty() {
        line(
            &format!("references ({})", scalar(&obj["reference_mode"])),
            refs,
        );
    }
    out
}

fn cmd_resources(args: &ResourcesArgs) -> Result<u8> {
    if args.n_min == 0 || args.n_min > args.n_max {
        return Err(usage(format!(
            "invalid block-size range {}..={}",
            args.n_min, args.n_max
        )));
    }
    if args.p == 0 {
        return Err(usage("--p must be at least 1"));
    }
    let scan = crossover_scan(args.n_min..=args.n_max, args.p, args.seed)?;
    let fmt_n = |n: Option<usize>| n.map_or("none".to_string(), |n| format!("n={n}"));
    let summary = format!(
        "crossover (p={}): two-qubit gates {}, d x q {}; selection rule agrees with counts: {}",
        args.p,
        fmt_n(scan.gate_crossover),
        fmt_n(scan.dq_crossover),
        scan.rule_matches_measurement()
    );
    let text = match args.format {
        Format::Csv => scan.to_csv(),
        Format::Json => serde_json::to_string_pretty(&scan)? + "\n",
        Format::Table => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "{:<12}{:>3}{:>3}{:>7}{:>9}{:>9}{:>10}{:>12}",
                "protocol", "n", "p", "qubits", "2q", "depth", "dq", "rule picks"
            );
            for ((h, o), (_, rule)) in scan.pairs().zip(&scan.rule_prefers_one_control) {
                for row in [h, o] {
                    let r = &row.report;
                    let _ = writeln!(
                        out,
                        "{:<12}{:>3}{:>3}{:>7}{:>9}{:>9}{:>10}{:>12}",
                        row.protocol.to_string(),
                        row.n,
                        row.p,
                        r.qubits,
                        r.two_qubit_count,
                        r.depth,
                        r.dq,
                        if *rule { "one-control" } else { "hadamard" }
                    );
                }
            }
            let _ = writeln!(out, "{summary}");
            out
        }
    };
    emit(&text, args.output.as_deref())?;
    if args.format != Format::Table {
        eprintln!("{summary}");
    }
    Ok(EXIT_OK)
}

fn cmd_synth(args: &SynthArgs) -> Result<u8> {
    let s = &args.states;
    let (sa, sb) = target_states(s)?;
    let (a, b) = preps(&sa, &sb)?;
    let part = match args.part {
        PartArg::Real => Part::Real,
        PartArg::Imag => Part::Imag,
    };
    if part == Part::Imag && !s.protocol.carries_phase() {
        return Err(usage(format!(
            "{} has no imaginary-part circuit",
            s.protocol
        )));
    }
    let mut circuit = build_protocol(
        s.protocol,
        &a,
        &b,
        part,
        s.projection.as_ref(),
        &BuildOptions::default(),
    )?;
    if args.transpile {
        circuit = transpile(&circuit)?;
    }
    let header = format!(
        "# {} test, {} part, n={} seed={} seed_b={}{}\n",
        s.protocol,
        if part == Part::Real {
            "real"
        } else {
            "imaginary"
        },
        s.n,
        s.seed,
        s.seed_b(),
        if args.transpile { ", transpiled" } else { "" }
    );
    emit(&(header + &to_text(&circuit)?), args.output.as_deref())?;
    Ok(EXIT_OK)
}
