//! Command-line front end: encode -> classify -> invariants -> timeseries,
//! plus exporters. Single binary, deterministic output, distinct exit
//! codes per error class.

use std::io::Read as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::classify::{
    classify, encode_dendrogram, star_tree, ClusterHierarchy, CodingJson, Convention, FieldJson,
    HierarchyJson,
};
use crate::dendrogram::{DendrogramJson, ProjectiveDendrogram};
use crate::error::{Error, Result};
use crate::invariants::balance_report;
use crate::padic::{format_padic, parse_padic, Field, FieldDescriptor, PAdicNumber, RepSystem};
use crate::strings::{baire_distance, build_code, encode_string, preset, read_labeled_strings};
use crate::timeseries::{analyze_series, DendrogramSeries};

#[derive(Parser)]
#[command(name = "padic-dendro", version, about = "p-adic encoding, ultrametric classification and dendrogram geometry")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Residue characteristic p.
    #[arg(long, global = true, default_value_t = 2)]
    prime: u64,

    /// Unramified degree f (residue field F_{p^f}).
    #[arg(long, global = true, default_value_t = 1)]
    degree: usize,

    #[arg(long, global = true, value_enum, default_value_t = RepsArg::Poly)]
    reps: RepsArg,

    /// Named alphabet encoding (dna5, dna2-teich, dna2-kk, dna2-blank).
    #[arg(long, global = true)]
    preset: Option<String>,

    /// Custom alphabet for `encode`; the first character is the blank.
    #[arg(long, global = true)]
    alphabet: Option<String>,

    #[arg(long, global = true, value_enum, default_value_t = ConventionArg::Canonical)]
    convention: ConventionArg,

    /// Working precision (number of coefficient exponents).
    #[arg(long, global = true)]
    precision: Option<i64>,

    /// Shift the data into normal position (0 and 1 among the values)
    /// before classifying.
    #[arg(long, global = true)]
    normalize: bool,

    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,

    /// Cap for the truncated Baire distance d_k.
    #[arg(long = "cutoff-k", global = true)]
    cutoff_k: Option<i64>,

    /// Input file (default: stdin).
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Output file (default: stdout).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Encode labeled strings (or, with --from-tree, a dendrogram) into
    /// p-adic numbers.
    Encode {
        /// Read a dendrogram JSON and emit its chi-coding instead of
        /// encoding strings.
        #[arg(long)]
        from_tree: bool,
    },
    /// Build the cluster hierarchy of a list of p-adic numbers.
    Classify,
    /// Volume, branch weights and balance of a hierarchy.
    Invariants,
    /// Analyze a series of codings: balances, velocity, flow, curve data.
    Timeseries,
    /// Re-emit a hierarchy or dendrogram as json, dot or newick.
    Export,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RepsArg {
    Poly,
    Teich,
}

impl From<RepsArg> for RepSystem {
    fn from(r: RepsArg) -> Self {
        match r {
            RepsArg::Poly => RepSystem::Polynomial,
            RepsArg::Teich => RepSystem::Teichmuller,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConventionArg {
    Canonical,
    PaperBinary,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Canonical => Convention::Canonical,
            ConventionArg::PaperBinary => Convention::PaperBinary,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Dot,
    Newick,
}

pub fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let input = read_input(cli)?;
    let out = match &cli.command {
        Command::Encode { from_tree: false } => cmd_encode_strings(cli, &input)?,
        Command::Encode { from_tree: true } => cmd_encode_tree(cli, &input)?,
        Command::Classify => cmd_classify(cli, &input)?,
        Command::Invariants => cmd_invariants(cli, &input)?,
        Command::Timeseries => cmd_timeseries(cli, &input)?,
        Command::Export => cmd_export(cli, &input)?,
    };
    write_output(cli, &out)
}

fn read_input(cli: &Cli) -> Result<String> {
    match &cli.input {
        Some(path) => Ok(std::fs::read_to_string(path)?),
        None => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            Ok(buf)
        }
    }
}

fn write_output(cli: &Cli, text: &str) -> Result<()> {
    let text = if text.ends_with('\n') {
        text.to_string()
    } else {
        format!("{text}\n")
    };
    match &cli.output {
        Some(path) => Ok(std::fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_only(cli: &Cli, what: &str) -> Result<()> {
    if cli.format != FormatArg::Json {
        return Err(Error::Config(format!(
            "{what} output supports only --format json"
        )));
    }
    Ok(())
}

fn field_of(cli: &Cli) -> Result<Field> {
    FieldDescriptor::unramified(cli.prime, cli.degree, cli.reps.into())
}

fn to_pretty<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

#[derive(Serialize)]
struct DistanceJson {
    s: String,
    t: String,
    /// Distance p^{-exponent}; null encodes the distinguished value zero.
    exponent: Option<i64>,
}

#[derive(Serialize)]
struct EncodeOutput {
    field: FieldJson,
    codings: Vec<CodingJson>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    distances: Vec<DistanceJson>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    warnings: Vec<String>,
}

fn cmd_encode_strings(cli: &Cli, input: &str) -> Result<String> {
    json_only(cli, "encode")?;
    let code = match (&cli.preset, &cli.alphabet) {
        (Some(name), _) => preset(name)?,
        (None, Some(alpha)) => {
            let chars: Vec<char> = alpha.chars().collect();
            let blank = *chars
                .first()
                .ok_or_else(|| Error::Config("empty --alphabet".into()))?;
            build_code(&chars, blank, cli.prime, cli.reps.into())?
        }
        (None, None) => {
            return Err(Error::Config(
                "encode needs --preset or --alphabet".into(),
            ))
        }
    };
    let records = read_labeled_strings(input)?;
    if records.is_empty() {
        return Err(Error::InvalidInput("no input strings".into()));
    }
    let mut warnings = Vec::new();
    if records.len() == 1 {
        let w = "a single point yields a degenerate dendrogram".to_string();
        eprintln!("warning: {w}");
        warnings.push(w);
    }
    let field = code.field().clone();
    let codings = records
        .iter()
        .map(|(label, s)| {
            let x = encode_string(&code, s)
                .map_err(|e| Error::InvalidInput(format!("record {label:?}: {e}")))?;
            Ok(CodingJson {
                label: label.clone(),
                number: format_padic(&x),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut distances = Vec::new();
    for i in 0..records.len() {
        for j in (i + 1)..records.len() {
            distances.push(DistanceJson {
                s: records[i].0.clone(),
                t: records[j].0.clone(),
                exponent: baire_distance(&code, &records[i].1, &records[j].1, cli.cutoff_k),
            });
        }
    }
    to_pretty(&EncodeOutput {
        field: FieldJson {
            p: field.p(),
            f: field.f(),
            reps: field.rep_system(),
        },
        codings,
        distances,
        warnings,
    })
}

fn cmd_encode_tree(cli: &Cli, input: &str) -> Result<String> {
    json_only(cli, "encode --from-tree")?;
    let j: DendrogramJson = serde_json::from_str(input)?;
    let tree = ProjectiveDendrogram::from_json(&j)?;
    let coding = encode_dendrogram(&tree, cli.convention.into(), cli.prime, cli.reps.into())?;
    let field = coding
        .first()
        .map(|(_, x)| x.field().clone())
        .ok_or_else(|| Error::InvalidInput("dendrogram carries no data".into()))?;
    to_pretty(&EncodeOutput {
        field: FieldJson {
            p: field.p(),
            f: field.f(),
            reps: field.rep_system(),
        },
        codings: coding
            .iter()
            .map(|(label, x)| CodingJson {
                label: label.clone(),
                number: format_padic(x),
            })
            .collect(),
        distances: Vec::new(),
        warnings: Vec::new(),
    })
}

/// Accepts a JSON array of {label, number} records, or plain text: one
/// number per line, optionally preceded by a label.
fn parse_codings(cli: &Cli, input: &str) -> Result<Vec<(String, PAdicNumber)>> {
    let field = field_of(cli)?;
    let mut out = Vec::new();
    if input.trim_start().starts_with('[') {
        let records: Vec<CodingJson> = serde_json::from_str(input)?;
        for c in records {
            let x = parse_padic(&field, &c.number)
                .map_err(|e| Error::Parse(format!("record {:?}: {e}", c.label)))?;
            out.push((c.label, x));
        }
    } else {
        for (i, line) in input.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            // a bare number gets an automatic label; otherwise the first
            // token is the label
            let (label, value) = match parse_padic(&field, line) {
                Ok(x) => (format!("x{}", out.len() + 1), x),
                Err(_) => {
                    let (head, rest) = line
                        .split_once(char::is_whitespace)
                        .ok_or_else(|| Error::Parse(format!("line {}: {line:?}", i + 1)))?;
                    let x = parse_padic(&field, rest.trim())
                        .map_err(|e| Error::Parse(format!("record {head:?}: {e}")))?;
                    (head.to_string(), x)
                }
            };
            out.push((label, value));
        }
    }
    if let Some(n) = cli.precision {
        out = out
            .into_iter()
            .map(|(l, x)| Ok((l, x.with_precision(n)?)))
            .collect::<Result<Vec<_>>>()?;
    }
    Ok(out)
}

fn run_classify(cli: &Cli, data: &[(String, PAdicNumber)]) -> Result<ClusterHierarchy> {
    if cli.normalize {
        star_tree(data)
    } else {
        classify(data)
    }
}

fn render_hierarchy(cli: &Cli, h: &ClusterHierarchy) -> Result<String> {
    Ok(match cli.format {
        FormatArg::Json => to_pretty(&h.to_json())?,
        FormatArg::Dot => h.dendrogram.to_dot(),
        FormatArg::Newick => h.dendrogram.to_newick(),
    })
}

fn cmd_classify(cli: &Cli, input: &str) -> Result<String> {
    let data = parse_codings(cli, input)?;
    let h = run_classify(cli, &data)?;
    render_hierarchy(cli, &h)
}

fn cmd_invariants(cli: &Cli, input: &str) -> Result<String> {
    json_only(cli, "invariants")?;
    let tree = read_tree(input)?;
    to_pretty(&balance_report(&tree))
}

/// A hierarchy JSON or a bare dendrogram JSON.
fn read_tree(input: &str) -> Result<ProjectiveDendrogram> {
    if let Ok(h) = serde_json::from_str::<HierarchyJson>(input) {
        return Ok(ClusterHierarchy::from_json(&h)?.dendrogram);
    }
    let j: DendrogramJson = serde_json::from_str(input)?;
    ProjectiveDendrogram::from_json(&j)
}

/// Frames: a JSON array whose entries are either {label: number} objects
/// or arrays of {label, number} records.
fn parse_frames(cli: &Cli, input: &str) -> Result<Vec<Vec<(String, PAdicNumber)>>> {
    let field = field_of(cli)?;
    let value: serde_json::Value = serde_json::from_str(input)?;
    let frames = value
        .as_array()
        .ok_or_else(|| Error::Parse("expected a JSON array of frames".into()))?;
    frames
        .iter()
        .enumerate()
        .map(|(t, frame)| {
            let records: Vec<(String, String)> = match frame {
                serde_json::Value::Object(map) => map
                    .iter()
                    .map(|(k, v)| {
                        v.as_str()
                            .map(|s| (k.clone(), s.to_string()))
                            .ok_or_else(|| {
                                Error::Parse(format!("frame {t}, record {k:?}: expected a string"))
                            })
                    })
                    .collect::<Result<Vec<_>>>()?,
                serde_json::Value::Array(_) => {
                    let cs: Vec<CodingJson> = serde_json::from_value(frame.clone())?;
                    cs.into_iter().map(|c| (c.label, c.number)).collect()
                }
                _ => {
                    return Err(Error::Parse(format!(
                        "frame {t}: expected an object or an array"
                    )))
                }
            };
            records
                .into_iter()
                .map(|(label, number)| {
                    let x = parse_padic(&field, &number)
                        .map_err(|e| Error::Parse(format!("frame {t}, record {label:?}: {e}")))?;
                    Ok((label, x))
                })
                .collect()
        })
        .collect()
}

fn cmd_timeseries(cli: &Cli, input: &str) -> Result<String> {
    json_only(cli, "timeseries")?;
    let frames = parse_frames(cli, input)?;
    let hierarchies = frames
        .iter()
        .map(|f| run_classify(cli, f))
        .collect::<Result<Vec<_>>>()?;
    let series = DendrogramSeries::new(hierarchies)?;
    to_pretty(&analyze_series(&series, None)?)
}

fn cmd_export(cli: &Cli, input: &str) -> Result<String> {
    let tree = read_tree(input)?;
    Ok(match cli.format {
        FormatArg::Json => to_pretty(&tree.to_json())?,
        FormatArg::Dot => tree.to_dot(),
        FormatArg::Newick => tree.to_newick(),
    })
}
