//! `glyphscore`: validate, score, aggregate, merge and compare glyph designs, and
//! generate invariance sheets, against a workspace directory.

use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use glyph_mcda::invariance::geometry::DEFAULT_PPCM;
use glyph_mcda::invariance::{colorimetry_sheet, geometry_sheet, DegradationSheet, GlyphImage, GlyphShape, ViewingGeometry};
use glyph_mcda::io::{parse_design, parse_sheet, serialize_sheet, Workspace};
use glyph_mcda::report::{render_ranking_text, render_report_text, render_table, to_json, ReportDoc};
use glyph_mcda::{validate_design, CriterionId, Error, LevelScore, Result, ScoreSheet};
use glyph_mcda_service::api::{self, AggregatePolicy};
use serde::Deserialize;
use serde_json::Value;

#[derive(Parser)]
#[command(name = "glyphscore", version, about = "Multi-criteria scoring of glyph designs")]
struct Cli {
    /// Workspace root holding designs/, sheets/ and reports/.
    #[arg(long, global = true, default_value = ".")]
    workspace: PathBuf,
    /// Output rendering.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MergeArg {
    Mean,
    Consensus,
}

#[derive(clap::Args)]
struct PolicyArgs {
    /// Score one assessor's sheet.
    #[arg(long, conflicts_with = "merge")]
    assessor: Option<String>,
    /// Merge every sheet of the design.
    #[arg(long, value_enum)]
    merge: Option<MergeArg>,
    /// Agreed scores for `--merge consensus`: `{"scores": {criterion: score}, "note": "..."}`.
    #[arg(long, required_if_eq("merge", "consensus"))]
    consensus: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a design or sheet document (a path) or a stored design (an id).
    Validate { target: String },
    /// Derive one criterion's level from a file of raw inputs.
    Score {
        design: String,
        criterion: String,
        /// JSON file with the criterion's inputs.
        #[arg(long)]
        inputs: PathBuf,
        /// Store the result in this assessor's sheet.
        #[arg(long, requires = "write")]
        assessor: Option<String>,
        #[arg(long, requires = "assessor")]
        write: bool,
        /// Timestamp recorded on a written sheet; defaults to now.
        #[arg(long)]
        timestamp: Option<String>,
    },
    /// Weighted average of a design; the report is also written to reports/.
    Aggregate {
        design: String,
        #[command(flatten)]
        policy: PolicyArgs,
    },
    /// Print the merged sheet of a design.
    Merge {
        design: String,
        #[command(flatten)]
        policy: PolicyArgs,
        /// Write the sheet here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank designs by weighted average.
    Compare {
        #[arg(required = true, num_args = 2..)]
        designs: Vec<String>,
    },
    /// Scaled renderings at the five sizes plus a calibration square.
    GeometrySheet {
        image: PathBuf,
        /// Visual field, degrees.
        #[arg(long, default_value_t = 5.0)]
        vf: f64,
        /// Viewing distance, cm.
        #[arg(long, default_value_t = 50.0)]
        vd: f64,
        #[arg(long, default_value_t = DEFAULT_PPCM)]
        ppcm: f64,
        #[arg(long, default_value = "circular")]
        shape: GlyphShape,
        /// Output stem; writes `<out>.png` and `<out>.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The 4 × 5 grid of contrast and brightness shifts.
    ColorimetrySheet {
        image: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Criterion table for one or more designs.
    Report {
        #[arg(required = true)]
        designs: Vec<String>,
    },
    /// Run the HTTP service over the workspace.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_json(path: &Path) -> Result<Value> {
    serde_json::from_str(&read(path)?).map_err(|e| Error::Schema {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConsensusFile {
    scores: std::collections::BTreeMap<CriterionId, LevelScore>,
    #[serde(default)]
    note: String,
}

impl PolicyArgs {
    fn resolve(&self) -> Result<AggregatePolicy> {
        Ok(match (&self.assessor, self.merge) {
            (Some(a), _) => AggregatePolicy::Single { assessor: a.clone() },
            (None, Some(MergeArg::Mean)) => AggregatePolicy::Mean,
            (None, Some(MergeArg::Consensus)) => {
                let path = self.consensus.as_deref().expect("clap requires --consensus");
                let f: ConsensusFile = serde_path_to_error::deserialize(read_json(path)?).map_err(|e| Error::Schema {
                    path: e.path().to_string(),
                    message: e.inner().to_string(),
                })?;
                AggregatePolicy::Consensus {
                    scores: f.scores,
                    note: f.note,
                }
            }
            (None, None) => AggregatePolicy::Auto,
        })
    }
}

struct Out {
    format: Format,
    stdout: std::io::StdoutLock<'static>,
}

impl Out {
    fn emit(&mut self, text: &str) {
        // A closed pipe is not worth an error line.
        let _ = self.stdout.write_all(text.as_bytes());
    }
}

fn open(root: &Path) -> Result<Workspace> {
    Workspace::open(root)
}

fn validate(ws_root: &Path, target: &str, out: &mut Out) -> Result<()> {
    let path = Path::new(target);
    let violations: Vec<(String, String)> = if path.is_file() || target.ends_with(".json") {
        let text = read(path)?;
        let is_sheet = serde_json::from_str::<Value>(&text)
            .ok()
            .and_then(|v| v.get("assessments").map(|_| ()))
            .is_some();
        if is_sheet {
            parse_sheet(&text)?;
            Vec::new()
        } else {
            validate_design(&parse_design(&text)?)
                .into_iter()
                .map(|v| (v.field, v.rule))
                .collect()
        }
    } else {
        let (design, _) = open(ws_root)?.get_design(target)?;
        validate_design(&design).into_iter().map(|v| (v.field, v.rule)).collect()
    };
    match out.format {
        Format::Structured => {
            let list: Vec<Value> = violations
                .iter()
                .map(|(f, r)| serde_json::json!({"field": f, "rule": r}))
                .collect();
            out.emit(&to_json(&serde_json::json!({ "target": target, "violations": list })));
        }
        Format::Text if violations.is_empty() => out.emit(&format!("{target}: ok\n")),
        Format::Text => {
            for (f, r) in &violations {
                out.emit(&format!("{target}: {f}: {r}\n"));
            }
        }
    }
    match violations.first() {
        None => Ok(()),
        Some((field, rule)) => Err(Error::Schema {
            path: field.clone(),
            message: format!("{rule} ({} violation(s))", violations.len()),
        }),
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn score(
    ws: &Workspace,
    design: &str,
    criterion: &str,
    inputs: &Path,
    store: Option<(&str, Option<&str>)>,
    out: &mut Out,
) -> Result<()> {
    let criterion: CriterionId = criterion.parse()?;
    let inputs = read_json(inputs)?;
    let json = api::derive_json(ws, criterion, Some(design), &inputs)?;
    if let Some((assessor, stamp)) = store {
        let (d, _) = ws.get_design(design)?;
        let derivation = glyph_mcda::criteria::derive(
            criterion,
            &inputs,
            &glyph_mcda::criteria::DeriveContext {
                design: Some(&d),
                ..Default::default()
            },
        )?;
        let stamp = stamp.map_or_else(now, str::to_string);
        let (mut sheet, rev) = match ws.get_sheet(design, assessor) {
            Ok((s, rev)) => (s, Some(rev)),
            Err(Error::NotFound(_)) => (ScoreSheet::blank(design, assessor, &stamp), None),
            Err(e) => return Err(e),
        };
        let weight = sheet.get(criterion).weight;
        sheet.set(derivation.into_assessment(inputs).with_weight(weight))?;
        sheet.timestamp = stamp;
        ws.put_sheet(&sheet, rev.as_ref())?;
    }
    match out.format {
        Format::Structured => out.emit(&json),
        Format::Text => {
            let v: Value = serde_json::from_str(&json).expect("derivations serialize to JSON");
            let score = v["score"].as_str().unwrap_or("null");
            let level = v.get("level").map(|l| format!("level {l}, ")).unwrap_or_default();
            out.emit(&format!("{design} {criterion}: {level}score {score} ({})\n", v["mode"].as_str().unwrap_or("")));
        }
    }
    Ok(())
}

fn aggregate(ws: &Workspace, design: &str, policy: &AggregatePolicy, out: &mut Out) -> Result<()> {
    let report = api::aggregate(ws, design, policy)?;
    let (text, ext) = match out.format {
        Format::Structured => (glyph_mcda::report::render_report_json(&report), "json"),
        Format::Text => (render_report_text(&report), "txt"),
    };
    ws.write_report(&format!("{design}.{ext}"), &text)?;
    out.emit(&text);
    Ok(())
}

fn merge(ws: &Workspace, design: &str, policy: &AggregatePolicy, dest: Option<&Path>, out: &mut Out) -> Result<()> {
    let text = serialize_sheet(&api::resolve_sheet(ws, design, policy)?);
    match dest {
        Some(p) => write(p, text.as_bytes()),
        None => {
            out.emit(&text);
            Ok(())
        }
    }
}

fn compare(ws: &Workspace, ids: &[String], out: &mut Out) -> Result<()> {
    let (ranking, reports) = api::compare(ws, ids)?;
    out.emit(&match out.format {
        Format::Structured => glyph_mcda::report::render_ranking_json(&ranking, &reports),
        Format::Text => render_ranking_text(&ranking, &reports),
    });
    Ok(())
}

fn report(ws: &Workspace, ids: &[String], out: &mut Out) -> Result<()> {
    let reports = ids
        .iter()
        .map(|id| api::aggregate(ws, id, &AggregatePolicy::Auto))
        .collect::<Result<Vec<_>>>()?;
    out.emit(&match out.format {
        Format::Structured => to_json(&reports.iter().map(ReportDoc::from).collect::<Vec<_>>()),
        Format::Text => render_table(&reports),
    });
    Ok(())
}

fn write_sheet(sheet: &DegradationSheet, image: &Path, out_stem: Option<&Path>, suffix: &str, out: &mut Out) -> Result<()> {
    let stem = out_stem.map(Path::to_path_buf).unwrap_or_else(|| {
        let name = image.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        image.with_file_name(format!("{name}_{suffix}"))
    });
    let png = stem.with_extension("png");
    sheet.composite.write_png(&png)?;
    let manifest = sheet.manifest_json();
    write(&stem.with_extension("json"), manifest.as_bytes())?;
    match out.format {
        Format::Structured => out.emit(&manifest),
        Format::Text => out.emit(&format!(
            "{}  {}×{} px, {} cells\n",
            png.display(),
            sheet.manifest.width,
            sheet.manifest.height,
            sheet.manifest.cells.len()
        )),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let mut out = Out {
        format: cli.format,
        stdout: std::io::stdout().lock(),
    };
    let root = cli.workspace.as_path();
    match cli.command {
        Command::Validate { target } => validate(root, &target, &mut out),
        Command::Score {
            design,
            criterion,
            inputs,
            assessor,
            write: _,
            timestamp,
        } => {
            let store = assessor.as_deref().map(|a| (a, timestamp.as_deref()));
            score(&open(root)?, &design, &criterion, &inputs, store, &mut out)
        }
        Command::Aggregate { design, policy } => aggregate(&open(root)?, &design, &policy.resolve()?, &mut out),
        Command::Merge { design, policy, out: dest } => {
            let policy = match policy.resolve()? {
                AggregatePolicy::Auto => AggregatePolicy::Mean,
                p => p,
            };
            merge(&open(root)?, &design, &policy, dest.as_deref(), &mut out)
        }
        Command::Compare { designs } => compare(&open(root)?, &designs, &mut out),
        Command::Report { designs } => report(&open(root)?, &designs, &mut out),
        Command::GeometrySheet { image, vf, vd, ppcm, shape, out: stem } => {
            let geom = ViewingGeometry { vf_deg: vf, vd_cm: vd, shape };
            let sheet = geometry_sheet(&GlyphImage::read_png(&image)?, &geom, ppcm)?;
            write_sheet(&sheet, &image, stem.as_deref(), "geometry", &mut out)
        }
        Command::ColorimetrySheet { image, out: stem } => {
            let sheet = colorimetry_sheet(&GlyphImage::read_png(&image)?)?;
            write_sheet(&sheet, &image, stem.as_deref(), "colorimetry", &mut out)
        }
        Command::Serve { bind } => {
            tracing_subscriber::fmt()
                .with_env_filter(
                    tracing_subscriber::EnvFilter::try_from_default_env()
                        .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
                )
                .with_writer(std::io::stderr)
                .init();
            let ws = open(root)?;
            let rt = tokio::runtime::Runtime::new().map_err(|source| Error::Io {
                path: root.to_path_buf(),
                source,
            })?;
            rt.block_on(glyph_mcda_service::serve(ws, bind))
                .map_err(|source| Error::Io {
                    path: PathBuf::from(bind.to_string()),
                    source,
                })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", api::error_json(&e));
            ExitCode::FAILURE
        }
    }
}
