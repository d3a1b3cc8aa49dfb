use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser as ClapParser, Subcommand, ValueEnum};
use serde::Serialize;

use dexgrasp::hand::{write_plan_csv, ContactReport, GraspPlan};
use dexgrasp::knowledge_base::{write_csv, Metric};
use dexgrasp::learner::{
    feasibility_score, labeled_examples, match_score, rank_features, train, GraspClass, TrainConfig,
};
use dexgrasp::parser::render;
use dexgrasp::pipeline::{
    evaluate_all, ingest_pages, label_matches, load_hand, load_kb, load_labels, load_parser,
    run_pipeline, run_record, PipelineConfig, PipelineError, PipelineRun, Resources,
};

const BUNDLED_CONFIG: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/config.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Debug, ClapParser)]
#[command(
    name = "dexgrasp",
    version,
    about = "Object descriptions to dexterous grasp plans"
)]
struct Cli {
    /// Pipeline configuration (TOML). Defaults to data/config.toml.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the retrieval metric (jpd, euclidean, minkowski[:p], cosine, kd-tree).
    #[arg(long, global = true)]
    metric: Option<Metric>,
    #[arg(long, global = true, value_enum, default_value = "table")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract record drafts from saved product pages.
    Ingest {
        dir: PathBuf,
        /// Write the drafts as knowledge-base CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse a description (with dimension imputation).
    Parse { text: String },
    /// Retrieve the nearest knowledge-base records.
    Query {
        #[arg(required_unless_present = "label")]
        text: Option<String>,
        /// Look up by object label instead of parsing.
        #[arg(long, conflicts_with = "text")]
        label: Option<String>,
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
    /// Train the grasp classifier on the labels.
    Train {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full pipeline for an object id or a description.
    Predict { input: String },
    /// Plan and simulate a grasp of one class on a knowledge-base object.
    Plan {
        object_id: u32,
        class: GraspClass,
        /// Export the trajectory as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run every evaluation section.
    Eval,
    /// Rank attributes by drop-attribute retraining.
    RankFeatures,
}

#[derive(Serialize)]
struct Echo<'a, T: Serialize> {
    config: &'a PipelineConfig,
    result: T,
}

fn config_path(cli: &Cli) -> PathBuf {
    match &cli.config {
        Some(p) => p.clone(),
        None if Path::new("data/config.toml").is_file() => PathBuf::from("data/config.toml"),
        None => PathBuf::from(BUNDLED_CONFIG),
    }
}

fn apply_overrides(cli: &Cli, mut config: PipelineConfig) -> PipelineConfig {
    if let Some(seed) = cli.seed {
        config.set_seed(seed);
    }
    if let Some(metric) = cli.metric {
        config.metric = metric;
    }
    config
}

fn emit<T: Serialize>(
    format: Format,
    config: &PipelineConfig,
    result: &T,
    table: impl FnOnce() -> String,
) -> anyhow::Result<()> {
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&Echo { config, result })?
        ),
        Format::Table => print!("{}", table()),
    }
    Ok(())
}

fn plan_table(out: &mut String, plan: &GraspPlan, contact: &ContactReport) {
    let _ = writeln!(
        out,
        "class {}  d_o {:.3} cm  d_vf {:.3} cm  alpha* {:.4}",
        plan.class, plan.d_o, plan.d_vf, plan.alpha_star
    );
    let final_theta: Vec<String> = plan
        .final_config()
        .theta
        .iter()
        .map(|t| format!("{t:.3}"))
        .collect();
    let _ = writeln!(out, "final joints [{}]", final_theta.join(", "));
    for c in &contact.contacts {
        let stop = c
            .stop_alpha
            .map_or("no contact".to_string(), |a| format!("stops at {a:.3}"));
        let _ = writeln!(out, "  {:<7} {stop}", c.finger.name());
    }
    let _ = writeln!(out, "secured: {}", contact.secured);
}

fn run_table(run: &PipelineRun) -> String {
    let mut out = String::new();
    let r = &run.retrieval;
    let how = match r.distance {
        Some(d) => format!("{:?} match, distance {d:.4}", r.mode),
        None => format!("{:?} match", r.mode),
    };
    let _ = writeln!(out, "retrieved #{} {} ({how})", r.record.id, r.record.label);
    if let Some(p) = &run.parse {
        let _ = writeln!(out, "parsed: {}", render(&p.query));
    }
    for (class, p) in run.distribution.iter() {
        let mark = if class == run.class { "  <" } else { "" };
        let _ = writeln!(out, "  {:<7} {p:.3}{mark}", class.code());
    }
    match (&run.plan, &run.contact, &run.plan_error) {
        (Some(plan), Some(contact), _) => plan_table(&mut out, plan, contact),
        (_, _, Some(err)) => {
            let _ = writeln!(out, "{err}");
        }
        _ => {}
    }
    out
}

fn run(cli: &Cli) -> Result<(), PipelineError> {
    let path = config_path(cli);
    // eval reports missing fixtures per section instead of refusing to start
    if let Command::Eval = cli.command {
        let config = apply_overrides(cli, PipelineConfig::load_unchecked(&path)?);
        let report = evaluate_all(&config);
        match cli.format {
            Format::Json => println!("{}", report.to_json()),
            Format::Table => print!("{}", report.to_table()),
        }
        return if report.is_complete() {
            Ok(())
        } else {
            Err(PipelineError::Input(
                "evaluation incomplete: some sections were skipped".into(),
            ))
        };
    }
    let config = apply_overrides(cli, PipelineConfig::load(&path)?);
    let io = |e: anyhow::Error| PipelineError::Io(std::io::Error::other(e.to_string()));

    match &cli.command {
        Command::Ingest { dir, out } => {
            let parser = load_parser(&config)?;
            let kb = load_kb(&config)?;
            let first_id = kb.records().iter().map(|r| r.id).max().unwrap_or(0) + 1;
            let report = ingest_pages(dir, parser.lexicon(), first_id)?;
            if let Some(out) = out {
                let file = std::fs::File::create(out)?;
                write_csv(file, &report.drafts).map_err(|e| PipelineError::stage("ingest", e))?;
            }
            emit(cli.format, &config, &report, || {
                let mut t = String::new();
                for (d, e) in report.drafts.iter().zip(&report.extractions) {
                    let _ = writeln!(t, "#{} {}  ({})", d.id, d.label, e.source.display());
                    for v in &e.values {
                        let _ = writeln!(
                            t,
                            "  {:<10} {:<12} \"{}\"",
                            v.attribute.name(),
                            v.value,
                            v.snippet
                        );
                    }
                    for n in &e.notes {
                        let _ = writeln!(t, "  note: {n}");
                    }
                    if !e.missing.is_empty() {
                        let _ = writeln!(t, "  needs manual completion: {}", e.missing.join(", "));
                    }
                }
                for s in &report.skipped {
                    let _ = writeln!(t, "skipped {}: {}", s.source.display(), s.reason);
                }
                t
            })
            .map_err(io)
        }
        Command::Parse { text } => {
            let parser = load_parser(&config)?;
            let kb = load_kb(&config)?;
            let result = parser
                .parse_with(text, &kb)
                .map_err(|e| PipelineError::stage("parse", e))?;
            emit(cli.format, &config, &result, || {
                let mut t = format!("{}\n", render(&result.query));
                for (attr, p) in &result.provenance {
                    let _ = writeln!(t, "  {:<10} \"{}\"", attr.name(), p.evidence);
                }
                for a in &result.imputed {
                    let _ = writeln!(t, "  {:<10} imputed", a.name());
                }
                for w in &result.warnings {
                    let _ = writeln!(t, "  warning: {w}");
                }
                t
            })
            .map_err(io)
        }
        Command::Query { text, label, k } => {
            let kb = load_kb(&config)?;
            #[derive(Serialize)]
            struct Hit {
                id: u32,
                label: String,
                distance: Option<f64>,
            }
            let hits: Vec<Hit> = if let Some(label) = label {
                let record = label_matches(&kb, label).ok_or_else(|| {
                    PipelineError::stage("retrieve", format!("no object labelled '{label}'"))
                })?;
                vec![Hit {
                    id: record.id,
                    label: record.label.clone(),
                    distance: None,
                }]
            } else {
                let parser = load_parser(&config)?;
                let text = text.as_deref().expect("clap requires text or label");
                let parsed = parser
                    .parse_with(text, &kb)
                    .map_err(|e| PipelineError::stage("parse", e))?;
                kb.retrieve(&parsed.query, config.metric, (*k).min(kb.len()))
                    .map_err(|e| PipelineError::stage("retrieve", e))?
                    .into_iter()
                    .map(|n| Hit {
                        id: n.record.id,
                        label: n.record.label.clone(),
                        distance: Some(n.distance),
                    })
                    .collect()
            };
            emit(cli.format, &config, &hits, || {
                let mut t = String::new();
                for h in &hits {
                    let d = h
                        .distance
                        .map_or("label".to_string(), |d| format!("{d:.4}"));
                    let _ = writeln!(t, "{:>4} {:<24} {d}", h.id, h.label);
                }
                t
            })
            .map_err(io)
        }
        Command::Train { out } => {
            let kb = load_kb(&config)?;
            let labels = load_labels(&config)?;
            let stage = |e| PipelineError::stage("train", e);
            let data = labeled_examples(&kb, &labels).map_err(stage)?;
            let outcome = train(&data, &config.training).map_err(stage)?;
            let predictions = data
                .iter()
                .map(|(f, _)| outcome.model.predict(f))
                .collect::<Result<Vec<_>, _>>()
                .map_err(stage)?;
            #[derive(Serialize)]
            struct Summary {
                objects: usize,
                final_loss: Option<f64>,
                feasibility: f64,
                match_rate: f64,
                saved_to: Option<PathBuf>,
            }
            let summary = Summary {
                objects: data.len(),
                final_loss: outcome.final_loss(),
                feasibility: feasibility_score(&labels, &predictions).map_err(stage)?,
                match_rate: match_score(&labels, &predictions).map_err(stage)?,
                saved_to: out.clone(),
            };
            if let Some(out) = out {
                outcome.model.save(out).map_err(stage)?;
            }
            emit(cli.format, &config, &summary, || {
                format!(
                    "objects {}  final loss {:.4}  F_l {:.3}  F_m {:.3}\n",
                    summary.objects,
                    summary.final_loss.unwrap_or(f64::NAN),
                    summary.feasibility,
                    summary.match_rate
                )
            })
            .map_err(io)
        }
        Command::Predict { input } => {
            let res = Resources::load(config)?;
            let run = match input.trim().parse::<u32>() {
                Ok(id) => run_record(id, &res)?,
                Err(_) => run_pipeline(input, &res)?,
            };
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&run)?),
                Format::Table => print!("{}", run_table(&run)),
            }
            Ok(())
        }
        Command::Plan {
            object_id,
            class,
            csv,
        } => {
            let kb = load_kb(&config)?;
            let hand = load_hand(&config)?;
            let record = kb
                .get(*object_id)
                .ok_or_else(|| PipelineError::Input(format!("no object with id {object_id}")))?;
            let (plan, contact) = hand
                .plan_and_simulate(*class, record, config.evaluation.plan_steps)
                .map_err(|e| PipelineError::stage("plan", e))?;
            if let Some(csv) = csv {
                let file = std::fs::File::create(csv)?;
                write_plan_csv(&plan, file).map_err(|e| PipelineError::stage("plan", e))?;
            }
            #[derive(Serialize)]
            struct Planned<'a> {
                plan: &'a GraspPlan,
                contact: &'a ContactReport,
            }
            emit(
                cli.format,
                &config,
                &Planned {
                    plan: &plan,
                    contact: &contact,
                },
                || {
                    let mut t = format!("#{} {}\n", record.id, record.label);
                    plan_table(&mut t, &plan, &contact);
                    t
                },
            )
            .map_err(io)
        }
        Command::RankFeatures => {
            let kb = load_kb(&config)?;
            let labels = load_labels(&config)?;
            let stage = |e| PipelineError::stage("ranking", e);
            let data = labeled_examples(&kb, &labels).map_err(stage)?;
            let schedule = TrainConfig {
                epochs: config.evaluation.rfe_epochs,
                hidden: config.evaluation.rfe_hidden.clone(),
                ..config.training.clone()
            };
            let ranking = rank_features(&data, &schedule).map_err(stage)?;
            emit(cli.format, &config, &ranking, || {
                let mut t = String::new();
                for (i, r) in ranking.iter().enumerate() {
                    let _ = writeln!(
                        t,
                        "{:>2}. {:<10} {:+.4}",
                        i + 1,
                        r.attribute.name(),
                        r.importance
                    );
                }
                t
            })
            .map_err(io)
        }
        Command::Eval => unreachable!("handled above"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).with_context(|| "dexgrasp failed") {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let code = err
                .downcast_ref::<PipelineError>()
                .map_or(1, PipelineError::exit_code);
            eprintln!("error: {:#}", err);
            ExitCode::from(code as u8)
        }
    }
}
