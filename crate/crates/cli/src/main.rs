//! `nl2sql-forge`: every toolkit module over JSON and JSONL files.
//!
//! Results go to stdout (or `--out`). Exit code 1 means a domain error,
//! reported as one JSON line `{"error": kind, "message": text}` on stderr;
//! exit code 2 means a usage error.

mod error;
mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::{DateTime, Utc};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use nl2sql_forge::decoding::scorers::{CharTrigramScorer, UniformScorer};
use nl2sql_forge::decoding::{beam_decode, init_state, valid_mask, Scorer, Vocabulary};
use nl2sql_forge::exec::{execute, Database, Table};
use nl2sql_forge::feedback::{build_training_set, select_worst_templates, InteractionRecord};
use nl2sql_forge::grammar::EBNF;
use nl2sql_forge::quality::{
    extract_features, features_of, filter_pairs, tree_eval, tree_train, CrowdPair, DecisionTree, FeatureConfig,
    Lexicons,
};
use nl2sql_forge::ted::{aggregate_report_with_db, ted, CostConfig, EvalReport, EvalRow};
use nl2sql_forge::telemetry::{ab_report, validate_events, variant_metrics, TelemetryEvent};
use nl2sql_forge::templates::{extract_template, sample_by_distribution, template_distribution};
use nl2sql_forge::{parse, serialize, validate_against_schema, DataModelSchema, SqlAst};

use error::CliError;
use io::{read_csv, read_json, read_jsonl, read_text, Output};

#[derive(Parser)]
#[command(
    name = "nl2sql-forge",
    version,
    about = "Grammar-constrained NL-to-SQL decoding, evaluation and curation"
)]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a query; prints its canonical text, AST and, with --schema, any violations.
    Parse {
        #[command(flatten)]
        sql: SqlInput,
        #[arg(long)]
        schema: Option<PathBuf>,
    },
    /// Tokens allowed after a prefix.
    Mask {
        #[arg(long)]
        schema: PathBuf,
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long, default_value = "")]
        prefix: String,
    },
    /// Constrained beam search.
    Decode {
        #[arg(long)]
        schema: PathBuf,
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long, value_enum, default_value_t = ScorerKind::Uniform)]
        scorer: ScorerKind,
        /// Corpus JSONL ({"sql": ...} per line) for the ngram scorer.
        #[arg(long, required_if_eq("scorer", "ngram"))]
        train_corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        beam: usize,
        #[arg(long, default_value_t = 80)]
        max_tokens: usize,
        #[arg(long)]
        nl: String,
    },
    /// Tree edit distance between two query files.
    Ted {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        costs: Option<PathBuf>,
    },
    /// Per-template and overall metrics over JSONL rows {"gold", "pred", "latency_s"}.
    ///
    /// Output fields: templates[{template, count, mean_ted, exact_match_rate,
    /// execution_match_rate?}], micro and macro {mean_ted, exact_match_rate,
    /// execution_match_rate?}, latency {p50, p90, p99}.
    EvalReport {
        #[arg(long)]
        rows: PathBuf,
        #[arg(long)]
        costs: Option<PathBuf>,
        /// Database JSON; adds execution-match rates.
        #[arg(long)]
        db: Option<PathBuf>,
    },
    /// Run a query against a database.
    Exec {
        #[command(flatten)]
        sql: SqlInput,
        #[arg(long)]
        db: Option<PathBuf>,
        /// Extra table from CSV with a header row, as NAME=PATH. Repeatable.
        #[arg(long, value_name = "NAME=PATH")]
        csv: Vec<String>,
    },
    #[command(subcommand)]
    Template(TemplateCommand),
    /// Quality estimation of crowd-sourced pairs.
    #[command(subcommand)]
    Qe(QeCommand),
    #[command(subcommand)]
    Feedback(FeedbackCommand),
    #[command(subcommand)]
    Metrics(MetricsCommand),
    #[command(subcommand)]
    Grammar(GrammarCommand),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SqlInput {
    /// Query text.
    #[arg(long)]
    query: Option<String>,
    /// File holding the query text.
    #[arg(long)]
    sql: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScorerKind {
    Uniform,
    /// Character trigrams trained on --train-corpus.
    Ngram,
}

#[derive(Subcommand)]
enum TemplateCommand {
    /// Template of one query.
    Extract {
        #[command(flatten)]
        sql: SqlInput,
    },
    /// Template counts and frequencies of a corpus.
    Dist {
        #[arg(long)]
        corpus: PathBuf,
    },
    /// Draw `n` queries following the corpus template distribution.
    Sample {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Args)]
struct FeatureArgs {
    /// JSON {"asc": [...], "desc": [...], "limit": [...]}.
    #[arg(long)]
    lexicons: Option<PathBuf>,
    /// Also require table and column names to appear in the question.
    #[arg(long)]
    identifiers_are_terminals: bool,
}

#[derive(Subcommand)]
enum QeCommand {
    /// Feature vectors of JSONL pairs {"nl", "sql", "work_time_s"}.
    Features {
        #[arg(long)]
        pairs: PathBuf,
        #[command(flatten)]
        features: FeatureArgs,
    },
    /// Accept or flag pairs by tree score.
    Score {
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long)]
        tree: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[command(flatten)]
        features: FeatureArgs,
    },
    /// Fit a decision tree on JSONL {"nl", "sql", "work_time_s", "label"}.
    Train {
        #[arg(long)]
        labeled: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_depth: usize,
        #[arg(long, default_value_t = 1)]
        min_leaf: usize,
        #[command(flatten)]
        features: FeatureArgs,
    },
}

#[derive(Subcommand)]
enum FeedbackCommand {
    /// Retraining pairs from JSONL interaction records, scored by a tree.
    ///
    /// Records carry no labeling time, so work time is taken as 0.
    Build {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        tree: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[command(flatten)]
        features: FeatureArgs,
    },
    /// The k templates with the highest mean TED in an eval report.
    Worst {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Subcommand)]
enum MetricsCommand {
    /// Rates and latency percentiles of one variant.
    Rates {
        #[arg(long)]
        events: PathBuf,
        #[arg(long)]
        variant: String,
        /// RFC 3339 instant closing the 28-day window.
        #[arg(long)]
        window_end: DateTime<Utc>,
    },
    /// Treatment against control.
    AbReport {
        #[arg(long)]
        events: PathBuf,
        #[arg(long)]
        control: String,
        #[arg(long)]
        treatment: String,
        #[arg(long)]
        window_end: DateTime<Utc>,
    },
}

#[derive(Subcommand)]
enum GrammarCommand {
    /// EBNF of the accepted SQL subset.
    Print,
}

#[derive(Serialize, Deserialize)]
struct CorpusLine {
    sql: String,
}

#[derive(Deserialize)]
struct RowLine {
    gold: String,
    pred: String,
    latency_s: f64,
}

#[derive(Deserialize)]
struct LabeledLine {
    nl: String,
    sql: String,
    work_time_s: f64,
    label: bool,
}

impl SqlInput {
    fn load(&self) -> Result<SqlAst, CliError> {
        let text = match (&self.query, &self.sql) {
            (Some(q), _) => q.clone(),
            (None, Some(p)) => read_text(p)?,
            (None, None) => unreachable!("clap requires one of --query and --sql"),
        };
        Ok(parse(text.trim())?)
    }
}

impl FeatureArgs {
    fn config(&self) -> Result<FeatureConfig, CliError> {
        Ok(FeatureConfig {
            lexicons: match &self.lexicons {
                Some(p) => read_json::<Lexicons>(p)?,
                None => Lexicons::default(),
            },
            identifiers_are_terminals: self.identifiers_are_terminals,
        })
    }
}

fn costs(path: &Option<PathBuf>) -> Result<CostConfig, CliError> {
    let c = match path {
        Some(p) => read_json::<CostConfig>(p)?,
        None => CostConfig::default(),
    };
    c.validate()?;
    Ok(c)
}

fn corpus(path: &Path) -> Result<Vec<SqlAst>, CliError> {
    read_jsonl::<CorpusLine>(path)?
        .into_iter()
        .enumerate()
        .map(|(i, l)| parse(&l.sql).map_err(|e| CliError::Input(format!("{}: entry {}: {e}", path.display(), i + 1))))
        .collect()
}

fn check_threshold(t: f64) -> Result<(), CliError> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(CliError::Input(format!("threshold {t} outside [0, 1]")))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut out = Output::new(cli.out);
    match cli.command {
        Command::Parse { sql, schema } => {
            let ast = sql.load()?;
            let mut result = json!({ "sql": serialize(&ast), "ast": ast });
            if let Some(p) = schema {
                let schema: DataModelSchema = read_json(&p)?;
                result["violations"] = json!(validate_against_schema(&ast, &schema));
            }
            out.json(&result);
        }
        Command::Mask { schema, vocab, prefix } => {
            let schema: DataModelSchema = read_json(&schema)?;
            let vocab: Vocabulary = read_json(&vocab)?;
            let state = init_state(&schema).advance(&prefix)?;
            let mask = valid_mask(&state, &vocab)?;
            let allowed: Vec<_> = mask
                .allowed_indices()
                .map(|i| json!({ "index": i, "token": vocab.token(i) }))
                .collect();
            out.json(&json!({
                "viability": format!("{:?}", state.viability()),
                "eos_allowed": mask.is_allowed(vocab.eos()),
                "allowed": allowed,
            }));
        }
        Command::Decode {
            schema,
            vocab,
            scorer,
            train_corpus,
            beam,
            max_tokens,
            nl,
        } => {
            let schema: DataModelSchema = read_json(&schema)?;
            let vocab: Vocabulary = read_json(&vocab)?;
            let scorer: Box<dyn Scorer> = match (scorer, train_corpus) {
                (ScorerKind::Ngram, Some(p)) => {
                    let texts: Vec<String> = read_jsonl::<CorpusLine>(&p)?.into_iter().map(|l| l.sql).collect();
                    Box::new(CharTrigramScorer::train(vocab.clone(), &texts))
                }
                _ => Box::new(UniformScorer::new(&vocab)),
            };
            let input = schema.encode_input(&nl);
            let hyps = beam_decode(&input, &schema, scorer.as_ref(), &vocab, beam, max_tokens)?;
            let candidates: Vec<_> = hyps
                .iter()
                .map(|h| json!({ "sql": h.text, "log_score": h.log_score, "tokens": h.token_indices }))
                .collect();
            out.json(&json!({ "candidates": candidates }));
        }
        Command::Ted { gold, pred, costs: c } => {
            let costs = costs(&c)?;
            let gold = parse(read_text(&gold)?.trim())?;
            let pred = parse(read_text(&pred)?.trim())?;
            out.json(&json!({ "ted": ted(&gold, &pred, &costs) }));
        }
        Command::EvalReport { rows, costs: c, db } => {
            let costs = costs(&c)?;
            let db: Option<Database> = db.as_deref().map(read_json).transpose()?;
            let rows = read_jsonl::<RowLine>(&rows)?
                .into_iter()
                .enumerate()
                .map(|(i, r)| {
                    let at = |e| CliError::Input(format!("row {}: {e}", i + 1));
                    Ok(EvalRow {
                        gold: parse(&r.gold).map_err(at)?,
                        pred: parse(&r.pred).map_err(at)?,
                        latency_s: r.latency_s,
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            out.json(&aggregate_report_with_db(&rows, &costs, db.as_ref())?);
        }
        Command::Exec { sql, db, csv } => {
            let ast = sql.load()?;
            let mut tables: Vec<Table> = match &db {
                Some(p) => read_json::<Database>(p)?.tables().to_vec(),
                None => Vec::new(),
            };
            for arg in &csv {
                let (name, path) = arg
                    .split_once('=')
                    .ok_or_else(|| CliError::Input(format!("--csv {arg:?} is not NAME=PATH")))?;
                let path = PathBuf::from(path);
                let (header, rows) = read_csv(&path)?;
                tables.push(Table::from_text_rows(name, header, rows)?);
            }
            if tables.is_empty() {
                return Err(CliError::Input("give --db or at least one --csv table".into()));
            }
            let db = Database::new(tables)?;
            out.json(&execute(&ast, &db)?);
        }
        Command::Template(cmd) => match cmd {
            TemplateCommand::Extract { sql } => out.json(&extract_template(&sql.load()?)),
            TemplateCommand::Dist { corpus: p } => out.json(&template_distribution(&corpus(&p)?)?),
            TemplateCommand::Sample { corpus: p, n } => {
                let sample = sample_by_distribution(&corpus(&p)?, n, cli.seed)?;
                out.jsonl(sample.iter().map(|q| CorpusLine { sql: serialize(q) }));
            }
        },
        Command::Qe(cmd) => match cmd {
            QeCommand::Features { pairs, features } => {
                let config = features.config()?;
                let rows = read_jsonl::<CrowdPair>(&pairs)?
                    .iter()
                    .map(|p| extract_features(&p.nl, &p.sql, p.work_time_s, &config))
                    .collect::<Result<Vec<_>, _>>()?;
                out.jsonl(rows);
            }
            QeCommand::Score {
                pairs,
                tree,
                threshold,
                features,
            } => {
                let tree: DecisionTree = read_json(&tree)?;
                let pairs: Vec<CrowdPair> = read_jsonl(&pairs)?;
                out.json(&filter_pairs(&pairs, &tree, threshold, &features.config()?)?);
            }
            QeCommand::Train {
                labeled,
                max_depth,
                min_leaf,
                features,
            } => {
                let config = features.config()?;
                let data = read_jsonl::<LabeledLine>(&labeled)?
                    .iter()
                    .map(|l| Ok((extract_features(&l.nl, &l.sql, l.work_time_s, &config)?, l.label)))
                    .collect::<Result<Vec<_>, CliError>>()?;
                out.json(&tree_train(&data, max_depth, min_leaf)?);
            }
        },
        Command::Feedback(cmd) => match cmd {
            FeedbackCommand::Build {
                records,
                tree,
                threshold,
                features,
            } => {
                check_threshold(threshold)?;
                let tree: DecisionTree = read_json(&tree)?;
                let config = features.config()?;
                let records: Vec<InteractionRecord> = read_jsonl(&records)?;
                let scorer = |nl: &str, sql: &str| match parse(sql) {
                    Ok(ast) => tree_eval(&tree, &features_of(nl, &ast, 0.0, &config)).1,
                    Err(_) => 0.0,
                };
                out.jsonl(build_training_set(&records, &scorer, threshold));
            }
            FeedbackCommand::Worst { report, k } => {
                let report: EvalReport = read_json(&report)?;
                out.json(&select_worst_templates(&report, k)?);
            }
        },
        Command::Metrics(cmd) => match cmd {
            MetricsCommand::Rates {
                events,
                variant,
                window_end,
            } => {
                let events: Vec<TelemetryEvent> = read_jsonl(&events)?;
                validate_events(&events)?;
                out.json(&variant_metrics(&events, &variant, window_end)?);
            }
            MetricsCommand::AbReport {
                events,
                control,
                treatment,
                window_end,
            } => {
                let events: Vec<TelemetryEvent> = read_jsonl(&events)?;
                out.json(&ab_report(&events, &control, &treatment, window_end)?);
            }
        },
        Command::Grammar(GrammarCommand::Print) => out.text(EBNF),
    }
    out.finish()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("NL2SQL_FORGE_LOG", "error")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::debug!("{e:?}");
            eprintln!("{}", e.to_json());
            ExitCode::from(1)
        }
    }
}
