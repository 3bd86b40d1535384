use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use tabqa_core::engine::{Engine, EngineConfig, Response};
use tabqa_core::eval::{build_training_corpus, evaluate_with, load_dataset};
use tabqa_core::predictor::{train, write_corpus_tsv, AbductionMode, PredictorModel, TrainConfig};
use tabqa_server::payload::AnswerPayload;
use tabqa_server::{router, AppState};

#[derive(Parser)]
#[command(name = "tabqa", version, about = "Answer questions over CSV tables and explain how they were read")]
struct Args {
    #[command(flatten)]
    engine: EngineArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct EngineArgs {
    /// Operand model produced by `train`; required for `--abduction ml`.
    #[arg(long, global = true)]
    model: Option<PathBuf>,
    /// Scorer weights file.
    #[arg(long, global = true)]
    weights: Option<PathBuf>,
    /// Grammar rules file.
    #[arg(long, global = true)]
    grammar: Option<PathBuf>,
    /// Cell recognizer file.
    #[arg(long, global = true)]
    recognizers: Option<PathBuf>,
    #[arg(long, global = true)]
    intents: Option<PathBuf>,
    #[arg(long, global = true)]
    stopwords: Option<PathBuf>,
}

impl EngineArgs {
    fn config(&self, abduction: AbductionMode) -> EngineConfig {
        EngineConfig {
            abduction,
            weights_path: self.weights.clone(),
            grammar_path: self.grammar.clone(),
            model_path: self.model.clone(),
            recognizers_path: self.recognizers.clone(),
            intents_path: self.intents.clone(),
            stopwords_path: self.stopwords.clone(),
        }
    }

    fn model(&self) -> anyhow::Result<Option<PredictorModel>> {
        self.model
            .as_deref()
            .map(|p| PredictorModel::load(p).with_context(|| format!("loading model {}", p.display())))
            .transpose()
    }
}

#[derive(Subcommand)]
enum Command {
    /// Answer one question over one table.
    Ask {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        question: String,
        #[arg(long, default_value = "baseline")]
        abduction: AbductionMode,
        /// Print the full JSON payload.
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a dataset split.
    Eval {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        split: String,
        #[arg(long, default_value = "baseline")]
        abduction: AbductionMode,
        /// Only the first N examples.
        #[arg(long)]
        limit: Option<usize>,
        /// Write per-example outcomes as TSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train the operand model on counter-factual labels from a split.
    Train {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "train")]
        split: String,
        /// Also write the generated training examples as TSV.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = TrainConfig::default().epochs)]
        epochs: u32,
        #[arg(long, default_value_t = TrainConfig::default().seed)]
        seed: u64,
    },
    /// Serve the HTTP API over the tables of a dataset directory.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long)]
        dataset: PathBuf,
        /// Mode used when a request does not name one.
        #[arg(long, default_value = "baseline")]
        abduction: AbductionMode,
    },
}

fn print_response(r: &Response, out: &mut impl Write) -> std::io::Result<()> {
    let answer = r.answer.value.strings();
    if answer.is_empty() {
        writeln!(out, "Answer: (none)")?;
    } else {
        writeln!(out, "Answer: {}", answer.join(" | "))?;
    }
    let i = &r.interpretation;
    if let Some(m) = &i.message {
        writeln!(out, "{m}")?;
    }
    writeln!(out)?;
    for t in &i.terms {
        let label = t.provenance.split(':').next().unwrap_or_default();
        let target = t.target.as_deref().unwrap_or("-");
        match t.confidence {
            Some(c) => writeln!(out, "  {:<24} {:<32} {target} ({c:.2})", t.term, label)?,
            None => writeln!(out, "  {:<24} {:<32} {target}", t.term, label)?,
        }
    }
    for a in &i.abductions {
        let conf = a.confidence.map(|c| format!(" confidence {c:.2}")).unwrap_or_default();
        writeln!(out, "  abduced {:?} = {} ({}){conf}", a.slot, a.heading, a.provenance)?;
    }
    for m in &i.missing {
        writeln!(out, "  missing {m:?}")?;
    }
    if let Some(q) = &i.query {
        writeln!(out, "\n{q}")?;
    }
    writeln!(out, "\n{} candidate parse(s)", r.candidates.len())
}

fn run(args: Args) -> anyhow::Result<()> {
    match args.command {
        Command::Ask { table, question, abduction, json } => {
            let engine = Engine::with_model(args.engine.config(abduction), args.engine.model()?)?;
            let t = engine.load_table(&table)?;
            let r = engine.answer(&question, &t)?;
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            if json {
                let id = table.to_string_lossy();
                serde_json::to_writer_pretty(&mut out, &AnswerPayload::new(&id, abduction, &r))?;
                writeln!(out)?;
            } else {
                print_response(&r, &mut out)?;
            }
        }
        Command::Eval { dataset, split, abduction, limit, out } => {
            let engine = Engine::with_model(args.engine.config(abduction), args.engine.model()?)?;
            let mut examples = load_dataset(&dataset, &split)?;
            if let Some(n) = limit {
                examples.truncate(n);
            }
            let report = evaluate_with(&engine, &examples, &dataset);
            if let Some(path) = out {
                std::fs::write(&path, report.to_tsv()).with_context(|| format!("writing {}", path.display()))?;
            }
            print!("{}", report.summary());
        }
        Command::Train { dataset, out, split, corpus, epochs, seed } => {
            if args.engine.model.is_some() {
                bail!("train builds its own model; drop --model");
            }
            let engine = Engine::with_model(args.engine.config(AbductionMode::Baseline), None)?;
            let examples = load_dataset(&dataset, &split)?;
            let tc = build_training_corpus(&engine, &examples, &dataset);
            println!(
                "{} questions, {} with a missing operand, {} training examples, {} violations",
                tc.questions,
                tc.incomplete,
                tc.examples.len(),
                tc.violations
            );
            if let Some(path) = corpus {
                let mut f = std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                write_corpus_tsv(&tc.examples, &mut f)?;
            }
            let config = TrainConfig { epochs, seed, ..TrainConfig::default() };
            let model = train(&tc.examples, &config)?;
            model.save(&out)?;
            let m = &model.metadata;
            println!(
                "trained {} epochs on {} examples ({} held out), held-out accuracy {}",
                m.epochs,
                m.train_examples,
                m.heldout_examples,
                m.heldout_accuracy.map_or("n/a".to_string(), |a| format!("{:.2}%", a * 100.0))
            );
            println!("model written to {}", out.display());
        }
        Command::Serve { port, dataset, abduction } => {
            let state = AppState::new(dataset, args.engine.config(abduction), args.engine.model()?, abduction)?;
            let app = router(Arc::new(state));
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async move {
                let addr = SocketAddr::from(([0, 0, 0, 0], port));
                let listener = tokio::net::TcpListener::bind(addr).await?;
                log::info!("listening on {addr}");
                axum::serve(listener, app)
                    .with_graceful_shutdown(async {
                        let _ = tokio::signal::ctrl_c().await;
                    })
                    .await
            })?;
        }
    }
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    if let Err(e) = run(Args::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
