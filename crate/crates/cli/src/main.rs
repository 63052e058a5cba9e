mod config;
mod failure;
mod output;

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use stancevec_core::classify::{explain, load_predictions, ClassificationResult, PredictionRecord};
use stancevec_core::conllu::{attach, group_by_article, load_conllu};
use stancevec_core::coref::load_substitutions;
use stancevec_core::corpus::{
    self, enforce_window, load_corpus, Article, ArticleRecord, DateWindow, Leaning,
};
use stancevec_core::evaluation::{score, temporal_apply};
use stancevec_core::pipeline::{self, Coref, TrainConfig};
use stancevec_core::refres::{eval_refres, load_gold, resolve_sentence};
use stancevec_core::space::LeaningSpace;
use stancevec_core::stance::ValenceLexicon;

use config::{ConfigFile, Resolver};
use failure::{kind_of, Failure};
use output::{jsonl, pretty_json, stamped, write_atomic};

#[derive(Parser)]
#[command(
    name = "stancevec",
    version,
    about = "Political-leaning classification from entity-level stance vectors"
)]
struct Cli {
    /// Plain-text `key = value` settings; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads for per-article work (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Article counts per (leaning, outlet, quarter) as TSV.
    Stats(StatsArgs),
    /// Cap every class at `--cap` articles.
    Balance(BalanceArgs),
    /// Stratified train/test split.
    Split(SplitArgs),
    /// Build a leaning space from a labeled corpus.
    Train(TrainArgs),
    /// Classify parsed articles against a trained model.
    Classify(ClassifyArgs),
    /// Precision, recall and F1 of predictions against corpus labels.
    Evaluate(EvaluateArgs),
    /// Per-quarter distribution of predicted leanings.
    Apply(ApplyArgs),
    /// Score reference resolution against gold relations.
    RefresEval(RefresEvalArgs),
}

#[derive(Args)]
struct CorpusInput {
    /// Article JSONL.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Only accept articles published in START..END (YYYY-MM-DD..YYYY-MM-DD, or `study` for 2021-2023).
    #[arg(long)]
    window: Option<String>,
}

#[derive(Args)]
struct CorefInput {
    /// External pronoun substitutions (JSONL); overrides `--coref`.
    #[arg(long)]
    substitutions: Option<PathBuf>,
    /// Pronoun handling without a substitutions file: `baseline` or `none`.
    #[arg(long)]
    coref: Option<String>,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    input: CorpusInput,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BalanceArgs {
    #[command(flatten)]
    input: CorpusInput,
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SplitArgs {
    #[command(flatten)]
    input: CorpusInput,
    #[arg(long)]
    train_fraction: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    train_out: PathBuf,
    #[arg(long)]
    test_out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    input: CorpusInput,
    /// Dependency parses of the corpus articles (CoNLL-U with `# article_id`).
    #[arg(long)]
    conllu: Option<PathBuf>,
    /// Valence lexicon TSV (default: bundled English lexicon).
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[command(flatten)]
    coref: CorefInput,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long)]
    train_fraction: Option<f64>,
    /// Drop class-stance nouns backed by fewer descriptors than this.
    #[arg(long)]
    min_mentions: Option<usize>,
    /// Model JSON.
    #[arg(long)]
    out: PathBuf,
    /// Held-out articles (JSONL) for `classify` and `evaluate`.
    #[arg(long)]
    test_out: Option<PathBuf>,
    /// Per-class noun stances (JSON).
    #[arg(long)]
    stances_out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    conllu: Option<PathBuf>,
    /// Restrict to (and take metadata from) these articles.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[command(flatten)]
    coref: CorefInput,
    /// Prediction JSONL.
    #[arg(long)]
    out: PathBuf,
    /// Per-article top contributing nouns (JSONL).
    #[arg(long)]
    explain_out: Option<PathBuf>,
    #[arg(long)]
    top_k: Option<usize>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    predictions: Option<PathBuf>,
    /// Labeled articles supplying the gold leanings.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Leave unclassifiable articles out of every denominator.
    #[arg(long)]
    strict: bool,
    /// Metrics JSON.
    #[arg(long)]
    out: PathBuf,
    /// Metrics TSV.
    #[arg(long)]
    tsv: Option<PathBuf>,
}

#[derive(Args)]
struct ApplyArgs {
    /// Articles with publication dates.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Existing predictions; otherwise `--model` and `--conllu` classify first.
    #[arg(long)]
    predictions: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    conllu: Option<PathBuf>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[command(flatten)]
    coref: CorefInput,
    /// Distribution CSV.
    #[arg(long)]
    out: PathBuf,
    /// Shaded text table.
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Args)]
struct RefresEvalArgs {
    #[arg(long)]
    conllu: Option<PathBuf>,
    /// Gold relations JSONL.
    #[arg(long)]
    gold: Option<PathBuf>,
    /// Scores JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let report = json!({ "error": format!("{err:#}"), "kind": kind_of(&err) });
            eprintln!("{report}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    // Thread count cannot change outputs, so it stays out of the digest.
    let jobs = Resolver::new("jobs", &file).opt("jobs", cli.jobs)?;
    if let Some(n) = jobs {
        if n == 0 {
            return Err(Failure::new("config", "--jobs must be at least 1").into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    match cli.command {
        Command::Stats(a) => stats(a, &file),
        Command::Balance(a) => balance(a, &file),
        Command::Split(a) => split(a, &file),
        Command::Train(a) => train(a, &file),
        Command::Classify(a) => classify(a, &file),
        Command::Evaluate(a) => evaluate(a, &file),
        Command::Apply(a) => apply(a, &file),
        Command::RefresEval(a) => refres_eval(a, &file),
    }
}

fn parse_window(raw: &str) -> Result<DateWindow> {
    if raw == "study" {
        return Ok(DateWindow::study_period());
    }
    raw.parse()
        .map_err(|e: String| Failure::new("config", format!("window: {e}")).into())
}

/// Loads the corpus and applies `--window` if given.
fn load_labeled(r: &mut Resolver, input: CorpusInput) -> Result<Vec<Article>> {
    let path = r.required("corpus", input.corpus)?;
    let articles = load_corpus(&path).with_context(|| format!("{}", path.display()))?;
    if let Some(w) = r.opt("window", input.window)? {
        enforce_window(&articles, parse_window(&w)?)?;
    }
    Ok(articles)
}

fn load_lexicon(r: &mut Resolver, flag: Option<PathBuf>) -> Result<ValenceLexicon> {
    match r.input("lexicon", flag)? {
        Some(p) => Ok(ValenceLexicon::load(&p).with_context(|| format!("{}", p.display()))?),
        None => Ok(ValenceLexicon::english()),
    }
}

fn load_coref(r: &mut Resolver, input: CorefInput) -> Result<Coref> {
    if let Some(p) = r.input("substitutions", input.substitutions)? {
        r.value("coref", None, "external".to_string())?;
        let subs = load_substitutions(&p).with_context(|| format!("{}", p.display()))?;
        return Ok(Coref::External(subs));
    }
    match r
        .value("coref", input.coref, "baseline".to_string())?
        .as_str()
    {
        "baseline" => Ok(Coref::Baseline),
        "none" => Ok(Coref::None),
        other => Err(Failure::new(
            "config",
            format!("coref: expected `baseline` or `none`, got `{other}`"),
        )
        .into()),
    }
}

fn load_model(r: &mut Resolver, flag: Option<PathBuf>) -> Result<LeaningSpace> {
    let path = r.required("model", flag)?;
    let text = std::fs::read_to_string(&path).with_context(|| format!("{}", path.display()))?;
    LeaningSpace::from_json(&text).with_context(|| format!("{}", path.display()))
}

/// Parsed articles: the corpus entries with their sentences attached, or
/// every article in the CoNLL-U file when no corpus is given.
fn parsed_articles(corpus: Option<&Path>, conllu: &Path) -> Result<Vec<Article>> {
    let sentences = load_conllu(conllu).with_context(|| format!("{}", conllu.display()))?;
    match corpus {
        Some(c) => {
            let mut articles = load_corpus(c).with_context(|| format!("{}", c.display()))?;
            let hits = attach(&mut articles, sentences);
            if hits < articles.len() {
                eprintln!(
                    "note: {} of {} articles have no parsed sentences",
                    articles.len() - hits,
                    articles.len()
                );
            }
            Ok(articles)
        }
        None => Ok(group_by_article(sentences)
            .into_iter()
            .map(|(id, sentences)| Article {
                id,
                outlet: String::new(),
                leaning: None,
                published_at: Default::default(),
                title: String::new(),
                text: String::new(),
                sentences,
            })
            .collect()),
    }
}

fn article_jsonl(articles: &[Article], digest: &str) -> Result<String> {
    jsonl(articles.iter().map(ArticleRecord::from), digest)
}

fn stats(a: StatsArgs, file: &ConfigFile) -> Result<()> {
    let mut r = Resolver::new("stats", file);
    let articles = load_labeled(&mut r, a.input)?;
    let text = stamped(&r.digest(), &corpus::stats(&articles).to_tsv());
    match a.out {
        Some(p) => write_atomic(&p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn balance(a: BalanceArgs, file: &ConfigFile) -> Result<()> {
    let mut r = Resolver::new("balance", file);
    let articles = load_labeled(&mut r, a.input)?;
    let cap = r.value("cap", a.cap, TrainConfig::default().cap)?;
    let seed = r.value("seed", a.seed, 0)?;
    let balanced = corpus::balance(&articles, cap, seed)?;
    write_atomic(&a.out, article_jsonl(&balanced, &r.digest())?.as_bytes())?;
    println!("kept {} of {} articles", balanced.len(), articles.len());
    Ok(())
}

fn split(a: SplitArgs, file: &ConfigFile) -> Result<()> {
    let mut r = Resolver::new("split", file);
    let articles = load_labeled(&mut r, a.input)?;
    let fraction = r.value(
        "train_fraction",
        a.train_fraction,
        TrainConfig::default().train_fraction,
    )?;
    let seed = r.value("seed", a.seed, 0)?;
    let (train, test) = corpus::split(&articles, fraction, seed)?;
    let digest = r.digest();
    write_atomic(&a.train_out, article_jsonl(&train, &digest)?.as_bytes())?;
    write_atomic(&a.test_out, article_jsonl(&test, &digest)?.as_bytes())?;
    println!("{} train, {} test", train.len(), test.len());
    Ok(())
}

fn train(a: TrainArgs, file: &ConfigFile) -> Result<()> {
    let mut r = Resolver::new("train", file);
    let mut articles = load_labeled(&mut r, a.input)?;
    let conllu = r.required("conllu", a.conllu)?;
    let lexicon = load_lexicon(&mut r, a.lexicon)?;
    let coref = load_coref(&mut r, a.coref)?;
    let defaults = TrainConfig::default();
    let config = TrainConfig {
        cap: r.value("cap", a.cap, defaults.cap)?,
        train_fraction: r.value("train_fraction", a.train_fraction, defaults.train_fraction)?,
        seed: r.value("seed", a.seed, defaults.seed)?,
        min_mentions: r.value("min_mentions", a.min_mentions, defaults.min_mentions)?,
    };
    let sentences = load_conllu(&conllu).with_context(|| format!("{}", conllu.display()))?;
    let parsed = attach(&mut articles, sentences);
    if parsed < articles.len() {
        eprintln!(
            "note: {} of {} articles have no parsed sentences",
            articles.len() - parsed,
            articles.len()
        );
    }

    let out = pipeline::train(&articles, &config, &coref, &lexicon)?;
    let digest = r.digest();
    let class_sizes: BTreeMap<Leaning, usize> = Leaning::ALL
        .into_iter()
        .map(|c| (c, out.train.iter().filter(|x| x.leaning == Some(c)).count()))
        .collect();
    let provenance = json!({
        "config_digest": digest,
        "params": r.params(),
        "inputs": r.inputs(),
        "coref": coref.mode(),
        "train_articles": out.train.len(),
        "test_articles": out.test.len(),
        "train_class_sizes": class_sizes,
    });
    write_atomic(&a.out, out.space.to_json_with(Some(provenance))?.as_bytes())?;
    if let Some(p) = &a.test_out {
        write_atomic(p, article_jsonl(&out.test, &digest)?.as_bytes())?;
    }
    if let Some(p) = &a.stances_out {
        let body = json!({ "config_digest": digest, "stances": out.class_stances });
        write_atomic(p, pretty_json(&body)?.as_bytes())?;
    }
    println!(
        "{} nouns from {} training articles ({} held out)",
        out.space.dim(),
        out.train.len(),
        out.test.len()
    );
    Ok(())
}

struct Predicted {
    articles: Vec<Article>,
    records: Vec<PredictionRecord>,
    /// `None` where the article was unclassifiable.
    results: Vec<Option<ClassificationResult>>,
}

/// Runs the classifier; records and results follow article order.
fn predict(
    r: &mut Resolver,
    model: Option<PathBuf>,
    conllu: Option<PathBuf>,
    corpus: Option<&Path>,
    lexicon: Option<PathBuf>,
    coref: CorefInput,
) -> Result<Predicted> {
    let space = load_model(r, model)?;
    let conllu = r.required("conllu", conllu)?;
    let lexicon = load_lexicon(r, lexicon)?;
    let coref = load_coref(r, coref)?;
    let articles = parsed_articles(corpus, &conllu)?;
    let results = pipeline::classify_all(&articles, &space, &coref, &lexicon)?;
    let records = results
        .iter()
        .zip(&articles)
        .map(|(res, a)| PredictionRecord::rule(res, &a.id))
        .collect();
    let results = results.into_iter().map(|x| x.ok()).collect();
    Ok(Predicted {
        articles,
        records,
        results,
    })
}

fn classify(a: ClassifyArgs, file: &ConfigFile) -> Result<()> {
    let mut r = Resolver::new("classify", file);
    let corpus = r.input("corpus", a.corpus)?;
    let top_k = r.value("top_k", a.top_k, 5)?;
    let Predicted {
        records, results, ..
    } = predict(
        &mut r,
        a.model,
        a.conllu,
        corpus.as_deref(),
        a.lexicon,
        a.coref,
    )?;
    let digest = r.digest();
    write_atomic(&a.out, jsonl(&records, &digest)?.as_bytes())?;
    if let Some(p) = &a.explain_out {
        let rows = records.iter().zip(&results).map(|(rec, res)| {
            json!({
                "article_id": rec.article_id,
                "predicted": rec.predicted,
                "top": res.as_ref().map(|x| explain(x, top_k)).unwrap_or_default(),
            })
        });
        write_atomic(p, jsonl(rows, &digest)?.as_bytes())?;
    }
    let unclassifiable = results.iter().filter(|x| x.is_none()).count();
    println!(
        "{} articles classified, {unclassifiable} unclassifiable",
        records.len() - unclassifiable
    );
    Ok(())
}

fn evaluate(a: EvaluateArgs, file: &ConfigFile) -> Result<()> {
    let mut r = Resolver::new("evaluate", file);
    let pred_path = r.required("predictions", a.predictions)?;
    let corpus_path = r.required("corpus", a.corpus)?;
    let strict = r.flag("strict", a.strict)?;
    let predictions =
        load_predictions(&pred_path).with_context(|| format!("{}", pred_path.display()))?;
    let articles =
        load_corpus(&corpus_path).with_context(|| format!("{}", corpus_path.display()))?;
    let gold: Vec<(String, Leaning)> = articles
        .iter()
        .filter_map(|x| Some((x.id.clone(), x.leaning?)))
        .collect();
    if gold.is_empty() {
        return Err(Failure::new(
            "unlabeled",
            format!("{}: no labeled articles", corpus_path.display()),
        )
        .into());
    }
    let metrics = score(&predictions, &gold, strict)?;
    let digest = r.digest();
    let body = json!({ "config_digest": digest, "metrics": metrics });
    write_atomic(&a.out, pretty_json(&body)?.as_bytes())?;
    let tsv = stamped(&digest, &metrics.to_tsv());
    if let Some(p) = &a.tsv {
        write_atomic(p, tsv.as_bytes())?;
    }
    print!("{tsv}");
    Ok(())
}

fn apply(a: ApplyArgs, file: &ConfigFile) -> Result<()> {
    let mut r = Resolver::new("apply", file);
    let corpus_path = r.required("corpus", a.corpus)?;
    let (articles, predictions) = match r.input("predictions", a.predictions)? {
        Some(p) => {
            let predictions = load_predictions(&p).with_context(|| format!("{}", p.display()))?;
            let articles =
                load_corpus(&corpus_path).with_context(|| format!("{}", corpus_path.display()))?;
            (articles, predictions)
        }
        None => {
            let Predicted {
                articles, records, ..
            } = predict(
                &mut r,
                a.model,
                a.conllu,
                Some(&corpus_path),
                a.lexicon,
                a.coref,
            )?;
            (articles, records)
        }
    };
    // Only the predicted articles are tabulated.
    let ids: HashSet<&str> = predictions.iter().map(|p| p.article_id.as_str()).collect();
    let articles: Vec<Article> = articles
        .into_iter()
        .filter(|x| ids.contains(x.id.as_str()))
        .collect();
    let dist = temporal_apply(&predictions, &articles)?;
    let digest = r.digest();
    write_atomic(&a.out, stamped(&digest, &dist.to_csv()).as_bytes())?;
    let table = dist.to_table();
    if let Some(p) = &a.table {
        write_atomic(p, stamped(&digest, &table).as_bytes())?;
    }
    print!("{table}");
    Ok(())
}

fn refres_eval(a: RefresEvalArgs, file: &ConfigFile) -> Result<()> {
    let mut r = Resolver::new("refres-eval", file);
    let conllu = r.required("conllu", a.conllu)?;
    let gold_path = r.required("gold", a.gold)?;
    let sentences = load_conllu(&conllu).with_context(|| format!("{}", conllu.display()))?;
    let gold = load_gold(&gold_path).with_context(|| format!("{}", gold_path.display()))?;
    // Sentences without `# sent_id` are keyed by 1-based position in the file.
    let predicted: Vec<(String, Vec<_>)> = sentences
        .iter()
        .enumerate()
        .map(|(i, s)| {
            (
                s.sent_id.clone().unwrap_or_else(|| (i + 1).to_string()),
                resolve_sentence(&s.sentence),
            )
        })
        .collect();
    let scores = eval_refres(&predicted, &gold);
    let digest = r.digest();
    let mut tsv = String::from("kind\tprecision\trecall\tf1\ttrue_positives\tpredicted\tgold\n");
    for (name, s) in [("adjective", scores.adjective), ("verb", scores.verb)] {
        tsv.push_str(&format!(
            "{name}\t{:.2}\t{:.2}\t{:.2}\t{}\t{}\t{}\n",
            s.precision, s.recall, s.f1, s.true_positives, s.predicted, s.gold
        ));
    }
    if let Some(p) = &a.out {
        let body = json!({ "config_digest": digest, "scores": scores });
        write_atomic(p, pretty_json(&body)?.as_bytes())?;
    }
    print!("{}", stamped(&digest, &tsv));
    Ok(())
}
