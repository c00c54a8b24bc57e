use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use rayon::prelude::*;
use serde::Serialize;

use meddialog::dialogue::{DialogueDocument, LabelMap, Speaker, TranscriptParser};
use meddialog::eval::{
    evaluate_corpus, ingest_ratings, load_corpus_dir, qual_report, write_metric_figures, write_qual_figures,
    write_ratings, EvalError, EvalOptions, MetricReport, Pooling, QualReport, RatingsError,
};
use meddialog::generation::{
    build_fewshot_pair, chunk_source, GenerationConfig, GenerationError, GenerationJob, Generator, HttpChatClient,
    JobStore, LlmClient, PromptTemplates,
};
use meddialog::lexical::RoleNormalization;
use meddialog::stats::Level;
use meddialog::{DialogueSource, LexiconSet};

use crate::config::{default_config_toml, FileConfig, DEFAULT_CONFIG_FILE};
use crate::{
    invalid, runtime, Cli, Command, EvaluateArgs, ExportArgs, Failure, GenerateArgs, IngestArgs, LevelArg,
    ParseArgs, PoolingArg, RatingsCommand, RatingsReportArgs, ReportArgs, RoleNormArg, SourceArg,
};

type CmdResult = Result<(), Failure>;

pub(crate) fn dispatch(cli: Cli) -> CmdResult {
    let file = FileConfig::discover(cli.config.as_deref()).map_err(invalid)?;
    let jobs = cli.jobs.or(file.jobs);
    if jobs == Some(0) {
        return Err(invalid(anyhow!("--jobs must be at least 1")));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(runtime)?;
    pool.install(|| match cli.command {
        Command::Parse(args) => parse(args),
        Command::Generate(args) => generate(args, &file),
        Command::Evaluate(args) => evaluate(args, &file),
        Command::Ratings(RatingsCommand::Ingest(args)) => ratings_ingest(args, &file),
        Command::Ratings(RatingsCommand::Report(args)) => ratings_report(args, &file),
        Command::Report(args) => report(args, &file),
        Command::ExportDefaults(args) => export_defaults(args),
    })
}

fn out_dir(flag: Option<PathBuf>, file: &FileConfig) -> PathBuf {
    flag.or_else(|| file.paths.output.clone()).unwrap_or_else(|| PathBuf::from("out"))
}

fn create_dir(dir: &Path) -> CmdResult {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display())).map_err(runtime)
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> CmdResult {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display())).map_err(runtime)
}

fn require_file(path: &Path, what: &str) -> CmdResult {
    if path.is_file() {
        Ok(())
    } else {
        Err(invalid(anyhow!("{what} {} does not exist", path.display())))
    }
}

fn require_dir(path: &Path, what: &str) -> CmdResult {
    if path.is_dir() {
        Ok(())
    } else {
        Err(invalid(anyhow!("{what} {} does not exist", path.display())))
    }
}

fn eval_failure(e: EvalError) -> Failure {
    match e {
        EvalError::Io { .. } => runtime(e),
        other => invalid(other),
    }
}

fn ratings_failure(e: RatingsError) -> Failure {
    match e {
        RatingsError::Io { .. } => runtime(e),
        other => invalid(other),
    }
}

fn generation_failure(e: GenerationError) -> Failure {
    match e {
        GenerationError::Client { .. } | GenerationError::Store { .. } | GenerationError::Serde(_) => runtime(e),
        other => invalid(other),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, Failure> {
    require_file(path, what)?;
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display())).map_err(runtime)?;
    serde_json::from_str(&text).with_context(|| format!("{} is not a valid {what}", path.display())).map_err(invalid)
}

// ---- parse ----

fn parse_label(spec: &str) -> Result<(String, Speaker), Failure> {
    let (label, role) = spec
        .rsplit_once('=')
        .ok_or_else(|| invalid(anyhow!("--label expects LABEL=ROLE, got '{spec}'")))?;
    let speaker = match role.trim().to_lowercase().as_str() {
        "doctor" | "arts" => Speaker::Doctor,
        "patient" | "patiënt" => Speaker::Patient,
        other => Speaker::Other(other.to_string()),
    };
    Ok((label.trim().to_string(), speaker))
}

fn transcript_files(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, Failure> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(input)
                .with_context(|| format!("cannot list {}", input.display()))
                .map_err(runtime)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "txt"))
                .collect();
            found.sort();
            files.extend(found);
        } else if input.is_file() {
            files.push(input.clone());
        } else {
            return Err(invalid(anyhow!("input {} does not exist", input.display())));
        }
    }
    if files.is_empty() {
        return Err(invalid(anyhow!("no transcript files found")));
    }
    Ok(files)
}

fn parse(args: ParseArgs) -> CmdResult {
    let mut labels = LabelMap::default();
    for spec in &args.labels {
        let (label, speaker) = parse_label(spec)?;
        labels = labels.with_label(&label, speaker);
    }
    let source = match args.source {
        SourceArg::RealSample => DialogueSource::RealSample,
        SourceArg::Synthetic => DialogueSource::Synthetic,
        SourceArg::Unknown => DialogueSource::Unknown,
    };
    let mut parser = TranscriptParser::new(labels).with_source(source);
    for a in &args.abbreviations {
        parser.splitter.add_abbreviation(a);
    }
    let files = transcript_files(&args.inputs)?;
    let mut docs = Vec::new();
    for path in &files {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display())).map_err(runtime)?;
        let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let (dialogue, warnings) = parser
            .parse_with_warnings(&id, &text)
            .map_err(|e| invalid(anyhow!("{}: {e}", path.display())))?;
        for w in warnings {
            eprintln!("warning: {}: {w}", path.display());
        }
        docs.push(DialogueDocument::from(&dialogue));
    }
    match args.out {
        Some(dir) => {
            create_dir(&dir)?;
            for doc in &docs {
                let json = serde_json::to_string_pretty(doc).map_err(runtime)? + "\n";
                write_file(&dir.join(format!("{}.json", doc.id)), json)?;
            }
            eprintln!("parsed {} transcript(s) into {}", docs.len(), dir.display());
        }
        None => println!("{}", serde_json::to_string_pretty(&docs).map_err(runtime)?),
    }
    Ok(())
}

// ---- generate ----

fn generation_config(args: &GenerateArgs, file: &FileConfig) -> Result<GenerationConfig, Failure> {
    let mut cfg = file.generation.clone();
    if let Some(topics) = &args.topics {
        cfg.topics = topics.iter().map(|t| t.trim().to_string()).collect();
    }
    if let Some(domain) = &args.domain {
        cfg.domain = domain.clone();
    }
    if let Some(r) = args.token_ratio {
        cfg.token_ratio = r;
    }
    if args.asl_reference.is_some() {
        cfg.style.asl_reference = args.asl_reference;
    }
    if args.suppress_greetings {
        cfg.suppress_repeated_greetings = true;
    }
    if args.seed.is_some() {
        cfg.sampling.seed = args.seed;
    }
    if args.temperature.is_some() {
        cfg.sampling.temperature = args.temperature;
    }
    cfg.validate().map_err(invalid)?;
    Ok(cfg)
}

fn templates(args: &GenerateArgs, file: &FileConfig) -> Result<PromptTemplates, Failure> {
    match args.prompts.as_ref().or(file.paths.prompts.as_ref()) {
        Some(dir) => PromptTemplates::load_dir(dir).map_err(invalid),
        None => Ok(PromptTemplates::builtin()),
    }
}

fn client(args: &GenerateArgs, file: &FileConfig) -> HttpChatClient {
    let mut endpoint = file.endpoint.clone();
    if let Some(url) = &args.endpoint_url {
        endpoint.url = url.clone();
    }
    if let Some(model) = &args.model {
        endpoint.model = model.clone();
    }
    if std::env::var_os(&endpoint.api_key_env).is_none() {
        eprintln!("note: {} is not set; sending requests without an API key", endpoint.api_key_env);
    }
    HttpChatClient::new(endpoint)
}

fn run_job(client: &dyn LlmClient, templates: &PromptTemplates, store: JobStore, job: &mut GenerationJob) -> CmdResult {
    let root = store.root().to_path_buf();
    Generator::new(client)
        .with_templates(templates.clone())
        .with_store(store)
        .run(job)
        .map_err(|e| {
            let f = generation_failure(e);
            match f {
                Failure::Runtime(e) => runtime(e.context(format!("job {} stopped; resume with --resume", root.display()))),
                other => other,
            }
        })
}

fn generate(args: GenerateArgs, file: &FileConfig) -> CmdResult {
    let templates = templates(&args, file)?;
    if let Some(dir) = &args.resume {
        require_dir(dir, "job directory")?;
        let (store, mut job) = JobStore::open(dir).map_err(invalid)?;
        let client = client(&args, file);
        run_job(&client, &templates, store, &mut job)?;
        println!("{}", dir.join("final_dialogue.txt").display());
        return Ok(());
    }

    if args.sources.is_empty() {
        return Err(invalid(anyhow!("generate needs at least one source transcript (or --resume JOB_DIR)")));
    }
    let cfg = generation_config(&args, file)?;
    for p in args.sources.iter().chain(&args.fewshot) {
        require_file(p, "input")?;
    }
    let read = |p: &PathBuf| fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display())).map_err(runtime);
    let fewshot_texts = args.fewshot.iter().map(read).collect::<Result<Vec<_>, _>>()?;

    let mut chunks = Vec::new();
    for src in &args.sources {
        let text = read(src)?;
        let pieces = chunk_source(&text, cfg.chunk_budget, cfg.estimator())
            .map_err(|e| invalid(anyhow!("{}: {e}", src.display())))?;
        chunks.extend(pieces.into_iter().filter(|c| !c.trim().is_empty()));
    }
    if let Some(max) = args.max_dialogues {
        chunks.truncate(max);
    }

    let out = out_dir(args.out.clone(), file);
    create_dir(&out)?;
    let mut jobs = Vec::new();
    for (i, chunk) in chunks.iter().enumerate() {
        let dir = out.join(format!("dialogue-{:02}", i + 1));
        if dir.join("job.json").exists() {
            return Err(invalid(anyhow!("{} already holds a job; use --resume", dir.display())));
        }
        let job = GenerationJob::from_source(cfg.clone(), chunk.as_str(), fewshot_texts.clone());
        let store = JobStore::create(&dir, &job).map_err(generation_failure)?;
        jobs.push((store, job));
    }
    eprintln!("{} dialogue job(s) in {}", jobs.len(), out.display());

    let client = client(&args, file);
    if !fewshot_texts.is_empty() {
        let pairs = fewshot_texts
            .iter()
            .map(|t| build_fewshot_pair(t, &cfg, &client, &templates))
            .collect::<Result<Vec<_>, _>>()
            .map_err(generation_failure)?;
        for (store, job) in &mut jobs {
            job.fewshot = pairs.clone();
            store.save(job).map_err(generation_failure)?;
        }
    }

    let results: Vec<(PathBuf, CmdResult, Option<String>)> = jobs
        .into_par_iter()
        .map(|(store, mut job)| {
            let root = store.root().to_path_buf();
            let r = run_job(&client, &templates, store, &mut job);
            (root, r, job.final_dialogue)
        })
        .collect();

    let corpus = out.join("corpus");
    let mut worst: Option<Failure> = None;
    for (root, result, final_text) in results {
        match (result, final_text) {
            (Ok(()), Some(text)) => {
                create_dir(&corpus)?;
                let name = root.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                let path = corpus.join(format!("{name}.txt"));
                write_file(&path, text)?;
                println!("{}", path.display());
            }
            (Err(f), _) => {
                eprintln!("error: {:#}", match &f {
                    Failure::Validation(e) | Failure::Runtime(e) => e,
                });
                if worst.as_ref().is_none_or(|w| f.exit_code() > w.exit_code()) {
                    worst = Some(f);
                }
            }
            (Ok(()), None) => {}
        }
    }
    match worst {
        Some(Failure::Runtime(_)) => Err(runtime(anyhow!("some dialogue jobs failed; completed segments were kept"))),
        Some(Failure::Validation(_)) => Err(invalid(anyhow!("some dialogue jobs failed validation"))),
        None => Ok(()),
    }
}

// ---- evaluate ----

fn eval_options(args: &EvaluateArgs, file: &FileConfig) -> EvalOptions {
    let mut opts = EvalOptions::default();
    if let Some(w) = args.window.or(file.evaluate.window) {
        opts.window = w;
    }
    opts.role_normalization = match args.role_normalization {
        Some(RoleNormArg::PerToken) => RoleNormalization::PerToken,
        Some(RoleNormArg::PerTurn) => RoleNormalization::PerTurn,
        None => file.evaluate.role_normalization.unwrap_or_default(),
    };
    opts
}

fn evaluate(args: EvaluateArgs, file: &FileConfig) -> CmdResult {
    require_dir(&args.corpus, "corpus directory")?;
    let lexicons = match args.lexicons.as_ref().or(file.paths.lexicons.as_ref()) {
        Some(dir) => LexiconSet::load_dir(dir).map_err(invalid)?,
        None => LexiconSet::builtin(),
    };
    let options = eval_options(&args, file);
    let corpus = load_corpus_dir(&args.corpus, &TranscriptParser::default()).map_err(eval_failure)?;
    for f in &corpus {
        for w in &f.warnings {
            eprintln!("warning: {}: {w}", f.path.display());
        }
    }
    let dialogues: Vec<_> = corpus.into_iter().map(|f| f.dialogue).collect();
    let report = evaluate_corpus(&dialogues, &lexicons, options).map_err(eval_failure)?;
    for (id, row) in &report.per_dialogue {
        for w in &row.warnings {
            eprintln!("warning: {id}: {w}");
        }
    }

    let out = out_dir(args.out, file);
    create_dir(&out)?;
    let table = report.to_table();
    write_file(&out.join("metric_report.json"), report.to_json())?;
    write_file(&out.join("metric_report.txt"), &table)?;
    if args.figures {
        write_metric_figures(&report, &out.join("figures")).map_err(ratings_failure)?;
    }
    if args.print {
        print!("{table}");
    }
    eprintln!("evaluated {} dialogue(s); report in {}", report.per_dialogue.len(), out.display());
    Ok(())
}

// ---- ratings ----

fn ratings_ingest(args: IngestArgs, file: &FileConfig) -> CmdResult {
    require_file(&args.ratings, "ratings file")?;
    let table = ingest_ratings(&args.ratings).map_err(ratings_failure)?;
    let out = out_dir(args.out, file);
    create_dir(&out)?;
    let path = out.join("ratings.csv");
    let f = fs::File::create(&path).with_context(|| format!("cannot write {}", path.display())).map_err(runtime)?;
    write_ratings(&table, f).map_err(ratings_failure)?;
    eprintln!(
        "{} score(s), {} skipped cell(s), {} rater(s), {} dialogue(s); normalized copy in {}",
        table.len(),
        table.skipped().count(),
        table.raters().len(),
        table.dialogue_ids().len(),
        path.display()
    );
    Ok(())
}

fn ratings_report(args: RatingsReportArgs, file: &FileConfig) -> CmdResult {
    require_file(&args.ratings, "ratings file")?;
    let metrics: MetricReport = read_json(&args.metrics, "metric report")?;
    let table = ingest_ratings(&args.ratings).map_err(ratings_failure)?;
    let level = match args.alpha_level {
        Some(LevelArg::Nominal) => Level::Nominal,
        Some(LevelArg::Ordinal) => Level::Ordinal,
        Some(LevelArg::Interval) => Level::Interval,
        None => file.ratings.alpha_level.unwrap_or_default(),
    };
    let pooling = match args.pooling {
        Some(PoolingArg::Mean) => Pooling::Mean,
        Some(PoolingArg::Median) => Pooling::Median,
        None => file.ratings.pooling.unwrap_or_default(),
    };
    let qual = qual_report(&table, &metrics, level, pooling).map_err(eval_failure)?;
    for id in &qual.unmatched_dialogues {
        eprintln!("warning: rated dialogue '{id}' is not in the metric report; left out of correlations");
    }
    let out = out_dir(args.out, file);
    create_dir(&out)?;
    write_file(&out.join("qual_report.json"), qual.to_json())?;
    write_file(&out.join("qual_report.txt"), qual.to_table())?;
    if args.figures {
        write_qual_figures(&qual, &table, &out.join("figures")).map_err(ratings_failure)?;
    }
    eprintln!("qualitative report in {}", out.display());
    Ok(())
}

// ---- report ----

#[derive(Serialize)]
struct CombinedReport<'a> {
    metrics: &'a MetricReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    qualitative: Option<&'a QualReport>,
}

fn report(args: ReportArgs, file: &FileConfig) -> CmdResult {
    let metrics: MetricReport = read_json(&args.metrics, "metric report")?;
    let qual: Option<QualReport> = args.qual.as_deref().map(|p| read_json(p, "qualitative report")).transpose()?;
    let out = out_dir(args.out, file);
    create_dir(&out)?;
    let combined = CombinedReport { metrics: &metrics, qualitative: qual.as_ref() };
    write_file(&out.join("report.json"), serde_json::to_string_pretty(&combined).map_err(runtime)? + "\n")?;
    let mut text = metrics.to_table();
    if let Some(q) = &qual {
        text.push('\n');
        text.push_str(&q.to_table());
    }
    write_file(&out.join("report.txt"), &text)?;
    print!("{text}");
    Ok(())
}

// ---- export-defaults ----

fn export_defaults(args: ExportArgs) -> CmdResult {
    let config = args.out.join(DEFAULT_CONFIG_FILE);
    if config.exists() {
        return Err(invalid(anyhow!("{} already exists; refusing to overwrite", config.display())));
    }
    LexiconSet::write_builtin(&args.out.join("lexicons"))
        .with_context(|| format!("cannot write lexicons under {}", args.out.display()))
        .map_err(runtime)?;
    PromptTemplates::write_builtin(&args.out.join("prompts"))
        .with_context(|| format!("cannot write prompts under {}", args.out.display()))
        .map_err(runtime)?;
    write_file(&config, default_config_toml())?;
    eprintln!("defaults written to {}", args.out.display());
    Ok(())
}
