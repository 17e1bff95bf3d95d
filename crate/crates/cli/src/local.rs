//! Verbs that run in-process on files: `index`, `suggest`, `analyze`.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use taxotrace_core::analysis::{build_report, load_judgments, Report, ReportOptions, RequirementValues, ScaleCounts};
use taxotrace_core::annotation::{import_dataset, import_requirements};
use taxotrace_core::embeddings::{load_embeddings, EmbeddingStore};
use taxotrace_core::recommender::{read_events, HistoryStore, Recommender, RecommenderConfig};
use taxotrace_core::taxonomy::{load_taxonomy, IndexFile, NounIndex};
use taxotrace_core::textproc::{Analyzer, AnalyzerConfig};

pub fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_reader(open(path)?).with_context(|| format!("parsing {}", path.display()))
}

/// `path` or stdout when `None`.
pub fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn analyzer_config(path: Option<&Path>) -> Result<AnalyzerConfig> {
    let config = match path {
        Some(p) => read_json(p)?,
        None => AnalyzerConfig::default(),
    };
    config.validate()?;
    Ok(config)
}

pub fn index(taxonomy: &Path, analyzer: Option<&Path>, out: Option<&Path>) -> Result<()> {
    let config = analyzer_config(analyzer)?;
    let analyzer = Analyzer::new(config.clone())?;
    let taxonomy = load_taxonomy(open(taxonomy)?).with_context(|| format!("loading {}", taxonomy.display()))?;
    let index = NounIndex::build(&taxonomy, &analyzer);
    let file = IndexFile::new(index, config, taxonomy.len());
    let mut w = output(out)?;
    serde_json::to_writer_pretty(&mut w, &file)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub struct SuggestArgs<'a> {
    pub requirements: &'a Path,
    pub taxonomy: Option<&'a Path>,
    pub index: Option<&'a Path>,
    pub analyzer: Option<&'a Path>,
    pub embeddings: Option<&'a Path>,
    pub history: Option<&'a Path>,
    pub config: Option<&'a Path>,
    pub out: Option<&'a Path>,
}

/// Writes one JSON suggestion per line, requirements in file order.
pub fn suggest(args: &SuggestArgs<'_>) -> Result<()> {
    let (index, analyzer_config) = match (args.index, args.taxonomy) {
        (Some(p), None) => {
            if args.analyzer.is_some() {
                bail!("--analyzer cannot be combined with --index; the index file carries its analyzer");
            }
            let file = IndexFile::read(open(p)?).with_context(|| format!("loading {}", p.display()))?;
            (file.index, file.analyzer)
        }
        (None, Some(p)) => {
            let config = analyzer_config(args.analyzer)?;
            let taxonomy = load_taxonomy(open(p)?).with_context(|| format!("loading {}", p.display()))?;
            (NounIndex::build(&taxonomy, &Analyzer::new(config.clone())?), config)
        }
        _ => bail!("exactly one of --taxonomy and --index is required"),
    };
    let embeddings = match args.embeddings {
        Some(p) => load_embeddings(open(p)?).with_context(|| format!("loading {}", p.display()))?,
        None => EmbeddingStore::empty(),
    };
    let history = match args.history {
        Some(p) => HistoryStore::replay(&read_events(open(p)?).with_context(|| format!("loading {}", p.display()))?),
        None => HistoryStore::new(),
    };
    let config: RecommenderConfig = match args.config {
        Some(p) => read_json(p)?,
        None => RecommenderConfig::default(),
    };
    let recommender = Recommender::new(index, embeddings, Analyzer::new(analyzer_config)?, config)?;
    let requirements = import_requirements(open(args.requirements)?)
        .with_context(|| format!("loading {}", args.requirements.display()))?;

    let mut w = output(args.out)?;
    for req in &requirements {
        for s in recommender.suggest(req, &history) {
            serde_json::to_writer(&mut w, &s)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub struct AnalyzeArgs<'a> {
    pub dataset: &'a Path,
    pub judgments: Option<&'a Path>,
    pub requirements: Option<&'a Path>,
    pub options: ReportOptions,
    pub out: Option<&'a Path>,
    pub tables_dir: Option<&'a Path>,
}

pub fn analyze(args: &AnalyzeArgs<'_>) -> Result<()> {
    let records = import_dataset(open(args.dataset)?).with_context(|| format!("loading {}", args.dataset.display()))?;
    let judgments = match args.judgments {
        Some(p) => Some(load_judgments(open(p)?).with_context(|| format!("loading {}", p.display()))?),
        None => None,
    };
    let requirements = match args.requirements {
        Some(p) => Some(import_requirements(open(p)?).with_context(|| format!("loading {}", p.display()))?),
        None => None,
    };
    let report = build_report(&records, judgments.as_deref(), requirements.as_deref(), &args.options)?;
    let mut w = output(args.out)?;
    serde_json::to_writer_pretty(&mut w, &report)?;
    writeln!(w)?;
    w.flush()?;
    if let Some(dir) = args.tables_dir {
        write_tables(&report, dir)?;
    }
    Ok(())
}

fn write_tables(report: &Report, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let t = &report.tables;
    values_csv(&dir.join("duration_by_requirement.csv"), &t.duration_by_requirement)?;
    values_csv(&dir.join("accuracy_by_requirement.csv"), &t.accuracy_by_requirement)?;
    values_csv(&dir.join("consistency_by_requirement.csv"), &t.consistency_by_requirement)?;
    scale_csv(&dir.join("correctness_confidence.csv"), &t.correctness_confidence)?;
    scale_csv(&dir.join("completeness_confidence.csv"), &t.completeness_confidence)?;
    Ok(())
}

/// Long format: one row per value.
fn values_csv(path: &Path, rows: &[RequirementValues]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["requirement_id", "group", "value"])?;
    for row in rows {
        for (group, values) in [("ccr", &row.ccr), ("search", &row.search)] {
            for v in values {
                w.write_record([row.requirement_id.as_str(), group, &v.to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn scale_csv(path: &Path, rows: &[ScaleCounts]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["group", "-2", "-1", "0", "1", "2"])?;
    for row in rows {
        let mut rec = vec![row.group.clone()];
        rec.extend(row.counts.iter().map(ToString::to_string));
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}
