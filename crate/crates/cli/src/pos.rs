use std::path::PathBuf;

use anyhow::Result;
use approxvit::pos::{
    corpus_accuracy, float_viterbi, parse_gold, parse_sentences, quantize_hmm, tag, CorpusAccuracy, PosError,
    DEFAULT_CLAMP, DEFAULT_SCALE,
};
use approxvit::{HmmModel, TagSequence};
use serde::Serialize;
use serde_json::json;

use crate::manifest::{manifest_path, RunManifest};
use crate::{adders, emit, read_text, Global, UsageError};

#[derive(clap::Args)]
pub struct Args {
    /// HMM model (JSON).
    #[arg(long)]
    model: PathBuf,
    /// One whitespace-tokenized sentence per line.
    #[arg(long)]
    sentences: PathBuf,
    /// Gold tags, one line per sentence.
    #[arg(long)]
    gold: PathBuf,
    /// 16-bit adders (see adder-metrics). Defaults to exact:16.
    #[arg(long = "adder", alias = "adders", value_name = "SPEC")]
    adders: Vec<String>,
    /// Cost scale of the fixed-point mapping.
    #[arg(long, default_value_t = DEFAULT_SCALE)]
    scale: f64,
    /// Largest negative log-probability before scaling.
    #[arg(long, default_value_t = DEFAULT_CLAMP)]
    clamp: f64,
}

#[derive(Serialize)]
struct Row<'a> {
    adder: &'a str,
    accuracy_pct: f64,
    tokens: usize,
    sentence_accuracy_pct: f64,
}

fn row(adder: &str, acc: CorpusAccuracy) -> Row<'_> {
    Row {
        adder,
        accuracy_pct: acc.token_pct,
        tokens: acc.tokens,
        sentence_accuracy_pct: acc.sentence_pct,
    }
}

fn check_gold(sentences: &[Vec<String>], gold: &[TagSequence]) -> Result<(), PosError> {
    let mut problems = Vec::new();
    if sentences.len() != gold.len() {
        problems.push(format!("{} sentences but {} gold lines", sentences.len(), gold.len()));
    }
    for (i, (s, g)) in sentences.iter().zip(gold).enumerate() {
        if s.len() != g.len() {
            problems.push(format!("sentence {}: {} words, {} gold tags", i + 1, s.len(), g.len()));
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(PosError::GoldMismatch(problems))
    }
}

pub fn run(g: &Global, args: Args) -> Result<()> {
    let hmm = HmmModel::from_json(&read_text(&args.model)?)?;
    let sentences = parse_sentences(&read_text(&args.sentences)?);
    if sentences.is_empty() {
        return Err(UsageError(format!("{} contains no sentences", args.sentences.display())).into());
    }
    let gold = parse_gold(&read_text(&args.gold)?, &hmm)?;
    check_gold(&sentences, &gold)?;
    let q = quantize_hmm(&hmm, args.scale, args.clamp)?;
    let specs = if args.adders.is_empty() {
        vec!["exact:16".to_string()]
    } else {
        args.adders.clone()
    };
    let resolved = adders::resolve(&specs)?;

    let oracle: Vec<TagSequence> = sentences
        .iter()
        .map(|s| float_viterbi(&hmm, s))
        .collect::<Result<_, _>>()?;
    let mut results = vec![("float_oracle".to_string(), corpus_accuracy(&oracle, &gold)?)];
    for m in &resolved.models {
        let pred: Vec<TagSequence> = sentences.iter().map(|s| tag(&q, s, m)).collect::<Result<_, _>>()?;
        results.push((m.name().to_string(), corpus_accuracy(&pred, &gold)?));
    }

    let mut w = csv::Writer::from_writer(Vec::new());
    for (name, acc) in &results {
        w.serialize(row(name, *acc))?;
    }
    let buf = w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
    emit(g.out.as_deref(), &buf)?;

    if let Some(out) = &g.out {
        let config = json!({
            "scale": args.scale,
            "clamp": args.clamp,
            "adders": resolved.models.iter().map(|m| m.name()).collect::<Vec<_>>(),
        });
        let mut manifest = RunManifest::new("pos-tag", config, None, g.jobs);
        for p in [&args.model, &args.sentences, &args.gold] {
            manifest.add_input(p)?;
        }
        for f in &resolved.files {
            manifest.add_input(f)?;
        }
        manifest.outputs.push(out.display().to_string());
        manifest.write(&manifest_path(out))?;
    }
    Ok(())
}
