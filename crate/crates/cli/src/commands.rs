use std::io::Write;
use std::path::{Path, PathBuf};

use imgany_backend::{mock_encode, synthetic_entries, DecodeRequest, DecoderClient};
use imgany_core::{
    build_bank, canonical, import_jsonl, load_bank, save_bank, EmbeddingSource, Feature, FusionConfig,
    FusionConfigOverrides, LexiconKind, ModalityTag,
};
use imgany_service::{fuse_bundle, ServiceConfig, WireFeature};
use serde::Serialize;

use crate::exit::{Failure, Outcome};
use crate::FuseArgs;

fn write_output(out: Option<&Path>, bytes: &[u8]) -> Outcome {
    match out {
        Some(p) => std::fs::write(p, bytes).map_err(|e| Failure::io(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes).and_then(|_| stdout.flush()).map_err(Failure::io)
        }
    }
}

fn read_to_string(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

pub fn bank_build(input: &Path, kind: LexiconKind, out: &Path) -> Outcome {
    let entries = import_jsonl(input, kind).map_err(|e| Failure::from_core(e).prefixed(input))?;
    let bank = build_bank(entries, kind).map_err(|e| Failure::from_core(e).prefixed(input))?;
    save_bank(&bank, out).map_err(Failure::from_core)?;
    println!("kind={} dim={} count={} kept={}", bank.kind(), bank.dim(), bank.count(), bank.kept_count());
    Ok(())
}

#[derive(Serialize)]
struct Inspect<'a> {
    kind: LexiconKind,
    dim: usize,
    count: usize,
    kept_count: usize,
    normalized: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    entries: Option<Vec<InspectEntry<'a>>>,
}

#[derive(Serialize)]
struct InspectEntry<'a> {
    word: &'a str,
    keep: bool,
}

pub fn bank_inspect(path: &Path, words: bool) -> Outcome {
    let bank = load_bank(path).map_err(Failure::from_core)?;
    let entries = words
        .then(|| bank.words().iter().enumerate().map(|(i, w)| InspectEntry { word: w, keep: bank.keep(i) }).collect());
    let report = Inspect {
        kind: bank.kind(),
        dim: bank.dim(),
        count: bank.count(),
        kept_count: bank.kept_count(),
        normalized: bank.header().normalized,
        entries,
    };
    let mut bytes = canonical::to_vec(&report).map_err(Failure::invalid)?;
    bytes.push(b'\n');
    write_output(None, &bytes)
}

fn feature_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>, Failure> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let rd = std::fs::read_dir(p).map_err(|e| Failure::io(format!("{}: {e}", p.display())))?;
            let mut found: Vec<PathBuf> = rd
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.is_file() && f.extension().is_some_and(|x| x == "json"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    if files.is_empty() {
        return Err(Failure::invalid("no feature files found"));
    }
    Ok(files)
}

fn read_feature(path: &Path) -> Result<WireFeature, Failure> {
    let text = read_to_string(path)?;
    let f: WireFeature =
        serde_json::from_str(&text).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    if f.dim.is_none() {
        return Err(Failure::invalid(format!("{}: missing field `dim`", path.display())));
    }
    Ok(f)
}

fn overrides(args: &FuseArgs) -> Result<FusionConfig, Failure> {
    let file = match &args.config {
        Some(p) => toml::from_str::<FusionConfigOverrides>(&read_to_string(p)?)
            .map_err(|e| Failure::invalid(format!("{}: {e}", p.display())))?,
        None => FusionConfigOverrides::default(),
    };
    let flags = FusionConfigOverrides {
        k_entity: args.k_entity,
        k_attribute: args.k_attribute,
        variance_threshold: args.variance_threshold,
        entity_upweight: args.entity_upweight,
        balanced_weight: args.balanced_weight,
        enable_entity_branch: args.no_entity.then_some(false),
        enable_attribute_branch: args.no_attribute.then_some(false),
        enable_adjective_filter: args.no_adjective_filter.then_some(false),
    };
    let config = FusionConfig::default().with_overrides(&flags.over(&file));
    config.validate().map_err(Failure::invalid)?;
    Ok(config)
}

pub fn fuse(args: &FuseArgs) -> Outcome {
    let config = overrides(args)?;
    let decode = if args.decode {
        let endpoint = args.endpoint.clone().ok_or_else(|| Failure::invalid("--decode requires --endpoint"))?;
        let out_image = args.out_image.clone().ok_or_else(|| Failure::invalid("--decode requires --out-image"))?;
        Some((endpoint, out_image))
    } else {
        None
    };
    let features = feature_files(&args.features)?.iter().map(|p| read_feature(p)).collect::<Result<Vec<_>, _>>()?;
    let nouns = load_bank(&args.nouns).map_err(|e| Failure::from_core(e).prefixed(&args.nouns))?;
    let adjectives = load_bank(&args.adjectives).map_err(|e| Failure::from_core(e).prefixed(&args.adjectives))?;

    let bundle = fuse_bundle(features, &nouns, &adjectives, &config).map_err(Failure::from_pipeline)?;
    let bytes = canonical::to_vec(&bundle).map_err(Failure::invalid)?;
    write_output(args.out.as_deref(), &bytes)?;

    if let Some((endpoint, out_image)) = decode {
        let req = DecodeRequest::new(bundle, args.width, args.height, args.steps, args.seed)
            .map_err(Failure::from_backend)?;
        let rt = tokio::runtime::Builder::new_current_thread().enable_all().build().map_err(Failure::io)?;
        let png = rt.block_on(async {
            let client = DecoderClient::new(endpoint)?;
            client.decode(&req).await
        });
        let png = png.map_err(Failure::from_backend)?;
        write_output(Some(&out_image), &png)?;
    }
    Ok(())
}

pub fn serve(config: &Path) -> Outcome {
    let _ = tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .with_writer(std::io::stderr)
        .with_ansi(std::io::IsTerminal::is_terminal(&std::io::stderr()))
        .try_init();
    let config = ServiceConfig::load(config).map_err(Failure::from_service)?;
    for p in [&config.nouns, &config.adjectives] {
        if !p.is_file() {
            return Err(Failure::io(format!("bank not found: {}", p.display())));
        }
    }
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build().map_err(Failure::io)?;
    rt.block_on(imgany_service::run(config, shutdown_signal())).map_err(Failure::from_service)
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = term => {}
    }
}

#[derive(Serialize)]
struct FeatureFile<'a> {
    modality: ModalityTag,
    dim: usize,
    embedding: &'a [f64],
}

pub fn mock_feature(modality: ModalityTag, text: &str, dim: usize, out: Option<&Path>) -> Outcome {
    let f: Feature = mock_encode(modality, text, dim).map_err(Failure::invalid)?;
    // Full precision so the file round-trips exactly.
    let body = FeatureFile { modality, dim, embedding: f.embedding().as_slice() };
    let bytes = serde_json::to_vec(&body).map_err(Failure::invalid)?;
    write_output(out, &bytes)
}

#[derive(Serialize)]
struct LexiconLine<'a> {
    word: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    keep: Option<bool>,
    embedding: &'a [f64],
}

pub fn mock_lexicon(
    kind: LexiconKind,
    words: Vec<String>,
    count: usize,
    dim: usize,
    drop: &[String],
    out: Option<&Path>,
) -> Outcome {
    let words = if words.is_empty() { (0..count).map(|i| format!("{kind}_{i:04}")).collect() } else { words };
    let entries = synthetic_entries(kind, words.iter().map(String::as_str), dim, |w| !drop.iter().any(|d| d == w))
        .map_err(Failure::invalid)?;
    let mut bytes = Vec::new();
    for e in &entries {
        let line = LexiconLine {
            word: &e.word,
            keep: (kind == LexiconKind::Adjective).then_some(e.keep),
            embedding: e.embedding.as_slice(),
        };
        serde_json::to_writer(&mut bytes, &line).map_err(Failure::invalid)?;
        bytes.push(b'\n');
    }
    write_output(out, &bytes)
}
