#![allow(dead_code)]

pub mod oracle;

use imgany_core::{
    build_bank, Bundle, EmbeddingBank, EmbeddingSource, Feature, FusionConfig, LexiconEntry, LexiconKind, ModalityTag,
    PipelineOutput,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use oracle::{OracleBank, OracleConfig, OracleOutput};

pub fn gaussian(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

pub fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let v = gaussian(rng, dim);
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

/// `n` random words; adjectives get `keep = false` with probability `drop`.
pub fn random_bank(rng: &mut ChaCha8Rng, kind: LexiconKind, n: usize, dim: usize, drop: f64) -> EmbeddingBank {
    let entries = (0..n)
        .map(|i| {
            let keep = kind == LexiconKind::Noun || rng.random::<f64>() >= drop;
            LexiconEntry::new(format!("{}_{i:04}", kind.as_str()), kind, keep, gaussian(rng, dim)).unwrap()
        })
        .collect();
    build_bank(entries, kind).unwrap()
}

pub fn random_features(rng: &mut ChaCha8Rng, m: usize, dim: usize) -> Vec<Feature> {
    let mut tags = ModalityTag::ALL.to_vec();
    tags.shuffle(rng);
    tags.truncate(m);
    tags.into_iter().map(|t| Feature::new(t, gaussian(rng, dim)).unwrap()).collect()
}

pub fn oracle_bank(bank: &EmbeddingBank) -> OracleBank {
    OracleBank {
        words: bank.words().to_vec(),
        keep: (0..bank.count()).map(|i| bank.keep(i)).collect(),
        rows: (0..bank.count()).map(|i| bank.row(i).to_vec()).collect(),
    }
}

pub fn oracle_config(c: &FusionConfig) -> OracleConfig {
    OracleConfig {
        k_entity: c.k_entity,
        k_attribute: c.k_attribute,
        variance_threshold: c.variance_threshold,
        entity_upweight: c.entity_upweight,
        balanced_weight: c.balanced_weight,
        entity: c.enable_entity_branch,
        attribute: c.enable_attribute_branch,
        filter: c.enable_adjective_filter,
    }
}

pub fn oracle_features(features: &[Feature]) -> Vec<(usize, Vec<f64>)> {
    features
        .iter()
        .map(|f| {
            let idx = ModalityTag::ALL.iter().position(|t| *t == f.tag()).unwrap();
            (idx, f.embedding().as_slice().to_vec())
        })
        .collect()
}

pub fn run_oracle(
    features: &[Feature],
    nouns: &EmbeddingBank,
    adjectives: &EmbeddingBank,
    cfg: &FusionConfig,
) -> OracleOutput {
    oracle::run(&oracle_features(features), &oracle_bank(nouns), &oracle_bank(adjectives), &oracle_config(cfg))
}

fn close(a: &[f64], b: &[f64], tol: f64) -> Result<(), String> {
    if a.len() != b.len() {
        return Err(format!("length {} vs {}", a.len(), b.len()));
    }
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        if (x - y).abs() > tol {
            return Err(format!("component {i}: {x} vs {y}"));
        }
    }
    Ok(())
}

fn weights_vec(w: &Option<imgany_core::Weights>, raw: bool) -> Vec<f64> {
    match w {
        None => vec![],
        Some(w) => {
            let map = if raw { &w.raw } else { &w.normalized };
            map.values().copied().collect()
        }
    }
}

/// Compares a bundle against the oracle: words exactly, numbers within `tol`.
pub fn compare_bundle(bundle: &Bundle, o: &OracleOutput, tol: f64) -> Result<(), String> {
    close(bundle.c1.as_slice(), &o.c1, tol).map_err(|e| format!("c1 {e}"))?;
    let c2 = o.entity_words.join(", ");
    if bundle.c2 != c2 {
        return Err(format!("c2 {:?} vs {:?}", bundle.c2, c2));
    }
    let c3 = o.attribute_words.join(", ");
    if bundle.c3 != c3 {
        return Err(format!("c3 {:?} vs {:?}", bundle.c3, c3));
    }
    close(&weights_vec(&bundle.entity_weights, true), &o.entity_raw, tol).map_err(|e| format!("entity raw {e}"))?;
    close(&weights_vec(&bundle.entity_weights, false), &o.entity_normalized, tol)
        .map_err(|e| format!("entity normalized {e}"))?;
    close(&weights_vec(&bundle.attribute_weights, true), &o.attribute_raw, tol)
        .map_err(|e| format!("attribute raw {e}"))?;
    close(&weights_vec(&bundle.attribute_weights, false), &o.attribute_normalized, tol)
        .map_err(|e| format!("attribute normalized {e}"))?;
    close(&[bundle.variance], &[o.variance], tol).map_err(|e| format!("variance {e}"))?;
    if bundle.alpha != o.alpha {
        return Err(format!("alpha {} vs {}", bundle.alpha, o.alpha));
    }
    Ok(())
}

pub fn compare_output(out: &PipelineOutput<f64>, o: &OracleOutput, tol: f64) -> Result<(), String> {
    compare_bundle(&out.bundle, o, tol)?;
    if let (Some(e), Some(oe)) = (&out.entity, &o.fused_entity) {
        close(e.fused.as_slice(), oe, tol).map_err(|e| format!("fused entity {e}"))?;
        let per: Vec<Vec<String>> = e.words_per_modality.values().cloned().collect();
        if per != o.words_per_modality {
            return Err(format!("words per modality {per:?} vs {:?}", o.words_per_modality));
        }
    }
    if let (Some(a), Some(oa)) = (&out.attribute, &o.fused_attribute) {
        close(a.fused.as_slice(), oa, tol).map_err(|e| format!("fused attribute {e}"))?;
    }
    Ok(())
}
