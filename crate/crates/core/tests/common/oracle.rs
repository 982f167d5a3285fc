//! Straight-line reference for the full fusion pipeline, written against
//! plain vectors only. Test code converts library types into these inputs
//! and compares the library's output with what this script produces.

#![allow(dead_code, clippy::needless_range_loop)]

pub struct OracleBank {
    pub words: Vec<String>,
    pub keep: Vec<bool>,
    pub rows: Vec<Vec<f32>>,
}

pub struct OracleConfig {
    pub k_entity: usize,
    pub k_attribute: usize,
    pub variance_threshold: f64,
    pub entity_upweight: f64,
    pub balanced_weight: f64,
    pub entity: bool,
    pub attribute: bool,
    pub filter: bool,
}

#[derive(Debug)]
pub struct OracleOutput {
    pub c1: Vec<f64>,
    /// Deduplicated entity words in modality order (the c2 word list).
    pub entity_words: Vec<String>,
    pub words_per_modality: Vec<Vec<String>>,
    pub attribute_words: Vec<String>,
    pub entity_raw: Vec<f64>,
    pub entity_normalized: Vec<f64>,
    pub attribute_raw: Vec<f64>,
    pub attribute_normalized: Vec<f64>,
    pub fused_entity: Option<Vec<f64>>,
    pub fused_attribute: Option<Vec<f64>>,
    pub variance: f64,
    pub alpha: f64,
}

fn unit(x: &[f64]) -> Vec<f64> {
    let mut s = 0.0;
    for v in x {
        s += v * v;
    }
    let n = s.sqrt();
    x.iter().map(|v| v / n).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// Indices of the `k` best rows among `allowed`, by brute-force full sort.
pub fn top_k(bank: &OracleBank, allowed: &[usize], query: &[f64], k: usize) -> Vec<usize> {
    let q = unit(query);
    let mut scored: Vec<(f64, usize)> = Vec::new();
    for &i in allowed {
        let mut s = 0.0;
        for d in 0..q.len() {
            s += bank.rows[i][d] as f64 * q[d];
        }
        scored.push((s, i));
    }
    scored
        .sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(bank.words[a.1].cmp(&bank.words[b.1])).then(a.1.cmp(&b.1)));
    scored.iter().take(k).map(|p| p.1).collect()
}

fn row64(bank: &OracleBank, i: usize) -> Vec<f64> {
    let r: Vec<f64> = bank.rows[i].iter().map(|&x| x as f64).collect();
    unit(&r)
}

fn normalize_weights(raw: &[f64]) -> Vec<f64> {
    let clamped: Vec<f64> = raw.iter().map(|w| if *w > 0.0 { *w } else { 0.0 }).collect();
    let sum: f64 = clamped.iter().sum();
    if sum <= 1e-9 {
        vec![1.0 / raw.len() as f64; raw.len()]
    } else {
        clamped.iter().map(|w| w / sum).collect()
    }
}

fn fuse(features: &[Vec<f64>], w: &[f64]) -> Vec<f64> {
    for (m, wm) in w.iter().enumerate() {
        if *wm == 1.0 {
            return features[m].clone();
        }
    }
    let dim = features[0].len();
    let mut acc = vec![0.0; dim];
    for m in 0..features.len() {
        for d in 0..dim {
            acc[d] += w[m] * features[m][d];
        }
    }
    unit(&acc)
}

/// `features`: `(canonical modality index, unit embedding)` pairs in any order.
pub fn run(
    features: &[(usize, Vec<f64>)],
    nouns: &OracleBank,
    adjectives: &OracleBank,
    cfg: &OracleConfig,
) -> OracleOutput {
    let mut sorted: Vec<&(usize, Vec<f64>)> = features.iter().collect();
    sorted.sort_by_key(|p| p.0);
    let f: Vec<Vec<f64>> = sorted.iter().map(|p| p.1.clone()).collect();
    let m_count = f.len();
    let dim = f[0].len();

    // spread of the inputs
    let mut mean = vec![0.0; dim];
    for fm in &f {
        for d in 0..dim {
            mean[d] += fm[d];
        }
    }
    for d in 0..dim {
        mean[d] /= m_count as f64;
    }
    let variance = (1.0 - dot(&mean, &mean)).clamp(0.0, 1.0);

    // entity branch
    let mut entity_words = Vec::new();
    let mut words_per_modality = Vec::new();
    let mut entity_raw = Vec::new();
    let mut entity_normalized = Vec::new();
    let mut fused_entity = None;
    if cfg.entity {
        let all: Vec<usize> = (0..nouns.words.len()).collect();
        let mut union: Vec<usize> = Vec::new();
        for fm in &f {
            let hits = top_k(nouns, &all, fm, cfg.k_entity);
            words_per_modality.push(hits.iter().map(|&i| nouns.words[i].clone()).collect());
            for i in hits {
                if !union.contains(&i) {
                    union.push(i);
                }
            }
        }
        let ents: Vec<Vec<f64>> = union.iter().map(|&i| row64(nouns, i)).collect();
        entity_words = union.iter().map(|&i| nouns.words[i].clone()).collect();
        let n = ents.len() as f64;
        for fm in &f {
            let mut s = 0.0;
            for e in &ents {
                s += dot(fm, e);
            }
            entity_raw.push((s / n).clamp(-1.0, 1.0));
        }
        entity_normalized = normalize_weights(&entity_raw);
        fused_entity = Some(fuse(&f, &entity_normalized));
    }

    // attribute branch
    let mut attribute_words = Vec::new();
    let mut attribute_raw = Vec::new();
    let mut attribute_normalized = Vec::new();
    let mut fused_attribute = None;
    if cfg.attribute {
        let allowed: Vec<usize> = (0..adjectives.words.len()).filter(|&i| !cfg.filter || adjectives.keep[i]).collect();
        let hits = top_k(adjectives, &allowed, &mean, cfg.k_attribute);
        attribute_words = hits.iter().map(|&i| adjectives.words[i].clone()).collect();
        let atts: Vec<Vec<f64>> = hits.iter().map(|&i| row64(adjectives, i)).collect();
        let mut centroid = vec![0.0; dim];
        for a in &atts {
            for d in 0..dim {
                centroid[d] += a[d];
            }
        }
        for d in 0..dim {
            centroid[d] /= atts.len() as f64;
        }
        for fm in &f {
            let mut s = 0.0;
            for d in 0..dim {
                s += (fm[d] - centroid[d]) * (fm[d] - centroid[d]);
            }
            attribute_raw.push(s.clamp(0.0, 4.0));
        }
        attribute_normalized = normalize_weights(&attribute_raw);
        fused_attribute = Some(fuse(&f, &attribute_normalized));
    }

    // variance-gated combination
    let (c1, alpha) = match (&fused_entity, &fused_attribute) {
        (Some(e), Some(a)) => {
            let alpha = if variance < cfg.variance_threshold { cfg.balanced_weight } else { cfg.entity_upweight };
            let mix: Vec<f64> = (0..dim).map(|d| alpha * e[d] + (1.0 - alpha) * a[d]).collect();
            (unit(&mix), alpha)
        }
        (Some(e), None) => (e.clone(), 1.0),
        (None, Some(a)) => (a.clone(), 0.0),
        (None, None) => panic!("oracle needs at least one branch"),
    };

    OracleOutput {
        c1,
        entity_words,
        words_per_modality,
        attribute_words,
        entity_raw,
        entity_normalized,
        attribute_raw,
        attribute_normalized,
        fused_entity,
        fused_attribute,
        variance,
        alpha,
    }
}
