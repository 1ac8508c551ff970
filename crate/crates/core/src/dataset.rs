//! Datasets of per-domain performances, their file format, and the
//! utilities strategies need: domain weighting, category filtering,
//! semantic distances and a synthetic generator.
//!
//! # File format
//!
//! A dataset is one JSON document:
//!
//! ```json
//! {
//!   "entities": ["m0", "m1"],
//!   "global_ranking": {"m0": 1, "m1": 2},
//!   "category_rankings": {"baseline": {"m0": 1, "m1": 2}},
//!   "domains": [
//!     {
//!       "id": "highway",
//!       "category": "baseline",
//!       "semantic": {"road": 0.7, "car": 0.3},
//!       "performances": {"m0": [0.6, 0.1, 0.05, 0.25], "m1": [0.5, 0.2, 0.1, 0.2]},
//!       "conditionals": {
//!         "m0": {"road": [0.8, 0.1, 0.0, 0.1], "car": [0.133, 0.1, 0.167, 0.6]},
//!         "m1": {"road": [0.7, 0.2, 0.0, 0.1], "car": [0.033, 0.2, 0.333, 0.434]}
//!       }
//!     }
//!   ]
//! }
//! ```
//!
//! * `entities`: ranked entity names, in display order.
//! * `global_ranking` (optional, may be `null`): externally supplied
//!   competition ranks, e.g. a public leaderboard.
//! * `category_rankings` (optional): the same, per category.
//! * `domains[].performances`: one `[tn, fp, fn, tp]` probability tuple per
//!   entity, summing to 1 within 1e-9.
//! * `domains[].semantic`: distribution of semantic labels in the domain.
//! * `domains[].conditionals` (optional): per entity and label, the
//!   `[tn, fp, fn, tp]` distribution conditioned on that label. The
//!   semantic-weighted sum of conditionals must reproduce `performances`
//!   within 1e-6 per component, and every label with positive mass needs a
//!   conditional.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use indexmap::IndexMap;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::perf::{mix_performances, normalize_mass, ranking_score, Importance, Performance};
use crate::rank::{entities, rank_from_scores, Entities, EntityId, Ranking, ScoreVector};

/// Tolerance of the conditional reconstruction check.
pub const RECONSTRUCTION_TOLERANCE: f64 = 1e-6;

/// Distribution of semantic labels over a domain.
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticDistribution(BTreeMap<String, f64>);

impl SemanticDistribution {
    pub fn new<I, S>(items: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let (labels, mut mass): (Vec<String>, Vec<f64>) =
            items.into_iter().map(|(l, p)| (l.into(), p)).unzip();
        normalize_mass(&mut mass).map_err(|e| Error::Validation(vec![format!("semantic distribution: {e}")]))?;
        let mut map = BTreeMap::new();
        for (l, p) in labels.into_iter().zip(mass) {
            if map.insert(l.clone(), p).is_some() {
                return Err(Error::Validation(vec![format!("duplicate semantic label `{l}`")]));
            }
        }
        Ok(SemanticDistribution(map))
    }

    pub fn get(&self, label: &str) -> f64 {
        self.0.get(label).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> + '_ {
        self.0.iter().map(|(l, p)| (l.as_str(), *p))
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> + '_ {
        self.0.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Bhattacharyya distance `-ln Σ sqrt(p q)`; infinite for disjoint supports.
pub fn bhattacharyya_distance(p: &SemanticDistribution, q: &SemanticDistribution) -> f64 {
    let overlap: f64 = p.iter().map(|(l, pv)| (pv * q.get(l)).sqrt()).sum();
    if overlap <= 0.0 {
        return f64::INFINITY;
    }
    // dividing by the (unit) totals makes identical inputs give exactly 1
    let total_p: f64 = p.iter().map(|(_, v)| v).sum();
    let total_q: f64 = q.iter().map(|(_, v)| v).sum();
    let coefficient = (overlap / (total_p * total_q).sqrt()).min(1.0);
    (-coefficient.ln()).max(0.0)
}

/// Conditional outcome distributions of one entity, keyed by semantic label.
pub type Conditionals = BTreeMap<String, Performance>;

/// One domain: its category, semantics and per-entity performances.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainRecord {
    pub id: String,
    pub category: String,
    pub semantic: SemanticDistribution,
    /// Positional against the dataset's entities.
    pub performances: Vec<Performance>,
    /// Positional against the dataset's entities, when available.
    pub conditionals: Option<Vec<Conditionals>>,
}

/// Per-domain weights, in dataset domain order.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainWeights(Vec<(String, f64)>);

impl DomainWeights {
    pub fn get(&self, domain: &str) -> Option<f64> {
        self.0.iter().find(|(d, _)| d == domain).map(|(_, w)| *w)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> + '_ {
        self.0.iter().map(|(d, w)| (d.as_str(), *w))
    }

    pub fn values(&self) -> Vec<f64> {
        self.0.iter().map(|(_, w)| *w).collect()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().map(|(_, w)| w).sum()
    }
}

/// Validated collection of domains over a shared entity set.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    entities: Entities,
    domains: Vec<DomainRecord>,
    global_ranking: Option<Ranking>,
    category_rankings: BTreeMap<String, Ranking>,
    categories: BTreeMap<String, Vec<usize>>,
}

impl Dataset {
    /// Assembles and validates a dataset, reporting every violation at once.
    pub fn new(
        entities: Entities,
        domains: Vec<DomainRecord>,
        global_ranking: Option<Ranking>,
        category_rankings: BTreeMap<String, Ranking>,
    ) -> Result<Self> {
        let mut issues = Vec::new();
        if entities.is_empty() {
            issues.push("entity list is empty".to_owned());
        }
        let unique: BTreeSet<&EntityId> = entities.iter().collect();
        if unique.len() != entities.len() {
            issues.push("entity names are not unique".to_owned());
        }
        if domains.is_empty() {
            issues.push("dataset has no domain".to_owned());
        }
        let mut seen = BTreeSet::new();
        let mut categories: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (k, d) in domains.iter().enumerate() {
            if !seen.insert(d.id.as_str()) {
                issues.push(format!("domain id `{}` is not unique", d.id));
            }
            categories.entry(d.category.clone()).or_default().push(k);
            if d.performances.len() != entities.len() {
                issues.push(format!(
                    "domain `{}`: {} performances for {} entities",
                    d.id,
                    d.performances.len(),
                    entities.len()
                ));
            }
            if let Some(conds) = &d.conditionals {
                check_conditionals(d, conds, &entities, &mut issues);
            }
        }
        if let Some(r) = &global_ranking {
            if r.aligned_to(&entities).is_err() {
                issues.push("global ranking does not cover the entity set".to_owned());
            }
        }
        for (cat, r) in &category_rankings {
            if !categories.contains_key(cat) {
                issues.push(format!("ranking given for unknown category `{cat}`"));
            }
            if r.aligned_to(&entities).is_err() {
                issues.push(format!("ranking of category `{cat}` does not cover the entity set"));
            }
        }
        if !issues.is_empty() {
            return Err(Error::Validation(issues));
        }
        let global_ranking = global_ranking.map(|r| r.aligned_to(&entities)).transpose()?;
        let category_rankings = category_rankings
            .into_iter()
            .map(|(c, r)| Ok((c, r.aligned_to(&entities)?)))
            .collect::<Result<_>>()?;
        Ok(Dataset {
            entities,
            domains,
            global_ranking,
            category_rankings,
            categories,
        })
    }

    pub fn entities(&self) -> &Entities {
        &self.entities
    }

    pub fn domains(&self) -> &[DomainRecord] {
        &self.domains
    }

    pub fn domain(&self, id: &str) -> Result<&DomainRecord> {
        self.domains
            .iter()
            .find(|d| d.id == id)
            .ok_or_else(|| Error::UnknownDomain(id.to_owned()))
    }

    pub fn domain_index(&self, id: &str) -> Result<usize> {
        self.domains
            .iter()
            .position(|d| d.id == id)
            .ok_or_else(|| Error::UnknownDomain(id.to_owned()))
    }

    pub fn global_ranking(&self) -> Option<&Ranking> {
        self.global_ranking.as_ref()
    }

    pub fn category_rankings(&self) -> &BTreeMap<String, Ranking> {
        &self.category_rankings
    }

    /// Category name to domain positions.
    pub fn categories(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.categories
    }

    pub fn has_conditionals(&self) -> bool {
        self.domains.iter().all(|d| d.conditionals.is_some())
    }

    /// Scores of every entity of `domain` under `importance`; undefined
    /// scores become `None`.
    pub fn domain_scores(&self, domain: &DomainRecord, importance: &Importance) -> ScoreVector {
        domain_scores(&self.entities, domain, importance)
    }

    /// Canonical JSON serialization (the format of [`save_dataset`]).
    pub fn to_json(&self) -> String {
        let raw = RawDataset::from(self);
        let mut s = serde_json::to_string_pretty(&raw).expect("dataset serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawDataset = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        raw.into_dataset()
    }

    /// SHA-256 of the canonical serialization, hex encoded.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }
}

pub(crate) fn domain_scores(entities: &Entities, domain: &DomainRecord, importance: &Importance) -> ScoreVector {
    let values = domain
        .performances
        .iter()
        .map(|p| ranking_score(p, importance).ok())
        .collect();
    ScoreVector::new(entities.clone(), values).expect("domain covers the entity set")
}

fn check_conditionals(d: &DomainRecord, conds: &[Conditionals], entities: &Entities, issues: &mut Vec<String>) {
    if conds.len() != entities.len() {
        issues.push(format!(
            "domain `{}`: conditionals for {} of {} entities",
            d.id,
            conds.len(),
            entities.len()
        ));
        return;
    }
    for ((entity, by_label), perf) in entities.iter().zip(conds).zip(&d.performances) {
        for label in by_label.keys() {
            if !d.semantic.0.contains_key(label) {
                issues.push(format!(
                    "domain `{}`, entity `{entity}`: conditional for label `{label}` absent from the semantic distribution",
                    d.id
                ));
            }
        }
        let mut rebuilt = [0.0; 4];
        let mut complete = true;
        for (label, mass) in d.semantic.iter().filter(|(_, m)| *m > 0.0) {
            match by_label.get(label) {
                Some(c) => {
                    for (slot, v) in rebuilt.iter_mut().zip(c.as_array()) {
                        *slot += mass * v;
                    }
                }
                None => {
                    complete = false;
                    issues.push(format!(
                        "domain `{}`, entity `{entity}`: missing conditional for label `{label}`",
                        d.id
                    ));
                }
            }
        }
        if complete {
            let worst = rebuilt
                .iter()
                .zip(perf.as_array())
                .map(|(r, p)| (r - p).abs())
                .fold(0.0, f64::max);
            if worst > RECONSTRUCTION_TOLERANCE {
                issues.push(format!(
                    "domain `{}`, entity `{entity}`: conditionals reconstruct the performance only within {worst:e}",
                    d.id
                ));
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDataset {
    entities: Vec<String>,
    #[serde(default)]
    global_ranking: Option<IndexMap<String, u32>>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    category_rankings: IndexMap<String, IndexMap<String, u32>>,
    domains: Vec<RawDomain>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    id: String,
    category: String,
    semantic: IndexMap<String, f64>,
    performances: IndexMap<String, [f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    conditionals: Option<IndexMap<String, IndexMap<String, [f64; 4]>>>,
}

fn ranking_to_raw(r: &Ranking) -> IndexMap<String, u32> {
    r.entities()
        .iter()
        .zip(r.ranks())
        .map(|(e, &k)| (e.0.clone(), k))
        .collect()
}

impl From<&Dataset> for RawDataset {
    fn from(ds: &Dataset) -> Self {
        let names = &ds.entities;
        RawDataset {
            entities: names.iter().map(|e| e.0.clone()).collect(),
            global_ranking: ds.global_ranking.as_ref().map(ranking_to_raw),
            category_rankings: ds
                .category_rankings
                .iter()
                .map(|(c, r)| (c.clone(), ranking_to_raw(r)))
                .collect(),
            domains: ds
                .domains
                .iter()
                .map(|d| RawDomain {
                    id: d.id.clone(),
                    category: d.category.clone(),
                    semantic: d.semantic.0.iter().map(|(l, p)| (l.clone(), *p)).collect(),
                    performances: names
                        .iter()
                        .zip(&d.performances)
                        .map(|(e, p)| (e.0.clone(), p.as_array()))
                        .collect(),
                    conditionals: d.conditionals.as_ref().map(|conds| {
                        names
                            .iter()
                            .zip(conds)
                            .map(|(e, c)| {
                                (
                                    e.0.clone(),
                                    c.iter().map(|(l, p)| (l.clone(), p.as_array())).collect(),
                                )
                            })
                            .collect()
                    }),
                })
                .collect(),
        }
    }
}

fn raw_ranking(
    what: &str,
    raw: &IndexMap<String, u32>,
    names: &Entities,
    issues: &mut Vec<String>,
) -> Option<Ranking> {
    let mut ranks = Vec::with_capacity(names.len());
    for e in names.iter() {
        match raw.get(e.as_str()) {
            Some(&r) => ranks.push(r),
            None => issues.push(format!("{what}: missing entity `{e}`")),
        }
    }
    for key in raw.keys() {
        if !names.iter().any(|e| e.as_str() == key) {
            issues.push(format!("{what}: unknown entity `{key}`"));
        }
    }
    if ranks.len() != names.len() {
        return None;
    }
    match Ranking::new(names.clone(), ranks) {
        Ok(r) => Some(r),
        Err(e) => {
            issues.push(format!("{what}: {e}"));
            None
        }
    }
}

impl RawDataset {
    fn into_dataset(self) -> Result<Dataset> {
        let names = entities(self.entities.iter().cloned());
        let mut issues = Vec::new();
        let global = self
            .global_ranking
            .as_ref()
            .and_then(|g| raw_ranking("global ranking", g, &names, &mut issues));
        let mut category_rankings = BTreeMap::new();
        for (cat, raw) in &self.category_rankings {
            if let Some(r) = raw_ranking(&format!("ranking of category `{cat}`"), raw, &names, &mut issues) {
                category_rankings.insert(cat.clone(), r);
            }
        }
        let mut domains = Vec::with_capacity(self.domains.len());
        for raw in self.domains {
            if let Some(d) = raw.into_record(&names, &mut issues) {
                domains.push(d);
            }
        }
        if !issues.is_empty() {
            return Err(Error::Validation(issues));
        }
        Dataset::new(names, domains, global, category_rankings)
    }
}

impl RawDomain {
    fn into_record(self, names: &Entities, issues: &mut Vec<String>) -> Option<DomainRecord> {
        let before = issues.len();
        let id = self.id;
        let semantic = match SemanticDistribution::new(self.semantic) {
            Ok(s) => Some(s),
            Err(e) => {
                issues.push(format!("domain `{id}`: {e}"));
                None
            }
        };
        for key in self.performances.keys() {
            if !names.iter().any(|e| e.as_str() == key) {
                issues.push(format!("domain `{id}`: performance for unknown entity `{key}`"));
            }
        }
        let mut performances = Vec::with_capacity(names.len());
        for e in names.iter() {
            match self.performances.get(e.as_str()) {
                None => issues.push(format!("domain `{id}`: missing performance for entity `{e}`")),
                Some(row) => match Performance::from_array(*row) {
                    Ok(p) => performances.push(p),
                    Err(err) => issues.push(format!("domain `{id}`, entity `{e}`: {err}")),
                },
            }
        }
        let conditionals = self.conditionals.map(|raw| {
            for key in raw.keys() {
                if !names.iter().any(|e| e.as_str() == key) {
                    issues.push(format!("domain `{id}`: conditionals for unknown entity `{key}`"));
                }
            }
            names
                .iter()
                .map(|e| {
                    let mut by_label = Conditionals::new();
                    match raw.get(e.as_str()) {
                        None => issues.push(format!("domain `{id}`: missing conditionals for entity `{e}`")),
                        Some(labels) => {
                            for (label, row) in labels {
                                match Performance::from_array(*row) {
                                    Ok(p) => {
                                        by_label.insert(label.clone(), p);
                                    }
                                    Err(err) => issues.push(format!(
                                        "domain `{id}`, entity `{e}`, label `{label}`: {err}"
                                    )),
                                }
                            }
                        }
                    }
                    by_label
                })
                .collect()
        });
        if issues.len() > before {
            return None;
        }
        Some(DomainRecord {
            id,
            category: self.category,
            semantic: semantic?,
            performances,
            conditionals,
        })
    }
}

/// Reads and validates a dataset file.
pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Dataset::from_json(&text)
}

pub fn save_dataset(dataset: &Dataset, path: &Path) -> Result<()> {
    fs::write(path, dataset.to_json()).map_err(|e| Error::io(path, e))
}

/// Leaderboard-style domain weights: every category gets the same total
/// weight, split evenly over its domains, and `excluded` gets 0.
///
/// With `restrict_category`, only that category's remaining domains are
/// weighted, uniformly. `excluded = None` excludes nothing.
pub fn cdnet_weights(
    dataset: &Dataset,
    excluded: Option<&str>,
    restrict_category: Option<&str>,
) -> Result<DomainWeights> {
    let excluded_idx = excluded.map(|id| dataset.domain_index(id)).transpose()?;
    let remaining = |members: &[usize]| -> Vec<usize> {
        members.iter().copied().filter(|&k| Some(k) != excluded_idx).collect()
    };
    let mut weights = vec![0.0; dataset.domains.len()];
    match restrict_category {
        Some(cat) => {
            let members = dataset
                .categories
                .get(cat)
                .ok_or_else(|| Error::UnknownCategory(cat.to_owned()))?;
            let kept = remaining(members);
            if kept.is_empty() {
                return Err(Error::EmptyCategory(cat.to_owned()));
            }
            for &k in &kept {
                weights[k] = 1.0 / kept.len() as f64;
            }
        }
        None => {
            let groups: Vec<Vec<usize>> = dataset
                .categories
                .values()
                .map(|m| remaining(m))
                .filter(|m| !m.is_empty())
                .collect();
            if groups.is_empty() {
                return Err(Error::EmptyList);
            }
            for group in &groups {
                for &k in group {
                    weights[k] = 1.0 / (groups.len() * group.len()) as f64;
                }
            }
        }
    }
    Ok(DomainWeights(
        dataset
            .domains
            .iter()
            .zip(weights)
            .map(|(d, w)| (d.id.clone(), w))
            .collect(),
    ))
}

/// Sub-dataset holding only the domains of `category`.
pub fn filter_category(dataset: &Dataset, category: &str) -> Result<Dataset> {
    if !dataset.categories.contains_key(category) {
        return Err(Error::UnknownCategory(category.to_owned()));
    }
    let domains = dataset
        .domains
        .iter()
        .filter(|d| d.category == category)
        .cloned()
        .collect();
    let category_rankings = dataset
        .category_rankings
        .iter()
        .filter(|(c, _)| c.as_str() == category)
        .map(|(c, r)| (c.clone(), r.clone()))
        .collect();
    Dataset::new(
        dataset.entities.clone(),
        domains,
        dataset.global_ranking.clone(),
        category_rankings,
    )
}

/// Parameters of [`synth_dataset`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthParams {
    pub domains: usize,
    pub entities: usize,
    pub categories: usize,
    pub labels: usize,
    /// 0 makes every domain identical; 1 makes domains independent draws.
    pub drift: f64,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            domains: 5,
            entities: 10,
            categories: 2,
            labels: 3,
            drift: 0.5,
            seed: 0,
        }
    }
}

/// Uniform draws in `[0, 1)` from the top 53 bits of ChaCha8 output.
struct UnitStream(ChaCha8Rng);

impl UnitStream {
    fn next(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn positive_mass(&mut self, n: usize, floor: f64) -> Vec<f64> {
        let raw: Vec<f64> = (0..n).map(|_| floor + self.next()).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / total).collect()
    }

    fn performance(&mut self) -> Performance {
        let m = self.positive_mass(4, 0.05);
        Performance::from_array([m[0], m[1], m[2], m[3]]).expect("positive mass")
    }
}

fn blend(base: &[f64], noise: &[f64], drift: f64) -> Vec<f64> {
    let mixed: Vec<f64> = base
        .iter()
        .zip(noise)
        .map(|(b, n)| (1.0 - drift) * b + drift * n)
        .collect();
    let total: f64 = mixed.iter().sum();
    mixed.into_iter().map(|v| v / total).collect()
}

fn padded(prefix: &str, k: usize, count: usize) -> String {
    let width = count.saturating_sub(1).to_string().len();
    format!("{prefix}{k:0width$}")
}

/// Deterministic synthetic dataset with full semantic conditionals.
///
/// Randomness comes from ChaCha8 seeded with `seed` (`seed_from_u64`); each
/// uniform draw uses the top 53 bits of one 64-bit output. Every entity has a
/// base conditional performance per label and the dataset a base semantic
/// distribution; each domain blends those bases with fresh draws by `drift`.
/// Domain `k` belongs to category `k % categories`. The global and
/// per-category rankings order entities by accuracy of their equally
/// weighted mean performance.
pub fn synth_dataset(params: SynthParams) -> Result<Dataset> {
    let SynthParams {
        domains: n_domains,
        entities: n_entities,
        categories: n_categories,
        labels: n_labels,
        drift,
        seed,
    } = params;
    if n_domains == 0 || n_entities == 0 || n_categories == 0 || n_labels == 0 {
        return Err(Error::InvalidParams("all counts must be at least 1".into()));
    }
    if n_categories > n_domains {
        return Err(Error::InvalidParams(format!(
            "{n_categories} categories for {n_domains} domains"
        )));
    }
    if !(0.0..=1.0).contains(&drift) {
        return Err(Error::InvalidParams(format!("drift {drift} outside [0, 1]")));
    }
    let mut rng = UnitStream(ChaCha8Rng::seed_from_u64(seed));
    let names = entities((0..n_entities).map(|k| padded("m", k, n_entities)));
    let labels: Vec<String> = (0..n_labels).map(|k| padded("label", k, n_labels)).collect();

    let base_semantic = rng.positive_mass(n_labels, 0.1);
    let base_conditionals: Vec<Vec<Performance>> = (0..n_entities)
        .map(|_| (0..n_labels).map(|_| rng.performance()).collect())
        .collect();

    let mut domains = Vec::with_capacity(n_domains);
    for k in 0..n_domains {
        let noise = rng.positive_mass(n_labels, 0.1);
        let mass = blend(&base_semantic, &noise, drift);
        let semantic = SemanticDistribution::new(labels.iter().cloned().zip(mass.iter().copied()))?;
        let mut performances = Vec::with_capacity(n_entities);
        let mut conditionals = Vec::with_capacity(n_entities);
        for base in &base_conditionals {
            let by_label: Vec<Performance> = base
                .iter()
                .map(|b| {
                    let fresh = rng.performance();
                    mix_performances([(b, 1.0 - drift), (&fresh, drift)])
                })
                .collect::<Result<_>>()?;
            performances.push(mix_performances(by_label.iter().zip(mass.iter().copied()))?);
            conditionals.push(labels.iter().cloned().zip(by_label).collect::<Conditionals>());
        }
        domains.push(DomainRecord {
            id: padded("d", k, n_domains),
            category: padded("cat", k % n_categories, n_categories),
            semantic,
            performances,
            conditionals: Some(conditionals),
        });
    }

    let leaderboard = |members: &[&DomainRecord]| -> Result<Ranking> {
        let values = (0..n_entities)
            .map(|e| {
                let mixed = mix_performances(members.iter().map(|d| (&d.performances[e], 1.0)))?;
                ranking_score(&mixed, &Importance::uniform()).map(Some)
            })
            .collect::<Result<Vec<_>>>()?;
        rank_from_scores(&ScoreVector::new(names.clone(), values)?, 0.0)
    };
    let all: Vec<&DomainRecord> = domains.iter().collect();
    let global = leaderboard(&all)?;
    let mut category_rankings = BTreeMap::new();
    for c in 0..n_categories {
        let cat = padded("cat", c, n_categories);
        let members: Vec<&DomainRecord> = domains.iter().filter(|d| d.category == cat).collect();
        category_rankings.insert(cat, leaderboard(&members)?);
    }
    Dataset::new(names, domains, Some(global), category_rankings)
}
