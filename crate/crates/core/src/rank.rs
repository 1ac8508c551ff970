//! Rankings of entities, Kendall's τ between rankings, and aggregation of
//! ranks or values across domains.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Name of a ranked entity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntityId(pub String);

impl EntityId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(&self.0)
    }
}

impl From<&str> for EntityId {
    fn from(s: &str) -> Self {
        EntityId(s.to_owned())
    }
}

impl From<String> for EntityId {
    fn from(s: String) -> Self {
        EntityId(s)
    }
}

/// Shared, ordered entity set. Rankings and score vectors are positional
/// against one of these.
pub type Entities = Arc<[EntityId]>;

pub fn entities<I, S>(names: I) -> Entities
where
    I: IntoIterator<Item = S>,
    S: Into<EntityId>,
{
    names.into_iter().map(Into::into).collect::<Vec<_>>().into()
}

fn same_entities(x: &Entities, y: &Entities) -> bool {
    Arc::ptr_eq(x, y) || x[..] == y[..]
}

/// Per-entity value, higher is better. `None` marks an undefined score.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    entities: Entities,
    values: Vec<Option<f64>>,
}

impl ScoreVector {
    pub fn new(entities: Entities, values: Vec<Option<f64>>) -> Result<Self> {
        if entities.is_empty() {
            return Err(Error::EmptyList);
        }
        if entities.len() != values.len() {
            return Err(Error::EntityMismatch);
        }
        let values = values
            .into_iter()
            .map(|v| v.filter(|x| !x.is_nan()))
            .collect();
        Ok(ScoreVector { entities, values })
    }

    pub fn from_defined(entities: Entities, values: Vec<f64>) -> Result<Self> {
        Self::new(entities, values.into_iter().map(Some).collect())
    }

    pub fn entities(&self) -> &Entities {
        &self.entities
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn get(&self, entity: &str) -> Option<Option<f64>> {
        let k = self.entities.iter().position(|e| e.as_str() == entity)?;
        Some(self.values[k])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Competition ranking ("1224"): rank 1 is best and tied entities share the
/// best rank of their group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ranking {
    entities: Entities,
    ranks: Vec<u32>,
}

impl Ranking {
    /// Builds a ranking from explicit ranks, checking they form a valid
    /// competition ranking.
    pub fn new(entities: Entities, ranks: Vec<u32>) -> Result<Self> {
        if entities.len() != ranks.len() {
            return Err(Error::EntityMismatch);
        }
        if entities.is_empty() {
            return Err(Error::EmptyList);
        }
        for (k, &r) in ranks.iter().enumerate() {
            let better = ranks.iter().filter(|&&o| o < r).count() as u32;
            if r != better + 1 {
                return Err(Error::Parse(format!(
                    "rank {r} of `{}` is not a competition rank (expected {})",
                    entities[k],
                    better + 1
                )));
            }
        }
        Ok(Ranking { entities, ranks })
    }

    pub fn entities(&self) -> &Entities {
        &self.entities
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    pub fn rank_of(&self, entity: &str) -> Option<u32> {
        let k = self.entities.iter().position(|e| e.as_str() == entity)?;
        Some(self.ranks[k])
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// Entity positions from best to worst; ties keep entity order.
    pub fn order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.ranks.len()).collect();
        idx.sort_by_key(|&k| self.ranks[k]);
        idx
    }

    /// Re-expresses this ranking against `target`, which must hold the same
    /// entity set in any order.
    pub fn aligned_to(&self, target: &Entities) -> Result<Ranking> {
        if same_entities(&self.entities, target) {
            return Ok(self.clone());
        }
        if target.len() != self.entities.len() {
            return Err(Error::EntityMismatch);
        }
        let ranks = target
            .iter()
            .map(|e| {
                self.rank_of(e.as_str())
                    .ok_or(Error::EntityMismatch)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Ranking {
            entities: target.clone(),
            ranks,
        })
    }

    /// Value vector `-rank`, so that higher is better.
    pub fn to_scores(&self) -> ScoreVector {
        ScoreVector {
            entities: self.entities.clone(),
            values: self.ranks.iter().map(|&r| Some(-(r as f64))).collect(),
        }
    }
}

/// Ranks entities by descending score.
///
/// Consecutive sorted values within `tie_tol` of each other are chained into
/// one tie group. Undefined scores share the worst rank.
pub fn rank_from_scores(scores: &ScoreVector, tie_tol: f64) -> Result<Ranking> {
    let n = scores.values.len();
    let mut defined: Vec<(usize, f64)> = scores
        .values
        .iter()
        .enumerate()
        .filter_map(|(k, v)| v.map(|x| (k, x)))
        .collect();
    if defined.is_empty() {
        return Err(Error::NoDefinedScores);
    }
    defined.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));

    let worst = defined.len() as u32 + 1;
    let mut ranks = vec![worst; n];
    let mut group_rank = 1u32;
    for (pos, &(k, v)) in defined.iter().enumerate() {
        if pos > 0 && defined[pos - 1].1 - v > tie_tol {
            group_rank = pos as u32 + 1;
        }
        ranks[k] = group_rank;
    }
    Ok(Ranking {
        entities: scores.entities.clone(),
        ranks,
    })
}

/// Kendall's τ-b between two rankings of the same entity set.
///
/// Returns 0 when either ranking ties every pair.
pub fn kendall_tau(r1: &Ranking, r2: &Ranking) -> Result<f64> {
    let r2 = r2.aligned_to(&r1.entities)?;
    let n = r1.ranks.len();
    if n < 2 {
        return Err(Error::TooFewEntities(n));
    }
    let (x, y) = (&r1.ranks, &r2.ranks);
    let (mut concordant, mut discordant, mut tied_x, mut tied_y) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = (x[i] as i64 - x[j] as i64).signum();
            let dy = (y[i] as i64 - y[j] as i64).signum();
            match (dx, dy) {
                (0, 0) => {}
                (0, _) => tied_x += 1,
                (_, 0) => tied_y += 1,
                _ if dx == dy => concordant += 1,
                _ => discordant += 1,
            }
        }
    }
    let left = (concordant + discordant + tied_x) as f64;
    let right = (concordant + discordant + tied_y) as f64;
    if left == 0.0 || right == 0.0 {
        return Ok(0.0);
    }
    Ok((concordant - discordant) as f64 / (left * right).sqrt())
}

/// Probability `(1 + τ) / 2` that a random pair is ordered alike in both
/// rankings.
pub fn tau_to_probability(tau: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&tau) {
        return Err(Error::OutOfRange {
            value: tau,
            lower: -1.0,
            upper: 1.0,
        });
    }
    Ok((1.0 + tau) / 2.0)
}

/// How per-entity inputs are combined across domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    Mean,
    Median,
}

/// Tolerance used when re-ranking aggregated ranks, so that sums whose exact
/// values coincide are not split by rounding.
pub const AGGREGATE_RANK_TIE_TOL: f64 = 1e-9;

fn check_weight(w: f64) -> Result<()> {
    if !w.is_finite() || w < 0.0 {
        return Err(Error::InvalidWeight(w));
    }
    Ok(())
}

/// Weighted mean of `(value, weight)` pairs. Zero total weight gives `None`.
pub(crate) fn weighted_mean(items: &[(f64, f64)]) -> Option<f64> {
    let total: f64 = items.iter().map(|(_, w)| w).sum();
    if total <= 0.0 {
        return None;
    }
    Some(items.iter().map(|(v, w)| v * w).sum::<f64>() / total)
}

/// Lower weighted median: the smallest value whose cumulative weight
/// reaches half the total.
pub(crate) fn weighted_median(items: &[(f64, f64)]) -> Option<f64> {
    let total: f64 = items.iter().map(|(_, w)| w).sum();
    if total <= 0.0 {
        return None;
    }
    let mut sorted: Vec<(f64, f64)> = items.iter().copied().filter(|(_, w)| *w > 0.0).collect();
    sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
    // relative slack so that weights like 1/3 + 1/6 still reach exactly half
    let half = 0.5 * total * (1.0 - 1e-12);
    let mut cumulative = 0.0;
    for (v, w) in &sorted {
        cumulative += w;
        if cumulative >= half {
            return Some(*v);
        }
    }
    sorted.last().map(|(v, _)| *v)
}

fn aggregate(items: &[(f64, f64)], mode: Aggregation) -> Option<f64> {
    match mode {
        Aggregation::Mean => weighted_mean(items),
        Aggregation::Median => weighted_median(items),
    }
}

/// Per-entity weighted mean or lower weighted median of ranks, returned as
/// negated aggregates (higher is better).
pub fn aggregate_rank_values(rankings: &[(Ranking, f64)], mode: Aggregation) -> Result<ScoreVector> {
    let (first, _) = rankings.first().ok_or(Error::EmptyList)?;
    let entities = first.entities.clone();
    let mut aligned = Vec::with_capacity(rankings.len());
    let mut total = 0.0;
    for (r, w) in rankings {
        check_weight(*w)?;
        total += w;
        aligned.push((r.aligned_to(&entities)?, *w));
    }
    if total <= 0.0 {
        return Err(Error::AllZeroWeights);
    }
    let mut buf = Vec::with_capacity(aligned.len());
    let values = (0..entities.len())
        .map(|k| {
            buf.clear();
            buf.extend(aligned.iter().map(|(r, w)| (r.ranks[k] as f64, *w)));
            aggregate(&buf, mode).map(|v| -v)
        })
        .collect();
    ScoreVector::new(entities, values)
}

/// Aggregates ranks across rankings and re-ranks entities by ascending
/// aggregate.
pub fn aggregate_ranks(rankings: &[(Ranking, f64)], mode: Aggregation) -> Result<Ranking> {
    rank_from_scores(&aggregate_rank_values(rankings, mode)?, AGGREGATE_RANK_TIE_TOL)
}

/// Per-entity weighted mean or lower weighted median of values, over the
/// inputs where the entity's value is defined.
pub fn aggregate_values(vectors: &[(ScoreVector, f64)], mode: Aggregation) -> Result<ScoreVector> {
    let (first, _) = vectors.first().ok_or(Error::EmptyList)?;
    let entities = first.entities.clone();
    let mut total = 0.0;
    for (v, w) in vectors {
        check_weight(*w)?;
        total += w;
        if !same_entities(&v.entities, &entities) {
            return Err(Error::EntityMismatch);
        }
    }
    if total <= 0.0 {
        return Err(Error::AllZeroWeights);
    }
    let mut buf = Vec::with_capacity(vectors.len());
    let values = (0..entities.len())
        .map(|k| {
            buf.clear();
            buf.extend(vectors.iter().filter_map(|(v, w)| v.values[k].map(|x| (x, *w))));
            aggregate(&buf, mode)
        })
        .collect();
    ScoreVector::new(entities, values)
}
