//! Strategies that predict the ranking of entities on a domain from the
//! other domains.
//!
//! A [`Strategy`] is bound to a [`StrategyContext`] (the reference domains
//! plus what is known about the test domain) and yields a [`Predictor`] that
//! answers queries at any Tile coordinate. The context never holds the test
//! domain's performances.
//!
//! Built-in strategies are described by a [`StrategySpec`], parsed from the
//! following grammar:
//!
//! ```text
//! list     := spec ("," spec)*
//! spec     := name ["*"] ["@" a "," b] ["(" list ")"]
//! name     := fixed | CDnet | mean-P | sem-P | sem-d
//!           | mean-V | med-V | mean-R | med-R | avg | all
//! ```
//!
//! * `*` restricts the reference domains to the test domain's category
//!   (for `fixed`, it selects the category ranking instead of the global one).
//! * `@a,b` freezes the Tile point whose rankings are averaged (`mean-R` and
//!   `med-R` only).
//! * `avg(...)` / `all(...)` combine sub-strategies by converting their values
//!   into performances and mixing those. Bare `avg` stands for
//!   `avg(fixed,mean-P,sem-P,sem-d)`, bare `avg*` for
//!   `avg(fixed*,mean-P*,sem-P*,sem-d*)` and bare `all` for `all(avg,avg*)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::dataset::{bhattacharyya_distance, cdnet_weights, domain_scores, Dataset, DomainRecord, SemanticDistribution};
use crate::error::{Error, Result};
use crate::perf::{canonical_importance, mix_performances, ranking_score, value_to_performance, Performance, TileCoord};
use crate::rank::{
    aggregate_rank_values, aggregate_ranks, aggregate_values, rank_from_scores, Aggregation, Entities, Ranking,
    ScoreVector,
};

/// What a strategy may see when predicting the ranking of one test domain.
#[derive(Debug, Clone)]
pub struct StrategyContext<'a> {
    entities: Entities,
    references: Vec<&'a DomainRecord>,
    weights: Vec<f64>,
    test_id: String,
    test_category: String,
    test_semantic: &'a SemanticDistribution,
    global_ranking: Option<&'a Ranking>,
    category_rankings: &'a BTreeMap<String, Ranking>,
    tie_tol: f64,
}

impl<'a> StrategyContext<'a> {
    /// Context predicting `test_id` from every other domain, weighted with
    /// [`cdnet_weights`].
    pub fn leave_one_out(dataset: &'a Dataset, test_id: &str) -> Result<Self> {
        let test = dataset.domain(test_id)?;
        let weights = cdnet_weights(dataset, Some(test_id), None)?;
        let (references, weights): (Vec<_>, Vec<_>) = dataset
            .domains()
            .iter()
            .zip(weights.values())
            .filter(|(d, _)| d.id != test_id)
            .unzip();
        Ok(StrategyContext {
            entities: dataset.entities().clone(),
            references,
            weights,
            test_id: test.id.clone(),
            test_category: test.category.clone(),
            test_semantic: &test.semantic,
            global_ranking: dataset.global_ranking(),
            category_rankings: dataset.category_rankings(),
            tie_tol: 0.0,
        })
    }

    /// Tolerance used to rank predicted and reference scores.
    pub fn with_tie_tol(mut self, tie_tol: f64) -> Self {
        self.tie_tol = tie_tol;
        self
    }

    /// The same context restricted to references sharing the test domain's
    /// category, weighted uniformly.
    pub fn category_specific(&self) -> Result<Self> {
        let references: Vec<&DomainRecord> = self
            .references
            .iter()
            .copied()
            .filter(|d| d.category == self.test_category)
            .collect();
        if references.is_empty() {
            return Err(Error::EmptyCategory(self.test_category.clone()));
        }
        let w = 1.0 / references.len() as f64;
        Ok(StrategyContext {
            weights: vec![w; references.len()],
            references,
            ..self.clone()
        })
    }

    pub fn entities(&self) -> &Entities {
        &self.entities
    }

    pub fn references(&self) -> &[&'a DomainRecord] {
        &self.references
    }

    pub fn reference_ids(&self) -> impl Iterator<Item = &str> + '_ {
        self.references.iter().map(|d| d.id.as_str())
    }

    /// Weights aligned with [`references`](Self::references), summing to 1.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn test_id(&self) -> &str {
        &self.test_id
    }

    pub fn test_category(&self) -> &str {
        &self.test_category
    }

    pub fn test_semantic(&self) -> &SemanticDistribution {
        self.test_semantic
    }

    pub fn global_ranking(&self) -> Option<&Ranking> {
        self.global_ranking
    }

    pub fn category_ranking(&self, category: &str) -> Option<&Ranking> {
        self.category_rankings.get(category)
    }

    pub fn tie_tol(&self) -> f64 {
        self.tie_tol
    }

    fn weighted_references(&self) -> impl Iterator<Item = (&'a DomainRecord, f64)> + '_ {
        self.references.iter().copied().zip(self.weights.iter().copied())
    }

    /// Scores of every entity of reference `domain` at `coord`.
    pub fn reference_scores(&self, domain: &DomainRecord, coord: TileCoord) -> ScoreVector {
        domain_scores(&self.entities, domain, &canonical_importance(coord))
    }

    pub fn reference_ranking(&self, domain: &DomainRecord, coord: TileCoord) -> Result<Ranking> {
        rank_from_scores(&self.reference_scores(domain, coord), self.tie_tol)
    }
}

/// Answers ranking queries for one bound test domain.
pub trait Predictor: Send + Sync {
    /// Per-entity values at `coord`, higher is better.
    fn predict_values(&self, coord: TileCoord) -> Result<ScoreVector>;

    fn predict_ranking(&self, coord: TileCoord) -> Result<Ranking> {
        rank_from_scores(&self.predict_values(coord)?, self.tie_tol())
    }

    /// Tolerance used by the default [`predict_ranking`](Self::predict_ranking).
    fn tie_tol(&self) -> f64 {
        0.0
    }
}

/// A ranking-prediction strategy.
pub trait Strategy: Send + Sync {
    fn id(&self) -> String;

    /// `false` when the strategy draws on information from the test domain
    /// itself (e.g. a leaderboard built from every domain).
    fn is_leave_one_out(&self) -> bool {
        true
    }

    fn bind<'a>(&'a self, ctx: &StrategyContext<'a>) -> Result<Box<dyn Predictor + 'a>>;
}

/// Built-in strategy families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    /// An externally supplied ranking, independent of the Tile point.
    Fixed,
    /// Scores of the mixture of reference performances.
    MeanPerf,
    /// Performance rebuilt from per-label conditionals and the test semantics.
    SemPerf,
    /// Ranking of the semantically nearest reference domain.
    SemDist,
    MeanValue,
    MedValue,
    MeanRank,
    MedRank,
    /// Mixture of sub-strategies' values mapped to performances.
    Combine,
}

impl StrategyKind {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "fixed" | "CDnet" => StrategyKind::Fixed,
            "mean-P" => StrategyKind::MeanPerf,
            "sem-P" => StrategyKind::SemPerf,
            "sem-d" => StrategyKind::SemDist,
            "mean-V" => StrategyKind::MeanValue,
            "med-V" => StrategyKind::MedValue,
            "mean-R" => StrategyKind::MeanRank,
            "med-R" => StrategyKind::MedRank,
            "avg" | "all" => StrategyKind::Combine,
            _ => return None,
        })
    }
}

/// Declarative description of a built-in strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategySpec {
    pub id: String,
    pub kind: StrategyKind,
    pub category_specific: bool,
    pub subs: Vec<StrategySpec>,
    pub rank_coord_override: Option<TileCoord>,
}

impl StrategySpec {
    /// Parses a comma-separated list of strategy specifications.
    pub fn parse_list(text: &str) -> Result<Vec<StrategySpec>> {
        let mut parser = SpecParser { text, pos: 0 };
        let list = parser.list()?;
        parser.skip_ws();
        if parser.pos != text.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        Ok(list)
    }

    /// Directory-safe version of the id.
    pub fn file_stem(&self) -> String {
        file_stem(&self.id)
    }

    fn leaf(kind: StrategyKind, name: &str, category_specific: bool) -> StrategySpec {
        StrategySpec {
            id: format!("{name}{}", if category_specific { "*" } else { "" }),
            kind,
            category_specific,
            subs: Vec::new(),
            rank_coord_override: None,
        }
    }

    fn default_avg(starred: bool) -> StrategySpec {
        let subs = [
            (StrategyKind::Fixed, "fixed"),
            (StrategyKind::MeanPerf, "mean-P"),
            (StrategyKind::SemPerf, "sem-P"),
            (StrategyKind::SemDist, "sem-d"),
        ]
        .into_iter()
        .map(|(k, n)| StrategySpec::leaf(k, n, starred))
        .collect();
        StrategySpec {
            id: if starred { "avg*".into() } else { "avg".into() },
            kind: StrategyKind::Combine,
            category_specific: false,
            subs,
            rank_coord_override: None,
        }
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id)
    }
}

impl FromStr for StrategySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut list = StrategySpec::parse_list(s)?;
        if list.len() != 1 {
            return Err(Error::StrategySpec {
                spec: s.to_owned(),
                reason: "expected a single strategy".into(),
            });
        }
        Ok(list.remove(0))
    }
}

/// Maps an arbitrary id to a portable file or directory name.
pub fn file_stem(id: &str) -> String {
    let mut out = String::with_capacity(id.len());
    for c in id.chars() {
        match c {
            c if c.is_ascii_alphanumeric() || c == '-' || c == '.' || c == '_' => out.push(c),
            '*' => out.push_str("_star"),
            '@' => out.push_str("_at_"),
            ',' | '(' => out.push('_'),
            ')' => {}
            _ => out.push('_'),
        }
    }
    out
}

struct SpecParser<'t> {
    text: &'t str,
    pos: usize,
}

impl<'t> SpecParser<'t> {
    fn error(&self, reason: &str) -> Error {
        Error::StrategySpec {
            spec: self.text.to_owned(),
            reason: format!("{reason} at offset {}", self.pos),
        }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn list(&mut self) -> Result<Vec<StrategySpec>> {
        let mut out = vec![self.spec()?];
        while self.eat(',') {
            out.push(self.spec()?);
        }
        Ok(out)
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'t str {
        let start = self.pos;
        while self.peek().is_some_and(&pred) {
            self.pos += 1;
        }
        &self.text[start..self.pos]
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let raw = self.take_while(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'));
        raw.parse().map_err(|_| self.error(&format!("bad number `{raw}`")))
    }

    fn spec(&mut self) -> Result<StrategySpec> {
        self.skip_ws();
        let start = self.pos;
        let name = self.take_while(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
        if name.is_empty() {
            return Err(self.error("expected a strategy name"));
        }
        let kind = StrategyKind::from_name(name).ok_or_else(|| self.error(&format!("unknown strategy `{name}`")))?;
        let starred = self.eat('*');
        let rank_coord_override = if self.eat('@') {
            if !matches!(kind, StrategyKind::MeanRank | StrategyKind::MedRank) {
                return Err(self.error("`@a,b` applies to mean-R and med-R only"));
            }
            let a = self.number()?;
            if !self.eat(',') {
                return Err(self.error("expected `,` in coordinate override"));
            }
            let b = self.number()?;
            Some(TileCoord::new(a, b).map_err(|e| self.error(&e.to_string()))?)
        } else {
            None
        };
        let subs = if self.eat('(') {
            if kind != StrategyKind::Combine {
                return Err(self.error(&format!("`{name}` takes no sub-strategies")));
            }
            let subs = self.list()?;
            if !self.eat(')') {
                return Err(self.error("expected `)`"));
            }
            Some(subs)
        } else {
            None
        };
        let id: String = self.text[start..self.pos].chars().filter(|c| !c.is_whitespace()).collect();
        if kind != StrategyKind::Combine {
            return Ok(StrategySpec {
                id,
                kind,
                category_specific: starred,
                subs: Vec::new(),
                rank_coord_override,
            });
        }
        let spec = match (name, subs) {
            (_, Some(subs)) => {
                if subs.len() < 2 {
                    return Err(self.error("a combination needs at least 2 sub-strategies"));
                }
                StrategySpec {
                    id,
                    kind,
                    category_specific: starred,
                    subs,
                    rank_coord_override: None,
                }
            }
            ("avg", None) => StrategySpec::default_avg(starred),
            (_, None) => {
                if starred {
                    return Err(self.error("bare `all` has no category-specific variant"));
                }
                StrategySpec {
                    id,
                    kind,
                    category_specific: false,
                    subs: vec![StrategySpec::default_avg(false), StrategySpec::default_avg(true)],
                    rank_coord_override: None,
                }
            }
        };
        Ok(spec)
    }
}

fn unavailable(spec: &StrategySpec, reason: impl Into<String>) -> Error {
    Error::StrategyUnavailable {
        strategy: spec.id.clone(),
        reason: reason.into(),
    }
}

impl Strategy for StrategySpec {
    fn id(&self) -> String {
        self.id.clone()
    }

    fn is_leave_one_out(&self) -> bool {
        match self.kind {
            StrategyKind::Fixed => false,
            StrategyKind::Combine => self.subs.iter().all(|s| s.is_leave_one_out()),
            _ => true,
        }
    }

    fn bind<'a>(&'a self, ctx: &StrategyContext<'a>) -> Result<Box<dyn Predictor + 'a>> {
        if self.kind == StrategyKind::Fixed {
            let ranking = if self.category_specific {
                ctx.category_ranking(ctx.test_category()).ok_or_else(|| {
                    unavailable(self, format!("no ranking supplied for category `{}`", ctx.test_category()))
                })?
            } else {
                ctx.global_ranking().ok_or(Error::MissingGlobalRanking)?
            };
            return Ok(Box::new(FixedPredictor {
                values: ranking.to_scores(),
                tie_tol: ctx.tie_tol(),
            }));
        }
        let restricted;
        let ctx = if self.category_specific {
            restricted = ctx.category_specific().map_err(|e| unavailable(self, e.to_string()))?;
            &restricted
        } else {
            ctx
        };
        if ctx.references().is_empty() {
            return Err(unavailable(self, "no reference domain"));
        }
        let aggregation = |kind| match kind {
            StrategyKind::MeanValue | StrategyKind::MeanRank => Aggregation::Mean,
            _ => Aggregation::Median,
        };
        Ok(match self.kind {
            StrategyKind::Fixed => unreachable!("handled above"),
            StrategyKind::MeanPerf => Box::new(PerformancePredictor::mean(ctx)?),
            StrategyKind::SemPerf => Box::new(PerformancePredictor::semantic(self, ctx)?),
            StrategyKind::SemDist => Box::new(NearestDomainPredictor::new(ctx.clone())),
            StrategyKind::MeanValue | StrategyKind::MedValue => Box::new(ValuePredictor {
                ctx: ctx.clone(),
                mode: aggregation(self.kind),
            }),
            StrategyKind::MeanRank | StrategyKind::MedRank => {
                Box::new(RankPredictor::new(ctx.clone(), aggregation(self.kind), self.rank_coord_override)?)
            }
            StrategyKind::Combine => {
                let subs = self
                    .subs
                    .iter()
                    .map(|s| s.bind(ctx))
                    .collect::<Result<Vec<_>>>()?;
                Box::new(CombinePredictor {
                    entities: ctx.entities().clone(),
                    subs,
                    tie_tol: ctx.tie_tol(),
                })
            }
        })
    }
}

struct FixedPredictor {
    values: ScoreVector,
    tie_tol: f64,
}

impl Predictor for FixedPredictor {
    fn predict_values(&self, _coord: TileCoord) -> Result<ScoreVector> {
        Ok(self.values.clone())
    }

    fn tie_tol(&self) -> f64 {
        self.tie_tol
    }
}

/// Scores one predicted performance per entity.
struct PerformancePredictor {
    entities: Entities,
    predicted: Vec<Performance>,
    tie_tol: f64,
}

fn mean_performances(ctx: &StrategyContext<'_>) -> Result<Vec<Performance>> {
    (0..ctx.entities().len())
        .map(|e| mix_performances(ctx.weighted_references().map(|(d, w)| (&d.performances[e], w))))
        .collect()
}

impl PerformancePredictor {
    fn mean(ctx: &StrategyContext<'_>) -> Result<Self> {
        Ok(PerformancePredictor {
            entities: ctx.entities().clone(),
            predicted: mean_performances(ctx)?,
            tie_tol: ctx.tie_tol(),
        })
    }

    /// Pools each label's conditional across references, weighted by
    /// domain weight times the label's mass in that domain, then mixes the
    /// pooled conditionals with the test domain's label distribution. Labels
    /// no reference covers fall back to the mean performance.
    fn semantic(spec: &StrategySpec, ctx: &StrategyContext<'_>) -> Result<Self> {
        let mut conditionals = Vec::with_capacity(ctx.references().len());
        for d in ctx.references() {
            let c = d
                .conditionals
                .as_ref()
                .ok_or_else(|| unavailable(spec, format!("domain `{}` carries no conditionals", d.id)))?;
            conditionals.push(c);
        }
        let fallback = mean_performances(ctx)?;
        let predicted = (0..ctx.entities().len())
            .map(|e| {
                let mut parts = Vec::new();
                for (label, mass) in ctx.test_semantic().iter().filter(|(_, m)| *m > 0.0) {
                    let evidence = ctx
                        .weighted_references()
                        .zip(&conditionals)
                        .filter_map(|((d, w), conds)| conds[e].get(label).map(|c| (c, w * d.semantic.get(label))));
                    let pooled = match mix_performances(evidence) {
                        Ok(p) => p,
                        Err(Error::AllZeroWeights) => fallback[e],
                        Err(err) => return Err(err),
                    };
                    parts.push((pooled, mass));
                }
                mix_performances(parts.iter().map(|(p, m)| (p, *m)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PerformancePredictor {
            entities: ctx.entities().clone(),
            predicted,
            tie_tol: ctx.tie_tol(),
        })
    }
}

impl Predictor for PerformancePredictor {
    fn predict_values(&self, coord: TileCoord) -> Result<ScoreVector> {
        let importance = canonical_importance(coord);
        let values = self
            .predicted
            .iter()
            .map(|p| ranking_score(p, &importance).ok())
            .collect();
        ScoreVector::new(self.entities.clone(), values)
    }

    fn tie_tol(&self) -> f64 {
        self.tie_tol
    }
}

struct NearestDomainPredictor<'a> {
    ctx: StrategyContext<'a>,
    nearest: &'a DomainRecord,
}

impl<'a> NearestDomainPredictor<'a> {
    fn new(ctx: StrategyContext<'a>) -> Self {
        let nearest = ctx
            .references()
            .iter()
            .copied()
            .map(|d| (bhattacharyya_distance(ctx.test_semantic(), &d.semantic), d))
            .min_by(|(x, dx), (y, dy)| x.total_cmp(y).then_with(|| dx.id.cmp(&dy.id)))
            .map(|(_, d)| d)
            .expect("references checked non-empty");
        NearestDomainPredictor { ctx, nearest }
    }
}

impl Predictor for NearestDomainPredictor<'_> {
    fn predict_values(&self, coord: TileCoord) -> Result<ScoreVector> {
        Ok(self.ctx.reference_scores(self.nearest, coord))
    }

    fn tie_tol(&self) -> f64 {
        self.ctx.tie_tol()
    }
}

struct ValuePredictor<'a> {
    ctx: StrategyContext<'a>,
    mode: Aggregation,
}

impl Predictor for ValuePredictor<'_> {
    fn predict_values(&self, coord: TileCoord) -> Result<ScoreVector> {
        let vectors: Vec<(ScoreVector, f64)> = self
            .ctx
            .weighted_references()
            .map(|(d, w)| (self.ctx.reference_scores(d, coord), w))
            .collect();
        aggregate_values(&vectors, self.mode)
    }

    fn tie_tol(&self) -> f64 {
        self.ctx.tie_tol()
    }
}

struct RankPredictor<'a> {
    ctx: StrategyContext<'a>,
    mode: Aggregation,
    frozen: Option<(ScoreVector, Ranking)>,
}

impl<'a> RankPredictor<'a> {
    fn new(ctx: StrategyContext<'a>, mode: Aggregation, at: Option<TileCoord>) -> Result<Self> {
        let mut predictor = RankPredictor { ctx, mode, frozen: None };
        if let Some(coord) = at {
            let rankings = predictor.reference_rankings(coord)?;
            predictor.frozen = Some((aggregate_rank_values(&rankings, mode)?, aggregate_ranks(&rankings, mode)?));
        }
        Ok(predictor)
    }

    fn reference_rankings(&self, coord: TileCoord) -> Result<Vec<(Ranking, f64)>> {
        self.ctx
            .weighted_references()
            .map(|(d, w)| Ok((self.ctx.reference_ranking(d, coord)?, w)))
            .collect()
    }
}

impl Predictor for RankPredictor<'_> {
    fn predict_values(&self, coord: TileCoord) -> Result<ScoreVector> {
        match &self.frozen {
            Some((values, _)) => Ok(values.clone()),
            None => aggregate_rank_values(&self.reference_rankings(coord)?, self.mode),
        }
    }

    fn predict_ranking(&self, coord: TileCoord) -> Result<Ranking> {
        match &self.frozen {
            Some((_, ranking)) => Ok(ranking.clone()),
            None => aggregate_ranks(&self.reference_rankings(coord)?, self.mode),
        }
    }
}

struct CombinePredictor<'a> {
    entities: Entities,
    subs: Vec<Box<dyn Predictor + 'a>>,
    tie_tol: f64,
}

impl Predictor for CombinePredictor<'_> {
    /// Maps each sub-strategy's values onto performances over that
    /// sub-strategy's own `[min, max]`, mixes them uniformly per entity and
    /// scores the mixture at `coord`.
    fn predict_values(&self, coord: TileCoord) -> Result<ScoreVector> {
        let neutral = Performance::new(0.25, 0.25, 0.25, 0.25)?;
        let mut converted: Vec<Vec<Option<Performance>>> = Vec::with_capacity(self.subs.len());
        for sub in &self.subs {
            let values = sub.predict_values(coord)?;
            let defined = values.values().iter().flatten();
            let lower = defined.clone().copied().fold(f64::INFINITY, f64::min);
            let upper = defined.copied().fold(f64::NEG_INFINITY, f64::max);
            let perfs = values
                .values()
                .iter()
                .map(|v| {
                    v.map(|v| {
                        if lower < upper {
                            value_to_performance(v, lower, upper)
                        } else {
                            Ok(neutral)
                        }
                    })
                    .transpose()
                })
                .collect::<Result<Vec<_>>>()?;
            converted.push(perfs);
        }
        let importance = canonical_importance(coord);
        let values = (0..self.entities.len())
            .map(|e| {
                let parts = converted.iter().filter_map(|c| c[e].as_ref().map(|p| (p, 1.0)));
                match mix_performances(parts) {
                    Ok(mixed) => Ok(ranking_score(&mixed, &importance).ok()),
                    Err(Error::AllZeroWeights) => Ok(None),
                    Err(err) => Err(err),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        ScoreVector::new(self.entities.clone(), values)
    }

    fn tie_tol(&self) -> f64 {
        self.tie_tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{synth_dataset, SynthParams};

    fn spec(s: &str) -> StrategySpec {
        s.parse().unwrap()
    }

    #[test]
    fn parses_the_grammar() {
        let list = StrategySpec::parse_list("fixed, mean-P*,sem-d,med-R*@0.5,0.3,avg(fixed,mean-V),all").unwrap();
        let ids: Vec<&str> = list.iter().map(|s| s.id.as_str()).collect();
        assert_eq!(ids, ["fixed", "mean-P*", "sem-d", "med-R*@0.5,0.3", "avg(fixed,mean-V)", "all"]);
        assert!(list[1].category_specific);
        assert_eq!(list[3].rank_coord_override, Some(TileCoord { a: 0.5, b: 0.3 }));
        assert_eq!(list[4].subs.len(), 2);
        assert_eq!(list[5].subs[1].id, "avg*");
        assert!(list[5].subs[1].subs.iter().all(|s| s.category_specific));
        assert_eq!(spec("CDnet").kind, StrategyKind::Fixed);
        assert_eq!(spec("avg").subs.len(), 4);
    }

    #[test]
    fn rejects_bad_specs() {
        for bad in ["", "mean-Q", "mean-P@0.5,0.5", "mean-R@0.5", "mean-R@2,0", "avg(fixed)", "mean-V(fixed,sem-d)", "fixed,", "all*", "avg(fixed,sem-d"] {
            assert!(StrategySpec::parse_list(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn file_stems_are_portable() {
        assert_eq!(file_stem("mean-R*@0.5,0.3"), "mean-R_star_at_0.5_0.3");
        assert_eq!(file_stem("avg(fixed,mean-P)"), "avg_fixed_mean-P");
        assert_eq!(file_stem("avg*"), "avg_star");
    }

    #[test]
    fn leave_one_out_context_excludes_test_domain() {
        let ds = synth_dataset(SynthParams { domains: 4, seed: 1, ..SynthParams::default() }).unwrap();
        for d in ds.domains() {
            let ctx = StrategyContext::leave_one_out(&ds, &d.id).unwrap();
            assert!(ctx.reference_ids().all(|r| r != d.id));
            assert_eq!(ctx.references().len(), 3);
            assert!((ctx.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let star = ctx.category_specific().unwrap();
            assert!(star.references().iter().all(|r| r.category == d.category && r.id != d.id));
        }
    }

    #[test]
    fn fixed_ignores_the_tile_point() {
        let ds = synth_dataset(SynthParams { seed: 2, ..SynthParams::default() }).unwrap();
        let ctx = StrategyContext::leave_one_out(&ds, "d0").unwrap();
        let fixed = spec("fixed");
        let p = fixed.bind(&ctx).unwrap();
        let a = p.predict_values(TileCoord { a: 0.5, b: 0.5 }).unwrap();
        let b = p.predict_values(TileCoord { a: 1.0, b: 0.0 }).unwrap();
        assert_eq!(a, b);
        assert_eq!(p.predict_ranking(TileCoord { a: 0.2, b: 0.9 }).unwrap(), *ds.global_ranking().unwrap());
        assert!(!fixed.is_leave_one_out());
        assert!(!spec("avg").is_leave_one_out());
        assert!(spec("mean-V").is_leave_one_out());
    }

    #[test]
    fn override_freezes_rank_predictions() {
        let ds = synth_dataset(SynthParams { seed: 4, ..SynthParams::default() }).unwrap();
        let ctx = StrategyContext::leave_one_out(&ds, "d1").unwrap();
        let s = spec("mean-R*@0.5,0.3");
        let p = s.bind(&ctx).unwrap();
        let first = p.predict_ranking(TileCoord { a: 0.0, b: 0.0 }).unwrap();
        for (a, b) in [(1.0, 1.0), (0.5, 0.3), (0.2, 0.7)] {
            assert_eq!(p.predict_ranking(TileCoord { a, b }).unwrap(), first);
        }
        let unfrozen_spec = spec("mean-R*");
        let unfrozen = unfrozen_spec.bind(&ctx).unwrap();
        assert_eq!(unfrozen.predict_ranking(TileCoord { a: 0.5, b: 0.3 }).unwrap(), first);
    }
}
