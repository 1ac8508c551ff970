//! Direct loop-based reference computations read straight from the dataset
//! JSON, sharing no code with the library beyond file parsing.

use std::collections::BTreeMap;

use serde_json::Value;

pub struct Raw {
    pub entities: Vec<String>,
    pub ids: Vec<String>,
    pub categories: Vec<String>,
    /// `[domain][entity]`
    pub perfs: Vec<Vec<[f64; 4]>>,
}

pub fn parse(text: &str) -> Raw {
    let v: Value = serde_json::from_str(text).unwrap();
    let entities: Vec<String> = v["entities"].as_array().unwrap().iter().map(|e| e.as_str().unwrap().to_string()).collect();
    let mut raw = Raw { entities: entities.clone(), ids: vec![], categories: vec![], perfs: vec![] };
    for d in v["domains"].as_array().unwrap() {
        raw.ids.push(d["id"].as_str().unwrap().to_string());
        raw.categories.push(d["category"].as_str().unwrap().to_string());
        raw.perfs.push(
            entities
                .iter()
                .map(|e| {
                    let p = d["performances"][e].as_array().unwrap();
                    [0, 1, 2, 3].map(|k| p[k].as_f64().unwrap())
                })
                .collect(),
        );
    }
    raw
}

pub fn lattice(res: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for j in 0..res {
        for i in 0..res {
            out.push((i as f64 / (res - 1) as f64, j as f64 / (res - 1) as f64));
        }
    }
    out
}

pub fn score(p: [f64; 4], a: f64, b: f64) -> f64 {
    let num = (1.0 - a) * p[0] + a * p[3];
    num / (num + (1.0 - b) * p[1] + b * p[2])
}

/// Competition ranks, larger value first, exact ties.
pub fn ranks(values: &[f64]) -> Vec<u32> {
    values
        .iter()
        .map(|v| 1 + values.iter().filter(|w| *w > v).count() as u32)
        .collect()
}

pub fn ranks_with_tol(values: &[f64], tol: f64) -> Vec<u32> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&x, &y| values[y].total_cmp(&values[x]));
    let mut out = vec![0; values.len()];
    let mut rank = 1;
    for (pos, &k) in idx.iter().enumerate() {
        if pos > 0 && values[idx[pos - 1]] - values[k] > tol {
            rank = pos as u32 + 1;
        }
        out[k] = rank;
    }
    out
}

/// Kendall τ-b by counting pairs.
pub fn tau(x: &[u32], y: &[u32]) -> f64 {
    let (mut con, mut dis, mut tx, mut ty) = (0i64, 0i64, 0i64, 0i64);
    let n = x.len();
    for i in 0..n {
        for j in i + 1..n {
            let dx = (x[i] as i64 - x[j] as i64).signum();
            let dy = (y[i] as i64 - y[j] as i64).signum();
            match (dx, dy) {
                (0, 0) => {}
                (0, _) => tx += 1,
                (_, 0) => ty += 1,
                _ if dx == dy => con += 1,
                _ => dis += 1,
            }
        }
    }
    let denom = (((con + dis + tx) * (con + dis + ty)) as f64).sqrt();
    if denom == 0.0 {
        0.0
    } else {
        (con - dis) as f64 / denom
    }
}

/// Category-balanced weights with domain `test` removed.
pub fn weights(raw: &Raw, test: usize) -> Vec<f64> {
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (k, c) in raw.categories.iter().enumerate() {
        if k != test {
            groups.entry(c).or_default().push(k);
        }
    }
    let mut w = vec![0.0; raw.ids.len()];
    for members in groups.values() {
        for &k in members {
            w[k] = 1.0 / (groups.len() * members.len()) as f64;
        }
    }
    w
}

pub fn truth(raw: &Raw, d: usize, a: f64, b: f64) -> Vec<u32> {
    ranks(&raw.perfs[d].iter().map(|p| score(*p, a, b)).collect::<Vec<_>>())
}

fn weighted(raw: &Raw, test: usize, per_domain: impl Fn(usize) -> Vec<f64>) -> Vec<f64> {
    let w = weights(raw, test);
    let total: f64 = w.iter().sum();
    let rows: Vec<Vec<f64>> = (0..raw.ids.len()).map(|d| if w[d] > 0.0 { per_domain(d) } else { vec![] }).collect();
    (0..raw.entities.len())
        .map(|e| (0..raw.ids.len()).filter(|&d| w[d] > 0.0).map(|d| rows[d][e] * w[d]).sum::<f64>() / total)
        .collect()
}

pub fn mean_value_ranking(raw: &Raw, test: usize, a: f64, b: f64) -> Vec<u32> {
    ranks(&weighted(raw, test, |d| raw.perfs[d].iter().map(|p| score(*p, a, b)).collect()))
}

pub fn mean_rank_ranking(raw: &Raw, test: usize, a: f64, b: f64) -> Vec<u32> {
    let avg = weighted(raw, test, |d| truth(raw, d, a, b).iter().map(|&r| r as f64).collect());
    ranks_with_tol(&avg.iter().map(|r| -r).collect::<Vec<_>>(), 1e-9)
}

/// `(mean, min)` of τ over every unordered domain pair, per lattice cell.
pub fn baseline(raw: &Raw, res: usize) -> (Vec<f64>, Vec<f64>) {
    let mut mean = Vec::new();
    let mut min = Vec::new();
    for (a, b) in lattice(res) {
        let mut taus = Vec::new();
        for i in 0..raw.ids.len() {
            for j in 0..raw.ids.len() {
                if i < j {
                    taus.push(tau(&truth(raw, i, a, b), &truth(raw, j, a, b)));
                }
            }
        }
        mean.push(taus.iter().sum::<f64>() / taus.len() as f64);
        min.push(taus.iter().cloned().fold(f64::INFINITY, f64::min));
    }
    (mean, min)
}

/// Reads the `value` column of a tile CSV (`error` becomes NaN).
pub fn csv_values(text: &str) -> Vec<f64> {
    text.lines()
        .skip(1)
        .map(|l| {
            let v = l.rsplit(',').next().unwrap();
            if v == "error" { f64::NAN } else { v.parse().unwrap() }
        })
        .collect()
}
