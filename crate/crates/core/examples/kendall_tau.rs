//! Rank correlation between two leaderboards, with ties.
//!
//!     cargo run --example kendall_tau

use tilerank::rank::{entities, kendall_tau, rank_from_scores, tau_to_probability, ScoreVector};

fn main() -> tilerank::error::Result<()> {
    let methods = entities(["sobs", "vibe", "gmm", "knn", "pbas"]);
    let winter = ScoreVector::from_defined(methods.clone(), vec![0.81, 0.77, 0.77, 0.64, 0.59])?;
    let summer = ScoreVector::from_defined(methods.clone(), vec![0.70, 0.74, 0.69, 0.69, 0.52])?;
    let rw = rank_from_scores(&winter, 0.0)?;
    let rs = rank_from_scores(&summer, 0.0)?;
    println!("method  winter summer");
    for (k, m) in methods.iter().enumerate() {
        println!("{m:<7} {:>6} {:>6}", rw.ranks()[k], rs.ranks()[k]);
    }
    let tau = kendall_tau(&rw, &rs)?;
    println!("\ntau-b = {tau:.4}");
    println!("chance a random pair keeps its order: {:.1}%", 100.0 * tau_to_probability(tau)?);
    Ok(())
}
