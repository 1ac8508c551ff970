mod common;

use common::*;
use serde_json::json;
use tilerank::harness::ground_truth_ranking;
use tilerank::render::{export_rank_layers, rank_layers, LayerSource};
use tilerank::tile::{load_csv, RealTile};

#[test]
fn one_entity_is_always_first() {
    let mut other = domain("e", "k", &[("solo", acc(0.3))]);
    other["id"] = json!("e");
    let ds = dataset(json!({"entities": ["solo"], "domains": [domain("d", "k", &[("solo", acc(0.7))]), other]}));
    let layers = rank_layers(&ds, "d", LayerSource::GroundTruth, 7, 0.0).unwrap();
    assert_eq!(layers.len(), 1);
    assert!(layers[0].1.cells().iter().all(|r| *r == Some(1)));
}

#[test]
fn dominating_entity_gives_constant_layers() {
    let ds = dataset(json!({
        "entities": ["top", "low"],
        "domains": [domain("d", "k", &[("top", [0.45, 0.05, 0.05, 0.45]), ("low", [0.3, 0.2, 0.2, 0.3])])]
    }));
    let layers = rank_layers(&ds, "d", LayerSource::GroundTruth, 9, 0.0).unwrap();
    assert!(layers[0].1.cells().iter().all(|r| *r == Some(1)));
    assert!(layers[1].1.cells().iter().all(|r| *r == Some(2)));
}

#[test]
fn seed7_layers_agree_with_ground_truth() {
    let ds = fixture("seed7.json");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("layers");
    let files = export_rank_layers(&ds, "d1", LayerSource::GroundTruth, 11, 0.0, &out).unwrap();
    assert_eq!(files.len(), 4);
    let layers: Vec<tilerank::tile::TileGrid<Option<u32>>> = files.iter().map(|f| load_csv(f).unwrap()).collect();
    for (i, j) in [(0, 0), (10, 10), (5, 5), (10, 3), (2, 8)] {
        let coord = layers[0].coord(i, j);
        let truth = ground_truth_ranking(&ds, "d1", coord, 0.0).unwrap();
        for (e, layer) in layers.iter().enumerate() {
            assert_eq!(layer.get(i, j).unwrap(), truth.ranks()[e]);
        }
    }
    // every cell holds a valid competition ranking
    for k in 0..layers[0].len() {
        let ranks: Vec<u32> = layers.iter().map(|l| l.cells()[k].unwrap()).collect();
        assert!(tilerank::rank::Ranking::new(ds.entities().clone(), ranks).is_ok());
    }
    // a real-valued reader rejects nothing here, ranks are plain integers
    let as_real: RealTile = load_csv(&files[0]).unwrap();
    assert_eq!(as_real.len(), 121);
    assert!(export_rank_layers(&ds, "d1", LayerSource::GroundTruth, 11, 0.0, &out).is_err());
}

#[test]
fn strategy_layers_follow_the_prediction() {
    let ds = fixture("seed7.json");
    let s = spec("mean-R");
    let layers = rank_layers(&ds, "d0", LayerSource::Strategy(&s), 5, 0.0).unwrap();
    let ctx = tilerank::strategy::StrategyContext::leave_one_out(&ds, "d0").unwrap();
    use tilerank::strategy::Strategy;
    let p = s.bind(&ctx).unwrap();
    for k in 0..layers[0].1.len() {
        let coord = layers[0].1.coord_at(k);
        let r = p.predict_ranking(coord).unwrap();
        for (e, (_, layer)) in layers.iter().enumerate() {
            assert_eq!(layer.cells()[k], Some(r.ranks()[e]));
        }
    }
    assert!(rank_layers(&ds, "zz", LayerSource::GroundTruth, 5, 0.0).is_err());
}
