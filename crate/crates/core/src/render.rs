//! Tile images and rank-layer export.

use std::fs;
use std::path::{Path, PathBuf};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::harness::fresh_directory;
use crate::perf::canonical_importance;
use crate::rank::{rank_from_scores, EntityId, Ranking};
use crate::strategy::{Strategy, StrategyContext};
use crate::tile::{make_grid, save_csv, RealTile, SelectionTile, TileGrid};

pub type Rgb = [u8; 3];

/// Color of error cells.
pub const ERROR_COLOR: Rgb = [128, 128, 128];

/// Piecewise-linear map from values to colors, clamped at both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Colormap {
    name: String,
    anchors: Vec<(f64, Rgb)>,
}

impl Colormap {
    pub fn new(name: impl Into<String>, anchors: Vec<(f64, Rgb)>) -> Result<Self> {
        if anchors.is_empty() {
            return Err(Error::InvalidParams("colormap needs at least one anchor".into()));
        }
        if anchors.iter().any(|(v, _)| !v.is_finite()) || anchors.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidParams("colormap anchors must be finite and strictly increasing".into()));
        }
        Ok(Colormap {
            name: name.into(),
            anchors,
        })
    }

    /// Default τ map: −1 red, 0 white, +1 green.
    pub fn tau() -> Self {
        Colormap {
            name: "tau".into(),
            anchors: vec![(-1.0, [255, 0, 0]), (0.0, [255, 255, 255]), (1.0, [0, 255, 0])],
        }
    }

    /// Black at −1 to white at +1.
    pub fn gray() -> Self {
        Colormap {
            name: "gray".into(),
            anchors: vec![(-1.0, [0, 0, 0]), (1.0, [255, 255, 255])],
        }
    }

    /// `tau`, `gray`, or an inline list `value:RRGGBB,value:RRGGBB,...`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "tau" => Ok(Colormap::tau()),
            "gray" | "grey" => Ok(Colormap::gray()),
            _ if name.contains(':') => {
                let anchors = name
                    .split(',')
                    .map(|part| {
                        let (v, hex) = part
                            .split_once(':')
                            .ok_or_else(|| Error::InvalidParams(format!("bad colormap anchor `{part}`")))?;
                        let v: f64 = v
                            .trim()
                            .parse()
                            .map_err(|_| Error::InvalidParams(format!("bad colormap value `{v}`")))?;
                        let bytes = hex::decode(hex.trim().trim_start_matches('#'))
                            .ok()
                            .filter(|b| b.len() == 3)
                            .ok_or_else(|| Error::InvalidParams(format!("bad colormap color `{hex}`")))?;
                        Ok((v, [bytes[0], bytes[1], bytes[2]]))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Colormap::new(name, anchors)
            }
            _ => Err(Error::InvalidParams(format!("unknown colormap `{name}`"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn anchors(&self) -> &[(f64, Rgb)] {
        &self.anchors
    }

    pub fn color(&self, value: f64) -> Rgb {
        let first = self.anchors[0];
        let last = self.anchors[self.anchors.len() - 1];
        if value.is_nan() {
            return ERROR_COLOR;
        }
        if value <= first.0 {
            return first.1;
        }
        if value >= last.0 {
            return last.1;
        }
        let k = self.anchors.iter().position(|(v, _)| *v > value).expect("inside range");
        let (v0, c0) = self.anchors[k - 1];
        let (v1, c1) = self.anchors[k];
        let t = (value - v0) / (v1 - v0);
        let mut out = [0u8; 3];
        for ch in 0..3 {
            let x = c0[ch] as f64 + t * (c1[ch] as f64 - c0[ch] as f64);
            out[ch] = x.round().clamp(0.0, 255.0) as u8;
        }
        out
    }
}

impl Default for Colormap {
    fn default() -> Self {
        Colormap::tau()
    }
}

/// RGB pixel buffer, rows top to bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<Rgb>,
}

impl Raster {
    pub fn pixel(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }

    /// Binary portable pixmap (P6).
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.reserve(self.pixels.len() * 3);
        for p in &self.pixels {
            out.extend_from_slice(p);
        }
        out
    }

    /// Writes PNG when the extension is `.png`, PPM otherwise.
    pub fn save(&self, path: &Path) -> Result<()> {
        let png = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if png {
            let raw: Vec<u8> = self.pixels.iter().flatten().copied().collect();
            image::save_buffer_with_format(
                path,
                &raw,
                self.width as u32,
                self.height as u32,
                image::ExtendedColorType::Rgb8,
                image::ImageFormat::Png,
            )
            .map_err(|e| Error::io(path, e))
        } else {
            fs::write(path, self.to_ppm()).map_err(|e| Error::io(path, e))
        }
    }
}

fn raster<T>(tile: &TileGrid<T>, scale: usize, color: impl Fn(&T) -> Rgb) -> Raster {
    let scale = scale.max(1);
    let res = tile.resolution();
    let side = res * scale;
    let mut pixels = Vec::with_capacity(side * side);
    for y in 0..side {
        let j = res - 1 - y / scale;
        for x in 0..side {
            pixels.push(color(tile.get(x / scale, j)));
        }
    }
    Raster {
        width: side,
        height: side,
        pixels,
    }
}

/// One `scale`×`scale` block per cell, with `a` growing rightwards and `b`
/// upwards (origin bottom-left).
pub fn render_tile(tile: &RealTile, cmap: &Colormap, scale: usize) -> Raster {
    raster(tile, scale, |v| v.map_or(ERROR_COLOR, |v| cmap.color(v)))
}

const PALETTE: [Rgb; 10] = [
    [31, 119, 180],
    [255, 127, 14],
    [44, 160, 44],
    [214, 39, 40],
    [148, 103, 189],
    [140, 86, 75],
    [227, 119, 194],
    [188, 189, 34],
    [23, 190, 207],
    [0, 0, 0],
];

/// Categorical rendering of a selection tile; colors follow the order of
/// `ids` and cycle after ten.
pub fn render_selection(tile: &SelectionTile, ids: &[String], scale: usize) -> Raster {
    raster(tile, scale, |v| {
        v.as_deref()
            .and_then(|id| ids.iter().position(|x| x == id))
            .map_or(ERROR_COLOR, |k| PALETTE[k % PALETTE.len()])
    })
}

/// Where a rank layer's rankings come from.
#[derive(Clone, Copy)]
pub enum LayerSource<'s> {
    GroundTruth,
    /// Prediction for the domain from the other domains.
    Strategy(&'s dyn Strategy),
}

pub type RankLayer = TileGrid<Option<u32>>;

/// Rank of every entity at every cell, one layer per entity in dataset
/// order. A cell whose ranking is unavailable is an error in every layer.
pub fn rank_layers(
    dataset: &Dataset,
    domain: &str,
    source: LayerSource<'_>,
    resolution: usize,
    tie_tol: f64,
) -> Result<Vec<(EntityId, RankLayer)>> {
    let coords = make_grid(resolution)?;
    let record = dataset.domain(domain)?;
    let rankings: Vec<Option<Ranking>> = match source {
        LayerSource::GroundTruth => coords
            .iter()
            .map(|&c| rank_from_scores(&dataset.domain_scores(record, &canonical_importance(c)), tie_tol).ok())
            .collect(),
        LayerSource::Strategy(s) => {
            let ctx = StrategyContext::leave_one_out(dataset, domain)?.with_tie_tol(tie_tol);
            let predictor = s.bind(&ctx)?;
            coords.iter().map(|&c| predictor.predict_ranking(c).ok()).collect()
        }
    };
    dataset
        .entities()
        .iter()
        .enumerate()
        .map(|(e, id)| {
            let cells = rankings.iter().map(|r| r.as_ref().map(|r| r.ranks()[e])).collect();
            Ok((id.clone(), TileGrid::from_cells(resolution, cells)?))
        })
        .collect()
}

fn layer_file_name(entity: &str) -> String {
    let stem: String = entity
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' })
        .collect();
    format!("{stem}.csv")
}

/// Writes `<entity>.csv` per entity into a fresh directory.
pub fn export_rank_layers(
    dataset: &Dataset,
    domain: &str,
    source: LayerSource<'_>,
    resolution: usize,
    tie_tol: f64,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    let layers = rank_layers(dataset, domain, source, resolution, tie_tol)?;
    let mut names: Vec<String> = layers.iter().map(|(e, _)| layer_file_name(e.as_str())).collect();
    names.sort();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidParams("entity names collide after file-name sanitizing".into()));
    }
    fresh_directory(out_dir)?;
    layers
        .iter()
        .map(|(e, layer)| {
            let path = out_dir.join(layer_file_name(e.as_str()));
            save_csv(layer, &path)?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tile(cells: Vec<Option<f64>>) -> RealTile {
        let res = (cells.len() as f64).sqrt() as usize;
        TileGrid::from_cells(res, cells).unwrap()
    }

    #[test]
    fn uniform_tiles_render_anchor_colors() {
        let cm = Colormap::tau();
        let up = render_tile(&tile(vec![Some(1.0); 9]), &cm, 2);
        assert_eq!((up.width, up.height), (6, 6));
        assert!(up.pixels.iter().all(|p| *p == [0, 255, 0]));
        let down = render_tile(&tile(vec![Some(-1.0); 9]), &cm, 1);
        assert!(down.pixels.iter().all(|p| *p == [255, 0, 0]));
    }

    #[test]
    fn origin_is_bottom_left() {
        // cells: (0,0)=-1, (1,0)=0, (0,1)=1, (1,1)=error
        let r = render_tile(&tile(vec![Some(-1.0), Some(0.0), Some(1.0), None]), &Colormap::tau(), 1);
        assert_eq!(r.pixel(0, 1), [255, 0, 0]);
        assert_eq!(r.pixel(1, 1), [255, 255, 255]);
        assert_eq!(r.pixel(0, 0), [0, 255, 0]);
        assert_eq!(r.pixel(1, 0), ERROR_COLOR);
        assert_eq!(&r.to_ppm()[..11], b"P6\n2 2\n255\n");
    }

    #[test]
    fn colormap_interpolates_and_clamps() {
        let cm = Colormap::tau();
        assert_eq!(cm.color(0.5), [128, 255, 128]);
        assert_eq!(cm.color(-0.5), [255, 128, 128]);
        assert_eq!(cm.color(7.0), [0, 255, 0]);
        assert_eq!(cm.color(-7.0), [255, 0, 0]);
        let inline = Colormap::by_name("0:000000,1:ff0000").unwrap();
        assert_eq!(inline.color(0.5), [128, 0, 0]);
        assert!(Colormap::by_name("1:000000,0:ffffff").is_err());
        assert!(Colormap::by_name("viridis").is_err());
    }

    #[test]
    fn png_and_ppm_share_pixels() {
        let dir = tempfile::tempdir().unwrap();
        let r = render_tile(&tile(vec![Some(-1.0), Some(0.25), Some(1.0), None]), &Colormap::tau(), 3);
        let png = dir.path().join("t.png");
        r.save(&png).unwrap();
        let back = image::open(&png).unwrap().to_rgb8();
        let raw: Vec<u8> = r.pixels.iter().flatten().copied().collect();
        assert_eq!(back.into_raw(), raw);
    }
}
