//! Uniform lattices over the Tile and per-cell grids.
//!
//! Cell `(i, j)` sits at `a = i / (resolution - 1)`, `b = j / (resolution - 1)`
//! and is stored at index `j * resolution + i` (row-major with `b` as the row,
//! so `a` varies fastest). Corners are always sampled.

use std::fmt;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perf::TileCoord;

/// Default lattice resolution (spacing 0.01).
pub const DEFAULT_RESOLUTION: usize = 101;

/// Field written for cells carrying an error marker.
pub const ERROR_FIELD: &str = "error";

/// A value per lattice cell.
#[derive(Debug, Clone, PartialEq)]
pub struct TileGrid<T> {
    resolution: usize,
    cells: Vec<T>,
}

/// Real-valued grid; `None` marks a cell whose evaluation failed.
pub type RealTile = TileGrid<Option<f64>>;

/// Per-cell strategy selection; `None` where no strategy has a value.
pub type SelectionTile = TileGrid<Option<String>>;

fn lattice_value(k: usize, resolution: usize) -> f64 {
    k as f64 / (resolution - 1) as f64
}

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution < 2 {
        return Err(Error::ResolutionTooSmall(resolution));
    }
    Ok(())
}

impl<T> TileGrid<T> {
    pub fn from_cells(resolution: usize, cells: Vec<T>) -> Result<Self> {
        check_resolution(resolution)?;
        if cells.len() != resolution * resolution {
            return Err(Error::InvalidParams(format!(
                "{} cells for resolution {resolution}",
                cells.len()
            )));
        }
        Ok(TileGrid { resolution, cells })
    }

    pub fn filled(resolution: usize, value: T) -> Result<Self>
    where
        T: Clone,
    {
        check_resolution(resolution)?;
        Ok(TileGrid {
            resolution,
            cells: vec![value; resolution * resolution],
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[T] {
        &self.cells
    }

    pub fn into_cells(self) -> Vec<T> {
        self.cells
    }

    /// Cell at column `i` (`a`) and row `j` (`b`).
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.cells[j * self.resolution + i]
    }

    pub fn coord(&self, i: usize, j: usize) -> TileCoord {
        TileCoord {
            a: lattice_value(i, self.resolution),
            b: lattice_value(j, self.resolution),
        }
    }

    pub fn coord_at(&self, index: usize) -> TileCoord {
        self.coord(index % self.resolution, index / self.resolution)
    }

    /// Value at the lattice point nearest to `coord`.
    pub fn at(&self, coord: TileCoord) -> &T {
        let step = (self.resolution - 1) as f64;
        let i = (coord.a * step).round() as usize;
        let j = (coord.b * step).round() as usize;
        self.get(i.min(self.resolution - 1), j.min(self.resolution - 1))
    }

    pub fn iter(&self) -> impl Iterator<Item = (TileCoord, &T)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .map(move |(k, v)| (self.coord_at(k), v))
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> TileGrid<U> {
        TileGrid {
            resolution: self.resolution,
            cells: self.cells.iter().map(f).collect(),
        }
    }
}

/// Row-major inclusive lattice over `[0,1]²`.
pub fn make_grid(resolution: usize) -> Result<Vec<TileCoord>> {
    check_resolution(resolution)?;
    Ok((0..resolution * resolution)
        .map(|k| TileCoord {
            a: lattice_value(k % resolution, resolution),
            b: lattice_value(k / resolution, resolution),
        })
        .collect())
}

/// Evaluates `f` at every lattice point. Cells are computed in parallel; the
/// result does not depend on scheduling.
pub fn map_tile<T, F>(resolution: usize, f: F) -> Result<TileGrid<T>>
where
    T: Send,
    F: Fn(TileCoord) -> T + Sync,
{
    let coords = make_grid(resolution)?;
    let cells = coords.into_par_iter().map(&f).collect();
    Ok(TileGrid { resolution, cells })
}

/// Cell-wise reduction across grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    Mean,
    Min,
}

impl Reduction {
    pub const ALL: [Reduction; 2] = [Reduction::Mean, Reduction::Min];

    pub fn name(self) -> &'static str {
        match self {
            Reduction::Mean => "mean",
            Reduction::Min => "min",
        }
    }
}

impl fmt::Display for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Reduction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Reduction::Mean),
            "min" => Ok(Reduction::Min),
            _ => Err(Error::Parse(format!("expected `mean` or `min`, got `{s}`"))),
        }
    }
}

fn shared_resolution<'a, T: 'a>(grids: impl IntoIterator<Item = &'a TileGrid<T>>) -> Result<usize> {
    let mut it = grids.into_iter();
    let first = it.next().ok_or(Error::EmptyList)?.resolution;
    for g in it {
        if g.resolution != first {
            return Err(Error::ResolutionMismatch(first, g.resolution));
        }
    }
    Ok(first)
}

/// Cell-wise mean or minimum. Error cells are skipped; a cell is an error
/// only when every input is.
pub fn reduce_tiles(grids: &[&RealTile], mode: Reduction) -> Result<RealTile> {
    let resolution = shared_resolution(grids.iter().copied())?;
    let cells = (0..resolution * resolution)
        .map(|k| {
            let defined = grids.iter().filter_map(|g| g.cells[k]);
            match mode {
                Reduction::Mean => {
                    let (sum, count) = defined.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
                    (count > 0).then(|| sum / count as f64)
                }
                Reduction::Min => defined.reduce(f64::min),
            }
        })
        .collect();
    Ok(TileGrid { resolution, cells })
}

/// Cell-wise weighted mean; weights are renormalized over the defined cells.
pub fn reduce_tiles_weighted(grids: &[(&RealTile, f64)]) -> Result<RealTile> {
    let resolution = shared_resolution(grids.iter().map(|(g, _)| *g))?;
    let cells = (0..resolution * resolution)
        .map(|k| {
            let (sum, total) = grids
                .iter()
                .filter_map(|(g, w)| g.cells[k].map(|v| (v, *w)))
                .fold((0.0, 0.0), |(s, t), (v, w)| (s + w * v, t + w));
            (total > 0.0).then(|| sum / total)
        })
        .collect();
    Ok(TileGrid { resolution, cells })
}

/// Per cell, the id of the grid with the largest value. Ties go to the
/// earliest entry; error cells never win.
pub fn argmax_tile(named: &[(&str, &RealTile)]) -> Result<SelectionTile> {
    let resolution = shared_resolution(named.iter().map(|(_, g)| *g))?;
    let cells = (0..resolution * resolution)
        .map(|k| {
            let mut best: Option<(&str, f64)> = None;
            for (id, g) in named {
                if let Some(v) = g.cells[k] {
                    if best.is_none_or(|(_, b)| v > b) {
                        best = Some((id, v));
                    }
                }
            }
            best.map(|(id, _)| id.to_owned())
        })
        .collect();
    Ok(TileGrid { resolution, cells })
}

/// Share of lattice cells selecting `id`, with every cell counted equally.
pub fn tile_area_fraction(selection: &SelectionTile, id: &str) -> f64 {
    let hits = selection
        .cells
        .iter()
        .filter(|c| c.as_deref() == Some(id))
        .count();
    hits as f64 / selection.cells.len() as f64
}

/// Formats a real with 17 significant digits, like C's `%.17g`.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    fn trim(s: &str) -> &str {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.')
        } else {
            s
        }
    }
    if !(-4..17).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        let decimals = (16 - exp) as usize;
        trim(&format!("{x:.decimals$}")).to_owned()
    }
}

/// A cell that can be written to and read from a tile CSV value field.
pub trait CsvCell: Sized {
    fn to_field(&self) -> String;
    fn from_field(field: &str) -> Result<Self>;
}

impl CsvCell for Option<f64> {
    fn to_field(&self) -> String {
        match self {
            Some(v) => format_real(*v),
            None => ERROR_FIELD.into(),
        }
    }

    fn from_field(field: &str) -> Result<Self> {
        if field == ERROR_FIELD {
            return Ok(None);
        }
        field
            .parse()
            .map(Some)
            .map_err(|e| Error::Parse(format!("bad value `{field}`: {e}")))
    }
}

impl CsvCell for Option<String> {
    fn to_field(&self) -> String {
        self.clone().unwrap_or_else(|| ERROR_FIELD.into())
    }

    fn from_field(field: &str) -> Result<Self> {
        Ok((field != ERROR_FIELD).then(|| field.to_owned()))
    }
}

impl CsvCell for Option<u32> {
    fn to_field(&self) -> String {
        match self {
            Some(v) => v.to_string(),
            None => ERROR_FIELD.into(),
        }
    }

    fn from_field(field: &str) -> Result<Self> {
        if field == ERROR_FIELD {
            return Ok(None);
        }
        field
            .parse()
            .map(Some)
            .map_err(|e| Error::Parse(format!("bad rank `{field}`: {e}")))
    }
}

/// Writes `a,b,value` rows in lattice order.
pub fn write_csv<T: CsvCell, W: Write>(tile: &TileGrid<T>, mut out: W) -> io::Result<()> {
    writeln!(out, "a,b,value")?;
    for (coord, cell) in tile.iter() {
        writeln!(
            out,
            "{},{},{}",
            format_real(coord.a),
            format_real(coord.b),
            cell.to_field()
        )?;
    }
    Ok(())
}

pub fn to_csv_string<T: CsvCell>(tile: &TileGrid<T>) -> String {
    let mut buf = Vec::new();
    write_csv(tile, &mut buf).expect("in-memory write");
    String::from_utf8(buf).expect("ascii csv")
}

pub fn save_csv<T: CsvCell>(tile: &TileGrid<T>, path: &Path) -> Result<()> {
    fs::write(path, to_csv_string(tile)).map_err(|e| Error::io(path, e))
}

/// Parses a tile CSV, checking that rows follow lattice order.
pub fn read_csv<T: CsvCell, R: BufRead>(input: R) -> Result<TileGrid<T>> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty tile file".into()))?
        .map_err(|e| Error::Parse(e.to_string()))?;
    if header.trim_end() != "a,b,value" {
        return Err(Error::Parse(format!("unexpected header `{header}`")));
    }
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.splitn(3, ',');
        let (Some(a), Some(b), Some(v)) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Parse(format!("line {}: expected 3 fields", n + 2)));
        };
        let coord = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {}: bad coordinate `{s}`: {e}", n + 2)))
        };
        rows.push((coord(a)?, coord(b)?, T::from_field(v)?));
    }
    let resolution = (rows.len() as f64).sqrt().round() as usize;
    if resolution * resolution != rows.len() {
        return Err(Error::Parse(format!("{} rows do not form a square lattice", rows.len())));
    }
    check_resolution(resolution)?;
    let mut cells = Vec::with_capacity(rows.len());
    for (k, (a, b, v)) in rows.into_iter().enumerate() {
        let (ea, eb) = (
            lattice_value(k % resolution, resolution),
            lattice_value(k / resolution, resolution),
        );
        if (a - ea).abs() > 1e-9 || (b - eb).abs() > 1e-9 {
            return Err(Error::Parse(format!(
                "row {} at ({a}, {b}) but lattice expects ({ea}, {eb})",
                k + 1
            )));
        }
        cells.push(v);
    }
    Ok(TileGrid { resolution, cells })
}

pub fn load_csv<T: CsvCell>(path: &Path) -> Result<TileGrid<T>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn constant(resolution: usize, v: f64) -> RealTile {
        TileGrid::filled(resolution, Some(v)).unwrap()
    }

    #[test]
    fn lattice_examples() {
        let corners = make_grid(2).unwrap();
        let pairs: Vec<(f64, f64)> = corners.iter().map(|c| (c.a, c.b)).collect();
        assert_eq!(pairs, vec![(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]);
        assert!(make_grid(3).unwrap().contains(&TileCoord { a: 0.5, b: 0.5 }));
        let fine = make_grid(101).unwrap();
        assert_eq!(fine.len(), 10201);
        assert_eq!(fine[1].a, 0.01);
        assert_eq!(fine[101].b, 0.01);
        assert_eq!(make_grid(1), Err(Error::ResolutionTooSmall(1)));
    }

    #[test]
    fn map_tile_examples() {
        let t = map_tile(5, |_| 0.5).unwrap();
        assert!(t.cells().iter().all(|&v| v == 0.5));
        let t = map_tile(5, |c| c.a).unwrap();
        for j in 0..5 {
            for i in 0..5 {
                assert_eq!(*t.get(i, j), i as f64 / 4.0);
            }
        }
        let p = crate::perf::Performance::new(0.4, 0.1, 0.1, 0.4).unwrap();
        let t = map_tile(3, |c| p.score(&c.importance()).unwrap()).unwrap();
        assert!((t.get(1, 1) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn reductions() {
        let one = constant(3, 0.3);
        for mode in Reduction::ALL {
            assert_eq!(reduce_tiles(&[&one], mode).unwrap(), one);
        }
        let (lo, hi) = (constant(3, 0.2), constant(3, 0.6));
        let mean = reduce_tiles(&[&lo, &hi], Reduction::Mean).unwrap();
        assert!(mean.cells().iter().all(|v| (v.unwrap() - 0.4).abs() < 1e-15));
        assert_eq!(reduce_tiles(&[&lo, &hi], Reduction::Min).unwrap(), lo);
        assert_eq!(reduce_tiles(&[], Reduction::Mean), Err(Error::EmptyList));
        assert_eq!(
            reduce_tiles(&[&lo, &constant(4, 0.1)], Reduction::Mean),
            Err(Error::ResolutionMismatch(3, 4))
        );
    }

    #[test]
    fn reductions_skip_error_cells() {
        let mut cells = vec![Some(0.5); 4];
        cells[0] = None;
        let holed = TileGrid::from_cells(2, cells).unwrap();
        let full = constant(2, 0.1);
        let mean = reduce_tiles(&[&holed, &full], Reduction::Mean).unwrap();
        assert_eq!(mean.cells()[0], Some(0.1));
        assert!((mean.cells()[1].unwrap() - 0.3).abs() < 1e-15);
        let errors = TileGrid::filled(2, None).unwrap();
        assert_eq!(reduce_tiles(&[&errors], Reduction::Min).unwrap(), errors);
    }

    #[test]
    fn weighted_reduction() {
        let (lo, hi) = (constant(2, 0.0), constant(2, 1.0));
        let t = reduce_tiles_weighted(&[(&lo, 1.0), (&hi, 3.0)]).unwrap();
        assert!(t.cells().iter().all(|v| *v == Some(0.75)));
    }

    #[test]
    fn argmax_and_area() {
        let (lo, hi) = (constant(3, 0.1), constant(3, 0.9));
        let sel = argmax_tile(&[("x", &lo)]).unwrap();
        assert_eq!(tile_area_fraction(&sel, "x"), 1.0);
        let sel = argmax_tile(&[("x", &lo), ("y", &hi)]).unwrap();
        assert_eq!(tile_area_fraction(&sel, "y"), 1.0);
        assert_eq!(tile_area_fraction(&sel, "x"), 0.0);
        let sel = argmax_tile(&[("first", &hi), ("second", &hi.clone())]).unwrap();
        assert!(sel.cells().iter().all(|c| c.as_deref() == Some("first")));
        assert_eq!(argmax_tile(&[]), Err(Error::EmptyList));
    }

    #[test]
    fn area_fraction_arithmetic() {
        let cells = (0..10201).map(|k| Some(if k < 5152 { "x" } else { "y" }.to_owned())).collect();
        let sel = TileGrid::from_cells(101, cells).unwrap();
        assert!((tile_area_fraction(&sel, "x") - 5152.0 / 10201.0).abs() < 1e-15);
        assert!((tile_area_fraction(&sel, "x") - 0.505_048_524_654_445_6).abs() < 1e-15);
    }

    #[test]
    fn real_formatting() {
        assert_eq!(format_real(0.0), "0");
        assert_eq!(format_real(1.0), "1");
        assert_eq!(format_real(-1.0), "-1");
        assert_eq!(format_real(0.5), "0.5");
        assert_eq!(format_real(0.1), "0.10000000000000001");
        assert_eq!(format_real(0.01), "0.01");
        assert_eq!(format_real(2.0 / 3.0), "0.66666666666666663");
        assert_eq!(format_real(1e-5), "1.0000000000000001e-05");
        assert_eq!(format_real(1e20), "1e+20");
        assert_eq!(format_real(123456.0), "123456");
    }

    #[test]
    fn csv_layout() {
        let t = map_tile(2, |c| Some(c.a - c.b)).unwrap();
        assert_eq!(to_csv_string(&t), "a,b,value\n0,0,0\n1,0,1\n0,1,-1\n1,1,0\n");
        let sel: SelectionTile = TileGrid::from_cells(2, vec![Some("x".into()), None, Some("y".into()), Some("x".into())]).unwrap();
        assert_eq!(to_csv_string(&sel), "a,b,value\n0,0,x\n1,0,error\n0,1,y\n1,1,x\n");
    }

    #[test]
    fn csv_rejects_bad_layout() {
        assert!(read_csv::<Option<f64>, _>("a,b,value\n0,0,1\n".as_bytes()).is_err());
        assert!(read_csv::<Option<f64>, _>("a,b,value\n0,0,1\n0,1,1\n1,0,1\n1,1,1\n".as_bytes()).is_err());
        assert!(read_csv::<Option<f64>, _>("x,y,z\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn csv_round_trip(values in prop::collection::vec(prop::option::weighted(0.9, -1.0f64..1.0), 9)) {
            let t = TileGrid::from_cells(3, values).unwrap();
            let back: RealTile = read_csv(to_csv_string(&t).as_bytes()).unwrap();
            prop_assert_eq!(back, t);
        }

        #[test]
        fn min_never_exceeds_mean(a in prop::collection::vec(-1.0f64..1.0, 4), b in prop::collection::vec(-1.0f64..1.0, 4)) {
            let ga = TileGrid::from_cells(2, a.into_iter().map(Some).collect()).unwrap();
            let gb = TileGrid::from_cells(2, b.into_iter().map(Some).collect()).unwrap();
            let mean = reduce_tiles(&[&ga, &gb], Reduction::Mean).unwrap();
            let min = reduce_tiles(&[&ga, &gb], Reduction::Min).unwrap();
            for (lo, avg) in min.cells().iter().zip(mean.cells()) {
                prop_assert!(lo.unwrap() <= avg.unwrap() + 1e-15);
            }
        }

        #[test]
        fn area_fractions_sum_to_one(a in prop::collection::vec(-1.0f64..1.0, 9), b in prop::collection::vec(-1.0f64..1.0, 9)) {
            let ga = TileGrid::from_cells(3, a.into_iter().map(Some).collect()).unwrap();
            let gb = TileGrid::from_cells(3, b.into_iter().map(Some).collect()).unwrap();
            let sel = argmax_tile(&[("x", &ga), ("y", &gb)]).unwrap();
            let total = tile_area_fraction(&sel, "x") + tile_area_fraction(&sel, "y");
            prop_assert!((total - 1.0).abs() < 1e-12);
            for k in 0..9 {
                let chosen = if sel.cells()[k].as_deref() == Some("x") { ga.cells()[k] } else { gb.cells()[k] };
                prop_assert!(chosen >= ga.cells()[k] && chosen >= gb.cells()[k]);
            }
        }
    }
}
