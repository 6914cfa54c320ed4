//! Text formats read and written by the command line tool.
//!
//! Grids are CSV with a one-line header `dims=8x8;origin=0.0625,0.0625;h=0.125`
//! followed by the samples in row-major order (last axis fastest). `origin`
//! is the center of the first sample. Rasters use the same layout with 0/1
//! values. Point clouds are CSV with header `x1,...,xn`, one point per row.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use gmtkit_core::hausdorff::{IfsSystem, PointCloud, Similarity};
use gmtkit_core::measures::AtomicMeasure;
use gmtkit_core::smoothing::TestFunctionBattery;
use gmtkit_core::{GridFunction, Lattice, RasterSet};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub fn read_text(path: &Path) -> CliResult<String> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    if text.trim().is_empty() {
        return Err(CliError::parse(path, "file is empty"));
    }
    Ok(text)
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad number `{}`", t.trim())))
        .collect()
}

fn parse_header(line: &str) -> Result<Lattice, String> {
    let (mut dims, mut origin, mut h) = (None, None, None);
    for field in line.split(';') {
        let (key, value) = field.split_once('=').ok_or_else(|| format!("header field `{field}` has no `=`"))?;
        match key.trim() {
            "dims" => {
                let d: Result<Vec<usize>, _> = value.split('x').map(|t| t.trim().parse::<usize>()).collect();
                dims = Some(d.map_err(|_| format!("bad dims `{value}`"))?);
            }
            "origin" => origin = Some(parse_list(value)?),
            "h" => h = Some(value.trim().parse::<f64>().map_err(|_| format!("bad spacing `{value}`"))?),
            other => return Err(format!("unknown header field `{other}`")),
        }
    }
    let dims = dims.ok_or("header lacks dims")?;
    let origin = origin.ok_or("header lacks origin")?;
    let h = h.ok_or("header lacks h")?;
    Lattice::new(dims, origin, h).map_err(|e| e.to_string())
}

pub fn parse_grid(text: &str) -> Result<GridFunction, String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or("missing header")?;
    let lattice = parse_header(header)?;
    let mut values = Vec::with_capacity(lattice.len());
    for line in lines {
        for tok in line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            values.push(tok.parse::<f64>().map_err(|_| format!("bad value `{tok}`"))?);
        }
    }
    if values.len() != lattice.len() {
        return Err(format!("header announces {} samples, found {}", lattice.len(), values.len()));
    }
    GridFunction::new(lattice, values).map_err(|e| e.to_string())
}

pub fn read_grid(path: &Path) -> CliResult<GridFunction> {
    parse_grid(&read_text(path)?).map_err(|m| CliError::parse(path, m))
}

pub fn read_raster(path: &Path) -> CliResult<RasterSet> {
    let f = read_grid(path)?;
    let mut mask = Vec::with_capacity(f.values().len());
    for v in f.values() {
        match *v {
            0.0 => mask.push(false),
            1.0 => mask.push(true),
            x => return Err(CliError::parse(path, format!("raster value {x} is not 0 or 1"))),
        }
    }
    Ok(RasterSet::new(f.lattice().clone(), mask)?)
}

pub fn write_grid(f: &GridFunction) -> String {
    let lat = f.lattice();
    let dims: Vec<String> = lat.dims().iter().map(|d| d.to_string()).collect();
    let origin: Vec<String> = lat.origin().iter().map(|o| o.to_string()).collect();
    let mut out = format!("dims={};origin={};h={}\n", dims.join("x"), origin.join(","), lat.spacing());
    let row = *lat.dims().last().unwrap_or(&1);
    for chunk in f.values().chunks(row.max(1)) {
        let cells: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_cloud(text: &str) -> Result<PointCloud, String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or("missing header")?;
    let dim = header.split(',').count();
    for (i, name) in header.split(',').enumerate() {
        if name.trim() != format!("x{}", i + 1) {
            return Err(format!("header column `{}` should be `x{}`", name.trim(), i + 1));
        }
    }
    let mut coords = Vec::new();
    for (row, line) in lines.enumerate() {
        let p = parse_list(line)?;
        if p.len() != dim {
            return Err(format!("row {} has {} columns, expected {dim}", row + 1, p.len()));
        }
        coords.extend(p);
    }
    PointCloud::new(dim, coords).map_err(|e| e.to_string())
}

pub fn read_cloud(path: &Path) -> CliResult<PointCloud> {
    parse_cloud(&read_text(path)?).map_err(|m| CliError::parse(path, m))
}

fn from_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError::parse(path, e.to_string()))
}

/// Atom identifiers may be written as strings or numbers.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum AtomId {
    Text(String),
    Number(serde_json::Number),
}

impl AtomId {
    fn into_string(self) -> String {
        match self {
            AtomId::Text(s) => s,
            AtomId::Number(n) => n.to_string(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct MeasureFile {
    pub atoms: Vec<AtomId>,
    pub m: usize,
    pub weights: Vec<Vec<f64>>,
}

impl MeasureFile {
    pub fn into_measure(self) -> gmtkit_core::Result<AtomicMeasure> {
        if self.weights.len() != self.atoms.len() {
            return Err(gmtkit_core::Error::Misaligned { expected: self.atoms.len(), found: self.weights.len() });
        }
        let flat: Vec<f64> = self.weights.concat();
        AtomicMeasure::new(self.atoms.into_iter().map(AtomId::into_string).collect(), self.m, flat)
    }

    pub fn from_measure(mu: &AtomicMeasure) -> Self {
        MeasureFile {
            atoms: mu.atoms().iter().cloned().map(AtomId::Text).collect(),
            m: mu.m(),
            weights: (0..mu.len()).map(|i| mu.weight(i).to_vec()).collect(),
        }
    }
}

pub fn read_measure(path: &Path) -> CliResult<AtomicMeasure> {
    Ok(from_json::<MeasureFile>(path)?.into_measure()?)
}

#[derive(Debug, Clone, Deserialize)]
pub struct MapFile {
    pub ratio: f64,
    pub offset: Vec<f64>,
    /// Identity when absent.
    pub rotation: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct IfsFile {
    pub maps: Vec<MapFile>,
    /// Zero or absent picks a depth from the finest scale.
    #[serde(default)]
    pub depth: usize,
}

pub fn read_ifs(path: &Path) -> CliResult<IfsSystem> {
    let file: IfsFile = from_json(path)?;
    let maps = file
        .maps
        .into_iter()
        .map(|m| {
            let mut s = Similarity::scaling(m.ratio, m.offset);
            if let Some(r) = m.rotation {
                s.rotation = r.concat();
            }
            s
        })
        .collect();
    Ok(IfsSystem::new(maps, file.depth)?)
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct BatteryFile {
    pub centers: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
    pub seed: u64,
}

impl BatteryFile {
    pub fn from_battery(b: &TestFunctionBattery) -> Self {
        BatteryFile {
            centers: b.bumps.iter().map(|x| x.center.clone()).collect(),
            radii: b.bumps.iter().map(|x| x.radius).collect(),
            seed: b.seed,
        }
    }
}

pub fn read_battery(path: &Path) -> CliResult<TestFunctionBattery> {
    let file: BatteryFile = from_json(path)?;
    Ok(TestFunctionBattery::new(file.centers, file.radii, file.seed)?)
}

/// Parameters of the built-in maps, all optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapParams {
    pub laps: Option<usize>,
    pub height: Option<f64>,
    pub omega: Option<f64>,
    pub r_max: Option<f64>,
}

/// `(t, value)` pairs as two-column CSV.
pub fn write_pairs(header: &str, rows: &[(f64, f64)]) -> String {
    let mut out = format!("{header}\n");
    for (a, b) in rows {
        let _ = writeln!(out, "{a},{b}");
    }
    out
}
