//! Occupation histograms on a rectangular grid and distances between them.

use crate::error::{Error, Result};
use crate::wavefunctions::{density, WavefunctionModel};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    /// xmin, xmax, ymin, ymax
    pub bounds: [f64; 4],
    pub nx: usize,
    pub ny: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            bounds: [-8.0, 8.0, -8.0, 8.0],
            nx: 360,
            ny: 360,
        }
    }
}

impl GridSpec {
    pub fn new(bounds: [f64; 4], nx: usize, ny: usize) -> Self {
        Self { bounds, nx, ny }
    }

    pub fn validate(&self) -> Result<()> {
        let [x0, x1, y0, y1] = self.bounds;
        if !(x0 < x1 && y0 < y1) || !self.bounds.iter().all(|b| b.is_finite()) {
            return Err(Error::Config(format!(
                "grid bounds {:?} are not an increasing box",
                self.bounds
            )));
        }
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::Config(
                "grid needs at least one cell per axis".into(),
            ));
        }
        Ok(())
    }

    pub fn cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn cell_size(&self) -> (f64, f64) {
        let [x0, x1, y0, y1] = self.bounds;
        ((x1 - x0) / self.nx as f64, (y1 - y0) / self.ny as f64)
    }

    /// Row-major index (row = y cell), None outside the box.
    pub fn index(&self, x: f64, y: f64) -> Option<usize> {
        let [x0, x1, y0, y1] = self.bounds;
        if !(x >= x0 && x < x1 && y >= y0 && y < y1) {
            return None;
        }
        let (dx, dy) = self.cell_size();
        let i = (((x - x0) / dx) as usize).min(self.nx - 1);
        let j = (((y - y0) / dy) as usize).min(self.ny - 1);
        Some(j * self.nx + i)
    }

    pub fn center(&self, idx: usize) -> [f64; 2] {
        let (dx, dy) = self.cell_size();
        let (i, j) = (idx % self.nx, idx / self.nx);
        [
            self.bounds[0] + (i as f64 + 0.5) * dx,
            self.bounds[2] + (j as f64 + 0.5) * dy,
        ]
    }
}

/// Integer occupation counts; points outside the box go to `overflow`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramGrid {
    pub bounds: [u64; 4],
    pub nx: usize,
    pub ny: usize,
    pub counts: Vec<u64>,
    /// Σ counts
    pub total: u64,
    pub overflow: u64,
}

impl HistogramGrid {
    pub fn new(spec: &GridSpec) -> Self {
        Self {
            bounds: spec.bounds.map(f64::to_bits),
            nx: spec.nx,
            ny: spec.ny,
            counts: vec![0; spec.cells()],
            total: 0,
            overflow: 0,
        }
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec::new(self.bounds.map(f64::from_bits), self.nx, self.ny)
    }

    pub fn add(&mut self, x: f64, y: f64) {
        match self.spec().index(x, y) {
            Some(i) => {
                self.counts[i] += 1;
                self.total += 1;
            }
            None => self.overflow += 1,
        }
    }

    pub fn extend<'a, I: IntoIterator<Item = &'a [f64]>>(&mut self, points: I) {
        let spec = self.spec();
        for p in points {
            match spec.index(p[0], p[1]) {
                Some(i) => {
                    self.counts[i] += 1;
                    self.total += 1;
                }
                None => self.overflow += 1,
            }
        }
    }

    pub fn same_geometry(&self, other: &Self) -> bool {
        self.bounds == other.bounds && self.nx == other.nx && self.ny == other.ny
    }

    /// Cell-wise sum; order of merging never matters.
    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if !self.same_geometry(other) {
            return Err(Error::GeometryMismatch);
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
        self.overflow += other.overflow;
        Ok(())
    }

    pub fn mass(&self) -> GridMass {
        let t = self.total.max(1) as f64;
        GridMass {
            spec: self.spec(),
            p: self.counts.iter().map(|&c| c as f64 / t).collect(),
        }
    }

    pub fn occupied_fraction(&self) -> f64 {
        self.counts.iter().filter(|&&c| c > 0).count() as f64 / self.counts.len() as f64
    }

    pub fn overflow_fraction(&self) -> f64 {
        let all = self.total + self.overflow;
        if all == 0 {
            0.0
        } else {
            self.overflow as f64 / all as f64
        }
    }

    /// `# xmin,xmax,ymin,ymax,nx,ny,total` block, then one row of counts per y cell.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let [x0, x1, y0, y1] = self.bounds.map(f64::from_bits);
        writeln!(w, "# xmin,xmax,ymin,ymax,nx,ny,total")?;
        writeln!(
            w,
            "# {x0:e},{x1:e},{y0:e},{y1:e},{},{},{}",
            self.nx, self.ny, self.total
        )?;
        writeln!(w, "# overflow,{}", self.overflow)?;
        for row in self.counts.chunks(self.nx) {
            let line: Vec<String> = row.iter().map(u64::to_string).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let bad = |m: &str| Error::Config(format!("histogram file: {m}"));
        let mut lines = r.lines();
        let mut next = || -> Result<String> {
            lines
                .next()
                .ok_or_else(|| bad("truncated"))?
                .map_err(Error::from)
        };
        if !next()?.starts_with("# xmin") {
            return Err(bad("missing header"));
        }
        let head = next()?;
        let f: Vec<&str> = head.trim_start_matches('#').trim().split(',').collect();
        if f.len() != 7 {
            return Err(bad("header needs 7 fields"));
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("bad number"));
        let int = |s: &str| s.trim().parse::<u64>().map_err(|_| bad("bad integer"));
        let spec = GridSpec::new(
            [num(f[0])?, num(f[1])?, num(f[2])?, num(f[3])?],
            int(f[4])? as usize,
            int(f[5])? as usize,
        );
        spec.validate()?;
        let total = int(f[6])?;
        let ov = next()?;
        let overflow = int(ov.rsplit(',').next().unwrap_or(""))?;
        let mut h = HistogramGrid::new(&spec);
        for j in 0..spec.ny {
            let row = next()?;
            let vals: Vec<&str> = row.split(',').collect();
            if vals.len() != spec.nx {
                return Err(bad("row length"));
            }
            for (i, v) in vals.iter().enumerate() {
                h.counts[j * spec.nx + i] = int(v)?;
            }
        }
        h.total = h.counts.iter().sum();
        h.overflow = overflow;
        if h.total != total {
            return Err(bad("total does not match counts"));
        }
        Ok(h)
    }
}

/// Normalised cell masses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridMass {
    pub spec: GridSpec,
    pub p: Vec<f64>,
}

impl GridMass {
    /// Merge `f × f` blocks of cells.
    pub fn rebin(&self, f: usize) -> Result<GridMass> {
        if f == 0 || !self.spec.nx.is_multiple_of(f) || !self.spec.ny.is_multiple_of(f) {
            return Err(Error::GeometryMismatch);
        }
        let spec = GridSpec::new(self.spec.bounds, self.spec.nx / f, self.spec.ny / f);
        let mut p = vec![0.0; spec.cells()];
        for (idx, m) in self.p.iter().enumerate() {
            let (i, j) = (idx % self.spec.nx, idx / self.spec.nx);
            p[(j / f) * spec.nx + i / f] += m;
        }
        Ok(GridMass { spec, p })
    }
}

/// Σ|pᵢ − qᵢ| ∈ [0, 2].
pub fn l1_distance(a: &GridMass, b: &GridMass) -> Result<f64> {
    if a.spec != b.spec {
        return Err(Error::GeometryMismatch);
    }
    Ok(a.p.iter().zip(&b.p).map(|(x, y)| (x - y).abs()).sum())
}

/// Mass allowed outside the grid.
pub const COVERAGE_TOL: f64 = 1e-6;

/// |Ψ(centre, t)|²·area per cell, renormalised. The box must hold all but
/// `COVERAGE_TOL` of the mass, measured on a box three times as wide.
pub fn density_histogram<M: WavefunctionModel<f64> + ?Sized>(
    model: &M,
    t: f64,
    spec: &GridSpec,
) -> Result<GridMass> {
    spec.validate()?;
    if model.dim() != 2 {
        return Err(Error::Unsupported("density histograms are planar".into()));
    }
    let raw = |s: &GridSpec| -> Vec<f64> {
        (0..s.cells())
            .map(|i| {
                let c = s.center(i);
                density(model, &c, &t)
            })
            .collect()
    };
    let mut p = raw(spec);
    let inside: f64 = p.iter().sum();
    let [x0, x1, y0, y1] = spec.bounds;
    let (w, h) = (x1 - x0, y1 - y0);
    let wide = GridSpec::new([x0 - w, x1 + w, y0 - h, y1 + h], 3 * spec.nx, 3 * spec.ny);
    let all: f64 = raw(&wide).iter().sum();
    let missing = if all > 0.0 { 1.0 - inside / all } else { 1.0 };
    if !(missing < COVERAGE_TOL) {
        return Err(Error::Coverage { missing });
    }
    p.iter_mut().for_each(|v| *v /= inside);
    Ok(GridMass {
        spec: spec.clone(),
        p,
    })
}

/// Time average of the density over `times`.
pub fn mean_density_histogram<M: WavefunctionModel<f64> + ?Sized>(
    model: &M,
    times: &[f64],
    spec: &GridSpec,
) -> Result<GridMass> {
    let mut acc = vec![0.0; spec.cells()];
    for &t in times {
        let m = density_histogram(model, t, spec)?;
        acc.iter_mut().zip(&m.p).for_each(|(a, b)| *a += b);
    }
    let n = times.len().max(1) as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    Ok(GridMass {
        spec: spec.clone(),
        p: acc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let spec = GridSpec::new([-1.0, 1.0, -2.0, 2.0], 3, 2);
        let mut h = HistogramGrid::new(&spec);
        for p in [[0.0, 0.0], [-0.9, -1.9], [0.9, 1.9], [5.0, 0.0]] {
            h.add(p[0], p[1]);
        }
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        let back = HistogramGrid::read_csv(&buf[..]).unwrap();
        assert_eq!(back, h);
        assert_eq!((h.total, h.overflow), (3, 1));
    }

    #[test]
    fn distance_extremes() {
        let spec = GridSpec::new([0.0, 2.0, 0.0, 1.0], 2, 1);
        let mut a = HistogramGrid::new(&spec);
        let mut b = HistogramGrid::new(&spec);
        a.add(0.5, 0.5);
        b.add(1.5, 0.5);
        assert_eq!(l1_distance(&a.mass(), &a.mass()).unwrap(), 0.0);
        assert_eq!(l1_distance(&a.mass(), &b.mass()).unwrap(), 2.0);
        let c = HistogramGrid::new(&GridSpec::new([0.0, 2.0, 0.0, 1.0], 1, 1));
        assert!(matches!(
            l1_distance(&a.mass(), &c.mass()),
            Err(Error::GeometryMismatch)
        ));
    }
}
