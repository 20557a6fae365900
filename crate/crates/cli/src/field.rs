//! Sampled fields, CSV tables and PPM heatmaps.

use crate::config::GridSpec;
use crate::CliError;
use mesoscat_core::{Complex64, Exec, Point};

/// Samples of a field; `None` marks points where the field is undefined.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldValues {
    Real(Vec<Option<f64>>),
    Complex(Vec<Option<Complex64>>),
}

/// Values on a `nx x ny` lattice over a rectangle, row-major from the
/// bottom-left corner.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub nx: usize,
    pub ny: usize,
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub values: FieldValues,
}

impl FieldGrid {
    pub fn point(layout: &GridSpec, i: usize, j: usize) -> Point {
        let t = |r: [f64; 2], k: usize, n: usize| r[0] + (r[1] - r[0]) * k as f64 / (n - 1) as f64;
        Point::new(t(layout.x, i, layout.nx), t(layout.y, j, layout.ny))
    }

    pub fn points(layout: &GridSpec) -> Vec<Point> {
        (0..layout.ny)
            .flat_map(|j| (0..layout.nx).map(move |i| Self::point(layout, i, j)))
            .collect()
    }

    pub fn sample_real(
        layout: &GridSpec,
        exec: Exec,
        f: impl Fn(Point) -> Option<f64> + Sync + Send,
    ) -> Self {
        let pts = Self::points(layout);
        let values = exec.map(pts.len(), |k| f(pts[k]).filter(|v| v.is_finite()));
        Self {
            nx: layout.nx,
            ny: layout.ny,
            x: layout.x,
            y: layout.y,
            values: FieldValues::Real(values),
        }
    }

    pub fn sample_complex(
        layout: &GridSpec,
        exec: Exec,
        f: impl Fn(Point) -> Option<Complex64> + Sync + Send,
    ) -> Self {
        let pts = Self::points(layout);
        let values = exec.map(pts.len(), |k| f(pts[k]).filter(|v| v.is_finite()));
        Self {
            nx: layout.nx,
            ny: layout.ny,
            x: layout.x,
            y: layout.y,
            values: FieldValues::Complex(values),
        }
    }

    /// Scales a real field so that `max |v| = 1`; no-op for all-zero or complex fields.
    pub fn normalize_max_abs(&mut self) {
        if let FieldValues::Real(v) = &mut self.values {
            let m = v.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
            if m > 0.0 {
                v.iter_mut().flatten().for_each(|x| *x /= m);
            }
        }
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let layout = GridSpec {
            nx: self.nx,
            ny: self.ny,
            x: self.x,
            y: self.y,
        };
        let mut t = match self.values {
            FieldValues::Real(_) => Table::new(&["i", "j", "x", "y", "inside", "value"]),
            FieldValues::Complex(_) => Table::new(&["i", "j", "x", "y", "inside", "re", "im"]),
        };
        for j in 0..self.ny {
            for i in 0..self.nx {
                let k = j * self.nx + i;
                let p = Self::point(&layout, i, j);
                let mut row = vec![i.to_string(), j.to_string(), num(p.x), num(p.y)];
                match &self.values {
                    FieldValues::Real(v) => match v[k] {
                        Some(a) => row.extend(["1".into(), num(a)]),
                        None => row.extend(["0".into(), String::new()]),
                    },
                    FieldValues::Complex(v) => match v[k] {
                        Some(a) => row.extend(["1".into(), num(a.re), num(a.im)]),
                        None => row.extend(["0".into(), String::new(), String::new()]),
                    },
                }
                t.push(row);
            }
        }
        t.finish()
    }
}

/// Float with 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV table with a header row, LF line endings and RFC 4180 quoting.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
    error: Option<csv::Error>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let error = writer.write_record(header).err();
        Self { writer, error }
    }

    pub fn push(&mut self, row: Vec<String>) {
        if self.error.is_none() {
            self.error = self.writer.write_record(&row).err();
        }
    }

    pub fn finish(self) -> Result<Vec<u8>, CliError> {
        if let Some(e) = self.error {
            return Err(CliError::Io(format!("csv encoding failed: {e}")));
        }
        self.writer
            .into_inner()
            .map_err(|e| CliError::Io(format!("csv encoding failed: {e}")))
    }
}

/// Binary PPM (P6). Real fields use a blue-white-red ramp over
/// `[-max |v|, max |v|]`, complex fields a white-red ramp of `|v|`; masked
/// points are black. The top image row is the largest `y`.
pub fn render_heatmap(grid: &FieldGrid) -> Result<Vec<u8>, mesoscat_core::Error> {
    let (levels, n): (Vec<Option<f64>>, usize) = match &grid.values {
        FieldValues::Real(v) => {
            let m = v.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
            (
                v.iter()
                    .map(|x| x.map(|a| if m > 0.0 { a / m } else { 0.0 }))
                    .collect(),
                v.len(),
            )
        }
        FieldValues::Complex(v) => {
            let m = v.iter().flatten().fold(0.0f64, |m, x| m.max(x.norm()));
            (
                v.iter()
                    .map(|x| x.map(|a| if m > 0.0 { a.norm() / m } else { 0.0 }))
                    .collect(),
                v.len(),
            )
        }
    };
    if n != grid.nx * grid.ny {
        return Err(mesoscat_core::Error::InvalidParameter(format!(
            "grid has {n} samples for {}x{} points",
            grid.nx, grid.ny
        )));
    }
    if levels.iter().all(|v| v.is_none()) {
        return Err(mesoscat_core::Error::InvalidParameter(
            "empty image: every grid point is masked".into(),
        ));
    }
    let mut out = format!("P6\n{} {}\n255\n", grid.nx, grid.ny).into_bytes();
    for j in (0..grid.ny).rev() {
        for i in 0..grid.nx {
            out.extend(match levels[j * grid.nx + i] {
                None => [0, 0, 0],
                Some(t) => ramp(t),
            });
        }
    }
    Ok(out)
}

/// `-1` blue, `0` white, `+1` red.
fn ramp(t: f64) -> [u8; 3] {
    let t = t.clamp(-1.0, 1.0);
    let c = |v: f64| (255.0 * v).round() as u8;
    if t < 0.0 {
        [c(1.0 + t), c(1.0 + t), 255]
    } else {
        [255, c(1.0 - t), c(1.0 - t)]
    }
}
