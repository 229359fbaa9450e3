//! Persistence: dense binary matrices, CSV tables and a small SVG writer.

use std::fmt::Write as _;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub const MATRIX_MAGIC: [u8; 8] = *b"BANDLAB1";
pub const HEADER_LEN: usize = 32;

/// Header of the binary matrix format: magic, `N`, `W`, and a flags word that
/// carries the bits of the flow time (`0.0` for static samples).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatrixHeader {
    pub n: u64,
    pub w: u64,
    pub t: f64,
}

/// Row-major little-endian `f64` payload after a 32-byte header.
pub fn write_matrix<W: Write>(mut out: W, h: &Matrix<f64>, w: usize, t: f64) -> Result<()> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch { expected: h.rows(), actual: h.cols() });
    }
    out.write_all(&MATRIX_MAGIC)?;
    out.write_all(&(h.rows() as u64).to_le_bytes())?;
    out.write_all(&(w as u64).to_le_bytes())?;
    out.write_all(&t.to_bits().to_le_bytes())?;
    for x in h.as_slice() {
        out.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

pub fn matrix_bytes(h: &Matrix<f64>, w: usize, t: f64) -> Result<Vec<u8>> {
    let mut buf = Vec::with_capacity(HEADER_LEN + 8 * h.as_slice().len());
    write_matrix(&mut buf, h, w, t)?;
    Ok(buf)
}

pub fn read_matrix<R: Read>(mut input: R) -> Result<(MatrixHeader, Matrix<f64>)> {
    let mut head = [0u8; HEADER_LEN];
    input.read_exact(&mut head)?;
    if head[..8] != MATRIX_MAGIC {
        return Err(Error::Format("bad magic in matrix header".into()));
    }
    let word = |i: usize| u64::from_le_bytes(head[i..i + 8].try_into().expect("8 bytes"));
    let header = MatrixHeader { n: word(8), w: word(16), t: f64::from_bits(word(24)) };
    let n = usize::try_from(header.n).map_err(|_| Error::Format("dimension overflow".into()))?;
    let len = n.checked_mul(n).ok_or_else(|| Error::Format("dimension overflow".into()))?;
    let mut data = Vec::with_capacity(len);
    let mut buf = [0u8; 8];
    for _ in 0..len {
        input.read_exact(&mut buf)?;
        data.push(f64::from_le_bytes(buf));
    }
    let mut rest = Vec::new();
    input.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(Error::Format(format!("{} trailing bytes after matrix payload", rest.len())));
    }
    Ok((header, Matrix::from_vec(n, n, data)?))
}

/// Fixed 17-significant-digit rendering.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A cell of a CSV row.
#[derive(Clone, Debug)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_f64(*v),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// In-memory CSV table.
#[derive(Clone, Debug)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width must match header");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let to_err = |e: csv::Error| Error::Format(e.to_string());
        w.write_record(&self.header).map_err(to_err)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render)).map_err(to_err)?;
        }
        w.into_inner().map_err(|e| Error::Format(e.to_string()))
    }
}

/// Parse a CSV produced by [`Table::to_bytes`] into a header and string rows.
pub fn parse_csv(bytes: &[u8]) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::Reader::from_reader(bytes);
    let to_err = |e: csv::Error| Error::Format(e.to_string());
    let header = r.headers().map_err(to_err)?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec.map_err(to_err)?.iter().map(str::to_owned).collect());
    }
    Ok((header, rows))
}

/// Minimal SVG plot: polylines, points, a diagonal and axis ticks.
#[derive(Clone, Debug)]
pub struct SvgPlot {
    width: f64,
    height: f64,
    margin: f64,
    x: (f64, f64),
    y: (f64, f64),
    body: String,
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

impl SvgPlot {
    pub fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        Self { width: 640.0, height: 480.0, margin: 40.0, x, y, body: String::new() }
    }

    fn px(&self, x: f64) -> f64 {
        self.margin + (x - self.x.0) / (self.x.1 - self.x.0) * (self.width - 2.0 * self.margin)
    }

    fn py(&self, y: f64) -> f64 {
        self.height - self.margin - (y - self.y.0) / (self.y.1 - self.y.0) * (self.height - 2.0 * self.margin)
    }

    pub fn color(i: usize) -> &'static str {
        PALETTE[i % PALETTE.len()]
    }

    /// Polyline clipped to the y-range (points outside split the line).
    pub fn polyline(&mut self, pts: &[(f64, f64)], color: &str) {
        let mut seg: Vec<(f64, f64)> = Vec::new();
        let flush = |seg: &mut Vec<(f64, f64)>, body: &mut String| {
            if seg.len() >= 2 {
                let coords: Vec<String> = seg.iter().map(|(a, b)| format!("{a:.2},{b:.2}")).collect();
                let _ = writeln!(body, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, coords.join(" "));
            }
            seg.clear();
        };
        let mut body = std::mem::take(&mut self.body);
        for &(x, y) in pts {
            if y.is_finite() && y >= self.y.0 && y <= self.y.1 {
                seg.push((self.px(x), self.py(y)));
            } else {
                flush(&mut seg, &mut body);
            }
        }
        flush(&mut seg, &mut body);
        self.body = body;
    }

    pub fn point(&mut self, x: f64, y: f64, color: &str) {
        let _ = writeln!(self.body, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, self.px(x), self.py(y));
    }

    /// Dashed line `y = x` across the plot range.
    pub fn diagonal(&mut self) {
        let lo = self.x.0.max(self.y.0);
        let hi = self.x.1.min(self.y.1);
        if lo < hi {
            let _ = writeln!(
                self.body,
                r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#444" stroke-dasharray="4 3"/>"##,
                self.px(lo),
                self.py(lo),
                self.px(hi),
                self.py(hi)
            );
        }
    }

    /// Short vertical marks on the x-axis.
    pub fn x_ticks(&mut self, xs: &[f64], color: &str) {
        let base = self.height - self.margin;
        for &x in xs.iter().filter(|&&x| x >= self.x.0 && x <= self.x.1) {
            let _ = writeln!(
                self.body,
                r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="{color}"/>"#,
                self.px(x),
                base,
                base - 8.0
            );
        }
    }

    pub fn render(&self, title: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
            w = self.width,
            h = self.height
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let (x0, x1, y0, y1) = (self.margin, self.width - self.margin, self.height - self.margin, self.margin);
        let _ = writeln!(s, r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#, x1 - x0, y0 - y1);
        for i in 0..=4 {
            let fx = self.x.0 + (self.x.1 - self.x.0) * i as f64 / 4.0;
            let fy = self.y.0 + (self.y.1 - self.y.0) * i as f64 / 4.0;
            let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="middle">{fx:.2}</text>"#, self.px(fx), y0 + 14.0);
            let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{fy:.2}</text>"#, x0 - 4.0, self.py(fy) + 3.0);
        }
        let _ = writeln!(s, r#"<text x="{:.2}" y="20" font-size="12" text-anchor="middle">{title}</text>"#, self.width / 2.0);
        s.push_str(&self.body);
        s.push_str("</svg>\n");
        s
    }
}
