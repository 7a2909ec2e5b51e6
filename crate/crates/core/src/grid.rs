//! Dense 2-D grids: raw grids, saliency maps and binary fixation maps.
//!
//! Saliency maps come in from disk as binary PGM (P5, 8- or 16-bit) or as a
//! plain-text grid ("W H" header, then H rows of W reals). Values are raw
//! non-negative saliency, no gamma handling.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense grid of scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Scalar> Grid<T> {
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != width * height {
            return Err(Error::shape(
                format!("{}x{} grid", width, height),
                format!("{} values", data.len()),
            ));
        }
        Ok(Grid {
            width,
            height,
            data,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Grid {
            width,
            height,
            data: vec![T::zero(); width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: T) {
        self.data[row * self.width + col] = v;
    }

    pub fn values(&self) -> &[T] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    /// Arithmetic mean over all cells.
    pub fn mean(&self) -> T {
        let sum = self.data.iter().fold(T::zero(), |acc, &v| acc + v);
        sum / T::from_f64_lossy(self.data.len() as f64)
    }

    /// Population standard deviation over all cells.
    pub fn std(&self) -> T {
        let mean = self.mean();
        let ss = self.data.iter().fold(T::zero(), |acc, &v| {
            let d = v - mean;
            acc + d * d
        });
        (ss / T::from_f64_lossy(self.data.len() as f64)).sqrt()
    }
}

/// Dense non-negative saliency grid (the raw map S).
#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyMap<T> {
    grid: Grid<T>,
}

impl<T: Scalar> SaliencyMap<T> {
    /// Validates finiteness and non-negativity of every cell.
    pub fn new(grid: Grid<T>) -> Result<Self> {
        for &v in grid.values() {
            if !v.is_finite() {
                return Err(Error::NonFinite("saliency map".into()));
            }
            if v < T::zero() {
                return Err(Error::InvalidConfig("saliency values must be >= 0".into()));
            }
        }
        Ok(SaliencyMap { grid })
    }

    pub fn from_values(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        SaliencyMap::new(Grid::new(width, height, data)?)
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn width(&self) -> usize {
        self.grid.width()
    }

    pub fn height(&self) -> usize {
        self.grid.height()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.grid.get(row, col)
    }

    pub fn values(&self) -> &[T] {
        self.grid.values()
    }

    /// Reads a saliency map, sniffing the format: binary PGM when the file
    /// starts with "P5", the plain-text grid format otherwise.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        if bytes.starts_with(b"P5") {
            Self::from_pgm_bytes(&bytes)
        } else {
            Self::from_text_grid(&bytes)
        }
    }

    /// Parses a binary PGM (P5) image, 8-bit or 16-bit big-endian.
    pub fn from_pgm_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cursor = std::io::Cursor::new(bytes);
        let magic = read_pgm_token(&mut cursor)?;
        if magic != "P5" {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected PGM magic P5, got {magic:?}"),
            });
        }
        let width: usize = parse_pgm_int(&read_pgm_token(&mut cursor)?)?;
        let height: usize = parse_pgm_int(&read_pgm_token(&mut cursor)?)?;
        let maxval: usize = parse_pgm_int(&read_pgm_token(&mut cursor)?)?;
        if width == 0 || height == 0 || maxval == 0 || maxval > 65535 {
            return Err(Error::Parse {
                line: 1,
                msg: format!("invalid PGM header {width}x{height} maxval {maxval}"),
            });
        }
        let npix = width * height;
        let mut data = Vec::with_capacity(npix);
        if maxval < 256 {
            let mut buf = vec![0u8; npix];
            cursor.read_exact(&mut buf)?;
            data.extend(buf.iter().map(|&b| T::from_f64_lossy(b as f64)));
        } else {
            let mut buf = vec![0u8; npix * 2];
            cursor.read_exact(&mut buf)?;
            data.extend(
                buf.chunks_exact(2)
                    .map(|c| T::from_f64_lossy(u16::from_be_bytes([c[0], c[1]]) as f64)),
            );
        }
        SaliencyMap::from_values(width, height, data)
    }

    /// Parses the plain-text grid format: first line "W H", then H rows of
    /// W whitespace-separated reals.
    pub fn from_text_grid(bytes: &[u8]) -> Result<Self> {
        let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse {
            line: 1,
            msg: format!("not utf-8: {e}"),
        })?;
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty grid file".into(),
        })?;
        let mut hdr = header.split_whitespace();
        let width: usize = hdr
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or(Error::Parse {
                line: 1,
                msg: "expected \"W H\" header".into(),
            })?;
        let height: usize = hdr
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or(Error::Parse {
                line: 1,
                msg: "expected \"W H\" header".into(),
            })?;
        let mut data = Vec::with_capacity(width * height);
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            for tok in line.split_whitespace() {
                let v: f64 = tok.parse().map_err(|e| Error::Parse {
                    line: idx + 1,
                    msg: format!("bad value {tok:?}: {e}"),
                })?;
                data.push(T::from_f64_lossy(v));
            }
        }
        if data.len() != width * height {
            return Err(Error::Parse {
                line: 1,
                msg: format!(
                    "grid body has {} values, header says {}x{}",
                    data.len(),
                    width,
                    height
                ),
            });
        }
        SaliencyMap::from_values(width, height, data)
    }

    /// Writes the plain-text grid format.
    pub fn write_text_grid(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "{} {}", self.width(), self.height())?;
        for row in 0..self.height() {
            let mut line = String::new();
            for col in 0..self.width() {
                if col > 0 {
                    line.push(' ');
                }
                line.push_str(&format!("{}", self.get(row, col).to_f64_lossy()));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

fn read_pgm_token(cursor: &mut std::io::Cursor<&[u8]>) -> Result<String> {
    let mut tok = String::new();
    let mut byte = [0u8; 1];
    // Skip whitespace and '#' comments between tokens.
    loop {
        cursor.read_exact(&mut byte)?;
        if byte[0] == b'#' {
            while byte[0] != b'\n' {
                cursor.read_exact(&mut byte)?;
            }
            continue;
        }
        if !byte[0].is_ascii_whitespace() {
            break;
        }
    }
    tok.push(byte[0] as char);
    loop {
        if cursor.read_exact(&mut byte).is_err() {
            break;
        }
        if byte[0].is_ascii_whitespace() {
            break;
        }
        tok.push(byte[0] as char);
    }
    Ok(tok)
}

fn parse_pgm_int(tok: &str) -> Result<usize> {
    tok.parse().map_err(|e| Error::Parse {
        line: 1,
        msg: format!("bad PGM header token {tok:?}: {e}"),
    })
}

/// Binary grid marking fixated cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixationMap {
    width: usize,
    height: usize,
    cells: Vec<u8>,
}

impl FixationMap {
    pub fn zeros(width: usize, height: usize) -> Self {
        FixationMap {
            width,
            height,
            cells: vec![0; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize) {
        self.cells[row * self.width + col] = 1;
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.cells[row * self.width + col] == 1
    }

    pub fn count_set(&self) -> usize {
        self.cells.iter().filter(|&&c| c == 1).count()
    }

    /// Row-major iterator over the set cells as (row, col).
    pub fn set_cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == 1)
            .map(move |(i, _)| (i / w, i % w))
    }
}

/// Writes a 16-bit binary PGM of a non-negative grid, scaled so the maximum
/// value maps to 65535. A constant-zero grid writes all zeros.
pub fn write_pgm16<T: Scalar>(grid: &Grid<T>, w: &mut impl Write) -> Result<()> {
    let maxv = grid
        .values()
        .iter()
        .fold(T::zero(), |acc, &v| if v > acc { v } else { acc });
    writeln!(w, "P5")?;
    writeln!(w, "{} {}", grid.width(), grid.height())?;
    writeln!(w, "65535")?;
    for &v in grid.values() {
        let scaled = if maxv > T::zero() {
            (v / maxv).to_f64_lossy() * 65535.0
        } else {
            0.0
        };
        let q = scaled.round().clamp(0.0, 65535.0) as u16;
        w.write_all(&q.to_be_bytes())?;
    }
    Ok(())
}
