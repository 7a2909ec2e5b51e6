//! Dataset ingestion: JSON-Lines loading, length statistics, training-target
//! selection and fixed-length resampling.
//!
//! The canonical dataset format is JSON Lines, one record per line:
//!
//! ```text
//! {"image_id": str, "width": int, "height": int,
//!  "scanpaths": [[[x, y, t?, dur?], ...], ...], "saliency": optional str}
//! ```
//!
//! Fixations are positional arrays of 2 to 4 numbers. Pixel coordinates are
//! normalized on load by dividing by `(width - 1, height - 1)`.

use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaze::{Fixation, Scanpath};
use crate::scalar::Scalar;

/// How raw coordinates in a dataset file are interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoordinateMode {
    /// Already normalized to `[0, 1]`.
    #[default]
    Normalized,
    /// Pixel indices starting at 0; valid range `0..=dim-1`.
    PixelOrigin0,
    /// Pixel indices starting at 1; valid range `1..=dim`.
    PixelOrigin1,
}

/// One image with its observers' scanpaths and an optional saliency file
/// reference (relative to the dataset file).
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRecord<T> {
    pub image_id: String,
    pub image_width: u32,
    pub image_height: u32,
    pub scanpaths: Vec<Scanpath<T>>,
    pub saliency_path: Option<String>,
}

impl<T: Scalar> DatasetRecord<T> {
    /// Resolves the saliency reference against the dataset file's directory.
    pub fn resolve_saliency(&self, base_dir: &Path) -> Option<PathBuf> {
        self.saliency_path.as_ref().map(|p| base_dir.join(p))
    }
}

/// Scanpath-length statistics in the Table-style layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsSummary {
    pub min: usize,
    pub max: usize,
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub mode: usize,
    pub mode_share: f64,
    pub count: usize,
}

#[derive(Deserialize)]
struct RawRecord {
    image_id: String,
    width: u32,
    height: u32,
    scanpaths: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    saliency: Option<String>,
}

#[derive(Serialize)]
struct OutRecord<'a> {
    image_id: &'a str,
    width: u32,
    height: u32,
    scanpaths: Vec<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    saliency: Option<&'a str>,
}

/// Loads a JSON-Lines dataset file. Malformed lines error with their
/// 1-based line number; out-of-bounds coordinates error with the image id.
pub fn load_dataset<T: Scalar>(
    path: impl AsRef<Path>,
    mode: CoordinateMode,
) -> Result<Vec<DatasetRecord<T>>> {
    let file = std::fs::File::open(path.as_ref())?;
    let reader = BufReader::new(file);
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(parse_record(&line, idx + 1, mode)?);
    }
    Ok(records)
}

fn parse_record<T: Scalar>(
    line: &str,
    line_no: usize,
    mode: CoordinateMode,
) -> Result<DatasetRecord<T>> {
    let raw: RawRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
        line: line_no,
        msg: e.to_string(),
    })?;
    if raw.width == 0 || raw.height == 0 {
        return Err(Error::Parse {
            line: line_no,
            msg: format!("image {:?} has zero dimensions", raw.image_id),
        });
    }
    if raw.scanpaths.is_empty() {
        return Err(Error::Parse {
            line: line_no,
            msg: format!("image {:?} has no scanpaths", raw.image_id),
        });
    }
    let mut scanpaths = Vec::with_capacity(raw.scanpaths.len());
    for (si, sp) in raw.scanpaths.iter().enumerate() {
        if sp.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("scanpath {si} of {:?} is empty", raw.image_id),
            });
        }
        let mut fixations = Vec::with_capacity(sp.len());
        let mut prev_t: Option<f64> = None;
        for f in sp {
            if f.len() < 2 || f.len() > 4 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("fixation must have 2..=4 numbers, got {}", f.len()),
                });
            }
            let x = normalize_coord(f[0], raw.width, mode, "x", &raw.image_id)?;
            let y = normalize_coord(f[1], raw.height, mode, "y", &raw.image_id)?;
            let t = f.get(2).copied();
            let dur = f.get(3).copied();
            for (name, v) in [("t", t), ("dur", dur)] {
                if let Some(v) = v {
                    if !v.is_finite() || v < 0.0 {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!("{name} must be a non-negative real, got {v}"),
                        });
                    }
                }
            }
            if let (Some(prev), Some(cur)) = (prev_t, t) {
                if cur < prev {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!(
                            "timestamps must be non-decreasing ({cur} after {prev} in {:?})",
                            raw.image_id
                        ),
                    });
                }
            }
            if t.is_some() {
                prev_t = t;
            }
            fixations.push(Fixation::with_timing(
                x,
                y,
                t.map(T::from_f64_lossy),
                dur.map(T::from_f64_lossy),
            ));
        }
        scanpaths.push(Scanpath::new(
            fixations,
            raw.image_id.clone(),
            raw.width,
            raw.height,
        )?);
    }
    Ok(DatasetRecord {
        image_id: raw.image_id,
        image_width: raw.width,
        image_height: raw.height,
        scanpaths,
        saliency_path: raw.saliency,
    })
}

fn normalize_coord<T: Scalar>(
    v: f64,
    dim: u32,
    mode: CoordinateMode,
    axis: &str,
    image_id: &str,
) -> Result<T> {
    if !v.is_finite() {
        return Err(Error::OutOfBounds {
            image_id: image_id.to_string(),
            msg: format!("non-finite {axis} coordinate"),
        });
    }
    let dim = dim as f64;
    let norm = match mode {
        CoordinateMode::Normalized => {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfBounds {
                    image_id: image_id.to_string(),
                    msg: format!("{axis}={v} outside [0, 1]"),
                });
            }
            v
        }
        CoordinateMode::PixelOrigin0 => {
            if v < 0.0 || v > dim - 1.0 {
                return Err(Error::OutOfBounds {
                    image_id: image_id.to_string(),
                    msg: format!("{axis}={v} outside pixel range 0..={}", dim - 1.0),
                });
            }
            if dim > 1.0 {
                v / (dim - 1.0)
            } else {
                0.0
            }
        }
        CoordinateMode::PixelOrigin1 => {
            if v < 1.0 || v > dim {
                return Err(Error::OutOfBounds {
                    image_id: image_id.to_string(),
                    msg: format!("{axis}={v} outside pixel range 1..={dim}"),
                });
            }
            if dim > 1.0 {
                (v - 1.0) / (dim - 1.0)
            } else {
                0.0
            }
        }
    };
    Ok(T::from_f64_lossy(norm))
}

/// Serializes records back to the canonical JSON-Lines format with
/// normalized coordinates. Writing then re-loading then writing again is
/// byte-identical.
pub fn write_dataset<T: Scalar>(
    records: &[DatasetRecord<T>],
    w: &mut impl Write,
) -> Result<()> {
    for r in records {
        let scanpaths: Vec<Vec<Vec<f64>>> = r
            .scanpaths
            .iter()
            .map(|sp| {
                sp.fixations
                    .iter()
                    .map(|f| {
                        let mut arr = vec![f.x.to_f64_lossy(), f.y.to_f64_lossy()];
                        if let Some(t) = f.t {
                            arr.push(t.to_f64_lossy());
                            if let Some(dur) = f.dur {
                                arr.push(dur.to_f64_lossy());
                            }
                        }
                        arr
                    })
                    .collect()
            })
            .collect();
        for (sp, out) in r.scanpaths.iter().zip(&scanpaths) {
            for (f, arr) in sp.fixations.iter().zip(out) {
                if f.dur.is_some() && arr.len() < 4 {
                    return Err(Error::InvalidConfig(
                        "fixation has dur but no t; positional format cannot express it".into(),
                    ));
                }
            }
        }
        let out = OutRecord {
            image_id: &r.image_id,
            width: r.image_width,
            height: r.image_height,
            scanpaths,
            saliency: r.saliency_path.as_deref(),
        };
        let json = serde_json::to_string(&out).map_err(|e| Error::Parse {
            line: 0,
            msg: e.to_string(),
        })?;
        writeln!(w, "{json}")?;
    }
    Ok(())
}

/// Statistics over the multiset of per-scanpath fixation counts.
///
/// The standard deviation is the population form; the median of an even
/// count is the lower-middle element; mode ties break toward the smallest
/// length.
pub fn length_stats<T: Scalar>(records: &[DatasetRecord<T>]) -> Result<StatsSummary> {
    let mut lengths: Vec<usize> = records
        .iter()
        .flat_map(|r| r.scanpaths.iter().map(|sp| sp.len()))
        .collect();
    if lengths.is_empty() {
        return Err(Error::EmptyDataset);
    }
    lengths.sort_unstable();
    let count = lengths.len();
    let min = lengths[0];
    let max = lengths[count - 1];
    let median = lengths[(count - 1) / 2] as f64;
    let mean = lengths.iter().map(|&l| l as f64).sum::<f64>() / count as f64;
    let ss = lengths
        .iter()
        .map(|&l| {
            let d = l as f64 - mean;
            d * d
        })
        .sum::<f64>();
    let std = (ss / count as f64).sqrt();

    let mut mode = lengths[0];
    let mut mode_count = 0usize;
    let mut i = 0;
    while i < count {
        let mut j = i;
        while j < count && lengths[j] == lengths[i] {
            j += 1;
        }
        if j - i > mode_count {
            mode_count = j - i;
            mode = lengths[i];
        }
        i = j;
    }

    Ok(StatsSummary {
        min,
        max,
        mean,
        median,
        std,
        mode,
        mode_share: mode_count as f64 / count as f64,
        count,
    })
}

/// FNV-1a hash of the image id; stable across platforms and runs.
fn image_id_hash(image_id: &str) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for b in image_id.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Derives a per-image RNG seed from a master seed and a stable hash of the
/// image id, so per-image randomness is independent of dataset order.
pub fn per_image_seed(seed: u64, image_id: &str) -> u64 {
    seed.wrapping_add(image_id_hash(image_id).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Uniformly picks one of the record's scanpaths, deterministically from
/// `(seed, image_id)`.
pub fn select_random_scanpath<T: Scalar>(
    record: &DatasetRecord<T>,
    seed: u64,
) -> &Scanpath<T> {
    let n = record.scanpaths.len();
    if n == 1 {
        return &record.scanpaths[0];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ image_id_hash(&record.image_id));
    let idx = rng.random_range(0..n);
    &record.scanpaths[idx]
}

/// Truncates or pads (repeating the last fixation) to exactly `n`
/// fixations. Timestamps and durations are dropped.
pub fn resample_scanpath<T: Scalar>(scanpath: &Scanpath<T>, n: usize) -> Scanpath<T> {
    let mut fixations: Vec<Fixation<T>> = scanpath
        .fixations
        .iter()
        .take(n)
        .map(|f| Fixation::new(f.x, f.y))
        .collect();
    let last = *fixations.last().expect("scanpath is non-empty");
    while fixations.len() < n {
        fixations.push(last);
    }
    Scanpath {
        fixations,
        image_id: scanpath.image_id.clone(),
        image_width: scanpath.image_width,
        image_height: scanpath.image_height,
    }
}
