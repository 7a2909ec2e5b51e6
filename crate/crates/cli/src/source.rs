//! File-backed data source: stimulus images from a directory, saliency maps
//! resolved against the dataset file's directory.

use std::path::{Path, PathBuf};

use gazetk::grid::SaliencyMap;
use gazetk::ingest::DatasetRecord;
use gazetk::tensor::{bilinear_resize, Tensor4};
use gazetk::trainer::DataSource;
use gazetk::{Error, Result};

pub struct FileDataSource {
    /// Directory holding stimulus images named by `image_id`.
    pub images_dir: Option<PathBuf>,
    /// Directory saliency references are relative to.
    pub base_dir: PathBuf,
}

impl FileDataSource {
    pub fn new(dataset_path: &Path, images_dir: Option<PathBuf>) -> Self {
        let base_dir = dataset_path
            .parent()
            .map(|p| p.to_path_buf())
            .unwrap_or_else(|| PathBuf::from("."));
        FileDataSource {
            images_dir,
            base_dir,
        }
    }
}

impl DataSource<f64> for FileDataSource {
    fn image(
        &self,
        record: &DatasetRecord<f64>,
        size: (usize, usize, usize),
    ) -> Result<Tensor4<f64>> {
        let dir = self.images_dir.as_ref().ok_or_else(|| {
            Error::InvalidConfig(format!(
                "--images directory required to load image {:?}",
                record.image_id
            ))
        })?;
        let path = dir.join(&record.image_id);
        load_image_tensor(&path, size)
    }

    fn saliency(&self, record: &DatasetRecord<f64>) -> Result<Option<SaliencyMap<f64>>> {
        match record.resolve_saliency(&self.base_dir) {
            Some(path) => Ok(Some(SaliencyMap::load(path)?)),
            None => Ok(None),
        }
    }
}

/// Decodes an image file into a (1, channels, h, w) tensor in `[0, 1]` and
/// bilinearly resizes it to the requested size. Channels must be 1 or 3.
pub fn load_image_tensor(path: &Path, size: (usize, usize, usize)) -> Result<Tensor4<f64>> {
    let (out_h, out_w, channels) = size;
    let img = image::open(path).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("image {}: {e}", path.display()),
    })?;
    let native = match channels {
        3 => {
            let rgb = img.to_rgb8();
            let (w, h) = (rgb.width() as usize, rgb.height() as usize);
            let mut t = Tensor4::zeros([1, 3, h, w]);
            for (x, y, p) in rgb.enumerate_pixels() {
                for c in 0..3 {
                    *t.at_mut(0, c, y as usize, x as usize) = p.0[c] as f64 / 255.0;
                }
            }
            t
        }
        1 => {
            let gray = img.to_luma8();
            let (w, h) = (gray.width() as usize, gray.height() as usize);
            let mut t = Tensor4::zeros([1, 1, h, w]);
            for (x, y, p) in gray.enumerate_pixels() {
                *t.at_mut(0, 0, y as usize, x as usize) = p.0[0] as f64 / 255.0;
            }
            t
        }
        n => {
            return Err(Error::InvalidConfig(format!(
                "model input must have 1 or 3 channels, config says {n}"
            )))
        }
    };
    bilinear_resize(&native, out_h, out_w)
}
