//! Shared helpers for CLI integration and acceptance tests.

use std::path::{Path, PathBuf};
use std::process::Command;

pub const BIN: &str = env!("CARGO_BIN_EXE_gazetk");

/// Runs the binary and captures its output.
pub fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN)
        .args(args)
        .output()
        .expect("failed to run gazetk");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// Writes a binary 8-bit PGM built from a per-pixel intensity function.
pub fn write_pgm(path: &Path, w: usize, h: usize, f: impl Fn(usize, usize) -> u8) {
    let mut bytes = format!("P5\n{w} {h}\n255\n").into_bytes();
    for y in 0..h {
        for x in 0..w {
            bytes.push(f(x, y));
        }
    }
    std::fs::write(path, bytes).unwrap();
}

/// Four Gaussian-blob images whose ground-truth scanpaths sit on the blob
/// centers, written as a dataset + images directory.
pub fn write_blob_fixture(dir: &Path) -> (PathBuf, PathBuf) {
    let images = dir.join("images");
    std::fs::create_dir_all(&images).unwrap();
    let centers = [(0.2, 0.2), (0.8, 0.2), (0.2, 0.8), (0.8, 0.8)];
    let mut jsonl = String::new();
    for (i, (cx, cy)) in centers.iter().enumerate() {
        let name = format!("blob{i}.pgm");
        write_pgm(&images.join(&name), 16, 16, |x, y| {
            let dx = x as f64 / 15.0 - cx;
            let dy = y as f64 / 15.0 - cy;
            (255.0 * (-(dx * dx + dy * dy) / 0.03).exp()) as u8
        });
        let point = format!("[{cx},{cy}]");
        let sp = format!("[{}]", vec![point; 8].join(","));
        jsonl.push_str(&format!(
            "{{\"image_id\":\"{name}\",\"width\":16,\"height\":16,\"scanpaths\":[{sp}]}}\n"
        ));
    }
    let dataset = dir.join("blobs.jsonl");
    std::fs::write(&dataset, jsonl).unwrap();
    (dataset, images)
}

/// Minimal well-formedness check for the SVG subset the renderer emits:
/// every opened tag is closed in order and self-closed tags are balanced.
#[allow(dead_code)] // not every test target uses every helper
pub fn assert_well_formed_xml(doc: &str) {
    let mut stack: Vec<String> = Vec::new();
    let mut rest = doc;
    while let Some(start) = rest.find('<') {
        let end = rest[start..].find('>').expect("unclosed tag") + start;
        let tag = &rest[start + 1..end];
        rest = &rest[end + 1..];
        if tag.starts_with('?') || tag.starts_with('!') {
            continue;
        }
        if let Some(name) = tag.strip_prefix('/') {
            let open = stack.pop().unwrap_or_else(|| panic!("stray closer </{name}>"));
            assert_eq!(open, name.trim(), "mismatched tag");
        } else if !tag.ends_with('/') {
            let name = tag.split_whitespace().next().unwrap().to_string();
            stack.push(name);
        }
    }
    assert!(stack.is_empty(), "unclosed tags: {stack:?}");
}

/// A train-report JSON with the wall-clock fields zeroed, for byte
/// comparison across runs.
pub fn normalize_report(json: &str) -> String {
    let mut value: serde_json::Value = serde_json::from_str(json).expect("report json");
    if let Some(epochs) = value.get_mut("epochs").and_then(|e| e.as_array_mut()) {
        for epoch in epochs {
            if let Some(w) = epoch.get_mut("wall_secs") {
                *w = serde_json::json!(0.0);
            }
        }
    }
    value.to_string()
}
