//! Property tests for the metric and data-model invariants.

use gazetk::baselines::{center_bias, wta_scanpath, WtaConfig};
use gazetk::gaze::{rasterize, saccade_vectors, Fixation, Scanpath};
use gazetk::grid::SaliencyMap;
use gazetk::ingest::{load_dataset, write_dataset, CoordinateMode, DatasetRecord};
use gazetk::metrics::{congruency, multimatch, normalize_saliency, nss, otsu_threshold};
use proptest::prelude::*;

fn fixation_strategy() -> impl Strategy<Value = Fixation<f64>> {
    (0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(x, y)| Fixation::new(x, y))
}

fn scanpath_strategy(min_len: usize) -> impl Strategy<Value = Scanpath<f64>> {
    prop::collection::vec(fixation_strategy(), min_len..=12)
        .prop_map(|fx| Scanpath::new(fx, "prop", 100, 100).unwrap())
}

fn saliency_strategy() -> impl Strategy<Value = SaliencyMap<f64>> {
    (2usize..=12, 2usize..=12)
        .prop_flat_map(|(w, h)| {
            prop::collection::vec(0.0..=255.0f64, w * h)
                .prop_map(move |v| SaliencyMap::from_values(w, h, v).unwrap())
        })
}

proptest! {
    #[test]
    fn rasterize_is_permutation_invariant(sp in scanpath_strategy(1), perm_seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let map_a = rasterize(&sp, 16, 16).unwrap();
        let mut fx = sp.fixations.clone();
        fx.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(perm_seed));
        let shuffled = Scanpath::new(fx, "prop", 100, 100).unwrap();
        let map_b = rasterize(&shuffled, 16, 16).unwrap();
        prop_assert_eq!(map_a, map_b);
    }

    #[test]
    fn rasterize_set_count_bounds(sp in scanpath_strategy(1)) {
        let map = rasterize(&sp, 9, 7).unwrap();
        let n = map.count_set();
        prop_assert!(n >= 1 && n <= sp.len());
    }

    #[test]
    fn saccades_telescope(sp in scanpath_strategy(2)) {
        let v = saccade_vectors(&sp).unwrap();
        let sum_dx: f64 = v.iter().map(|s| s.dx).sum();
        let sum_dy: f64 = v.iter().map(|s| s.dy).sum();
        let first = sp.fixations.first().unwrap();
        let last = sp.fixations.last().unwrap();
        prop_assert!((sum_dx - (last.x - first.x)).abs() < 1e-12);
        prop_assert!((sum_dy - (last.y - first.y)).abs() < 1e-12);
    }

    #[test]
    fn multimatch_components_bounded(a in scanpath_strategy(2), b in scanpath_strategy(2)) {
        let r = multimatch(&a, &b).unwrap();
        for (name, v) in [
            ("shape", r.shape),
            ("direction", r.direction),
            ("length", r.length),
            ("position", r.position),
            ("score", r.score),
        ] {
            prop_assert!((0.0..=1.0).contains(&v), "{} = {}", name, v);
        }
        prop_assert!((r.score - (r.shape + r.direction + r.length + r.position) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn multimatch_score_is_symmetric(a in scanpath_strategy(2), b in scanpath_strategy(2)) {
        let ab = multimatch(&a, &b).unwrap();
        let ba = multimatch(&b, &a).unwrap();
        prop_assert!((ab.score - ba.score).abs() < 1e-9, "{} vs {}", ab.score, ba.score);
    }

    #[test]
    fn normalized_saliency_is_zscored(s in saliency_strategy()) {
        prop_assume!(s.grid().std() > 1e-9);
        let p = normalize_saliency(&s).unwrap();
        prop_assert!(p.mean().abs() < 1e-9);
        prop_assert!((p.std() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn nss_is_affine_invariant(s in saliency_strategy(), sp in scanpath_strategy(1),
                               alpha in 0.1..=10.0f64, beta in 0.0..=50.0f64) {
        prop_assume!(s.grid().std() > 1e-9);
        let fixmap = rasterize(&sp, s.width(), s.height()).unwrap();
        let base = nss(&s, &fixmap).unwrap();
        let scaled = SaliencyMap::from_values(
            s.width(),
            s.height(),
            s.values().iter().map(|&v| alpha * v + beta).collect(),
        ).unwrap();
        let transformed = nss(&scaled, &fixmap).unwrap();
        prop_assert!((base - transformed).abs() < 1e-9, "{} vs {}", base, transformed);
    }

    #[test]
    fn congruency_bounded_and_monotone(s in saliency_strategy(), sp in scanpath_strategy(1)) {
        let c = congruency(&s, &sp).unwrap();
        prop_assert!((0.0..=1.0).contains(&c));

        // Appending a fixation on a salient cell never decreases the ratio.
        let threshold = otsu_threshold(&s);
        let salient = (0..s.height() * s.width()).find(|i| {
            s.values()[*i] > threshold
        });
        if let Some(i) = salient {
            let row = i / s.width();
            let col = i % s.width();
            let x = if s.width() == 1 { 0.0 } else { col as f64 / (s.width() - 1) as f64 };
            let y = if s.height() == 1 { 0.0 } else { row as f64 / (s.height() - 1) as f64 };
            let mut fx = sp.fixations.clone();
            fx.push(Fixation::new(x, y));
            let extended = Scanpath::new(fx, "prop", 100, 100).unwrap();
            let c2 = congruency(&s, &extended).unwrap();
            prop_assert!(c2 >= c - 1e-12, "{} -> {}", c, c2);
        }
    }

    #[test]
    fn dataset_roundtrip_bit_identical(
        n_records in 1usize..4,
        seed in any::<u64>(),
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let records: Vec<DatasetRecord<f64>> = (0..n_records).map(|i| {
            let n_sps = rng.random_range(1..=3);
            let scanpaths = (0..n_sps).map(|_| {
                let n_fx = rng.random_range(1..=6);
                let mut t = 0.0f64;
                let fx = (0..n_fx).map(|_| {
                    t += rng.random_range(0.0..500.0);
                    let with_t: bool = rng.random_bool(0.5);
                    Fixation::with_timing(
                        rng.random_range(0.0..=1.0),
                        rng.random_range(0.0..=1.0),
                        with_t.then_some(t),
                        (with_t && rng.random_bool(0.5)).then(|| rng.random_range(0.0..400.0)),
                    )
                }).collect();
                Scanpath::new(fx, format!("img{i}"), 640, 480).unwrap()
            }).collect();
            DatasetRecord {
                image_id: format!("img{i}"),
                image_width: 640,
                image_height: 480,
                scanpaths,
                saliency_path: rng.random_bool(0.3).then(|| format!("maps/img{i}.pgm")),
            }
        }).collect();

        let mut first = Vec::new();
        write_dataset(&records, &mut first).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.jsonl");
        std::fs::write(&path, &first).unwrap();
        let loaded: Vec<DatasetRecord<f64>> = load_dataset(&path, CoordinateMode::Normalized).unwrap();
        let mut second = Vec::new();
        write_dataset(&loaded, &mut second).unwrap();
        prop_assert_eq!(first, second);
    }
}

/// WTA on its own saliency map should beat center bias on congruency, in
/// expectation over random maps without a central peak.
#[test]
fn wta_congruency_beats_center_bias_on_average() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    let mut wta_sum = 0.0;
    let mut cb_sum = 0.0;
    let n_maps = 50;
    for i in 0..n_maps {
        // A few bright off-center blobs over a dim noise floor.
        let dim = 24usize;
        let mut vals = vec![0.0f64; dim * dim];
        for v in vals.iter_mut() {
            *v = rng.random_range(0.0..0.1);
        }
        for _ in 0..3 {
            let cx = rng.random_range(0.0..1.0);
            let cy = rng.random_range(0.0..1.0);
            for y in 0..dim {
                for x in 0..dim {
                    let dx = (x as f64 + 0.5) / dim as f64 - cx;
                    let dy = (y as f64 + 0.5) / dim as f64 - cy;
                    vals[y * dim + x] += (-(dx * dx + dy * dy) / 0.01).exp();
                }
            }
        }
        let s = SaliencyMap::from_values(dim, dim, vals).unwrap();
        let wta = wta_scanpath(&s, &WtaConfig::default()).unwrap();
        let cb: Scanpath<f64> = center_bias(8, 1000 + i).unwrap();
        wta_sum += congruency(&s, &wta).unwrap();
        cb_sum += congruency(&s, &cb).unwrap();
    }
    assert!(
        wta_sum / n_maps as f64 >= cb_sum / n_maps as f64,
        "wta {} vs center-bias {}",
        wta_sum / n_maps as f64,
        cb_sum / n_maps as f64
    );
}
