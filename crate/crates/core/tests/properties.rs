use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use sigpipe_core::augment::{augment_basepoint, augment_invisibility_reset, augment_lead_lag, augment_time};
use sigpipe_core::lyndon::{logsignature_len, witt, LyndonBasis};
use sigpipe_core::oracle::signature_oracle;
use sigpipe_core::pipeline::run_pipeline;
use sigpipe_core::rescale::{pre_scale_factor, rescale_post, rescale_pre, unscale_post};
use sigpipe_core::signature::{feature_names, logsignature, signature, signature_len, signature_tensor};
use sigpipe_core::{AugmentationSpec, PipelineConfig, RescaleSpec, TimeSeries, Transform, TruncatedTensor, WindowSpec};

fn random_series(rng: &mut StdRng, n: usize, d: usize) -> TimeSeries {
    let values = (0..n * d).map(|_| rng.random_range(-1.0..1.0)).collect();
    TimeSeries::with_default_times(d, values).unwrap()
}

fn random_lie(rng: &mut StdRng, d: usize, depth: usize) -> TruncatedTensor {
    let mut levels = vec![vec![0.0]];
    for k in 1..=depth {
        levels.push((0..d.pow(k as u32)).map(|_| rng.random_range(-1.0..1.0)).collect());
    }
    TruncatedTensor::from_levels(d, &levels).unwrap()
}

/// Per-level relative comparison of two level-blocked feature vectors.
fn levels_close(a: &[f64], b: &[f64], d: usize, depth: usize, tol: f64) -> bool {
    assert_eq!(a.len(), b.len());
    let mut off = 0;
    for k in 1..=depth {
        let len = d.pow(k as u32);
        let (x, y) = (&a[off..off + len], &b[off..off + len]);
        let scale = y.iter().fold(1e-12f64, |m, v| m.max(v.abs()));
        let err = x.iter().zip(y).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
        if err > tol * scale {
            return false;
        }
        off += len;
    }
    true
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| f64::max(m, (x - y).abs()))
}

// ---- tensor algebra ----

#[test]
fn tensor_mul_is_associative() {
    let mut rng = StdRng::seed_from_u64(1);
    for _ in 0..50 {
        let d = rng.random_range(1..=3);
        let depth = rng.random_range(1..=4);
        let mk = |rng: &mut StdRng| {
            let mut t = random_lie(rng, d, depth);
            let mut levels: Vec<Vec<f64>> = (0..=depth).map(|k| t.level(k).to_vec()).collect();
            levels[0][0] = rng.random_range(-2.0..2.0);
            t = TruncatedTensor::from_levels(d, &levels).unwrap();
            t
        };
        let (a, b, c) = (mk(&mut rng), mk(&mut rng), mk(&mut rng));
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        for (x, y) in left.as_slice().iter().zip(right.as_slice()) {
            assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()));
        }
    }
}

#[test]
fn log_inverts_exp_series_on_lie_elements() {
    let mut rng = StdRng::seed_from_u64(2);
    for _ in 0..50 {
        let d = rng.random_range(1..=3);
        let depth = rng.random_range(1..=4);
        let lie = random_lie(&mut rng, d, depth);
        let back = lie.exp_series().unwrap().log().unwrap();
        assert!(
            max_abs_diff(back.as_slice(), lie.as_slice()) <= 1e-12,
            "d={d} N={depth}"
        );
    }
}

#[test]
fn log_of_segment_exp_is_pure_level_one() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..50 {
        let d = rng.random_range(1..=3);
        let depth = rng.random_range(1..=4);
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.5..1.5)).collect();
        let l = TruncatedTensor::exp(&v, depth).unwrap().log().unwrap();
        assert_eq!(l.scalar(), 0.0);
        assert!(max_abs_diff(l.level(1), &v) <= 1e-12);
        for k in 2..=depth {
            assert!(l.level(k).iter().all(|x| x.abs() <= 1e-12));
        }
    }
}

fn is_lyndon(word: &[usize]) -> bool {
    (1..word.len()).all(|r| {
        let rotated: Vec<usize> = word[r..].iter().chain(&word[..r]).copied().collect();
        word < rotated.as_slice()
    })
}

#[test]
fn lyndon_counts_match_witt_and_brute_force() {
    for d in 1..=5 {
        for depth in 1..=6 {
            let basis = LyndonBasis::new(d, depth);
            for k in 1..=depth {
                let mut brute = 0;
                let mut word = vec![0usize; k];
                for code in 0..d.pow(k as u32) {
                    let mut c = code;
                    for pos in (0..k).rev() {
                        word[pos] = c % d;
                        c /= d;
                    }
                    if is_lyndon(&word) {
                        brute += 1;
                    }
                }
                assert_eq!(basis.count_at(k), brute, "d={d} k={k}");
                assert_eq!(witt(d, k), brute, "d={d} k={k}");
            }
            assert!(basis.words().iter().all(|w| is_lyndon(w)));
            assert_eq!(basis.len(), logsignature_len(d, depth));
        }
    }
}

// ---- signature core ----

#[test]
fn signature_matches_oracle() {
    let mut rng = StdRng::seed_from_u64(4);
    let l_path = TimeSeries::from_rows(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]).unwrap();
    let fast = signature(&l_path, 2).unwrap();
    let slow = signature_oracle(&l_path, 2, 1000).unwrap();
    assert!(levels_close(&fast.values, &slow.values, 2, 2, 1e-6));

    let ts = random_series(&mut rng, 8, 3);
    let fast = signature(&ts, 3).unwrap();
    let slow = signature_oracle(&ts, 3, 2000).unwrap();
    assert!(levels_close(&fast.values, &slow.values, 3, 3, 1e-6));
}

#[test]
fn oracle_converges() {
    let mut rng = StdRng::seed_from_u64(5);
    let ts = random_series(&mut rng, 6, 2);
    let exact = signature(&ts, 4).unwrap().values;
    let coarse = max_abs_diff(&signature_oracle(&ts, 4, 10).unwrap().values, &exact);
    let fine = max_abs_diff(&signature_oracle(&ts, 4, 100).unwrap().values, &exact);
    assert!(fine < coarse / 50.0, "coarse {coarse} fine {fine}");
}

#[test]
fn logsignature_matches_tensor_route() {
    let mut rng = StdRng::seed_from_u64(6);
    let ts = random_series(&mut rng, 5, 2);
    let direct = logsignature(&ts, 3).unwrap().values;
    let lie = signature_tensor(&ts, 3).unwrap().log().unwrap();
    let basis = LyndonBasis::new(2, 3);
    let via_tensor: Vec<f64> = basis
        .words()
        .iter()
        .map(|w| {
            let idx = w.iter().fold(0, |acc, &l| acc * 2 + l);
            lie.level(w.len())[idx]
        })
        .collect();
    assert_eq!(direct, via_tensor);
    assert_eq!(direct.len(), 5);
}

#[test]
fn logsignature_level_one_is_displacement() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..20 {
        let n = rng.random_range(2..=8);
        let ts = random_series(&mut rng, n, 2);
        let ls = logsignature(&ts, 3).unwrap().values;
        for (c, l) in ls.iter().take(2).enumerate() {
            let disp = ts.row(n - 1)[c] - ts.row(0)[c];
            assert!((l - disp).abs() <= 1e-14);
        }
    }
}

#[test]
fn dimension_formulas() {
    let mut rng = StdRng::seed_from_u64(8);
    for d in 1usize..=5 {
        for depth in 1..=6 {
            let expected: usize = (1..=depth).map(|k| d.pow(k as u32)).sum();
            assert_eq!(signature_len(d, depth), expected);
            assert_eq!(feature_names(d, depth, Transform::Signature).len(), expected);
            if d.pow(depth as u32) <= 1024 {
                let ts = random_series(&mut rng, 3, d);
                assert_eq!(signature(&ts, depth).unwrap().values.len(), expected);
                assert_eq!(
                    logsignature(&ts, depth).unwrap().values.len(),
                    logsignature_len(d, depth)
                );
            }
        }
    }
}

#[test]
fn chen_identity() {
    let mut rng = StdRng::seed_from_u64(9);
    for _ in 0..30 {
        let d = rng.random_range(1..=3);
        let depth = rng.random_range(1..=4);
        let (n1, n2) = (rng.random_range(2..=6), rng.random_range(2..=6));
        let x = random_series(&mut rng, n1, d);
        let mut y_vals = x.row(n1 - 1).to_vec();
        y_vals.extend((0..(n2 - 1) * d).map(|_| rng.random_range(-1.0..1.0)));
        let y = TimeSeries::with_default_times(d, y_vals).unwrap();
        let mut joined = x.values().to_vec();
        joined.extend_from_slice(&y.values()[d..]);
        let xy = TimeSeries::with_default_times(d, joined).unwrap();
        let lhs = signature_tensor(&xy, depth).unwrap();
        let rhs = signature_tensor(&x, depth)
            .unwrap()
            .mul(&signature_tensor(&y, depth).unwrap())
            .unwrap();
        let (l, r) = (lhs.without_scalar(), rhs.without_scalar());
        let scale = r.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
        assert!(max_abs_diff(l, r) <= 1e-10 * scale, "{l:?}\n{r:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shuffle_identity_depth_two(values in prop::collection::vec(-3.0f64..3.0, 6..30), d in 1usize..=3) {
        let n = values.len() / d;
        prop_assume!(n >= 2);
        let ts = TimeSeries::with_default_times(d, values[..n * d].to_vec()).unwrap();
        let s = signature(&ts, 2).unwrap().values;
        for i in 0..d {
            for j in 0..d {
                let lhs = s[d + i * d + j] + s[d + j * d + i];
                let rhs = s[i] * s[j];
                prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn collinear_refinement_is_invisible(
        values in prop::collection::vec(-2.0f64..2.0, 4..24),
        at in 0usize..100,
        frac in 0.05f64..0.95,
    ) {
        let d = 2;
        let n = values.len() / d;
        prop_assume!(n >= 2);
        let ts = TimeSeries::with_default_times(d, values[..n * d].to_vec()).unwrap();
        let seg = at % (n - 1);
        let (a, b) = (ts.row(seg), ts.row(seg + 1));
        let mid: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + frac * (y - x)).collect();
        let mut refined = Vec::new();
        for (i, row) in ts.rows().enumerate() {
            refined.extend_from_slice(row);
            if i == seg {
                refined.extend_from_slice(&mid);
            }
        }
        let refined = TimeSeries::with_default_times(d, refined).unwrap();
        let (s1, s2) = (signature(&ts, 3).unwrap().values, signature(&refined, 3).unwrap().values);
        prop_assert!(max_abs_diff(&s1, &s2) <= 1e-12 * s1.iter().fold(1.0f64, |m, v| m.max(v.abs())));
        let (l1, l2) = (logsignature(&ts, 3).unwrap().values, logsignature(&refined, 3).unwrap().values);
        prop_assert!(max_abs_diff(&l1, &l2) <= 1e-12 * l1.iter().fold(1.0f64, |m, v| m.max(v.abs())));
    }

    #[test]
    fn retimestamping_is_exactly_invisible(values in prop::collection::vec(-2.0f64..2.0, 3..15), gaps in prop::collection::vec(0.01f64..5.0, 15)) {
        let n = values.len();
        let mut t = 0.0;
        let times: Vec<f64> = gaps[..n].iter().map(|g| { t += g; t }).collect();
        let a = TimeSeries::with_default_times(1, values.clone()).unwrap();
        let b = TimeSeries::new(1, values, times).unwrap();
        prop_assert_eq!(signature(&a, 4).unwrap(), signature(&b, 4).unwrap());
        prop_assert_eq!(logsignature(&a, 4).unwrap(), logsignature(&b, 4).unwrap());
    }

    #[test]
    fn translation_invariance(values in prop::collection::vec(-2.0f64..2.0, 4..20), c in prop::collection::vec(-10.0f64..10.0, 2)) {
        let n = values.len() / 2;
        let ts = TimeSeries::with_default_times(2, values[..n * 2].to_vec()).unwrap();
        prop_assume!(n >= 2);
        let shifted: Vec<f64> = ts.values().chunks(2).flat_map(|r| [r[0] + c[0], r[1] + c[1]]).collect();
        let shifted = TimeSeries::with_default_times(2, shifted).unwrap();
        let (s1, s2) = (signature(&ts, 3).unwrap().values, signature(&shifted, 3).unwrap().values);
        prop_assert!(levels_close(&s2, &s1, 2, 3, 1e-10) || max_abs_diff(&s1, &s2) <= 1e-10);
    }

    #[test]
    fn window_count_matches_apply(n in 2usize..=64, kind in 0usize..4, a in 2usize..10, b in 1usize..6) {
        let spec = match kind {
            0 => WindowSpec::Global,
            1 => WindowSpec::Sliding { length: a, step: b },
            2 => WindowSpec::Expanding { length: a, step: b },
            _ => WindowSpec::Dyadic { depth: b },
        };
        let ts = TimeSeries::with_default_times(1, (0..n).map(|i| i as f64).collect()).unwrap();
        match spec.count(n) {
            Ok(count) => {
                let windows = spec.apply(&ts).unwrap();
                prop_assert_eq!(windows.len(), count);
                if matches!(spec, WindowSpec::Sliding { .. } | WindowSpec::Expanding { .. }) {
                    for w in &windows {
                        let start = w.timestamps()[0] as usize - 1;
                        prop_assert_eq!(w.values(), &ts.values()[start..start + w.len()]);
                        prop_assert_eq!(w.timestamps(), &ts.timestamps()[start..start + w.len()]);
                    }
                }
            }
            Err(_) => prop_assert!(a > n),
        }
    }

    #[test]
    fn dyadic_levels_partition(n in 2usize..200, q in 1usize..=6) {
        let spec = WindowSpec::Dyadic { depth: q };
        let ranges = spec.ranges(n).unwrap();
        let mut off = 0;
        for level in 0..q {
            let blocks = &ranges[off..off + (1 << level)];
            prop_assert_eq!(blocks[0].0, 0);
            prop_assert_eq!(blocks.last().unwrap().1, n);
            for w in blocks.windows(2) {
                prop_assert_eq!(w[0].1, w[1].0);
            }
            let (min, max) = blocks.iter().fold((usize::MAX, 0), |(lo, hi), r| (lo.min(r.1 - r.0), hi.max(r.1 - r.0)));
            prop_assert!(max - min <= 1);
            off += 1 << level;
        }
    }

    #[test]
    fn post_scaling_round_trips(values in prop::collection::vec(-5.0f64..5.0, 14)) {
        let scaled = rescale_post(&values, 2, 3, Transform::Signature).unwrap();
        let back = unscale_post(&scaled, 2, 3, Transform::Signature).unwrap();
        prop_assert!(max_abs_diff(&back, &values) <= 1e-12);
    }
}

#[test]
fn dyadic_finest_level_reconstructs_series() {
    for n in [8usize, 13, 37] {
        let ts = TimeSeries::with_default_times(2, (0..2 * n).map(|i| i as f64 * 0.5).collect()).unwrap();
        let q = 3;
        let windows = WindowSpec::Dyadic { depth: q }.apply(&ts).unwrap();
        let finest = &windows[(1 << (q - 1)) - 1..];
        let joined: Vec<f64> = finest.iter().flat_map(|w| w.values().iter().copied()).collect();
        assert_eq!(joined, ts.values());
    }
}

// ---- augmentations ----

#[test]
fn time_augmentation_breaks_resampling_invariance() {
    let values = vec![0.0, 1.0, 0.0];
    let a = TimeSeries::new(1, values.clone(), vec![0.0, 0.5, 3.0]).unwrap();
    let b = TimeSeries::new(1, values, vec![0.0, 2.5, 3.0]).unwrap();
    assert_eq!(signature(&a, 3).unwrap(), signature(&b, 3).unwrap());
    let sa = signature(&augment_time(&a), 3).unwrap().values;
    let sb = signature(&augment_time(&b), 3).unwrap().values;
    assert!(max_abs_diff(&sa, &sb) > 1e-3);
}

#[test]
fn basepoint_restores_translation_sensitivity() {
    let ts = TimeSeries::from_rows(&[[0.2, -0.4], [1.0, 0.3], [0.5, 0.9]]).unwrap();
    let c = [1.5, -0.75];
    let shifted = TimeSeries::from_rows(&ts.rows().map(|r| [r[0] + c[0], r[1] + c[1]]).collect::<Vec<_>>()).unwrap();
    let a = signature(&augment_basepoint(&ts), 2).unwrap().values;
    let b = signature(&augment_basepoint(&shifted), 2).unwrap().values;
    assert!(max_abs_diff(&a, &b) > 1e-3);
    for ch in 0..2 {
        assert!((b[ch] - a[ch] - c[ch]).abs() <= 1e-12);
    }
}

#[test]
fn invisibility_reset_contains_original_signature() {
    let ts = TimeSeries::from_rows(&[[0.5, 1.0], [1.5, -0.5], [2.0, 0.25], [1.0, 1.0]]).unwrap();
    let aug = augment_invisibility_reset(&ts);
    let s = signature(&aug, 3).unwrap().values;
    // the augmented path ends at the origin after starting at (1, x_1)
    assert!((s[0] + 1.0).abs() < 1e-15);
    assert!((s[1] + 0.5).abs() < 1e-15 && (s[2] + 1.0).abs() < 1e-15);
    let oracle = signature_oracle(&aug, 3, 400).unwrap().values;
    assert!(levels_close(&s, &oracle, 3, 3, 1e-4));
    // on the constant-indicator prefix, words over the original channels are
    // the original signature
    let prefix: Vec<f64> = aug.rows().take(ts.len()).flat_map(|r| r[1..].to_vec()).collect();
    let prefix = TimeSeries::with_default_times(2, prefix).unwrap();
    assert_eq!(signature(&prefix, 3).unwrap(), signature(&ts, 3).unwrap());
}

#[test]
fn lead_lag_levy_area_is_half_quadratic_variation() {
    let ts = TimeSeries::from_rows(&[[0.0], [1.0], [3.0]]).unwrap();
    let ll = augment_lead_lag(&ts, &[1]).unwrap();
    let area = logsignature(&ll, 2).unwrap().values[2];
    assert!((area - 2.5).abs() < 1e-12, "{area}");
    let oracle = signature_oracle(&ll, 2, 1000).unwrap().values;
    let oracle_area = 0.5 * (oracle[3] - oracle[4]);
    assert!((oracle_area - 2.5).abs() < 1e-9);
}

// ---- rescaling ----

#[test]
fn pre_scaling_is_homogeneous() {
    let mut rng = StdRng::seed_from_u64(10);
    for depth in 1..=5 {
        let ts = random_series(&mut rng, 6, 2);
        let alpha = pre_scale_factor(depth);
        let plain = signature(&ts, depth).unwrap().values;
        let scaled = signature(&rescale_pre(&ts, depth).unwrap(), depth).unwrap().values;
        let mut off = 0;
        for k in 1..=depth {
            let len = 2usize.pow(k as u32);
            let factor = alpha.powi(k as i32);
            for i in off..off + len {
                assert!((scaled[i] - factor * plain[i]).abs() <= 1e-10 * (1.0 + scaled[i].abs()));
            }
            off += len;
        }
    }
}

// ---- pipeline ----

#[test]
fn predicted_width_matches_realized() {
    let mut rng = StdRng::seed_from_u64(11);
    let augs = [
        "none",
        "time",
        "basepoint",
        "time,basepoint",
        "invisibility",
        "leadlag",
        "time,coordproj(1,time)",
        "randproj(2,3)",
    ];
    let windows = [
        "global",
        "sliding(3,2)",
        "expanding(4,3)",
        "dyadic(2)",
        "dyadic(3)",
        "sliding_count(2)",
    ];
    for _ in 0..120 {
        let d = rng.random_range(1..=4);
        let n = rng.random_range(4..=12);
        let depth = rng.random_range(1..=4);
        let cfg = PipelineConfig {
            augmentation: AugmentationSpec::parse(augs[rng.random_range(0..augs.len())]).unwrap(),
            window: WindowSpec::parse(windows[rng.random_range(0..windows.len())]).unwrap(),
            transform: if rng.random_bool(0.5) {
                Transform::Signature
            } else {
                Transform::LogSignature
            },
            depth,
            rescale: [RescaleSpec::None, RescaleSpec::Pre, RescaleSpec::Post][rng.random_range(0..3)],
            ..PipelineConfig::default()
        };
        let ts = random_series(&mut rng, n, d);
        let predicted = cfg.predict_feature_count(d, n);
        match run_pipeline(&cfg, &ts) {
            Ok(f) => {
                assert_eq!(predicted.unwrap(), f.flat().len(), "{cfg:?}");
                assert_eq!(f.column_names().len(), f.flat().len());
                let again = run_pipeline(&cfg, &ts).unwrap();
                let bits = |v: Vec<f64>| v.into_iter().map(f64::to_bits).collect::<Vec<_>>();
                assert_eq!(bits(f.flat()), bits(again.flat()));
            }
            Err(e) => assert!(
                predicted.is_err() || matches!(e, sigpipe_core::Error::FeatureBudget { .. }),
                "{e}"
            ),
        }
    }
}
