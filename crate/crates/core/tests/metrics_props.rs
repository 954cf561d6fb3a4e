use proptest::prelude::*;
use proxeval_core::geometry::PixelPoint;
use proxeval_core::metrics::{
    attribution_colocation_ratio, per_ar_distance, proximity_score, summarize, Aggregation,
    ContingencyCategory, ImageEvaluation,
};
use proxeval_core::regions::{BoundingBox, BoundingRegion};
use proxeval_oracle::{compensated_mean_std, sampled_box_distance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn arb_region() -> impl Strategy<Value = BoundingRegion> {
    (0.0f64..400.0, 0.0f64..400.0, 0.0f64..80.0, 0.0f64..80.0)
        .prop_map(|(x, y, w, h)| BoundingRegion::new(BoundingBox::new(x, y, x + w, y + h)))
}

fn arb_ar() -> impl Strategy<Value = PixelPoint> {
    (0.0f64..480.0, 0.0f64..480.0).prop_map(Into::into)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn metric_invariants(ars in prop::collection::vec(arb_ar(), 1..12),
                         regions in prop::collection::vec(arb_region(), 1..8),
                         extra in arb_region(),
                         dx in -100.0f64..100.0, dy in -100.0f64..100.0) {
        let ps = proximity_score(&ars, &regions).unwrap();
        let acr = attribution_colocation_ratio(&ars, &regions).unwrap();
        prop_assert!(ps >= 0.0);
        prop_assert!((0.0..=1.0).contains(&acr));
        prop_assert_eq!(ps == 0.0, acr == 1.0);

        let mut more = regions.clone();
        more.push(extra);
        prop_assert!(proximity_score(&ars, &more).unwrap() <= ps);
        prop_assert!(attribution_colocation_ratio(&ars, &more).unwrap() >= acr);

        // shift by whole pixels so box edges and ARs move exactly
        let (dx, dy) = (dx.round(), dy.round());
        let ars_t: Vec<PixelPoint> = ars.iter().map(|p| PixelPoint::new(p.x + dx, p.y + dy)).collect();
        let regions_t: Vec<BoundingRegion> =
            regions.iter().map(|r| BoundingRegion::new(r.bbox.translated(dx, dy))).collect();
        prop_assert!((proximity_score(&ars_t, &regions_t).unwrap() - ps).abs() < 1e-9);
        prop_assert_eq!(attribution_colocation_ratio(&ars_t, &regions_t).unwrap(), acr);
    }
}

#[test]
fn per_ar_distance_matches_sampled_boxes() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..300 {
        let regions: Vec<BoundingRegion> = (0..rng.gen_range(1..5))
            .map(|_| {
                let x = rng.gen_range(0.0..300.0);
                let y = rng.gen_range(0.0..300.0);
                BoundingRegion::new(BoundingBox::new(
                    x,
                    y,
                    x + rng.gen_range(0.0..60.0),
                    y + rng.gen_range(0.0..60.0),
                ))
            })
            .collect();
        let ar = PixelPoint::new(rng.gen_range(-50.0..400.0), rng.gen_range(-50.0..400.0));
        let ours = per_ar_distance(ar, &regions).unwrap();
        let oracle = regions
            .iter()
            .map(|r| {
                let b = r.bbox;
                sampled_box_distance((ar.x, ar.y), (b.min_x, b.min_y), (b.max_x, b.max_y), 20_000)
            })
            .fold(f64::INFINITY, f64::min);
        assert!((ours - oracle).abs() < 1e-2, "{ours} vs {oracle}");
    }
}

#[test]
fn ps_is_mean_of_per_ar_oracle_distances() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..200 {
        let regions: Vec<BoundingRegion> = (0..rng.gen_range(1..4))
            .map(|_| {
                let x = rng.gen_range(0.0..300.0);
                let y = rng.gen_range(0.0..300.0);
                BoundingRegion::new(BoundingBox::new(x, y, x + 30.0, y + 20.0))
            })
            .collect();
        let ars: Vec<PixelPoint> = (0..rng.gen_range(1..8))
            .map(|_| PixelPoint::new(rng.gen_range(0.0..350.0), rng.gen_range(0.0..350.0)))
            .collect();
        // direct clamp formula, independent of the box type's helper
        let oracle: f64 = ars
            .iter()
            .map(|a| {
                regions
                    .iter()
                    .map(|r| {
                        let b = r.bbox;
                        let cx = a.x.clamp(b.min_x, b.max_x);
                        let cy = a.y.clamp(b.min_y, b.max_y);
                        ((a.x - cx).powi(2) + (a.y - cy).powi(2)).sqrt()
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .sum::<f64>()
            / ars.len() as f64;
        assert!((proximity_score(&ars, &regions).unwrap() - oracle).abs() < 1e-9);
    }
}

#[test]
fn summary_matches_compensated_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let evals: Vec<ImageEvaluation> = (0..1000)
        .map(|i| ImageEvaluation {
            image_id: format!("{i:04}"),
            category: ContingencyCategory::ALL[rng.gen_range(0..4)],
            ps: Some(rng.gen_range(0.0..300.0)),
            acr: Some(rng.gen_range(0..=4) as f64 / 4.0),
            flags: vec![],
            per_ar_distances: vec![],
            region_count: 1,
            ars_inside: 0,
            off_disk_ars: vec![],
        })
        .collect();
    let rows = summarize(&evals, Aggregation::Macro);
    for (k, row) in rows.iter().enumerate() {
        let subset: Vec<&ImageEvaluation> = if k < 4 {
            evals
                .iter()
                .filter(|e| e.category == ContingencyCategory::ALL[k])
                .collect()
        } else {
            evals.iter().collect()
        };
        let ps: Vec<f64> = subset.iter().map(|e| e.ps.unwrap()).collect();
        let acr: Vec<f64> = subset.iter().map(|e| e.acr.unwrap()).collect();
        let (mp, sp) = compensated_mean_std(&ps).unwrap();
        let (ma, sa) = compensated_mean_std(&acr).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs().max(1e-12);
        assert_eq!(row.n, subset.len());
        assert!(
            rel(row.mean_ps.unwrap(), mp) && rel(row.std_ps.unwrap(), sp),
            "{row:?}"
        );
        assert!(
            rel(row.mean_acr.unwrap(), ma) && rel(row.std_acr.unwrap(), sa),
            "{row:?}"
        );
    }
}
