use proxeval_core::geometry::{point_in_polygon, PixelPoint, SolarDiskGeometry};
use proxeval_core::imageproc::AttributionMap;
use proxeval_core::regions::{
    add_buffer, convex_hull, dbscan, detect_edges, extract_regions, MaskStage, PipelineParams,
};

fn blobs(size: usize, centers: &[(f64, f64, f64)]) -> AttributionMap {
    AttributionMap::from_fn(size, size, |x, y| {
        centers
            .iter()
            .map(|&(cx, cy, s)| {
                let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                (-d2 / (2.0 * s * s)).exp()
            })
            .sum()
    })
    .unwrap()
}

#[test]
fn single_blob_gives_one_region_around_it() {
    let am = blobs(512, &[(300.0, 260.0, 10.0)]);
    let params = PipelineParams::default();
    let out = extract_regions(&am, &params, &SolarDiskGeometry::default());
    assert_eq!(out.regions.len(), 1, "{out:?}");
    let b = out.regions[0].bbox;
    assert!(b.contains(PixelPoint::new(300.0, 260.0)));
    // the edge ring sits near r = sigma; require at least the 2-sigma ring
    // minus one pixel of discretisation on the east/north/south sides and the
    // westward buffer on top of the ring to the right
    let ring = 10.0;
    assert!(b.min_x <= 300.0 - ring + 1.0, "{b:?}");
    assert!(
        b.min_y <= 260.0 - ring + 1.0 && b.max_y >= 260.0 + ring - 1.0,
        "{b:?}"
    );
    assert!(
        b.max_x >= 300.0 + ring - 1.0 + params.westward_buffer,
        "{b:?}"
    );
    assert!(
        b.max_x <= 300.0 + 2.0 * 10.0 + params.westward_buffer,
        "{b:?}"
    );
}

#[test]
fn two_separated_blobs_give_two_disjoint_regions() {
    let am = blobs(512, &[(180.0, 256.0, 10.0), (330.0, 256.0, 10.0)]);
    let out = extract_regions(
        &am,
        &PipelineParams::default(),
        &SolarDiskGeometry::default(),
    );
    assert_eq!(out.regions.len(), 2, "{out:?}");
    let (a, b) = (out.regions[0].bbox, out.regions[1].bbox);
    assert!(a.max_x < b.min_x, "{a:?} {b:?}");
    assert!(a.contains(PixelPoint::new(180.0, 256.0)));
    assert!(b.contains(PixelPoint::new(330.0, 256.0)));
}

#[test]
fn extraction_is_deterministic() {
    let am = blobs(
        512,
        &[
            (200.0, 200.0, 8.0),
            (260.0, 330.0, 12.0),
            (380.0, 250.0, 5.0),
        ],
    );
    let g = SolarDiskGeometry::default();
    let a = serde_json::to_string(&extract_regions(&am, &PipelineParams::default(), &g)).unwrap();
    let b = serde_json::to_string(&extract_regions(&am, &PipelineParams::default(), &g)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn larger_maps_are_resized_to_target() {
    // same blob at twice the resolution, with geometry for the large frame
    let am = blobs(1024, &[(600.0, 520.0, 20.0)]);
    let g = SolarDiskGeometry {
        hpc_center_x: 512.0,
        hpc_center_y: 512.0,
        cdelt: 2.0,
        disk_radius_px: 480.0,
        image_size: 1024,
    };
    let out = extract_regions(&am, &PipelineParams::default(), &g);
    assert_eq!(out.regions.len(), 1);
    assert!(out.regions[0].bbox.contains(PixelPoint::new(300.0, 260.0)));
}

#[test]
fn edge_mask_keeps_clusters_on_disk() {
    // a blob straddling the limb, plus one in the corner off the disk
    let am = blobs(512, &[(256.0, 20.0, 10.0), (30.0, 30.0, 8.0)]);
    let g = SolarDiskGeometry::default();
    let params = PipelineParams::default();
    let edges = detect_edges(&am, &params);
    let on_disk: Vec<PixelPoint> = edges.pixel_points().filter(|p| g.contains(*p)).collect();
    assert!(on_disk.len() < edges.len());
    let clusters = dbscan(&on_disk, params.max_dist, params.min_samples);
    for c in &clusters.clusters {
        assert!(c.points.iter().all(|p| g.contains(*p)));
    }

    let early = extract_regions(&am, &params, &g);
    let late = extract_regions(
        &am,
        &PipelineParams {
            mask_stage: MaskStage::Regions,
            ..params
        },
        &g,
    );
    // the corner blob never produces a region with either mask placement
    for r in early.regions.iter().chain(&late.regions) {
        assert!(r.bbox.intersects_disk(&g));
        assert!(!r.bbox.contains(PixelPoint::new(30.0, 30.0)));
    }
    assert!(late.edge_pixels > early.edge_pixels);
}

#[test]
fn cluster_points_lie_in_their_buffered_hull() {
    let am = blobs(512, &[(200.0, 200.0, 8.0), (300.0, 320.0, 6.0)]);
    let params = PipelineParams::default();
    let g = SolarDiskGeometry::default();
    let pts: Vec<PixelPoint> = detect_edges(&am, &params)
        .pixel_points()
        .filter(|p| g.contains(*p))
        .collect();
    let clusters = dbscan(&pts, params.max_dist, params.min_samples);
    assert!(!clusters.clusters.is_empty());
    let mut seen = 0;
    for c in &clusters.clusters {
        let hull = convex_hull(&c.points).unwrap();
        let buffered = add_buffer(
            &hull,
            params.eastward_buffer,
            params.westward_buffer,
            params.west_direction,
        );
        assert!(c.points.iter().all(|p| point_in_polygon(*p, &buffered)));
        seen += c.points.len();
    }
    assert_eq!(seen + clusters.noise.len(), pts.len());
}
