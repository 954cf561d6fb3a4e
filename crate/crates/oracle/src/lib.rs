//! Slow, obviously-correct reference implementations for the test suites.
//!
//! Nothing here depends on `proxeval-core`. Inputs and outputs are plain
//! tuples and vectors so the checks stay independent of the code they judge.

pub type Pt = (f64, f64);

/// Textbook O(n²) DBSCAN.
///
/// Points are visited in lexicographic `(x, y)` order of the input; a border
/// point reachable from several clusters joins the first one discovered in
/// that order. `min_samples` counts the point itself. Returns one label per
/// input point (in input order), `None` for noise.
pub fn naive_dbscan(points: &[Pt], eps: f64, min_samples: usize) -> Vec<Option<usize>> {
    let n = points.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .0
            .partial_cmp(&points[b].0)
            .unwrap()
            .then(points[a].1.partial_cmp(&points[b].1).unwrap())
    });

    let within = |a: usize, b: usize| {
        let dx = points[a].0 - points[b].0;
        let dy = points[a].1 - points[b].1;
        (dx * dx + dy * dy).sqrt() <= eps
    };
    let neighbors =
        |i: usize| -> Vec<usize> { order.iter().copied().filter(|&j| within(i, j)).collect() };

    let mut label: Vec<Option<usize>> = vec![None; n];
    let mut visited = vec![false; n];
    let mut next = 0;
    for &p in &order {
        if visited[p] {
            continue;
        }
        visited[p] = true;
        let nb = neighbors(p);
        if nb.len() < min_samples {
            continue;
        }
        let cluster = next;
        next += 1;
        label[p] = Some(cluster);
        let mut queue = nb;
        let mut k = 0;
        while k < queue.len() {
            let q = queue[k];
            k += 1;
            if label[q].is_none() {
                label[q] = Some(cluster);
            }
            if visited[q] {
                continue;
            }
            visited[q] = true;
            let qn = neighbors(q);
            if qn.len() >= min_samples {
                queue.extend(qn);
            }
        }
    }
    label
}

/// Canonical form of a labelling: the set of clusters, each as a sorted list of
/// point indices, sorted by first index. Noise is returned separately.
pub fn canonical_partition(labels: &[Option<usize>]) -> (Vec<Vec<usize>>, Vec<usize>) {
    use std::collections::BTreeMap;
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut noise = Vec::new();
    for (i, l) in labels.iter().enumerate() {
        match l {
            Some(c) => groups.entry(*c).or_default().push(i),
            None => noise.push(i),
        }
    }
    let mut clusters: Vec<Vec<usize>> = groups.into_values().collect();
    for c in &mut clusters {
        c.sort_unstable();
    }
    clusters.sort();
    (clusters, noise)
}

/// Minimum distance from `p` to points sampled uniformly along each edge of the
/// closed polyline through `vertices` (both endpoints of each edge included).
pub fn sampled_min_distance(p: Pt, vertices: &[Pt], samples_per_edge: usize) -> f64 {
    assert!(!vertices.is_empty());
    let n = vertices.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        for s in 0..=samples_per_edge {
            let t = s as f64 / samples_per_edge as f64;
            let x = a.0 + (b.0 - a.0) * t;
            let y = a.1 + (b.1 - a.1) * t;
            let d = ((p.0 - x).powi(2) + (p.1 - y).powi(2)).sqrt();
            if d < best {
                best = d;
            }
        }
    }
    best
}

/// Half-plane membership for a convex polygon given counter-clockwise in a
/// y-down frame (i.e. the signed area computed with the usual shoelace formula
/// is positive). Boundary points within `tol` count as inside.
pub fn inside_convex(p: Pt, vertices: &[Pt], tol: f64) -> bool {
    let n = vertices.len();
    match n {
        0 => false,
        1 => ((p.0 - vertices[0].0).powi(2) + (p.1 - vertices[0].1).powi(2)).sqrt() <= tol,
        2 => sampled_segment_distance(p, vertices[0], vertices[1]) <= tol,
        _ => (0..n).all(|i| {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            let len = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
            cross >= -tol * len
        }),
    }
}

fn sampled_segment_distance(p: Pt, a: Pt, b: Pt) -> f64 {
    sampled_min_distance(p, &[a, b], 10_000)
}

/// Distance from `p` to an axis-aligned box, found by sampling its perimeter;
/// zero when the point lies inside.
pub fn sampled_box_distance(p: Pt, min: Pt, max: Pt, samples_per_edge: usize) -> f64 {
    if p.0 >= min.0 && p.0 <= max.0 && p.1 >= min.1 && p.1 <= max.1 {
        return 0.0;
    }
    let corners = [min, (max.0, min.1), max, (min.0, max.1)];
    sampled_min_distance(p, &corners, samples_per_edge)
}

/// Bilinear resampling with pixel-centre alignment and edge clamping,
/// written pixel-by-pixel without any shared helpers.
pub fn reference_bilinear(
    src: &[u8],
    width: usize,
    height: usize,
    out_w: usize,
    out_h: usize,
) -> Vec<u8> {
    let mut out = Vec::with_capacity(out_w * out_h);
    let sx = width as f64 / out_w as f64;
    let sy = height as f64 / out_h as f64;
    for j in 0..out_h {
        for i in 0..out_w {
            let fx = ((i as f64 + 0.5) * sx - 0.5)
                .max(0.0)
                .min((width - 1) as f64);
            let fy = ((j as f64 + 0.5) * sy - 0.5)
                .max(0.0)
                .min((height - 1) as f64);
            let x0 = fx.floor() as usize;
            let y0 = fy.floor() as usize;
            let x1 = if x0 + 1 < width { x0 + 1 } else { x0 };
            let y1 = if y0 + 1 < height { y0 + 1 } else { y0 };
            let ax = fx - x0 as f64;
            let ay = fy - y0 as f64;
            let v00 = src[y0 * width + x0] as f64;
            let v10 = src[y0 * width + x1] as f64;
            let v01 = src[y1 * width + x0] as f64;
            let v11 = src[y1 * width + x1] as f64;
            let v = v00 * (1.0 - ax) * (1.0 - ay)
                + v10 * ax * (1.0 - ay)
                + v01 * (1.0 - ax) * ay
                + v11 * ax * ay;
            out.push((v + 0.5).floor().clamp(0.0, 255.0) as u8);
        }
    }
    out
}

/// One-pass compensated (Neumaier) mean and population standard deviation.
pub fn compensated_mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let mut s = 0.0f64;
    let mut cs = 0.0f64;
    let mut s2 = 0.0f64;
    let mut cs2 = 0.0f64;
    for &v in values {
        neumaier_add(&mut s, &mut cs, v);
        neumaier_add(&mut s2, &mut cs2, v * v);
    }
    let n = values.len() as f64;
    let mean = (s + cs) / n;
    let var = ((s2 + cs2) / n - mean * mean).max(0.0);
    Some((mean, var.sqrt()))
}

fn neumaier_add(sum: &mut f64, comp: &mut f64, v: f64) {
    let t = *sum + v;
    if sum.abs() >= v.abs() {
        *comp += (*sum - t) + v;
    } else {
        *comp += (v - t) + *sum;
    }
    *sum = t;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dbscan_singleton_min_samples_one() {
        let l = naive_dbscan(&[(1.0, 1.0)], 1.0, 1);
        assert_eq!(l, vec![Some(0)]);
    }

    #[test]
    fn dbscan_empty() {
        assert!(naive_dbscan(&[], 1.0, 2).is_empty());
    }

    #[test]
    fn dbscan_pair_and_noise() {
        assert_eq!(
            naive_dbscan(&[(0.0, 0.0), (6.0, 0.0)], 10.0, 2),
            vec![Some(0), Some(0)]
        );
        assert_eq!(
            naive_dbscan(&[(0.0, 0.0), (100.0, 100.0)], 10.0, 2),
            vec![None, None]
        );
    }

    #[test]
    fn sampled_distance_square_cases() {
        let sq = [(0.0, 0.0), (10.0, 0.0), (10.0, 10.0), (0.0, 10.0)];
        assert!((sampled_min_distance((14.0, 5.0), &sq, 1000) - 4.0).abs() < 1e-3);
        assert!((sampled_min_distance((-3.0, -4.0), &sq, 1000) - 5.0).abs() < 1e-3);
        assert_eq!(sampled_min_distance((10.0, 10.0), &sq, 1000), 0.0);
    }

    #[test]
    fn sampled_distance_refines_monotonically() {
        let tri = [(0.0, 0.0), (7.3, 1.1), (2.2, 9.9)];
        let p = (-1.7, 4.4);
        let mut prev = f64::INFINITY;
        // powers of two so every coarse sample is also a fine sample
        for k in [1_usize, 2, 8, 64, 1024, 8192] {
            let d = sampled_min_distance(p, &tri, k);
            assert!(d <= prev + 1e-15);
            prev = d;
        }
    }

    #[test]
    fn bilinear_identity_and_constant() {
        let src: Vec<u8> = (0..16).map(|v| v as u8 * 10).collect();
        assert_eq!(reference_bilinear(&src, 4, 4, 4, 4), src);
        assert!(reference_bilinear(&[9; 36], 6, 6, 3, 3)
            .iter()
            .all(|&v| v == 9));
    }

    #[test]
    fn compensated_stats() {
        let (m, s) = compensated_mean_std(&[2.0, 4.0]).unwrap();
        assert_eq!((m, s), (3.0, 1.0));
    }
}
