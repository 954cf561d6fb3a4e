//! On-disk result formats: `results.jsonl`, `summary.csv`, `boxplot.csv`
//! and per-image region dumps.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use proxeval_core::metrics::{CategorySummary, ImageEvaluation};
use proxeval_core::regions::BoundingRegion;

pub const RESULTS_FILE: &str = "results.jsonl";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const BOXPLOT_FILE: &str = "boxplot.csv";

pub const SUMMARY_HEADER: [&str; 8] = [
    "category",
    "mean_ps",
    "std_ps",
    "mean_acr",
    "std_acr",
    "n",
    "n_no_regions",
    "n_no_ars",
];

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One JSON object per line, in the order given.
pub fn write_results(path: &Path, evals: &[ImageEvaluation]) -> Result<()> {
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    for e in evals {
        serde_json::to_writer(&mut w, e)?;
        w.write_all(b"\n")?;
    }
    w.flush()
        .with_context(|| format!("writing {}", path.display()))
}

pub fn read_results(path: &Path) -> Result<Vec<ImageEvaluation>> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    BufReader::new(file)
        .lines()
        .enumerate()
        .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty()))
        .map(|(i, line)| {
            let line = line?;
            serde_json::from_str(&line)
                .with_context(|| format!("{}: line {}", path.display(), i + 1))
        })
        .collect()
}

pub fn write_summary(path: &Path, rows: &[CategorySummary]) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        w.write_record([
            r.group.to_string(),
            cell(r.mean_ps),
            cell(r.std_ps),
            cell(r.mean_acr),
            cell(r.std_acr),
            r.n.to_string(),
            r.n_no_regions.to_string(),
            r.n_no_ars.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Long-format `category,metric,value` rows for every unflagged image.
pub fn write_boxplot(path: &Path, evals: &[ImageEvaluation]) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["category", "metric", "value"])?;
    for e in evals.iter().filter(|e| !e.is_flagged()) {
        if let Some(ps) = e.ps {
            w.write_record([e.category.as_str(), "ps", &ps.to_string()])?;
        }
        if let Some(acr) = e.acr {
            w.write_record([e.category.as_str(), "acr", &acr.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// JSON array of `{box, member_clusters}` objects.
pub fn write_regions(path: &Path, regions: &[BoundingRegion]) -> Result<()> {
    let json = serde_json::to_string(regions)?;
    fs::write(path, json).with_context(|| format!("writing {}", path.display()))
}

pub fn read_regions(path: &Path) -> Result<Vec<BoundingRegion>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Keeps image ids usable as file names.
pub fn file_stem_for(image_id: &str) -> String {
    image_id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "-_.".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proxeval_core::metrics::{summarize, Aggregation, ContingencyCategory, EvalFlag};
    use proxeval_core::regions::BoundingBox;

    fn eval(
        id: &str,
        cat: ContingencyCategory,
        ps: Option<f64>,
        acr: Option<f64>,
    ) -> ImageEvaluation {
        ImageEvaluation {
            image_id: id.into(),
            category: cat,
            ps,
            acr,
            flags: if ps.is_none() {
                vec![EvalFlag::NoRegions]
            } else {
                vec![]
            },
            per_ar_distances: vec![],
            region_count: 0,
            ars_inside: 0,
            off_disk_ars: vec![],
        }
    }

    #[test]
    fn summary_layout() {
        let d = tempfile::tempdir().unwrap();
        let evals = [
            eval("a", ContingencyCategory::TP, Some(2.0), Some(1.0)),
            eval("b", ContingencyCategory::TP, Some(4.0), Some(0.5)),
            eval("c", ContingencyCategory::FN, None, None),
        ];
        let p = d.path().join(SUMMARY_FILE);
        write_summary(&p, &summarize(&evals, Aggregation::Macro)).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "category,mean_ps,std_ps,mean_acr,std_acr,n,n_no_regions,n_no_ars"
        );
        assert_eq!(lines[1], "TP,3,1,0.75,0.25,2,0,0");
        assert_eq!(lines[2], "FP,,,,,0,0,0");
        assert_eq!(lines[4], "FN,,,,,0,1,0");
        assert!(lines[5].starts_with("overall,3,1,0.75,0.25,2,1,0"));
        assert_eq!(lines.len(), 6);
    }

    #[test]
    fn results_round_trip_and_boxplot() {
        let d = tempfile::tempdir().unwrap();
        let evals = vec![
            eval(
                "a",
                ContingencyCategory::FP,
                Some(0.1 + 0.2),
                Some(1.0 / 3.0),
            ),
            eval("b", ContingencyCategory::TN, None, None),
        ];
        let p = d.path().join(RESULTS_FILE);
        write_results(&p, &evals).unwrap();
        assert_eq!(read_results(&p).unwrap(), evals);

        let b = d.path().join(BOXPLOT_FILE);
        write_boxplot(&b, &evals).unwrap();
        let text = fs::read_to_string(&b).unwrap();
        assert_eq!(
            text,
            "category,metric,value\nFP,ps,0.30000000000000004\nFP,acr,0.3333333333333333\n"
        );
    }

    #[test]
    fn regions_dump() {
        let d = tempfile::tempdir().unwrap();
        let p = d.path().join("r.json");
        let r = vec![BoundingRegion {
            bbox: BoundingBox::new(1.0, 2.0, 3.0, 4.0),
            member_clusters: vec![0],
        }];
        write_regions(&p, &r).unwrap();
        assert_eq!(
            fs::read_to_string(&p).unwrap(),
            r#"[{"box":[1.0,2.0,3.0,4.0],"member_clusters":[0]}]"#
        );
        assert_eq!(read_regions(&p).unwrap(), r);
    }

    #[test]
    fn stems() {
        assert_eq!(
            file_stem_for("2021-05-01T00:00/a b"),
            "2021-05-01T00_00_a_b"
        );
    }
}
