//! Loading and validating manifests, attribution maps, catalogs and geometry
//! sidecars.
//!
//! Every malformed row is an error that names the file and the 1-based data
//! row; nothing is skipped silently.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::{DateTime, Duration, NaiveDateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{hpc_to_pixel, HpcPoint, PixelPoint, SolarDiskGeometry};
use crate::imageproc::AttributionMap;
use crate::metrics::LocatedAr;

/// Parses an ISO-8601 instant. Offsets are honoured; a bare date-time is
/// taken as UTC.
pub fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    let s = s.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.with_timezone(&Utc));
    }
    [
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%dT%H:%M",
    ]
    .iter()
    .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
    .map(|t| t.and_utc())
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" => Some(true),
        "false" | "0" | "no" => Some(false),
        _ => None,
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Reads a CSV file into header-keyed rows.
fn read_csv_rows(path: &Path) -> Result<Vec<BTreeMap<String, String>>> {
    let text = read_to_string(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Format {
            path: path.into(),
            message: e.to_string(),
        })?
        .clone();
    reader
        .records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec.map_err(|e| Error::Row {
                path: path.into(),
                row: i + 1,
                message: e.to_string(),
            })?;
            Ok(headers
                .iter()
                .zip(rec.iter())
                .filter(|(_, v)| !v.is_empty())
                .map(|(h, v)| (h.to_string(), v.to_string()))
                .collect())
        })
        .collect()
}

struct RowCtx<'a> {
    path: &'a Path,
    row: usize,
    fields: &'a BTreeMap<String, String>,
}

impl RowCtx<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Row {
            path: self.path.into(),
            row: self.row,
            message: message.into(),
        }
    }

    fn opt(&self, key: &str) -> Option<&str> {
        self.fields.get(key).map(String::as_str)
    }

    fn req(&self, key: &str) -> Result<&str> {
        self.opt(key)
            .ok_or_else(|| self.err(format!("missing {key}")))
    }

    fn boolean(&self, key: &str) -> Result<bool> {
        let v = self.req(key)?;
        parse_bool(v).ok_or_else(|| self.err(format!("{key}: expected true/false, got {v:?}")))
    }

    fn timestamp(&self, key: &str) -> Result<DateTime<Utc>> {
        let v = self.req(key)?;
        parse_timestamp(v)
            .ok_or_else(|| self.err(format!("{key}: not an ISO-8601 timestamp: {v:?}")))
    }

    fn finite(&self, key: &str) -> Result<f64> {
        let v = self.req(key)?;
        match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(self.err(format!("{key}: expected a finite number, got {v:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub image_id: String,
    pub attribution_path: PathBuf,
    pub geometry_path: Option<PathBuf>,
    pub magnetogram_path: Option<PathBuf>,
    pub timestamp: DateTime<Utc>,
    pub predicted_flare: bool,
    pub observed_flare: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvaluationManifest {
    pub entries: Vec<ManifestEntry>,
}

impl EvaluationManifest {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Loads a manifest CSV with columns `image_id, attribution_path,
/// geometry_path, magnetogram_path, timestamp, predicted_flare,
/// observed_flare`. The two optional path columns may be absent or empty.
/// Relative paths resolve against the manifest's directory.
pub fn load_manifest(path: &Path) -> Result<EvaluationManifest> {
    let base = path.parent().unwrap_or(Path::new("."));
    let resolve = |p: &str| {
        let p = PathBuf::from(p);
        if p.is_absolute() {
            p
        } else {
            base.join(p)
        }
    };
    let mut seen = HashSet::new();
    let mut entries = Vec::new();
    for (i, fields) in read_csv_rows(path)?.iter().enumerate() {
        let ctx = RowCtx {
            path,
            row: i + 1,
            fields,
        };
        let image_id = ctx.req("image_id")?.to_string();
        let entry = ManifestEntry {
            attribution_path: resolve(ctx.req("attribution_path")?),
            geometry_path: ctx.opt("geometry_path").map(resolve),
            magnetogram_path: ctx.opt("magnetogram_path").map(resolve),
            timestamp: ctx.timestamp("timestamp")?,
            predicted_flare: ctx.boolean("predicted_flare")?,
            observed_flare: ctx.boolean("observed_flare")?,
            image_id: image_id.clone(),
        };
        if !seen.insert(image_id.clone()) {
            return Err(Error::DuplicateId {
                path: path.into(),
                id: image_id,
            });
        }
        entries.push(entry);
    }
    Ok(EvaluationManifest { entries })
}

/// Width and height of a raw float attribution file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawSidecar {
    pub width: usize,
    pub height: usize,
}

/// Default sidecar location for a raw attribution file: same stem, `.json`.
pub fn raw_sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

fn extension(path: &Path) -> String {
    path.extension()
        .and_then(|e| e.to_str())
        .unwrap_or_default()
        .to_ascii_lowercase()
}

/// Loads an attribution map.
///
/// * `.png`, `.pgm`, `.pnm`: 8- or 16-bit grayscale, values kept as integers.
/// * `.f32`, `.raw`, `.bin`: little-endian `f32`, row-major, with a JSON
///   sidecar `{"width": W, "height": H}` (default: [`raw_sidecar_path`]).
pub fn load_attribution(path: &Path, sidecar: Option<&Path>) -> Result<AttributionMap> {
    match extension(path).as_str() {
        "png" | "pgm" | "pnm" => load_gray_image(path),
        "f32" | "raw" | "bin" => {
            let sidecar = sidecar
                .map(Path::to_path_buf)
                .unwrap_or_else(|| raw_sidecar_path(path));
            load_raw_f32(path, &sidecar)
        }
        other => Err(Error::UnsupportedFormat {
            path: path.into(),
            reason: format!("unknown extension {other:?}"),
        }),
    }
}

fn load_gray_image(path: &Path) -> Result<AttributionMap> {
    let img = image::open(path).map_err(|e| Error::UnsupportedFormat {
        path: path.into(),
        reason: e.to_string(),
    })?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let values: Vec<f64> = match img {
        image::DynamicImage::ImageLuma8(b) => b.into_raw().into_iter().map(f64::from).collect(),
        image::DynamicImage::ImageLuma16(b) => b.into_raw().into_iter().map(f64::from).collect(),
        other => {
            return Err(Error::UnsupportedFormat {
                path: path.into(),
                reason: format!("expected single-channel grayscale, got {:?}", other.color()),
            })
        }
    };
    AttributionMap::new(w, h, values).map_err(|e| Error::Format {
        path: path.into(),
        message: e.to_string(),
    })
}

fn load_raw_f32(path: &Path, sidecar: &Path) -> Result<AttributionMap> {
    let dims: RawSidecar =
        serde_json::from_str(&read_to_string(sidecar)?).map_err(|e| Error::Format {
            path: sidecar.into(),
            message: e.to_string(),
        })?;
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() % 4 != 0 {
        return Err(Error::Format {
            path: path.into(),
            message: format!("length {} is not a multiple of 4", bytes.len()),
        });
    }
    let found = bytes.len() / 4;
    let expected = dims.width * dims.height;
    if found != expected || expected == 0 {
        return Err(Error::DimensionMismatch {
            path: path.into(),
            width: dims.width,
            height: dims.height,
            expected,
            found,
        });
    }
    let mut values = Vec::with_capacity(found);
    for (index, chunk) in bytes.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]);
        if !v.is_finite() {
            return Err(Error::NonFinite {
                path: path.into(),
                index,
            });
        }
        values.push(f64::from(v));
    }
    AttributionMap::new(dims.width, dims.height, values).map_err(|e| Error::Format {
        path: path.into(),
        message: e.to_string(),
    })
}

/// Writes `am` as little-endian `f32` plus its sidecar next to it. Values are
/// narrowed to `f32`.
pub fn save_raw_f32(path: &Path, am: &AttributionMap) -> Result<()> {
    let bytes: Vec<u8> = am
        .values()
        .iter()
        .flat_map(|&v| (v as f32).to_le_bytes())
        .collect();
    fs::write(path, bytes).map_err(|e| Error::io(path, e))?;
    let sidecar = raw_sidecar_path(path);
    let json = serde_json::to_string(&RawSidecar {
        width: am.width(),
        height: am.height(),
    })
    .expect("plain struct");
    fs::write(&sidecar, json).map_err(|e| Error::io(&sidecar, e))
}

pub fn load_geometry(path: &Path) -> Result<SolarDiskGeometry> {
    let g: SolarDiskGeometry =
        serde_json::from_str(&read_to_string(path)?).map_err(|e| Error::Format {
            path: path.into(),
            message: e.to_string(),
        })?;
    g.validate().map_err(|e| Error::Format {
        path: path.into(),
        message: e.to_string(),
    })?;
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GoesClass {
    A,
    B,
    C,
    M,
    X,
}

/// A GOES flare class such as `M1.5`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlareClass {
    pub class: GoesClass,
    pub strength: f64,
}

impl FlareClass {
    /// True for M- and X-class events.
    pub fn is_major(&self) -> bool {
        matches!(self.class, GoesClass::M | GoesClass::X)
    }
}

impl FromStr for FlareClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let mut chars = s.chars();
        let class = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => GoesClass::A,
            Some('B') => GoesClass::B,
            Some('C') => GoesClass::C,
            Some('M') => GoesClass::M,
            Some('X') => GoesClass::X,
            _ => {
                return Err(format!(
                    "flare class must start with A, B, C, M or X: {s:?}"
                ))
            }
        };
        let strength: f64 = chars
            .as_str()
            .parse()
            .map_err(|_| format!("bad flare strength in {s:?}"))?;
        // X is open-ended; the other classes stop where the next one starts
        let upper = if class == GoesClass::X {
            f64::INFINITY
        } else {
            9.9
        };
        if !(1.0..=upper).contains(&strength) {
            return Err(format!("flare strength out of range in {s:?}"));
        }
        Ok(Self { class, strength })
    }
}

impl fmt::Display for FlareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{:.1}", self.class, self.strength)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActiveRegionRecord {
    pub noaa_ar_number: u32,
    pub location: HpcPoint,
    pub timestamp: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlareRecord {
    pub flare_class: FlareClass,
    pub location: HpcPoint,
    pub associated_ar: Option<u32>,
    pub peak_time: DateTime<Utc>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Catalog {
    pub active_regions: Vec<ActiveRegionRecord>,
    pub flares: Vec<FlareRecord>,
}

/// Loads a catalog CSV with columns `kind` (`AR` or `FL`), `timestamp`,
/// `hpcx_arcsec`, `hpcy_arcsec`, `noaa_ar`, `flare_class`.
pub fn load_catalog(path: &Path) -> Result<Catalog> {
    let mut cat = Catalog::default();
    for (i, fields) in read_csv_rows(path)?.iter().enumerate() {
        let ctx = RowCtx {
            path,
            row: i + 1,
            fields,
        };
        let location = HpcPoint::new(ctx.finite("hpcx_arcsec")?, ctx.finite("hpcy_arcsec")?);
        let timestamp = ctx.timestamp("timestamp")?;
        let noaa = ctx
            .opt("noaa_ar")
            .map(|v| {
                v.parse::<u32>()
                    .map_err(|_| ctx.err(format!("noaa_ar: expected an integer, got {v:?}")))
            })
            .transpose()?;
        match ctx.req("kind")?.to_ascii_uppercase().as_str() {
            "AR" => cat.active_regions.push(ActiveRegionRecord {
                noaa_ar_number: noaa.ok_or_else(|| ctx.err("AR row needs noaa_ar"))?,
                location,
                timestamp,
            }),
            "FL" => cat.flares.push(FlareRecord {
                flare_class: ctx
                    .req("flare_class")?
                    .parse()
                    .map_err(|m: String| ctx.err(m))?,
                location,
                associated_ar: noaa,
                peak_time: timestamp,
            }),
            other => return Err(ctx.err(format!("kind must be AR or FL, got {other:?}"))),
        }
    }
    Ok(cat)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchedAr {
    pub record: ActiveRegionRecord,
    pub pixel: PixelPoint,
    pub off_disk: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchedFlare {
    pub record: FlareRecord,
    pub pixel: PixelPoint,
    pub off_disk: bool,
}

/// Catalog entries associated with one image.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CatalogMatch {
    /// One entry per NOAA number, sorted by number.
    pub ars: Vec<MatchedAr>,
    pub flares: Vec<MatchedFlare>,
}

impl CatalogMatch {
    /// ARs usable by the metrics.
    pub fn on_disk_ars(&self) -> Vec<LocatedAr> {
        self.ars
            .iter()
            .filter(|a| !a.off_disk)
            .map(|a| LocatedAr {
                noaa_ar: a.record.noaa_ar_number,
                pixel: a.pixel,
            })
            .collect()
    }

    pub fn off_disk_ars(&self) -> Vec<u32> {
        self.ars
            .iter()
            .filter(|a| a.off_disk)
            .map(|a| a.record.noaa_ar_number)
            .collect()
    }
}

/// Records within `tolerance` of `timestamp`, converted to pixels with `g`.
///
/// When one NOAA region has several records in the window, the record
/// closest in time is used (earlier wins ties). ARs whose pixel position falls
/// outside the disk are kept but marked `off_disk`.
pub fn match_catalog(
    catalog: &Catalog,
    timestamp: DateTime<Utc>,
    tolerance: Duration,
    g: &SolarDiskGeometry,
) -> CatalogMatch {
    let within = |t: DateTime<Utc>| (t - timestamp).abs() <= tolerance;

    let mut best: BTreeMap<u32, &ActiveRegionRecord> = BTreeMap::new();
    for rec in catalog
        .active_regions
        .iter()
        .filter(|r| within(r.timestamp))
    {
        let key = |r: &ActiveRegionRecord| ((r.timestamp - timestamp).abs(), r.timestamp);
        best.entry(rec.noaa_ar_number)
            .and_modify(|cur| {
                if key(rec) < key(cur) {
                    *cur = rec;
                }
            })
            .or_insert(rec);
    }
    let ars = best
        .into_values()
        .map(|r| {
            let pixel = hpc_to_pixel(r.location, g);
            MatchedAr {
                record: r.clone(),
                pixel,
                off_disk: !g.contains(pixel),
            }
        })
        .collect();
    let flares = catalog
        .flares
        .iter()
        .filter(|f| within(f.peak_time))
        .map(|f| {
            let pixel = hpc_to_pixel(f.location, g);
            MatchedFlare {
                record: f.clone(),
                pixel,
                off_disk: !g.contains(pixel),
            }
        })
        .collect();
    CatalogMatch { ars, flares }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        fs::File::create(&p)
            .unwrap()
            .write_all(body.as_bytes())
            .unwrap();
        p
    }

    const HEADER: &str =
        "image_id,attribution_path,geometry_path,timestamp,predicted_flare,observed_flare\n";

    #[test]
    fn manifest_two_rows() {
        let d = tempfile::tempdir().unwrap();
        let p = write(
            d.path(),
            "m.csv",
            &format!("{HEADER}a,a.f32,,2021-01-01T00:00:00Z,true,false\nb,/abs/b.png,g.json,2021-01-01T04:00:00,0,1\n"),
        );
        let m = load_manifest(&p).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.entries[0].attribution_path, d.path().join("a.f32"));
        assert_eq!(m.entries[0].geometry_path, None);
        assert_eq!(m.entries[1].attribution_path, PathBuf::from("/abs/b.png"));
        assert_eq!(m.entries[1].geometry_path, Some(d.path().join("g.json")));
        assert!(m.entries[0].predicted_flare && !m.entries[0].observed_flare);
    }

    #[test]
    fn manifest_missing_field_names_row() {
        let d = tempfile::tempdir().unwrap();
        let p = write(
            d.path(),
            "m.csv",
            &format!("{HEADER}a,a.f32,,2021-01-01T00:00:00Z,true,false\nb,b.f32,,2021-01-01T00:00:00Z,,true\n"),
        );
        let err = load_manifest(&p).unwrap_err().to_string();
        assert!(
            err.contains("row 2") && err.contains("predicted_flare"),
            "{err}"
        );
    }

    #[test]
    fn manifest_duplicate_id() {
        let d = tempfile::tempdir().unwrap();
        let p = write(
            d.path(),
            "m.csv",
            &format!("{HEADER}dup,a.f32,,2021-01-01T00:00:00Z,true,false\ndup,b.f32,,2021-01-01T00:00:00Z,true,true\n"),
        );
        let err = load_manifest(&p).unwrap_err();
        assert!(matches!(&err, Error::DuplicateId { id, .. } if id == "dup"));
        assert!(err.to_string().contains("dup"));
    }

    #[test]
    fn manifest_missing_file() {
        assert!(matches!(
            load_manifest(Path::new("/nonexistent/m.csv")),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn pgm_8bit() {
        let d = tempfile::tempdir().unwrap();
        let mut body = b"P5\n4 4\n255\n".to_vec();
        body.extend([7u8; 16]);
        let p = d.path().join("a.pgm");
        fs::write(&p, body).unwrap();
        let am = load_attribution(&p, None).unwrap();
        assert_eq!((am.width(), am.height()), (4, 4));
        assert!(am.values().iter().all(|&v| v == 7.0));
    }

    #[test]
    fn png_16bit_keeps_precision() {
        let d = tempfile::tempdir().unwrap();
        let p = d.path().join("a.png");
        let img = image::ImageBuffer::<image::Luma<u16>, _>::from_fn(3, 2, |x, y| {
            image::Luma([1000 * x as u16 + y as u16 + 1])
        });
        img.save(&p).unwrap();
        let am = load_attribution(&p, None).unwrap();
        assert_eq!(am.get(2, 1), 2002.0);
    }

    #[test]
    fn color_png_rejected() {
        let d = tempfile::tempdir().unwrap();
        let p = d.path().join("c.png");
        image::RgbImage::new(2, 2).save(&p).unwrap();
        assert!(matches!(
            load_attribution(&p, None),
            Err(Error::UnsupportedFormat { .. })
        ));
    }

    #[test]
    fn raw_f32_with_sidecar() {
        let d = tempfile::tempdir().unwrap();
        let p = d.path().join("a.f32");
        let am =
            AttributionMap::new(4, 4, (0..16).map(|v| v as f64 * 0.25 - 1.0).collect()).unwrap();
        save_raw_f32(&p, &am).unwrap();
        assert_eq!(load_attribution(&p, None).unwrap(), am);

        write(d.path(), "wrong.json", r#"{"width":5,"height":5}"#);
        let err = load_attribution(&p, Some(&d.path().join("wrong.json"))).unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch {
                expected: 25,
                found: 16,
                ..
            }
        ));
    }

    #[test]
    fn raw_f32_rejects_nan() {
        let d = tempfile::tempdir().unwrap();
        let p = d.path().join("n.f32");
        let bytes: Vec<u8> = [1.0f32, f32::NAN]
            .iter()
            .flat_map(|v| v.to_le_bytes())
            .collect();
        fs::write(&p, bytes).unwrap();
        write(d.path(), "n.json", r#"{"width":2,"height":1}"#);
        assert!(matches!(
            load_attribution(&p, None),
            Err(Error::NonFinite { index: 1, .. })
        ));
    }

    #[test]
    fn unknown_extension() {
        assert!(matches!(
            load_attribution(Path::new("x.tiff"), None),
            Err(Error::UnsupportedFormat { .. })
        ));
    }

    #[test]
    fn geometry_sidecar() {
        let d = tempfile::tempdir().unwrap();
        let p = write(
            d.path(),
            "g.json",
            r#"{"hpc_center_x":256,"hpc_center_y":250.5,"cdelt":4.1,"disk_radius_px":238,"image_size":512}"#,
        );
        let g = load_geometry(&p).unwrap();
        assert_eq!(g.hpc_center_y, 250.5);
        let bad = write(
            d.path(),
            "b.json",
            r#"{"hpc_center_x":256,"hpc_center_y":256,"cdelt":-1,"disk_radius_px":238,"image_size":512}"#,
        );
        assert!(load_geometry(&bad).is_err());
    }

    #[test]
    fn flare_classes() {
        let m: FlareClass = "M1.5".parse().unwrap();
        assert_eq!((m.class, m.strength), (GoesClass::M, 1.5));
        assert!(m.is_major());
        assert!("X17".parse::<FlareClass>().is_ok());
        assert!("C0.5".parse::<FlareClass>().is_err());
        assert!("M12".parse::<FlareClass>().is_err());
        assert!("Q1.0".parse::<FlareClass>().is_err());
        assert_eq!(m.to_string(), "M1.5");
    }

    fn catalog_file(dir: &Path) -> PathBuf {
        write(
            dir,
            "cat.csv",
            "kind,timestamp,hpcx_arcsec,hpcy_arcsec,noaa_ar,flare_class\n\
             AR,2021-05-01T00:00:00Z,0,0,12800,\n\
             AR,2021-05-01T03:00:00Z,100,0,12801,\n\
             AR,2021-05-01T00:00:00Z,2000,0,12802,\n\
             FL,2021-05-01T01:00:00Z,-40,12,12800,M2.3\n",
        )
    }

    #[test]
    fn catalog_matching() {
        let d = tempfile::tempdir().unwrap();
        let cat = load_catalog(&catalog_file(d.path())).unwrap();
        assert_eq!((cat.active_regions.len(), cat.flares.len()), (3, 1));
        let t = parse_timestamp("2021-05-01T00:00:00Z").unwrap();
        let g = SolarDiskGeometry::default();
        let m = match_catalog(&cat, t, Duration::hours(2), &g);
        let ids: Vec<u32> = m.ars.iter().map(|a| a.record.noaa_ar_number).collect();
        assert_eq!(ids, vec![12800, 12802]);
        assert_eq!(m.off_disk_ars(), vec![12802]);
        assert_eq!(m.on_disk_ars().len(), 1);
        assert_eq!(m.on_disk_ars()[0].pixel, PixelPoint::new(256.0, 256.0));
        assert_eq!(m.flares.len(), 1);

        let wide = match_catalog(&cat, t, Duration::hours(4), &g);
        assert_eq!(wide.ars.len(), 3);
    }

    #[test]
    fn catalog_keeps_closest_record_per_region() {
        let d = tempfile::tempdir().unwrap();
        let p = write(
            d.path(),
            "c.csv",
            "kind,timestamp,hpcx_arcsec,hpcy_arcsec,noaa_ar,flare_class\n\
             AR,2021-05-01T01:30:00Z,10,0,7,\n\
             AR,2021-05-01T00:30:00Z,20,0,7,\n",
        );
        let cat = load_catalog(&p).unwrap();
        let t = parse_timestamp("2021-05-01T00:00:00Z").unwrap();
        let m = match_catalog(&cat, t, Duration::hours(2), &SolarDiskGeometry::default());
        assert_eq!(m.ars.len(), 1);
        assert_eq!(m.ars[0].record.location.hpcx, 20.0);
    }

    #[test]
    fn catalog_rejects_bad_rows() {
        let d = tempfile::tempdir().unwrap();
        let header = "kind,timestamp,hpcx_arcsec,hpcy_arcsec,noaa_ar,flare_class\n";
        for (body, needle) in [
            ("AR,2021-05-01T00:00:00Z,nan,0,1,\n", "hpcx_arcsec"),
            ("AR,yesterday,0,0,1,\n", "timestamp"),
            ("AR,2021-05-01T00:00:00Z,0,0,,\n", "noaa_ar"),
            ("FL,2021-05-01T00:00:00Z,0,0,1,Z3\n", "flare class"),
            ("XX,2021-05-01T00:00:00Z,0,0,1,\n", "kind"),
        ] {
            let p = write(d.path(), "bad.csv", &format!("{header}{body}"));
            let err = load_catalog(&p).unwrap_err().to_string();
            assert!(err.contains("row 1") && err.contains(needle), "{err}");
        }
    }

    #[test]
    fn timestamps() {
        let a = parse_timestamp("2021-05-01T02:00:00+02:00").unwrap();
        let b = parse_timestamp("2021-05-01 00:00:00").unwrap();
        assert_eq!(a, b);
        assert!(parse_timestamp("2021-13-01T00:00:00").is_none());
    }
}
