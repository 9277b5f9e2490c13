//! Point-cloud CSV, diagram CSV/JSON and flat-diagram CSV.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use flatdiag_core::diagram::FlatPoint;
use flatdiag_core::persistence::{PersistenceDiagram, PersistenceFeature};
use flatdiag_core::pointcloud::PointCloud;
use serde::{Deserialize, Serialize};

use crate::Error;

/// Header line of the diagram CSV.
pub const DIAGRAM_HEADER: [&str; 3] = ["dimension", "birth", "death"];
/// Header line of the flat-diagram CSV.
pub const FLAT_HEADER: [&str; 3] = ["dimension", "birth", "persistence"];

/// Token used for infinite deaths and persistences.
pub const INF_TOKEN: &str = "inf";

fn fmt_value(x: f64) -> String {
    if x == f64::INFINITY {
        INF_TOKEN.to_string()
    } else {
        // Display gives the shortest string that parses back to the same bits
        format!("{x}")
    }
}

fn open(path: &Path) -> Result<File, Error> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>, Error> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn csv_error(origin: &Path, err: csv::Error) -> Error {
    let line = err.position().map_or(0, |p| p.line());
    match err.into_kind() {
        csv::ErrorKind::Io(e) => Error::io(origin, e),
        other => Error::parse(origin, line, format!("{other:?}")),
    }
}

// ---------------------------------------------------------------- point clouds

/// Parses a point cloud: one point per line, comma-separated decimal
/// coordinates, no header. With `skip_header`, a first row that is not numeric
/// is ignored.
pub fn parse_cloud_csv<R: Read>(reader: R, origin: &Path, skip_header: bool) -> Result<PointCloud, Error> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut dim: Option<usize> = None;
    let mut coords = Vec::new();
    let mut first = true;
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(origin, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let row = match parsed {
            Ok(row) => row,
            Err(_) if first && skip_header => {
                first = false;
                continue;
            }
            Err(_) => {
                let bad = record.iter().find(|f| f.parse::<f64>().is_err()).unwrap_or("");
                return Err(Error::parse(origin, line, format!("not a number: {bad:?}")));
            }
        };
        first = false;
        if let Some(bad) = row.iter().find(|x| !x.is_finite()) {
            return Err(Error::parse(origin, line, format!("coordinate {bad} is not finite")));
        }
        match dim {
            None => dim = Some(row.len()),
            Some(d) if d != row.len() => {
                return Err(Error::parse(
                    origin,
                    line,
                    format!("expected {d} coordinates, found {} (inconsistent dimension)", row.len()),
                ))
            }
            Some(_) => {}
        }
        coords.extend(row);
    }
    let Some(dim) = dim else {
        return Err(Error::parse(origin, 1, "no points in file"));
    };
    Ok(PointCloud::new(dim, coords)?)
}

/// Reads a point-cloud CSV file.
pub fn read_cloud_csv(path: &Path, skip_header: bool) -> Result<PointCloud, Error> {
    parse_cloud_csv(open(path)?, path, skip_header)
}

/// Writes a cloud as headerless CSV at full precision.
pub fn write_cloud_csv_to<W: Write>(cloud: &PointCloud, writer: W) -> io::Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    for p in cloud.points() {
        wtr.write_record(p.iter().map(|&x| fmt_value(x)))?;
    }
    wtr.flush()
}

/// Writes a point-cloud CSV file.
pub fn write_cloud_csv(cloud: &PointCloud, path: &Path) -> Result<(), Error> {
    write_cloud_csv_to(cloud, create(path)?).map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------- diagrams

/// On-disk diagram encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagramFormat {
    /// `dimension,birth,death` CSV.
    Csv,
    /// JSON object with `n_points`, `max_scale` and `features`.
    Json,
}

impl DiagramFormat {
    /// JSON for a `.json` extension, CSV otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => DiagramFormat::Json,
            _ => DiagramFormat::Csv,
        }
    }
}

fn parse_value(field: &str, what: &str, origin: &Path, line: u64) -> Result<f64, Error> {
    field
        .parse::<f64>()
        .ok()
        .filter(|x| !x.is_nan())
        .ok_or_else(|| Error::parse(origin, line, format!("{what} is not a number: {field:?}")))
}

fn check_feature(f: &PersistenceFeature, origin: &Path, line: u64) -> Result<(), Error> {
    if !(f.birth.is_finite() && f.birth >= 0.0) {
        return Err(Error::parse(origin, line, format!("birth {} must be finite and nonnegative", f.birth)));
    }
    if !(f.death > f.birth) {
        return Err(Error::parse(origin, line, format!("death {} must exceed birth {}", f.death, f.birth)));
    }
    Ok(())
}

/// Largest finite value in a feature list, used as `max_scale` when the file does not carry one.
fn max_finite(features: &[PersistenceFeature]) -> f64 {
    features
        .iter()
        .flat_map(|f| [f.birth, f.death])
        .filter(|x| x.is_finite())
        .fold(0.0, f64::max)
}

/// Parses a diagram CSV. The format does not store `n_points`, which is set
/// to 0, or `max_scale`, which becomes the largest finite birth or death.
pub fn parse_diagram_csv<R: Read>(reader: R, origin: &Path) -> Result<PersistenceDiagram, Error> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(|e| csv_error(origin, e))?.clone();
    if header.iter().ne(DIAGRAM_HEADER) {
        return Err(Error::parse(origin, 1, format!("expected header {:?}", DIAGRAM_HEADER.join(","))));
    }
    let mut features = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(origin, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let dimension = record[0]
            .parse::<usize>()
            .map_err(|_| Error::parse(origin, line, format!("dimension is not a degree: {:?}", &record[0])))?;
        let birth = parse_value(&record[1], "birth", origin, line)?;
        let death = parse_value(&record[2], "death", origin, line)?;
        let feature = PersistenceFeature { dimension, birth, death };
        check_feature(&feature, origin, line)?;
        features.push(feature);
    }
    let max_scale = max_finite(&features);
    Ok(PersistenceDiagram { features, max_scale, n_points: 0 })
}

/// Writes a diagram as CSV.
pub fn write_diagram_csv_to<W: Write>(diag: &PersistenceDiagram, writer: W) -> io::Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(DIAGRAM_HEADER)?;
    for f in &diag.features {
        wtr.write_record([f.dimension.to_string(), fmt_value(f.birth), fmt_value(f.death)])?;
    }
    wtr.flush()
}

/// Writes flat points as CSV.
pub fn write_flat_csv_to<W: Write>(points: &[FlatPoint], writer: W) -> io::Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(FLAT_HEADER)?;
    for p in points {
        wtr.write_record([p.dimension.to_string(), fmt_value(p.birth), fmt_value(p.persistence)])?;
    }
    wtr.flush()
}

#[derive(Serialize, Deserialize)]
struct DiagramJson {
    n_points: usize,
    max_scale: f64,
    features: Vec<FeatureJson>,
}

#[derive(Serialize, Deserialize)]
struct FeatureJson {
    dimension: usize,
    birth: f64,
    death: DeathJson,
}

/// JSON has no infinity, so essential deaths are the string `"inf"`.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DeathJson {
    Finite(f64),
    Token(String),
}

/// Renders a diagram as pretty-printed JSON.
pub fn diagram_to_json(diag: &PersistenceDiagram) -> String {
    let doc = DiagramJson {
        n_points: diag.n_points,
        max_scale: diag.max_scale,
        features: diag
            .features
            .iter()
            .map(|f| FeatureJson {
                dimension: f.dimension,
                birth: f.birth,
                death: if f.is_essential() { DeathJson::Token(INF_TOKEN.into()) } else { DeathJson::Finite(f.death) },
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("diagram serializes");
    text.push('\n');
    text
}

/// Parses the JSON produced by [`diagram_to_json`].
pub fn parse_diagram_json<R: Read>(reader: R, origin: &Path) -> Result<PersistenceDiagram, Error> {
    let doc: DiagramJson =
        serde_json::from_reader(reader).map_err(|e| Error::Json { path: origin.into(), source: e })?;
    let mut features = Vec::with_capacity(doc.features.len());
    for (i, f) in doc.features.into_iter().enumerate() {
        let death = match f.death {
            DeathJson::Finite(d) => d,
            DeathJson::Token(t) if t == INF_TOKEN => f64::INFINITY,
            DeathJson::Token(t) => {
                return Err(Error::parse(origin, 0, format!("feature {i}: death {t:?} is neither a number nor \"inf\"")))
            }
        };
        let feature = PersistenceFeature { dimension: f.dimension, birth: f.birth, death };
        check_feature(&feature, origin, 0)?;
        features.push(feature);
    }
    Ok(PersistenceDiagram { features, max_scale: doc.max_scale, n_points: doc.n_points })
}

/// Writes a diagram in the given format.
pub fn write_diagram_to<W: Write>(diag: &PersistenceDiagram, format: DiagramFormat, mut writer: W) -> io::Result<()> {
    match format {
        DiagramFormat::Csv => write_diagram_csv_to(diag, writer),
        DiagramFormat::Json => writer.write_all(diagram_to_json(diag).as_bytes()),
    }
}

/// Writes a diagram file, choosing the format from the extension.
pub fn write_diagram(diag: &PersistenceDiagram, path: &Path) -> Result<(), Error> {
    let mut w = create(path)?;
    write_diagram_to(diag, DiagramFormat::from_path(path), &mut w)
        .and_then(|()| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Reads a diagram file, choosing the format from the extension.
pub fn read_diagram(path: &Path) -> Result<PersistenceDiagram, Error> {
    let file = open(path)?;
    match DiagramFormat::from_path(path) {
        DiagramFormat::Csv => parse_diagram_csv(file, path),
        DiagramFormat::Json => parse_diagram_json(file, path),
    }
}

/// Writes a flat-diagram CSV file.
pub fn write_flat_csv(points: &[FlatPoint], path: &Path) -> Result<(), Error> {
    write_flat_csv_to(points, create(path)?).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use flatdiag_core::diagram::to_flat;
    use proptest::prelude::*;

    fn origin() -> &'static Path {
        Path::new("mem.csv")
    }

    fn cloud(text: &str) -> Result<PointCloud, Error> {
        parse_cloud_csv(text.as_bytes(), origin(), false)
    }

    fn diagram() -> PersistenceDiagram {
        let f = |dimension, birth, death| PersistenceFeature { dimension, birth, death };
        PersistenceDiagram {
            features: vec![f(0, 0.0, f64::INFINITY), f(0, 0.0, 1.0), f(1, 1.0, std::f64::consts::SQRT_2)],
            max_scale: std::f64::consts::SQRT_2,
            n_points: 4,
        }
    }

    #[test]
    fn single_point() {
        let c = cloud("1.5,2.5").unwrap();
        assert_eq!(c.ambient_dim(), 2);
        assert_eq!(c.point(0), &[1.5, 2.5]);
    }

    #[test]
    fn ragged_rows_name_the_line() {
        let err = cloud("0,0\n1,0,0").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn bad_tokens_and_empty_files() {
        assert!(matches!(cloud("0,0\n1,x\n").unwrap_err(), Error::Parse { line: 2, .. }));
        assert!(matches!(cloud("1,2,\n").unwrap_err(), Error::Parse { line: 1, .. }));
        assert!(matches!(cloud("").unwrap_err(), Error::Parse { line: 1, .. }));
        assert!(matches!(cloud("nan,1\n").unwrap_err(), Error::Parse { line: 1, .. }));
    }

    #[test]
    fn optional_header() {
        assert!(cloud("x,y\n1,2\n").is_err());
        let c = parse_cloud_csv("x,y\n1,2\n3,4\n".as_bytes(), origin(), true).unwrap();
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn diagram_csv_text() {
        let mut buf = Vec::new();
        write_diagram_csv_to(&diagram(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "dimension,birth,death\n0,0,inf\n0,0,1\n1,1,1.4142135623730951\n");
        let back = parse_diagram_csv(text.as_bytes(), origin()).unwrap();
        assert_eq!(back.features, diagram().features);
        assert_eq!(back.max_scale, std::f64::consts::SQRT_2);
    }

    #[test]
    fn diagram_csv_errors() {
        let parse = |t: &str| parse_diagram_csv(t.as_bytes(), origin());
        assert!(parse("dim,birth,death\n").is_err());
        assert!(matches!(parse("dimension,birth,death\n0,0,1\n1,2,1\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse("dimension,birth,death\n-1,0,1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse("dimension,birth,death\n0,0\n").is_err());
    }

    #[test]
    fn diagram_json_round_trip() {
        let text = diagram_to_json(&diagram());
        assert!(text.contains("\"death\": \"inf\""));
        assert!(text.contains("\"n_points\": 4"));
        let back = parse_diagram_json(text.as_bytes(), origin()).unwrap();
        assert_eq!(back, diagram());
        let bad = text.replace("\"inf\"", "\"forever\"");
        assert!(parse_diagram_json(bad.as_bytes(), origin()).is_err());
    }

    #[test]
    fn flat_csv_text() {
        let mut buf = Vec::new();
        write_flat_csv_to(&to_flat(&diagram()), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("dimension,birth,persistence"));
        assert_eq!(text.lines().nth(1), Some("0,0,inf"));
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(DiagramFormat::from_path(Path::new("a.JSON")), DiagramFormat::Json);
        assert_eq!(DiagramFormat::from_path(Path::new("a.csv")), DiagramFormat::Csv);
        assert_eq!(DiagramFormat::from_path(Path::new("a")), DiagramFormat::Csv);
    }

    proptest! {
        #[test]
        fn cloud_csv_round_trip(dim in 1usize..5, raw in proptest::collection::vec(proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO, 1..60)) {
            let len = (raw.len() / dim).max(1) * dim;
            let coords: Vec<f64> = raw.iter().cycle().take(len).copied().collect();
            let c = PointCloud::new(dim, coords).unwrap();
            let mut buf = Vec::new();
            write_cloud_csv_to(&c, &mut buf).unwrap();
            let back = parse_cloud_csv(buf.as_slice(), origin(), false).unwrap();
            let bits = |c: &PointCloud| c.coords().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
            prop_assert_eq!(bits(&back), bits(&c));
            prop_assert_eq!(back.ambient_dim(), dim);
        }
    }
}
