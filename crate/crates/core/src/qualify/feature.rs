use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};
use geo::orient::{Direction, Orient};
use geo::{Area, Polygon, Validation};
use geojson::{Feature, GeometryValue, JsonObject, JsonValue};

use crate::error::{Error, Result};

/// Polygons with less area than this (in squared CRS units) are rejected.
pub const MIN_AREA: f64 = 1e-12;

/// One timestamped observation of an object's extent.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedFeature {
    pub object_id: String,
    pub object_type: String,
    pub timestamp: DateTime<Utc>,
    /// Timestamp exactly as given in the input.
    pub raw_timestamp: String,
    pub geometry: Polygon<f64>,
    pub source_id: String,
}

pub(crate) fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && !id.starts_with('@')
        && !id.contains([';', '{', '}', ',', '#', '\''])
        && !id.contains(char::is_whitespace)
}

/// Accepts RFC 3339, a naive `YYYY-MM-DDTHH:MM:SS` (taken as UTC) or a bare
/// date (midnight UTC).
pub fn parse_timestamp(value: &str) -> Result<DateTime<Utc>> {
    let v = value.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(v) {
        return Ok(t.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(v, fmt) {
            return Ok(t.and_utc());
        }
    }
    if let Ok(d) = NaiveDate::parse_from_str(v, "%Y-%m-%d") {
        return Ok(d.and_hms_opt(0, 0, 0).expect("midnight").and_utc());
    }
    Err(Error::Timestamp { value: value.to_string(), reason: "expected ISO-8601".into() })
}

/// Orients the exterior counter-clockwise and rejects invalid or degenerate
/// polygons.
pub fn validate_polygon(id: &str, poly: Polygon<f64>) -> Result<Polygon<f64>> {
    let geometry_err = |reason: String| Error::Geometry { id: id.to_string(), reason };
    if poly.exterior().0.len() < 4 {
        return Err(geometry_err("exterior ring needs at least 3 distinct points".into()));
    }
    if poly.exterior().0.iter().chain(poly.interiors().iter().flat_map(|r| r.0.iter())).any(|c| !c.x.is_finite() || !c.y.is_finite()) {
        return Err(geometry_err("non-finite coordinate".into()));
    }
    let poly = poly.orient(Direction::Default);
    if let Err(e) = poly.check_validation() {
        return Err(geometry_err(e.to_string()));
    }
    let area = poly.unsigned_area();
    if area < MIN_AREA {
        return Err(geometry_err(format!("degenerate area {area:e}")));
    }
    Ok(poly)
}

fn string_prop(props: &JsonObject, key: &str, line: usize) -> Result<String> {
    match props.get(key) {
        Some(JsonValue::String(s)) => Ok(s.clone()),
        Some(JsonValue::Number(n)) => Ok(n.to_string()),
        _ => Err(Error::Parse(format!("line {line}: missing string property `{key}`"))),
    }
}

impl TimedFeature {
    pub fn from_geojson(feature: &Feature, line: usize) -> Result<TimedFeature> {
        let empty = JsonObject::new();
        let props = feature.properties.as_ref().unwrap_or(&empty);
        let object_id = string_prop(props, "id", line)?;
        if !valid_id(&object_id) {
            return Err(Error::Parse(format!("line {line}: invalid object id `{object_id}`")));
        }
        let object_type = string_prop(props, "type", line)?;
        let raw_timestamp = string_prop(props, "timestamp", line)?;
        let timestamp = parse_timestamp(&raw_timestamp)?;
        let source_id = string_prop(props, "source", line)?;
        let geometry = feature
            .geometry
            .as_ref()
            .ok_or_else(|| Error::Geometry { id: object_id.clone(), reason: "missing geometry".into() })?;
        let poly = Polygon::<f64>::try_from(&geometry.value)
            .map_err(|e| Error::Geometry { id: object_id.clone(), reason: e.to_string() })?;
        let geometry = validate_polygon(&object_id, poly)?;
        Ok(TimedFeature { object_id, object_type, timestamp, raw_timestamp, geometry, source_id })
    }

    pub fn to_geojson(&self) -> Feature {
        let mut props = JsonObject::new();
        props.insert("id".into(), self.object_id.clone().into());
        props.insert("type".into(), self.object_type.clone().into());
        props.insert("timestamp".into(), self.raw_timestamp.clone().into());
        props.insert("source".into(), self.source_id.clone().into());
        Feature {
            geometry: Some(geojson::Geometry::new(GeometryValue::from(&self.geometry))),
            properties: Some(props),
            ..Feature::default()
        }
    }
}

/// Reads newline-delimited GeoJSON Features. Blank lines are skipped.
pub fn parse_features(text: &str) -> Result<Vec<TimedFeature>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let feature: Feature = line.parse().map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))?;
        out.push(TimedFeature::from_geojson(&feature, n + 1)?);
    }
    if out.is_empty() {
        return Err(Error::NoFeatures);
    }
    Ok(out)
}

/// Inverse of [`parse_features`].
pub fn write_features(features: &[TimedFeature]) -> String {
    let mut out = String::new();
    for f in features {
        out.push_str(&f.to_geojson().to_string());
        out.push('\n');
    }
    out
}
