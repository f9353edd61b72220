//! GeoJSON-like encoding of layers and overlay results.
//!
//! A layer is `{"name", "crs", "features": [Feature]}` where each feature is
//! `{"type": "Feature", "geometry": {"type": "Polygon", "coordinates":
//! [outer, hole...]}, "properties": {...}}`. Rings are written closed and
//! accepted either closed or open.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AttributeRecord, Layer, OverlayResult, Polygon, Region};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct Geometry {
    #[serde(rename = "type")]
    kind: String,
    coordinates: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize, Deserialize)]
struct Feature {
    #[serde(rename = "type", default = "feature_tag")]
    kind: String,
    geometry: Geometry,
    #[serde(default)]
    properties: AttributeRecord,
}

fn feature_tag() -> String {
    "Feature".into()
}

#[derive(Serialize, Deserialize)]
struct LayerDoc {
    name: String,
    crs: String,
    features: Vec<Feature>,
}

#[derive(Serialize)]
struct CellDoc<'a> {
    #[serde(rename = "type")]
    kind: &'static str,
    geometry: Geometry,
    properties: &'a AttributeRecord,
    provenance: BTreeMap<&'a str, Option<usize>>,
    area: f64,
}

#[derive(Serialize)]
struct ResultDoc<'a> {
    crs: &'a str,
    layers: &'a [String],
    cells: Vec<CellDoc<'a>>,
}

fn geometry(p: &Polygon) -> Geometry {
    let close = |r: &Vec<[f64; 2]>| {
        let mut r = r.clone();
        if let Some(&f) = r.first() {
            r.push(f);
        }
        r
    };
    Geometry {
        kind: "Polygon".into(),
        coordinates: std::iter::once(&p.outer).chain(&p.holes).map(close).collect(),
    }
}

pub fn layer_from_json(text: &str) -> Result<Layer> {
    let doc: LayerDoc = serde_json::from_str(text).map_err(|e| Error::Parse(format!("layer: {e}")))?;
    let mut regions = Vec::with_capacity(doc.features.len());
    for (i, f) in doc.features.into_iter().enumerate() {
        if f.kind != "Feature" || f.geometry.kind != "Polygon" {
            return Err(Error::Parse(format!("feature {i}: expected a Polygon Feature")));
        }
        let mut rings = f.geometry.coordinates.into_iter();
        let outer = rings
            .next()
            .ok_or_else(|| Error::Parse(format!("feature {i}: polygon has no rings")))?;
        regions.push(Region {
            polygon: Polygon::new(outer, rings.collect()),
            attributes: f.properties,
        });
    }
    Ok(Layer {
        name: doc.name,
        crs: doc.crs,
        regions,
    })
}

pub fn layer_to_json(layer: &Layer) -> String {
    let doc = LayerDoc {
        name: layer.name.clone(),
        crs: layer.crs.clone(),
        features: layer
            .regions
            .iter()
            .map(|r| Feature {
                kind: feature_tag(),
                geometry: geometry(&r.polygon),
                properties: r.attributes.clone(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("layer serializes")
}

pub fn result_to_json(result: &OverlayResult) -> String {
    let doc = ResultDoc {
        crs: &result.crs,
        layers: &result.layers,
        cells: result
            .cells
            .iter()
            .map(|c| CellDoc {
                kind: "Feature",
                geometry: geometry(&c.polygon),
                properties: &c.attributes,
                provenance: result
                    .layers
                    .iter()
                    .map(|s| s.as_str())
                    .zip(c.provenance.iter().copied())
                    .collect(),
                area: c.area(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("result serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::overlay::AttrValue;

    #[test]
    fn layer_roundtrip() {
        let text = r#"{"name": "soil", "crs": "EPSG:4326", "features": [
            {"type": "Feature",
             "geometry": {"type": "Polygon", "coordinates": [[[0,0],[0,1],[1,1],[1,0],[0,0]]]},
             "properties": {"kind": "clay", "depth": 2.5, "zone": {"category": "A"}}}]}"#;
        let l = layer_from_json(text).unwrap();
        assert_eq!(l.regions.len(), 1);
        assert_eq!(l.regions[0].polygon.outer.len(), 4);
        assert_eq!(l.regions[0].polygon.area(), 1.0);
        assert_eq!(l.regions[0].attributes["depth"], AttrValue::Number(2.5));
        assert_eq!(
            l.regions[0].attributes["zone"],
            AttrValue::Category { category: "A".into() }
        );
        let back = layer_from_json(&layer_to_json(&l)).unwrap();
        assert_eq!(back, l);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(layer_from_json("{"), Err(Error::Parse(_))));
        let line = r#"{"name": "x", "crs": "c", "features": [
            {"type": "Feature", "geometry": {"type": "LineString", "coordinates": []}}]}"#;
        assert!(matches!(layer_from_json(line), Err(Error::Parse(_))));
    }
}
