//! JSON encoding of a topology model: the entity tables plus both directions
//! of every relation group. Import re-derives the relations and rejects a
//! document whose stored relations disagree.

use serde::{Deserialize, Serialize};

use super::{Arc, Body, Census, Face, Feature, Relation, RelationGroup, Ring, TopologyModel};
use crate::error::{Error, Result};
use crate::geom::Point3;

#[derive(Serialize, Deserialize)]
struct RelationDoc {
    group: RelationGroup,
    forward: Vec<Vec<usize>>,
    inverse: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    census: Census,
    nodes: Vec<[f64; 3]>,
    arcs: Vec<Arc>,
    rings: Vec<Ring>,
    faces: Vec<Face>,
    bodies: Vec<Body>,
    features: Vec<Feature>,
    #[serde(default)]
    relations: Vec<RelationDoc>,
}

pub fn model_to_json(m: &TopologyModel) -> String {
    let doc = ModelDoc {
        census: m.census(),
        nodes: m.nodes.iter().map(|p| p.to_array()).collect(),
        arcs: m.arcs.clone(),
        rings: m.rings.clone(),
        faces: m.faces.clone(),
        bodies: m.bodies.clone(),
        features: m.features.clone(),
        relations: RelationGroup::ALL
            .iter()
            .zip(m.relations())
            .map(|(&group, r)| RelationDoc {
                group,
                forward: r.forward.clone(),
                inverse: r.inverse.clone(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("model serializes")
}

pub fn model_from_json(text: &str) -> Result<TopologyModel> {
    let doc: ModelDoc = serde_json::from_str(text).map_err(|e| Error::Parse(format!("topology: {e}")))?;
    let m = TopologyModel::from_tables(
        doc.nodes.into_iter().map(Point3::from_array).collect(),
        doc.arcs,
        doc.rings,
        doc.faces,
        doc.bodies,
        doc.features,
    )?;
    if m.census() != doc.census {
        return Err(Error::Parse("census does not match the tables".into()));
    }
    for r in doc.relations {
        let stored = Relation {
            forward: r.forward,
            inverse: r.inverse,
        };
        if &stored != m.relation(r.group) {
            return Err(Error::Parse(format!(
                "{:?} relation does not match the tables",
                r.group
            )));
        }
    }
    Ok(m)
}
