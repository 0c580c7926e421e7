//! JSON documents for posets and morphisms.

use crate::error::{Error, Result};
use crate::morphism::PMorphism;
use crate::poset::Poset;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// `{"elements": [...], "covers": [[a, b], ...]}` or the same with `"leq"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetDoc {
    pub elements: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covers: Option<Vec<(String, String)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leq: Option<Vec<(String, String)>>,
}

impl PosetDoc {
    pub fn of(p: &Poset) -> PosetDoc {
        let covers = p
            .covers()
            .into_iter()
            .map(|(a, b)| (p.label(a).to_string(), p.label(b).to_string()))
            .collect();
        PosetDoc {
            elements: p.labels().to_vec(),
            covers: Some(covers),
            leq: None,
        }
    }

    pub fn build(&self) -> Result<Poset> {
        match (&self.covers, &self.leq) {
            (Some(c), None) => Poset::from_covers(&self.elements, c),
            (None, Some(l)) => Poset::from_leq(&self.elements, l),
            _ => Err(Error::Parse("exactly one of \"covers\" and \"leq\" must be present".into())),
        }
    }
}

pub fn parse_poset(text: &str) -> Result<Poset> {
    let doc: PosetDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.build()
}

pub fn poset_json(p: &Poset) -> Value {
    serde_json::to_value(PosetDoc::of(p)).expect("poset documents serialize")
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn read_poset(path: &Path) -> Result<Poset> {
    parse_poset(&read(path)?)
}

/// A poset given inline or as a path relative to the morphism document.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PosetRef {
    Inline(PosetDoc),
    File(String),
}

impl PosetRef {
    fn resolve(&self, base: Option<&Path>) -> Result<Poset> {
        match self {
            PosetRef::Inline(doc) => doc.build(),
            PosetRef::File(f) => {
                let path = match base {
                    Some(b) => b.join(f),
                    None => PathBuf::from(f),
                };
                read_poset(&path)
            }
        }
    }
}

/// `{"dom": <poset or file>, "cod": <poset or file>, "map": {label: label}}`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDoc {
    pub dom: PosetRef,
    pub cod: PosetRef,
    pub map: HashMap<String, String>,
}

/// Parses a morphism document; file references resolve against `base`.
pub fn parse_morphism(text: &str, base: Option<&Path>) -> Result<PMorphism> {
    let doc: MorphismDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let dom = Arc::new(doc.dom.resolve(base)?);
    let cod = Arc::new(doc.cod.resolve(base)?);
    PMorphism::from_labels(dom, cod, &doc.map)
}

pub fn read_morphism(path: &Path) -> Result<PMorphism> {
    parse_morphism(&read(path)?, path.parent())
}

/// The map in domain order.
pub fn map_json(u: &PMorphism) -> Value {
    let mut m = Map::new();
    for (x, y) in u.label_pairs() {
        m.insert(x, Value::String(y));
    }
    Value::Object(m)
}

pub fn morphism_json(u: &PMorphism) -> Value {
    let mut m = Map::new();
    m.insert("dom".into(), poset_json(u.dom()));
    m.insert("cod".into(), poset_json(u.cod()));
    m.insert("map".into(), map_json(u));
    Value::Object(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{poset_g, poset_r};

    #[test]
    fn poset_round_trip() {
        for p in [poset_g(), poset_r()] {
            let text = serde_json::to_string(&poset_json(&p)).unwrap();
            assert_eq!(parse_poset(&text).unwrap(), p);
        }
        let leq = r#"{"elements":["a","b"],"leq":[["a","b"]]}"#;
        assert_eq!(parse_poset(leq).unwrap().covers(), vec![(0, 1)]);
        let both = r#"{"elements":["a"],"leq":[],"covers":[]}"#;
        assert!(matches!(parse_poset(both), Err(Error::Parse(_))));
        assert!(matches!(parse_poset("{"), Err(Error::Parse(_))));
    }

    #[test]
    fn morphism_round_trip() {
        let g = Arc::new(poset_g());
        let id = PMorphism::identity(g);
        let text = serde_json::to_string(&morphism_json(&id)).unwrap();
        let back = parse_morphism(&text, None).unwrap();
        assert_eq!(back.map(), id.map());
    }
}
