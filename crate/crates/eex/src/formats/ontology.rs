//! Ontology JSON: `{"version", "events": [{"name", "description": [..],
//! "arguments": [{"role", "guide_question"}]}]}`, UTF-8 without BOM.

use std::path::Path;

use eex_core::ontology::{ArgumentRole, EventType, Ontology};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::formats::{read_json, write_json};

#[derive(Debug, Serialize, Deserialize)]
struct RoleFile {
    role: String,
    guide_question: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EventFile {
    name: String,
    #[serde(default)]
    description: Vec<String>,
    #[serde(default)]
    arguments: Vec<RoleFile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct OntologyFile {
    version: String,
    events: Vec<EventFile>,
}

fn from_file(file: OntologyFile) -> Result<Ontology> {
    let events = file
        .events
        .into_iter()
        .map(|e| {
            let descriptions: Vec<&str> = e.description.iter().map(String::as_str).collect();
            let arguments = e
                .arguments
                .into_iter()
                .map(|r| ArgumentRole::new(r.role, r.guide_question.as_deref()))
                .collect();
            EventType::new(e.name, &descriptions, arguments)
        })
        .collect();
    Ok(Ontology::new(file.version, events)?)
}

fn to_file(ontology: &Ontology) -> OntologyFile {
    OntologyFile {
        version: ontology.version().to_string(),
        events: ontology
            .events()
            .iter()
            .map(|e| EventFile {
                name: e.name.clone(),
                description: e.description.clone(),
                arguments: e
                    .arguments
                    .iter()
                    .map(|r| RoleFile {
                        role: r.role.clone(),
                        guide_question: r.guide_question.clone(),
                    })
                    .collect(),
            })
            .collect(),
    }
}

/// Loads and validates an ontology file; events keep file order.
pub fn load_ontology(path: &Path) -> Result<Ontology> {
    from_file(read_json(path)?)
}

/// Saves an ontology with the documented schema and stable key order.
pub fn save_ontology(path: &Path, ontology: &Ontology) -> Result<()> {
    write_json(path, &to_file(ontology))
}
