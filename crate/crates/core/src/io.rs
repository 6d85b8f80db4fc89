//! JSON group files.
//!
//! ```json
//! {"name": "a5", "degree": 5, "generators": [[1,2,3,4,0],[1,2,0,3,4]], "metadata": null}
//! ```
//!
//! Generators are 0-based image arrays. Orders are never stored.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::constructions::StructureMetadata;
use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::Permutation;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    pub name: String,
    pub degree: usize,
    pub generators: Vec<Vec<u32>>,
    pub metadata: Option<StructureMetadata>,
}

impl GroupFile {
    pub fn from_group(name: &str, group: &PermGroup) -> Self {
        Self {
            name: name.to_string(),
            degree: group.degree(),
            generators: group.generators().iter().map(|g| g.images().to_vec()).collect(),
            metadata: group.metadata().cloned(),
        }
    }

    pub fn to_group(&self) -> Result<PermGroup> {
        let mut gens = Vec::with_capacity(self.generators.len());
        for (i, images) in self.generators.iter().enumerate() {
            if images.len() != self.degree {
                return Err(Error::MalformedFile {
                    line: None,
                    message: format!(
                        "generators[{i}]: length {} does not match degree {}",
                        images.len(),
                        self.degree
                    ),
                });
            }
            let g = Permutation::from_images(images.clone()).map_err(|e| Error::MalformedFile {
                line: None,
                message: format!("generators[{i}]: {e}"),
            })?;
            gens.push(g);
        }
        let group = PermGroup::new(self.degree, gens)?;
        Ok(match &self.metadata {
            Some(m) => group.with_metadata(m.clone()),
            None => group,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::MalformedFile {
            line: Some(e.line()),
            message: format!("column {}: {e}", e.column()),
        })
    }

    /// Canonical serialization: pretty JSON with one generator per line and a
    /// trailing newline.
    pub fn render(&self) -> String {
        let mut out = String::from("{\n");
        out.push_str(&format!(
            "  \"name\": {},\n",
            serde_json::to_string(&self.name).expect("string")
        ));
        out.push_str(&format!("  \"degree\": {},\n", self.degree));
        out.push_str("  \"generators\": [");
        for (i, g) in self.generators.iter().enumerate() {
            out.push_str(if i == 0 { "\n    " } else { ",\n    " });
            out.push_str(&serde_json::to_string(g).expect("ints"));
        }
        if !self.generators.is_empty() {
            out.push_str("\n  ");
        }
        out.push_str("],\n");
        out.push_str(&format!(
            "  \"metadata\": {}\n}}\n",
            serde_json::to_string(&self.metadata).expect("metadata serializes")
        ));
        out
    }
}

pub fn load_group_file(path: &Path) -> Result<GroupFile> {
    let text = fs::read_to_string(path)?;
    GroupFile::parse(&text)
}

pub fn load(path: &Path) -> Result<(String, PermGroup)> {
    let file = load_group_file(path)?;
    let group = file.to_group()?;
    Ok((file.name, group))
}

pub fn save(name: &str, group: &PermGroup, path: &Path) -> Result<()> {
    fs::write(path, GroupFile::from_group(name, group).render())?;
    Ok(())
}

/// Expands directories into their `*.json` files (sorted); files pass through.
pub fn collect_inputs(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut entries: Vec<PathBuf> = fs::read_dir(p)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|e| e.extension().is_some_and(|x| x == "json"))
                .collect();
            entries.sort();
            out.extend(entries);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}
