use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use sha2::{Digest, Sha256};

use super::{parse_design, parse_sheet, serialize_design, serialize_sheet};
use crate::error::{Error, Result};
use crate::model::{validate_design, GlyphDesign, ScoreSheet};

/// Content hash of a stored document, used for optimistic concurrency.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Revision(String);

impl Revision {
    pub fn of(bytes: &[u8]) -> Self {
        let digest = Sha256::digest(bytes);
        let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
        Revision(format!("sha256:{hex}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn parse(s: &str) -> Self {
        Revision(s.trim().trim_matches('"').to_string())
    }
}

impl std::fmt::Display for Revision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Directory layout: `designs/<id>.json`, `sheets/<design>__<assessor>.json`, `reports/`.
///
/// Writes go through a temp file and an atomic rename, one at a time per workspace.
pub struct Workspace {
    root: PathBuf,
    writes: Mutex<()>,
}

fn check_id(kind: &str, id: &str) -> Result<()> {
    let ok = !id.is_empty()
        && id.len() <= 128
        && !id.starts_with('.')
        && !id.contains("__")
        && id.chars().all(|c| c.is_ascii_alphanumeric() || "-_.+".contains(c));
    if ok {
        Ok(())
    } else {
        Err(Error::Schema {
            path: kind.to_string(),
            message: format!("`{id}` is not a valid id (letters, digits, - _ . +; no `__`)"),
        })
    }
}

impl Workspace {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        if !root.is_dir() {
            return Err(Error::NotFound(format!("workspace {}", root.display())));
        }
        Ok(Workspace {
            root,
            writes: Mutex::new(()),
        })
    }

    /// Creates the directory layout if needed.
    pub fn init(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        for sub in ["designs", "sheets", "reports"] {
            let dir = root.join(sub);
            fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        }
        Workspace::open(root)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn design_path(&self, id: &str) -> PathBuf {
        self.root.join("designs").join(format!("{id}.json"))
    }

    fn sheet_path(&self, design: &str, assessor: &str) -> PathBuf {
        self.root.join("sheets").join(format!("{design}__{assessor}.json"))
    }

    fn read(&self, path: &Path, what: String) -> Result<(String, Revision)> {
        match fs::read_to_string(path) {
            Ok(text) => {
                let rev = Revision::of(text.as_bytes());
                Ok((text, rev))
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(Error::NotFound(what)),
            Err(e) => Err(Error::io(path, e)),
        }
    }

    fn current_revision(path: &Path) -> Result<Option<Revision>> {
        match fs::read(path) {
            Ok(bytes) => Ok(Some(Revision::of(&bytes))),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(Error::io(path, e)),
        }
    }

    /// Replaces `path` with `text` unless `expected` names a revision other than the stored one.
    fn write(&self, path: &Path, text: &str, expected: Option<&Revision>) -> Result<Revision> {
        let _guard = self.writes.lock().unwrap_or_else(|p| p.into_inner());
        if let Some(exp) = expected {
            let actual = Self::current_revision(path)?;
            if actual.as_ref() != Some(exp) {
                return Err(Error::Conflict {
                    expected: exp.to_string(),
                    actual: actual.map_or_else(|| "none".to_string(), |r| r.to_string()),
                });
            }
        }
        let dir = path.parent().expect("workspace paths have a parent");
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
        tmp.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))?;
        tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
        Ok(Revision::of(text.as_bytes()))
    }

    pub fn get_design(&self, id: &str) -> Result<(GlyphDesign, Revision)> {
        check_id("design", id)?;
        let (text, rev) = self.read(&self.design_path(id), format!("design `{id}`"))?;
        Ok((parse_design(&text)?, rev))
    }

    /// Stores a design after checking every invariant.
    pub fn put_design(&self, design: &GlyphDesign, expected: Option<&Revision>) -> Result<Revision> {
        check_id("id", &design.id)?;
        if let Some(v) = validate_design(design).into_iter().next() {
            return Err(Error::Schema {
                path: v.field,
                message: v.rule,
            });
        }
        self.write(&self.design_path(&design.id), &serialize_design(design), expected)
    }

    pub fn design_ids(&self) -> Result<Vec<String>> {
        self.list("designs", |stem| Some(stem.to_string()))
    }

    fn list(&self, sub: &str, key: impl Fn(&str) -> Option<String>) -> Result<Vec<String>> {
        let dir = self.root.join(sub);
        let entries = match fs::read_dir(&dir) {
            Ok(e) => e,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(Error::io(&dir, e)),
        };
        let mut out = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|e| Error::io(&dir, e))?;
            let name = entry.file_name().to_string_lossy().into_owned();
            if let Some(stem) = name.strip_suffix(".json") {
                if let Some(k) = key(stem) {
                    out.push(k);
                }
            }
        }
        out.sort();
        Ok(out)
    }

    pub fn get_sheet(&self, design: &str, assessor: &str) -> Result<(ScoreSheet, Revision)> {
        check_id("design", design)?;
        check_id("assessor", assessor)?;
        let what = format!("sheet `{design}` / `{assessor}`");
        let (text, rev) = self.read(&self.sheet_path(design, assessor), what)?;
        Ok((parse_sheet(&text)?, rev))
    }

    /// Stores a sheet; its design must already exist.
    pub fn put_sheet(&self, sheet: &ScoreSheet, expected: Option<&Revision>) -> Result<Revision> {
        check_id("design", &sheet.design_id)?;
        check_id("assessor", &sheet.assessor)?;
        if !self.design_path(&sheet.design_id).is_file() {
            return Err(Error::NotFound(format!("design `{}`", sheet.design_id)));
        }
        let path = self.sheet_path(&sheet.design_id, &sheet.assessor);
        self.write(&path, &serialize_sheet(sheet), expected)
    }

    /// Assessors with a sheet for `design`, sorted.
    pub fn assessors(&self, design: &str) -> Result<Vec<String>> {
        check_id("design", design)?;
        let prefix = format!("{design}__");
        self.list("sheets", |stem| stem.strip_prefix(&prefix).map(str::to_string))
    }

    /// Every sheet for `design`, ordered by assessor.
    pub fn sheets(&self, design: &str) -> Result<Vec<ScoreSheet>> {
        self.assessors(design)?
            .iter()
            .map(|a| self.get_sheet(design, a).map(|(s, _)| s))
            .collect()
    }

    pub fn write_report(&self, name: &str, text: &str) -> Result<PathBuf> {
        check_id("report", name.split_once('.').map_or(name, |(stem, _)| stem))?;
        let path = self.root.join("reports").join(name);
        self.write(&path, text, None)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ChannelKind, DataType, DataVariable, VisualChannel};
    use std::collections::BTreeMap;

    fn design(id: &str) -> GlyphDesign {
        GlyphDesign {
            id: id.into(),
            name: id.into(),
            variables: vec![DataVariable {
                id: "v".into(),
                name: "V".into(),
                data_type: DataType::Nominal,
                key_value_count: 2,
                importance_rank: None,
                comparability_group: None,
                is_identity_variable: false,
            }],
            channels: vec![VisualChannel {
                id: "c".into(),
                name: "C".into(),
                kind: ChannelKind::Shape,
                kop_ratings: None,
            }],
            encoding: BTreeMap::from([("v".to_string(), vec!["c".to_string()])]),
            image_ref: None,
            notes: String::new(),
        }
    }

    #[test]
    fn store_and_conflict() {
        let dir = tempfile::tempdir().unwrap();
        let ws = Workspace::init(dir.path()).unwrap();
        let sheet = ScoreSheet::blank("d1", "a1", "2024-01-01T00:00:00Z");
        assert!(matches!(ws.put_sheet(&sheet, None), Err(Error::NotFound(_))));
        ws.put_design(&design("d1"), None).unwrap();
        let r1 = ws.put_sheet(&sheet, None).unwrap();
        let (back, r) = ws.get_sheet("d1", "a1").unwrap();
        assert_eq!((back, &r), (sheet.clone(), &r1));

        let mut edited = sheet.clone();
        edited.timestamp = "2024-01-02T00:00:00Z".into();
        let r2 = ws.put_sheet(&edited, Some(&r1)).unwrap();
        assert_ne!(r1, r2);
        let e = ws.put_sheet(&sheet, Some(&r1)).unwrap_err();
        assert!(matches!(e, Error::Conflict { .. }));
        assert_eq!(ws.assessors("d1").unwrap(), ["a1"]);
    }

    #[test]
    fn ids_are_checked() {
        let dir = tempfile::tempdir().unwrap();
        let ws = Workspace::init(dir.path()).unwrap();
        assert!(ws.get_design("../etc").is_err());
        assert!(matches!(ws.get_design("nope"), Err(Error::NotFound(_))));
        assert!(ws.put_design(&design("a__b"), None).is_err());
    }

    #[test]
    fn invalid_design_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let ws = Workspace::init(dir.path()).unwrap();
        let mut d = design("d");
        d.encoding.clear();
        assert!(matches!(ws.put_design(&d, None), Err(Error::Schema { .. })));
    }
}
