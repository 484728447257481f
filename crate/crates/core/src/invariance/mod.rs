//! Scaled and recoloured renderings of a glyph for the two invariance criteria.

pub mod colorimetry;
mod font;
pub mod geometry;
pub mod image;

use serde::{Deserialize, Serialize};

pub use self::colorimetry::{colorimetry_sheet, colorimetry_transform, ColorimetryParams};
pub use self::geometry::{geometry_sheet, scale_series, viewing_area, GlyphShape, ViewingGeometry};
pub use self::image::GlyphImage;
use crate::rational::Rational;

/// Placement and parameters of one rendering in a sheet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestCell {
    pub row: u32,
    pub col: u32,
    pub x: u32,
    pub y: u32,
    pub width_px: u32,
    pub height_px: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size_cm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_ctr: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_brt: Option<Rational>,
    pub caption: String,
}

/// On-screen square that should measure `size_cm` once the display is calibrated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Calibration {
    pub x: u32,
    pub y: u32,
    pub size_px: u32,
    pub size_cm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SheetKind {
    Geometry,
    Colorimetry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheetManifest {
    pub kind: SheetKind,
    pub source_width: u32,
    pub source_height: u32,
    pub width: u32,
    pub height: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<ViewingGeometry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ppcm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<Calibration>,
    pub cells: Vec<ManifestCell>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegradationSheet {
    pub composite: GlyphImage,
    pub manifest: SheetManifest,
}

impl DegradationSheet {
    pub fn manifest_json(&self) -> String {
        crate::report::to_json(&self.manifest)
    }
}

const BACKGROUND: [u8; 4] = [255, 255, 255, 255];
const INK: [u8; 4] = [0, 0, 0, 255];
