use serde::{Deserialize, Serialize};

use super::font::{draw_text, text_height, text_width};
use super::image::GlyphImage;
use super::{Calibration, DegradationSheet, ManifestCell, SheetKind, SheetManifest, BACKGROUND, INK};
use crate::error::{Error, Result};

/// 96 dpi expressed per centimetre.
pub const DEFAULT_PPCM: f64 = 37.8;
pub const CALIBRATION_CM: f64 = 4.0;
/// Scale factors, largest first.
pub const SCALE_FACTORS: [(u32, &str); 5] = [(5, "5/5"), (4, "4/5"), (3, "3/5"), (2, "2/5"), (1, "1/5")];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GlyphShape {
    #[default]
    Circular,
    Rectangular,
}

impl std::str::FromStr for GlyphShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circular" => Ok(GlyphShape::Circular),
            "rectangular" => Ok(GlyphShape::Rectangular),
            _ => Err(Error::input(format!("shape must be circular or rectangular, got `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViewingGeometry {
    pub vf_deg: f64,
    pub vd_cm: f64,
    #[serde(default)]
    pub shape: GlyphShape,
}

impl Default for ViewingGeometry {
    fn default() -> Self {
        ViewingGeometry {
            vf_deg: 5.0,
            vd_cm: 50.0,
            shape: GlyphShape::Circular,
        }
    }
}

impl ViewingGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.vf_deg > 0.0 && self.vf_deg < 90.0) {
            return Err(Error::input(format!("visual field {}° is outside (0, 90)", self.vf_deg)));
        }
        if !(self.vd_cm > 0.0 && self.vd_cm.is_finite()) {
            return Err(Error::input(format!("viewing distance {} cm must be positive", self.vd_cm)));
        }
        Ok(())
    }
}

/// `(l_diam, l_edge)` in cm: the circle subtending the visual field and its inscribed square.
///
/// Uses the half angle, `2·VD·tan(VF/2)`; at 5° and 50 cm this gives 4.37 cm.
pub fn viewing_area(geom: &ViewingGeometry) -> Result<(f64, f64)> {
    geom.validate()?;
    let diam = 2.0 * geom.vd_cm * (geom.vf_deg.to_radians() / 2.0).tan();
    Ok((diam, diam / std::f64::consts::SQRT_2))
}

/// `base × 5/5 … 1/5`, largest first.
pub fn scale_series(base_cm: f64) -> Result<[f64; 5]> {
    if !(base_cm > 0.0 && base_cm.is_finite()) {
        return Err(Error::input(format!("base size {base_cm} cm must be positive")));
    }
    Ok(SCALE_FACTORS.map(|(n, _)| base_cm * n as f64 / 5.0))
}

fn px(cm: f64, ppcm: f64) -> Result<u32> {
    let v = cm * ppcm;
    if v.round() < 1.0 {
        return Err(Error::PixelSizeTooSmall(v));
    }
    Ok(v.round() as u32)
}

/// Five aspect-locked renderings, largest first, plus a calibration square.
///
/// Circular designs are sized by width against the circle diameter; rectangular
/// ones by their shorter side against the square edge.
pub fn geometry_sheet(image: &GlyphImage, geom: &ViewingGeometry, ppcm: f64) -> Result<DegradationSheet> {
    if !(ppcm > 0.0 && ppcm.is_finite()) {
        return Err(Error::input(format!("ppcm {ppcm} must be positive")));
    }
    let (diam, edge) = viewing_area(geom)?;
    let (sw, sh) = (image.width() as f64, image.height() as f64);
    let (base, by_width) = match geom.shape {
        GlyphShape::Circular => (diam, true),
        GlyphShape::Rectangular => (edge, sw <= sh),
    };
    let sizes = scale_series(base)?;

    let mut renders = Vec::with_capacity(5);
    for (size, (_, label)) in sizes.iter().zip(SCALE_FACTORS) {
        let control = px(*size, ppcm)?;
        let (w, h) = if by_width {
            (control, ((control as f64) * sh / sw).round().max(1.0) as u32)
        } else {
            (((control as f64) * sw / sh).round().max(1.0) as u32, control)
        };
        let caption = format!("{size:.2}CM");
        renders.push((image.resize(w, h)?, label, *size, caption));
    }

    let scale = 2;
    let pad = (ppcm * 0.25).round().max(4.0) as u32;
    let cal = px(CALIBRATION_CM, ppcm)?;
    let row_h = renders.iter().map(|r| r.0.height()).max().unwrap_or(0).max(cal);
    let caption_y = pad + row_h + pad;
    let height = caption_y + text_height(scale) + pad;
    let col_w: Vec<u32> = renders
        .iter()
        .map(|(img, _, _, cap)| img.width().max(text_width(cap, scale)))
        .collect();
    let cal_caption = "4CM";
    let cal_w = cal.max(text_width(cal_caption, scale));
    let width = pad + col_w.iter().map(|w| w + pad).sum::<u32>() + cal_w + pad;

    let mut composite = GlyphImage::new(width, height, BACKGROUND)?;
    let mut cells = Vec::with_capacity(5);
    let mut x = pad;
    for (col, ((img, label, size, caption), cw)) in renders.iter().zip(&col_w).enumerate() {
        let cx = x + (cw - img.width()) / 2;
        let cy = pad + (row_h - img.height()) / 2;
        composite.blit(img, cx, cy);
        draw_text(&mut composite, caption, x + (cw - text_width(caption, scale)) / 2, caption_y, scale, INK);
        cells.push(ManifestCell {
            row: 0,
            col: col as u32,
            x: cx,
            y: cy,
            width_px: img.width(),
            height_px: img.height(),
            scale: Some(label.to_string()),
            size_cm: Some(*size),
            kappa_ctr: None,
            kappa_brt: None,
            caption: caption.clone(),
        });
        x += cw + pad;
    }
    let cal_y = pad + (row_h - cal) / 2;
    let cal_x = x + (cal_w - cal) / 2;
    composite.stroke_rect(cal_x, cal_y, cal, cal, INK);
    let tx = x + (cal_w - text_width(cal_caption, scale)) / 2;
    draw_text(&mut composite, cal_caption, tx, caption_y, scale, INK);

    Ok(DegradationSheet {
        manifest: SheetManifest {
            kind: SheetKind::Geometry,
            source_width: image.width(),
            source_height: image.height(),
            width,
            height,
            geometry: Some(*geom),
            ppcm: Some(ppcm),
            calibration: Some(Calibration {
                x: cal_x,
                y: cal_y,
                size_px: cal,
                size_cm: CALIBRATION_CM,
            }),
            cells,
        },
        composite,
    })
}
