use serde::{Deserialize, Serialize};

use super::font::{draw_text, text_height, text_width};
use super::image::GlyphImage;
use super::{DegradationSheet, ManifestCell, SheetKind, SheetManifest, BACKGROUND, INK};
use crate::criteria::levels::colorimetry_magnitudes;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Contrast and brightness increments, each in `[-255, 255]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColorimetryParams {
    pub kappa_ctr: Rational,
    pub kappa_brt: Rational,
}

impl ColorimetryParams {
    pub fn new(kappa_ctr: Rational, kappa_brt: Rational) -> Result<Self> {
        let p = ColorimetryParams { kappa_ctr, kappa_brt };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, k) in [("kappa_ctr", self.kappa_ctr), ("kappa_brt", self.kappa_brt)] {
            #[allow(clippy::manual_range_contains)]
            if k < -255 || k > 255 {
                return Err(Error::input(format!("{name} = {k} is outside [-255, 255]")));
            }
        }
        Ok(())
    }

    /// `259(κ + 255) / (255(259 − κ))`; positive over the whole range.
    pub fn contrast_factor(&self) -> Rational {
        let k = self.kappa_ctr;
        Rational::from_integer(259) * (k + Rational::from_integer(255))
            / (Rational::from_integer(255) * (Rational::from_integer(259) - k))
    }

    /// Output for every input value; applying it is a table lookup.
    pub fn lut(&self) -> [u8; 256] {
        let f = self.contrast_factor();
        std::array::from_fn(|x| apply(x as u8, f, self.kappa_brt))
    }
}

fn apply(x: u8, factor: Rational, brt: Rational) -> u8 {
    let v = factor * Rational::from_integer(x as i64 - 128) + Rational::from_integer(128) + brt;
    v.round_half_up().clamp(0, 255) as u8
}

/// Exact evaluation, rounded half-up, then clamped to `[0, 255]`.
pub fn colorimetry_transform(x: u8, params: &ColorimetryParams) -> u8 {
    apply(x, params.contrast_factor(), params.kappa_brt)
}

/// RGB through the transform; alpha untouched.
pub fn apply_to_image(image: &GlyphImage, params: &ColorimetryParams) -> GlyphImage {
    let lut = params.lut();
    image.map_pixels(|p| [lut[p[0] as usize], lut[p[1] as usize], lut[p[2] as usize], p[3]])
}

/// `(κ_brt sign, κ_ctr sign)` per row.
pub const ROW_SIGNS: [(i64, i64); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

/// Parameters of the cell at `(row, col)`; column 0 is the unmodified original.
pub fn cell_params(row: usize, col: usize) -> ColorimetryParams {
    if col == 0 {
        return ColorimetryParams::default();
    }
    let m = colorimetry_magnitudes()[col - 1];
    let (b, c) = ROW_SIGNS[row];
    ColorimetryParams {
        kappa_ctr: m * Rational::from_integer(c),
        kappa_brt: m * Rational::from_integer(b),
    }
}

fn signed(k: Rational) -> String {
    if k > 0 {
        format!("+{k}")
    } else {
        k.to_string()
    }
}

/// 4 × 5 grid: rows are sign pairings, columns the magnitudes 0, 25.5, 51, 76.5, 102.
pub fn colorimetry_sheet(image: &GlyphImage) -> Result<DegradationSheet> {
    let scale = 1;
    let pad = 8;
    let captions: Vec<Vec<(ColorimetryParams, String)>> = (0..4)
        .map(|r| {
            (0..5)
                .map(|c| {
                    let p = cell_params(r, c);
                    let cap = format!("B{} C{}", signed(p.kappa_brt), signed(p.kappa_ctr));
                    (p, cap)
                })
                .collect()
        })
        .collect();
    let cap_w = captions.iter().flatten().map(|(_, c)| text_width(c, scale)).max().unwrap_or(0);
    let col_w = image.width().max(cap_w);
    let row_h = image.height() + 3 + text_height(scale);
    let width = pad + 5 * (col_w + pad);
    let height = pad + 4 * (row_h + pad);

    let mut composite = GlyphImage::new(width, height, BACKGROUND)?;
    let mut cells = Vec::with_capacity(20);
    for (r, row) in captions.iter().enumerate() {
        for (c, (p, caption)) in row.iter().enumerate() {
            let x0 = pad + c as u32 * (col_w + pad);
            let y0 = pad + r as u32 * (row_h + pad);
            let x = x0 + (col_w - image.width()) / 2;
            composite.blit(&apply_to_image(image, p), x, y0);
            let tx = x0 + (col_w - text_width(caption, scale)) / 2;
            draw_text(&mut composite, caption, tx, y0 + image.height() + 3, scale, INK);
            cells.push(ManifestCell {
                row: r as u32,
                col: c as u32,
                x,
                y: y0,
                width_px: image.width(),
                height_px: image.height(),
                scale: None,
                size_cm: None,
                kappa_ctr: Some(p.kappa_ctr),
                kappa_brt: Some(p.kappa_brt),
                caption: caption.clone(),
            });
        }
    }
    Ok(DegradationSheet {
        manifest: SheetManifest {
            kind: SheetKind::Colorimetry,
            source_width: image.width(),
            source_height: image.height(),
            width,
            height,
            geometry: None,
            ppcm: None,
            calibration: None,
            cells,
        },
        composite,
    })
}
