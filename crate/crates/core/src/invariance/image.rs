use std::io::Cursor;
use std::path::Path;

use image::{ImageFormat, RgbaImage};

use crate::error::{Error, Result};

/// 8-bit RGBA raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlyphImage {
    width: u32,
    height: u32,
    pixels: Vec<[u8; 4]>,
}

impl GlyphImage {
    pub fn new(width: u32, height: u32, fill: [u8; 4]) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Image("image must be non-empty".into()));
        }
        Ok(GlyphImage {
            width,
            height,
            pixels: vec![fill; width as usize * height as usize],
        })
    }

    pub fn from_pixels(width: u32, height: u32, pixels: Vec<[u8; 4]>) -> Result<Self> {
        if width == 0 || height == 0 || pixels.len() != width as usize * height as usize {
            return Err(Error::Image(format!(
                "{} pixels do not fill a non-empty {width}×{height} image",
                pixels.len()
            )));
        }
        Ok(GlyphImage { width, height, pixels })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 4]] {
        &self.pixels
    }

    pub fn get(&self, x: u32, y: u32) -> [u8; 4] {
        self.pixels[(y * self.width + x) as usize]
    }

    pub fn put(&mut self, x: u32, y: u32, px: [u8; 4]) {
        if x < self.width && y < self.height {
            self.pixels[(y * self.width + x) as usize] = px;
        }
    }

    pub fn map_pixels(&self, f: impl Fn([u8; 4]) -> [u8; 4]) -> GlyphImage {
        GlyphImage {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&p| f(p)).collect(),
        }
    }

    /// Copies `src` with its top-left corner at `(x, y)`, alpha-blended over what is there.
    pub fn blit(&mut self, src: &GlyphImage, x: u32, y: u32) {
        for sy in 0..src.height {
            for sx in 0..src.width {
                let (dx, dy) = (x + sx, y + sy);
                if dx >= self.width || dy >= self.height {
                    continue;
                }
                let s = src.get(sx, sy);
                let d = self.get(dx, dy);
                self.put(dx, dy, over(s, d));
            }
        }
    }

    pub fn fill_rect(&mut self, x: u32, y: u32, w: u32, h: u32, px: [u8; 4]) {
        for yy in y..y.saturating_add(h).min(self.height) {
            for xx in x..x.saturating_add(w).min(self.width) {
                self.put(xx, yy, px);
            }
        }
    }

    /// One-pixel outline of a `w × h` rectangle.
    pub fn stroke_rect(&mut self, x: u32, y: u32, w: u32, h: u32, px: [u8; 4]) {
        if w == 0 || h == 0 {
            return;
        }
        self.fill_rect(x, y, w, 1, px);
        self.fill_rect(x, y + h - 1, w, 1, px);
        self.fill_rect(x, y, 1, h, px);
        self.fill_rect(x + w - 1, y, 1, h, px);
    }

    pub fn from_png(bytes: &[u8]) -> Result<Self> {
        let img = image::load_from_memory_with_format(bytes, ImageFormat::Png)
            .map_err(|e| Error::Image(e.to_string()))?
            .into_rgba8();
        let (w, h) = img.dimensions();
        GlyphImage::from_pixels(w, h, img.pixels().map(|p| p.0).collect())
    }

    pub fn to_png(&self) -> Vec<u8> {
        let raw: Vec<u8> = self.pixels.iter().flatten().copied().collect();
        let img = RgbaImage::from_raw(self.width, self.height, raw).expect("buffer sized to image");
        let mut out = Cursor::new(Vec::new());
        img.write_to(&mut out, ImageFormat::Png)
            .expect("encoding RGBA8 PNG into memory cannot fail");
        out.into_inner()
    }

    pub fn read_png(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        GlyphImage::from_png(&bytes)
    }

    pub fn write_png(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_png()).map_err(|e| Error::io(path, e))
    }

    /// Area-averaging resize in premultiplied alpha.
    pub fn resize(&self, width: u32, height: u32) -> Result<GlyphImage> {
        if width == 0 || height == 0 {
            return Err(Error::Image("target size must be non-empty".into()));
        }
        let premul: Vec<[f64; 4]> = self
            .pixels
            .iter()
            .map(|p| {
                let a = p[3] as f64 / 255.0;
                [p[0] as f64 * a, p[1] as f64 * a, p[2] as f64 * a, p[3] as f64]
            })
            .collect();
        let xw = box_weights(self.width, width);
        let yw = box_weights(self.height, height);

        let mut horiz = vec![[0.0f64; 4]; width as usize * self.height as usize];
        for y in 0..self.height as usize {
            for (ox, taps) in xw.iter().enumerate() {
                let mut acc = [0.0; 4];
                for &(sx, w) in taps {
                    let p = premul[y * self.width as usize + sx];
                    for c in 0..4 {
                        acc[c] += p[c] * w;
                    }
                }
                horiz[y * width as usize + ox] = acc;
            }
        }
        let mut pixels = Vec::with_capacity(width as usize * height as usize);
        for taps in &yw {
            for ox in 0..width as usize {
                let mut acc = [0.0; 4];
                for &(sy, w) in taps {
                    let p = horiz[sy * width as usize + ox];
                    for c in 0..4 {
                        acc[c] += p[c] * w;
                    }
                }
                let a = acc[3];
                let un = |v: f64| {
                    if a <= 0.0 {
                        0
                    } else {
                        (v * 255.0 / a).round().clamp(0.0, 255.0) as u8
                    }
                };
                pixels.push([un(acc[0]), un(acc[1]), un(acc[2]), a.round().clamp(0.0, 255.0) as u8]);
            }
        }
        GlyphImage::from_pixels(width, height, pixels)
    }
}

/// For each output index, the source indices it covers and their normalised coverage.
fn box_weights(src: u32, dst: u32) -> Vec<Vec<(usize, f64)>> {
    let scale = src as f64 / dst as f64;
    (0..dst)
        .map(|o| {
            let start = o as f64 * scale;
            let end = start + scale;
            let mut taps = Vec::new();
            let mut s = start.floor() as usize;
            while (s as f64) < end && s < src as usize {
                let cover = (end.min(s as f64 + 1.0) - start.max(s as f64)).max(0.0);
                if cover > 0.0 {
                    taps.push((s, cover / scale));
                }
                s += 1;
            }
            taps
        })
        .collect()
}

/// Source-over compositing of straight-alpha pixels.
fn over(s: [u8; 4], d: [u8; 4]) -> [u8; 4] {
    let sa = s[3] as f64 / 255.0;
    let da = d[3] as f64 / 255.0;
    let oa = sa + da * (1.0 - sa);
    if oa <= 0.0 {
        return [0, 0, 0, 0];
    }
    let mut out = [0u8; 4];
    for c in 0..3 {
        let v = (s[c] as f64 * sa + d[c] as f64 * da * (1.0 - sa)) / oa;
        out[c] = v.round().clamp(0.0, 255.0) as u8;
    }
    out[3] = (oa * 255.0).round() as u8;
    out
}
