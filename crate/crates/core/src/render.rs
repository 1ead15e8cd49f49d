//! Cushion-style shading of a cell state: flat plateaus inside segments,
//! quadratic ramps at their boundaries and valleys for separators.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::raster::{CellState, BACKGROUND, CROSSING};

pub type Rgb = [u8; 3];

/// 20 categorical colors; the palette cycles through them with a luminance
/// shift for larger label counts.
const CATEGORICAL: [Rgb; 20] = [
    [31, 119, 180],
    [255, 127, 14],
    [44, 160, 44],
    [214, 39, 40],
    [148, 103, 189],
    [140, 86, 75],
    [227, 119, 194],
    [188, 189, 34],
    [23, 190, 207],
    [174, 199, 232],
    [255, 187, 120],
    [152, 223, 138],
    [255, 152, 150],
    [197, 176, 213],
    [196, 156, 148],
    [247, 182, 210],
    [219, 219, 141],
    [158, 218, 229],
    [127, 127, 127],
    [199, 199, 199],
];

#[derive(Debug, Clone, PartialEq)]
pub struct ShadingProfile {
    pub h: f64,
    /// Ramp width in pixels.
    pub w: f64,
    /// Pixels per automaton cell.
    pub r: usize,
    pub light_direction: [f64; 3],
    pub separator_color: Rgb,
    pub crossing_color: Rgb,
    pub palette: BTreeMap<i32, Rgb>,
}

impl ShadingProfile {
    /// Profile with `r` pixels per cell, w = r/2 and the default palette for
    /// `num_segments` labels.
    pub fn new(r: usize, num_segments: usize) -> Self {
        ShadingProfile {
            h: 1.0,
            w: 0.5 * r as f64,
            r,
            light_direction: normalize([-1.0, -1.0, 2.0]),
            separator_color: [60, 60, 60],
            crossing_color: [0, 0, 0],
            palette: default_palette(num_segments),
        }
    }
}

impl Default for ShadingProfile {
    fn default() -> Self {
        ShadingProfile::new(8, 0)
    }
}

pub fn default_palette(n: usize) -> BTreeMap<i32, Rgb> {
    (0..n)
        .map(|i| {
            let base = CATEGORICAL[i % CATEGORICAL.len()];
            let round = (i / CATEGORICAL.len()) as i32;
            // alternate darker and lighter variants per extra round
            let shift = if round == 0 {
                0
            } else if round % 2 == 1 {
                -28 * ((round + 1) / 2)
            } else {
                28 * (round / 2)
            };
            let c = base.map(|v| (v as i32 + shift).clamp(0, 255) as u8);
            (i as i32, c)
        })
        .collect()
}

/// Palette file: one `label color` pair per line, color as `#rrggbb` or
/// `rrggbb`; `#` at line start begins a comment.
pub fn parse_palette(text: &str) -> Result<BTreeMap<i32, Rgb>> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || Error::Input(format!("palette line {}: {line:?}", n + 1));
        let mut parts = line.split_whitespace();
        let label: i32 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let hex = parts.next().ok_or_else(bad)?.trim_start_matches('#');
        if hex.len() != 6 || parts.next().is_some() {
            return Err(bad());
        }
        let v = u32::from_str_radix(hex, 16).map_err(|_| bad())?;
        out.insert(label, [(v >> 16) as u8, (v >> 8) as u8, v as u8]);
    }
    Ok(out)
}

pub fn load_palette(path: impl AsRef<Path>) -> Result<BTreeMap<i32, Rgb>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_palette(&text)
}

/// Coefficients (a, b) of the piecewise quadratic over the run [x1, x2] at
/// position x; `c` on the y-axis is the same construction. The ramp width
/// is clamped to half the run.
pub fn shading_coefficients(x1: f64, x2: f64, x: f64, profile: &ShadingProfile, is_separator: bool) -> (f64, f64) {
    let s = if is_separator { -1.0 } else { 1.0 };
    let w = profile.w.min((x2 - x1) / 2.0);
    let k = s * profile.h / (w * w);
    if x1 + w < x && x < x2 - w {
        (0.0, 0.0)
    } else if x <= x1 + w {
        (-k, k * (x1 + w))
    } else {
        (-k, k * (x2 - w))
    }
}

/// Height of the profile at x, consistent with [`shading_coefficients`]:
/// 0 at the run ends, ±h on the plateau.
pub fn height(x1: f64, x2: f64, x: f64, profile: &ShadingProfile, is_separator: bool) -> f64 {
    let s = if is_separator { -1.0 } else { 1.0 };
    let w = profile.w.min((x2 - x1) / 2.0);
    let k = s * profile.h / (w * w);
    if x1 + w < x && x < x2 - w {
        s * profile.h
    } else if x <= x1 + w {
        s * profile.h - k * (x - x1 - w).powi(2)
    } else {
        s * profile.h - k * (x - x2 + w).powi(2)
    }
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Unit normal (2(ax+b), 2(ay+c), 1) from an x-run and a y-run.
pub fn normal_from_runs(
    (x1, x2, x): (f64, f64, f64),
    (y1, y2, y): (f64, f64, f64),
    profile: &ShadingProfile,
    is_separator: bool,
) -> [f64; 3] {
    let (ax, b) = shading_coefficients(x1, x2, x, profile, is_separator);
    let (ay, c) = shading_coefficients(y1, y2, y, profile, is_separator);
    normalize([2.0 * (ax * x + b), 2.0 * (ay * y + c), 1.0])
}

/// Cell run `[start, end]` (inclusive) containing position `k` of a line of
/// labels; crossings end runs and form their own.
fn run_of(line: &dyn Fn(usize) -> i32, len: usize, k: usize) -> (usize, usize) {
    let l = line(k);
    if l == CROSSING {
        return (k, k);
    }
    let mut a = k;
    while a > 0 && line(a - 1) == l {
        a -= 1;
    }
    let mut b = k;
    while b + 1 < len && line(b + 1) == l {
        b += 1;
    }
    (a, b)
}

/// Runs of every cell along x and along y, as (start, end) cell indices.
fn cell_runs(cs: &CellState) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
    let (w, h) = (cs.width(), cs.height());
    let mut xr = vec![(0, 0); cs.len()];
    let mut yr = vec![(0, 0); cs.len()];
    for y in 0..h {
        let line = |x: usize| cs.get(x, y);
        let mut x = 0;
        while x < w {
            let (a, b) = run_of(&line, w, x);
            for k in a..=b {
                xr[y * w + k] = (a, b);
            }
            x = b + 1;
        }
    }
    for x in 0..w {
        let line = |y: usize| cs.get(x, y);
        let mut y = 0;
        while y < h {
            let (a, b) = run_of(&line, h, y);
            for k in a..=b {
                yr[k * w + x] = (a, b);
            }
            y = b + 1;
        }
    }
    (xr, yr)
}

/// Normal at pixel (px, py) of the rendered image.
pub fn normal_at(px: usize, py: usize, cs: &CellState, profile: &ShadingProfile) -> [f64; 3] {
    let r = profile.r;
    let (cx, cy) = (px / r, py / r);
    let w = cs.width();
    let row = |x: usize| cs.get(x, cy);
    let col = |y: usize| cs.get(cx, y);
    let (xa, xb) = run_of(&row, w, cx);
    let (ya, yb) = run_of(&col, cs.height(), cy);
    pixel_normal(cs.get(cx, cy), (px, py), (xa, xb), (ya, yb), profile).0
}

/// Normal and color source of one pixel given the runs of its cell.
fn pixel_normal(
    label: i32,
    (px, py): (usize, usize),
    (xa, xb): (usize, usize),
    (ya, yb): (usize, usize),
    profile: &ShadingProfile,
) -> ([f64; 3], Glyph) {
    let r = profile.r as f64;
    let (x, y) = (px as f64 + 0.5, py as f64 + 0.5);
    if label == CROSSING {
        // arms one cell wide, split into a horizontal and a vertical band
        let (x0, y0) = (xa as f64 * r, ya as f64 * r);
        let (dx, dy) = (x - x0 - r / 2.0, y - y0 - r / 2.0);
        let q = r / 4.0;
        let tiny = ShadingProfile { w: q / 2.0, ..profile.clone() };
        if dx.abs() < q && dy.abs() < q {
            return ([0.0, 0.0, 1.0], Glyph::Center);
        }
        if dy.abs() < q {
            let n = normal_from_runs((x0, x0 + r, x), (y0 + r / 2.0 - q, y0 + r / 2.0 + q, y), &tiny, false);
            return (n, Glyph::Horizontal);
        }
        if dx.abs() < q {
            let n = normal_from_runs((x0 + r / 2.0 - q, x0 + r / 2.0 + q, x), (y0, y0 + r, y), &tiny, false);
            return (n, Glyph::Vertical);
        }
        let n = normal_from_runs((x0, x0 + r, x), (y0, y0 + r, y), &tiny, true);
        return (n, Glyph::Corner);
    }
    let n = normal_from_runs(
        (xa as f64 * r, (xb + 1) as f64 * r, x),
        (ya as f64 * r, (yb + 1) as f64 * r, y),
        profile,
        label == BACKGROUND,
    );
    (n, Glyph::None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Glyph {
    None,
    Center,
    Horizontal,
    Vertical,
    Corner,
}

/// 8-bit RGB image, rows top to bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl RgbImage {
    pub fn pixel(&self, x: usize, y: usize) -> Rgb {
        let i = 3 * (y * self.width + x);
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn to_png(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, self.width as u32, self.height as u32);
            enc.set_color(png::ColorType::Rgb);
            enc.set_depth(png::BitDepth::Eight);
            let mut writer = enc.write_header().map_err(|e| Error::Encode(e.to_string()))?;
            writer
                .write_image_data(&self.pixels)
                .map_err(|e| Error::Encode(e.to_string()))?;
        }
        Ok(out)
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    /// Writes PNG, or binary PPM when `ppm` is set.
    pub fn save(&self, path: impl AsRef<Path>, ppm: bool) -> Result<()> {
        let path = path.as_ref();
        let bytes = if ppm { self.to_ppm() } else { self.to_png()? };
        let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(&bytes).map_err(|e| Error::io(path, e))
    }
}

/// Color `c` scaled by the Lambert term of normal `n`.
pub fn shade(c: Rgb, n: [f64; 3], light: [f64; 3]) -> Rgb {
    let l = (n[0] * light[0] + n[1] * light[1] + n[2] * light[2]).max(0.0);
    c.map(|v| (v as f64 * l).round().clamp(0.0, 255.0) as u8)
}

pub fn render_image(cs: &CellState, profile: &ShadingProfile) -> Result<RgbImage> {
    let (w, h) = (cs.width(), cs.height());
    for &l in cs.cells() {
        if l >= 0 && !profile.palette.contains_key(&l) {
            return Err(Error::MissingColor(l));
        }
    }
    let r = profile.r.max(1);
    let profile = &ShadingProfile { r, ..profile.clone() };
    let (xr, yr) = cell_runs(cs);
    let (iw, ih) = (w * r, h * r);
    let mut pixels = vec![0u8; iw * ih * 3];
    pixels.par_chunks_mut(iw * 3).enumerate().for_each(|(py, row)| {
        let cy = py / r;
        for px in 0..iw {
            let cx = px / r;
            let i = cy * w + cx;
            let label = cs.label(i);
            let (n, glyph) = pixel_normal(label, (px, py), xr[i], yr[i], profile);
            let base = match glyph {
                Glyph::Center => profile.crossing_color,
                Glyph::Corner => profile.separator_color,
                Glyph::Horizontal | Glyph::Vertical => {
                    let arms = cs.crossing_arms(i).unwrap_or([0, 0]);
                    let l = if glyph == Glyph::Horizontal { arms[0] } else { arms[1] };
                    profile.palette.get(&(l as i32)).copied().unwrap_or(profile.crossing_color)
                }
                Glyph::None if label == BACKGROUND => profile.separator_color,
                Glyph::None => profile.palette[&label],
            };
            let c = shade(base, n, profile.light_direction);
            row[3 * px..3 * px + 3].copy_from_slice(&c);
        }
    });
    Ok(RgbImage {
        width: iw,
        height: ih,
        pixels,
    })
}
