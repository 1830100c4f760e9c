use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use super::RenderError;
use crate::graphs::xml_escape;
use crate::trends::TermFrequencyTable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Canvas {
    pub width: f64,
    pub height: f64,
}

impl Canvas {
    pub fn new(width: f64, height: f64) -> Self {
        Canvas { width, height }
    }
}

impl Default for Canvas {
    fn default() -> Self {
        Canvas::new(800.0, 600.0)
    }
}

/// Axis-aligned rectangle, `(x, y)` the top-left corner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    /// Open-interior overlap: rectangles that only share an edge do not
    /// intersect.
    pub fn intersects(&self, o: &Rect) -> bool {
        self.x < o.x + o.w && o.x < self.x + self.w && self.y < o.y + o.h && o.y < self.y + self.h
    }

    pub fn inside(&self, c: Canvas) -> bool {
        self.x >= 0.0 && self.y >= 0.0 && self.x + self.w <= c.width && self.y + self.h <= c.height
    }

    fn grown(&self, pad: f64) -> Rect {
        Rect {
            x: self.x - pad,
            y: self.y - pad,
            w: self.w + 2.0 * pad,
            h: self.h + 2.0 * pad,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloudItem {
    pub stem: String,
    pub frequency: u64,
    pub font_size: f64,
    /// Centre of the bounding box.
    pub position: (f64, f64),
    pub bbox: Rect,
    /// Degrees, 0 or 90.
    pub rotation: u16,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordCloudLayout {
    pub canvas: Canvas,
    pub items: Vec<CloudItem>,
    pub seed: u64,
    /// Terms that found no free spot.
    pub dropped: Vec<String>,
}

/// Font size range and packing knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloudStyle {
    pub min_font: f64,
    pub max_font: f64,
    /// Probability that a word is set vertically.
    pub vertical_share: f64,
    /// Gap kept between boxes during collision tests.
    pub padding: f64,
}

impl Default for CloudStyle {
    fn default() -> Self {
        CloudStyle {
            min_font: 10.0,
            max_font: 64.0,
            vertical_share: 0.25,
            padding: 1.0,
        }
    }
}

/// Advance width of a character as a fraction of the font size. A coarse
/// sans-serif profile, rounded up.
pub fn glyph_advance(c: char) -> f64 {
    match c {
        'i' | 'j' | 'l' | '.' | ',' | '\'' | '!' | '|' => 0.30,
        'f' | 't' | 'r' | 'I' | ' ' | '-' => 0.40,
        'm' | 'w' | 'M' | 'W' => 0.92,
        c if c.is_uppercase() => 0.72,
        _ => 0.60,
    }
}

/// Width and height of `text` set horizontally at `font_size`.
pub fn text_extent(text: &str, font_size: f64) -> (f64, f64) {
    let w: f64 = text.chars().map(glyph_advance).sum::<f64>() * font_size;
    (w, 1.2 * font_size)
}

/// `min + (max - min) * sqrt(f / f_max)`.
pub fn font_size(frequency: u64, max_frequency: u64, style: &CloudStyle) -> f64 {
    let ratio = (frequency as f64 / max_frequency as f64).sqrt();
    style.min_font + (style.max_font - style.min_font) * ratio
}

/// Places the top `max_words` terms on an Archimedean spiral from the
/// canvas centre, largest first.
///
/// Each word walks the spiral `r = 2θ` in steps of 0.1 rad until its box is
/// inside the canvas and clear of every placed box; a word that reaches the
/// canvas half-diagonal without a spot is dropped. Orientation is drawn from
/// ChaCha8 keyed by `seed`.
pub fn layout_cloud(
    freqs: &TermFrequencyTable,
    max_words: usize,
    canvas: Canvas,
    seed: u64,
    style: &CloudStyle,
) -> Result<WordCloudLayout, RenderError> {
    let terms: Vec<&(String, u64)> = freqs.rows.iter().filter(|r| r.1 > 0).take(max_words).collect();
    if terms.is_empty() {
        return Err(RenderError::EmptyInput);
    }
    if !(canvas.width > 0.0 && canvas.height > 0.0) {
        return Err(RenderError::CanvasTooSmall);
    }
    let mut order: Vec<&(String, u64)> = terms;
    order.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let f_max = order[0].1;
    let (cx, cy) = (canvas.width / 2.0, canvas.height / 2.0);
    let max_radius = (canvas.width.hypot(canvas.height)) / 2.0;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut items: Vec<CloudItem> = Vec::new();
    let mut dropped = Vec::new();
    for (i, (stem, freq)) in order.into_iter().enumerate() {
        let size = font_size(*freq, f_max, style);
        let vertical = rng.random::<f64>() < style.vertical_share;
        let (tw, th) = text_extent(stem, size);
        let (w, h) = if vertical { (th, tw) } else { (tw, th) };
        let start = rng.random::<f64>() * std::f64::consts::TAU;
        let spot = spiral_search(canvas, (cx, cy), (w, h), start, max_radius, |r| {
            let padded = r.grown(style.padding);
            !items.iter().any(|it| it.bbox.intersects(&padded))
        });
        match spot {
            Some(bbox) => items.push(CloudItem {
                stem: stem.clone(),
                frequency: *freq,
                font_size: size,
                position: (bbox.x + bbox.w / 2.0, bbox.y + bbox.h / 2.0),
                bbox,
                rotation: if vertical { 90 } else { 0 },
            }),
            None if i == 0 => return Err(RenderError::CanvasTooSmall),
            None => dropped.push(stem.clone()),
        }
    }
    Ok(WordCloudLayout {
        canvas,
        items,
        seed,
        dropped,
    })
}

fn spiral_search(
    canvas: Canvas,
    (cx, cy): (f64, f64),
    (w, h): (f64, f64),
    phase: f64,
    max_radius: f64,
    free: impl Fn(&Rect) -> bool,
) -> Option<Rect> {
    const STEP: f64 = 0.1;
    const GROWTH: f64 = 2.0;
    let mut theta: f64 = 0.0;
    loop {
        let r = GROWTH * theta;
        if r > max_radius {
            return None;
        }
        let (px, py) = (cx + r * (theta + phase).cos(), cy + r * (theta + phase).sin());
        let rect = Rect {
            x: px - w / 2.0,
            y: py - h / 2.0,
            w,
            h,
        };
        if rect.inside(canvas) && free(&rect) {
            return Some(rect);
        }
        theta += STEP;
    }
}

/// SVG 1.1 document with one `<text>` per item. Numbers carry two decimals,
/// so equal layouts give equal bytes.
pub fn emit_svg(layout: &WordCloudLayout) -> Result<String, RenderError> {
    if layout.items.is_empty() {
        return Err(RenderError::EmptyInput);
    }
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{:.2}\" height=\"{:.2}\" viewBox=\"0 0 {:.2} {:.2}\">",
        layout.canvas.width, layout.canvas.height, layout.canvas.width, layout.canvas.height
    );
    let _ = writeln!(
        out,
        "<rect width=\"{:.2}\" height=\"{:.2}\" fill=\"white\"/>",
        layout.canvas.width, layout.canvas.height
    );
    out.push_str("<g font-family=\"sans-serif\" text-anchor=\"middle\" dominant-baseline=\"central\">\n");
    for it in &layout.items {
        let (x, y) = it.position;
        let transform = if it.rotation == 0 {
            String::new()
        } else {
            format!(" transform=\"rotate({} {x:.2} {y:.2})\"", it.rotation)
        };
        let _ = writeln!(
            out,
            "<text x=\"{x:.2}\" y=\"{y:.2}\" font-size=\"{:.2}\"{transform}>{}</text>",
            it.font_size,
            xml_escape(&it.stem)
        );
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}
