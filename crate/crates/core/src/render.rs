//! Standalone SVG 1.1 figures: persistence barcode, conventional persistence
//! diagram, flat persistence diagram.
//!
//! Output is plain text and fully deterministic. Structural hooks for tests:
//! every feature marker has class `marker`, a `data-dimension` attribute and
//! a `transform="translate(x y)"` holding its pixel center; barcode bars have
//! class `bar`; the conventional diagonal has class `reference-line`.
//! Essential features get the extra class `essential`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use crate::persistence::{PersistenceDiagram, PersistenceFeature};
use crate::{Error, Result};

/// Padding applied to both axes of the flat diagram.
pub const FLAT_AXIS_PADDING: f64 = 1.05;

/// Marker glyph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkerShape {
    /// Filled circle.
    Circle,
    /// Upward triangle.
    Triangle,
    /// Axis-aligned square.
    Square,
    /// Square rotated by 45°.
    Diamond,
}

/// Glyph and color for one homology degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkerStyle {
    /// Glyph.
    pub shape: MarkerShape,
    /// Any SVG color.
    pub color: String,
}

impl MarkerStyle {
    fn new(shape: MarkerShape, color: &str) -> Self {
        MarkerStyle { shape, color: color.into() }
    }
}

/// Degree 0 red circles, degree 1 green triangles, degree 2 blue squares.
fn default_styles() -> Vec<MarkerStyle> {
    alloc::vec![
        MarkerStyle::new(MarkerShape::Circle, "#d62728"),
        MarkerStyle::new(MarkerShape::Triangle, "#2ca02c"),
        MarkerStyle::new(MarkerShape::Square, "#1f77b4"),
        MarkerStyle::new(MarkerShape::Diamond, "#9467bd"),
    ]
}

/// Figure geometry and styling.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    width: f64,
    height: f64,
    margin: f64,
    styles: Vec<MarkerStyle>,
    include_essential: bool,
    essential_cap_factor: f64,
    marker_size: f64,
    title: Option<String>,
}

impl Default for PlotSpec {
    fn default() -> Self {
        PlotSpec {
            width: 480.0,
            height: 480.0,
            margin: 60.0,
            styles: default_styles(),
            include_essential: false,
            essential_cap_factor: 1.1,
            marker_size: 4.0,
            title: None,
        }
    }
}

impl PlotSpec {
    /// A spec with the given pixel size and margin and default styling.
    pub fn new(width: f64, height: f64, margin: f64) -> Result<Self> {
        if !(margin >= 0.0 && width > 2.0 * margin && height > 2.0 * margin && width.is_finite() && height.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!(
                "a {width}x{height} plot cannot hold margins of {margin}"
            )));
        }
        Ok(PlotSpec { width, height, margin, ..PlotSpec::default() })
    }

    /// Whether essential features are drawn.
    pub fn with_include_essential(mut self, include: bool) -> Self {
        self.include_essential = include;
        self
    }

    /// Where essential bars are capped, as a multiple of the largest finite value.
    pub fn with_essential_cap_factor(mut self, factor: f64) -> Result<Self> {
        if !(factor > 1.0 && factor.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!("cap factor must exceed 1, got {factor}")));
        }
        self.essential_cap_factor = factor;
        Ok(self)
    }

    /// Overrides the style of one degree.
    pub fn with_style(mut self, dimension: usize, style: MarkerStyle) -> Self {
        while self.styles.len() <= dimension {
            let next = self.style(self.styles.len());
            self.styles.push(next);
        }
        self.styles[dimension] = style;
        self
    }

    /// Title drawn above the plot.
    pub fn with_title(mut self, title: impl Into<String>) -> Self {
        self.title = Some(title.into());
        self
    }

    /// Pixel width.
    pub fn width(&self) -> f64 {
        self.width
    }

    /// Pixel height.
    pub fn height(&self) -> f64 {
        self.height
    }

    /// Pixel margin on every side.
    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// Whether essential features are drawn.
    pub fn include_essential(&self) -> bool {
        self.include_essential
    }

    /// Essential cap multiple.
    pub fn essential_cap_factor(&self) -> f64 {
        self.essential_cap_factor
    }

    /// Style for a degree; degrees past the configured list reuse it cyclically.
    pub fn style(&self, dimension: usize) -> MarkerStyle {
        self.styles[dimension % self.styles.len()].clone()
    }
}

/// A rendered SVG document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SvgDocument(String);

impl SvgDocument {
    /// The XML text.
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Consumes the document, returning its text.
    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for SvgDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Maps a data interval onto a pixel interval.
#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn map(&self, v: f64) -> f64 {
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }
}

/// Rectangle of the plotting area in pixels.
#[derive(Debug, Clone, Copy)]
struct Frame {
    left: f64,
    top: f64,
    right: f64,
    bottom: f64,
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

/// Tick positions covering `[0, hi]` at a 1/2/5 × 10^k step.
fn ticks(hi: f64) -> (Vec<f64>, usize) {
    let raw = hi / 5.0;
    let mag = libm::pow(10.0, libm::floor(libm::log10(raw)));
    let step = [1.0, 2.0, 5.0, 10.0].into_iter().map(|m| m * mag).find(|&s| s >= raw).unwrap_or(10.0 * mag);
    let decimals = if step >= 1.0 { 0 } else { (-libm::floor(libm::log10(step))) as usize };
    let mut out = Vec::new();
    let mut i = 0.0;
    while i * step <= hi * (1.0 + 1e-9) {
        out.push(i * step);
        i += 1.0;
    }
    (out, decimals)
}

struct Canvas<'a> {
    spec: &'a PlotSpec,
    out: String,
}

impl<'a> Canvas<'a> {
    fn new(spec: &'a PlotSpec, kind: &str) -> Self {
        let mut out = String::new();
        let (w, h) = (spec.width, spec.height);
        let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" class="{kind}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect class="background" x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);
        if let Some(title) = &spec.title {
            let _ = writeln!(
                out,
                r#"<text class="title" x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
                w / 2.0,
                spec.margin / 2.0,
                escape(title)
            );
        }
        Canvas { spec, out }
    }

    fn finish(mut self) -> SvgDocument {
        self.out.push_str("</svg>\n");
        SvgDocument(self.out)
    }

    fn x_axis(&mut self, frame: Frame, axis: Axis, label: &str) {
        let out = &mut self.out;
        let _ = writeln!(
            out,
            r#"<line class="axis" x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
            frame.left, frame.bottom, frame.right, frame.bottom
        );
        let (ts, decimals) = ticks(axis.hi);
        for t in ts {
            let x = axis.map(t);
            let _ = writeln!(
                out,
                r#"<line class="tick" x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="black"/>"#,
                frame.bottom,
                frame.bottom + 5.0
            );
            let _ = writeln!(
                out,
                r#"<text class="tick-label" x="{x}" y="{}" text-anchor="middle">{t:.decimals$}</text>"#,
                frame.bottom + 18.0
            );
        }
        let _ = writeln!(
            out,
            r#"<text class="axis-label" x="{}" y="{}" text-anchor="middle">{label}</text>"#,
            (frame.left + frame.right) / 2.0,
            frame.bottom + 38.0
        );
    }

    fn y_axis(&mut self, frame: Frame, axis: Option<Axis>, label: &str) {
        let out = &mut self.out;
        let _ = writeln!(
            out,
            r#"<line class="axis" x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
            frame.left, frame.top, frame.left, frame.bottom
        );
        if let Some(axis) = axis {
            let (ts, decimals) = ticks(axis.hi);
            for t in ts {
                let y = axis.map(t);
                let _ = writeln!(
                    out,
                    r#"<line class="tick" x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="black"/>"#,
                    frame.left - 5.0,
                    frame.left
                );
                let _ = writeln!(
                    out,
                    r#"<text class="tick-label" x="{}" y="{}" text-anchor="end">{t:.decimals$}</text>"#,
                    frame.left - 8.0,
                    y + 4.0
                );
            }
        }
        let (x, y) = (frame.left - 42.0, (frame.top + frame.bottom) / 2.0);
        let _ = writeln!(
            out,
            r#"<text class="axis-label" x="{x}" y="{y}" text-anchor="middle" transform="rotate(-90 {x} {y})">{label}</text>"#
        );
    }

    fn legend(&mut self, frame: Frame, dims: &[usize]) {
        for (i, &dim) in dims.iter().enumerate() {
            let style = self.spec.style(dim);
            let x = frame.right - 36.0;
            let y = frame.top + 14.0 + 16.0 * i as f64;
            let _ = writeln!(
                self.out,
                r#"<text class="legend" x="{x}" y="{y}" fill="{}">H{dim}</text>"#,
                escape(&style.color)
            );
        }
    }

    fn marker(&mut self, dim: usize, x: f64, y: f64, essential: bool) {
        let style = self.spec.style(dim);
        let r = self.spec.marker_size;
        let color = escape(&style.color);
        let (class, paint) = if essential {
            ("marker essential", alloc::format!(r#"fill="none" stroke="{color}" stroke-width="1.5""#))
        } else {
            ("marker", alloc::format!(r#"fill="{color}" fill-opacity="0.8" stroke="{color}""#))
        };
        let head = alloc::format!(r#"class="{class}" data-dimension="{dim}" transform="translate({x} {y})" {paint}"#);
        let _ = match style.shape {
            MarkerShape::Circle => writeln!(self.out, r#"<circle {head} cx="0" cy="0" r="{r}"/>"#),
            MarkerShape::Square => writeln!(self.out, r#"<rect {head} x="{}" y="{}" width="{}" height="{}"/>"#, -r, -r, 2.0 * r, 2.0 * r),
            MarkerShape::Triangle => {
                let h = r * 1.2;
                writeln!(self.out, r#"<polygon {head} points="0,{} {},{} {},{}"/>"#, -h, h, h, -h, h)
            }
            MarkerShape::Diamond => {
                let h = r * 1.3;
                writeln!(self.out, r#"<polygon {head} points="0,{} {h},0 0,{h} {},0"/>"#, -h, -h)
            }
        };
    }
}

/// Largest finite birth or death, or `None` when there is nothing finite.
fn max_finite(features: &[PersistenceFeature]) -> Option<f64> {
    features
        .iter()
        .flat_map(|f| [f.birth, f.death])
        .filter(|v| v.is_finite())
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))))
        .filter(|&m| m > 0.0)
}

fn dims_present(features: &[PersistenceFeature]) -> Vec<usize> {
    let mut dims: Vec<usize> = features.iter().map(|f| f.dimension).collect();
    dims.sort_unstable();
    dims.dedup();
    dims
}

fn frame(spec: &PlotSpec) -> Frame {
    Frame {
        left: spec.margin,
        top: spec.margin,
        right: spec.width - spec.margin,
        bottom: spec.height - spec.margin,
    }
}

/// Persistence barcode: one horizontal bar per feature from birth to death,
/// degree 0 at the bottom. Essential bars run to the cap and end in an
/// arrowhead, and are only drawn with `include_essential`.
pub fn render_barcode(diag: &PersistenceDiagram, spec: &PlotSpec) -> SvgDocument {
    let mut canvas = Canvas::new(spec, "barcode");
    let frame = frame(spec);
    let largest = max_finite(&diag.features).unwrap_or(1.0);
    let cap = spec.essential_cap_factor * largest;

    let mut bars: Vec<&PersistenceFeature> = diag
        .features
        .iter()
        .filter(|f| spec.include_essential || !f.is_essential())
        .collect();
    bars.sort_by(|a, b| a.total_cmp(b));
    let has_essential = bars.iter().any(|f| f.is_essential());
    let x_hi = if has_essential { cap } else { largest * FLAT_AXIS_PADDING };
    let x = Axis { lo: 0.0, hi: x_hi, px_lo: frame.left, px_hi: frame.right };

    canvas.x_axis(frame, x, "diameter");
    canvas.y_axis(frame, None, "features");
    canvas.legend(frame, &dims_present(&diag.features));

    let row = (frame.bottom - frame.top) / (bars.len().max(1) as f64);
    let stroke = (row * 0.6).clamp(0.5, 6.0);
    for (i, f) in bars.iter().enumerate() {
        let y = frame.bottom - (i as f64 + 0.5) * row;
        let color = escape(&spec.style(f.dimension).color);
        let x0 = x.map(f.birth);
        if f.is_essential() {
            let x1 = x.map(cap);
            let head = (stroke * 2.0).max(4.0).min(x1 - x0);
            let _ = writeln!(
                canvas.out,
                r#"<line class="bar essential" data-dimension="{}" x1="{x0}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="{stroke}"/>"#,
                f.dimension,
                x1 - head
            );
            let _ = writeln!(
                canvas.out,
                r#"<polygon class="arrowhead" points="{},{} {x1},{y} {},{}" fill="{color}"/>"#,
                x1 - head,
                y - head / 2.0,
                x1 - head,
                y + head / 2.0
            );
        } else {
            let _ = writeln!(
                canvas.out,
                r#"<line class="bar" data-dimension="{}" x1="{x0}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="{stroke}"/>"#,
                f.dimension,
                x.map(f.death)
            );
        }
    }
    canvas.finish()
}

/// Conventional persistence diagram: markers at (birth, death) on a square
/// plot whose axes share the range `[0, S]`, `S` = cap factor × largest finite
/// value, with the diagonal reference line `y = x`. Essential features sit on
/// the top border as open markers when `include_essential` is set.
pub fn render_conventional(diag: &PersistenceDiagram, spec: &PlotSpec) -> SvgDocument {
    let mut canvas = Canvas::new(spec, "conventional-diagram");
    let side = (spec.width.min(spec.height)) - 2.0 * spec.margin;
    let frame = Frame { left: spec.margin, top: spec.margin, right: spec.margin + side, bottom: spec.margin + side };
    let s = spec.essential_cap_factor * max_finite(&diag.features).unwrap_or(1.0);
    let x = Axis { lo: 0.0, hi: s, px_lo: frame.left, px_hi: frame.right };
    let y = Axis { lo: 0.0, hi: s, px_lo: frame.bottom, px_hi: frame.top };

    canvas.x_axis(frame, x, "birth");
    canvas.y_axis(frame, Some(y), "death");
    let _ = writeln!(
        canvas.out,
        r#"<line class="reference-line" x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray" stroke-dasharray="4 3"/>"#,
        x.map(0.0),
        y.map(0.0),
        x.map(s),
        y.map(s)
    );
    canvas.legend(frame, &dims_present(&diag.features));
    for f in &diag.features {
        if f.is_essential() {
            if spec.include_essential {
                canvas.marker(f.dimension, x.map(f.birth), y.map(s), true);
            }
        } else {
            canvas.marker(f.dimension, x.map(f.birth), y.map(f.death), false);
        }
    }
    canvas.finish()
}

/// Flat persistence diagram: markers at (birth, death − birth). Both axes
/// start at zero and extend 5% past the largest value; the horizontal axis is
/// the zero-persistence reference, so no diagonal is drawn.
pub fn render_flat(diag: &PersistenceDiagram, spec: &PlotSpec) -> SvgDocument {
    let mut canvas = Canvas::new(spec, "flat-diagram");
    let frame = frame(spec);
    let finite = || diag.features.iter().filter(|f| !f.is_essential());
    let max_birth = diag
        .features
        .iter()
        .filter(|f| spec.include_essential || !f.is_essential())
        .map(|f| f.birth)
        .fold(0.0, f64::max);
    let max_pers = finite().map(|f| f.persistence()).fold(0.0, f64::max);
    let x_hi = if max_birth > 0.0 { max_birth * FLAT_AXIS_PADDING } else { 1.0 };
    let y_hi = if max_pers > 0.0 { max_pers * FLAT_AXIS_PADDING } else { 1.0 };
    let x = Axis { lo: 0.0, hi: x_hi, px_lo: frame.left, px_hi: frame.right };
    let y = Axis { lo: 0.0, hi: y_hi, px_lo: frame.bottom, px_hi: frame.top };

    canvas.x_axis(frame, x, "birth");
    canvas.y_axis(frame, Some(y), "persistence");
    canvas.legend(frame, &dims_present(&diag.features));
    for f in &diag.features {
        if f.is_essential() {
            if spec.include_essential {
                canvas.marker(f.dimension, x.map(f.birth), y.map(y_hi), true);
            }
        } else {
            canvas.marker(f.dimension, x.map(f.birth), y.map(f.persistence()), false);
        }
    }
    canvas.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::SQRT_2;

    fn square_diagram() -> PersistenceDiagram {
        let f = |dimension, birth, death| PersistenceFeature { dimension, birth, death };
        PersistenceDiagram {
            features: vec![f(0, 0.0, f64::INFINITY), f(0, 0.0, 1.0), f(0, 0.0, 1.0), f(0, 0.0, 1.0), f(1, 1.0, SQRT_2)],
            max_scale: SQRT_2,
            n_points: 4,
        }
    }

    fn empty() -> PersistenceDiagram {
        PersistenceDiagram { features: Vec::new(), max_scale: 0.0, n_points: 0 }
    }

    fn count(svg: &SvgDocument, needle: &str) -> usize {
        svg.as_str().matches(needle).count()
    }

    fn bars(svg: &SvgDocument) -> usize {
        count(svg, r#"class="bar""#) + count(svg, r#"class="bar "#)
    }

    #[test]
    fn spec_validation() {
        assert!(PlotSpec::new(100.0, 100.0, 50.0).is_err());
        assert!(PlotSpec::new(101.0, 101.0, 50.0).is_ok());
        assert!(PlotSpec::default().with_essential_cap_factor(1.0).is_err());
        let spec = PlotSpec::default().with_style(5, MarkerStyle::new(MarkerShape::Circle, "black"));
        assert_eq!(spec.style(5).color, "black");
        assert_eq!(spec.style(4).shape, MarkerShape::Circle);
        assert_eq!(spec.style(9).shape, spec.style(3).shape);
    }

    #[test]
    fn barcode_bar_counts() {
        let d = square_diagram();
        let with = render_barcode(&d, &PlotSpec::default().with_include_essential(true));
        assert_eq!(bars(&with), 5);
        assert_eq!(count(&with, r#"class="arrowhead""#), 1);
        let without = render_barcode(&d, &PlotSpec::default());
        assert_eq!(bars(&without), 4);
        assert_eq!(count(&without, "arrowhead"), 0);
        let none = render_barcode(&empty(), &PlotSpec::default());
        assert_eq!(bars(&none), 0);
        assert_eq!(count(&none, r#"class="axis""#), 2);
    }

    #[test]
    fn conventional_markers() {
        let spec = PlotSpec::default();
        let svg = render_conventional(&square_diagram(), &spec);
        assert_eq!(count(&svg, r#"class="reference-line""#), 1);
        assert_eq!(count(&svg, r#"class="marker""#), 4);
        // S = 1.1 * √2 over a 360 px square starting at 60 px
        let s = 1.1 * SQRT_2;
        let px = 60.0 + 1.0 / s * 360.0;
        let py = 420.0 + SQRT_2 / s * (60.0 - 420.0);
        assert!(svg.as_str().contains(&alloc::format!(r#"data-dimension="1" transform="translate({px} {py})""#)));

        let none = render_conventional(&empty(), &spec);
        assert_eq!(count(&none, r#"class="reference-line""#), 1);
        assert_eq!(count(&none, "marker"), 0);
    }

    #[test]
    fn flat_markers() {
        let svg = render_flat(&square_diagram(), &PlotSpec::default());
        assert_eq!(count(&svg, "reference-line"), 0);
        assert_eq!(count(&svg, r#"class="marker""#), 4);
        let x_hi = 1.0 * FLAT_AXIS_PADDING;
        let y_hi = 1.0 * FLAT_AXIS_PADDING;
        let px = 60.0 + 1.0 / x_hi * 360.0;
        let py = 420.0 + (SQRT_2 - 1.0) / y_hi * (60.0 - 420.0);
        assert!(svg.as_str().contains(&alloc::format!(r#"data-dimension="1" transform="translate({px} {py})""#)));
        let with = render_flat(&square_diagram(), &PlotSpec::default().with_include_essential(true));
        assert_eq!(count(&with, r#"class="marker essential""#), 1);
    }

    #[test]
    fn titles_are_escaped() {
        let svg = render_flat(&empty(), &PlotSpec::default().with_title("a < b & c"));
        assert!(svg.as_str().contains("a &lt; b &amp; c"));
    }

    #[test]
    fn tick_steps() {
        assert_eq!(ticks(1.0).0, [0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]);
        assert_eq!(ticks(1.0).1, 1);
        assert_eq!(ticks(23.0).0.len(), 5);
        assert_eq!(ticks(23.0).1, 0);
    }
}
