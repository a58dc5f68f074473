//! Hard-edged rasterisation of scenes and byte-stable PNG encoding.
//!
//! A pixel belongs to a shape when its centre `(i + 0.5, j + 0.5)` does. No
//! anti-aliasing, so every output is an exact function of the scene.

use crate::scene::{Background, Glyph, LightDirection, ObjectKind, Scene, SceneObject, CANVAS, CANVAS_SIZE};
use crate::stimgen::{ARENA_CENTRE, ARENA_GREY, ARENA_RADIUS, GLYPH_HEIGHT, GLYPH_STROKE, GLYPH_WIDTH};

/// Sphere level at the lit edge.
pub const SPHERE_LIT_LEVEL: f64 = 230.0;
/// Sphere level at the dark edge.
pub const SPHERE_DARK_LEVEL: f64 = 40.0;

/// Row-major 8-bit RGB.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
}

impl Image {
    pub fn filled(width: u32, height: u32, rgb: [u8; 3]) -> Self {
        let mut pixels = Vec::with_capacity((width * height * 3) as usize);
        for _ in 0..width * height {
            pixels.extend_from_slice(&rgb);
        }
        Self { width, height, pixels }
    }

    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        let i = ((y * self.width + x) * 3) as usize;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn put(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let i = ((y * self.width + x) * 3) as usize;
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    /// RGBA copy for canvas `ImageData`.
    pub fn to_rgba(&self) -> Vec<u8> {
        self.pixels
            .chunks_exact(3)
            .flat_map(|p| [p[0], p[1], p[2], 255])
            .collect()
    }

    /// Mirror about the vertical axis.
    pub fn flipped_horizontally(&self) -> Image {
        let mut out = self.clone();
        for y in 0..self.height {
            for x in 0..self.width {
                out.put(self.width - 1 - x, y, self.get(x, y));
            }
        }
        out
    }
}

/// Axis-aligned bar in glyph-local coordinates: centre and half extents.
#[derive(Debug, Clone, Copy)]
struct Bar {
    cx: f64,
    cy: f64,
    hw: f64,
    hh: f64,
}

impl Bar {
    fn contains(&self, x: f64, y: f64) -> bool {
        (x - self.cx).abs() <= self.hw && (y - self.cy).abs() <= self.hh
    }
}

/// Segment bars for a glyph. Digits use a seven-segment layout; "5" is the
/// left-right mirror of "2".
fn glyph_bars(glyph: Glyph) -> Vec<Bar> {
    let (w, h, s) = (GLYPH_WIDTH / 2.0, GLYPH_HEIGHT / 2.0, GLYPH_STROKE / 2.0);
    let top = Bar { cx: 0.0, cy: -h + s, hw: w, hh: s };
    let middle = Bar { cx: 0.0, cy: 0.0, hw: w, hh: s };
    let bottom = Bar { cx: 0.0, cy: h - s, hw: w, hh: s };
    let upper = |side: f64| Bar { cx: side * (w - s), cy: -h / 2.0, hw: s, hh: h / 2.0 };
    let lower = |side: f64| Bar { cx: side * (w - s), cy: h / 2.0, hw: s, hh: h / 2.0 };
    match glyph {
        Glyph::Two => vec![top, upper(1.0), middle, lower(-1.0), bottom],
        Glyph::Five => vec![top, upper(-1.0), middle, lower(1.0), bottom],
        Glyph::T => vec![top, Bar { cx: 0.0, cy: 0.0, hw: s, hh: h }],
        Glyph::L => vec![Bar { cx: -(w - s), cy: 0.0, hw: s, hh: h }, bottom],
    }
}

/// Pixel-index range covering `[c - r, c + r]`, clipped to the canvas.
fn span(c: f64, r: f64) -> std::ops::Range<u32> {
    let lo = (c - r - 1.0).floor().max(0.0) as u32;
    let hi = ((c + r + 1.0).ceil().min(CANVAS)) as u32;
    lo..hi
}

fn fill_disc(img: &mut Image, obj: &SceneObject) {
    let rgb = obj.colour.rgb();
    let (cx, cy, r) = (obj.centre.x, obj.centre.y, obj.radius);
    for y in span(cy, r) {
        for x in span(cx, r) {
            let dx = x as f64 + 0.5 - cx;
            let dy = y as f64 + 0.5 - cy;
            if dx * dx + dy * dy <= r * r {
                img.put(x, y, rgb);
            }
        }
    }
}

/// Grey level of a sphere at offset `(dx, dy)` from its centre: a linear ramp
/// along the lighting axis from the lit edge to the dark edge.
pub fn sphere_level(lit_from: LightDirection, dx: f64, dy: f64, radius: f64) -> u8 {
    // Signed distance towards the light, in [-r, r].
    let toward_light = match lit_from {
        LightDirection::Top => -dy,
        LightDirection::Bottom => dy,
        LightDirection::Left => -dx,
        LightDirection::Right => dx,
    };
    let t = ((radius - toward_light) / (2.0 * radius)).clamp(0.0, 1.0);
    (SPHERE_LIT_LEVEL + (SPHERE_DARK_LEVEL - SPHERE_LIT_LEVEL) * t).round() as u8
}

fn shade_sphere(img: &mut Image, obj: &SceneObject) {
    let lit = obj.lit_from.expect("sphere without lighting");
    let (cx, cy, r) = (obj.centre.x, obj.centre.y, obj.radius);
    for y in span(cy, r) {
        for x in span(cx, r) {
            let dx = x as f64 + 0.5 - cx;
            let dy = y as f64 + 0.5 - cy;
            if dx * dx + dy * dy <= r * r {
                let v = sphere_level(lit, dx, dy, r);
                img.put(x, y, [v, v, v]);
            }
        }
    }
}

/// Nearest-neighbour rotation: each pixel centre is rotated back into the
/// glyph frame and tested against the bars.
fn stroke_glyph(img: &mut Image, obj: &SceneObject) {
    let bars = glyph_bars(obj.glyph.expect("glyph object without identity"));
    let rgb = obj.colour.rgb();
    let theta = obj.rotation_deg.to_radians();
    let (sin, cos) = theta.sin_cos();
    let (cx, cy, r) = (obj.centre.x, obj.centre.y, obj.radius);
    for y in span(cy, r) {
        for x in span(cx, r) {
            let dx = x as f64 + 0.5 - cx;
            let dy = y as f64 + 0.5 - cy;
            let lx = cos * dx + sin * dy;
            let ly = -sin * dx + cos * dy;
            if bars.iter().any(|b| b.contains(lx, ly)) {
                img.put(x, y, rgb);
            }
        }
    }
}

fn paint_background(background: Background) -> Image {
    match background {
        Background::White => Image::filled(CANVAS_SIZE, CANVAS_SIZE, [255, 255, 255]),
        Background::Arena => {
            let mut img = Image::filled(CANVAS_SIZE, CANVAS_SIZE, [0, 0, 0]);
            let arena = SceneObject {
                kind: ObjectKind::Circle,
                centre: ARENA_CENTRE,
                radius: ARENA_RADIUS,
                colour: crate::scene::Colour::Grey(ARENA_GREY),
                rotation_deg: 0.0,
                lit_from: None,
                glyph: None,
                is_target: false,
            };
            fill_disc(&mut img, &arena);
            img
        }
    }
}

pub fn render_scene(scene: &Scene) -> Image {
    let mut img = paint_background(scene.background);
    for obj in &scene.objects {
        match obj.kind {
            ObjectKind::Circle => fill_disc(&mut img, obj),
            ObjectKind::Sphere => shade_sphere(&mut img, obj),
            ObjectKind::Digit | ObjectKind::Glyph => stroke_glyph(&mut img, obj),
        }
    }
    img
}

/// PNG, 8-bit RGB, non-interlaced, `Compression::Balanced`, `Filter::Sub` on
/// every row. Identical pixels always give identical bytes.
pub fn encode_png(img: &Image) -> Vec<u8> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, img.width, img.height);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        enc.set_compression(png::Compression::Balanced);
        enc.set_filter(png::Filter::Sub);
        let mut writer = enc.write_header().expect("in-memory PNG header");
        writer.write_image_data(&img.pixels).expect("in-memory PNG body");
    }
    out
}

#[derive(Debug, thiserror::Error)]
pub enum DecodeError {
    #[error(transparent)]
    Png(#[from] png::DecodingError),
    #[error("expected 8-bit RGB, found {0:?}/{1:?}")]
    Format(png::ColorType, png::BitDepth),
}

/// Decodes an 8-bit RGB PNG.
pub fn decode_png(bytes: &[u8]) -> Result<Image, DecodeError> {
    let decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    let mut reader = decoder.read_info()?;
    let mut buf = vec![0; reader.output_buffer_size().unwrap_or(0)];
    let info = reader.next_frame(&mut buf)?;
    if info.color_type != png::ColorType::Rgb || info.bit_depth != png::BitDepth::Eight {
        return Err(DecodeError::Format(info.color_type, info.bit_depth));
    }
    buf.truncate(info.buffer_size());
    Ok(Image { width: info.width, height: info.height, pixels: buf })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::make_rng;
    use crate::scene::{Colour, Point, SizeCondition, TaskCondition};
    use crate::stimgen::{gen_light_prior_scene, generate_scene, SPHERE_RADIUS};

    fn lone(kind: ObjectKind, centre: Point, radius: f64) -> SceneObject {
        SceneObject {
            kind,
            centre,
            radius,
            colour: Colour::Red,
            rotation_deg: 0.0,
            lit_from: None,
            glyph: None,
            is_target: true,
        }
    }

    fn white_scene(objects: Vec<SceneObject>) -> Scene {
        Scene {
            condition: TaskCondition::CircleSizes { condition: SizeCondition::Large },
            background: Background::White,
            objects,
        }
    }

    #[test]
    fn empty_scene_is_white() {
        let img = render_scene(&white_scene(vec![]));
        assert_eq!(img.pixels.len(), 400 * 400 * 3);
        assert!(img.pixels.iter().all(|&v| v == 255));
    }

    #[test]
    fn circle_area_matches() {
        let img = render_scene(&white_scene(vec![lone(ObjectKind::Circle, Point::new(200.0, 200.0), 30.0)]));
        let red = img
            .pixels
            .chunks_exact(3)
            .filter(|p| p[0] > p[1] && p[0] > p[2])
            .count() as f64;
        let expected = std::f64::consts::PI * 900.0;
        assert!((red - expected).abs() / expected < 0.02, "{red} vs {expected}");
    }

    #[test]
    fn five_mirrors_two() {
        let mut two = lone(ObjectKind::Digit, Point::new(200.0, 200.0), 14.5);
        two.glyph = Some(Glyph::Two);
        let mut five = two.clone();
        five.glyph = Some(Glyph::Five);
        let a = render_scene(&white_scene(vec![two]));
        let b = render_scene(&white_scene(vec![five]));
        assert_ne!(a, b);
        assert_eq!(a.flipped_horizontally(), b);
    }

    #[test]
    fn sphere_lit_half_is_brighter() {
        let mut rng = make_rng(3);
        let s = gen_light_prior_scene(&mut rng, LightDirection::Top, 0).unwrap();
        let img = render_scene(&s);
        let c = s.objects[0].centre;
        let (mut top, mut nt, mut bottom, mut nb) = (0.0, 0.0, 0.0, 0.0);
        for y in 0..400u32 {
            for x in 0..400u32 {
                let dx = x as f64 + 0.5 - c.x;
                let dy = y as f64 + 0.5 - c.y;
                if dx * dx + dy * dy <= SPHERE_RADIUS * SPHERE_RADIUS {
                    let v = img.get(x, y)[0] as f64;
                    if dy < 0.0 {
                        top += v;
                        nt += 1.0;
                    } else {
                        bottom += v;
                        nb += 1.0;
                    }
                }
            }
        }
        assert!(top / nt > bottom / nb);
    }

    #[test]
    fn sphere_ramp_is_monotone() {
        for dir in LightDirection::ALL {
            let toward = |k: f64| match dir {
                LightDirection::Top => (0.0, -k),
                LightDirection::Bottom => (0.0, k),
                LightDirection::Left => (-k, 0.0),
                LightDirection::Right => (k, 0.0),
            };
            let mut prev = u8::MAX;
            // from lit edge to dark edge
            for step in 0..=400 {
                let k = 20.0 - step as f64 * 0.1;
                let (dx, dy) = toward(k);
                let v = sphere_level(dir, dx, dy, 20.0);
                assert!(v <= prev);
                prev = v;
            }
            let (dx, dy) = toward(20.0);
            assert_eq!(sphere_level(dir, dx, dy, 20.0), 230);
            assert_eq!(sphere_level(dir, -dx, -dy, 20.0), 40);
        }
    }

    #[test]
    fn light_priors_are_achromatic() {
        let mut rng = make_rng(8);
        let s = generate_scene(&mut rng, &TaskCondition::LightPriors { condition: LightDirection::Right }, 17, None)
            .unwrap();
        let img = render_scene(&s);
        assert!(img.pixels.chunks_exact(3).all(|p| p[0] == p[1] && p[1] == p[2]));
        assert_eq!(img.get(0, 0), [0, 0, 0]);
    }

    #[test]
    fn png_round_trip_and_stability() {
        let mut rng = make_rng(12);
        let s = generate_scene(&mut rng, &TaskCondition::CircleSizes { condition: SizeCondition::Small }, 20, None)
            .unwrap();
        let img = render_scene(&s);
        let a = encode_png(&img);
        let b = encode_png(&render_scene(&s));
        assert_eq!(a, b);
        assert_eq!(decode_png(&a).unwrap(), img);
        let white = decode_png(&encode_png(&Image::filled(400, 400, [255; 3]))).unwrap();
        assert_eq!(white.pixels.chunks_exact(3).filter(|p| *p == [255, 255, 255]).count(), 160_000);
    }
}
