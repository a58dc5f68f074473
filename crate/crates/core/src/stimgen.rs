//! Scene generators for the four search families.
//!
//! All geometry is in pixels on the 400x400 canvas, origin top-left, y down.

use crate::rng::RngState;
use crate::scene::{
    Background, Colour, LightDirection, ObjectKind, Point, Scene, SceneObject,
    SearchCondition, SizeCondition, TaskCondition, CANVAS,
};
use crate::scene::{DigitDirection, LetterDirection};
use thiserror::Error;

pub const DISTRACTOR_CIRCLE_RADIUS: f64 = 20.0;
pub const SPHERE_RADIUS: f64 = 20.0;
/// Minimum edge-to-edge spacing between spheres.
pub const SPHERE_GAP: f64 = 20.0;
pub const ARENA_CENTRE: Point = Point::new(200.0, 200.0);
pub const ARENA_RADIUS: f64 = 190.0;
pub const ARENA_GREY: u8 = 128;
pub const SPHERE_GREY: u8 = 128;
pub const GLYPH_WIDTH: f64 = 16.0;
pub const GLYPH_HEIGHT: f64 = 24.0;
pub const GLYPH_STROKE: f64 = 3.0;

pub const ATTEMPTS_PER_OBJECT: u32 = 10_000;
pub const SCENE_RESTARTS: u32 = 100;

/// Radius of the disc enclosing a glyph at any rotation.
pub fn glyph_footprint_radius() -> f64 {
    (GLYPH_WIDTH / 2.0).hypot(GLYPH_HEIGHT / 2.0)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StimError {
    #[error("could not place {objects} objects after {restarts} scene restarts")]
    PlacementExhausted { objects: usize, restarts: u32 },
    #[error("{n} distractors is outside 0..={max} for this family")]
    DistractorsOutOfRange { n: u32, max: u32 },
    #[error("palette {0:?} does not fit the condition")]
    InvalidPalette(Palette),
}

/// Where object footprints must lie.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    /// The whole canvas.
    Canvas,
    Disc { centre: Point, radius: f64 },
}

impl Region {
    pub fn contains(&self, centre: Point, radius: f64) -> bool {
        match *self {
            Region::Canvas => {
                centre.x - radius >= 0.0
                    && centre.x + radius <= CANVAS
                    && centre.y - radius >= 0.0
                    && centre.y + radius <= CANVAS
            }
            Region::Disc { centre: c, radius: big } => centre.distance(c) + radius <= big,
        }
    }

    fn sample(&self, rng: &mut RngState, radius: f64) -> Point {
        match *self {
            Region::Canvas => Point::new(
                rng.uniform(radius, CANVAS - radius),
                rng.uniform(radius, CANVAS - radius),
            ),
            Region::Disc { centre, radius: big } => {
                let reach = big - radius;
                Point::new(
                    rng.uniform(centre.x - reach, centre.x + reach),
                    rng.uniform(centre.y - reach, centre.y + reach),
                )
            }
        }
    }
}

/// Rejection-samples centres so that every footprint lies in `region` and
/// every pair keeps `distance >= r_i + r_j + min_gap`.
///
/// Each object gets [`ATTEMPTS_PER_OBJECT`] tries; when one runs out the whole
/// layout restarts, up to [`SCENE_RESTARTS`] times.
pub fn place_nonoverlapping(
    rng: &mut RngState,
    footprints: &[f64],
    region: Region,
    min_gap: f64,
) -> Result<Vec<Point>, StimError> {
    let mut placed: Vec<Point> = Vec::with_capacity(footprints.len());
    'restart: for _ in 0..=SCENE_RESTARTS {
        placed.clear();
        for &r in footprints {
            let mut ok = None;
            for _ in 0..ATTEMPTS_PER_OBJECT {
                let p = region.sample(rng, r);
                if !region.contains(p, r) {
                    continue;
                }
                let clear = placed
                    .iter()
                    .zip(footprints)
                    .all(|(q, &rq)| p.distance(*q) >= r + rq + min_gap);
                if clear {
                    ok = Some(p);
                    break;
                }
            }
            match ok {
                Some(p) => placed.push(p),
                None => continue 'restart,
            }
        }
        return Ok(placed);
    }
    Err(StimError::PlacementExhausted {
        objects: footprints.len(),
        restarts: SCENE_RESTARTS,
    })
}

/// Explicit colours for a scene, used where a caller counterbalances colour
/// combinations instead of drawing them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Palette {
    pub target: Colour,
    pub distractor: Colour,
}

fn check_range(n: u32, max: u32) -> Result<(), StimError> {
    if n > max {
        Err(StimError::DistractorsOutOfRange { n, max })
    } else {
        Ok(())
    }
}

fn two_distinct_colours(rng: &mut RngState) -> (Colour, Colour) {
    let a = rng.below(3) as usize;
    let mut b = rng.below(2) as usize;
    if b >= a {
        b += 1;
    }
    (Colour::CHROMATIC[a], Colour::CHROMATIC[b])
}

/// Draws the palette a condition would use when none is forced.
pub fn draw_palette(rng: &mut RngState, condition: &TaskCondition) -> Palette {
    match condition.search_condition() {
        Some(SearchCondition::Disjunctive | SearchCondition::ShapeColourConjunctive) => {
            let (target, distractor) = two_distinct_colours(rng);
            Palette { target, distractor }
        }
        Some(SearchCondition::ShapeConjunctive) | None => {
            let c = *rng.pick(&Colour::CHROMATIC);
            Palette { target: c, distractor: c }
        }
    }
}

fn check_palette(condition: &TaskCondition, p: Palette) -> Result<(), StimError> {
    let chromatic = |c: Colour| Colour::CHROMATIC.contains(&c);
    let ok = chromatic(p.target)
        && chromatic(p.distractor)
        && match condition {
            TaskCondition::CircleSizes { .. } => p.target == p.distractor,
            TaskCondition::LightPriors { .. } => false,
            _ => match condition.search_condition() {
                Some(SearchCondition::ShapeConjunctive) => p.target == p.distractor,
                _ => p.target != p.distractor,
            },
        };
    if ok {
        Ok(())
    } else {
        Err(StimError::InvalidPalette(p))
    }
}

/// One larger target circle among equal distractors, all one colour.
pub fn gen_circle_scene(
    rng: &mut RngState,
    condition: SizeCondition,
    n_distractors: u32,
) -> Result<Scene, StimError> {
    generate_scene(rng, &TaskCondition::CircleSizes { condition }, n_distractors, None)
}

pub fn gen_two_among_five_scene(
    rng: &mut RngState,
    condition: SearchCondition,
    direction: DigitDirection,
    n_distractors: u32,
) -> Result<Scene, StimError> {
    generate_scene(rng, &TaskCondition::TwoAmongFive { condition, direction }, n_distractors, None)
}

pub fn gen_t_among_l_scene(
    rng: &mut RngState,
    condition: SearchCondition,
    direction: LetterDirection,
    n_distractors: u32,
) -> Result<Scene, StimError> {
    generate_scene(rng, &TaskCondition::TAmongL { condition, direction }, n_distractors, None)
}

/// One sphere lit from `direction` among spheres lit from the opposite side.
pub fn gen_light_prior_scene(
    rng: &mut RngState,
    direction: LightDirection,
    n_distractors: u32,
) -> Result<Scene, StimError> {
    generate_scene(rng, &TaskCondition::LightPriors { condition: direction }, n_distractors, None)
}

/// Generates a scene for any condition, optionally with forced colours.
///
/// Draw order is fixed: palette, layout, then per-object attributes.
pub fn generate_scene(
    rng: &mut RngState,
    condition: &TaskCondition,
    n_distractors: u32,
    palette: Option<Palette>,
) -> Result<Scene, StimError> {
    check_range(n_distractors, condition.family().max_distractors())?;
    if let Some(p) = palette {
        check_palette(condition, p)?;
    }
    let n = n_distractors as usize;
    match *condition {
        TaskCondition::CircleSizes { condition: size } => {
            let palette = palette.unwrap_or_else(|| draw_palette(rng, condition));
            let mut radii = vec![size.target_radius()];
            radii.extend(std::iter::repeat_n(DISTRACTOR_CIRCLE_RADIUS, n));
            let centres = place_nonoverlapping(rng, &radii, Region::Canvas, 0.0)?;
            let objects = centres
                .into_iter()
                .zip(radii)
                .enumerate()
                .map(|(i, (centre, radius))| SceneObject {
                    kind: ObjectKind::Circle,
                    centre,
                    radius,
                    colour: palette.target,
                    rotation_deg: 0.0,
                    lit_from: None,
                    glyph: None,
                    is_target: i == 0,
                })
                .collect();
            Ok(Scene { condition: *condition, background: Background::White, objects })
        }
        TaskCondition::TwoAmongFive { condition: search, .. }
        | TaskCondition::TAmongL { condition: search, .. } => {
            let palette = palette.unwrap_or_else(|| draw_palette(rng, condition));
            let (target_glyph, other_glyph) = condition.glyphs().expect("glyph family");
            let kind = if condition.family() == crate::scene::Family::TwoAmongFive {
                ObjectKind::Digit
            } else {
                ObjectKind::Glyph
            };
            // (glyph, colour) for target then distractors.
            let mut items = vec![(target_glyph, palette.target)];
            match search {
                SearchCondition::Disjunctive | SearchCondition::ShapeConjunctive => {
                    items.extend(std::iter::repeat_n((other_glyph, palette.distractor), n));
                }
                SearchCondition::ShapeColourConjunctive => {
                    let first_shares_colour = rng.coin();
                    items.extend((0..n).map(|i| {
                        if (i % 2 == 0) == first_shares_colour {
                            (other_glyph, palette.target)
                        } else {
                            (target_glyph, palette.distractor)
                        }
                    }));
                }
            }
            let r = glyph_footprint_radius();
            let radii = vec![r; items.len()];
            let centres = place_nonoverlapping(rng, &radii, Region::Canvas, 0.0)?;
            let objects = centres
                .into_iter()
                .zip(items)
                .enumerate()
                .map(|(i, (centre, (glyph, colour)))| SceneObject {
                    kind,
                    centre,
                    radius: r,
                    colour,
                    rotation_deg: rng.uniform(0.0, 360.0),
                    lit_from: None,
                    glyph: Some(glyph),
                    is_target: i == 0,
                })
                .collect();
            Ok(Scene { condition: *condition, background: Background::White, objects })
        }
        TaskCondition::LightPriors { condition: lit } => {
            if let Some(p) = palette {
                return Err(StimError::InvalidPalette(p));
            }
            let radii = vec![SPHERE_RADIUS; n + 1];
            let region = Region::Disc { centre: ARENA_CENTRE, radius: ARENA_RADIUS };
            let centres = place_nonoverlapping(rng, &radii, region, SPHERE_GAP)?;
            let objects = centres
                .into_iter()
                .enumerate()
                .map(|(i, centre)| SceneObject {
                    kind: ObjectKind::Sphere,
                    centre,
                    radius: SPHERE_RADIUS,
                    colour: Colour::Grey(SPHERE_GREY),
                    rotation_deg: 0.0,
                    lit_from: Some(if i == 0 { lit } else { lit.opposite() }),
                    glyph: None,
                    is_target: i == 0,
                })
                .collect();
            Ok(Scene { condition: *condition, background: Background::Arena, objects })
        }
    }
}

/// Describes every invariant violation in `scene`; empty when the scene is valid.
///
/// Independent O(n^2) check used by tests and the acceptance suite.
pub fn scene_violations(scene: &Scene) -> Vec<String> {
    let mut out = Vec::new();
    let targets = scene.objects.iter().filter(|o| o.is_target).count();
    if targets != 1 {
        out.push(format!("{targets} targets"));
    }
    let (region, gap) = match scene.condition {
        TaskCondition::LightPriors { .. } => (
            Region::Disc { centre: ARENA_CENTRE, radius: ARENA_RADIUS },
            SPHERE_GAP,
        ),
        _ => (Region::Canvas, 0.0),
    };
    for (i, a) in scene.objects.iter().enumerate() {
        if !region.contains(a.centre, a.radius) {
            out.push(format!("object {i} leaves its region"));
        }
        for (j, b) in scene.objects.iter().enumerate().skip(i + 1) {
            if a.centre.distance(b.centre) < a.radius + b.radius + gap {
                out.push(format!("objects {i} and {j} too close"));
            }
        }
    }
    if let Some(SearchCondition::ShapeColourConjunctive) = scene.condition.search_condition() {
        let t = scene.target();
        let same_pair = scene
            .objects
            .iter()
            .filter(|o| o.glyph == t.glyph && o.colour == t.colour)
            .count();
        if same_pair != 1 {
            out.push(format!("target pair appears {same_pair} times"));
        }
        for o in scene.objects.iter().filter(|o| !o.is_target) {
            if o.glyph == t.glyph && o.colour == t.colour {
                continue;
            }
            if o.glyph != t.glyph && o.colour != t.colour {
                out.push("distractor shares no feature with target".into());
            }
        }
    }
    out
}
