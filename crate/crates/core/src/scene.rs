//! Scene vocabulary shared by the generators, the renderer and the scorers.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Canvas side length in pixels.
pub const CANVAS_SIZE: u32 = 400;
pub const CANVAS: f64 = CANVAS_SIZE as f64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// A cell of the 2x2 answer grid, 1-based, row first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub row: u8,
    pub col: u8,
}

impl Cell {
    pub const ALL: [Cell; 4] = [
        Cell { row: 1, col: 1 },
        Cell { row: 1, col: 2 },
        Cell { row: 2, col: 1 },
        Cell { row: 2, col: 2 },
    ];

    /// Returns `None` unless both indices are 1 or 2.
    pub fn new(row: u8, col: u8) -> Option<Self> {
        ((1..=2).contains(&row) && (1..=2).contains(&col)).then_some(Self { row, col })
    }

    /// Position in [`Cell::ALL`].
    pub fn index(self) -> usize {
        usize::from((self.row - 1) * 2 + (self.col - 1))
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cell ({},{})", self.row, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("point ({x}, {y}) lies outside the {CANVAS_SIZE}x{CANVAS_SIZE} canvas")]
pub struct OutOfCanvas {
    pub x: f64,
    pub y: f64,
}

/// Quadrant containing `centre`; quadrants are half-open, so 200 belongs to
/// the second row/column.
pub fn ground_truth_cell(centre: Point) -> Result<Cell, OutOfCanvas> {
    let inside = |v: f64| (0.0..CANVAS).contains(&v);
    if !inside(centre.x) || !inside(centre.y) {
        return Err(OutOfCanvas { x: centre.x, y: centre.y });
    }
    let half = CANVAS / 2.0;
    Ok(Cell {
        row: if centre.y < half { 1 } else { 2 },
        col: if centre.x < half { 1 } else { 2 },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Colour {
    Red,
    Green,
    Blue,
    Grey(u8),
}

impl Colour {
    pub const CHROMATIC: [Colour; 3] = [Colour::Red, Colour::Green, Colour::Blue];

    pub fn rgb(self) -> [u8; 3] {
        match self {
            Colour::Red => [255, 0, 0],
            Colour::Green => [0, 128, 0],
            Colour::Blue => [0, 0, 255],
            Colour::Grey(v) => [v, v, v],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Colour::Red => "red",
            Colour::Green => "green",
            Colour::Blue => "blue",
            Colour::Grey(_) => "grey",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Glyph {
    Two,
    Five,
    T,
    L,
}

impl Glyph {
    /// The character a person would type for this glyph.
    pub fn symbol(self) -> &'static str {
        match self {
            Glyph::Two => "2",
            Glyph::Five => "5",
            Glyph::T => "T",
            Glyph::L => "L",
        }
    }

    pub fn word(self) -> &'static str {
        match self {
            Glyph::Two => "two",
            Glyph::Five => "five",
            Glyph::T => "T",
            Glyph::L => "L",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    CircleSizes,
    TwoAmongFive,
    TAmongL,
    LightPriors,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::CircleSizes,
        Family::TwoAmongFive,
        Family::TAmongL,
        Family::LightPriors,
    ];

    /// Largest legal distractor count.
    pub fn max_distractors(self) -> u32 {
        match self {
            Family::CircleSizes => 49,
            Family::TwoAmongFive | Family::TAmongL => 99,
            Family::LightPriors => 17,
        }
    }

    pub fn slug(self) -> &'static str {
        match self {
            Family::CircleSizes => "circle-sizes",
            Family::TwoAmongFive => "two-among-five",
            Family::TAmongL => "t-among-l",
            Family::LightPriors => "light-priors",
        }
    }

    pub fn from_slug(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.slug() == s)
    }

    /// Every condition of the family, both directions where applicable.
    pub fn conditions(self) -> Vec<TaskCondition> {
        use SearchCondition::*;
        match self {
            Family::CircleSizes => [SizeCondition::Small, SizeCondition::Medium, SizeCondition::Large]
                .into_iter()
                .map(|condition| TaskCondition::CircleSizes { condition })
                .collect(),
            Family::TwoAmongFive => [Disjunctive, ShapeConjunctive, ShapeColourConjunctive]
                .into_iter()
                .flat_map(|condition| {
                    [DigitDirection::TwoAmongFive, DigitDirection::FiveAmongTwo]
                        .map(|direction| TaskCondition::TwoAmongFive { condition, direction })
                })
                .collect(),
            Family::TAmongL => [Disjunctive, ShapeConjunctive, ShapeColourConjunctive]
                .into_iter()
                .flat_map(|condition| {
                    [LetterDirection::TAmongL, LetterDirection::LAmongT]
                        .map(|direction| TaskCondition::TAmongL { condition, direction })
                })
                .collect(),
            Family::LightPriors => LightDirection::ALL
                .into_iter()
                .map(|condition| TaskCondition::LightPriors { condition })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SizeCondition {
    Small,
    Medium,
    Large,
}

impl SizeCondition {
    pub fn target_radius(self) -> f64 {
        match self {
            SizeCondition::Small => 22.5,
            SizeCondition::Medium => 25.0,
            SizeCondition::Large => 30.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SearchCondition {
    Disjunctive,
    ShapeConjunctive,
    ShapeColourConjunctive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DigitDirection {
    TwoAmongFive,
    FiveAmongTwo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LetterDirection {
    TAmongL,
    LAmongT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LightDirection {
    Top,
    Bottom,
    Left,
    Right,
}

impl LightDirection {
    pub const ALL: [LightDirection; 4] = [
        LightDirection::Top,
        LightDirection::Bottom,
        LightDirection::Left,
        LightDirection::Right,
    ];

    pub fn opposite(self) -> Self {
        match self {
            LightDirection::Top => LightDirection::Bottom,
            LightDirection::Bottom => LightDirection::Top,
            LightDirection::Left => LightDirection::Right,
            LightDirection::Right => LightDirection::Left,
        }
    }
}

/// Family plus its family-specific condition and, for glyph tasks, which
/// glyph is the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum TaskCondition {
    CircleSizes {
        condition: SizeCondition,
    },
    TwoAmongFive {
        condition: SearchCondition,
        direction: DigitDirection,
    },
    TAmongL {
        condition: SearchCondition,
        direction: LetterDirection,
    },
    LightPriors {
        condition: LightDirection,
    },
}

impl TaskCondition {
    pub fn family(&self) -> Family {
        match self {
            TaskCondition::CircleSizes { .. } => Family::CircleSizes,
            TaskCondition::TwoAmongFive { .. } => Family::TwoAmongFive,
            TaskCondition::TAmongL { .. } => Family::TAmongL,
            TaskCondition::LightPriors { .. } => Family::LightPriors,
        }
    }

    /// Target and distractor glyphs for the glyph families.
    pub fn glyphs(&self) -> Option<(Glyph, Glyph)> {
        match self {
            TaskCondition::TwoAmongFive { direction, .. } => Some(match direction {
                DigitDirection::TwoAmongFive => (Glyph::Two, Glyph::Five),
                DigitDirection::FiveAmongTwo => (Glyph::Five, Glyph::Two),
            }),
            TaskCondition::TAmongL { direction, .. } => Some(match direction {
                LetterDirection::TAmongL => (Glyph::T, Glyph::L),
                LetterDirection::LAmongT => (Glyph::L, Glyph::T),
            }),
            _ => None,
        }
    }

    pub fn search_condition(&self) -> Option<SearchCondition> {
        match self {
            TaskCondition::TwoAmongFive { condition, .. } | TaskCondition::TAmongL { condition, .. } => {
                Some(*condition)
            }
            _ => None,
        }
    }

    /// Short stable label, e.g. `two-among-five/shape-colour-conjunctive/5-among-2`.
    pub fn label(&self) -> String {
        let search = |c: &SearchCondition| match c {
            SearchCondition::Disjunctive => "disjunctive",
            SearchCondition::ShapeConjunctive => "shape-conjunctive",
            SearchCondition::ShapeColourConjunctive => "shape-colour-conjunctive",
        };
        match self {
            TaskCondition::CircleSizes { condition } => format!(
                "circle-sizes/{}",
                match condition {
                    SizeCondition::Small => "small",
                    SizeCondition::Medium => "medium",
                    SizeCondition::Large => "large",
                }
            ),
            TaskCondition::TwoAmongFive { condition, direction } => format!(
                "two-among-five/{}/{}",
                search(condition),
                match direction {
                    DigitDirection::TwoAmongFive => "2-among-5",
                    DigitDirection::FiveAmongTwo => "5-among-2",
                }
            ),
            TaskCondition::TAmongL { condition, direction } => format!(
                "t-among-l/{}/{}",
                search(condition),
                match direction {
                    LetterDirection::TAmongL => "t-among-l",
                    LetterDirection::LAmongT => "l-among-t",
                }
            ),
            TaskCondition::LightPriors { condition } => format!(
                "light-priors/{}",
                match condition {
                    LightDirection::Top => "top",
                    LightDirection::Bottom => "bottom",
                    LightDirection::Left => "left",
                    LightDirection::Right => "right",
                }
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObjectKind {
    Circle,
    Digit,
    Sphere,
    Glyph,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneObject {
    pub kind: ObjectKind,
    pub centre: Point,
    /// Radius of the footprint disc: the drawn radius for circles and
    /// spheres, the bounding-box half diagonal for glyphs.
    pub radius: f64,
    pub colour: Colour,
    pub rotation_deg: f64,
    pub lit_from: Option<LightDirection>,
    pub glyph: Option<Glyph>,
    pub is_target: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Background {
    White,
    /// Mid-grey disc on a black surround.
    Arena,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub condition: TaskCondition,
    pub background: Background,
    /// Painter's order.
    pub objects: Vec<SceneObject>,
}

impl Scene {
    pub fn target(&self) -> &SceneObject {
        self.objects
            .iter()
            .find(|o| o.is_target)
            .expect("scene without target")
    }

    pub fn n_distractors(&self) -> usize {
        self.objects.iter().filter(|o| !o.is_target).count()
    }
}
