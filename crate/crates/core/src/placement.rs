//! Caption box geometry relative to the speaker's face.
//!
//! All coordinates are normalized to the viewport: `(0,0)` is the top-left
//! corner and `(1,1)` the bottom-right.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotate::str_enum;

/// Face height that maps to a caption scale of 1.0.
pub const REFERENCE_FACE_HEIGHT: f64 = 0.25;
pub const MIN_SCALE: f64 = 0.5;
pub const MAX_SCALE: f64 = 2.0;
/// Center of the bottom-center subtitle box.
pub const TRADITIONAL_CENTER: (f64, f64) = (0.5, 0.92);
pub const DEFAULT_MARGIN: f64 = 0.02;
pub const DEFAULT_BASE: (f64, f64) = (0.35, 0.12);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlacementError {
    #[error("degenerate face anchor: {0}")]
    DegenerateAnchor(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaceAnchor {
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
}

impl Default for FaceAnchor {
    fn default() -> Self {
        FaceAnchor { cx: 0.5, cy: 0.3, w: 0.2, h: 0.25 }
    }
}

impl FaceAnchor {
    pub fn validate(&self) -> Result<(), PlacementError> {
        let finite = [self.cx, self.cy, self.w, self.h].iter().all(|v| v.is_finite());
        if !finite || self.h <= 0.0 || self.w <= 0.0 {
            return Err(PlacementError::DegenerateAnchor(format!("{self:?}")));
        }
        Ok(())
    }

    pub fn left(&self) -> f64 {
        self.cx - self.w / 2.0
    }

    pub fn right(&self) -> f64 {
        self.cx + self.w / 2.0
    }

    pub fn top(&self) -> f64 {
        self.cy - self.h / 2.0
    }

    pub fn bottom(&self) -> f64 {
        self.cy + self.h / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlacementMode {
    Left,
    Right,
    #[default]
    Below,
    Traditional,
}

impl PlacementMode {
    /// Also the tie-break order used when snapping a drag.
    pub const ALL: [PlacementMode; 4] =
        [PlacementMode::Left, PlacementMode::Right, PlacementMode::Below, PlacementMode::Traditional];
}

str_enum!(PlacementMode {
    PlacementMode::Left => "left",
    PlacementMode::Right => "right",
    PlacementMode::Below => "below",
    PlacementMode::Traditional => "traditional",
});

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaptionBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
    pub scale: f64,
}

impl CaptionBox {
    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    pub fn intersects(&self, other: &CaptionBox) -> bool {
        self.x < other.x + other.w
            && other.x < self.x + self.w
            && self.y < other.y + other.h
            && other.y < self.y + self.h
    }

    pub fn within_viewport(&self) -> bool {
        self.x >= 0.0 && self.y >= 0.0 && self.x + self.w <= 1.0 && self.y + self.h <= 1.0
    }

    pub fn of_face(anchor: &FaceAnchor) -> CaptionBox {
        CaptionBox { x: anchor.left(), y: anchor.top(), w: anchor.w, h: anchor.h, scale: 1.0 }
    }
}

/// Caption scale for a face of the given height.
pub fn distance_scale(face_h: f64) -> f64 {
    (face_h / REFERENCE_FACE_HEIGHT).clamp(MIN_SCALE, MAX_SCALE)
}

/// Places the box for `mode` without fitting it into the viewport.
pub fn unclamped_box(
    anchor: &FaceAnchor,
    mode: PlacementMode,
    base: (f64, f64),
    margin: f64,
) -> Result<CaptionBox, PlacementError> {
    anchor.validate()?;
    let (base_w, base_h) = base;
    let scale = match mode {
        PlacementMode::Traditional => 1.0,
        _ => distance_scale(anchor.h),
    };
    // A box larger than the viewport could never be clamped inside it.
    let scale = scale.min(1.0 / base_w).min(1.0 / base_h);
    let (w, h) = (base_w * scale, base_h * scale);
    let (x, y) = match mode {
        PlacementMode::Left => (anchor.left() - margin - w, anchor.cy - h / 2.0),
        PlacementMode::Right => (anchor.right() + margin, anchor.cy - h / 2.0),
        PlacementMode::Below => (anchor.cx - w / 2.0, anchor.bottom() + margin),
        PlacementMode::Traditional => (TRADITIONAL_CENTER.0 - w / 2.0, TRADITIONAL_CENTER.1 - h / 2.0),
    };
    Ok(CaptionBox { x, y, w, h, scale })
}

/// Shifts the box into `[0,1]²` without changing its size.
pub fn clamp_to_viewport(b: CaptionBox) -> CaptionBox {
    CaptionBox { x: b.x.clamp(0.0, (1.0 - b.w).max(0.0)), y: b.y.clamp(0.0, (1.0 - b.h).max(0.0)), ..b }
}

pub fn compute_box(
    anchor: &FaceAnchor,
    mode: PlacementMode,
    base: (f64, f64),
    margin: f64,
) -> Result<CaptionBox, PlacementError> {
    unclamped_box(anchor, mode, base, margin).map(clamp_to_viewport)
}

/// Snaps a dropped caption to the mode whose box center is nearest the drop point.
pub fn apply_drag(
    anchor: &FaceAnchor,
    drop: (f64, f64),
    base: (f64, f64),
    margin: f64,
) -> Result<PlacementMode, PlacementError> {
    const TIE_EPS: f64 = 1e-12;
    let mut best: Option<(PlacementMode, f64)> = None;
    for mode in PlacementMode::ALL {
        let (cx, cy) = compute_box(anchor, mode, base, margin)?.center();
        let d = ((cx - drop.0).powi(2) + (cy - drop.1).powi(2)).sqrt();
        match best {
            Some((_, best_d)) if d >= best_d - TIE_EPS => {}
            _ => best = Some((mode, d)),
        }
    }
    Ok(best.expect("four candidate modes").0)
}

impl fmt::Display for FaceAnchor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.cx, self.cy, self.w, self.h)
    }
}

impl FromStr for FaceAnchor {
    type Err = String;

    /// Parses `cx,cy,w,h`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad anchor component {p:?}: {e}")))
            .collect::<Result<_, _>>()?;
        match v[..] {
            [cx, cy, w, h] => {
                let a = FaceAnchor { cx, cy, w, h };
                a.validate().map_err(|e| e.to_string())?;
                Ok(a)
            }
            _ => Err(format!("expected cx,cy,w,h, got {s:?}")),
        }
    }
}
