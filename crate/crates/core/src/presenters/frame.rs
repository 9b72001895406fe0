//! Serialized display instructions.
//!
//! One JSON object per frame:
//!
//! ```text
//! {"frame_id":3,"t_ms":1200,"end":false,"regions":[{"id":"main","box":{"x":..,"y":..,"w":..,"h":..,"scale":..},
//!   "lines":[[{"text":"hello","flags":["highlighted"],"color":"#D62718","bg":null,"size":1.0,"suffix":null}]]}]}
//! ```

use serde::{Deserialize, Serialize};

use crate::annotate::StyledRun;
use crate::placement::CaptionBox;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionId {
    Main,
    Personal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub id: RegionId,
    #[serde(rename = "box")]
    pub bbox: CaptionBox,
    pub lines: Vec<Vec<StyledRun>>,
}

impl Region {
    pub fn word_count(&self) -> usize {
        self.lines.iter().map(Vec::len).sum()
    }

    pub fn runs(&self) -> impl Iterator<Item = &StyledRun> {
        self.lines.iter().flatten()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderFrame {
    pub frame_id: u64,
    pub t_ms: u64,
    #[serde(rename = "end")]
    pub end_of_stream: bool,
    pub regions: Vec<Region>,
}

impl RenderFrame {
    pub fn region(&self, id: RegionId) -> Option<&Region> {
        self.regions.iter().find(|r| r.id == id)
    }

    pub fn main(&self) -> &Region {
        self.region(RegionId::Main).expect("every frame carries a main region")
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("frames always serialize")
    }

    pub fn from_json_line(line: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(line)
    }
}

/// Rounds geometry to 1e-9 so serialized boxes read cleanly.
pub fn round_box(b: CaptionBox) -> CaptionBox {
    let r = |v: f64| (v * 1e9).round() / 1e9;
    CaptionBox { x: r(b.x), y: r(b.y), w: r(b.w), h: r(b.h), scale: r(b.scale) }
}
