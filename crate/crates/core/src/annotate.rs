//! Uncertainty flagging and visual styling of word tokens.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ingest::WordToken;

/// A 24-bit color, serialized as `#RRGGBB`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    pub const RED: Rgb = Rgb(0xD6, 0x27, 0x18);
    pub const YELLOW: Rgb = Rgb(0xFF, 0xD4, 0x00);
    pub const GREEN: Rgb = Rgb(0x1B, 0x8A, 0x3A);
}

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02X}{:02X}{:02X}", self.0, self.1, self.2)
    }
}

impl FromStr for Rgb {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let hex = s
            .strip_prefix('#')
            .filter(|h| h.len() == 6 && h.is_ascii())
            .ok_or_else(|| format!("expected #RRGGBB, got {s:?}"))?;
        let byte = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).map_err(|e| e.to_string());
        Ok(Rgb(byte(0)?, byte(2)?, byte(4)?))
    }
}

impl Serialize for Rgb {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rgb {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// How uncertain words are marked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkupStyle {
    #[default]
    None,
    Italic,
    Emoticon,
    BoldYellow,
    Squiggly,
}

impl MarkupStyle {
    pub const ALL: [MarkupStyle; 5] =
        [MarkupStyle::None, MarkupStyle::Italic, MarkupStyle::Emoticon, MarkupStyle::BoldYellow, MarkupStyle::Squiggly];
}

/// How the karaoke cursor word is emphasized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HighlightStyle {
    #[default]
    FontColor,
    Bold,
    Background,
    Underline,
    Italic,
    FontSize,
}

impl HighlightStyle {
    pub const ALL: [HighlightStyle; 6] = [
        HighlightStyle::FontColor,
        HighlightStyle::Bold,
        HighlightStyle::Background,
        HighlightStyle::Underline,
        HighlightStyle::Italic,
        HighlightStyle::FontSize,
    ];
}

macro_rules! str_enum {
    ($ty:ty { $($variant:path => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $($variant => $name),+ }
            }
        }

        impl FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($name => Ok($variant),)+
                    other => Err(format!("unknown {} {other:?}", stringify!($ty))),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}
pub(crate) use str_enum;

str_enum!(MarkupStyle {
    MarkupStyle::None => "none",
    MarkupStyle::Italic => "italic",
    MarkupStyle::Emoticon => "emoticon",
    MarkupStyle::BoldYellow => "bold_yellow",
    MarkupStyle::Squiggly => "squiggly",
});

str_enum!(HighlightStyle {
    HighlightStyle::FontColor => "font_color",
    HighlightStyle::Bold => "bold",
    HighlightStyle::Background => "background",
    HighlightStyle::Underline => "underline",
    HighlightStyle::Italic => "italic",
    HighlightStyle::FontSize => "font_size",
});

/// Style flags a run can carry. Serialized with the frame vocabulary strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StyleFlag {
    Bold,
    Italic,
    Underline,
    Squiggly,
    Highlighted,
}

/// U+1F620 ANGRY FACE, appended after uncertain words in emoticon mode.
pub const UNCERTAIN_GLYPH: char = '\u{1F620}';

/// The render atom: one word plus its visual attributes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StyledRun {
    pub text: String,
    /// Sorted, no duplicates.
    pub flags: Vec<StyleFlag>,
    pub color: Option<Rgb>,
    #[serde(rename = "bg")]
    pub background: Option<Rgb>,
    #[serde(rename = "size")]
    pub size_scale: f64,
    #[serde(rename = "suffix")]
    pub suffix_glyph: Option<char>,
    /// Grapheme index of the RSVP fixation letter; only set on RSVP frames.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orp: Option<usize>,
}

impl StyledRun {
    pub fn plain(text: impl Into<String>) -> Self {
        StyledRun {
            text: text.into(),
            flags: Vec::new(),
            color: None,
            background: None,
            size_scale: 1.0,
            suffix_glyph: None,
            orp: None,
        }
    }

    pub fn has(&self, flag: StyleFlag) -> bool {
        self.flags.binary_search(&flag).is_ok()
    }

    pub fn set(&mut self, flag: StyleFlag) {
        if let Err(pos) = self.flags.binary_search(&flag) {
            self.flags.insert(pos, flag);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnotationConfig {
    pub confidence_threshold: f64,
    pub markup_style: MarkupStyle,
    pub highlight_style: HighlightStyle,
    pub highlight_color: Rgb,
    pub background_color: Rgb,
    pub personal_color: Rgb,
    pub highlight_size_scale: f64,
}

impl Default for AnnotationConfig {
    fn default() -> Self {
        AnnotationConfig {
            confidence_threshold: 0.995,
            markup_style: MarkupStyle::None,
            highlight_style: HighlightStyle::FontColor,
            highlight_color: Rgb::RED,
            background_color: Rgb::YELLOW,
            personal_color: Rgb::GREEN,
            highlight_size_scale: 1.4,
        }
    }
}

impl AnnotationConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.confidence_threshold) {
            return Err(format!("confidence threshold {} outside [0,1]", self.confidence_threshold));
        }
        if !(0.5..=3.0).contains(&self.highlight_size_scale) {
            return Err(format!("highlight size scale {} outside [0.5,3]", self.highlight_size_scale));
        }
        Ok(())
    }
}

/// Marks the token uncertain when its confidence is strictly below the threshold.
pub fn flag_uncertainty(mut token: WordToken, cfg: &AnnotationConfig) -> WordToken {
    token.uncertain = token.conf < cfg.confidence_threshold;
    token
}

pub fn style_markup(token: &WordToken, cfg: &AnnotationConfig) -> StyledRun {
    let mut run = StyledRun::plain(token.text.clone());
    if !token.uncertain {
        return run;
    }
    match cfg.markup_style {
        MarkupStyle::None => {}
        MarkupStyle::Italic => run.set(StyleFlag::Italic),
        MarkupStyle::Emoticon => run.suffix_glyph = Some(UNCERTAIN_GLYPH),
        MarkupStyle::BoldYellow => {
            run.set(StyleFlag::Bold);
            run.color = Some(Rgb::YELLOW);
        }
        MarkupStyle::Squiggly => run.set(StyleFlag::Squiggly),
    }
    run
}

/// Applies the configured highlight to the cursor word; other runs pass through untouched.
pub fn style_highlight(mut run: StyledRun, cfg: &AnnotationConfig, is_cursor: bool) -> StyledRun {
    if !is_cursor {
        return run;
    }
    match cfg.highlight_style {
        HighlightStyle::FontColor => run.color = Some(cfg.highlight_color),
        HighlightStyle::Bold => run.set(StyleFlag::Bold),
        HighlightStyle::Background => run.background = Some(cfg.background_color),
        HighlightStyle::Underline => run.set(StyleFlag::Underline),
        HighlightStyle::Italic => run.set(StyleFlag::Italic),
        HighlightStyle::FontSize => run.size_scale = cfg.highlight_size_scale,
    }
    run.set(StyleFlag::Highlighted);
    run
}
