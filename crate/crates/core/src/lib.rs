//! Real-time caption composition.
//!
//! Transcript events flow through [`ingest`] (parsing and tokenization),
//! [`annotate`] (uncertainty flags and styles), [`router`] (speaker vs wearer
//! streams), [`layout`] (line breaking) and [`presenters`] (the presentation
//! state machines), and come out as positioned [`presenters::RenderFrame`]s
//! laid out by [`placement`]. [`metrics`] holds the scoring and statistics
//! used to evaluate reading sessions; [`replay`] and [`snapshot`] drive the
//! engine offline.

pub mod annotate;
pub mod ingest;
pub mod layout;
pub mod metrics;
pub mod placement;
pub mod presenters;
pub mod replay;
pub mod router;
pub mod snapshot;

pub use annotate::{AnnotationConfig, HighlightStyle, MarkupStyle, Rgb, StyleFlag, StyledRun};
pub use ingest::{SourceId, TranscriptEvent, WordToken};
pub use layout::LineBreakPolicy;
pub use placement::{CaptionBox, FaceAnchor, PlacementMode};
pub use presenters::{Control, Engine, EngineConfig, PresentationMethod, RenderFrame};
pub use router::UtteranceMode;
