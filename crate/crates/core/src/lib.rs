//! Render LaTeX fragments to device-independent glyph placements.
//!
//! The pipeline has three stages:
//!
//! 1. [`authoring`] wraps a fragment in a complete standalone document.
//! 2. [`typesetting`] runs an external TeX engine and collects the DVI/XDV output.
//! 3. [`dvi`] decodes the bytecode, [`layout`] executes it on the DVI machine,
//!    and [`render`] serializes the resulting page as JSON or SVG.
//!
//! [`fonts`] supplies metrics and outlines to the last stage, and [`pipeline`]
//! composes everything the way the `texglyph` binary does.

pub mod authoring;
pub mod cli;
pub mod diagnostic;
pub mod dvi;
pub mod fonts;
pub mod layout;
pub mod pipeline;
pub mod render;
pub mod typesetting;

pub use authoring::{author, validate_fragment, Document, Fragment, PreambleSpec};
pub use diagnostic::{Diagnostic, DiagnosticKind, Severity};
pub use dvi::{disassemble, mnemonics, parse, serialize, DviFlavor, DviProgram};
pub use layout::{compute_anchor, interpret, units_to_points, Justify, TypesetPage};
pub use pipeline::{OutputFormat, PageSettings, Pipeline, PipelineError};
pub use render::{emit_json, emit_svg, RenderOptions};
pub use typesetting::{detect_engines, typeset, Cache, EngineSpec, TypesetError, TypesetResult};
