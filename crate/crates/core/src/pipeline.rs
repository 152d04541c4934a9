//! The full fragment-to-artifact chain, composed from the library stages.

use std::path::PathBuf;

use thiserror::Error;

use crate::authoring::{author, validate_fragment, AuthoringError, Document, Fragment, Package, PreambleSpec};
use crate::diagnostic::Diagnostic;
use crate::dvi::{self, disassemble, DviError, DviProgram};
use crate::fonts::{FontServices, SearchConfig};
use crate::layout::{interpret, LayoutError, TypesetPage};
use crate::render::{emit_json, emit_svg, RenderError, RenderOptions, SvgGlyphMode, Target};
use crate::typesetting::{
    path_dirs, select_engine, typeset, Cache, EngineSpec, TypesetError, TypesetOptions, TypesetResult,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Authoring(#[from] AuthoringError),
    #[error(transparent)]
    Typeset(#[from] TypesetError),
    #[error("engine output did not parse: {0}")]
    Dvi(#[from] DviError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Render(#[from] RenderError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Svg(SvgGlyphMode),
    DviDump,
}

/// User-facing layout settings; turned into a preamble once the engine,
/// and therefore the output flavor, is known.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PageSettings {
    pub width_pt: Option<f64>,
    pub font_size_pt: Option<f64>,
    pub font_family: Option<String>,
    pub packages: Vec<Package>,
}

impl PageSettings {
    pub fn preamble(&self, flavor: dvi::DviFlavor) -> Result<PreambleSpec, AuthoringError> {
        let mut spec = PreambleSpec::for_flavor(flavor);
        spec.width_pt = self.width_pt;
        spec.font_size_pt = self.font_size_pt;
        spec.font_family = self.font_family.clone();
        for p in &self.packages {
            // Asking for a package the template already loads is harmless.
            if !spec.packages().iter().any(|q| q.name == p.name && q.options == p.options) {
                spec.add_package(p.clone())?;
            }
        }
        Ok(spec)
    }
}

/// Output of the authoring and typesetting stages.
#[derive(Debug, Clone)]
pub struct Compiled {
    pub document: Document,
    pub typeset: TypesetResult,
    pub program: DviProgram,
    /// Fragment warnings followed by engine log diagnostics.
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone)]
pub struct Rendered {
    pub artifact: String,
    /// Present for JSON and SVG output.
    pub page: Option<TypesetPage>,
    pub cache_hit: bool,
}

/// Everything the chain needs from the environment.
#[derive(Debug)]
pub struct Pipeline {
    /// `"auto"` or an engine name.
    pub engine: String,
    pub search_path: Vec<PathBuf>,
    pub typeset: TypesetOptions,
    pub cache: Option<Cache>,
    pub fonts: FontServices,
}

impl Pipeline {
    /// Engines from `PATH`, cache from `TEXGLYPH_CACHE`, fonts from
    /// `TEXGLYPH_FONTDIRS`.
    pub fn from_env() -> Self {
        Pipeline {
            engine: "auto".to_owned(),
            search_path: path_dirs(),
            typeset: TypesetOptions::default(),
            cache: Some(Cache::from_env()),
            fonts: FontServices::new(SearchConfig::from_env()),
        }
    }

    pub fn select_engine(&self) -> Result<EngineSpec, PipelineError> {
        Ok(select_engine(&self.engine, &self.search_path)?)
    }

    /// author → typeset → parse.
    pub fn compile(&self, fragment: &Fragment, settings: &PageSettings) -> Result<Compiled, PipelineError> {
        let engine = self.select_engine()?;
        let spec = settings.preamble(engine.flavor)?;
        let document = author(fragment, &spec, engine.flavor)?;
        let result = typeset(&document, &engine, &self.typeset, self.cache.as_ref())?;
        let program = dvi::parse(&result.dvi_bytes)?;
        let mut diagnostics = validate_fragment(fragment);
        diagnostics.extend(result.diagnostics.iter().cloned());
        Ok(Compiled {
            document,
            typeset: result,
            program,
            diagnostics,
        })
    }

    /// The whole chain for the first page.
    pub fn render(
        &self,
        fragment: &Fragment,
        settings: &PageSettings,
        format: OutputFormat,
    ) -> Result<Rendered, PipelineError> {
        let compiled = self.compile(fragment, settings)?;
        let (artifact, page) = emit(&compiled.program, 0, &self.fonts, format, &compiled.diagnostics)?;
        Ok(Rendered {
            artifact,
            page,
            cache_hit: compiled.typeset.cache_hit,
        })
    }
}

/// interpret → emit for one page of a parsed program. `extra` diagnostics
/// are placed before the page's own.
pub fn emit(
    program: &DviProgram,
    page_index: usize,
    fonts: &FontServices,
    format: OutputFormat,
    extra: &[Diagnostic],
) -> Result<(String, Option<TypesetPage>), PipelineError> {
    let mut options = RenderOptions::default();
    match format {
        OutputFormat::DviDump => return Ok((disassemble(program), None)),
        OutputFormat::Json => {}
        OutputFormat::Svg(mode) => {
            options.target = Target::Svg;
            options.svg_glyph_mode = mode;
        }
    }
    let mut page = interpret(program, page_index, fonts)?;
    if !extra.is_empty() {
        let own = std::mem::take(&mut page.diagnostics);
        page.diagnostics = extra.iter().cloned().chain(own).collect();
    }
    let artifact = match options.target {
        Target::Json => emit_json(&page),
        Target::Svg => emit_svg(&page, &options)?,
    };
    Ok((artifact, Some(page)))
}
