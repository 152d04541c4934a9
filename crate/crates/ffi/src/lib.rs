//! C interface to texglyph's parser, interpreter and renderers.
//!
//! Handles are opaque pointers owned by the caller and released with the
//! matching `*_free` function. Every fallible function returns a
//! [`TgStatus`]; on failure [`tg_last_error_message`] describes the error
//! for the calling thread. Strings and byte buffers returned through out
//! parameters belong to the caller and are released with
//! [`tg_string_free`] / [`tg_bytes_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_double, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use texglyph::fonts::{FontServices, SearchConfig};
use texglyph::layout::{compute_anchor, interpret, Justify, TypesetPage};
use texglyph::render::{emit_json, emit_svg, RenderOptions, SvgGlyphMode, Target};
use texglyph::{dvi, DviProgram};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TgStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    SerializeError = 4,
    LayoutError = 5,
    RenderError = 6,
    OutOfRange = 7,
    Panic = 8,
}

/// A parsed DVI or XDV file.
pub struct TgProgram {
    inner: DviProgram,
}

/// One interpreted page.
pub struct TgPage {
    inner: TypesetPage,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: TgStatus, msg: impl Into<String>) -> TgStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning panics into [`TgStatus::Panic`].
fn guard(f: impl FnOnce() -> TgStatus) -> TgStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(TgStatus::Panic, "internal panic"),
    }
}

fn give_string(s: String, out: *mut *mut c_char) -> TgStatus {
    match CString::new(s) {
        Ok(c) => {
            // SAFETY: callers check `out` for null before calling.
            unsafe { *out = c.into_raw() };
            TgStatus::Ok
        }
        Err(_) => fail(TgStatus::RenderError, "output contains a NUL byte"),
    }
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next texglyph call on the same thread.
#[no_mangle]
pub extern "C" fn tg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses `len` bytes at `data`.
///
/// # Safety
/// `data` must point to `len` readable bytes and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn tg_program_parse(data: *const u8, len: usize, out: *mut *mut TgProgram) -> TgStatus {
    guard(|| {
        if data.is_null() || out.is_null() {
            return fail(TgStatus::NullArgument, "null argument");
        }
        let bytes = std::slice::from_raw_parts(data, len);
        match dvi::parse(bytes) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(TgProgram { inner: p }));
                TgStatus::Ok
            }
            Err(e) => fail(TgStatus::ParseError, e.to_string()),
        }
    })
}

/// Releases a program. Null is ignored.
///
/// # Safety
/// `program` must come from [`tg_program_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tg_program_free(program: *mut TgProgram) {
    if !program.is_null() {
        drop(Box::from_raw(program));
    }
}

/// Number of pages, or 0 for null.
///
/// # Safety
/// `program` must be null or a live program handle.
#[no_mangle]
pub unsafe extern "C" fn tg_program_page_count(program: *const TgProgram) -> usize {
    program.as_ref().map_or(0, |p| p.inner.page_count())
}

/// Whether the program is XDV (1) or classic DVI (0); -1 for null.
///
/// # Safety
/// `program` must be null or a live program handle.
#[no_mangle]
pub unsafe extern "C" fn tg_program_is_xdv(program: *const TgProgram) -> c_int {
    program
        .as_ref()
        .map_or(-1, |p| (p.inner.flavor == texglyph::DviFlavor::Xdv) as c_int)
}

/// Writes the disassembly listing to `*out`.
///
/// # Safety
/// `program` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tg_program_disassemble(program: *const TgProgram, out: *mut *mut c_char) -> TgStatus {
    guard(|| {
        let (Some(p), false) = (program.as_ref(), out.is_null()) else {
            return fail(TgStatus::NullArgument, "null argument");
        };
        give_string(dvi::disassemble(&p.inner), out)
    })
}

/// Re-encodes the program; `*out` receives `*out_len` bytes.
///
/// # Safety
/// `program` must be a live handle; `out` and `out_len` writable.
#[no_mangle]
pub unsafe extern "C" fn tg_program_serialize(
    program: *const TgProgram,
    out: *mut *mut u8,
    out_len: *mut usize,
) -> TgStatus {
    guard(|| {
        let Some(p) = program.as_ref() else {
            return fail(TgStatus::NullArgument, "null program");
        };
        if out.is_null() || out_len.is_null() {
            return fail(TgStatus::NullArgument, "null output");
        }
        match dvi::serialize(&p.inner) {
            Ok(bytes) => {
                let boxed = bytes.into_boxed_slice();
                *out_len = boxed.len();
                *out = Box::into_raw(boxed).cast();
                TgStatus::Ok
            }
            Err(e) => fail(TgStatus::SerializeError, e.to_string()),
        }
    })
}

/// Interprets page `index`. `font_dirs` is an optional PATH-style list of
/// directories searched for font files; null uses `TEXGLYPH_FONTDIRS`.
///
/// # Safety
/// `program` must be a live handle, `font_dirs` null or a C string, `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn tg_page_interpret(
    program: *const TgProgram,
    index: usize,
    font_dirs: *const c_char,
    out: *mut *mut TgPage,
) -> TgStatus {
    guard(|| {
        let (Some(p), false) = (program.as_ref(), out.is_null()) else {
            return fail(TgStatus::NullArgument, "null argument");
        };
        if index >= p.inner.page_count() {
            return fail(
                TgStatus::OutOfRange,
                format!("page {index} out of range ({} pages)", p.inner.page_count()),
            );
        }
        let config = if font_dirs.is_null() {
            SearchConfig::from_env()
        } else {
            let Ok(s) = CStr::from_ptr(font_dirs).to_str() else {
                return fail(TgStatus::InvalidUtf8, "font_dirs is not UTF-8");
            };
            let mut c = SearchConfig::from_env();
            c.dirs = std::env::split_paths(s).filter(|d| !d.as_os_str().is_empty()).collect::<Vec<PathBuf>>();
            c
        };
        match interpret(&p.inner, index, &FontServices::new(config)) {
            Ok(page) => {
                *out = Box::into_raw(Box::new(TgPage { inner: page }));
                TgStatus::Ok
            }
            Err(e) => fail(TgStatus::LayoutError, e.to_string()),
        }
    })
}

/// Releases a page. Null is ignored.
///
/// # Safety
/// `page` must come from [`tg_page_interpret`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tg_page_free(page: *mut TgPage) {
    if !page.is_null() {
        drop(Box::from_raw(page));
    }
}

/// Number of placed glyphs, or 0 for null.
///
/// # Safety
/// `page` must be null or a live page handle.
#[no_mangle]
pub unsafe extern "C" fn tg_page_glyph_count(page: *const TgPage) -> usize {
    page.as_ref().map_or(0, |p| p.inner.glyphs.len())
}

/// Number of rules, or 0 for null.
///
/// # Safety
/// `page` must be null or a live page handle.
#[no_mangle]
pub unsafe extern "C" fn tg_page_rule_count(page: *const TgPage) -> usize {
    page.as_ref().map_or(0, |p| p.inner.rules.len())
}

/// Writes the box as `xmin, ymin, xmax, ymax` in big points.
///
/// # Safety
/// `page` must be a live handle and `out` point to 4 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tg_page_bbox(page: *const TgPage, out: *mut c_double) -> TgStatus {
    guard(|| {
        let (Some(p), false) = (page.as_ref(), out.is_null()) else {
            return fail(TgStatus::NullArgument, "null argument");
        };
        let b = p.inner.bbox;
        for (i, v) in [b.xmin, b.ymin, b.xmax, b.ymax].into_iter().enumerate() {
            *out.add(i) = v;
        }
        TgStatus::Ok
    })
}

/// Translation moving the anchor at fractions (`hjust`, `vjust`) of the box
/// to the origin. A NaN fraction selects the baseline reference instead.
///
/// # Safety
/// `page` must be a live handle; `dx` and `dy` writable.
#[no_mangle]
pub unsafe extern "C" fn tg_page_anchor(
    page: *const TgPage,
    hjust: c_double,
    vjust: c_double,
    dx: *mut c_double,
    dy: *mut c_double,
) -> TgStatus {
    guard(|| {
        let Some(p) = page.as_ref() else {
            return fail(TgStatus::NullArgument, "null page");
        };
        if dx.is_null() || dy.is_null() {
            return fail(TgStatus::NullArgument, "null output");
        }
        let j = |f: f64| if f.is_nan() { Justify::Baseline } else { Justify::Fraction(f) };
        match compute_anchor(&p.inner, j(hjust), j(vjust)) {
            Ok((x, y)) => {
                *dx = x;
                *dy = y;
                TgStatus::Ok
            }
            Err(e) => fail(TgStatus::LayoutError, e.to_string()),
        }
    })
}

/// Writes the page JSON document to `*out`.
///
/// # Safety
/// `page` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tg_page_to_json(page: *const TgPage, out: *mut *mut c_char) -> TgStatus {
    guard(|| {
        let (Some(p), false) = (page.as_ref(), out.is_null()) else {
            return fail(TgStatus::NullArgument, "null argument");
        };
        give_string(emit_json(&p.inner), out)
    })
}

/// Writes an SVG document to `*out`. `text_mode` nonzero emits `<text>`
/// elements instead of outline paths; `scale` is output units per bp.
///
/// # Safety
/// `page` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tg_page_to_svg(
    page: *const TgPage,
    text_mode: c_int,
    scale: c_double,
    out: *mut *mut c_char,
) -> TgStatus {
    guard(|| {
        let (Some(p), false) = (page.as_ref(), out.is_null()) else {
            return fail(TgStatus::NullArgument, "null argument");
        };
        let options = RenderOptions {
            target: Target::Svg,
            svg_glyph_mode: if text_mode != 0 { SvgGlyphMode::Text } else { SvgGlyphMode::Paths },
            background: None,
            scale,
        };
        match emit_svg(&p.inner, &options) {
            Ok(s) => give_string(s, out),
            Err(e) => fail(TgStatus::RenderError, e.to_string()),
        }
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Releases a buffer returned by [`tg_program_serialize`]. Null is ignored.
///
/// # Safety
/// `data`/`len` must be exactly what the library returned.
#[no_mangle]
pub unsafe extern "C" fn tg_bytes_free(data: *mut u8, len: usize) {
    if !data.is_null() {
        drop(Box::from_raw(ptr::slice_from_raw_parts_mut(data, len)));
    }
}
