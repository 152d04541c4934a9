use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::ptr;

use texglyph_ffi::*;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

fn last_error() -> String {
    let p = tg_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn parse(bytes: &[u8]) -> *mut TgProgram {
    let mut prog = ptr::null_mut();
    let st = unsafe { tg_program_parse(bytes.as_ptr(), bytes.len(), &mut prog) };
    assert_eq!(st, TgStatus::Ok);
    prog
}

#[test]
fn parse_serialize_round_trip() {
    let bytes = std::fs::read(fixtures().join("classic_hello.dvi")).unwrap();
    let prog = parse(&bytes);
    unsafe {
        assert_eq!(tg_program_page_count(prog), 2);
        assert_eq!(tg_program_is_xdv(prog), 0);
        let (mut out, mut len) = (ptr::null_mut(), 0usize);
        assert_eq!(tg_program_serialize(prog, &mut out, &mut len), TgStatus::Ok);
        assert_eq!(std::slice::from_raw_parts(out, len), &bytes[..]);
        tg_bytes_free(out, len);

        let mut text = ptr::null_mut();
        assert_eq!(tg_program_disassemble(prog, &mut text), TgStatus::Ok);
        let listing = CStr::from_ptr(text).to_str().unwrap().to_owned();
        tg_string_free(text);
        assert!(listing.starts_with("0: pre id=2"));
        tg_program_free(prog);
    }
}

#[test]
fn errors_are_reported_per_thread() {
    let mut prog = ptr::null_mut();
    let st = unsafe { tg_program_parse(b"\xf7\x02".as_ptr(), 2, &mut prog) };
    assert_eq!(st, TgStatus::ParseError);
    assert!(prog.is_null());
    assert!(last_error().contains("truncated"), "{}", last_error());
    std::thread::spawn(|| assert!(tg_last_error_message().is_null()))
        .join()
        .unwrap();

    let st = unsafe { tg_program_parse(ptr::null(), 0, &mut prog) };
    assert_eq!(st, TgStatus::NullArgument);
    assert_eq!(unsafe { tg_program_page_count(ptr::null()) }, 0);
    unsafe {
        tg_program_free(ptr::null_mut());
        tg_page_free(ptr::null_mut());
        tg_string_free(ptr::null_mut());
    }
}

#[test]
fn interpret_and_render_xdv() {
    let bytes = std::fs::read(fixtures().join("xdv_color.xdv")).unwrap();
    let prog = parse(&bytes);
    let dirs = CString::new(fixtures().join("fonts").to_str().unwrap()).unwrap();
    unsafe {
        assert_eq!(tg_program_is_xdv(prog), 1);
        let mut page = ptr::null_mut();
        assert_eq!(tg_page_interpret(prog, 5, dirs.as_ptr(), &mut page), TgStatus::OutOfRange);
        assert_eq!(tg_page_interpret(prog, 0, dirs.as_ptr(), &mut page), TgStatus::Ok);
        assert!(tg_page_glyph_count(page) > 0);

        let mut bbox = [0.0f64; 4];
        assert_eq!(tg_page_bbox(page, bbox.as_mut_ptr()), TgStatus::Ok);
        assert!(bbox[2] > bbox[0] && bbox[3] > bbox[1]);
        let (mut dx, mut dy) = (0.0, 0.0);
        assert_eq!(tg_page_anchor(page, 0.5, 0.5, &mut dx, &mut dy), TgStatus::Ok);
        assert!((dx + (bbox[0] + bbox[2]) / 2.0).abs() < 1e-9);
        assert!((dy + (bbox[1] + bbox[3]) / 2.0).abs() < 1e-9);

        let mut json = ptr::null_mut();
        assert_eq!(tg_page_to_json(page, &mut json), TgStatus::Ok);
        assert!(CStr::from_ptr(json).to_str().unwrap().starts_with("{\"version\":1"));
        tg_string_free(json);

        let mut svg = ptr::null_mut();
        assert_eq!(tg_page_to_svg(page, 0, 1.0, &mut svg), TgStatus::Ok);
        assert!(CStr::from_ptr(svg).to_str().unwrap().contains("<path"));
        tg_string_free(svg);
        assert_eq!(tg_page_to_svg(page, 0, -1.0, &mut svg), TgStatus::RenderError);

        tg_page_free(page);
        tg_program_free(prog);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(tg_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

/// The generated header must compile as C when a compiler is available.
#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/texglyph.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in ["tg_program_parse", "tg_page_to_svg", "tg_last_error_message", "TG_STATUS_OK"] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let Some(cc) = ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| std::process::Command::new(c).arg("--version").output().is_ok())
    else {
        eprintln!("no C compiler; skipping compile check");
        return;
    };
    let dir = std::env::temp_dir().join(format!("texglyph-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("use.c");
    std::fs::write(
        &src,
        "#include \"texglyph.h\"\nint main(void) { TgProgram *p = 0; \
         TgStatus s = tg_program_parse((const uint8_t *)\"\", 0, &p); tg_program_free(p); return s == TG_STATUS_OK; }\n",
    )
    .unwrap();
    let status = std::process::Command::new(cc)
        .args(["-fsyntax-only", "-Wall", "-Werror", "-I"])
        .arg(header.parent().unwrap())
        .arg(&src)
        .status()
        .unwrap();
    let _ = std::fs::remove_dir_all(&dir);
    assert!(status.success());
}
