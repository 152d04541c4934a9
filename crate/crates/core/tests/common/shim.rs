//! A stand-in `xelatex` that replays a canned XDV file.

use std::os::unix::fs::PermissionsExt;
use std::path::Path;
use std::process::Command;

use super::fixtures;

/// Directory holding the shim plus the file it counts invocations in.
pub struct Shim {
    pub dir: tempfile::TempDir,
}

const SCRIPT: &str = r#"#!/bin/sh
if [ "$1" = "-version" ]; then
    echo "XeTeX 3.141592653-2.6-0.999995 (texglyph shim)"
    exit 0
fi
for last; do :; done
echo run >> "$SHIM_DIR/count"
if grep -q badmacro "$last"; then
    printf '! Undefined control sequence.\nl.4 \\badmacro\n\n' > texglyph.log
    exit 1
fi
cp "$SHIM_DIR/canned.xdv" texglyph.xdv
echo "Output written on texglyph.xdv (1 page)." > texglyph.log
"#;

impl Shim {
    pub fn new() -> Shim {
        let dir = tempfile::tempdir().unwrap();
        let exe = dir.path().join("xelatex");
        std::fs::write(&exe, SCRIPT.replace("$SHIM_DIR", &dir.path().display().to_string())).unwrap();
        std::fs::set_permissions(&exe, std::fs::Permissions::from_mode(0o755)).unwrap();
        std::fs::copy(fixtures().join("xdv_color.xdv"), dir.path().join("canned.xdv")).unwrap();
        Shim { dir }
    }

    pub fn canned(&self) -> Vec<u8> {
        std::fs::read(self.dir.path().join("canned.xdv")).unwrap()
    }

    /// How many times the engine has compiled a document.
    pub fn runs(&self) -> usize {
        std::fs::read_to_string(self.dir.path().join("count"))
            .map(|s| s.lines().count())
            .unwrap_or(0)
    }

    /// PATH with only the shim and the system tools it needs.
    pub fn path(&self) -> String {
        format!("{}:/usr/bin:/bin", self.dir.path().display())
    }

    /// The binary under test with an isolated environment.
    pub fn command(&self, bin: &Path, cache: &Path) -> Command {
        let mut c = Command::new(bin);
        c.env_clear()
            .env("PATH", self.path())
            .env("HOME", self.dir.path())
            .env("TEXGLYPH_CACHE", cache)
            .env("TEXGLYPH_FONTDIRS", fixtures().join("fonts"));
        c
    }
}
