use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::Duration;

use serde::Serialize;

use super::run_with_timeout;
use crate::dvi::DviFlavor;

/// How to invoke one TeX engine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EngineSpec {
    pub name: String,
    pub executable: PathBuf,
    /// Arguments placed before the `.tex` file name. Must keep the engine
    /// non-interactive and make it write DVI or XDV.
    pub args_template: Vec<String>,
    pub output_extension: String,
    pub flavor: DviFlavor,
    /// First line of the engine's version banner; part of cache keys.
    pub version: String,
}

struct Known {
    name: &'static str,
    args: &'static [&'static str],
    flavor: DviFlavor,
}

/// Known engines in preference order: XDV producers first.
const KNOWN: [Known; 3] = [
    Known {
        name: "xelatex",
        args: &["-interaction=nonstopmode", "-halt-on-error", "-no-pdf"],
        flavor: DviFlavor::Xdv,
    },
    Known {
        name: "lualatex",
        args: &["--interaction=nonstopmode", "--halt-on-error", "--output-format=dvi"],
        flavor: DviFlavor::ClassicDvi,
    },
    Known {
        name: "latex",
        args: &["-interaction=nonstopmode", "-halt-on-error"],
        flavor: DviFlavor::ClassicDvi,
    },
];

pub fn known_engine_names() -> Vec<&'static str> {
    KNOWN.iter().map(|k| k.name).collect()
}

impl EngineSpec {
    /// Spec for a known engine at `executable`, without probing it.
    pub fn known(name: &str, executable: impl Into<PathBuf>, version: impl Into<String>) -> Option<Self> {
        let k = KNOWN.iter().find(|k| k.name == name)?;
        Some(EngineSpec {
            name: k.name.to_owned(),
            executable: executable.into(),
            args_template: k.args.iter().map(|s| s.to_string()).collect(),
            output_extension: k.flavor.extension().to_owned(),
            flavor: k.flavor,
            version: version.into(),
        })
    }
}

#[cfg(unix)]
fn is_executable(p: &Path) -> bool {
    use std::os::unix::fs::PermissionsExt;
    p.metadata()
        .map(|m| m.is_file() && m.permissions().mode() & 0o111 != 0)
        .unwrap_or(false)
}

#[cfg(not(unix))]
fn is_executable(p: &Path) -> bool {
    p.is_file()
}

fn candidates(dir: &Path, name: &str) -> Vec<PathBuf> {
    let mut v = vec![dir.join(name)];
    if cfg!(windows) {
        v.push(dir.join(format!("{name}.exe")));
    }
    v
}

/// Runs `<exe> -version` and returns the first non-empty output line.
fn probe_version(exe: &Path) -> Option<String> {
    let mut cmd = Command::new(exe);
    cmd.arg("-version").stdin(Stdio::null());
    let out = run_with_timeout(cmd, Duration::from_secs(10)).ok()?;
    if !out.status.success() {
        return None;
    }
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .map(str::to_owned)
}

/// Finds every known engine on `search_path`, in preference order. Engines
/// whose version probe fails are left out.
pub fn detect_engines(search_path: &[PathBuf]) -> Vec<EngineSpec> {
    let mut found = Vec::new();
    for k in &KNOWN {
        let exe = search_path
            .iter()
            .flat_map(|d| candidates(d, k.name))
            .find(|p| is_executable(p));
        let Some(exe) = exe else { continue };
        match probe_version(&exe) {
            Some(version) => {
                log::debug!("found {} at {} ({version})", k.name, exe.display());
                found.extend(EngineSpec::known(k.name, exe, version));
            }
            None => log::debug!("{} at {} did not answer -version", k.name, exe.display()),
        }
    }
    found
}

/// Directories listed in `PATH`.
pub fn path_dirs() -> Vec<PathBuf> {
    std::env::var_os("PATH")
        .map(|p| std::env::split_paths(&p).collect())
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_search_path() {
        assert!(detect_engines(&[]).is_empty());
    }

    #[test]
    fn known_specs() {
        let x = EngineSpec::known("xelatex", "/x", "v").unwrap();
        assert_eq!(x.flavor, DviFlavor::Xdv);
        assert_eq!(x.output_extension, "xdv");
        assert!(x.args_template.iter().any(|a| a == "-no-pdf"));
        assert!(x.args_template.iter().any(|a| a.contains("nonstopmode")));
        let l = EngineSpec::known("latex", "/l", "v").unwrap();
        assert_eq!(l.flavor, DviFlavor::ClassicDvi);
        assert!(EngineSpec::known("troff", "/t", "v").is_none());
        assert_eq!(known_engine_names(), ["xelatex", "lualatex", "latex"]);
    }

    #[cfg(unix)]
    #[test]
    fn detects_engine_scripts() {
        use std::os::unix::fs::PermissionsExt;
        let dir = tempfile::tempdir().unwrap();
        let script = dir.path().join("latex");
        std::fs::write(&script, "#!/bin/sh\necho 'pdfTeX 3.141592653 (Fake)'\n").unwrap();
        std::fs::set_permissions(&script, std::fs::Permissions::from_mode(0o755)).unwrap();
        let broken = dir.path().join("xelatex");
        std::fs::write(&broken, "#!/bin/sh\nexit 1\n").unwrap();
        std::fs::set_permissions(&broken, std::fs::Permissions::from_mode(0o755)).unwrap();
        let found = detect_engines(&[dir.path().to_path_buf()]);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].name, "latex");
        assert_eq!(found[0].version, "pdfTeX 3.141592653 (Fake)");
    }
}
