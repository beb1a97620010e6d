//! Obtaining QAPLIB files.
//!
//! Sources are tried in order: the files bundled with this crate, then a
//! mirror. A mirror is an `http(s)://` URL, a `file://` URL or a plain
//! directory, laid out either flat (`<name>.dat`) or QAPLIB style
//! (`data.d/<name>.dat`, `soln.d/<name>.sln`). When the mirror offers
//! `<file>.sha256` next to a file, the download is verified against it.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::instance::{parse_instance, parse_solution};

/// Environment variable naming the mirror.
pub const MIRROR_ENV: &str = "QAPLIB_MIRROR";

/// Directory with the instances that ship with the crate.
pub fn bundled_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/data/qaplib"))
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct FetchedInstance {
    pub name: String,
    pub dat: PathBuf,
    pub sln: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct Manifest {
    pub entries: Vec<FetchedInstance>,
}

#[derive(Debug, Clone)]
enum Mirror {
    Http(String),
    Dir(PathBuf),
}

impl Mirror {
    fn parse(source: &str) -> Mirror {
        let source = source.trim();
        if let Some(path) = source.strip_prefix("file://") {
            Mirror::Dir(PathBuf::from(path))
        } else if source.starts_with("http://") || source.starts_with("https://") {
            Mirror::Http(source.trim_end_matches('/').to_string())
        } else {
            Mirror::Dir(PathBuf::from(source))
        }
    }

    /// `Ok(None)` when the file is absent.
    fn get(&self, rel: &str) -> Result<Option<Vec<u8>>> {
        match self {
            Mirror::Dir(dir) => {
                let path = dir.join(rel);
                match fs::read(&path) {
                    Ok(bytes) => Ok(Some(bytes)),
                    Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
                    Err(e) => Err(Error::io(path, e)),
                }
            }
            Mirror::Http(base) => {
                let url = format!("{base}/{rel}");
                let agent: ureq::Agent = ureq::Agent::config_builder()
                    .timeout_global(Some(Duration::from_secs(60)))
                    .build()
                    .into();
                match agent.get(&url).call() {
                    Ok(mut resp) => resp
                        .body_mut()
                        .read_to_vec()
                        .map(Some)
                        .map_err(|e| Error::NetworkFailure {
                            url,
                            reason: e.to_string(),
                        }),
                    Err(ureq::Error::StatusCode(404)) => Ok(None),
                    Err(e) => Err(Error::NetworkFailure {
                        url,
                        reason: e.to_string(),
                    }),
                }
            }
        }
    }

    /// First layout that has the file, with its checksum verified.
    fn fetch(&self, candidates: &[String]) -> Result<Option<Vec<u8>>> {
        for rel in candidates {
            if let Some(bytes) = self.get(rel)? {
                if let Some(sum) = self.get(&format!("{rel}.sha256"))? {
                    verify(rel, &bytes, &sum)?;
                }
                return Ok(Some(bytes));
            }
        }
        Ok(None)
    }
}

fn verify(rel: &str, bytes: &[u8], sum_file: &[u8]) -> Result<()> {
    let expected = String::from_utf8_lossy(sum_file)
        .split_whitespace()
        .next()
        .unwrap_or_default()
        .to_ascii_lowercase();
    let actual = format!("{:x}", Sha256::digest(bytes));
    if expected != actual {
        return Err(Error::ChecksumMismatch {
            file: rel.to_string(),
            expected,
            actual,
        });
    }
    Ok(())
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn parses_as_instance(path: &Path, name: &str) -> bool {
    fs::read_to_string(path)
        .ok()
        .is_some_and(|t| parse_instance(&t, name).is_ok())
}

fn parses_as_solution(path: &Path) -> bool {
    fs::read_to_string(path)
        .ok()
        .is_some_and(|t| parse_solution(&t).is_ok())
}

/// Place `<name>.dat` (and `<name>.sln` when available) in `destination` for
/// every name, reusing files that are already there and parse. Names that
/// no source provides are reported together in [`Error::NotFound`].
pub fn fetch_instances(names: &[String], destination: &Path, mirror: Option<&str>) -> Result<Manifest> {
    let mut manifest = Manifest::default();
    if names.is_empty() {
        return Ok(manifest);
    }
    fs::create_dir_all(destination).map_err(|e| Error::io(destination, e))?;
    let env_mirror = std::env::var(MIRROR_ENV).ok();
    let mut sources = vec![Mirror::Dir(bundled_dir())];
    if let Some(m) = mirror.or(env_mirror.as_deref()) {
        sources.push(Mirror::parse(m));
    }

    let mut missing = Vec::new();
    for name in names {
        if !valid_name(name) {
            missing.push(name.clone());
            continue;
        }
        let dat = destination.join(format!("{name}.dat"));
        let sln = destination.join(format!("{name}.sln"));
        if !parses_as_instance(&dat, name) {
            let candidates = [format!("{name}.dat"), format!("data.d/{name}.dat")];
            let mut found = false;
            for src in &sources {
                if let Some(bytes) = src.fetch(&candidates)? {
                    let text = String::from_utf8_lossy(&bytes);
                    parse_instance(&text, name)?;
                    fs::write(&dat, &bytes).map_err(|e| Error::io(&dat, e))?;
                    found = true;
                    break;
                }
            }
            if !found {
                missing.push(name.clone());
                continue;
            }
        }
        if !parses_as_solution(&sln) {
            let candidates = [format!("{name}.sln"), format!("soln.d/{name}.sln")];
            for src in &sources {
                if let Some(bytes) = src.fetch(&candidates)? {
                    parse_solution(&String::from_utf8_lossy(&bytes))?;
                    fs::write(&sln, &bytes).map_err(|e| Error::io(&sln, e))?;
                    break;
                }
            }
        }
        manifest.entries.push(FetchedInstance {
            name: name.clone(),
            dat,
            sln: sln.exists().then_some(sln),
        });
    }
    if !missing.is_empty() {
        return Err(Error::NotFound(missing));
    }
    Ok(manifest)
}

/// Resolve an instance argument: an existing path, or a name found in
/// `data_dir` or the bundled directory.
pub fn resolve_instance_path(arg: &str, data_dir: Option<&Path>) -> Result<PathBuf> {
    let direct = PathBuf::from(arg);
    if direct.is_file() {
        return Ok(direct);
    }
    let file = format!("{arg}.dat");
    let bundled = bundled_dir();
    for dir in data_dir.into_iter().chain(std::iter::once(bundled.as_path())) {
        let p = dir.join(&file);
        if p.is_file() {
            return Ok(p);
        }
    }
    Err(Error::NotFound(vec![arg.to_string()]))
}

/// `.sln` path next to a `.dat` path, if present.
pub fn solution_path_for(dat: &Path) -> Option<PathBuf> {
    let sln = dat.with_extension("sln");
    sln.is_file().then_some(sln)
}
