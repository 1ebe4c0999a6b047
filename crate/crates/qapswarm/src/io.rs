//! Reading and writing QAPLIB instance and solution files.

use std::fs;
use std::path::{Path, PathBuf};

use qapswarm_core::{parse_instance, parse_reference_solution, ParseError, QapInstance, ReferenceSolution};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
}

impl LoadError {
    pub fn path(&self) -> &Path {
        match self {
            LoadError::Io { path, .. } | LoadError::Parse { path, .. } => path,
        }
    }
}

fn read(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.to_owned(), source })
}

/// Reads an instance file; the instance is named after the file stem.
pub fn read_instance(path: impl AsRef<Path>) -> Result<QapInstance, LoadError> {
    let path = path.as_ref();
    let instance = parse_instance(&read(path)?).map_err(|source| LoadError::Parse { path: path.to_owned(), source })?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(instance.with_name(name))
}

pub fn read_reference_solution(path: impl AsRef<Path>) -> Result<ReferenceSolution, LoadError> {
    let path = path.as_ref();
    parse_reference_solution(&read(path)?).map_err(|source| LoadError::Parse { path: path.to_owned(), source })
}

pub fn write_instance(path: impl AsRef<Path>, instance: &QapInstance) -> std::io::Result<()> {
    fs::write(path, instance.to_qaplib_string())
}

pub fn write_solution(path: impl AsRef<Path>, solution: &ReferenceSolution) -> std::io::Result<()> {
    fs::write(path, solution.to_qaplib_string())
}

/// The `.sln` file next to an instance file, if there is one.
pub fn sibling_solution(instance_path: impl AsRef<Path>) -> Option<PathBuf> {
    let sln = instance_path.as_ref().with_extension("sln");
    sln.is_file().then_some(sln)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_instance_after_stem() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tiny.dat");
        fs::write(&path, "2\n\n0 1\n1 0\n\n0 3\n3 0\n").unwrap();
        let inst = read_instance(&path).unwrap();
        assert_eq!(inst.name(), "tiny");
        assert_eq!(inst.n(), 2);
        assert!(sibling_solution(&path).is_none());

        fs::write(dir.path().join("tiny.sln"), "2 6\n1 2\n").unwrap();
        let sln = read_reference_solution(sibling_solution(&path).unwrap()).unwrap();
        assert_eq!(sln.cost, 6.0);
    }

    #[test]
    fn errors_name_the_file() {
        let err = read_instance("/nonexistent/missing.dat").unwrap_err();
        assert!(matches!(err, LoadError::Io { .. }));
        assert!(err.to_string().contains("missing.dat"));

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.dat");
        fs::write(&path, "2 0 1 x 0 0 3 3 0").unwrap();
        let err = read_instance(&path).unwrap_err();
        assert!(err.to_string().contains("bad.dat"));
        assert!(err.to_string().contains("token 4"));
    }

    #[test]
    fn instance_file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.dat");
        let inst = parse_instance("3  0 2 1  2 0 3  1 3 0   0 5 1  5 0 2  1 2 0").unwrap();
        write_instance(&path, &inst).unwrap();
        let back = read_instance(&path).unwrap();
        assert_eq!(back.flow(), inst.flow());
        assert_eq!(back.distance(), inst.distance());
    }
}
