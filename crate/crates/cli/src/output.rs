use std::fs;
use std::path::{Path, PathBuf};

use crate::CliError;

/// Files produced by a command, written only by [`Staged::commit`].
#[derive(Debug, Default)]
pub(crate) struct Staged {
    files: Vec<(PathBuf, Vec<u8>)>,
    dirs: Vec<PathBuf>,
}

impl Staged {
    pub fn file(&mut self, path: PathBuf, bytes: Vec<u8>) {
        self.files.push((path, bytes));
    }

    pub fn dir(&mut self, path: PathBuf) {
        self.dirs.push(path);
    }

    /// Writes every file to a temporary sibling first and renames them into
    /// place only once all writes succeeded.
    pub fn commit(self) -> Result<(), CliError> {
        for dir in &self.dirs {
            fs::create_dir_all(dir)
                .map_err(|e| CliError::Data(format!("cannot create directory {}: {e}", dir.display())))?;
        }
        let mut written: Vec<(PathBuf, &Path)> = Vec::new();
        let cleanup = |written: &[(PathBuf, &Path)]| {
            for (tmp, _) in written {
                let _ = fs::remove_file(tmp);
            }
        };
        for (path, bytes) in &self.files {
            let tmp = temp_path(path);
            if let Err(e) = fs::write(&tmp, bytes) {
                let _ = fs::remove_file(&tmp);
                cleanup(&written);
                return Err(CliError::Data(format!("cannot write {}: {e}", path.display())));
            }
            written.push((tmp, path));
        }
        for (i, (tmp, path)) in written.iter().enumerate() {
            if let Err(e) = fs::rename(tmp, path) {
                cleanup(&written[i..]);
                return Err(CliError::Data(format!("cannot write {}: {e}", path.display())));
            }
        }
        Ok(())
    }
}

fn temp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(format!(".{}.tmp", std::process::id()));
    path.with_file_name(name)
}

/// Checks that `path` names an existing regular file.
pub(crate) fn input_file(flag: &str, path: &Path) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{flag} {}: no such file", path.display())))
    }
}

/// Checks that an output file can be created: its directory exists and the
/// path is not a directory.
pub(crate) fn output_file(flag: &str, path: &Path) -> Result<(), CliError> {
    if path.is_dir() {
        return Err(CliError::Usage(format!("{flag} {}: is a directory", path.display())));
    }
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    if parent.is_dir() {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "{flag} {}: directory {} does not exist",
            path.display(),
            parent.display()
        )))
    }
}

/// Checks that `path` is a directory or could be created as one.
pub(crate) fn output_dir(flag: &str, path: &Path) -> Result<(), CliError> {
    if path.is_dir() {
        return Ok(());
    }
    if path.exists() {
        return Err(CliError::Usage(format!("{flag} {}: not a directory", path.display())));
    }
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() && !p.is_dir() => Err(CliError::Usage(format!(
            "{flag} {}: directory {} does not exist",
            path.display(),
            p.display()
        ))),
        _ => Ok(()),
    }
}
