//! All-or-nothing output: artifacts are rendered in memory, written to
//! temporary files in the target directory, then renamed into place.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use tempfile::NamedTempFile;

#[derive(Debug, Default, Clone)]
pub struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    /// Renders a file through a writer callback.
    pub fn render(&mut self, name: &str, f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        f(&mut buf).with_context(|| format!("rendering {name}"))?;
        self.add(name, buf);
        Ok(())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }

    /// Writes every artifact into `dir`. If any write or rename fails, files
    /// already moved into place by this call are removed again.
    pub fn commit(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
        let mut staged = Vec::with_capacity(self.files.len());
        for (name, bytes) in &self.files {
            let mut tmp = NamedTempFile::new_in(dir).with_context(|| format!("cannot stage {name}"))?;
            tmp.write_all(bytes).with_context(|| format!("cannot write {name}"))?;
            tmp.flush()?;
            staged.push((tmp, dir.join(name)));
        }
        let mut done: Vec<PathBuf> = Vec::with_capacity(staged.len());
        for (tmp, target) in staged {
            if let Err(e) = tmp.persist(&target) {
                for p in &done {
                    let _ = std::fs::remove_file(p);
                }
                return Err(e.error).with_context(|| format!("cannot move output into {}", target.display()));
            }
            done.push(target);
        }
        Ok(done)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commit_writes_every_file() {
        let dir = tempfile::tempdir().unwrap();
        let mut a = Artifacts::new();
        a.add("x.csv", b"a,b\n".to_vec());
        a.add("y.svg", b"<svg/>".to_vec());
        let paths = a.commit(dir.path()).unwrap();
        assert_eq!(paths.len(), 2);
        assert_eq!(std::fs::read(dir.path().join("x.csv")).unwrap(), b"a,b\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
    }

    #[test]
    fn failed_commit_leaves_nothing_behind() {
        let dir = tempfile::tempdir().unwrap();
        // a directory where the second file should go blocks the rename
        std::fs::create_dir(dir.path().join("blocked.csv")).unwrap();
        std::fs::write(dir.path().join("blocked.csv").join("keep"), b"").unwrap();
        let mut a = Artifacts::new();
        a.add("first.csv", b"1\n".to_vec());
        a.add("blocked.csv", b"2\n".to_vec());
        assert!(a.commit(dir.path()).is_err());
        assert!(!dir.path().join("first.csv").exists());
        let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(leftovers, vec![std::ffi::OsString::from("blocked.csv")]);
    }
}
