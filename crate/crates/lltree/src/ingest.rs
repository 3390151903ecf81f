//! Filesystem ingestion: turn a directory tree into a universe, with
//! containment as the order relation.

use std::fs;
use std::path::Path;

use crate::error::Error;
use crate::universe::UniverseTree;
use crate::Result;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub nodes: usize,
    pub leaves: usize,
    pub height: u32,
    pub skipped_symlinks: usize,
}

impl IngestStats {
    /// One-line schema: `nodes=<N> leaves=<L> height=<H> skipped_symlinks=<K>`.
    pub fn render(&self) -> String {
        format!(
            "nodes={} leaves={} height={} skipped_symlinks={}",
            self.nodes, self.leaves, self.height, self.skipped_symlinks
        )
    }
}

/// Crawl `root` into a universe: directories and files become elements,
/// the root directory becomes the minimal element. Entries within a
/// directory are visited in name order so ingestion is deterministic;
/// symlinks are skipped and counted.
pub fn ingest_filesystem(root: &Path) -> Result<(UniverseTree, IngestStats)> {
    let ctx = |p: &Path| format!("reading {}", p.display());
    let meta = fs::symlink_metadata(root).map_err(|e| Error::io(ctx(root), e))?;
    if !meta.is_dir() {
        return Err(Error::InvalidUniverse(format!(
            "{} is not a directory",
            root.display()
        )));
    }
    let mut parents: Vec<usize> = Vec::new();
    let mut stats = IngestStats {
        nodes: 1,
        ..Default::default()
    };
    // (path, id, depth) of directories still to expand
    let mut stack: Vec<(std::path::PathBuf, usize, u32)> = vec![(root.to_path_buf(), 0, 0)];
    let mut is_parent = vec![false];
    while let Some((dir, dir_id, depth)) = stack.pop() {
        let entries = fs::read_dir(&dir).map_err(|e| Error::io(ctx(&dir), e))?;
        let mut named: Vec<(String, std::path::PathBuf)> = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|e| Error::io(ctx(&dir), e))?;
            named.push((entry.file_name().to_string_lossy().into_owned(), entry.path()));
        }
        named.sort();
        for (_, path) in named {
            let meta = fs::symlink_metadata(&path).map_err(|e| Error::io(ctx(&path), e))?;
            if meta.file_type().is_symlink() {
                stats.skipped_symlinks += 1;
                continue;
            }
            let id = parents.len() + 1;
            parents.push(dir_id);
            is_parent.push(false);
            is_parent[dir_id] = true;
            stats.nodes += 1;
            stats.height = stats.height.max(depth + 1);
            if meta.is_dir() {
                stack.push((path, id, depth + 1));
            }
        }
    }
    stats.leaves = is_parent.iter().filter(|&&p| !p).count();
    let tree = UniverseTree::from_parents(&parents)?;
    Ok((tree, stats))
}
