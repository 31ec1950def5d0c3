//! Text-format ingestion: edge lists, label files, neighbor lists, and
//! fold splitting for cross-validation.
//!
//! Edge lists hold one whitespace-separated `u v` pair per line. Ids are
//! 0-based if any id equals 0, otherwise 1-based. Label files hold
//! `node_id<TAB>label` lines with labels in `1..=K`, ids in the same base as
//! the edge list. Blank lines and lines starting with `#` or `%` are skipped.

use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;

use crate::error::IngestError;
use crate::graph::Graph;
use crate::rng::Seed;

/// Node-id convention of an input file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdBase {
    Zero,
    One,
}

impl IdBase {
    pub fn offset(self) -> usize {
        match self {
            IdBase::Zero => 0,
            IdBase::One => 1,
        }
    }

    /// External id of internal node `v`.
    pub fn external(self, v: usize) -> usize {
        v + self.offset()
    }
}

#[derive(Debug, Clone)]
pub struct EdgeList {
    pub graph: Graph,
    pub id_base: IdBase,
    pub self_loops_dropped: usize,
}

impl EdgeList {
    /// Nodes with no incident edge.
    pub fn isolated_count(&self) -> usize {
        self.graph.degrees().iter().filter(|&&d| d == 0).count()
    }
}

fn read(path: &Path) -> Result<String, IngestError> {
    fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(idx, line)| {
        let trimmed = line.trim();
        (!trimmed.is_empty() && !trimmed.starts_with('#') && !trimmed.starts_with('%'))
            .then_some((idx + 1, trimmed))
    })
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> IngestError {
    IngestError::Parse {
        path: PathBuf::from(path),
        line,
        message: message.into(),
    }
}

fn parse_id(path: &Path, line: usize, tok: &str) -> Result<usize, IngestError> {
    tok.parse::<usize>()
        .map_err(|_| parse_err(path, line, format!("invalid node id {tok:?}")))
}

fn to_internal(
    path: &Path,
    line: usize,
    id: usize,
    base: IdBase,
    n: usize,
) -> Result<usize, IngestError> {
    let off = base.offset();
    if id < off || id - off >= n {
        return Err(parse_err(
            path,
            line,
            format!("node id {id} outside range {off}..{}", n + off),
        ));
    }
    Ok(id - off)
}

/// Reads an undirected edge list. `n_hint` fixes the node count; otherwise
/// it is the largest id seen (after base adjustment) plus one.
pub fn load_edge_list(path: impl AsRef<Path>, n_hint: Option<usize>) -> Result<EdgeList, IngestError> {
    let path = path.as_ref();
    let text = read(path)?;
    let mut raw = Vec::new();
    for (line, content) in data_lines(&text) {
        let mut toks = content.split_whitespace();
        let (Some(a), Some(b)) = (toks.next(), toks.next()) else {
            return Err(parse_err(path, line, "expected two node ids"));
        };
        raw.push((line, parse_id(path, line, a)?, parse_id(path, line, b)?));
    }
    let id_base = if raw.iter().any(|&(_, a, b)| a == 0 || b == 0) {
        IdBase::Zero
    } else {
        IdBase::One
    };
    let max_id = raw.iter().map(|&(_, a, b)| a.max(b)).max();
    let n = match (n_hint, max_id) {
        (Some(n), _) => n,
        (None, Some(m)) => m + 1 - id_base.offset(),
        (None, None) => 0,
    };
    let mut edges = Vec::with_capacity(raw.len());
    for &(line, a, b) in &raw {
        edges.push((
            to_internal(path, line, a, id_base, n)?,
            to_internal(path, line, b, id_base, n)?,
        ));
    }
    let (graph, self_loops_dropped) = Graph::from_edges(n, edges);
    if self_loops_dropped > 0 {
        log::warn!("{}: dropped {self_loops_dropped} self-loop(s)", path.display());
    }
    Ok(EdgeList {
        graph,
        id_base,
        self_loops_dropped,
    })
}

/// Reads `node_id<TAB>label` lines. Returns `(node, community)` pairs with
/// 0-based communities.
pub fn load_labels(
    path: impl AsRef<Path>,
    id_base: IdBase,
    n: usize,
    k: usize,
) -> Result<Vec<(usize, usize)>, IngestError> {
    let path = path.as_ref();
    let text = read(path)?;
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for (line, content) in data_lines(&text) {
        let mut toks = content.split_whitespace();
        let (Some(a), Some(b)) = (toks.next(), toks.next()) else {
            return Err(parse_err(path, line, "expected node id and label"));
        };
        let v = to_internal(path, line, parse_id(path, line, a)?, id_base, n)?;
        let label: usize = b
            .parse()
            .map_err(|_| parse_err(path, line, format!("invalid label {b:?}")))?;
        if label < 1 || label > k {
            return Err(parse_err(path, line, format!("label {label} outside 1..={k}")));
        }
        if seen[v] {
            return Err(parse_err(path, line, format!("node id {a} labeled twice")));
        }
        seen[v] = true;
        out.push((v, label - 1));
    }
    Ok(out)
}

/// Reads whitespace-separated node ids (the neighbors of a new node).
pub fn load_neighbor_list(path: impl AsRef<Path>, id_base: IdBase, n: usize) -> Result<Vec<usize>, IngestError> {
    let path = path.as_ref();
    let text = read(path)?;
    let mut out = Vec::new();
    for (line, content) in data_lines(&text) {
        for tok in content.split_whitespace() {
            out.push(to_internal(path, line, parse_id(path, line, tok)?, id_base, n)?);
        }
    }
    Ok(out)
}

/// Seeded uniform permutation of `ids` chopped into `folds` parts whose sizes
/// differ by at most one (larger parts first).
pub fn split_folds(ids: &[usize], folds: usize, seed: Seed) -> Result<Vec<Vec<usize>>, IngestError> {
    if folds == 0 || folds > ids.len() {
        return Err(IngestError::Invalid(format!(
            "cannot split {} ids into {folds} folds",
            ids.len()
        )));
    }
    let mut shuffled = ids.to_vec();
    shuffled.shuffle(&mut seed.rng());
    let base = ids.len() / folds;
    let extra = ids.len() % folds;
    let mut out = Vec::with_capacity(folds);
    let mut start = 0;
    for f in 0..folds {
        let size = base + usize::from(f < extra);
        out.push(shuffled[start..start + size].to_vec());
        start += size;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn edge_list_dedups_and_drops_self_loops() {
        let f = file("0 1\n1 0\n1 1\n");
        let el = load_edge_list(f.path(), None).unwrap();
        assert_eq!(el.graph.n(), 2);
        assert_eq!(el.graph.edge_count(), 1);
        assert_eq!(el.self_loops_dropped, 1);
        assert_eq!(el.id_base, IdBase::Zero);
    }

    #[test]
    fn one_based_ids_detected() {
        let f = file("# comment\n1 2\n2 3\n\n3 1\n");
        let el = load_edge_list(f.path(), None).unwrap();
        assert_eq!(el.id_base, IdBase::One);
        assert_eq!(el.graph.n(), 3);
        assert!(el.graph.has_edge(0, 2));
    }

    #[test]
    fn out_of_range_reports_line() {
        let f = file("0 1\n1 7\n");
        match load_edge_list(f.path(), Some(3)) {
            Err(IngestError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let f = file("0 x\n");
        assert!(matches!(load_edge_list(f.path(), None), Err(IngestError::Parse { line: 1, .. })));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            load_edge_list("/nonexistent/edges.txt", None),
            Err(IngestError::Io { .. })
        ));
    }

    #[test]
    fn labels_parse_and_validate() {
        let f = file("1\t1\n3\t2\n");
        let labels = load_labels(f.path(), IdBase::One, 3, 2).unwrap();
        assert_eq!(labels, vec![(0, 0), (2, 1)]);
        let f = file("1\t1\n2\t3\n");
        assert!(matches!(
            load_labels(f.path(), IdBase::One, 3, 2),
            Err(IngestError::Parse { line: 2, .. })
        ));
        let f = file("0\t1\n");
        assert!(load_labels(f.path(), IdBase::One, 3, 2).is_err());
    }

    #[test]
    fn folds_of_ten_singletons() {
        let ids: Vec<usize> = (0..10).collect();
        let folds = split_folds(&ids, 10, Seed(5)).unwrap();
        assert_eq!(folds.len(), 10);
        let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, ids);
        assert!(folds.iter().all(|f| f.len() == 1));
    }

    #[test]
    fn folds_near_equal_and_disjoint() {
        let ids: Vec<usize> = (0..1222).collect();
        let folds = split_folds(&ids, 10, Seed(9)).unwrap();
        // 1222 = 2 * 123 + 8 * 122
        let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        assert_eq!(sizes.iter().filter(|&&s| s == 123).count(), 2);
        assert_eq!(sizes.iter().filter(|&&s| s == 122).count(), 8);
        let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), 1222);
        assert_eq!(folds, split_folds(&ids, 10, Seed(9)).unwrap());
        assert!(split_folds(&ids, 0, Seed(9)).is_err());
    }
}
