use std::io::{BufRead, Read, Write};

use super::{CsrGraph, DatasetMeta, SetRole, VertexId, VertexSet};
use crate::error::{Error, Result};

/// `"GCSR"`, version 1, three zero pad bytes.
pub const GCSR_MAGIC: [u8; 8] = *b"GCSR\x01\0\0\0";

/// Parses a `src dst` edge list (whitespace or comma separated, `#` comments).
///
/// The vertex count is `1 + max id`, or `meta.expected_n` when that is larger.
pub fn ingest_edge_list<R: BufRead>(
    reader: R,
    symmetrize: bool,
    meta: Option<&DatasetMeta>,
) -> Result<CsrGraph> {
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    let mut max_id: Option<VertexId> = None;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let mut tokens = body
            .split(|c: char| c.is_ascii_whitespace() || c == ',')
            .filter(|t| !t.is_empty());
        let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected two vertex ids, got {body:?}"),
            });
        };
        let u = parse_id(a, lineno)?;
        let v = parse_id(b, lineno)?;
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
        edges.push((u, v));
    }
    let mut n = max_id.map_or(0, |m| m as usize + 1);
    if let Some(expected) = meta.and_then(|m| m.expected_n) {
        n = n.max(expected as usize);
    }
    CsrGraph::from_edges(n, &edges, symmetrize)
}

fn parse_id(token: &str, line: usize) -> Result<VertexId> {
    let value: u64 = token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("{token:?} is not a nonnegative integer"),
    })?;
    // The largest id must still leave room for n = id + 1.
    if value >= VertexId::MAX as u64 {
        return Err(Error::Range(format!(
            "line {line}: vertex id {value} exceeds the supported maximum {}",
            VertexId::MAX - 1
        )));
    }
    Ok(value as VertexId)
}

pub fn save_binary_csr<W: Write>(graph: &CsrGraph, mut out: W) -> Result<()> {
    out.write_all(&GCSR_MAGIC)?;
    out.write_all(&(graph.num_vertices() as u64).to_le_bytes())?;
    out.write_all(&(graph.num_edges() as u64).to_le_bytes())?;
    for &o in graph.offsets() {
        out.write_all(&(o as u64).to_le_bytes())?;
    }
    for &t in graph.targets() {
        out.write_all(&(t as u64).to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn load_binary_csr<R: Read>(mut input: R) -> Result<CsrGraph> {
    let mut magic = [0u8; 8];
    read_exact(&mut input, &mut magic, "header")?;
    if magic[..4] != GCSR_MAGIC[..4] {
        return Err(Error::Format("bad magic (expected \"GCSR\")".into()));
    }
    if magic[4] != GCSR_MAGIC[4] {
        return Err(Error::Format(format!(
            "unsupported GCSR version {}",
            magic[4]
        )));
    }
    if magic[5..] != [0, 0, 0] {
        return Err(Error::Format("nonzero header padding".into()));
    }
    let n = read_u64(&mut input, "vertex count")?;
    let m = read_u64(&mut input, "edge count")?;
    if n > VertexId::MAX as u64 {
        return Err(Error::Range(format!(
            "{n} vertices exceed the u32 id space"
        )));
    }
    let n = n as usize;
    let m = usize::try_from(m).map_err(|_| Error::Range(format!("{m} edges")))?;

    // Corrupt headers must not trigger huge up-front allocations.
    const PREALLOC_CAP: usize = 1 << 20;
    let mut offsets = Vec::with_capacity((n + 1).min(PREALLOC_CAP));
    for _ in 0..=n {
        let o = read_u64(&mut input, "offsets")?;
        offsets.push(usize::try_from(o).map_err(|_| Error::Range(format!("offset {o}")))?);
    }
    if offsets[n] != m {
        return Err(Error::Validation(format!(
            "offsets[n] = {} but m = {m}",
            offsets[n]
        )));
    }
    let mut targets = Vec::with_capacity(m.min(PREALLOC_CAP));
    for _ in 0..m {
        let t = read_u64(&mut input, "targets")?;
        if t >= n as u64 {
            return Err(Error::Validation(format!("target {t} outside [0, {n})")));
        }
        targets.push(t as VertexId);
    }
    CsrGraph::from_csr(offsets, targets)
}

fn read_exact<R: Read>(input: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    input.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => {
            Error::Format(format!("truncated stream while reading {what}"))
        }
        _ => Error::Io(e),
    })
}

fn read_u64<R: Read>(input: &mut R, what: &str) -> Result<u64> {
    let mut buf = [0u8; 8];
    read_exact(input, &mut buf, what)?;
    Ok(u64::from_le_bytes(buf))
}

/// Reads a mask file: one vertex id per line, `#` comments allowed.
pub fn read_mask<R: BufRead>(reader: R, role: SetRole, n: usize) -> Result<VertexSet> {
    let mut ids = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let id = parse_id(body, idx + 1)?;
        if id as usize >= n {
            return Err(Error::Range(format!(
                "line {}: vertex {id} outside [0, {n})",
                idx + 1
            )));
        }
        ids.push(id);
    }
    VertexSet::from_unsorted(ids, role, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ingest(text: &str, symmetrize: bool) -> Result<CsrGraph> {
        ingest_edge_list(text.as_bytes(), symmetrize, None)
    }

    #[test]
    fn three_cycle() {
        let g = ingest("0 1\n1 2\n2 0\n", false).unwrap();
        assert_eq!((g.num_vertices(), g.num_edges()), (3, 3));
        assert_eq!(g.offsets(), &[0, 1, 2, 3]);
        assert_eq!(g.targets(), &[1, 2, 0]);
    }

    #[test]
    fn empty_stream() {
        let g = ingest("", false).unwrap();
        assert_eq!((g.num_vertices(), g.num_edges()), (0, 0));
        let g = ingest("# only a comment\n\n", true).unwrap();
        assert_eq!(g.num_vertices(), 0);
    }

    #[test]
    fn comments_commas_and_meta_padding() {
        let meta = DatasetMeta {
            expected_n: Some(10),
            ..DatasetMeta::named("pad")
        };
        let g = ingest_edge_list("# header\n0,1\n 1\t2 \n".as_bytes(), true, Some(&meta)).unwrap();
        assert_eq!(g.num_vertices(), 10);
        assert_eq!(g.num_edges(), 4);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        match ingest("0 1\n1 x\n", false) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            ingest("0 1 2\n", false),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(ingest("-1 2\n", false), Err(Error::Parse { .. })));
        assert!(matches!(ingest("0\n", false), Err(Error::Parse { .. })));
    }

    #[test]
    fn oversized_id_is_range_error() {
        assert!(matches!(
            ingest("0 99999999999\n", false),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn binary_round_trip() {
        let g = ingest("0 1\n1 2\n2 0\n", true).unwrap();
        let mut buf = Vec::new();
        save_binary_csr(&g, &mut buf).unwrap();
        assert_eq!(&buf[..8], b"GCSR\x01\0\0\0");
        assert_eq!(buf.len(), 8 + 16 + 8 * (4 + 6));
        assert_eq!(load_binary_csr(buf.as_slice()).unwrap(), g);
    }

    #[test]
    fn binary_rejects_bad_magic_and_truncation() {
        let g = ingest("0 1\n", false).unwrap();
        let mut buf = Vec::new();
        save_binary_csr(&g, &mut buf).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(
            load_binary_csr(bad.as_slice()),
            Err(Error::Format(_))
        ));
        let truncated = &buf[..buf.len() - 3];
        assert!(matches!(load_binary_csr(truncated), Err(Error::Format(_))));
    }

    #[test]
    fn binary_rejects_offset_mismatch() {
        let mut buf = GCSR_MAGIC.to_vec();
        for v in [2u64, 1, 0, 1, 2, 1] {
            // n=2, m=1, offsets [0,1,2] (offsets[n]=2 != m), one target
            buf.extend_from_slice(&v.to_le_bytes());
        }
        assert!(matches!(
            load_binary_csr(buf.as_slice()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn mask_file() {
        let s = read_mask("3\n1\n# c\n3\n".as_bytes(), SetRole::Train, 4).unwrap();
        assert_eq!(s.ids(), &[1, 3]);
        assert!(read_mask("4\n".as_bytes(), SetRole::Train, 4).is_err());
    }
}
