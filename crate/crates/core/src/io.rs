//! Network file formats.
//!
//! Edge-list text: a header line `N M` followed by `M` lines `u v`.
//!
//! Binary: magic `NPRC`, little-endian `u64` N, `u64` M, then `M` pairs of
//! little-endian `u32`.

use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};
use crate::netgen::Network;

pub const BINARY_MAGIC: &[u8; 4] = b"NPRC";

pub fn write_edge_list<W: Write>(net: &Network, mut out: W) -> Result<()> {
    writeln!(out, "{} {}", net.vertex_count(), net.edge_count())?;
    for &(u, v) in net.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

pub fn read_edge_list<R: BufRead>(input: R) -> Result<Network> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty edge list".into()))??;
    let (n, m) = parse_pair::<usize>(&header)
        .ok_or_else(|| Error::Format(format!("bad header line {header:?}")))?;
    let mut edges = Vec::with_capacity(m);
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let e = parse_pair::<u32>(&line)
            .ok_or_else(|| Error::Format(format!("bad edge on line {}: {line:?}", i + 2)))?;
        edges.push(e);
    }
    if edges.len() != m {
        return Err(Error::Format(format!(
            "header announces {m} edges, found {}",
            edges.len()
        )));
    }
    Network::from_edges(n, edges).map_err(|e| Error::Format(e.to_string()))
}

fn parse_pair<T: std::str::FromStr>(line: &str) -> Option<(T, T)> {
    let mut it = line.split_whitespace();
    let a = it.next()?.parse().ok()?;
    let b = it.next()?.parse().ok()?;
    it.next().is_none().then_some((a, b))
}

pub fn write_binary<W: Write>(net: &Network, mut out: W) -> Result<()> {
    out.write_all(BINARY_MAGIC)?;
    out.write_all(&(net.vertex_count() as u64).to_le_bytes())?;
    out.write_all(&(net.edge_count() as u64).to_le_bytes())?;
    for &(u, v) in net.edges() {
        out.write_all(&u.to_le_bytes())?;
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut input: R) -> Result<Network> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != BINARY_MAGIC {
        return Err(Error::Format("missing NPRC magic".into()));
    }
    let mut word = [0u8; 8];
    input.read_exact(&mut word)?;
    let n = u64::from_le_bytes(word) as usize;
    input.read_exact(&mut word)?;
    let m = u64::from_le_bytes(word) as usize;
    let mut buf = Vec::new();
    input.read_to_end(&mut buf)?;
    if buf.len() != m * 8 {
        return Err(Error::Format(format!(
            "expected {} bytes of edges, found {}",
            m * 8,
            buf.len()
        )));
    }
    let edges = buf
        .chunks_exact(8)
        .map(|c| {
            (
                u32::from_le_bytes([c[0], c[1], c[2], c[3]]),
                u32::from_le_bytes([c[4], c[5], c[6], c[7]]),
            )
        })
        .collect();
    Network::from_edges(n, edges).map_err(|e| Error::Format(e.to_string()))
}

/// Reads either format, detected by the magic bytes.
pub fn read_network(bytes: &[u8]) -> Result<Network> {
    if bytes.starts_with(BINARY_MAGIC) {
        read_binary(bytes)
    } else {
        read_edge_list(bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Network {
        Network::from_edges(5, vec![(0, 1), (1, 2), (3, 4), (4, 0)]).unwrap()
    }

    #[test]
    fn edge_list_layout() {
        let mut buf = Vec::new();
        write_edge_list(&sample(), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "5 4\n0 1\n1 2\n3 4\n4 0\n");
        assert_eq!(read_network(&buf).unwrap(), sample());
    }

    #[test]
    fn binary_layout() {
        let mut buf = Vec::new();
        write_binary(&sample(), &mut buf).unwrap();
        assert_eq!(&buf[..4], b"NPRC");
        assert_eq!(u64::from_le_bytes(buf[4..12].try_into().unwrap()), 5);
        assert_eq!(u64::from_le_bytes(buf[12..20].try_into().unwrap()), 4);
        assert_eq!(buf.len(), 20 + 4 * 8);
        assert_eq!(&buf[20..28], &[0, 0, 0, 0, 1, 0, 0, 0]);
        assert_eq!(read_network(&buf).unwrap(), sample());
    }

    #[test]
    fn malformed_inputs() {
        assert!(read_edge_list("".as_bytes()).is_err());
        assert!(read_edge_list("3 2\n0 1\n".as_bytes()).is_err());
        assert!(read_edge_list("3 1\n0 x\n".as_bytes()).is_err());
        assert!(read_edge_list("3 1\n0 0\n".as_bytes()).is_err());
        assert!(read_edge_list("3 1\n0 1 2\n".as_bytes()).is_err());
        assert!(read_binary(&b"NPRX"[..]).is_err());
        let mut buf = Vec::new();
        write_binary(&sample(), &mut buf).unwrap();
        buf.pop();
        assert!(read_binary(&buf[..]).is_err());
    }
}
