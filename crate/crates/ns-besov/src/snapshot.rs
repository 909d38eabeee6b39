//! Binary field snapshots.
//!
//! Layout, all little-endian: magic `b"BNSF"`, format version `u32`,
//! resolution `N` as `u32`, time `f64`, then one `(re, im)` pair of `f64`
//! per canonical mode in storage order (`k₂ = 0, k₁ = 1..N/2`, followed by
//! rows `k₂ = 1..N/2`, each with `k₁ = −N/2..N/2`).

use std::io::{self, Read, Write};
use std::path::Path;

use ns_besov_core::field::half_lattice_len;
use ns_besov_core::{Complex64, SpectralField};

pub const MAGIC: [u8; 4] = *b"BNSF";
pub const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("bad magic {0:?}")]
    Magic([u8; 4]),
    #[error("unsupported snapshot version {0}")]
    Version(u32),
    #[error("invalid field: {0}")]
    Field(#[from] ns_besov_core::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub field: SpectralField,
}

pub fn write<W: Write>(mut w: W, time: f64, u: &SpectralField) -> Result<(), SnapshotError> {
    let n =
        u32::try_from(u.resolution()).map_err(|_| io::Error::other("resolution overflows u32"))?;
    let mut buf = Vec::with_capacity(20 + 16 * u.coeffs().len());
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&n.to_le_bytes());
    buf.extend_from_slice(&time.to_le_bytes());
    for c in u.coeffs() {
        buf.extend_from_slice(&c.re.to_le_bytes());
        buf.extend_from_slice(&c.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read<R: Read>(mut r: R) -> Result<Snapshot, SnapshotError> {
    let mut head = [0u8; 20];
    r.read_exact(&mut head)?;
    let magic: [u8; 4] = head[0..4].try_into().expect("4 bytes");
    if magic != MAGIC {
        return Err(SnapshotError::Magic(magic));
    }
    let version = u32::from_le_bytes(head[4..8].try_into().expect("4 bytes"));
    if version != VERSION {
        return Err(SnapshotError::Version(version));
    }
    let n = u32::from_le_bytes(head[8..12].try_into().expect("4 bytes")) as usize;
    let time = f64::from_le_bytes(head[12..20].try_into().expect("8 bytes"));
    if n < 2 || n % 2 != 0 {
        return Err(
            ns_besov_core::Error::InvalidArgument(format!("snapshot resolution {n}")).into(),
        );
    }
    let len = half_lattice_len(n);
    let mut body = vec![0u8; 16 * len];
    r.read_exact(&mut body)?;
    let coeffs = body
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[0..8].try_into().expect("8 bytes")),
                f64::from_le_bytes(c[8..16].try_into().expect("8 bytes")),
            )
        })
        .collect();
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(
            io::Error::new(io::ErrorKind::InvalidData, "trailing bytes after snapshot").into(),
        );
    }
    Ok(Snapshot {
        time,
        field: SpectralField::from_canonical(n, coeffs)?,
    })
}

pub fn save(path: &Path, time: f64, u: &SpectralField) -> Result<(), SnapshotError> {
    write(io::BufWriter::new(std::fs::File::create(path)?), time, u)
}

pub fn load(path: &Path) -> Result<Snapshot, SnapshotError> {
    read(io::BufReader::new(std::fs::File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ns_besov_core::field::random_field;

    #[test]
    fn header_layout() {
        let u = random_field(4, 1.0, 3).unwrap();
        let mut buf = Vec::new();
        write(&mut buf, 0.5, &u).unwrap();
        assert_eq!(&buf[0..4], b"BNSF");
        assert_eq!(&buf[4..8], &1u32.to_le_bytes());
        assert_eq!(&buf[8..12], &4u32.to_le_bytes());
        assert_eq!(&buf[12..20], &0.5f64.to_le_bytes());
        assert_eq!(buf.len(), 20 + 16 * half_lattice_len(4));
        assert_eq!(&buf[20..28], &u.coeffs()[0].re.to_le_bytes());
    }

    #[test]
    fn rejects_corruption() {
        let u = random_field(4, 1.0, 3).unwrap();
        let mut buf = Vec::new();
        write(&mut buf, 0.0, &u).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read(&bad[..]), Err(SnapshotError::Magic(_))));
        let mut bad = buf.clone();
        bad[4] = 9;
        assert!(matches!(read(&bad[..]), Err(SnapshotError::Version(9))));
        assert!(read(&buf[..buf.len() - 1]).is_err());
        let mut long = buf.clone();
        long.push(0);
        assert!(read(&long[..]).is_err());
    }
}
