//! Binary operator dump.
//!
//! Layout, all little-endian:
//!
//! ```text
//! b"QIDOP1" | n: u32 | d: u32 | d^n * d^n entries of (re: f64, im: f64), row-major
//! ```

use std::io::{Read, Write};

use nalgebra::DMatrix;

use super::{DenseOperator, OperatorSpace, TensorLayout};
use crate::error::{Error, Result};
use crate::C64;

pub const DUMP_MAGIC: &[u8; 6] = b"QIDOP1";

/// Writes a full-space operator. Restricted and plain operators carry no
/// `(n, d)` header and are rejected.
pub fn write_dump<W: Write>(op: &DenseOperator, mut out: W) -> Result<()> {
    let layout = op
        .layout()
        .ok_or_else(|| Error::Argument("only full tensor-space operators can be dumped".into()))?;
    let header = |v: usize| {
        u32::try_from(v).map_err(|_| Error::Argument(format!("{v} does not fit the u32 header")))
    };
    out.write_all(DUMP_MAGIC)?;
    out.write_all(&header(layout.subsystems())?.to_le_bytes())?;
    out.write_all(&header(layout.local_dim())?.to_le_bytes())?;
    let m = op.matrix();
    let mut row_buf = Vec::with_capacity(16 * m.ncols());
    for i in 0..m.nrows() {
        row_buf.clear();
        for z in m.row(i).iter() {
            row_buf.extend_from_slice(&z.re.to_le_bytes());
            row_buf.extend_from_slice(&z.im.to_le_bytes());
        }
        out.write_all(&row_buf)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a dump written by [`write_dump`]. The dimension cap is not applied;
/// the header alone fixes the size.
pub fn read_dump<R: Read>(mut input: R) -> Result<DenseOperator> {
    let mut magic = [0u8; 6];
    input.read_exact(&mut magic)?;
    if &magic != DUMP_MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let mut word = [0u8; 4];
    input.read_exact(&mut word)?;
    let n = u32::from_le_bytes(word) as usize;
    input.read_exact(&mut word)?;
    let d = u32::from_le_bytes(word) as usize;
    let layout = TensorLayout::with_cap(n, d, usize::MAX)
        .map_err(|e| Error::Format(format!("header (n={n}, d={d}): {e}")))?;
    let dim = layout.dim();
    let count = dim
        .checked_mul(dim)
        .ok_or_else(|| Error::Format(format!("header (n={n}, d={d}) is too large")))?;
    let mut entries = Vec::new();
    let mut pair = [0u8; 16];
    for _ in 0..count {
        input.read_exact(&mut pair)?;
        let re = f64::from_le_bytes(pair[..8].try_into().expect("8 bytes"));
        let im = f64::from_le_bytes(pair[8..].try_into().expect("8 bytes"));
        entries.push(C64::new(re, im));
    }
    let mut rest = [0u8; 1];
    if input.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after the last entry".into()));
    }
    let matrix = DMatrix::from_row_slice(dim, dim, &entries);
    DenseOperator::new(OperatorSpace::Tensor(layout), matrix, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::build_identification_operator;

    #[test]
    fn header_and_row_major_entries() {
        let op = build_identification_operator(1, 2).unwrap();
        let mut bytes = Vec::new();
        write_dump(&op, &mut bytes).unwrap();
        assert_eq!(bytes.len(), 6 + 4 + 4 + 64 * 16);
        assert_eq!(&bytes[..6], b"QIDOP1");
        assert_eq!(&bytes[6..10], &3u32.to_le_bytes());
        assert_eq!(&bytes[10..14], &2u32.to_le_bytes());
        // entry (0, 1) sits right after entry (0, 0)
        let at = |offset: usize| f64::from_le_bytes(bytes[offset..offset + 8].try_into().unwrap());
        assert_eq!(at(14 + 16), op.matrix()[(0, 1)].re);
        assert_eq!(at(14 + 8 * 16), op.matrix()[(1, 0)].re);
        let back = read_dump(bytes.as_slice()).unwrap();
        assert_eq!(back.matrix(), op.matrix());
        assert_eq!(back.layout(), op.layout());
    }

    #[test]
    fn rejects_corrupt_input() {
        assert!(matches!(read_dump(&b"QIDOP2\0\0\0\0"[..]), Err(Error::Format(_))));
        let op = build_identification_operator(1, 2).unwrap();
        let mut bytes = Vec::new();
        write_dump(&op, &mut bytes).unwrap();
        assert!(matches!(read_dump(&bytes[..bytes.len() - 1]), Err(Error::Io(_))));
        bytes.push(0);
        assert!(matches!(read_dump(bytes.as_slice()), Err(Error::Format(_))));
    }

    #[test]
    fn restricted_operator_is_not_dumpable() {
        let op = crate::tensor::build_identification_operator_sym(1, 2).unwrap();
        assert!(matches!(write_dump(&op, Vec::new()), Err(Error::Argument(_))));
    }
}
