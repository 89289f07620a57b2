//! Binary format, little-endian: magic `TWMX`, u16 version, u64 n, u64
//! padded n, f64 beta, u16 depth, then per layer a u64 object count, a u8
//! id width (table layers only) and the packed words; a CRC32 of all
//! preceding bytes closes the stream.

use super::{make_schedule, CompactOracle, Layer, PackedBits};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"TWMX";
const VERSION: u16 = 1;

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(k).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| Error::Format(format!("truncated at byte {}", self.pos)))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::Format("value exceeds usize".into()))
    }
}

impl CompactOracle {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.n_original as u64).to_le_bytes());
        out.extend_from_slice(&(self.n_padded as u64).to_le_bytes());
        out.extend_from_slice(&self.schedule.beta.to_le_bytes());
        out.extend_from_slice(&(self.depth() as u16).to_le_bytes());
        for (k, layer) in self.layers.iter().enumerate() {
            out.extend_from_slice(&(layer.objects as u64).to_le_bytes());
            if k < self.depth() {
                out.push(layer.width as u8);
            }
            for w in layer.data.words() {
                out.extend_from_slice(&w.to_le_bytes());
            }
        }
        let crc = crc32fast::hash(&out);
        out.extend_from_slice(&crc.to_le_bytes());
        out
    }

    /// Parses and validates a stream; no oracle is returned unless every
    /// check passes.
    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        if buf.len() < 4 + 4 {
            return Err(Error::Format("stream too short".into()));
        }
        let (body, tail) = buf.split_at(buf.len() - 4);
        let mut r = Reader { buf: body, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let version = r.u16()?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let stored_crc = u32::from_le_bytes(tail.try_into().unwrap());
        if crc32fast::hash(body) != stored_crc {
            return Err(Error::Format("checksum mismatch".into()));
        }
        let n_original = r.usize()?;
        let n_padded = r.usize()?;
        let beta = f64::from_le_bytes(r.take(8)?.try_into().unwrap());
        let depth = r.u16()? as usize;
        if n_original == 0 || n_padded != n_original.max(2).next_power_of_two() {
            return Err(Error::Format(format!("inconsistent sizes n={n_original}, padded={n_padded}")));
        }
        let schedule = make_schedule(n_padded, beta).map_err(|e| Error::Format(e.to_string()))?;
        if schedule.depth() != depth {
            return Err(Error::Format(format!("depth {depth} does not match the schedule ({})", schedule.depth())));
        }
        let mut layers = Vec::with_capacity(depth + 1);
        for k in 0..=depth {
            let objects = r.usize()?;
            let (width, per_object) = if k < depth {
                let w = r.u8()? as usize;
                if !(1..=32).contains(&w) {
                    return Err(Error::Format(format!("layer {k}: id width {w}")));
                }
                let side = schedule.m[k] / schedule.m[k + 1];
                (w, side * side * w)
            } else {
                (0, schedule.m[k] * schedule.m[k])
            };
            let bits = objects.checked_mul(per_object).ok_or_else(|| Error::Format(format!("layer {k}: size overflow")))?;
            let raw = r.take(bits.div_ceil(64).checked_mul(8).ok_or_else(|| Error::Format("size overflow".into()))?)?;
            let words = raw.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect();
            layers.push(Layer { objects, width, data: PackedBits::from_words(words, bits) });
        }
        if r.pos != body.len() {
            return Err(Error::Format(format!("{} trailing bytes", body.len() - r.pos)));
        }
        let oracle = CompactOracle { n_original, n_padded, schedule, layers };
        oracle.check_structure().map_err(|e| Error::Format(e.to_string()))?;
        Ok(oracle)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::RectangleDecomposition;
    use crate::twinorder::{extract_decomposition, generate};

    #[test]
    fn round_trip_all_zeros() {
        let o = CompactOracle::build(&RectangleDecomposition::empty(4), 1.0).unwrap();
        let bytes = o.to_bytes();
        let back = CompactOracle::from_bytes(&bytes).unwrap();
        assert_eq!(back, o);
        assert_eq!(back.to_bytes(), bytes);
    }

    #[test]
    fn round_trip_generated() {
        let g = generate(256, 2, 11).unwrap();
        let dec = extract_decomposition(&g.matrix, &g.sequence).unwrap();
        let o = CompactOracle::build(&dec, 1.0).unwrap();
        let bytes = o.to_bytes();
        let back = CompactOracle::from_bytes(&bytes).unwrap();
        assert_eq!(back.to_bytes(), bytes);
        for i in (1..=256).step_by(7) {
            for j in 1..=256 {
                assert_eq!(back.query(i, j).unwrap(), o.query(i, j).unwrap());
            }
        }
    }

    #[test]
    fn corrupt_streams_rejected() {
        let o = CompactOracle::build(&RectangleDecomposition::empty(16), 1.0).unwrap();
        let bytes = o.to_bytes();
        for cut in [0, 3, 10, bytes.len() / 2, bytes.len() - 1] {
            assert!(matches!(CompactOracle::from_bytes(&bytes[..cut]), Err(Error::Format(_))), "cut {cut}");
        }
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(CompactOracle::from_bytes(&bad), Err(Error::Format(_))));
        let mut bad = bytes.clone();
        bad[20] ^= 1;
        assert!(matches!(CompactOracle::from_bytes(&bad), Err(Error::Format(_))));
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(matches!(CompactOracle::from_bytes(&bad), Err(Error::Format(_))));
    }
}
