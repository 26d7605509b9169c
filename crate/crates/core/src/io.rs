//! Sample files.
//!
//! Binary layout, all integers little-endian:
//!
//! ```text
//! b"SPXB"  u32 version (1)
//! u64 shots  u64 detectors  u64 observables  u64 seed
//! u64 comment length, comment bytes (UTF-8), zero padding to 8 bytes
//! detector matrix words    (shots × ceil(detectors/64) u64, row-major)
//! observable matrix words  (shots × ceil(observables/64) u64, row-major)
//! ```
//!
//! The text form is any number of `# ` comment lines, one
//! `shots=N detectors=D observables=O seed=S` line, then one line per shot:
//! its detector bits as `0`/`1` characters, a space, its observable bits.
//!
//! The comment carries whatever the writer wants to keep with the bits,
//! normally the configuration that produced them.

use crate::frame::{BitMatrix, SampleResult};
use thiserror::Error;

pub const MAGIC: &[u8; 4] = b"SPXB";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 5 * 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SampleFileError {
    #[error("not a sample file (bad magic)")]
    BadMagic,
    #[error("unsupported sample file version {0}")]
    BadVersion(u32),
    #[error("sample file truncated or has trailing bytes: expected {expected} bytes, found {found}")]
    BadLength { expected: usize, found: usize },
    #[error("padding bits set in a matrix row")]
    BadPadding,
    #[error("bad text header: {0}")]
    BadHeader(String),
    #[error("comment is not valid UTF-8")]
    BadComment,
    #[error("line {line}: {msg}")]
    BadLine { line: usize, msg: String },
}

fn padded(n: usize) -> usize {
    n.div_ceil(8) * 8
}

pub fn write_binary(s: &SampleResult, comment: &str) -> Vec<u8> {
    let words = s.detectors.words().len() + s.observables.words().len();
    let mut out = Vec::with_capacity(HEADER_LEN + padded(comment.len()) + 8 * words);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for v in [s.shots, s.detectors.cols() as u64, s.observables.cols() as u64, s.seed, comment.len() as u64] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(comment.as_bytes());
    out.resize(HEADER_LEN + padded(comment.len()), 0);
    for w in s.detectors.words().iter().chain(s.observables.words()) {
        out.extend_from_slice(&w.to_le_bytes());
    }
    out
}

pub fn read_binary(bytes: &[u8]) -> Result<(SampleResult, String), SampleFileError> {
    if bytes.len() < HEADER_LEN {
        return Err(SampleFileError::BadLength { expected: HEADER_LEN, found: bytes.len() });
    }
    if &bytes[..4] != MAGIC {
        return Err(SampleFileError::BadMagic);
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(SampleFileError::BadVersion(version));
    }
    let field = |k: usize| u64::from_le_bytes(bytes[8 + 8 * k..16 + 8 * k].try_into().unwrap());
    let (shots, dets, obs, seed) = (field(0), field(1), field(2), field(3));
    let too_big = || SampleFileError::BadLength { expected: usize::MAX, found: bytes.len() };
    let clen = usize::try_from(field(4)).map_err(|_| too_big())?;
    let body = HEADER_LEN.checked_add(clen.checked_next_multiple_of(8).ok_or_else(too_big)?).ok_or_else(too_big)?;
    if bytes.len() < body {
        return Err(SampleFileError::BadLength { expected: body, found: bytes.len() });
    }
    let comment = std::str::from_utf8(&bytes[HEADER_LEN..HEADER_LEN + clen]).map_err(|_| SampleFileError::BadComment)?.to_string();
    let rows = usize::try_from(shots).map_err(|_| too_big())?;
    let dw = rows.checked_mul(usize::try_from(dets).map_err(|_| too_big())?.div_ceil(64)).ok_or_else(too_big)?;
    let ow = rows.checked_mul(usize::try_from(obs).map_err(|_| too_big())?.div_ceil(64)).ok_or_else(too_big)?;
    let expected = dw.checked_add(ow).and_then(|w| w.checked_mul(8)).and_then(|b| b.checked_add(body)).ok_or_else(too_big)?;
    if bytes.len() != expected {
        return Err(SampleFileError::BadLength { expected, found: bytes.len() });
    }
    let mut words = bytes[body..].chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap()));
    let det_words: Vec<u64> = words.by_ref().take(dw).collect();
    let obs_words: Vec<u64> = words.collect();
    let detectors = BitMatrix::from_words(rows, dets as usize, det_words).ok_or(SampleFileError::BadPadding)?;
    let observables = BitMatrix::from_words(rows, obs as usize, obs_words).ok_or(SampleFileError::BadPadding)?;
    Ok((SampleResult { shots, seed, detectors, observables }, comment))
}

pub fn write_text(s: &SampleResult, comment: &str) -> String {
    let (d, o) = (s.detectors.cols(), s.observables.cols());
    let mut out: String = comment.lines().map(|l| format!("# {l}\n")).collect();
    out += &format!("shots={} detectors={} observables={} seed={}\n", s.shots, d, o, s.seed);
    out.reserve(s.shots as usize * (d + o + 2));
    for r in 0..s.shots as usize {
        out.extend((0..d).map(|c| if s.detectors.get(r, c) { '1' } else { '0' }));
        out.push(' ');
        out.extend((0..o).map(|c| if s.observables.get(r, c) { '1' } else { '0' }));
        out.push('\n');
    }
    out
}

pub fn read_text(text: &str) -> Result<(SampleResult, String), SampleFileError> {
    let mut lines = text.lines().enumerate().peekable();
    let mut comment = Vec::new();
    while let Some((_, l)) = lines.next_if(|(_, l)| l.starts_with('#')) {
        comment.push(l.strip_prefix("# ").unwrap_or(&l[1..]));
    }
    let (_, body) = lines.next().ok_or_else(|| SampleFileError::BadHeader("missing header line".into()))?;
    let mut vals = [None; 4];
    for tok in body.split_whitespace() {
        let (k, v) = tok.split_once('=').ok_or_else(|| SampleFileError::BadHeader(tok.into()))?;
        let slot = ["shots", "detectors", "observables", "seed"]
            .iter()
            .position(|&n| n == k)
            .ok_or_else(|| SampleFileError::BadHeader(format!("unknown key {k}")))?;
        vals[slot] = Some(v.parse::<u64>().map_err(|e| SampleFileError::BadHeader(format!("{k}: {e}")))?);
    }
    let [Some(shots), Some(d), Some(o), Some(seed)] = vals else {
        return Err(SampleFileError::BadHeader("missing key".into()));
    };
    let (d, o) = (d as usize, o as usize);
    let mut detectors = BitMatrix::zeros(shots as usize, d);
    let mut observables = BitMatrix::zeros(shots as usize, o);
    let mut r = 0usize;
    for (i, line) in lines {
        let err = |msg: &str| SampleFileError::BadLine { line: i + 1, msg: msg.into() };
        if r == shots as usize {
            return Err(err("more shot lines than the header declares"));
        }
        let (dl, ol) = line.split_once(' ').ok_or_else(|| err("missing separator"))?;
        if dl.len() != d || ol.len() != o {
            return Err(err("wrong number of bits"));
        }
        for (m, bits) in [(&mut detectors, dl), (&mut observables, ol)] {
            for (c, ch) in bits.bytes().enumerate() {
                match ch {
                    b'0' => {}
                    b'1' => m.set(r, c, true),
                    _ => return Err(err("bits must be 0 or 1")),
                }
            }
        }
        r += 1;
    }
    if r != shots as usize {
        return Err(SampleFileError::BadHeader(format!("declares {shots} shots, found {r}")));
    }
    Ok((SampleResult { shots, seed, detectors, observables }, comment.join("\n")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::ArchitectureParams;
    use crate::circuit::build_memory_experiment;
    use crate::frame::sample;
    use crate::noise::{Bias, NoiseParams};
    use proptest::prelude::*;

    fn noisy_sample() -> SampleResult {
        let arch = ArchitectureParams::xzzx(2, 3, 3).unwrap();
        let c = build_memory_experiment(&arch, &NoiseParams::new(0.01, Bias::Finite(100.0)).unwrap(), 3).unwrap();
        sample(&c, 150, 11).unwrap()
    }

    #[test]
    fn binary_round_trip() {
        let s = noisy_sample();
        assert!(s.detectors.count_ones() > 0);
        let bytes = write_binary(&s, "p = 0.01\nseed = 11");
        assert_eq!(&bytes[..4], b"SPXB");
        assert_eq!(read_binary(&bytes).unwrap(), (s.clone(), "p = 0.01\nseed = 11".to_string()));
        assert_eq!(read_binary(&write_binary(&s, "")).unwrap().1, "");
    }

    #[test]
    fn text_round_trip() {
        let s = noisy_sample();
        let t = write_text(&s, "p = 0.01");
        assert!(t.starts_with("# p = 0.01\nshots=150 "));
        assert_eq!(read_text(&t).unwrap(), (s, "p = 0.01".to_string()));
    }

    #[test]
    fn rejects_damaged_files() {
        let s = noisy_sample();
        let mut bytes = write_binary(&s, "x");
        assert!(matches!(read_binary(&bytes[..bytes.len() - 1]), Err(SampleFileError::BadLength { .. })));
        bytes[0] = b'X';
        assert_eq!(read_binary(&bytes), Err(SampleFileError::BadMagic));
        assert!(read_text("shots=1 detectors=2 observables=1 seed=0\n012 1\n").is_err());
        assert!(read_text("shots=2 detectors=2 observables=1 seed=0\n01 1\n").is_err());
        assert!(read_text("shots=1\n").is_err());
        assert!(read_text("# only a comment\n").is_err());
    }

    #[test]
    fn padding_bits_are_rejected() {
        let m = BitMatrix::zeros(1, 3);
        let s = SampleResult { shots: 1, seed: 0, detectors: m.clone(), observables: m };
        let mut bytes = write_binary(&s, "");
        bytes[HEADER_LEN] = 0xff;
        assert_eq!(read_binary(&bytes), Err(SampleFileError::BadPadding));
    }

    proptest! {
        #[test]
        fn arbitrary_matrices_round_trip(shots in 0usize..20, d in 0usize..150, o in 0usize..3, seed: u64, bits in proptest::collection::vec(any::<bool>(), 3000)) {
            let mut det = BitMatrix::zeros(shots, d);
            let mut obs = BitMatrix::zeros(shots, o);
            let mut k = 0;
            for r in 0..shots {
                for c in 0..d { det.set(r, c, bits[k % bits.len()]); k += 1; }
                for c in 0..o { obs.set(r, c, bits[k % bits.len()]); k += 1; }
            }
            let s = SampleResult { shots: shots as u64, seed, detectors: det, observables: obs };
            let comment = "seed = ".to_string() + &seed.to_string();
            prop_assert_eq!(read_binary(&write_binary(&s, &comment)).unwrap(), (s.clone(), comment.clone()));
            prop_assert_eq!(read_text(&write_text(&s, &comment)).unwrap(), (s, comment));
        }
    }
}
