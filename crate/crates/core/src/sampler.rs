//! Golden functional model of the rejection sampler.
//!
//! The reference algorithm is written with 1-based indices. Here position
//! `j` (1-based) is stored at index `j - 1`, so the replacement pointer that
//! starts at `n' + 1` starts at index `n_prime`, and the exhaustion test
//! `k < tau + 1` becomes `k < tau`.

use std::fmt::Write as _;

use crate::aesprg::{keystream, AesKey128, Iv, KeystreamRequest};
use crate::error::SampleError;
use crate::params::{is_mersenne, ParameterSet, BYTES_PER_WORD};

/// Elements of `F_q` produced by the sampler, each strictly below `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldVector {
    elems: Vec<u8>,
    modulus: u8,
}

impl FieldVector {
    pub fn new(elems: Vec<u8>, modulus: u8) -> Result<Self, SampleError> {
        if let Some((index, &value)) = elems.iter().enumerate().find(|(_, &v)| v >= modulus) {
            return Err(SampleError::OutOfRange { index, value, q: modulus });
        }
        Ok(FieldVector { elems, modulus })
    }

    pub fn elems(&self) -> &[u8] {
        &self.elems
    }

    pub fn modulus(&self) -> u8 {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.elems
    }

    /// Packs eight elements per 64-bit word, element 0 in the most
    /// significant byte. The last word is zero-padded.
    pub fn to_words(&self) -> Vec<u64> {
        pack_words(&self.elems)
    }

    /// Packed words serialized big-endian, i.e. the element bytes in order
    /// followed by zero padding up to a multiple of eight.
    pub fn to_packed_bytes(&self) -> Vec<u8> {
        self.to_words().iter().flat_map(|w| w.to_be_bytes()).collect()
    }

    /// Inverse of [`FieldVector::to_packed_bytes`] for a known element count.
    pub fn from_packed_bytes(bytes: &[u8], len: usize, modulus: u8) -> Result<Self, SampleError> {
        if bytes.len() != len.div_ceil(BYTES_PER_WORD) * BYTES_PER_WORD {
            return Err(SampleError::LengthMismatch {
                expected: len.div_ceil(BYTES_PER_WORD) * BYTES_PER_WORD,
                actual: bytes.len(),
            });
        }
        FieldVector::new(bytes[..len].to_vec(), modulus)
    }

    /// One decimal element per line.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.elems.len() * 4);
        for e in &self.elems {
            writeln!(s, "{e}").unwrap();
        }
        s
    }
}

/// Packs bytes eight to a word, first byte most significant.
pub fn pack_words(bytes: &[u8]) -> Vec<u64> {
    bytes
        .chunks(BYTES_PER_WORD)
        .map(|c| {
            let mut w = [0u8; BYTES_PER_WORD];
            w[..c.len()].copy_from_slice(c);
            u64::from_be_bytes(w)
        })
        .collect()
}

/// Inverse of [`pack_words`], truncated to `len` bytes.
pub fn unpack_words(words: &[u64], len: usize) -> Vec<u8> {
    let mut out: Vec<u8> = words.iter().flat_map(|w| w.to_be_bytes()).collect();
    out.truncate(len);
    out
}

/// Masks every byte with `q`, keeping the low `log2(q + 1)` bits.
pub fn mask_bytes(raw: &[u8], q: u8) -> Result<Vec<u8>, SampleError> {
    if !is_mersenne(q) {
        return Err(SampleError::UnsupportedModulus(q));
    }
    Ok(raw.iter().map(|&r| r & q).collect())
}

/// Counters describing how a sampling run used its input.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SampleStats {
    /// Positions among the first `n'` whose masked value equalled `q`.
    pub rejected: usize,
    /// Rejected positions filled from the spare tail.
    pub replaced: usize,
    /// Rejected positions zero-filled after the tail ran out.
    pub zero_filled: usize,
    /// Tail bytes that themselves equalled `q` and were skipped.
    pub tail_skipped: usize,
}

/// Maps `tau` raw bytes to `n_prime` field elements.
pub fn rej_samp(raw: &[u8], tau: usize, n_prime: usize, q: u8) -> Result<FieldVector, SampleError> {
    rej_samp_with_stats(raw, tau, n_prime, q).map(|(fv, _)| fv)
}

pub fn rej_samp_with_stats(
    raw: &[u8],
    tau: usize,
    n_prime: usize,
    q: u8,
) -> Result<(FieldVector, SampleStats), SampleError> {
    if tau < n_prime {
        return Err(SampleError::InsufficientInput { tau, n_prime });
    }
    if raw.len() != tau {
        return Err(SampleError::LengthMismatch { expected: tau, actual: raw.len() });
    }
    let mut v = mask_bytes(raw, q)?;
    let mut stats = SampleStats::default();

    // k is the 0-based index of the next spare candidate.
    let mut k = n_prime;
    let skip_rejected = |k: &mut usize, stats: &mut SampleStats, v: &[u8]| {
        while *k < tau && v[*k] == q {
            *k += 1;
            stats.tail_skipped += 1;
        }
    };
    skip_rejected(&mut k, &mut stats, &v);

    for j in 0..n_prime {
        if v[j] != q {
            continue;
        }
        stats.rejected += 1;
        if k < tau {
            v[j] = v[k];
            k += 1;
            stats.replaced += 1;
            skip_rejected(&mut k, &mut stats, &v);
        } else {
            v[j] = 0;
            stats.zero_filled += 1;
        }
    }
    v.truncate(n_prime);
    Ok((FieldVector::new(v, q).expect("all rejected positions were replaced"), stats))
}

/// Keystream expansion followed by rejection sampling.
pub fn rej_samp_prg(seed: &AesKey128, iv: Iv, p: &ParameterSet) -> Result<FieldVector, SampleError> {
    rej_samp_prg_with_stats(seed, iv, p).map(|(fv, _)| fv)
}

pub fn rej_samp_prg_with_stats(
    seed: &AesKey128,
    iv: Iv,
    p: &ParameterSet,
) -> Result<(FieldVector, SampleStats), SampleError> {
    let raw = keystream(&KeystreamRequest { key: *seed, iv, n_bytes: p.tau })?;
    rej_samp_with_stats(&raw, p.tau, p.n_prime, p.q)
}
