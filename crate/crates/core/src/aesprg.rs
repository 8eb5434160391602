//! AES-128 and the counter-mode keystream that feeds the sampler.
//!
//! The cipher is written as a sequence of explicit round transformations
//! ([`RoundState::step`]) so the pipelined core in [`crate::hwsim`] can apply
//! them one stage at a time. The S-box is derived from GF(2^8) inversion at
//! compile time rather than pasted in.

use std::fmt;

use crate::error::PrgError;

pub const BLOCK_BYTES: usize = 16;
pub type Block = [u8; BLOCK_BYTES];

/// Round transformations per block: the initial AddRoundKey plus ten rounds.
pub const TRANSFORMATIONS: usize = 11;

/// Largest block index representable in the 6-byte running counter.
pub const MAX_BLOCKS: u64 = 1 << 48;

/// 128-bit seed used as the AES key.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct AesKey128(pub [u8; 16]);

impl AesKey128 {
    pub fn from_hex(s: &str) -> Result<Self, PrgError> {
        parse_hex_array(s, "seed").map(AesKey128)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    /// The key as two big-endian 64-bit words, high half first.
    pub fn to_words(&self) -> [u64; 2] {
        let (hi, lo) = self.0.split_at(8);
        [
            u64::from_be_bytes(hi.try_into().unwrap()),
            u64::from_be_bytes(lo.try_into().unwrap()),
        ]
    }

    pub fn from_words(words: [u64; 2]) -> Self {
        let mut k = [0u8; 16];
        k[..8].copy_from_slice(&words[0].to_be_bytes());
        k[8..].copy_from_slice(&words[1].to_be_bytes());
        AesKey128(k)
    }
}

impl fmt::Debug for AesKey128 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AesKey128({})", self.to_hex())
    }
}

/// The 2-byte counter input `i` that selects the keystream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Iv(pub [u8; 2]);

impl Iv {
    pub fn from_hex(s: &str) -> Result<Self, PrgError> {
        parse_hex_array(s, "iv").map(Iv)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }
}

fn parse_hex_array<const N: usize>(s: &str, what: &'static str) -> Result<[u8; N], PrgError> {
    let bad = PrgError::BadHex { what, expected: 2 * N };
    let bytes = hex::decode(s.trim()).map_err(|_| bad.clone())?;
    bytes.try_into().map_err(|_| bad)
}

/// Counter-mode settings without a canonical value.
///
/// The nonce bytes are unspecified; the all-zero default is a convention,
/// not an interoperability claim.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct CtrConfig {
    pub nonce: [u8; 8],
}

/// One AES input block: `nonce || iv || index`, the index being a 48-bit
/// big-endian block counter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CtrBlock {
    pub nonce: [u8; 8],
    pub iv: Iv,
    pub index: u64,
}

impl CtrBlock {
    pub fn new(cfg: &CtrConfig, iv: Iv, index: u64) -> Self {
        debug_assert!(index < MAX_BLOCKS);
        CtrBlock { nonce: cfg.nonce, iv, index }
    }

    pub fn to_bytes(&self) -> Block {
        let mut b = [0u8; 16];
        b[..8].copy_from_slice(&self.nonce);
        b[8..10].copy_from_slice(&self.iv.0);
        b[10..].copy_from_slice(&self.index.to_be_bytes()[2..]);
        b
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KeystreamRequest {
    pub key: AesKey128,
    pub iv: Iv,
    pub n_bytes: usize,
}

/// Number of AES blocks consumed by an `n_bytes` request.
pub fn blocks_for(n_bytes: usize) -> usize {
    n_bytes.div_ceil(BLOCK_BYTES)
}

/// Expands `key`/`iv` into `n_bytes` pseudorandom bytes with the default
/// (all-zero) nonce.
pub fn keystream(req: &KeystreamRequest) -> Result<Vec<u8>, PrgError> {
    keystream_with(req, &CtrConfig::default())
}

pub fn keystream_with(req: &KeystreamRequest, cfg: &CtrConfig) -> Result<Vec<u8>, PrgError> {
    if req.n_bytes == 0 {
        return Err(PrgError::EmptyRequest);
    }
    let blocks = blocks_for(req.n_bytes);
    if blocks as u64 > MAX_BLOCKS {
        return Err(PrgError::CounterOverflow(req.n_bytes));
    }
    let schedule = KeySchedule::new(&req.key);
    let mut out = Vec::with_capacity(blocks * BLOCK_BYTES);
    for index in 0..blocks as u64 {
        let input = CtrBlock::new(cfg, req.iv, index).to_bytes();
        out.extend_from_slice(&schedule.encrypt(&input));
    }
    out.truncate(req.n_bytes);
    Ok(out)
}

/// Single-block AES-128 encryption.
pub fn aes128_encrypt_block(key: &AesKey128, block: &Block) -> Block {
    let mut st = RoundState::new(key, *block);
    while !st.is_done() {
        st.step();
    }
    st.state
}

/// All eleven round keys, for callers encrypting many blocks under one key.
#[derive(Clone)]
pub struct KeySchedule {
    round_keys: [Block; TRANSFORMATIONS],
}

impl KeySchedule {
    pub fn new(key: &AesKey128) -> Self {
        let mut round_keys = [[0u8; 16]; TRANSFORMATIONS];
        round_keys[0] = key.0;
        for r in 1..TRANSFORMATIONS {
            round_keys[r] = next_round_key(&round_keys[r - 1], r);
        }
        KeySchedule { round_keys }
    }

    pub fn round_key(&self, round: usize) -> &Block {
        &self.round_keys[round]
    }

    pub fn encrypt(&self, block: &Block) -> Block {
        let mut s = *block;
        add_round_key(&mut s, &self.round_keys[0]);
        for r in 1..TRANSFORMATIONS {
            apply_round(&mut s, &self.round_keys[r], r == TRANSFORMATIONS - 1);
        }
        s
    }
}

/// A block in flight through the cipher, with the key schedule advancing
/// alongside the data path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RoundState {
    pub state: Block,
    pub round_key: Block,
    /// Index of the next transformation to apply, `0..=TRANSFORMATIONS`.
    pub next: usize,
}

impl RoundState {
    pub fn new(key: &AesKey128, plaintext: Block) -> Self {
        RoundState { state: plaintext, round_key: key.0, next: 0 }
    }

    pub fn is_done(&self) -> bool {
        self.next >= TRANSFORMATIONS
    }

    /// Applies the next transformation. Transformation 0 is the whitening
    /// AddRoundKey; 1..=9 are full rounds; 10 is the final round without
    /// MixColumns.
    pub fn step(&mut self) {
        match self.next {
            0 => add_round_key(&mut self.state, &self.round_key),
            r if r < TRANSFORMATIONS => {
                self.round_key = next_round_key(&self.round_key, r);
                apply_round(&mut self.state, &self.round_key, r == TRANSFORMATIONS - 1);
            }
            _ => return,
        }
        self.next += 1;
    }
}

fn apply_round(s: &mut Block, rk: &Block, last: bool) {
    sub_bytes(s);
    shift_rows(s);
    if !last {
        mix_columns(s);
    }
    add_round_key(s, rk);
}

// State bytes are column-major: byte 4*c + r is row r of column c.

pub fn sub_bytes(s: &mut Block) {
    for b in s.iter_mut() {
        *b = SBOX[*b as usize];
    }
}

pub fn shift_rows(s: &mut Block) {
    let t = *s;
    for c in 0..4 {
        for r in 1..4 {
            s[4 * c + r] = t[4 * ((c + r) % 4) + r];
        }
    }
}

pub fn mix_columns(s: &mut Block) {
    for col in s.chunks_exact_mut(4) {
        let a = [col[0], col[1], col[2], col[3]];
        let all = a[0] ^ a[1] ^ a[2] ^ a[3];
        for r in 0..4 {
            col[r] = a[r] ^ all ^ xtime(a[r] ^ a[(r + 1) % 4]);
        }
    }
}

pub fn add_round_key(s: &mut Block, rk: &Block) {
    for (b, k) in s.iter_mut().zip(rk) {
        *b ^= k;
    }
}

/// Derives round key `round` (1..=10) from round key `round - 1`.
pub fn next_round_key(prev: &Block, round: usize) -> Block {
    let mut out = *prev;
    let last = [prev[12], prev[13], prev[14], prev[15]];
    let mut t = [
        SBOX[last[1] as usize],
        SBOX[last[2] as usize],
        SBOX[last[3] as usize],
        SBOX[last[0] as usize],
    ];
    t[0] ^= RCON[round - 1];
    for w in 0..4 {
        for i in 0..4 {
            let v = if w == 0 { t[i] } else { out[4 * (w - 1) + i] };
            out[4 * w + i] = prev[4 * w + i] ^ v;
        }
    }
    out
}

const fn xtime(b: u8) -> u8 {
    (b << 1) ^ (((b >> 7) & 1) * 0x1b)
}

const fn gf_mul(mut a: u8, mut b: u8) -> u8 {
    let mut p = 0u8;
    while b != 0 {
        if b & 1 != 0 {
            p ^= a;
        }
        a = xtime(a);
        b >>= 1;
    }
    p
}

/// Multiplicative inverse as `a^254`; maps 0 to 0.
const fn gf_inv(a: u8) -> u8 {
    let mut result = 1u8;
    let mut base = a;
    let mut e = 254u8;
    while e != 0 {
        if e & 1 != 0 {
            result = gf_mul(result, base);
        }
        base = gf_mul(base, base);
        e >>= 1;
    }
    result
}

const fn sbox_entry(x: u8) -> u8 {
    let b = gf_inv(x);
    b ^ b.rotate_left(1) ^ b.rotate_left(2) ^ b.rotate_left(3) ^ b.rotate_left(4) ^ 0x63
}

const fn build_sbox() -> [u8; 256] {
    let mut t = [0u8; 256];
    let mut i = 0;
    while i < 256 {
        t[i] = sbox_entry(i as u8);
        i += 1;
    }
    t
}

static SBOX: [u8; 256] = build_sbox();

const RCON: [u8; 10] = [0x01, 0x02, 0x04, 0x08, 0x10, 0x20, 0x40, 0x80, 0x1b, 0x36];

#[cfg(test)]
mod tests {
    use super::*;

    fn h16(s: &str) -> Block {
        hex::decode(s).unwrap().try_into().unwrap()
    }

    #[test]
    fn sbox_spot_values() {
        assert_eq!(SBOX[0x00], 0x63);
        assert_eq!(SBOX[0x01], 0x7c);
        assert_eq!(SBOX[0x53], 0xed);
        assert_eq!(SBOX[0xff], 0x16);
        let mut seen = [false; 256];
        SBOX.iter().for_each(|&b| seen[b as usize] = true);
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn fips197_appendix_c1() {
        let key = AesKey128(h16("000102030405060708090a0b0c0d0e0f"));
        let ct = aes128_encrypt_block(&key, &h16("00112233445566778899aabbccddeeff"));
        assert_eq!(hex::encode(ct), "69c4e0d86a7b0430d8cdb78070b4c55a");
    }

    #[test]
    fn zero_key_zero_block() {
        let ct = aes128_encrypt_block(&AesKey128::default(), &[0; 16]);
        assert_eq!(hex::encode(ct), "66e94bd4ef8a2c3b884cfa59ca342b2e");
    }

    #[test]
    fn key_expansion_last_round_key() {
        // FIPS-197 appendix A.1 key; w[40..44].
        let ks = KeySchedule::new(&AesKey128(h16("2b7e151628aed2a6abf7158809cf4f3c")));
        assert_eq!(hex::encode(ks.round_key(10)), "d014f9a8c9ee2589e13f0cc8b6630ca6");
    }

    #[test]
    fn schedule_and_stepper_agree() {
        let key = AesKey128(h16("2b7e151628aed2a6abf7158809cf4f3c"));
        let pt = h16("3243f6a8885a308d313198a2e0370734");
        assert_eq!(KeySchedule::new(&key).encrypt(&pt), aes128_encrypt_block(&key, &pt));
        assert_eq!(hex::encode(aes128_encrypt_block(&key, &pt)), "3925841d02dc09fbdc118597196a0b32");
    }

    #[test]
    fn deterministic() {
        let key = AesKey128([7; 16]);
        assert_eq!(aes128_encrypt_block(&key, &[1; 16]), aes128_encrypt_block(&key, &[1; 16]));
    }

    #[test]
    fn ctr_block_layout() {
        let b = CtrBlock::new(&CtrConfig::default(), Iv([0xab, 0xcd]), 0x0102_0304_0506).to_bytes();
        assert_eq!(hex::encode(b), "0000000000000000abcd010203040506");
        let b = CtrBlock::new(&CtrConfig { nonce: [0xff; 8] }, Iv([0, 1]), 1).to_bytes();
        assert_eq!(hex::encode(b), "ffffffffffffffff0001000000000001");
    }

    #[test]
    fn keystream_single_block_is_one_encryption() {
        let key = AesKey128([3; 16]);
        let iv = Iv([9, 9]);
        let ks = keystream(&KeystreamRequest { key, iv, n_bytes: 16 }).unwrap();
        let expect = aes128_encrypt_block(&key, &CtrBlock::new(&CtrConfig::default(), iv, 0).to_bytes());
        assert_eq!(ks, expect);
    }

    #[test]
    fn keystream_frozen_vectors() {
        // Values from an independent implementation (python `cryptography`).
        let ks = keystream(&KeystreamRequest { key: AesKey128::default(), iv: Iv::default(), n_bytes: 32 }).unwrap();
        assert_eq!(hex::encode(ks), "66e94bd4ef8a2c3b884cfa59ca342b2e58e2fccefa7e3061367f1d57a4e7455a");
        let key = AesKey128::from_hex("000102030405060708090a0b0c0d0e0f").unwrap();
        let ks = keystream(&KeystreamRequest { key, iv: Iv([0xab, 0xcd]), n_bytes: 40 }).unwrap();
        assert_eq!(
            hex::encode(ks),
            "89f0566b1256c53e2b570f4cf724acabf55d3ef43d7c13c152b410f07ebd7c628551e1b193896d96"
        );
    }

    #[test]
    fn keystream_block_count() {
        assert_eq!(blocks_for(2916), 183);
        assert_eq!(blocks_for(16), 1);
        assert_eq!(blocks_for(17), 2);
    }

    #[test]
    fn empty_request_rejected() {
        let req = KeystreamRequest { key: AesKey128::default(), iv: Iv::default(), n_bytes: 0 };
        assert_eq!(keystream(&req), Err(PrgError::EmptyRequest));
    }

    #[test]
    fn hex_parsing() {
        assert!(AesKey128::from_hex("00").is_err());
        assert!(AesKey128::from_hex("zz0102030405060708090a0b0c0d0e0f").is_err());
        assert_eq!(Iv::from_hex("abcd").unwrap(), Iv([0xab, 0xcd]));
        let k = AesKey128::from_hex("000102030405060708090a0b0c0d0e0f").unwrap();
        assert_eq!(AesKey128::from_words(k.to_words()), k);
        assert_eq!(k.to_words()[0], 0x0001020304050607);
    }
}
