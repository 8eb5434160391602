//! Test-only helpers that do not share code with the library.

#![allow(dead_code)]

/// Straightforward AES-128 inverse cipher built from exp/log tables.
pub mod aes_inv {
    use std::sync::OnceLock;

    fn tables() -> ([u8; 256], [u8; 256]) {
        static T: OnceLock<([u8; 256], [u8; 256])> = OnceLock::new();
        *T.get_or_init(build_tables)
    }

    fn build_tables() -> ([u8; 256], [u8; 256]) {
        let mut exp = [0u8; 256];
        let mut log = [0u8; 256];
        let mut x: u8 = 1;
        for (i, e) in exp.iter_mut().take(255).enumerate() {
            *e = x;
            log[x as usize] = i as u8;
            // multiply by the generator 3
            x ^= (x << 1) ^ if x & 0x80 != 0 { 0x1b } else { 0 };
        }
        exp[255] = exp[0];
        (exp, log)
    }

    fn mul(a: u8, b: u8) -> u8 {
        let (exp, log) = tables();
        if a == 0 || b == 0 {
            0
        } else {
            exp[(log[a as usize] as usize + log[b as usize] as usize) % 255]
        }
    }

    pub fn sbox() -> [u8; 256] {
        let (exp, log) = tables();
        let mut s = [0u8; 256];
        for a in 0..256usize {
            let inv = if a == 0 { 0 } else { exp[(255 - log[a] as usize) % 255] };
            let mut b = inv;
            let mut r = inv;
            for _ in 0..4 {
                b = b.rotate_left(1);
                r ^= b;
            }
            s[a] = r ^ 0x63;
        }
        s
    }

    pub fn inv_sbox() -> [u8; 256] {
        let s = sbox();
        let mut inv = [0u8; 256];
        for (i, &v) in s.iter().enumerate() {
            inv[v as usize] = i as u8;
        }
        inv
    }

    pub fn expand(key: &[u8; 16]) -> [[u8; 16]; 11] {
        let s = sbox();
        let mut w = [[0u8; 4]; 44];
        for i in 0..4 {
            w[i].copy_from_slice(&key[4 * i..4 * i + 4]);
        }
        let mut rcon = 1u8;
        for i in 4..44 {
            let mut t = w[i - 1];
            if i % 4 == 0 {
                t = [s[t[1] as usize] ^ rcon, s[t[2] as usize], s[t[3] as usize], s[t[0] as usize]];
                rcon = mul(rcon, 2);
            }
            for j in 0..4 {
                w[i][j] = w[i - 4][j] ^ t[j];
            }
        }
        let mut rk = [[0u8; 16]; 11];
        for r in 0..11 {
            for c in 0..4 {
                rk[r][4 * c..4 * c + 4].copy_from_slice(&w[4 * r + c]);
            }
        }
        rk
    }

    pub fn decrypt(key: &[u8; 16], ct: &[u8; 16]) -> [u8; 16] {
        let rk = expand(key);
        let inv = inv_sbox();
        let mut s = *ct;
        let xor = |s: &mut [u8; 16], k: &[u8; 16]| s.iter_mut().zip(k).for_each(|(a, b)| *a ^= b);
        let inv_shift = |s: &mut [u8; 16]| {
            let t = *s;
            for c in 0..4 {
                for r in 0..4 {
                    s[4 * ((c + r) % 4) + r] = t[4 * c + r];
                }
            }
        };
        let inv_mix = |s: &mut [u8; 16]| {
            for c in 0..4 {
                let a: [u8; 4] = s[4 * c..4 * c + 4].try_into().unwrap();
                for r in 0..4 {
                    s[4 * c + r] = mul(a[r], 14)
                        ^ mul(a[(r + 1) % 4], 11)
                        ^ mul(a[(r + 2) % 4], 13)
                        ^ mul(a[(r + 3) % 4], 9);
                }
            }
        };
        xor(&mut s, &rk[10]);
        for round in (1..10).rev() {
            inv_shift(&mut s);
            s.iter_mut().for_each(|b| *b = inv[*b as usize]);
            xor(&mut s, &rk[round]);
            inv_mix(&mut s);
        }
        inv_shift(&mut s);
        s.iter_mut().for_each(|b| *b = inv[*b as usize]);
        xor(&mut s, &rk[0]);
        s
    }
}

/// Line-by-line transcription of the rejection-sampling listing, 1-based,
/// with `v[tau + 1]` as a sentinel that never equals `q`.
pub fn naive_rej_samp(r: &[u8], tau: usize, n_prime: usize, q: u8) -> Vec<u8> {
    let mut v = vec![0u8; tau + 2];
    for j in 1..=tau {
        v[j] = r[j - 1] & q;
    }
    v[tau + 1] = 0;
    let mut k = n_prime + 1;
    while v[k] == q && k < tau + 1 {
        k += 1;
    }
    for j in 1..=n_prime {
        if v[j] == q {
            if k < tau + 1 {
                v[j] = v[k];
                k += 1;
                while v[k] == q && k < tau + 1 {
                    k += 1;
                }
            } else {
                v[j] = 0;
            }
        }
    }
    v[1..=n_prime].to_vec()
}
