//! QR-UOV parameter sets and the derived buffer sizes used by the sampler and
//! the simulator.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ParamsError;

/// Bytes packed into one 64-bit memory word.
pub const BYTES_PER_WORD: usize = 8;

/// NIST security level of a parameter set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SecLevel {
    SL1,
    SL3,
    SL5,
}

impl SecLevel {
    pub const ALL: [SecLevel; 3] = [SecLevel::SL1, SecLevel::SL3, SecLevel::SL5];

    /// Numeric level as used on the command line (1, 3 or 5).
    pub fn number(self) -> u8 {
        match self {
            SecLevel::SL1 => 1,
            SecLevel::SL3 => 3,
            SecLevel::SL5 => 5,
        }
    }

    pub fn from_number(n: u8) -> Result<Self, ParamsError> {
        match n {
            1 => Ok(SecLevel::SL1),
            3 => Ok(SecLevel::SL3),
            5 => Ok(SecLevel::SL5),
            other => Err(ParamsError::UnsupportedLevel(other.to_string())),
        }
    }
}

impl fmt::Display for SecLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SL{}", self.number())
    }
}

impl FromStr for SecLevel {
    type Err = ParamsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s
            .trim()
            .trim_start_matches("SL")
            .trim_start_matches("sl")
            .trim_start_matches('-');
        digits
            .parse::<u8>()
            .map_err(|_| ParamsError::UnsupportedLevel(s.to_string()))
            .and_then(SecLevel::from_number)
    }
}

/// QR-UOV parameters for one security level.
///
/// Serialized field names follow the customary symbols (`l`, `V`, `M`, ...).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterSet {
    pub sec_level: SecLevel,
    /// Field modulus, a Mersenne prime.
    pub q: u8,
    /// Extension degree.
    pub l: usize,
    #[serde(rename = "V")]
    pub vinegar_blocks: usize,
    #[serde(rename = "M")]
    pub oil_blocks: usize,
    /// Vinegar variables, `l * V`.
    pub v: usize,
    /// Oil variables, `l * M`.
    pub m: usize,
    /// Pseudorandom bytes fed to the sampler.
    pub tau: usize,
    /// Field elements produced by the sampler, `l * V * M`.
    pub n_prime: usize,
    /// Security parameter in bits (AES key width).
    pub lambda: usize,
}

impl ParameterSet {
    /// Builds a parameter set from its free symbols and checks every derived
    /// relation.
    pub fn new(
        sec_level: SecLevel,
        q: u8,
        l: usize,
        vinegar_blocks: usize,
        oil_blocks: usize,
        tau: usize,
        lambda: usize,
    ) -> Result<Self, ParamsError> {
        let p = ParameterSet {
            sec_level,
            q,
            l,
            vinegar_blocks,
            oil_blocks,
            v: l * vinegar_blocks,
            m: l * oil_blocks,
            tau,
            n_prime: l * vinegar_blocks * oil_blocks,
            lambda,
        };
        p.validate()?;
        Ok(p)
    }

    /// Checks the invariants tying derived fields to the free symbols.
    ///
    /// Deserialized parameter sets bypass [`ParameterSet::new`], so anything
    /// read from disk should go through here.
    pub fn validate(&self) -> Result<(), ParamsError> {
        if !is_mersenne(self.q) {
            return Err(ParamsError::NotMersenne(self.q));
        }
        if self.v != self.l * self.vinegar_blocks || self.m != self.l * self.oil_blocks {
            return Err(ParamsError::Inconsistent("v/m must equal l*V / l*M"));
        }
        if self.n_prime != self.l * self.vinegar_blocks * self.oil_blocks {
            return Err(ParamsError::Inconsistent("n_prime must equal l*V*M"));
        }
        if self.n_prime == 0 {
            return Err(ParamsError::Inconsistent("n_prime must be positive"));
        }
        if self.tau < self.n_prime {
            return Err(ParamsError::Inconsistent("tau must be at least n_prime"));
        }
        Ok(())
    }

    /// 64-bit words needed to hold the keystream and the packed output.
    pub fn address_counts(&self) -> AddressCounts {
        AddressCounts {
            tau_addrs: self.tau.div_ceil(BYTES_PER_WORD),
            out_addrs: self.n_prime.div_ceil(BYTES_PER_WORD),
        }
    }

    /// Minimum memory depth for the keystream region.
    pub fn required_mem_depth(&self) -> usize {
        self.address_counts().tau_addrs
    }

    /// Width in bits of the mask `q` (so `q == 2^width - 1`).
    pub fn mask_bits(&self) -> u32 {
        mersenne_exponent(self.q).expect("validated parameter set")
    }
}

/// Word counts of the two memory regions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AddressCounts {
    pub tau_addrs: usize,
    pub out_addrs: usize,
}

/// Fixed parameters for each supported level.
pub fn builtin_params(level: SecLevel) -> ParameterSet {
    let (vb, ob, tau, lambda) = match level {
        SecLevel::SL1 => (52, 18, 2916, 128),
        SecLevel::SL3 => (76, 26, 6123, 192),
        SecLevel::SL5 => (102, 35, 11018, 256),
    };
    ParameterSet::new(level, 127, 3, vb, ob, tau, lambda).expect("built-in parameters are consistent")
}

/// Returns `k` when `q == 2^k - 1` for some `k >= 2`.
pub fn mersenne_exponent(q: u8) -> Option<u32> {
    let next = q as u16 + 1;
    (q >= 3 && next.is_power_of_two()).then(|| next.trailing_zeros())
}

/// True for `q = 2^k - 1` with `2^k - 1` prime (3, 7, 31, 127 in a byte).
pub fn is_mersenne(q: u8) -> bool {
    mersenne_exponent(q).is_some() && is_prime(q)
}

fn is_prime(n: u8) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}
