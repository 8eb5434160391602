//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

mod support;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use aes::cipher::{generic_array::GenericArray, BlockEncrypt, KeyInit};
use aes::Aes128;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use rejscore::aesprg::{aes128_encrypt_block, AesKey128, Iv};
use rejscore::fom::{self, sig3, PlatformMetrics, ScaleOptions};
use rejscore::hwsim::{run_program, standard_program, TimingConfig};
use rejscore::params::{builtin_params, SecLevel};
use rejscore::sampler::{rej_samp, rej_samp_prg};
use support::{aes_inv, naive_rej_samp};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn random_key(rng: &mut ChaCha20Rng) -> (AesKey128, Iv) {
    let mut k = [0u8; 16];
    rng.fill_bytes(&mut k);
    (AesKey128(k), Iv(rng.gen()))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let p = builtin_params(SecLevel::SL1);
    let prog = standard_program(SecLevel::SL1, 1024);
    let cfg = TimingConfig::default();
    for i in 0..1000 {
        let (key, iv) = random_key(&mut rng);
        let sim = run_program(&prog, &key, iv, &cfg).map_err(|e| format!("seed {i}: {e}"))?;
        let golden = rej_samp_prg(&key, iv, &p).map_err(|e| e.to_string())?;
        ensure(sim.result == golden, format!("seed {i} ({}, {}) differs", key.to_hex(), iv.to_hex()))?;
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(120), format!("took {took:?}"))?;
    Ok(format!("1000 SL1 seeds bit-identical in {:.2} s", took.as_secs_f64()))
}

fn brute_force_listing() -> Outcome {
    let start = Instant::now();
    let alphabet = [0x00u8, 0x7f, 0xff, 0x05];
    let mut cases = 0;
    for tau in 0..=4usize {
        for code in 0..alphabet.len().pow(tau as u32) {
            let raw: Vec<u8> = (0..tau).map(|i| alphabet[(code >> (2 * i)) & 3]).collect();
            for n_prime in 0..=tau {
                let got = rej_samp(&raw, tau, n_prime, 127).map_err(|e| e.to_string())?.into_inner();
                let want = naive_rej_samp(&raw, tau, n_prime, 127);
                ensure(got == want, format!("{raw:02x?} n'={n_prime}: {got:?} != {want:?}"))?;
                cases += 1;
            }
        }
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(1), format!("took {took:?}"))?;
    Ok(format!("{cases} exhaustive cases for tau <= 4 match the listing"))
}

fn output_range() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let mut elems = 0usize;
    for i in 0..100_000 {
        let tau = rng.gen_range(1..=64);
        let n_prime = rng.gen_range(0..=tau);
        let heavy = rng.gen_bool(0.5);
        let raw: Vec<u8> = (0..tau)
            .map(|_| if heavy && rng.gen_bool(0.7) { [0x7f, 0xff][rng.gen_range(0..2)] } else { rng.gen() })
            .collect();
        let fv = rej_samp(&raw, tau, n_prime, 127).map_err(|e| format!("input {i}: {e}"))?;
        ensure(fv.elems().iter().all(|&e| e <= 126), format!("input {i} {raw:02x?} out of range"))?;
        elems += fv.len();
    }
    Ok(format!("100000 fuzzed inputs, {elems} elements, all in [0, 126]"))
}

fn aes_correctness() -> Outcome {
    let key = AesKey128::from_hex("000102030405060708090a0b0c0d0e0f").unwrap();
    let pt: [u8; 16] = hex::decode("00112233445566778899aabbccddeeff").unwrap().try_into().unwrap();
    let ct = aes128_encrypt_block(&key, &pt);
    ensure(hex::encode(ct) == "69c4e0d86a7b0430d8cdb78070b4c55a", format!("KAT gave {}", hex::encode(ct)))?;
    ensure(aes_inv::decrypt(&key.0, &ct) == pt, "reference decryptor fails the KAT")?;

    let mut rng = ChaCha20Rng::seed_from_u64(4);
    for i in 0..1000 {
        let mut k = [0u8; 16];
        let mut b = [0u8; 16];
        rng.fill_bytes(&mut k);
        rng.fill_bytes(&mut b);
        let c = aes128_encrypt_block(&AesKey128(k), &b);
        ensure(aes_inv::decrypt(&k, &c) == b, format!("round trip {i} failed"))?;
        let mut block = GenericArray::from(b);
        Aes128::new(&GenericArray::from(k)).encrypt_block(&mut block);
        ensure(block.as_slice() == c, format!("block {i} differs from the aes crate"))?;
    }
    Ok("FIPS-197 KAT and 1000 random round trips through an independent decryptor (cross-checked with the aes crate)".into())
}

fn packing_counts() -> Outcome {
    let expected = [(SecLevel::SL1, 365, 351), (SecLevel::SL3, 766, 741), (SecLevel::SL5, 1378, 1339)];
    for (level, tau_addrs, out_addrs) in expected {
        let c = builtin_params(level).address_counts();
        ensure(
            (c.tau_addrs, c.out_addrs) == (tau_addrs, out_addrs),
            format!("{level}: ({}, {})", c.tau_addrs, c.out_addrs),
        )?;
    }
    Ok("(365, 351) (766, 741) (1378, 1339)".into())
}

fn cycle_counts() -> Outcome {
    let key = AesKey128::from_hex("2b7e151628aed2a6abf7158809cf4f3c").unwrap();
    let r = run_program(&standard_program(SecLevel::SL1, 1024), &key, Iv::default(), &TimingConfig::default())
        .map_err(|e| e.to_string())?
        .report;
    ensure(
        (r.total_cycles, r.wrapper_cycles, r.rejsamp_cycles) == (8525, 4632, 3893),
        format!("SL1 default gave {}/{}/{}", r.total_cycles, r.wrapper_cycles, r.rejsamp_cycles),
    )?;

    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let mut configs = 0;
    for aes_latency in [1, 11, 21, 30] {
        for writeback_cycles in [1, 2, 3] {
            for per_block_overhead in [0, 2, 5] {
                let cfg = TimingConfig {
                    aes_latency,
                    writeback_cycles,
                    per_block_overhead,
                    wrapper_setup_cycles: rng.gen_range(2..80),
                    rejsamp_setup_cycles: rng.gen_range(0..40),
                    mem_depth: 2048,
                    ..Default::default()
                };
                for level in SecLevel::ALL {
                    let p = builtin_params(level);
                    let (key, iv) = random_key(&mut rng);
                    let out = run_program(&standard_program(level, cfg.mem_depth), &key, iv, &cfg)
                        .map_err(|e| format!("{level} {cfg:?}: {e}"))?;
                    let r = out.report;
                    ensure(r.total_cycles == r.wrapper_cycles + r.rejsamp_cycles, "decomposition identity broken")?;
                    ensure(r.wrapper_cycles == cfg.wrapper_cycles(p.tau), format!("{level} wrapper model mismatch"))?;
                    ensure(
                        r.rejsamp_cycles == cfg.rejsamp_cycles(p.n_prime) + r.stall_cycles,
                        format!("{level} sampling model mismatch"),
                    )?;
                    ensure(out.result == rej_samp_prg(&key, iv, &p).unwrap(), format!("{level} output mismatch"))?;
                    configs += 1;
                }
            }
        }
    }
    Ok(format!("SL1 8525 = 4632 + 3893; identity holds over {configs} level/timing configurations"))
}

fn latency_arithmetic() -> Outcome {
    // The quoted figures are the exact values cut to 0.1 µs.
    let cases = [(8525u64, 222e6, 38.4), (8525, 565e6, 15.0), (3893, 565e6, 6.8), (4632, 565e6, 8.1)];
    let mut shown = Vec::new();
    for (cycles, f, quoted) in cases {
        let us = fom::latency(cycles, f).map_err(|e| e.to_string())? * 1e6;
        let cut = (us * 10.0).floor() / 10.0;
        ensure((cut - quoted).abs() < 1e-9, format!("{cycles} @ {f} Hz = {us} µs, quoted {quoted}"))?;
        shown.push(format!("{cycles}@{:.0}MHz={:.3}us", f / 1e6, us));
    }
    let sl1 = fom::latency(8525, 222e6).unwrap() * 1e6;
    ensure(sig3(sl1) == "3.84e1", "38.4 µs not reproduced to 3 s.f.")?;
    Ok(format!("{} (38.4 to 3 s.f.; the 565 MHz figures match when cut to 0.1 us)", shown.join(" ")))
}

fn fom_reproduction() -> Outcome {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/metrics.json"))
        .map_err(|e| e.to_string())?;
    let metrics: Vec<PlatformMetrics> = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let report = fom::report(&metrics, ScaleOptions::default()).map_err(|e| e.to_string())?;
    let cells: Vec<(String, String)> = report.rows.iter().map(|r| (sig3(r.adp), sig3(r.pdp_mws))).collect();
    let expected = [("8.23e-4", "2.28e-10"), ("2.30e-5", "5.40e-9"), ("1.24e-4", "5.40e-9")];
    ensure(cells.len() == expected.len(), format!("{} rows", cells.len()))?;
    for ((adp, pdp), (ea, ep)) in cells.iter().zip(expected) {
        ensure(adp == ea && pdp == ep, format!("got ADP {adp} PDP {pdp}, want {ea} {ep}"))?;
    }
    ensure(report.rows[1].adp_unit == "LUT·s" && report.rows[2].adp_unit == "µm²·s", "units")?;
    ensure(report.warnings.len() == 1 && report.warnings[0].contains("1.2 W"), "missing power discrepancy warning")?;
    Ok("ADP 8.23e-4 / 2.30e-5 / 1.24e-4, PDP 2.28e-10 / 5.40e-9 / 5.40e-9, FPGA power warning raised".into())
}

fn rejection_rate() -> Outcome {
    let n = 1_000_000usize;
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    let mut buf = vec![0u8; n];
    rng.fill_bytes(&mut buf);
    let hits = buf.iter().filter(|&&b| b & 127 == 127).count();
    let p = 1.0 / 128.0;
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    let frac = hits as f64 / n as f64;
    let z = (frac - p) / sigma;
    ensure(z.abs() <= 5.0, format!("fraction {frac} is {z:.2} sigma from 1/128"))?;
    Ok(format!("fraction {frac:.6} vs 1/128 = {p:.6}, {z:+.2} sigma"))
}

fn hardware_measurements_are_inputs() -> Outcome {
    // Area, LUTs, CPD and power are never estimated; FoM outputs follow the
    // supplied figures exactly.
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/metrics.json"))
        .map_err(|e| e.to_string())?;
    let metrics: Vec<PlatformMetrics> = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    for m in &metrics {
        let doubled = PlatformMetrics {
            area_um2: m.area_um2.map(|a| 2.0 * a),
            luts: m.luts.map(|l| 2.0 * l),
            power_mw: 2.0 * m.power_mw,
            ..m.clone()
        };
        let ratio = fom::adp(&doubled).unwrap().value() / fom::adp(m).unwrap().value();
        ensure((ratio - 2.0).abs() < 1e-12, "ADP not driven by the supplied area")?;
        let ratio = fom::pdp(&doubled).unwrap().0 / fom::pdp(m).unwrap().0;
        ensure((ratio - 2.0).abs() < 1e-12, "PDP not driven by the supplied power")?;
    }
    Ok("not reproduced: slice/LUT/FF counts, area, frequency and power enter only as fom inputs".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence (SL1, 1000 seeds)", oracle_equivalence),
        ("brute-force listing equivalence", brute_force_listing),
        ("output range", output_range),
        ("AES-128 correctness", aes_correctness),
        ("packing counts", packing_counts),
        ("cycle counts", cycle_counts),
        ("latency arithmetic", latency_arithmetic),
        ("FoM reproduction", fom_reproduction),
        ("rejection-rate statistic", rejection_rate),
        ("hardware measurements are inputs", hardware_measurements_are_inputs),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
