use std::fs;
use std::path::Path;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};

use rejscore::fom::{self, PlatformMetrics, ScaleOptions};
use rejscore::hwsim::{isa, standard_program, Simulator, TimingConfig};
use rejscore::kat::{self, KatError};
use rejscore::params::{builtin_params, SecLevel};
use rejscore::sampler::{rej_samp_prg_with_stats, FieldVector};
use rejscore::{AesKey128, Iv};

use crate::error::CliError;
use crate::{FomArgs, Format, SampleArgs, SeedArgs, SimulateArgs};

fn level(n: u8) -> Result<SecLevel, CliError> {
    SecLevel::from_number(n).map_err(|e| CliError::Unsupported(e.to_string()))
}

fn parse_seed(s: &str) -> Result<AesKey128, CliError> {
    AesKey128::from_hex(s).map_err(|e| CliError::Usage(format!("--seed: {e}")))
}

fn parse_iv(s: &str) -> Result<Iv, CliError> {
    Iv::from_hex(s).map_err(|e| CliError::Usage(format!("--iv: {e}")))
}

fn resolve(a: &SeedArgs) -> Result<(SecLevel, AesKey128, Iv), CliError> {
    Ok((level(a.level)?, parse_seed(&a.seed)?, parse_iv(&a.iv)?))
}

fn write_file(path: &Path, data: &[u8]) -> Result<(), CliError> {
    fs::write(path, data).map_err(CliError::io(format!("writing {}", path.display())))
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(CliError::io(format!("reading {}", path.display())))
}

fn artifact(fv: &FieldVector, level: SecLevel, format: Format) -> Vec<u8> {
    match format {
        Format::Bin => fv.to_packed_bytes(),
        Format::Csv => fv.to_csv().into_bytes(),
        Format::Json => {
            let v = json!({ "level": level.number(), "q": fv.modulus(), "n": fv.len(), "elements": fv.elems() });
            (v.to_string() + "\n").into_bytes()
        }
    }
}

/// Seeds and IVs derived from a master key; stable across runs.
fn derived_seeds(master: &AesKey128) -> impl Iterator<Item = (AesKey128, Iv)> {
    let mut material = [0u8; 32];
    material[..16].copy_from_slice(&master.0);
    material[16..].copy_from_slice(&master.0);
    let mut rng = ChaCha20Rng::from_seed(material);
    std::iter::repeat_with(move || {
        let mut k = [0u8; 16];
        rng.fill_bytes(&mut k);
        (AesKey128(k), Iv(rng.gen()))
    })
}

pub fn sample(a: &SampleArgs) -> Result<(), CliError> {
    let (level, key, iv) = resolve(&a.seed)?;
    let p = builtin_params(level);
    let (fv, stats) = rej_samp_prg_with_stats(&key, iv, &p).map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(out) = &a.out {
        write_file(out, &artifact(&fv, level, a.format))?;
    }
    println!(
        "{}",
        json!({
            "level": level.number(),
            "elements": fv.len(),
            "rejected": stats.rejected,
            "replaced": stats.replaced,
            "zero_filled": stats.zero_filled,
            "tail_skipped": stats.tail_skipped,
        })
    );
    Ok(())
}

fn timing(a: &SimulateArgs) -> TimingConfig {
    let d = TimingConfig::default();
    TimingConfig {
        aes_latency: a.aes_latency.unwrap_or(d.aes_latency),
        writeback_cycles: a.writeback_cycles.unwrap_or(d.writeback_cycles),
        per_block_overhead: a.per_block_overhead.unwrap_or(d.per_block_overhead),
        wrapper_setup_cycles: a.wrapper_setup.unwrap_or(d.wrapper_setup_cycles),
        rejsamp_setup_cycles: a.rejsamp_setup.unwrap_or(d.rejsamp_setup_cycles),
        mem_depth: a.mem_depth,
        freq_hz: a.freq,
        ..d
    }
}

pub fn simulate(a: &SimulateArgs) -> Result<(), CliError> {
    let (level, key, iv) = resolve(&a.seed)?;
    let cfg = timing(a);
    let program = match &a.program {
        Some(path) => isa::parse_program(&read_file(path)?).map_err(|e| CliError::Usage(e.to_string()))?,
        None => standard_program(level, cfg.mem_depth),
    };

    let mut sim = Simulator::new(cfg)?;
    if a.trace.is_some() {
        sim = sim.with_trace();
    }
    let out = sim.run(&program, &key, iv)?;
    if let Some(path) = &a.trace {
        write_file(path, sim.trace_csv().as_bytes())?;
    }
    if let Some(path) = &a.out {
        write_file(path, &artifact(&out.result, level, a.format))?;
    }

    let p = builtin_params(level);
    let mut report = out.report.to_json();
    report["level"] = json!(level.number());
    report["stall_cycles"] = json!(out.report.stall_cycles);
    report["self_check"] = json!("skipped");
    if !a.no_self_check {
        let golden = rejscore::rej_samp_prg(&key, iv, &p).map_err(|e| CliError::Usage(e.to_string()))?;
        if golden != out.result {
            return Err(CliError::Mismatch(format!(
                "simulator output differs from the golden sampler for seed {} iv {}",
                key.to_hex(),
                iv.to_hex()
            )));
        }
        report["self_check"] = json!("pass");
    }
    if let Some(n) = a.ci_seeds {
        let prog = standard_program(level, cfg.mem_depth);
        for (i, (k, v)) in derived_seeds(&key).take(n).enumerate() {
            let out = Simulator::new(cfg)?.run(&prog, &k, v)?;
            let golden = rejscore::rej_samp_prg(&k, v, &p).map_err(|e| CliError::Usage(e.to_string()))?;
            if golden != out.result {
                return Err(CliError::Mismatch(format!(
                    "derived seed {i} ({} iv {}) differs from the golden sampler",
                    k.to_hex(),
                    v.to_hex()
                )));
            }
        }
        report["ci_seeds_passed"] = json!(n);
    }
    println!("{report}");
    Ok(())
}

pub fn kat_generate(out: &Path, seed: &str, count: usize, levels: &[u8]) -> Result<(), CliError> {
    let master = parse_seed(seed)?;
    let levels = levels.iter().map(|&n| level(n)).collect::<Result<Vec<_>, _>>()?;
    let mut text = format!("# rejscore known-answer tests, master seed {}\n", master.to_hex());
    let mut seeds = derived_seeds(&master);
    let mut cases = 0;
    for &lvl in &levels {
        for (key, iv) in seeds.by_ref().take(count) {
            for n in [16, 33, 100] {
                text += &kat::format_case(&kat::keystream_case(key, iv, n));
                text.push('\n');
            }
            text += &kat::format_case(&kat::sample_case(key, iv, lvl));
            text.push('\n');
            cases += 4;
        }
    }
    write_file(out, text.as_bytes())?;
    println!("wrote {cases} cases to {}", out.display());
    Ok(())
}

pub fn kat_verify(path: &Path) -> Result<(), CliError> {
    let text = read_file(path)?;
    let entries = kat::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    for e in &entries {
        kat::verify(e).map_err(|err| match err {
            KatError::Mismatch { .. } => CliError::Mismatch(format!("{}: {err}", path.display())),
            KatError::Parse { .. } => CliError::Usage(err.to_string()),
        })?;
    }
    println!("{} cases verified", entries.len());
    Ok(())
}

pub fn fom(a: &FomArgs) -> Result<(), CliError> {
    let text = read_file(&a.path)?;
    let metrics: Vec<PlatformMetrics> =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", a.path.display())))?;
    let opts = ScaleOptions { target_nm: a.target_nm, um2_per_lut: a.um2_per_lut };
    let report = fom::report(&metrics, opts).map_err(|e| CliError::Usage(e.to_string()))?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    match a.format {
        Format::Json => {
            let rows: Vec<Value> = report
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "platform": r.platform,
                        "cpd_ns": r.cpd_ns,
                        "adp": r.adp,
                        "adp_3sf": fom::sig3(r.adp),
                        "adp_unit": r.adp_unit,
                        "pdp_mws": r.pdp_mws,
                        "pdp_3sf": fom::sig3(r.pdp_mws),
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&json!({ "rows": rows, "warnings": report.warnings })).unwrap());
        }
        Format::Csv => print!("{}", report.to_csv()),
        Format::Bin => return Err(CliError::Usage("fom reports support json or csv".into())),
    }
    Ok(())
}

pub fn params(lvl: Option<u8>) -> Result<(), CliError> {
    let levels = match lvl {
        Some(n) => vec![level(n)?],
        None => SecLevel::ALL.to_vec(),
    };
    let sets: Vec<Value> = levels
        .into_iter()
        .map(|l| {
            let p = builtin_params(l);
            let c = p.address_counts();
            let mut v = serde_json::to_value(p).expect("parameter sets serialize");
            v["tau_addrs"] = json!(c.tau_addrs);
            v["out_addrs"] = json!(c.out_addrs);
            v["required_mem_depth"] = json!(p.required_mem_depth());
            v
        })
        .collect();
    println!("{}", serde_json::to_string_pretty(&sets).unwrap());
    Ok(())
}
