//! One function per subcommand. Runners log protocol events into the
//! shared transcript and return summary rows plus an honest-ledger
//! violation count.

use crate::{Cfg, RunOutcome};
use bsfe_core::algebra::BitVector;
use bsfe_core::bcs_fe::{
    bcsfe_dec, bcsfe_enc, bcsfe_ek_receive, bcsfe_fk_receive, bcsfe_keygen, circuit_class,
    encode_function, identity_tag, wgb_from_fe_eval, wgb_from_fe_obfuscate, BcsParams,
};
use bsfe_core::bcsm::BitLedger;
use bsfe_core::bqs_fe::{
    bqsfe_dec, bqsfe_enc, bqsfe_mk_phase, bqsfe_mk_receive, bqsfe_pk_phase, bqsfe_pk_receive,
    bqsfe_setup, BqsFeParams, EncBackend, CANONICAL_ENC_BITS,
};
use bsfe_core::broadcast::{br_setup, BroadcastConfig};
use bsfe_core::cbqs_fe::{cbqsfe_dec, cbqsfe_enc, cbqsfe_keygen, cbqsfe_setup, CbqsParams};
use bsfe_core::channel::MemoryLedger;
use bsfe_core::circuits::{fixtures, parse_circuit, BooleanCircuit, CircuitBuilder};
use bsfe_core::garble::{gcircuit, geval, GarbleParams};
use bsfe_core::harness::{run_experiment, ExperimentSpec};
use bsfe_core::ot::{ot_receive, ot_send, OtParams};
use bsfe_core::otp::{kil_create, otp_yao_receive, otp_yao_send, OtpParams};
use bsfe_core::signatures::SigParams;
use bsfe_core::universal::ClassSpec;
use bsfe_core::Transcript;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Runner = fn(&Cfg, &mut Transcript) -> Result<RunOutcome, String>;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn load_circuit(cfg: &Cfg, default: &str) -> Result<BooleanCircuit, String> {
    let name = cfg.str("circuit", default);
    Ok(match name.as_str() {
        "and2" => fixtures::and2(),
        "xor2" => fixtures::xor2(),
        "not1" => fixtures::not1(),
        "parity3" => fixtures::parity3(),
        "majority3" => fixtures::majority3(),
        path => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
            parse_circuit(&text).map_err(|e| format!("{path}: {e}"))?
        }
    })
}

fn parse_input(cfg: &Cfg, key: &str, want: usize) -> Result<Option<BitVector>, String> {
    let Some(text) = cfg.opt(key) else { return Ok(None) };
    if text.len() != want || !text.chars().all(|c| c == '0' || c == '1') {
        return Err(format!("`{key}` must be {want} bits of 0/1, got `{text}`"));
    }
    let bits: Vec<u8> = text.chars().map(|c| (c == '1') as u8).collect();
    Ok(Some(BitVector::from_bits(&bits)))
}

fn row(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

pub fn run_ot(cfg: &Cfg, tr: &mut Transcript) -> Result<RunOutcome, String> {
    let ell = cfg.usize("l", 8)?;
    let s = cfg.usize("s", 32)?;
    let standard = OtParams::standard(ell, s);
    let m = cfg.usize("m", standard.m)?;
    let params = OtParams { m, ell, s };
    params.validate().map_err(|e| e.to_string())?;
    let trials = cfg.u64("trials", 10)?;
    let seed = cfg.seed()?;

    let mut exact = 0u64;
    for trial in 0..trials {
        let mut rng = rng_for(seed, trial);
        let s0 = BitVector::random(ell, &mut rng);
        let s1 = BitVector::random(ell, &mut rng);
        let c = (trial % 2) as u8;
        let (msg, ann) = ot_send(&s0, &s1, &params, &mut rng, tr).map_err(|e| e.to_string())?;
        let got = ot_receive(c, msg, &ann, &mut rng, tr).map_err(|e| e.to_string())?;
        if got == if c == 0 { s0 } else { s1 } {
            exact += 1;
        }
    }
    Ok(RunOutcome {
        summary: vec![
            row("scenario", "run-ot"),
            row("m", params.m),
            row("trials", trials),
            row("exact", exact),
        ],
        violations: 0,
    })
}

pub fn run_otp(cfg: &Cfg, tr: &mut Transcript) -> Result<RunOutcome, String> {
    let c = load_circuit(cfg, "majority3")?;
    let params = OtpParams::new(cfg.usize("l", 8)?, cfg.usize("s", 16)?);
    let mut rng = rng_for(cfg.seed()?, 0);
    let n = c.n_inputs as usize;
    let x = match parse_input(cfg, "input", n)? {
        Some(x) => x,
        None => BitVector::random(n, &mut rng),
    };
    let tx = otp_yao_send(&c, params, &mut rng, tr).map_err(|e| e.to_string())?;
    let y = otp_yao_receive(tx, &x, &mut rng, tr).map_err(|e| e.to_string())?;
    let expect = c.eval(&x).map_err(|e| e.to_string())?;
    Ok(RunOutcome {
        summary: vec![
            row("scenario", "run-otp"),
            row("inputs", n),
            row("output", format!("{y:?}")),
            row("exact", y == expect),
        ],
        violations: 0,
    })
}

pub fn run_bqs_fe(cfg: &Cfg, tr: &mut Transcript) -> Result<RunOutcome, String> {
    let lambda = cfg.usize("lambda", 8)? as u32;
    let w = cfg.usize("w", 64)? as u32;
    let s = cfg.usize("s", 32)? as u64;
    let r = cfg.usize("r", 2)? as u64;
    let ell = cfg.usize("ell", 16)? as u32;
    let p = BqsFeParams::new(lambda, w, s, r).map_err(|e| e.to_string())?.with_ell(ell);
    let c = load_circuit(cfg, "majority3")?;
    let mut rng = rng_for(cfg.seed()?, 0);

    let budget = 24 * ((s as f64 / r as f64).sqrt().ceil() as usize);
    let msec = bqsfe_setup(p, &mut rng).map_err(|e| e.to_string())?;
    let mut pk = bqsfe_pk_phase(&msec, tr);
    let mut mk = bqsfe_mk_phase(&msec, tr);
    let mut ledger = MemoryLedger::new(budget);
    let k_v = bqsfe_pk_receive(&mut pk, &p, &mut rng, &mut ledger, tr).map_err(|e| e.to_string())?;
    let sk = bqsfe_mk_receive(&mut mk, &c, &p, &mut ledger, tr).map_err(|e| e.to_string())?;

    let mu = BitVector::random(c.n_inputs as usize, &mut rng);
    let backend = match cfg.str("backend", "kil").as_str() {
        "kil" => EncBackend::Kil,
        "yao" => EncBackend::Yao {
            spec: ClassSpec {
                n_inputs: c.n_inputs,
                gates: c.gates.len(),
                n_outputs: c.outputs.len(),
                width: CANONICAL_ENC_BITS,
            },
            otp: OtpParams::new(p.ell() as usize, 2),
        },
        other => return Err(format!("unknown backend `{other}`")),
    };
    let mut ct = bqsfe_enc(&k_v, &mu, backend, &p, &mut rng, tr).map_err(|e| e.to_string())?;
    let got = bqsfe_dec(&c, &sk, &mut ct, &p, &mut rng, tr).map_err(|e| e.to_string())?;
    let expect = c.eval(&mu).map_err(|e| e.to_string())?;

    Ok(RunOutcome {
        summary: vec![
            row("scenario", "run-bqs-fe"),
            row("m", p.m()),
            row("mr", p.mr()),
            row("exact", got == Some(expect)),
            row("peak", ledger.peak()),
            row("budget", budget),
        ],
        violations: ledger.violations().len() as u64,
    })
}

pub fn run_cbqs_fe(cfg: &Cfg, tr: &mut Transcript) -> Result<RunOutcome, String> {
    let p = CbqsParams {
        sig: SigParams::new(cfg.usize("lambda", 8)?, 2),
        class: ClassSpec { n_inputs: 3, gates: 6, n_outputs: 1, width: 288 },
        otp: OtpParams::new(cfg.usize("l", 8)?, cfg.usize("s", 16)?),
    };
    let c = load_circuit(cfg, "majority3")?;
    let mut rng = rng_for(cfg.seed()?, 0);
    let mut keys = cbqsfe_setup(&p, &mut rng);
    let sk = cbqsfe_keygen(&mut keys.mk, &c, &p).map_err(|e| e.to_string())?;
    let mu = match parse_input(cfg, "input", 3)? {
        Some(x) => x,
        None => BitVector::random(3, &mut rng),
    };
    let ct = cbqsfe_enc(&keys.pk, &mu, &p, &mut rng, tr).map_err(|e| e.to_string())?;
    let got = cbqsfe_dec(&sk, &keys.pk, ct, &p, &mut rng, tr).map_err(|e| e.to_string())?;
    let expect = c.eval(&mu).map_err(|e| e.to_string())?;
    Ok(RunOutcome {
        summary: vec![row("scenario", "run-cbqs-fe"), row("exact", got == Some(expect))],
        violations: 0,
    })
}

pub fn run_bcs_fe(cfg: &Cfg, tr: &mut Transcript) -> Result<RunOutcome, String> {
    let p = BcsParams::new(
        cfg.usize("n", 256)?,
        cfg.usize("lambda", 16)?,
        cfg.usize("ell", 240)?,
    )
    .map_err(|e| e.to_string())?;
    let c = load_circuit(cfg, "majority3")?;
    let mut rng = rng_for(cfg.seed()?, 0);

    let mut dist = BitLedger::new(2 * p.row_bits());
    let (master, dist_key) = bcsfe_keygen(&p, &mut rng, &mut dist, tr);
    let mut ek_ledger = BitLedger::new(p.honest_budget());
    let k_v = bcsfe_ek_receive(&mut master.stream(), &p, &mut rng, &mut ek_ledger, tr)
        .map_err(|e| e.to_string())?;

    let mu = match parse_input(cfg, "input", c.n_inputs as usize)? {
        Some(x) => x,
        None => BitVector::random(c.n_inputs as usize, &mut rng),
    };
    let (_, mut handle) = bcsfe_enc(k_v, &mu, circuit_class(&p), &p, tr);

    let c_vec = encode_function(&c, &p).map_err(|e| e.to_string())?;
    let mut fk_ledger = BitLedger::new(p.honest_budget());
    let sk_c = bcsfe_fk_receive(&mut master.stream(), &c_vec, &p, &mut fk_ledger, tr)
        .map_err(|e| e.to_string())?;
    let got = bcsfe_dec(&sk_c, &c_vec, &mut handle, tr).map_err(|e| e.to_string())?;
    let id = bcsfe_dec(&dist_key.sk, &identity_tag(&p), &mut handle, tr)
        .map_err(|e| e.to_string())?;
    let expect = c.eval(&mu).map_err(|e| e.to_string())?;

    Ok(RunOutcome {
        summary: vec![
            row("scenario", "run-bcs-fe"),
            row("stream_bits", master.bits().len()),
            row("function_branch", got == Some(expect)),
            row("identity_branch", id == Some(mu)),
        ],
        violations: (dist.violations() + ek_ledger.violations() + fk_ledger.violations()) as u64,
    })
}

fn default_wgb_circuit() -> BooleanCircuit {
    // (x0 & x1) ^ (x2 | x3)
    let mut b = CircuitBuilder::new(4);
    let xs = b.inputs();
    let a = b.and(xs[0], xs[1]);
    let o = b.or(xs[2], xs[3]);
    let y = b.xor(a, o);
    b.finish(vec![y]).expect("default circuit")
}

pub fn run_wgb(cfg: &Cfg, tr: &mut Transcript) -> Result<RunOutcome, String> {
    let p = BcsParams::new(cfg.usize("n", 8)?, cfg.usize("lambda", 16)?, cfg.usize("ell", 4)?)
        .map_err(|e| e.to_string())?;
    let c = match cfg.opt("circuit") {
        Some(_) => load_circuit(cfg, "")?,
        None => default_wgb_circuit(),
    };
    let spec = ClassSpec {
        n_inputs: c.n_inputs,
        gates: c.gates.len().max(8),
        n_outputs: c.outputs.len(),
        width: 352,
    };
    let mut rng = rng_for(cfg.seed()?, 0);
    let mut obf = wgb_from_fe_obfuscate(&c, spec, &p, &mut rng, tr).map_err(|e| e.to_string())?;

    let n = c.n_inputs as usize;
    let (mut checked, mut exact) = (0u64, 0u64);
    let inputs: Vec<BitVector> = match parse_input(cfg, "input", n)? {
        Some(x) => vec![x],
        None => (0..1u64 << n).map(|x| BitVector::from_fn(n, |i| ((x >> i) & 1) as u8)).collect(),
    };
    for x in inputs {
        let got = wgb_from_fe_eval(&mut obf, &x, tr).map_err(|e| e.to_string())?;
        checked += 1;
        if got == Some(c.eval(&x).map_err(|e| e.to_string())?) {
            exact += 1;
        }
    }
    Ok(RunOutcome {
        summary: vec![
            row("scenario", "run-wgb"),
            row("evaluations", checked),
            row("exact", exact),
        ],
        violations: 0,
    })
}

pub fn attack(scenario: &str, cfg: &Cfg, tr: &mut Transcript) -> Result<RunOutcome, String> {
    let default_strategy = match scenario {
        "ot-sender" => "fixed-basis",
        "cbqs-ind" => "random-guess",
        "bcs-forget" => "prefix",
        other => return Err(format!("unknown attack scenario `{other}`")),
    };
    let mut spec = ExperimentSpec::new(
        scenario,
        &cfg.str("strategy", default_strategy),
        cfg.u64("trials", 1000)?,
        cfg.seed()?,
    );
    for (key, param) in
        [("l", "ell"), ("s", "s"), ("m", "m"), ("store", "store"), ("n", "n"), ("reveal", "reveal")]
    {
        if let Some(v) = cfg.opt(key) {
            let v: f64 = v.parse().map_err(|_| format!("bad value for `{key}`: {v}"))?;
            spec = spec.with_param(param, v);
        }
    }
    let r = run_experiment(&spec, tr).map_err(|e| e.to_string())?;
    Ok(RunOutcome {
        summary: vec![
            row("scenario", &r.scenario),
            row("strategy", &r.strategy),
            row("successes", format!("{}/{}", r.successes, r.trials)),
            row("estimate", format!("{:.4}", r.estimate)),
            row("wilson95", format!("[{:.4}, {:.4}]", r.wilson_low, r.wilson_high)),
        ],
        violations: r.ledger_violations,
    })
}

pub fn selftest(cfg: &Cfg, tr: &mut Transcript) -> Result<RunOutcome, String> {
    let seed = cfg.seed()?;
    let mut rows = Vec::new();
    let mut check = |name: &str, ok: bool| {
        rows.push(row(name, if ok { "pass" } else { "FAIL" }));
        if ok {
            Ok(())
        } else {
            Err(format!("selftest: {name} failed"))
        }
    };

    // transfer delivers the chosen branch exactly
    let params = OtParams::standard(8, 32);
    let mut ok = true;
    for trial in 0..100u64 {
        let mut rng = rng_for(seed, trial);
        let s0 = BitVector::random(8, &mut rng);
        let s1 = BitVector::random(8, &mut rng);
        let c = (trial % 2) as u8;
        let (msg, ann) = ot_send(&s0, &s1, &params, &mut rng, tr).map_err(|e| e.to_string())?;
        let got = ot_receive(c, msg, &ann, &mut rng, tr).map_err(|e| e.to_string())?;
        ok &= got == if c == 0 { s0 } else { s1 };
    }
    check("ot round trips", ok)?;

    // garbling agrees with plain evaluation
    let mut rng = rng_for(seed, 1000);
    let gp = GarbleParams { label_bits: 16, tag_bits: 16 };
    let mut ok = true;
    for c in [fixtures::and2(), fixtures::xor2(), fixtures::parity3(), fixtures::majority3()] {
        let n = c.n_inputs as usize;
        let (gc, key) = gcircuit(&c, gp, &mut rng);
        for x in 0..1u64 << n {
            let input = BitVector::from_fn(n, |i| ((x >> i) & 1) as u8);
            let labels = key.ginput_all(&input).map_err(|e| e.to_string())?;
            ok &= geval(&gc, &labels).map_err(|e| e.to_string())?
                == c.eval(&input).map_err(|e| e.to_string())?;
        }
    }
    check("garbling exhaustive", ok)?;

    // ideal one-time handle refuses a second evaluation
    let mut h = kil_create(fixtures::xor2());
    let x = BitVector::from_bits(&[1, 1]);
    let once = h.eval(&x).is_ok();
    let twice = h.eval(&x).is_err();
    check("one-time handle", once && twice)?;

    // broadcast cap at s/(2 m_out)
    let h = br_setup(
        Box::new(|x: &BitVector| x.clone()),
        16,
        1,
        128,
        BroadcastConfig::default(),
        tr,
    );
    check("broadcast cap", h.adversary_budget() == 4)?;

    // scheme round trips
    let bqs = run_bqs_fe(&Cfg { map: Default::default() }, tr)?;
    check("bqs-fe round trip", bqs.violations == 0)?;
    let bcs = run_bcs_fe(&Cfg { map: Default::default() }, tr)?;
    check("bcs-fe round trip", bcs.violations == 0)?;

    Ok(RunOutcome { summary: rows, violations: 0 })
}
