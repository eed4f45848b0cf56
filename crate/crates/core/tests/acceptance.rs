//! Acceptance checks. Runs without the libtest harness so every criterion
//! prints its own PASS/FAIL line; exits nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cvbench::fock::{build_states, moment_form, oracle_average_noise, oracle_hybrid_check, FockState, OracleConfig};
use cvbench::montecarlo::{certify, run_experiment, ExperimentConfig};
use cvbench::{
    average_fidelity_gaussian, average_noise, average_noise_gaussian, average_noise_mp, choi_state,
    evaluate_bounds, find_violation, hybrid_lhs, mp_from_benchmark, mp_noise_closed_form,
    params_from_hybrid, BenchmarkParams, Channel, CoherentAmplitude, GaussianChannelSpec,
    HybridTestParams, NoiseReport, StateKind,
};

type Check = fn() -> Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sym(eta: f64, lambda: f64) -> BenchmarkParams {
    BenchmarkParams::symmetric(eta, lambda).unwrap()
}

fn one_quadrature_threshold() -> Result<String, String> {
    let report = NoiseReport::new(1.0, 0.5);
    for lambda in [0.0, 1.0, 3.9] {
        let v = evaluate_bounds(&report, &sym(1.0, lambda)).map_err(|e| e.to_string())?.product;
        ensure(v.violated, || format!("λ={lambda}: expected violation, margin {}", v.margin))?;
    }
    for lambda in [4.0, 5.0] {
        let v = evaluate_bounds(&report, &sym(1.0, lambda)).map_err(|e| e.to_string())?.product;
        ensure(!v.violated, || format!("λ={lambda}: unexpected violation, margin {}", v.margin))?;
    }
    let edge = evaluate_bounds(&report, &sym(1.0, 4.0)).unwrap().product;
    let raw = edge.rhs - edge.lhs;
    ensure(raw.abs() <= 1e-12, || format!("margin at λ=4 is {raw:e}"))?;
    Ok(format!("margin at λ=4: {raw:e}"))
}

fn converse_witness() -> Result<String, String> {
    let mut worst_inside = f64::INFINITY;
    let mut worst_edge = f64::NEG_INFINITY;
    for gain in [0.1f64, 0.5, 1.0, 2.0, 3.0] {
        let edge = gain.min(1.0);
        let inside = GaussianChannelSpec::from_gain_noise(gain, 0.9 * edge).unwrap();
        let found = find_violation(&inside).map_err(|e| e.to_string())?;
        ensure(found.verdict.margin > 0.0, || format!("G={gain}: no violation found ({:?})", found.verdict))?;
        worst_inside = worst_inside.min(found.verdict.margin);

        let boundary = GaussianChannelSpec::from_gain_noise(gain, edge).unwrap();
        let found = find_violation(&boundary).map_err(|e| e.to_string())?;
        ensure(found.verdict.margin <= 0.0, || format!("G={gain} at the EB edge: margin {}", found.verdict.margin))?;
        worst_edge = worst_edge.max(found.verdict.margin);
    }
    Ok(format!("smallest margin inside {worst_inside:.3e}, largest at edge {worst_edge:.3e}"))
}

fn saturation() -> Result<String, String> {
    let etas = [0.1, 0.5, 1.0, 2.5, 7.0];
    let lambdas = [0.01, 0.2, 1.0, 3.0, 10.0];
    let balances = [-1.0, -0.3, 0.0, 0.4, 1.2];
    let mut worst: f64 = 0.0;
    for &eta in &etas {
        for &lambda in &lambdas {
            for &big_r in &balances {
                let (vx, vp) = mp_noise_closed_form(eta, lambda, big_r).unwrap();
                let v = evaluate_bounds(&NoiseReport::new(vx, vp), &sym(eta, lambda)).unwrap().product;
                let gap = v.lhs - v.rhs;
                worst = worst.max(gap.abs());
                ensure(gap.abs() <= 1e-12, || format!("product (η,λ,R)=({eta},{lambda},{big_r}): gap {gap:e}"))?;
            }
            // Sum form, saturated by the unsqueezed map evaluated from its definition.
            let p = sym(eta, lambda);
            let spec = mp_from_benchmark(eta, lambda, 0.0, 0.0).unwrap();
            let r = average_noise_mp(&spec, &p).unwrap();
            let s = evaluate_bounds(&r, &p).unwrap().sum;
            let gap = s.lhs - s.rhs;
            worst = worst.max(gap.abs());
            ensure(gap.abs() <= 1e-12, || format!("sum (η,λ)=({eta},{lambda}): gap {gap:e}"))?;
        }
    }
    // Unequal gains: the output-squeezed map with q = ln(g_p/g_x)/2.
    for &g_x in &[0.3, 1.0, 2.0] {
        for &g_p in &[0.5, 1.0, 3.0] {
            for &lambda in &[0.05, 1.0, 6.0] {
                for &r in &[0.0, 0.7] {
                    let p = BenchmarkParams::new(lambda, g_x, g_p).unwrap();
                    let spec = mp_from_benchmark(p.eta(), lambda, r, p.balance()).unwrap();
                    let report = average_noise_mp(&spec, &p).unwrap();
                    let v = evaluate_bounds(&report, &p).unwrap().product;
                    let gap = v.lhs - v.rhs;
                    worst = worst.max(gap.abs());
                    ensure(gap.abs() <= 1e-12, || format!("asymmetric ({g_x},{g_p},{lambda},r={r}): gap {gap:e}"))?;
                }
            }
        }
    }
    Ok(format!("largest |lhs − rhs| {worst:.2e}"))
}

fn two_shot_noise_units() -> Result<String, String> {
    let p = sym(1.0, 1e-6);
    let spec = mp_from_benchmark(1.0, 1e-6, 0.0, 0.0).unwrap();
    let analytic = average_noise_mp(&spec, &p).unwrap();
    for v in [analytic.v_x, analytic.v_p] {
        ensure((v - 1.5).abs() <= 1e-5, || format!("analytic {v}"))?;
    }
    let config = ExperimentConfig::new(1_000_000, 20140117, p).unwrap();
    let est = run_experiment(&Channel::MeasurePrepare(spec), &config).map_err(|e| e.to_string())?;
    let zx = (est.v_x - analytic.v_x) / est.se_x;
    let zp = (est.v_p - analytic.v_p) / est.se_p;
    ensure(zx.abs() <= 4.0 && zp.abs() <= 4.0, || format!("Monte Carlo ({}, {}) is ({zx:.2}, {zp:.2}) se away", est.v_x, est.v_p))?;
    Ok(format!("analytic ({:.8}, {:.8}); Monte Carlo ({:.5}, {:.5}), z = ({zx:.2}, {zp:.2})", analytic.v_x, analytic.v_p, est.v_x, est.v_p))
}

fn oracle_equivalence() -> Result<String, String> {
    let config = OracleConfig::default();
    let p = sym(1.0, 1.0);
    let channels: Vec<(&str, Channel)> = vec![
        ("identity", GaussianChannelSpec::identity().into()),
        ("attenuator", GaussianChannelSpec::from_gain_noise(0.5, 0.4).unwrap().into()),
        ("amplifier", GaussianChannelSpec::from_gain_noise(2.0, 0.5).unwrap().into()),
        ("mp r=0", mp_from_benchmark(1.0, 1.0, 0.0, 0.0).unwrap().into()),
        ("mp r=0.3", mp_from_benchmark(1.0, 1.0, 0.3, 0.0).unwrap().into()),
    ];
    let mut worst: f64 = 0.0;
    for (name, channel) in &channels {
        let exact = average_noise(channel, &p).unwrap();
        let oracle = oracle_average_noise(channel, &p, &config).map_err(|e| format!("{name}: {e}"))?;
        let dev = (oracle.v_x - exact.v_x).abs().max((oracle.v_p - exact.v_p).abs());
        worst = worst.max(dev);
        ensure(dev <= 1e-5, || format!("{name}: oracle ({}, {}) vs ({}, {})", oracle.v_x, oracle.v_p, exact.v_x, exact.v_p))?;
    }

    let d = config.cutoff;
    let coherent = |re: f64, im: f64| build_states(&StateKind::Coherent { alpha: CoherentAmplitude::new(re, im) }, d).unwrap();
    let squeezed = build_states(&StateKind::SqueezedCoherent { alpha: CoherentAmplitude::new(0.3, -0.2), r: 0.4 }, d).unwrap();
    let pairs = [(0.4, 0.1), (-0.3, 0.5), (0.0, -0.6)];
    let classical = FockState::mixture(
        &pairs
            .iter()
            .map(|&(re, im)| (1.0 / 3.0, FockState::product(&coherent(re, im), &coherent(re, -im)).unwrap()))
            .collect::<Vec<_>>(),
    )
    .unwrap();
    let states = [
        ("tmss 0.3", build_states(&StateKind::TwoModeSqueezed { xi: 0.3 }, d).unwrap()),
        ("tmss 0.5", build_states(&StateKind::TwoModeSqueezed { xi: 0.5 }, d).unwrap()),
        ("squeezed x coherent", FockState::product(&squeezed, &coherent(0.2, 0.1)).unwrap()),
        ("coherent mixture", classical),
    ];
    let mut literal_worst: f64 = 0.0;
    for (name, j) in &states {
        for theta in [0.2, 0.785, 1.3] {
            let (u, v) = (f64::cos(theta), f64::sin(theta));
            let literal = oracle_hybrid_check(j, u, v, &config).map_err(|e| format!("{name}: {e}"))?;
            let (mx, mp) = moment_form(j, u, v).unwrap();
            let dev = (literal.term_x - mx).abs().max((literal.term_p - mp).abs());
            literal_worst = literal_worst.max(dev);
            ensure(dev <= 1e-6, || format!("{name} θ={theta}: literal ({}, {}) vs moments ({mx}, {mp})", literal.term_x, literal.term_p))?;
        }
    }
    Ok(format!("noise deviation {worst:.2e}; literal vs moment form {literal_worst:.2e}"))
}

fn proof_consistency() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for draw in 0..50 {
        let t_x: f64 = rng.random_range(-2.0..2.0);
        let t_p: f64 = rng.random_range(-2.0..2.0);
        let need = (1.0 - t_x * t_p).abs() / 2.0;
        let n_x = need + rng.random_range(0.0..1.0);
        let n_p = need + rng.random_range(0.0..1.0);
        let spec = GaussianChannelSpec::new(t_x, t_p, n_x, n_p).unwrap();
        let xi = rng.random_range(0.05..0.95);
        let u: f64 = rng.random_range(0.05..1.0);
        let v = (1.0 - u * u).sqrt();
        let hp = HybridTestParams::new(xi, u, v).unwrap();
        let h = hybrid_lhs(&choi_state(&spec, xi).unwrap(), &hp).unwrap();
        let params = params_from_hybrid(&hp).unwrap();
        let noise = average_noise_gaussian(&spec, &params).unwrap();
        // The coherent-basis integral is the second moment plus v²/2.
        for (term, vbar) in [(h.term_x, noise.v_x), (h.term_p, noise.v_p)] {
            let dev = (term + v * v / 2.0 - u * u * vbar).abs();
            worst = worst.max(dev);
            ensure(dev <= 1e-10, || format!("draw {draw}: {spec:?} ξ={xi} u={u}: off by {dev:e}"))?;
        }
        let bracket = u.powi(4) * (noise.v_x - params.offset(cvbench::Quadrature::X)) * (noise.v_p - params.offset(cvbench::Quadrature::P));
        ensure((h.product - bracket).abs() <= 1e-10 * bracket.abs().max(1.0), || format!("draw {draw}: product {} vs {bracket}", h.product))?;
    }
    Ok(format!("largest deviation {worst:.2e} over 50 draws"))
}

fn statistical_soundness() -> Result<String, String> {
    let teleport = Channel::Gaussian(GaussianChannelSpec::classical_teleportation());
    let identity = Channel::Gaussian(GaussianChannelSpec::identity());
    let mut false_alarms = 0;
    let mut hits = 0;
    for seed in 0..200u64 {
        let c = ExperimentConfig::new(200_000, seed, sym(1.0, 0.01)).unwrap();
        let est = run_experiment(&teleport, &c).unwrap();
        false_alarms += certify(&est, &c.params, 0.95).unwrap().certified() as u32;

        let c = ExperimentConfig::new(200_000, 1_000 + seed, sym(1.0, 1.0)).unwrap();
        let est = run_experiment(&identity, &c).unwrap();
        hits += certify(&est, &c.params, 0.95).unwrap().certified() as u32;
    }
    ensure(false_alarms <= 10, || format!("{false_alarms}/200 certifications of an EB channel"))?;
    ensure(hits == 200, || format!("identity certified in {hits}/200 runs"))?;
    Ok(format!("teleportation certified {false_alarms}/200, identity {hits}/200"))
}

fn fidelity_relation() -> Result<String, String> {
    let mut specs = vec![GaussianChannelSpec::identity(), GaussianChannelSpec::classical_teleportation()];
    for gain in [0.2, 0.5, 1.0, 1.5, 3.0] {
        for excess in [0.0, 0.3, 1.0] {
            specs.push(GaussianChannelSpec::from_gain_noise(gain, excess).unwrap());
        }
    }
    specs.push(GaussianChannelSpec::new(0.8, 1.2, 0.3, 0.2).unwrap());
    specs.push(GaussianChannelSpec::new(1.0, 1.0, 1.0, 0.0).unwrap());
    let mut slack = f64::INFINITY;
    for spec in &specs {
        for eta in [0.25, 1.0, 2.0] {
            for lambda in [0.05, 0.5, 1.0, 4.0] {
                let p = sym(eta, lambda);
                let f = average_fidelity_gaussian(spec, &p).unwrap();
                let r = average_noise_gaussian(spec, &p).unwrap();
                let lower = (3.0 - r.v_total()) / 2.0;
                slack = slack.min(f - lower);
                ensure(f >= lower - 1e-12, || format!("{spec:?} η={eta} λ={lambda}: F={f} < {lower}"))?;
            }
        }
    }
    for lambda in [0.01, 0.5, 1.0, 10.0] {
        let p = sym(1.0, lambda);
        let f = average_fidelity_gaussian(&GaussianChannelSpec::identity(), &p).unwrap();
        let r = average_noise_gaussian(&GaussianChannelSpec::identity(), &p).unwrap();
        ensure((f - 1.0).abs() <= 1e-12 && (r.v_total() - 1.0).abs() <= 1e-12, || format!("identity λ={lambda}: F={f}, V={}", r.v_total()))?;
    }
    Ok(format!("smallest F − (3 − V)/2 = {slack:.3e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 8] = [
        ("one-quadrature noise threshold at λ = 4", one_quadrature_threshold),
        ("converse witness for gain/noise channels", converse_witness),
        ("measure-and-prepare saturation", saturation),
        ("two shot-noise units at unit gain", two_shot_noise_units),
        ("Fock oracle agreement", oracle_equivalence),
        ("Choi-state consistency", proof_consistency),
        ("certification soundness", statistical_soundness),
        ("fidelity lower bound", fidelity_relation),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS  {name} [{secs:.2}s] {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} [{secs:.2}s] {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
