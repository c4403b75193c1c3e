//! Acceptance run: one line per criterion, non-zero exit on any failure.
//!
//! Expected values come from closed-form oracles built here, never from the
//! library under test.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use globalpulse::effective::{
    h1eff, h1eff_fluct, h2eff, h2eff_fluct, residual_coupling, secular_projection, Coefficients,
    EffectiveForm,
};
use globalpulse::magnus::exact_generator;
use globalpulse::operator::{embed_pauli, propagator, CMatrix, HermitianOperator, PauliAxis, C64};
use globalpulse::sequences::{
    anisotropic_dd_block, basic_block, compile_to_physical, conjugated_pair, decoupling_cycle,
    insert_hahn_echo, repeat, wahuha_block, BlockCouplings, BlockParams, CycleSpec, Schedule,
};
use globalpulse::simulator::{
    compare_decay, demo_config, evolve, run_experiment, ExperimentConfig, Metric, Reference,
    DEFAULT_FIT_FLOOR,
};
use globalpulse::systems::{demo_register, hz, member_rng, CouplingNoise, NoisePreset, RegisterSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

struct Outcome {
    pass: bool,
    detail: String,
}

fn two_qubit(j: f64) -> RegisterSpec {
    RegisterSpec::two_qubit(hz(62.8e3), hz(95.9e3), j).unwrap()
}

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

/// Extracted `yy / J` against `(4/3)θ²`.
fn coupling_reduction_law() -> Outcome {
    let reg = two_qubit(hz(17.3));
    let mut pass = true;
    let mut parts = Vec::new();
    for theta in [0.05, 0.025, 0.0125] {
        let p = BlockParams::new(1e-7, theta).unwrap();
        let got = residual_coupling(&reg, &p, 1).unwrap()[0].reduction[0];
        let want = 4.0 / 3.0 * theta * theta;
        let err = rel_err(got, want);
        pass &= err <= 0.1;
        parts.push(format!("θ={theta}: 1/{:.1} (err {:.2e})", 1.0 / got, err));
    }
    Outcome {
        pass,
        detail: parts.join(", "),
    }
}

/// Residual norm relative to the exact generator, then the single-spin and
/// coupling sectors relative to their own scales.
fn sector_residuals(form: &EffectiveForm, schedule: &Schedule, scale: [f64; 2]) -> [f64; 3] {
    let exact = exact_generator(&schedule.to_toggled().unwrap().segments().unwrap()).unwrap();
    let diff = &exact - &form.to_operator().unwrap();
    let parts = EffectiveForm::from_operator(&diff, 2, 0.0).unwrap();
    let sector = |w: usize| {
        parts
            .terms
            .iter()
            .filter(|t| t.op.weight() == w)
            .map(|t| t.coefficient * t.coefficient)
            .sum::<f64>()
            .sqrt()
    };
    [diff.norm() / exact.norm(), sector(1) / scale[0], sector(2) / scale[1]]
}

fn fluct_pair(reg: &RegisterSpec, p: &BlockParams, j: &[f64; 8]) -> Schedule {
    let block = |js: &[f64]| {
        let per = [vec![js[0]], vec![js[1]], vec![js[2]], vec![js[3]]];
        basic_block(reg, p, &BlockCouplings::PerSegment(per)).unwrap()
    };
    let mut s = block(&j[..4]);
    s.push_pulse(PauliAxis::Y, PI).unwrap();
    s.extend(&block(&j[4..])).unwrap();
    s.push_pulse(PauliAxis::Y, -PI).unwrap();
    s
}

/// Residual of each closed form against the exact cycle generator at
/// `θ = 0.04` over that at `θ = 0.02`. `Δt` is small enough that `ωΔt` and
/// `JΔt` are negligible next to `θ³`, so the forms' own expansion parameter
/// is the only one that varies; a correct second-order form leaves a cubic
/// remainder in both sectors.
fn residual_ratios(c: Coefficients, rng: &mut ChaCha8Rng) -> Vec<(&'static str, [f64; 3])> {
    // Couplings comparable to the Zeeman terms keep every coupling
    // coefficient visible in the residual.
    let mut draw = || hz(rng.random_range(5e3..40e3));
    let j0 = draw();
    let j4: [f64; 4] = std::array::from_fn(|_| draw());
    let j8: [f64; 8] = std::array::from_fn(|_| draw());
    let reg = two_qubit(j0);
    let w = reg.omegas()[1];
    let dt = 1e-12;
    let mean = |js: &[f64]| js.iter().sum::<f64>() / js.len() as f64;
    let residual = |theta: f64, which: usize| {
        let p = BlockParams::new(dt, theta).unwrap();
        let block = || basic_block(&reg, &p, &BlockCouplings::Static).unwrap();
        match which {
            0 => sector_residuals(&h1eff(&reg, theta, c).unwrap(), &block(), [w, j0]),
            1 => sector_residuals(&h2eff(&reg, theta, c).unwrap(), &conjugated_pair(&block()).unwrap(), [w, j0]),
            2 => sector_residuals(
                &h1eff_fluct(&reg, theta, j4, c).unwrap(),
                &basic_block(&reg, &p, &BlockCouplings::PerSegment(j4.map(|j| vec![j]))).unwrap(),
                [w, mean(&j4)],
            ),
            _ => sector_residuals(
                &h2eff_fluct(&reg, theta, j8, c).unwrap(),
                &fluct_pair(&reg, &p, &j8),
                [w, mean(&j8)],
            ),
        }
    };
    ["H1eff", "H2eff", "H1eff'", "H2eff'"]
        .into_iter()
        .enumerate()
        .map(|(k, name)| {
            let (a, b) = (residual(0.04, k), residual(0.02, k));
            (name, std::array::from_fn(|i| a[i] / b[i]))
        })
        .collect()
}

fn cubic_scaling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let verified = residual_ratios(Coefficients::Verified, &mut rng);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let printed = residual_ratios(Coefficients::Printed, &mut rng);
    // The total is cubic; a sector may do better when its cubic terms
    // cancel by symmetry, but never worse.
    let in_range = |r: &[f64; 3]| (6.0..=10.0).contains(&r[0]) && r[1] >= 6.0 && r[2] >= 6.0;
    let show = |v: &[(&str, [f64; 3])]| {
        v.iter()
            .map(|(n, r)| format!("{n} {:.2} ({:.2}/{:.2})", r[0], r[1], r[2]))
            .collect::<Vec<_>>()
            .join(", ")
    };
    Outcome {
        pass: verified.iter().all(|(_, r)| in_range(r)),
        detail: format!(
            "ratios, total (single-spin/coupling) [{}]; alternative coefficient set [{}] {}",
            show(&verified),
            show(&printed),
            if printed.iter().any(|(_, r)| !in_range(r)) {
                "fails as expected"
            } else {
                "unexpectedly passes"
            }
        ),
    }
}

fn random_dipolar(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut d = vec![vec![0.0; n]; n];
    for j in 0..n {
        for k in j + 1..n {
            let v: f64 = rng.sample(StandardNormal);
            d[j][k] = v;
            d[k][j] = v;
        }
    }
    d
}

fn average(s: &Schedule) -> CMatrix {
    s.evolutions()
        .map(|e| e.hamiltonian.matrix().unwrap())
        .fold(None, |acc: Option<CMatrix>, m| Some(acc.map_or(m.clone(), |a| a + m)))
        .unwrap()
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |a, z| a.max(z.norm()))
}

fn wahuha_zero_average() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for n in 2..=4 {
        for _ in 0..10 {
            let d = random_dipolar(n, &mut rng);
            worst = worst.max(max_abs(&average(&wahuha_block(&d, 1e-6).unwrap())));
        }
    }
    // α + β + γ = 1: the sum is the isotropic coupling, which survives.
    let d = random_dipolar(3, &mut rng);
    let counter = max_abs(&average(&anisotropic_dd_block(&d, [1.0, 0.0, 0.0], 1e-6).unwrap()));
    Outcome {
        pass: worst <= 1e-14 && counter > 1e-3,
        detail: format!("max |H1+H2+H3| = {worst:.1e}; counterexample {counter:.3}"),
    }
}

fn demo_ratio(preset: NoisePreset) -> (bool, String) {
    let mut config = demo_config(1);
    config.noise = Some(CouplingNoise::demo(preset, 1));
    let start = Instant::now();
    let result = run_experiment(&config).unwrap();
    let cmp = compare_decay(&result.free, &result.decoupled, DEFAULT_FIT_FLOOR).unwrap();
    let pass = (100.0 / 3.0..=300.0).contains(&cmp.ratio);
    (
        pass,
        format!(
            "{preset:?}: free {:.1} /s, decoupled {:.2} /s, ratio {:.1} ({:?}, {} members, {:.0} s)",
            cmp.free_rate,
            cmp.decoupled_rate,
            cmp.ratio,
            cmp.model,
            config.ensemble_size,
            start.elapsed().as_secs_f64()
        ),
    )
}

fn compile_schedules() -> Vec<(&'static str, Schedule)> {
    let reg = demo_register();
    let p = BlockParams::new(1e-7, 0.05).unwrap();
    let block = basic_block(&reg, &p, &BlockCouplings::Static).unwrap();
    let pair = conjugated_pair(&block).unwrap();
    let echo = insert_hahn_echo(&pair, PauliAxis::X).unwrap();
    let repeated = repeat(&pair, 5).unwrap();
    let nested = decoupling_cycle(
        &reg,
        &CycleSpec {
            params: p,
            repetitions: 1,
            iterations: 2,
            hahn_echo: true,
        },
    )
    .unwrap();
    vec![
        ("block", block),
        ("pair", pair),
        ("echo", echo),
        ("repeated", repeated),
        ("nested", nested),
    ]
}

fn compilation_equality() -> Outcome {
    let noise = CouplingNoise::demo(NoisePreset::Caption, 5);
    let mut worst = 0.0f64;
    let mut all_physical = true;
    for (_, s) in compile_schedules() {
        let c = compile_to_physical(&s).unwrap();
        all_physical &= c.evolutions().all(|e| e.hamiltonian.is_physical());
        let a = evolve(&s, None, &mut member_rng(5, 0)).unwrap();
        let b = evolve(&c, None, &mut member_rng(5, 0)).unwrap();
        worst = worst.max(a.distance_up_to_phase(&b));
        for member in 0..3 {
            let a = evolve(&s, Some(&noise), &mut member_rng(5, member)).unwrap();
            let b = evolve(&c, Some(&noise), &mut member_rng(5, member)).unwrap();
            worst = worst.max(a.distance_up_to_phase(&b));
        }
    }
    Outcome {
        pass: worst <= 1e-10 && all_physical,
        detail: format!("max distance {worst:.1e} over block, pair, echo, repeated, nested"),
    }
}

fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> HermitianOperator {
    let dim = 1 << n;
    let a = CMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    HermitianOperator::new((&a + a.adjoint()) * C64::new(0.5, 0.0)).unwrap()
}

fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint())) / max_abs(m).max(f64::MIN_POSITIVE)
}

fn small_config(seed: u64) -> ExperimentConfig {
    let register = two_qubit(hz(17.3));
    ExperimentConfig {
        noise: Some(CouplingNoise::uniform(&register, hz(9.0), seed).unwrap()),
        register,
        params: BlockParams::new(1e-7, 0.05).unwrap(),
        total_time: 1.6e-4,
        sample_interval: 4e-5,
        repetitions: 50,
        iterations: 1,
        hahn_echo: true,
        ensemble_size: 3,
        reference: Reference::LocalFrame,
        metric: Metric::Unitary,
    }
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut unitarity = 0.0f64;
    let mut hermiticity = 0.0f64;
    for n in 1..=4 {
        for _ in 0..25 {
            let h = random_hermitian(n, &mut rng);
            let t = rng.random_range(0.0..3.0);
            unitarity = unitarity.max(propagator(&h, t).unwrap().unitarity_deviation());
            hermiticity = hermiticity.max(hermiticity_defect(h.matrix()));
        }
    }
    for (_, s) in compile_schedules() {
        unitarity = unitarity.max(s.propagator().unwrap().unitarity_deviation());
        for e in s.evolutions() {
            hermiticity = hermiticity.max(hermiticity_defect(&e.hamiltonian.matrix().unwrap()));
        }
        let toggled = s.to_toggled().unwrap();
        let g = exact_generator(&toggled.segments().unwrap()).unwrap();
        hermiticity = hermiticity.max(hermiticity_defect(g.matrix()));
    }

    // Dominant part with integer level spacings: the average over one 2π
    // period is exact on a uniform grid with more nodes than the largest
    // spacing.
    let y = |s: usize| embed_pauli(s, PauliAxis::Y, 2).unwrap();
    let dominant = &y(0).scaled(1.0) + &y(1).scaled(3.0);
    let mut projection = 0.0f64;
    for _ in 0..10 {
        let full = random_hermitian(2, &mut rng);
        let once = secular_projection(&full, &dominant).unwrap();
        let twice = secular_projection(&once, &dominant).unwrap();
        projection = projection.max((&once - &twice).max_abs());
        let nodes = 64;
        let mut avg = CMatrix::zeros(4, 4);
        for k in 0..nodes {
            let u = propagator(&dominant, 2.0 * PI * k as f64 / nodes as f64).unwrap();
            avg += u.matrix().adjoint() * full.matrix() * u.matrix();
        }
        avg /= C64::new(nodes as f64, 0.0);
        projection = projection.max(max_abs(&(avg - once.matrix())));
    }

    let deterministic = run_experiment(&small_config(9)).unwrap() == run_experiment(&small_config(9)).unwrap();
    Outcome {
        pass: unitarity <= 1e-10 && hermiticity <= 1e-12 && projection <= 1e-6 && deterministic,
        detail: format!(
            "unitarity {unitarity:.1e}, hermiticity {hermiticity:.1e}, projection {projection:.1e}, \
             bit-identical reruns {deterministic}"
        ),
    }
}

/// Criterion numbers given on the command line, or all of them.
fn selected() -> Vec<usize> {
    let picked: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    if picked.is_empty() {
        (1..=7).collect()
    } else {
        picked
    }
}

fn main() -> ExitCode {
    let wanted = selected();
    let mut caption = None;
    let mut failures = 0;
    for n in wanted {
        let (name, o) = match n {
            1 => ("coupling reduction law", coupling_reduction_law()),
            2 => ("effective forms against exact generator", cubic_scaling()),
            3 => ("WAHUHA zero average", wahuha_zero_average()),
            4 | 7 => {
                let (pass, detail) = caption.get_or_insert_with(|| demo_ratio(NoisePreset::Caption)).clone();
                if n == 4 {
                    ("lattice decay-rate ratio", Outcome { pass, detail })
                } else {
                    let (text_pass, text) = demo_ratio(NoisePreset::Text);
                    (
                        "robustness across noise presets",
                        Outcome {
                            pass: pass && text_pass,
                            detail: format!("{detail}; {text}"),
                        },
                    )
                }
            }
            5 => ("physical compilation equality", compilation_equality()),
            6 => ("property suites", property_suites()),
            _ => {
                println!("criterion {n}: no such criterion");
                failures += 1;
                continue;
            }
        };
        if !o.pass {
            failures += 1;
        }
        println!("criterion {n} [{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
