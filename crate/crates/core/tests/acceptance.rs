//! Acceptance criteria, one line each. Runs with its own `main` so every
//! criterion reports even when an earlier one fails; the process exits
//! nonzero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use barron_gauge::experiments::config::{ExperimentConfig, FitConfig, Suite};
use barron_gauge::experiments::fit::run_fit;
use barron_gauge::experiments::stats::log_space;
use barron_gauge::experiments::tightness::tightness_fit;
use barron_gauge::experiments::{run_suite, SuiteOutput};
use barron_gauge::fourier::fourier_transform;
use barron_gauge::quadrature::Tolerance;
use barron_gauge::{barron_cost_upper, ft_profile, ft_triangular, moment_integral, ActivationPower, DomainSpec};
use barron_gauge::TwoLayerNetwork;
use common::{dense_moment_oracle, trapezoid_ft, SPOT_B, SPOT_S, SPOT_XI};

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: String) -> Outcome {
    Outcome { ok, detail }
}

fn suite(s: Suite) -> SuiteOutput {
    let cfg = ExperimentConfig::resolve(s, None, &[]).expect("default config");
    run_suite(s, &cfg).expect("suite runs")
}

fn constant(out: &SuiteOutput, key: &str) -> f64 {
    out.constants[key].as_f64().unwrap_or(f64::NAN)
}

fn triangular_transform() -> Outcome {
    let at_pi = (ft_triangular(PI) - 2.0 / PI.powi(3)).abs() / (2.0 / PI.powi(3));
    let hat = |x: f64| (1.0 - x.abs()).max(0.0);
    let worst = log_space(1e-2, 1e3, 50)
        .into_iter()
        .map(|xi| {
            let num = fourier_transform(hat, &[-1.0, 0.0, 1.0], xi, Tolerance { abs: 1e-13, rel: 1e-12 });
            (num.value - ft_triangular(xi)).norm()
        })
        .fold(0.0, f64::max);
    outcome(
        at_pi <= 1e-12 && worst <= 1e-9,
        format!("rel err at pi {at_pi:.1e}, worst abs err {worst:.1e}"),
    )
}

fn triangular_cost() -> Outcome {
    let cost = barron_cost_upper(&TwoLayerNetwork::triangular_hat(), &DomainSpec::unit_interval()).unwrap();
    outcome(cost == 3.0, format!("cost {cost:?}"))
}

fn tightness() -> Outcome {
    let t = tightness_fit(&[1e2, 1e3, 1e4, 1e5, 1e6]).unwrap();
    outcome(t.slope_ok(), format!("slope {:.5} vs 2/pi {:.5}", t.fit.slope, 2.0 / PI))
}

fn decay() -> Outcome {
    let out = suite(Suite::Decay);
    let c: Vec<String> = (0..4).map(|s| format!("{:.3}", constant(&out, &format!("C_hat_s{s}")))).collect();
    outcome(
        out.passed() && out.converged,
        format!("C_hat = [{}], all rows flat: {}", c.join(", "), out.passed()),
    )
}

fn blowup(out: &SuiteOutput) -> Outcome {
    let slopes: Vec<f64> = (1..=3).map(|s| constant(out, &format!("blowup_slope_s{s}"))).collect();
    let ok = (1..=3).all(|s| out.flags[&format!("blowup_slope_s{s}")]);
    outcome(
        ok,
        format!("slopes s=1,2,3: {:.3}, {:.3}, {:.3}; window [-1.15, -0.85]", slopes[0], slopes[1], slopes[2]),
    )
}

fn chain(out: &SuiteOutput) -> Outcome {
    let spreads: Vec<f64> = (1..=3).map(|s| constant(out, &format!("full_grid_spread_s{s}"))).collect();
    let ok = (1..=3).all(|s| out.flags[&format!("chain_uniform_s{s}")]);
    outcome(
        ok,
        format!(
            "max/min over nonzero cells s=1,2,3: {:.1}, {:.1}, {:.1}; limit 10",
            spreads[0], spreads[1], spreads[2]
        ),
    )
}

fn embedding() -> Outcome {
    let out = suite(Suite::Embed);
    outcome(
        out.flags["dimension_independent"] && out.converged,
        format!("max relative spread across d {:.1e}", constant(&out, "dimension_spread")),
    )
}

fn mc_rate() -> Outcome {
    let out = suite(Suite::McRate);
    outcome(
        out.flags["rate_in_range"],
        format!("exponent {:.3}", constant(&out, "rate_exponent")),
    )
}

fn oracles() -> Outcome {
    let mut ft_worst: f64 = 0.0;
    for &s in &SPOT_S {
        for &b in &SPOT_B {
            for &xi in &SPOT_XI {
                let got = ft_profile(ActivationPower(s), b, xi, 1e-12).unwrap().value;
                ft_worst = ft_worst.max((got - trapezoid_ft(s, b, xi, 1_000_000)).norm());
            }
        }
    }
    let got = moment_integral(ActivationPower(1), 0.0, 0.5, 1e-7).unwrap().value;
    let want = dense_moment_oracle(0.0, 0.5, 2000.0);
    let rel = (got - want).abs() / want;
    outcome(
        ft_worst <= 1e-8 && rel <= 1e-4,
        format!("transform abs err {ft_worst:.1e}, moment rel err {rel:.1e}"),
    )
}

fn fitter() -> Outcome {
    let out = run_fit(&FitConfig::default()).unwrap();
    outcome(
        out.passed(),
        format!(
            "mse {:.2e}, norm {:.3}, monotone {}",
            constant(&out, "mse"),
            constant(&out, "norm_estimate"),
            out.flags["objective_monotone"]
        ),
    )
}

fn main() {
    let minute = Duration::from_secs(60);
    let mut failed = 0;
    let mut report = |id: u32, name: &str, limit: Duration, start: Instant, o: Outcome| {
        let took = start.elapsed();
        let ok = o.ok && took <= limit;
        if !ok {
            failed += 1;
        }
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:>2} {name:<24} {verdict}  {} [{:.1}s, limit {}s]",
            o.detail,
            took.as_secs_f64(),
            limit.as_secs()
        );
    };

    let t = Instant::now();
    report(1, "triangular transform", Duration::from_secs(5), t, triangular_transform());
    let t = Instant::now();
    report(2, "triangular path cost", Duration::from_secs(1), t, triangular_cost());
    let t = Instant::now();
    report(3, "tightness slope", minute, t, tightness());
    let t = Instant::now();
    report(4, "decay envelope", 10 * minute, t, decay());
    let t = Instant::now();
    let moments = suite(Suite::Moment);
    let shared = t.elapsed();
    report(5, "moment blow-up slope", 10 * minute, t, blowup(&moments));
    let t = Instant::now() - shared;
    report(6, "per-neuron chain", 10 * minute, t, chain(&moments));
    let t = Instant::now();
    report(7, "dimension independence", 2 * minute, t, embedding());
    let t = Instant::now();
    report(8, "Monte-Carlo rate", 5 * minute, t, mc_rate());
    let t = Instant::now();
    report(9, "oracle equivalence", 5 * minute, t, oracles());
    let t = Instant::now();
    report(10, "fitter sanity", 2 * minute, t, fitter());

    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
