//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use frogcrit::critical::{
    cone_percolation_bounds, known_cone_bounds, known_original_upper, known_self_avoiding_upper,
    original_frog_upper, self_avoiding_upper, solve_qc, survival_series, table_cone, table_frogs,
};
use frogcrit::distributions::{
    defect_mass, interarrival_pmf, interarrival_survival, HazardSpec, TreeParams,
};
use frogcrit::exec::Execution;
use frogcrit::renewal::{convergence_rate, renewal_probabilities, scaled_renewal_sequence};
use frogcrit::simulator::{simulate_firework, simulate_frog, FrogSimConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DS: [u32; 14] = [2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 20, 30, 50, 100];

#[rustfmt::skip]
const CONE: [[f64; 6]; 14] = [
    [0.269594, 0.266667, 0.250000, 0.277206, 0.277206, 0.292893],
    [0.174659, 0.173913, 0.166667, 0.176343, 0.176559, 0.183503],
    [0.129326, 0.129032, 0.125000, 0.129961, 0.130258, 0.133975],
    [0.102709, 0.102564, 0.100000, 0.103015, 0.103255, 0.105573],
    [0.085188, 0.085106, 0.083333, 0.085358, 0.085544, 0.087129],
    [0.072777, 0.072727, 0.071428, 0.072882, 0.073027, 0.074179],
    [0.063525, 0.063492, 0.062500, 0.063594, 0.063710, 0.064585],
    [0.056361, 0.056338, 0.055556, 0.056408, 0.056503, 0.057191],
    [0.050649, 0.050632, 0.050000, 0.050684, 0.050762, 0.051316],
    [0.033618, 0.033613, 0.033333, 0.033628, 0.033664, 0.033908],
    [0.025159, 0.025157, 0.025000, 0.025163, 0.025184, 0.025320],
    [0.016737, 0.016736, 0.016667, 0.016738, 0.016748, 0.016807],
    [0.010025, 0.010025, 0.010000, 0.010025, 0.010028, 0.010050],
    [0.005006, 0.005006, 0.005000, 0.005006, 0.005007, 0.005012],
];

#[rustfmt::skip]
const FROGS: [[f64; 6]; 14] = [
    [0.720836, 0.720836, 0.750000, 0.648045, 0.648045, 0.697224],
    [0.645182, 0.645837, 0.666667, 0.599063, 0.600229, 0.627719],
    [0.608681, 0.609897, 0.625000, 0.574870, 0.576225, 0.594875],
    [0.586944, 0.588174, 0.600000, 0.560271, 0.561544, 0.575571],
    [0.572482, 0.573624, 0.583333, 0.550468, 0.551621, 0.562829],
    [0.562156, 0.563197, 0.571429, 0.543421, 0.544461, 0.553778],
    [0.55441,  0.555358, 0.562500, 0.538107, 0.539048, 0.547013],
    [0.548384, 0.549249, 0.555556, 0.533955, 0.534812, 0.541764],
    [0.543561, 0.544355, 0.550000, 0.530620, 0.531406, 0.537571],
    [0.529076, 0.529632, 0.533333, 0.520543, 0.521093, 0.525021],
    [0.521822, 0.522248, 0.525000, 0.515458, 0.515881, 0.518759],
    [0.514559, 0.514848, 0.516667, 0.510341, 0.510628, 0.512503],
    [0.508741, 0.508917, 0.510000, 0.506222, 0.506397, 0.507501],
    [0.504373, 0.504461, 0.505000, 0.503118, 0.503206, 0.503750],
];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn compare_table(
    computed: &[[f64; 6]],
    expected: &[[f64; 6]; 14],
    tol: f64,
    elapsed: Duration,
) -> Verdict {
    let mut worst = (0.0, 0, 0);
    for (i, (row, want)) in computed.iter().zip(expected).enumerate() {
        for j in 0..6 {
            let err = (row[j] - want[j]).abs();
            if err > worst.0 {
                worst = (err, DS[i], j);
            }
        }
    }
    let secs = elapsed.as_secs_f64();
    verdict(
        computed.len() == 14 && worst.0 <= tol && secs < 2.0,
        format!(
            "max abs error {:.2e} (d={}, column {}), {secs:.3} s",
            worst.0,
            worst.1,
            worst.2 + 1
        ),
    )
}

fn table_1() -> Verdict {
    let start = Instant::now();
    let rows = table_cone(&DS, Execution::Parallel)
        .map(|r| r.iter().map(|r| r.cells()).collect::<Vec<_>>());
    match rows {
        Ok(rows) => compare_table(&rows, &CONE, 1.5e-6, start.elapsed()),
        Err(e) => verdict(false, e.to_string()),
    }
}

fn table_2() -> Verdict {
    let start = Instant::now();
    let rows = table_frogs(&DS, Execution::Parallel)
        .map(|r| r.iter().map(|r| r.cells()).collect::<Vec<_>>());
    match rows {
        Ok(rows) => compare_table(&rows, &FROGS, 2e-6, start.elapsed()),
        Err(e) => verdict(false, e.to_string()),
    }
}

fn residuals() -> Verdict {
    let mut worst: f64 = 0.0;
    for d in DS {
        for c in [0.25, 0.5, 1.0] {
            let g = solve_qc(d, c, 1e-12).and_then(|r| survival_series(d, c, r.q_c, 1e-15));
            match g {
                Ok(g) => worst = worst.max((g - 1.0).abs()),
                Err(e) => return verdict(false, format!("d={d} c={c}: {e}")),
            }
        }
    }
    verdict(worst < 1e-10, format!("max |G(q_c) - 1| = {worst:.2e}"))
}

fn rate_identity() -> Verdict {
    let mut worst: f64 = 0.0;
    for d in 2..=10 {
        for c in [0.25, 0.5, 1.0] {
            let gamma = solve_qc(d, c, 1e-12)
                .and_then(|r| HazardSpec::new(c, r.q_c))
                .and_then(|spec| convergence_rate(spec, 1e-12));
            match gamma {
                Ok(r) => worst = worst.max((r.gamma - d as f64).abs()),
                Err(e) => return verdict(false, format!("d={d} c={c}: {e}")),
            }
        }
    }
    verdict(worst < 1e-6, format!("max |gamma - d| = {worst:.2e}"))
}

fn bound_ordering() -> Verdict {
    for d in 3..=100 {
        for c in [0.25, 0.5, 0.75, 1.0] {
            let r = match solve_qc(d, c, 1e-12) {
                Ok(r) => r,
                Err(e) => return verdict(false, format!("d={d} c={c}: {e}")),
            };
            let Some(upper_c3) = r.upper_c3 else {
                return verdict(
                    false,
                    format!("d={d} c={c}: explicit upper bound undefined"),
                );
            };
            let chain = [r.lower_c3, r.lower_c2, r.q_c, r.upper_c2, upper_c3];
            if !chain.windows(2).all(|w| w[0] <= w[1]) {
                return verdict(false, format!("d={d} c={c}: chain {chain:?} not ordered"));
            }
        }
    }
    for d in 2..=100 {
        let improved = (|| -> frogcrit::Result<bool> {
            let cone = cone_percolation_bounds(d)?;
            let (known_lower, known_upper) = known_cone_bounds(d);
            Ok(cone.lower.is_some_and(|l| l > known_lower)
                && cone.upper < known_upper
                && original_frog_upper(d)?.upper < known_original_upper(d)
                && self_avoiding_upper(d)?.upper < known_self_avoiding_upper(d))
        })();
        match improved {
            Ok(true) => {}
            Ok(false) => {
                return verdict(
                    false,
                    format!("d={d}: a bound does not improve its earlier formula"),
                )
            }
            Err(e) => return verdict(false, format!("d={d}: {e}")),
        }
    }
    verdict(
        true,
        "ordered for d 3..100 x 4 values of c, strict improvement for d 2..100",
    )
}

fn firework_equivalence() -> Verdict {
    let (n, reps) = (20usize, 100_000u64);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for c in [0.5, 1.0] {
        for q in [0.1, 0.25, 0.27] {
            let spec = HazardSpec::new(c, q).unwrap();
            let u = renewal_probabilities(spec, n);
            let sim = match simulate_firework(spec, n as u64, reps, 0xF1E5, Execution::Parallel) {
                Ok(sim) => sim,
                Err(e) => return verdict(false, e.to_string()),
            };
            for k in 1..=n {
                let exact = u.values()[k];
                let se = (exact * (1.0 - exact) / reps as f64).sqrt();
                worst = worst.max((sim.hit_fraction(k) - exact).abs() / se);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        worst <= 4.0 && secs < 30.0,
        format!("max deviation {worst:.2} standard errors, {secs:.2} s"),
    )
}

/// Index from which `v` is strictly monotone in the given direction.
fn monotone_from(v: &[f64], increasing: bool) -> usize {
    let mut start = v.len() - 1;
    while start > 0 && (v[start - 1] < v[start]) == increasing && v[start - 1] != v[start] {
        start -= 1;
    }
    start
}

fn sign_check() -> Verdict {
    let qc = match solve_qc(2, 1.0, 1e-12) {
        Ok(r) => r.q_c,
        Err(e) => return verdict(false, e.to_string()),
    };
    let above = scaled_renewal_sequence(HazardSpec::new(1.0, qc + 0.02).unwrap(), 2.0, 400);
    let below = scaled_renewal_sequence(HazardSpec::new(1.0, qc - 0.02).unwrap(), 2.0, 400);
    let (up, down) = (monotone_from(&above, true), monotone_from(&below, false));
    verdict(
        up <= 200 && down <= 200 && above[400] > 1.0 && below[400] < 1.0,
        format!(
            "increasing from n={up} (2^400 u = {:.3e}), decreasing from n={down} (2^400 u = {:.3e})",
            above[400], below[400]
        ),
    )
}

fn property_suites() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut failures = Vec::new();

    let (mut lower_violations, mut upper_violations, mut first) = (0, 0, None);
    for _ in 0..1000 {
        let c = 1.0 - rng.random::<f64>();
        let q = rng.random_range(0.001..0.999);
        let n = rng.random_range(2..=300u32);
        let product = interarrival_survival(HazardSpec::new(c, q).unwrap(), n);
        if product < 1.0 - c * q - c * q * q - 1e-14 {
            lower_violations += 1;
            first.get_or_insert((c, q, n, product, 1.0 - c * q - c * q * q));
        }
        if product > 1.0 - c * q + 1e-15 {
            upper_violations += 1;
        }
    }
    let sandwich = format!(
        "sandwich: {lower_violations}/1000 lower, {upper_violations}/1000 upper violations"
    );
    if lower_violations + upper_violations > 0 {
        let (c, q, n, p, lo) = first.unwrap_or_default();
        failures.push(format!(
            "{sandwich}, e.g. c={c:.4} q={q:.4} n={n}: product {p:.6} < {lo:.6}"
        ));
    }

    let mut sqrt_ok = true;
    for i in 0..=100_000 {
        let x = i as f64 / 100_000.0;
        sqrt_ok &= (1.0 - x).sqrt() <= 1.0 - x / 2.0 - x * x / 8.0 + 1e-15;
        let x = 0.24 * x;
        sqrt_ok &= (1.0 - x).sqrt() >= 1.0 - x / 2.0 - x * x / 7.0 - 1e-15;
    }
    if !sqrt_ok {
        failures.push("square-root polynomial bounds".into());
    }

    let mut identity_err: f64 = 0.0;
    for _ in 0..200 {
        let spec =
            HazardSpec::new(1.0 - rng.random::<f64>(), rng.random_range(0.001..0.95)).unwrap();
        let k = rng.random_range(1..=200u32);
        let cumulative: f64 = (1..=k).map(|j| interarrival_pmf(spec, j)).sum();
        identity_err =
            identity_err.max((cumulative + interarrival_survival(spec, k + 1) - 1.0).abs());
        let pmf = interarrival_pmf(spec, k);
        identity_err = identity_err
            .max((interarrival_survival(spec, k) - interarrival_survival(spec, k + 1) - pmf).abs());
        let defect = defect_mass(spec, 1e-15).unwrap();
        identity_err = identity_err.max((defect - interarrival_survival(spec, 20_000)).abs());
    }
    if identity_err > 1e-12 {
        failures.push(format!(
            "pmf/survival/defect identities off by {identity_err:.2e}"
        ));
    }

    let spec = HazardSpec::new(0.5, 0.3).unwrap();
    let config = FrogSimConfig::new(TreeParams::new(2, 1.0, 0.3).unwrap(), 12, 2_000, 77).unwrap();
    let run = || -> frogcrit::Result<String> {
        Ok(format!(
            "{:?}{:?}",
            simulate_firework(spec, 20, 10_000, 77, Execution::Parallel)?,
            simulate_frog(&config, Execution::Parallel)?
        ))
    };
    match (run(), run()) {
        (Ok(a), Ok(b)) if a == b => {}
        _ => failures.push("simulator runs are not byte-equal".into()),
    }

    if failures.is_empty() {
        verdict(
            true,
            format!("{sandwich}; square-root bounds, identities, determinism hold"),
        )
    } else {
        verdict(false, failures.join("; "))
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("cone percolation table", table_1),
        ("frog upper bound table", table_2),
        ("fixed-point residual", residuals),
        ("rate identity at q_c", rate_identity),
        ("bound ordering and improvement", bound_ordering),
        ("firework/renewal equivalence", firework_equivalence),
        ("criticality sign check", sign_check),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        failed += usize::from(!v.pass);
        println!(
            "criterion {} {:<32} {}  {}",
            i + 1,
            name,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
