//! One line per acceptance criterion, each with its runtime budget.

use std::time::Instant;

use hwlab::indecomp::{commutant, cross_check_spectrum, decide};
use hwlab::intertwine::{
    annihilator_check, closed_form_check, lowest_weight, product_hamiltonian_residual, zero_case_operators,
    Intertwiner, IntertwinerSpec, SampleGrid,
};
use hwlab::irreps::{build, defining_rep, restrict_to_hw, Family};
use hwlab::oscillator::{oscillator_report, HermiteBasisSpec};
use hwlab::rootsys::{build_phi, heisenberg_subset, wide_criterion};
use hwlab::suite::{run, RunConfig};
use hwlab::sympembed::embedding_check;
use hwlab::{Exec, Result};

const LW_PAIRS: [(f64, f64); 3] = [(0.5, 1.0), (1.0, 2.0), (3.7, 0.2)];
const U_PAIRS: [(f64, f64); 5] = [(1.0, 2.0), (2.0, 1.0), (0.5, 3.7), (-1.0, 3.0), (5.0, -2.0)];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn criterion(id: u32, name: &str, budget_s: f64, f: impl FnOnce() -> Result<Outcome>) -> bool {
    let start = Instant::now();
    let result = f();
    let secs = start.elapsed().as_secs_f64();
    let (pass, detail) = match result {
        Ok(o) => (o.pass && secs < budget_s, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    println!(
        "criterion {id:>2} {}  {name}  ({detail}; {secs:.2}s of {budget_s}s)",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

fn table1() -> Result<Outcome> {
    let r2 = 2f64.sqrt();
    let want: [&[f64]; 3] = [&[1.0], &[1.0, -1.0], &[r2, -2.0, r2]];
    let mut worst: f64 = 0.0;
    for (k, w) in want.iter().enumerate() {
        let f = lowest_weight(k, 1.0, 2.0, 12)?;
        for (p, &c) in (0..=k).rev().zip(*w) {
            worst = worst.max((f.coeffs[(p, k - p)].re - c).abs() + f.coeffs[(p, k - p)].im.abs());
        }
        let nonzero = f.coeffs.entries().iter().filter(|z| z.norm() > 0.0).count();
        if nonzero != w.len() {
            return outcome(false, format!("k={k}: {nonzero} nonzero entries"));
        }
    }
    outcome(worst < 1e-12, format!("max deviation {worst:.1e}"))
}

fn annihilation() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for (l, m) in LW_PAIRS {
        for k in 0..=10 {
            worst = worst.max(annihilator_check(&lowest_weight(k, l, m, 12)?));
        }
    }
    outcome(worst < 1e-12, format!("max ‖Â·LW‖/‖LW‖ {worst:.1e}"))
}

fn table2() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for (l, m) in LW_PAIRS {
        let grid = SampleGrid::uniform(l, m, 15);
        for k in 0..=2 {
            worst = worst.max(closed_form_check(k, l, m, 12, &grid)?.deviation);
        }
    }
    outcome(worst < 1e-8, format!("max deviation {worst:.1e}"))
}

fn tensor_intertwiner() -> Result<Outcome> {
    let mut res: f64 = 0.0;
    let mut gram: f64 = 0.0;
    for (l, m) in U_PAIRS {
        let u = Intertwiner::assemble(IntertwinerSpec::new(l, m, 12, 64)?, Exec::default())?;
        gram = gram.max(u.gram_deviation);
        for x in ["Q", "P", "Z"] {
            res = res.max(u.safe_block_residual(x)?);
        }
    }
    outcome(res < 1e-7 && gram < 1e-7, format!("max residual {res:.1e}, Gram {gram:.1e}"))
}

fn gaussian() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for (l, m) in U_PAIRS.into_iter().filter(|(l, m)| l * m > 0.0) {
        let s: f64 = l + m;
        let nu = l * m * s;
        // Substituting x = (λu+v)/s, y = (μu−v)/s into x²/2λ + y²/2μ must
        // give u²/2s + v²/2ν with no cross term.
        let uu = (l * l / (s * s)) / (2.0 * l) + (m * m / (s * s)) / (2.0 * m);
        let uv = (l / (s * s)) / l - (m / (s * s)) / m;
        let vv = 1.0 / (s * s * 2.0 * l) + 1.0 / (s * s * 2.0 * m);
        let completion = (uu - 1.0 / (2.0 * s)).abs() + uv.abs() + (vv - 1.0 / (2.0 * nu)).abs();
        if completion > 1e-14 {
            return outcome(false, format!("exponent completion off by {completion:e} at ({l}, {m})"));
        }
        let spec = IntertwinerSpec::new(l, m, 12, 64)?;
        if (spec.output_aux_parameter - nu).abs() > 1e-14 * nu {
            return outcome(false, format!("ν = {} instead of {nu}", spec.output_aux_parameter));
        }
        let (top, rest) = Intertwiner::cached(spec, Exec::default())?.ground_state_image()?;
        worst = worst.max((top - 1.0).norm()).max(rest);
    }
    outcome(worst < 1e-9, format!("max |c − 1| and leakage {worst:.1e}"))
}

fn zero_sum() -> Result<Outcome> {
    let mut failures = Vec::new();
    for lambda in [1.0, 2.5, -0.7] {
        let (_, _, r) = zero_case_operators(lambda, 12, 64, Exec::default())?;
        failures.extend(r.failures().map(|c| format!("{} at λ={lambda}", c.name)));
    }
    outcome(failures.is_empty(), if failures.is_empty() { "all checks".into() } else { failures.join(", ") })
}

fn roots() -> Result<Outcome> {
    for n in 1..=6 {
        let phi = build_phi(n)?;
        if phi.len() != 2 * (n + 1) * (n + 1) || !wide_criterion(&heisenberg_subset(n)?, &phi)? {
            return outcome(false, format!("n = {n}"));
        }
    }
    outcome(true, "n = 1..6")
}

fn embedding() -> Result<Outcome> {
    for n in 1..=4 {
        let r = embedding_check(n)?;
        let exact = r.checks.iter().all(|c| c.residual.is_none());
        if !r.passed() || !exact {
            return outcome(false, format!("n = {n}"));
        }
    }
    outcome(true, "n = 1..4, exact")
}

fn indecomposability() -> Result<Outcome> {
    let cases = [
        (Family::Defining, 1, 4),
        (Family::Sym { k: 2 }, 1, 10),
        (Family::Sym { k: 3 }, 1, 20),
        (Family::PrimitiveWedge2, 1, 5),
        (Family::Defining, 2, 6),
        (Family::PrimitiveWedge2, 2, 14),
    ];
    for (family, n, dim) in cases {
        let gens = restrict_to_hw(&build(family, n)?)?;
        if gens.dimension != dim {
            return outcome(false, format!("{family} n={n} has dimension {}", gens.dimension));
        }
        let v = decide(&gens)?;
        let local = cross_check_spectrum(&commutant(&gens)?, 20, 42)?;
        if !v.indecomposable || !local {
            return outcome(false, format!("{family} n={n}: verdict {}, oracle {local}", v.indecomposable));
        }
    }
    let v = restrict_to_hw(&defining_rep(1)?)?;
    let vv = v.direct_sum(&v)?;
    let verdict = decide(&vv)?;
    let cert = match &verdict.idempotent {
        Some(e) => hwlab::indecomp::certificate_valid(e, &vv)?,
        None => false,
    };
    let local = cross_check_spectrum(&commutant(&vv)?, 20, 42)?;
    outcome(
        !verdict.indecomposable && cert && !local,
        "six restricted irreducibles indecomposable, V⊕V split with certificate",
    )
}

fn oscillator() -> Result<Outcome> {
    for lambda in [1.0, 3.5] {
        let r = oscillator_report(&HermiteBasisSpec::with_truncation(lambda, 16)?)?;
        if !r.passed() {
            let f: Vec<_> = r.failures().map(|c| c.name.clone()).collect();
            return outcome(false, format!("λ={lambda}: {}", f.join(", ")));
        }
    }
    outcome(true, "λ ∈ {1, 3.5}, N = 16")
}

fn conclusion() -> Result<Outcome> {
    let mut min_unequal = f64::INFINITY;
    for (l, m) in LW_PAIRS {
        for k in 1..=10 {
            min_unequal = min_unequal.min(product_hamiltonian_residual(&lowest_weight(k, l, m, 12)?)?.1);
        }
    }
    let mut max_equal: f64 = 0.0;
    for l in [1.0, 2.5] {
        for k in 1..=10 {
            max_equal = max_equal.max(product_hamiltonian_residual(&lowest_weight(k, l, l, 12)?)?.1);
        }
    }
    outcome(
        min_unequal > 0.1 && max_equal < 1e-10,
        format!("λ≠μ min {min_unequal:.3}, λ=μ max {max_equal:.1e}"),
    )
}

fn full_suite() -> Result<Outcome> {
    let config = RunConfig::default();
    let mut a = run(&config, Exec::default())?;
    let mut b = run(&config, Exec::default())?;
    a.duration_ms = None;
    b.duration_ms = None;
    let same = a.to_json() == b.to_json();
    outcome(
        a.passed() && same,
        format!("{} checks, deterministic {same}", a.checks.len()),
    )
}

fn main() -> std::process::ExitCode {
    let results = [
        criterion(1, "lowest-weight coefficients", 1.0, table1),
        criterion(2, "annihilation of lowest weights", 1.0, annihilation),
        criterion(3, "closed-form lowest weights", 5.0, table2),
        criterion(4, "tensor-product intertwiner", 30.0, tensor_intertwiner),
        criterion(5, "Gaussian to Gaussian", 1.0, gaussian),
        criterion(6, "zero-sum case", 10.0, zero_sum),
        criterion(7, "root combinatorics", 1.0, roots),
        criterion(8, "embedding exactness", 1.0, embedding),
        criterion(9, "indecomposability", 30.0, indecomposability),
        criterion(10, "oscillator spectrum", 1.0, oscillator),
        criterion(11, "non-eigenstate observation", 5.0, conclusion),
        criterion(12, "full suite", 60.0, full_suite),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, &p)| !p).map(|(i, _)| i + 1).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", results.len());
        std::process::ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::ExitCode::FAILURE
    }
}
