//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line with the measured quantity against its pinned tolerance. Desk
//! scale throughout (1D, N = 1024 default).

use std::sync::Arc;

use lptk::corpus::{generate, CorpusSpec, Family};
use lptk::grid::{GridSpec, Representation, SampledField};
use lptk::kernels::{
    make_fractional_poisson, make_gaussian, vanishing_moments, CheckConfig,
};
use lptk::lp::{build_calderon_pair, build_lp_family, calderon_partial_sum, reconstruct, BlockKernel, LPFamily};
use lptk::norms::{besov_norm, peetre_besov_norm, triebel_infinity_norm, triebel_norm, NormParams};
use lptk::verify::{
    check_dilation_lemma, check_maximal_domination, check_scaling_covariance, check_stromberg,
    norm_equivalence_report, EngineKernel, EquivalenceGate, NormEngine,
};
use num_complex::Complex64;

fn report(criterion: &str, passed: bool, detail: &str) {
    println!(
        "ACCEPTANCE {criterion}: {} ({detail})",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed, "criterion {criterion} failed: {detail}");
}

fn default_grid() -> GridSpec {
    GridSpec::new(1, 64.0, 1024).unwrap()
}

fn default_family() -> LPFamily {
    build_lp_family(&default_grid(), -4, 6).unwrap()
}

#[test]
fn criterion_01_partition_of_unity() {
    let fam = default_family();
    let residual = fam.partition_residual();
    report(
        "01 partition-of-unity",
        residual < 1e-12,
        &format!("max |Σ𝒒̂²-1| = {residual:.3e} < 1e-12 on covered annulus"),
    );
}

#[test]
fn criterion_02_plancherel_identity() {
    let fam = default_family();
    let grid = *fam.grid();
    let (lo, hi) = fam.covered_annulus();
    let corpus = generate(
        &CorpusSpec::new(
            Family::RandomBandlimited {
                count: 50,
                lo: lo * 1.05,
                hi: hi * 0.95,
            },
            2024,
        ),
        &grid,
    )
    .unwrap();
    let params = NormParams::new(0.0, 2.0, 2.0).unwrap();
    let mut worst = 0.0f64;
    for f in &corpus {
        let l2 = f.as_spatial().unwrap().lp_norm(2.0).unwrap();
        let b = besov_norm(f, &params, BlockKernel::Family(&fam), (-4, 6)).unwrap();
        let t = triebel_norm(f, &params, BlockKernel::Family(&fam), (-4, 6)).unwrap();
        worst = worst.max((b - l2).abs() / l2).max((t - l2).abs() / l2);
    }
    report(
        "02 plancherel-identity",
        worst < 1e-10,
        &format!("50 fields, worst relative deviation {worst:.3e} < 1e-10"),
    );
}

#[test]
fn criterion_03_calderon_exact_recovery() {
    let fam = default_family();
    let grid = *fam.grid();
    let corpus = generate(
        &CorpusSpec::new(
            Family::RandomBandlimited {
                count: 5,
                lo: 0.5,
                hi: 2.0,
            },
            3,
        ),
        &grid,
    )
    .unwrap();
    let mut worst_rec = 0.0f64;
    let mut worst_tel = 0.0f64;
    for f in &corpus {
        let spatial = f.as_spatial().unwrap().into_owned();
        let sum = calderon_partial_sum(&spatial, &fam, -4, 4).unwrap();
        let num: f64 = sum
            .values()
            .iter()
            .zip(spatial.values())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let den: f64 = spatial
            .values()
            .iter()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst_rec = worst_rec.max(num / den);

        let a = calderon_partial_sum(&spatial, &fam, -4, 1).unwrap();
        let b = calderon_partial_sum(&spatial, &fam, 1, 6).unwrap();
        let c = calderon_partial_sum(&spatial, &fam, -4, 6).unwrap();
        let peak = spatial.lp_norm(f64::INFINITY).unwrap();
        for ((x, y), z) in a.values().iter().zip(b.values()).zip(c.values()) {
            worst_tel = worst_tel.max(((x + y) - z).norm() / peak);
        }
    }
    report(
        "03 calderon-exact-recovery",
        worst_rec < 1e-10 && worst_tel < 1e-12,
        &format!("recovery {worst_rec:.3e} < 1e-10, telescoping {worst_tel:.3e} < 1e-12"),
    );
}

#[test]
fn criterion_04_generalized_pair() {
    let fam = default_family();
    let kernel = make_fractional_poisson(1.0, 1).unwrap();
    let pair = build_calderon_pair(&kernel, &fam, &CheckConfig::default()).unwrap();
    let residual = pair.identity_residual();

    let grid = *fam.grid();
    let g = SampledField::from_spatial_fn(grid, |x| {
        Complex64::new((-x[0] * x[0] / 2.0).exp(), 0.0)
    });
    let mut monotone = true;
    let mut last = f64::INFINITY;
    let mut final_err = f64::NAN;
    for m in -3..=6 {
        let (_, err) = reconstruct(&g, &pair, -4, m).unwrap();
        if err > last + 1e-14 {
            monotone = false;
        }
        last = err;
        final_err = err;
    }
    report(
        "04 generalized-pair",
        residual < 1e-10 && monotone && final_err < 1e-6,
        &format!(
            "identity residual {residual:.3e} < 1e-10, error monotone={monotone}, final {final_err:.3e} < 1e-6"
        ),
    );
}

#[test]
fn criterion_05_scaling_covariance() {
    let fam = Arc::new(default_family());
    let grid = *fam.grid();
    // single lattice mode at |ξ| ≈ π: shifts by k ∈ {-2..2} stay covered
    let mut spec = SampledField::zeros(grid, Representation::Spectral);
    spec.values_mut()[32] = Complex64::new(1.0, 0.0);
    let f = spec.inverse_transform().unwrap();

    // (α, p) rows; p = 1 exercises the n/p amplitude, (1, 1) is the
    // scale-invariant α = n/p line
    let rows = [(0.0, 2.0), (1.0, 2.0), (0.5, 1.0), (1.0, 1.0)];
    let mut worst = 0.0f64;
    let mut invariant_ok = true;
    for &(alpha, p) in &rows {
        let engine = NormEngine::besov(
            NormParams::new(alpha, p, 2.0).unwrap(),
            EngineKernel::Family(fam.clone()),
            (-4, 6),
        );
        for k in -2..=2 {
            let r = check_scaling_covariance(&f, &engine, k).unwrap();
            worst = worst.max(r.relative_deviation);
            if (alpha - 1.0).abs() < 1e-15 && (p - 1.0).abs() < 1e-15 {
                invariant_ok &= (r.measured_ratio - 1.0).abs() < 1e-10;
            }
        }
    }
    report(
        "05 scaling-covariance",
        worst < 1e-10 && invariant_ok,
        &format!("worst deviation {worst:.3e} < 1e-10; α=n/p row pinned at ratio 1"),
    );
}

#[test]
fn criterion_06_poisson_moments() {
    let grid = GridSpec::new(1, 128.0, 2048).unwrap();
    let kernel = make_fractional_poisson(2.0, 1).unwrap();
    let moments = vanishing_moments(&kernel, &grid, 1).unwrap();
    let m0 = moments[0].1.norm();
    let m1 = moments[1].1.norm();
    report(
        "06 poisson-moments",
        m0 < 1e-5 && m1 < 1e-5,
        &format!("|∫ψ| = {m0:.3e}, |∫xψ| = {m1:.3e}, both < 1e-5 at L=128"),
    );
}

#[test]
fn criterion_07_maximal_function_laws() {
    let fam = default_family();
    let grid = *fam.grid();
    let corpus = generate(
        &CorpusSpec::new(
            Family::RandomBandlimited {
                count: 20,
                lo: 0.3,
                hi: 20.0,
            },
            7,
        ),
        &grid,
    )
    .unwrap();
    let mut laws_ok = true;
    for f in &corpus {
        let rep =
            check_maximal_domination(f, BlockKernel::Family(&fam), 1, &[1.0, 2.0, 4.0, 8.0])
                .unwrap();
        laws_ok &= rep.passed;
    }

    // λ = 64 collapses the Peetre norm onto the plain norm on smooth input
    let smooth = SampledField::from_spatial_fn(grid, |x| {
        Complex64::new((-x[0] * x[0] / 6.0).exp() * (5.0 * x[0]).cos(), 0.0)
    });
    let params = NormParams::new(0.5, 2.0, 2.0).unwrap().with_lambda(64.0);
    let plain = besov_norm(&smooth, &params, BlockKernel::Family(&fam), (-4, 6)).unwrap();
    let peetre = peetre_besov_norm(&smooth, &params, BlockKernel::Family(&fam), (-4, 6)).unwrap();
    let rel = (peetre - plain).abs() / plain;
    report(
        "07 maximal-function-laws",
        laws_ok && rel < 1e-5,
        &format!("domination+monotonicity exact on 20 fields; λ=64 deviation {rel:.3e} < 1e-5"),
    );
}

#[test]
fn criterion_08_dilation_envelope() {
    let grid = GridSpec::new(1, 64.0, 4096).unwrap();
    let fam = build_lp_family(&grid, -4, 6).unwrap();
    let eta = fam.as_kernel();
    let psi = make_fractional_poisson(1.0, 1).unwrap();
    let ratios = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
    let (_, near) = check_dilation_lemma(&eta, &psi, &grid, 2, 1.0, &ratios).unwrap();
    let deviation = (near.slope - 1.0).abs();
    report(
        "08 dilation-envelope",
        deviation <= 0.25,
        &format!("near-case slope {:.4} within ±0.25 of m=1", near.slope),
    );
}

#[test]
fn criterion_09_stromberg_audit() {
    let grid = default_grid();
    let kernel = make_fractional_poisson(1.0, 1).unwrap();
    let cfg = CheckConfig::default();
    let mut all_ok = true;
    let mut details = Vec::new();
    for j in [0, 1, 2] {
        let corpus = generate(
            &CorpusSpec::new(Family::SingleBlock { count: 1, j }, 90 + j as u64),
            &grid,
        )
        .unwrap();
        let f = &corpus[0];
        let base = check_stromberg(f, &kernel, 1.0, 2.0, 1.0, j, 6, &cfg).unwrap();
        let c = base.empirical_c.unwrap();
        all_ok &= base.passed && c.is_finite() && c > 0.0;

        // translation invariance to round-off
        let shifted = f.as_spatial().unwrap().translate(&[173]).unwrap();
        let c_shift = check_stromberg(&shifted, &kernel, 1.0, 2.0, 1.0, j, 6, &cfg)
            .unwrap()
            .empirical_c
            .unwrap();
        let shift_dev = (c_shift - c).abs() / c;
        all_ok &= shift_dev < 1e-10;

        // sample-doubling stability: same trigonometric polynomial on the
        // refined grid
        let fine = f.upsample().unwrap();
        let c_fine = check_stromberg(&fine, &kernel, 1.0, 2.0, 1.0, j, 6, &cfg)
            .unwrap()
            .empirical_c
            .unwrap();
        let drift = (c_fine - c).abs() / c;
        all_ok &= drift < 0.10;
        details.push(format!(
            "j={j}: C={c:.4}, shift dev {shift_dev:.1e}, N-doubling drift {:.2}%",
            drift * 100.0
        ));
    }
    report("09 stromberg-audit", all_ok, &details.join("; "));
}

#[test]
fn criterion_10_equivalence_stability() {
    let fam = Arc::new(default_family());
    let grid = *fam.grid();
    let corpus_spec = CorpusSpec::new(
        Family::ModulatedGaussian {
            count: 20,
            width_lo: 0.8,
            width_hi: 3.0,
            freq_lo: 0.4,
            freq_hi: 12.0,
        },
        1001,
    );
    let corpus = generate(&corpus_spec, &grid).unwrap();
    let params = NormParams::new(0.5, 2.0, 2.0).unwrap();
    let engine_a = NormEngine::besov(params, EngineKernel::Family(fam.clone()), (-4, 6));
    let engine_b = NormEngine::besov(
        params,
        EngineKernel::Kernel(make_fractional_poisson(2.0, 1).unwrap()),
        (-4, 6),
    );
    let report_coarse =
        norm_equivalence_report(&corpus, &engine_a, &engine_b, EquivalenceGate::default())
            .unwrap();

    // same corpus elements on the doubled grid
    let fine_corpus: Vec<SampledField> =
        corpus.iter().map(|f| f.upsample().unwrap()).collect();
    let fine_grid = *fine_corpus[0].grid();
    let fine_family = Arc::new(build_lp_family(&fine_grid, -4, 6).unwrap());
    let fine_a = NormEngine::besov(params, EngineKernel::Family(fine_family), (-4, 6));
    let fine_b = NormEngine::besov(
        params,
        EngineKernel::Kernel(make_fractional_poisson(2.0, 1).unwrap()),
        (-4, 6),
    );
    let report_fine =
        norm_equivalence_report(&fine_corpus, &fine_a, &fine_b, EquivalenceGate::default())
            .unwrap();

    let drift =
        (report_fine.geometric_mean - report_coarse.geometric_mean).abs() / report_coarse.geometric_mean;
    report(
        "10 equivalence-stability",
        report_coarse.passed && drift < 0.15,
        &format!(
            "spread {:.2} < 100, constant {:.4} → {:.4}, drift {:.2}% < 15%",
            report_coarse.spread,
            report_coarse.geometric_mean,
            report_fine.geometric_mean,
            drift * 100.0
        ),
    );
}

#[test]
fn criterion_11_negative_control() {
    let fam = Arc::new(default_family());
    let grid = *fam.grid();
    // dilate ladder on a single low mode, climbing 7 octaves toward the
    // fine end of the covered annulus
    let corpus = generate(
        &CorpusSpec::new(
            Family::DilateLadder {
                k_lo: 0,
                k_hi: 7,
                base_center: 2.0 * std::f64::consts::PI * 2.0 / 64.0,
                base_halfwidth: 0.04,
            },
            77,
        ),
        &grid,
    )
    .unwrap();
    let params = NormParams::new(1.0, 2.0, 2.0).unwrap();
    let engine_a = NormEngine::besov(params, EngineKernel::Family(fam.clone()), (-4, 6));
    // plain Gaussian: no cancellation at the origin (r=0 < α=1)
    let engine_b = NormEngine::besov(params, EngineKernel::Kernel(make_gaussian(1)), (-4, 6));
    let rep = norm_equivalence_report(&corpus, &engine_a, &engine_b, EquivalenceGate::default())
        .unwrap();
    let monotone = rep
        .entries
        .windows(2)
        .all(|w| w[1].ratio > w[0].ratio);
    report(
        "11 negative-control",
        !rep.passed && monotone,
        &format!(
            "gate failed as designed: spread {:.1} > 100, ratio grows monotonically along the ladder ({:.3} → {:.3})",
            rep.spread,
            rep.entries.first().map(|e| e.ratio).unwrap_or(f64::NAN),
            rep.entries.last().map(|e| e.ratio).unwrap_or(f64::NAN)
        ),
    );
}

#[test]
fn criterion_12_cube_engine_brute_force() {
    let grid = GridSpec::new(1, 64.0, 256).unwrap();
    let fam = build_lp_family(&grid, -4, 4).unwrap();
    let corpus = generate(
        &CorpusSpec::new(
            Family::RandomBandlimited {
                count: 16,
                lo: 0.3,
                hi: 10.0,
            },
            12,
        ),
        &grid,
    )
    .unwrap();
    let alpha = 0.5;
    let mut worst = 0.0f64;
    for f in &corpus {
        for q in [2.0, f64::INFINITY] {
            let engine =
                triebel_infinity_norm(f, alpha, q, BlockKernel::Family(&fam), (-4, 4)).unwrap();
            let brute = brute_force_infinity(f, alpha, q, &fam, (-4, 4));
            worst = worst.max((engine - brute).abs() / brute.max(1e-300));
        }
    }
    report(
        "12 cube-engine-brute-force",
        worst <= 1e-12,
        &format!("16 fields, q ∈ {{2, ∞}}, worst relative gap {worst:.3e} ≤ 1e-12"),
    );
}

/// Independent enumeration over all dyadic cubes, levels and scales.
fn brute_force_infinity(
    f: &SampledField,
    alpha: f64,
    q: f64,
    fam: &LPFamily,
    window: (i32, i32),
) -> f64 {
    let grid = *f.grid();
    let clean = f.without_dc().unwrap();
    let blocks: Vec<Vec<f64>> = (window.0..=window.1)
        .map(|j| {
            lptk::lp::dyadic_block(&clean, j, BlockKernel::Family(fam))
                .unwrap()
                .values()
                .iter()
                .map(|v| v.norm())
                .collect()
        })
        .collect();
    let n = grid.samples();
    let mut best = 0.0f64;
    let mut level = 0usize;
    while n >> level >= 4 {
        let side = n >> level;
        let ell = ((side as f64) * grid.step()).log2();
        let j_lo = (-ell).ceil() as i32;
        for cube in 0..(1usize << level) {
            let start = cube * side;
            if q.is_infinite() {
                for j in j_lo.max(window.0)..=window.1 {
                    let w = (j as f64 * alpha).exp2();
                    let mut sum = 0.0;
                    for x in start..start + side {
                        sum += w * blocks[(j - window.0) as usize][x];
                    }
                    best = best.max(sum / side as f64);
                }
            } else {
                let mut sum = 0.0;
                for x in start..start + side {
                    for j in j_lo.max(window.0)..=window.1 {
                        let w = (j as f64 * alpha).exp2();
                        sum += (w * blocks[(j - window.0) as usize][x]).powf(q);
                    }
                }
                best = best.max((sum / side as f64).powf(1.0 / q));
            }
        }
        level += 1;
    }
    best
}
