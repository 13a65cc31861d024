//! Acceptance checks. Each test covers one headline criterion at its stated
//! tolerance and prints a single PASS/FAIL line (visible with --nocapture);
//! the assertions carry the same information for the default harness output.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rk_core::appendix::{self, IdentityId};
use rk_core::chain;
use rk_core::gamma_factors::stade_gamma;
use rk_core::model::{
    bump_value, calibrate_constant, reciprocity_modulus, BumpProfile, GL2Parameter, GL3Parameter,
    SpectralPoint,
};
use rk_core::quad::QuadratureSpec;
use rk_core::special::gamma;

fn report(pass: bool, name: &str, detail: &str) {
    println!("{}: {name} ({detail})", if pass { "PASS" } else { "FAIL" });
}

/// All eight integral and series identities hold over 20 seeded draws each,
/// at 1e-7 for the quadrature-backed ones and 1e-9 for the series-vs-series
/// pair.
#[test]
fn appendix_identities_hold_over_seeded_draws() {
    let spec = QuadratureSpec::default();
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for id in IdentityId::all() {
        for seed in 7..27 {
            let r = appendix::seeded_report(id, seed, appendix::IM_DEFAULT, id.default_tolerance(), &spec);
            worst = worst.max(r.rel_err);
            if !r.pass {
                failures.push(format!("{id} seed {seed}: rel_err {:.3e}", r.rel_err));
            }
        }
    }
    let pass = failures.is_empty();
    report(
        pass,
        "eight integral identities over 160 seeded draws",
        &format!("worst rel_err {worst:.3e}"),
    );
    assert!(pass, "failed draws: {failures:?}");
}

/// Every consecutive pair of the ten pairing representations agrees at the
/// three fixed spectral points, under the dimension-graded tolerance ladder.
#[test]
fn reduction_ladder_steps_agree_at_fixed_spectral_points() {
    let points = [
        ([0.0, 0.0, 0.0], 0.0),
        ([0.5, 0.0, -0.5], 0.3),
        ([0.8, -0.8, 0.0], 0.5),
    ];
    let mut failures = Vec::new();
    let mut worst_margin: f64 = 0.0;
    let mut compared = 0;
    for (li, ti) in points {
        let p = GL3Parameter::from_imag(li[0], li[1], li[2]).unwrap();
        let q = GL2Parameter::from_imag(ti).unwrap();
        let records = chain::verify_chain(&p, &q).expect("chain evaluation");
        for r in records {
            compared += 1;
            worst_margin = worst_margin.max(r.rel_diff / r.tolerance);
            if !r.pass {
                failures.push(format!(
                    "lambda_im={li:?} tau_im={ti}: steps ({},{}) rel_diff {:.3e} > {:.0e}",
                    r.first, r.second, r.rel_diff, r.tolerance
                ));
            }
        }
    }
    let pass = failures.is_empty() && compared == 27;
    report(
        pass,
        "reduction ladder consistent at three spectral points",
        &format!("{compared} comparisons, worst rel_diff at {worst_margin:.3e} of tolerance"),
    );
    assert!(pass, "failed comparisons: {failures:?}");
}

/// The numeric pairing divided by the closed gamma form is a single constant
/// across the built-in unitary points, with relative spread at most 1e-3.
#[test]
fn closed_form_tracks_numeric_pairing_across_unitary_points() {
    let spec = QuadratureSpec {
        rel_tol: 1e-4,
        abs_tol: 1e-14,
        de_level_max: 7,
        ..QuadratureSpec::default()
    };
    let cal = calibrate_constant(&spec).expect("calibration");
    let pass = cal.points.len() >= 6 && cal.spread <= 1e-3;
    report(
        pass,
        "closed form matches the numeric pairing up to one constant",
        &format!(
            "constant {:.9} over {} points, relative spread {:.3e}",
            cal.constant,
            cal.points.len(),
            cal.spread
        ),
    );
    assert!(pass, "spread {:.3e} exceeds 1e-3", cal.spread);
}

/// `|closed form| * |completed prefactor|` is constant to 1e-10 over 50
/// random spectral points with all parameters bounded by 10.
#[test]
fn reciprocity_modulus_is_constant_over_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    rng.set_stream(8);
    let mut values = Vec::with_capacity(50);
    for _ in 0..50 {
        let y1 = rng.gen_range(-5.0..5.0);
        let y2 = rng.gen_range(-5.0..5.0);
        let tau = rng.gen_range(-10.0..10.0);
        let t = rng.gen_range(-10.0..10.0);
        let p = GL3Parameter::from_imag(y1, y2, -(y1 + y2)).unwrap();
        let q = GL2Parameter::from_imag(tau).unwrap();
        let s = SpectralPoint::new(t).unwrap();
        values.push(reciprocity_modulus(&p, &q, s).expect("modulus"));
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let spread = values
        .iter()
        .map(|v| (v / mean - 1.0).abs())
        .fold(0.0, f64::max);
    let pass = spread <= 1e-10;
    report(
        pass,
        "reciprocity modulus constant over 50 random points",
        &format!("mean {mean:.12}, spread {spread:.3e}"),
    );
    assert!(pass, "spread {spread:.3e} exceeds 1e-10");
}

/// The localized bump pairing decays like T^(-3/2): the fitted log-log slope
/// over T in {8, 16, 32, 64} sits within 0.1 of -1.5, both for fixed spectral
/// parameters and for parameters growing with T.
#[test]
fn bump_pairing_decays_like_t_to_minus_three_halves() {
    let profile = BumpProfile::new(0.5).unwrap();
    let spec = QuadratureSpec {
        rel_tol: 1e-7,
        de_level_max: 10,
        ..QuadratureSpec::default()
    };
    let scales = [8.0, 16.0, 32.0, 64.0];
    let mut slopes = Vec::new();
    for family in ["origin", "scaled"] {
        let mut pts = Vec::new();
        for &tv in &scales {
            let (li, ti, t) = if family == "origin" {
                ([0.0, 0.0, 0.0], 0.0, 0.0)
            } else {
                ([tv, 0.0, -tv], tv, tv)
            };
            let p = GL3Parameter::from_imag(li[0], li[1], li[2]).unwrap();
            let q = GL2Parameter::from_imag(ti).unwrap();
            let s = SpectralPoint::new(t).unwrap();
            let r = bump_value(&profile, &p, &q, s, tv, &spec).expect("bump value");
            pts.push((tv.ln(), r.value.norm().ln()));
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let num: f64 = pts.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = pts.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
        slopes.push((family, num / den));
    }
    let pass = slopes.iter().all(|&(_, s)| (s + 1.5).abs() <= 0.1);
    report(
        pass,
        "bump pairing decays like T^(-3/2)",
        &format!(
            "origin slope {:.4}, scaled slope {:.4}",
            slopes[0].1, slopes[1].1
        ),
    );
    assert!(pass, "slopes out of band: {slopes:?}");
}

/// Sanity anchors for the gamma machinery: the reflection-driven modulus
/// identity on the critical line, and the unit normalization of the
/// archimedean factor.
#[test]
fn gamma_modulus_identity_and_unit_normalization() {
    let mut worst = 0.0f64;
    for k in 0..200 {
        let y = -30.0 + 60.0 * (k as f64 + 0.5) / 200.0;
        let g = gamma(Complex64::new(0.5, y)).expect("gamma on the critical line");
        let lhs = g.norm_sqr() * (PI * y).cosh();
        worst = worst.max((lhs - PI).abs());
    }
    let unit = stade_gamma(
        [Complex64::new(0.0, 0.0); 3],
        [Complex64::new(0.0, 0.0); 2],
        Complex64::new(1.0, 0.0),
    )
    .expect("normalization point");
    let unit_err = (unit - 1.0).norm();
    let pass = worst <= 1e-12 && unit_err <= 1e-12;
    report(
        pass,
        "gamma modulus identity and unit normalization",
        &format!("worst |G(1/2+iy)|^2 cosh(pi y) deviation {worst:.3e}, normalization error {unit_err:.3e}"),
    );
    assert!(pass, "modulus deviation {worst:.3e}, unit error {unit_err:.3e}");
}

/// The headline moment asymptotics rest on inputs (long spectral averages,
/// families of cusp forms) that no desk-scale computation can reproduce; the
/// ladder, calibration, reciprocity, and bump checks above are the agreed
/// stand-ins. Recorded here so the suite states that scope explicitly.
#[test]
fn moment_asymptotics_substituted_by_desk_scale_checks() {
    report(
        true,
        "moment asymptotics noted as beyond desk scale",
        "covered indirectly by the ladder, calibration, reciprocity, and bump criteria",
    );
}
