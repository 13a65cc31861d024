//! Cross-checks of the numerically integrated pairing against its closed
//! gamma form, including the raw 4D integral with no sphericity shortcut.

use num_complex::Complex64;
use rk_core::model::{
    model_value_closed, model_value_numeric, model_value_pairing_4d, GL2Parameter, GL3Parameter,
    SpectralPoint,
};
use rk_core::quad::QuadratureSpec;

const PI_3_2: f64 = 5.568327996831707845285; // pi^{3/2}

fn spec(rel: f64, levels: u32) -> QuadratureSpec {
    QuadratureSpec {
        rel_tol: rel,
        abs_tol: 1e-14,
        de_level_max: levels,
        parallelism: 1,
        ..Default::default()
    }
}

#[test]
fn numeric_pairing_matches_closed_form_at_origin() {
    let p = GL3Parameter::from_imag(0.0, 0.0, 0.0).unwrap();
    let q = GL2Parameter::from_imag(0.0).unwrap();
    let r = model_value_numeric(&p, &q, SpectralPoint { t: 0.0 }, &spec(1e-4, 7)).unwrap();
    let want = 1281.479059768615009511; // pi^{3/2} * closed value
    let rel = (r.value - Complex64::new(want, 0.0)).norm() / want;
    assert!(rel < 1e-5, "value {} rel err {rel:.3e}", r.value);
    assert!(r.converged);
}

#[test]
fn numeric_pairing_matches_closed_form_off_origin() {
    let p = GL3Parameter::from_imag(0.5, 0.0, -0.5).unwrap();
    let q = GL2Parameter::from_imag(0.3).unwrap();
    let r = model_value_numeric(&p, &q, SpectralPoint { t: 0.0 }, &spec(1e-4, 7)).unwrap();
    let closed = model_value_closed(&p, &q).unwrap();
    let want = closed * PI_3_2;
    let rel = (r.value - want).norm() / want.norm();
    assert!(rel < 1e-4, "value {} want {want} rel err {rel:.3e}", r.value);
}

// the 4D form is an oracle for the sphericity reduction, so it is compared
// at deliberately loose settings at two parameter points; the iterated
// quadrature needs ~40 minutes on one core even at these settings, so the
// test only runs under --include-ignored
#[test]
#[ignore = "iterated 4D quadrature takes ~40 CPU-minutes"]
fn raw_4d_pairing_agrees_with_reduced_3d() {
    let loose = spec(1e-2, 4);
    let tcases = [
        ([0.0, 0.0, 0.0], 0.0),
        ([0.3, 0.0, -0.3], 0.2),
    ];
    for (l, tau) in tcases {
        let p = GL3Parameter::from_imag(l[0], l[1], l[2]).unwrap();
        let q = GL2Parameter::from_imag(tau).unwrap();
        let r4 = model_value_pairing_4d(&p, &q, SpectralPoint { t: 0.0 }, &loose).unwrap();
        let r3 = model_value_numeric(&p, &q, SpectralPoint { t: 0.0 }, &spec(1e-5, 7)).unwrap();
        let diff = (r4.value - r3.value).norm();
        let budget = r4.error_estimate + r3.error_estimate;
        let rel = diff / r3.value.norm();
        assert!(
            diff <= budget && rel < 1e-2,
            "{l:?} tau {tau}: 4d {} vs 3d {} diff {diff:.3e} budget {budget:.3e} rel {rel:.3e}",
            r4.value,
            r3.value
        );
    }
}
