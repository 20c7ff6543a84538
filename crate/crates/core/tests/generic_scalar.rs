//! The numeric core is generic over the scalar type; these tests instantiate
//! everything at `f32` and compare against `f64` at single-precision
//! tolerances. (The crate's stated accuracy targets hold only for `f64`.)

use distillery_core::budget::p_s_infinity;
use distillery_core::decoherence::{dephase, embed_pure};
use distillery_core::entanglement::{
    logneg_mixed, logneg_partial_transpose_oracle, logneg_pure, logneg_subtracted, logneg_tmss,
};
use distillery_core::fock::SchmidtPureState;
use distillery_core::malting::{max_attempts, subtraction_prob, MaltingParams};
use distillery_core::mashing::{build_operator, limiting_state, mash_pure};

#[test]
fn single_precision_pipeline_tracks_double_precision() {
    let lam32 = 0.2f32;
    let lam64 = 0.2f64;

    let s32 = SchmidtPureState::<f32>::tmss(lam32, 20).unwrap();
    let s64 = SchmidtPureState::<f64>::tmss(lam64, 20).unwrap();
    let e32 = logneg_pure(&s32).unwrap().log_negativity;
    let e64 = logneg_pure(&s64).unwrap().log_negativity;
    assert!((e32 as f64 - e64).abs() < 1e-5);
    assert!((logneg_tmss(lam32).unwrap() as f64 - logneg_tmss(lam64).unwrap()).abs() < 1e-6);

    let r32 = SchmidtPureState::<f32>::subtracted_state(0.18, 20).unwrap();
    let r64 = SchmidtPureState::<f64>::subtracted_state(0.18, 20).unwrap();
    let (m32, p32) = mash_pure(&r32, &r32).unwrap();
    let (m64, p64) = mash_pure(&r64, &r64).unwrap();
    assert!((p32 as f64 - p64).abs() < 1e-5);
    for n in 0..=20usize {
        assert!((m32.coeff(n) as f64 - m64.coeff(n)).abs() < 1e-4);
    }

    let bar32 = limiting_state(&r32).unwrap();
    let bar64 = limiting_state(&r64).unwrap();
    assert!((bar32.coeff(2) as f64 - bar64.coeff(2)).abs() < 1e-5);

    // Triangular spectrum stays exact even in single precision: powers of
    // two are representable.
    let op = build_operator(&r32).unwrap();
    for (k, &eig) in op.eigenvalues().iter().enumerate() {
        assert_eq!(eig, 0.5f32.powi(k as i32));
    }

    let params32 = MaltingParams::new(0.2f32, 0.9).unwrap();
    let params64 = MaltingParams::new(0.2f64, 0.9).unwrap();
    assert_eq!(
        max_attempts(&params32).unwrap().f_c,
        max_attempts(&params64).unwrap().f_c
    );
    assert!((subtraction_prob(&params32, 2) as f64 - subtraction_prob(&params64, 2)).abs() < 1e-7);
    assert!((p_s_infinity(0.15f32).unwrap() as f64 - p_s_infinity(0.15f64).unwrap()).abs() < 1e-6);
    assert!(
        (logneg_subtracted(0.15f32).unwrap() as f64 - logneg_subtracted(0.15f64).unwrap()).abs()
            < 1e-6
    );
}

#[test]
fn single_precision_density_path() {
    let s = SchmidtPureState::<f32>::tmss(0.25, 8).unwrap();
    let rho = embed_pure(&s).unwrap();
    let dephased = dephase(&rho, 0.8).unwrap();
    let fast = logneg_mixed(&dephased).unwrap().log_negativity;
    let slow = logneg_partial_transpose_oracle(&dephased)
        .unwrap()
        .log_negativity;
    // The f32 eigensolve of the 81x81 partial transpose carries a few
    // hundred ulps; this only demonstrates that the generic path runs.
    assert!((fast - slow).abs() < 1e-3, "{} vs {}", fast, slow);
}
