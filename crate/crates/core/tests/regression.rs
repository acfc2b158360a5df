//! Frozen values produced by this implementation. A change here means the
//! numerics changed, not necessarily that they broke.

use approx::assert_abs_diff_eq;
use jch_core::meanfield::{self, MfOptions, DEFAULT_N_MAX};
use jch_core::phase::{self, TipOptions};
use jch_core::SiteParams;

fn resonant() -> SiteParams {
    SiteParams::with_detuning(0.0, 0.0, 1.0).unwrap()
}

#[test]
fn one_polariton_tips() {
    let opts = TipOptions::default();
    let t1 = phase::lobe_tip(&[resonant()], &[1], &opts).unwrap();
    let t2 = phase::lobe_tip(&[resonant()], &[2], &opts).unwrap();
    assert_abs_diff_eq!(t1, 0.149218940139, epsilon = 1e-8);
    assert_abs_diff_eq!(t2, 0.012252143808, epsilon = 1e-9);
}

#[test]
fn mean_field_tip() {
    let tip = meanfield::mf_lobe_tip(&resonant(), 2, 1, DEFAULT_N_MAX, 1e-4, &MfOptions::default())
        .unwrap();
    assert_abs_diff_eq!(tip.kappa, 0.0797629, epsilon = 3e-6);
    assert_abs_diff_eq!(tip.mu, -0.78398, epsilon = 2e-3);
    let one_polariton = phase::lobe_tip(&[resonant()], &[1], &TipOptions::default()).unwrap();
    assert!(tip.kappa < one_polariton);
}
