mod common;

use proptest::prelude::*;

use sosdeg::bounds::bound_report;
use sosdeg::certify::{certify_multiplier, verify_certificate, verify_separator, CertifyOutcome};
use sosdeg::curves::curve_by_name;
use sosdeg::sdp::SdpOptions;

const TOTALLY_REAL: [&str; 2] = ["deltoid", "quartic-triple-point"];

fn sample(curve: &str, j: u32, seed: u64, shifted: bool) -> (sosdeg::curves::CurveModel, Vec<f64>) {
    let model = curve_by_name(curve).unwrap();
    let f = if shifted {
        common::shifted_pos(&model, j, seed)
    } else {
        common::witness_plus_squares(&model, j, seed)
    };
    (model, f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn certificate_at_the_curve_bound(
        c in 0usize..2, j in 1u32..=2, seed in 0u64..10_000, shifted in any::<bool>(),
    ) {
        let (model, f) = sample(TOTALLY_REAL[c], j, seed, shifted);
        let k = bound_report(&model).unwrap().k_curve as u32;
        match certify_multiplier(&model, &f, j, k, &SdpOptions::default()).unwrap() {
            CertifyOutcome::Certificate(cert) => {
                prop_assert!(verify_certificate(&model, &f, &cert, 1e-6).passed);
                prop_assert!((cert.gram_a.trace() - 1.0).abs() <= 1e-8);
            }
            o => prop_assert!(false, "{o:?}"),
        }
    }

    #[test]
    fn verified_outcomes_are_exclusive_and_monotone(
        c in 0usize..2, seed in 0u64..10_000, k in 0u32..=1,
    ) {
        let (model, f) = sample(TOTALLY_REAL[c], 1, seed, true);
        let strict = SdpOptions { eps_feas: 1e-9, max_iter: 300, ..SdpOptions::default() };
        let mut cert = false;
        let mut sep = false;
        for opts in [SdpOptions::default(), strict] {
            match certify_multiplier(&model, &f, 1, k, &opts).unwrap() {
                CertifyOutcome::Certificate(x) => cert |= verify_certificate(&model, &f, &x, 1e-6).passed,
                CertifyOutcome::Separator(s) => sep |= verify_separator(&model, &f, 1, &s, 1e-6).passed,
                CertifyOutcome::Indeterminate(_) => {}
            }
        }
        prop_assert!(!(cert && sep));
        if cert {
            let next = certify_multiplier(&model, &f, 1, k + 1, &SdpOptions::default()).unwrap();
            prop_assert!(next.is_certificate(), "{next:?}");
        }
    }

    #[test]
    fn separators_pass_at_their_own_margin(c in 0usize..2, seed in 0u64..10_000) {
        let (model, f) = sample(TOTALLY_REAL[c], 1, seed, true);
        if let CertifyOutcome::Separator(s) = certify_multiplier(&model, &f, 1, 0, &SdpOptions::default()).unwrap() {
            prop_assert!(verify_separator(&model, &f, 1, &s, s.margin).passed);
            prop_assert!(s.margin >= 1e-6);
            prop_assert!((s.ell.norm() - 1.0).abs() <= 1e-9);
        }
    }
}
