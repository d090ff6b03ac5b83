use approx::assert_relative_eq;
use ratesplit::bounds::*;
use ratesplit::estimator::{expect_gw, mc_full_layers, AxisRule};
use ratesplit::special::{exp_scaled_e1, expected_log_affine, EULER_GAMMA};
use ratesplit::{db_to_linear, ChannelPoint, ErrorProfile, ExpectationSpec, FadingModel, Layering};

fn fig1() -> FadingModel {
    FadingModel::constant(0.5, 0.5)
}

fn ch10() -> ChannelPoint {
    ChannelPoint::new(10.0, 1.0).unwrap()
}

fn interpolation() -> FadingModel {
    FadingModel::normalized(ErrorProfile::interpolation(0.25).unwrap()).unwrap()
}

fn prediction() -> FadingModel {
    FadingModel::normalized(ErrorProfile::prediction(0.25).unwrap()).unwrap()
}

// Σℓ log(1+Γℓ) with an explicit W, integrated on the tensor rule.
fn layered_tensor(model: &FadingModel, ch: &ChannelPoint, q: &Layering, spec: &ExpectationSpec) -> f64 {
    let vt = model.error_variance(ch.snr()).unwrap();
    let (p, n0) = (ch.power, ch.n0);
    let cum = q.cumulative().to_vec();
    expect_gw(
        |g, w| {
            let mut prev = 0.0;
            let mut s = 0.0;
            for &cur in &cum {
                let pl = cur - prev;
                let den = vt * prev * w + vt * pl + (g + vt) * (p - cur) + n0;
                s += (g * pl / den).ln_1p();
                prev = cur;
            }
            s
        },
        model,
        ch.snr(),
        spec,
    )
    .unwrap()
    .value
}

#[test]
fn layered_closed_form_w_matches_tensor_rule() {
    let spec = ExpectationSpec {
        nodes_g: 48,
        nodes_w: 48,
        ..ExpectationSpec::default()
    };
    for (model, db) in [(fig1(), 10.0), (fig1(), 30.0), (interpolation(), 20.0), (prediction(), 0.0)] {
        let ch = ChannelPoint::from_snr(db_to_linear(db)).unwrap();
        for q in [
            Layering::uniform(ch.power, 3).unwrap(),
            Layering::new(vec![0.1 * ch.power, 0.7 * ch.power, ch.power]).unwrap(),
        ] {
            let closed = layered_bound(&model, &ch, &q, &ExpectationSpec::default()).unwrap().rate_nats;
            let tensor = layered_tensor(&model, &ch, &q, &spec);
            assert_relative_eq!(closed, tensor, max_relative = 1e-8);
        }
    }
}

#[test]
fn two_layer_limits() {
    let spec = ExpectationSpec::default();
    let rm = medard_bound(&fig1(), &ch10(), &spec).unwrap().rate_nats;
    let near_full = two_layer_bound(&fig1(), &ch10(), 10.0 * (1.0 - 1e-9), &spec).unwrap();
    assert!((near_full.total.rate_nats - rm).abs() < 1e-8);
    let near_zero = two_layer_bound(&fig1(), &ch10(), 1e-9, &spec).unwrap();
    assert!((near_zero.total.rate_nats - rm).abs() < 1e-8);
    for frac in [0.1, 0.5, 0.78, 0.95] {
        let t = two_layer_bound(&fig1(), &ch10(), frac * 10.0, &spec).unwrap();
        assert!(t.total.rate_nats > rm);
        assert_relative_eq!(t.total.rate_nats, t.r1.value + t.r2.value, max_relative = 1e-15);
        let j = two_layer_jensen_r2(&fig1(), &ch10(), frac * 10.0, &spec).unwrap();
        assert!(j.value < t.r2.value, "Jensen direction at {frac}");
    }
}

#[test]
fn medard_bounded_for_constant_error() {
    let spec = ExpectationSpec::default();
    let a = medard_bound(&fig1(), &ChannelPoint::new(1e4, 1.0).unwrap(), &spec).unwrap().rate_nats;
    let b = medard_bound(&fig1(), &ChannelPoint::new(1e6, 1.0).unwrap(), &spec).unwrap().rate_nats;
    assert!(b - a < 0.01 && b >= a);
    // limit E log(1 + G/Ṽ) = e^{Ṽ/V̂} E1(Ṽ/V̂) = e·E1(1)
    assert!((b - exp_scaled_e1(1.0).unwrap()).abs() < 1e-5);
}

#[test]
fn coherent_capacity_increasing() {
    let spec = ExpectationSpec::default();
    let mut last = 0.0;
    for db in (-10..=40).step_by(5) {
        let c = coherent_capacity(&interpolation(), &ChannelPoint::from_snr(db_to_linear(db as f64)).unwrap(), &spec)
            .unwrap()
            .rate_nats;
        assert!(c > last);
        // unit total variance
        assert_relative_eq!(c, exp_scaled_e1(1.0 / db_to_linear(db as f64)).unwrap(), max_relative = 1e-9);
        last = c;
    }
}

#[test]
fn perfect_csi_collapse() {
    let m = FadingModel::constant(1.0, 0.0);
    let spec = ExpectationSpec::default();
    for rho in [0.1, 1.0, 100.0, 1e5] {
        let ch = ChannelPoint::from_snr(rho).unwrap();
        let rm = medard_bound(&m, &ch, &spec).unwrap();
        let rs = rate_splitting_supremum(&m, &ch, &spec).unwrap();
        let cc = coherent_capacity(&m, &ch, &spec).unwrap();
        let iu = upper_bound_iupper(&m, &ch, &spec).unwrap();
        let tol = rm.error_estimate() + rs.error_estimate() + cc.error_estimate();
        assert!((rm.rate_nats - cc.rate_nats).abs() <= tol);
        assert!((rs.rate_nats - cc.rate_nats).abs() <= tol + 1e-14 * cc.rate_nats);
        assert_eq!(iu.rate_nats, rm.rate_nats);
    }
}

#[test]
fn degenerate_estimate_collapses_every_layering() {
    // Ĥ = 0 almost surely: all bounds are zero whatever the layering
    let m = FadingModel::constant(0.0, 0.7);
    let spec = ExpectationSpec::default();
    let rm = medard_bound(&m, &ch10(), &spec).unwrap().rate_nats;
    assert_eq!(rm, 0.0);
    for q in [Layering::uniform(10.0, 5).unwrap(), Layering::new(vec![0.3, 9.0, 10.0]).unwrap()] {
        assert_eq!(layered_bound(&m, &ch10(), &q, &spec).unwrap().rate_nats, rm);
    }
    // Ṽ = 0: every layering telescopes to R_M
    let m = FadingModel::constant(0.8, 0.0);
    let rm = medard_bound(&m, &ch10(), &spec).unwrap();
    for q in [Layering::uniform(10.0, 7).unwrap(), Layering::new(vec![0.3, 9.0, 10.0]).unwrap()] {
        let r = layered_bound(&m, &ch10(), &q, &spec).unwrap();
        assert!((r.rate_nats - rm.rate_nats).abs() <= r.error_estimate() + rm.error_estimate());
    }
}

#[test]
fn iupper_correction_limits() {
    let spec = ExpectationSpec::default();
    // fixed Ṽ, growing SNR: correction → E[-log W] = γ
    let m = FadingModel::constant(0.5, 0.5);
    let c = iupper_correction(&m, &ChannelPoint::from_snr(1e8).unwrap(), &spec).unwrap().value;
    assert!((c - EULER_GAMMA).abs() < 1e-6, "{c}");
    // fixed SNR, vanishing Ṽ: correction → 0
    let mut last = f64::INFINITY;
    for vt in [1e-1, 1e-3, 1e-5, 1e-7] {
        let m = FadingModel::constant(1.0 - vt, vt);
        let c = iupper_correction(&m, &ch10(), &spec).unwrap().value;
        let exact = (vt * 10.0 + 1.0).ln() - expected_log_affine(vt * 10.0, 1.0).unwrap();
        assert_relative_eq!(c, exact, max_relative = 1e-12);
        assert!(c < last && c >= 0.0);
        last = c;
    }
    assert!(last < 1e-5);
}

#[test]
fn iupper_with_entropy_callback() {
    use ratesplit::fading::{entropy_power_from_entropy, ErrorLaw};
    use std::sync::Arc;
    // entropy of CN(0, Ṽ): log(πeṼ); entropy power then equals Ṽ
    let vt = 0.5;
    let h = (std::f64::consts::PI * std::f64::consts::E * vt).ln();
    assert_relative_eq!(entropy_power_from_entropy(h), vt, max_relative = 1e-14);
    let gaussian = fig1();
    let via_entropy = fig1().with_error_law(ErrorLaw::Entropy(Arc::new(move |_, _| h)));
    let spec = ExpectationSpec::default();
    let a = upper_bound_iupper(&gaussian, &ch10(), &spec).unwrap().rate_nats;
    let b = upper_bound_iupper(&via_entropy, &ch10(), &spec).unwrap().rate_nats;
    assert_relative_eq!(a, b, max_relative = 1e-13);
    // a smaller entropy power can only loosen the bound
    let lower = fig1().with_error_law(ErrorLaw::Entropy(Arc::new(move |_, _| h - 1.0)));
    assert!(upper_bound_iupper(&lower, &ch10(), &spec).unwrap().rate_nats > a);
    // no density: Φ̃ = 0, finite correction log(1 + ṼP/N0)
    let singular = fig1().with_error_law(ErrorLaw::Entropy(Arc::new(|_, _| f64::NEG_INFINITY)));
    let c = iupper_correction(&singular, &ch10(), &spec).unwrap().value;
    assert_relative_eq!(c, 6f64.ln(), max_relative = 1e-14);
    // coherent capacity is refused for non-Gaussian error
    assert!(coherent_capacity(&via_entropy, &ch10(), &spec).is_err());
}

#[test]
fn supremum_dominates_optimized_layers() {
    use ratesplit::optimize::optimize_layers_sequence;
    use ratesplit::OptimizerConfig;
    let spec = ExpectationSpec::default();
    for (m, db) in [(fig1(), 10.0), (interpolation(), 20.0)] {
        let ch = ChannelPoint::from_snr(db_to_linear(db)).unwrap();
        let rs = rate_splitting_supremum(&m, &ch, &spec).unwrap().rate_nats;
        let seq = optimize_layers_sequence(&m, &ch, 4, &spec, &OptimizerConfig::default()).unwrap();
        for o in &seq {
            assert!(o.bound.rate_nats <= rs + 1e-9);
            // never below the uniform layering with the same count
            let u = layered_bound(&m, &ch, &Layering::uniform(ch.power, o.layering.len()).unwrap(), &spec).unwrap();
            assert!(o.bound.rate_nats >= u.rate_nats - 1e-12);
        }
    }
}

#[test]
fn mapped_uniform_layerings_converge() {
    let spec = ExpectationSpec::default();
    let ch = ch10();
    let rs = rate_splitting_supremum(&fig1(), &ch, &spec).unwrap().rate_nats;
    let mut last = f64::INFINITY;
    for k in [16usize, 64, 256, 1024] {
        let q = Layering::uniform(10.0, k).unwrap().map_monotone(|x| x * x / 10.0).unwrap();
        let gap = (rs - layered_bound(&fig1(), &ch, &q, &spec).unwrap().rate_nats).abs();
        assert!(gap < last);
        last = gap;
    }
    assert!(last < 2e-3);
}

#[test]
fn supremum_argument_stays_in_domain() {
    let spec = ExpectationSpec::default();
    for &(vhat, vt) in &[(1e-6, 1.0), (1.0, 1e-12), (10.0, 10.0), (0.5, 0.5)] {
        let m = FadingModel::constant(vhat, vt);
        for rho in [1e-6, 1e-2, 1.0, 1e4, 1e9] {
            let r = rate_splitting_supremum(&m, &ChannelPoint::from_snr(rho).unwrap(), &spec).unwrap();
            assert!(r.rate_nats.is_finite() && r.rate_nats >= 0.0);
        }
    }
}

#[test]
fn node_doubling_is_within_target_for_presets() {
    let spec = ExpectationSpec::default();
    for (m, dbs) in [
        (fig1(), vec![-10.0, 0.0, 10.0, 30.0]),
        (prediction(), vec![-10.0, 0.0, 20.0, 40.0]),
        (interpolation(), vec![-10.0, 10.0, 30.0, 50.0]),
    ] {
        for db in dbs {
            let ch = ChannelPoint::from_snr(db_to_linear(db)).unwrap();
            let values = [
                medard_bound(&m, &ch, &spec).unwrap(),
                rate_splitting_supremum(&m, &ch, &spec).unwrap(),
                upper_bound_iupper(&m, &ch, &spec).unwrap(),
                coherent_capacity(&m, &ch, &spec).unwrap(),
                layered_bound(&m, &ch, &Layering::uniform(ch.power, 4).unwrap(), &spec).unwrap(),
            ];
            for v in values {
                assert!(v.estimate.within(spec.target_rel_tol), "{:?} at {db} dB: {:?}", v.kind, v.estimate);
            }
        }
    }
}

#[test]
fn plain_laguerre_underresolves_high_snr() {
    // the graded rule exists because of this
    let ch = ChannelPoint::from_snr(db_to_linear(40.0)).unwrap();
    let laguerre = ExpectationSpec {
        rule_g: AxisRule::Laguerre,
        rule_w: AxisRule::Laguerre,
        nodes_g: 64,
        nodes_w: 64,
        ..ExpectationSpec::default()
    };
    let fine = rate_splitting_supremum(&interpolation(), &ch, &ExpectationSpec::quadrature(64)).unwrap();
    let coarse = rate_splitting_supremum(&interpolation(), &ch, &laguerre).unwrap();
    assert!((fine.rate_nats - coarse.rate_nats).abs() > 1e-4);
    assert!(coarse.error_estimate() > 1e-4);
    assert!(fine.error_estimate() < 1e-6);
}

#[test]
fn single_layer_joint_mc_matches_medard() {
    let q = Layering::uniform(10.0, 1).unwrap();
    let mc = mc_full_layers(&fig1(), &ch10(), &q, 200_000, 11).unwrap();
    let rm = medard_bound(&fig1(), &ch10(), &ExpectationSpec::default()).unwrap().rate_nats;
    assert!((mc.value - rm).abs() < 4.0 * mc.error_estimate);
}

#[test]
fn asymptotic_gap_rows() {
    let spec = ExpectationSpec::default();
    let grid: Vec<f64> = [0.0, 20.0, 40.0].iter().map(|&d| db_to_linear(d)).collect();
    let rows = asymptotic_gap_diag(&interpolation(), &grid, &spec).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].gap_rstar > rows[1].gap_rstar && rows[1].gap_rstar > rows[2].gap_rstar);
    assert!(rows.iter().all(|r| r.gap_medard >= r.gap_rstar && r.gap_rstar > 0.0));
    let constant = asymptotic_gap_diag(&fig1(), &grid, &spec).unwrap();
    assert!(constant[2].gap_medard > 0.1);
}

#[test]
fn prelog_examples() {
    let spec = ExpectationSpec::default();
    let grid: Vec<f64> = [30.0, 35.0, 40.0, 45.0, 50.0].iter().map(|&d| db_to_linear(d)).collect();
    let unit = FadingModel::constant(0.5, 0.5);
    let coh: Vec<(f64, f64)> = grid
        .iter()
        .map(|&r| (r, coherent_capacity(&unit, &ChannelPoint::from_snr(r).unwrap(), &spec).unwrap().rate_nats))
        .collect();
    assert!((prelog_diag(&coh).unwrap() - 1.0).abs() < 1e-3);
    let rm: Vec<(f64, f64)> = grid
        .iter()
        .map(|&r| (r, medard_bound(&unit, &ChannelPoint::from_snr(r).unwrap(), &spec).unwrap().rate_nats))
        .collect();
    assert!(prelog_diag(&rm).unwrap().abs() < 1e-3);
}
