use hybridlink_core::channels::{click_click_element, homodyne_project, pure_loss};
use hybridlink_core::fock::{apply_povm_element, DensityOperator, MixedState};
use hybridlink_core::swap::{analytic_final_state, oracle_final_state, oracle_mixed_state, Link, ProtocolParams};

fn max_diff(a: &DensityOperator, b: &DensityOperator) -> f64 {
    (a.matrix() - b.matrix()).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

#[test]
fn swap_oracle_matches_closed_form_on_grid() {
    let mut worst = (0.0f64, 0.0f64);
    for &alpha in &[0.3, 0.5, 0.8] {
        for &t in &[0.05, 0.1, 0.5] {
            for &eta_o in &[0.8, 1.0] {
                for &eta_h in &[0.55, 1.0] {
                    let params = ProtocolParams::new(alpha, Link::Symmetric { transmittance: t })
                        .with_eta_o(eta_o)
                        .with_eta_h(eta_h);
                    let o = oracle_final_state(&params, 24).unwrap();
                    let a = analytic_final_state(&params).unwrap();
                    worst.0 = worst.0.max(max_diff(&o.rho, &a.rho_shared));
                    worst.1 = worst.1.max((o.p0 - a.p0).abs());
                }
            }
        }
    }
    assert!(worst.0 < 1e-6 && worst.1 < 1e-6, "{worst:?}");
}

#[test]
fn ancilla_trace_order_is_irrelevant() {
    let params = ProtocolParams::new(0.6, Link::Symmetric { transmittance: 0.2 });
    let mixed = oracle_mixed_state(&params, 20).unwrap();
    let click = click_click_element(0.8, ("a2", 20), ("c", 20)).unwrap();
    let heralded = apply_povm_element(&mixed, &click).unwrap().state;
    let one = heralded.trace_out(&["a2", "c"]).unwrap().to_density();
    let two = heralded
        .trace_out(&["c"])
        .unwrap()
        .trace_out(&["a2"])
        .unwrap()
        .to_density();
    assert!(max_diff(&one, &two) < 1e-12);
}

#[test]
fn click_inefficiency_as_beam_splitters() {
    let params = ProtocolParams::new(0.5, Link::Symmetric { transmittance: 0.3 }).with_eta_o(0.7);
    let d = 20;
    let mixed = oracle_mixed_state(&params, d).unwrap();
    let direct = apply_povm_element(&mixed, &click_click_element(0.7, ("a2", d), ("c", d)).unwrap()).unwrap();
    let lossy = pure_loss(&pure_loss(&mixed, "a2", 0.7).unwrap(), "c", 0.7).unwrap();
    let modeled = apply_povm_element(&lossy, &click_click_element(1.0, ("a2", d), ("c", d)).unwrap()).unwrap();
    assert!((direct.probability - modeled.probability).abs() < 1e-12);
    let finish = |s: &hybridlink_core::fock::PurifiedState| {
        let post = s.trace_out(&["a2", "c"]).unwrap().normalized().unwrap();
        homodyne_project(&post, "b2", 0.9, 0.55)
            .unwrap()
            .0
            .normalized()
            .unwrap()
            .to_density()
    };
    assert!(max_diff(&finish(&direct.state), &finish(&modeled.state)) < 1e-10);
}

#[test]
fn doubling_truncation_leaves_results_unchanged() {
    let params = ProtocolParams::new(0.8, Link::Symmetric { transmittance: 0.5 });
    let small = oracle_final_state(&params, 24).unwrap();
    let large = oracle_final_state(&params, 48).unwrap();
    assert!((small.p0 - large.p0).abs() < 1e-8);
    assert!(max_diff(&small.rho, &large.rho) < 1e-8);
}
