mod common;

use common::{c, random_potential, rk4_jost, rk4_transfer, rng};
use qgscatter::edge::{asymptotic_form_eval, standard_solutions_at};
use qgscatter::graph::{PiecewisePotential, Segment};
use qgscatter::{jost_boundary_data, transfer_matrix, BoundaryData, Jost, Momentum};
use rand::Rng;

fn mom(k: f64) -> Momentum {
    Momentum::new(k).unwrap()
}

#[test]
fn step_then_free_matches_integration() {
    let p = PiecewisePotential::new(vec![Segment { width: 1.0, q: 2.0 }]);
    let s = standard_solutions_at(&p, mom(1.0), 2.0);
    let oracle = rk4_transfer(&p, 1.0, 0.0, 2.0);
    assert!((s.theta - oracle[(0, 0)]).abs() < 1e-10);
    assert!((s.theta_prime - oracle[(1, 0)]).abs() < 1e-10);
    assert!((s.phi - oracle[(0, 1)]).abs() < 1e-10);
    assert!((s.phi_prime - oracle[(1, 1)]).abs() < 1e-10);
    assert!((s.wronskian() - 1.0).abs() < 1e-13);
}

#[test]
fn jost_data_matches_integration() {
    let p = PiecewisePotential::new(vec![Segment { width: 1.0, q: -1.0 }]);
    for (which, outgoing) in [(Jost::Outgoing, true), (Jost::Incoming, false)] {
        let f = jost_boundary_data(&p, mom(2.0), which);
        let oracle = rk4_jost(&p, 2.0, outgoing);
        assert!((f.value - oracle[0]).norm() < 1e-10);
        assert!((f.derivative - oracle[1]).norm() < 1e-10);
    }
}

#[test]
fn random_transfer_matrices_match_integration() {
    let mut r = rng(11);
    for _ in 0..20 {
        let p = random_potential(&mut r);
        let k = r.random_range(0.2..4.0);
        let end = p.support_end() + r.random_range(0.0..0.5);
        let x0 = r.random_range(0.0..end);
        let t = transfer_matrix(&p, mom(k), x0, end);
        let oracle = rk4_transfer(&p, k, x0, end);
        assert!((t - oracle).abs().max() < 1e-8);
    }
}

#[test]
fn transfer_matrix_is_continuous_in_k() {
    let p = PiecewisePotential::new(vec![
        Segment { width: 0.4, q: 3.0 },
        Segment { width: 0.3, q: -1.0 },
    ]);
    // crosses k² = q on the first segment
    let k0 = 3.0_f64.sqrt();
    for h in [1e-3, 1e-5, 1e-7] {
        let lo = transfer_matrix(&p, mom(k0 - h), 0.0, 1.2);
        let hi = transfer_matrix(&p, mom(k0 + h), 0.0, 1.2);
        assert!((hi - lo).abs().max() < 20.0 * h);
    }
}

#[test]
fn jost_relations_hold_with_potentials() {
    let mut r = rng(5);
    for _ in 0..20 {
        let p = random_potential(&mut r);
        let k = mom(r.random_range(0.3..5.0));
        let fp = [jost_boundary_data(&p, k, Jost::Outgoing)];
        let fm = [jost_boundary_data(&p, k, Jost::Incoming)];
        let pp = asymptotic_form_eval(k, &fp, &fp, true).unwrap();
        let mm = asymptotic_form_eval(k, &fm, &fm, true).unwrap();
        let pm = asymptotic_form_eval(k, &fp, &fm, true).unwrap();
        assert!((pp - c(0.0, 2.0)).norm() < 1e-10);
        assert!((mm - c(0.0, -2.0)).norm() < 1e-10);
        assert!(pm.norm() < 1e-10);
        let w = fp[0].value * fm[0].derivative - fp[0].derivative * fm[0].value;
        assert!((w - c(0.0, -2.0 * k.k())).norm() < 1e-10);
    }
}

#[test]
fn form_is_independent_of_evaluation_point() {
    let p = PiecewisePotential::new(vec![Segment { width: 0.7, q: 1.5 }, Segment { width: 0.2, q: -2.0 }]);
    let k = mom(1.3);
    let at = |x: f64, d: BoundaryData| {
        let t = transfer_matrix(&p, k, 0.0, x);
        BoundaryData::new(d.value * t[(0, 0)] + d.derivative * t[(0, 1)], d.value * t[(1, 0)] + d.derivative * t[(1, 1)])
    };
    let phi = BoundaryData::new(c(0.3, -1.0), c(2.0, 0.5));
    let psi = BoundaryData::new(c(-1.2, 0.1), c(0.4, 0.9));
    let v0 = asymptotic_form_eval(k, &[phi], &[psi], false).unwrap();
    for x in [0.35, 0.7, 0.9, 1.6] {
        let vx = asymptotic_form_eval(k, &[at(x, phi)], &[at(x, psi)], false).unwrap();
        assert!((vx - v0).norm() < 1e-12);
    }
}
