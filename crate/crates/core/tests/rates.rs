use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use phaserate::channels::ChannelSpec;
use phaserate::distributions::{poisson, truncated_thermal, truncated_thermal_beta};
use phaserate::numerics::TruncationPolicy;
use phaserate::rates::{
    capacity, cheraghchi_f, coherent_upper_bound, gamma_thermal_coherent_rate, rate_with_loss, room_coherent_opt,
    room_rate, room_squeezed_opt, ternary_rate_opt, PulseShape, Scheme, TernaryEncoding,
};

fn pol() -> TruncationPolicy {
    TruncationPolicy::default()
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

#[test]
fn capacity_examples() {
    assert_abs_diff_eq!(capacity(1, 1.0).unwrap(), 1.3862943611, epsilon = 1e-10);
    assert_abs_diff_eq!(capacity(2, 2.0).unwrap(), 2.7725887222, epsilon = 1e-10);
    assert_eq!(capacity(3, 0.0).unwrap(), 0.0);
}

#[test]
fn coherent_upper_at_two_modes_by_direct_sum() {
    let p = poisson(1.0, &pol()).unwrap();
    let direct: f64 = p.probs().iter().enumerate().map(|(n, q)| q * ((n + 1) as f64).ln()).sum();
    assert_abs_diff_eq!(
        coherent_upper_bound(2, 1.0, &pol()).unwrap(),
        cheraghchi_f(1.0).unwrap() + direct,
        epsilon = 1e-12
    );
    assert_eq!(coherent_upper_bound(1, 0.4, &pol()).unwrap(), cheraghchi_f(0.4).unwrap());
}

#[test]
fn sandwich_on_log_grid() {
    for m in [1, 2, 4] {
        for e in log_grid(1e-3, 100.0, 25) {
            let room = room_coherent_opt(m, e, &pol()).unwrap().rate;
            assert!(room <= coherent_upper_bound(m, e, &pol()).unwrap(), "m={m} E={e}");
        }
    }
}

#[test]
fn optimized_room_grows_with_modes() {
    for e in [0.01, 0.3, 2.0] {
        let rates: Vec<f64> = [1, 2, 3, 4].iter().map(|&m| room_coherent_opt(m, e, &pol()).unwrap().rate).collect();
        assert!(rates.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{rates:?}");
        let sq: Vec<f64> = [1, 2, 4].iter().map(|&m| room_squeezed_opt(m, e, &pol()).unwrap().rate).collect();
        assert!(sq.windows(2).all(|w| w[1] >= w[0] - 1e-10), "{sq:?}");
    }
}

#[test]
fn every_scheme_respects_capacity() {
    let ch = ChannelSpec::lossless(2).unwrap();
    for id in Scheme::ALL_IDS {
        let scheme: Scheme = id.parse().unwrap();
        for e in [0.05, 0.3] {
            let r = rate_with_loss(&scheme, &ch, e, &pol()).unwrap();
            assert!(r.rate >= 0.0, "{id}");
            if !scheme.is_asymptotic() {
                assert!(r.rate <= capacity(2, e).unwrap() + 1e-9, "{id} at {e}: {}", r.rate);
            }
        }
    }
}

#[test]
fn truncated_entropy_matches_closed_form() {
    // g(s, t) = beta s + ln Z with Z = sum_{n<=t} e^{-beta n}
    for t in [1usize, 2, 5] {
        for s in [0.05, 0.3, 0.49, 0.9 * t as f64] {
            if s >= t as f64 {
                continue;
            }
            let beta = truncated_thermal_beta(s, t).unwrap();
            let z: f64 = (0..=t).map(|n| (-beta * n as f64).exp()).sum();
            let closed = beta * s + z.ln();
            assert_abs_diff_eq!(truncated_thermal(s, t).unwrap().entropy(), closed, epsilon = 1e-10);
        }
    }
}

#[test]
fn high_energy_slopes() {
    for m in [1usize, 2] {
        let d = gamma_thermal_coherent_rate(m, 1000.0, &pol()).unwrap() - gamma_thermal_coherent_rate(m, 100.0, &pol()).unwrap();
        let slope = d / 10f64.ln();
        assert!((slope - (m as f64 - 0.5)).abs() <= 0.05, "m={m}: {slope}");
    }
}

#[test]
fn ternary_fock_approaches_ln3() {
    let r = ternary_rate_opt(1, 10.0, TernaryEncoding::Fock, &pol()).unwrap();
    assert_abs_diff_eq!(r.rate, 3f64.ln(), epsilon = 1e-2);
}

#[test]
fn squeezed_ternary_at_two_photons() {
    let r = ternary_rate_opt(1, 2.0, TernaryEncoding::Squeezed, &pol()).unwrap();
    let largest = r.param("r1").unwrap().max(r.param("r2").unwrap());
    assert!((0.60..=0.76).contains(&largest), "{largest}");
    let binary = room_squeezed_opt(1, 2.0, &pol()).unwrap();
    assert!(r.rate >= binary.rate - 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn room_rate_is_capped(m in 1usize..5, e in 0.001f64..5.0, p in 0.01f64..1.0, r in 0.0f64..1.0) {
        let res = room_rate(m, e, p, r, PulseShape::SingleMode, &pol());
        match res {
            Ok(v) => {
                prop_assert!(v >= -1e-15);
                prop_assert!(v <= capacity(m, e).unwrap() + 1e-9);
            }
            Err(_) => prop_assert!(r.sinh().powi(2) > e / p),
        }
    }

    #[test]
    fn pure_loss_matches_rescaled_energy(e in 0.05f64..3.0, eta in 0.1f64..1.0) {
        // coherent pulses: loss only rescales the amplitude
        let lossy = {
            let ch = ChannelSpec::new(1, eta, 0.0).unwrap();
            rate_with_loss(&Scheme::RoomCoherent, &ch, e, &pol()).unwrap().rate
        };
        let ideal = room_coherent_opt(1, eta * e, &pol()).unwrap().rate;
        prop_assert!((lossy - ideal).abs() <= 1e-9);
    }
}
