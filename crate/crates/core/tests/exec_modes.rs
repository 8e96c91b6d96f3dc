use phaserate::channels::ChannelSpec;
use phaserate::numerics::TruncationPolicy;
use phaserate::par::{exec, set_exec, Exec};
use phaserate::rates::Scheme;
use phaserate::sweep::{energy_grid, sweep, SweepRequest};

#[test]
fn sequential_and_parallel_agree_bitwise() {
    let req = SweepRequest {
        schemes: vec![Scheme::RoomSqueezed, Scheme::Ternary(phaserate::rates::TernaryEncoding::Coherent)],
        channel: ChannelSpec::new(2, 0.9, 0.0).unwrap(),
        energies: energy_grid(0.05, 2.0, 4, true).unwrap(),
        policy: TruncationPolicy::default(),
    };
    set_exec(Exec::Sequential);
    assert_eq!(exec(), Exec::Sequential);
    let a = sweep(&req).unwrap();
    set_exec(Exec::Parallel);
    let b = sweep(&req).unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.rate_nats.to_bits(), y.rate_nats.to_bits());
        assert_eq!(x.params, y.params);
    }
}
