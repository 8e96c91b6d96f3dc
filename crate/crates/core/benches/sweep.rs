use criterion::{criterion_group, criterion_main, Criterion};

use phaserate::channels::ChannelSpec;
use phaserate::numerics::TruncationPolicy;
use phaserate::par::{set_exec, Exec};
use phaserate::rates::Scheme;
use phaserate::sweep::{energy_grid, sweep, SweepRequest};

fn request() -> SweepRequest {
    SweepRequest {
        schemes: vec![Scheme::RoomCoherent, Scheme::RoomSqueezed, Scheme::GammaThermal],
        channel: ChannelSpec::lossless(2).unwrap(),
        energies: energy_grid(0.01, 5.0, 8, true).unwrap(),
        policy: TruncationPolicy::default(),
    }
}

fn bench_sweep(c: &mut Criterion) {
    let req = request();
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for (name, mode) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
        group.bench_function(name, |b| {
            set_exec(mode);
            b.iter(|| sweep(&req).unwrap());
        });
    }
    set_exec(Exec::Parallel);
    group.finish();
}

criterion_group!(benches, bench_sweep);
criterion_main!(benches);
