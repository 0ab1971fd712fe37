use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use gmkit::exposure::{merge_baseline, synth_stack};
use gmkit::formats::{read_rgbe, write_rgbe};
use gmkit::metrics::{psnr, ssim, Domain, MetricConfig};
use gmkit::{decode, encode, EncodeOptions, GainVariant, LinearImage};

fn scene(n: usize) -> LinearImage {
    LinearImage::from_fn(n, n, |x, y| {
        let t = (x + y) as f64 / (2 * n) as f64;
        let v = 0.02 + 4.0 * t * t;
        [v, 0.8 * v, 0.3 + 0.5 * (1.0 - t)]
    })
    .unwrap()
}

fn codec(c: &mut Criterion) {
    let mut group = c.benchmark_group("codec");
    for n in [64, 256] {
        let hdr = scene(n);
        let base = hdr.map_pixels(|v| (v / 8.0).min(1.0));
        group.throughput(Throughput::Elements((n * n) as u64));
        for variant in [GainVariant::Exp2, GainVariant::InvMuLaw] {
            let opts = EncodeOptions {
                variant,
                ..EncodeOptions::default()
            };
            let gm = encode(&hdr, &base, &opts).unwrap();
            group.bench_with_input(BenchmarkId::new(format!("encode_{}", variant.name()), n), &n, |b, _| {
                b.iter(|| encode(black_box(&hdr), black_box(&base), &opts).unwrap())
            });
            group.bench_with_input(BenchmarkId::new(format!("decode_{}", variant.name()), n), &n, |b, _| {
                b.iter(|| decode(black_box(&base), black_box(&gm)).unwrap())
            });
        }
    }
    group.finish();
}

fn metrics(c: &mut Criterion) {
    let mut group = c.benchmark_group("metrics");
    let cfg = MetricConfig::default();
    let a = scene(128);
    let b = a.map_pixels(|v| v * 1.01 + 0.001);
    for domain in [Domain::Linear, Domain::MuLaw, Domain::Pu21] {
        group.bench_function(format!("psnr_{domain}"), |bench| {
            bench.iter(|| psnr(black_box(&a), black_box(&b), domain, &cfg).unwrap())
        });
        group.bench_function(format!("ssim_{domain}"), |bench| {
            bench.iter(|| ssim(black_box(&a), black_box(&b), domain, &cfg).unwrap())
        });
    }
    group.finish();
}

fn exposure(c: &mut Criterion) {
    let hdr = scene(128);
    let stack = synth_stack(&hdr, &[-2.0, 0.0, 2.0], 2.2).unwrap();
    c.bench_function("synth_stack_128", |b| {
        b.iter(|| synth_stack(black_box(&hdr), &[-2.0, 0.0, 2.0], 2.2).unwrap())
    });
    c.bench_function("merge_baseline_128", |b| {
        b.iter(|| merge_baseline(black_box(&stack)).unwrap())
    });
}

fn formats(c: &mut Criterion) {
    let hdr = scene(256);
    let bytes = write_rgbe(&hdr);
    let mut group = c.benchmark_group("rgbe");
    group.throughput(Throughput::Bytes(bytes.len() as u64));
    group.bench_function("write_256", |b| b.iter(|| write_rgbe(black_box(&hdr))));
    group.bench_function("read_256", |b| b.iter(|| read_rgbe(black_box(&bytes)).unwrap()));
    group.finish();
}

criterion_group!(benches, codec, metrics, exposure, formats);
criterion_main!(benches);
