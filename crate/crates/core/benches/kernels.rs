use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use higher_hilbert::config::JobConfig;
use higher_hilbert::kummer::PrincipalUnit;
use higher_hilbert::par;
use higher_hilbert::series::parse_series;
use higher_hilbert::suites::run_suite;
use higher_hilbert::symbol::{symbol_exponent, SymbolInput};

const MODES: [(&str, bool); 2] = [("parallel", false), ("sequential", true)];

fn series_mul(c: &mut Criterion) {
    let ctx = JobConfig::default().context().unwrap();
    let sr = &ctx.base_sr;
    let a = parse_series(sr, "1 + T*pi + 2*T^-3*pi^-4 + 7*T^5*pi^2").unwrap().invert().unwrap();
    let b = ctx.base.phi(&parse_series(sr, "T^-2*pi^-3 + T^4*pi").unwrap()).unwrap();
    let mut g = c.benchmark_group("series_mul");
    for (name, seq) in MODES {
        par::set_sequential(seq);
        g.bench_function(BenchmarkId::from_parameter(name), |bch| bch.iter(|| a.mul(&b).unwrap()));
    }
    par::set_sequential(false);
    g.finish();
}

fn symbol(c: &mut Criterion) {
    let ctx = JobConfig::default().context().unwrap();
    let u = |t| PrincipalUnit::new(parse_series(&ctx.sr, t).unwrap()).unwrap();
    let inp = SymbolInput::new(u("1 + T*pi + 3*T^-1"), u("1 + 2*T^-1*pi + pi^2"), u("1 + T^2*pi"));
    let mut g = c.benchmark_group("symbol_exponent");
    g.sample_size(20);
    for (name, seq) in MODES {
        par::set_sequential(seq);
        g.bench_function(BenchmarkId::from_parameter(name), |bch| bch.iter(|| symbol_exponent(&ctx.level, &inp).unwrap()));
    }
    par::set_sequential(false);
    g.finish();
}

fn kummer_suite(c: &mut Criterion) {
    let cfg = JobConfig { cases: Some(16), ..JobConfig::default() };
    let mut g = c.benchmark_group("kummer_suite_16");
    g.sample_size(10);
    for (name, seq) in MODES {
        par::set_sequential(seq);
        g.bench_function(BenchmarkId::from_parameter(name), |bch| bch.iter(|| run_suite(&cfg, "kummer", 1).unwrap()));
    }
    par::set_sequential(false);
    g.finish();
}

criterion_group!(benches, series_mul, symbol, kummer_suite);
criterion_main!(benches);
