use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use frameguard::agents::{NativeAgent, VariantSpec};
use frameguard::duel::{run_duel_virtual, DuelParams};
use frameguard::protocol::{decode, encode_into, FrameDecoder};
use frameguard::score::{aggregate_scores, score_round, ScoreParams};
use frameguard::server::{run_match_virtual, MatchConfig};
use frameguard_bench::{mixed_rounds, per_frame_messages, wire_stream};

fn codec(c: &mut Criterion) {
    let mut group = c.benchmark_group("codec");
    let [frame, action] = per_frame_messages();
    let mut buf = Vec::with_capacity(64);
    group.bench_function("encode_frame_action", |b| {
        b.iter(|| {
            buf.clear();
            encode_into(black_box(&frame), &mut buf).unwrap();
            encode_into(black_box(&action), &mut buf).unwrap();
            buf.len()
        })
    });

    let pair = {
        let mut v = Vec::new();
        encode_into(&frame, &mut v).unwrap();
        encode_into(&action, &mut v).unwrap();
        v
    };
    group.bench_function("decode_frame_action", |b| {
        b.iter(|| {
            let (_, n) = decode(black_box(&pair)).unwrap().unwrap();
            decode(&pair[n..]).unwrap().unwrap().1
        })
    });

    // a whole round's traffic fed in 1.5 KiB reads, as from a socket
    let stream = wire_stream(3600);
    group.throughput(Throughput::Bytes(stream.len() as u64));
    group.bench_function("stream_decoder_round", |b| {
        b.iter(|| {
            let mut dec = FrameDecoder::new();
            let mut count = 0usize;
            for chunk in stream.chunks(1536) {
                dec.extend(chunk);
                while let Some(msg) = dec.next_message().unwrap() {
                    black_box(&msg);
                    count += 1;
                }
            }
            count
        })
    });
    group.finish();
}

fn scoring(c: &mut Criterion) {
    let params = ScoreParams::default();
    let rounds = mixed_rounds();
    c.bench_function("score_round", |b| {
        b.iter(|| score_round(black_box(&rounds[17]), &params).unwrap())
    });
    c.bench_function("aggregate_96_rounds", |b| {
        b.iter(|| aggregate_scores(black_box(&rounds), &params, 6).unwrap())
    });
}

fn simulation(c: &mut Criterion) {
    let params = DuelParams::default();
    let mut group = c.benchmark_group("duel_oracle");
    for total in [16_000u64, 16_700, 33_334] {
        group.bench_with_input(BenchmarkId::from_parameter(total), &total, |b, &t| {
            b.iter(|| run_duel_virtual(black_box(t), 16_667, &params).unwrap())
        });
    }
    group.finish();

    let config = MatchConfig::default();
    let mut group = c.benchmark_group("virtual_match_96_rounds");
    group.sample_size(20);
    for (label, processing, extra) in [
        ("fast-15.85", 15_850u64, 500u64),
        ("slow-15.85", 15_850, 850),
    ] {
        group.bench_function(label, |b| {
            b.iter(|| {
                let mut agent =
                    NativeAgent::fixedload(VariantSpec::new(label, processing, extra, 0));
                run_match_virtual(&config, &mut agent).unwrap().rounds.len()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, codec, scoring, simulation);
criterion_main!(benches);
