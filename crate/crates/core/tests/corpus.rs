mod common;

use common::*;
use mpiflow_core::cfg::{emit_dot, BlockKind, EdgeKind, Section};
use mpiflow_core::cli::{run, AnalysisConfig, Format};
use mpiflow_core::synth::{generate_program, SynthConfig};

#[test]
fn json_reports_match_golden_files() {
    for name in CORPUS {
        let mut config = AnalysisConfig::new(corpus_path(name));
        config.format = Format::Json;
        let out = run(&config);
        let golden = std::fs::read_to_string(corpus_dir().join(format!("{name}.json"))).unwrap();
        assert_eq!(out.stdout, golden, "{name}");
    }
}

#[test]
fn fig1_blocks() {
    let src = load("fig1");
    let a = analyze_all(&src);
    let got: Vec<(BlockKind, Section, Vec<usize>)> = a
        .cfg
        .blocks
        .iter()
        .map(|b| (b.kind, b.section, b.stmts.iter().map(|s| s.line).collect()))
        .collect();
    use BlockKind::*;
    use Section::*;
    let want = vec![
        (Entry, Global, vec![]),
        (Ordinary, Global, vec![1, 2, 3, 4]),
        (RecvBlock, Process(0), vec![6]),
        (RecvBlock, Process(0), vec![7]),
        (Ordinary, Process(0), vec![8, 9]),
        (Ordinary, Process(1), vec![12, 13]),
        (Ordinary, Process(1), vec![14]),
        (Ordinary, Process(1), vec![16]),
        (SendBlock, Process(1), vec![18]),
        (SendBlock, Process(1), vec![19, 20]),
        (SendBlock, Process(2), vec![23, 24, 25]),
        (SendBlock, Process(2), vec![26, 27]),
        (FinalizeBlock, Global, vec![29, 30]),
        (Exit, Global, vec![]),
    ];
    assert_eq!(got, want);

    let counts = a.cfg.edge_counts();
    assert_eq!((counts.sequential, counts.parallel, counts.synchronization), (10, 6, 4));
    assert_eq!(a.cfg.edges_of_kind(EdgeKind::ParallelFanOut).count(), 3);
}

#[test]
fn block_partition_agrees_with_text_scan() {
    for name in CORPUS {
        let src = load(name);
        let a = analyze_all(&src);
        assert_eq!(cfg_block_partition(&a.cfg), text_block_partition(&src), "{name}");
    }
    let cfg = SynthConfig::default();
    for seed in 0..200 {
        let src = generate_program(seed, &cfg);
        let a = analyze_all(&src);
        assert_eq!(cfg_block_partition(&a.cfg), text_block_partition(&src), "seed {seed}");
    }
}

#[test]
fn fig1_sync_edges() {
    let a = analyze_all(&load("fig1"));
    let mut pairs: Vec<(usize, usize)> = a
        .cfg
        .edges_of_kind(EdgeKind::Synchronization)
        .map(|(_, e)| {
            let s = e.sync.as_ref().unwrap();
            (s.send_line, s.recv_line)
        })
        .collect();
    pairs.sort_unstable();
    assert_eq!(pairs, vec![(18, 6), (20, 7), (25, 6), (27, 7)]);
}

#[test]
fn dot_is_stable_and_complete() {
    let a = analyze_all(&load("fig1"));
    let dot = emit_dot(&a.cfg);
    assert_eq!(dot, emit_dot(&analyze_all(&load("fig1")).cfg));
    assert!(dot.starts_with("digraph mpicfg {"));
    assert_eq!(dot.matches(" -> ").count(), a.cfg.edges.len());
    assert_eq!(dot.matches("style=dotted").count(), 4);
}

#[test]
fn generated_programs_satisfy_structural_laws() {
    let cfg = SynthConfig::default();
    for seed in 0..200 {
        let a = analyze_all(&generate_program(seed, &cfg));
        let v = structural_violations(&a.program, &a.cfg);
        assert!(v.is_empty(), "seed {seed}: {v:?}");
    }
}
