use std::path::Path;
use std::process::{Command, Output};

use dnasim_core::fasta;
use dnasim_core::metrics::RasterImage;
use dnasim_core::netpbm;

fn dnasim(dir: &Path, args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_dnasim"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn dnasim");
    assert!(
        out.status.success(),
        "dnasim {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn encode_decode_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let payload: Vec<u8> = (0..=255).chain(0..=99).collect();
    std::fs::write(dir.join("payload.bin"), &payload).unwrap();
    for codec in ["quaternary", "rotation"] {
        dnasim(dir, &["encode", "payload.bin", "--codec", codec, "--chunk", "100", "--out", "c.fa"]);
        let records = fasta::parse_str(&read(dir, "c.fa")).unwrap();
        assert_eq!(records[0].id, "chunk_0");
        assert!(records.iter().all(|r| r.seq.len() <= 100));
        let out = dnasim(dir, &["decode", "c.fa", "--codec", codec]);
        assert_eq!(out.stdout, payload, "{codec}");
    }
}

#[test]
fn random_payload_follows_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let a = dnasim(tmp.path(), &["encode", "--random-bytes", "50", "--seed", "4"]);
    let b = dnasim(tmp.path(), &["--seed", "4", "encode", "--random-bytes", "50"]);
    let c = dnasim(tmp.path(), &["encode", "--random-bytes", "50", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn corrupt_screen_consensus_chain() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    std::fs::write(dir.join("src.fa"), ">s\nACGTACGTACGTACGTACGTACGTACGTACGT\n").unwrap();
    dnasim(dir, &["corrupt", "src.fa", "--gamma", "0.1", "--reads", "6", "--seed", "2", "--out", "r.fa"]);
    let reads = fasta::parse_str(&read(dir, "r.fa")).unwrap();
    let ids: Vec<_> = reads.iter().map(|r| r.id.as_str()).collect();
    assert_eq!(ids, ["read_1", "read_2", "read_3", "read_4", "read_5", "read_6"]);

    dnasim(dir, &["screen", "r.fa", "--w", "3", "--K", "4", "--k", "32", "--report", "q.csv", "--out", "sel.fa"]);
    let report = read(dir, "q.csv");
    let mut lines = report.lines();
    assert_eq!(lines.next(), Some("read_index,q_numerator,q_denominator,selected,tie_broken"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows.iter().filter(|r| r[3] == "true").count(), 3);
    assert_eq!(fasta::parse_str(&read(dir, "sel.fa")).unwrap().len(), 3);

    let out = dnasim(dir, &["consensus", "sel.fa", "--k", "32"]);
    let cons = fasta::parse_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(cons[0].id, "consensus");
    assert!(cons[0].seq.len() <= 32);
}

#[test]
fn noiseless_reads_reproduce_source() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    std::fs::write(dir.join("src.fa"), ">s\nGATTACAGATTACA\n").unwrap();
    dnasim(dir, &["corrupt", "src.fa", "--gamma", "0", "--reads", "4", "--out", "r.fa"]);
    dnasim(dir, &["screen", "r.fa", "--w", "2", "--k", "14", "--out", "sel.fa"]);
    dnasim(dir, &["consensus", "sel.fa", "--out", "c.fa"]);
    assert_eq!(read(dir, "c.fa"), ">consensus\nGATTACAGATTACA\n");
    let out = dnasim(dir, &["metrics", "src.fa", "c.fa"]);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "edit_distance,ber,reference_length,candidate_length\n0,0,14,14\n"
    );
}

#[test]
fn analyze_report() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    std::fs::write(dir.join("x.fa"), ">a\nACGT\n>b\nAAAAACC\n").unwrap();
    let out = dnasim(dir, &["analyze", "x.fa", "--d", "4", "--stride", "4"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "record,length,gc_fraction,max_run,run_1,run_2,run_3,run_4,run_ge5,penalty,m");
    // digits 0,1,2,3: T = 3/2, H = 5/3, penalty = (5/3 - 5/4)^2
    let a: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&a[..9], ["a", "4", "0.5", "1", "1", "0", "0", "0", "0"]);
    assert!((a[9].parse::<f64>().unwrap() - 25.0 / 144.0).abs() < 1e-12);
    assert_eq!(a[10], "1");
    assert!(lines[2].starts_with("b,7,0.2857142857142857,5,0,0.5,0,0,0.5,"));
}

#[test]
fn image_metrics() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let a = RasterImage::new(8, 8, 1, (0..64).collect()).unwrap();
    let b = RasterImage::new(8, 8, 1, (1..65).collect()).unwrap();
    netpbm::write_file(&dir.join("a.pgm"), &a).unwrap();
    netpbm::write_file(&dir.join("b.pgm"), &b).unwrap();
    let same = String::from_utf8(dnasim(dir, &["metrics", "a.pgm", "a.pgm"]).stdout).unwrap();
    assert_eq!(same, "mse,psnr,ssim\n0,inf,1\n");
    let off = String::from_utf8(dnasim(dir, &["metrics", "a.pgm", "b.pgm"]).stdout).unwrap();
    let row: Vec<&str> = off.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "1");
    assert!((row[1].parse::<f64>().unwrap() - 48.1308).abs() < 1e-4);
}

#[test]
fn sweep_writes_trials_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    std::fs::write(dir.join("exp.cfg"), "gammas = 0.01, 0.02\nws = 2, 4\ntrials = 3\nrandom_bytes = 64\n").unwrap();
    dnasim(dir, &["--config", "exp.cfg", "--out", "run.csv", "sweep", "--modes", "mrs", "--threads", "2"]);
    let trials = read(dir, "run.csv");
    assert_eq!(trials.lines().count(), 1 + 2 * 2 * 3);
    assert!(!trials.contains("wall_time_ms"));
    assert_eq!(read(dir, "run.summary.csv").lines().count(), 1 + 4);

    // flags override the file; timing is opt-in
    dnasim(dir, &["--config", "exp.cfg", "--out", "t.csv", "sweep", "--trials", "1", "--timing"]);
    let timed = read(dir, "t.csv");
    assert!(timed.lines().next().unwrap().ends_with(",wall_time_ms"));
    assert_eq!(timed.lines().count(), 1 + 2 * 2 * 2);

    // same seed, same bytes
    dnasim(dir, &["--config", "exp.cfg", "--out", "again.csv", "sweep", "--modes", "mrs", "--threads", "1"]);
    assert_eq!(read(dir, "again.csv"), trials);
}

#[test]
fn compare_reports_gaps() {
    let tmp = tempfile::tempdir().unwrap();
    let out = dnasim(
        tmp.path(),
        &["compare", "--gammas", "0", "--ws", "4,8", "--trials", "2", "--random-bytes", "64"],
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "gamma,w,trials,mean_edit_distance_gap,sd_edit_distance_gap,mean_ber_gap,sd_ber_gap");
    assert_eq!(lines[1], "0,4,2,0,0,0,0");
    assert_eq!(lines[2], "0,8,2,0,0,0,0");
}

#[test]
fn bad_input_fails_cleanly() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    std::fs::write(dir.join("bad.fa"), ">x\nACGN\n").unwrap();
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_dnasim"))
            .current_dir(dir)
            .args(args)
            .output()
            .unwrap()
    };
    let out = run(&["analyze", "bad.fa"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    assert!(!run(&["sweep", "--ws", "9"]).status.success());
    assert!(!run(&["compare", "--modes", "mrs", "--trials", "1"]).status.success());
}
