//! Acceptance criterion 10: re-running any CLI command with an identical
//! configuration produces byte-identical output. Criteria 1-9 live in the
//! `robreg` crate's acceptance target.

use std::fs;
use std::process::Command;
use std::time::Instant;

#[test]
fn acceptance_10_cli_determinism() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    fs::write(&data, "b,f1,f2\n1.0,1.0,0.2\n-0.5,0.3,0.9\n0.25,-0.2,0.5\n").unwrap();
    let xfile = dir.path().join("x.csv");
    fs::write(&xfile, "x\n0.7\n-0.3\n").unwrap();
    let poly = dir.path().join("poly.json");
    fs::write(&poly, "{\"t\": [[1.0, 0.5]], \"s\": [0.4]}").unwrap();
    let data = data.to_string_lossy().into_owned();
    let xfile = xfile.to_string_lossy().into_owned();
    let poly = poly.to_string_lossy().into_owned();

    let cases: Vec<Vec<&str>> = vec![
        vec![
            "fit",
            &data,
            "--loss",
            "l2",
            "--uncoupled-c",
            "0.1,0.3",
            "--seed",
            "3",
        ],
        vec!["fit", &data, "--loss", "l1", "--norm-coupled", "l2,0.25"],
        vec!["fit", &data, "--polytope", &poly],
        vec!["path", &data, "--c-grid", "0.01,0.1,1"],
        vec![
            "worstcase",
            &data,
            "--x",
            &xfile,
            "--uncoupled-c",
            "0.2",
            "--samples",
            "2000",
            "--seed",
            "5",
        ],
        vec![
            "bound",
            "--mean",
            "0.1,0.2",
            "--sigma",
            "1,0.1;0.1,0.8",
            "--c",
            "1.7",
        ],
        vec!["bound", "--mean", "0", "--sigma", "1", "--c-grid", "1,2,4"],
        vec![
            "radius", "--mean", "0,0", "--sigma", "1,0;0,1", "--eta", "0.15",
        ],
        vec![
            "kde",
            &data,
            "--bandwidth-schedule",
            "default",
            "--grid-points",
            "4",
        ],
        vec![
            "consistency",
            "--n-list",
            "40,80",
            "--c-list",
            "0.5,0.4",
            "--seed",
            "7",
        ],
        vec!["sparsity", &data, "--support", "0,1", "--c", "0.2"],
        vec!["stability", &data, "--z-star", "1.0,-0.5", "--c", "0.1"],
    ];

    for (i, case) in cases.iter().enumerate() {
        let out_path = dir.path().join(format!("c{i}.out"));
        let path_str = out_path.to_string_lossy().into_owned();
        let mut args = case.clone();
        args.push("--out");
        args.push(&path_str);
        let run = |args: &[&str]| {
            Command::new(env!("CARGO_BIN_EXE_robreg"))
                .args(args)
                .output()
                .expect("binary runs")
        };
        let first = run(&args);
        assert!(
            first.status.code() == Some(0),
            "case {i} ({case:?}) failed: {}",
            String::from_utf8_lossy(&first.stderr)
        );
        let bytes_first = fs::read(&out_path).unwrap();
        fs::remove_file(&out_path).unwrap();
        let second = run(&args);
        assert!(second.status.code() == Some(0));
        let bytes_second = fs::read(&out_path).unwrap();
        assert_eq!(
            bytes_first, bytes_second,
            "case {i} ({case:?}) is not deterministic"
        );
        assert!(!bytes_first.is_empty());
    }
    println!(
        "ACCEPTANCE 10 (CLI determinism over {} commands): PASS in {:?}",
        cases.len(),
        start.elapsed()
    );
}
