use std::collections::HashMap;
use std::path::Path;
use std::process::Command;

fn bandcert(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_bandcert")).args(args).output().expect("binary runs")
}

fn stdout(o: &std::process::Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn rows(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn params_and_usage_errors() {
    let o = bandcert(&["params", "--n", "120", "--s", "6000", "--t", "150000"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("nodes_0S 144000") && s.contains("nodes_ST 1080000"), "{s}");
    assert!(s.contains("budget valid"));

    let o = bandcert(&["certify", "--n", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("N >= 20"));

    let o = bandcert(&["params", "--n", "20", "--t", "3000"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bandcert(&["params", "--n", "20", "--d0", "abc"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn rule_prints_balls() {
    let o = bandcert(&["rule", "--points", "3", "--prec", "96"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let lines: Vec<&str> = s.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines.len(), 3);
    // middle node of the 3-point rule is 0 with weight 8/9
    assert!(lines[1].starts_with("0 ± 0") && lines[1].contains("8.88888888888888888"), "{}", lines[1]);
}

#[test]
fn fit_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("pairs.dat");
    let text: String = [20.0f64, 40.0, 80.0, 120.0]
        .iter()
        .map(|n| format!("{n} {:e}\n", 0.153 * n.powf(-1.74)))
        .collect();
    std::fs::write(&p, format!("# N lambda\n{text}")).unwrap();
    let o = bandcert(&["fit", p.to_str().unwrap()]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("amplitude 1.530000e-1") && s.contains("exponent -1.740000"), "{s}");
    std::fs::write(&p, "20 1e-3\n20 2e-3\n").unwrap();
    assert!(!bandcert(&["fit", p.to_str().unwrap()]).status.success());
}

#[test]
fn exploratory_pipeline_and_figures() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cache = dir.path().join("cache.log");
    let common = [
        "--n",
        "4",
        "--mode",
        "explore",
        "--workers",
        "2",
        "--out",
        out.to_str().unwrap(),
        "--cache",
        cache.to_str().unwrap(),
    ];

    let mut args = vec!["integrals"];
    args.extend(common);
    let o = bandcert(&args);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("integrals 87") && s.contains("computed 87"), "{s}");
    let o = bandcert(&args);
    assert!(stdout(&o).contains("from_cache 87"));

    // exploratory certificates never pass
    let mut args = vec!["certify"];
    args.extend(common);
    let o = bandcert(&args);
    assert_eq!(o.status.code(), Some(1));
    assert!(out.join("certificate_N4.dat").exists());

    let mut args = vec!["figures", "--column", "-4,0,4", "--ns", "2,4"];
    args.extend(common);
    let o = bandcert(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let first: HashMap<String, Vec<u8>> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "dat"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    for f in ["f1.dat", "f2.dat", "f3_D0.dat", "f4.dat", "f5.dat", "f5_ellipse.dat", "f6.dat", "f7_D0.dat", "f8.dat", "f9.dat"] {
        assert!(first.contains_key(f), "missing {f}");
    }

    // f1: one row per block
    let f1 = rows(&out.join("f1.dat"));
    assert_eq!(f1.iter().map(|r| r[0] as i32).collect::<Vec<_>>(), vec![0, 2, 4, 6, 8, 10, 12]);
    // f2: both band limits
    assert_eq!(rows(&out.join("f2.dat")).iter().map(|r| r[0]).collect::<Vec<_>>(), vec![2.0, 4.0]);

    // f4 is invariant under permutations of the labels
    let f4 = rows(&out.join("f4.dat"));
    let map: HashMap<(i64, i64), f64> = f4.iter().map(|r| ((r[0] as i64, r[1] as i64), r[2])).collect();
    for r in &f4 {
        let (a, b) = (r[0] as i64, r[1] as i64);
        let c = -a - b;
        for (x, y) in [(a, c), (b, a), (b, c), (c, a), (c, b)] {
            assert_eq!(map[&(x, y)], r[2]);
        }
        assert!(r[2] >= -16.0);
    }

    // warm cache regenerates identical figure data
    let o = bandcert(&args);
    assert!(o.status.success());
    for (name, bytes) in &first {
        assert_eq!(&std::fs::read(out.join(name)).unwrap(), bytes, "{name} changed");
    }

    // unknown figure and a column outside the band
    let mut bad = vec!["figures", "--which", "f10"];
    bad.extend(common);
    assert_eq!(bandcert(&bad).status.code(), Some(2));
    let mut bad = vec!["figures", "--which", "f4", "--column", "2,4,6"];
    bad.extend(common);
    assert!(!bandcert(&bad).status.success());
}
