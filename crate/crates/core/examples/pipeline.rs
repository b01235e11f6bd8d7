//! The batch front-end driven in-process: couplings table, a tiny mc2d
//! sweep and its collapse, written to a temporary directory.

fn main() {
    let dir = std::env::temp_dir().join("tcnot-lab-pipeline");
    let path = |name: &str| dir.join(name).display().to_string();
    let steps: [Vec<String>; 3] = [
        vec!["couplings".into(), "--set".into(), "p_tilde=[0.042, 0.052]".into(), "--out".into(), path("couplings.csv")],
        vec![
            "mc2d".into(),
            "--set".into(),
            "sizes=[4, 6]".into(),
            "--set".into(),
            "p_tilde=[0.08, 0.11, 0.14, 0.17]".into(),
            "--set".into(),
            "realizations=4".into(),
            "--set".into(),
            "rungs=3".into(),
            "--set".into(),
            "sweeps_per_rung=10".into(),
            "--set".into(),
            "measure_sweeps=40".into(),
            "--out".into(),
            path("mc2d.csv"),
        ],
        vec!["collapse".into(), path("mc2d.csv"), "--set".into(), "n_bootstrap=4".into(), "--out".into(), path("collapse.json")],
    ];
    for args in steps {
        let code = tcnot_lab::cli::run(std::iter::once("tcnot-lab".to_string()).chain(args.clone()));
        assert_eq!(code, 0, "{args:?}");
    }
    println!("{}", std::fs::read_to_string(dir.join("collapse.json")).unwrap());
}
