//! Drives the command-line front end in-process: an ensemble run, then a
//! replay of its manifest with a different worker count.

fn main() {
    let dir = std::env::temp_dir().join("bohmsim-manifest-example");
    let config = dir.join("qubit.json");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(&config, r#"{"model": {"family": "qubit"}}"#).unwrap();
    let out = dir.join("run");
    let code = bohmsim::cli::main_with([
        "bohmsim",
        "ensemble",
        "--config",
        config.to_str().unwrap(),
        "--n",
        "16",
        "--t-end",
        "50",
        "--workers",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    println!("ensemble exit {code}");
    let manifest = out.join(bohmsim::cli::MANIFEST_FILE);
    let code = bohmsim::cli::main_with([
        "bohmsim",
        "--replay",
        manifest.to_str().unwrap(),
        "--workers",
        "2",
        "--out",
        dir.join("replay").to_str().unwrap(),
    ]);
    println!("replay exit {code}");
    println!(
        "{}",
        std::fs::read_to_string(&manifest)
            .unwrap()
            .lines()
            .take(12)
            .collect::<Vec<_>>()
            .join("\n")
    );
}
