//! Configuration text and the command-line front end, driven in-process.

use pipeflow::{cli_dispatch, parse_config};

fn main() {
    let text = "\
gas.gamma = 1.4
friction.value = 0.3
boundary.eps = 0.005
grid.nt = 48
grid.nx = 49
";
    match parse_config(text) {
        Ok(cfg) => println!("parsed: gamma {}, beta {:?}, grid {:?}, amplitude {}", cfg.gas.gamma, cfg.friction.kind, cfg.grid, cfg.amplitude),
        Err(e) => println!("{e}"),
    }
    if let Err(e) = parse_config("gas.gamma = 0.9\ngrid.cfl = 2\nstability.K1 = -1\n") {
        println!("{e}");
    }

    let dir = std::env::temp_dir().join("pipeflow-example");
    let cfg = dir.join("run.cfg");
    std::fs::create_dir_all(&dir).expect("temp dir");
    std::fs::write(&cfg, text).expect("write config");
    let (cfg, out) = (cfg.to_str().unwrap(), dir.to_str().unwrap());
    for cmd in ["validate", "periodic", "ibvp"] {
        let code = cli_dispatch(["pipeflow", cmd, "--config", cfg, "--out", out, "--quiet"]);
        println!("pipeflow {cmd}: exit {code}");
    }
    for entry in std::fs::read_dir(&dir).expect("outputs") {
        let path = entry.expect("entry").path();
        println!("  {}", path.display());
    }
}
