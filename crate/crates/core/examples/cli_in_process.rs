//! Run the command-line interface without spawning a process.

fn main() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = nbp_measures::cli::run_cli(
        [
            "nbpm",
            "sample",
            "--process",
            "pdp_stick",
            "--alpha",
            "0.3",
            "--theta",
            "1",
            "--n",
            "5",
            "--output",
            "csv",
        ],
        &mut out,
        &mut err,
    );
    print!("{}", String::from_utf8_lossy(&out));
    eprint!("{}", String::from_utf8_lossy(&err));
    std::process::exit(code);
}
