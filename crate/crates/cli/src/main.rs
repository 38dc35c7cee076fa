use std::io::Write;

fn main() {
    let report = holder_cli::run(std::env::args_os());
    print!("{}", report.stdout());
    if !report.summary.is_empty() {
        eprintln!("{}", report.summary);
    }
    let _ = std::io::stdout().flush();
    std::process::exit(report.exit_code);
}
