fn main() {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = rbb::cli::run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    std::process::exit(code);
}
