fn main() {
    xchan::cli::init_logging();
    let code = xchan::cli::run(
        std::env::args_os(),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    );
    std::process::exit(code);
}
