fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let code = mcndgen_cli::run_stogen(&args, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
