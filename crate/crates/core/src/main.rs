use clap::Parser;

fn main() {
    let cli = equideg::cli::Cli::parse();
    let code = equideg::cli::run(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
