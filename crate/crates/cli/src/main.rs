use clap::Parser;

fn main() {
    let args = statconv_cli::Args::parse();
    std::process::exit(statconv_cli::execute(&args));
}
