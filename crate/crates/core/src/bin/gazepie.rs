use clap::Parser;

fn main() {
    let cli = gaze_pie::cli::Cli::parse();
    std::process::exit(gaze_pie::cli::run(cli));
}
