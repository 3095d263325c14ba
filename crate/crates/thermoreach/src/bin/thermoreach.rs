fn main() {
    std::process::exit(thermoreach::cli::run_command(std::env::args()));
}
