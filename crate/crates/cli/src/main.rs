fn main() {
    std::process::exit(airdrop_forge_cli::run(std::env::args_os()));
}
