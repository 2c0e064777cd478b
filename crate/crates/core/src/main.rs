fn main() {
    std::process::exit(twr_swipt::harness::cli_main());
}
