fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let budget = std::env::var(slicelab_cli::BUDGET_ENV).ok();
    std::process::exit(slicelab_cli::main_with_args(
        std::env::args_os(),
        budget.as_deref(),
    ));
}
