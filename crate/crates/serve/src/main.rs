use clap::{CommandFactory, Parser};

use shotzone::cli::{run, Cli};

/// Prints the parse error with the usage line of the subcommand involved and
/// exits with status 2.
fn usage_error(e: clap::Error) -> ! {
    if !e.use_stderr() {
        e.exit();
    }
    let message = e.render().to_string();
    eprint!("{message}");
    if !message.contains("Usage:") {
        let mut cmd = Cli::command();
        cmd.build();
        let sub = std::env::args().skip(1).find(|a| cmd.find_subcommand(a).is_some());
        let usage = match sub.and_then(|s| cmd.find_subcommand_mut(&s).map(|c| c.render_usage())) {
            Some(u) => u,
            None => Cli::command().render_usage(),
        };
        eprintln!("\n{usage}");
    }
    std::process::exit(2);
}

fn main() {
    tracing_subscriber::fmt().with_writer(std::io::stderr).with_target(false).init();
    let cli = Cli::try_parse().unwrap_or_else(|e| usage_error(e));
    if let Err(e) = run(cli) {
        let closed = e
            .downcast_ref::<std::io::Error>()
            .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe);
        if closed {
            return;
        }
        let cause = format!("{e:#}").replace('\n', " ");
        eprintln!("error: {cause}");
        std::process::exit(1);
    }
}
