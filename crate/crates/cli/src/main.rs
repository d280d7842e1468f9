use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let mut stderr = io::stderr();
    let cap = std::env::var("RSAJAM_THREADS").ok();
    match rsajam_cli::thread_cap(cap.as_deref()) {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
            {
                log::warn!("could not size the thread pool: {e}");
            }
        }
        Ok(None) => {}
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = rsajam_cli::run_with(std::env::args_os(), &mut out, &mut stderr);
    let _ = out.flush();
    ExitCode::from(code as u8)
}
