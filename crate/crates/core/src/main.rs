fn main() {
    // die quietly when a pipe closes early (e.g. `twobridge limitset … | head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(twobridge::cli::run());
}
