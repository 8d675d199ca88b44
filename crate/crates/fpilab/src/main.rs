fn main() {
    // Default SIGPIPE handling so `fpilab ... | head` terminates quietly
    // instead of panicking on a closed pipe.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(fpilab::cli::run());
}
