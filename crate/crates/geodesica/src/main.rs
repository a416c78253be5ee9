// Copyright 2026 the Geodesica Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

fn main() {
    std::process::exit(geodesica::cli::run(std::env::args_os()));
}
