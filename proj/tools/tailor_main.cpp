// Copyright 2026 The Tailor Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailor/cli.hpp"

int main(int argc, char** argv) { return tailor::cli::run(argc, argv); }
