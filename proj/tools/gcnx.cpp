//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "gcnx/pipeline.h"

int main(int argc, char **argv) { return gcnx::run_cli(argc, argv); }
