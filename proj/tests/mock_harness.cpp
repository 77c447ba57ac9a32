// Copyright 2026 The patternfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serves a transcript over the harness stdio protocol, so the process
// client can be exercised without a Python install.
//
//   mock_harness <transcript.json>

#include <exception>
#include <iostream>

#include "pfuzz/harness/harness.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: mock_harness <transcript.json>\n";
    return 2;
  }
  try {
    auto harness = pfuzz::harness::TranscriptHarness::load(argv[1]);
    pfuzz::harness::serve(*harness, std::cin, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "mock_harness: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
