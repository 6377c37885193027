#include <cstring>
#include <iostream>

#include "terafet/harness.hpp"

// Runs every acceptance criterion and prints one PASS/FAIL line each.
int main(int argc, char** argv) {
  std::string artifact_dir;
  int threads = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--out") == 0 && i + 1 < argc)
      artifact_dir = argv[++i];
    if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc)
      threads = std::atoi(argv[++i]);
  }
  const auto results = terafet::run_acceptance(std::cout, threads, artifact_dir);
  bool all = true;
  for (const auto& r : results) all &= r.pass;
  std::cout << (all ? "ALL CRITERIA PASSED" : "GATE FAILED") << std::endl;
  return all ? 0 : 1;
}
