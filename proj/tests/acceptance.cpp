// acceptance test binary: runs the verification suite criterion by criterion.
#include <cstdio>
#include <cstring>
#include <string>

#include "sigdetect/acceptance.hpp"

int main(int argc, char** argv) {
  sigdetect::AcceptanceOptions opts;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      opts.criteria.push_back(std::atoi(argv[++i]));
    } else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) {
      opts.threads = std::atoi(argv[++i]);
    } else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
      opts.seed = std::strtoull(argv[++i], nullptr, 10);
    } else {
      std::printf("usage: acceptance [--criterion K]... [--threads N] [--seed S]\n");
      return 2;
    }
  }
  int failed = sigdetect::run_acceptance(opts);
  if (failed > 0) std::printf("%d criterion(s) failed\n", failed);
  return failed == 0 ? 0 : 1;
}
