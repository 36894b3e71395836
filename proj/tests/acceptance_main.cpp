// Acceptance suite: runs every acceptance criterion at its pinned tolerance and prints
// one pass/fail line per criterion (same registry as `selab verify --suite full`).

#include <iostream>

#include "selab/verify.hpp"

int main(int argc, char** argv) {
  selab::verify::Context ctx;
  if (argc > 1) ctx.seed = std::strtoull(argv[1], nullptr, 10);
  bool ok = selab::verify::run_suite("full", ctx, std::cout);
  std::cout << (ok ? "acceptance: all criteria passed\n" : "acceptance: FAILURES above\n");
  return ok ? 0 : 1;
}
