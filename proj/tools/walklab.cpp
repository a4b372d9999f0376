#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "walklab/harness.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::optional<std::string> env_workers;
  if (const char* w = std::getenv("WALKLAB_WORKERS")) env_workers = w;
  return walklab::run_cli(args, env_workers);
}
