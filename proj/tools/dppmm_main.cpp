#include "dppmm/cli.hpp"

int
main(int argc, char** argv)
{
  return dppmm::run_cli(argc, argv);
}
