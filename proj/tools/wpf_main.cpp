// Command-line front end: wpf <init|run|check> <config-file> [--tamper]
#include <cstring>
#include <iostream>
#include <string>

#include "wpflow/run_io.hpp"

namespace {

void usage(std::ostream& os) {
    os << "usage: wpf <command> <config-file> [options]\n"
          "\n"
          "commands:\n"
          "  init    build a feasible initial state and write its snapshot\n"
          "  run     evolve the constrained flow and emit diagnostics\n"
          "  check   run the invariant suite at the configured size\n"
          "\n"
          "options:\n"
          "  --tamper   (check only) corrupt the trajectory to exercise the\n"
          "             negative control; the suite must then fail\n"
          "\n"
          "exit codes: 0 ok, 1 config error, 2 infeasible constraints,\n"
          "            3 numerical failure, 4 margin collapse, 5 check failure\n";
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        usage(std::cerr);
        return wpflow::kExitConfig;
    }
    std::string command = argv[1];
    std::string config = argv[2];
    bool tamper = false;
    for (int i = 3; i < argc; ++i) {
        if (std::strcmp(argv[i], "--tamper") == 0 && command == "check") {
            tamper = true;
        } else {
            std::cerr << "unknown option: " << argv[i] << "\n";
            usage(std::cerr);
            return wpflow::kExitConfig;
        }
    }
    if (command == "init") return wpflow::cmd_init(config, std::cout, std::cerr);
    if (command == "run") return wpflow::cmd_run(config, std::cout, std::cerr);
    if (command == "check") return wpflow::cmd_check(config, tamper, std::cout, std::cerr);
    std::cerr << "unknown command: " << command << "\n";
    usage(std::cerr);
    return wpflow::kExitConfig;
}
