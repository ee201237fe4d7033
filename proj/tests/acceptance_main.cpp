// Acceptance gate: runs every criterion at its pinned tolerance and prints
// one pass/fail line per criterion (plus the module-invariant sections the
// verify subcommand also covers). Criterion 10 spawns the actual CLI when
// YAMABE_CLI_PATH is set. Exits nonzero when anything fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "verify.hpp"

int main() {
    yamabe::verify::Options opts;
    opts.fast = false;
    if (const char* w = std::getenv("YAMABE_WORKERS"))
        if (int n = std::atoi(w); n > 0) opts.workers = n;

    yamabe::verify::SuiteResult suite = yamabe::verify::run_suite(opts);
    std::fputs(yamabe::verify::format_report(suite).c_str(), stdout);

    bool ok = suite.all_passed;
    if (const char* cli = std::getenv("YAMABE_CLI_PATH")) {
        auto t0 = std::chrono::steady_clock::now();
        std::string cmd = std::string(cli) + " verify > /dev/null 2>&1";
        int rc = std::system(cmd.c_str());
        double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        int exit_code = rc < 0 ? -1 : WEXITSTATUS(rc);
        bool c10 = exit_code == 0 && secs <= 900.0;
        std::printf("[%s] criterion 10: cli verify end-to-end                 exit %d in %.1f s "
                    "(budget 900 s)\n",
                    c10 ? "PASS" : "FAIL", exit_code, secs);
        ok = ok && c10;
    } else {
        std::printf("[----] criterion 10: cli verify end-to-end              delegated to the "
                    "ctest entry (YAMABE_CLI_PATH not set)\n");
    }
    return ok ? 0 : 1;
}
