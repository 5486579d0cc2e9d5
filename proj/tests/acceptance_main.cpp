// Acceptance suite runner: one pass/fail line per criterion, nonzero exit
// when any criterion fails.

#include "gmcf/verify.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

int main(int argc, char** argv) {
    gmcf::VerifyOptions opts;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--quick") == 0) opts.quick = true;
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc)
            opts.only.push_back(std::atoi(argv[++i]));
        if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc)
            opts.seed = std::strtoull(argv[++i], nullptr, 10);
    }

    const auto results = gmcf::run_acceptance(opts);
    bool all = true;
    for (const auto& r : results) {
        std::printf("[%s] %2d %-52s %7.2f s  %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                    r.seconds, r.detail.c_str());
        all = all && r.pass;
    }
    std::printf("%s: %zu criteria%s\n", all ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
                results.size(), opts.quick ? " (quick mode)" : "");
    return all ? 0 : 1;
}
