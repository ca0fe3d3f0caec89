// Runs the acceptance criteria and prints one line per criterion.
//
//   photonstat_acceptance [--tolerance-scale S] [ID...]

#include "photonstat/acceptance/criteria.hpp"

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    photonstat::acceptance::Options opt;
    std::vector<std::string> ids;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--tolerance-scale" && i + 1 < argc) {
            opt.tolerance_scale = std::strtod(argv[++i], nullptr);
        } else {
            ids.push_back(arg);
        }
    }
    if (ids.empty()) {
        for (const auto& c : photonstat::acceptance::criteria()) ids.push_back(c.id);
    }
    std::vector<photonstat::acceptance::CriterionResult> results;
    for (const auto& id : ids) {
        results.push_back(photonstat::acceptance::run_criterion(id, opt));
        const auto& r = results.back();
        std::cout << r.line() << "  [" << r.seconds << " s]" << std::endl;
    }
    const bool ok = photonstat::acceptance::all_passed(results);
    std::cout << (ok ? "ALL PASS" : "FAILURES") << std::endl;
    return ok ? 0 : 1;
}
