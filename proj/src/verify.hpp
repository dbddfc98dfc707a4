#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace dsm {

struct VerifyCheck {
    std::string name;
    bool pass = false;
    double margin = 0.0; // worst slack; >= 0 means the invariant held
    std::string info;
};

struct VerifyReport {
    std::string suite;
    std::vector<VerifyCheck> checks;
    bool all_pass = true;
    nlohmann::json to_json() const;
};

std::vector<std::string> verify_suites(); // all, operator, schedule, lemma1, path, theorem

// Runs the invariant suite(s). "all" concatenates every suite.
VerifyReport run_verify(const std::string& suite, std::uint64_t seed);

} // namespace dsm
