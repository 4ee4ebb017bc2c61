#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

namespace zal {

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

// Result of one empirical audit: a verdict plus the numbers that justify it.
// Serialized as {name, params, verdict, statistics, seed}.
struct AuditReport {
    std::string name;
    std::map<std::string, double> params;
    Verdict verdict = Verdict::inconclusive;
    std::map<std::string, double> statistics;
    uint64_t seed = 0;
    std::string note;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["name"] = name;
        j["params"] = params;
        j["verdict"] = to_string(verdict);
        j["statistics"] = statistics;
        j["seed"] = seed;
        if (!note.empty()) j["note"] = note;
        return j;
    }
};

} // namespace zal
