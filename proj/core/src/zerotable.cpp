#include "zal/zerotable.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "zal/errors.hpp"

namespace zal {

ReferenceTable load_table(std::istream& in, std::string provenance) {
    ReferenceTable table;
    table.provenance = std::move(provenance);
    table.declared_precision = 0;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        if (line[start] == '#') continue;
        size_t end = line.find_last_not_of(" \t\r");
        std::string tok = line.substr(start, end - start + 1);
        double v = 0.0;
        auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
            throw domain_error("zero table parse error at line " + std::to_string(lineno) +
                               ": '" + tok + "'");
        if (!table.ordinates.empty() && v <= table.ordinates.back())
            throw integrity_error("zero table not ascending at line " +
                                      std::to_string(lineno),
                                  table.ordinates.back(), v);
        auto dot = tok.find('.');
        if (dot != std::string::npos) {
            int places = static_cast<int>(tok.size() - dot - 1);
            table.declared_precision = std::max(table.declared_precision, places);
        }
        table.ordinates.push_back(v);
    }
    if (table.declared_precision == 0) table.declared_precision = 9;
    return table;
}

ReferenceTable load_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw domain_error("cannot open zero table: " + path);
    return load_table(in, path);
}

void serialize_table(const ReferenceTable& table, std::ostream& out) {
    if (!table.provenance.empty()) out << "# " << table.provenance << "\n";
    char buf[64];
    for (double v : table.ordinates) {
        std::snprintf(buf, sizeof(buf), "%.*f", table.declared_precision, v);
        out << buf << "\n";
    }
}

AuditReport validate_zeros(const ZeroList& zeros, const ReferenceTable& table,
                           double match_tol) {
    AuditReport report;
    report.name = "zero-table-validation";
    report.params["match_tol"] = match_tol;
    report.params["computed_count"] = static_cast<double>(zeros.ordinates.size());
    report.params["reference_count"] = static_cast<double>(table.ordinates.size());

    size_t i = 0, j = 0;
    int64_t matched = 0, missing = 0, spurious = 0;
    double max_disc = 0.0;
    const auto& a = zeros.ordinates;
    const auto& b = table.ordinates;
    while (i < a.size() && j < b.size()) {
        double d = a[i] - b[j];
        if (std::abs(d) <= match_tol) {
            ++matched;
            max_disc = std::max(max_disc, std::abs(d));
            ++i;
            ++j;
        } else if (d < 0.0) {
            ++spurious;   // computed ordinate with no reference partner
            ++i;
        } else {
            ++missing;    // reference ordinate we did not produce
            ++j;
        }
    }
    spurious += static_cast<int64_t>(a.size() - i);
    missing += static_cast<int64_t>(b.size() - j);

    report.statistics["matched"] = static_cast<double>(matched);
    report.statistics["missing"] = static_cast<double>(missing);
    report.statistics["spurious"] = static_cast<double>(spurious);
    report.statistics["max_discrepancy"] = max_disc;
    report.verdict = (missing == 0 && spurious == 0) ? Verdict::pass : Verdict::fail;
    return report;
}

} // namespace zal
