#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "zal/audit.hpp"
#include "zal/rszeta.hpp"

namespace zal {

// A published table of zero ordinates, used as a validation oracle.
struct ReferenceTable {
    std::vector<double> ordinates;   // ascending
    int declared_precision = 9;      // decimal places
    std::string provenance;
};

// One ordinate per line, '#' comment lines allowed. Raises domain_error with
// the offending line number on parse failures and integrity_error when the
// ordinates are not strictly ascending.
ReferenceTable load_table(std::istream& in, std::string provenance = "");
ReferenceTable load_table_file(const std::string& path);

void serialize_table(const ReferenceTable& table, std::ostream& out);

// Greedy nearest-neighbor matching on the two sorted lists within match_tol;
// ties break toward the smaller ordinate. The report carries matched/missing/
// spurious counts and the maximum matched discrepancy.
AuditReport validate_zeros(const ZeroList& zeros, const ReferenceTable& table,
                           double match_tol);

} // namespace zal
