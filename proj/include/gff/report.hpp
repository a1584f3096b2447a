#pragma once

#include <iosfwd>
#include <string>

#include "gff/estimators.hpp"
#include "gff/field.hpp"
#include "gff/solver.hpp"
#include "gff/walk.hpp"

namespace gff {

// Canonical single-line JSON for a report. Field order is fixed and
// wall_seconds is omitted: two runs with the same config and seed must
// produce byte-identical artifacts.
std::string report_json(const EstimateReport& rep, std::uint64_t config_hash);

// CSV exports (lexicographic site order).
void write_sites_csv(std::ostream& os, const SiteList& sites);
void write_field_csv(std::ostream& os, const ScalarField& field);
void write_measure_csv(std::ostream& os, const BoundaryMeasure& measure);

// Dense Green matrices as binary row-major doubles with a small header that
// records the site ordering: "GFFG", u32 version, u64 n, n * (i32 x, i32 y),
// n*n doubles.
void write_green_binary(std::ostream& os, const GreenMatrix& g);
GreenMatrix read_green_binary(std::istream& is);

// FNV-1a over a canonical string (config hashing).
std::uint64_t fnv1a(const std::string& text);

}  // namespace gff
