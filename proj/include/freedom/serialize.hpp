#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "freedom/counting.hpp"

namespace freedom {

using Json = nlohmann::ordered_json;

/// "p/q", or "p" for integers.
std::string rational_str(const Rational& q);

/// Single terms as {coefficient, base, float}; formal sums as {terms, float}.
/// Floats are rendered from a 64-bit-precision rounding.
Json as_json(const LogValue& v);
std::string float_str(const LogValue& v);
std::string float_str(double v);

/// {rank, gram: row-major "p/q" strings}.
Json lattice_to_json(const EuclideanLattice& lattice);
/// Throws InputError on malformed input or an indefinite form.
EuclideanLattice lattice_from_json(const Json& j);
EuclideanLattice lattice_from_text(std::string_view text);

Json as_json(const IntMatrix& m);
Json as_json(const NewtonPolygon& polygon);
Json as_json(const FreedomValue& l);
Json as_json(const FreedomReport& report);
Json as_json(const FiberReport& report);
Json as_json(const AsymptoticFit& fit);

/// coords,H,h,mu_min,mu_max,freedom_float
std::string point_csv_header();
std::string point_csv_row(const std::string& coords, const FreedomReport& report);

/// variety,B,total,free,mean_freedom,bin_00..bin_19
std::string count_csv_header();
std::string count_csv_row(const std::string& variety, const CountRow& row);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// Canonical text of a variety descriptor, used in config hashes.
std::string describe(const VarietyDescriptor& variety);

/// Build identity baked in at configure time.
std::string build_describe();

/// Rows, fits and provenance; `provenance` is copied in as given.
Json as_json(const CountReport& report, const Json& provenance);

}  // namespace freedom
