#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include <json.hpp>

#include "sdlab/excursion.hpp"
#include "sdlab/fukushima.hpp"
#include "sdlab/radial.hpp"
#include "sdlab/skewprod.hpp"
#include "sdlab/sphere.hpp"

namespace sdlab::io {

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

/// `t,r[,regulator]`
void write_csv(std::ostream& os, const radial::RadialPath& path);
/// `a,ux,uy,uz`
void write_csv(std::ostream& os, const sphere::SpherePath& path);
/// `t,x,y,z`
void write_csv(std::ostream& os, const skewprod::PathR3& path);

/// The same tables as {"columns": [...], "rows": [[...], ...]}.
nlohmann::json to_table_json(const radial::RadialPath& path);
nlohmann::json to_table_json(const sphere::SpherePath& path);
nlohmann::json to_table_json(const skewprod::PathR3& path);

/// One object per record: zeta, U, A_span_minus, A_span_plus and the number
/// of cells visited on each branch.
nlohmann::json excursion_inventory(std::span<const excursion::ExcursionRecord> records, std::size_t n_cells);

nlohmann::json to_json(const stats::EstimateWithCI& e);
nlohmann::json to_json(const fukushima::VariationReport& rep);

/// Writes `text` to `path`, creating parent directories. Throws
/// std::runtime_error on I/O failure.
void write_file(const std::string& path, const std::string& text);

}  // namespace sdlab::io
