#pragma once

#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gkbound/errors.hpp"
#include "gkbound/series.hpp"

namespace gkb {

// Serialization lives in the floating backend only; rational series are an
// internal testing device and never cross a process boundary.

inline nlohmann::json series_to_json(const TruncatedSeries<double>& s) {
  nlohmann::json j;
  j["order"] = s.order();
  j["parity"] = parity_name(s.parity());
  j["coeffs"] = s.coeffs();
  return j;
}

inline TruncatedSeries<double> series_from_json(const nlohmann::json& j) {
  if (!j.contains("coeffs") || !j["coeffs"].is_array())
    throw ArityError("series JSON needs a coeffs array");
  std::vector<double> coeffs = j["coeffs"].get<std::vector<double>>();
  if (j.contains("order")) {
    const long long n = j["order"].get<long long>();
    if (n + 1 != static_cast<long long>(coeffs.size()))
      throw ArityError("series JSON order does not match coeffs length");
  }
  Parity p = Parity::none;
  if (j.contains("parity")) p = parity_from_name(j["parity"].get<std::string>());
  return TruncatedSeries<double>(std::move(coeffs), p);
}

inline void write_series_csv(std::ostream& os, const TruncatedSeries<double>& s) {
  os << "degree,coefficient\n";
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (int n = 0; n <= s.order(); ++n) os << n << ',' << s.coeff(n) << '\n';
}

inline TruncatedSeries<double> read_series_csv(std::istream& is) {
  std::vector<double> coeffs;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string deg, val;
    if (!std::getline(row, deg, ',') || !std::getline(row, val))
      throw ArityError("series CSV row needs two columns");
    if (deg == "degree") continue;  // header
    const std::size_t n = static_cast<std::size_t>(std::stol(deg));
    if (coeffs.size() < n + 1) coeffs.resize(n + 1, 0.0);
    coeffs[n] = std::stod(val);
  }
  if (coeffs.empty()) throw ArityError("series CSV holds no rows");
  return TruncatedSeries<double>(std::move(coeffs));
}

}  // namespace gkb
