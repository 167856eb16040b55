// JSON serialization of potentials and numeric values. Complex numbers are
// written as [re, im] pairs; doubles round-trip at full precision.
#pragma once

#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "zslab/potential.hpp"

namespace zslab {

using json = nlohmann::ordered_json;

inline json to_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

inline cplx cplx_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2)
    throw std::invalid_argument("expected complex value as [re, im]");
  return cplx{j[0].get<double>(), j[1].get<double>()};
}

inline json harmonics_to_json(const GridFunction& f, double drop_below = 1e-14) {
  json h = json::object();
  const auto c = f.coeffs();
  const int n = f.n_modes();
  for (int k = -n + 1; k < n; ++k) {
    const cplx v = c[fft_index(k, c.size())];
    if (std::abs(v) > drop_below) h[std::to_string(k)] = to_json(v);
  }
  return json{{"harmonics", h}};
}

inline GridFunction grid_function_from_json(const json& j, int n_modes) {
  if (!j.contains("harmonics"))
    throw std::invalid_argument("potential component: missing \"harmonics\"");
  std::map<int, cplx> table;
  for (const auto& [key, val] : j.at("harmonics").items())
    table[std::stoi(key)] = cplx_from_json(val);
  return make_trig(table, n_modes);
}

inline json to_json(const Potential& phi) {
  json j;
  j["n_modes"] = phi.n_modes();
  if (phi.class_tag == RealityClass::diagonal || phi.class_tag == RealityClass::e_r ||
      phi.class_tag == RealityClass::e_i) {
    j["diagonal_of"] = harmonics_to_json(phi.minus);
  } else {
    j["minus"] = harmonics_to_json(phi.minus);
    j["plus"] = harmonics_to_json(phi.plus);
  }
  return j;
}

inline Potential potential_from_json(const json& j) {
  if (!j.contains("n_modes")) throw std::invalid_argument("potential: missing \"n_modes\"");
  const int n = j.at("n_modes").get<int>();
  if (j.contains("diagonal_of"))
    return Potential::diagonal(grid_function_from_json(j.at("diagonal_of"), n));
  if (!j.contains("minus") || !j.contains("plus"))
    throw std::invalid_argument("potential: need \"minus\"/\"plus\" or \"diagonal_of\"");
  return Potential::make(grid_function_from_json(j.at("minus"), n),
                         grid_function_from_json(j.at("plus"), n));
}

inline Potential load_potential(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open potential file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("malformed JSON in " + path + ": " + e.what());
  }
  return potential_from_json(j);
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  out << body;
}

}  // namespace zslab
