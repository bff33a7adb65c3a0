#pragma once

// JSON forms of the main result types. Rationals are strings ("1/2"),
// invariants use the canonical cyclic form of each trace.

#include <complex>
#include <cstdint>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "frg/fixedpoint.hpp"
#include "frg/flow.hpp"
#include "frg/hessalg.hpp"
#include "frg/invariants.hpp"

namespace frg {

inline constexpr const char* kVersion = "0.3.0";
inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

inline std::uint64_t fnv1a(const std::string& data, std::uint64_t h = 14695981039346656037ULL) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

inline Json envelope(const std::string& command, const std::string& input_hash, Json payload) {
  Json j;
  j["command"] = command;
  j["input_hash"] = input_hash;
  j["version"] = kVersion;
  j["schema"] = kSchemaVersion;
  j["payload"] = std::move(payload);
  return j;
}

inline Json to_json(const ScalarPoly& p) {
  Json arr = Json::array();
  for (const auto& [m, c] : p.terms()) arr.push_back({{"coefficient", c.get_str()}, {"monomial", to_string(m)}});
  return arr;
}

inline Json to_json(const InvariantSum& s, const Alphabet& alpha) {
  Json arr = Json::array();
  for (const auto& [t, c] : s.terms())
    arr.push_back({{"invariant", to_string(t, alpha)}, {"coefficient", to_string(c)}, {"terms", to_json(c)}});
  return arr;
}

inline Json to_json(const Operator& op, const Alphabet& alpha) {
  return {{"coupling", op.coupling.name},
          {"symmetry_factor", op.symmetry_factor.get_str()},
          {"shape", to_string(op.shape, alpha)}};
}

inline Json to_json(const BetaSystem& bs) {
  Json j;
  j["large_n"] = bs.large_n;
  j["operators"] = Json::array();
  for (const auto& op : bs.operators) j["operators"].push_back(to_json(op, bs.alphabet));
  auto eqs = [](const std::vector<FlowEquation>& v) {
    Json arr = Json::array();
    for (const auto& e : v)
      arr.push_back({{"target", to_string(e.target)}, {"rhs", to_string(e.rhs)}, {"terms", to_json(e.rhs)}});
    return arr;
  };
  j["eta"] = eqs(bs.eta);
  j["beta"] = eqs(bs.beta);
  j["generated"] = to_json(bs.generated, bs.alphabet);
  return j;
}

inline Json to_json(const ScalingSolution& s, const BetaSystem& bs) {
  Json j;
  j["feasible"] = s.feasible;
  j["kappa"] = Json::object();
  j["lambda"] = Json::object();
  for (std::size_t b = 0; b < bs.operators.size() && b < s.kappa.size(); ++b) {
    const std::string& name = bs.operators[b].coupling.name;
    j["kappa"][name] = s.kappa[b].get_str();
    Json l = Json::object();
    for (std::size_t c = 0; c < bs.alphabet.size(); ++c)
      l[bs.alphabet.name(static_cast<Letter>(c))] = s.lambda[b][c].get_str();
    j["lambda"][name] = l;
  }
  j["witnesses"] = s.witnesses;
  j["notes"] = s.notes;
  return j;
}

inline Json to_json(const StabilityResult& st) {
  Json j;
  j["eigenvalues"] = Json::array();
  for (const auto& z : st.eigenvalues) j["eigenvalues"].push_back({z.real(), z.imag()});
  j["ill_conditioned"] = st.ill_conditioned;
  return j;
}

inline Json to_json(const MultistartResult& r, const NumericSystem& sys) {
  Json j;
  j["variables"] = sys.labels();
  j["attempted"] = r.attempted;
  j["converged"] = r.converged;
  j["roots"] = Json::array();
  for (const auto& fp : r.roots) {
    Json root;
    root["values"] = Json::object();
    for (std::size_t i = 0; i < sys.dim(); ++i) root["values"][sys.labels()[i]] = fp.values[static_cast<Eigen::Index>(i)];
    root["residual_norm"] = fp.residual_norm;
    root["positive_eigenvalues"] = fp.positive_eigenvalues();
    root["stability"] = to_json(fp.stability);
    j["roots"].push_back(root);
  }
  j["diagnostics"] = r.diagnostics;
  return j;
}

inline Json to_json(const HessMatrix& h, const Alphabet& alpha) {
  Json arr = Json::array();
  for (std::size_t a = 0; a < h.dim(); ++a)
    for (std::size_t b = 0; b < h.dim(); ++b) {
      if (h(a, b).is_zero()) continue;
      arr.push_back({{"row", alpha.name(static_cast<Letter>(a))},
                     {"column", alpha.name(static_cast<Letter>(b))},
                     {"entry", to_string(h(a, b), alpha)}});
    }
  return arr;
}

}  // namespace frg
