#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

#include "traceinv/errors.hpp"

namespace traceinv {

enum class TraceMethod { exact_cholesky, exact_eigen, hutchinson, slq };

inline std::string to_string(TraceMethod m) {
  switch (m) {
    case TraceMethod::exact_cholesky: return "exact-cholesky";
    case TraceMethod::exact_eigen: return "exact-eigen";
    case TraceMethod::hutchinson: return "hutchinson";
    case TraceMethod::slq: return "slq";
  }
  return "unknown";
}

inline TraceMethod parse_trace_method(const std::string& s) {
  if (s == "cholesky" || s == "exact-cholesky" || s == "exact") return TraceMethod::exact_cholesky;
  if (s == "eigen" || s == "exact-eigen") return TraceMethod::exact_eigen;
  if (s == "hutchinson") return TraceMethod::hutchinson;
  if (s == "slq") return TraceMethod::slq;
  throw InvalidArgument("unknown trace method '" + s + "'");
}

/// trace(M^-1) together with how it was obtained.
struct TraceEstimate {
  double value = 0.0;
  TraceMethod method = TraceMethod::exact_cholesky;
  int num_samples = 0;        // 0 for exact methods
  double std_error = 0.0;     // 0 for exact methods
  std::uint64_t seed = 0;
};

/// {t, value, method, n_v, std_error, seed}
inline nlohmann::ordered_json to_json(const TraceEstimate& e, std::optional<double> t = std::nullopt) {
  nlohmann::ordered_json j;
  j["t"] = t ? nlohmann::ordered_json(*t) : nlohmann::ordered_json(nullptr);
  j["value"] = e.value;
  j["method"] = to_string(e.method);
  j["n_v"] = e.num_samples;
  j["std_error"] = e.std_error;
  j["seed"] = e.seed;
  return j;
}

}  // namespace traceinv
