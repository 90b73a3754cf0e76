#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "vacflow/momentum.hpp"

namespace vacflow {

/// File layout: the magic line, one line of JSON header, then the payload of
/// little-endian float64 values. Header "fields" lists name, byte offset into
/// the payload and value count; grid fields come first in the order rho, u0,
/// u1, u2, p, followed by the named scalars.
struct Checkpoint {
  explicit Checkpoint(const TorusGrid& g) : state(g) {}
  SimState state;
  double mu = 0.0;
  /// Run bookkeeping stored bit-exactly alongside the fields.
  std::vector<std::pair<std::string, double>> scalars;
  /// Free-form metadata (config, events); stored in the header.
  nlohmann::json meta = nlohmann::json::object();

  double scalar(const std::string& name) const;
};

inline constexpr const char* kCheckpointMagic = "VACFLOW-CHECKPOINT";
inline constexpr int kCheckpointSchema = 1;

/// Writes atomically (temporary file, then rename).
void write_checkpoint(const std::string& path, const Checkpoint& c);

/// Throws FormatError naming the first inconsistent byte offset.
Checkpoint read_checkpoint(const std::string& path);

}  // namespace vacflow
