#pragma once

// JSON serialization of vectors, tensors and allocation plans, and the CSV
// norm report.

#include <string>
#include <vector>

#include "bmc/allocator.hpp"
#include "bmc/tensor.hpp"

namespace bmc {

/// {"kind", "p", "delta", "grid", "boundary", "seq_dim", "value_dim", "coeffs"}
std::string vector_to_json(const BanachVector& v);
BanachVector vector_from_json(const std::string& text);

/// {"k", "space": {...}, "terms": [{"c", "coeffs"}, ...]}
std::string tensor_to_json(const SymmetricTensorRep& U);
SymmetricTensorRep tensor_from_json(const std::string& text);

std::string plan_to_json(const MlmcPlan& plan);

struct NormRecord {
  std::string norm_kind;
  double value = 0.0;
  bool exact = false;
  int restarts = 0;
  std::string seed;
};

/// norm_kind,value,exact_flag,restarts,seed
std::string norm_report_csv(const std::vector<NormRecord>& rows);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace bmc
