#pragma once

#include <map>
#include <string>

#include "onebit/observation.hpp"
#include "onebit/solver.hpp"
#include "onebit/tensor.hpp"

namespace onebit {

/// Text tensor file: header line "dims: N_1,...,N_d", then one entry per
/// line in first-index-fastest order.
void write_tensor(const std::string& path, const DenseTensor& t);
DenseTensor read_tensor(const std::string& path);

/// Observation CSV: header "i_1,...,i_d,y", then one row per sample with
/// 1-based indices and y in {-1, 1}.
void write_observations(const std::string& path, const ObservationSet& obs);
ObservationSet read_observations(const std::string& path, const Shape& shape);

/// Versioned fit checkpoint: shape, k, chosen radius, factors, trace.
void write_checkpoint(const std::string& path, const FitResult& fit);
FitResult read_checkpoint(const std::string& path);

struct RatingRow {
  TensorIndex index;  // 0-based
  double rating;
};

/// Rows of (i_1,...,i_d, rating), 1-based indices in the file.
struct RatingsTable {
  Shape shape;
  std::vector<RatingRow> rows;
  int duplicate_count = 0;
};

/// Ratings CSV ingest; duplicate indices keep the last row and are counted.
RatingsTable ingest_csv(const std::string& path, const Shape& shape);

/// Flat key-value experiment spec file: "key = value" lines, '#' comments.
std::map<std::string, std::string> read_keyvalue_file(const std::string& path);

}  // namespace onebit
