// Copyright 2026 The lowthrust Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LOWTHRUST_DATASET_HPP_
#define LOWTHRUST_DATASET_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "lowthrust/factory.hpp"

namespace lowthrust {

inline constexpr int kDatasetSchemaVersion = 1;
inline constexpr int kDatasetColumns = 23;

// trajectory_id, sample_index, time_to_go, p, f, g, h, k, L, m,
// lambda_p .. lambda_L, lambda_m, u, i_r, i_t, i_n, v, m_p
const std::vector<std::string>& dataset_columns();

enum class DatasetFormat { kCsv, kBinary };

std::string to_string(DatasetFormat format);
DatasetFormat dataset_format_from_string(const std::string& name);

// Stored as <dataset>.header.json next to the rows.
struct DatasetHeader {
  int schema_version = kDatasetSchemaVersion;
  DatasetFormat format = DatasetFormat::kCsv;
  double mass_unit_kg = 0.0;
  double length_unit_m = 0.0;
  double time_unit_s = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double epsilon = 0.0;
  double rho = 0.0;
  double rho_l = 0.0;
  std::uint64_t seed = 0;
  std::int64_t n_samples = 0;
  double tf = 0.0;
  std::int64_t n_trajectories = 0;
  std::int64_t n_rows = 0;
};

struct Dataset {
  DatasetHeader header;
  std::vector<TrajectorySample> rows;
};

std::filesystem::path header_path(const std::filesystem::path& rows_path);

using DatasetRow = std::array<double, kDatasetColumns>;
DatasetRow to_row(const TrajectorySample& s);
TrajectorySample from_row(const DatasetRow& row);

// Streams trajectories to disk; the header is written by close() once the
// counts are known.
class DatasetWriter {
 public:
  DatasetWriter(std::filesystem::path path, DatasetHeader header);
  DatasetWriter(const DatasetWriter&) = delete;
  DatasetWriter& operator=(const DatasetWriter&) = delete;
  ~DatasetWriter();

  void write(const Trajectory& trajectory);
  void close();
  [[nodiscard]] const DatasetHeader& header() const { return header_; }

 private:
  std::filesystem::path path_;
  DatasetHeader header_;
  std::ofstream out_;
  std::string buffer_;
  bool closed_ = false;
};

void write_dataset(const std::filesystem::path& path, const Dataset& data);
Dataset read_dataset(const std::filesystem::path& path);
DatasetHeader read_dataset_header(const std::filesystem::path& rows_path);

}  // namespace lowthrust

#endif  // LOWTHRUST_DATASET_HPP_
