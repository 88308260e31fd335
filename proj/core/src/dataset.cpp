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

#include "lowthrust/dataset.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <json.hpp>
#include <sstream>

#include "lowthrust/errors.hpp"

namespace lowthrust {
namespace {

static_assert(std::endian::native == std::endian::little,
              "binary datasets assume a little-endian host");

using nlohmann::json;

json header_to_json(const DatasetHeader& h) {
  return json{{"schema_version", h.schema_version},
              {"format", to_string(h.format)},
              {"columns", dataset_columns()},
              {"units",
               {{"mass_kg", h.mass_unit_kg},
                {"length_m", h.length_unit_m},
                {"time_s", h.time_unit_s},
                {"mu", 1.0}}},
              {"c1", h.c1},
              {"c2", h.c2},
              {"epsilon", h.epsilon},
              {"rho", h.rho},
              {"rho_l", h.rho_l},
              {"seed", h.seed},
              {"n_samples", h.n_samples},
              {"tf", h.tf},
              {"n_trajectories", h.n_trajectories},
              {"n_rows", h.n_rows}};
}

DatasetHeader header_from_json(const json& j) {
  DatasetHeader h;
  h.schema_version = j.at("schema_version").get<int>();
  if (h.schema_version != kDatasetSchemaVersion) {
    throw IoError("unsupported dataset schema version " +
                  std::to_string(h.schema_version));
  }
  h.format = dataset_format_from_string(j.at("format").get<std::string>());
  h.mass_unit_kg = j.at("units").at("mass_kg").get<double>();
  h.length_unit_m = j.at("units").at("length_m").get<double>();
  h.time_unit_s = j.at("units").at("time_s").get<double>();
  h.c1 = j.at("c1").get<double>();
  h.c2 = j.at("c2").get<double>();
  h.epsilon = j.at("epsilon").get<double>();
  h.rho = j.at("rho").get<double>();
  h.rho_l = j.at("rho_l").get<double>();
  h.seed = j.at("seed").get<std::uint64_t>();
  h.n_samples = j.at("n_samples").get<std::int64_t>();
  h.tf = j.at("tf").get<double>();
  h.n_trajectories = j.at("n_trajectories").get<std::int64_t>();
  h.n_rows = j.at("n_rows").get<std::int64_t>();
  return h;
}

void append_number(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

void append_csv_row(std::string& out, const DatasetRow& row) {
  for (int c = 0; c < kDatasetColumns; ++c) {
    if (c > 0) out.push_back(',');
    if (c < 2) {
      out += std::to_string(static_cast<std::int64_t>(row[c]));
    } else {
      append_number(out, row[c]);
    }
  }
  out.push_back('\n');
}

void append_binary_row(std::string& out, const DatasetRow& row) {
  out.append(reinterpret_cast<const char*>(row.data()),
             sizeof(double) * row.size());
}

DatasetRow parse_csv_line(const std::string& line, std::size_t line_no) {
  DatasetRow row{};
  const char* p = line.data();
  const char* end = p + line.size();
  for (int c = 0; c < kDatasetColumns; ++c) {
    const auto res = std::from_chars(p, end, row[c]);
    if (res.ec != std::errc{}) {
      throw IoError("malformed dataset row at line " + std::to_string(line_no));
    }
    p = res.ptr;
    if (c + 1 < kDatasetColumns) {
      if (p == end || *p != ',') {
        throw IoError("expected " + std::to_string(kDatasetColumns) +
                      " columns at line " + std::to_string(line_no));
      }
      ++p;
    }
  }
  if (p != end) {
    throw IoError("trailing data at line " + std::to_string(line_no));
  }
  return row;
}

}  // namespace

const std::vector<std::string>& dataset_columns() {
  static const std::vector<std::string> cols = {
      "trajectory_id", "sample_index", "time_to_go", "p",        "f",
      "g",             "h",            "k",          "L",        "m",
      "lambda_p",      "lambda_f",     "lambda_g",   "lambda_h", "lambda_k",
      "lambda_L",      "lambda_m",     "u",          "i_r",      "i_t",
      "i_n",           "v",            "m_p"};
  return cols;
}

std::string to_string(DatasetFormat format) {
  return format == DatasetFormat::kCsv ? "csv" : "binary";
}

DatasetFormat dataset_format_from_string(const std::string& name) {
  if (name == "csv") return DatasetFormat::kCsv;
  if (name == "binary") return DatasetFormat::kBinary;
  throw IoError("unknown dataset format '" + name + "'");
}

std::filesystem::path header_path(const std::filesystem::path& rows_path) {
  std::filesystem::path out = rows_path;
  out += ".header.json";
  return out;
}

DatasetRow to_row(const TrajectorySample& s) {
  DatasetRow r{};
  r[0] = static_cast<double>(s.trajectory_id);
  r[1] = static_cast<double>(s.sample_index);
  r[2] = s.time_to_go;
  const Vec6 x = s.x.to_vector();
  for (int i = 0; i < 6; ++i) r[3 + i] = x[i];
  r[9] = s.m;
  for (int i = 0; i < 6; ++i) r[10 + i] = s.costate.lambda[i];
  r[16] = s.costate.lambda_m;
  r[17] = s.throttle;
  for (int i = 0; i < 3; ++i) r[18 + i] = s.direction[i];
  r[21] = s.value;
  r[22] = s.propellant_to_go;
  return r;
}

TrajectorySample from_row(const DatasetRow& r) {
  TrajectorySample s;
  s.trajectory_id = static_cast<std::int64_t>(r[0]);
  s.sample_index = static_cast<std::int64_t>(r[1]);
  s.time_to_go = r[2];
  s.x = EquinoctialState{r[3], r[4], r[5], r[6], r[7], r[8]};
  s.m = r[9];
  for (int i = 0; i < 6; ++i) s.costate.lambda[i] = r[10 + i];
  s.costate.lambda_m = r[16];
  s.throttle = r[17];
  s.direction = Vec3(r[18], r[19], r[20]);
  s.value = r[21];
  s.propellant_to_go = r[22];
  return s;
}

DatasetWriter::DatasetWriter(std::filesystem::path path, DatasetHeader header)
    : path_(std::move(path)), header_(header) {
  header_.n_trajectories = 0;
  header_.n_rows = 0;
  if (path_.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path_.parent_path(), ec);
  }
  const auto mode = header_.format == DatasetFormat::kBinary
                        ? std::ios::binary | std::ios::trunc
                        : std::ios::trunc;
  out_.open(path_, std::ios::out | mode);
  if (!out_) throw IoError("cannot open dataset file " + path_.string());
  if (header_.format == DatasetFormat::kCsv) {
    std::string line;
    for (std::size_t c = 0; c < dataset_columns().size(); ++c) {
      if (c > 0) line.push_back(',');
      line += dataset_columns()[c];
    }
    line.push_back('\n');
    out_ << line;
  }
}

DatasetWriter::~DatasetWriter() {
  if (!closed_) {
    try {
      close();
    } catch (...) {
    }
  }
}

void DatasetWriter::write(const Trajectory& trajectory) {
  if (closed_) throw IoError("dataset writer already closed");
  buffer_.clear();
  for (const TrajectorySample& s : trajectory) {
    const DatasetRow row = to_row(s);
    if (header_.format == DatasetFormat::kCsv) {
      append_csv_row(buffer_, row);
    } else {
      append_binary_row(buffer_, row);
    }
  }
  out_.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
  if (!out_) throw IoError("write failed for " + path_.string());
  ++header_.n_trajectories;
  header_.n_rows += static_cast<std::int64_t>(trajectory.size());
}

void DatasetWriter::close() {
  if (closed_) return;
  closed_ = true;
  out_.close();
  if (!out_) throw IoError("write failed for " + path_.string());
  std::ofstream h(header_path(path_), std::ios::out | std::ios::trunc);
  h << header_to_json(header_).dump(2) << '\n';
  if (!h) throw IoError("cannot write " + header_path(path_).string());
}

void write_dataset(const std::filesystem::path& path, const Dataset& data) {
  DatasetWriter writer(path, data.header);
  Trajectory current;
  for (const TrajectorySample& s : data.rows) {
    if (!current.empty() && current.back().trajectory_id != s.trajectory_id) {
      writer.write(current);
      current.clear();
    }
    current.push_back(s);
  }
  if (!current.empty()) writer.write(current);
  writer.close();
}

DatasetHeader read_dataset_header(const std::filesystem::path& rows_path) {
  std::ifstream in(header_path(rows_path));
  if (!in) {
    throw IoError("missing dataset header " + header_path(rows_path).string());
  }
  try {
    return header_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw IoError("bad dataset header " + header_path(rows_path).string() +
                  ": " + e.what());
  }
}

Dataset read_dataset(const std::filesystem::path& path) {
  Dataset data;
  data.header = read_dataset_header(path);
  std::ifstream in(path, std::ios::in | std::ios::binary);
  if (!in) throw IoError("cannot open dataset file " + path.string());
  data.rows.reserve(static_cast<std::size_t>(data.header.n_rows));
  if (data.header.format == DatasetFormat::kBinary) {
    DatasetRow row{};
    while (in.read(reinterpret_cast<char*>(row.data()),
                   sizeof(double) * row.size())) {
      data.rows.push_back(from_row(row));
    }
    if (in.gcount() != 0) throw IoError("truncated binary dataset");
  } else {
    std::string line;
    std::getline(in, line);  // column names
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      data.rows.push_back(from_row(parse_csv_line(line, line_no)));
    }
  }
  if (static_cast<std::int64_t>(data.rows.size()) != data.header.n_rows) {
    throw IoError("dataset " + path.string() + " has " +
                  std::to_string(data.rows.size()) + " rows, header says " +
                  std::to_string(data.header.n_rows));
  }
  return data;
}

}  // namespace lowthrust
