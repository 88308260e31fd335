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

#include "artifacts.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <memory>

#include "json.hpp"
#include "lowthrust/errors.hpp"

namespace lowthrust::tools {

using nlohmann::json;

namespace {

json vec_json(const Vec6& v) {
  return json::array({v[0], v[1], v[2], v[3], v[4], v[5]});
}

Vec6 json_vec(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 6) {
    throw IoError("nominal artifact: '" + what + "' must hold 6 numbers");
  }
  Vec6 v;
  for (int i = 0; i < 6; ++i) v[i] = j.at(static_cast<std::size_t>(i));
  return v;
}

}  // namespace

std::string csv_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

fs::path ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) ensure_dir(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

void write_nominal(const fs::path& path, const NominalSolution& sol,
                   const ThrustConfig& thrust, const Units& units,
                   const IntegratorConfig& integrator) {
  const double m_f = sol.final_mass(thrust, integrator);
  json chain = json::array();
  for (const ContinuationStep& s : sol.continuation.chain) {
    chain.push_back({{"epsilon", s.epsilon},
                     {"tf", s.unknowns.tf},
                     {"residual", s.residual_norm},
                     {"iterations", s.iterations},
                     {"final_mass", s.final_mass}});
  }
  const json j{
      {"problem",
       {{"x0", vec_json(sol.problem.x0.to_vector())},
        {"m0", sol.problem.m0},
        {"target", vec_json(sol.problem.target.to_vector())}}},
      {"unknowns",
       {{"lambda0", vec_json(sol.unknowns.lambda0)},
        {"lambda_m0", sol.unknowns.lambda_m0},
        {"tf", sol.unknowns.tf}}},
      {"epsilon", thrust.epsilon},
      {"final_mass", m_f},
      {"tf_years", units.years(sol.unknowns.tf)},
      {"propellant_kg", units.kg(sol.problem.m0 - m_f)},
      {"restart_index", sol.restart_index},
      {"restarts_tried", sol.restarts_tried},
      {"restarts_converged", sol.restarts_converged},
      {"chain", chain},
  };
  write_text(path, j.dump(2) + "\n");
}

NominalArtifact read_nominal(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open nominal artifact " + path.string());
  try {
    const json j = json::parse(in);
    NominalArtifact a;
    const json& p = j.at("problem");
    a.problem.x0 = EquinoctialState::from_vector(json_vec(p.at("x0"), "x0"));
    a.problem.m0 = p.at("m0");
    a.problem.target =
        EquinoctialState::from_vector(json_vec(p.at("target"), "target"));
    const json& u = j.at("unknowns");
    a.unknowns.lambda0 = json_vec(u.at("lambda0"), "lambda0");
    a.unknowns.lambda_m0 = u.at("lambda_m0");
    a.unknowns.tf = u.at("tf");
    a.epsilon = j.at("epsilon");
    return a;
  } catch (const json::exception& e) {
    throw IoError("malformed nominal artifact " + path.string() + ": " +
                  e.what());
  }
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(
      EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw IoError("sha256 unavailable");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) {
      EVP_DigestUpdate(ctx.get(), buf.data(),
                       static_cast<std::size_t>(in.gcount()));
    }
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[md[i] >> 4];
    hex += kHex[md[i] & 0xf];
  }
  return hex;
}

void write_manifest(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), dir);
    if (rel == "manifest.json") continue;
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  json list = json::array();
  for (const fs::path& rel : files) {
    list.push_back({{"path", rel.generic_string()},
                    {"bytes", fs::file_size(dir / rel)},
                    {"sha256", sha256_file(dir / rel)}});
  }
  write_text(dir / "manifest.json", json{{"files", list}}.dump(2) + "\n");
}

void write_rollout_csv(const fs::path& path, const RolloutResult& r,
                       const Units& units) {
  std::string out =
      "t_years,p,f,g,h,k,L,m_kg,throttle,dir_r,dir_t,dir_n,"
      "orbit_distance,cartesian_distance_au\n";
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    const Vec6 x = r.states[i].to_vector();
    const Control& c = r.controls[i];
    out += csv_double(units.years(r.times[i]));
    for (int j = 0; j < 6; ++j) out += "," + csv_double(x[j]);
    out += "," + csv_double(units.kg(r.masses[i]));
    out += "," + csv_double(c.throttle);
    for (int j = 0; j < 3; ++j) out += "," + csv_double(c.direction[j]);
    out += "," + csv_double(r.orbit_distance[i]);
    out += "," + csv_double(r.cartesian_distance[i]) + "\n";
  }
  write_text(path, out);
}

}  // namespace lowthrust::tools
