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

#include "lowthrust/neural.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <random>

#include "lowthrust/errors.hpp"

namespace lowthrust {
namespace {

constexpr char kMagic[8] = {'L', 'T', 'M', 'L', 'P', '0', '0', '1'};

// Forward-pass intermediates. z[l] and a[l] for l = 1..L, a[0] is the
// normalized input; a[L] is the network output.
struct Tape {
  std::vector<Matrix> z;
  std::vector<Matrix> a;
};

Matrix softplus_of(const Matrix& z) {
  return z.unaryExpr([](double v) { return softplus(v); });
}

Matrix sigmoid_of(const Matrix& z) {
  return z.unaryExpr([](double v) { return sigmoid(v); });
}

Matrix activate(const Matrix& z, Activation act) {
  switch (act) {
    case Activation::kSoftplus:
      return softplus_of(z);
    case Activation::kSigmoid:
      return sigmoid_of(z);
    case Activation::kLinear:
      return z;
  }
  return z;
}

// Derivative of the output activation expressed through z.
Matrix output_derivative(const Matrix& z, Activation act) {
  switch (act) {
    case Activation::kSoftplus:
      return sigmoid_of(z);
    case Activation::kSigmoid: {
      const Matrix s = sigmoid_of(z);
      return s.array() * (1.0 - s.array());
    }
    case Activation::kLinear:
      return Matrix::Ones(z.rows(), z.cols());
  }
  return Matrix::Ones(z.rows(), z.cols());
}

void check_input(const Mlp& m, const Matrix& x) {
  if (x.rows() != m.input_dim()) {
    throw DomainError("network expects " + std::to_string(m.input_dim()) +
                      " inputs, got " + std::to_string(x.rows()));
  }
}

// With per_column set, every output column is computed by the same
// coefficient-wise kernel whatever the batch size, so batched and single-row
// evaluation agree bit for bit. Training uses the blocked product.
Tape run_forward(const Mlp& m, const Matrix& x, bool per_column = false) {
  check_input(m, x);
  const int n = m.layers();
  Tape t;
  t.z.resize(static_cast<std::size_t>(n) + 1);
  t.a.resize(static_cast<std::size_t>(n) + 1);
  t.a[0] = m.input_normalization().normalize(x);
  for (int l = 1; l <= n; ++l) {
    Matrix z = per_column ? Matrix(m.weight(l - 1).lazyProduct(t.a[l - 1]))
                          : Matrix(m.weight(l - 1) * t.a[l - 1]);
    z.colwise() += m.bias(l - 1);
    t.a[l] = activate(z, l < n ? Activation::kSoftplus : m.output_activation());
    t.z[l] = std::move(z);
  }
  return t;
}

// Adds the parameter gradient of a pass with output pre-activation adjoint
// zbar_out and optional extra adjoints on hidden pre-activations.
void backprop(const Mlp& m, const Tape& t, Matrix zbar,
              const std::vector<Matrix>* inject, Vector& grad) {
  const int n = m.layers();
  Eigen::Index offset = grad.size();
  for (int l = n; l >= 1; --l) {
    const int rows = m.dims()[static_cast<std::size_t>(l)];
    const int cols = m.dims()[static_cast<std::size_t>(l) - 1];
    offset -= rows;
    grad.segment(offset, rows) += zbar.rowwise().sum();
    offset -= static_cast<Eigen::Index>(rows) * cols;
    Eigen::Map<Matrix>(grad.data() + offset, rows, cols).noalias() +=
        zbar * t.a[static_cast<std::size_t>(l) - 1].transpose();
    if (l == 1) break;
    Matrix abar = m.weight(l - 1).transpose() * zbar;
    zbar = abar.array() * sigmoid_of(t.z[static_cast<std::size_t>(l) - 1]).array();
    if (inject != nullptr) zbar += (*inject)[static_cast<std::size_t>(l) - 1];
  }
}

// Input-gradient intermediates for a single linear-output network:
// gamma[l] = d out / d a[l], sp[l] = softplus'(z[l]).
struct GradTape {
  std::vector<Matrix> gamma;
  std::vector<Matrix> sp;
  Matrix grad;  // d out / d (raw input)
};

GradTape run_input_gradient(const Mlp& m, const Tape& t) {
  const int n = m.layers();
  GradTape g;
  g.gamma.resize(static_cast<std::size_t>(n));
  g.sp.resize(static_cast<std::size_t>(n));
  const Matrix out_d = output_derivative(t.z[static_cast<std::size_t>(n)],
                                         m.output_activation());
  // gamma[n-1] = W_{n-1}^T * act'(z_n).
  g.gamma[static_cast<std::size_t>(n) - 1] =
      m.weight(n - 1).transpose() * out_d;
  for (int l = n - 1; l >= 1; --l) {
    g.sp[static_cast<std::size_t>(l)] =
        sigmoid_of(t.z[static_cast<std::size_t>(l)]);
    const Matrix delta = g.gamma[static_cast<std::size_t>(l)].array() *
                         g.sp[static_cast<std::size_t>(l)].array();
    g.gamma[static_cast<std::size_t>(l) - 1] =
        m.weight(l - 1).transpose() * delta;
  }
  g.grad = g.gamma[0];
  const Normalization& norm = m.input_normalization();
  if (!norm.identity()) {
    g.grad = g.grad.array().colwise() / norm.scale.array();
  }
  return g;
}

void write_raw(std::ofstream& out, const void* data, std::size_t bytes) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
}

void read_raw(std::ifstream& in, void* data, std::size_t bytes,
              const std::filesystem::path& path) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
  if (!in) throw IoError("truncated model file " + path.string());
}

}  // namespace

std::string to_string(Activation a) {
  switch (a) {
    case Activation::kSoftplus:
      return "softplus";
    case Activation::kSigmoid:
      return "sigmoid";
    case Activation::kLinear:
      return "linear";
  }
  return "linear";
}

Activation activation_from_string(const std::string& name) {
  if (name == "softplus") return Activation::kSoftplus;
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "linear") return Activation::kLinear;
  throw DomainError("unknown activation '" + name + "'");
}

double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Matrix Normalization::normalize(const Matrix& x) const {
  if (identity()) return x;
  return (x.colwise() - mean).array().colwise() / scale.array();
}

Matrix Normalization::denormalize(const Matrix& z) const {
  if (identity()) return z;
  return (z.array().colwise() * scale.array()).matrix().colwise() + mean;
}

Normalization Normalization::fit(const Matrix& x) {
  if (x.cols() < 2) throw DomainError("normalization needs two samples");
  Normalization n;
  n.mean = x.rowwise().mean();
  const Matrix centered = x.colwise() - n.mean;
  n.scale = (centered.array().square().rowwise().sum() /
             static_cast<double>(x.cols()))
                .sqrt();
  for (Eigen::Index i = 0; i < n.scale.size(); ++i) {
    if (!(n.scale[i] > 0.0)) n.scale[i] = 1.0;
  }
  return n;
}

Mlp::Mlp(std::vector<int> dims, Activation output, std::uint64_t seed)
    : dims_(std::move(dims)), output_(output) {
  if (dims_.size() < 2) throw DomainError("network needs at least one layer");
  Eigen::Index total = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    if (dims_[l] < 1 || dims_[l + 1] < 1) {
      throw DomainError("layer widths must be positive");
    }
    offsets_.push_back(total);
    total += static_cast<Eigen::Index>(dims_[l + 1]) * (dims_[l] + 1);
  }
  theta_ = Vector::Zero(total);
  std::mt19937_64 rng(seed);
  for (int l = 0; l < layers(); ++l) {
    const double bound =
        1.0 / std::sqrt(static_cast<double>(dims_[static_cast<std::size_t>(l)]));
    std::uniform_real_distribution<double> uni(-bound, bound);
    auto w = weight(l);
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = uni(rng);
    }
    auto b = bias(l);
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = uni(rng);
  }
}

Eigen::Map<const Matrix> Mlp::weight(int layer) const {
  const auto l = static_cast<std::size_t>(layer);
  return {theta_.data() + offsets_[l], dims_[l + 1], dims_[l]};
}

Eigen::Map<const Vector> Mlp::bias(int layer) const {
  const auto l = static_cast<std::size_t>(layer);
  return {theta_.data() + offsets_[l] +
              static_cast<Eigen::Index>(dims_[l + 1]) * dims_[l],
          dims_[l + 1]};
}

Eigen::Map<Matrix> Mlp::weight(int layer) {
  const auto l = static_cast<std::size_t>(layer);
  return {theta_.data() + offsets_[l], dims_[l + 1], dims_[l]};
}

Eigen::Map<Vector> Mlp::bias(int layer) {
  const auto l = static_cast<std::size_t>(layer);
  return {theta_.data() + offsets_[l] +
              static_cast<Eigen::Index>(dims_[l + 1]) * dims_[l],
          dims_[l + 1]};
}

Matrix Mlp::forward(const Matrix& x) const {
  Tape t = run_forward(*this, x, /*per_column=*/true);
  return std::move(t.a.back());
}

Vector Mlp::forward_one(const Vector& x) const {
  return forward(Matrix(x)).col(0);
}

Matrix Mlp::input_gradient(const Matrix& x) const {
  if (output_dim() != 1) {
    throw DomainError("input gradient requires a single-output network");
  }
  return run_input_gradient(*this, run_forward(*this, x)).grad;
}

Vector Mlp::input_gradient_one(const Vector& x) const {
  return input_gradient(Matrix(x)).col(0);
}

LossGradient loss_policy(const Mlp& model, const Matrix& x, const Matrix& y,
                         bool with_gradient) {
  if (y.rows() != model.output_dim() || y.cols() != x.cols()) {
    throw DomainError("policy targets do not match the network output");
  }
  const Tape t = run_forward(model, x);
  const double scale = 1.0 / static_cast<double>(x.cols());
  const Matrix err = t.a.back() - y;
  LossGradient out;
  out.loss = err.squaredNorm() * scale;
  if (!with_gradient) return out;
  out.gradient = Vector::Zero(model.parameter_count());
  const Matrix zbar = (2.0 * scale) * err.array() *
                      output_derivative(t.z.back(), model.output_activation())
                          .array();
  backprop(model, t, zbar, nullptr, out.gradient);
  return out;
}

LossGradient loss_value(const Mlp& model, const Matrix& x, const Matrix& v,
                        bool with_gradient) {
  if (model.output_dim() != 1 || v.rows() != 1 || v.cols() != x.cols()) {
    throw DomainError("value targets do not match the network output");
  }
  return loss_policy(model, x, v, with_gradient);
}

LossGradient loss_value_gradient(const Mlp& model, const Matrix& x,
                                 const Matrix& v, const Matrix& g,
                                 bool with_gradient) {
  if (model.output_dim() != 1 || v.rows() != 1 || v.cols() != x.cols()) {
    throw DomainError("value targets do not match the network output");
  }
  if (g.rows() != model.input_dim() || g.cols() != x.cols()) {
    throw DomainError("gradient targets must have one row per input");
  }
  if (model.output_activation() != Activation::kLinear) {
    throw DomainError("gradient matching requires a linear output");
  }
  const Tape t = run_forward(model, x);
  const GradTape gt = run_input_gradient(model, t);
  const double scale = 1.0 / static_cast<double>(x.cols());
  const Matrix v_err = t.a.back() - v;
  const Matrix g_err = gt.grad - g;
  LossGradient out;
  out.loss = (v_err.squaredNorm() + g_err.squaredNorm()) * scale;
  if (!with_gradient) return out;

  const int n = model.layers();
  out.gradient = Vector::Zero(model.parameter_count());
  Vector& grad = out.gradient;

  // Reverse pass through the input-gradient computation.
  Matrix gamma_bar = (2.0 * scale) * g_err;
  const Normalization& norm = model.input_normalization();
  if (!norm.identity()) {
    gamma_bar = gamma_bar.array().colwise() / norm.scale.array();
  }
  std::vector<Matrix> inject(static_cast<std::size_t>(n));
  for (int l = 1; l <= n - 1; ++l) {
    const auto li = static_cast<std::size_t>(l);
    const int rows = model.dims()[li];
    const int cols = model.dims()[li - 1];
    const Matrix delta = gt.gamma[li].array() * gt.sp[li].array();
    // gamma[l-1] = W_{l-1}^T delta_l.
    const Eigen::Index w_off =
        model.weight(l - 1).data() - model.parameters().data();
    Eigen::Map<Matrix>(grad.data() + w_off, rows, cols).noalias() +=
        delta * gamma_bar.transpose();
    const Matrix delta_bar = model.weight(l - 1) * gamma_bar;
    const Matrix& s = gt.sp[li];
    inject[li] = delta_bar.array() * gt.gamma[li].array() * s.array() *
                 (1.0 - s.array());
    gamma_bar = delta_bar.array() * s.array();
  }
  // gamma[n-1] = W_{n-1}^T for a linear output.
  const Eigen::Index w_last =
      model.weight(n - 1).data() - model.parameters().data();
  grad.segment(w_last, model.dims()[static_cast<std::size_t>(n) - 1]) +=
      gamma_bar.rowwise().sum();

  backprop(model, t, (2.0 * scale) * v_err, &inject, grad);
  return out;
}

AmsGrad::AmsGrad(Eigen::Index n, AmsGradConfig cfg)
    : cfg_(cfg),
      m_(Vector::Zero(n)),
      v_(Vector::Zero(n)),
      v_hat_(Vector::Zero(n)) {}

void AmsGrad::step(Vector& params, const Vector& gradient, double lr) {
  if (params.size() != m_.size() || gradient.size() != m_.size()) {
    throw DomainError("optimizer state does not match the parameters");
  }
  ++t_;
  m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * gradient;
  v_ = cfg_.beta2 * v_ + (1.0 - cfg_.beta2) * gradient.cwiseAbs2();
  v_hat_ = v_hat_.cwiseMax(v_);
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  const double step = lr / bc1;
  params.array() -= step * m_.array() /
                    ((v_hat_.array() / bc2).sqrt() + cfg_.epsilon);
}

void Mlp::save(const std::filesystem::path& path) const {
  static_assert(std::endian::native == std::endian::little,
                "model files assume a little-endian host");
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write model " + path.string());
  write_raw(out, kMagic, sizeof(kMagic));
  const auto n_dims = static_cast<std::uint32_t>(dims_.size());
  write_raw(out, &n_dims, sizeof(n_dims));
  for (int d : dims_) {
    const auto v = static_cast<std::int32_t>(d);
    write_raw(out, &v, sizeof(v));
  }
  const auto act = static_cast<std::uint32_t>(output_);
  write_raw(out, &act, sizeof(act));
  const std::uint8_t has_norm = norm_.identity() ? 0 : 1;
  write_raw(out, &has_norm, sizeof(has_norm));
  if (has_norm != 0) {
    write_raw(out, norm_.mean.data(), sizeof(double) * norm_.mean.size());
    write_raw(out, norm_.scale.data(), sizeof(double) * norm_.scale.size());
  }
  const auto count = static_cast<std::uint64_t>(theta_.size());
  write_raw(out, &count, sizeof(count));
  write_raw(out, theta_.data(), sizeof(double) * theta_.size());
  if (!out) throw IoError("write failed for " + path.string());
  out.close();

  nlohmann::json desc{{"format", "lowthrust-mlp"},
                      {"version", 1},
                      {"dims", dims_},
                      {"hidden_activation", "softplus"},
                      {"output_activation", to_string(output_)},
                      {"parameters", theta_.size()},
                      {"input_normalization", !norm_.identity()}};
  if (!norm_.identity()) {
    desc["input_mean"] = std::vector<double>(norm_.mean.data(),
                                             norm_.mean.data() + norm_.mean.size());
    desc["input_scale"] = std::vector<double>(
        norm_.scale.data(), norm_.scale.data() + norm_.scale.size());
  }
  std::filesystem::path desc_path = path;
  desc_path += ".json";
  std::ofstream d(desc_path, std::ios::trunc);
  d << desc.dump(2) << '\n';
  if (!d) throw IoError("cannot write " + desc_path.string());
}

Mlp Mlp::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model " + path.string());
  char magic[sizeof(kMagic)];
  read_raw(in, magic, sizeof(magic), path);
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IoError(path.string() + " is not a lowthrust model file");
  }
  std::uint32_t n_dims = 0;
  read_raw(in, &n_dims, sizeof(n_dims), path);
  if (n_dims < 2 || n_dims > 1024) throw IoError("corrupt model header");
  std::vector<int> dims(n_dims);
  for (auto& d : dims) {
    std::int32_t v = 0;
    read_raw(in, &v, sizeof(v), path);
    d = v;
  }
  std::uint32_t act = 0;
  read_raw(in, &act, sizeof(act), path);
  if (act > static_cast<std::uint32_t>(Activation::kLinear)) {
    throw IoError("corrupt model activation tag");
  }
  Mlp m(dims, static_cast<Activation>(act), 0);
  std::uint8_t has_norm = 0;
  read_raw(in, &has_norm, sizeof(has_norm), path);
  if (has_norm != 0) {
    m.norm_.mean.resize(dims.front());
    m.norm_.scale.resize(dims.front());
    read_raw(in, m.norm_.mean.data(), sizeof(double) * dims.front(), path);
    read_raw(in, m.norm_.scale.data(), sizeof(double) * dims.front(), path);
  }
  std::uint64_t count = 0;
  read_raw(in, &count, sizeof(count), path);
  if (count != static_cast<std::uint64_t>(m.theta_.size())) {
    throw IoError("parameter count mismatch in " + path.string());
  }
  read_raw(in, m.theta_.data(), sizeof(double) * count, path);
  return m;
}

}  // namespace lowthrust
