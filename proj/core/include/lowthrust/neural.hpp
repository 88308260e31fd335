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

#ifndef LOWTHRUST_NEURAL_HPP_
#define LOWTHRUST_NEURAL_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace lowthrust {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { kSoftplus, kSigmoid, kLinear };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

double softplus(double z);
double sigmoid(double z);

// Affine input map (x - mean) / scale. Empty vectors mean identity.
struct Normalization {
  Vector mean;
  Vector scale;

  [[nodiscard]] bool identity() const { return mean.size() == 0; }
  [[nodiscard]] Matrix normalize(const Matrix& x) const;
  [[nodiscard]] Matrix denormalize(const Matrix& z) const;
  static Normalization fit(const Matrix& x);  // columns are samples
};

// Fully connected network with softplus hidden layers. Inputs and outputs
// are column-per-sample matrices. All weights and biases live in one flat
// parameter vector; layer l owns a (dims[l+1] x dims[l]) weight block
// followed by its bias.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<int> dims, Activation output, std::uint64_t seed);

  [[nodiscard]] const std::vector<int>& dims() const { return dims_; }
  [[nodiscard]] int input_dim() const { return dims_.front(); }
  [[nodiscard]] int output_dim() const { return dims_.back(); }
  [[nodiscard]] int layers() const { return static_cast<int>(dims_.size()) - 1; }
  [[nodiscard]] Activation output_activation() const { return output_; }

  [[nodiscard]] const Vector& parameters() const { return theta_; }
  Vector& parameters() { return theta_; }
  [[nodiscard]] Eigen::Index parameter_count() const { return theta_.size(); }

  Eigen::Map<const Matrix> weight(int layer) const;
  Eigen::Map<const Vector> bias(int layer) const;
  Eigen::Map<Matrix> weight(int layer);
  Eigen::Map<Vector> bias(int layer);

  Normalization& input_normalization() { return norm_; }
  [[nodiscard]] const Normalization& input_normalization() const {
    return norm_;
  }

  [[nodiscard]] Matrix forward(const Matrix& x) const;
  [[nodiscard]] Vector forward_one(const Vector& x) const;

  // d output / d input for a single-output network, one column per sample,
  // including the input normalization.
  [[nodiscard]] Matrix input_gradient(const Matrix& x) const;
  [[nodiscard]] Vector input_gradient_one(const Vector& x) const;

  void save(const std::filesystem::path& path) const;
  static Mlp load(const std::filesystem::path& path);

 private:
  std::vector<int> dims_;
  Activation output_ = Activation::kLinear;
  Vector theta_;
  std::vector<Eigen::Index> offsets_;
  Normalization norm_;
};

// Loss value and gradient with respect to the flat parameter vector.
struct LossGradient {
  double loss = 0.0;
  Vector gradient;
};

// Batch means of squared errors. Targets are column-per-sample.
// Policy: sum over the outputs of (N - y)^2.
LossGradient loss_policy(const Mlp& model, const Matrix& x, const Matrix& y,
                         bool with_gradient = true);
// Value: (N - v)^2.
LossGradient loss_value(const Mlp& model, const Matrix& x, const Matrix& v,
                        bool with_gradient = true);
// Value plus gradient match: (N - v)^2 + |dN/dinput - g|^2, where g holds
// one target column per sample (the co-states).
LossGradient loss_value_gradient(const Mlp& model, const Matrix& x,
                                 const Matrix& v, const Matrix& g,
                                 bool with_gradient = true);

struct AmsGradConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class AmsGrad {
 public:
  AmsGrad(Eigen::Index n, AmsGradConfig cfg = {});
  void step(Vector& params, const Vector& gradient, double lr);
  [[nodiscard]] const Vector& second_moment_max() const { return v_hat_; }
  [[nodiscard]] std::int64_t steps() const { return t_; }

 private:
  AmsGradConfig cfg_;
  Vector m_;
  Vector v_;
  Vector v_hat_;
  std::int64_t t_ = 0;
};

}  // namespace lowthrust

#endif  // LOWTHRUST_NEURAL_HPP_
