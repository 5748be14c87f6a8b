#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "acro/rng.hpp"

namespace acro {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

// Learning-rate groups: encoder parameters and everything else.
enum class ParamGroup { encoder, head };

struct Parameter {
  std::string name;
  ParamGroup group = ParamGroup::encoder;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string n, ParamGroup g, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(n)), group(g), value(Matrix::Zero(rows, cols)), grad(Matrix::Zero(rows, cols)) {}

  void zero_grad() { grad.setZero(); }
  void init_normal(Rng& rng, double stddev) {
    for (Eigen::Index i = 0; i < value.size(); ++i) value.data()[i] = rng.normal(0.0, stddev);
  }
};

// Dropout masks are a pure function of (key, site), so a forward pass can be
// replayed with identical masks.
struct DropoutContext {
  double rate = 0.0;
  std::uint64_t key = 0;

  bool active() const noexcept { return rate > 0.0; }

  // Inverted-dropout mask: entries are 0 or 1/(1-rate).
  Matrix mask(std::uint64_t site, Eigen::Index rows, Eigen::Index cols) const {
    Matrix m(rows, cols);
    Rng rng(derive_seed(key, site));
    const double keep = 1.0 / (1.0 - rate);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform01() < rate ? 0.0 : keep;
    return m;
  }
};

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace acro
