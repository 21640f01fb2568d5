#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace drlab::nn {

using Vec = std::vector<double>;

enum class Activation { Rectifier, Tanh, Identity };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

/// Dense row-major matrix of doubles. Rows index outputs, columns inputs.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

struct Layer {
  Matrix weight;  // [out x in]
  Vec bias;       // [out]
  Activation activation = Activation::Identity;

  std::size_t in_width() const { return weight.cols; }
  std::size_t out_width() const { return weight.rows; }
};

/// Per-layer pre- and post-activation values kept for reverse-mode passes.
struct ForwardTrace {
  Vec input;
  std::vector<Vec> pre_activations;
  std::vector<Vec> activations;

  const Vec& output() const { return activations.back(); }
};

struct LayerGrad {
  Matrix weight;
  Vec bias;
};

struct BackpropResult {
  Vec input_gradient;
  std::vector<LayerGrad> parameter_gradients;
};

/// Fixed chain of dense layers evaluated in 64-bit floating point.
///
/// The network is a value type: evaluation is const and pure, so instances
/// can be shared read-only across threads. Structural problems (dimension
/// mismatches, non-finite parameters) throw std::invalid_argument.
class DenseNetwork {
 public:
  DenseNetwork() = default;
  explicit DenseNetwork(std::vector<Layer> layers);

  /// Fan-based uniform init in +-sqrt(6/(in+out)), biases zero.
  static DenseNetwork random(const std::vector<std::size_t>& widths,
                             const std::vector<Activation>& activations,
                             std::uint64_t seed);

  std::size_t input_width() const;
  std::size_t output_width() const;
  std::size_t layer_count() const { return layers_.size(); }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& mutable_layers() { return layers_; }

  Vec forward(const Vec& x) const;
  ForwardTrace trace(const Vec& x) const;

  /// Reverse-mode pass from an upstream gradient on the final activations.
  /// Rectifier kinks use subgradient 0.
  Vec backprop_input(const ForwardTrace& t, const Vec& output_gradient) const;
  BackpropResult backprop(const ForwardTrace& t, const Vec& output_gradient) const;

  /// Self-describing decimal text, lossless round trip at 17 significant digits.
  void save(std::ostream& os) const;
  static DenseNetwork load(std::istream& is);
  void save_file(const std::string& path) const;
  static DenseNetwork load_file(const std::string& path);

 private:
  std::vector<Layer> layers_;
  void validate() const;
};

std::vector<LayerGrad> zero_gradients(const DenseNetwork& net);
void accumulate(std::vector<LayerGrad>& acc, const std::vector<LayerGrad>& g, double scale);
void scale_gradients(std::vector<LayerGrad>& g, double scale);

}  // namespace drlab::nn
