#include "drlab/nn/network.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace drlab::nn {

namespace {

double activate(Activation a, double z) {
  switch (a) {
    case Activation::Rectifier: return z > 0.0 ? z : 0.0;
    case Activation::Tanh: return std::tanh(z);
    case Activation::Identity: return z;
  }
  return z;
}

// Derivative w.r.t. pre-activation; rectifier uses subgradient 0 at the kink.
double activate_deriv(Activation a, double z) {
  switch (a) {
    case Activation::Rectifier: return z > 0.0 ? 1.0 : 0.0;
    case Activation::Tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Activation::Identity: return 1.0;
  }
  return 1.0;
}

void write_double(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}

}  // namespace

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::Rectifier: return "rectifier";
    case Activation::Tanh: return "tanh";
    case Activation::Identity: return "identity";
  }
  return "identity";
}

Activation activation_from_name(const std::string& name) {
  if (name == "rectifier") return Activation::Rectifier;
  if (name == "tanh") return Activation::Tanh;
  if (name == "identity") return Activation::Identity;
  throw std::invalid_argument("unknown activation: " + name);
}

DenseNetwork::DenseNetwork(std::vector<Layer> layers) : layers_(std::move(layers)) {
  validate();
}

void DenseNetwork::validate() const {
  if (layers_.empty()) throw std::invalid_argument("network needs at least one layer");
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const Layer& l = layers_[k];
    if (l.weight.rows == 0 || l.weight.cols == 0)
      throw std::invalid_argument("layer " + std::to_string(k) + " has empty weight");
    if (l.bias.size() != l.weight.rows)
      throw std::invalid_argument("layer " + std::to_string(k) + " bias width mismatch");
    if (k > 0 && l.weight.cols != layers_[k - 1].weight.rows)
      throw std::invalid_argument("layer " + std::to_string(k) + " not chain-compatible");
    for (double w : l.weight.data)
      if (!std::isfinite(w)) throw std::invalid_argument("non-finite weight in layer " + std::to_string(k));
    for (double b : l.bias)
      if (!std::isfinite(b)) throw std::invalid_argument("non-finite bias in layer " + std::to_string(k));
  }
}

DenseNetwork DenseNetwork::random(const std::vector<std::size_t>& widths,
                                  const std::vector<Activation>& activations,
                                  std::uint64_t seed) {
  if (widths.size() < 2) throw std::invalid_argument("need at least input and output widths");
  if (activations.size() != widths.size() - 1)
    throw std::invalid_argument("need one activation per layer");
  std::mt19937_64 rng(seed);
  std::vector<Layer> layers;
  layers.reserve(widths.size() - 1);
  for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
    const std::size_t in = widths[k];
    const std::size_t out = widths[k + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Layer l;
    l.weight = Matrix(out, in);
    l.bias = Vec(out, 0.0);
    l.activation = activations[k];
    for (double& w : l.weight.data) w = dist(rng);
    layers.push_back(std::move(l));
  }
  return DenseNetwork(std::move(layers));
}

std::size_t DenseNetwork::input_width() const { return layers_.front().weight.cols; }
std::size_t DenseNetwork::output_width() const { return layers_.back().weight.rows; }

Vec DenseNetwork::forward(const Vec& x) const {
  if (x.size() != input_width()) throw std::invalid_argument("input width mismatch");
  Vec a = x;
  for (const Layer& l : layers_) {
    Vec z(l.out_width());
    for (std::size_t i = 0; i < l.out_width(); ++i) {
      double s = l.bias[i];
      const double* row = l.weight.data.data() + i * l.weight.cols;
      for (std::size_t j = 0; j < l.in_width(); ++j) s += row[j] * a[j];
      z[i] = activate(l.activation, s);
    }
    a = std::move(z);
  }
  return a;
}

ForwardTrace DenseNetwork::trace(const Vec& x) const {
  if (x.size() != input_width()) throw std::invalid_argument("input width mismatch");
  ForwardTrace t;
  t.input = x;
  t.pre_activations.reserve(layers_.size());
  t.activations.reserve(layers_.size());
  const Vec* a = &t.input;
  for (const Layer& l : layers_) {
    Vec z(l.out_width());
    for (std::size_t i = 0; i < l.out_width(); ++i) {
      double s = l.bias[i];
      const double* row = l.weight.data.data() + i * l.weight.cols;
      for (std::size_t j = 0; j < l.in_width(); ++j) s += row[j] * (*a)[j];
      z[i] = s;
    }
    Vec act(l.out_width());
    for (std::size_t i = 0; i < l.out_width(); ++i) act[i] = activate(l.activation, z[i]);
    t.pre_activations.push_back(std::move(z));
    t.activations.push_back(std::move(act));
    a = &t.activations.back();
  }
  return t;
}

Vec DenseNetwork::backprop_input(const ForwardTrace& t, const Vec& output_gradient) const {
  if (output_gradient.size() != output_width())
    throw std::invalid_argument("output gradient width mismatch");
  Vec g = output_gradient;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    const Layer& l = layers_[k];
    Vec gz(l.out_width());
    for (std::size_t i = 0; i < l.out_width(); ++i)
      gz[i] = g[i] * activate_deriv(l.activation, t.pre_activations[k][i]);
    Vec gprev(l.in_width(), 0.0);
    for (std::size_t i = 0; i < l.out_width(); ++i) {
      const double* row = l.weight.data.data() + i * l.weight.cols;
      for (std::size_t j = 0; j < l.in_width(); ++j) gprev[j] += row[j] * gz[i];
    }
    g = std::move(gprev);
  }
  return g;
}

BackpropResult DenseNetwork::backprop(const ForwardTrace& t, const Vec& output_gradient) const {
  if (output_gradient.size() != output_width())
    throw std::invalid_argument("output gradient width mismatch");
  BackpropResult r;
  r.parameter_gradients = zero_gradients(*this);
  Vec g = output_gradient;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    const Layer& l = layers_[k];
    const Vec& below = (k == 0) ? t.input : t.activations[k - 1];
    Vec gz(l.out_width());
    for (std::size_t i = 0; i < l.out_width(); ++i)
      gz[i] = g[i] * activate_deriv(l.activation, t.pre_activations[k][i]);
    LayerGrad& lg = r.parameter_gradients[k];
    for (std::size_t i = 0; i < l.out_width(); ++i) {
      lg.bias[i] += gz[i];
      double* row = lg.weight.data.data() + i * lg.weight.cols;
      for (std::size_t j = 0; j < l.in_width(); ++j) row[j] += gz[i] * below[j];
    }
    Vec gprev(l.in_width(), 0.0);
    for (std::size_t i = 0; i < l.out_width(); ++i) {
      const double* row = l.weight.data.data() + i * l.weight.cols;
      for (std::size_t j = 0; j < l.in_width(); ++j) gprev[j] += row[j] * gz[i];
    }
    g = std::move(gprev);
  }
  r.input_gradient = std::move(g);
  return r;
}

void DenseNetwork::save(std::ostream& os) const {
  os << "drlab-densenet v1\n";
  os << "layers " << layers_.size() << "\n";
  for (const Layer& l : layers_) {
    os << "layer in " << l.in_width() << " out " << l.out_width() << " activation "
       << activation_name(l.activation) << "\n";
    for (std::size_t i = 0; i < l.out_width(); ++i) {
      for (std::size_t j = 0; j < l.in_width(); ++j) {
        if (j) os << ' ';
        write_double(os, l.weight(i, j));
      }
      os << "\n";
    }
    for (std::size_t i = 0; i < l.out_width(); ++i) {
      if (i) os << ' ';
      write_double(os, l.bias[i]);
    }
    os << "\n";
  }
}

DenseNetwork DenseNetwork::load(std::istream& is) {
  std::string magic, version;
  is >> magic >> version;
  if (magic != "drlab-densenet" || version != "v1")
    throw std::invalid_argument("not a drlab-densenet v1 file");
  std::string tok;
  std::size_t n = 0;
  is >> tok >> n;
  if (tok != "layers") throw std::invalid_argument("expected layer count");
  std::vector<Layer> layers;
  layers.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::string kw, inkw, outkw, actkw, actname;
    std::size_t in = 0, out = 0;
    is >> kw >> inkw >> in >> outkw >> out >> actkw >> actname;
    if (kw != "layer" || inkw != "in" || outkw != "out" || actkw != "activation")
      throw std::invalid_argument("malformed layer header at layer " + std::to_string(k));
    Layer l;
    l.weight = Matrix(out, in);
    l.bias = Vec(out, 0.0);
    l.activation = activation_from_name(actname);
    for (double& w : l.weight.data)
      if (!(is >> w)) throw std::invalid_argument("truncated weights at layer " + std::to_string(k));
    for (double& b : l.bias)
      if (!(is >> b)) throw std::invalid_argument("truncated biases at layer " + std::to_string(k));
    layers.push_back(std::move(l));
  }
  return DenseNetwork(std::move(layers));
}

void DenseNetwork::save_file(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for write: " + path);
  save(os);
}

DenseNetwork DenseNetwork::load_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for read: " + path);
  return load(is);
}

std::vector<LayerGrad> zero_gradients(const DenseNetwork& net) {
  std::vector<LayerGrad> g;
  g.reserve(net.layer_count());
  for (const Layer& l : net.layers()) {
    LayerGrad lg;
    lg.weight = Matrix(l.out_width(), l.in_width());
    lg.bias = Vec(l.out_width(), 0.0);
    g.push_back(std::move(lg));
  }
  return g;
}

void accumulate(std::vector<LayerGrad>& acc, const std::vector<LayerGrad>& g, double scale) {
  for (std::size_t k = 0; k < acc.size(); ++k) {
    for (std::size_t i = 0; i < acc[k].weight.data.size(); ++i)
      acc[k].weight.data[i] += scale * g[k].weight.data[i];
    for (std::size_t i = 0; i < acc[k].bias.size(); ++i)
      acc[k].bias[i] += scale * g[k].bias[i];
  }
}

void scale_gradients(std::vector<LayerGrad>& g, double scale) {
  for (LayerGrad& lg : g) {
    for (double& w : lg.weight.data) w *= scale;
    for (double& b : lg.bias) b *= scale;
  }
}

}  // namespace drlab::nn
