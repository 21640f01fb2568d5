#pragma once

#include <memory>
#include <vector>

#include "drlab/agents/policy.hpp"
#include "drlab/nn/loss.hpp"

namespace drlab::attacks {

using nn::Vec;

/// Differentiable view a gradient attack works against: a forward map plus a
/// vector-Jacobian product for input gradients.
class AttackSurface {
 public:
  virtual ~AttackSurface() = default;
  virtual std::size_t input_width() const = 0;
  virtual std::size_t output_width() const = 0;
  virtual Vec forward(const Vec& x) const = 0;
  virtual Vec input_gradient(const Vec& x, const Vec& upstream) const = 0;
};

/// All outputs of a dense network (the logits of a discrete policy).
class NetworkSurface : public AttackSurface {
 public:
  explicit NetworkSurface(const nn::DenseNetwork* net) : net_(net) {}
  std::size_t input_width() const override { return net_->input_width(); }
  std::size_t output_width() const override { return net_->output_width(); }
  Vec forward(const Vec& x) const override { return net_->forward(x); }
  Vec input_gradient(const Vec& x, const Vec& upstream) const override;

 private:
  const nn::DenseNetwork* net_;
};

/// Scalar action of a continuous actor: tanh of the mean head.
class SquashedMeanSurface : public AttackSurface {
 public:
  explicit SquashedMeanSurface(const nn::DenseNetwork* actor) : actor_(actor) {}
  std::size_t input_width() const override { return actor_->input_width(); }
  std::size_t output_width() const override { return 1; }
  Vec forward(const Vec& x) const override;
  Vec input_gradient(const Vec& x, const Vec& upstream) const override;

 private:
  const nn::DenseNetwork* actor_;
};

struct BifurcationMode {
  enum class Kind { None, DiscreteGroups, ContinuousNegation };

  Kind kind = Kind::None;
  std::vector<std::size_t> charge_indices;
  std::vector<std::size_t> discharge_indices;

  static BifurcationMode none();
  static BifurcationMode discrete_groups(std::vector<std::size_t> charge,
                                         std::vector<std::size_t> discharge);
  static BifurcationMode continuous_negation();
  /// Positive-action bins as the charge group, negative-action bins as
  /// discharge, per the symmetric bin layout.
  static BifurcationMode standard_for(const agents::ActionSpace& space);

  bool is_none() const { return kind == Kind::None; }
  void validate(std::size_t output_width) const;
};

/// Two-logit wrapper: group maxima over an underlying logit surface. The
/// gradient flows through the selected max element, lowest index on ties.
class GroupMaxSurface : public AttackSurface {
 public:
  GroupMaxSurface(std::shared_ptr<const AttackSurface> base, BifurcationMode mode);
  std::size_t input_width() const override { return base_->input_width(); }
  std::size_t output_width() const override { return 2; }
  Vec forward(const Vec& x) const override;
  Vec input_gradient(const Vec& x, const Vec& upstream) const override;

 private:
  std::shared_ptr<const AttackSurface> base_;
  BifurcationMode mode_;
};

/// Two-logit wrapper around a scalar surface y: outputs (y, -y), with the
/// gradient flowing through both branches.
class NegationSurface : public AttackSurface {
 public:
  explicit NegationSurface(std::shared_ptr<const AttackSurface> base);
  std::size_t input_width() const override { return base_->input_width(); }
  std::size_t output_width() const override { return 2; }
  Vec forward(const Vec& x) const override;
  Vec input_gradient(const Vec& x, const Vec& upstream) const override;

 private:
  std::shared_ptr<const AttackSurface> base_;
};

/// Wraps a surface in the requested bifurcation; None returns it unchanged.
std::shared_ptr<const AttackSurface> bifurcate(std::shared_ptr<const AttackSurface> base,
                                               const BifurcationMode& mode);

double surface_loss(const AttackSurface& surface, const Vec& x, const nn::LossSpec& spec);
Vec surface_loss_gradient(const AttackSurface& surface, const Vec& x, const nn::LossSpec& spec);

}  // namespace drlab::attacks
