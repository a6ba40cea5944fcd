#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "coldloop/objective.hpp"
#include "coldloop/optim/problem.hpp"

namespace coldloop::nn {

using Vector = std::vector<double>;

/// Per-feature affine map of [lo, hi] onto [-1, 1]. A degenerate feature (hi == lo)
/// is treated as spanning [lo, lo + 1].
struct Normalization {
  Vector lo, hi;

  static Normalization fit(const std::vector<Vector>& rows);
  double apply(double x, std::size_t k) const;
  double invert(double u, std::size_t k) const;
  Vector apply(const Vector& x) const;
  Vector invert(const Vector& u) const;
  std::size_t size() const { return lo.size(); }
};

/// Feed-forward network: tanh hidden layers, identity output, normalized inputs and
/// output. Parameters are ordered layer by layer, weights row-major (out x in) then biases.
class MLPNetwork {
 public:
  static std::vector<std::size_t> default_layers() { return {3, 5, 5, 5, 1}; }

  MLPNetwork() : MLPNetwork(default_layers()) {}
  explicit MLPNetwork(std::vector<std::size_t> layers);

  const std::vector<std::size_t>& layers() const { return layers_; }
  std::size_t layer_count() const { return layers_.size() - 1; }
  std::size_t parameter_count() const;

  /// Weights of layer l as a (layers[l+1] x layers[l]) row-major array, and its biases.
  std::vector<double>& weights(std::size_t l) { return weights_.at(l); }
  const std::vector<double>& weights(std::size_t l) const { return weights_.at(l); }
  std::vector<double>& bias(std::size_t l) { return biases_.at(l); }
  const std::vector<double>& bias(std::size_t l) const { return biases_.at(l); }

  Vector parameters() const;
  void set_parameters(const Vector& p);
  /// Every weight and bias drawn from U[-scale, scale].
  void initialize(std::uint64_t seed, double scale = 0.5);

  Normalization& input_normalization() { return input_norm_; }
  const Normalization& input_normalization() const { return input_norm_; }
  Normalization& output_normalization() { return output_norm_; }
  const Normalization& output_normalization() const { return output_norm_; }

  /// Physical input to physical output.
  double forward(const Vector& x) const;
  /// Normalized input to normalized output.
  double forward_normalized(const Vector& u) const;

  /// Mean of (f(u_i) - t_i)^2 over normalized samples; fills d/dparameters if grad != nullptr.
  double mse_gradient(const std::vector<Vector>& U, const Vector& T, Vector* grad) const;

  /// JSON with layer sizes, row-major weights, biases and normalization; doubles
  /// round-trip exactly.
  void save(std::ostream& out) const;
  static MLPNetwork load(std::istream& in, const std::string& source = "<network>");
  void save_file(const std::string& path) const;
  static MLPNetwork load_file(const std::string& path);

  bool operator==(const MLPNetwork& o) const;

 private:
  std::vector<std::size_t> layers_;
  std::vector<std::vector<double>> weights_, biases_;
  Normalization input_norm_, output_norm_;
};

struct Sample {
  Vector x;
  double y = 0.0;
};

struct TrainOptions {
  double learning_rate = 0.01;
  double momentum = 0.9;
  std::size_t epochs = 2000;
  double validation_fraction = 0.2;
  std::size_t batch_size = 1;  // online backpropagation
  std::vector<std::size_t> layers = MLPNetwork::default_layers();
  double init_scale = 0.5;
};

/// Per-epoch mean squared errors in objective units.
struct TrainReport {
  std::vector<double> train_mse, validation_mse;
  std::size_t best_epoch = 0;  // 1-based; minimum validation MSE (training MSE without a validation split)
  double best_mse = 0.0;
  std::size_t train_count = 0, validation_count = 0;
};

struct TrainResult {
  MLPNetwork network;
  TrainReport report;
};

/// Gradient descent with momentum on the MSE; returns the network at the best epoch.
/// Throws NumericalError if the loss becomes non-finite.
TrainResult train(const std::vector<Sample>& samples, const TrainOptions& options, std::uint64_t seed);

struct Regression {
  double R = 0.0;
  double mse = 0.0;
};

/// Pearson correlation of two equally long series. Throws Error if either has zero variance.
double pearson(const Vector& a, const Vector& b);
Regression evaluate_regression(const MLPNetwork& net, const std::vector<Sample>& samples);

/// `epoch,train_mse,validation_mse`
void write_train_report_csv(std::ostream& out, const TrainReport& report);

/// The network as a design objective: bounds enforced, zero cost, SurrogatePredicted.
class SurrogateObjective : public DesignObjective {
 public:
  explicit SurrogateObjective(std::shared_ptr<const MLPNetwork> net, DesignBounds bounds = {});
  const MLPNetwork& network() const { return *net_; }

 protected:
  ObjectiveValue compute(const DesignPoint& design, std::uint64_t seed) const override;
  Provenance fresh_provenance() const override { return Provenance::SurrogatePredicted; }

 private:
  std::shared_ptr<const MLPNetwork> net_;
};

std::unique_ptr<SurrogateObjective> as_objective(std::shared_ptr<const MLPNetwork> net, DesignBounds bounds = {});

}  // namespace coldloop::nn
