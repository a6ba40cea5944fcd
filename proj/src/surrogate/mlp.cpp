#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <random>

#include "coldloop/common.hpp"
#include "coldloop/surrogate.hpp"

namespace coldloop::nn {

Normalization Normalization::fit(const std::vector<Vector>& rows) {
  if (rows.empty()) throw Error("cannot fit a normalization to no data");
  Normalization n;
  n.lo = n.hi = rows.front();
  for (const auto& r : rows) {
    if (r.size() != n.lo.size()) throw Error("normalization rows differ in length");
    for (std::size_t k = 0; k < r.size(); ++k) {
      n.lo[k] = std::min(n.lo[k], r[k]);
      n.hi[k] = std::max(n.hi[k], r[k]);
    }
  }
  for (std::size_t k = 0; k < n.lo.size(); ++k)
    if (!(n.hi[k] > n.lo[k])) n.hi[k] = n.lo[k] + 1.0;
  return n;
}

double Normalization::apply(double x, std::size_t k) const { return 2.0 * (x - lo[k]) / (hi[k] - lo[k]) - 1.0; }
double Normalization::invert(double u, std::size_t k) const { return lo[k] + 0.5 * (u + 1.0) * (hi[k] - lo[k]); }

Vector Normalization::apply(const Vector& x) const {
  Vector u(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) u[k] = apply(x[k], k);
  return u;
}

Vector Normalization::invert(const Vector& u) const {
  Vector x(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) x[k] = invert(u[k], k);
  return x;
}

MLPNetwork::MLPNetwork(std::vector<std::size_t> layers) : layers_(std::move(layers)) {
  if (layers_.size() < 2) throw Error("a network needs at least an input and an output layer");
  for (auto n : layers_)
    if (n == 0) throw Error("layer sizes must be positive");
  if (layers_.back() != 1) throw Error("the output layer must have exactly one node");
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    weights_.emplace_back(layers_[l + 1] * layers_[l], 0.0);
    biases_.emplace_back(layers_[l + 1], 0.0);
  }
  input_norm_.lo.assign(layers_.front(), -1.0);
  input_norm_.hi.assign(layers_.front(), 1.0);
  output_norm_.lo = {-1.0};
  output_norm_.hi = {1.0};
}

std::size_t MLPNetwork::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < layer_count(); ++l) n += weights_[l].size() + biases_[l].size();
  return n;
}

Vector MLPNetwork::parameters() const {
  Vector p;
  p.reserve(parameter_count());
  for (std::size_t l = 0; l < layer_count(); ++l) {
    p.insert(p.end(), weights_[l].begin(), weights_[l].end());
    p.insert(p.end(), biases_[l].begin(), biases_[l].end());
  }
  return p;
}

void MLPNetwork::set_parameters(const Vector& p) {
  if (p.size() != parameter_count()) throw Error("parameter vector has the wrong length");
  auto it = p.begin();
  for (std::size_t l = 0; l < layer_count(); ++l) {
    std::copy_n(it, weights_[l].size(), weights_[l].begin());
    it += static_cast<std::ptrdiff_t>(weights_[l].size());
    std::copy_n(it, biases_[l].size(), biases_[l].begin());
    it += static_cast<std::ptrdiff_t>(biases_[l].size());
  }
}

void MLPNetwork::initialize(std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  Vector p(parameter_count());
  for (auto& v : p) v = u(rng);
  set_parameters(p);
}

double MLPNetwork::forward_normalized(const Vector& u) const {
  if (u.size() != layers_.front()) throw Error("network input has the wrong dimension");
  Vector a = u, z;
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const std::size_t in = layers_[l], out = layers_[l + 1];
    z.assign(out, 0.0);
    for (std::size_t i = 0; i < out; ++i) {
      double s = biases_[l][i];
      for (std::size_t j = 0; j < in; ++j) s += weights_[l][i * in + j] * a[j];
      z[i] = l + 1 < layer_count() ? std::tanh(s) : s;
    }
    a.swap(z);
  }
  return a[0];
}

double MLPNetwork::forward(const Vector& x) const {
  return output_norm_.invert(forward_normalized(input_norm_.apply(x)), 0);
}

double MLPNetwork::mse_gradient(const std::vector<Vector>& U, const Vector& T, Vector* grad) const {
  if (U.size() != T.size() || U.empty()) throw Error("mse_gradient needs matching, non-empty samples");
  const std::size_t L = layer_count();
  std::vector<std::vector<double>> gw, gb;
  if (grad) {
    for (std::size_t l = 0; l < L; ++l) {
      gw.emplace_back(weights_[l].size(), 0.0);
      gb.emplace_back(biases_[l].size(), 0.0);
    }
  }
  std::vector<Vector> act(L + 1);
  double loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(U.size());
  for (std::size_t s = 0; s < U.size(); ++s) {
    act[0] = U[s];
    for (std::size_t l = 0; l < L; ++l) {
      const std::size_t in = layers_[l], out = layers_[l + 1];
      act[l + 1].assign(out, 0.0);
      for (std::size_t i = 0; i < out; ++i) {
        double z = biases_[l][i];
        for (std::size_t j = 0; j < in; ++j) z += weights_[l][i * in + j] * act[l][j];
        act[l + 1][i] = l + 1 < L ? std::tanh(z) : z;
      }
    }
    const double err = act[L][0] - T[s];
    loss += err * err * inv_n;
    if (!grad) continue;
    // delta = dLoss/dz for the current layer
    Vector delta{2.0 * err * inv_n}, prev;
    for (std::size_t l = L; l-- > 0;) {
      const std::size_t in = layers_[l], out = layers_[l + 1];
      for (std::size_t i = 0; i < out; ++i) {
        gb[l][i] += delta[i];
        for (std::size_t j = 0; j < in; ++j) gw[l][i * in + j] += delta[i] * act[l][j];
      }
      if (l == 0) break;
      prev.assign(in, 0.0);
      for (std::size_t j = 0; j < in; ++j) {
        double s2 = 0.0;
        for (std::size_t i = 0; i < out; ++i) s2 += weights_[l][i * in + j] * delta[i];
        prev[j] = s2 * (1.0 - act[l][j] * act[l][j]);
      }
      delta.swap(prev);
    }
  }
  if (grad) {
    grad->clear();
    grad->reserve(parameter_count());
    for (std::size_t l = 0; l < L; ++l) {
      grad->insert(grad->end(), gw[l].begin(), gw[l].end());
      grad->insert(grad->end(), gb[l].begin(), gb[l].end());
    }
  }
  return loss;
}

void MLPNetwork::save(std::ostream& out) const {
  nlohmann::json j;
  j["format"] = "coldloop-mlp";
  j["layers"] = layers_;
  j["hidden_activation"] = "tanh";
  j["output_activation"] = "identity";
  j["weights"] = weights_;
  j["biases"] = biases_;
  j["input_normalization"] = {{"lo", input_norm_.lo}, {"hi", input_norm_.hi}};
  j["output_normalization"] = {{"lo", output_norm_.lo}, {"hi", output_norm_.hi}};
  out << j.dump(1) << '\n';
}

MLPNetwork MLPNetwork::load(std::istream& in, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(fmt::format("{}: not a network file: {}", source, e.what()));
  }
  try {
    if (j.at("format") != "coldloop-mlp") throw Error(source + ": unknown network format");
    MLPNetwork net(j.at("layers").get<std::vector<std::size_t>>());
    const auto w = j.at("weights").get<std::vector<std::vector<double>>>();
    const auto b = j.at("biases").get<std::vector<std::vector<double>>>();
    if (w.size() != net.layer_count() || b.size() != net.layer_count())
      throw Error(source + ": layer count does not match the weight arrays");
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
      if (w[l].size() != net.weights_[l].size() || b[l].size() != net.biases_[l].size())
        throw Error(fmt::format("{}: layer {} arrays do not match the layer sizes", source, l));
      net.weights_[l] = w[l];
      net.biases_[l] = b[l];
    }
    net.input_norm_.lo = j.at("input_normalization").at("lo").get<Vector>();
    net.input_norm_.hi = j.at("input_normalization").at("hi").get<Vector>();
    net.output_norm_.lo = j.at("output_normalization").at("lo").get<Vector>();
    net.output_norm_.hi = j.at("output_normalization").at("hi").get<Vector>();
    if (net.input_norm_.size() != net.layers_.front() || net.input_norm_.hi.size() != net.layers_.front() ||
        net.output_norm_.size() != 1 || net.output_norm_.hi.size() != 1)
      throw Error(source + ": normalization does not match the layer sizes");
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw Error(fmt::format("{}: malformed network file: {}", source, e.what()));
  }
}

void MLPNetwork::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  save(out);
}

MLPNetwork MLPNetwork::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open network file " + path);
  return load(in, path);
}

bool MLPNetwork::operator==(const MLPNetwork& o) const {
  return layers_ == o.layers_ && weights_ == o.weights_ && biases_ == o.biases_ && input_norm_.lo == o.input_norm_.lo &&
         input_norm_.hi == o.input_norm_.hi && output_norm_.lo == o.output_norm_.lo &&
         output_norm_.hi == o.output_norm_.hi;
}

namespace {

double physical_mse(const MLPNetwork& net, const std::vector<Sample>& samples, const std::vector<std::size_t>& idx) {
  double s = 0.0;
  for (std::size_t i : idx) {
    const double e = net.forward(samples[i].x) - samples[i].y;
    s += e * e;
  }
  return idx.empty() ? 0.0 : s / static_cast<double>(idx.size());
}

}  // namespace

TrainResult train(const std::vector<Sample>& samples, const TrainOptions& o, std::uint64_t seed) {
  if (samples.size() < 10) throw Error("training needs at least 10 samples");
  if (!(o.validation_fraction >= 0.0 && o.validation_fraction < 1.0))
    throw Error("validation fraction must lie in [0, 1)");
  if (o.batch_size == 0) throw Error("batch size must be positive");
  MLPNetwork net(o.layers);
  for (const auto& s : samples)
    if (s.x.size() != net.layers().front()) throw Error("sample dimension does not match the input layer");

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_val = static_cast<std::size_t>(std::floor(o.validation_fraction * static_cast<double>(samples.size())));
  std::vector<std::size_t> val(order.end() - static_cast<std::ptrdiff_t>(n_val), order.end());
  std::vector<std::size_t> tr(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_val));

  std::vector<Vector> xs;
  Vector ys;
  for (std::size_t i : tr) {
    xs.push_back(samples[i].x);
    ys.push_back(samples[i].y);
  }
  net.input_normalization() = Normalization::fit(xs);
  std::vector<Vector> yrows;
  for (double y : ys) yrows.push_back({y});
  net.output_normalization() = Normalization::fit(yrows);
  std::vector<Vector> U;
  Vector T;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    U.push_back(net.input_normalization().apply(xs[k]));
    T.push_back(net.output_normalization().apply(ys[k], 0));
  }

  net.initialize(rng(), o.init_scale);
  Vector params = net.parameters(), velocity(params.size(), 0.0), grad;
  TrainResult result{net, {}};
  auto& rep = result.report;
  rep.train_count = tr.size();
  rep.validation_count = val.size();
  rep.best_mse = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> perm(U.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<Vector> bu;
  Vector bt;
  for (std::size_t epoch = 1; epoch <= o.epochs; ++epoch) {
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t start = 0; start < perm.size(); start += o.batch_size) {
      const std::size_t end = std::min(start + o.batch_size, perm.size());
      bu.clear();
      bt.clear();
      for (std::size_t k = start; k < end; ++k) {
        bu.push_back(U[perm[k]]);
        bt.push_back(T[perm[k]]);
      }
      net.mse_gradient(bu, bt, &grad);
      for (std::size_t p = 0; p < params.size(); ++p) {
        velocity[p] = o.momentum * velocity[p] - o.learning_rate * grad[p];
        params[p] += velocity[p];
      }
      net.set_parameters(params);
    }
    const double train_mse = physical_mse(net, samples, tr);
    const double val_mse = physical_mse(net, samples, val);
    if (!std::isfinite(train_mse) || !std::isfinite(val_mse))
      throw NumericalError(fmt::format(
          "training diverged at epoch {} (non-finite loss); try a lower learning rate than {}", epoch,
          o.learning_rate));
    rep.train_mse.push_back(train_mse);
    rep.validation_mse.push_back(val_mse);
    const double score = val.empty() ? train_mse : val_mse;
    if (score < rep.best_mse) {
      rep.best_mse = score;
      rep.best_epoch = epoch;
      result.network = net;
    }
  }
  return result;
}

double pearson(const Vector& a, const Vector& b) {
  if (a.size() != b.size() || a.size() < 2) throw Error("pearson needs two series of equal length >= 2");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) throw Error("correlation is undefined for a zero-variance series");
  return sab / std::sqrt(saa * sbb);
}

Regression evaluate_regression(const MLPNetwork& net, const std::vector<Sample>& samples) {
  if (samples.size() < 2) throw Error("regression needs at least 2 samples");
  Vector pred, target;
  double se = 0.0;
  for (const auto& s : samples) {
    pred.push_back(net.forward(s.x));
    target.push_back(s.y);
    se += (pred.back() - s.y) * (pred.back() - s.y);
  }
  Vector t = target;
  const bool constant = std::all_of(t.begin(), t.end(), [&](double v) { return v == t.front(); });
  if (constant) throw Error("regression R is undefined for zero-variance targets");
  return {pearson(pred, target), se / static_cast<double>(samples.size())};
}

void write_train_report_csv(std::ostream& out, const TrainReport& r) {
  fmt::print(out, "epoch,train_mse,validation_mse\n");
  for (std::size_t e = 0; e < r.train_mse.size(); ++e)
    fmt::print(out, "{},{:.9g},{:.9g}\n", e + 1, r.train_mse[e], r.validation_mse[e]);
}

SurrogateObjective::SurrogateObjective(std::shared_ptr<const MLPNetwork> net, DesignBounds bounds)
    : DesignObjective(bounds, 0.0), net_(std::move(net)) {
  if (!net_) throw Error("surrogate objective needs a network");
  if (net_->layers().front() != 3) throw Error("surrogate network must take (v, r, theta)");
}

ObjectiveValue SurrogateObjective::compute(const DesignPoint& d, std::uint64_t) const {
  ObjectiveValue v;
  v.c = net_->forward({d.v, d.r, d.theta});
  v.measurement.mu = v.c != 0.0 ? 1.0 / v.c : 0.0;
  v.note = "surrogate prediction";
  return v;
}

std::unique_ptr<SurrogateObjective> as_objective(std::shared_ptr<const MLPNetwork> net, DesignBounds bounds) {
  return std::make_unique<SurrogateObjective>(std::move(net), bounds);
}

}  // namespace coldloop::nn
