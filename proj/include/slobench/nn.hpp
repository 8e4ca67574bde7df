#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <vector>

#include "slobench/errors.hpp"
#include "slobench/io_util.hpp"
#include "slobench/rng.hpp"

namespace slobench {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct NetSpec {
  int input = 24;
  std::vector<int> hidden;
  std::vector<int> heads;
  std::vector<double> head_scale;  // weight-init scale per head; defaults to 1

  bool operator==(const NetSpec&) const = default;
};

namespace detail {
struct LinearLayer {
  Mat w;  // out x in
  Vec b;
  Mat dw;
  Vec db;

  void init(int in, int out, double scale, Rng& rng) {
    const double bound = scale / std::sqrt(static_cast<double>(in));
    w.resize(out, in);
    for (int j = 0; j < in; ++j)
      for (int i = 0; i < out; ++i) w(i, j) = rng.uniform(-bound, bound);
    b = Vec::Zero(out);
    dw = Mat::Zero(out, in);
    db = Vec::Zero(out);
  }
};
}  // namespace detail

// Feed-forward network: rectified hidden trunk with one or more linear heads.
// Forward returns the cached activations needed for the hand-rolled reverse
// pass; backward accumulates parameter gradients for the loss gradients the
// caller supplies per head.
class Net {
 public:
  Net() = default;

  Net(const NetSpec& spec, Rng& rng) : spec_(spec) {
    require(!spec.heads.empty(), "network needs at least one head");
    int in = spec.input;
    for (int width : spec.hidden) {
      trunk_.emplace_back();
      trunk_.back().init(in, width, 1.0, rng);
      in = width;
    }
    for (std::size_t h = 0; h < spec.heads.size(); ++h) {
      const double scale = h < spec.head_scale.size() ? spec.head_scale[h] : 1.0;
      heads_.emplace_back();
      heads_.back().init(in, spec.heads[h], scale, rng);
    }
  }

  const NetSpec& spec() const { return spec_; }

  struct Activations {
    std::vector<Mat> pre;    // trunk pre-activations
    std::vector<Mat> post;   // trunk rectified outputs
    std::vector<Mat> heads;  // head outputs
  };

  // x: batch x input.
  Activations forward(const Mat& x) const {
    Activations acts;
    const Mat* cur = &x;
    for (const auto& layer : trunk_) {
      Mat z = (*cur * layer.w.transpose()).rowwise() + layer.b.transpose();
      acts.post.push_back(z.cwiseMax(0.0));
      acts.pre.push_back(std::move(z));
      cur = &acts.post.back();
    }
    for (const auto& head : heads_)
      acts.heads.push_back((*cur * head.w.transpose()).rowwise() + head.b.transpose());
    return acts;
  }

  // dheads: one gradient matrix per head, matching the head output shapes.
  void backward(const Mat& x, const Activations& acts, const std::vector<Mat>& dheads) {
    require(dheads.size() == heads_.size(), "head gradient count mismatch");
    const Mat& last = trunk_.empty() ? x : acts.post.back();
    Mat dcur = Mat::Zero(x.rows(), last.cols());
    for (std::size_t h = 0; h < heads_.size(); ++h) {
      heads_[h].dw.noalias() += dheads[h].transpose() * last;
      heads_[h].db.noalias() += dheads[h].colwise().sum().transpose();
      dcur.noalias() += dheads[h] * heads_[h].w;
    }
    for (int l = static_cast<int>(trunk_.size()) - 1; l >= 0; --l) {
      const Mat dpre = (acts.pre[l].array() > 0.0).select(dcur, 0.0);
      const Mat& prev = l == 0 ? x : acts.post[l - 1];
      trunk_[l].dw.noalias() += dpre.transpose() * prev;
      trunk_[l].db.noalias() += dpre.colwise().sum().transpose();
      if (l > 0) dcur = dpre * trunk_[l].w;
    }
  }

  void zero_grad() {
    for (auto& layer : trunk_) {
      layer.dw.setZero();
      layer.db.setZero();
    }
    for (auto& head : heads_) {
      head.dw.setZero();
      head.db.setZero();
    }
  }

  std::size_t param_count() const {
    std::size_t n = 0;
    for (const auto& l : trunk_) n += l.w.size() + l.b.size();
    for (const auto& h : heads_) n += h.w.size() + h.b.size();
    return n;
  }

  // Visits (param, grad) pairs in a fixed order.
  template <class F>
  void visit_params(F&& f) {
    auto visit_layer = [&](detail::LinearLayer& l) {
      for (Eigen::Index i = 0; i < l.w.size(); ++i) f(l.w.data()[i], l.dw.data()[i]);
      for (Eigen::Index i = 0; i < l.b.size(); ++i) f(l.b.data()[i], l.db.data()[i]);
    };
    for (auto& l : trunk_) visit_layer(l);
    for (auto& h : heads_) visit_layer(h);
  }

  template <class F>
  void visit_params_const(F&& f) const {
    auto visit_layer = [&](const detail::LinearLayer& l) {
      for (Eigen::Index i = 0; i < l.w.size(); ++i) f(l.w.data()[i]);
      for (Eigen::Index i = 0; i < l.b.size(); ++i) f(l.b.data()[i]);
    };
    for (const auto& l : trunk_) visit_layer(l);
    for (const auto& h : heads_) visit_layer(h);
  }

  void copy_params_from(const Net& other) {
    require(spec_ == other.spec_, "network shapes differ");
    for (std::size_t i = 0; i < trunk_.size(); ++i) {
      trunk_[i].w = other.trunk_[i].w;
      trunk_[i].b = other.trunk_[i].b;
    }
    for (std::size_t i = 0; i < heads_.size(); ++i) {
      heads_[i].w = other.heads_[i].w;
      heads_[i].b = other.heads_[i].b;
    }
  }

  std::uint64_t param_hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    visit_params_const([&](double p) { h = fnv1a(&p, sizeof(p), h); });
    return h;
  }

  void save(std::ostream& out) const {
    put_u64(out, static_cast<std::uint64_t>(spec_.input));
    put_u64(out, spec_.hidden.size());
    for (int w : spec_.hidden) put_u64(out, static_cast<std::uint64_t>(w));
    put_u64(out, spec_.heads.size());
    for (int w : spec_.heads) put_u64(out, static_cast<std::uint64_t>(w));
    put_u64(out, spec_.head_scale.size());
    for (double s : spec_.head_scale) put_f64(out, s);
    visit_params_const_ordered([&](double p) { put_f64(out, p); });
  }

  void load(std::istream& in) {
    NetSpec spec;
    spec.input = static_cast<int>(get_u64(in));
    spec.hidden.resize(get_u64(in));
    for (auto& w : spec.hidden) w = static_cast<int>(get_u64(in));
    spec.heads.resize(get_u64(in));
    for (auto& w : spec.heads) w = static_cast<int>(get_u64(in));
    spec.head_scale.resize(get_u64(in));
    for (auto& s : spec.head_scale) s = get_f64(in);
    Rng dummy(0);
    *this = Net(spec, dummy);
    visit_params([&](double& p, double&) { p = get_f64(in); });
  }

 private:
  template <class F>
  void visit_params_const_ordered(F&& f) const {
    visit_params_const(std::forward<F>(f));
  }

  NetSpec spec_;
  std::vector<detail::LinearLayer> trunk_;
  std::vector<detail::LinearLayer> heads_;
};

// Adam with per-parameter first/second moment estimates.
class Adam {
 public:
  Adam() = default;
  explicit Adam(std::size_t n, double lr = 1e-4, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

  void step(Net& net) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    std::size_t i = 0;
    net.visit_params([&](double& p, double& g) {
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
      v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g * g;
      p -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
      ++i;
    });
    require(i == m_.size(), "optimizer size does not match the network");
  }

  long steps() const { return t_; }

  void save(std::ostream& out) const {
    put_f64(out, lr_);
    put_u64(out, static_cast<std::uint64_t>(t_));
    put_u64(out, m_.size());
    for (double x : m_) put_f64(out, x);
    for (double x : v_) put_f64(out, x);
  }

  void load(std::istream& in) {
    lr_ = get_f64(in);
    t_ = static_cast<long>(get_u64(in));
    const std::size_t n = get_u64(in);
    m_.resize(n);
    v_.resize(n);
    for (auto& x : m_) x = get_f64(in);
    for (auto& x : v_) x = get_f64(in);
  }

 private:
  double lr_ = 1e-4;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  long t_ = 0;
  std::vector<double> m_, v_;
};

inline Vec softmax(const Vec& logits) {
  const double m = logits.maxCoeff();
  Vec e = (logits.array() - m).exp();
  return e / e.sum();
}

inline double log_sum_exp(const Vec& logits) {
  const double m = logits.maxCoeff();
  return m + std::log((logits.array() - m).exp().sum());
}

inline int argmax_lowest_tie(const Vec& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

}  // namespace slobench
