#include "robicurve/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "robicurve/dist_kernel.hpp"

namespace robicurve {
namespace {

constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer: a bijective 64-bit mix with full avalanche
uint64_t mix64(uint64_t z) {
  z ^= z >> 33;
  z *= 0xff51afd7ed558ccdULL;
  z ^= z >> 33;
  z *= 0xc4ceb9fe1a85ec53ULL;
  z ^= z >> 33;
  return z;
}

double median_of(std::vector<double> v) {
  const size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  const double hi = v[n / 2];
  if (n % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + n / 2);
  return 0.5 * (lo + hi);
}

bool is_regression(const ModelSpec& model) {
  return model.variant == ModelSpec::Variant::RegressionLoc ||
         model.variant == ModelSpec::Variant::RegressionScale ||
         model.variant == ModelSpec::Variant::RegressionIntercept;
}

double draw_design(const RegressorDist& K, CounterRng& rng) {
  switch (K.kind) {
    case RegressorDist::Kind::StandardNormal:
      if (K.k != 1) throw ConfigError("generate: only scalar designs are simulated");
      return rng.normal();
    default: {
      const double p = rng.uniform();
      double cum = 0.0;
      for (size_t i = 0; i < K.atoms.size(); ++i) {
        cum += K.weights[i];
        if (p <= cum || i + 1 == K.atoms.size()) {
          if (K.atoms[i].size() != 1)
            throw ConfigError("generate: only scalar designs are simulated");
          return K.atoms[i][0];
        }
      }
      throw ConfigError("generate: empty design distribution");
    }
  }
}

}  // namespace

CounterRng::CounterRng(uint64_t seed, uint64_t stream)
    : key_(mix64(seed ^ mix64(stream * kGolden + kGolden))) {}

double CounterRng::uniform() {
  const uint64_t word = mix64(key_ + (++counter_) * kGolden);
  return static_cast<double>(word >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double CounterRng::normal() { return Phi_inv(uniform()); }

ContaminationH ContaminationH::point_mass(double x0) {
  ContaminationH h;
  h.kind = Kind::PointMass;
  h.x0 = x0;
  return h;
}

ContaminationH ContaminationH::normal(double mu, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("ContaminationH: sigma > 0 required");
  ContaminationH h;
  h.kind = Kind::Normal;
  h.mu = mu;
  h.sigma = sigma;
  return h;
}

ContaminationH ContaminationH::grid(std::vector<double> atoms, std::vector<double> weights) {
  if (atoms.empty() || atoms.size() != weights.size())
    throw ConfigError("ContaminationH: atoms/weights size mismatch");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ConfigError("ContaminationH: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("ContaminationH: weights must sum to 1");
  ContaminationH h;
  h.kind = Kind::Grid;
  h.atoms = std::move(atoms);
  h.weights = std::move(weights);
  return h;
}

double ContaminationH::draw(CounterRng& rng) const {
  switch (kind) {
    case Kind::PointMass:
      return x0;
    case Kind::Normal:
      return mu + sigma * rng.normal();
    case Kind::Grid: {
      const double p = rng.uniform();
      double cum = 0.0;
      for (size_t i = 0; i < atoms.size(); ++i) {
        cum += weights[i];
        if (p <= cum || i + 1 == atoms.size()) return atoms[i];
      }
      return atoms.back();
    }
  }
  return x0;
}

void SimConfig::validate() const {
  if (n < 1) throw ConfigError("SimConfig: n >= 1 required");
  if (replications < 1) throw ConfigError("SimConfig: replications >= 1 required");
  if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigError("SimConfig: r >= 0 required");
  if (r / std::sqrt(static_cast<double>(n)) > 1.0)
    throw RadiusExceedsOne("SimConfig: contamination rate r/sqrt(n) exceeds 1");
}

Sample generate(const ModelSpec& model, const SimConfig& config, uint64_t stream) {
  config.validate();
  if (model.k != 1 && !is_regression(model))
    throw ConfigError("generate: only scalar observation models are simulated");

  CounterRng rng(config.seed, stream);
  const double rate = config.r / std::sqrt(static_cast<double>(config.n));

  Sample s;
  s.r = config.r;
  s.seed = config.seed;
  s.stream = stream;
  s.y.reserve(config.n);
  s.contaminated.reserve(config.n);
  const bool reg = is_regression(model);
  if (reg) s.x.reserve(config.n);

  for (int i = 0; i < config.n; ++i) {
    if (reg) s.x.push_back(draw_design(model.K, rng));
    const bool bad = rng.uniform() < rate;
    s.contaminated.push_back(bad ? 1 : 0);
    s.y.push_back(bad ? config.H.draw(rng) : rng.normal());
  }
  return s;
}

double one_step(const InfluenceCurve& ic, const Sample& sample, double start, int component) {
  if (sample.n() == 0) throw EmptySample("one_step: n >= 1 required");
  if (!std::isfinite(start)) throw NonfiniteUpdate("one_step: start must be finite");

  const double n = static_cast<double>(sample.n());
  double sum = 0.0;
  double out = 0.0;
  switch (ic.model.variant) {
    case ModelSpec::Variant::Location:
      for (double y : sample.y) sum += ic.eval1(y - start);
      out = start + sum / n;
      break;
    case ModelSpec::Variant::Scale:
      if (!(start > 0.0)) throw NonfiniteUpdate("one_step: scale start must be positive");
      for (double y : sample.y) sum += ic.eval1(y / start);
      out = start * (1.0 + sum / n);
      break;
    case ModelSpec::Variant::RegressionLoc:
      for (int i = 0; i < sample.n(); ++i)
        sum += ic.eval2(sample.x[i], sample.y[i] - sample.x[i] * start, component);
      out = start + sum / n;
      break;
    case ModelSpec::Variant::RegressionIntercept:
      for (int i = 0; i < sample.n(); ++i)
        sum += ic.eval2(sample.x[i], sample.y[i] - start, component);
      out = start + sum / n;
      break;
    case ModelSpec::Variant::RegressionScale:
      if (component == 0) {
        for (int i = 0; i < sample.n(); ++i)
          sum += ic.eval2(sample.x[i], sample.y[i] - sample.x[i] * start, 0);
        out = start + sum / n;
      } else {
        if (!(start > 0.0)) throw NonfiniteUpdate("one_step: scale start must be positive");
        for (int i = 0; i < sample.n(); ++i)
          sum += ic.eval2(sample.x[i], sample.y[i] / start, 1);
        out = start * (1.0 + sum / n);
      }
      break;
  }
  if (!std::isfinite(out)) throw NonfiniteUpdate("one_step: nonfinite update");
  return out;
}

MEstimate m_estimate(const std::function<double(double)>& psi, const std::vector<double>& y) {
  if (y.empty()) throw EmptySample("m_estimate: n >= 1 required");
  auto [lo_it, hi_it] = std::minmax_element(y.begin(), y.end());
  double lo = *lo_it, hi = *hi_it;
  auto sum_psi = [&](double theta) {
    double s = 0.0;
    for (double v : y) s += psi(v - theta);
    return s;
  };
  const double f_lo = sum_psi(lo), f_hi = sum_psi(hi);
  MEstimate out;
  // sum psi(y - theta) is nonincreasing in theta for monotone psi
  if (f_lo < 0.0 || f_hi > 0.0) {
    out.root_found = false;
    out.estimate = std::abs(f_lo) <= std::abs(f_hi) ? lo : hi;
    return out;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    (sum_psi(mid) >= 0.0 ? lo : hi) = mid;
  }
  out.estimate = 0.5 * (lo + hi);
  return out;
}

MEstimate m_estimate(const HuberPsi& psi, const Sample& sample) {
  return m_estimate([&](double u) { return psi.eval(u); }, sample.y);
}

MEstimate m_estimate(const InfluenceCurve& ic, const Sample& sample) {
  if (ic.model.variant != ModelSpec::Variant::Location)
    throw ConfigError("m_estimate: only location-type curves are monotone in theta");
  return m_estimate([&](double u) { return ic.eval1(u); }, sample.y);
}

double start_estimate(const ModelSpec& model, const Sample& sample, SimConfig::Start kind) {
  if (sample.n() == 0) throw EmptySample("start_estimate: n >= 1 required");
  const double n = static_cast<double>(sample.n());
  switch (model.variant) {
    case ModelSpec::Variant::Location:
      if (kind == SimConfig::Start::MedianMad) return median_of(sample.y);
      return std::accumulate(sample.y.begin(), sample.y.end(), 0.0) / n;
    case ModelSpec::Variant::Scale: {
      if (kind == SimConfig::Start::MedianMad) {
        const double med = median_of(sample.y);
        std::vector<double> dev(sample.y.size());
        for (size_t i = 0; i < dev.size(); ++i) dev[i] = std::abs(sample.y[i] - med);
        return median_of(dev) / Phi_inv(0.75);
      }
      double ss = 0.0;
      for (double v : sample.y) ss += v * v;
      return std::sqrt(ss / n);
    }
    case ModelSpec::Variant::RegressionIntercept:
      if (kind == SimConfig::Start::MedianMad) return median_of(sample.y);
      return std::accumulate(sample.y.begin(), sample.y.end(), 0.0) / n;
    default: {  // slope models: least squares regardless of kind
      double sxy = 0.0, sxx = 0.0;
      for (int i = 0; i < sample.n(); ++i) {
        sxy += sample.x[i] * sample.y[i];
        sxx += sample.x[i] * sample.x[i];
      }
      if (!(sxx > 0.0)) throw SingularDesign("start_estimate: degenerate design");
      return sxy / sxx;
    }
  }
}

MseRecord monte_carlo_mse(const InfluenceCurve& ic, const ModelSpec& model,
                          const SimConfig& config) {
  config.validate();
  const double theta_true = model.variant == ModelSpec::Variant::Scale ? 1.0 : 0.0;
  MseRecord rec;
  rec.n = config.n;
  rec.replications = config.replications;
  rec.seed = config.seed;

  double mean = 0.0, m2 = 0.0;
  for (int j = 0; j < config.replications; ++j) {
    const Sample sample = generate(model, config, static_cast<uint64_t>(j));
    const double start = start_estimate(model, sample, config.start);
    const double est = one_step(ic, sample, start);
    const double err = est - theta_true;
    const double v = config.n * err * err;
    const double delta = v - mean;
    mean += delta / (j + 1);
    m2 += delta * (v - mean);
  }
  rec.nmse = mean;
  rec.mcse = config.replications > 1
                 ? std::sqrt(m2 / (config.replications - 1.0) / config.replications)
                 : 0.0;
  return rec;
}

}  // namespace robicurve
