#include "rr/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "rr/errors.hpp"
#include "rr/hash.hpp"

namespace rr {

int sign_bit(std::uint64_t seed, std::uint64_t n) { return static_cast<int>(mix2(seed, n) >> 63); }

RandomSigns::RandomSigns(Source magnitudes, std::uint64_t seed) : c_(std::move(magnitudes)), seed_(seed) {
  if (c_->dim() != 1) throw PreconditionError("random signs need a scalar magnitude source");
}

void RandomSigns::eval(std::uint64_t n, double* out) const {
  double c = c_->scalar(n);
  if (!(c >= 0.0)) throw PreconditionError("random signs: negative magnitude at index " + std::to_string(n));
  *out = sign(n) ? -c : c;
}

std::string RandomSigns::describe() const {
  return "random-signs(" + c_->describe() + ",seed=" + std::to_string(seed_) + ")";
}

std::shared_ptr<const RandomSigns> random_signs(Source magnitudes, std::uint64_t seed) {
  return std::make_shared<RandomSigns>(std::move(magnitudes), seed);
}

namespace {

McTrial run_trial(const std::vector<double>& c, std::uint64_t seed, std::uint64_t window) {
  Accumulator s;
  McTrial t{0.0, 0.0};
  const std::uint64_t h = c.size();
  const std::uint64_t tail = h - std::min(window, h);
  double lo = INFINITY, hi = -INFINITY;
  for (std::uint64_t n = 0; n < h; ++n) {
    s.add(sign_bit(seed, n) ? -c[n] : c[n]);
    double v = s.value();
    t.running_max = std::max(t.running_max, std::abs(v));
    if (n >= tail) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  t.tail_osc = h ? hi - lo : 0.0;
  return t;
}

}  // namespace

McReport rademacher_mc(Source magnitudes, std::uint64_t trials, std::uint64_t horizon, std::uint64_t window,
                       double osc_tol, double blowup, std::uint64_t seed, unsigned threads) {
  if (trials < 1) throw PreconditionError("rademacher_mc: trials must be at least 1");
  if (horizon < 1) throw PreconditionError("rademacher_mc: horizon must be at least 1");
  if (magnitudes->dim() != 1) throw PreconditionError("rademacher_mc: magnitudes must be scalar");
  std::vector<double> c(horizon);
  for (std::uint64_t n = 0; n < horizon; ++n) {
    c[n] = magnitudes->scalar(n);
    if (!(c[n] >= 0.0)) throw PreconditionError("rademacher_mc: negative magnitude at index " + std::to_string(n));
  }
  McReport r;
  r.trials = trials;
  r.horizon = horizon;
  r.window = window;
  r.seed = seed;
  r.osc_tol = osc_tol;
  r.blowup = blowup;
  r.per_trial.resize(trials);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, trials));
  std::vector<std::future<void>> jobs;
  for (unsigned w = 0; w < threads; ++w)
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::uint64_t t = w; t < trials; t += threads) r.per_trial[t] = run_trial(c, mix2(seed, t), window);
    }));
  for (auto& j : jobs) j.get();
  std::uint64_t conv = 0, div = 0;
  for (auto& t : r.per_trial) {
    conv += t.tail_osc < osc_tol;
    div += t.running_max > blowup;
  }
  r.convergence_fraction = static_cast<double>(conv) / static_cast<double>(trials);
  r.divergence_fraction = static_cast<double>(div) / static_cast<double>(trials);
  return r;
}

std::string McReport::json() const {
  nlohmann::json j;
  j["trials"] = trials;
  j["horizon"] = horizon;
  j["window"] = window;
  j["seed"] = seed;
  j["osc_tol"] = osc_tol;
  j["blowup"] = blowup;
  j["sign_stream_version"] = kSignStreamVersion;
  j["convergence_proxy"] = convergence_fraction;
  j["divergence_proxy"] = divergence_fraction;
  return j.dump(2);
}

std::string McReport::csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "trial,tail_osc,running_max\n";
  for (std::size_t t = 0; t < per_trial.size(); ++t)
    os << t << ',' << per_trial[t].tail_osc << ',' << per_trial[t].running_max << '\n';
  return os.str();
}

Trajectory bp_experiment(const Permutation& p, std::uint64_t seed, std::uint64_t horizon, const Sampling& sampling) {
  auto signed_series = random_signs(power_magnitudes(1.0), seed);
  return partial_sums(*signed_series, p, horizon, sampling);
}

}  // namespace rr
