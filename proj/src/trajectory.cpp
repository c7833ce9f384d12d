#include "rr/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>

#include "rr/errors.hpp"

namespace rr {

std::vector<std::uint64_t> Sampling::indices(std::uint64_t horizon) const {
  std::vector<std::uint64_t> out;
  std::uint64_t top = std::min(dense, horizon);
  for (std::uint64_t n = 1; n <= top; ++n) out.push_back(n);
  if (ratio > 1.0) {
    double x = static_cast<double>(std::max<std::uint64_t>(top, 1));
    std::uint64_t prev = out.empty() ? 0 : out.back();
    while (true) {
      x *= ratio;
      std::uint64_t n = std::max<std::uint64_t>(prev + 1, static_cast<std::uint64_t>(std::ceil(x)));
      if (n >= horizon) break;
      out.push_back(n);
      prev = n;
    }
  }
  for (auto e : extra)
    if (e >= 1 && e <= horizon) out.push_back(e);
  out.push_back(horizon);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Vec Trajectory::final_vec() const {
  Vec v(d);
  for (std::size_t c = 0; c < d; ++c) v[c] = final_value(c);
  return v;
}

double Trajectory::running_min(std::size_t c) const {
  double m = seg_min.at(c);
  for (std::size_t k = 0; k < size(); ++k) m = std::min(m, seg_min[k * d + c]);
  return m;
}

double Trajectory::running_max(std::size_t c) const {
  double m = seg_max.at(c);
  for (std::size_t k = 0; k < size(); ++k) m = std::max(m, seg_max[k * d + c]);
  return m;
}

Trajectory partial_sums(const TermSource& source, const Permutation& perm, std::uint64_t horizon,
                        const Sampling& sampling) {
  if (horizon < 1) throw PreconditionError("partial_sums: horizon must be at least 1");
  Trajectory t;
  t.d = source.dim();
  t.horizon = horizon;
  const std::size_t d = t.d;
  auto marks = sampling.indices(horizon);
  std::vector<Accumulator> acc(d);
  Vec a(d), lo(d, INFINITY), hi(d, -INFINITY);
  std::size_t next = 0;
  for (std::uint64_t n = 0; n < horizon; ++n) {
    source.eval(perm.forward(n), a.data());
    for (std::size_t c = 0; c < d; ++c) {
      acc[c].add(a[c]);
      double v = acc[c].value();
      lo[c] = std::min(lo[c], v);
      hi[c] = std::max(hi[c], v);
    }
    if (n + 1 == marks[next]) {
      t.index.push_back(n + 1);
      double mag = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        t.sum.push_back(acc[c].value());
        t.seg_min.push_back(lo[c]);
        t.seg_max.push_back(hi[c]);
        mag += a[c] * a[c];
        lo[c] = INFINITY;
        hi[c] = -INFINITY;
      }
      t.last_mag.push_back(d == 1 ? std::abs(a[0]) : std::sqrt(mag));
      ++next;
    }
  }
  return t;
}

namespace {
std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace

std::string trajectory_csv(const Trajectory& t) {
  std::string out = "index";
  for (std::size_t c = 0; c < t.d; ++c) out += ",sum_" + std::to_string(c);
  out += ",last_term_mag\n";
  for (std::size_t k = 0; k < t.size(); ++k) {
    out += std::to_string(t.index[k]);
    for (std::size_t c = 0; c < t.d; ++c) out += "," + fmt(t.at(k, c));
    out += "," + fmt(t.last_mag[k]) + "\n";
  }
  return out;
}

std::string trajectory_json(const Trajectory& t) {
  nlohmann::json j;
  j["d"] = t.d;
  j["horizon"] = t.horizon;
  j["index"] = t.index;
  j["sum"] = t.sum;
  j["seg_min"] = t.seg_min;
  j["seg_max"] = t.seg_max;
  j["last_term_mag"] = t.last_mag;
  return j.dump() + "\n";
}

Trajectory trajectory_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  Trajectory t;
  t.d = j.at("d").get<std::size_t>();
  t.horizon = j.at("horizon").get<std::uint64_t>();
  t.index = j.at("index").get<std::vector<std::uint64_t>>();
  t.sum = j.at("sum").get<std::vector<double>>();
  t.seg_min = j.at("seg_min").get<std::vector<double>>();
  t.seg_max = j.at("seg_max").get<std::vector<double>>();
  t.last_mag = j.at("last_term_mag").get<std::vector<double>>();
  if (t.sum.size() != t.index.size() * t.d) throw Error("trajectory json: sum length mismatch");
  return t;
}

}  // namespace rr
