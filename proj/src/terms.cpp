#include "rr/terms.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rr/errors.hpp"

namespace rr {

double TermSource::scalar(std::uint64_t n) const {
  if (dim() == 1) {
    double v;
    eval(n, &v);
    return v;
  }
  Vec v(dim());
  eval(n, v.data());
  return v[0];
}

Vec TermSource::term(std::uint64_t n) const {
  Vec v(dim());
  eval(n, v.data());
  return v;
}

namespace {

double inv_power(std::uint64_t n, double alpha) {
  double x = static_cast<double>(n) + 1.0;
  if (alpha == 1.0) return 1.0 / x;
  if (alpha == 0.5) return 1.0 / std::sqrt(x);
  return std::pow(x, -alpha);
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

class AltPower : public TermSource {
 public:
  explicit AltPower(double a) : alpha_(a) {}
  void eval(std::uint64_t n, double* out) const override {
    double m = inv_power(n, alpha_);
    *out = (n % 2 == 0) ? m : -m;
  }
  std::string describe() const override {
    return alpha_ == 1.0 ? "alt-harmonic" : "alt-power:alpha=" + num(alpha_);
  }

 private:
  double alpha_;
};

class Magnitudes : public TermSource {
 public:
  explicit Magnitudes(double a) : alpha_(a) {}
  void eval(std::uint64_t n, double* out) const override { *out = inv_power(n, alpha_); }
  std::string describe() const override {
    return alpha_ == 1.0 ? "harmonic" : "power:alpha=" + num(alpha_);
  }

 private:
  double alpha_;
};

class Zero : public TermSource {
 public:
  explicit Zero(std::size_t d) : d_(d) {}
  std::size_t dim() const override { return d_; }
  void eval(std::uint64_t, double* out) const override {
    for (std::size_t i = 0; i < d_; ++i) out[i] = 0.0;
  }
  std::string describe() const override { return "zero"; }

 private:
  std::size_t d_;
};

class FnSource : public TermSource {
 public:
  FnSource(std::string name, std::function<double(std::uint64_t)> f) : name_(std::move(name)), f_(std::move(f)) {}
  void eval(std::uint64_t n, double* out) const override { *out = f_(n); }
  std::string describe() const override { return name_; }

 private:
  std::string name_;
  std::function<double(std::uint64_t)> f_;
};

class SumSource : public TermSource {
 public:
  SumSource(Source a, Source b) : a_(std::move(a)), b_(std::move(b)) {}
  std::size_t dim() const override { return a_->dim(); }
  void eval(std::uint64_t n, double* out) const override {
    std::size_t d = dim();
    Vec tmp(d);
    a_->eval(n, out);
    b_->eval(n, tmp.data());
    for (std::size_t i = 0; i < d; ++i) out[i] += tmp[i];
  }
  std::string describe() const override { return "sum(" + a_->describe() + "," + b_->describe() + ")"; }

 private:
  Source a_, b_;
};

class Stacked : public TermSource {
 public:
  explicit Stacked(std::vector<Source> p) : parts_(std::move(p)) {}
  std::size_t dim() const override { return parts_.size(); }
  void eval(std::uint64_t n, double* out) const override {
    for (std::size_t i = 0; i < parts_.size(); ++i) out[i] = parts_[i]->scalar(n);
  }
  std::string describe() const override {
    std::string s = "stack(";
    for (std::size_t i = 0; i < parts_.size(); ++i) s += (i ? "," : "") + parts_[i]->describe();
    return s + ")";
  }

 private:
  std::vector<Source> parts_;
};

}  // namespace

Source alt_power(double alpha) {
  if (!(alpha > 0.0)) throw PreconditionError("alt-power exponent must be positive");
  return std::make_shared<AltPower>(alpha);
}
Source alt_harmonic() { return alt_power(1.0); }
Source power_magnitudes(double alpha) { return std::make_shared<Magnitudes>(alpha); }
Source harmonic() { return power_magnitudes(1.0); }
Source zero_source(std::size_t d) { return std::make_shared<Zero>(d); }
Source function_source(std::string name, std::function<double(std::uint64_t)> f) {
  return std::make_shared<FnSource>(std::move(name), std::move(f));
}

Source sum_source(Source a, Source b) {
  if (a->dim() != b->dim()) throw PreconditionError("sum_source: dimension mismatch");
  return std::make_shared<SumSource>(std::move(a), std::move(b));
}

Source stack_sources(std::vector<Source> parts) {
  if (parts.empty()) throw PreconditionError("stack_sources: no parts");
  for (auto& p : parts)
    if (p->dim() != 1) throw PreconditionError("stack_sources: parts must be scalar");
  return std::make_shared<Stacked>(std::move(parts));
}

FileSource::FileSource(std::size_t d, std::vector<double> values, Tail tail, Source tail_source)
    : d_(d), values_(std::move(values)), tail_(tail), tail_source_(std::move(tail_source)) {
  if (d_ == 0 || values_.size() % d_ != 0) throw PreconditionError("file source: ragged rows");
  if (tail_ == Tail::catalog && (!tail_source_ || tail_source_->dim() != d_))
    throw PreconditionError("file source: catalog tail needs a source of matching dimension");
}

void FileSource::eval(std::uint64_t n, double* out) const {
  if (n < length()) {
    for (std::size_t i = 0; i < d_; ++i) out[i] = values_[n * d_ + i];
    return;
  }
  switch (tail_) {
    case Tail::zero:
      for (std::size_t i = 0; i < d_; ++i) out[i] = 0.0;
      return;
    case Tail::catalog:
      tail_source_->eval(n, out);
      return;
    case Tail::none:
      break;
  }
  throw MissingTerm(n);
}

std::string FileSource::describe() const {
  std::string t = tail_ == Tail::zero ? "zero" : tail_ == Tail::catalog ? tail_source_->describe() : "none";
  return "file:rows=" + std::to_string(length()) + ",tail=" + t;
}

std::shared_ptr<FileSource> load_file_source(const std::string& path, Tail tail, Source tail_source) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<double> vals;
  std::size_t d = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t cols = 0;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw Error(path + ":" + std::to_string(lineno) + ": not a decimal literal: '" + cell + "'");
      }
      ++cols;
    }
    if (d == 0) d = cols;
    if (cols != d) throw Error(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(d) + " columns");
  }
  if (d == 0) d = tail_source ? tail_source->dim() : 1;
  return std::make_shared<FileSource>(d, std::move(vals), tail, std::move(tail_source));
}

}  // namespace rr
