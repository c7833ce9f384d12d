#pragma once
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace rr {

using Vec = std::vector<double>;

// A lazily evaluated series a_0, a_1, ... with values in R^d.
class TermSource {
 public:
  virtual ~TermSource() = default;
  virtual std::size_t dim() const { return 1; }
  // Writes dim() values for term n into out.
  virtual void eval(std::uint64_t n, double* out) const = 0;
  virtual std::string describe() const = 0;

  double scalar(std::uint64_t n) const;
  Vec term(std::uint64_t n) const;
};

using Source = std::shared_ptr<const TermSource>;

// (-1)^n / (n+1)^alpha; alpha = 1 is the alternating harmonic series.
Source alt_power(double alpha);
Source alt_harmonic();
// 1/(n+1)^alpha, all positive.
Source power_magnitudes(double alpha);
Source harmonic();
Source zero_source(std::size_t d = 1);
// Scalar function of the index.
Source function_source(std::string name, std::function<double(std::uint64_t)> f);
// Coordinatewise sum of two sources of the same dimension.
Source sum_source(Source a, Source b);
// Stacks d scalar sources into one R^d source.
Source stack_sources(std::vector<Source> parts);

enum class Tail { none, zero, catalog };

// Finite prefix read from a file; beyond it, the tail rule applies.
class FileSource : public TermSource {
 public:
  FileSource(std::size_t d, std::vector<double> values, Tail tail, Source tail_source = nullptr);
  std::size_t dim() const override { return d_; }
  void eval(std::uint64_t n, double* out) const override;
  std::string describe() const override;
  std::uint64_t length() const { return values_.size() / d_; }

 private:
  std::size_t d_;
  std::vector<double> values_;
  Tail tail_;
  Source tail_source_;
};

// One decimal per line (or d comma-separated decimals per line).
std::shared_ptr<FileSource> load_file_source(const std::string& path, Tail tail = Tail::none,
                                             Source tail_source = nullptr);

}  // namespace rr
