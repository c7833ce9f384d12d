#pragma once
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rr/permutation.hpp"
#include "rr/sets.hpp"
#include "rr/terms.hpp"

namespace rr::cli {

// Bad invocation: exit status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string command;
  std::vector<std::string> series;  // source descriptors; several are stacked into R^d
  std::vector<std::string> perms;   // permutation descriptors
  std::uint64_t horizon = 100000;
  std::uint64_t dense = 100;  // sampling
  double ratio = 1.1;
  double settle = 1e-3;  // classification
  double blowup = 10.0;
  double gap = 0.1;
  std::uint64_t window = 20;
  std::uint64_t seed = 1;
  std::string out;  // empty: $RR_OUT_DIR (or .) / <command>.<format>
  std::string format = "csv";
  std::map<std::string, std::string> params;  // subcommand options, as given

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  std::string canonical() const;  // one-line JSON
  bool operator==(const ExperimentConfig&) const = default;
};

// Descriptor grammar: kind[:key=val,key=val,...]; list values use '/'.
struct Descriptor {
  std::string kind;
  std::map<std::string, std::string> args;
};
Descriptor parse_descriptor(const std::string& text);

// alt-harmonic | alt-power:alpha=A | harmonic | power:alpha=A | zero[:d=D]
// | signs:alpha=A,seed=S | file:path=P[,tail=none|zero]
Source make_source(const std::string& desc);
Source make_series(const std::vector<std::string>& descs);
// naturals | evens | odds | arith/START/STEP | excess/BETA/C | iterated/A/B (g(n) = A n + B)
Set make_set(const std::string& desc);
// identity | table:values=V0/V1/... | riemann:target=T | infinity:sign=S
// | oscillate:lo=L,hi=H | flip:width=W | flip:seed=S,max=M | flip:cuts=C0/C1/...[,tail=W]
// | flip:set=SET (triple blocks of SET) | shuffle:a=SET,b=SET | mix:of=INNER
// (INNER is a descriptor with ';' for ',', e.g. mix:of=oscillate:lo=0;hi=1)
Perm make_perm(const std::string& desc, const Source& series);

std::string grammar_help();

// Parses argv into a validated config. Throws UsageError.
ExperimentConfig parse(int argc, const char* const* argv);
void validate(const ExperimentConfig& cfg);

struct RunResult {
  std::string verdict;
  std::string final_value;
  std::uint64_t horizon = 0;
  std::map<std::string, std::string> extra;  // appended to the summary line
  std::string output_path;
};

// Executes the config and writes its output file. Throws rr::Error on failure.
RunResult run(const ExperimentConfig& cfg);
std::string summary_line(const RunResult& r);
std::string output_path(const ExperimentConfig& cfg);

// Writes through a temporary file renamed into place; nothing is left behind on failure.
void write_atomic(const std::string& path, const std::string& content);

// Entry point: 0 success, 1 runtime failure, 2 usage error.
int main(int argc, const char* const* argv);

}  // namespace rr::cli
