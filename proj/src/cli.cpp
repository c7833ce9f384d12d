#include "rr/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rr/adfamily.hpp"
#include "rr/adversaries.hpp"
#include "rr/classify.hpp"
#include "rr/coding.hpp"
#include "rr/errors.hpp"
#include "rr/rearrangers.hpp"
#include "rr/steinitz.hpp"
#include "rr/stochastic.hpp"
#include "rr/trajectory.hpp"

namespace rr::cli {

namespace {

struct Param {
  const char* name;
  const char* def;  // nullptr: required
  const char* help;
};

struct Command {
  const char* name;
  const char* help;
  bool series;        // takes --series
  bool multi_series;  // several --series stacked
  bool perm;          // takes --perm
  bool multi_perm;
  bool trajectory;  // sampling and classification flags
  std::vector<const char*> default_series;
  std::vector<const char*> default_perms;
  std::vector<Param> params;
};

const std::vector<Command>& commands() {
  static const std::vector<Command> c = {
      {"rearrange", "greedy rearrangement toward a finite target", true, false, true, false, true,
       {"alt-harmonic"}, {}, {{"target", "0", "target sum"}}},
      {"oscillate", "greedy rearrangement swinging between lo and hi", true, false, false, false, true,
       {"alt-harmonic"}, {}, {{"lo", "-1", "lower turning level"}, {"hi", "1", "upper turning level"}}},
      {"to-infinity", "greedy rearrangement diverging to +inf or -inf", true, false, false, false, true,
       {"alt-harmonic"}, {}, {{"sign", "1", "+1 or -1"}}},
      {"shuffle-exp", "two-exponent shuffle experiment", false, false, false, false, false, {}, {},
       {{"alpha", "0.4", "exponent of the series that grows"},
        {"beta", "0.8", "exponent of the series that stays convergent"},
        {"c", "1", "excess coefficient"},
        {"stages", "20000", "negative terms covered"}}},
      {"confine", "reorder a zero-sum vector batch with small prefix sums", false, false, false, false, false,
       {}, {},
       {{"batch", nullptr, "CSV file, one vector per line"},
        {"method", "auto", "auto|brute|greedy"},
        {"threads", "0", "brute-force worker threads (0: hardware)"}}},
      {"steer", "rearrange a vector series toward a target sum", true, true, false, false, true,
       {"alt-power:alpha=1", "alt-power:alpha=0.6"}, {},
       {{"target", nullptr, "target vector, coordinates separated by '/'"},
        {"approach", "1", "fraction of the way early stages aim toward the target"},
        {"reach", "8", "candidate window factor"}}},
      {"pad", "pad a series with zeros against a permutation family", true, false, true, true, true,
       {"alt-harmonic"}, {},
       {{"flips", "10", "random flip permutations used when no --perm is given"},
        {"flip-seed", "1", "seed of the first random flip"},
        {"max-width", "16", "largest interval of the random flips"},
        {"count", "1000", "schedule entries written"}}},
      {"jumble", "count order reversals of a permutation on a set", false, false, true, false, false, {},
       {"flip:set=iterated/2/2"}, {{"set", "iterated/2/2", "set descriptor"}}},
      {"mix", "mix a permutation with the identity and sum the series", true, false, true, false, true,
       {"alt-harmonic"}, {"riemann:target=0"}, {}},
      {"signs-mc", "random-sign series Monte Carlo", true, false, false, false, false, {"power:alpha=1"}, {},
       {{"trials", "500", "number of trials"},
        {"window", "0", "final window for the tail oscillation (0: horizon/10)"},
        {"osc-tol", "0.05", "tail oscillation below this counts as converging"},
        {"blowup", "1.5", "running max above this counts as diverging"},
        {"threads", "0", "worker threads (0: hardware)"}}},
      {"bp", "rearranged random-sign harmonic series", false, false, true, false, true, {}, {"identity"}, {}},
      {"adfam", "almost-disjoint family from rational approximations", false, false, false, false, false, {},
       {},
       {{"reals", "sqrt2/sqrt3", "reals separated by '/'; sqrtN is accepted"},
        {"depth", "1000", "rationals per set"}}},
      {"pair-div", "sum of two signed block series", false, false, false, false, true, {}, {},
       {{"x", "none", "block set: none|odd|even|list:items=I/J/..|ad:r=REAL"},
        {"y", "none", "block set, as --x"},
        {"depth", "1000", "depth for ad: block sets"},
        {"bound", "5", "level the pair sum must exceed"},
        {"max-shared", "64", "refuse beyond this many shared blocks"}}},
      {"encode-perm", "back-and-forth code of a permutation", false, false, true, false, false, {}, {},
       {{"k", "64", "code length"}}},
  };
  return c;
}

const Command& command(const std::string& name) {
  for (auto& c : commands())
    if (name == c.name) return c;
  throw UsageError("unknown subcommand '" + name + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_real(const std::string& s, const std::string& what) {
  std::string t = s;
  bool neg = false;
  if (!t.empty() && t[0] == '-' && t.rfind("-sqrt", 0) == 0) {
    neg = true;
    t = t.substr(1);
  }
  if (t.rfind("sqrt", 0) == 0) {
    double v = to_real(t.substr(4), what);
    if (v < 0) throw UsageError(what + ": bad value '" + s + "'");
    return neg ? -std::sqrt(v) : std::sqrt(v);
  }
  try {
    std::size_t used = 0;
    double v = std::stod(t, &used);
    if (used != t.size() || !std::isfinite(v)) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw UsageError(what + ": not a number: '" + s + "'");
  }
}

std::uint64_t to_count(const std::string& s, const std::string& what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw UsageError(what + ": not a nonnegative integer: '" + s + "'");
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw UsageError(what + ": out of range: '" + s + "'");
  }
}

const std::string& arg(const Descriptor& d, const std::string& key) {
  auto it = d.args.find(key);
  if (it == d.args.end()) throw UsageError("descriptor '" + d.kind + "' needs " + key + "=");
  return it->second;
}

void only_keys(const Descriptor& d, std::initializer_list<const char*> keys) {
  for (auto& [k, v] : d.args)
    if (std::none_of(keys.begin(), keys.end(), [&](const char* x) { return k == x; }))
      throw UsageError("descriptor '" + d.kind + "': unknown key '" + k + "'");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt_vec(const Vec& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "/" : "") + fmt(v[i]);
  return s;
}

BlockSet make_block_set(const std::string& desc, std::uint64_t depth) {
  auto d = parse_descriptor(desc);
  if (d.kind == "none") return [](std::uint64_t) { return false; };
  if (d.kind == "odd") return [](std::uint64_t i) { return i % 2 == 1; };
  if (d.kind == "even") return [](std::uint64_t i) { return i % 2 == 0; };
  if (d.kind == "list") {
    std::set<std::uint64_t> m;
    for (auto& t : split(arg(d, "items"), '/')) m.insert(to_count(t, "list item"));
    return block_set(std::move(m));
  }
  if (d.kind == "ad") {
    auto fam = rational_ad_family({to_real(arg(d, "r"), "ad:r")}, depth, {arg(d, "r")});
    return block_set(fam[0]);
  }
  throw UsageError("unknown block set '" + d.kind + "'");
}

}  // namespace

Descriptor parse_descriptor(const std::string& text) {
  Descriptor d;
  auto colon = text.find(':');
  d.kind = text.substr(0, colon);
  if (d.kind.empty()) throw UsageError("empty descriptor kind in '" + text + "'");
  if (colon == std::string::npos) return d;
  for (auto& kv : split(text.substr(colon + 1), ',')) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("descriptor '" + text + "': expected key=val, got '" + kv + "'");
    if (!d.args.emplace(kv.substr(0, eq), kv.substr(eq + 1)).second)
      throw UsageError("descriptor '" + text + "': repeated key '" + kv.substr(0, eq) + "'");
  }
  return d;
}

Source make_source(const std::string& desc) {
  auto d = parse_descriptor(desc);
  if (d.kind == "alt-harmonic") {
    only_keys(d, {});
    return alt_harmonic();
  }
  if (d.kind == "alt-power") {
    only_keys(d, {"alpha"});
    return alt_power(to_real(arg(d, "alpha"), "alt-power:alpha"));
  }
  if (d.kind == "harmonic") {
    only_keys(d, {});
    return harmonic();
  }
  if (d.kind == "power") {
    only_keys(d, {"alpha"});
    return power_magnitudes(to_real(arg(d, "alpha"), "power:alpha"));
  }
  if (d.kind == "zero") {
    only_keys(d, {"d"});
    return zero_source(d.args.count("d") ? to_count(d.args["d"], "zero:d") : 1);
  }
  if (d.kind == "signs") {
    only_keys(d, {"alpha", "seed"});
    return random_signs(power_magnitudes(to_real(arg(d, "alpha"), "signs:alpha")),
                        to_count(arg(d, "seed"), "signs:seed"));
  }
  if (d.kind == "file") {
    only_keys(d, {"path", "tail"});
    Tail tail = Tail::none;
    if (d.args.count("tail")) {
      if (d.args["tail"] == "zero")
        tail = Tail::zero;
      else if (d.args["tail"] != "none")
        throw UsageError("file:tail must be none or zero");
    }
    return load_file_source(arg(d, "path"), tail);
  }
  throw UsageError("unknown series '" + d.kind + "'");
}

Source make_series(const std::vector<std::string>& descs) {
  if (descs.empty()) throw UsageError("no series given");
  if (descs.size() == 1) return make_source(descs[0]);
  std::vector<Source> parts;
  for (auto& s : descs) parts.push_back(make_source(s));
  return stack_sources(parts);
}

Set make_set(const std::string& desc) {
  auto parts = split(desc, '/');
  const std::string& k = parts[0];
  auto want = [&](std::size_t n) {
    if (parts.size() != n) throw UsageError("set '" + desc + "' expects " + std::to_string(n - 1) + " parameters");
  };
  if (k == "naturals") return want(1), naturals();
  if (k == "evens") return want(1), evens();
  if (k == "odds") return want(1), odds();
  if (k == "arith") {
    want(3);
    return arithmetic(to_count(parts[1], "arith start"), to_count(parts[2], "arith step"));
  }
  if (k == "excess") {
    want(3);
    return excess_schedule_set(to_real(parts[1], "excess beta"), to_real(parts[2], "excess c"));
  }
  if (k == "iterated") {
    want(3);
    std::uint64_t a = to_count(parts[1], "iterated a"), b = to_count(parts[2], "iterated b");
    if (a < 1 || (a == 1 && b == 0)) throw UsageError("iterated set needs g(n) = a n + b > n");
    return iterated([a, b](std::uint64_t n) { return a * n + b; }, std::to_string(a) + "n+" + std::to_string(b));
  }
  throw UsageError("unknown set '" + desc + "'");
}

Perm make_perm(const std::string& desc, const Source& series) {
  auto d = parse_descriptor(desc);
  auto need_series = [&] {
    if (!series) throw UsageError("permutation '" + d.kind + "' needs a series");
    return series;
  };
  if (d.kind == "identity") {
    only_keys(d, {});
    return identity();
  }
  if (d.kind == "table") {
    only_keys(d, {"values"});
    std::vector<std::uint64_t> v;
    for (auto& t : split(arg(d, "values"), '/')) v.push_back(to_count(t, "table value"));
    return finite_table(v);
  }
  if (d.kind == "riemann") {
    only_keys(d, {"target"});
    return riemann_to_target(need_series(), to_real(arg(d, "target"), "riemann:target"));
  }
  if (d.kind == "infinity") {
    only_keys(d, {"sign"});
    double s = to_real(arg(d, "sign"), "infinity:sign");
    if (s != 1 && s != -1) throw UsageError("infinity:sign must be 1 or -1");
    return riemann_to_infinity(need_series(), static_cast<int>(s));
  }
  if (d.kind == "oscillate") {
    only_keys(d, {"lo", "hi"});
    return riemann_oscillate(need_series(), to_real(arg(d, "lo"), "oscillate:lo"),
                             to_real(arg(d, "hi"), "oscillate:hi"));
  }
  if (d.kind == "flip") {
    only_keys(d, {"width", "seed", "max", "cuts", "tail", "set"});
    if (d.args.count("width")) return flip_permutation(uniform_partition(to_count(d.args["width"], "flip:width")));
    if (d.args.count("seed"))
      return flip_permutation(random_partition(to_count(d.args["seed"], "flip:seed"), to_count(arg(d, "max"), "flip:max")));
    if (d.args.count("cuts")) {
      std::vector<std::uint64_t> cuts;
      for (auto& t : split(d.args["cuts"], '/')) cuts.push_back(to_count(t, "flip:cuts"));
      return flip_permutation(partition_from_cuts(cuts, d.args.count("tail") ? to_count(d.args["tail"], "flip:tail") : 1));
    }
    if (d.args.count("set")) return flip_permutation(triple_blocks(make_set(d.args["set"])));
    throw UsageError("flip needs width=, seed=/max=, cuts= or set=");
  }
  if (d.kind == "shuffle") {
    only_keys(d, {"a", "b"});
    return shuffle(make_set(arg(d, "a")), make_set(arg(d, "b")));
  }
  if (d.kind == "mix") {
    only_keys(d, {"of"});
    std::string inner = arg(d, "of");
    std::replace(inner.begin(), inner.end(), ';', ',');
    return mix(make_perm(inner, series));
  }
  throw UsageError("unknown permutation '" + d.kind + "'");
}

std::string grammar_help() {
  return "Descriptors: kind[:key=val,...]; lists use '/'.\n"
         "  series: alt-harmonic | alt-power:alpha=A | harmonic | power:alpha=A | zero[:d=D]\n"
         "          | signs:alpha=A,seed=S | file:path=P[,tail=none|zero]\n"
         "  sets:   naturals | evens | odds | arith/START/STEP | excess/BETA/C | iterated/A/B\n"
         "  perms:  identity | table:values=V0/V1/.. | riemann:target=T | infinity:sign=S\n"
         "          | oscillate:lo=L,hi=H | flip:width=W | flip:seed=S,max=M\n"
         "          | flip:cuts=C0/C1/..[,tail=W] | flip:set=SET | shuffle:a=SET,b=SET\n"
         "          | mix:of=INNER (INNER with ';' in place of ',')\n"
         "Output goes to --out, or $RR_OUT_DIR/<command>.<format>.\n"
         "Exit status: 0 success, 1 runtime failure, 2 usage error.\n";
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["series"] = series;
  j["perms"] = perms;
  j["horizon"] = horizon;
  j["sampling"] = {{"dense", dense}, {"ratio", ratio}};
  j["tolerances"] = {{"settle", settle}, {"blowup", blowup}, {"gap", gap}, {"window", window}};
  j["seed"] = seed;
  j["out"] = out;
  j["format"] = format;
  j["params"] = params;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    c.command = j.at("command").get<std::string>();
    c.series = j.at("series").get<std::vector<std::string>>();
    c.perms = j.at("perms").get<std::vector<std::string>>();
    c.horizon = j.at("horizon").get<std::uint64_t>();
    c.dense = j.at("sampling").at("dense").get<std::uint64_t>();
    c.ratio = j.at("sampling").at("ratio").get<double>();
    c.settle = j.at("tolerances").at("settle").get<double>();
    c.blowup = j.at("tolerances").at("blowup").get<double>();
    c.gap = j.at("tolerances").at("gap").get<double>();
    c.window = j.at("tolerances").at("window").get<std::uint64_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.out = j.at("out").get<std::string>();
    c.format = j.at("format").get<std::string>();
    c.params = j.at("params").get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  return c;
}

std::string ExperimentConfig::canonical() const { return to_json().dump(); }

void validate(const ExperimentConfig& cfg) {
  const Command& c = command(cfg.command);
  if (cfg.horizon < 1) throw UsageError("--horizon must be at least 1, got " + std::to_string(cfg.horizon));
  if (cfg.format != "csv" && cfg.format != "json") throw UsageError("--format must be csv or json, got '" + cfg.format + "'");
  if (cfg.dense < 1) throw UsageError("--dense must be at least 1");
  if (!(cfg.ratio > 1.0)) throw UsageError("--ratio must exceed 1");
  if (!(cfg.settle > 0) || !(cfg.blowup > 0) || !(cfg.gap > 0) || cfg.window < 2)
    throw UsageError("tolerances must be positive and --window at least 2");
  if (!c.series && !cfg.series.empty()) throw UsageError(cfg.command + " takes no --series");
  if (!c.multi_series && cfg.series.size() > 1) throw UsageError(cfg.command + " takes one --series");
  if (!c.perm && !cfg.perms.empty()) throw UsageError(cfg.command + " takes no --perm");
  if (!c.multi_perm && cfg.perms.size() > 1) throw UsageError(cfg.command + " takes one --perm");
  for (auto& [k, v] : cfg.params)
    if (std::none_of(c.params.begin(), c.params.end(), [&](const Param& p) { return k == p.name; }))
      throw UsageError(cfg.command + ": unknown parameter '" + k + "'");
  for (auto& p : c.params)
    if (!cfg.params.count(p.name)) throw UsageError(cfg.command + ": missing --" + std::string(p.name));
  // descriptors and numeric parameters must parse
  Source s = cfg.series.empty() ? nullptr : make_series(cfg.series);
  (void)s;
  static const std::set<std::string> text = {"batch", "method", "target", "reals", "x", "y", "set"};
  for (auto& [k, v] : cfg.params) {
    if (text.count(k)) continue;
    if (k == "alpha" || k == "beta" || k == "c" || k == "approach" || k == "reach" || k == "lo" || k == "hi" ||
        k == "osc-tol" || k == "blowup" || k == "bound" || k == "sign")
      to_real(v, "--" + k);
    else
      to_count(v, "--" + k);
  }
}

namespace {

ExperimentConfig parse_impl(int argc, const char* const* argv, bool& help, std::string& help_text) {
  ExperimentConfig cfg;
  CLI::App app{"Rearrangement experiments on conditionally convergent series.", "rrx"};
  app.footer(grammar_help());
  std::string config_path;
  app.add_option("--config", config_path, "run a saved configuration (JSON)");
  app.require_subcommand(0, 1);
  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::string> save_paths;
  for (auto& c : commands()) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->footer(grammar_help());
    auto& vals = values[c.name];
    sub->add_option("--horizon", cfg.horizon, "number of terms")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    sub->add_option("--out", cfg.out, "output file");
    sub->add_option("--format", cfg.format, "csv or json")->capture_default_str();
    sub->add_option("--save-config", save_paths[c.name], "also write the canonical config here");
    if (c.series) sub->add_option("--series", cfg.series, c.multi_series ? "series descriptor (repeatable)" : "series descriptor");
    if (c.perm) sub->add_option("--perm", cfg.perms, c.multi_perm ? "permutation descriptor (repeatable)" : "permutation descriptor");
    if (c.trajectory) {
      sub->add_option("--dense", cfg.dense, "record every prefix up to this length")->capture_default_str();
      sub->add_option("--ratio", cfg.ratio, "geometric sampling ratio beyond")->capture_default_str();
      sub->add_option("--settle", cfg.settle, "relative settling tolerance")->capture_default_str();
      sub->add_option("--diverge-level", cfg.blowup, "divergence level")->capture_default_str();
      sub->add_option("--gap", cfg.gap, "oscillation gap")->capture_default_str();
      sub->add_option("--window", cfg.window, "samples inspected by the classifier")->capture_default_str();
    }
    for (auto& p : c.params) {
      auto* o = sub->add_option(std::string("--") + p.name, vals[p.name], p.help);
      if (p.def) {
        vals[p.name] = p.def;
        o->default_str(p.def);
      } else {
        o->required();
      }
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    help = true;
    auto subs = app.get_subcommands();
    help_text = subs.empty() ? app.help() : subs.back()->help();
    return cfg;
  } catch (const CLI::CallForAllHelp&) {
    help = true;
    help_text = app.help("", CLI::AppFormatMode::All);
    return cfg;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  auto subs = app.get_subcommands();
  if (!config_path.empty()) {
    if (!subs.empty()) throw UsageError("--config cannot be combined with a subcommand");
    std::ifstream in(config_path);
    if (!in) throw UsageError("cannot read config " + config_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("config " + config_path + ": " + e.what());
    }
    ExperimentConfig loaded = ExperimentConfig::from_json(j);
    validate(loaded);
    return loaded;
  }
  if (subs.empty()) throw UsageError("a subcommand is required (try --help)");
  const Command& c = command(subs[0]->get_name());
  cfg.command = c.name;
  cfg.params = values[c.name];
  if (cfg.series.empty())
    for (auto s : c.default_series) cfg.series.emplace_back(s);
  if (cfg.perms.empty())
    for (auto s : c.default_perms) cfg.perms.emplace_back(s);
  if (c.perm && !c.multi_perm && cfg.perms.empty() && cfg.command != "rearrange")
    throw UsageError(cfg.command + " needs --perm");
  validate(cfg);
  if (!save_paths[c.name].empty()) write_atomic(save_paths[c.name], cfg.to_json().dump(2) + "\n");
  return cfg;
}

std::string ext_path(const ExperimentConfig& cfg) {
  const char* dir = std::getenv("RR_OUT_DIR");
  std::filesystem::path p = dir && *dir ? dir : ".";
  return (p / (cfg.command + "." + cfg.format)).string();
}

Sampling sampling_of(const ExperimentConfig& cfg) {
  Sampling s;
  s.dense = cfg.dense;
  s.ratio = cfg.ratio;
  return s;
}

Tolerances tolerances_of(const ExperimentConfig& cfg) {
  Tolerances t;
  t.settle = cfg.settle;
  t.blowup = cfg.blowup;
  t.gap = cfg.gap;
  t.window = cfg.window;
  return t;
}

std::string traj_text(const ExperimentConfig& cfg, const Trajectory& t) {
  return cfg.format == "csv" ? trajectory_csv(t) : trajectory_json(t) + "\n";
}

double real_param(const ExperimentConfig& cfg, const std::string& k) { return to_real(cfg.params.at(k), "--" + k); }
std::uint64_t count_param(const ExperimentConfig& cfg, const std::string& k) {
  return to_count(cfg.params.at(k), "--" + k);
}

RunResult trajectory_result(const ExperimentConfig& cfg, const Trajectory& t, std::string& text) {
  RunResult r;
  r.horizon = t.horizon;
  std::string verdicts;
  for (std::size_t c = 0; c < t.d; ++c) verdicts += (c ? "/" : "") + classify(t, tolerances_of(cfg), c).name();
  r.verdict = verdicts;
  r.final_value = fmt_vec(t.final_vec());
  text = traj_text(cfg, t);
  return r;
}

}  // namespace

ExperimentConfig parse(int argc, const char* const* argv) {
  bool help = false;
  std::string text;
  auto cfg = parse_impl(argc, argv, help, text);
  if (help) throw UsageError("help requested");
  return cfg;
}

std::string output_path(const ExperimentConfig& cfg) { return cfg.out.empty() ? ext_path(cfg) : cfg.out; }

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
    if (!o) throw Error("cannot write " + tmp.string());
    o << content;
    o.flush();
    if (!o) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot move output into place at " + path);
  }
}

RunResult run(const ExperimentConfig& cfg) {
  validate(cfg);
  const std::string& cmd = cfg.command;
  Source series = cfg.series.empty() ? nullptr : make_series(cfg.series);
  std::string text;
  RunResult r;
  const bool json = cfg.format == "json";

  if (cmd == "rearrange" || cmd == "oscillate" || cmd == "to-infinity" || cmd == "bp") {
    Perm p;
    if (cmd == "rearrange")
      p = cfg.perms.empty() ? riemann_to_target(series, real_param(cfg, "target")) : make_perm(cfg.perms[0], series);
    else if (cmd == "oscillate")
      p = riemann_oscillate(series, real_param(cfg, "lo"), real_param(cfg, "hi"));
    else if (cmd == "to-infinity") {
      double s = real_param(cfg, "sign");
      if (s != 1 && s != -1) throw UsageError("--sign must be 1 or -1");
      p = riemann_to_infinity(series, static_cast<int>(s));
    } else {
      p = make_perm(cfg.perms[0], nullptr);
    }
    Trajectory t = cmd == "bp" ? bp_experiment(*p, cfg.seed, cfg.horizon, sampling_of(cfg))
                               : partial_sums(*series, *p, cfg.horizon, sampling_of(cfg));
    r = trajectory_result(cfg, t, text);
  } else if (cmd == "steer") {
    Vec target;
    for (auto& t : split(cfg.params.at("target"), '/')) target.push_back(to_real(t, "--target"));
    if (target.size() != series->dim())
      throw UsageError("--target has " + std::to_string(target.size()) + " coordinates, series has " +
                       std::to_string(series->dim()));
    SteerOptions o;
    o.approach = real_param(cfg, "approach");
    o.reach = real_param(cfg, "reach");
    o.seed = cfg.seed;
    auto p = levy_steinitz_rearrange(series, target, cfg.horizon, o);
    Trajectory t = partial_sums(*series, *p, cfg.horizon, sampling_of(cfg));
    r = trajectory_result(cfg, t, text);
    Vec f = t.final_vec();
    double e = 0;
    for (std::size_t i = 0; i < f.size(); ++i) e += (f[i] - target[i]) * (f[i] - target[i]);
    r.extra["error"] = fmt(std::sqrt(e));
  } else if (cmd == "mix") {
    Perm inner = make_perm(cfg.perms[0], series);
    auto g = mix(inner);
    auto cps = g->checkpoints_through(cfg.horizon);
    Sampling s = sampling_of(cfg);
    std::uint64_t bad = 0, used = 0;
    for (auto& c : cps) {
      if (c.m > cfg.horizon) continue;
      s.extra.push_back(c.m);
      ++used;
      auto gv = g->prefix(c.m);
      std::sort(gv.begin(), gv.end());
      std::vector<std::uint64_t> want;
      if (c.follows_p) {
        want = inner->prefix(c.m);
        std::sort(want.begin(), want.end());
      } else {
        for (std::uint64_t v = 0; v < c.m; ++v) want.push_back(v);
      }
      bad += gv != want;
    }
    Trajectory t = partial_sums(*series, *g, cfg.horizon, s);
    r = trajectory_result(cfg, t, text);
    r.extra["checkpoints"] = std::to_string(used);
    r.extra["checkpoint_failures"] = std::to_string(bad);
  } else if (cmd == "shuffle-exp") {
    auto rep = two_exponent_experiment(real_param(cfg, "alpha"), real_param(cfg, "beta"), real_param(cfg, "c"),
                                       count_param(cfg, "stages"));
    if (json) {
      nlohmann::json j;
      j["alpha"] = rep.alpha;
      j["beta"] = rep.beta;
      j["c"] = rep.c;
      j["stages"] = rep.stages;
      j["terms"] = rep.terms;
      j["max_alpha"] = rep.max_alpha;
      j["spread_beta"] = rep.spread_beta;
      j["growth_exponent"] = rep.growth_exponent;
      j["expected_exponent"] = rep.expected_exponent;
      j["shift_beta"] = rep.shift_beta;
      j["traj_alpha"] = nlohmann::json::parse(trajectory_json(rep.traj_alpha));
      j["traj_beta"] = nlohmann::json::parse(trajectory_json(rep.traj_beta));
      text = j.dump(2) + "\n";
    } else {
      text = trajectory_csv(rep.traj_alpha);
    }
    r.verdict = classify(rep.traj_alpha, tolerances_of(cfg)).name();
    r.final_value = fmt(rep.traj_alpha.final_value());
    r.horizon = rep.terms;
    r.extra["max_alpha"] = fmt(rep.max_alpha);
    r.extra["spread_beta"] = fmt(rep.spread_beta);
  } else if (cmd == "confine") {
    auto batch = load_batch(cfg.params.at("batch"));
    const std::string& m = cfg.params.at("method");
    if (m != "auto" && m != "brute" && m != "greedy") throw UsageError("--method must be auto, brute or greedy");
    bool brute = m == "brute" || (m == "auto" && batch.v.size() <= kBruteForceLimit);
    auto res = brute ? confine_bruteforce(batch, static_cast<unsigned>(count_param(cfg, "threads")))
                     : confine_greedy(batch);
    if (json) {
      nlohmann::json j;
      j["method"] = brute ? "brute" : "greedy";
      j["ordering"] = res.ordering;
      j["achieved"] = res.achieved;
      j["reference"] = res.reference;
      j["rho"] = res.rho;
      j["b_norm"] = res.b_norm;
      text = j.dump(2) + "\n";
    } else {
      std::ostringstream os;
      os << "position,index\n";
      for (std::size_t i = 0; i < res.ordering.size(); ++i) os << i << ',' << res.ordering[i] << '\n';
      text = os.str();
    }
    r.verdict = res.achieved <= res.reference ? "within-reference" : "above-reference";
    r.final_value = fmt(res.achieved);
    r.horizon = batch.v.size();
    r.extra["method"] = brute ? "brute" : "greedy";
  } else if (cmd == "pad") {
    std::vector<Perm> fam;
    for (auto& d : cfg.perms) fam.push_back(make_perm(d, series));
    if (fam.empty())
      for (std::uint64_t m = 0; m < count_param(cfg, "flips"); ++m)
        fam.push_back(flip_permutation(random_partition(count_param(cfg, "flip-seed") + m, count_param(cfg, "max-width"))));
    auto pad = pad_against(fam, series);
    auto ti = partial_sums(*pad.source, *identity(), cfg.horizon, sampling_of(cfg));
    double worst = 0.0;
    nlohmann::json finals = nlohmann::json::array();
    for (auto& p : fam) {
      auto tp = partial_sums(*pad.source, *p, cfg.horizon, sampling_of(cfg));
      worst = std::max(worst, std::abs(tp.final_value() - ti.final_value()));
      finals.push_back({{"perm", p->describe()}, {"final", tp.final_value()}});
    }
    std::uint64_t count = count_param(cfg, "count");
    if (json) {
      nlohmann::json j;
      std::vector<std::uint64_t> l;
      for (std::uint64_t k = 0; k < count; ++k) l.push_back(pad.schedule->nth(k));
      j["schedule"] = l;
      j["identity_final"] = ti.final_value();
      j["perm_finals"] = finals;
      j["max_difference"] = worst;
      text = j.dump(2) + "\n";
    } else {
      text = pad.schedule->csv(count);
    }
    r.verdict = classify(ti, tolerances_of(cfg)).name();
    r.final_value = fmt(ti.final_value());
    r.horizon = cfg.horizon;
    r.extra["max_difference"] = fmt(worst);
  } else if (cmd == "jumble") {
    auto set = make_set(cfg.params.at("set"));
    auto p = make_perm(cfg.perms[0], nullptr);
    auto rep = jumble_test(*p, *set, cfg.horizon);
    if (json) {
      text = rep.json() + "\n";
    } else {
      std::ostringstream os;
      os << "n,reversals\n";
      for (auto& c : rep.checkpoints) os << c.n << ',' << c.reversals << '\n';
      text = os.str();
    }
    r.verdict = rep.verdict();
    r.final_value = std::to_string(rep.reversals);
    r.horizon = cfg.horizon;
  } else if (cmd == "signs-mc") {
    std::uint64_t window = count_param(cfg, "window");
    if (window == 0) window = std::max<std::uint64_t>(1, cfg.horizon / 10);
    std::uint64_t trials = count_param(cfg, "trials");
    if (trials < 1) throw UsageError("--trials must be at least 1");
    auto rep = rademacher_mc(series, trials, cfg.horizon, window, real_param(cfg, "osc-tol"),
                             real_param(cfg, "blowup"), cfg.seed, static_cast<unsigned>(count_param(cfg, "threads")));
    text = json ? rep.json() + "\n" : rep.csv();
    r.verdict = rep.convergence_fraction >= 0.95   ? "converges-to"
                : rep.divergence_fraction >= 0.95 ? "diverges"
                                                  : "undetermined";
    r.final_value = fmt(rep.convergence_fraction);
    r.horizon = cfg.horizon;
    r.extra["convergence-proxy"] = fmt(rep.convergence_fraction);
    r.extra["divergence-proxy"] = fmt(rep.divergence_fraction);
  } else if (cmd == "adfam") {
    std::vector<double> reals;
    auto names = split(cfg.params.at("reals"), '/');
    for (auto& t : names) reals.push_back(to_real(t, "--reals"));
    std::vector<AdSet> fam;
    try {
      fam = rational_ad_family(reals, count_param(cfg, "depth"), names);
    } catch (const PreconditionError& e) {
      throw UsageError(e.what());
    }
    std::uint64_t worst = 0;
    nlohmann::json pairs = nlohmann::json::array();
    for (std::size_t i = 0; i < fam.size(); ++i)
      for (std::size_t j = i + 1; j < fam.size(); ++j) {
        auto n = intersection_size(fam[i], fam[j]);
        worst = std::max(worst, n);
        pairs.push_back({{"a", fam[i].name}, {"b", fam[j].name}, {"intersection", n}});
      }
    if (json) {
      nlohmann::json j;
      j["depth"] = count_param(cfg, "depth");
      j["intersections"] = pairs;
      auto& sets = j["sets"] = nlohmann::json::array();
      for (auto& s : fam) {
        nlohmann::json e;
        e["name"] = s.name;
        e["r"] = s.r;
        e["elements"] = s.elements;
        sets.push_back(e);
      }
      text = j.dump(2) + "\n";
    } else {
      std::ostringstream os;
      os << "set,element,p,q\n";
      for (auto& s : fam) {
        std::istringstream rows(s.csv());
        std::string line;
        std::getline(rows, line);
        while (std::getline(rows, line)) os << s.name << ',' << line << '\n';
      }
      text = os.str();
    }
    r.verdict = "constructed";
    r.final_value = std::to_string(worst);
    r.horizon = count_param(cfg, "depth");
    r.extra["max_intersection"] = std::to_string(worst);
  } else if (cmd == "pair-div") {
    std::uint64_t depth = count_param(cfg, "depth");
    auto x = make_block_set(cfg.params.at("x"), depth), y = make_block_set(cfg.params.at("y"), depth);
    auto rep = pair_divergence_check(x, y, cfg.horizon, real_param(cfg, "bound"), count_param(cfg, "max-shared"));
    if (json) {
      nlohmann::json j;
      j["negative_total"] = rep.negative_total;
      j["shared_blocks"] = rep.shared_blocks;
      j["positive_blocks"] = rep.positive_blocks;
      j["block_contribution"] = rep.block_contribution;
      j["final"] = rep.final_value;
      j["bound"] = rep.bound;
      j["exceeds"] = rep.exceeds;
      j["first_exceed"] = rep.first_exceed;
      j["trajectory"] = nlohmann::json::parse(trajectory_json(rep.trajectory));
      text = j.dump(2) + "\n";
    } else {
      text = trajectory_csv(rep.trajectory);
    }
    r.verdict = rep.exceeds ? "exceeds-bound" : "below-bound";
    r.final_value = fmt(rep.final_value);
    r.horizon = cfg.horizon;
    r.extra["first_exceed"] = std::to_string(rep.first_exceed);
  } else if (cmd == "encode-perm") {
    auto p = make_perm(cfg.perms[0], nullptr);
    auto code = encode_permutation(*p, count_param(cfg, "k"));
    if (json) {
      text = nlohmann::json(code).dump() + "\n";
    } else {
      std::ostringstream os;
      os << "k,code\n";
      for (std::size_t i = 0; i < code.size(); ++i) os << i << ',' << code[i] << '\n';
      text = os.str();
    }
    bool zero = std::all_of(code.begin(), code.end(), [](std::uint64_t c) { return c == 0; });
    r.verdict = zero ? "identity-code" : "encoded";
    r.final_value = std::to_string(code.size());
    r.horizon = code.size();
  } else {
    throw UsageError("unknown subcommand '" + cmd + "'");
  }
  r.output_path = output_path(cfg);
  write_atomic(r.output_path, text);
  return r;
}

std::string summary_line(const RunResult& r) {
  std::string s = "verdict=" + r.verdict + " final=" + r.final_value + " horizon=" + std::to_string(r.horizon);
  for (auto& [k, v] : r.extra) s += " " + k + "=" + v;
  return s;
}

int main(int argc, const char* const* argv) {
  ExperimentConfig cfg;
  try {
    bool help = false;
    std::string text;
    cfg = parse_impl(argc, argv, help, text);
    if (help) {
      std::cout << text;
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "config: " << cfg.canonical() << "\n";
  try {
    auto r = run(cfg);
    std::cout << summary_line(r) << "\n";
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace rr::cli
