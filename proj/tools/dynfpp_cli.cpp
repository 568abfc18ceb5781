#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dynfpp/distributions.hpp"
#include "dynfpp/dynamics.hpp"
#include "dynfpp/experiments.hpp"
#include "dynfpp/io.hpp"

using namespace dynfpp;
using Json = nlohmann::ordered_json;

namespace {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// "a..b" integer range, "2^a..2^b" powers of two, or a comma list.
std::vector<int> parse_int_grid(const std::string& text) {
  std::vector<int> out;
  auto dots = text.find("..");
  if (dots != std::string::npos) {
    std::string a = text.substr(0, dots), b = text.substr(dots + 2);
    bool pow2 = a.rfind("2^", 0) == 0 && b.rfind("2^", 0) == 0;
    int lo = std::stoi(pow2 ? a.substr(2) : a), hi = std::stoi(pow2 ? b.substr(2) : b);
    if (lo > hi) std::swap(lo, hi);
    if (pow2 && (lo < 0 || hi > 30)) throw ConfigError("grid exponent out of range: " + text);
    for (int k = lo; k <= hi; ++k) out.push_back(pow2 ? 1 << k : k);
    return out;
  }
  for (auto& part : split(text, ',')) {
    std::size_t used = 0;
    int v = std::stoi(part, &used);
    if (used != part.size()) throw ConfigError("bad integer '" + part + "'");
    out.push_back(v);
  }
  return out;
}

double parse_real(const std::string& s) {
  if (s.rfind("2^", 0) == 0) return std::ldexp(1.0, std::stoi(s.substr(2)));
  return parse_double(s);
}

// "2^a..2^b" gives every power of two between, otherwise a comma list.
std::vector<double> parse_real_grid(const std::string& text) {
  std::vector<double> out;
  auto dots = text.find("..");
  if (dots != std::string::npos) {
    std::string a = text.substr(0, dots), b = text.substr(dots + 2);
    if (a.rfind("2^", 0) != 0 || b.rfind("2^", 0) != 0) throw ConfigError("real ranges must be 2^a..2^b: " + text);
    int lo = std::stoi(a.substr(2)), hi = std::stoi(b.substr(2));
    int step = lo <= hi ? 1 : -1;
    for (int k = lo;; k += step) {
      out.push_back(std::ldexp(1.0, k));
      if (k == hi) break;
    }
    return out;
  }
  for (auto& part : split(text, ',')) out.push_back(parse_real(part));
  return out;
}

std::shared_ptr<const Cdf> parse_dist(const std::string& s) {
  try {
    return std::make_shared<const Cdf>(parse_cdf(s));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("--dist: ") + e.what());
  }
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

Json estimator_json(const EstimatorResult& e) {
  return {{"estimate", e.estimate}, {"stderr", e.std_error}, {"n_samples", e.n_samples}, {"ci95", {e.ci_lo, e.ci_hi}}};
}

struct Output {
  CsvTable table;
  Json summary = Json::object();
  std::string status = "ok";
  std::optional<EstimatorResult> est;
  std::optional<double> value;  // point estimate without a standard error
};

struct Common {
  std::uint64_t seed = 1;
  long samples = 1000;
  int threads = 1;
  std::string out;
  std::string format = "json";
};

struct Command {
  CLI::App* app = nullptr;
  long default_samples = 0;
  std::function<void(const Common&, Output&)> run;
};

// key=value lines, '#' comments; returned as "--key value" arguments.
std::vector<std::string> read_config(const std::string& path, std::string& subcommand) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::vector<std::string> args;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      auto a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    if (key == "subcommand") {
      subcommand = val;
      continue;
    }
    if (key == "config") throw ConfigError(path + ":" + std::to_string(lineno) + ": nested config");
    args.push_back("--" + key);
    args.push_back(val);
  }
  return args;
}

int emit_error(int code, const std::string& kind, const std::string& msg, const std::string& out) {
  Json err{{"status", "error"}, {"error", kind}, {"exit_code", code}, {"message", msg}};
  std::cerr << err.dump() << "\n";
  if (!out.empty()) {
    std::ofstream f(out + ".json");
    f << err.dump(2) << "\n";
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynfpp: dynamical first-passage percolation experiments"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Common common;
  std::string config_path;
  std::map<std::string, Command> commands;

  auto add = [&](const std::string& name, const std::string& help, long default_samples, auto&& setup) {
    Command c;
    c.default_samples = default_samples;
    c.app = app.add_subcommand(name, help);
    c.app->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    c.app->add_option("--seed", common.seed, "root seed")->capture_default_str();
    auto* s = c.app->add_option("--samples", common.samples, "replicas");
    s->default_val(default_samples)->capture_default_str();
    c.app->add_option("--threads", common.threads, "worker threads")->capture_default_str()->check(CLI::Range(1, 256));
    c.app->add_option("--out", common.out, "write <out>.csv and <out>.json");
    c.app->add_option("--format", common.format, "stdout format")->capture_default_str()->check(CLI::IsMember({"csv", "json"}));
    c.app->add_option("--config", config_path, "key=value file; flags win");
    c.run = setup(c.app);
    commands[name] = c;
  };

  // ---- classify
  add("classify", "classify a weight distribution from f0 and a_k", 0, [](CLI::App* a) {
    auto f0 = std::make_shared<double>(0.5);
    auto seq = std::make_shared<std::string>();
    a->add_option("--f0", *f0, "F(0)")->capture_default_str();
    a->add_option("--ak", *seq, "a_k sequence spec")->required();
    return [=](const Common&, Output& o) {
      AkSequence s;
      try {
        s = AkSequence::parse(*seq);
        s.validate();
      } catch (const std::exception& e) {
        throw ConfigError(std::string("--ak: ") + e.what());
      }
      require(*f0 >= 0 && *f0 <= 1, "--f0 must lie in [0,1]");
      auto rep = classify_regime(*f0, s);
      o.table.header = {"kind", "tag", "text"};
      Json cs = Json::array(), ns = Json::array();
      for (auto& c : rep.conclusions) {
        o.table.add({std::string("conclusion"), c.tag, c.statement});
        cs.push_back({{"tag", c.tag}, {"statement", c.statement}});
      }
      for (auto& n : rep.notes) {
        o.table.add({std::string("note"), std::string(), n});
        ns.push_back(n);
      }
      o.summary["regime"] = to_string(rep.regime);
      o.summary["sum_ak"] = to_string(rep.sum_ak);
      o.summary["sum_k78_ak"] = to_string(rep.sum_k78_ak);
      o.summary["k_ak"] = to_string(rep.kak);
      o.summary["conclusions"] = cs;
      o.summary["notes"] = ns;
      if (!rep.heuristic_partial_sums.empty()) {
        Json h = Json::array();
        for (auto [k, v] : rep.heuristic_partial_sums) h.push_back({k, v});
        o.summary["heuristic_partial_sums"] = h;
      }
      if (rep.sum_ak == Series::Unknown) o.status = "unresolved";
    };
  });

  // ---- crossing
  add("crossing", "left-right open crossing probability of B(n) or a rectangle", 10000, [](CLI::App* a) {
    auto p = std::make_shared<std::string>("0.5");
    auto n = std::make_shared<int>(32);
    auto rect = std::make_shared<std::string>();
    a->add_option("--p", *p, "p or comma list (coupled)")->capture_default_str();
    a->add_option("--n", *n, "box half-width")->capture_default_str();
    a->add_option("--rect", *rect, "x0,x1,y0,y1 instead of B(n)");
    return [=](const Common& c, Output& o) {
      auto ps = parse_real_grid(*p);
      for (double v : ps) require(v >= 0 && v <= 1, "--p outside [0,1]");
      require(c.samples >= 1, "--samples must be >= 1");
      Rect q = box_rect(*n);
      if (!rect->empty()) {
        auto r = parse_int_grid(*rect);
        require(r.size() == 4 && r[0] <= r[1] && r[2] <= r[3], "--rect needs x0,x1,y0,y1");
        q = {r[0], r[1], r[2], r[3]};
      } else {
        require(*n >= 0, "--n must be >= 0");
      }
      auto ts = crossing_thresholds(q, c.samples, c.seed, c.threads);
      o.table.header = {"p"};
      for (auto& h : estimator_header()) o.table.header.push_back(h);
      for (double v : ps) {
        auto e = crossing_fraction(ts, v);
        std::vector<Cell> row{v};
        for (auto& x : estimator_cells(e)) row.push_back(x);
        o.table.add(row);
        if (ps.size() == 1) o.est = e;
      }
    };
  });

  // ---- corrlen
  add("corrlen", "correlation length L(p, eps0)", 2000, [](CLI::App* a) {
    auto p = std::make_shared<std::string>("0.6");
    auto eps0 = std::make_shared<double>(0.05);
    auto nmax = std::make_shared<int>(256);
    a->add_option("--p", *p, "p or comma list")->capture_default_str();
    a->add_option("--eps0", *eps0)->capture_default_str();
    a->add_option("--n-max", *nmax)->capture_default_str();
    return [=](const Common& c, Output& o) {
      auto ps = parse_real_grid(*p);
      for (double v : ps) require(v > 0 && v < 1 && v != 0.5, "--p must lie in (0,1) and differ from 1/2");
      require(*eps0 > 0 && *eps0 < 0.5, "--eps0 must lie in (0,1/2)");
      require(*nmax >= 1, "--n-max must be >= 1");
      CrossingSampler sampler(c.samples, c.seed, c.threads);
      o.table.header = {"p", "L", "resolved", "evaluations"};
      std::vector<double> lx, ly;
      bool all = true;
      for (double v : ps) {
        auto L = correlation_length(v, *eps0, *nmax, sampler);
        o.table.add({v, L.L, std::string(L.resolved ? "yes" : "no"), long(L.evaluations.size())});
        all = all && L.resolved;
        if (L.resolved) {
          lx.push_back(std::log(std::fabs(v - 0.5)));
          ly.push_back(std::log(double(L.L)));
        }
        if (ps.size() == 1) o.value = double(L.L);
      }
      if (lx.size() >= 2) {
        auto f = ols(lx, ly);
        o.summary["slope"] = f.slope;
        o.summary["slope_stderr"] = f.slope_se;
      }
      if (!all) o.status = "unresolved";
    };
  });

  // ---- pn
  add("pn", "near-inverse p_n of the correlation length", 2000, [](CLI::App* a) {
    auto n = std::make_shared<std::string>("8,16,32,64,128");
    auto eps0 = std::make_shared<double>(0.05);
    a->add_option("--n", *n, "n or grid")->capture_default_str();
    a->add_option("--eps0", *eps0)->capture_default_str();
    return [=](const Common& c, Output& o) {
      auto ns = parse_int_grid(*n);
      for (int v : ns) require(v >= 2, "--n must be >= 2");
      require(*eps0 > 0 && *eps0 < 0.5, "--eps0 must lie in (0,1/2)");
      CrossingSampler sampler(c.samples, c.seed, c.threads);
      o.table.header = {"n", "p_hat", "lo", "hi", "resolved"};
      std::vector<double> lx, ly;
      bool all = true;
      for (int v : ns) {
        auto r = pn_estimate(v, *eps0, sampler);
        o.table.add({long(v), r.p_hat, r.lo, r.hi, std::string(r.resolved ? "yes" : "no")});
        all = all && r.resolved;
        if (r.resolved) {
          lx.push_back(std::log(double(v)));
          ly.push_back(std::log(r.p_hat - 0.5));
        }
        if (ns.size() == 1) o.value = r.p_hat;
      }
      if (lx.size() >= 2) {
        auto f = ols(lx, ly);
        o.summary["slope"] = f.slope;
        o.summary["slope_stderr"] = f.slope_se;
      }
      if (!all) o.status = "unresolved";
    };
  });

  // ---- arm
  add("arm", "arm event probability", 10000, [](CLI::App* a) {
    auto spec = std::make_shared<std::string>("open1");
    auto m = std::make_shared<int>(0);
    auto n = std::make_shared<int>(1);
    auto p = std::make_shared<double>(0.5);
    a->add_option("--spec", *spec, "open1, closed1, poly2, mono2, alt4, mono4, <name>h, or a colour word like ococ")
        ->capture_default_str();
    a->add_option("--m", *m)->capture_default_str();
    a->add_option("--n", *n)->capture_default_str();
    a->add_option("--p", *p)->capture_default_str();
    return [=](const Common& c, Output& o) {
      ArmSpec s;
      try {
        s = ArmSpec::parse(*spec);
        s.validate();
      } catch (const std::exception& e) {
        throw ConfigError(std::string("--spec: ") + e.what());
      }
      require(*m >= 0 && *m < *n, "need 0 <= m < n");
      require(*p >= 0 && *p <= 1, "--p outside [0,1]");
      require(c.samples >= 1, "--samples must be >= 1");
      auto e = arm_probability(s, *m, *n, *p, c.samples, c.seed, c.threads);
      o.table.header = {"spec", "m", "n", "p"};
      for (auto& h : estimator_header()) o.table.header.push_back(h);
      std::vector<Cell> row{*spec, long(*m), long(*n), *p};
      for (auto& x : estimator_cells(e)) row.push_back(x);
      o.table.add(row);
      o.est = e;
    };
  });

  // ---- arm-exponent
  add("arm-exponent", "arm exponent by weighted log-log regression", 2000, [](CLI::App* a) {
    auto spec = std::make_shared<std::string>("open1");
    auto grid = std::make_shared<std::string>("4,8,16,32,64");
    auto m = std::make_shared<int>(0);
    auto p = std::make_shared<double>(0.5);
    auto maxs = std::make_shared<long>(400000);
    auto rel = std::make_shared<double>(0.1);
    a->add_option("--spec", *spec)->capture_default_str();
    a->add_option("--n-grid", *grid)->capture_default_str();
    a->add_option("--m", *m)->capture_default_str();
    a->add_option("--p", *p)->capture_default_str();
    a->add_option("--max-samples", *maxs)->capture_default_str();
    a->add_option("--target-rel", *rel, "target relative stderr")->capture_default_str();
    return [=](const Common& c, Output& o) {
      ArmSpec s;
      try {
        s = ArmSpec::parse(*spec);
        s.validate();
      } catch (const std::exception& e) {
        throw ConfigError(std::string("--spec: ") + e.what());
      }
      auto ns = parse_int_grid(*grid);
      require(ns.size() >= 4, "--n-grid needs at least 4 points");
      for (int v : ns) require(v > *m, "grid points must exceed m");
      require(c.samples >= 1 && *maxs >= c.samples, "need 1 <= samples <= max-samples");
      ArmCurveOptions opt;
      opt.m = *m;
      opt.p = *p;
      opt.samples = c.samples;
      opt.max_samples = *maxs;
      opt.target_rel_se = *rel;
      opt.seed = c.seed;
      opt.threads = c.threads;
      auto curve = arm_exponent(s, ns, opt);
      o.table.header = {"n"};
      for (auto& h : estimator_header()) o.table.header.push_back(h);
      o.table.header.push_back("residual");
      for (std::size_t i = 0; i < curve.n.size(); ++i) {
        std::vector<Cell> row{long(curve.n[i])};
        for (auto& x : estimator_cells(curve.est[i])) row.push_back(x);
        row.push_back(curve.fit.residuals[i]);
        o.table.add(row);
      }
      o.est = EstimatorResult::make(curve.exponent(), curve.fit.slope_se, c.samples);
      o.summary["slope"] = curve.fit.slope;
      o.summary["slope_stderr"] = curve.fit.slope_se;
      o.summary["intercept"] = curve.fit.intercept;
      o.summary["shared_samples"] = curve.shared_samples;
      if (s.monochromatic() && s.colors.size() == 2) o.summary["reference_exponent"] = 17.0 / 48.0;
    };
  });

  // ---- qm
  add("qm", "quasimultiplicativity ratios", 10000, [](CLI::App* a) {
    auto spec = std::make_shared<std::string>("open1");
    auto triples = std::make_shared<std::string>("2,8,32");
    a->add_option("--spec", *spec)->capture_default_str();
    a->add_option("--triples", *triples, "m,r,n;m,r,n;...")->capture_default_str();
    return [=](const Common& c, Output& o) {
      ArmSpec s;
      try {
        s = ArmSpec::parse(*spec);
        s.validate();
      } catch (const std::exception& e) {
        throw ConfigError(std::string("--spec: ") + e.what());
      }
      std::vector<std::array<int, 3>> ts;
      for (auto& t : split(*triples, ';')) {
        auto v = parse_int_grid(t);
        require(v.size() == 3, "each triple needs m,r,n");
        require(v[0] >= 0 && v[0] <= v[1] && v[1] < v[2], "triples need 0 <= m <= r < n");
        ts.push_back({v[0], v[1], v[2]});
      }
      auto rows = quasimultiplicativity_check(s, ts, c.samples, c.seed, c.threads);
      o.table.header = {"m", "r", "n", "pi_mn", "pi_mr", "pi_rn", "ratio", "ratio_stderr"};
      for (auto& r : rows)
        o.table.add({long(r.m), long(r.r), long(r.n), r.mn.estimate, r.mr.estimate, r.rn.estimate, r.ratio, r.ratio_se});
      if (rows.size() == 1) o.est = EstimatorResult::make(rows[0].ratio, rows[0].ratio_se, c.samples);
    };
  });

  // ---- growth
  add("growth", "mean passage time to dB(2^n) against partial sums of a_k", 1000, [](CLI::App* a) {
    auto dist = std::make_shared<std::string>("bernoulli");
    auto grid = std::make_shared<std::string>("4..10");
    a->add_option("--dist", *dist)->capture_default_str();
    a->add_option("--n-grid", *grid, "exponents n (box 2^n)")->capture_default_str();
    return [=](const Common& c, Output& o) {
      auto F = parse_dist(*dist);
      auto ns = parse_int_grid(*grid);
      for (int v : ns) require(v >= 0 && v <= 14, "--n-grid exponents must lie in [0,14]");
      require(c.samples >= 1, "--samples must be >= 1");
      auto rows = growth_curve(*F, ns, c.samples, c.seed, c.threads);
      o.table.header = {"n", "size", "mean_T", "stderr", "partial_sum", "ratio", "increment"};
      double prev = std::nan("");
      for (auto& r : rows) {
        o.table.add({long(r.n), long(1) << r.n, r.T.estimate, r.T.std_error, r.partial_sum, r.ratio, r.T.estimate - prev});
        prev = r.T.estimate;
      }
      o.est = rows.back().T;
    };
  });

  // ---- tail-profile
  add("tail-profile", "tails of the annulus decomposition and rectangle crossing times", 1000, [](CLI::App* a) {
    auto dist = std::make_shared<std::string>("bernoulli");
    auto n = std::make_shared<int>(3);
    auto lam = std::make_shared<std::string>("0,1,2,3,4,5");
    a->add_option("--dist", *dist)->capture_default_str();
    a->add_option("--n", *n)->capture_default_str();
    a->add_option("--lambda", *lam)->capture_default_str();
    return [=](const Common& c, Output& o) {
      auto F = parse_dist(*dist);
      require(*n >= 0 && *n <= 8, "--n must lie in [0,8]");
      auto ls = parse_real_grid(*lam);
      auto t = tail_profile(F, *n, ls, c.samples, c.seed, c.threads);
      o.table.header = {"lambda", "p_annulus", "p_rect"};
      for (std::size_t i = 0; i < ls.size(); ++i) o.table.add({ls[i], t.p_tn[i], t.p_rect[i]});
      o.summary["annulus_mean"] = estimator_json(t.tn_mean);
      o.summary["rect_mean"] = estimator_json(t.rect_mean);
      o.est = t.tn_mean;
    };
  });

  // ---- count-vn
  add("count-vn", "number of contributing vertices in S(n)", 200, [](CLI::App* a) {
    auto n = std::make_shared<int>(2);
    auto p = std::make_shared<double>(0.5);
    auto lhat = std::make_shared<int>(1);
    a->add_option("--n", *n)->capture_default_str();
    a->add_option("--p", *p)->capture_default_str();
    a->add_option("--lhat", *lhat, "estimated correlation length")->capture_default_str();
    return [=](const Common& c, Output& o) {
      require(*n >= 0 && *n <= 8, "--n must lie in [0,8]");
      require(*p >= 0 && *p <= 1, "--p outside [0,1]");
      require(*lhat >= 1, "--lhat must be >= 1");
      auto e = count_vn_estimate(*n, *p, *lhat, c.samples, c.seed, c.threads);
      o.table.header = {"n", "p", "lhat"};
      for (auto& h : estimator_header()) o.table.header.push_back(h);
      std::vector<Cell> row{long(*n), *p, long(*lhat)};
      for (auto& x : estimator_cells(e)) row.push_back(x);
      o.table.add(row);
      o.est = e;
    };
  });

  // ---- dyn-scan
  add("dyn-scan", "trajectory of a dynamical passage time for one replica", 1, [](CLI::App* a) {
    auto dist = std::make_shared<std::string>("bernoulli");
    auto n = std::make_shared<int>(5);
    auto s = std::make_shared<double>(1.0);
    auto x = std::make_shared<double>(0.0);
    auto stat = std::make_shared<std::string>("point");
    a->add_option("--dist", *dist)->capture_default_str();
    a->add_option("--n", *n, "box 2^n")->capture_default_str();
    a->add_option("--s", *s, "horizon")->capture_default_str();
    a->add_option("--x", *x, "threshold")->capture_default_str();
    a->add_option("--stat", *stat, "point (0 to dB(2^n)) or rect (R(n) crossing)")
        ->capture_default_str()
        ->check(CLI::IsMember({"point", "rect"}));
    return [=](const Common& c, Output& o) {
      auto F = parse_dist(*dist);
      require(*n >= 0 && *n <= 10, "--n must lie in [0,10]");
      require(*s > 0, "--s must be positive");
      bool point = *stat == "point";
      Rect box = point ? box_rect(1 << *n) : rect_R(*n);
      check_budget(box.area(), "dyn-scan");
      auto d = generate(Region::rect(box), *s, F, c.seed);
      auto tr = scan_statistic(d, point ? PathStat::point_to_box(1 << *n) : PathStat::rect_crossing(box));
      auto set = exceptional_set(tr, *x);
      o.table.header = {"t_start", "t_end", "value"};
      for (std::size_t i = 0; i < tr.value.size(); ++i) o.table.add({tr.start[i], tr.end_of(i), tr.value[i]});
      o.value = set.measure();
      o.summary["exceptional_measure"] = set.measure();
      o.summary["pieces"] = tr.value.size();
      o.summary["events_seen"] = tr.events_seen;
      o.summary["full_recomputes"] = tr.full_recomputes;
    };
  });

  // ---- dyn-dim
  add("dyn-dim", "covering numbers of the exceptional set and a dimension slope", 1, [](CLI::App* a) {
    auto dist = std::make_shared<std::string>("bernoulli");
    auto n = std::make_shared<int>(5);
    auto s = std::make_shared<double>(1.0);
    auto x = std::make_shared<double>(0.0);
    auto eps = std::make_shared<std::string>("2^-3..2^-9");
    a->add_option("--dist", *dist)->capture_default_str();
    a->add_option("--n", *n, "box 2^n")->capture_default_str();
    a->add_option("--s", *s, "horizon")->capture_default_str();
    a->add_option("--x", *x, "threshold")->capture_default_str();
    a->add_option("--eps", *eps, "eps grid")->capture_default_str();
    return [=](const Common& c, Output& o) {
      auto F = parse_dist(*dist);
      require(*n >= 0 && *n <= 10, "--n must lie in [0,10]");
      require(*s > 0, "--s must be positive");
      auto es = parse_real_grid(*eps);
      require(es.size() >= 3, "--eps needs at least 3 values");
      for (double e : es) require(e > 0, "--eps values must be positive");
      require(c.samples >= 1, "--samples must be >= 1");
      check_budget(box_rect(1 << *n).area(), "dyn-dim");
      auto counts = parallel_map<std::vector<long>>(c.samples, c.threads, [&](long i) {
        std::uint64_t sd = c.samples == 1 ? c.seed : derive_seed(c.seed, std::uint64_t(i));
        auto d = generate(Region::box(1 << *n), *s, F, sd);
        auto set = exceptional_set(scan_statistic(d, PathStat::point_to_box(1 << *n)), *x);
        std::vector<long> r;
        for (double e : es) r.push_back(covering_number(set, e, *s));
        return r;
      });
      o.table.header = {"eps", "mean_N", "stderr"};
      std::vector<double> lx, ly;
      for (std::size_t j = 0; j < es.size(); ++j) {
        std::vector<double> v;
        for (auto& r : counts) v.push_back(double(r[j]));
        auto e = EstimatorResult::of_values(v);
        o.table.add({es[j], e.estimate, e.std_error});
        if (e.estimate > 0) {
          lx.push_back(std::log(1 / es[j]));
          ly.push_back(std::log(e.estimate));
        }
      }
      if (lx.size() == es.size()) {
        auto f = ols(lx, ly);
        o.value = f.slope;
        o.summary["slope"] = f.slope;
      } else {
        o.summary["slope"] = nullptr;
        o.status = "empty-set";
      }
    };
  });

  // ---- covering-survey
  add("covering-survey", "expected covering numbers against the binomial bound shape", 200, [](CLI::App* a) {
    auto dist = std::make_shared<std::string>("bernoulli");
    auto n = std::make_shared<int>(4);
    auto s = std::make_shared<double>(1.0);
    auto x = std::make_shared<double>(0.0);
    auto eps = std::make_shared<std::string>("2^-2..2^-6");
    auto eps0 = std::make_shared<double>(0.05);
    auto aux = std::make_shared<long>(2000);
    a->add_option("--dist", *dist)->capture_default_str();
    a->add_option("--n", *n, "box 2^n")->capture_default_str();
    a->add_option("--s", *s)->capture_default_str();
    a->add_option("--x", *x)->capture_default_str();
    a->add_option("--eps", *eps)->capture_default_str();
    a->add_option("--eps0", *eps0)->capture_default_str();
    a->add_option("--aux-samples", *aux, "samples for pi_1 and L")->capture_default_str();
    return [=](const Common& c, Output& o) {
      auto F = parse_dist(*dist);
      require(*n >= 1 && *n <= 9, "--n must lie in [1,9]");
      require(*s > 0, "--s must be positive");
      auto es = parse_real_grid(*eps);
      for (double e : es) require(e > 0, "--eps values must be positive");
      require(*eps0 > 0 && *eps0 < 0.5, "--eps0 must lie in (0,1/2)");
      require(c.samples >= 1 && *aux >= 1, "sample counts must be >= 1");
      auto sv = covering_survey(F, *n, *x, *s, es, c.samples, c.seed, c.threads, *eps0, *aux);
      o.table.header = {"eps", "mean_N", "stderr", "y", "binom", "shape", "L_tilted", "regime"};
      bool all = true;
      for (auto& r : sv.rows) {
        o.table.add({r.eps, r.N.estimate, r.N.std_error, long(r.y), r.binom, r.shape, r.L_tilted,
                     std::string(r.in_regime ? "lemma" : "outside lemma regime")});
        all = all && r.in_regime;
      }
      o.summary["C_fit"] = sv.C_fit;
      o.summary["lebesgue"] = estimator_json(sv.leb);
      o.summary["fixed_time_probability"] = estimator_json(sv.fixed_t);
      o.summary["pi1"] = estimator_json(sv.pi1);
      if (!all) o.status = "outside lemma regime";
      o.est = sv.leb;
    };
  });

  // ---- interval-count
  add("interval-count", "distribution of the good-interval count", 200, [](CLI::App* a) {
    auto n = std::make_shared<int>(4);
    auto M = std::make_shared<int>(64);
    auto cg = std::make_shared<std::string>();
    auto eps0 = std::make_shared<double>(0.05);
    auto aux = std::make_shared<long>(2000);
    a->add_option("--n", *n)->capture_default_str();
    a->add_option("--M", *M)->capture_default_str();
    a->add_option("--c-grid", *cg, "c values (default 0.05..1 step 0.05)");
    a->add_option("--eps0", *eps0)->capture_default_str();
    a->add_option("--aux-samples", *aux)->capture_default_str();
    return [=](const Common& c, Output& o) {
      require(*n >= 1 && *n <= 8, "--n must lie in [1,8]");
      require(*M >= 1, "--M must be >= 1");
      std::vector<double> cs;
      if (!cg->empty()) cs = parse_real_grid(*cg);
      auto r = interval_count_statistic(*n, *M, c.samples, c.seed, c.threads, cs, nullptr, *eps0, *aux);
      o.table.header = {"c", "probability", "stderr"};
      for (std::size_t i = 0; i < r.c_grid.size(); ++i) o.table.add({r.c_grid[i], r.tail[i].estimate, r.tail[i].std_error});
      std::map<long, long> hist;
      for (long k : r.counts) ++hist[k];
      Json h = Json::array();
      for (auto [k, v] : hist) h.push_back({k, v});
      o.summary["histogram"] = h;
      o.summary["mean_count"] = estimator_json(r.mean_count);
      o.summary["p_a0"] = estimator_json(r.p_a0);
      o.summary["pi1"] = estimator_json(r.pi1);
      o.summary["best_c"] = r.best_c;
      o.summary["condition_correlation_length"] = r.cond_corr_length;
      o.summary["condition_arm"] = r.cond_arm;
      if (!r.cond_corr_length || !r.cond_arm) o.status = "conditions unmet";
      o.est = r.mean_count;
    };
  });

  // ---- hausdorff-cover
  add("hausdorff-cover", "scale-by-scale crossing events of the covering construction", 500, [](CLI::App* a) {
    auto L = std::make_shared<int>(4);
    auto n = std::make_shared<int>(4);
    auto x = std::make_shared<double>(0.5);
    auto eps0 = std::make_shared<double>(0.05);
    auto aux = std::make_shared<long>(2000);
    a->add_option("--L", *L, "scale base")->capture_default_str();
    a->add_option("--n", *n, "number of scales")->capture_default_str();
    a->add_option("--x", *x, "threshold for the mean")->capture_default_str();
    a->add_option("--eps0", *eps0)->capture_default_str();
    a->add_option("--aux-samples", *aux)->capture_default_str();
    return [=](const Common& c, Output& o) {
      require(*L >= 2 && *n >= 1, "need L >= 2 and n >= 1");
      require(*eps0 > 0 && *eps0 < 0.5, "--eps0 must lie in (0,1/2)");
      auto sv = hausdorff_cover_survey(*L, *n, *x, c.samples, c.seed, c.threads, *eps0, *aux);
      o.table.header = {"k", "L_k", "p_hat", "q", "delta", "h", "P_B", "stderr", "pi1", "C"};
      for (auto& k : sv.scales)
        o.table.add({long(k.k), k.Lk, k.p_hat, k.q, k.delta, k.h, k.pB.estimate, k.pB.std_error, k.pi1.estimate, k.C});
      std::map<double, long> hist;
      for (double w : sv.wbar) ++hist[w];
      Json h = Json::array();
      for (auto [w, v] : hist) h.push_back({w, v});
      o.summary["wbar_histogram"] = h;
      o.summary["wbar_mean"] = estimator_json(sv.wbar_mean);
      o.summary["mean_of_P_B"] = sv.sum_pB_over_n;
      o.summary["p_wbar_ge_x"] = estimator_json(sv.p_wbar_ge_x);
      o.summary["C_min"] = sv.C_min;
      o.summary["C_max"] = sv.C_max;
      o.est = sv.wbar_mean;
    };
  });

  // ---- noise-decay
  add("noise-decay", "correlation of zero-weight arm events at times 0 and t", 20000, [](CLI::App* a) {
    auto n = std::make_shared<int>(6);
    auto tg = std::make_shared<std::string>("2^-8..2^-2");
    auto f0 = std::make_shared<double>(0.5);
    a->add_option("--n", *n, "box 2^n")->capture_default_str();
    a->add_option("--t-grid", *tg)->capture_default_str();
    a->add_option("--f0", *f0, "P(weight = 0)")->capture_default_str();
    return [=](const Common& c, Output& o) {
      require(*n >= 1 && *n <= 10, "--n must lie in [1,10]");
      auto ts = parse_real_grid(*tg);
      for (double t : ts) require(t >= 0, "--t-grid values must be >= 0");
      require(*f0 > 0 && *f0 <= 1, "--f0 must lie in (0,1]");
      auto r = noise_decay(*n, ts, c.samples, c.seed, c.threads, *f0);
      o.table.header = {"t", "joint", "stderr", "ratio", "ratio_stderr"};
      for (auto& row : r.rows) o.table.add({row.t, row.joint.estimate, row.joint.std_error, row.ratio, row.ratio_se});
      o.summary["p_w0"] = estimator_json(r.p0);
      o.summary["slope"] = r.fit.slope;
      o.est = r.p0;
    };
  });

  // Config values go in front of the command line so that flags win.
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string out_hint;
  try {
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
      if (args[i] == "--out") out_hint = args[i + 1];
    std::string cfg;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) {
        cfg = args[i + 1];
        args.erase(args.begin() + long(i), args.begin() + long(i) + 2);
        break;
      }
      if (args[i].rfind("--config=", 0) == 0) {
        cfg = args[i].substr(9);
        args.erase(args.begin() + long(i));
        break;
      }
    }
    if (!cfg.empty()) {
      std::string sub;
      auto extra = read_config(cfg, sub);
      std::size_t at = 0;
      if (!args.empty() && commands.count(args[0])) {
        if (!sub.empty() && sub != args[0]) throw ConfigError("config subcommand '" + sub + "' differs from '" + args[0] + "'");
        at = 1;
      } else if (!sub.empty()) {
        args.insert(args.begin(), sub);
        at = 1;
      }
      args.insert(args.begin() + long(at), extra.begin(), extra.end());
      config_path = cfg;
    }
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return emit_error(2, "invalid-config", e.what(), out_hint);
  } catch (const ConfigError& e) {
    return emit_error(2, "invalid-config", e.what(), out_hint);
  }

  std::string name;
  for (auto& [k, c] : commands)
    if (c.app->parsed()) name = k;
  Command& cmd = commands[name];
  if (cmd.app->get_option("--samples")->results().empty()) common.samples = cmd.default_samples;

  Json params = Json::object();
  params["subcommand"] = name;
  for (const CLI::Option* opt : cmd.app->get_options()) {
    if (opt->get_lnames().empty()) continue;
    std::string key = opt->get_lnames().front();
    if (key == "help" || key == "config" || key == "out" || key == "format") continue;
    std::string v = opt->results().empty() ? opt->get_default_str() : opt->results().back();
    if (opt->results().empty() && v.empty()) continue;
    params[key] = v;
  }

  Output o;
  try {
    cmd.run(common, o);
  } catch (const ConfigError& e) {
    return emit_error(2, "invalid-config", e.what(), common.out);
  } catch (const BudgetExceeded& e) {
    return emit_error(3, "budget-exceeded", e.what(), common.out);
  } catch (const std::invalid_argument& e) {
    return emit_error(2, "invalid-config", e.what(), common.out);
  } catch (const std::exception& e) {
    return emit_error(1, "failed", e.what(), common.out);
  }

  Json summary;
  summary["operation"] = name;
  summary["params"] = params;
  if (o.est) {
    summary["estimate"] = o.est->estimate;
    summary["stderr"] = o.est->std_error;
    summary["n_samples"] = o.est->n_samples;
  } else {
    summary["estimate"] = o.value ? Json(*o.value) : Json(nullptr);
    summary["stderr"] = nullptr;
    summary["n_samples"] = common.samples;
  }
  summary["seed"] = common.seed;
  summary["status"] = o.status;
  for (auto& [k, v] : o.summary.items()) summary[k] = v;

  if (!common.out.empty()) {
    std::ofstream csv(common.out + ".csv", std::ios::binary);
    o.table.write(csv);
    std::ofstream js(common.out + ".json", std::ios::binary);
    js << summary.dump(2) << "\n";
    if (!csv || !js) return emit_error(1, "io", "cannot write output files for '" + common.out + "'", "");
  }
  if (common.format == "csv")
    o.table.write(std::cout);
  else
    std::cout << summary.dump(2) << "\n";
  return 0;
}
