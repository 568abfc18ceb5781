#ifndef DYNFPP_DISTRIBUTIONS_HPP
#define DYNFPP_DISTRIBUTIONS_HPP

#include <charconv>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace dynfpp {

// Shortest decimal text that parses back to the same double.
inline std::string fmt_exact(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double x = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw std::invalid_argument("bad number '" + std::string(s) + "'");
  return x;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  return out;
}

// ---------------------------------------------------------------------------
// a_k sequences

struct AkSequence {
  enum class Family { Constant, PowerLog, Geometric, Explicit };
  Family family = Family::Constant;
  double c = 1, beta = 0, gamma = 0, r = 0;
  std::vector<double> head;  // Explicit: a_2, a_3, ...
  std::shared_ptr<const AkSequence> tail;

  static AkSequence constant(double c) {
    AkSequence s;
    s.c = c;
    return s;
  }
  static AkSequence powerlog(double c, double beta, double gamma) {
    AkSequence s;
    s.family = Family::PowerLog;
    s.c = c;
    s.beta = beta;
    s.gamma = gamma;
    return s;
  }
  static AkSequence geometric(double c, double r) {
    AkSequence s;
    s.family = Family::Geometric;
    s.c = c;
    s.r = r;
    return s;
  }
  static AkSequence explicit_list(std::vector<double> values, std::optional<AkSequence> tail = std::nullopt) {
    if (values.empty()) throw std::invalid_argument("explicit a_k list is empty");
    AkSequence s;
    s.family = Family::Explicit;
    s.head = std::move(values);
    if (tail) s.tail = std::make_shared<const AkSequence>(*tail);
    return s;
  }

  // Past the end of an explicit list the tail family takes over; without a
  // tail the last listed value repeats.
  double operator()(int k) const {
    if (k < 2) throw std::invalid_argument("a_k needs k >= 2");
    switch (family) {
      case Family::Constant: return c;
      case Family::PowerLog: return c * std::pow(double(k), -beta) * std::pow(std::log(double(k) + 1.0), -gamma);
      case Family::Geometric: return c * std::pow(r, double(k));
      case Family::Explicit: {
        std::size_t i = std::size_t(k - 2);
        if (i < head.size()) return head[i];
        return tail ? (*tail)(k) : head.back();
      }
    }
    return 0;
  }

  void validate(int kmax = 256) const {
    if (family == Family::Geometric && !(r >= 0 && r <= 1)) throw std::invalid_argument("geometric ratio must lie in [0,1]");
    double prev = (*this)(2);
    if (!(prev >= 0) || !std::isfinite(prev)) throw std::invalid_argument("a_2 must be finite and nonnegative");
    for (int k = 3; k <= kmax; ++k) {
      double a = (*this)(k);
      if (!(a >= 0)) throw std::invalid_argument("a_k must be nonnegative");
      if (a > prev) throw std::invalid_argument("a_k sequence is not nonincreasing at k=" + std::to_string(k));
      prev = a;
    }
  }

  std::string to_string() const {
    switch (family) {
      case Family::Constant: return "constant:" + fmt_exact(c);
      case Family::PowerLog: return "powerlog:" + fmt_exact(c) + "," + fmt_exact(beta) + "," + fmt_exact(gamma);
      case Family::Geometric: return "geometric:" + fmt_exact(c) + "," + fmt_exact(r);
      case Family::Explicit: {
        std::string s = "explicit:";
        for (std::size_t i = 0; i < head.size(); ++i) s += (i ? "," : "") + fmt_exact(head[i]);
        if (tail) s += "|" + tail->to_string();
        return s;
      }
    }
    return {};
  }

  static AkSequence parse(std::string_view text) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos) throw std::invalid_argument("a_k spec needs family:params");
    std::string fam(text.substr(0, colon));
    std::string_view rest = text.substr(colon + 1);
    auto nums = [](std::string_view s) {
      std::vector<double> v;
      for (auto& p : split(s, ',')) v.push_back(parse_double(p));
      return v;
    };
    AkSequence out;
    if (fam == "constant") {
      auto v = nums(rest);
      if (v.size() != 1) throw std::invalid_argument("constant:c");
      out = constant(v[0]);
    } else if (fam == "powerlog") {
      auto v = nums(rest);
      if (v.size() != 3) throw std::invalid_argument("powerlog:c,beta,gamma");
      out = powerlog(v[0], v[1], v[2]);
    } else if (fam == "geometric") {
      auto v = nums(rest);
      if (v.size() != 2) throw std::invalid_argument("geometric:c,r");
      out = geometric(v[0], v[1]);
    } else if (fam == "explicit") {
      auto bar = rest.find('|');
      std::optional<AkSequence> t;
      if (bar != std::string_view::npos) t = parse(rest.substr(bar + 1));
      out = explicit_list(nums(rest.substr(0, bar)), t);
    } else {
      throw std::invalid_argument("unknown a_k family '" + fam + "'");
    }
    out.validate();
    return out;
  }
};

// ---------------------------------------------------------------------------
// Distribution functions, stored through their generalized inverse.
//
// Breakpoints are kept as offsets d = t - 1/2 so that a_k = F^-1(1/2 + 2^-k) is
// exact for every k a double exponent can hold.

struct QuantileSegment {
  double d_lo, d_hi;  // covers (d_lo, d_hi]
  double base;
  double scale;  // 0 for a constant piece
  double power;
  double at(double d) const { return scale == 0 ? base : base + scale * std::pow(d - d_lo, power); }
  double top() const { return at(d_hi); }
};

class Cdf {
 public:
  enum class Repr { AtomList, PiecewiseInverse };

  Cdf(std::vector<QuantileSegment> segs, Repr repr, std::string spec) : segs_(std::move(segs)), repr_(repr), spec_(std::move(spec)) {
    if (segs_.empty() || segs_.front().d_lo != -0.5 || segs_.back().d_hi != 0.5)
      throw std::invalid_argument("quantile segments must cover (0,1]");
    double prev = 0;
    for (std::size_t i = 0; i < segs_.size(); ++i) {
      auto& s = segs_[i];
      if (i && s.d_lo != segs_[i - 1].d_hi) throw std::invalid_argument("quantile segments not contiguous");
      if (!(s.d_hi > s.d_lo)) throw std::invalid_argument("empty quantile segment");
      if (!(s.base >= prev) || s.scale < 0) throw std::invalid_argument("quantile must be nonnegative and nondecreasing");
      prev = s.top();
    }
    f0_ = cdf(0.0);
  }

  Repr repr() const { return repr_; }
  const std::string& spec() const { return spec_; }
  double f0() const { return f0_; }
  const std::vector<QuantileSegment>& segments() const { return segs_; }

  // F^-1(1/2 + d) for d in (-1/2, 1/2].
  double quantile_offset(double d) const {
    std::size_t lo = 0, hi = segs_.size() - 1;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (segs_[mid].d_hi >= d)
        hi = mid;
      else
        lo = mid + 1;
    }
    return segs_[lo].at(d);
  }

  double quantile(double t) const {
    if (!(t > 0 && t < 1)) throw std::domain_error("quantile: t outside (0,1)");
    return quantile_offset(t - 0.5);
  }

  // F(x) = sup{t : F^-1(t) <= x}
  double cdf(double x) const {
    if (x < 0) return 0;
    for (auto& s : segs_) {
      if (s.top() <= x) continue;
      if (s.scale == 0 || x < s.base) return 0.5 + s.d_lo;
      return 0.5 + s.d_lo + std::pow((x - s.base) / s.scale, 1.0 / s.power);
    }
    return 1.0;
  }

 private:
  std::vector<QuantileSegment> segs_;
  Repr repr_;
  std::string spec_;
  double f0_ = 0;
};

inline double quantile(const Cdf& F, double t) { return F.quantile(t); }
inline double sample_weight(const Cdf& F, double u) { return F.quantile(u); }

inline double ak(const Cdf& F, int k) {
  if (k < 2) throw std::invalid_argument("ak: k < 2");
  return F.quantile_offset(std::ldexp(1.0, -k));
}

// Atoms v_1 < v_2 < ... with cumulative probabilities c_1 < ... < c_m = 1.
inline Cdf atoms(const std::vector<std::pair<double, double>>& vc) {
  if (vc.empty() || vc.back().second != 1.0) throw std::invalid_argument("atoms: last cumulative probability must be 1");
  std::vector<QuantileSegment> segs;
  std::string spec = "atoms:";
  double dprev = -0.5, vprev = -1, cprev = 0;
  for (std::size_t i = 0; i < vc.size(); ++i) {
    auto [v, c] = vc[i];
    if (!(v >= 0) || v <= vprev || !(c > cprev) || c > 1) throw std::invalid_argument("atoms: need increasing values >= 0 and increasing probabilities");
    double d = c - 0.5;
    segs.push_back({dprev, d, v, 0, 1});
    spec += (i ? "," : "") + fmt_exact(v) + "@" + fmt_exact(c);
    dprev = d;
    vprev = v;
    cprev = c;
  }
  return Cdf(std::move(segs), Cdf::Repr::AtomList, spec);
}

// P(tau = 0) = q, P(tau = v) = 1 - q.
inline Cdf bernoulli(double q = 0.5, double v = 1.0) {
  if (!(q >= 0 && q <= 1) || !(v > 0)) throw std::invalid_argument("bernoulli: need q in [0,1], v > 0");
  std::vector<QuantileSegment> segs;
  if (q > 0) segs.push_back({-0.5, q - 0.5, 0, 0, 1});
  if (q < 1) segs.push_back({q > 0 ? q - 0.5 : -0.5, 0.5, v, 0, 1});
  std::string spec = (q == 0.5 && v == 1.0) ? "bernoulli" : "bernoulli:" + fmt_exact(q) + "," + fmt_exact(v);
  return Cdf(std::move(segs), Cdf::Repr::AtomList, spec);
}

// F_a(x) = 1/2 + x^a on [0, (1/2)^(1/a)].
inline Cdf zhang(double a) {
  if (!(a > 0)) throw std::invalid_argument("zhang: a must be positive");
  std::vector<QuantileSegment> segs{{-0.5, 0.0, 0, 0, 1}, {0.0, 0.5, 0, 1, 1.0 / a}};
  return Cdf(std::move(segs), Cdf::Repr::PiecewiseInverse, "zhang:" + fmt_exact(a));
}

inline Cdf from_ak(const AkSequence& seq, int kmax = 64) {
  if (kmax < 2 || kmax > 1000) throw std::invalid_argument("from_ak: kmax out of range");
  seq.validate(kmax);
  std::vector<QuantileSegment> segs{{-0.5, 0.0, 0, 0, 1}};
  auto push = [&](double d_lo, double d_hi, double v) {
    auto& last = segs.back();
    if (segs.size() > 1 && last.base == v)
      last.d_hi = d_hi;
    else
      segs.push_back({d_lo, d_hi, v, 0, 1});
  };
  push(0.0, std::ldexp(1.0, -(kmax + 1)), seq(kmax));
  for (int k = kmax; k >= 2; --k) push(std::ldexp(1.0, -(k + 1)), std::ldexp(1.0, -k), seq(k));
  push(0.25, 0.5, seq(2));
  std::string spec = "ak:" + seq.to_string();
  if (kmax != 64) spec += ";kmax=" + std::to_string(kmax);
  return Cdf(std::move(segs), Cdf::Repr::PiecewiseInverse, spec);
}

// Grammar:
//   bernoulli | bernoulli:q,v | zhang:a | atoms:v@c,v@c,...
//   ak:<seq>[;kmax=K]   with <seq> one of constant:c | powerlog:c,b,g |
//                       geometric:c,r | explicit:a2,a3,...[|<seq>]
inline Cdf parse_cdf(std::string_view text) {
  std::string_view head = text.substr(0, text.find(':'));
  std::string_view rest = head.size() < text.size() ? text.substr(head.size() + 1) : std::string_view{};
  if (head == "bernoulli") {
    if (rest.empty()) return bernoulli();
    auto p = split(rest, ',');
    if (p.size() != 2) throw std::invalid_argument("bernoulli:q,v");
    return bernoulli(parse_double(p[0]), parse_double(p[1]));
  }
  if (head == "zhang") return zhang(parse_double(rest));
  if (head == "atoms") {
    std::vector<std::pair<double, double>> vc;
    for (auto& item : split(rest, ',')) {
      auto at = item.find('@');
      if (at == std::string::npos) throw std::invalid_argument("atoms: expected value@cumprob");
      vc.emplace_back(parse_double(std::string_view(item).substr(0, at)), parse_double(std::string_view(item).substr(at + 1)));
    }
    return atoms(vc);
  }
  if (head == "ak") {
    int kmax = 64;
    auto semi = rest.find(';');
    if (semi != std::string_view::npos) {
      std::string_view opt = rest.substr(semi + 1);
      if (opt.substr(0, 5) != "kmax=") throw std::invalid_argument("ak: unknown option");
      kmax = int(parse_double(opt.substr(5)));
      rest = rest.substr(0, semi);
    }
    return from_ak(AkSequence::parse(rest), kmax);
  }
  throw std::invalid_argument("unknown distribution '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Regime classifier

enum class Regime { Subcritical, Critical, Supercritical };
enum class Series { Converges, Diverges, Unknown };
enum class KakBehavior { ToInfinity, LiminfZero, Intermediate, Unknown };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::Subcritical: return "subcritical";
    case Regime::Critical: return "critical";
    case Regime::Supercritical: return "supercritical";
  }
  return "?";
}
inline const char* to_string(Series s) {
  switch (s) {
    case Series::Converges: return "converges";
    case Series::Diverges: return "diverges";
    case Series::Unknown: return "unknown";
  }
  return "?";
}
inline const char* to_string(KakBehavior b) {
  switch (b) {
    case KakBehavior::ToInfinity: return "to-infinity";
    case KakBehavior::LiminfZero: return "liminf-zero";
    case KakBehavior::Intermediate: return "liminf-positive-finite";
    case KakBehavior::Unknown: return "unknown";
  }
  return "?";
}

struct Conclusion {
  std::string tag;
  std::string statement;
  friend bool operator==(const Conclusion&, const Conclusion&) = default;
};

struct RegimeReport {
  Regime regime = Regime::Critical;
  Series sum_ak = Series::Unknown;
  Series sum_k78_ak = Series::Unknown;
  KakBehavior kak = KakBehavior::Unknown;
  bool kak_limsup_infinite = false;
  std::vector<Conclusion> conclusions;
  std::vector<std::string> notes;
  std::vector<std::pair<int, double>> heuristic_partial_sums;  // explicit lists only

  std::vector<std::string> tags() const {
    std::vector<std::string> t;
    for (auto& c : conclusions) t.push_back(c.tag);
    return t;
  }
};

namespace detail {

struct SeriesShape {
  Series sum = Series::Unknown, sum78 = Series::Unknown;
  KakBehavior kak = KakBehavior::Unknown;
  bool limsup_inf = false;
};

// sum k^-b (log k)^-g converges iff b > 1, or b = 1 and g > 1
inline Series plog_series(double b, double g) { return (b > 1 || (b == 1 && g > 1)) ? Series::Converges : Series::Diverges; }

inline SeriesShape shape_of(const AkSequence& s) {
  SeriesShape out;
  auto zero = [&] {
    out.sum = out.sum78 = Series::Converges;
    out.kak = KakBehavior::LiminfZero;
  };
  auto constant_positive = [&] {
    out.sum = out.sum78 = Series::Diverges;
    out.kak = KakBehavior::ToInfinity;
    out.limsup_inf = true;
  };
  switch (s.family) {
    case AkSequence::Family::Constant:
      if (s.c == 0) zero(); else constant_positive();
      break;
    case AkSequence::Family::Geometric:
      if (s.c == 0 || s.r < 1) zero(); else constant_positive();
      break;
    case AkSequence::Family::PowerLog:
      if (s.c == 0) {
        zero();
        break;
      }
      out.sum = plog_series(s.beta, s.gamma);
      out.sum78 = plog_series(s.beta - 7.0 / 8.0, s.gamma);
      if (s.beta < 1 || (s.beta == 1 && s.gamma < 0)) {
        out.kak = KakBehavior::ToInfinity;
        out.limsup_inf = true;
      } else if (s.beta > 1 || s.gamma > 0) {
        out.kak = KakBehavior::LiminfZero;
      } else {
        out.kak = KakBehavior::Intermediate;  // k a_k = c
      }
      break;
    case AkSequence::Family::Explicit:
      if (s.tail) return shape_of(*s.tail);
      break;
  }
  return out;
}

}  // namespace detail

inline RegimeReport classify_regime(double f0, const AkSequence& seq) {
  if (!(f0 >= 0 && f0 <= 1)) throw std::invalid_argument("classify_regime: f0 outside [0,1]");
  seq.validate();
  RegimeReport rep;
  rep.regime = f0 < 0.5 ? Regime::Subcritical : f0 > 0.5 ? Regime::Supercritical : Regime::Critical;
  auto sh = detail::shape_of(seq);
  rep.sum_ak = sh.sum;
  rep.sum_k78_ak = sh.sum78;
  rep.kak = sh.kak;
  rep.kak_limsup_infinite = sh.limsup_inf;

  if (seq.family == AkSequence::Family::Explicit && !seq.tail) {
    double sum = 0;
    for (std::size_t i = 0; i < seq.head.size(); ++i) {
      sum += seq.head[i];
      int k = int(i) + 2;
      if ((k & (k - 1)) == 0 || i + 1 == seq.head.size()) rep.heuristic_partial_sums.emplace_back(k, sum);
    }
    rep.notes.push_back("explicit list without tail family: convergence undecidable from finitely many terms; partial sums are heuristic only");
  }

  if (rep.regime == Regime::Subcritical) {
    rep.notes.push_back("subcritical: time constant g > 0, passage times grow linearly");
    rep.notes.push_back("subcritical dynamics: a.s. no times of atypical leading-order growth (under a mild moment condition)");
    return rep;
  }
  if (rep.regime == Regime::Supercritical) {
    rep.notes.push_back("supercritical: g = 0 and the passage times form a tight family");
    return rep;
  }

  rep.notes.push_back("critical: g = 0; growth is governed by the a_k sequence");
  rep.notes.push_back("asymptotics E T(0, dB(2^n)) ~ sum_{k<=n} a_k require E tau^alpha < infinity for some alpha > 1/6; not checked (warning only)");

  auto add = [&](const char* tag, const char* text) { rep.conclusions.push_back({tag, text}); };
  if (sh.sum == Series::Diverges) {
    add("hausdorff-dim-31/36", "dim_H {t >= 0 : rho_t < infinity} = 31/36 a.s.; also dim_H {t : rho_t <= x} = 31/36 for every x >= 0");
    switch (sh.kak) {
      case KakBehavior::ToInfinity:
        add("upper-minkowski-31/36", "for all x >= 0 and s > 0, the upper Minkowski dimension of {t in [0,s] : rho_t <= x} is 31/36 a.s.");
        break;
      case KakBehavior::LiminfZero:
        add("upper-minkowski-1", "for all x > 0 and s > 0, the upper Minkowski dimension of {t in [0,s] : rho_t <= x} is 1 a.s.");
        break;
      case KakBehavior::Intermediate:
        if (sh.limsup_inf)
          add("lower-minkowski-le-31/36", "lower Minkowski dimension of {t in [0,s] : rho_t <= x} is at most 31/36 a.s.");
        add("upper-minkowski-le-31/36+eps", "for each eps > 0 some x > 0 has upper Minkowski dimension of the x-exceptional set at most 31/36 + eps");
        add("upper-minkowski-gt-1-eps", "for each eps > 0 some x has upper Minkowski dimension of the x-exceptional set above 1 - eps with probability tending to one");
        break;
      case KakBehavior::Unknown: break;
    }
  } else if (sh.sum == Series::Converges) {
    if (sh.sum78 == Series::Converges) {
      add("no-exceptional-times", "a.s. rho_t < infinity for all t >= 0: no exceptional times");
    } else {
      add("fixed-time-rho-finite", "rho_t < infinity a.s. at every fixed time t; dynamical behavior not decided by the k^(7/8) criterion");
    }
    rep.notes.push_back("the proof gives slightly more: sum k^(7/8 - varsigma) a_k < infinity suffices for some unspecified varsigma > 0");
  }
  if (sh.sum == Series::Converges || sh.kak == KakBehavior::Unknown)
    rep.notes.push_back("if the monochromatic two-arm exponent is 17/48 (conjectured), sum k^(5/6 + varsigma) a_k < infinity for some varsigma > 0 suffices");
  return rep;
}

}  // namespace dynfpp

#endif
