#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "dynfpp/distributions.hpp"
#include "dynfpp/rng.hpp"

using namespace dynfpp;

TEST(Quantile, BernoulliInfimumAtJump) {
  auto F = bernoulli();
  EXPECT_EQ(quantile(F, 0.3), 0.0);
  EXPECT_EQ(quantile(F, 0.5), 0.0);
  EXPECT_EQ(quantile(F, 0.75), 1.0);
  EXPECT_EQ(sample_weight(F, 0.5), 0.0);
  EXPECT_EQ(F.f0(), 0.5);
}

TEST(Quantile, RejectsOutsideUnitInterval) {
  auto F = bernoulli();
  EXPECT_THROW(quantile(F, 0.0), std::domain_error);
  EXPECT_THROW(quantile(F, 1.0), std::domain_error);
  EXPECT_THROW(quantile(F, -0.1), std::domain_error);
}

TEST(Quantile, Zhang) {
  for (double a : {0.5, 1.0, 2.0, 3.0}) {
    auto F = zhang(a);
    for (double u : {0.01, 0.1, 0.25, 0.4, 0.49}) EXPECT_NEAR(quantile(F, 0.5 + u), std::pow(u, 1 / a), 1e-12);
    EXPECT_EQ(F.cdf(0), 0.5);
    EXPECT_NEAR(F.cdf(std::pow(0.5, 1 / a)), 1.0, 1e-12);
  }
  EXPECT_NEAR(zhang(1).cdf(0.25), 0.75, 1e-15);
  EXPECT_NEAR(sample_weight(zhang(1), 0.9), 0.4, 1e-12);
  EXPECT_THROW(zhang(0), std::invalid_argument);
  EXPECT_THROW(zhang(-1), std::invalid_argument);
}

TEST(Quantile, MonotoneAndGaloisOnGrid) {
  std::vector<Cdf> fs{bernoulli(), bernoulli(0.3, 2.5), zhang(1), zhang(0.3), atoms({{0, 0.2}, {1, 0.5}, {3, 1}}),
                      from_ak(AkSequence::powerlog(1, 1, 0)), from_ak(AkSequence::geometric(2, 0.5))};
  for (auto& F : fs) {
    double prev = 0;
    for (int i = 1; i < 1000; ++i) {
      double t = i / 1000.0;
      double q = quantile(F, t);
      EXPECT_GE(q, prev) << F.spec();
      prev = q;
      EXPECT_GE(F.cdf(q), t - 1e-12) << F.spec() << " t=" << t;
      if (q > 0) EXPECT_LT(F.cdf(q * (1 - 1e-9) - 1e-12), t + 1e-9) << F.spec() << " t=" << t;
    }
  }
}

TEST(Ak, Families) {
  for (int k = 2; k <= 40; ++k) {
    EXPECT_EQ(ak(bernoulli(), k), 1.0);
    EXPECT_NEAR(ak(zhang(1), k), std::ldexp(1.0, -k), 1e-15);
    EXPECT_NEAR(ak(zhang(2), k), std::pow(2.0, -k / 2.0), 1e-15);
  }
  EXPECT_THROW(ak(bernoulli(), 1), std::invalid_argument);
}

TEST(Ak, FromAkIsExactInverse) {
  std::vector<AkSequence> seqs{AkSequence::constant(1), AkSequence::powerlog(1, 1, 0), AkSequence::powerlog(1, 1, 1),
                               AkSequence::powerlog(3, 0.5, 2), AkSequence::geometric(1, 0.5),
                               AkSequence::explicit_list({5, 4, 4, 2}, AkSequence::powerlog(1, 1, 0))};
  for (auto& s : seqs) {
    auto F = from_ak(s);
    EXPECT_EQ(F.f0(), 0.5);
    double prev = HUGE_VAL;
    for (int k = 2; k <= 64; ++k) {
      EXPECT_EQ(ak(F, k), s(k)) << s.to_string() << " k=" << k;
      EXPECT_LE(ak(F, k), prev);
      prev = ak(F, k);
    }
    // capped tail
    EXPECT_EQ(F.quantile_offset(std::ldexp(1.0, -70)), s(64));
    EXPECT_EQ(F.quantile_offset(0.3), s(2));
  }
}

TEST(Ak, ConstantOneIsBernoulliLike) {
  auto F = from_ak(AkSequence::constant(1));
  EXPECT_EQ(F.segments().size(), 2u);
  EXPECT_EQ(F.cdf(0), 0.5);
  EXPECT_EQ(F.cdf(0.999), 0.5);
  EXPECT_EQ(F.cdf(1), 1.0);
}

TEST(Ak, GeometricHalfMatchesZhangOneAtDyadics) {
  auto F = from_ak(AkSequence::geometric(1, 0.5));
  auto Z = zhang(1);
  for (int k = 2; k <= 60; ++k) EXPECT_EQ(ak(F, k), ak(Z, k));
}

TEST(Ak, RejectsNonMonotone) {
  EXPECT_THROW(from_ak(AkSequence::explicit_list({1, 2})), std::invalid_argument);
  EXPECT_THROW(from_ak(AkSequence::explicit_list({1, -1})), std::invalid_argument);
  EXPECT_THROW(AkSequence::parse("powerlog:1,-1,0").validate(), std::invalid_argument);
}

TEST(Sampling, EmpiricalCdfMatchesWithinKs) {
  for (auto F : {zhang(1), from_ak(AkSequence::powerlog(1, 1, 0)), bernoulli()}) {
    SplitMix rng(42);
    std::vector<double> xs(100000);
    for (auto& x : xs) x = sample_weight(F, rng.uniform());
    std::sort(xs.begin(), xs.end());
    double ks = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i + 1 < xs.size() && xs[i + 1] == xs[i]) continue;
      double emp = double(i + 1) / double(xs.size());
      ks = std::max(ks, std::fabs(emp - F.cdf(xs[i])));
    }
    EXPECT_LT(ks, 0.01) << F.spec();
  }
}

TEST(Spec, RoundTripIsBitExact) {
  std::vector<std::string> specs{"bernoulli", "bernoulli:0.25,3", "zhang:0.7", "atoms:0@0.5,1@0.75,2.5@1", "ak:constant:1",
                                 "ak:powerlog:1,1,0", "ak:geometric:0.3,0.9;kmax=40", "ak:explicit:2,1.5,1|powerlog:1,1,2",
                                 "ak:explicit:1,0.5,0.25"};
  for (auto& s : specs) {
    auto F = parse_cdf(s);
    EXPECT_EQ(F.spec(), s);
    auto G = parse_cdf(F.spec());
    for (int i = 1; i < 200; ++i) EXPECT_EQ(quantile(F, i / 200.0), quantile(G, i / 200.0));
  }
  auto z = zhang(1.0 / 3);
  EXPECT_EQ(quantile(parse_cdf(z.spec()), 0.8), quantile(z, 0.8));
}

TEST(Spec, RejectsGarbage) {
  for (auto s : {"", "bernouli", "zhang:", "zhang:x", "atoms:1@0.5", "ak:", "ak:powerlog:1,1", "ak:constant:1;kmax=1"})
    EXPECT_THROW(parse_cdf(s), std::exception) << s;
}

namespace {
std::vector<std::string> tags(const char* seq, double f0 = 0.5) { return classify_regime(f0, AkSequence::parse(seq)).tags(); }
}  // namespace

TEST(Classifier, ConstantOne) {
  auto r = classify_regime(0.5, AkSequence::constant(1));
  EXPECT_EQ(r.regime, Regime::Critical);
  EXPECT_EQ(r.sum_ak, Series::Diverges);
  EXPECT_EQ(r.kak, KakBehavior::ToInfinity);
  EXPECT_EQ(r.tags(), (std::vector<std::string>{"hausdorff-dim-31/36", "upper-minkowski-31/36"}));
}

TEST(Classifier, GeometricHalf) {
  auto r = classify_regime(0.5, AkSequence::geometric(1, 0.5));
  EXPECT_EQ(r.sum_k78_ak, Series::Converges);
  EXPECT_EQ(r.tags(), (std::vector<std::string>{"no-exceptional-times"}));
}

TEST(Classifier, OneOverKLogK) {
  auto r = classify_regime(0.5, AkSequence::powerlog(1, 1, 1));
  EXPECT_EQ(r.sum_ak, Series::Diverges);
  EXPECT_EQ(r.kak, KakBehavior::LiminfZero);
  EXPECT_EQ(r.tags(), (std::vector<std::string>{"hausdorff-dim-31/36", "upper-minkowski-1"}));
}

TEST(Classifier, OneOverKLogSquaredK) {
  auto r = classify_regime(0.5, AkSequence::powerlog(1, 1, 2));
  EXPECT_EQ(r.sum_ak, Series::Converges);
  EXPECT_EQ(r.sum_k78_ak, Series::Diverges);
  EXPECT_EQ(r.tags(), (std::vector<std::string>{"fixed-time-rho-finite"}));
}

TEST(Classifier, BoundaryFamilyOneOverK) {
  auto r = classify_regime(0.5, AkSequence::powerlog(1, 1, 0));
  EXPECT_EQ(r.sum_ak, Series::Diverges);
  EXPECT_EQ(r.kak, KakBehavior::Intermediate);
  EXPECT_EQ(r.tags()[0], "hausdorff-dim-31/36");
}

TEST(Classifier, ScalingNeverChangesConclusions) {
  for (auto s : {"constant:1", "geometric:1,0.5", "powerlog:1,1,1", "powerlog:1,1,2", "powerlog:1,1,0", "powerlog:2,0.875,1",
                 "powerlog:1,1.9,0", "explicit:3,2|geometric:1,0.9"}) {
    auto base = AkSequence::parse(s);
    auto want = classify_regime(0.5, base).tags();
    for (double c : {0.01, 0.5, 7.0, 1e6}) {
      auto scaled = base;
      scaled.c *= c;
      if (scaled.family == AkSequence::Family::Explicit) {
        for (auto& h : scaled.head) h *= c;
        auto t = *scaled.tail;
        t.c *= c;
        scaled.tail = std::make_shared<const AkSequence>(t);
      }
      EXPECT_EQ(classify_regime(0.5, scaled).tags(), want) << s << " c=" << c;
    }
  }
}

TEST(Classifier, OffCriticalRegimes) {
  auto sub = classify_regime(0.3, AkSequence::constant(1));
  EXPECT_EQ(sub.regime, Regime::Subcritical);
  EXPECT_TRUE(sub.conclusions.empty());
  auto super = classify_regime(0.7, AkSequence::constant(1));
  EXPECT_EQ(super.regime, Regime::Supercritical);
  EXPECT_TRUE(super.conclusions.empty());
  EXPECT_FALSE(super.notes.empty());
}

TEST(Classifier, ExplicitWithoutTailIsUnknown) {
  auto r = classify_regime(0.5, AkSequence::parse("explicit:1,0.5,0.25"));
  EXPECT_EQ(r.sum_ak, Series::Unknown);
  EXPECT_TRUE(r.conclusions.empty());
  EXPECT_FALSE(r.heuristic_partial_sums.empty());
}

TEST(Classifier, TagsAreStable) {
  EXPECT_EQ(tags("explicit:5,4|constant:1"), tags("constant:1"));
  EXPECT_EQ(tags("geometric:1,0.99"), (std::vector<std::string>{"no-exceptional-times"}));
  EXPECT_EQ(tags("powerlog:1,1.5,0"), (std::vector<std::string>{"fixed-time-rho-finite"}));
}
