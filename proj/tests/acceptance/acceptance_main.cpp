// Copyright 2026 The hype-bench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hype/image.hpp"
#include "hype/pool.hpp"
#include "hype/random.hpp"
#include "hype/scoring.hpp"
#include "hype/service/http_server.hpp"
#include "hype/service/platform.hpp"
#include "hype/simulator.hpp"
#include "hype/staircase.hpp"
#include "hype/stats.hpp"
#include "hype/tasks.hpp"
#include "httplib.h"
#include "published_tables.hpp"
#include "service_fixtures.hpp"

namespace hype::acceptance {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// 1. Fixed-accuracy 0.75 responders under 10 down / 30 up show no drift.
Outcome staircase_equilibrium() {
  ConvergenceConfig c;
  c.responder_p = 0.75;
  c.blocks = 10000;
  const ExperimentReport r = run_convergence_experiment(c, 101);
  const double expected = 0.75 * -10.0 + 0.25 * 30.0;
  const double drift = r.summary.at("mean_drift_per_trial");
  return {std::abs(drift - expected) < 0.5,
          fmt("mean drift %.4f ms/trial (expected %.1f, bound 0.5) over %d blocks", drift,
              expected, c.blocks)};
}

// 2. Logistic evaluators converge to t75; fast evaluators pin at the floor.
Outcome staircase_convergence() {
  TimeExperimentConfig c;
  c.model.threshold_t75 = 400.0;
  c.evaluators = 1000;
  const double mean400 = run_time_experiment(c, 202).summary.at("mean_threshold_ms");
  bool pinned = true;
  std::string floors;
  for (double t75 : {100.0, 75.0, 50.0}) {
    c.model.threshold_t75 = t75;
    const auto s = run_time_experiment(c, 203).summary;
    const double mean = s.at("mean_threshold_ms");
    // Within one down-step of the 100 ms floor.
    pinned = pinned && mean < 100.0 + 10.0 && s.at("min_threshold_ms") == 100.0;
    floors += fmt(" t75=%.0f->%.2f", t75, mean);
  }
  return {std::abs(mean400 - 400.0) <= 30.0 && pinned,
          fmt("t75=400 mean threshold %.2f ms (bound 400+-30); floor:", mean400) + floors};
}

// 3. Published overall scores are the mean of the two class error rates.
Outcome score_arithmetic() {
  int rows = 0;
  double worst = 0.0;
  std::string worst_row;
  auto check = [&](const auto& table) {
    for (const fixtures::PublishedRow& row : table) {
      // 1000 judgments per class carry one-decimal percentages exactly.
      std::vector<Judgment> js;
      const int fake_wrong = static_cast<int>(std::lround(row.fake_error * 10.0));
      const int real_wrong = static_cast<int>(std::lround(row.real_error * 10.0));
      for (int i = 0; i < 1000; ++i) {
        js.push_back({"e", "f" + std::to_string(i), Label::kFake,
                      i < fake_wrong ? Label::kReal : Label::kFake});
        js.push_back({"e", "r" + std::to_string(i), Label::kReal,
                      i < real_wrong ? Label::kFake : Label::kReal});
      }
      const EvaluatorScore s = evaluator_error_rates(js);
      const ModelScoreReport rep = hype_infinity(std::vector<EvaluatorScore>{s}, std::string(row.model));
      const double diff = std::abs(rep.score - row.score);
      if (diff > worst) {
        worst = diff;
        worst_row = std::string(row.dataset) + "/" + std::string(row.model) + " " +
                    std::string(row.image_class);
      }
      ++rows;
    }
  };
  check(fixtures::kCelebA64);
  check(fixtures::kFfhq1024);
  check(fixtures::kImageNet5);
  check(fixtures::kCifar10);
  return {worst <= 0.1 + 1e-9,
          fmt("%d rows, max |reconstructed - published| = %.3f (bound 0.1) at ", rows, worst) +
              worst_row};
}

double rank_formula_rho(const std::vector<double>& x, const std::vector<double>& y) {
  // No ties in these fixtures, so the d^2 form is exact.
  auto ranks = [](const std::vector<double>& v) {
    std::vector<int> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      int below = 1;
      for (double w : v) below += w < v[i] ? 1 : 0;
      r[i] = below;
    }
    return r;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d2 += std::pow(rx[i] - ry[i], 2);
  const double n = static_cast<double>(x.size());
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

// 4. Rank correlation fixtures.
Outcome spearman_fixtures() {
  std::vector<double> score;
  std::vector<double> fid;
  for (const auto& row : fixtures::kCelebA64) {
    score.push_back(row.score);
    fid.push_back(row.fid);
  }
  for (const auto& row : fixtures::kFfhq1024) {
    score.push_back(row.score);
    fid.push_back(row.fid);
  }
  const SpearmanResult six = spearman(score, fid);
  const double six_oracle = rank_formula_rho(score, fid);
  const bool six_ok = std::abs(six.rho - six_oracle) < 1e-12 &&
                      std::abs(six.rho - fixtures::kFaceModelsFidRho) < 0.0005;

  std::vector<double> in_score;
  std::vector<double> in_kid;
  for (const auto& row : fixtures::kImageNet5) {
    in_score.push_back(row.score);
    in_kid.push_back(row.kid);
  }
  const SpearmanResult kid = spearman(in_score, in_kid);
  const bool kid_ok = std::abs(kid.rho - fixtures::kImageNet5KidRho) <= 0.01;
  return {six_ok && kid_ok,
          fmt("six-model FID rho %.6f (reported %.3f, rank-formula %.6f) %s; "
              "ImageNet-5 KID rho %.5f (reported %.3f, bound 0.01) %s",
              six.rho, fixtures::kFaceModelsFidRho, six_oracle, six_ok ? "ok" : "MISMATCH",
              kid.rho, fixtures::kImageNet5KidRho, kid_ok ? "ok" : "MISMATCH")};
}

// 5. Bootstrap std halves from 10 to 40 evaluators; widths shrink with n.
Outcome bootstrap_shrinkage() {
  TradeoffConfig c;
  c.pool_scores = simulate_infinity_pool({0.15, 0.11}, {}, 120, 505);
  c.iterations = 10000;
  const ExperimentReport r = run_cost_tradeoff_experiment(c, 506);
  const double ratio = r.summary.at("std_ratio_40");
  bool monotone = true;
  for (std::size_t i = 1; i < r.curve.size(); ++i) {
    monotone = monotone && r.curve[i].width() <= r.curve[i - 1].width() * 1.05;
  }
  std::string published;
  for (const auto& p : fixtures::kBootstrapStdPairs) published += fmt(" %.2f", p.at_10 / p.at_40);
  return {std::abs(ratio - 2.0) <= 0.15 && monotone,
          fmt("std(10)/std(40) = %.4f (bound 2.0+-0.15; published ratios", ratio) + published +
              fmt("); widths monotone within 5%%: %s", monotone ? "yes" : "no")};
}

// P[X >= k] for X ~ Bin(n, 1/2) by direct summation of exact binomial
// coefficients in long double.
long double fair_coin_tail(int n, int k) {
  long double coef = 1.0L;  // C(n, 0)
  long double sum = 0.0L;
  for (int i = 0; i <= n; ++i) {
    if (i >= k) sum += coef;
    coef = coef * (n - i) / (i + 1);
  }
  return sum / std::pow(2.0L, n);
}

// 6. Qualification gate: binomial tail and simulated guessers.
Outcome qualification_gate() {
  const double tail = binomial_tail(100, 65, 0.5).tail_probability;
  const double tail_oracle = static_cast<double>(fair_coin_tail(100, 65));
  const bool tail_ok = tail > 5e-4 && tail < 5e-3 && std::abs(tail - tail_oracle) < 1e-15;

  const QualificationRule rule;  // 0.65 on each class
  const int per_class = 50;
  const int k = static_cast<int>(std::ceil(rule.threshold * per_class - 1e-9));
  const double class_tail = static_cast<double>(fair_coin_tail(per_class, k));
  const double analytic = class_tail * class_tail;

  const long trials = 1'000'000;
  Rng rng(606);
  const uint64_t mask = (uint64_t{1} << per_class) - 1;
  long passed = 0;
  for (long i = 0; i < trials; ++i) {
    const int real_correct = std::popcount(rng.next_u64() & mask);
    const int fake_correct = std::popcount(rng.next_u64() & mask);
    if (rule.passes(real_correct, per_class, fake_correct, per_class)) ++passed;
  }
  const double rate = static_cast<double>(passed) / trials;
  const double se = std::sqrt(analytic * (1.0 - analytic) / trials);
  const bool sim_ok = std::abs(rate - analytic) <= 3.0 * se;
  return {tail_ok && sim_ok,
          fmt("P[X>=65|100,.5] = %.6g (oracle %.6g, bound (5e-4, 5e-3)); guessers pass %.3e vs "
              "analytic %.3e (%.2f SE, bound 3)",
              tail, tail_oracle, rate, analytic, std::abs(rate - analytic) / se)};
}

// 7. Separability on groups shaped like the CelebA-64 rows.
Outcome separability() {
  Rng rng(707);
  std::vector<std::vector<double>> groups;
  for (const auto& row : fixtures::kCelebA64) {
    // The published std is of the mean over 30 evaluators.
    const double sd = row.std * std::sqrt(30.0);
    std::vector<double> g;
    for (int i = 0; i < 30; ++i) g.push_back(row.score + sd * rng.normal());
    groups.push_back(std::move(g));
  }
  const AnovaResult a = one_way_anova(groups);
  const TukeyResult t = tukey_hsd(groups);
  int significant = 0;
  for (const auto& p : t.pairs) significant += p.significant_at_05 ? 1 : 0;
  const bool distinct_ok = a.p_value < 0.001 && significant == static_cast<int>(t.pairs.size());

  const std::vector<std::vector<double>> same(4, groups[0]);
  const AnovaResult a0 = one_way_anova(same);
  const TukeyResult t0 = tukey_hsd(same);
  int significant0 = 0;
  for (const auto& p : t0.pairs) significant0 += p.significant_at_05 ? 1 : 0;
  const bool same_ok = a0.f_statistic == 0.0 && a0.p_value == 1.0 && significant0 == 0;
  return {distinct_ok && same_ok,
          fmt("distinct: F=%.2f p=%.3g, %d/%zu Tukey pairs significant; identical: F=%.3g p=%.3g, "
              "%d significant",
              a.f_statistic, a.p_value, significant, t.pairs.size(), a0.f_statistic, a0.p_value,
              significant0)};
}

// 8. Pool build, 30 simulated sessions over HTTP, score, then offline replay.
Outcome end_to_end_determinism() {
  namespace fs = std::filesystem;
  fixtures::TempDir dir;
  Rng pixels(808);
  fixtures::LabelOracle oracle;
  for (const char* source : {"real", "fake"}) {
    for (int i = 0; i < 80; ++i) {
      Raster r(16, 16, 3);
      for (double& v : r.pixels) v = static_cast<double>(pixels.uniform_index(256));
      fixtures::write_bytes(dir.path() / "images" / source / fmt("%03d.png", i), encode_png(r));
    }
  }
  const auto reals = scan_image_directory(dir.path() / "images" / "real", Label::kReal,
                                          std::nullopt, "real");
  const auto fakes = scan_image_directory(dir.path() / "images" / "fake", Label::kFake,
                                          std::string("wgan-gp"), "fake");
  const ImagePool pool = build_pool(reals, fakes, 60, 809, "celeba-wgan");
  oracle.add(pool);
  std::ostringstream manifest;
  write_pool_manifest(manifest, pool);

  service::ServiceConfig config = fixtures::test_config(dir.path() / "data");
  config.bootstrap.iterations = 10000;
  service::Platform platform(config);
  service::HttpServer server(platform);
  server.bind("127.0.0.1", 0);
  server.start();
  httplib::Client http("127.0.0.1", server.port());
  http.set_read_timeout(60, 0);

  auto expect = [](const httplib::Result& r, int status, const std::string& what) {
    if (!r || r->status != status) {
      throw std::runtime_error(what + " returned " + (r ? std::to_string(r->status) : "no response") +
                               (r ? ": " + r->body : ""));
    }
    return r->body;
  };
  expect(http.Put("/pools/celeba-wgan", manifest.str(), "application/x-ndjson"), 201, "PUT pool");
  expect(http.Post("/runs",
                   nlohmann::json{{"run_id", "wgan-inf"},
                                  {"model_id", "wgan-gp"},
                                  {"dataset_id", "celeba-64"},
                                  {"mode", "infinity"},
                                  {"pool_id", "celeba-wgan"},
                                  {"target_evaluators", 30}}
                       .dump(),
                   "application/json"),
         201, "POST run");

  const InfinityBehaviorModel behavior{0.017, 0.059};
  for (int e = 0; e < 30; ++e) {
    Rng rng(derive_seed(810, static_cast<uint64_t>(e)));
    const std::string evaluator = fmt("worker-%02d", e);
    const auto session = nlohmann::json::parse(
        expect(http.Post("/runs/wgan-inf/sessions", nlohmann::json{{"evaluator_id", evaluator}}.dump(),
                         "application/json"),
               201, "POST session"));
    const std::string sid = session["session_id"];
    for (int seq = 0; seq < session["total"].get<int>(); ++seq) {
      const auto next = nlohmann::json::parse(expect(http.Get("/sessions/" + sid + "/next"), 200, "next"));
      const std::string bytes = expect(http.Get(next["image_uri"].get<std::string>()), 200, "image");
      const Label truth = oracle.truth(std::vector<unsigned char>(bytes.begin(), bytes.end()));
      const Label answer = behavior.respond(truth, rng);
      expect(http.Post("/sessions/" + sid + "/responses",
                       nlohmann::json{{"sequence", seq}, {"answer", std::string(to_string(answer))}}.dump(),
                       "application/json"),
             200, "response");
    }
  }
  const std::string live = expect(http.Get("/runs/wgan-inf/score"), 200, "score");
  server.stop();

  const auto replayed = service::replay_scores(platform.log_path(), config.server.data_dir / "runs");
  if (replayed.size() != 1) throw std::runtime_error("replay found " + std::to_string(replayed.size()) + " runs");
  const std::string offline = to_json(replayed[0].report).dump();
  const auto report = nlohmann::json::parse(live);
  const bool identical = live == offline;
  const bool complete = report["n_evaluators"] == 30 && report["partial"] == false;
  return {identical && complete,
          fmt("live and replayed reports %s (%zu bytes); score %.2f%% over %d evaluators, CI [%.2f, %.2f]",
              identical ? "byte-identical" : "DIFFER", live.size(), report["score"].get<double>(),
              report["n_evaluators"].get<int>(), report["ci_low"].get<double>(),
              report["ci_high"].get<double>())};
}

// 9. Task shapes and payment.
Outcome shapes_and_payment() {
  ImagePool pool;
  pool.pool_id = "p";
  for (int i = 0; i < 300; ++i) {
    pool.real_images.push_back({fmt("r%03d", i), Label::kReal, std::nullopt, std::nullopt, "mem://r", ""});
    pool.fake_images.push_back({fmt("f%03d", i), Label::kFake, std::string("m"), std::nullopt, "mem://f", ""});
  }
  auto count = [](const TaskAssignment& a, int block, Label l) {
    int n = 0;
    for (const auto& s : a.stimuli) n += s.block == block && s.truth == l ? 1 : 0;
    return n;
  };
  const TaskAssignment inf =
      make_assignment(pool, "run", "e", SessionMode::kInfinity, TaskShape::infinity(), 909);
  const bool inf_ok = inf.size() == 100 && count(inf, 0, Label::kFake) == 50 &&
                      count(inf, 0, Label::kReal) == 50;
  const TaskShape time_shape = TaskShape::time(StaircaseConfig{});
  const TaskAssignment time =
      make_assignment(pool, "run", "e", SessionMode::kTime, time_shape, 909);
  bool time_ok = time.size() == 450 && time_shape.blocks == 3 && time_shape.per_block == 150;
  for (int b = 0; b < 3; ++b) {
    time_ok = time_ok && count(time, b, Label::kFake) == 75 && count(time, b, Label::kReal) == 75;
  }
  std::vector<Judgment> js;
  for (int i = 0; i < 100; ++i) {
    js.push_back({"e", fmt("i%d", i), Label::kFake, i < 83 ? Label::kFake : Label::kReal});
  }
  const PaymentStatement pay = compute_payment("e", true, js);
  const bool pay_ok = pay.total.cents == 266 && pay.total.str() == "2.66";
  return {inf_ok && time_ok && pay_ok,
          fmt("infinity %zu trials %d/%d; time %d x %d at %d/%d per block; payment $%s",
              inf.size(), count(inf, 0, Label::kReal), count(inf, 0, Label::kFake),
              time_shape.blocks, time_shape.per_block, count(time, 0, Label::kReal),
              count(time, 0, Label::kFake), pay.total.str().c_str())};
}

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;  // 0 = none
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace hype::acceptance

int main() {
  using namespace hype::acceptance;
  const std::vector<Criterion> criteria = {
      {1, "staircase equilibrium", 10.0, staircase_equilibrium},
      {2, "staircase convergence", 60.0, staircase_convergence},
      {3, "score arithmetic", 0.0, score_arithmetic},
      {4, "rank correlation fixtures", 0.0, spearman_fixtures},
      {5, "bootstrap shrinkage", 30.0, bootstrap_shrinkage},
      {6, "qualification gate", 0.0, qualification_gate},
      {7, "separability", 0.0, separability},
      {8, "end-to-end determinism", 0.0, end_to_end_determinism},
      {9, "task shape and payment", 0.0, shapes_and_payment},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit_s > 0.0 && seconds >= c.time_limit_s) {
      out.pass = false;
      out.detail += fmt("; runtime %.2fs exceeds %.0fs", seconds, c.time_limit_s);
    }
    if (!out.pass) ++failures;
    std::printf("%s criterion %d (%s): %s [%.2fs]\n", out.pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
