// Acceptance suite: one PASS/FAIL line per criterion, exit code = number of
// failed criteria. Expected values are pinned here, not computed on the fly.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pic/cli.hpp"
#include "pic/dataset.hpp"
#include "pic/eval.hpp"
#include "pic/index.hpp"
#include "pic/oracle.hpp"
#include "pic/report_io.hpp"
#include "pic/search.hpp"
#include "../testutil.hpp"

using namespace pic;

namespace {

constexpr double kGolden = 1e-9;   // worked-example numbers
constexpr double kCross = 1e-12;   // cross-formula bound comparisons

struct Failure {
  std::string detail;
};

struct Check {
  std::vector<std::string> notes;
  std::vector<std::string> problems;

  void note(std::string s) { notes.push_back(std::move(s)); }
  void fail(std::string s) { problems.push_back(std::move(s)); }
  void expect(bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  }
  void expect_near(double got, double want, double tol, const std::string& what) {
    if (!(std::abs(got - want) <= tol))
      problems.push_back(what + ": got " + format_double(got) + ", want " +
                         format_double(want) + " +/- " + format_double(tol));
  }
};

std::string data_path(const std::string& name) {
  return std::string(PIC_DATA_DIR) + "/" + name;
}

SearchParams make_params(double alpha, std::uint32_t max_length = 100) {
  SearchParams p;
  p.score.alpha = alpha;
  p.max_length = max_length;
  return p;
}

// ---- criterion 1: worked-example goldens ----

void criterion1(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  auto t = picTest::table1();
  const ScoreParams half{0.5};

  auto level1 = seed_level_one(t.x, t.ds, t.idx, half);
  if (level1.size() != 4) {
    c.fail("expected 4 level-1 candidates, got " + std::to_string(level1.size()));
    return;
  }
  const double want1[] = {7.0 / 12.0, 5.0 / 12.0, 0.75, 7.0 / 12.0};
  const double want_con[] = {5.0 / 6.0, 2.0 / 3.0, 0.875, 5.0 / 6.0};
  for (int i = 0; i < 4; ++i) {
    c.expect_near(level1[i].a_score, want1[i], kGolden,
                  "level-1 score of feature " + std::to_string(i + 1));
    c.expect_near(level1[i].con, want_con[i], kGolden,
                  "level-1 con of feature " + std::to_string(i + 1));
  }

  // level-2 scores in enumeration order, one zero-coverage pair skipped
  auto oracle = run_oracle(t.x, t.ds, half);
  std::vector<double> level2;
  for (const auto& e : oracle.entries)
    if (e.itemset.size() == 2) level2.push_back(e.a_score);
  const std::vector<double> want2{0.75, 5.0 / 12.0, 2.0 / 3.0, 2.0 / 3.0, 7.0 / 12.0};
  if (level2.size() != want2.size()) {
    c.fail("expected 5 level-2 rules (one skip), got " + std::to_string(level2.size()));
  } else {
    for (std::size_t i = 0; i < want2.size(); ++i)
      c.expect_near(level2[i], want2[i], kGolden, "level-2 score #" + std::to_string(i + 1));
  }

  auto res = run_pic(t.x, t.ds, t.idx, make_params(0.5));
  if (!res.best) {
    c.fail("search returned no rule");
    return;
  }
  c.expect(res.best->rule.itemset == Itemset(std::vector<Predicate>{{2, 1}}),
           "returned rule is not {f3=c2}");
  c.expect(res.best->rule.label == 1 && res.predicted == 1, "prediction is not class 2");
  c.expect_near(res.best->a_score, 0.75, kGolden, "returned rule score");

  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  c.expect(ms < 250, "worked example took " + std::to_string(ms) + " ms, budget 250");
  c.note("runtime " + std::to_string(ms) + " ms");
}

// ---- criterion 2: bound discrepancy on {f1=a1, f3=c2} ----

void criterion2(Check& c) {
  auto t = picTest::table1();
  const ScoreParams half{0.5};
  auto level1 = seed_level_one(t.x, t.ds, t.idx, half);

  const auto& sup_a1 = level1[0].per_class_support;
  const auto& sup_c2 = level1[2].per_class_support;
  const double ub = upper_bound({&sup_c2, &sup_a1}, half);
  const double loose = min_con_bound({&sup_c2, &sup_a1}, half);

  Itemset s(std::vector<Predicate>{{0, 0}, {2, 1}});
  auto truth = best_label_for(s, count_coverage(s, t.idx), t.ds.class_counts, half);

  c.expect_near(ub, 0.75, kGolden, "max-min upper bound for {f1=a1, f3=c2}");
  c.expect_near(loose, 5.0 / 6.0, kGolden, "min-of-con bound for {f1=a1, f3=c2}");
  c.expect(ub >= truth.a_score - kCross, "upper bound below the true score");
  c.expect(loose >= truth.a_score - kCross, "diagnostic bound below the true score");
  c.note("ub " + format_double(ub) + ", min-con " + format_double(loose) + ", true A " +
         format_double(truth.a_score));
}

// ---- criteria 3 and 4: equivalence and soundness over random instances ----

constexpr int kInstances = 200;

double alpha_for(int seed) {
  const double alphas[] = {0.5, 0.7, 0.9};
  return alphas[seed % 3];
}

void criterion3(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  int disagreements = 0, prune_violations = 0;
  for (int seed = 0; seed < kInstances; ++seed) {
    auto inst = picTest::random_instance(seed);
    auto idx = build_index(inst.ds);
    const auto params = make_params(alpha_for(seed));

    PruneLog log;
    auto pic_res = run_pic(inst.x, inst.ds, idx, params, &log);
    auto naive_res = run_naive(inst.x, inst.ds, idx, params);
    auto oracle_res = run_oracle(inst.x, inst.ds, params.score);

    const bool have = pic_res.best.has_value();
    bool same = have == naive_res.best.has_value() &&
                have == oracle_res.greedy_choice.has_value() &&
                pic_res.predicted == naive_res.predicted &&
                pic_res.predicted == oracle_res.predicted;
    if (same && have) {
      same = pic_res.best->a_score == naive_res.best->a_score &&
             pic_res.best->a_score == oracle_res.greedy_choice->a_score &&
             pic_res.best->rule.itemset.size() == naive_res.best->rule.itemset.size() &&
             pic_res.best->rule.itemset == naive_res.best->rule.itemset &&
             pic_res.best->rule.itemset == oracle_res.greedy_choice->itemset;
    }
    if (!same) {
      ++disagreements;
      if (disagreements <= 3) c.fail("engines disagree on seed " + std::to_string(seed));
      continue;
    }

    if (!have) continue;
    const double best_a = pic_res.best->a_score;
    for (const auto& e : oracle_res.entries) {
      for (const auto& removed : log.ub_removed)
        if (removed.subset_of(e.itemset) && e.a_score > best_a + kCross) ++prune_violations;
      for (const auto& removed : log.con_removed)
        if (removed.subset_of(e.itemset) && e.itemset.size() > removed.size() &&
            e.a_score > best_a + kCross)
          ++prune_violations;
    }
  }
  const auto sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.expect(disagreements == 0, std::to_string(disagreements) + " disagreements");
  c.expect(prune_violations == 0,
           std::to_string(prune_violations) + " pruned rules could have won");
  c.expect(sec < 60.0, "suite took " + format_double(sec) + " s, budget 60");
  c.note(std::to_string(kInstances) + " instances in " + format_double(sec) + " s");
}

void criterion4(Check& c) {
  int score_violations = 0, mono_violations = 0;
  for (int seed = 0; seed < kInstances; ++seed) {
    auto inst = picTest::random_instance(seed);
    auto oracle_res = run_oracle(inst.x, inst.ds, ScoreParams{alpha_for(seed)});
    const double alpha = alpha_for(seed);

    std::map<std::string, const OracleEntry*> by_features;
    for (const auto& e : oracle_res.entries)
      by_features[pic::detail::feature_key(e.itemset)] = &e;

    for (const auto& e : oracle_res.entries) {
      if (e.itemset.size() < 2) continue;
      std::vector<const std::vector<double>*> subs;
      for (std::size_t skip = 0; skip < e.itemset.size(); ++skip) {
        auto it = by_features.find(pic::detail::feature_key(e.itemset, skip));
        if (it == by_features.end()) {
          ++mono_violations;  // a super-rule covered rows its sub-rule missed
          subs.clear();
          break;
        }
        const auto* sub = it->second;
        subs.push_back(&sub->per_class_support);

        double max_sup = 0;
        for (std::size_t cls = 0; cls < sub->per_class_support.size(); ++cls) {
          max_sup = std::max(max_sup, sub->per_class_support[cls]);
          if (e.per_class_support[cls] > sub->per_class_support[cls]) ++mono_violations;
        }
        const double con = alpha + (1 - alpha) * max_sup;
        if (e.a_score > con + kCross) ++score_violations;
      }
      if (!subs.empty() && e.a_score > upper_bound(subs, ScoreParams{alpha}) + kCross)
        ++score_violations;
    }
  }
  c.expect(score_violations == 0, std::to_string(score_violations) + " bound violations");
  c.expect(mono_violations == 0,
           std::to_string(mono_violations) + " anti-monotonicity violations");
}

// ---- criteria 5 and 6: benchmark accuracies and rule lengths ----

struct BenchRun {
  std::string dataset;
  double alpha;
  std::optional<EvalReport> report;  // absent when the data file is missing
};

struct BenchSpec {
  std::string file;
  bool all_categorical;
  double alpha;
  double want;
  double tol;
  bool gate_accuracy;  // criterion 5 checks this run; extra runs feed criterion 6
};

std::map<std::string, std::map<double, EvalReport>> bench_cache;

std::optional<EvalReport> run_bench(const std::string& file, bool all_categorical, double alpha) {
  const auto path = data_path(file);
  if (!std::filesystem::exists(path)) return std::nullopt;
  if (auto d = bench_cache.find(file); d != bench_cache.end())
    if (auto r = d->second.find(alpha); r != d->second.end()) return r->second;

  std::ifstream in(path);
  LoadConfig load;
  load.all_categorical = all_categorical;
  auto raw = load_dataset(in, load);

  CvConfig cfg;
  cfg.folds = 5;
  cfg.repeats = 5;
  cfg.seed = 1;
  cfg.search = make_params(alpha);
  auto report = run_cv(raw, cfg, load);
  bench_cache[file][alpha] = report;
  return report;
}

const std::vector<BenchSpec> kBenchmarks{
    {"tictactoe.csv", false, 0.9, 0.971, 0.03, true},
    {"tictactoe.csv", false, 0.7, 0.683, 0.05, true},
    {"monks3.csv", true, 0.9, 0.972, 0.03, true},
    {"monks3.csv", true, 0.7, 0, 0, false},
    {"banknote.csv", false, 0.9, 0.971, 0.03, true},
    {"banknote.csv", false, 0.7, 0, 0, false},
    {"vote.csv", false, 0.7, 0.958, 0.03, true},
    {"vote.csv", false, 0.9, 0, 0, false},
    {"breastcancer.csv", true, 0.7, 0.747, 0.05, true},
    {"breastcancer.csv", true, 0.9, 0, 0, false},
};

void criterion5(Check& c) {
  for (const auto& b : kBenchmarks) {
    if (!b.gate_accuracy) continue;
    auto report = run_bench(b.file, b.all_categorical, b.alpha);
    if (!report) {
      c.fail(b.file + " missing under data/; fetch it with scripts/fetch_uci_datasets.sh");
      continue;
    }
    c.expect_near(report->accuracy_mean, b.want, b.tol,
                  b.file + " accuracy at alpha " + format_double(b.alpha));
    c.note(b.file + " alpha " + format_double(b.alpha) + ": accuracy " +
           format_double(report->accuracy_mean));
  }

  if (std::getenv("PIC_ACCEPT_MUSHROOM")) {
    const auto path = data_path("mushroom.csv");
    if (!std::filesystem::exists(path)) {
      c.fail("PIC_ACCEPT_MUSHROOM set but mushroom.csv is missing");
    } else {
      std::ifstream in(path);
      LoadConfig load;
      load.all_categorical = true;
      auto raw = load_dataset(in, load);
      CvConfig cfg;
      cfg.folds = 5;
      cfg.repeats = 5;
      cfg.seed = 1;
      cfg.search = make_params(0.9, 3);
      auto report = run_cv(raw, cfg, load);
      c.expect_near(report.accuracy_mean, 0.989, 0.02, "mushroom accuracy at maxL 3");
      c.expect(report.n_distinct_rules >= 15 && report.n_distinct_rules <= 35,
               "mushroom distinct rules " + std::to_string(report.n_distinct_rules) +
                   ", expected a ~23-rule pool");
      if (report.rules.size() >= 2) {
        const auto top2 = report.rules[0].count + report.rules[1].count;
        c.expect(2 * top2 > report.total_predictions,
                 "two dominant rules cover under half the predictions");
      }
      c.note("mushroom: accuracy " + format_double(report.accuracy_mean) + ", " +
             std::to_string(report.n_distinct_rules) + " distinct rules");
    }
  } else {
    c.note("mushroom check skipped (set PIC_ACCEPT_MUSHROOM=1 to run it)");
  }
}

void criterion6(Check& c) {
  std::map<std::string, bool> seen;
  for (const auto& b : kBenchmarks) seen[b.file] = false;
  for (const auto& b : kBenchmarks) {
    if (seen[b.file]) continue;
    seen[b.file] = true;
    if (!std::filesystem::exists(data_path(b.file))) {
      c.fail(b.file + " missing under data/; fetch it with scripts/fetch_uci_datasets.sh");
      continue;
    }
    const bool cat = b.all_categorical;
    auto strict = run_bench(b.file, cat, 0.9);
    auto lax = run_bench(b.file, cat, 0.7);
    c.expect(strict->avg_rule_length < 4.0,
             b.file + " avg rule length " + format_double(strict->avg_rule_length) + " >= 4");
    c.expect(lax->avg_rule_length < 4.0,
             b.file + " avg rule length " + format_double(lax->avg_rule_length) + " >= 4");
    c.expect(lax->avg_rule_length < strict->avg_rule_length,
             b.file + ": recall-leaning alpha should give shorter rules (0.7: " +
                 format_double(lax->avg_rule_length) + ", 0.9: " +
                 format_double(strict->avg_rule_length) + ")");
    c.note(b.file + " lengths: alpha 0.7 " + format_double(lax->avg_rule_length) +
           ", alpha 0.9 " + format_double(strict->avg_rule_length));
  }
}

// ---- criterion 7: byte-identical outputs across reruns and thread counts ----

void criterion7(Check& c) {
  auto run_with = [&](std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    if (code != 0) c.fail("command exited " + std::to_string(code));
    return out.str();
  };

  if (!std::filesystem::exists(data_path("tictactoe.csv"))) {
    c.fail("tictactoe.csv missing under data/");
    return;
  }

  const std::vector<std::string> cv_base{
      "crossval", "--data", data_path("tictactoe.csv"), "--folds", "5",
      "--repeats", "1",     "--seed", "7", "--alpha", "0.9"};
  auto with_threads = [&](const std::vector<std::string>& base, const std::string& n) {
    auto args = base;
    args.insert(args.end(), {"--threads", n});
    return run_with(args);
  };
  const auto cv1 = with_threads(cv_base, "1");
  c.expect(cv1 == with_threads(cv_base, "1"), "crossval rerun differs");
  c.expect(cv1 == with_threads(cv_base, "4"), "crossval differs across thread counts");

  // a small holdout file for predict
  std::ifstream in(data_path("tictactoe.csv"));
  std::string line, holdout;
  for (int i = 0; i <= 50 && std::getline(in, line); ++i) holdout += line + "\n";
  const auto holdout_path =
      (std::filesystem::temp_directory_path() / "pic_accept_holdout.csv").string();
  std::ofstream(holdout_path) << holdout;

  const std::vector<std::string> pr_base{"predict", "--data", data_path("tictactoe.csv"),
                                         "--test", holdout_path, "--alpha", "0.9"};
  const auto pr1 = with_threads(pr_base, "1");
  c.expect(pr1 == with_threads(pr_base, "1"), "predict rerun differs");
  c.expect(pr1 == with_threads(pr_base, "4"), "predict differs across thread counts");
  c.note("crossval and predict byte-stable across reruns and threads 1 vs 4");
}

// ---- criterion 8: the 3-bin, length-2, 30-sample holdout protocol ----

void criterion8(Check& c) {
  Rng rng(20240818);
  const int n = 581, m = 12;
  std::ostringstream csv;
  for (int j = 0; j < m; ++j) csv << "v" << j << ",";
  csv << "diagnosis\n";
  std::ostringstream test_csv;
  test_csv << csv.str();
  for (int i = 0; i < n; ++i) {
    double score = 0;
    std::string row;
    for (int j = 0; j < m; ++j) {
      const double v = rng.unit() * 10;
      score += (j % 3 == 0 ? v : 0.2 * v);
      row += format_double(v) + ",";
    }
    row += (score + 2 * rng.unit() > 22 ? "pos" : "neg");
    (i < n - 30 ? csv : test_csv) << row << "\n";
  }
  const auto dir = std::filesystem::temp_directory_path();
  const auto train_path = (dir / "pic_accept_c8_train.csv").string();
  const auto test_path = (dir / "pic_accept_c8_test.csv").string();
  std::ofstream(train_path) << csv.str();
  std::ofstream(test_path) << test_csv.str();

  std::ostringstream out, err;
  const int code = cli::run({"predict", "--data", train_path, "--test", test_path, "--bins", "3",
                             "--max-length", "2", "--alpha", "0.7"},
                            out, err);
  if (code != 0) {
    c.fail("predict exited " + std::to_string(code) + ": " + err.str());
    return;
  }
  auto records = nlohmann::json::parse(out.str(), nullptr, false);
  if (records.is_discarded() || !records.is_array()) {
    c.fail("predict output is not a JSON array");
    return;
  }
  c.expect(records.size() == 30, "expected 30 records, got " + std::to_string(records.size()));
  for (const auto& rec : records) {
    const std::string label = rec["predicted_label"].get<std::string>();
    if (label != "pos" && label != "neg") c.fail("unexpected label " + label);
    if (!rec["rule"].is_null() && rec["rule"]["length"].get<int>() > 2)
      c.fail("rule longer than the length cap");
  }
  c.note("30 holdout records, 3 bins, rules capped at length 2");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string title;
    std::function<void(Check&)> fn;
  };
  const std::vector<Criterion> criteria{
      {1, "worked-example goldens", criterion1},
      {2, "bound discrepancy on the worked example", criterion2},
      {3, "engine equivalence over seeded instances", criterion3},
      {4, "bound soundness and anti-monotonicity", criterion4},
      {5, "benchmark accuracies", criterion5},
      {6, "rule lengths stay short", criterion6},
      {7, "byte-identical reruns", criterion7},
      {8, "three-bin length-two holdout protocol", criterion8},
  };

  int failed = 0;
  for (const auto& cr : criteria) {
    Check check;
    try {
      cr.fn(check);
    } catch (const std::exception& e) {
      check.fail(std::string("exception: ") + e.what());
    }
    for (const auto& n : check.notes) std::cout << "    " << n << "\n";
    for (const auto& p : check.problems) std::cout << "    problem: " << p << "\n";
    const bool ok = check.problems.empty();
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << cr.id << ": " << cr.title << "\n";
    if (!ok) ++failed;
  }
  if (failed) std::cout << failed << " of " << criteria.size() << " criteria failed\n";
  return failed ? 1 : 0;
}
