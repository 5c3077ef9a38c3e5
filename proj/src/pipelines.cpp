// Copyright 2026 The tabground Authors.
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

#include "tabground/pipelines.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include "tabground/synthetic.hpp"
#include "tabground/text.hpp"

namespace tabground {

namespace {

template <typename Record>
void sort_records(std::vector<Record>& records) {
  std::stable_sort(records.begin(), records.end(), [](const Record& a, const Record& b) {
    return std::tie(a.id, a.dataset) < std::tie(b.id, b.dataset);
  });
}

std::optional<double> mean_of(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

nlohmann::json to_json(const DatasetMean& m) {
  return {{"n_valid", m.n_valid}, {"n_invalid", m.n_invalid}, {"mean_auroc", opt(m.mean)}};
}

}  // namespace

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<ScoredLabel> flatten_cells(const CellAttention& attn, const CellMask& mask) {
  if (!attn.same_shape(mask)) throw ShapeMismatch("attention shape does not match mask");
  std::vector<ScoredLabel> out;
  out.reserve(static_cast<std::size_t>(attn.rows() * attn.cols()));
  for (Eigen::Index r = 0; r < attn.rows(); ++r) {
    for (Eigen::Index c = 0; c < attn.cols(); ++c) out.push_back({attn.scores(r, c), mask.test(r, c)});
  }
  return out;
}

CellAttention attend_standard(const AttentionBackend& backend, const AttentionStandard& standard) {
  const Serialized serialized = serialize(standard.table);
  CellAttention attn = backend.attend({standard.id, standard.question, standard.table, serialized, 0, &standard.mask});
  attn.validate();
  if (!attn.same_shape(standard.mask)) throw ShapeMismatch("backend attention does not match the table shape");
  return attn;
}

AurocReport eval_auroc(const std::vector<AttentionStandard>& standards, const AttentionBackend& backend,
                       const PipelineOptions& options) {
  AurocReport report;
  report.records.resize(standards.size());
  parallel_for(standards.size(), options.workers, [&](std::size_t i) {
    const auto& s = standards[i];
    AurocRecord& rec = report.records[i];
    rec.id = s.id;
    rec.dataset = s.dataset;
    try {
      const auto labels = flatten_cells(attend_standard(backend, s), s.mask);
      rec.auroc = auroc(labels);
      rec.status = "ok";
    } catch (const SingleClass& e) {
      rec.status = "invalid";
      rec.detail = e.what();
    } catch (const Error& e) {
      rec.status = "error";
      rec.detail = e.kind() + ": " + e.what();
    }
  });
  sort_records(report.records);

  std::map<std::string, std::vector<double>> values;
  std::vector<double> all;
  for (const auto& rec : report.records) {
    auto& m = report.per_dataset[rec.dataset];
    if (rec.auroc) {
      ++m.n_valid;
      ++report.overall.n_valid;
      values[rec.dataset].push_back(*rec.auroc);
      all.push_back(*rec.auroc);
    } else {
      ++m.n_invalid;
      ++report.overall.n_invalid;
    }
  }
  for (auto& [dataset, m] : report.per_dataset) m.mean = mean_of(values[dataset]);
  report.overall.mean = mean_of(all);
  return report;
}

std::vector<std::size_t> view_permutation(std::string_view id, std::size_t n_rows, std::size_t view,
                                          std::uint64_t seed) {
  std::vector<std::size_t> perm(n_rows);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  if (view == 0) return perm;
  std::mt19937_64 rng(mix64(mix64(seed, fnv1a64(id)), view));
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

PermReport eval_perm_stability(const std::vector<AttentionStandard>& standards, const AttentionBackend& backend,
                               std::size_t views, std::uint64_t seed, const PipelineOptions& options) {
  if (views < 1) throw InvalidArgument("need at least one view");
  PermReport report;
  report.views = views;
  report.seed = seed;
  report.records.resize(standards.size());
  parallel_for(standards.size(), options.workers, [&](std::size_t i) {
    const auto& s = standards[i];
    PermRecord& rec = report.records[i];
    rec.id = s.id;
    rec.dataset = s.dataset;
    try {
      std::vector<double> valid;
      for (std::size_t k = 0; k < views; ++k) {
        const auto perm = view_permutation(s.id, s.table.n_rows(), k, seed);
        auto [table, mask] = permute_rows(s.table, s.mask, perm);
        const AttentionStandard view{s.id, s.dataset, s.question, std::move(table), std::move(mask)};
        try {
          const double a = auroc(flatten_cells(attend_standard(backend, view), view.mask));
          rec.view_aurocs.push_back(a);
          valid.push_back(a);
        } catch (const SingleClass&) {
          rec.view_aurocs.push_back(std::nullopt);
        }
      }
      rec.sigma = perm_sigma(valid);
      rec.status = rec.sigma ? "ok" : "dropped";
    } catch (const Error& e) {
      rec.status = "error";
      rec.detail = e.kind() + ": " + e.what();
    }
  });
  sort_records(report.records);

  std::vector<double> sigmas;
  for (const auto& rec : report.records) {
    if (rec.sigma) {
      sigmas.push_back(*rec.sigma);
    } else {
      ++report.n_dropped;
    }
  }
  report.n_valid = sigmas.size();
  report.mean_sigma = mean_of(sigmas);
  if (!sigmas.empty()) report.max_sigma = *std::max_element(sigmas.begin(), sigmas.end());
  return report;
}

FalsificationReport eval_falsification(const std::vector<AttentionStandard>& standards,
                                       const AttentionBackend& backend, const FalsificationOptions& spec,
                                       const PipelineOptions& options) {
  if (spec.kinds.empty()) throw InvalidArgument("no null kinds requested");
  FalsificationReport report;
  report.records.resize(standards.size());
  parallel_for(standards.size(), options.workers, [&](std::size_t i) {
    const auto& s = standards[i];
    FalsificationRecord& rec = report.records[i];
    rec.id = s.id;
    rec.dataset = s.dataset;
    try {
      const CellAttention attn = attend_standard(backend, s);
      const std::uint64_t record_seed = mix64(spec.seed, fnv1a64(s.id));
      for (std::size_t k = 0; k < spec.kinds.size(); ++k) {
        const NullMaskSpec null_spec{spec.kinds[k], spec.draws, mix64(record_seed, k)};
        const FalsificationResult result = falsification_ratio(attn, s.mask, null_spec, spec.r_attn);
        rec.gt_score = result.gt_score;
        const std::string kind(to_string(spec.kinds[k]));
        rec.mean_null[kind] = result.mean_null_score;
        rec.ratio[kind] = result.ratio;
      }
      rec.status = "ok";
    } catch (const EmptyMask& e) {
      rec.status = "skipped";
      rec.detail = e.what();
    } catch (const Error& e) {
      rec.status = "error";
      rec.detail = e.kind() + ": " + e.what();
    }
  });
  sort_records(report.records);

  std::vector<double> gt;
  std::map<std::string, std::vector<double>> nulls;
  std::map<std::string, std::vector<double>> ratios;
  for (const auto& rec : report.records) {
    if (rec.status == "skipped") ++report.n_skipped;
    if (rec.status == "error") ++report.n_errors;
    if (rec.status != "ok") continue;
    gt.push_back(rec.gt_score);
    for (const auto& [kind, v] : rec.mean_null) nulls[kind].push_back(v);
    for (const auto& [kind, v] : rec.ratio) ratios[kind].push_back(v);
  }
  report.n_used = gt.size();
  report.mean_gt = mean_of(gt).value_or(0.0);
  for (const auto& [kind, v] : nulls) {
    report.mean_null[kind] = *mean_of(v);
    report.ratio[kind] = report.mean_gt / std::max(report.mean_null[kind], spec.r_attn.epsilon);
  }
  for (const auto& [kind, v] : ratios) report.mean_record_ratio[kind] = *mean_of(v);

  const std::string cell(to_string(NullKind::shuffle_cell));
  if (gt.size() < 2) {
    report.wilcoxon_note = "fewer than two usable records";
  } else if (!nulls.contains(cell)) {
    report.wilcoxon_note = "cell-shuffle nulls not requested";
  } else {
    std::vector<double> diffs(gt.size());
    for (std::size_t i = 0; i < gt.size(); ++i) diffs[i] = gt[i] - nulls[cell][i];
    try {
      report.wilcoxon = wilcoxon_signed_rank(diffs);
    } catch (const AllZeroDiffs& e) {
      report.wilcoxon_note = e.what();
    }
  }
  return report;
}

LabelRecord label_from_json(const nlohmann::json& j) {
  try {
    LabelRecord r{j.at("id").get<std::string>(), j.value("dataset", std::string()), j.at("unit").get<std::string>(),
                  j.at("label").get<std::string>()};
    if (r.unit != "cell" && r.unit != "step") throw FormatError("unit must be \"cell\" or \"step\", got " + r.unit);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad label record: ") + e.what());
  }
}

std::vector<LabelRecord> read_labels(const std::filesystem::path& path) {
  std::vector<LabelRecord> out;
  std::size_t line = 0;
  for (const auto& j : read_jsonl(path)) {
    ++line;
    try {
      out.push_back(label_from_json(j));
    } catch (const FormatError& e) {
      throw FormatError(path.string() + " record " + std::to_string(line) + ": " + e.what());
    }
  }
  return out;
}

LabelabilityReport eval_labelability(const std::vector<LabelRecord>& judge, const std::vector<LabelRecord>& human) {
  LabelabilityReport report;
  std::map<std::pair<std::string, std::string>, const LabelRecord*> judge_by_key;
  for (const auto& r : judge) judge_by_key[{r.unit, r.id}] = &r;
  std::map<std::pair<std::string, std::string>, const LabelRecord*> human_by_key;
  for (const auto& r : human) human_by_key[{r.unit, r.id}] = &r;

  // unit -> dataset -> (judge labels, human labels)
  std::map<std::string, std::map<std::string, std::pair<std::vector<std::string>, std::vector<std::string>>>> groups;
  for (const auto& [key, h] : human_by_key) {
    const auto it = judge_by_key.find(key);
    if (it == judge_by_key.end()) {
      report.join_misses.push_back(key.first + ":" + key.second);
      continue;
    }
    const std::string human_label = normalize_text(h->label);
    if (h->unit == "step" && human_label == "unsure") {
      ++report.n_excluded_unsure;
      continue;
    }
    ++report.n_joined;
    const std::string judge_label = normalize_text(it->second->label);
    const std::string dataset = h->dataset.empty() ? it->second->dataset : h->dataset;
    for (const std::string& d : {dataset, std::string("pooled")}) {
      auto& g = groups[h->unit][d];
      g.first.push_back(judge_label);
      g.second.push_back(human_label);
    }
  }
  for (const auto& [key, j] : judge_by_key) {
    if (!human_by_key.contains(key)) report.join_misses.push_back(key.first + ":" + key.second);
  }
  std::sort(report.join_misses.begin(), report.join_misses.end());

  for (const auto& [unit, by_dataset] : groups) {
    for (const auto& [dataset, labels] : by_dataset) {
      AgreementStats stats;
      stats.n = labels.first.size();
      stats.agreement = agreement(labels.first, labels.second);
      try {
        stats.kappa = cohens_kappa(labels.first, labels.second);
      } catch (const DegenerateMarginals& e) {
        stats.note = e.what();
      }
      report.by_unit[unit][dataset] = std::move(stats);
    }
  }
  return report;
}

nlohmann::json to_json(const TestResult& r) {
  return {{"statistic", r.statistic}, {"p_two_sided", r.p_two_sided}, {"p_greater", r.p_greater},
          {"p_less", r.p_less},       {"exact", r.exact},             {"n", r.n}};
}

nlohmann::json to_json(const AurocReport& report) {
  nlohmann::json j = {{"records", nlohmann::json::array()}, {"per_dataset", nlohmann::json::object()},
                      {"overall", to_json(report.overall)}};
  for (const auto& r : report.records) {
    nlohmann::json rec = {{"id", r.id}, {"dataset", r.dataset}, {"status", r.status}, {"auroc", opt(r.auroc)}};
    if (!r.detail.empty()) rec["detail"] = r.detail;
    j["records"].push_back(std::move(rec));
  }
  for (const auto& [d, m] : report.per_dataset) j["per_dataset"][d] = to_json(m);
  return j;
}

nlohmann::json to_json(const PermReport& report) {
  nlohmann::json j = {{"views", report.views},         {"seed", report.seed},
                      {"n_valid", report.n_valid},     {"n_dropped", report.n_dropped},
                      {"mean_sigma", opt(report.mean_sigma)}, {"max_sigma", opt(report.max_sigma)},
                      {"records", nlohmann::json::array()}};
  for (const auto& r : report.records) {
    nlohmann::json views = nlohmann::json::array();
    for (const auto& v : r.view_aurocs) views.push_back(opt(v));
    nlohmann::json rec = {{"id", r.id},         {"dataset", r.dataset}, {"status", r.status},
                          {"view_aurocs", views}, {"sigma", opt(r.sigma)}};
    if (!r.detail.empty()) rec["detail"] = r.detail;
    j["records"].push_back(std::move(rec));
  }
  return j;
}

nlohmann::json to_json(const FalsificationReport& report) {
  nlohmann::json j = {{"n_used", report.n_used},
                      {"n_skipped", report.n_skipped},
                      {"n_errors", report.n_errors},
                      {"mean_gt_score", report.mean_gt},
                      {"mean_null_score", report.mean_null},
                      {"ratio", report.ratio},
                      {"mean_record_ratio", report.mean_record_ratio},
                      {"wilcoxon", report.wilcoxon ? to_json(*report.wilcoxon) : nlohmann::json(nullptr)},
                      {"records", nlohmann::json::array()}};
  if (!report.wilcoxon_note.empty()) j["wilcoxon_note"] = report.wilcoxon_note;
  for (const auto& r : report.records) {
    nlohmann::json rec = {{"id", r.id}, {"dataset", r.dataset}, {"status", r.status}};
    if (r.status == "ok") {
      rec["gt_score"] = r.gt_score;
      rec["mean_null_score"] = r.mean_null;
      rec["ratio"] = r.ratio;
    }
    if (!r.detail.empty()) rec["detail"] = r.detail;
    j["records"].push_back(std::move(rec));
  }
  return j;
}

nlohmann::json to_json(const LabelabilityReport& report) {
  nlohmann::json j = {{"n_joined", report.n_joined},
                      {"n_excluded_unsure", report.n_excluded_unsure},
                      {"join_misses", report.join_misses},
                      {"units", nlohmann::json::object()}};
  for (const auto& [unit, by_dataset] : report.by_unit) {
    for (const auto& [dataset, s] : by_dataset) {
      nlohmann::json stats = {{"n", s.n}, {"agreement", opt(s.agreement)}, {"kappa", opt(s.kappa)}};
      if (!s.note.empty()) stats["note"] = s.note;
      j["units"][unit][dataset] = std::move(stats);
    }
  }
  return j;
}

}  // namespace tabground
