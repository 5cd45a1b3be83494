// Copyright 2026 The Tailor Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailor/selection.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "tailor/error.hpp"
#include "tailor/parallel.hpp"
#include "tailor/spectral.hpp"

namespace tailor {
namespace {

std::vector<std::vector<std::size_t>> samples_by_task(const Dataset& dataset) {
  std::vector<std::vector<std::size_t>> by_task(dataset.tasks.size());
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    by_task[dataset.samples[i].task_id].push_back(i);
  }
  return by_task;
}

PointSet sample_points(const Dataset& dataset, std::span<const std::size_t> positions) {
  const std::size_t dim = dataset.dim();
  PointSet points(positions.size(), dim);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const auto p = last_token_feature(dataset.samples[positions[i]]);
    std::copy(p.begin(), p.end(), points[i].begin());
  }
  return points;
}

void require_valid(const Dataset& dataset) {
  if (dataset.tasks.empty() || dataset.samples.empty()) {
    throw Error(ErrorKind::kInvalidDataset, "dataset has no tasks or no samples");
  }
  const auto report = validate(dataset);
  if (!report.ok()) throw Error(ErrorKind::kInvalidDataset, report.summary());
}

double euclidean(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = static_cast<double>(a[k]) - static_cast<double>(b[k]);
    s += d * d;
  }
  return std::sqrt(s);
}

// Inputs shared by both evaluate_subset entry points.
struct EvaluationView {
  std::span<const ClusterSet> clusters;
  std::vector<std::vector<double>> tau;
  std::vector<std::size_t> local_index;  // dataset position -> position within its task
};

EvaluationView make_view(const Dataset& dataset, std::span<const ClusterSet> clusters) {
  if (clusters.size() != dataset.tasks.size()) {
    throw Error(ErrorKind::kInvalidArgument, "need one cluster set per task");
  }
  EvaluationView view{clusters, {}, std::vector<std::size_t>(dataset.samples.size())};
  const auto by_task = samples_by_task(dataset);
  for (std::size_t t = 0; t < by_task.size(); ++t) {
    if (clusters[t].assignment.size() != by_task[t].size()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "cluster set for task " + std::to_string(t) + " has wrong size");
    }
    for (std::size_t i = 0; i < by_task[t].size(); ++i) view.local_index[by_task[t][i]] = i;
    view.tau.push_back(representative_coefficients(clusters[t]));
  }
  return view;
}

template <typename InfOf>
PrincipleMetrics evaluate(const Dataset& dataset, const EvaluationView& view,
                          std::span<const SampleId> subset, InfOf&& inf_of) {
  if (subset.empty()) throw Error(ErrorKind::kInvalidArgument, "empty subset");
  std::unordered_map<SampleId, std::size_t> position;
  position.reserve(dataset.samples.size());
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) position.emplace(dataset.samples[i].id, i);

  std::vector<std::size_t> chosen;
  chosen.reserve(subset.size());
  for (SampleId id : subset) {
    const auto it = position.find(id);
    if (it == position.end()) throw Error(ErrorKind::kUnknownId, std::to_string(id));
    chosen.push_back(it->second);
  }
  std::sort(chosen.begin(), chosen.end());
  chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());

  PrincipleMetrics m;
  m.subset_size = chosen.size();
  std::vector<std::vector<std::size_t>> chosen_by_task(dataset.tasks.size());
  std::vector<std::vector<char>> covered(dataset.tasks.size());
  for (std::size_t t = 0; t < dataset.tasks.size(); ++t) {
    covered[t].assign(view.clusters[t].count, 0);
  }
  double inf_sum = 0.0;
  double tau_sum = 0.0;
  for (std::size_t pos : chosen) {
    const std::size_t t = dataset.samples[pos].task_id;
    const std::size_t c = view.clusters[t].assignment[view.local_index[pos]];
    inf_sum += inf_of(pos);
    tau_sum += view.tau[t][c];
    covered[t][c] = 1;
    chosen_by_task[t].push_back(pos);
  }
  const double n = static_cast<double>(chosen.size());
  m.mean_informativeness = inf_sum / n;
  m.representativeness_proxy = tau_sum / n;

  std::size_t total_clusters = 0;
  std::size_t hit = 0;
  for (const auto& c : covered) {
    total_clusters += c.size();
    hit += static_cast<std::size_t>(std::count(c.begin(), c.end(), 1));
  }
  m.cluster_coverage = total_clusters == 0 ? 0.0 : static_cast<double>(hit) / total_clusters;

  // Nearest-neighbor distance inside the subset, averaged per task, then over
  // the tasks holding at least two chosen samples.
  double task_sum = 0.0;
  std::size_t task_count = 0;
  for (const auto& members : chosen_by_task) {
    if (members.size() < 2) continue;
    double sum = 0.0;
    for (std::size_t a : members) {
      double nearest = std::numeric_limits<double>::infinity();
      const auto pa = last_token_feature(dataset.samples[a]);
      for (std::size_t b : members) {
        if (a == b) continue;
        nearest = std::min(nearest, euclidean(pa, last_token_feature(dataset.samples[b])));
      }
      sum += nearest;
    }
    task_sum += sum / static_cast<double>(members.size());
    ++task_count;
  }
  m.uniqueness_proxy = task_count == 0 ? 0.0 : task_sum / static_cast<double>(task_count);
  return m;
}

}  // namespace

void SelectionConfig::validate() const {
  if (!(k > 0.0 && k <= 1.0)) throw Error(ErrorKind::kInvalidArgument, "k must lie in (0, 1]");
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "lambda must lie in (0, 1]");
  }
}

std::size_t TaskPlan::total_count() const noexcept {
  std::size_t total = 0;
  for (const auto& t : tasks) total += t.count;
  return total;
}

double synergistic_value(double v_inf, double v_uni, double v_rep, std::uint32_t rounds) {
  if (rounds < 1) throw Error(ErrorKind::kInvalidArgument, "rounds must be >= 1");
  const double r = rounds;
  return r / (r + 2.0) * v_inf + 1.0 / (r + 2.0) * (v_uni + v_rep);
}

TaskPlan task_proportions(std::span<const double> difficulties, std::span<const std::size_t> sizes,
                          double k) {
  if (difficulties.empty()) throw Error(ErrorKind::kInvalidArgument, "no tasks to plan");
  if (difficulties.size() != sizes.size()) {
    throw Error(ErrorKind::kInvalidArgument, "difficulty and size lists differ in length");
  }
  if (!(k > 0.0 && k <= 1.0)) throw Error(ErrorKind::kInvalidArgument, "k must lie in (0, 1]");
  const std::size_t n_tasks = sizes.size();

  TaskPlan plan;
  plan.k = k;
  double weight_sum = 0.0;
  std::size_t total_size = 0;
  for (std::size_t p = 0; p < n_tasks; ++p) {
    if (!(difficulties[p] > 0.0 && difficulties[p] <= 1.0)) {
      throw Error(ErrorKind::kInvalidArgument, "task difficulty outside (0, 1]");
    }
    if (sizes[p] == 0) throw Error(ErrorKind::kInvalidArgument, "empty task");
    weight_sum += difficulties[p] * difficulties[p] * static_cast<double>(sizes[p]);
    total_size += sizes[p];
  }
  for (std::size_t p = 0; p < n_tasks; ++p) {
    const double w = difficulties[p] * difficulties[p] * static_cast<double>(sizes[p]);
    plan.tasks.push_back({p, difficulties[p], sizes[p], w / weight_sum * k, 0});
  }

  const auto target =
      static_cast<std::size_t>(std::llround(k * static_cast<double>(total_size)));
  std::vector<char> capped(n_tasks, 0);
  while (true) {
    std::size_t remaining = target;
    double open_share = 0.0;
    for (std::size_t p = 0; p < n_tasks; ++p) {
      if (capped[p]) {
        remaining -= sizes[p];
      } else {
        open_share += plan.tasks[p].share;
      }
    }
    if (open_share == 0.0) break;  // every task is capped

    std::vector<double> quota(n_tasks, 0.0);
    bool newly_capped = false;
    for (std::size_t p = 0; p < n_tasks; ++p) {
      if (capped[p]) continue;
      quota[p] = static_cast<double>(remaining) * plan.tasks[p].share / open_share;
      if (quota[p] > static_cast<double>(sizes[p])) {
        capped[p] = 1;
        newly_capped = true;
      }
    }
    if (newly_capped) continue;

    // Largest-remainder rounding keeps the integer total exact.
    std::size_t assigned = 0;
    std::vector<std::size_t> order;
    for (std::size_t p = 0; p < n_tasks; ++p) {
      if (capped[p]) {
        plan.tasks[p].count = sizes[p];
        continue;
      }
      plan.tasks[p].count = static_cast<std::size_t>(std::floor(quota[p]));
      assigned += plan.tasks[p].count;
      order.push_back(p);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return quota[a] - std::floor(quota[a]) > quota[b] - std::floor(quota[b]);
    });
    std::size_t leftover = remaining - std::min(assigned, remaining);
    while (leftover > 0) {
      bool progressed = false;
      for (std::size_t p : order) {
        if (leftover == 0) break;
        if (plan.tasks[p].count < sizes[p]) {
          ++plan.tasks[p].count;
          --leftover;
          progressed = true;
        }
      }
      if (!progressed) break;
    }
    break;
  }
  if (std::all_of(capped.begin(), capped.end(), [](char c) { return c != 0; })) {
    for (std::size_t p = 0; p < n_tasks; ++p) plan.tasks[p].count = sizes[p];
  }

  // Every task gets at least one sample when the budget covers all tasks.
  if (target >= n_tasks) {
    for (std::size_t p = 0; p < n_tasks; ++p) {
      if (plan.tasks[p].count > 0) continue;
      std::optional<std::size_t> donor;
      for (std::size_t q = 0; q < n_tasks; ++q) {
        if (plan.tasks[q].count > 1 && (!donor || plan.tasks[q].count > plan.tasks[*donor].count)) {
          donor = q;
        }
      }
      if (!donor) break;
      --plan.tasks[*donor].count;
      ++plan.tasks[p].count;
    }
  }
  return plan;
}

Scoring score(const Dataset& dataset, const SelectionConfig& config) {
  config.validate();
  require_valid(dataset);
  const std::size_t n = dataset.samples.size();
  const std::size_t threads = resolve_threads(config.threads);

  std::vector<double> inf_raw(n, 0.0);
  std::vector<double> ratio(n, 0.0);
  std::vector<char> zero(n, 0);
  parallel_for(n, threads, [&](std::size_t i) {
    const auto spectrum = singular_values(dataset.samples[i].features);
    if (is_zero(spectrum)) {
      zero[i] = 1;
      return;
    }
    inf_raw[i] = informative_value(spectrum);
    ratio[i] = lsvr(spectrum);
  });

  Scoring out;
  out.samples.resize(n);
  const auto by_task = samples_by_task(dataset);
  out.tasks.resize(by_task.size());
  out.difficulty.assign(by_task.size(), 0.0);
  for (std::size_t t = 0; t < by_task.size(); ++t) {
    double sum = 0.0;
    std::size_t usable = 0;
    for (std::size_t i : by_task[t]) {
      if (zero[i]) continue;
      sum += ratio[i];
      ++usable;
    }
    if (usable == 0) {
      throw Error(ErrorKind::kDataQuality,
                  "every sample of task '" + dataset.tasks[t] + "' is a zero matrix");
    }
    out.difficulty[t] = sum / static_cast<double>(usable);
  }

  ClusterValues raw{inf_raw, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  std::vector<std::size_t> cluster_of(n, 0);
  parallel_for(by_task.size(), threads, [&](std::size_t t) {
    const auto& positions = by_task[t];
    TaskScores& task = out.tasks[t];
    task.samples = positions;
    const PointSet points = sample_points(dataset, positions);
    task.clusters = cluster_task(points, config.lambda, config.ward_variant);
    task.tau = representative_coefficients(task.clusters);

    const auto members = task.clusters.members();
    for (std::size_t c = 0; c < members.size(); ++c) {
      const auto& local = members[c];
      std::vector<double> inf(local.size());
      std::vector<double> coords;
      coords.reserve(local.size() * points.dim());
      for (std::size_t m = 0; m < local.size(); ++m) {
        inf[m] = inf_raw[positions[local[m]]];
        const auto p = points[local[m]];
        coords.insert(coords.end(), p.begin(), p.end());
      }
      const PointSet cluster_points(local.size(), points.dim(), std::move(coords));
      const auto distances = pairwise_distances(cluster_points);
      std::vector<std::size_t> idx(local.size());
      std::iota(idx.begin(), idx.end(), 0);
      const auto uni = unique_values(idx, distances, inf, config.uniqueness_aggregation);
      const auto rep = representative_values(idx, task.tau[c], inf);
      for (std::size_t m = 0; m < local.size(); ++m) {
        const std::size_t pos = positions[local[m]];
        raw.v_uni[pos] = uni[m];
        raw.v_rep[pos] = rep[m];
        cluster_of[pos] = c;
      }
    }
  });

  std::vector<std::size_t> task_of(n);
  for (std::size_t i = 0; i < n; ++i) task_of[i] = dataset.samples[i].task_id;
  const auto norm = normalize_per_task(raw, task_of);
  for (std::size_t i = 0; i < n; ++i) {
    const Sample& s = dataset.samples[i];
    ScoredSample& row = out.samples[i];
    row.id = s.id;
    row.task_id = s.task_id;
    row.rounds = s.rounds;
    row.cluster_id = cluster_of[i];
    row.v_inf_raw = inf_raw[i];
    row.v_inf = norm.v_inf[i];
    row.v_uni = norm.v_uni[i];
    row.v_rep = norm.v_rep[i];
    row.v_synergy = synergistic_value(row.v_inf, row.v_uni, row.v_rep, s.rounds);
  }
  return out;
}

SelectionResult select(const Dataset& dataset, const SelectionConfig& config) {
  const Scoring scoring = score(dataset, config);
  return select(dataset, scoring, config);
}

SelectionResult select(const Dataset& dataset, const Scoring& scoring,
                       const SelectionConfig& config) {
  config.validate();
  SelectionResult result;
  result.config = config;
  result.scored = scoring.samples;

  std::vector<std::size_t> sizes;
  for (const auto& task : scoring.tasks) sizes.push_back(task.samples.size());
  result.plan = task_proportions(scoring.difficulty, sizes, config.k);

  for (std::size_t t = 0; t < scoring.tasks.size(); ++t) {
    std::vector<std::size_t> order = scoring.tasks[t].samples;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto& sa = scoring.samples[a];
      const auto& sb = scoring.samples[b];
      if (sa.v_synergy != sb.v_synergy) return sa.v_synergy > sb.v_synergy;
      return sa.id < sb.id;
    });

    // An exact copy of an already chosen sample point adds nothing unique;
    // such samples wait until every distinct candidate has been taken.
    const std::size_t budget = result.plan.tasks[t].count;
    std::unordered_set<std::string_view> taken_points;
    std::vector<std::size_t> deferred;
    std::size_t picked = 0;
    for (std::size_t pos : order) {
      if (picked == budget) break;
      const auto p = last_token_feature(dataset.samples[pos]);
      const std::string_view key(reinterpret_cast<const char*>(p.data()), p.size_bytes());
      if (!taken_points.insert(key).second) {
        deferred.push_back(pos);
        continue;
      }
      result.selected.push_back(scoring.samples[pos].id);
      ++picked;
    }
    for (std::size_t i = 0; picked < budget && i < deferred.size(); ++i, ++picked) {
      result.selected.push_back(scoring.samples[deferred[i]].id);
    }
  }
  std::sort(result.selected.begin(), result.selected.end());
  return result;
}

PrincipleMetrics evaluate_subset(const Dataset& dataset, std::span<const SampleId> subset,
                                 std::span<const ClusterSet> cluster_sets) {
  require_valid(dataset);
  const auto view = make_view(dataset, cluster_sets);
  return evaluate(dataset, view, subset, [&](std::size_t pos) {
    const auto spectrum = singular_values(dataset.samples[pos].features);
    return is_zero(spectrum) ? 0.0 : informative_value(spectrum);
  });
}

PrincipleMetrics evaluate_subset(const Dataset& dataset, const Scoring& scoring,
                                 std::span<const SampleId> subset) {
  std::vector<ClusterSet> clusters;
  clusters.reserve(scoring.tasks.size());
  for (const auto& t : scoring.tasks) clusters.push_back(t.clusters);
  const auto view = make_view(dataset, clusters);
  return evaluate(dataset, view, subset,
                  [&](std::size_t pos) { return scoring.samples[pos].v_inf_raw; });
}

}  // namespace tailor
