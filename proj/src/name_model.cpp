#include "civic/name_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "civic/common.hpp"
#include "civic/csv.hpp"
#include "civic/parallel.hpp"
#include "civic/rng.hpp"

namespace civic::names {

using nlohmann::json;

std::string normalize_name(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (c >= 'A' && c <= 'Z') out.push_back(static_cast<char>(c - 'A' + 'a'));
    else if (c >= 'a' && c <= 'z') out.push_back(c);
  }
  if (out.empty()) throw ConfigError("empty name");
  return out;
}

AlphabetCounts letter_counts(const std::string& name) {
  std::string norm = normalize_name(name);
  AlphabetCounts counts{};
  for (char c : norm) counts[static_cast<std::size_t>(c - 'a')]++;
  return counts;
}

Task task_from_string(const std::string& s) {
  if (s == "gender") return Task::Gender;
  if (s == "race") return Task::Race;
  throw ConfigError("unknown task: " + s);
}

std::string to_string(Task t) { return t == Task::Gender ? "gender" : "race"; }

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "naive_bayes") return Algorithm::NaiveBayes;
  if (s == "knn") return Algorithm::Knn;
  if (s == "decision_tree") return Algorithm::DecisionTree;
  if (s == "bagged_trees") return Algorithm::BaggedTrees;
  throw ConfigError("unknown algorithm: " + s);
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::NaiveBayes: return "naive_bayes";
    case Algorithm::Knn: return "knn";
    case Algorithm::DecisionTree: return "decision_tree";
    case Algorithm::BaggedTrees: return "bagged_trees";
  }
  return "?";
}

std::vector<NameExample> load_examples_csv(const std::string& path) {
  auto rows = csv::parse_file(path);
  if (rows.empty()) throw ConfigError(path + ": empty file");
  if (rows[0].size() < 2 || rows[0][0] != "name" || rows[0][1] != "label")
    throw ConfigError(path + ": expected header name,label");
  std::vector<NameExample> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() < 2) throw ConfigError(path + ": row " + std::to_string(r + 1) + " too short");
    out.push_back({rows[r][0], rows[r][1]});
  }
  return out;
}

// ---------------------------------------------------------------------------
// training

namespace {

struct Dataset {
  std::vector<AlphabetCounts> x;
  std::vector<std::size_t> y;
  std::vector<std::string> labels;
};

Dataset featurize(const std::vector<NameExample>& examples,
                  const std::vector<std::string>& expected_labels) {
  if (examples.empty()) throw ConfigError("train: no examples");
  Dataset d;
  if (expected_labels.empty()) {
    std::set<std::string> uniq;
    for (const auto& e : examples) uniq.insert(e.label);
    d.labels.assign(uniq.begin(), uniq.end());
  } else {
    d.labels = expected_labels;
    std::sort(d.labels.begin(), d.labels.end());
  }
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < d.labels.size(); ++i) index[d.labels[i]] = i;

  std::vector<std::size_t> counts(d.labels.size(), 0);
  for (const auto& e : examples) {
    auto it = index.find(e.label);
    if (it == index.end()) throw ConfigError("train: unexpected label '" + e.label + "'");
    d.x.push_back(letter_counts(e.name));
    d.y.push_back(it->second);
    counts[it->second]++;
  }
  for (std::size_t i = 0; i < d.labels.size(); ++i)
    if (counts[i] == 0) throw ConfigError("train: label '" + d.labels[i] + "' has zero examples");
  if (d.labels.size() < 2) throw ConfigError("train: need at least two labels");
  return d;
}

NaiveBayesState train_nb(const Dataset& d) {
  const std::size_t L = d.labels.size();
  NaiveBayesState s;
  s.log_prior.resize(L);
  s.log_letter.assign(L, {});
  std::vector<std::size_t> class_n(L, 0);
  std::vector<std::array<std::int64_t, 26>> letter_n(L, std::array<std::int64_t, 26>{});
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    class_n[d.y[i]]++;
    for (int l = 0; l < 26; ++l) letter_n[d.y[i]][l] += d.x[i][l];
  }
  for (std::size_t c = 0; c < L; ++c) {
    s.log_prior[c] = std::log(static_cast<double>(class_n[c]) / static_cast<double>(d.x.size()));
    std::int64_t total = std::accumulate(letter_n[c].begin(), letter_n[c].end(), std::int64_t{0});
    for (int l = 0; l < 26; ++l) {
      // Laplace alpha = 1 over the 26-letter alphabet
      double p = static_cast<double>(letter_n[c][l] + 1) / static_cast<double>(total + 26);
      s.log_letter[c][l] = std::log(p);
    }
  }
  return s;
}

double gini(const std::vector<std::size_t>& class_counts, std::size_t total) {
  if (total == 0) return 0.0;
  double g = 1.0;
  for (std::size_t c : class_counts) {
    double p = static_cast<double>(c) / static_cast<double>(total);
    g -= p * p;
  }
  return g;
}

struct SplitChoice {
  int letter = -1;
  int threshold = 0;
  double score = 0.0;  // weighted Gini after the split
};

void build_tree(const Dataset& d, const std::vector<std::size_t>& idx, int depth,
                const Hyperparams& hp, TreeState& tree) {
  const std::size_t L = d.labels.size();
  std::vector<std::size_t> class_counts(L, 0);
  for (std::size_t i : idx) class_counts[d.y[i]]++;

  std::size_t best_class = 0;
  for (std::size_t c = 1; c < L; ++c)
    if (class_counts[c] > class_counts[best_class]) best_class = c;
  const bool pure = class_counts[best_class] == idx.size();

  auto make_leaf = [&]() {
    TreeNode leaf;
    leaf.letter = -1;
    leaf.label = best_class;
    leaf.purity = static_cast<double>(class_counts[best_class]) / static_cast<double>(idx.size());
    tree.nodes.push_back(leaf);
  };

  if (pure || depth >= hp.dt_max_depth ||
      idx.size() < 2 * static_cast<std::size_t>(hp.dt_min_leaf)) {
    make_leaf();
    return;
  }

  const double parent_gini = gini(class_counts, idx.size());
  SplitChoice best{-1, 0, parent_gini};

  for (int letter = 0; letter < 26; ++letter) {
    int maxv = 0;
    for (std::size_t i : idx) maxv = std::max(maxv, d.x[i][letter]);
    if (maxv == 0) continue;
    // class histogram per feature value, then sweep thresholds in order
    std::vector<std::vector<std::size_t>> hist(static_cast<std::size_t>(maxv) + 1,
                                               std::vector<std::size_t>(L, 0));
    for (std::size_t i : idx) hist[static_cast<std::size_t>(d.x[i][letter])][d.y[i]]++;
    std::vector<std::size_t> left(L, 0);
    std::size_t left_n = 0;
    for (int t = 0; t < maxv; ++t) {
      for (std::size_t c = 0; c < L; ++c) {
        left[c] += hist[static_cast<std::size_t>(t)][c];
        left_n += hist[static_cast<std::size_t>(t)][c];
      }
      std::size_t right_n = idx.size() - left_n;
      if (left_n < static_cast<std::size_t>(hp.dt_min_leaf) ||
          right_n < static_cast<std::size_t>(hp.dt_min_leaf))
        continue;
      std::vector<std::size_t> right(L);
      for (std::size_t c = 0; c < L; ++c) right[c] = class_counts[c] - left[c];
      double score = (static_cast<double>(left_n) * gini(left, left_n) +
                      static_cast<double>(right_n) * gini(right, right_n)) /
                     static_cast<double>(idx.size());
      if (score < best.score - 1e-12) best = {letter, t, score};
    }
  }

  if (best.letter < 0) {
    make_leaf();
    return;
  }

  std::vector<std::size_t> left_idx, right_idx;
  for (std::size_t i : idx) {
    if (d.x[i][best.letter] <= best.threshold) left_idx.push_back(i);
    else right_idx.push_back(i);
  }

  const int node_pos = static_cast<int>(tree.nodes.size());
  TreeNode node;
  node.letter = best.letter;
  node.threshold = best.threshold;
  tree.nodes.push_back(node);
  tree.nodes[static_cast<std::size_t>(node_pos)].left = static_cast<int>(tree.nodes.size());
  build_tree(d, left_idx, depth + 1, hp, tree);
  tree.nodes[static_cast<std::size_t>(node_pos)].right = static_cast<int>(tree.nodes.size());
  build_tree(d, right_idx, depth + 1, hp, tree);
}

TreeState train_tree(const Dataset& d, const Hyperparams& hp) {
  TreeState tree;
  std::vector<std::size_t> all(d.x.size());
  std::iota(all.begin(), all.end(), 0);
  build_tree(d, all, 0, hp, tree);
  return tree;
}

std::pair<std::size_t, double> tree_predict(const TreeState& tree, const AlphabetCounts& counts) {
  std::size_t node = 0;
  while (tree.nodes[node].letter >= 0) {
    const TreeNode& n = tree.nodes[node];
    node = static_cast<std::size_t>(counts[static_cast<std::size_t>(n.letter)] <= n.threshold
                                        ? n.left
                                        : n.right);
  }
  return {tree.nodes[node].label, tree.nodes[node].purity};
}

BaggedState train_bagged(const Dataset& d, const Hyperparams& hp, std::uint64_t seed) {
  const std::size_t n = d.x.size();
  const std::size_t L = d.labels.size();
  BaggedState s;
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> oob_votes(n, std::vector<std::size_t>(L, 0));
  for (int b = 0; b < hp.bag_trees; ++b) {
    std::vector<char> in_bag(n, 0);
    Dataset boot;
    boot.labels = d.labels;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t pick = rng.bounded(n);
      in_bag[pick] = 1;
      boot.x.push_back(d.x[pick]);
      boot.y.push_back(d.y[pick]);
    }
    s.trees.push_back(train_tree(boot, hp));
    for (std::size_t i = 0; i < n; ++i)
      if (!in_bag[i]) oob_votes[i][tree_predict(s.trees.back(), d.x[i]).first]++;
  }
  std::size_t correct = 0, counted = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t total = std::accumulate(oob_votes[i].begin(), oob_votes[i].end(), std::size_t{0});
    if (total == 0) continue;
    std::size_t winner = 0;
    for (std::size_t c = 1; c < L; ++c)
      if (oob_votes[i][c] > oob_votes[i][winner]) winner = c;
    ++counted;
    if (winner == d.y[i]) ++correct;
  }
  s.oob_accuracy = counted ? static_cast<double>(correct) / static_cast<double>(counted) : 0.0;
  return s;
}

}  // namespace

NameModel train(const std::vector<NameExample>& examples, Task task, Algorithm algorithm,
                const Hyperparams& params, std::uint64_t seed,
                const std::vector<std::string>& expected_labels) {
  Dataset d = featurize(examples, expected_labels);
  NameModel m;
  m.task = task;
  m.algorithm = algorithm;
  m.labels = d.labels;
  m.training_seed = seed;
  m.params = params;
  switch (algorithm) {
    case Algorithm::NaiveBayes:
      m.state = train_nb(d);
      break;
    case Algorithm::Knn:
      m.state = KnnState{std::move(d.x), std::move(d.y)};
      break;
    case Algorithm::DecisionTree:
      m.state = train_tree(d, params);
      break;
    case Algorithm::BaggedTrees:
      m.state = train_bagged(d, params, seed);
      break;
  }
  return m;
}

std::pair<std::size_t, double> NameModel::predict_counts(const AlphabetCounts& counts) const {
  const std::size_t L = labels.size();
  if (const auto* nb = std::get_if<NaiveBayesState>(&state)) {
    std::vector<double> score(L);
    for (std::size_t c = 0; c < L; ++c) {
      double s = nb->log_prior[c];
      for (int l = 0; l < 26; ++l) s += counts[static_cast<std::size_t>(l)] * nb->log_letter[c][l];
      score[c] = s;
    }
    std::size_t arg = 0;
    for (std::size_t c = 1; c < L; ++c)
      if (score[c] > score[arg]) arg = c;
    double mx = score[arg];
    double denom = 0.0;
    for (double s : score) denom += std::exp(s - mx);
    return {arg, 1.0 / denom};
  }
  if (const auto* knn = std::get_if<KnnState>(&state)) {
    const std::size_t n = knn->points.size();
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(params.knn_k), n);
    std::vector<std::pair<long, std::size_t>> dist(n);  // (squared distance, index)
    for (std::size_t i = 0; i < n; ++i) {
      long d2 = 0;
      for (int l = 0; l < 26; ++l) {
        long diff = counts[static_cast<std::size_t>(l)] - knn->points[i][static_cast<std::size_t>(l)];
        d2 += diff * diff;
      }
      dist[i] = {d2, i};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<long>(k), dist.end());
    std::vector<std::size_t> votes(L, 0);
    for (std::size_t j = 0; j < k; ++j) votes[knn->point_labels[dist[j].second]]++;
    std::size_t winner = 0;  // ties fall to the lexicographically smallest label
    for (std::size_t c = 1; c < L; ++c)
      if (votes[c] > votes[winner]) winner = c;
    return {winner, static_cast<double>(votes[winner]) / static_cast<double>(k)};
  }
  if (const auto* tree = std::get_if<TreeState>(&state)) return tree_predict(*tree, counts);
  const auto& bag = std::get<BaggedState>(state);
  std::vector<std::size_t> votes(L, 0);
  for (const auto& t : bag.trees) votes[tree_predict(t, counts).first]++;
  std::size_t winner = 0;
  for (std::size_t c = 1; c < L; ++c)
    if (votes[c] > votes[winner]) winner = c;
  return {winner, static_cast<double>(votes[winner]) / static_cast<double>(bag.trees.size())};
}

Prediction NameModel::predict(const std::string& name) const {
  auto [cls, score] = predict_counts(letter_counts(name));
  return {labels[cls], score};
}

std::pair<std::vector<NameExample>, std::vector<NameExample>> split_train_test(
    const std::vector<NameExample>& data, double train_fraction, std::uint64_t seed) {
  if (data.size() < 2) throw ConfigError("split: need at least 2 examples");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError("split: train fraction must be in (0,1)");
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(idx);
  const auto train_n = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(data.size())));
  std::pair<std::vector<NameExample>, std::vector<NameExample>> out;
  for (std::size_t i = 0; i < idx.size(); ++i)
    (i < train_n ? out.first : out.second).push_back(data[idx[i]]);
  return out;
}

MetricsReport evaluate(const NameModel& model, const std::vector<NameExample>& test) {
  if (test.empty()) throw ConfigError("evaluate: empty test set");
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < model.labels.size(); ++i) index[model.labels[i]] = i;
  std::vector<std::size_t> truth, pred;
  for (const auto& e : test) {
    auto it = index.find(e.label);
    if (it == index.end()) throw ConfigError("evaluate: unknown label '" + e.label + "'");
    truth.push_back(it->second);
    pred.push_back(model.predict_counts(letter_counts(e.name)).first);
  }
  return compute_metrics(truth, pred, model.labels);
}

MetricsReport cross_validate(const std::vector<NameExample>& data, std::size_t k, Task task,
                             Algorithm algorithm, const Hyperparams& params, std::uint64_t seed) {
  if (data.size() < k) throw ConfigError("cross-validate: fewer examples than folds");
  if (k < 2) throw ConfigError("cross-validate: need k >= 2");
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(idx);

  // label set fixed over the whole dataset so fold models agree on indices
  std::set<std::string> uniq;
  for (const auto& e : data) uniq.insert(e.label);
  std::vector<std::string> labels(uniq.begin(), uniq.end());
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < labels.size(); ++i) index[labels[i]] = i;

  std::vector<std::size_t> fold_of(data.size());
  for (std::size_t i = 0; i < idx.size(); ++i) fold_of[idx[i]] = i % k;

  std::vector<std::size_t> truth(data.size()), pred(data.size());
  std::vector<double> fold_scores;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<NameExample> train_set;
    std::vector<std::size_t> test_idx;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (fold_of[i] == f) test_idx.push_back(i);
      else train_set.push_back(data[i]);
    }
    NameModel m = train(train_set, task, algorithm, params, seed + f + 1, labels);
    std::size_t correct = 0;
    for (std::size_t i : test_idx) {
      truth[i] = index.at(data[i].label);
      pred[i] = m.predict_counts(letter_counts(data[i].name)).first;
      if (pred[i] == truth[i]) ++correct;
    }
    fold_scores.push_back(test_idx.empty()
                              ? 0.0
                              : static_cast<double>(correct) / static_cast<double>(test_idx.size()));
  }
  MetricsReport r = compute_metrics(truth, pred, labels);
  r.fold_scores = fold_scores;
  return r;
}

std::vector<Prediction> predict_batch_serial(const NameModel& model,
                                             const std::vector<std::string>& names) {
  std::vector<Prediction> out(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) out[i] = model.predict(names[i]);
  return out;
}

std::vector<Prediction> predict_batch(const NameModel& model,
                                      const std::vector<std::string>& names) {
  std::vector<Prediction> out(names.size());
  par::parallel_for(names.size(), [&](std::size_t i) { out[i] = model.predict(names[i]); });
  return out;
}

// ---------------------------------------------------------------------------
// persistence

namespace {

json tree_to_json(const TreeState& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes)
    nodes.push_back({{"letter", n.letter},
                     {"threshold", n.threshold},
                     {"left", n.left},
                     {"right", n.right},
                     {"label", n.label},
                     {"purity", n.purity}});
  return {{"nodes", nodes}};
}

TreeState tree_from_json(const json& j) {
  TreeState t;
  for (const auto& n : j.at("nodes")) {
    TreeNode node;
    node.letter = n.at("letter").get<int>();
    node.threshold = n.at("threshold").get<int>();
    node.left = n.at("left").get<int>();
    node.right = n.at("right").get<int>();
    node.label = n.at("label").get<std::size_t>();
    node.purity = n.at("purity").get<double>();
    t.nodes.push_back(node);
  }
  return t;
}

}  // namespace

json NameModel::to_json() const {
  json j;
  j["format_version"] = 1;
  j["task"] = names::to_string(task);
  j["algorithm"] = names::to_string(algorithm);
  j["labels"] = labels;
  j["seed"] = training_seed;
  j["hyperparams"] = {{"knn_k", params.knn_k},
                      {"dt_max_depth", params.dt_max_depth},
                      {"dt_min_leaf", params.dt_min_leaf},
                      {"bag_trees", params.bag_trees}};
  json p;
  if (const auto* nb = std::get_if<NaiveBayesState>(&state)) {
    p["log_prior"] = nb->log_prior;
    p["log_letter"] = nb->log_letter;
  } else if (const auto* knn = std::get_if<KnnState>(&state)) {
    p["points"] = knn->points;
    p["point_labels"] = knn->point_labels;
  } else if (const auto* tree = std::get_if<TreeState>(&state)) {
    p = tree_to_json(*tree);
  } else {
    const auto& bag = std::get<BaggedState>(state);
    json trees = json::array();
    for (const auto& t : bag.trees) trees.push_back(tree_to_json(t));
    p["trees"] = trees;
    p["oob_accuracy"] = bag.oob_accuracy;
  }
  j["parameters"] = p;
  return j;
}

NameModel NameModel::from_json(const json& j) {
  if (j.at("format_version").get<int>() != 1) throw ConfigError("model: unsupported format version");
  NameModel m;
  m.task = task_from_string(j.at("task").get<std::string>());
  m.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
  m.labels = j.at("labels").get<std::vector<std::string>>();
  m.training_seed = j.at("seed").get<std::uint64_t>();
  const auto& h = j.at("hyperparams");
  m.params.knn_k = h.at("knn_k").get<int>();
  m.params.dt_max_depth = h.at("dt_max_depth").get<int>();
  m.params.dt_min_leaf = h.at("dt_min_leaf").get<int>();
  m.params.bag_trees = h.at("bag_trees").get<int>();
  const auto& p = j.at("parameters");
  switch (m.algorithm) {
    case Algorithm::NaiveBayes: {
      NaiveBayesState nb;
      nb.log_prior = p.at("log_prior").get<std::vector<double>>();
      nb.log_letter = p.at("log_letter").get<std::vector<std::array<double, 26>>>();
      m.state = std::move(nb);
      break;
    }
    case Algorithm::Knn: {
      KnnState knn;
      knn.points = p.at("points").get<std::vector<AlphabetCounts>>();
      knn.point_labels = p.at("point_labels").get<std::vector<std::size_t>>();
      m.state = std::move(knn);
      break;
    }
    case Algorithm::DecisionTree:
      m.state = tree_from_json(p);
      break;
    case Algorithm::BaggedTrees: {
      BaggedState bag;
      for (const auto& t : p.at("trees")) bag.trees.push_back(tree_from_json(t));
      bag.oob_accuracy = p.at("oob_accuracy").get<double>();
      m.state = std::move(bag);
      break;
    }
  }
  return m;
}

void NameModel::save(const std::string& path) const { write_text_file(path, to_json().dump(2) + "\n"); }

NameModel NameModel::load(const std::string& path) {
  return from_json(json::parse(read_text_file(path)));
}

}  // namespace civic::names
