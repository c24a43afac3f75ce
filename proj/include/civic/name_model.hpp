#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "civic/metrics.hpp"

namespace civic::names {

using AlphabetCounts = std::array<int, 26>;

// Lowercase, letters only. Throws ConfigError when nothing is left.
std::string normalize_name(const std::string& name);
AlphabetCounts letter_counts(const std::string& name);

enum class Task { Gender, Race };
enum class Algorithm { NaiveBayes, Knn, DecisionTree, BaggedTrees };

Task task_from_string(const std::string& s);
std::string to_string(Task t);
Algorithm algorithm_from_string(const std::string& s);
std::string to_string(Algorithm a);

struct NameExample {
  std::string name;
  std::string label;
};

std::vector<NameExample> load_examples_csv(const std::string& path);

struct Hyperparams {
  int knn_k = 5;
  int dt_max_depth = 12;
  int dt_min_leaf = 5;
  int bag_trees = 25;
};

struct Prediction {
  std::string label;
  double score = 0.0;  // posterior or vote fraction, in (0, 1]
};

struct NaiveBayesState {
  std::vector<double> log_prior;                    // per label
  std::vector<std::array<double, 26>> log_letter;   // per label
};

struct KnnState {
  std::vector<AlphabetCounts> points;
  std::vector<std::size_t> point_labels;
};

struct TreeNode {
  int letter = -1;        // -1 marks a leaf
  int threshold = 0;      // left branch when counts[letter] <= threshold
  int left = -1;
  int right = -1;
  std::size_t label = 0;  // leaf majority class
  double purity = 1.0;    // leaf majority fraction
};

struct TreeState {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
};

struct BaggedState {
  std::vector<TreeState> trees;
  double oob_accuracy = 0.0;
};

class NameModel {
 public:
  Task task = Task::Gender;
  Algorithm algorithm = Algorithm::NaiveBayes;
  std::vector<std::string> labels;  // sorted, defines class indices
  std::uint64_t training_seed = 0;
  Hyperparams params;
  std::variant<NaiveBayesState, KnnState, TreeState, BaggedState> state;

  Prediction predict(const std::string& name) const;
  // (class index, score) for a precomputed feature vector
  std::pair<std::size_t, double> predict_counts(const AlphabetCounts& counts) const;

  nlohmann::json to_json() const;
  static NameModel from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static NameModel load(const std::string& path);
};

// `expected_labels` empty: label set is taken from the data. Non-empty: the
// model uses exactly that set and every label must appear in the data.
NameModel train(const std::vector<NameExample>& examples, Task task, Algorithm algorithm,
                const Hyperparams& params, std::uint64_t seed,
                const std::vector<std::string>& expected_labels = {});

std::pair<std::vector<NameExample>, std::vector<NameExample>> split_train_test(
    const std::vector<NameExample>& data, double train_fraction, std::uint64_t seed);

MetricsReport evaluate(const NameModel& model, const std::vector<NameExample>& test);

MetricsReport cross_validate(const std::vector<NameExample>& data, std::size_t k, Task task,
                             Algorithm algorithm, const Hyperparams& params, std::uint64_t seed);

std::vector<Prediction> predict_batch_serial(const NameModel& model,
                                             const std::vector<std::string>& names);
std::vector<Prediction> predict_batch(const NameModel& model,
                                      const std::vector<std::string>& names);

}  // namespace civic::names
