#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace civic {

struct LabelStats {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // true examples of this label
};

struct MetricsReport {
  double accuracy = 0.0;
  std::vector<LabelStats> per_label;
  // confusion[truth][predicted], ordered like `labels`
  std::vector<std::vector<std::size_t>> confusion;
  std::vector<std::string> labels;
  std::vector<double> fold_scores;  // filled by cross-validation only

  double macro_f1() const;
};

// truth/pred hold indices into `labels`.
MetricsReport compute_metrics(const std::vector<std::size_t>& truth,
                              const std::vector<std::size_t>& pred,
                              const std::vector<std::string>& labels);

}  // namespace civic
