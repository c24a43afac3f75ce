#include "civic/metrics.hpp"

#include <stdexcept>

namespace civic {

double MetricsReport::macro_f1() const {
  if (per_label.empty()) return 0.0;
  double s = 0.0;
  for (const auto& ls : per_label) s += ls.f1;
  return s / static_cast<double>(per_label.size());
}

MetricsReport compute_metrics(const std::vector<std::size_t>& truth,
                              const std::vector<std::size_t>& pred,
                              const std::vector<std::string>& labels) {
  if (truth.size() != pred.size()) throw std::invalid_argument("metrics: size mismatch");
  if (truth.empty()) throw std::invalid_argument("metrics: no examples");
  const std::size_t L = labels.size();

  MetricsReport r;
  r.labels = labels;
  r.confusion.assign(L, std::vector<std::size_t>(L, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= L || pred[i] >= L) throw std::invalid_argument("metrics: label index out of range");
    r.confusion[truth[i]][pred[i]]++;
    if (truth[i] == pred[i]) ++correct;
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());

  for (std::size_t l = 0; l < L; ++l) {
    std::size_t tp = r.confusion[l][l];
    std::size_t truth_count = 0, pred_count = 0;
    for (std::size_t j = 0; j < L; ++j) {
      truth_count += r.confusion[l][j];
      pred_count += r.confusion[j][l];
    }
    LabelStats ls;
    ls.label = labels[l];
    ls.support = truth_count;
    ls.precision = pred_count ? static_cast<double>(tp) / static_cast<double>(pred_count) : 0.0;
    ls.recall = truth_count ? static_cast<double>(tp) / static_cast<double>(truth_count) : 0.0;
    ls.f1 = (ls.precision + ls.recall > 0.0)
                ? 2.0 * ls.precision * ls.recall / (ls.precision + ls.recall)
                : 0.0;
    r.per_label.push_back(ls);
  }
  return r;
}

}  // namespace civic
