#include <charconv>

#include "gcgail/errors.hpp"
#include "gcgail/evaluation.hpp"

namespace gcgail::eval {

void ConfusionMatrix::add(int prediction, int label) {
  if ((prediction != 0 && prediction != 1) || (label != 0 && label != 1)) {
    throw ValidationError("predictions and labels must be 0 or 1");
  }
  if (prediction == 1) {
    ++(label == 1 ? tp : fp);
  } else {
    ++(label == 1 ? fn : tn);
  }
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw ShapeError("confusion: " + std::to_string(predictions.size()) + " predictions vs " +
                     std::to_string(labels.size()) + " labels");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < labels.size(); ++i) cm.add(predictions[i], labels[i]);
  return cm;
}

namespace {

std::optional<double> ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricsReport metrics(const ConfusionMatrix& cm) {
  if (cm.tp < 0 || cm.fp < 0 || cm.fn < 0 || cm.tn < 0) {
    throw ValidationError("confusion counts must be non-negative");
  }
  if (cm.total() == 0) throw ValidationError("metrics of an empty confusion matrix");
  MetricsReport r;
  r.n_samples = cm.total();
  r.accuracy = ratio(cm.tp + cm.tn, cm.total());
  r.precision = ratio(cm.tp, cm.tp + cm.fp);
  r.recall = ratio(cm.tp, cm.tp + cm.fn);
  if (r.precision && r.recall && *r.precision + *r.recall > 0.0) {
    r.f1 = 2.0 * *r.precision * *r.recall / (*r.precision + *r.recall);
  }
  return r;
}

std::string format_metric(const std::optional<double>& v) {
  if (!v) return "NA";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, *v);
  return std::string(buf, res.ptr);
}

}  // namespace gcgail::eval
