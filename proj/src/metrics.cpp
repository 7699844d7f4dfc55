#include "sbd/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace sbd {

void Confusion::add(Label truth, Label predicted) {
  if (truth == Label::Seg)
    predicted == Label::Seg ? ++tp : ++fn;
  else
    predicted == Label::Seg ? ++fp : ++tn;
}

double accuracy(const Confusion& c) {
  const std::uint64_t total = c.total();
  if (total == 0) return 0.0;
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(total);
}

double precision_of(const Confusion& c, Label cls) {
  const std::uint64_t correct = cls == Label::Seg ? c.tp : c.tn;
  const std::uint64_t predicted = cls == Label::Seg ? c.tp + c.fp : c.tn + c.fn;
  if (predicted == 0) return 0.0;
  return static_cast<double>(correct) / static_cast<double>(predicted);
}

double recall_of(const Confusion& c, Label cls) {
  const std::uint64_t correct = cls == Label::Seg ? c.tp : c.tn;
  const std::uint64_t actual = cls == Label::Seg ? c.tp + c.fn : c.tn + c.fp;
  if (actual == 0) return 0.0;
  return static_cast<double>(correct) / static_cast<double>(actual);
}

double f1_from(double precision, double recall) {
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double f1_of(const Confusion& c, Label cls) {
  return f1_from(precision_of(c, cls), recall_of(c, cls));
}

MetricsReport metrics_from_confusion(const Confusion& c, double alpha) {
  MetricsReport r;
  r.confusion = c;
  r.samples = c.total();
  r.alpha = alpha;
  r.accuracy = accuracy(c);
  r.precision_seg = precision_of(c, Label::Seg);
  r.recall_seg = recall_of(c, Label::Seg);
  r.f1_seg = f1_from(r.precision_seg, r.recall_seg);
  r.precision_no_seg = precision_of(c, Label::NoSeg);
  r.recall_no_seg = recall_of(c, Label::NoSeg);
  r.f1_no_seg = f1_from(r.precision_no_seg, r.recall_no_seg);
  return r;
}

MetricsReport majority_baseline(std::span<const Label> truth) {
  Confusion c;
  for (const Label t : truth) c.add(t, Label::NoSeg);
  return metrics_from_confusion(c, 1.0);
}

std::string format_metrics(const MetricsReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "samples=%llu\n"
                "alpha=%.6f\n"
                "tp=%llu\n"
                "fp=%llu\n"
                "tn=%llu\n"
                "fn=%llu\n"
                "accuracy=%.6f\n"
                "precision_seg=%.6f\n"
                "recall_seg=%.6f\n"
                "f1_seg=%.6f\n"
                "precision_no_seg=%.6f\n"
                "recall_no_seg=%.6f\n"
                "f1_no_seg=%.6f\n",
                static_cast<unsigned long long>(r.samples), r.alpha,
                static_cast<unsigned long long>(r.confusion.tp),
                static_cast<unsigned long long>(r.confusion.fp),
                static_cast<unsigned long long>(r.confusion.tn),
                static_cast<unsigned long long>(r.confusion.fn), r.accuracy,
                r.precision_seg, r.recall_seg, r.f1_seg, r.precision_no_seg,
                r.recall_no_seg, r.f1_no_seg);
  return buf;
}

void write_metrics(const MetricsReport& r, std::ostream& out) { out << format_metrics(r); }

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

}  // namespace sbd
