#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

#include "sbd/label.hpp"

namespace sbd {

// SEG is the positive class.
struct Confusion {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  void add(Label truth, Label predicted);
};

// Zero-denominator conventions: precision is 0 when the class was never
// predicted, recall is 0 when the class has no true samples, F1 is 0 when
// precision + recall is 0.
double accuracy(const Confusion& c);
double precision_of(const Confusion& c, Label cls);
double recall_of(const Confusion& c, Label cls);
double f1_from(double precision, double recall);
double f1_of(const Confusion& c, Label cls);

struct MetricsReport {
  Confusion confusion;
  std::uint64_t samples = 0;
  double alpha = 1.0;
  double accuracy = 0.0;
  double precision_seg = 0.0, recall_seg = 0.0, f1_seg = 0.0;
  double precision_no_seg = 0.0, recall_no_seg = 0.0, f1_no_seg = 0.0;
};

MetricsReport metrics_from_confusion(const Confusion& c, double alpha);

// Everything predicted NO_SEG: accuracy equals the NO_SEG prior, SEG metrics
// are all zero. The analytic stand-in for an untrained network.
MetricsReport majority_baseline(std::span<const Label> truth);

// key=value lines in a fixed order, one per line.
void write_metrics(const MetricsReport& r, std::ostream& out);
std::string format_metrics(const MetricsReport& r);

// Display rounding used in tables: 3 decimals, from unrounded internals.
double round3(double v);

}  // namespace sbd
