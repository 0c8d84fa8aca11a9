#pragma once

#include <optional>
#include <string>
#include <vector>

namespace b3c {

// One evaluation-cadence row of training diagnostics. Loss/target columns
// aggregate the steps since the previous record (means, except target_q_max
// which is the interval maximum).
struct MetricsRecord {
  long step = 0;
  double eval_return = 0.0;
  double critic_loss = 0.0;
  double policy_loss_rl = 0.0;
  double policy_loss_bc = 0.0;
  double w = 0.0;
  double target_q_mean = 0.0;
  double target_q_max = 0.0;
  double clip_active_fraction = 0.0;
  std::optional<long> diverged_at;
};

struct MetricsLog {
  std::vector<MetricsRecord> records;

  std::optional<long> diverged_at() const {
    for (const MetricsRecord& r : records)
      if (r.diverged_at) return r.diverged_at;
    return std::nullopt;
  }
  double final_return() const { return records.empty() ? 0.0 : records.back().eval_return; }
  double max_target_q() const;
};

inline constexpr const char* kMetricsSchema = "b3c-metrics-v1";

// CSV with a schema header line; doubles are printed with %.17g so an
// encode/decode round trip is exact and re-runs diff bitwise.
std::string encode_metrics_csv(const MetricsLog& log);
MetricsLog decode_metrics_csv(const std::string& text);
void save_metrics(const MetricsLog& log, const std::string& path);
MetricsLog load_metrics(const std::string& path);

// Exact shortest-round-trip formatting used by every CSV writer.
std::string format_double(double v);

}  // namespace b3c
