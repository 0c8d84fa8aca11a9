#include "b3c/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "b3c/bytes.hpp"
#include "b3c/errors.hpp"

namespace b3c {
namespace {

constexpr const char* kHeader =
    "step,eval_return,critic_loss,policy_loss_rl,policy_loss_bc,w,target_q_mean,target_q_max,"
    "clip_active_fraction,diverged_at";

double parse_double(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty())
    throw IoError(IoErrorKind::kMalformed, "metrics: bad number in column " + what);
  return v;
}

long parse_long(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || s.empty())
    throw IoError(IoErrorKind::kMalformed, "metrics: bad integer in column " + what);
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

double MetricsLog::max_target_q() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const MetricsRecord& r : records) m = std::max(m, r.target_q_max);
  return m;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string encode_metrics_csv(const MetricsLog& log) {
  std::string out = std::string("# schema: ") + kMetricsSchema + "\n" + kHeader + "\n";
  for (const MetricsRecord& r : log.records) {
    out += std::to_string(r.step);
    out += ',';
    out += format_double(r.eval_return);
    out += ',';
    out += format_double(r.critic_loss);
    out += ',';
    out += format_double(r.policy_loss_rl);
    out += ',';
    out += format_double(r.policy_loss_bc);
    out += ',';
    out += format_double(r.w);
    out += ',';
    out += format_double(r.target_q_mean);
    out += ',';
    out += format_double(r.target_q_max);
    out += ',';
    out += format_double(r.clip_active_fraction);
    out += ',';
    if (r.diverged_at) out += std::to_string(*r.diverged_at);
    out += '\n';
  }
  return out;
}

MetricsLog decode_metrics_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != std::string("# schema: ") + kMetricsSchema)
    throw IoError(IoErrorKind::kMalformed, "metrics: missing or wrong schema line");
  if (!std::getline(in, line) || line != kHeader)
    throw IoError(IoErrorKind::kMalformed, "metrics: missing column header");
  MetricsLog log;
  long prev_step = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 10) throw IoError(IoErrorKind::kMalformed, "metrics: wrong column count");
    MetricsRecord r;
    r.step = parse_long(f[0], "step");
    r.eval_return = parse_double(f[1], "eval_return");
    r.critic_loss = parse_double(f[2], "critic_loss");
    r.policy_loss_rl = parse_double(f[3], "policy_loss_rl");
    r.policy_loss_bc = parse_double(f[4], "policy_loss_bc");
    r.w = parse_double(f[5], "w");
    r.target_q_mean = parse_double(f[6], "target_q_mean");
    r.target_q_max = parse_double(f[7], "target_q_max");
    r.clip_active_fraction = parse_double(f[8], "clip_active_fraction");
    if (!f[9].empty()) r.diverged_at = parse_long(f[9], "diverged_at");
    if (r.step <= prev_step)
      throw IoError(IoErrorKind::kMalformed, "metrics: steps not strictly increasing");
    prev_step = r.step;
    log.records.push_back(r);
  }
  return log;
}

void save_metrics(const MetricsLog& log, const std::string& path) {
  write_file(path, encode_metrics_csv(log));
}

MetricsLog load_metrics(const std::string& path) { return decode_metrics_csv(read_file(path)); }

}  // namespace b3c
