#include <charconv>
#include <cmath>

#include "entlab/csv.hpp"

namespace entlab {

std::string format_double(double v) {
  // Shortest decimal form that parses back to the same bits.
  char buf[40];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw numerical_error("format_double: buffer");
  return std::string(buf, p);
}

namespace {

constexpr double k_log2 = 0.69314718055994530941723212145818;

double scaled(double v, int log_base) {
  return log_base == 2 ? v / k_log2 : v;
}

}  // namespace

void write_points_csv(std::ostream& out, std::span<const sweep_point> points,
                      int log_base) {
  out << points_csv_header << "\n";
  for (const auto& p : points) {
    out << family_name(p.fam) << ',' << p.l_a << ',' << p.l_b << ','
        << format_double(p.gamma) << ',' << format_double(p.param) << ','
        << format_double(p.lambda) << ',' << format_double(p.lambda_ent) << ','
        << format_double(scaled(p.stats.r0_mean, log_base)) << ','
        << format_double(scaled(p.stats.r0_err, log_base)) << ','
        << format_double(scaled(p.stats.r1_mean, log_base)) << ','
        << format_double(scaled(p.stats.r1_err, log_base)) << ','
        << format_double(scaled(p.stats.r2_mean, log_base)) << ','
        << format_double(scaled(p.stats.r2_err, log_base)) << ','
        << format_double(p.stats.q_mean) << ','
        << format_double(p.stats.q_err) << ',' << p.stats.n << ',' << p.seed
        << "\n";
  }
}

void write_derived_csv(std::ostream& out, std::span<const derived_row> rows) {
  out << derived_csv_header << "\n";
  for (const auto& r : rows)
    out << r.record << ',' << r.family << ',' << r.l_a << ',' << r.l_b << ','
        << r.name << ',' << format_double(r.value) << "\n";
}

void write_theory_csv(std::ostream& out, std::span<const theory_row> rows,
                      int log_base) {
  out << theory_csv_header << "\n";
  for (const auto& r : rows)
    out << format_double(r.lambda) << ',' << format_double(r.lambda_ent) << ','
        << format_double(scaled(r.r1_pred, log_base)) << ','
        << format_double(scaled(r.r2_pred, log_base)) << ','
        << format_double(scaled(r.r0_pred, log_base)) << ','
        << format_double(r.q_pred) << "\n";
}

}  // namespace entlab
